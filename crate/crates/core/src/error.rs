use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("{line}:{col}: duplicate #external directive for `{atom}`")]
    DuplicateExternal {
        line: usize,
        col: usize,
        atom: String,
    },

    #[error("line {line}: theory atom `{atom}` is both founded (rule head) and external (body occurrence, complement of one, or #external)")]
    PartitionConflict { atom: String, line: usize },

    #[error("invalid theory atom: {0}")]
    InvalidAtom(String),

    #[error("universe is not closed under complement: `{atom}` lacks its complement")]
    UniverseNotClosed { atom: String },

    #[error("universe has {size} atoms, above the cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },

    #[error("program mentions {count} atoms, above the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },

    #[error("search box has {cells} cells, above the cap of {cap}")]
    BoxTooLarge { cells: u128, cap: u128 },

    #[error("{splits} disequality case splits exceed the cap of {cap}")]
    CaseSplitLimit { splits: u128, cap: u128 },

    #[error("theory `{theory}` does not provide an absolute complement")]
    NotAbsolute { theory: String },

    #[error("`{atom}` is not a difference constraint")]
    NotDifference { atom: String },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("shift_head requires a theory atom in the head")]
    HeadNotTheory,

    #[error("variable `{var}` is used with incompatible domains")]
    SignatureMismatch { var: String },

    #[error("variable `{var}` is not declared in the signature")]
    UndeclaredVariable { var: String },

    #[error("user variable `{var}` collides with the reserved auxiliary prefix `__p_`")]
    AuxNameCollision { var: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
