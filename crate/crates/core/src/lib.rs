//! ASP modulo linear theories: `⟨𝔗,ℰ⟩`-stable models by program
//! transformation, HT_c equilibrium models of the `τ` and `τ2`
//! translations, and finite-box equivalence checks.

pub mod corpus;
pub mod engine;
pub mod error;
pub mod htc;
pub mod stable;
pub mod syntax;
pub mod theory_core;
pub mod theory_lin;
pub mod translate;

pub use error::{Error, Result};
