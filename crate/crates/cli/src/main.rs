//! `amt`: solve, cross-check and compare T-logic programs and HT_c theories.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amt_core::corpus::{generate, CorpusConfig};
use amt_core::engine::{
    run_diff, run_equiv, run_solve, EquivInput, Fault, Mode, Report, RunConfig,
};
use amt_core::htc::parse_formulas;
use amt_core::syntax::{parse_program_with, ParseOptions, Program};
use amt_core::theory_lin::{Bounds, Interval, TheoryKind, DEFAULT_BOX_CAP, DEFAULT_SPLIT_CAP};
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "amt",
    version,
    about = "Stable models for ASP modulo linear theories"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the stable models of a program in one mode.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "transform")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Run transform, htc-tau and htc-tau2 and compare their model sets.
    Diff {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two theories (or programs, translated with tau) over the box.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// How to read the inputs; `auto` treats `.lp` files as programs.
        #[arg(long, default_value = "auto")]
        input: InputArg,
        #[command(flatten)]
        common: Common,
    },
    /// Print seeded random programs.
    Corpus {
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "lin-int")]
    theory: TheoryArg,
    /// Default box for every variable.
    #[arg(long, default_value = "-10..10", allow_hyphen_values = true)]
    bounds: String,
    /// Per-variable box, e.g. `x=-3..3`; repeatable.
    #[arg(long = "bound-var", allow_hyphen_values = true)]
    bound_var: Vec<String>,
    #[arg(long, default_value = "text")]
    format: FormatArg,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = amt_core::stable::DEFAULT_ATOM_CAP)]
    max_atoms: usize,
    #[arg(long, default_value_t = amt_core::theory_core::DEFAULT_UNIVERSE_CAP)]
    max_universe: usize,
    #[arg(long, default_value_t = DEFAULT_BOX_CAP)]
    max_cells: u128,
    #[arg(long, default_value_t = DEFAULT_SPLIT_CAP)]
    max_splits: u128,
    /// Sort and merge `&sum` terms while parsing.
    #[arg(long)]
    normalize: bool,
    #[arg(long, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Transform,
    HtcTau,
    HtcTau2,
    Diff,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    LinInt,
    DiffInt,
    LinRat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputArg {
    Auto,
    Theory,
    Program,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DropChoices,
}

impl Common {
    fn config(&self, mode: Mode) -> anyhow::Result<RunConfig> {
        let iv: Interval = self.bounds.parse().context("--bounds")?;
        let mut bounds = Bounds::uniform(iv.lo, iv.hi)?;
        for spec in &self.bound_var {
            let (var, iv) = Bounds::parse_var_override(spec).context("--bound-var")?;
            bounds = bounds.with_var(var, iv);
        }
        Ok(RunConfig {
            theory: match self.theory {
                TheoryArg::LinInt => TheoryKind::LinInt,
                TheoryArg::DiffInt => TheoryKind::DiffInt,
                TheoryArg::LinRat => TheoryKind::LinRat,
            },
            bounds,
            mode,
            max_atoms: self.max_atoms,
            max_universe: self.max_universe,
            max_cells: self.max_cells,
            max_splits: self.max_splits,
            fault: self
                .inject_fault
                .map(|FaultArg::DropChoices| Fault::DropChoices),
        })
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            normalize: self.normalize,
        }
    }

    fn setup(&self) -> anyhow::Result<()> {
        if let Some(n) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global()
                .map_err(|e| anyhow!("--jobs: {e}"))?;
        }
        Ok(())
    }

    fn emit(&self, report: &Report) -> anyhow::Result<()> {
        let text = match self.format {
            FormatArg::Json => serde_json::to_string_pretty(report)? + "\n",
            FormatArg::Text => report.to_text(),
        };
        std::io::stdout().write_all(text.as_bytes())?;
        Ok(())
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path, opts: ParseOptions) -> anyhow::Result<Program> {
    parse_program_with(&read(path)?, opts).with_context(|| path.display().to_string())
}

fn load_equiv_input(
    path: &Path,
    input: InputArg,
    opts: ParseOptions,
) -> anyhow::Result<EquivInput> {
    let as_program = match input {
        InputArg::Program => true,
        InputArg::Theory => false,
        InputArg::Auto => path.extension().is_some_and(|e| e == "lp"),
    };
    if as_program {
        return Ok(EquivInput::Program(load_program(path, opts)?));
    }
    let text = read(path)?;
    let fs = parse_formulas(&text).with_context(|| path.display().to_string())?;
    Ok(EquivInput::Theory(fs))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Solve { file, mode, common } => {
            common.setup()?;
            let mode = match mode {
                ModeArg::Transform => Mode::Transform,
                ModeArg::HtcTau => Mode::HtcTau,
                ModeArg::HtcTau2 => Mode::HtcTau2,
                ModeArg::Diff => Mode::Diff,
            };
            let cfg = common.config(mode)?;
            let p = load_program(&file, common.parse_options())?;
            let report = run_solve(&p, &cfg).with_context(|| file.display().to_string())?;
            common.emit(&report)?;
            Ok(report.exit_code())
        }
        Cmd::Diff { file, common } => {
            common.setup()?;
            let cfg = common.config(Mode::Diff)?;
            let p = load_program(&file, common.parse_options())?;
            let report = run_diff(&p, &cfg).with_context(|| file.display().to_string())?;
            common.emit(&report)?;
            Ok(report.exit_code())
        }
        Cmd::Equiv {
            a,
            b,
            input,
            common,
        } => {
            common.setup()?;
            let cfg = common.config(Mode::HtcTau)?;
            let ia = load_equiv_input(&a, input, common.parse_options())?;
            let ib = load_equiv_input(&b, input, common.parse_options())?;
            let report = run_equiv(&ia, &ib, &cfg)?;
            common.emit(&report)?;
            Ok(report.exit_code())
        }
        Cmd::Corpus { count, common } => {
            let cfg = CorpusConfig {
                theory: common.config(Mode::Transform)?.theory,
                ..CorpusConfig::default()
            };
            let mut out = std::io::stdout().lock();
            for i in 0..count {
                writeln!(out, "% program {i} (seed {})", common.seed)?;
                write!(out, "{}", generate(common.seed, i, &cfg))?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("AMT_KERNEL_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
