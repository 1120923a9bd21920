//! Runners behind the command-line tool: solve a program in one mode,
//! cross-check all modes, or compare two theories. Output is a [`Report`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::htc::{Formula, Kernel, Signature, Valuation, Value, Verdict};
use crate::stable::{te_stable_models_with, AtomSet, StableOptions, DEFAULT_ATOM_CAP};
use crate::syntax::{infer_partition, Program};
use crate::theory_core::{EnumOptions, DEFAULT_UNIVERSE_CAP};
use crate::theory_lin::{
    den_contains, make_handle, Bounds, TheoryHandle, TheoryKind, DEFAULT_BOX_CAP, DEFAULT_SPLIT_CAP,
};
use crate::translate::{project_equilibrium, project_tau2, tau2, tau_with, TauOptions, AUX_PREFIX};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Transform,
    HtcTau,
    HtcTau2,
    Diff,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Transform => "transform",
            Mode::HtcTau => "htc-tau",
            Mode::HtcTau2 => "htc-tau2",
            Mode::Diff => "diff",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Mode::Transform, Mode::HtcTau, Mode::HtcTau2, Mode::Diff]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown mode `{s}`")))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate corruptions, for checking that `diff` notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    DropChoices,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub theory: TheoryKind,
    pub bounds: Bounds,
    pub mode: Mode,
    pub max_atoms: usize,
    pub max_universe: usize,
    /// Caps both the `𝔏` search box and the HT_c total valuations.
    pub max_cells: u128,
    pub max_splits: u128,
    pub fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theory: TheoryKind::LinInt,
            bounds: Bounds::default(),
            mode: Mode::Transform,
            max_atoms: DEFAULT_ATOM_CAP,
            max_universe: DEFAULT_UNIVERSE_CAP,
            max_cells: DEFAULT_BOX_CAP,
            max_splits: DEFAULT_SPLIT_CAP,
            fault: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_atoms == 0
            || self.max_universe == 0
            || self.max_cells == 0
            || self.max_splits == 0
        {
            return Err(Error::InvalidBounds("caps must be positive".into()));
        }
        Ok(())
    }

    fn handle(&self, boxed_difference: bool) -> TheoryHandle {
        make_handle(self.theory, self.bounds.clone())
            .with_box_cap(self.max_cells)
            .with_split_cap(self.max_splits)
            .with_boxed_difference(boxed_difference)
    }

    fn stable_options(&self) -> StableOptions {
        StableOptions {
            solutions: EnumOptions {
                cap: self.max_universe,
                complete_only: true,
            },
            atom_cap: self.max_atoms,
        }
    }

    /// Whether reported models are limited to the box.
    fn boxed(&self, mode: Mode) -> bool {
        match self.theory {
            TheoryKind::LinInt => true,
            TheoryKind::LinRat => false,
            TheoryKind::DiffInt => mode != Mode::Transform || self.mode == Mode::Diff,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub regular: Vec<String>,
    pub theory: Vec<String>,
    /// Values as decimal strings (`p/q` for rationals).
    pub witness: BTreeMap<String, String>,
    /// Every solution set `S` yielding this model.
    pub solutions: Vec<Vec<String>>,
}

impl ModelReport {
    pub fn atoms(&self) -> (Vec<String>, Vec<String>) {
        (self.regular.clone(), self.theory.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeRun {
    pub mode: Mode,
    pub bounded: bool,
    pub models: Vec<ModelReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub regular: Vec<String>,
    pub theory: Vec<String>,
    pub present_in: Vec<Mode>,
    pub missing_from: Vec<Mode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub here: String,
    pub there: String,
    /// Which side is satisfied by the interpretation.
    pub satisfied_by: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub counterexample: Option<Counterexample>,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: &'static str,
    pub theory: TheoryKind,
    pub bounds: String,
    pub caveat: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<ModeRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<Difference>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<Equivalence>,
}

impl Report {
    fn new(command: &'static str, cfg: &RunConfig, bounded: bool) -> Report {
        let caveat = if bounded {
            format!("results are relative to bounds {}; models needing values outside the box are not reported", cfg.bounds)
        } else {
            "results are exact over the theory's domain".to_string()
        };
        Report {
            schema: SCHEMA,
            command,
            theory: cfg.theory,
            bounds: cfg.bounds.to_string(),
            caveat,
            runs: Vec::new(),
            verdict: None,
            difference: None,
            equivalence: None,
        }
    }

    /// 0 on models found / agreement / equivalence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let ok = match (&self.equivalence, self.verdict) {
            (Some(e), _) => e.equivalent,
            (None, Some(v)) => v == "agree",
            (None, None) => self.runs.iter().any(|r| !r.models.is_empty()),
        };
        if ok {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for run in &self.runs {
            out.push_str(&format!(
                "mode {}: {} model(s)\n",
                run.mode,
                run.models.len()
            ));
            for (i, m) in run.models.iter().enumerate() {
                let atoms: Vec<&str> = m
                    .regular
                    .iter()
                    .chain(&m.theory)
                    .map(String::as_str)
                    .collect();
                out.push_str(&format!("  model {}: {{{}}}\n", i + 1, atoms.join(", ")));
                let w: Vec<String> = m.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
                out.push_str(&format!("    witness: {{{}}}\n", w.join(", ")));
            }
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        if let Some(d) = &self.difference {
            let atoms: Vec<&str> = d
                .regular
                .iter()
                .chain(&d.theory)
                .map(String::as_str)
                .collect();
            let names = |ms: &[Mode]| ms.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ");
            out.push_str(&format!(
                "differing model: {{{}}} found by [{}], missing from [{}]\n",
                atoms.join(", "),
                names(&d.present_in),
                names(&d.missing_from)
            ));
        }
        if let Some(e) = &self.equivalence {
            out.push_str(if e.equivalent {
                "equivalent\n"
            } else {
                "not equivalent\n"
            });
            if let Some(c) = &e.counterexample {
                out.push_str(&format!(
                    "counterexample: <h={}, t={}> satisfies only {}\n",
                    c.here, c.there, c.satisfied_by
                ));
            }
            out.push_str(&format!("note: {}\n", e.note));
        }
        out.push_str(&format!("note: {}\n", self.caveat));
        out
    }
}

fn atom_lists(x: &AtomSet) -> (Vec<String>, Vec<String>) {
    let regular = x
        .iter()
        .filter_map(|a| a.as_regular().map(str::to_string))
        .collect();
    let theory = x
        .iter()
        .filter_map(|a| a.as_theory().map(|s| s.to_string()))
        .collect();
    (regular, theory)
}

fn valuation_witness(t: &Valuation) -> BTreeMap<String, String> {
    t.iter()
        .filter(|(k, _)| !k.starts_with(AUX_PREFIX))
        .filter_map(|(k, v)| match v {
            Value::Int(d) => Some((k.clone(), d.to_string())),
            Value::True => None,
        })
        .collect()
}

fn run_transform(
    p: &Program,
    cfg: &RunConfig,
    boxed_difference: bool,
) -> Result<Vec<(AtomSet, ModelReport)>> {
    let th = cfg.handle(boxed_difference);
    let models = te_stable_models_with(p, &th, cfg.stable_options())?;
    Ok(models
        .into_iter()
        .map(|m| {
            let (regular, theory) = atom_lists(&m.atoms);
            let witness = format_witness(m.witness());
            let solutions = m
                .solutions
                .iter()
                .map(|s| s.atoms.iter().map(|a| a.to_string()).collect())
                .collect();
            let report = ModelReport {
                regular,
                theory,
                witness,
                solutions,
            };
            (m.atoms, report)
        })
        .collect())
}

fn format_witness(a: &crate::theory_core::Assignment) -> BTreeMap<String, String> {
    a.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

fn run_htc(p: &Program, cfg: &RunConfig, mode: Mode) -> Result<Vec<(AtomSet, ModelReport)>> {
    let th = cfg.handle(false);
    let (out, project): (_, fn(&Valuation, &Program) -> AtomSet) = match mode {
        Mode::HtcTau => {
            let opts = TauOptions {
                drop_choices: cfg.fault == Some(Fault::DropChoices),
            };
            (tau_with(p, &th, opts)?, project_equilibrium)
        }
        _ => (tau2(p, &th)?, project_tau2),
    };
    let kernel = Kernel::compile_groups(&[&out.theory], &out.signature, cfg.max_cells)?;
    let mut by_model: BTreeMap<AtomSet, (Valuation, BTreeSet<Vec<String>>)> = BTreeMap::new();
    for t in kernel.equilibrium_models()? {
        let x = project(&t, p);
        let sat: Vec<String> = p
            .theory_atoms
            .iter()
            .filter(|s| den_contains(s, &t))
            .map(|s| s.to_string())
            .collect();
        by_model
            .entry(x)
            .or_insert_with(|| (t.clone(), BTreeSet::new()))
            .1
            .insert(sat);
    }
    Ok(by_model
        .into_iter()
        .map(|(x, (t, sols))| {
            let (regular, theory) = atom_lists(&x);
            let report = ModelReport {
                regular,
                theory,
                witness: valuation_witness(&t),
                solutions: sols.into_iter().collect(),
            };
            (x, report)
        })
        .collect())
}

fn run_mode(p: &Program, cfg: &RunConfig, mode: Mode) -> Result<Vec<(AtomSet, ModelReport)>> {
    log::debug!("running mode {mode}");
    match mode {
        Mode::Transform => run_transform(p, cfg, cfg.mode == Mode::Diff),
        Mode::HtcTau | Mode::HtcTau2 => run_htc(p, cfg, mode),
        Mode::Diff => unreachable!("diff is dispatched by run_diff"),
    }
}

/// Models of `p` (partition inferred) in `cfg.mode`; `Diff` defers to [`run_diff`].
pub fn run_solve(p: &Program, cfg: &RunConfig) -> Result<Report> {
    if cfg.mode == Mode::Diff {
        return run_diff(p, cfg);
    }
    cfg.validate()?;
    let p = infer_partition(p)?;
    let mut report = Report::new("solve", cfg, cfg.boxed(cfg.mode));
    let models = run_mode(&p, cfg, cfg.mode)?;
    report.runs.push(ModeRun {
        mode: cfg.mode,
        bounded: cfg.boxed(cfg.mode),
        models: models.into_iter().map(|(_, m)| m).collect(),
    });
    Ok(report)
}

const DIFF_MODES: [Mode; 3] = [Mode::Transform, Mode::HtcTau, Mode::HtcTau2];

/// Run all three modes over the same box and compare projected model sets.
pub fn run_diff(p: &Program, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let cfg = RunConfig {
        mode: Mode::Diff,
        ..cfg.clone()
    };
    let p = infer_partition(p)?;
    let mut report = Report::new("diff", &cfg, true);
    let mut sets: Vec<BTreeSet<AtomSet>> = Vec::new();
    for mode in DIFF_MODES {
        let models = run_mode(&p, &cfg, mode)?;
        sets.push(models.iter().map(|(x, _)| x.clone()).collect());
        report.runs.push(ModeRun {
            mode,
            bounded: true,
            models: models.into_iter().map(|(_, m)| m).collect(),
        });
    }
    let union: BTreeSet<&AtomSet> = sets.iter().flatten().collect();
    let differing = union
        .into_iter()
        .find(|x| !sets.iter().all(|s| s.contains(*x)));
    report.verdict = Some(if differing.is_none() {
        "agree"
    } else {
        "disagree"
    });
    report.difference = differing.map(|x| {
        let (regular, theory) = atom_lists(x);
        let (present_in, missing_from) = DIFF_MODES
            .iter()
            .zip(&sets)
            .partition::<Vec<_>, _>(|(_, s)| s.contains(x));
        Difference {
            regular,
            theory,
            present_in: present_in.into_iter().map(|(m, _)| *m).collect(),
            missing_from: missing_from.into_iter().map(|(m, _)| *m).collect(),
        }
    });
    Ok(report)
}

/// One side of an equivalence check.
#[derive(Clone, Debug)]
pub enum EquivInput {
    Theory(Vec<Formula>),
    /// Translated with `τ` under the inferred partition.
    Program(Program),
}

impl EquivInput {
    fn formulas(&self, cfg: &RunConfig) -> Result<Vec<Formula>> {
        match self {
            EquivInput::Theory(fs) => Ok(fs.clone()),
            EquivInput::Program(p) => {
                let p = infer_partition(p)?;
                Ok(tau_with(&p, &cfg.handle(false), TauOptions::default())?.theory)
            }
        }
    }
}

/// HT_c model-set comparison of two inputs over the union signature.
pub fn run_equiv(a: &EquivInput, b: &EquivInput, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.theory == TheoryKind::LinRat {
        return Err(Error::Unsupported(
            "HT_c equivalence needs an integer box; lin-rat has none".into(),
        ));
    }
    let (fa, fb) = (a.formulas(cfg)?, b.formulas(cfg)?);
    let mut sig = Signature::infer(&fa, &cfg.bounds)?;
    sig.extend_with(&fb, &cfg.bounds)?;
    let verdict = Kernel::compile_groups(&[&fa, &fb], &sig, cfg.max_cells)?.equivalence()?;
    let mut report = Report::new("equiv", cfg, true);
    report.equivalence = Some(Equivalence {
        equivalent: verdict.is_equivalent(),
        counterexample: match verdict {
            Verdict::Equivalent => None,
            Verdict::Counterexample {
                interpretation,
                left_holds,
            } => Some(Counterexample {
                here: interpretation.h.to_string(),
                there: interpretation.t.to_string(),
                satisfied_by: if left_holds { "A" } else { "B" }.to_string(),
            }),
        },
        note: "HT_c model-set equality over the box, used as the proxy for strong equivalence",
    });
    Ok(report)
}
