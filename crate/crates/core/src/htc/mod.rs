//! Here-and-There with constraints over finite boxes.
//!
//! Integer variables range over their box interval plus `u`; propositional
//! variables over `{t, u}`. Every enumeration result is relative to the box.

mod kernel;
mod parse;
pub mod reference;
mod valuation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::TheoryAtom;
use crate::theory_lin::{den_contains, Bounds, Interval};

pub use kernel::{Kernel, DEFAULT_TOTALS_CAP};
pub use parse::{parse_formula, parse_formulas};
pub use valuation::{Interpretation, Valuation, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintAtom {
    /// `p = t`
    PropTrue(String),
    Linear(TheoryAtom),
    /// `x` holds a defined integer.
    DefZ(String),
}

impl ConstraintAtom {
    pub fn vars(&self) -> BTreeSet<String> {
        match self {
            ConstraintAtom::PropTrue(p) | ConstraintAtom::DefZ(p) => BTreeSet::from([p.clone()]),
            ConstraintAtom::Linear(s) => s.vars(),
        }
    }
}

impl fmt::Display for ConstraintAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintAtom::PropTrue(p) => f.write_str(p),
            ConstraintAtom::Linear(s) => s.fmt(f),
            ConstraintAtom::DefZ(x) => write!(f, "def({x})"),
        }
    }
}

pub fn atom_den_contains(c: &ConstraintAtom, v: &Valuation) -> bool {
    match c {
        ConstraintAtom::PropTrue(p) => v.is_true(p),
        ConstraintAtom::Linear(s) => den_contains(s, v),
        ConstraintAtom::DefZ(x) => v.int(x).is_some(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bottom,
    Atom(ConstraintAtom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Impl(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// `⊥ → ⊥`
    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    /// `φ → ⊥`
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::implies(f, Formula::Bottom)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Impl(Box::new(a), Box::new(b))
    }

    pub fn prop(p: impl Into<String>) -> Formula {
        Formula::Atom(ConstraintAtom::PropTrue(p.into()))
    }

    pub fn linear(s: TheoryAtom) -> Formula {
        Formula::Atom(ConstraintAtom::Linear(s))
    }

    pub fn def(x: impl Into<String>) -> Formula {
        Formula::Atom(ConstraintAtom::DefZ(x.into()))
    }

    /// Conjunction of all items; `⊤` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Disjunction of all items; `⊥` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    pub fn atoms(&self) -> BTreeSet<ConstraintAtom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<ConstraintAtom>) {
        match self {
            Formula::Bottom => {}
            Formula::Atom(c) => {
                out.insert(c.clone());
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.atoms().iter().flat_map(|c| c.vars()).collect()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bottom => f.write_str("bot"),
            Formula::Atom(c) => c.fmt(f),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Impl(a, b) => match (a.as_ref(), b.as_ref()) {
                (Formula::Bottom, Formula::Bottom) => f.write_str("top"),
                (a, Formula::Bottom) => write!(f, "not {a}"),
                (a, b) => write!(f, "({a} -> {b})"),
            },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum World {
    Here,
    There,
}

/// `⟨h,t⟩ ⊨ f` by the satisfaction clauses, straight from the definition.
pub fn eval(f: &Formula, i: &Interpretation) -> bool {
    sat(f, World::Here, i)
}

fn sat(f: &Formula, w: World, i: &Interpretation) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Atom(c) => atom_den_contains(c, if w == World::Here { &i.h } else { &i.t }),
        Formula::And(a, b) => sat(a, w, i) && sat(b, w, i),
        Formula::Or(a, b) => sat(a, w, i) || sat(b, w, i),
        Formula::Impl(a, b) => {
            let worlds: &[World] = if w == World::Here {
                &[World::Here, World::There]
            } else {
                &[World::There]
            };
            worlds.iter().all(|&w2| !sat(a, w2, i) || sat(b, w2, i))
        }
    }
}

pub fn eval_all(theory: &[Formula], i: &Interpretation) -> bool {
    theory.iter().all(|f| eval(f, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarDomain {
    /// Values `{t}`.
    Prop,
    Int(Interval),
}

impl VarDomain {
    /// Number of values, not counting `u`.
    pub fn size(&self) -> u128 {
        match self {
            VarDomain::Prop => 1,
            VarDomain::Int(iv) => iv.len(),
        }
    }
}

/// Declared variables with their domains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    vars: BTreeMap<String, VarDomain>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn declare(&mut self, var: &str, dom: VarDomain) -> Result<()> {
        match self.vars.get(var) {
            Some(VarDomain::Prop) if dom != VarDomain::Prop => Err(Error::SignatureMismatch {
                var: var.to_string(),
            }),
            Some(VarDomain::Int(_)) if dom == VarDomain::Prop => Err(Error::SignatureMismatch {
                var: var.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.vars.insert(var.to_string(), dom);
                Ok(())
            }
        }
    }

    pub fn declare_prop(&mut self, var: &str) -> Result<()> {
        self.declare(var, VarDomain::Prop)
    }

    pub fn declare_int(&mut self, var: &str, iv: Interval) -> Result<()> {
        self.declare(var, VarDomain::Int(iv))
    }

    /// Variables of `PropTrue` atoms become propositional; the rest range
    /// over their box interval.
    pub fn infer(theory: &[Formula], bounds: &Bounds) -> Result<Signature> {
        let mut sig = Signature::new();
        sig.extend_with(theory, bounds)?;
        Ok(sig)
    }

    pub fn extend_with(&mut self, theory: &[Formula], bounds: &Bounds) -> Result<()> {
        for f in theory {
            for c in f.atoms() {
                match &c {
                    ConstraintAtom::PropTrue(p) => self.declare_prop(p)?,
                    ConstraintAtom::Linear(_) | ConstraintAtom::DefZ(_) => {
                        for x in c.vars() {
                            self.declare_int(&x, bounds.get(&x))?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, var: &str) -> Option<VarDomain> {
        self.vars.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &VarDomain)> {
        self.vars.iter()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Every variable of every atom is declared with a fitting domain.
    pub fn check(&self, theory: &[Formula]) -> Result<()> {
        for f in theory {
            for c in f.atoms() {
                for x in c.vars() {
                    let dom = self
                        .vars
                        .get(&x)
                        .ok_or_else(|| Error::UndeclaredVariable { var: x.clone() })?;
                    let prop_atom = matches!(c, ConstraintAtom::PropTrue(_));
                    if prop_atom != (*dom == VarDomain::Prop) {
                        return Err(Error::SignatureMismatch { var: x.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of total valuations including `u`, saturating.
    pub fn totals(&self) -> u128 {
        self.vars
            .values()
            .fold(1u128, |acc, d| acc.saturating_mul(d.size() + 1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// An interpretation that is a model of exactly one side.
    Counterexample {
        interpretation: Interpretation,
        /// Whether the first theory holds in it.
        left_holds: bool,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// All `⟨h,t⟩` models inside the signature's box.
pub fn ht_models(theory: &[Formula], sig: &Signature) -> Result<Vec<Interpretation>> {
    Kernel::compile(theory, sig)?.ht_models()
}

/// All equilibrium models `t` inside the box.
pub fn equilibrium_models(theory: &[Formula], sig: &Signature) -> Result<Vec<Valuation>> {
    Kernel::compile(theory, sig)?.equilibrium_models()
}

/// Compare the full `⟨h,t⟩` model sets of two theories.
pub fn equiv_models(g1: &[Formula], g2: &[Formula], sig: &Signature) -> Result<Verdict> {
    Kernel::compile_pair(g1, g2, sig)?.equivalence()
}

/// Some model exists; by persistence, iff some total model exists.
pub fn is_satisfiable(theory: &[Formula], sig: &Signature) -> Result<bool> {
    Ok(Kernel::compile(theory, sig)?.some_total_model()?.is_some())
}

/// For a total model `t` that is not in equilibrium, the `h ⊂ t` defeating it.
pub fn defeating_here(
    theory: &[Formula],
    sig: &Signature,
    t: &Valuation,
) -> Result<Option<Valuation>> {
    Kernel::compile(theory, sig)?.defeating_here(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory_atom;

    fn lin(text: &str) -> Formula {
        Formula::linear(parse_theory_atom(text).unwrap())
    }

    fn box_sig(theory: &[Formula], lo: i64, hi: i64) -> Signature {
        Signature::infer(theory, &Bounds::uniform(lo, hi).unwrap()).unwrap()
    }

    fn tp() -> Valuation {
        Valuation::new().with("p", Value::True)
    }

    #[test]
    fn atom_denotations() {
        let pa = ConstraintAtom::PropTrue("p_a".into());
        assert!(atom_den_contains(
            &pa,
            &Valuation::new().with("p_a", Value::True)
        ));
        assert!(!atom_den_contains(&pa, &Valuation::new()));
        let s = ConstraintAtom::Linear(parse_theory_atom("&sum{x;y}=4").unwrap());
        let v = Valuation::from_ints([("x", 2), ("y", 2)]).with("p_a", Value::True);
        assert!(atom_den_contains(&s, &v));
        let d = ConstraintAtom::DefZ("x".into());
        assert!(atom_den_contains(&d, &Valuation::from_ints([("x", -7)])));
        assert!(!atom_den_contains(&d, &Valuation::new()));
    }

    #[test]
    fn satisfaction_examples() {
        let i = Interpretation::new(Valuation::new(), tp());
        assert!(!eval(&Formula::prop("p"), &i));
        assert!(!eval(&Formula::not(Formula::prop("p")), &i));
        assert!(eval(&Formula::not(Formula::not(Formula::prop("p"))), &i));
        let t = Interpretation::total(Valuation::from_ints([("x", 2), ("y", 2)]));
        assert!(eval(&lin("&sum{x;y}=4"), &t));
        assert!(!eval(&Formula::Bottom, &i));
        assert!(eval(&Formula::top(), &i));
    }

    #[test]
    fn models_of_a_fact() {
        let theory = vec![Formula::prop("p")];
        let models = ht_models(&theory, &box_sig(&theory, 0, 0)).unwrap();
        assert_eq!(models, vec![Interpretation::total(tp())]);
        assert_eq!(
            equilibrium_models(&theory, &box_sig(&theory, 0, 0)).unwrap(),
            vec![tp()]
        );
    }

    #[test]
    fn empty_theory_is_vacuous() {
        let mut sig = Signature::new();
        sig.declare_int("x", Interval::new(-1, 1).unwrap()).unwrap();
        // t over {u,-1,0,1}; h is t or u
        assert_eq!(ht_models(&[], &sig).unwrap().len(), 1 + 3 * 2);
    }

    #[test]
    fn excluded_middle_on_a_constraint_forces_definedness() {
        let theory = vec![Formula::or(lin("&sum{x}>=0"), lin("&sum{x}<0"))];
        let models = ht_models(&theory, &box_sig(&theory, -1, 1)).unwrap();
        assert_eq!(models.len(), 3);
        assert!(models
            .iter()
            .all(|i| i.h.int("x").is_some() && i.is_total()));
    }

    #[test]
    fn def_has_one_model_per_value() {
        let theory = vec![Formula::def("x")];
        let eq = equilibrium_models(&theory, &box_sig(&theory, -1, 1)).unwrap();
        let xs: Vec<_> = eq.iter().map(|v| v.int("x").unwrap().clone()).collect();
        assert_eq!(xs, vec![(-1).into(), 0.into(), 1.into()]);
    }

    #[test]
    fn double_negation_counterexample() {
        let a = vec![Formula::prop("p")];
        let b = vec![Formula::not(Formula::not(Formula::prop("p")))];
        let sig = box_sig(&a, 0, 0);
        match equiv_models(&a, &b, &sig).unwrap() {
            Verdict::Counterexample {
                interpretation,
                left_holds,
            } => {
                assert_eq!(interpretation, Interpretation::new(Valuation::new(), tp()));
                assert!(!left_holds);
            }
            Verdict::Equivalent => panic!("p and not not p differ in HT"),
        }
        let mut with_top = a.clone();
        with_top.push(Formula::top());
        assert!(equiv_models(&a, &with_top, &sig).unwrap().is_equivalent());
    }

    #[test]
    fn def_matches_excluded_middle_on_every_box() {
        for (lo, hi) in [(0, 0), (-2, 1), (-3, 3)] {
            let a = vec![Formula::def("x")];
            let b = vec![Formula::or(lin("&sum{x}>=0"), lin("&sum{x}<0"))];
            let sig = box_sig(&a, lo, hi);
            assert!(equiv_models(&a, &b, &sig).unwrap().is_equivalent());
        }
    }

    #[test]
    fn defeating_here_for_double_negation() {
        let theory = vec![Formula::not(Formula::not(Formula::prop("p")))];
        let sig = box_sig(&theory, 0, 0);
        assert_eq!(
            defeating_here(&theory, &sig, &tp()).unwrap(),
            Some(Valuation::new())
        );
        assert!(equilibrium_models(&theory, &sig).unwrap().is_empty());
    }

    #[test]
    fn signature_checks() {
        let mut sig = Signature::new();
        sig.declare_prop("p").unwrap();
        assert_eq!(
            sig.declare_int("p", Interval::new(0, 1).unwrap()),
            Err(Error::SignatureMismatch { var: "p".into() })
        );
        assert_eq!(
            sig.check(&[lin("&sum{x}=1")]),
            Err(Error::UndeclaredVariable { var: "x".into() })
        );
        assert_eq!(
            sig.check(&[lin("&sum{p}=1")]),
            Err(Error::SignatureMismatch { var: "p".into() })
        );
        let mixed = vec![Formula::prop("x"), Formula::def("x")];
        assert!(matches!(
            Signature::infer(&mixed, &Bounds::default()),
            Err(Error::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let f = Formula::implies(
            Formula::and(Formula::prop("p"), Formula::not(lin("&sum{x;-2*y}<=3"))),
            Formula::or(Formula::def("x"), Formula::Bottom),
        );
        let text = format!("{f}.");
        assert_eq!(parse_formulas(&text).unwrap(), vec![f]);
        assert_eq!(Formula::top().to_string(), "top");
    }
}
