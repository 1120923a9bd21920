//! The structured theories over linear constraints: 𝔏 (integers, decided
//! inside a finite box), 𝔇 (difference constraints, exact) and ℜ (rationals,
//! exact).

mod boxed;
mod difference;
mod rational;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::htc::{Valuation, Value};
use crate::syntax::{AtomKind, Term, TheoryAtom};
use crate::theory_core::{Assignment, Theory};

pub use boxed::{in_box, sat_l, DEFAULT_BOX_CAP};
pub use difference::sat_d;
pub use rational::{sat_r, DEFAULT_SPLIT_CAP};

/// Flip the relation: `<=`/`>`, `=`/`!=`, `<`/`>=`. For `&diff{x-y}<=k` the
/// complement is `&diff{y-x}<=-k-1`, which keeps it a difference atom.
pub fn complement(s: &TheoryAtom) -> TheoryAtom {
    match s.kind() {
        AtomKind::Sum => s.with_rel(s.rel().negate()),
        AtomKind::Diff => {
            let terms = s.terms();
            TheoryAtom::diff(
                terms[1].var.clone(),
                terms[0].var.clone(),
                -s.rhs() - BigInt::from(1),
            )
        }
    }
}

/// Integer denotation: every variable of `s` is bound to an integer and
/// the constraint holds.
pub fn den_contains(s: &TheoryAtom, v: &Valuation) -> bool {
    let mut lhs = BigInt::zero();
    for t in s.terms() {
        match v.get(&t.var) {
            Some(Value::Int(d)) => lhs += &t.coeff * d,
            _ => return false,
        }
    }
    s.rel().holds(&lhs, s.rhs())
}

pub fn den_contains_rational(s: &TheoryAtom, a: &Assignment) -> bool {
    let mut lhs = BigRational::zero();
    for t in s.terms() {
        match a.get(&t.var) {
            Some(d) => lhs += BigRational::from_integer(t.coeff.clone()) * d,
            None => return false,
        }
    }
    s.rel()
        .holds(&lhs, &BigRational::from_integer(s.rhs().clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substituted {
    Atom(TheoryAtom),
    /// No variable is left; the constraint is decided.
    Truth(bool),
}

/// `s[x/d]`: drop the terms over `x` and fold `k·d` into the constant.
pub fn substitute(s: &TheoryAtom, x: &str, d: &BigInt) -> Substituted {
    let mut rhs = s.rhs().clone();
    let mut rest: Vec<Term> = Vec::new();
    for t in s.terms() {
        if t.var == x {
            rhs -= &t.coeff * d;
        } else {
            rest.push(t.clone());
        }
    }
    if rest.len() == s.terms().len() {
        return Substituted::Atom(s.clone());
    }
    if rest.is_empty() {
        return Substituted::Truth(s.rel().holds(&BigInt::zero(), &rhs));
    }
    match TheoryAtom::sum(rest, s.rel(), rhs) {
        Ok(atom) => Substituted::Atom(atom),
        Err(_) => unreachable!("non-empty term list"),
    }
}

/// Closed integer interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidBounds(format!("empty interval {lo}..{hi}")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1) as u128
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        *v >= BigInt::from(self.lo) && *v <= BigInt::from(self.hi)
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// `LO..HI`
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidBounds(format!("expected LO..HI, got `{text}`"));
        let (lo, hi) = text.trim().split_once("..").ok_or_else(bad)?;
        let lo = lo.trim().parse::<i64>().map_err(|_| bad())?;
        let hi = hi.trim().parse::<i64>().map_err(|_| bad())?;
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A default interval plus per-variable overrides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Bounds {
    pub default: Interval,
    pub per_var: BTreeMap<String, Interval>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            default: Interval { lo: -10, hi: 10 },
            per_var: BTreeMap::new(),
        }
    }
}

impl Bounds {
    pub fn uniform(lo: i64, hi: i64) -> Result<Self> {
        Ok(Bounds {
            default: Interval::new(lo, hi)?,
            per_var: BTreeMap::new(),
        })
    }

    pub fn with_var(mut self, var: impl Into<String>, iv: Interval) -> Self {
        self.per_var.insert(var.into(), iv);
        self
    }

    pub fn get(&self, var: &str) -> Interval {
        self.per_var.get(var).copied().unwrap_or(self.default)
    }

    /// Number of integer points in the box over `vars`, saturating.
    pub fn cells<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> u128 {
        vars.into_iter()
            .fold(1u128, |acc, v| acc.saturating_mul(self.get(v).len()))
    }

    /// `x=LO..HI`
    pub fn parse_var_override(text: &str) -> Result<(String, Interval)> {
        let (name, iv) = text
            .split_once('=')
            .ok_or_else(|| Error::InvalidBounds(format!("expected x=LO..HI, got `{text}`")))?;
        Ok((name.trim().to_string(), iv.parse()?))
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.default)?;
        for (v, iv) in &self.per_var {
            write!(f, ", {v}∈{iv}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TheoryKind {
    #[serde(rename = "lin-int")]
    LinInt,
    #[serde(rename = "diff-int")]
    DiffInt,
    #[serde(rename = "lin-rat")]
    LinRat,
}

impl TheoryKind {
    pub fn name(self) -> &'static str {
        match self {
            TheoryKind::LinInt => "lin-int",
            TheoryKind::DiffInt => "diff-int",
            TheoryKind::LinRat => "lin-rat",
        }
    }
}

impl FromStr for TheoryKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "lin-int" | "L" => Ok(TheoryKind::LinInt),
            "diff-int" | "D" => Ok(TheoryKind::DiffInt),
            "lin-rat" | "R" => Ok(TheoryKind::LinRat),
            _ => Err(Error::Unsupported(format!("unknown theory `{text}`"))),
        }
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Integers, optionally restricted to a box.
    Int(Option<Bounds>),
    Rational,
}

/// Variables and domain of a theory over a given atom universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub variables: BTreeSet<String>,
    pub domain: Domain,
}

/// One of the three shipped theories, ready to be used as an oracle.
#[derive(Clone, Debug)]
pub struct TheoryHandle {
    kind: TheoryKind,
    bounds: Bounds,
    box_cap: u128,
    split_cap: u128,
    boxed_difference: bool,
}

pub fn make_handle(kind: TheoryKind, bounds: Bounds) -> TheoryHandle {
    TheoryHandle {
        kind,
        bounds,
        box_cap: DEFAULT_BOX_CAP,
        split_cap: DEFAULT_SPLIT_CAP,
        boxed_difference: false,
    }
}

impl TheoryHandle {
    pub fn with_box_cap(mut self, cap: u128) -> Self {
        self.box_cap = cap;
        self
    }

    pub fn with_split_cap(mut self, cap: u128) -> Self {
        self.split_cap = cap;
        self
    }

    /// Restrict 𝔇 to the box as well, so it agrees with box-relative HT_c.
    pub fn with_boxed_difference(mut self, on: bool) -> Self {
        self.boxed_difference = on;
        self
    }

    pub fn kind(&self) -> TheoryKind {
        self.kind
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn box_cap(&self) -> u128 {
        self.box_cap
    }

    pub fn structure<'a>(&self, atoms: impl IntoIterator<Item = &'a TheoryAtom>) -> Structure {
        let domain = match self.kind {
            TheoryKind::LinInt => Domain::Int(Some(self.bounds.clone())),
            TheoryKind::DiffInt if self.boxed_difference => Domain::Int(Some(self.bounds.clone())),
            TheoryKind::DiffInt => Domain::Int(None),
            TheoryKind::LinRat => Domain::Rational,
        };
        Structure {
            variables: atoms.into_iter().flat_map(|s| s.vars()).collect(),
            domain,
        }
    }
}

impl Theory for TheoryHandle {
    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn complement(&self, s: &TheoryAtom) -> TheoryAtom {
        complement(s)
    }

    fn vars_of(&self, s: &TheoryAtom) -> BTreeSet<String> {
        s.vars()
    }

    fn solve(&self, set: &BTreeSet<TheoryAtom>) -> Result<Option<Assignment>> {
        match self.kind {
            TheoryKind::LinInt => sat_l(set, &self.bounds, self.box_cap),
            TheoryKind::DiffInt => sat_d(set, self.boxed_difference.then_some(&self.bounds)),
            TheoryKind::LinRat => sat_r(set, self.split_cap),
        }
    }

    fn has_absolute_complement(&self) -> bool {
        true
    }
}

/// Integer witnesses as an HT_c valuation; `None` if some value is fractional.
pub fn assignment_to_valuation(a: &Assignment) -> Option<Valuation> {
    a.iter()
        .map(|(k, v)| {
            v.is_integer()
                .then(|| (k.clone(), Value::Int(v.to_integer())))
        })
        .collect()
}

pub fn format_assignment(a: &Assignment) -> String {
    let parts: Vec<String> = a.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_theory_atom, Rel};
    use crate::theory_core::entails;
    use proptest::prelude::*;

    fn s(text: &str) -> TheoryAtom {
        parse_theory_atom(text).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<TheoryAtom> {
        items.iter().map(|t| s(t)).collect()
    }

    #[test]
    fn complement_table() {
        let pairs = [
            ("&sum{x;y}=4", "&sum{x;y}!=4"),
            ("&sum{x}<=1", "&sum{x}>1"),
            ("&sum{x}<1", "&sum{x}>=1"),
        ];
        for (a, b) in pairs {
            assert_eq!(complement(&s(a)), s(b));
            assert_eq!(complement(&s(b)), s(a));
        }
        let d = s("&diff{x-y}<=3");
        assert_eq!(complement(&d), s("&diff{y-x}<=-4"));
        assert_eq!(complement(&complement(&d)), d);
    }

    #[test]
    fn denotation_examples() {
        let s1 = s("&sum{x;y}=4");
        assert!(den_contains(
            &s1,
            &Valuation::from_ints([("x", 2), ("y", 2)])
        ));
        assert!(!den_contains(&s1, &Valuation::from_ints([("x", 2)])));
        let d = s("&diff{y-x}<=-4");
        assert!(den_contains(
            &d,
            &Valuation::from_ints([("x", 0), ("y", -4)])
        ));
        assert!(!den_contains(
            &d,
            &Valuation::from_ints([("x", 0), ("y", -3)])
        ));
        let prop = Valuation::from_ints([("x", 2)]).with("y", Value::True);
        assert!(!den_contains(&s1, &prop));
    }

    #[test]
    fn diff_complement_denotation() {
        let d = s("&diff{x-y}<=3");
        let alt = s("&sum{y;-1*x}<=-4");
        for x in -6..=6 {
            for y in -6..=6 {
                let v = Valuation::from_ints([("x", x), ("y", y)]);
                assert_eq!(den_contains(&complement(&d), &v), den_contains(&alt, &v));
                assert_ne!(den_contains(&d, &v), den_contains(&complement(&d), &v));
            }
        }
    }

    #[test]
    fn substitution() {
        let a = s("&sum{x;y}=4");
        assert_eq!(
            substitute(&a, "x", &BigInt::from(3)),
            Substituted::Atom(s("&sum{y}=1"))
        );
        assert_eq!(
            substitute(&a, "z", &BigInt::from(3)),
            Substituted::Atom(a.clone())
        );
        let b = s("&sum{2*x}<5");
        assert_eq!(
            substitute(&b, "x", &BigInt::from(2)),
            Substituted::Truth(true)
        );
        assert_eq!(
            substitute(&b, "x", &BigInt::from(3)),
            Substituted::Truth(false)
        );
    }

    #[test]
    fn interval_parsing() {
        assert_eq!(
            "-5..5".parse::<Interval>().unwrap(),
            Interval { lo: -5, hi: 5 }
        );
        assert!("5..-5".parse::<Interval>().is_err());
        assert!("5".parse::<Interval>().is_err());
        let (name, iv) = Bounds::parse_var_override("z=0..3").unwrap();
        assert_eq!((name.as_str(), iv), ("z", Interval { lo: 0, hi: 3 }));
        let b = Bounds::default().with_var("z", iv);
        assert_eq!(b.get("z"), iv);
        assert_eq!(b.get("x"), Interval { lo: -10, hi: 10 });
        assert_eq!(b.cells(&["x".to_string(), "z".to_string()]), 21 * 4);
    }

    #[test]
    fn handle_examples() {
        let l = make_handle(TheoryKind::LinInt, Bounds::uniform(-5, 5).unwrap());
        assert!(l
            .is_satisfiable(&set(&["&sum{x;y}=4", "&sum{y;z}=2"]))
            .unwrap());
        let r = make_handle(TheoryKind::LinRat, Bounds::default());
        assert!(r.is_satisfiable(&BTreeSet::new()).unwrap());
        assert!(l.is_satisfiable(&BTreeSet::new()).unwrap());
        let d = make_handle(TheoryKind::DiffInt, Bounds::default());
        assert_eq!(d.complement(&s("&diff{x-y}<=3")), s("&diff{y-x}<=-4"));
        assert!(
            l.has_absolute_complement()
                && d.has_absolute_complement()
                && r.has_absolute_complement()
        );
        assert_eq!(
            l.structure(&set(&["&sum{x;y}=4"])).variables,
            BTreeSet::from(["x".to_string(), "y".to_string()])
        );
    }

    #[test]
    fn rationals_differ_from_integers() {
        let half = set(&["&sum{2*x}=1"]);
        let l = make_handle(TheoryKind::LinInt, Bounds::default());
        let r = make_handle(TheoryKind::LinRat, Bounds::default());
        assert!(!l.is_satisfiable(&half).unwrap());
        assert!(r.is_satisfiable(&half).unwrap());
        // 2x=1 entails x>0 over the rationals; over the box it is vacuous
        assert!(entails(&half, &s("&sum{x}>0"), &r).unwrap());
    }

    fn atom_strategy() -> impl Strategy<Value = TheoryAtom> {
        let term = (-2i64..=2, prop::sample::select(vec!["x", "y", "z"]));
        (
            prop::collection::vec(term, 1..=3),
            prop::sample::select(Rel::ALL.to_vec()),
            -4i64..=4,
        )
            .prop_map(|(terms, rel, k)| {
                let terms = terms.into_iter().map(|(c, v)| Term::new(c, v)).collect();
                TheoryAtom::sum(terms, rel, k).unwrap()
            })
    }

    fn box_valuations(vars: &[&str], lo: i64, hi: i64) -> Vec<Valuation> {
        let mut out = vec![Valuation::new()];
        for v in vars {
            out = out
                .into_iter()
                .flat_map(|val| (lo..=hi).map(move |d| val.clone().with(*v, Value::Int(d.into()))))
                .collect();
        }
        out
    }

    proptest! {
        #[test]
        fn complement_is_absolute(a in atom_strategy()) {
            let c = complement(&a);
            prop_assert_eq!(complement(&c), a.clone());
            for v in box_valuations(&["x", "y", "z"], -2, 2) {
                prop_assert!(den_contains(&a, &v) ^ den_contains(&c, &v));
            }
        }

        #[test]
        fn membership_ignores_other_variables(a in atom_strategy(), w in -3i64..=3) {
            for v in box_valuations(&["x", "y", "z"], -1, 1) {
                let extended = v.clone().with("w", Value::Int(w.into())).with("p", Value::True);
                prop_assert_eq!(den_contains(&a, &v), den_contains(&a, &extended));
            }
        }

        #[test]
        fn persistence_under_extension(a in atom_strategy(), extra in -3i64..=3) {
            for v in box_valuations(&["x", "y", "z"], -1, 1) {
                let vars = a.vars();
                let small = v.restrict(|k| vars.contains(k));
                if den_contains(&a, &small) {
                    prop_assert!(den_contains(&a, &v));
                    prop_assert!(den_contains(&a, &v.clone().with("q", Value::Int(extra.into()))));
                }
            }
        }

        #[test]
        fn substitution_preserves_membership(a in atom_strategy()) {
            for v in box_valuations(&["x", "y", "z"], -2, 2) {
                if !den_contains(&a, &v) {
                    continue;
                }
                for x in ["x", "y", "z"] {
                    let d = v.int(x).unwrap().clone();
                    match substitute(&a, x, &d) {
                        Substituted::Atom(b) => prop_assert!(den_contains(&b, &v)),
                        Substituted::Truth(t) => prop_assert!(t),
                    }
                }
            }
        }
    }
}
