//! ℜ satisfiability by Fourier–Motzkin elimination over exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::syntax::{Rel, TheoryAtom};
use crate::theory_core::Assignment;

pub const DEFAULT_SPLIT_CAP: u128 = 1 << 16;

type Q = BigRational;

/// `Σ coeffs[i]·x_i < rhs` if strict, `<=` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: BTreeMap<usize, Q>,
    rhs: Q,
    strict: bool,
}

impl Ineq {
    fn new(coeffs: BTreeMap<usize, Q>, rhs: Q, strict: bool) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ineq {
            coeffs,
            rhs,
            strict,
        }
    }

    fn negated_lhs(&self, rhs: Q, strict: bool) -> Ineq {
        Ineq::new(
            self.coeffs.iter().map(|(i, c)| (*i, -c)).collect(),
            rhs,
            strict,
        )
    }

    /// Holds trivially or fails trivially once no variable is left.
    fn constant_holds(&self) -> bool {
        let zero = Q::zero();
        if self.strict {
            zero < self.rhs
        } else {
            zero <= self.rhs
        }
    }

    fn scaled(&self, f: &Q) -> (BTreeMap<usize, Q>, Q) {
        (
            self.coeffs.iter().map(|(i, c)| (*i, c * f)).collect(),
            &self.rhs * f,
        )
    }
}

fn combine(p: &Ineq, n: &Ineq, v: usize) -> Ineq {
    let (mut coeffs, mut rhs) = p.scaled(&(Q::one() / &p.coeffs[&v]));
    let (nc, nr) = n.scaled(&(Q::one() / n.coeffs[&v].abs()));
    for (i, c) in nc {
        *coeffs.entry(i).or_insert_with(Q::zero) += c;
    }
    rhs += nr;
    coeffs.remove(&v);
    Ineq::new(coeffs, rhs, p.strict || n.strict)
}

fn eliminate(system: &[Ineq], v: usize) -> Vec<Ineq> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), BTreeSet::new());
    for q in system {
        match q.coeffs.get(&v) {
            Some(c) if c.is_positive() => pos.push(q),
            Some(_) => neg.push(q),
            None => {
                out.insert(q.clone());
            }
        }
    }
    for p in &pos {
        for n in &neg {
            out.insert(combine(p, n, v));
        }
    }
    out.into_iter().collect()
}

/// A value for variable `v` given the values of later variables, chosen as
/// 0 if allowed, otherwise an integer if one fits, otherwise the midpoint.
fn pick(system: &[Ineq], v: usize, values: &BTreeMap<usize, Q>) -> Q {
    // (bound, strict)
    let mut lower: Option<(Q, bool)> = None;
    let mut upper: Option<(Q, bool)> = None;
    for q in system {
        let Some(a) = q.coeffs.get(&v) else { continue };
        let mut rest = q.rhs.clone();
        for (i, c) in &q.coeffs {
            if *i != v {
                rest -= c * &values[i];
            }
        }
        let bound = rest / a;
        if a.is_positive() {
            let tighter = match &upper {
                None => true,
                Some((u, s)) => bound < *u || (bound == *u && q.strict && !s),
            };
            if tighter {
                upper = Some((bound, q.strict));
            }
        } else {
            let tighter = match &lower {
                None => true,
                Some((l, s)) => bound > *l || (bound == *l && q.strict && !s),
            };
            if tighter {
                lower = Some((bound, q.strict));
            }
        }
    }
    let fits = |x: &Q| {
        lower
            .as_ref()
            .is_none_or(|(l, s)| if *s { x > l } else { x >= l })
            && upper
                .as_ref()
                .is_none_or(|(u, s)| if *s { x < u } else { x <= u })
    };
    if fits(&Q::zero()) {
        return Q::zero();
    }
    let candidate = match (&lower, &upper) {
        (Some((l, true)), _) => l.floor() + Q::one(),
        (Some((l, false)), _) => l.ceil(),
        (None, Some((u, true))) => u.ceil() - Q::one(),
        (None, Some((u, false))) => u.floor(),
        (None, None) => Q::zero(),
    };
    if fits(&candidate) {
        return candidate;
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / Q::from_integer(2.into()),
        _ => unreachable!("a one-sided bound always admits an integer"),
    }
}

/// Solve a system without disequalities.
fn fm_solve(system: Vec<Ineq>, nvars: usize) -> Option<Vec<Q>> {
    let mut stages = Vec::with_capacity(nvars);
    let mut current = system;
    for v in 0..nvars {
        let next = eliminate(&current, v);
        stages.push(current);
        if next
            .iter()
            .any(|q| q.coeffs.is_empty() && !q.constant_holds())
        {
            return None;
        }
        current = next.into_iter().filter(|q| !q.coeffs.is_empty()).collect();
    }
    debug_assert!(current.is_empty());
    let mut values: BTreeMap<usize, Q> = BTreeMap::new();
    for v in (0..nvars).rev() {
        let value = pick(&stages[v], v, &values);
        values.insert(v, value);
    }
    Some(values.into_values().collect())
}

/// Exact rational satisfiability. Each `!=` doubles the number of systems
/// explored (`<` or `>`); more than `split_cap` systems is an error.
pub fn sat_r(set: &BTreeSet<TheoryAtom>, split_cap: u128) -> Result<Option<Assignment>> {
    let vars: Vec<String> = set
        .iter()
        .flat_map(|s| s.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();

    let mut base = Vec::new();
    let mut splits: Vec<Ineq> = Vec::new();
    for s in set {
        let mut coeffs: BTreeMap<usize, Q> = BTreeMap::new();
        for t in s.terms() {
            *coeffs.entry(index[t.var.as_str()]).or_insert_with(Q::zero) +=
                Q::from_integer(t.coeff.clone());
        }
        let k = Q::from_integer(s.rhs().clone());
        let le = Ineq::new(coeffs, k.clone(), false);
        match s.rel() {
            Rel::Le => base.push(le),
            Rel::Lt => base.push(Ineq { strict: true, ..le }),
            Rel::Ge => base.push(le.negated_lhs(-k, false)),
            Rel::Gt => base.push(le.negated_lhs(-k, true)),
            Rel::Eq => {
                base.push(le.negated_lhs(-k, false));
                base.push(le);
            }
            Rel::Ne => splits.push(le),
        }
    }
    let branches = 1u128.checked_shl(splits.len() as u32).unwrap_or(u128::MAX);
    if splits.len() >= 128 || branches > split_cap {
        return Err(Error::CaseSplitLimit {
            splits: branches,
            cap: split_cap,
        });
    }
    for choice in 0..branches {
        let mut system = base.clone();
        for (j, q) in splits.iter().enumerate() {
            if choice >> j & 1 == 0 {
                system.push(Ineq {
                    strict: true,
                    ..q.clone()
                });
            } else {
                system.push(q.negated_lhs(-q.rhs.clone(), true));
            }
        }
        if system
            .iter()
            .any(|q| q.coeffs.is_empty() && !q.constant_holds())
        {
            continue;
        }
        let system: Vec<Ineq> = system
            .into_iter()
            .filter(|q| !q.coeffs.is_empty())
            .collect();
        if let Some(values) = fm_solve(system, vars.len()) {
            return Ok(Some(vars.into_iter().zip(values).collect()));
        }
    }
    Ok(None)
}
