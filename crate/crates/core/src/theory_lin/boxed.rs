//! 𝔏 satisfiability by exhaustive backtracking over a finite box.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::Bounds;
use crate::error::{Error, Result};
use crate::syntax::{Rel, TheoryAtom};
use crate::theory_core::Assignment;

pub const DEFAULT_BOX_CAP: u128 = 10_000_000;

enum Lhs {
    Small(Vec<(usize, i64)>, i64),
    Big(Vec<(usize, BigInt)>, BigInt),
}

struct Compiled {
    lhs: Lhs,
    rel: Rel,
}

impl Compiled {
    fn holds(&self, values: &[i64]) -> bool {
        if let Lhs::Small(terms, rhs) = &self.lhs {
            let mut acc: i128 = 0;
            let mut overflow = false;
            for &(i, c) in terms {
                match acc.checked_add(c as i128 * values[i] as i128) {
                    Some(v) => acc = v,
                    None => {
                        overflow = true;
                        break;
                    }
                }
            }
            if !overflow {
                return self.rel.holds(&acc, &(*rhs as i128));
            }
        }
        let (terms, rhs): (Vec<(usize, BigInt)>, BigInt) = match &self.lhs {
            Lhs::Small(t, r) => (t.iter().map(|&(i, c)| (i, c.into())).collect(), (*r).into()),
            Lhs::Big(t, r) => (t.clone(), r.clone()),
        };
        let acc: BigInt = terms
            .iter()
            .map(|(i, c)| c * BigInt::from(values[*i]))
            .sum();
        self.rel.holds(&acc, &rhs)
    }
}

fn compile(s: &TheoryAtom, index: &BTreeMap<&str, usize>) -> Compiled {
    let small: Option<Vec<(usize, i64)>> = s
        .terms()
        .iter()
        .map(|t| t.coeff.to_i64().map(|c| (index[t.var.as_str()], c)))
        .collect();
    let lhs = match (small, s.rhs().to_i64()) {
        (Some(terms), Some(rhs)) => Lhs::Small(terms, rhs),
        _ => Lhs::Big(
            s.terms()
                .iter()
                .map(|t| (index[t.var.as_str()], t.coeff.clone()))
                .collect(),
            s.rhs().clone(),
        ),
    };
    Compiled { lhs, rel: s.rel() }
}

/// Search the box for an integer point satisfying every atom.
///
/// Complete relative to the box only. Values are tried from the one closest
/// to zero outwards, so witnesses tend to be small.
pub fn sat_l(set: &BTreeSet<TheoryAtom>, bounds: &Bounds, cap: u128) -> Result<Option<Assignment>> {
    let vars: Vec<String> = set
        .iter()
        .flat_map(|s| s.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cells = bounds.cells(&vars);
    if cells > cap {
        return Err(Error::BoxTooLarge { cells, cap });
    }
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();

    // atoms are checked as soon as their last variable is assigned
    let mut by_depth: Vec<Vec<Compiled>> = (0..vars.len()).map(|_| Vec::new()).collect();
    for s in set {
        let last = s.terms().iter().map(|t| index[t.var.as_str()]).max();
        match last {
            Some(d) => by_depth[d].push(compile(s, &index)),
            None => unreachable!("theory atoms have at least one term"),
        }
    }

    let domains: Vec<Vec<i64>> = vars
        .iter()
        .map(|v| {
            let iv = bounds.get(v);
            let mut vals: Vec<i64> = iv.values().collect();
            let centre = 0i64.clamp(iv.lo, iv.hi);
            vals.sort_by_key(|&d| ((d as i128 - centre as i128).abs(), d));
            vals
        })
        .collect();

    let mut values = vec![0i64; vars.len()];
    if search(0, &domains, &by_depth, &mut values) {
        Ok(Some(
            vars.into_iter()
                .zip(values)
                .map(|(v, d)| (v, BigRational::from_integer(d.into())))
                .collect(),
        ))
    } else {
        Ok(None)
    }
}

fn search(
    depth: usize,
    domains: &[Vec<i64>],
    by_depth: &[Vec<Compiled>],
    values: &mut [i64],
) -> bool {
    if depth == domains.len() {
        return true;
    }
    for &d in &domains[depth] {
        values[depth] = d;
        if by_depth[depth].iter().all(|c| c.holds(values))
            && search(depth + 1, domains, by_depth, values)
        {
            return true;
        }
    }
    false
}

/// Whether an assignment lies inside the box on all its variables.
pub fn in_box(a: &Assignment, bounds: &Bounds) -> bool {
    a.iter().all(|(v, d)| {
        let iv = bounds.get(v);
        d.is_integer() && iv.contains(&d.to_integer())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory_atom;
    use crate::theory_lin::den_contains_rational;

    fn set(items: &[&str]) -> BTreeSet<TheoryAtom> {
        items
            .iter()
            .map(|t| parse_theory_atom(t).unwrap())
            .collect()
    }

    #[test]
    fn running_example_witness() {
        let atoms = set(&["&sum{x;y}=4", "&sum{y;z}=2"]);
        let b = Bounds::uniform(-5, 5).unwrap();
        let w = sat_l(&atoms, &b, DEFAULT_BOX_CAP).unwrap().unwrap();
        assert!(atoms.iter().all(|s| den_contains_rational(s, &w)));
        assert!(in_box(&w, &b));
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn unsatisfiable_sets() {
        let b = Bounds::uniform(-5, 5).unwrap();
        for atoms in [
            set(&["&sum{x;y}=4", "&sum{x;y}!=4"]),
            set(&["&sum{x}>=1", "&sum{x}<=0"]),
            set(&["&sum{x}=6"]),
        ] {
            assert_eq!(sat_l(&atoms, &b, DEFAULT_BOX_CAP).unwrap(), None);
        }
    }

    #[test]
    fn empty_set_is_satisfiable() {
        let w = sat_l(&BTreeSet::new(), &Bounds::default(), DEFAULT_BOX_CAP).unwrap();
        assert_eq!(w, Some(Assignment::new()));
    }

    #[test]
    fn box_cap() {
        let atoms = set(&["&sum{a;b;c;d;e;f}=0"]);
        let err = sat_l(&atoms, &Bounds::default(), DEFAULT_BOX_CAP).unwrap_err();
        assert_eq!(
            err,
            Error::BoxTooLarge {
                cells: 21u128.pow(6),
                cap: DEFAULT_BOX_CAP
            }
        );
    }

    #[test]
    fn huge_coefficients_do_not_overflow() {
        let atoms = set(&["&sum{9223372036854775807*x;9223372036854775807*y}>0"]);
        let b = Bounds::uniform(-1, 1).unwrap();
        assert!(sat_l(&atoms, &b, DEFAULT_BOX_CAP).unwrap().is_some());
        let atoms = set(&["&sum{99999999999999999999999*x}=99999999999999999999999"]);
        let w = sat_l(&atoms, &b, DEFAULT_BOX_CAP).unwrap().unwrap();
        assert_eq!(w["x"], BigRational::from_integer(1.into()));
    }

    #[test]
    fn per_variable_bounds() {
        let atoms = set(&["&sum{x}>=3"]);
        let b = Bounds::default().with_var("x", "0..2".parse().unwrap());
        assert_eq!(sat_l(&atoms, &b, DEFAULT_BOX_CAP).unwrap(), None);
    }
}
