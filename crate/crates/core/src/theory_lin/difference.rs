//! 𝔇 satisfiability by negative-cycle detection (Bellman–Ford).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Bounds;
use crate::error::{Error, Result};
use crate::syntax::{Rel, TheoryAtom};
use crate::theory_core::Assignment;

/// `x - y <= k`, where `None` stands for the constant zero.
type Edge = (Option<String>, Option<String>, BigInt);

/// Rewrite an atom as difference constraints. `&diff` atoms map directly;
/// `&sum` atoms qualify when they have the shape `x - y`, `x`, or `-x`
/// with any relation but `!=`.
fn to_edges(s: &TheoryAtom) -> Option<Vec<Edge>> {
    let norm = s.normalized();
    let terms: Vec<_> = norm.terms().iter().filter(|t| !t.coeff.is_zero()).collect();
    let k = s.rhs().clone();
    let one = BigInt::one();
    // (negate lhs, constant) pairs meaning `±lhs <= constant`
    let forms: Vec<(bool, BigInt)> = match s.rel() {
        Rel::Le => vec![(false, k)],
        Rel::Lt => vec![(false, k - &one)],
        Rel::Ge => vec![(true, -k)],
        Rel::Gt => vec![(true, -k - &one)],
        Rel::Eq => vec![(false, k.clone()), (true, -k)],
        Rel::Ne => return None,
    };
    let minus_one = -BigInt::one();
    let (pos, neg): (Option<String>, Option<String>) = match terms.as_slice() {
        [] => (None, None),
        [a] if a.coeff.is_one() => (Some(a.var.clone()), None),
        [a] if a.coeff == minus_one => (None, Some(a.var.clone())),
        [a, b] if a.coeff.is_one() && b.coeff == minus_one => {
            (Some(a.var.clone()), Some(b.var.clone()))
        }
        [a, b] if b.coeff.is_one() && a.coeff == minus_one => {
            (Some(b.var.clone()), Some(a.var.clone()))
        }
        _ => return None,
    };
    Some(
        forms
            .into_iter()
            .map(|(flip, c)| {
                if flip {
                    (neg.clone(), pos.clone(), c)
                } else {
                    (pos.clone(), neg.clone(), c)
                }
            })
            .collect(),
    )
}

/// Exact integer satisfiability of difference constraints. With `bounds`,
/// every variable is additionally confined to its box interval.
///
/// The witness is the shortest-path potential shifted so the zero node is 0.
pub fn sat_d(set: &BTreeSet<TheoryAtom>, bounds: Option<&Bounds>) -> Result<Option<Assignment>> {
    let mut edges: Vec<Edge> = Vec::new();
    for s in set {
        match to_edges(s) {
            Some(es) => edges.extend(es),
            None => {
                return Err(Error::NotDifference {
                    atom: s.to_string(),
                })
            }
        }
    }
    let vars: Vec<String> = set
        .iter()
        .flat_map(|s| s.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // node 0 is the zero node
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i + 1))
        .collect();
    let node = |v: &Option<String>| v.as_deref().map_or(0, |name| index[name]);
    let mut graph: Vec<(usize, usize, BigInt)> = edges
        .iter()
        .map(|(x, y, k)| (node(y), node(x), k.clone()))
        .collect();
    if let Some(b) = bounds {
        for v in &vars {
            let iv = b.get(v);
            graph.push((0, index[v.as_str()], iv.hi.into()));
            graph.push((index[v.as_str()], 0, (-(iv.lo as i128)).into()));
        }
    }

    let n = vars.len() + 1;
    let mut dist = vec![BigInt::zero(); n];
    for round in 0..=n {
        let mut changed = false;
        for (u, v, w) in &graph {
            let candidate = &dist[*u] + w;
            if candidate < dist[*v] {
                dist[*v] = candidate;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == n {
            return Ok(None);
        }
    }
    let base = dist[0].clone();
    Ok(Some(
        vars.iter()
            .map(|v| {
                let d = &dist[index[v.as_str()]] - &base;
                (v.clone(), BigRational::from_integer(d))
            })
            .collect(),
    ))
}
