//! Abstract theories: complement algebra, completion with respect to the
//! external atoms, `⟨𝔗,ℰ⟩`-solutions and entailment.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::syntax::TheoryAtom;

/// A concrete variable assignment certifying a satisfiable set of atoms.
pub type Assignment = BTreeMap<String, BigRational>;

pub const DEFAULT_UNIVERSE_CAP: usize = 20;

/// A structured theory as seen by the solvers: an involutive complement,
/// the variables of each atom, and a satisfiability oracle over finite sets.
pub trait Theory: Send + Sync {
    fn name(&self) -> String;

    fn complement(&self, s: &TheoryAtom) -> TheoryAtom;

    fn vars_of(&self, s: &TheoryAtom) -> BTreeSet<String>;

    /// `Some(witness)` iff the set is satisfiable.
    fn solve(&self, set: &BTreeSet<TheoryAtom>) -> Result<Option<Assignment>>;

    fn is_satisfiable(&self, set: &BTreeSet<TheoryAtom>) -> Result<bool> {
        Ok(self.solve(set)?.is_some())
    }

    /// `den(comp(s))` is exactly the set complement of `den(s)`.
    fn has_absolute_complement(&self) -> bool;

    /// Closed non-empty sets may be satisfiable. No shipped theory sets this.
    fn is_paraconsistent(&self) -> bool {
        false
    }
}

pub fn complement_set(set: &BTreeSet<TheoryAtom>, th: &dyn Theory) -> BTreeSet<TheoryAtom> {
    set.iter().map(|s| th.complement(s)).collect()
}

/// No atom occurs together with its complement.
pub fn is_consistent(set: &BTreeSet<TheoryAtom>, th: &dyn Theory) -> bool {
    set.iter().all(|s| !set.contains(&th.complement(s)))
}

/// Every atom of `universe` is decided by `set`.
pub fn is_complete(
    set: &BTreeSet<TheoryAtom>,
    universe: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> Result<bool> {
    if let Some(s) = universe
        .iter()
        .find(|s| !universe.contains(&th.complement(s)))
    {
        return Err(Error::UniverseNotClosed {
            atom: s.to_string(),
        });
    }
    Ok(universe
        .iter()
        .all(|s| set.contains(s) || set.contains(&th.complement(s))))
}

pub fn is_closed(set: &BTreeSet<TheoryAtom>, th: &dyn Theory) -> bool {
    set.iter().all(|s| set.contains(&th.complement(s)))
}

/// `S ∪ comp(ℰ \ S)`
pub fn complete_wrt(
    set: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> BTreeSet<TheoryAtom> {
    let mut out = set.clone();
    out.extend(externals.difference(set).map(|s| th.complement(s)));
    out
}

pub fn is_e_complete(
    set: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> bool {
    externals
        .iter()
        .all(|s| set.contains(s) || set.contains(&th.complement(s)))
}

/// The witness for the completion of `set`, if it is a `⟨𝔗,ℰ⟩`-solution.
pub fn solution_witness(
    set: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> Result<Option<Assignment>> {
    th.solve(&complete_wrt(set, externals, th))
}

pub fn is_solution(
    set: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> Result<bool> {
    Ok(solution_witness(set, externals, th)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub atoms: BTreeSet<TheoryAtom>,
    /// Witness for the ℰ-completion of `atoms`.
    pub witness: Assignment,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub cap: usize,
    /// Skip candidates that are not ℰ-complete.
    pub complete_only: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: DEFAULT_UNIVERSE_CAP,
            complete_only: true,
        }
    }
}

/// All ℰ-complete `⟨𝔗,ℰ⟩`-solutions inside `universe`, sorted.
pub fn enumerate_complete_solutions(
    universe: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
) -> Result<Vec<Solution>> {
    enumerate_solutions(universe, externals, th, EnumOptions::default())
}

pub fn enumerate_solutions(
    universe: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
    th: &dyn Theory,
    opts: EnumOptions,
) -> Result<Vec<Solution>> {
    let atoms: Vec<&TheoryAtom> = universe.iter().collect();
    let n = atoms.len();
    if n > opts.cap || n >= 63 {
        return Err(Error::UniverseTooLarge {
            size: n,
            cap: opts.cap,
        });
    }
    let index: BTreeMap<&TheoryAtom, usize> =
        atoms.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut comp_index = Vec::with_capacity(n);
    for s in &atoms {
        let c = th.complement(s);
        match index.get(&c) {
            Some(&j) => comp_index.push(j),
            None => {
                return Err(Error::UniverseNotClosed {
                    atom: s.to_string(),
                })
            }
        }
    }
    // (bit of e, bit of comp(e)) for every external e
    let external_bits: Vec<(u64, u64)> = externals
        .iter()
        .filter_map(|e| index.get(e).map(|&i| (1u64 << i, 1u64 << comp_index[i])))
        .collect();

    let mut found: Vec<Solution> = (0..1u64 << n)
        .into_par_iter()
        .filter(|mask| {
            !opts.complete_only || external_bits.iter().all(|(e, c)| mask & (e | c) != 0)
        })
        .map(|mask| {
            let set: BTreeSet<TheoryAtom> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| atoms[i].clone())
                .collect();
            Ok(
                solution_witness(&set, externals, th)?.map(|witness| Solution {
                    atoms: set,
                    witness,
                }),
            )
        })
        .filter_map(|r: Result<Option<Solution>>| r.transpose())
        .collect::<Result<Vec<_>>>()?;
    found.sort_by(|a, b| a.atoms.cmp(&b.atoms));
    Ok(found)
}

/// `S ⊨ s`, decided as unsatisfiability of `S ∪ {comp(s)}`.
pub fn entails(set: &BTreeSet<TheoryAtom>, s: &TheoryAtom, th: &dyn Theory) -> Result<bool> {
    if !th.has_absolute_complement() {
        return Err(Error::NotAbsolute { theory: th.name() });
    }
    let mut with_comp = set.clone();
    with_comp.insert(th.complement(s));
    Ok(!th.is_satisfiable(&with_comp)?)
}
