//! Stable models of normal programs and `⟨𝔗,ℰ⟩`-stable models through the
//! program transformation that fixes a theory solution.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::syntax::{Atom, Head, Program, Rule, TheoryAtom};
use crate::theory_core::{enumerate_solutions, Assignment, EnumOptions, Solution, Theory};

pub type AtomSet = BTreeSet<Atom>;

pub const DEFAULT_ATOM_CAP: usize = 22;

/// `P^X`: drop rules whose negative body meets `X`, strip the rest.
pub fn reduct(p: &Program, x: &AtomSet) -> Program {
    let mut out = Program {
        rules: Vec::new(),
        rule_lines: Vec::new(),
        ..p.clone()
    };
    for (r, line) in p.rules.iter().zip(&p.rule_lines) {
        if r.nbody.iter().all(|a| !x.contains(a)) {
            out.rules
                .push(Rule::new(r.head.clone(), r.pbody.clone(), vec![]));
            out.rule_lines.push(*line);
        }
    }
    out
}

/// Least fixpoint of the immediate consequence operator. Negative bodies
/// are ignored and constraints derive nothing.
pub fn least_model(p: &Program) -> AtomSet {
    let mut x = AtomSet::new();
    loop {
        let before = x.len();
        for r in &p.rules {
            if let Head::Atom(h) = &r.head {
                if !x.contains(h) && r.pbody.iter().all(|a| x.contains(a)) {
                    x.insert(h.clone());
                }
            }
        }
        if x.len() == before {
            return x;
        }
    }
}

/// `X` satisfies every rule classically.
pub fn is_model(p: &Program, x: &AtomSet) -> bool {
    p.rules.iter().all(|r| {
        !r.body_holds(x)
            || match &r.head {
                Head::Atom(h) => x.contains(h),
                Head::Bottom => false,
            }
    })
}

struct Compiled {
    head: Option<usize>,
    pos: u64,
    neg: u64,
}

fn compile(p: &Program, cap: usize) -> Result<(Vec<Atom>, Vec<Compiled>)> {
    let atoms: Vec<Atom> = p.occurring_atoms().into_iter().collect();
    if atoms.len() > cap || atoms.len() > 63 {
        return Err(Error::TooManyAtoms {
            count: atoms.len(),
            cap,
        });
    }
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mask = |xs: &[Atom]| xs.iter().fold(0u64, |m, a| m | 1 << index[a]);
    let rules = p
        .rules
        .iter()
        .map(|r| Compiled {
            head: r.head_atom().map(|h| index[h]),
            pos: mask(&r.pbody),
            neg: mask(&r.nbody),
        })
        .collect();
    Ok((atoms, rules))
}

fn least_model_of_reduct(rules: &[Compiled], x: u64) -> u64 {
    let mut m = 0u64;
    loop {
        let before = m;
        for r in rules {
            if let Some(h) = r.head {
                if r.neg & x == 0 && r.pos & m == r.pos {
                    m |= 1 << h;
                }
            }
        }
        if m == before {
            return m;
        }
    }
}

fn is_stable(rules: &[Compiled], x: u64) -> bool {
    least_model_of_reduct(rules, x) == x
        && rules
            .iter()
            .all(|r| r.head.is_some() || r.pos & x != r.pos || r.neg & x != 0)
}

pub fn stable_models(p: &Program) -> Result<Vec<AtomSet>> {
    stable_models_with_cap(p, DEFAULT_ATOM_CAP)
}

/// All stable models, sorted. Candidates range over subsets of head atoms;
/// the cap applies to all atoms occurring in `p`.
pub fn stable_models_with_cap(p: &Program, cap: usize) -> Result<Vec<AtomSet>> {
    let (atoms, rules) = compile(p, cap)?;
    let heads: Vec<usize> = {
        let set: BTreeSet<usize> = rules.iter().filter_map(|r| r.head).collect();
        set.into_iter().collect()
    };
    let spread = |bits: u64| {
        heads.iter().enumerate().fold(
            0u64,
            |m, (j, &i)| if bits >> j & 1 == 1 { m | 1 << i } else { m },
        )
    };
    let mut out: Vec<AtomSet> = (0..1u64 << heads.len())
        .into_par_iter()
        .map(spread)
        .filter(|&x| is_stable(&rules, x))
        .map(|x| {
            (0..atoms.len())
                .filter(|i| x >> i & 1 == 1)
                .map(|i| atoms[i].clone())
                .collect()
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `P ∪ {s. : s ∈ S∩ℰ} ∪ {:- s. : s ∈ 𝒯∖(S∪ℰ)}` with `𝒯 = p.theory_atoms`.
pub fn transform(
    p: &Program,
    s_set: &BTreeSet<TheoryAtom>,
    externals: &BTreeSet<TheoryAtom>,
) -> Program {
    let mut out = p.clone();
    for s in s_set.intersection(externals) {
        out.push_rule(Rule::fact(Atom::Theory(s.clone())), 0);
    }
    for s in &p.theory_atoms {
        if !s_set.contains(s) && !externals.contains(s) {
            out.push_rule(Rule::constraint(vec![Atom::Theory(s.clone())], vec![]), 0);
        }
    }
    out
}

/// A `⟨𝔗,ℰ⟩`-stable model with every solution that yields it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeModel {
    pub atoms: AtomSet,
    /// Sorted by solution set; never empty.
    pub solutions: Vec<Solution>,
}

impl TeModel {
    pub fn witness(&self) -> &Assignment {
        &self.solutions[0].witness
    }

    pub fn regular_atoms(&self) -> BTreeSet<String> {
        self.atoms
            .iter()
            .filter_map(|a| a.as_regular().map(str::to_string))
            .collect()
    }

    pub fn theory_atoms(&self) -> BTreeSet<TheoryAtom> {
        self.atoms
            .iter()
            .filter_map(|a| a.as_theory().cloned())
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StableOptions {
    pub solutions: EnumOptions,
    pub atom_cap: usize,
}

impl Default for StableOptions {
    fn default() -> Self {
        StableOptions {
            solutions: EnumOptions::default(),
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

/// `⟨𝔗,ℰ⟩`-stable models of a partitioned program, sorted by atom set.
pub fn te_stable_models(p: &Program, th: &dyn Theory) -> Result<Vec<TeModel>> {
    te_stable_models_with(p, th, StableOptions::default())
}

pub fn te_stable_models_with(
    p: &Program,
    th: &dyn Theory,
    opts: StableOptions,
) -> Result<Vec<TeModel>> {
    let solutions = enumerate_solutions(&p.theory_atoms, &p.externals, th, opts.solutions)?;
    let per_solution: Vec<(Solution, Vec<AtomSet>)> = solutions
        .into_par_iter()
        .map(|sol| {
            let models =
                stable_models_with_cap(&transform(p, &sol.atoms, &p.externals), opts.atom_cap)?;
            Ok((sol, models))
        })
        .collect::<Result<_>>()?;
    let mut by_model: BTreeMap<AtomSet, Vec<Solution>> = BTreeMap::new();
    for (sol, models) in per_solution {
        for x in models {
            by_model.entry(x).or_default().push(sol.clone());
        }
    }
    Ok(by_model
        .into_iter()
        .map(|(atoms, mut solutions)| {
            solutions.sort_by(|a, b| a.atoms.cmp(&b.atoms));
            TeModel { atoms, solutions }
        })
        .collect())
}
