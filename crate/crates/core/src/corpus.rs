//! Seeded random programs for differential runs.
//!
//! Founded theory atoms only ever occur in heads and external ones only in
//! bodies, so `infer_partition` always succeeds on the output.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::syntax::{Atom, Head, Program, Rel, Rule, Term, TheoryAtom};
use crate::theory_lin::{complement, TheoryKind};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub max_regular: usize,
    pub max_pairs: usize,
    pub max_rules: usize,
    pub max_body: usize,
    pub negation_prob: f64,
    pub constraint_prob: f64,
    pub coeff: (i64, i64),
    pub constant: (i64, i64),
    pub vars: Vec<String>,
    pub max_terms: usize,
    /// `diff-int` yields `&diff` atoms, everything else `&sum` atoms.
    pub theory: TheoryKind,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_regular: 3,
            max_pairs: 2,
            max_rules: 4,
            max_body: 3,
            negation_prob: 0.3,
            constraint_prob: 0.15,
            coeff: (-2, 2),
            constant: (-4, 4),
            vars: ["x", "y", "z"].map(String::from).to_vec(),
            max_terms: 2,
            theory: TheoryKind::LinInt,
        }
    }
}

const REGULAR_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

struct Pair {
    atom: TheoryAtom,
    founded: bool,
}

impl Pair {
    fn pick(&self, rng: &mut ChaCha8Rng) -> Atom {
        Atom::Theory(if rng.gen_bool(0.5) {
            self.atom.clone()
        } else {
            complement(&self.atom)
        })
    }
}

fn theory_atom(cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> TheoryAtom {
    let k = rng.gen_range(cfg.constant.0..=cfg.constant.1);
    let mut vars: Vec<&String> = cfg.vars.iter().collect();
    vars.shuffle(rng);
    if cfg.theory == TheoryKind::DiffInt && vars.len() >= 2 {
        return TheoryAtom::diff(vars[0].as_str(), vars[1].as_str(), k);
    }
    let n = rng.gen_range(1..=cfg.max_terms.min(vars.len()).max(1));
    let terms = vars[..n]
        .iter()
        .map(|v| {
            let c = loop {
                let c = rng.gen_range(cfg.coeff.0..=cfg.coeff.1);
                if c != 0 {
                    break c;
                }
            };
            Term::new(c, v.as_str())
        })
        .collect();
    let rel = *Rel::ALL.choose(rng).expect("non-empty");
    TheoryAtom::sum(terms, rel, k).expect("terms are non-empty")
}

/// Program number `index` of the stream for `seed`.
pub fn generate(seed: u64, index: u64, cfg: &CorpusConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);

    let regulars: Vec<Atom> = REGULAR_NAMES[..cfg.max_regular.min(REGULAR_NAMES.len())]
        .iter()
        .take(rng.gen_range(1..=cfg.max_regular.max(1)))
        .map(|n| Atom::Regular(n.to_string()))
        .collect();

    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for _ in 0..rng.gen_range(0..=cfg.max_pairs) {
        let atom = theory_atom(cfg, &mut rng);
        if seen.contains(&atom) {
            continue;
        }
        seen.insert(complement(&atom));
        seen.insert(atom.clone());
        pairs.push(Pair {
            atom,
            founded: rng.gen_bool(0.5),
        });
    }
    let founded: Vec<&Pair> = pairs.iter().filter(|p| p.founded).collect();
    let external: Vec<&Pair> = pairs.iter().filter(|p| !p.founded).collect();

    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=cfg.max_rules.max(1)) {
        let head = if rng.gen_bool(cfg.constraint_prob) {
            Head::Bottom
        } else {
            let i = rng.gen_range(0..regulars.len() + founded.len());
            match regulars.get(i) {
                Some(a) => Head::Atom(a.clone()),
                None => Head::Atom(founded[i - regulars.len()].pick(&mut rng)),
            }
        };
        let (mut pbody, mut nbody) = (Vec::new(), Vec::new());
        for _ in 0..rng.gen_range(0..=cfg.max_body) {
            let i = rng.gen_range(0..regulars.len() + external.len());
            let lit = match regulars.get(i) {
                Some(a) => a.clone(),
                None => external[i - regulars.len()].pick(&mut rng),
            };
            if rng.gen_bool(cfg.negation_prob) {
                nbody.push(lit);
            } else {
                pbody.push(lit);
            }
        }
        rules.push(Rule::new(head, pbody, nbody));
    }
    Program::from_rules(rules)
}

/// `count` programs starting at index 0.
pub fn corpus(seed: u64, count: u64, cfg: &CorpusConfig) -> Vec<Program> {
    (0..count).map(|i| generate(seed, i, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{infer_partition, parse_program, AtomKind};
    use num_bigint::BigInt;

    #[test]
    fn deterministic_per_seed_and_index() {
        let cfg = CorpusConfig::default();
        assert_eq!(generate(7, 3, &cfg), generate(7, 3, &cfg));
        let a: Vec<String> = corpus(7, 20, &cfg).iter().map(|p| p.to_string()).collect();
        let b: Vec<String> = corpus(8, 20, &cfg).iter().map(|p| p.to_string()).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn programs_respect_the_limits_and_partition() {
        let cfg = CorpusConfig::default();
        for p in corpus(1, 300, &cfg) {
            assert!(p.rules.len() <= 4 && !p.rules.is_empty());
            assert!(p.regulars.len() <= 3);
            let q = infer_partition(&p).unwrap();
            assert!(q.theory_atoms.len() <= 4);
            let reparsed = infer_partition(&parse_program(&p.to_string()).unwrap()).unwrap();
            assert_eq!(reparsed.theory_atoms, q.theory_atoms);
            for s in &q.theory_atoms {
                let within = |v: &BigInt, m: i64| *v >= BigInt::from(-m) && *v <= BigInt::from(m);
                assert!(s
                    .terms()
                    .iter()
                    .all(|t| within(&t.coeff, 2) && t.coeff != 0.into()));
                assert!(within(s.rhs(), 5));
            }
            for r in &p.rules {
                assert!(r.pbody.len() + r.nbody.len() <= 3);
            }
        }
    }

    #[test]
    fn diff_corpus() {
        let cfg = CorpusConfig {
            theory: TheoryKind::DiffInt,
            ..CorpusConfig::default()
        };
        for p in corpus(2, 50, &cfg) {
            let q = infer_partition(&p).unwrap();
            assert!(q.theory_atoms.iter().all(|s| s.kind() == AtomKind::Diff));
        }
    }
}
