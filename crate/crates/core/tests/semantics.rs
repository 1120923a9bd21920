//! Cross-module checks against definitional oracles written here.

use std::collections::BTreeSet;

use amt_core::corpus::{generate, CorpusConfig};
use amt_core::htc::equilibrium_models;
use amt_core::stable::{stable_models, te_stable_models, AtomSet};
use amt_core::syntax::{infer_partition, parse_program, Atom, Head, Program, Rel, TheoryAtom};
use amt_core::theory_lin::{complement, make_handle, Bounds, TheoryKind};
use amt_core::translate::{project_equilibrium, tau};
use proptest::prelude::*;

fn holds(s: &TheoryAtom, env: &[(String, i64)]) -> bool {
    let val = |v: &str| env.iter().find(|(k, _)| k == v).map(|(_, d)| *d).unwrap();
    let lhs: i64 = s
        .terms()
        .iter()
        .map(|t| i64::try_from(&t.coeff).unwrap() * val(&t.var))
        .sum();
    let k = i64::try_from(s.rhs()).unwrap();
    match s.rel() {
        Rel::Le => lhs <= k,
        Rel::Eq => lhs == k,
        Rel::Ne => lhs != k,
        Rel::Lt => lhs < k,
        Rel::Gt => lhs > k,
        Rel::Ge => lhs >= k,
    }
}

fn box_sat(set: &BTreeSet<TheoryAtom>, lo: i64, hi: i64) -> bool {
    let vars: Vec<String> = set
        .iter()
        .flat_map(|s| s.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = (hi - lo + 1) as u64;
    (0..n.pow(vars.len() as u32)).any(|mut code| {
        let env: Vec<(String, i64)> = vars
            .iter()
            .map(|v| {
                let d = lo + (code % n) as i64;
                code /= n;
                (v.clone(), d)
            })
            .collect();
        set.iter().all(|s| holds(s, &env))
    })
}

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0u32..1 << items.len())
        .map(|m| {
            (0..items.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| items[i].clone())
                .collect()
        })
        .collect()
}

/// `X` is a model of the rules read classically.
fn classical_model(rules: &[(Option<Atom>, Vec<Atom>, Vec<Atom>)], x: &AtomSet) -> bool {
    rules.iter().all(|(h, pos, neg)| {
        let body = pos.iter().all(|a| x.contains(a)) && neg.iter().all(|a| !x.contains(a));
        !body || h.as_ref().is_some_and(|h| x.contains(h))
    })
}

/// Stable models straight from the definition: `X` is a model of `P` and
/// no `Y ⊂ X` is a model of the reduct `P^X`.
fn oracle_stable(
    rules: &[(Option<Atom>, Vec<Atom>, Vec<Atom>)],
    atoms: &[Atom],
) -> BTreeSet<AtomSet> {
    subsets(atoms)
        .into_iter()
        .filter(|x| classical_model(rules, x))
        .filter(|x| {
            let reduct: Vec<_> = rules
                .iter()
                .filter(|(_, _, neg)| neg.iter().all(|a| !x.contains(a)))
                .map(|(h, pos, _)| (h.clone(), pos.clone(), Vec::new()))
                .collect();
            subsets(&x.iter().cloned().collect::<Vec<_>>())
                .into_iter()
                .all(|y| y == *x || !classical_model(&reduct, &y))
        })
        .collect()
}

/// `⟨𝔏,ℰ⟩`-stable models by enumerating every solution `S`, complete or not.
fn oracle_te(p: &Program, lo: i64, hi: i64) -> BTreeSet<AtomSet> {
    let universe: Vec<TheoryAtom> = p.theory_atoms.iter().cloned().collect();
    let mut atoms: Vec<Atom> = p
        .regulars
        .iter()
        .map(|a| Atom::Regular(a.clone()))
        .collect();
    atoms.extend(universe.iter().cloned().map(Atom::Theory));
    let mut out = BTreeSet::new();
    for s in subsets(&universe) {
        let mut completed = s.clone();
        completed.extend(p.externals.difference(&s).map(complement));
        if !box_sat(&completed, lo, hi) {
            continue;
        }
        let mut rules: Vec<(Option<Atom>, Vec<Atom>, Vec<Atom>)> = p
            .rules
            .iter()
            .map(|r| {
                let h = match &r.head {
                    Head::Atom(a) => Some(a.clone()),
                    Head::Bottom => None,
                };
                (h, r.pbody.clone(), r.nbody.clone())
            })
            .collect();
        for a in s.intersection(&p.externals) {
            rules.push((Some(Atom::Theory(a.clone())), vec![], vec![]));
        }
        for a in universe
            .iter()
            .filter(|a| !s.contains(a) && !p.externals.contains(a))
        {
            rules.push((None, vec![Atom::Theory(a.clone())], vec![]));
        }
        out.extend(oracle_stable(&rules, &atoms));
    }
    out
}

#[test]
fn te_stable_models_match_the_definition_on_a_corpus() {
    let cfg = CorpusConfig::default();
    let th = make_handle(TheoryKind::LinInt, Bounds::uniform(-3, 3).unwrap());
    for i in 0..200 {
        let p = infer_partition(&generate(11, i, &cfg)).unwrap();
        let got: BTreeSet<AtomSet> = te_stable_models(&p, &th)
            .unwrap()
            .into_iter()
            .map(|m| m.atoms)
            .collect();
        assert_eq!(got, oracle_te(&p, -3, 3), "program {i}:\n{p}");
    }
}

#[test]
fn tau_route_matches_the_definition_on_the_running_example() {
    let p =
        infer_partition(&parse_program("a :- &sum{x;y}=4.\n&sum{y;z}=2 :- a.").unwrap()).unwrap();
    let th = make_handle(TheoryKind::LinInt, Bounds::uniform(-2, 2).unwrap());
    let out = tau(&p, &th).unwrap();
    let via: BTreeSet<AtomSet> = equilibrium_models(&out.theory, &out.signature)
        .unwrap()
        .iter()
        .map(|t| project_equilibrium(t, &p))
        .collect();
    assert_eq!(via, oracle_te(&p, -2, 2));
    assert_eq!(via.len(), 2);
}

#[test]
fn classic_normal_programs() {
    let models = |text: &str| stable_models(&parse_program(text).unwrap()).unwrap();
    let reg = |a: &str| Atom::Regular(a.into());
    assert_eq!(
        models("a :- not b.\nb :- not a."),
        vec![AtomSet::from([reg("a")]), AtomSet::from([reg("b")])]
    );
    assert!(models("a :- not a.").is_empty());
    assert_eq!(models("a :- b.\nb :- a."), vec![AtomSet::new()]);
    assert_eq!(
        models("a.\nb :- a, not c."),
        vec![AtomSet::from([reg("a"), reg("b")])]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_corpus_programs_parse_back(seed in any::<u64>(), index in 0u64..1000) {
        let p = generate(seed, index, &CorpusConfig::default());
        let back = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(back.rules, p.rules);
    }

    #[test]
    fn regular_programs_match_the_definition(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = CorpusConfig { max_pairs: 0, max_regular: 4, ..CorpusConfig::default() };
        let p = generate(seed, index, &cfg);
        let atoms: Vec<Atom> = p.regulars.iter().map(|a| Atom::Regular(a.clone())).collect();
        let rules: Vec<_> = p.rules.iter().map(|r| {
            let h = match &r.head { Head::Atom(a) => Some(a.clone()), Head::Bottom => None };
            (h, r.pbody.clone(), r.nbody.clone())
        }).collect();
        let got: BTreeSet<AtomSet> = stable_models(&p).unwrap().into_iter().collect();
        prop_assert_eq!(got, oracle_stable(&rules, &atoms));
    }
}
