//! Ground T-logic programs: theory atoms, rules, programs, and the
//! founded/external partition of theory atoms.
//!
//! Theory atoms are compared structurally and order-sensitively:
//! `&sum{x;y}=4` and `&sum{y;x}=4` are different atoms unless the
//! program was parsed with [`ParseOptions::normalize`].

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::theory_lin::complement;

pub(crate) use lexer::Tok;
pub(crate) use parser::Parser;
pub use parser::{parse_program, parse_program_with, parse_theory_atom, ParseOptions};

/// Comparison symbol of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Le,
    Eq,
    Ne,
    Lt,
    Gt,
    Ge,
}

impl Rel {
    pub const ALL: [Rel; 6] = [Rel::Le, Rel::Eq, Rel::Ne, Rel::Lt, Rel::Gt, Rel::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }

    /// The relation holding exactly where `self` fails.
    pub fn negate(self) -> Rel {
        match self {
            Rel::Le => Rel::Gt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Lt => Rel::Ge,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    pub fn holds<T: Ord + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ne => lhs != rhs,
            Rel::Lt => lhs < rhs,
            Rel::Gt => lhs > rhs,
            Rel::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Sum,
    Diff,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub coeff: BigInt,
    pub var: String,
}

impl Term {
    pub fn new(coeff: impl Into<BigInt>, var: impl Into<String>) -> Self {
        Term {
            coeff: coeff.into(),
            var: var.into(),
        }
    }
}

/// A linear (`&sum`) or difference (`&diff`) constraint `Σ kᵢ·xᵢ ≺ k₀`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoryAtom {
    kind: AtomKind,
    terms: Vec<Term>,
    rel: Rel,
    rhs: BigInt,
}

impl TheoryAtom {
    pub fn sum(terms: Vec<Term>, rel: Rel, rhs: impl Into<BigInt>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidAtom(
                "a &sum atom needs at least one term".into(),
            ));
        }
        Ok(TheoryAtom {
            kind: AtomKind::Sum,
            terms,
            rel,
            rhs: rhs.into(),
        })
    }

    /// `x - y <= k`
    pub fn diff(x: impl Into<String>, y: impl Into<String>, k: impl Into<BigInt>) -> Self {
        TheoryAtom {
            kind: AtomKind::Diff,
            terms: vec![Term::new(1, x), Term::new(-1, y)],
            rel: Rel::Le,
            rhs: k.into(),
        }
    }

    pub fn kind(&self) -> AtomKind {
        self.kind
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.iter().map(|t| t.var.clone()).collect()
    }

    /// The same constraint with a different relation, as a `&sum` atom.
    pub fn with_rel(&self, rel: Rel) -> TheoryAtom {
        TheoryAtom {
            kind: AtomKind::Sum,
            terms: self.terms.clone(),
            rel,
            rhs: self.rhs.clone(),
        }
    }

    /// For a difference atom, the pair `(x, y)` of `x - y <= k`.
    pub fn diff_vars(&self) -> Option<(&str, &str)> {
        match self.kind {
            AtomKind::Diff => Some((&self.terms[0].var, &self.terms[1].var)),
            AtomKind::Sum => None,
        }
    }

    /// Terms sorted by variable with coefficients of repeated variables merged.
    pub fn normalized(&self) -> TheoryAtom {
        if self.kind == AtomKind::Diff {
            return self.clone();
        }
        let mut merged: Vec<Term> = Vec::new();
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.var.cmp(&b.var));
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.var == t.var => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        TheoryAtom {
            kind: AtomKind::Sum,
            terms: merged,
            rel: self.rel,
            rhs: self.rhs.clone(),
        }
    }
}

impl fmt::Display for TheoryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AtomKind::Diff => write!(
                f,
                "&diff{{{}-{}}}<={}",
                self.terms[0].var, self.terms[1].var, self.rhs
            ),
            AtomKind::Sum => {
                f.write_str("&sum{")?;
                for (i, t) in self.terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    if t.coeff.is_one() {
                        write!(f, "{}", t.var)?;
                    } else {
                        write!(f, "{}*{}", t.coeff, t.var)?;
                    }
                }
                write!(f, "}}{}{}", self.rel.symbol(), self.rhs)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Regular(String),
    Theory(TheoryAtom),
}

impl Atom {
    pub fn as_theory(&self) -> Option<&TheoryAtom> {
        match self {
            Atom::Theory(s) => Some(s),
            Atom::Regular(_) => None,
        }
    }

    pub fn as_regular(&self) -> Option<&str> {
        match self {
            Atom::Regular(a) => Some(a),
            Atom::Theory(_) => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Regular(a) => f.write_str(a),
            Atom::Theory(s) => s.fmt(f),
        }
    }
}

impl From<TheoryAtom> for Atom {
    fn from(s: TheoryAtom) -> Self {
        Atom::Theory(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Atom(Atom),
    Bottom,
}

/// `head :- pbody, not nbody.`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub pbody: Vec<Atom>,
    pub nbody: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Head, pbody: Vec<Atom>, nbody: Vec<Atom>) -> Self {
        fn dedup(mut atoms: Vec<Atom>) -> Vec<Atom> {
            let mut seen = BTreeSet::new();
            atoms.retain(|a| seen.insert(a.clone()));
            atoms
        }
        Rule {
            head,
            pbody: dedup(pbody),
            nbody: dedup(nbody),
        }
    }

    pub fn fact(head: Atom) -> Self {
        Rule::new(Head::Atom(head), vec![], vec![])
    }

    pub fn constraint(pbody: Vec<Atom>, nbody: Vec<Atom>) -> Self {
        Rule::new(Head::Bottom, pbody, nbody)
    }

    pub fn head_atom(&self) -> Option<&Atom> {
        match &self.head {
            Head::Atom(a) => Some(a),
            Head::Bottom => None,
        }
    }

    pub fn body_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.pbody.iter().chain(self.nbody.iter())
    }

    /// Whether the body holds in the classical two-valued sense w.r.t. `x`.
    pub fn body_holds(&self, x: &BTreeSet<Atom>) -> bool {
        self.pbody.iter().all(|a| x.contains(a)) && self.nbody.iter().all(|a| !x.contains(a))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Head::Atom(a) = &self.head {
            write!(f, "{a}")?;
        }
        let empty = self.pbody.is_empty() && self.nbody.is_empty();
        match (&self.head, empty) {
            (Head::Atom(_), true) => return f.write_str("."),
            (Head::Atom(_), false) => f.write_str(" :- ")?,
            (Head::Bottom, true) => return f.write_str(":- ."),
            (Head::Bottom, false) => f.write_str(":- ")?,
        }
        let lits = self
            .pbody
            .iter()
            .map(|a| a.to_string())
            .chain(self.nbody.iter().map(|a| format!("not {a}")));
        for (i, lit) in lits.enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&lit)?;
        }
        f.write_str(".")
    }
}

/// A ground T-logic program over `⟨𝒜, 𝒯, ℰ⟩`.
///
/// After parsing, `theory_atoms` holds the atoms occurring in the program and
/// `externals`/`founded` are empty; [`infer_partition`] fills them in and widens
/// `theory_atoms` to the relevant universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub regulars: BTreeSet<String>,
    pub theory_atoms: BTreeSet<TheoryAtom>,
    pub externals: BTreeSet<TheoryAtom>,
    pub founded: BTreeSet<TheoryAtom>,
    /// `#external` directives in source order.
    pub declared_externals: Vec<TheoryAtom>,
    /// Source line of each rule; 0 for synthesized rules.
    pub rule_lines: Vec<usize>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rules(rules: Vec<Rule>) -> Self {
        let mut p = Program::new();
        for r in rules {
            p.push_rule(r, 0);
        }
        p
    }

    pub fn push_rule(&mut self, rule: Rule, line: usize) {
        let atoms = rule.head_atom().into_iter().chain(rule.body_atoms());
        for a in atoms {
            match a {
                Atom::Regular(n) => {
                    self.regulars.insert(n.clone());
                }
                Atom::Theory(s) => {
                    self.theory_atoms.insert(s.clone());
                }
            }
        }
        self.rules.push(rule);
        self.rule_lines.push(line);
    }

    pub fn head_theory_atoms(&self) -> BTreeSet<TheoryAtom> {
        self.rules
            .iter()
            .filter_map(|r| r.head_atom().and_then(Atom::as_theory).cloned())
            .collect()
    }

    pub fn body_theory_atoms(&self) -> BTreeSet<TheoryAtom> {
        self.rules
            .iter()
            .flat_map(|r| r.body_atoms().filter_map(Atom::as_theory).cloned())
            .collect()
    }

    /// Atoms that occur somewhere in a rule.
    pub fn occurring_atoms(&self) -> BTreeSet<Atom> {
        self.rules
            .iter()
            .flat_map(|r| r.head_atom().into_iter().chain(r.body_atoms()).cloned())
            .collect()
    }

    /// `𝒜 ∪ 𝒯` as atoms.
    pub fn all_atoms(&self) -> BTreeSet<Atom> {
        self.regulars
            .iter()
            .map(|a| Atom::Regular(a.clone()))
            .chain(self.theory_atoms.iter().cloned().map(Atom::Theory))
            .collect()
    }

    /// Theory atoms outside `ℰ`, including complements of founded atoms.
    pub fn non_externals(&self) -> BTreeSet<TheoryAtom> {
        self.theory_atoms
            .difference(&self.externals)
            .cloned()
            .collect()
    }

    /// Variables of all theory atoms in the universe.
    pub fn theory_vars(&self) -> BTreeSet<String> {
        self.theory_atoms.iter().flat_map(|s| s.vars()).collect()
    }

    fn line_of_atom(&self, s: &TheoryAtom, heads: bool) -> usize {
        self.rules
            .iter()
            .zip(&self.rule_lines)
            .find(|(r, _)| {
                let in_head = r.head_atom().and_then(Atom::as_theory) == Some(s);
                let in_body = r.body_atoms().any(|a| a.as_theory() == Some(s));
                if heads {
                    in_head
                } else {
                    in_body
                }
            })
            .map(|(_, l)| *l)
            .unwrap_or(0)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.declared_externals {
            writeln!(f, "#external {s}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// The founded/external split of a program's theory atoms.
///
/// Externals are the body occurrences and `#external` directives closed under
/// complement; founded atoms are the head occurrences. The universe `𝒯` is
/// `ℰ ∪ ℱ ∪ comp(ℱ)`.
pub fn infer_partition(p: &Program) -> Result<Program> {
    let mut externals: BTreeSet<TheoryAtom> = p.body_theory_atoms();
    externals.extend(p.declared_externals.iter().cloned());
    let externals = close_under_complement(&externals);
    let founded = p.head_theory_atoms();

    if let Some(s) = founded.intersection(&externals).next() {
        return Err(Error::PartitionConflict {
            atom: s.to_string(),
            line: p.line_of_atom(s, true),
        });
    }

    let mut out = p.clone();
    out.theory_atoms = externals
        .iter()
        .chain(founded.iter())
        .cloned()
        .chain(founded.iter().map(complement))
        .collect();
    out.externals = externals;
    out.founded = founded;
    Ok(out)
}

/// Every theory atom external (clingcon's reading, `ℰ = 𝒯`).
///
/// The result may violate `Head(P) ∩ ℰ = ∅`; it is meant for the HT_c
/// translations only.
pub fn all_external_partition(p: &Program) -> Program {
    let mut all = p.head_theory_atoms();
    all.extend(p.body_theory_atoms());
    all.extend(p.declared_externals.iter().cloned());
    let closed = close_under_complement(&all);
    let mut out = p.clone();
    out.theory_atoms = closed.clone();
    out.externals = closed;
    out.founded = BTreeSet::new();
    out
}

pub fn close_under_complement(set: &BTreeSet<TheoryAtom>) -> BTreeSet<TheoryAtom> {
    set.iter()
        .cloned()
        .chain(set.iter().map(complement))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> TheoryAtom {
        parse_theory_atom(text).unwrap()
    }

    #[test]
    fn running_example_partition() {
        let p = parse_program("a :- &sum{x;y}=4.\n&sum{y;z}=2 :- a.").unwrap();
        let p = infer_partition(&p).unwrap();
        let (s1, s2, s3, s4) = (
            s("&sum{x;y}=4"),
            s("&sum{y;z}=2"),
            s("&sum{x;y}!=4"),
            s("&sum{y;z}!=2"),
        );
        assert_eq!(p.externals, BTreeSet::from([s1.clone(), s3.clone()]));
        assert_eq!(p.founded, BTreeSet::from([s2.clone()]));
        assert_eq!(p.theory_atoms, BTreeSet::from([s1, s2, s3, s4]));
    }

    #[test]
    fn head_and_body_occurrence_conflicts() {
        let p = parse_program("&sum{x}>=1.\n:- &sum{x}>=1.").unwrap();
        assert_eq!(
            infer_partition(&p),
            Err(Error::PartitionConflict {
                atom: "&sum{x}>=1".into(),
                line: 1
            })
        );
    }

    #[test]
    fn complement_in_body_conflicts_with_head() {
        // the body atom's complement is external, so the head cannot be founded
        let p = parse_program("&sum{x}>=1 :- a.\na :- &sum{x}<1.").unwrap();
        assert!(matches!(
            infer_partition(&p),
            Err(Error::PartitionConflict { .. })
        ));
    }

    #[test]
    fn directive_adds_closed_externals() {
        let p = parse_program("#external &diff{x-y}<=3.\na.").unwrap();
        let p = infer_partition(&p).unwrap();
        assert_eq!(
            p.externals,
            BTreeSet::from([s("&diff{x-y}<=3"), s("&diff{y-x}<=-4")])
        );
    }

    #[test]
    fn empty_program_has_empty_partition() {
        let p = infer_partition(&parse_program("").unwrap()).unwrap();
        assert!(p.externals.is_empty() && p.founded.is_empty() && p.theory_atoms.is_empty());
        assert!(p.rules.is_empty() && p.regulars.is_empty());
    }

    #[test]
    fn clingcon_partition_makes_everything_external() {
        let p = parse_program("a :- &sum{x;y}=4.\n&sum{y;z}=2 :- a.").unwrap();
        let p = all_external_partition(&p);
        assert_eq!(p.externals.len(), 4);
        assert!(p.founded.is_empty());
    }

    #[test]
    fn normalization_merges_and_sorts() {
        let a = s("&sum{y;2*x;x}=4").normalized();
        assert_eq!(a.to_string(), "&sum{3*x;y}=4");
        assert_ne!(s("&sum{x;y}=4"), s("&sum{y;x}=4"));
    }
}
