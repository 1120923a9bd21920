//! Compiled evaluator for finite-box HT_c enumeration.
//!
//! Variables become slots holding a value index (0 for `u`). An atom is
//! true at `h` iff it is true at `t` and all its variables are defined in
//! `h`, since `h ⊆ t` and every atom needs its variables defined. So `h`
//! is just a bitmask of `t`'s defined slots.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{
    ConstraintAtom, Formula, Interpretation, Signature, Valuation, Value, VarDomain, Verdict,
};
use crate::error::{Error, Result};
use crate::syntax::Rel;

/// Upper bound on the number of total valuations (box size with `u`).
pub const DEFAULT_TOTALS_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Bottom,
    Atom(usize),
    And(usize, usize),
    Or(usize, usize),
    Impl(usize, usize),
}

#[derive(Debug)]
enum CAtom {
    Defined,
    Small(Vec<(usize, i64)>, i64, Rel),
    Big(Vec<(usize, BigInt)>, BigInt, Rel),
}

#[derive(Debug)]
struct Slot {
    name: String,
    dom: VarDomain,
}

impl Slot {
    fn radix(&self) -> u64 {
        self.dom.size() as u64 + 1
    }

    fn int_value(&self, k: u32) -> i64 {
        match self.dom {
            VarDomain::Int(iv) => iv.lo + k as i64 - 1,
            VarDomain::Prop => unreachable!("propositional slot has no integer value"),
        }
    }

    fn value(&self, k: u32) -> Option<Value> {
        match (k, self.dom) {
            (0, _) => None,
            (_, VarDomain::Prop) => Some(Value::True),
            (_, VarDomain::Int(_)) => Some(Value::Int(self.int_value(k).into())),
        }
    }
}

struct Scratch {
    tvals: Vec<u32>,
    atom_t: Vec<bool>,
    node_t: Vec<bool>,
    node_h: Vec<bool>,
}

#[derive(Debug)]
pub struct Kernel {
    slots: Vec<Slot>,
    totals: u64,
    atoms: Vec<CAtom>,
    atom_masks: Vec<u64>,
    nodes: Vec<Node>,
    groups: Vec<Vec<usize>>,
}

struct Builder<'a> {
    slot_of: &'a BTreeMap<String, usize>,
    atom_ids: BTreeMap<ConstraintAtom, usize>,
    node_ids: BTreeMap<Node, usize>,
    atoms: Vec<CAtom>,
    atom_masks: Vec<u64>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn node(&mut self, n: Node) -> usize {
        if let Some(&id) = self.node_ids.get(&n) {
            return id;
        }
        self.nodes.push(n);
        self.node_ids.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn atom(&mut self, c: &ConstraintAtom) -> usize {
        if let Some(&id) = self.atom_ids.get(c) {
            return id;
        }
        let slot = |v: &str| self.slot_of[v];
        let compiled = match c {
            ConstraintAtom::PropTrue(_) | ConstraintAtom::DefZ(_) => CAtom::Defined,
            ConstraintAtom::Linear(s) => {
                let small: Option<Vec<(usize, i64)>> = s
                    .terms()
                    .iter()
                    .map(|t| t.coeff.to_i64().map(|k| (slot(&t.var), k)))
                    .collect();
                match (small, s.rhs().to_i64()) {
                    (Some(terms), Some(rhs)) => CAtom::Small(terms, rhs, s.rel()),
                    _ => CAtom::Big(
                        s.terms()
                            .iter()
                            .map(|t| (slot(&t.var), t.coeff.clone()))
                            .collect(),
                        s.rhs().clone(),
                        s.rel(),
                    ),
                }
            }
        };
        let mask = c.vars().iter().fold(0u64, |m, v| m | 1 << slot(v));
        self.atoms.push(compiled);
        self.atom_masks.push(mask);
        self.atom_ids.insert(c.clone(), self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    fn formula(&mut self, f: &Formula) -> usize {
        let n = match f {
            Formula::Bottom => Node::Bottom,
            Formula::Atom(c) => Node::Atom(self.atom(c)),
            Formula::And(a, b) => Node::And(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Node::Or(self.formula(a), self.formula(b)),
            Formula::Impl(a, b) => Node::Impl(self.formula(a), self.formula(b)),
        };
        self.node(n)
    }
}

impl Kernel {
    pub fn compile(theory: &[Formula], sig: &Signature) -> Result<Kernel> {
        Kernel::compile_groups(&[theory], sig, DEFAULT_TOTALS_CAP)
    }

    pub fn compile_pair(g1: &[Formula], g2: &[Formula], sig: &Signature) -> Result<Kernel> {
        Kernel::compile_groups(&[g1, g2], sig, DEFAULT_TOTALS_CAP)
    }

    /// Compile several theories over one signature; each is a group of roots.
    pub fn compile_groups(groups: &[&[Formula]], sig: &Signature, cap: u128) -> Result<Kernel> {
        for g in groups {
            sig.check(g)?;
        }
        if sig.len() > 63 {
            return Err(Error::Unsupported(format!(
                "{} variables exceed the kernel limit of 63",
                sig.len()
            )));
        }
        let totals = sig.totals();
        if totals > cap {
            return Err(Error::BoxTooLarge { cells: totals, cap });
        }
        let slots: Vec<Slot> = sig
            .iter()
            .map(|(name, dom)| Slot {
                name: name.clone(),
                dom: *dom,
            })
            .collect();
        let slot_of: BTreeMap<String, usize> = slots
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), i))
            .collect();
        let mut b = Builder {
            slot_of: &slot_of,
            atom_ids: BTreeMap::new(),
            node_ids: BTreeMap::new(),
            atoms: Vec::new(),
            atom_masks: Vec::new(),
            nodes: Vec::new(),
        };
        let groups: Vec<Vec<usize>> = groups
            .iter()
            .map(|g| g.iter().map(|f| b.formula(f)).collect())
            .collect();
        log::debug!(
            "kernel: {} slots, {} totals, {} atoms, {} nodes",
            slots.len(),
            totals,
            b.atoms.len(),
            b.nodes.len()
        );
        Ok(Kernel {
            slots,
            totals: totals as u64,
            atoms: b.atoms,
            atom_masks: b.atom_masks,
            nodes: b.nodes,
            groups,
        })
    }

    pub fn totals(&self) -> u64 {
        self.totals
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            tvals: vec![0; self.slots.len()],
            atom_t: vec![false; self.atoms.len()],
            node_t: vec![false; self.nodes.len()],
            node_h: vec![false; self.nodes.len()],
        }
    }

    fn decode(&self, mut idx: u64, tvals: &mut [u32]) {
        for (i, s) in self.slots.iter().enumerate() {
            let r = s.radix();
            tvals[i] = (idx % r) as u32;
            idx /= r;
        }
    }

    fn def_mask(tvals: &[u32]) -> u64 {
        tvals
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &k)| if k != 0 { m | 1 << i } else { m })
    }

    fn atom_holds(&self, a: &CAtom, mask: u64, def: u64, tvals: &[u32]) -> bool {
        if mask & def != mask {
            return false;
        }
        match a {
            CAtom::Defined => true,
            CAtom::Small(terms, rhs, rel) => {
                let mut acc: i128 = 0;
                for &(i, k) in terms {
                    let v = self.slots[i].int_value(tvals[i]);
                    match acc.checked_add(k as i128 * v as i128) {
                        Some(x) => acc = x,
                        None => {
                            let big: BigInt = terms
                                .iter()
                                .map(|&(i, k)| BigInt::from(k) * self.slots[i].int_value(tvals[i]))
                                .sum();
                            return rel.holds(&big, &BigInt::from(*rhs));
                        }
                    }
                }
                rel.holds(&acc, &(*rhs as i128))
            }
            CAtom::Big(terms, rhs, rel) => {
                let acc: BigInt = terms
                    .iter()
                    .map(|(i, k)| k * self.slots[*i].int_value(tvals[*i]))
                    .sum();
                rel.holds(&acc, rhs)
            }
        }
    }

    /// Fill the atom and node truth values at `⟨t,t⟩`; returns `t`'s defined mask.
    fn eval_there(&self, s: &mut Scratch) -> u64 {
        let def = Self::def_mask(&s.tvals);
        for (j, a) in self.atoms.iter().enumerate() {
            s.atom_t[j] = self.atom_holds(a, self.atom_masks[j], def, &s.tvals);
        }
        for (j, n) in self.nodes.iter().enumerate() {
            let v = match *n {
                Node::Bottom => false,
                Node::Atom(a) => s.atom_t[a],
                Node::And(a, b) => s.node_t[a] && s.node_t[b],
                Node::Or(a, b) => s.node_t[a] || s.node_t[b],
                Node::Impl(a, b) => !s.node_t[a] || s.node_t[b],
            };
            s.node_t[j] = v;
        }
        def
    }

    /// Node truth values at `⟨h,t⟩`, `h` given as a submask of `t`'s defined slots.
    fn eval_here(&self, h: u64, s: &mut Scratch) {
        for (j, n) in self.nodes.iter().enumerate() {
            let v = match *n {
                Node::Bottom => false,
                Node::Atom(a) => s.atom_t[a] && self.atom_masks[a] & h == self.atom_masks[a],
                Node::And(a, b) => s.node_h[a] && s.node_h[b],
                Node::Or(a, b) => s.node_h[a] || s.node_h[b],
                Node::Impl(a, b) => (!s.node_h[a] || s.node_h[b]) && s.node_t[j],
            };
            s.node_h[j] = v;
        }
    }

    fn group_holds(&self, g: usize, vals: &[bool]) -> bool {
        self.groups[g].iter().all(|&r| vals[r])
    }

    fn valuation(&self, tvals: &[u32], mask: u64) -> Valuation {
        self.slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .filter_map(|(i, s)| s.value(tvals[i]).map(|v| (s.name.clone(), v)))
            .collect()
    }

    fn encode(&self, v: &Valuation) -> Result<Vec<u32>> {
        for name in v.vars() {
            if !self.slots.iter().any(|s| &s.name == name) {
                return Err(Error::UndeclaredVariable { var: name.clone() });
            }
        }
        self.slots
            .iter()
            .map(|s| match (v.get(&s.name), s.dom) {
                (None, _) => Ok(0),
                (Some(Value::True), VarDomain::Prop) => Ok(1),
                (Some(Value::Int(d)), VarDomain::Int(iv)) if iv.contains(d) => {
                    Ok((d.to_i64().unwrap_or(iv.lo) - iv.lo + 1) as u32)
                }
                (Some(Value::Int(d)), VarDomain::Int(iv)) => Err(Error::InvalidBounds(format!(
                    "value {d} of `{}` lies outside {iv}",
                    s.name
                ))),
                _ => Err(Error::SignatureMismatch {
                    var: s.name.clone(),
                }),
            })
            .collect()
    }

    /// Submasks of `def`, from `def` itself down to 0.
    fn submasks(def: u64) -> impl Iterator<Item = u64> {
        let mut next = Some(def);
        std::iter::from_fn(move || {
            let h = next?;
            next = if h == 0 { None } else { Some((h - 1) & def) };
            Some(h)
        })
    }

    /// `⟨h,t⟩ ⊨` every formula of the first group.
    pub fn is_model(&self, i: &Interpretation) -> Result<bool> {
        let mut s = self.scratch();
        s.tvals = self.encode(&i.t)?;
        let hvals = self.encode(&i.h)?;
        if hvals.iter().zip(&s.tvals).any(|(h, t)| *h != 0 && h != t) {
            return Err(Error::Unsupported("interpretation violates h ⊆ t".into()));
        }
        self.eval_there(&mut s);
        self.eval_here(Self::def_mask(&hvals), &mut s);
        Ok(self.group_holds(0, &s.node_h))
    }

    pub fn ht_models(&self) -> Result<Vec<Interpretation>> {
        Ok((0..self.totals)
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |s, idx| {
                    self.decode(idx, &mut s.tvals);
                    let def = self.eval_there(s);
                    let mut out = Vec::new();
                    if !self.group_holds(0, &s.node_t) {
                        return out;
                    }
                    let t = self.valuation(&s.tvals, def);
                    for h in Self::submasks(def) {
                        self.eval_here(h, s);
                        if self.group_holds(0, &s.node_h) {
                            out.push(Interpretation {
                                h: self.valuation(&s.tvals, h),
                                t: t.clone(),
                            });
                        }
                    }
                    out
                },
            )
            .flat_map_iter(|v| v)
            .collect())
    }

    pub fn equilibrium_models(&self) -> Result<Vec<Valuation>> {
        Ok((0..self.totals)
            .into_par_iter()
            .map_init(
                || self.scratch(),
                |s, idx| {
                    self.decode(idx, &mut s.tvals);
                    let def = self.eval_there(s);
                    if !self.group_holds(0, &s.node_t) {
                        return None;
                    }
                    let defeated = Self::submasks(def).skip(1).any(|h| {
                        self.eval_here(h, s);
                        self.group_holds(0, &s.node_h)
                    });
                    (!defeated).then(|| self.valuation(&s.tvals, def))
                },
            )
            .flatten()
            .collect::<Vec<_>>())
        .inspect(|found| log::debug!("kernel: {} equilibrium models", found.len()))
    }

    /// The first total model in enumeration order.
    pub fn some_total_model(&self) -> Result<Option<Valuation>> {
        Ok((0..self.totals).into_par_iter().find_map_first(|idx| {
            let mut s = self.scratch();
            self.decode(idx, &mut s.tvals);
            let def = self.eval_there(&mut s);
            self.group_holds(0, &s.node_t)
                .then(|| self.valuation(&s.tvals, def))
        }))
    }

    /// For a total model `t`, a strictly smaller `h` with `⟨h,t⟩` a model.
    pub fn defeating_here(&self, t: &Valuation) -> Result<Option<Valuation>> {
        let mut s = self.scratch();
        s.tvals = self.encode(t)?;
        let def = self.eval_there(&mut s);
        if !self.group_holds(0, &s.node_t) {
            return Ok(None);
        }
        for h in Self::submasks(def).skip(1) {
            self.eval_here(h, &mut s);
            if self.group_holds(0, &s.node_h) {
                return Ok(Some(self.valuation(&s.tvals, h)));
            }
        }
        Ok(None)
    }

    /// Compare groups 0 and 1 on every interpretation of the box.
    pub fn equivalence(&self) -> Result<Verdict> {
        if self.groups.len() < 2 {
            return Err(Error::Unsupported("equivalence needs two theories".into()));
        }
        let found = (0..self.totals).into_par_iter().find_map_first(|idx| {
            let mut s = self.scratch();
            self.decode(idx, &mut s.tvals);
            let def = self.eval_there(&mut s);
            let (l, r) = (
                self.group_holds(0, &s.node_t),
                self.group_holds(1, &s.node_t),
            );
            if !l && !r {
                // persistence: no ⟨h,t⟩ is a model of either side
                return None;
            }
            for h in Self::submasks(def) {
                self.eval_here(h, &mut s);
                let (l, r) = (
                    self.group_holds(0, &s.node_h),
                    self.group_holds(1, &s.node_h),
                );
                if l != r {
                    return Some(Verdict::Counterexample {
                        interpretation: Interpretation {
                            h: self.valuation(&s.tvals, h),
                            t: self.valuation(&s.tvals, def),
                        },
                        left_holds: l,
                    });
                }
            }
            None
        });
        Ok(found.unwrap_or(Verdict::Equivalent))
    }
}
