//! Slow enumerators built directly on [`eval`](super::eval) and
//! [`Valuation`] sets, kept as an independent route for cross-checks.

use super::{eval_all, Formula, Interpretation, Signature, Valuation, Value, VarDomain};

/// Every total valuation of the box, `u` included.
pub fn total_valuations(sig: &Signature) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for (name, dom) in sig.iter() {
        let values: Vec<Option<Value>> = match dom {
            VarDomain::Prop => vec![None, Some(Value::True)],
            VarDomain::Int(iv) => std::iter::once(None)
                .chain(iv.values().map(|d| Some(Value::Int(d.into()))))
                .collect(),
        };
        out = out
            .into_iter()
            .flat_map(|v| {
                values.iter().map(move |val| {
                    let mut w = v.clone();
                    if let Some(val) = val {
                        w.set(name.clone(), val.clone());
                    }
                    w
                })
            })
            .collect();
    }
    out
}

/// Every `h ⊆ t`.
pub fn sub_valuations(t: &Valuation) -> Vec<Valuation> {
    let pairs: Vec<(&String, &Value)> = t.iter().collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, (k, v))| ((*k).clone(), (*v).clone()))
                .collect()
        })
        .collect()
}

pub fn interpretations(sig: &Signature) -> Vec<Interpretation> {
    total_valuations(sig)
        .into_iter()
        .flat_map(|t| {
            sub_valuations(&t)
                .into_iter()
                .map(move |h| Interpretation { h, t: t.clone() })
        })
        .collect()
}

/// Sorted.
pub fn ht_models(theory: &[Formula], sig: &Signature) -> Vec<Interpretation> {
    let mut out: Vec<Interpretation> = interpretations(sig)
        .into_iter()
        .filter(|i| eval_all(theory, i))
        .collect();
    out.sort();
    out
}

/// Sorted.
pub fn equilibrium_models(theory: &[Formula], sig: &Signature) -> Vec<Valuation> {
    let mut out: Vec<Valuation> = total_valuations(sig)
        .into_iter()
        .filter(|t| eval_all(theory, &Interpretation::total(t.clone())))
        .filter(|t| {
            sub_valuations(t)
                .into_iter()
                .all(|h| h == *t || !eval_all(theory, &Interpretation { h, t: t.clone() }))
        })
        .collect();
    out.sort();
    out
}
