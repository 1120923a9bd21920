use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

/// A defined value. Undefined (`u`) is the absence of a binding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    True,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => i.fmt(f),
            Value::True => f.write_str("t"),
        }
    }
}

/// Partial map from variables to values, i.e. the set of its defined pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(BTreeMap<String, Value>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ints<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<BigInt>,
    {
        Valuation(
            pairs
                .into_iter()
                .map(|(k, v)| (k.into(), Value::Int(v.into())))
                .collect(),
        )
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.0.get(var)
    }

    pub fn int(&self, var: &str) -> Option<&BigInt> {
        match self.0.get(var) {
            Some(Value::Int(i)) => Some(i),
            _ => None,
        }
    }

    pub fn is_true(&self, var: &str) -> bool {
        matches!(self.0.get(var), Some(Value::True))
    }

    pub fn set(&mut self, var: impl Into<String>, value: Value) {
        self.0.insert(var.into(), value);
    }

    pub fn with(mut self, var: impl Into<String>, value: Value) -> Self {
        self.set(var, value);
        self
    }

    pub fn unset(&mut self, var: &str) {
        self.0.remove(var);
    }

    pub fn is_defined(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    /// `self ⊆ other` on defined pairs.
    pub fn is_subset_of(&self, other: &Valuation) -> bool {
        self.0.iter().all(|(k, v)| other.0.get(k) == Some(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    /// Keep only the variables accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> Valuation {
        Valuation(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(String, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// `⟨h,t⟩` with `h ⊆ t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation {
    pub h: Valuation,
    pub t: Valuation,
}

impl Interpretation {
    pub fn new(h: Valuation, t: Valuation) -> Self {
        debug_assert!(h.is_subset_of(&t));
        Interpretation { h, t }
    }

    pub fn total(t: Valuation) -> Self {
        Interpretation { h: t.clone(), t }
    }

    pub fn is_total(&self) -> bool {
        self.h == self.t
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<h={}, t={}>", self.h, self.t)
    }
}
