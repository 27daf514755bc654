use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element of the ground set.
///
/// Views (contraction, deletion, restriction) change which sets are
/// feasible, never the identity of an element.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub usize);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl From<usize> for ElementId {
    fn from(i: usize) -> Self {
        ElementId(i)
    }
}

/// Sets of elements are kept ordered so that every scan is by ascending id.
pub type ElementSet = BTreeSet<ElementId>;

/// Builds an [`ElementSet`] from raw indices.
pub fn set<I: IntoIterator<Item = usize>>(ids: I) -> ElementSet {
    ids.into_iter().map(ElementId).collect()
}

/// Raw indices of a set, ascending.
pub fn ids(s: &ElementSet) -> Vec<usize> {
    s.iter().map(|e| e.0).collect()
}

/// Per-element nonnegative weights, indexed by `ElementId`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some((i, x)) = w.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!("weight w[{i}] = {x} must be finite and >= 0")));
        }
        Ok(WeightVector(w))
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        WeightVector(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: ElementId) -> f64 {
        self.0.get(e.0).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self, s: &ElementSet) -> f64 {
        s.iter().map(|&e| self.get(e)).sum()
    }

    /// Orders `elements` by nonincreasing weight, ties by ascending id.
    pub fn sort_desc(&self, elements: &mut [ElementId]) {
        elements.sort_by(|a, b| self.get(*b).total_cmp(&self.get(*a)).then(a.cmp(b)));
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(w: Vec<f64>) -> Result<Self> {
        WeightVector::new(w)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}
