//! Depth-first branch and bound over subsets, used as the exact optimizer
//! for matchings on general graphs and for matroid intersections.

use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::Result;

/// Largest candidate set the exact solver accepts.
pub const EXACT_LIMIT: usize = 22;

/// Exact max-weight subset of `candidates` accepted by the downward-closed
/// `feasible` predicate. Candidates are explored heaviest first (ties by
/// ascending id) with the include branch first; only strict improvements
/// replace the incumbent, so the answer is deterministic.
pub(crate) fn max_weight_subset<F>(candidates: &ElementSet, w: &WeightVector, mut feasible: F) -> Result<(ElementSet, f64)>
where
    F: FnMut(&ElementSet) -> Result<bool>,
{
    let mut order: Vec<ElementId> = candidates.iter().copied().collect();
    w.sort_desc(&mut order);
    let weights: Vec<f64> = order.iter().map(|&e| w.get(e)).collect();
    let mut suffix = vec![0.0; order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = suffix[i + 1] + weights[i];
    }

    struct Search<'a, F> {
        order: &'a [ElementId],
        weights: &'a [f64],
        suffix: &'a [f64],
        feasible: F,
        current: ElementSet,
        best: ElementSet,
        best_value: f64,
        found: bool,
    }

    impl<F: FnMut(&ElementSet) -> Result<bool>> Search<'_, F> {
        fn go(&mut self, i: usize, value: f64) -> Result<()> {
            if !self.found || value > self.best_value {
                self.best = self.current.clone();
                self.best_value = value;
                self.found = true;
            }
            if i == self.order.len() || value + self.suffix[i] <= self.best_value {
                return Ok(());
            }
            let e = self.order[i];
            self.current.insert(e);
            if (self.feasible)(&self.current)? {
                self.go(i + 1, value + self.weights[i])?;
            }
            self.current.remove(&e);
            self.go(i + 1, value)
        }
    }

    let mut search = Search {
        order: &order,
        weights: &weights,
        suffix: &suffix,
        feasible: &mut feasible,
        current: ElementSet::new(),
        best: ElementSet::new(),
        best_value: 0.0,
        found: false,
    };
    search.go(0, 0.0)?;
    Ok((search.best, search.best_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set;

    #[test]
    fn respects_feasibility() {
        let w = WeightVector::new(vec![3.0, 3.0, 5.0]).unwrap();
        // Pairs {0,1} and {1,2} conflict, singletons and {0,2} are allowed.
        let (best, value) = max_weight_subset(&set([0, 1, 2]), &w, |s| {
            Ok(!(s.contains(&ElementId(1)) && s.len() > 1))
        })
        .unwrap();
        assert_eq!(best, set([0, 2]));
        assert_eq!(value, 8.0);
    }

    #[test]
    fn empty_candidates() {
        let w = WeightVector::uniform(0, 1.0);
        let (best, value) = max_weight_subset(&set([]), &w, |_| Ok(true)).unwrap();
        assert!(best.is_empty());
        assert_eq!(value, 0.0);
    }
}
