//! Matroid oracles and the lazy contraction/deletion/restriction views built
//! on top of them.
//!
//! A view never materializes its family of independent sets. Contracting an
//! independent set `C` answers `is_independent(S)` with `S ∪ C` on the layer
//! below, so the rank of a contracted view satisfies
//! `rank_{M/C}(T) = rank_M(T ∪ C) - |C|`. Deletion and restriction only
//! shrink the ground set.

mod family;

use std::sync::Arc;

pub use family::{ExplicitFamily, MatroidFamily, PartitionFamily, EXPLICIT_MAX_GROUND};

use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum View {
    Contract(ElementSet),
    Delete(ElementSet),
    Restrict(ElementSet),
}

/// Independence oracle over an indexed ground set, possibly viewed through a
/// stack of matroid operations. Cloning shares the base family.
#[derive(Clone, Debug)]
pub struct MatroidOracle {
    base: Arc<MatroidFamily>,
    ground: ElementSet,
    contracted: ElementSet,
    views: Vec<View>,
}

impl From<MatroidFamily> for MatroidOracle {
    fn from(family: MatroidFamily) -> Self {
        MatroidOracle::new(family)
    }
}

impl MatroidOracle {
    pub fn new(family: MatroidFamily) -> Self {
        let ground = family.ground();
        MatroidOracle { base: Arc::new(family), ground, contracted: ElementSet::new(), views: Vec::new() }
    }

    pub fn uniform(n: usize, rank: usize) -> Self {
        MatroidFamily::uniform(n, rank).into()
    }

    pub fn base(&self) -> &MatroidFamily {
        &self.base
    }

    pub fn ground(&self) -> &ElementSet {
        &self.ground
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    /// True when no view has been applied.
    pub fn is_base(&self) -> bool {
        self.views.is_empty()
    }

    fn check_domain(&self, s: &ElementSet) -> Result<()> {
        match s.iter().find(|e| !self.ground.contains(e)) {
            Some(&e) => Err(Error::Domain(e)),
            None => Ok(()),
        }
    }

    fn check_element(&self, e: ElementId) -> Result<()> {
        if self.ground.contains(&e) {
            Ok(())
        } else {
            Err(Error::Domain(e))
        }
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool> {
        self.check_domain(s)?;
        self.independent_unchecked(s)
    }

    fn independent_unchecked(&self, s: &ElementSet) -> Result<bool> {
        if self.contracted.is_empty() {
            self.base.is_independent(s)
        } else {
            let with: ElementSet = s.union(&self.contracted).copied().collect();
            self.base.is_independent(&with)
        }
    }

    /// Greedy maximal independent subset of `s`, inserting in the given order.
    fn greedy_in<I: IntoIterator<Item = ElementId>>(&self, order: I) -> Result<ElementSet> {
        let mut acc = ElementSet::new();
        for e in order {
            acc.insert(e);
            if !self.independent_unchecked(&acc)? {
                acc.remove(&e);
            }
        }
        Ok(acc)
    }

    pub fn rank(&self, s: &ElementSet) -> Result<usize> {
        self.check_domain(s)?;
        Ok(self.greedy_in(s.iter().copied())?.len())
    }

    /// Rank of the whole (viewed) ground set.
    pub fn full_rank(&self) -> Result<usize> {
        self.greedy_in(self.ground.iter().copied()).map(|b| b.len())
    }

    /// `{e in ground : rank(S + e) = rank(S)}`.
    pub fn span(&self, s: &ElementSet) -> Result<ElementSet> {
        self.check_domain(s)?;
        let basis = self.greedy_in(s.iter().copied())?;
        let mut out = ElementSet::new();
        let mut probe = basis.clone();
        for &e in &self.ground {
            if basis.contains(&e) {
                out.insert(e);
                continue;
            }
            probe.insert(e);
            if !self.independent_unchecked(&probe)? {
                out.insert(e);
            }
            probe.remove(&e);
        }
        Ok(out)
    }

    pub fn spans(&self, s: &ElementSet, e: ElementId) -> Result<bool> {
        self.check_domain(s)?;
        self.check_element(e)?;
        let mut basis = self.greedy_in(s.iter().copied())?;
        if basis.contains(&e) {
            return Ok(true);
        }
        basis.insert(e);
        Ok(!self.independent_unchecked(&basis)?)
    }

    /// `M / S`. Requires `S` independent in this view.
    pub fn contract(&self, s: &ElementSet) -> Result<MatroidOracle> {
        if !self.is_independent(s)? {
            return Err(Error::precondition("contracted set must be independent"));
        }
        let mut out = self.clone();
        out.ground.retain(|e| !s.contains(e));
        out.contracted.extend(s.iter().copied());
        out.views.push(View::Contract(s.clone()));
        Ok(out)
    }

    /// `M \ S`. Elements of `S` outside the view are ignored.
    pub fn delete(&self, s: &ElementSet) -> MatroidOracle {
        let mut out = self.clone();
        out.ground.retain(|e| !s.contains(e));
        out.views.push(View::Delete(s.clone()));
        out
    }

    /// `M | S`. Requires `S` within the view's ground.
    pub fn restrict(&self, s: &ElementSet) -> Result<MatroidOracle> {
        self.check_domain(s)?;
        let mut out = self.clone();
        out.ground = s.clone();
        out.views.push(View::Restrict(s.clone()));
        Ok(out)
    }

    /// Greedy max-weight independent set: nonincreasing weight, ties by
    /// ascending id. Zero-weight elements are still inserted.
    pub fn max_weight_independent(&self, w: &WeightVector) -> Result<ElementSet> {
        let mut order: Vec<ElementId> = self.ground.iter().copied().collect();
        w.sort_desc(&mut order);
        self.greedy_in(order)
    }

    /// The unique circuit in `S + e`, for independent `S` spanning `e`.
    pub fn find_circuit(&self, s: &ElementSet, e: ElementId) -> Result<ElementSet> {
        self.check_domain(s)?;
        self.check_element(e)?;
        if s.contains(&e) {
            return Err(Error::precondition(format!("{e} already belongs to S")));
        }
        if !self.independent_unchecked(s)? {
            return Err(Error::precondition("find_circuit needs an independent S"));
        }
        let mut with = s.clone();
        with.insert(e);
        if self.independent_unchecked(&with)? {
            return Err(Error::NoCircuit(e));
        }
        let mut circuit = ElementSet::from([e]);
        for &f in s {
            with.remove(&f);
            if self.independent_unchecked(&with)? {
                circuit.insert(f);
            }
            with.insert(f);
        }
        Ok(circuit)
    }

    /// For independent `S1, S2`, `e in S1 \ S2` spanned by `S2`, finds
    /// `f in S2 \ S1` with both `S1 - e + f` and `S2 - f + e` independent.
    /// Candidates are the circuit of `e` in `S2`, scanned by ascending id.
    pub fn find_exchange_pair(&self, s1: &ElementSet, s2: &ElementSet, e: ElementId) -> Result<ElementId> {
        self.check_domain(s1)?;
        self.check_domain(s2)?;
        if !s1.contains(&e) || s2.contains(&e) {
            return Err(Error::precondition(format!("{e} must lie in S1 \\ S2")));
        }
        if !self.independent_unchecked(s1)? || !self.independent_unchecked(s2)? {
            return Err(Error::precondition("exchange needs independent S1 and S2"));
        }
        let circuit = match self.find_circuit(s2, e) {
            Ok(c) => c,
            Err(Error::NoCircuit(_)) => {
                return Err(Error::precondition(format!("{e} is not spanned by S2")))
            }
            Err(err) => return Err(err),
        };
        for &f in circuit.iter().filter(|f| **f != e && !s1.contains(f)) {
            let mut a = s1.clone();
            a.remove(&e);
            a.insert(f);
            let mut b = s2.clone();
            b.remove(&f);
            b.insert(e);
            if self.independent_unchecked(&a)? && self.independent_unchecked(&b)? {
                return Ok(f);
            }
        }
        Err(Error::Invariant(format!("no exchange partner for {e}; the oracle is not a matroid")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set;
    use crate::graph::Graph;

    fn triangle() -> MatroidOracle {
        MatroidFamily::graphic(Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()).into()
    }

    fn two_blocks() -> MatroidOracle {
        MatroidFamily::partition(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap().into()
    }

    #[test]
    fn independence_examples() {
        assert!(!MatroidOracle::uniform(5, 2).is_independent(&set([0, 1, 2])).unwrap());
        assert!(triangle().is_independent(&set([])).unwrap());
        assert!(!triangle().is_independent(&set([0, 1, 2])).unwrap());
        assert!(matches!(MatroidOracle::uniform(3, 1).is_independent(&set([3])), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(MatroidOracle::uniform(5, 2).rank(&set([0, 1, 2])).unwrap(), 2);
        let c = triangle().contract(&set([0])).unwrap();
        assert_eq!(c.rank(&set([1, 2])).unwrap(), 1);
        let x: MatroidOracle =
            MatroidFamily::explicit(vec![0, 1], vec![vec![], vec![0], vec![1]]).unwrap().into();
        assert_eq!(x.rank(&set([0, 1])).unwrap(), 1);
    }

    #[test]
    fn span_examples() {
        assert_eq!(MatroidOracle::uniform(4, 2).span(&set([0, 1])).unwrap(), set([0, 1, 2, 3]));
        assert_eq!(two_blocks().span(&set([0])).unwrap(), set([0, 1]));
        assert_eq!(triangle().span(&set([])).unwrap(), set([]));
    }

    #[test]
    fn views() {
        let m = MatroidOracle::uniform(4, 2);
        let c = m.contract(&set([0])).unwrap();
        assert_eq!(c.ground(), &set([1, 2, 3]));
        assert_eq!(c.full_rank().unwrap(), 1);
        assert!(c.is_independent(&set([3])).unwrap());
        assert!(!c.is_independent(&set([1, 2])).unwrap());
        assert!(matches!(c.is_independent(&set([0])), Err(Error::Domain(_))));
        assert!(matches!(m.contract(&set([0, 1, 2])), Err(Error::Precondition(_))));
        let d = m.delete(&set([]));
        assert_eq!(d.rank(&set([0, 1, 3])).unwrap(), 2);
        let r = m.restrict(&set([0, 1, 2, 3])).unwrap();
        assert!(!r.is_independent(&set([0, 1, 2])).unwrap());
        assert!(m.restrict(&set([7])).is_err());
    }

    #[test]
    fn max_weight_examples() {
        let w = WeightVector::new(vec![5.0, 4.0, 3.0, 2.0]).unwrap();
        assert_eq!(MatroidOracle::uniform(4, 2).max_weight_independent(&w).unwrap(), set([0, 1]));
        let w = WeightVector::new(vec![1.0, 9.0, 2.0, 2.0]).unwrap();
        assert_eq!(two_blocks().max_weight_independent(&w).unwrap(), set([1, 2]));
        let z = WeightVector::uniform(4, 0.0);
        assert_eq!(MatroidOracle::uniform(4, 2).max_weight_independent(&z).unwrap(), set([0, 1]));
    }

    #[test]
    fn circuit_examples() {
        assert_eq!(triangle().find_circuit(&set([0, 1]), ElementId(2)).unwrap(), set([0, 1, 2]));
        assert_eq!(MatroidOracle::uniform(4, 2).find_circuit(&set([0, 1]), ElementId(2)).unwrap(), set([0, 1, 2]));
        assert_eq!(two_blocks().find_circuit(&set([0]), ElementId(1)).unwrap(), set([0, 1]));
        assert!(matches!(two_blocks().find_circuit(&set([0]), ElementId(2)), Err(Error::NoCircuit(_))));
    }

    #[test]
    fn exchange_examples() {
        assert_eq!(two_blocks().find_exchange_pair(&set([0, 2]), &set([1, 2]), ElementId(0)).unwrap(), ElementId(1));
        assert_eq!(
            MatroidOracle::uniform(4, 2).find_exchange_pair(&set([0, 1]), &set([2, 3]), ElementId(0)).unwrap(),
            ElementId(2)
        );
        assert!(matches!(
            two_blocks().find_exchange_pair(&set([0]), &set([2]), ElementId(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn self_loop_is_dependent() {
        let m: MatroidOracle = MatroidFamily::graphic(Graph::new(2, vec![(0, 0), (0, 1)]).unwrap()).into();
        assert!(!m.is_independent(&set([0])).unwrap());
        assert_eq!(m.rank(&set([0, 1])).unwrap(), 1);
        assert_eq!(m.span(&set([])).unwrap(), set([0]));
    }
}
