//! Contention resolution schemes and their measured balance.
//!
//! Schemes draw one uniform priority per ground element, in id order, from
//! the caller's stream. Two calls on nested active sets with clones of one
//! stream therefore see the same relative order, which is the coupling
//! `monotonicity_probe` relies on.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::{Error, Result};
use crate::rng::{substream, tag, Estimate, Rng};
use crate::set_system::SetSystem;

#[derive(Clone, Debug)]
pub enum CrsKind {
    /// Greedy over a uniformly random order.
    RandomOrder,
    /// Greedy by weight descending, ties by ascending id.
    WeightOrder(WeightVector),
    /// One uniformly random active element.
    Rank1Uniform,
}

#[derive(Clone, Debug)]
pub struct CrsScheme {
    pub kind: CrsKind,
    pub system: SetSystem,
}

impl CrsScheme {
    pub fn new(kind: CrsKind, system: SetSystem) -> Self {
        CrsScheme { kind, system }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            CrsKind::RandomOrder => "ordered_greedy_random",
            CrsKind::WeightOrder(_) => "ordered_greedy_weight",
            CrsKind::Rank1Uniform => "rank1_uniform",
        }
    }

    /// A feasible subset of `a`. None of the shipped schemes reads `x`; it
    /// is accepted so that callers can swap in schemes that do.
    pub fn resolve(&self, _x: &[f64], a: &ElementSet, rng: &mut Rng) -> Result<ElementSet> {
        let len = a.iter().next_back().map_or(0, |e| e.0 + 1).max(self.system.ground_len());
        let priority: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        let by_priority = |x: &ElementId, y: &ElementId| priority[x.0].total_cmp(&priority[y.0]).then(x.cmp(y));
        let out = match &self.kind {
            CrsKind::Rank1Uniform => a.iter().min_by(|x, y| by_priority(x, y)).copied().into_iter().collect(),
            kind => {
                let mut order: Vec<ElementId> = a.iter().copied().collect();
                match kind {
                    CrsKind::WeightOrder(w) => w.sort_desc(&mut order),
                    _ => order.sort_by(by_priority),
                }
                let mut acc = ElementSet::new();
                for e in order {
                    acc.insert(e);
                    if !self.system.is_feasible(&acc)? {
                        acc.remove(&e);
                    }
                }
                acc
            }
        };
        if !out.is_subset(a) || !self.system.is_feasible(&out)? {
            return Err(Error::Invariant(format!("{} returned an infeasible or inactive set", self.name())));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    /// `Pr[e kept | e active]`; `None` when `e` was never active.
    pub per_element: Vec<Option<Estimate>>,
    pub min: f64,
    pub min_stderr: f64,
    pub argmin: Option<ElementId>,
    pub undefined: Vec<ElementId>,
    pub trials: usize,
}

/// Monte Carlo balance of `crs` at `x`: each trial activates `e` with
/// probability `x[e]` and resolves. The caller vouches that `x` lies in the
/// polytope of the system.
pub fn empirical_balance(crs: &CrsScheme, x: &[f64], trials: usize, seed: u64) -> Result<BalanceReport> {
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("x must lie in [0,1]"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let n = x.len();
    let (active, kept) = (0..trials)
        .into_par_iter()
        .try_fold(
            || (vec![0usize; n], vec![0usize; n]),
            |(mut active, mut kept), t| {
                let mut rng = substream(seed, tag::BALANCE, t as u64);
                let a: ElementSet = (0..n).filter(|&i| rng.random::<f64>() < x[i]).map(ElementId).collect();
                for e in &a {
                    active[e.0] += 1;
                }
                for e in crs.resolve(x, &a, &mut rng)? {
                    kept[e.0] += 1;
                }
                Ok::<_, Error>((active, kept))
            },
        )
        .try_reduce(
            || (vec![0; n], vec![0; n]),
            |(mut a1, mut k1), (a2, k2)| {
                a1.iter_mut().zip(a2).for_each(|(x, y)| *x += y);
                k1.iter_mut().zip(k2).for_each(|(x, y)| *x += y);
                Ok((a1, k1))
            },
        )?;
    let per_element: Vec<Option<Estimate>> = (0..n)
        .map(|i| (active[i] > 0).then(|| Estimate::proportion(kept[i], active[i])))
        .collect();
    let undefined = (0..n).filter(|&i| per_element[i].is_none()).map(ElementId).collect();
    let argmin = (0..n)
        .filter_map(|i| per_element[i].map(|est| (i, est)))
        .min_by(|a, b| a.1.mean.total_cmp(&b.1.mean));
    Ok(BalanceReport {
        min: argmin.map_or(f64::NAN, |(_, e)| e.mean),
        min_stderr: argmin.map_or(f64::NAN, |(_, e)| e.stderr),
        argmin: argmin.map(|(i, _)| ElementId(i)),
        per_element,
        undefined,
        trials,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub small: Estimate,
    pub large: Estimate,
    /// Paired difference `1[e ∈ π(A1)] − 1[e ∈ π(A2)]`.
    pub difference: Estimate,
    /// Whether `Pr[e ∈ π(A1)] ≥ Pr[e ∈ π(A2)]` within three standard errors.
    pub holds: bool,
}

/// Estimates `Pr[e ∈ π(A1)]` and `Pr[e ∈ π(A2)]` under shared randomness.
pub fn monotonicity_probe(
    crs: &CrsScheme,
    x: &[f64],
    e: ElementId,
    a1: &ElementSet,
    a2: &ElementSet,
    trials: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if !a1.contains(&e) || !a1.is_subset(a2) {
        return Err(Error::precondition("monotonicity probe needs e ∈ A1 ⊆ A2"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let rng = substream(seed, tag::PROBE, t as u64);
            let small = crs.resolve(x, a1, &mut rng.clone())?.contains(&e);
            let large = crs.resolve(x, a2, &mut rng.clone())?.contains(&e);
            Ok((small as u8 as f64, large as u8 as f64))
        })
        .collect::<Result<_>>()?;
    let small = Estimate::from_samples(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let large = Estimate::from_samples(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let difference = Estimate::from_samples(&pairs.iter().map(|p| p.0 - p.1).collect::<Vec<_>>());
    Ok(MonotonicityReport { small, large, holds: difference.mean >= -3.0 * difference.stderr, difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set;
    use crate::matroid::MatroidOracle;

    #[test]
    fn resolve_examples() {
        let free = CrsScheme::new(CrsKind::RandomOrder, SetSystem::matroid(MatroidOracle::uniform(5, 5)));
        let mut rng = substream(0, tag::PROBE, 0);
        assert!(free.resolve(&[], &set([]), &mut rng).unwrap().is_empty());
        assert_eq!(free.resolve(&[], &set([0, 3, 4]), &mut rng).unwrap(), set([0, 3, 4]));

        let uni = CrsScheme::new(CrsKind::Rank1Uniform, SetSystem::Rank1 { n: 8 });
        let mut hits = 0;
        for t in 0..4000 {
            let out = uni.resolve(&[], &set([2, 7]), &mut substream(1, tag::PROBE, t)).unwrap();
            assert_eq!(out.len(), 1);
            hits += out.contains(&ElementId(2)) as usize;
        }
        let est = Estimate::proportion(hits, 4000);
        assert!((est.mean - 0.5).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn balance_single_coordinate() {
        let crs = CrsScheme::new(CrsKind::RandomOrder, SetSystem::Rank1 { n: 3 });
        let rep = empirical_balance(&crs, &[0.0, 0.4, 0.0], 500, 2).unwrap();
        assert_eq!(rep.min, 1.0);
        assert_eq!(rep.undefined, vec![ElementId(0), ElementId(2)]);
    }

    #[test]
    fn probe_identical_sets() {
        let crs = CrsScheme::new(CrsKind::RandomOrder, SetSystem::matroid(MatroidOracle::uniform(4, 2)));
        let a = set([0, 1, 2]);
        let rep = monotonicity_probe(&crs, &[], ElementId(1), &a, &a, 300, 5).unwrap();
        assert_eq!(rep.small, rep.large);
        assert!(rep.holds);
    }
}
