//! Stochastic packing instances, optimum oracles and the evaluation loop.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::{substream, tag, KahanSum, Rng};
use crate::set_system::{FeasibleSet, SetSystem, EXACT_LIMIT};
use crate::sparsify::Sparsifier;

/// Ground sets up to this size get exact marginals by enumerating `R`.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct SppInstance {
    pub name: String,
    pub system: SetSystem,
    pub objective: Objective,
    pub p: f64,
    pub seed: u64,
    /// Free-form annotations carried into reports.
    pub meta: BTreeMap<String, String>,
}

impl SppInstance {
    pub fn new(name: impl Into<String>, system: SetSystem, objective: Objective, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("activation probability {p} is outside [0,1]")));
        }
        let n = objective.ground_len();
        if let Some(e) = system.ground().into_iter().find(|e| e.0 >= n) {
            return Err(Error::invalid(format!(
                "system element {e} has no objective value (objective covers {n} elements)"
            )));
        }
        Ok(SppInstance { name: name.into(), system, objective, p, seed, meta: BTreeMap::new() })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn ground(&self) -> ElementSet {
        self.system.ground()
    }

    /// Length of per-element vectors (marginals, weights) for this instance.
    pub fn len(&self) -> usize {
        self.objective.ground_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn sample_active(inst: &SppInstance, rng: &mut Rng) -> ElementSet {
    inst.ground().into_iter().filter(|_| rng.random::<f64>() < inst.p).collect()
}

/// Best feasible subset of `r` under the instance objective.
pub fn stochastic_opt(inst: &SppInstance, r: &ElementSet) -> Result<FeasibleSet> {
    match &inst.objective {
        Objective::Additive(w) => inst.system.max_weight_feasible(w, r),
        obj => brute_force_opt(&inst.system, obj, r),
    }
}

/// Exhaustive search over feasible subsets, pruned by downward closure.
/// Ties keep the lexicographically first set in ascending-id order.
fn brute_force_opt(system: &SetSystem, obj: &Objective, r: &ElementSet) -> Result<FeasibleSet> {
    if r.len() > EXACT_LIMIT {
        return Err(Error::SizeLimit { what: "exact non-additive optimum", size: r.len(), limit: EXACT_LIMIT });
    }
    let cands: Vec<ElementId> = r.iter().copied().collect();
    let mut best = FeasibleSet::empty();
    let mut cur = ElementSet::new();
    fn go(
        system: &SetSystem,
        obj: &Objective,
        cands: &[ElementId],
        from: usize,
        cur: &mut ElementSet,
        best: &mut FeasibleSet,
    ) -> Result<()> {
        for i in from..cands.len() {
            cur.insert(cands[i]);
            if system.is_feasible(cur)? {
                let v = obj.evaluate(cur)?;
                if v > best.weight {
                    *best = FeasibleSet { elements: cur.clone(), weight: v };
                }
                go(system, obj, cands, i + 1, cur, best)?;
            }
            cur.remove(&cands[i]);
        }
        Ok(())
    }
    go(system, obj, &cands, 0, &mut cur, &mut best)?;
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Exact,
    Empirical,
}

/// `q[e]` = probability that `e` belongs to the stochastic optimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marginals {
    pub q: Vec<f64>,
    pub sample_count: usize,
    pub estimator: Estimator,
}

impl Marginals {
    pub fn get(&self, e: ElementId) -> f64 {
        self.q.get(e.0).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.q.iter().copied().collect::<KahanSum>().value()
    }
}

/// Empirical marginals from `n` independent optimum samples. With
/// `clamp = Some(delta)` every estimate is shifted down by `delta / |E|`
/// (floored at 0) so it underestimates the true marginal.
pub fn estimate_marginals(inst: &SppInstance, n: usize, seed: u64, clamp: Option<f64>) -> Result<Marginals> {
    if n == 0 {
        return Err(Error::invalid("marginal estimation needs at least one sample"));
    }
    let len = inst.len();
    let counts = (0..n)
        .into_par_iter()
        .try_fold(
            || vec![0usize; len],
            |mut acc, t| {
                let mut rng = substream(seed, tag::MARGINALS, t as u64);
                let r = sample_active(inst, &mut rng);
                for e in stochastic_opt(inst, &r)?.elements {
                    acc[e.0] += 1;
                }
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0usize; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let shift = clamp.map_or(0.0, |delta| delta / inst.ground().len().max(1) as f64);
    let q = counts.iter().map(|&c| (c as f64 / n as f64 - shift).max(0.0)).collect();
    Ok(Marginals { q, sample_count: n, estimator: Estimator::Empirical })
}

/// Calls `f(R, Pr[R])` for every subset `R` of `ground`.
pub fn for_each_realization(
    ground: &ElementSet,
    p: f64,
    mut f: impl FnMut(&ElementSet, f64) -> Result<()>,
) -> Result<()> {
    let elems: Vec<ElementId> = ground.iter().copied().collect();
    if elems.len() > 24 {
        return Err(Error::SizeLimit { what: "realization enumeration", size: elems.len(), limit: 24 });
    }
    let n = elems.len();
    for mask in 0u32..(1u32 << n) {
        let k = mask.count_ones() as i32;
        let prob = p.powi(k) * (1.0 - p).powi(n as i32 - k);
        let r: ElementSet = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| elems[i]).collect();
        f(&r, prob)?;
    }
    Ok(())
}

/// Exact marginals: closed form for additive rank-one systems, otherwise
/// enumeration of all realizations on ground sets of at most
/// [`ENUMERATION_LIMIT`] elements.
pub fn exact_marginals(inst: &SppInstance) -> Result<Marginals> {
    let mut q = vec![0.0; inst.len()];
    if let (SetSystem::Rank1 { .. }, Objective::Additive(w)) = (&inst.system, &inst.objective) {
        // The optimum is the first active element in (weight desc, id asc) order.
        let mut order: Vec<ElementId> = inst.ground().into_iter().collect();
        w.sort_desc(&mut order);
        let mut none_before = 1.0;
        for e in order {
            q[e.0] = inst.p * none_before;
            none_before *= 1.0 - inst.p;
        }
        return Ok(Marginals { q, sample_count: 0, estimator: Estimator::Exact });
    }
    let ground = inst.ground();
    if ground.len() > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit { what: "exact marginals", size: ground.len(), limit: ENUMERATION_LIMIT });
    }
    let mut sums: Vec<KahanSum> = vec![KahanSum::default(); inst.len()];
    for_each_realization(&ground, inst.p, |r, prob| {
        for e in stochastic_opt(inst, r)?.elements {
            sums[e.0].add(prob);
        }
        Ok(())
    })?;
    for (qe, s) in q.iter_mut().zip(&sums) {
        *qe = s.value();
    }
    Ok(Marginals { q, sample_count: 0, estimator: Estimator::Exact })
}

/// `(E[opt(Q∩R)], E[opt(R)])` for a fixed `Q` by enumerating every `R`.
pub fn exact_expectations(inst: &SppInstance, q: &ElementSet) -> Result<(f64, f64)> {
    let ground = inst.ground();
    if ground.len() > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit { what: "exact expectation", size: ground.len(), limit: ENUMERATION_LIMIT });
    }
    let (mut sparse, mut full) = (KahanSum::default(), KahanSum::default());
    for_each_realization(&ground, inst.p, |r, prob| {
        let qr: ElementSet = r.intersection(q).copied().collect();
        sparse.add(prob * stochastic_opt(inst, &qr)?.weight);
        full.add(prob * stochastic_opt(inst, r)?.weight);
        Ok(())
    })?;
    Ok((sparse.value(), full.value()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    /// `Σ opt(Q∩R) / Σ opt(R)`.
    pub ratio_mean: f64,
    /// Delta-method standard error of the ratio of means.
    pub ratio_stderr: f64,
    /// `E[|Q|] / rank`.
    pub degree_mean: f64,
    pub degree_stderr: f64,
    pub opt_mean: f64,
    pub sparse_opt_mean: f64,
    pub trials: usize,
    pub rank: usize,
    pub rank_exact: bool,
    /// Seconds.
    pub wall_time: f64,
}

/// Ratio-of-means estimator with its delta-method standard error. A zero
/// denominator with a zero numerator counts as ratio 1.
pub fn ratio_of_means(num: &[f64], den: &[f64]) -> (f64, f64) {
    let n = num.len() as f64;
    let mx = num.iter().copied().collect::<KahanSum>().value() / n;
    let my = den.iter().copied().collect::<KahanSum>().value() / n;
    if my == 0.0 {
        return (if mx == 0.0 { 1.0 } else { f64::INFINITY }, 0.0);
    }
    let ratio = mx / my;
    if num.len() < 2 {
        return (ratio, 0.0);
    }
    let mut vx = KahanSum::default();
    let mut vy = KahanSum::default();
    let mut cxy = KahanSum::default();
    for (x, y) in num.iter().zip(den) {
        vx.add((x - mx) * (x - mx));
        vy.add((y - my) * (y - my));
        cxy.add((x - mx) * (y - my));
    }
    let d = n - 1.0;
    let var = (vx.value() / d - 2.0 * ratio * cxy.value() / d + ratio * ratio * vy.value() / d) / (n * my * my);
    (ratio, var.max(0.0).sqrt())
}

/// Monte Carlo evaluation of a sparsifier. Trial `t` draws `R` from stream
/// `(seed, ACTIVE, t)` and, for randomized sparsifiers, `Q` from
/// `(seed, SPARSIFIER, t)`; deterministic sparsifiers run once on stream 0.
pub fn evaluate_sparsifier(inst: &SppInstance, sp: &dyn Sparsifier, trials: usize, seed: u64) -> Result<EvalReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let start = Instant::now();
    let rank = inst.system.system_rank()?;
    let fixed = if sp.randomized() {
        None
    } else {
        Some(sp.sparsify(inst, &mut substream(seed, tag::SPARSIFIER, 0))?.q)
    };
    let rows: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let owned;
            let q = match &fixed {
                Some(q) => q,
                None => {
                    owned = sp.sparsify(inst, &mut substream(seed, tag::SPARSIFIER, t as u64))?.q;
                    &owned
                }
            };
            let r = sample_active(inst, &mut substream(seed, tag::ACTIVE, t as u64));
            let qr: ElementSet = r.intersection(q).copied().collect();
            let sparse = stochastic_opt(inst, &qr)?.weight;
            let full = stochastic_opt(inst, &r)?.weight;
            Ok((sparse, full, q.len() as f64))
        })
        .collect::<Result<_>>()?;
    let sparse: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let full: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.2 / rank.rank.max(1) as f64).collect();
    let (ratio_mean, ratio_stderr) = ratio_of_means(&sparse, &full);
    let degree = crate::rng::Estimate::from_samples(&sizes);
    let mean = |v: &[f64]| v.iter().copied().collect::<KahanSum>().value() / v.len() as f64;
    Ok(EvalReport {
        ratio_mean,
        ratio_stderr,
        degree_mean: if rank.rank == 0 { 0.0 } else { degree.mean },
        degree_stderr: if rank.rank == 0 { 0.0 } else { degree.stderr },
        opt_mean: mean(&full),
        sparse_opt_mean: mean(&sparse),
        trials,
        rank: rank.rank,
        rank_exact: rank.exact,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{set, WeightVector};
    use crate::matroid::MatroidOracle;

    fn rank1(n: usize, p: f64) -> SppInstance {
        SppInstance::new("r1", SetSystem::Rank1 { n }, Objective::Additive(WeightVector::uniform(n, 1.0)), p, 0)
            .unwrap()
    }

    #[test]
    fn sampling_extremes() {
        let mut rng = substream(1, tag::ACTIVE, 0);
        assert_eq!(sample_active(&rank1(10, 1.0), &mut rng).len(), 10);
        assert!(sample_active(&rank1(10, 0.0), &mut rng).is_empty());
    }

    #[test]
    fn opt_examples() {
        let inst = rank1(4, 0.5);
        assert_eq!(stochastic_opt(&inst, &set([])).unwrap().weight, 0.0);
        assert_eq!(stochastic_opt(&inst, &set([1, 3])).unwrap().weight, 1.0);
        let w = WeightVector::new(vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let inst = SppInstance::new(
            "u",
            SetSystem::matroid(MatroidOracle::uniform(6, 2)),
            Objective::Additive(w),
            0.5,
            0,
        )
        .unwrap();
        let best = stochastic_opt(&inst, &set([2, 4, 5])).unwrap();
        assert_eq!((best.elements, best.weight), (set([2, 4]), 6.0));
    }

    #[test]
    fn marginal_tie_break() {
        let m = estimate_marginals(&rank1(2, 1.0), 20, 3, None).unwrap();
        assert_eq!(m.q, vec![1.0, 0.0]);
        let m = estimate_marginals(&rank1(3, 0.0), 20, 3, None).unwrap();
        assert_eq!(m.q, vec![0.0; 3]);
    }

    #[test]
    fn rank1_closed_form_matches_enumeration() {
        let inst = rank1(6, 0.3);
        let closed = exact_marginals(&inst).unwrap();
        let mut enumerated = vec![0.0; 6];
        for_each_realization(&inst.ground(), 0.3, |r, prob| {
            if let Some(e) = r.iter().next() {
                enumerated[e.0] += prob;
            }
            Ok(())
        })
        .unwrap();
        for (a, b) in closed.q.iter().zip(&enumerated) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_of_means_degenerate() {
        assert_eq!(ratio_of_means(&[0.0, 0.0], &[0.0, 0.0]), (1.0, 0.0));
        let (r, se) = ratio_of_means(&[1.0, 2.0], &[1.0, 2.0]);
        assert_eq!((r, se), (1.0, 0.0));
    }
}
