//! Hard instances from the lower-bound constructions, with closed forms for
//! the ratios they force.

use serde::{Deserialize, Serialize};

use crate::element::WeightVector;
use crate::error::{Error, Result};
use crate::matroid::MatroidOracle;
use crate::objective::Objective;
use crate::set_system::SetSystem;
use crate::stochastic::SppInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank1Mode {
    /// `p = 1/n`.
    Example31,
    /// `p = 1/sqrt(n)`.
    Prop45,
}

impl std::str::FromStr for Rank1Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example31" => Ok(Rank1Mode::Example31),
            "prop45" => Ok(Rank1Mode::Prop45),
            other => Err(Error::invalid(format!("unknown rank-one mode {other:?}"))),
        }
    }
}

/// Unweighted rank-one matroid on `n` elements.
pub fn rank1_hard_instance(n: usize, mode: Rank1Mode) -> Result<SppInstance> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let p = match mode {
        Rank1Mode::Example31 => 1.0 / n as f64,
        Rank1Mode::Prop45 => 1.0 / (n as f64).sqrt(),
    };
    let name = match mode {
        Rank1Mode::Example31 => format!("rank1-example31-n{n}"),
        Rank1Mode::Prop45 => format!("rank1-prop45-n{n}"),
    };
    SppInstance::new(name, SetSystem::Rank1 { n }, Objective::Additive(WeightVector::uniform(n, 1.0)), p, 0)
}

/// `ceil(k^k ln k)`, the block count of the original construction.
pub fn paper_block_count(k: usize) -> f64 {
    ((k as f64).powi(k as i32) * (k as f64).ln()).ceil()
}

/// `m` blocks of `k` unit-weight elements, `p = 1/k`.
pub fn block_hard_instance(m: usize, k: usize) -> Result<SppInstance> {
    if m == 0 || k == 0 {
        return Err(Error::invalid("blocks need m, k >= 1"));
    }
    let inst = SppInstance::new(
        format!("blocks-m{m}-k{k}"),
        SetSystem::Blocks { m, k },
        Objective::Additive(WeightVector::uniform(m * k, 1.0)),
        1.0 / k as f64,
        0,
    )?;
    Ok(inst.with_meta("paper_m", paper_block_count(k)))
}

/// Equal-`r`-partition coverage under a rank-`r` uniform matroid.
pub fn equal_partition_hard_instance(n: usize, r: usize, p: f64) -> Result<SppInstance> {
    let objective = Objective::equal_partition(n, r)?;
    SppInstance::new(
        format!("equal-partition-n{n}-r{r}"),
        SetSystem::matroid(MatroidOracle::uniform(n, r)),
        objective,
        p,
        0,
    )
}

/// Ratio of a fixed `Q` with `|Q| = s` on the unweighted rank-one instance.
pub fn rank1_fixed_ratio(n: usize, p: f64, s: usize) -> f64 {
    (1.0 - (1.0 - p).powi(s as i32)) / (1.0 - (1.0 - p).powi(n as i32))
}

/// Best ratio over deterministic `Q` with `|Q| ≤ max_size`, and its size.
pub fn rank1_best_fixed_ratio(n: usize, p: f64, max_size: usize) -> (usize, f64) {
    (0..=max_size.min(n))
        .map(|s| (s, rank1_fixed_ratio(n, p, s)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

fn binomial_cdf_table(s: usize, p: f64) -> Vec<f64> {
    // cdf[t] = Pr[Bin(s,p) <= t] for t in 0..=s.
    let mut pmf = vec![0.0; s + 1];
    pmf[0] = (1.0 - p).powi(s as i32);
    for t in 1..=s {
        pmf[t] = if p == 1.0 {
            if t == s { 1.0 } else { 0.0 }
        } else {
            pmf[t - 1] * (s - t + 1) as f64 / t as f64 * p / (1.0 - p)
        };
    }
    let mut cdf = vec![0.0; s + 1];
    let mut acc = 0.0;
    for t in 0..=s {
        acc += pmf[t];
        cdf[t] = acc.min(1.0);
    }
    cdf
}

/// `E[max_i Bin(s_i, p)]` for independent binomials.
pub fn expected_max_binomial(sizes: &[usize], p: f64) -> f64 {
    let top = sizes.iter().copied().max().unwrap_or(0);
    let tables: Vec<Vec<f64>> = sizes.iter().map(|&s| binomial_cdf_table(s, p)).collect();
    (1..=top)
        .map(|t| {
            let all_below: f64 = tables.iter().map(|cdf| cdf.get(t - 1).copied().unwrap_or(1.0)).product();
            1.0 - all_below
        })
        .sum()
}

/// Ratio of a fixed `Q` on the block instance, given how many elements of
/// `Q` sit in each block.
pub fn block_profile_ratio(m: usize, k: usize, p: f64, profile: &[usize]) -> f64 {
    expected_max_binomial(profile, p) / expected_max_binomial(&vec![k; m], p)
}

/// Best fixed `Q` with `|Q| ≤ budget` on the block instance, found by
/// enumerating block-size profiles. Returns the profile and its ratio.
pub fn block_best_profile(m: usize, k: usize, p: f64, budget: usize) -> (Vec<usize>, f64) {
    let total = budget.min(m * k);
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let mut cur = Vec::new();
    fn go(left: usize, cap: usize, slots: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if left == 0 {
            visit(cur);
            return;
        }
        if slots == 0 {
            return;
        }
        for s in (1..=cap.min(left)).rev() {
            cur.push(s);
            go(left - s, s, slots - 1, cur, visit);
            cur.pop();
        }
    }
    let denom = expected_max_binomial(&vec![k; m], p);
    go(total, k, m, &mut cur, &mut |profile| {
        let v = expected_max_binomial(profile, p) / denom;
        if v > best.1 {
            best = (profile.to_vec(), v);
        }
    });
    best
}
