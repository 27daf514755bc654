//! Additive and coverage objectives.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::{Error, Result};
use crate::rng::{substream, tag, Estimate};

/// Largest discretized universe `equal_partition_instance` will build.
pub const ATOM_LIMIT: usize = 1 << 24;

/// Explicit coverage function: element `i` covers the points `sets[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    universe: usize,
    sets: Vec<Vec<u32>>,
    /// Report covered measure in [0,1] instead of a point count.
    normalized: bool,
}

impl Coverage {
    pub fn new(universe: usize, sets: Vec<Vec<usize>>, normalized: bool) -> Result<Self> {
        if universe > u32::MAX as usize {
            return Err(Error::invalid("coverage universe too large"));
        }
        let mut out = Vec::with_capacity(sets.len());
        for (i, s) in sets.into_iter().enumerate() {
            if let Some(&pt) = s.iter().find(|&&pt| pt >= universe) {
                return Err(Error::invalid(format!("set {i} covers point {pt} outside a universe of {universe}")));
            }
            let mut s: Vec<u32> = s.into_iter().map(|pt| pt as u32).collect();
            s.sort_unstable();
            s.dedup();
            out.push(s);
        }
        Ok(Coverage { universe, sets: out, normalized })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn covered_points(&self, s: &ElementSet) -> usize {
        let mut seen = vec![0u64; self.universe.div_ceil(64)];
        let mut count = 0;
        for e in s {
            for &pt in &self.sets[e.0] {
                let (word, bit) = (pt as usize / 64, pt % 64);
                if seen[word] & (1 << bit) == 0 {
                    seen[word] |= 1 << bit;
                    count += 1;
                }
            }
        }
        count
    }

    pub fn value(&self, s: &ElementSet) -> f64 {
        let points = self.covered_points(s) as f64;
        if self.normalized {
            if self.universe == 0 {
                0.0
            } else {
                points / self.universe as f64
            }
        } else {
            points
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    Additive(WeightVector),
    Coverage(Coverage),
    /// The equal-`r`-partition coverage family over `n` elements, evaluated
    /// through its incidence vector. Element `i * r + j` is part `j` of
    /// partition `i`.
    EqualPartition { n: usize, r: usize },
}

impl Objective {
    pub fn additive(w: Vec<f64>) -> Result<Self> {
        Ok(Objective::Additive(WeightVector::new(w)?))
    }

    pub fn equal_partition(n: usize, r: usize) -> Result<Self> {
        check_equal_partition(n, r)?;
        Ok(Objective::EqualPartition { n, r })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Objective::Additive(_) => "additive",
            Objective::Coverage(_) => "coverage",
            Objective::EqualPartition { .. } => "equal_partition",
        }
    }

    /// Number of elements the objective is defined on, ids `0..len`.
    pub fn ground_len(&self) -> usize {
        match self {
            Objective::Additive(w) => w.len(),
            Objective::Coverage(c) => c.sets.len(),
            Objective::EqualPartition { n, .. } => *n,
        }
    }

    pub fn weights(&self) -> Option<&WeightVector> {
        match self {
            Objective::Additive(w) => Some(w),
            _ => None,
        }
    }

    pub fn evaluate(&self, s: &ElementSet) -> Result<f64> {
        let n = self.ground_len();
        if let Some(&e) = s.iter().find(|e| e.0 >= n) {
            return Err(Error::Domain(e));
        }
        Ok(match self {
            Objective::Additive(w) => w.total(s),
            Objective::Coverage(c) => c.value(s),
            Objective::EqualPartition { n, r } => incidence_value(&incidence_vector(*n, *r, s), *r),
        })
    }

    /// Coverage form of this objective, materializing the equal-partition
    /// family when needed.
    pub fn to_coverage(&self) -> Result<Option<Coverage>> {
        match self {
            Objective::Additive(_) => Ok(None),
            Objective::Coverage(c) => Ok(Some(c.clone())),
            Objective::EqualPartition { n, r } => equal_partition_instance(*n, *r).map(Some),
        }
    }
}

fn check_equal_partition(n: usize, r: usize) -> Result<usize> {
    if r < 2 || n % r != 0 {
        return Err(Error::invalid(format!("equal partitions need r >= 2 dividing n, got n={n}, r={r}")));
    }
    let rows = n / r;
    let atoms = (r as u128).checked_pow(rows as u32).unwrap_or(u128::MAX);
    if atoms > ATOM_LIMIT as u128 {
        return Err(Error::SizeLimit {
            what: "equal-partition atoms",
            size: atoms.min(usize::MAX as u128) as usize,
            limit: ATOM_LIMIT,
        });
    }
    Ok(atoms as usize)
}

/// Discretizes the equal-`r`-partition family on `[0,1)` into `r^(n/r)`
/// equal atoms. Atom `a` lies in part `j` of partition `i` iff the `i`-th
/// base-`r` digit of `a`, most significant first, equals `j`.
pub fn equal_partition_instance(n: usize, r: usize) -> Result<Coverage> {
    let atoms = check_equal_partition(n, r)?;
    let rows = n / r;
    let mut sets = vec![Vec::with_capacity(atoms / r); n];
    for a in 0..atoms {
        let mut rest = a;
        for i in (0..rows).rev() {
            let j = rest % r;
            rest /= r;
            sets[i * r + j].push(a as u32);
        }
    }
    Ok(Coverage { universe: atoms, sets, normalized: true })
}

/// `s_i = |S^i ∩ Q|` for each partition `i`.
pub fn incidence_vector(n: usize, r: usize, q: &ElementSet) -> Vec<usize> {
    let mut s = vec![0; n / r];
    for e in q {
        s[e.0 / r] += 1;
    }
    s
}

pub fn incidence_value(s: &[usize], r: usize) -> f64 {
    let miss: f64 = s.iter().map(|&si| 1.0 - si as f64 / r as f64).product();
    1.0 - miss
}

/// Monte Carlo estimate of the multilinear extension at `x`.
pub fn estimate_multilinear(obj: &Objective, x: &[f64], trials: usize, seed: u64) -> Result<Estimate> {
    if x.len() != obj.ground_len() {
        return Err(Error::invalid("x must have one coordinate per element"));
    }
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("x must lie in [0,1]"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let mut values = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = substream(seed, tag::MULTILINEAR, t as u64);
        let s: ElementSet = x
            .iter()
            .enumerate()
            .filter(|&(_, &xe)| rng.random::<f64>() < xe)
            .map(|(i, _)| ElementId(i))
            .collect();
        values.push(obj.evaluate(&s)?);
    }
    Ok(Estimate::from_samples(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::set;

    #[test]
    fn evaluate_examples() {
        let add = Objective::additive(vec![2.0, 3.0, 5.0]).unwrap();
        assert_eq!(add.evaluate(&set([0, 2])).unwrap(), 7.0);
        assert_eq!(add.evaluate(&set([])).unwrap(), 0.0);
        let cov = Objective::Coverage(Coverage::new(4, vec![vec![0, 1], vec![1, 2]], false).unwrap());
        assert_eq!(cov.evaluate(&set([0, 1])).unwrap(), 3.0);
        assert!(cov.evaluate(&set([2])).is_err());
    }

    #[test]
    fn equal_partition_small() {
        let c = equal_partition_instance(4, 2).unwrap();
        assert_eq!(c.universe(), 4);
        assert_eq!(c.sets()[0], vec![0, 1]);
        assert_eq!(c.sets()[2], vec![0, 2]);
        let c = equal_partition_instance(6, 3).unwrap();
        assert!(c.sets().iter().all(|s| s.len() * 3 == c.universe()));
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(incidence_value(&[3, 0, 0], 3), 1.0);
        assert_eq!(incidence_value(&[0, 0], 2), 0.0);
        assert_eq!(incidence_value(&[1, 1], 2), 0.75);
    }

    #[test]
    fn atom_cap() {
        assert!(equal_partition_instance(50, 2).unwrap_err().is_size_limit());
        assert!(equal_partition_instance(5, 2).is_err());
    }

    #[test]
    fn multilinear_extremes() {
        let cov = Objective::Coverage(Coverage::new(2, vec![vec![0], vec![1]], false).unwrap());
        let all = estimate_multilinear(&cov, &[1.0, 1.0], 50, 1).unwrap();
        assert_eq!((all.mean, all.stderr), (2.0, 0.0));
        let none = estimate_multilinear(&cov, &[0.0, 0.0], 50, 1).unwrap();
        assert_eq!(none.mean, 0.0);
    }
}
