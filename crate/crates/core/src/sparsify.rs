//! Sparsifiers: procedures choosing the query set `Q` before activity is
//! revealed.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::ElementSet;
use crate::error::{Error, Result};
use crate::lp::{build_coverage_lp, solve};
use crate::rng::{substream, tag, Estimate, Rng};
use crate::set_system::SetSystem;
use crate::stochastic::{sample_active, stochastic_opt, Marginals, SppInstance};

pub type Params = BTreeMap<String, String>;

/// How the sample count of the matching sparsifier was chosen.
pub const HYBRID_T_READING: &str = "T = ceil(2000 * ln(1/eps)^2 / (eps^4 * p))";

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    None,
    /// Successive max-weight bases `I_1..I_tau`.
    Nss { bases: Vec<ElementSet> },
    /// Optimum samples `Q_1..Q_tau` in draw order.
    Samples { samples: Vec<ElementSet> },
    Hybrid { crs: ElementSet, greedy: ElementSet, samples: Vec<ElementSet>, t: usize, t_from_paper: bool },
    Lp { x: Vec<f64>, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseSet {
    pub q: ElementSet,
    pub producer: String,
    pub params: Params,
    pub randomized: bool,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

pub trait Sparsifier: Send + Sync {
    fn name(&self) -> &'static str;
    fn params(&self) -> Params {
        Params::new()
    }
    fn randomized(&self) -> bool;
    fn sparsify(&self, inst: &SppInstance, rng: &mut Rng) -> Result<SparseSet>;
}

fn sparse_set(sp: &dyn Sparsifier, q: ElementSet, provenance: Provenance, warnings: Vec<String>) -> SparseSet {
    SparseSet { q, producer: sp.name().into(), params: sp.params(), randomized: sp.randomized(), provenance, warnings }
}

pub fn render_params(params: &Params) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps must lie in (0,1), got {eps}")))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("this count needs p in (0,1], got {p}")))
    }
}

fn ceil_count(x: f64) -> Result<usize> {
    if !x.is_finite() || x > usize::MAX as f64 {
        return Err(Error::invalid(format!("count {x} is not representable")));
    }
    Ok(x.ceil() as usize)
}

/// `max(1, ceil(ln(1/eps) / p))`.
pub fn nss_rounds(p: f64, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    check_p(p)?;
    Ok(ceil_count((1.0 / eps).ln() / p)?.max(1))
}

/// `ceil((2 / (eps p)) ln(2/eps))`.
pub fn intersection_rounds(p: f64, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    check_p(p)?;
    Ok(ceil_count(2.0 / (eps * p) * (2.0 / eps).ln())?.max(1))
}

/// `ceil(2000 ln(1/eps)^2 / (eps^4 p))`.
pub fn hybrid_rounds(p: f64, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    check_p(p)?;
    let l = (1.0 / eps).ln();
    ceil_count(2000.0 * l * l / (eps.powi(4) * p))
}

/// Include each element with probability `q_e / p`, clamped to 1.
fn crs_sample(inst: &SppInstance, q: &Marginals, rng: &mut Rng, warnings: &mut Vec<String>) -> ElementSet {
    let mut clamped = 0;
    let out = inst
        .ground()
        .into_iter()
        .filter(|&e| {
            let qe = q.get(e);
            let prob = if inst.p > 0.0 { qe / inst.p } else { 0.0 };
            if prob > 1.0 + 1e-12 {
                clamped += 1;
            }
            rng.random::<f64>() < prob.min(1.0)
        })
        .collect();
    if clamped > 0 {
        warnings.push(format!("{clamped} marginal(s) exceeded p and were clamped"));
    }
    out
}

pub struct Identity;

impl Sparsifier for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn randomized(&self) -> bool {
        false
    }
    fn sparsify(&self, inst: &SppInstance, _rng: &mut Rng) -> Result<SparseSet> {
        Ok(sparse_set(self, inst.ground(), Provenance::None, vec![]))
    }
}

pub struct Empty;

impl Sparsifier for Empty {
    fn name(&self) -> &'static str {
        "empty"
    }
    fn randomized(&self) -> bool {
        false
    }
    fn sparsify(&self, _inst: &SppInstance, _rng: &mut Rng) -> Result<SparseSet> {
        Ok(sparse_set(self, ElementSet::new(), Provenance::None, vec![]))
    }
}

/// A caller-chosen deterministic `Q`.
pub struct Fixed(pub ElementSet);

impl Sparsifier for Fixed {
    fn name(&self) -> &'static str {
        "fixed"
    }
    fn params(&self) -> Params {
        let ids: Vec<String> = self.0.iter().map(|e| e.0.to_string()).collect();
        Params::from([("q".into(), ids.join(" "))])
    }
    fn randomized(&self) -> bool {
        false
    }
    fn sparsify(&self, inst: &SppInstance, _rng: &mut Rng) -> Result<SparseSet> {
        let ground = inst.ground();
        if let Some(&e) = self.0.iter().find(|e| !ground.contains(e)) {
            return Err(Error::Domain(e));
        }
        Ok(sparse_set(self, self.0.clone(), Provenance::None, vec![]))
    }
}

/// Independent inclusion with probability `q_e / p`.
pub struct Crs {
    pub marginals: Marginals,
}

impl Sparsifier for Crs {
    fn name(&self) -> &'static str {
        "crs"
    }
    fn params(&self) -> Params {
        Params::from([
            ("marginals".into(), format!("{:?}", self.marginals.estimator).to_lowercase()),
            ("samples".into(), self.marginals.sample_count.to_string()),
        ])
    }
    fn randomized(&self) -> bool {
        true
    }
    fn sparsify(&self, inst: &SppInstance, rng: &mut Rng) -> Result<SparseSet> {
        let mut warnings = vec![];
        let q = crs_sample(inst, &self.marginals, rng, &mut warnings);
        Ok(sparse_set(self, q, Provenance::None, warnings))
    }
}

/// Union of `tau` successively deleted max-weight bases.
pub struct MatroidNss {
    pub eps: f64,
}

impl Sparsifier for MatroidNss {
    fn name(&self) -> &'static str {
        "matroid_nss"
    }
    fn params(&self) -> Params {
        Params::from([("eps".into(), self.eps.to_string())])
    }
    fn randomized(&self) -> bool {
        false
    }
    fn sparsify(&self, inst: &SppInstance, _rng: &mut Rng) -> Result<SparseSet> {
        let m = inst
            .system
            .as_matroid()
            .ok_or_else(|| Error::Kind { expected: "matroid", found: inst.system.kind_name().into() })?;
        let w = inst
            .objective
            .weights()
            .ok_or_else(|| Error::Kind { expected: "additive objective", found: inst.objective.kind_name().into() })?;
        let tau = nss_rounds(inst.p, self.eps)?;
        let mut rest = m;
        let mut bases = Vec::with_capacity(tau);
        let mut q = ElementSet::new();
        for t in 0..tau {
            let basis = rest.max_weight_independent(w)?;
            if basis.len() != rest.full_rank()? {
                return Err(Error::Invariant(format!("round {} is not spanning in the remaining matroid", t + 1)));
            }
            q.extend(basis.iter().copied());
            rest = rest.delete(&basis);
            bases.push(basis);
        }
        let mut out = sparse_set(self, q, Provenance::Nss { bases }, vec![]);
        out.params.insert("tau".into(), tau.to_string());
        Ok(out)
    }
}

/// Union of `tau` independent stochastic-optimum samples.
pub struct IntersectionSample {
    pub eps: f64,
}

impl Sparsifier for IntersectionSample {
    fn name(&self) -> &'static str {
        "intersection_sample"
    }
    fn params(&self) -> Params {
        Params::from([("eps".into(), self.eps.to_string())])
    }
    fn randomized(&self) -> bool {
        true
    }
    fn sparsify(&self, inst: &SppInstance, rng: &mut Rng) -> Result<SparseSet> {
        if inst.objective.weights().is_none() {
            return Err(Error::Kind { expected: "additive objective", found: inst.objective.kind_name().into() });
        }
        let tau = intersection_rounds(inst.p, self.eps)?;
        let mut samples = Vec::with_capacity(tau);
        for _ in 0..tau {
            let r = sample_active(inst, rng);
            samples.push(stochastic_opt(inst, &r)?.elements);
        }
        let q = samples.iter().flatten().copied().collect();
        let mut out = sparse_set(self, q, Provenance::Samples { samples }, vec![]);
        out.params.insert("tau".into(), tau.to_string());
        Ok(out)
    }
}

/// CRS phase plus `T` optimum samples, for matchings.
pub struct MatchingHybrid {
    pub eps: f64,
    pub marginals: Marginals,
    pub t_override: Option<usize>,
}

impl MatchingHybrid {
    pub fn rounds(&self, p: f64) -> Result<(usize, bool)> {
        match self.t_override {
            Some(t) => Ok((t, false)),
            None => Ok((hybrid_rounds(p, self.eps)?, true)),
        }
    }
}

impl Sparsifier for MatchingHybrid {
    fn name(&self) -> &'static str {
        "matching_hybrid"
    }
    fn params(&self) -> Params {
        let mut p = Params::from([
            ("eps".into(), self.eps.to_string()),
            ("t_reading".into(), HYBRID_T_READING.into()),
        ]);
        match self.t_override {
            Some(t) => p.insert("t_override".into(), t.to_string()),
            None => p.insert("t_source".into(), "paper".into()),
        };
        p
    }
    fn randomized(&self) -> bool {
        true
    }
    fn sparsify(&self, inst: &SppInstance, rng: &mut Rng) -> Result<SparseSet> {
        if !matches!(inst.system, SetSystem::Matching(_)) {
            return Err(Error::Kind { expected: "matching", found: inst.system.kind_name().into() });
        }
        check_eps(self.eps)?;
        let (t, t_from_paper) = self.rounds(inst.p)?;
        let mut warnings = vec![];
        let crs = crs_sample(inst, &self.marginals, rng, &mut warnings);
        let mut samples = Vec::with_capacity(t.min(1 << 16));
        for _ in 0..t {
            let r = sample_active(inst, rng);
            samples.push(stochastic_opt(inst, &r)?.elements);
        }
        let greedy: ElementSet = samples.iter().flatten().copied().collect();
        let q = crs.union(&greedy).copied().collect();
        let mut out = sparse_set(self, q, Provenance::Hybrid { crs, greedy, samples, t, t_from_paper }, warnings);
        out.params.insert("t".into(), t.to_string());
        Ok(out)
    }
}

/// Rounds the coverage LP solution: element `i` is kept with probability
/// `x_i / p`. The LP is solved once by [`CoverageLp::prepare`].
pub struct CoverageLp {
    pub x: Vec<f64>,
    pub value: f64,
    p: f64,
}

impl CoverageLp {
    pub fn prepare(inst: &SppInstance) -> Result<Self> {
        let built = build_coverage_lp(inst)?;
        let sol = solve(&built.lp)?;
        Ok(CoverageLp { x: sol.x[..built.num_elements].to_vec(), value: sol.value, p: inst.p })
    }
}

impl Sparsifier for CoverageLp {
    fn name(&self) -> &'static str {
        "coverage_lp"
    }
    fn params(&self) -> Params {
        Params::from([("lp_value".into(), format!("{:.9}", self.value))])
    }
    fn randomized(&self) -> bool {
        true
    }
    fn sparsify(&self, inst: &SppInstance, rng: &mut Rng) -> Result<SparseSet> {
        if inst.len() != self.x.len() || inst.p != self.p {
            return Err(Error::precondition("coverage LP was prepared for a different instance"));
        }
        let q = inst
            .ground()
            .into_iter()
            .filter(|e| {
                let prob = if inst.p > 0.0 { (self.x[e.0] / inst.p).clamp(0.0, 1.0) } else { 0.0 };
                rng.random::<f64>() < prob
            })
            .collect();
        Ok(sparse_set(self, q, Provenance::Lp { x: self.x.clone(), value: self.value }, vec![]))
    }
}

/// Monte Carlo `E[|Q|] / rank`, trial `t` on stream `(seed, SPARSIFIER, t)`.
pub fn measure_degree(sp: &dyn Sparsifier, inst: &SppInstance, trials: usize, seed: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let rank = inst.system.system_rank()?.rank;
    if rank == 0 {
        return Ok(Estimate { mean: 0.0, stderr: 0.0, samples: trials });
    }
    let sizes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let q = sp.sparsify(inst, &mut substream(seed, tag::SPARSIFIER, t as u64))?.q;
            Ok(q.len() as f64 / rank as f64)
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&sizes))
}
