//! Config-driven experiment runner behind the `sposs` binary.
//!
//! Configs are TOML (or JSON, by extension) with a mandatory top-level
//! `seed`. Outputs are CSV with a versioned comment line first; reruns with
//! the same config are byte-identical.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;
use serde::Deserialize;

use crate::adversarial::{block_hard_instance, equal_partition_hard_instance, rank1_hard_instance, Rank1Mode};
use crate::certificates::{construct_i, construct_t_intersection};
use crate::crs::{empirical_balance, CrsKind, CrsScheme};
use crate::descriptor::load_instance;
use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::lp::{solve, vertex_enumeration, DenseLp};
use crate::rng::{substream, tag, Estimate, Rng};
use crate::sparsify::{
    render_params, CoverageLp, Crs, Empty, Fixed, Identity, IntersectionSample, MatchingHybrid, MatroidNss,
    Provenance, Sparsifier,
};
use crate::stochastic::{estimate_marginals, evaluate_sparsifier, exact_marginals, sample_active, Marginals, SppInstance};

pub const RUN_HEADER: &str = "# sposs-csv v1";
pub const BALANCE_HEADER: &str = "# sposs-balance v1";
pub const CERTIFY_HEADER: &str = "# sposs-certify v1";
pub const LPCHECK_HEADER: &str = "# sposs-lpcheck v1";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<ParamValue>),
}

pub type ParamMap = BTreeMap<String, ParamValue>;

#[derive(Clone, Debug, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(flatten)]
    pub params: ParamMap,
}

/// Where an instance comes from: a JSON file or a named generator.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct Source {
    pub instance: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: Option<String>,
    pub instance: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
    pub sparsifier: String,
    #[serde(default)]
    pub params: ParamMap,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceSpec {
    pub name: Option<String>,
    pub instance: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
    /// `random`, `weight` or `rank1_uniform`.
    pub scheme: String,
    /// `marginals` (exact stochastic-optimum marginals) or a constant.
    #[serde(default)]
    pub x: Option<ParamValue>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    pub name: Option<String>,
    pub instance: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
    /// `exchange` (fixed S1, S2) or `stitch` (sampled Q_1..Q_tau).
    pub suite: String,
    #[serde(default)]
    pub s1: Vec<usize>,
    #[serde(default)]
    pub s2: Vec<usize>,
    pub eps: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpCheckSpec {
    pub count: usize,
    #[serde(default = "default_max_vars")]
    pub max_vars: usize,
    #[serde(default = "default_max_rows")]
    pub max_rows: usize,
    pub seed: Option<u64>,
}

fn default_max_vars() -> usize {
    8
}

fn default_max_rows() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub trials: Option<usize>,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub balance: Vec<BalanceSpec>,
    #[serde(default)]
    pub certify: Vec<CertifySpec>,
    pub lpcheck: Option<LpCheckSpec>,
    /// Directory that relative instance paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Config {
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        if json {
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json");
        let mut cfg = Config::parse(&text, json).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    fn resolve(&self, instance: &Option<PathBuf>, generator: &Option<GeneratorSpec>) -> Result<SppInstance> {
        match (instance, generator) {
            (Some(path), None) => load_instance(&self.base_dir.join(path)),
            (None, Some(g)) => generate(&g.name, &g.params),
            _ => Err(Error::Parse("give exactly one of `instance` or `generator`".into())),
        }
    }

    fn trials(&self, own: Option<usize>, overridden: Option<usize>) -> Result<usize> {
        overridden
            .or(own)
            .or(self.trials)
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::Parse("a positive trial count is required".into()))
    }
}

/// Typed access to a parameter map that rejects unknown keys.
struct Reader<'a> {
    map: &'a ParamMap,
    used: RefCell<BTreeSet<&'a str>>,
}

impl<'a> Reader<'a> {
    fn new(map: &'a ParamMap) -> Self {
        Reader { map, used: RefCell::new(BTreeSet::new()) }
    }

    fn get(&self, key: &str) -> Option<&'a ParamValue> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.borrow_mut().insert(k.as_str());
        Some(v)
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(ParamValue::Float(x)) => Ok(Some(*x)),
            Some(ParamValue::Int(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(Error::Parse(format!("parameter {key} must be a number, got {other:?}"))),
        }
    }

    fn int(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(ParamValue::Int(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(other) => Err(Error::Parse(format!("parameter {key} must be a nonnegative integer, got {other:?}"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(ParamValue::Str(s)) => Ok(Some(s)),
            Some(other) => Err(Error::Parse(format!("parameter {key} must be a string, got {other:?}"))),
        }
    }

    fn ids(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.get(key) {
            None => Ok(None),
            Some(ParamValue::List(items)) => items
                .iter()
                .map(|v| match v {
                    ParamValue::Int(i) if *i >= 0 => Ok(*i as usize),
                    other => Err(Error::Parse(format!("parameter {key} must list element ids, got {other:?}"))),
                })
                .collect::<Result<_>>()
                .map(Some),
            Some(other) => Err(Error::Parse(format!("parameter {key} must be a list, got {other:?}"))),
        }
    }

    fn require_f64(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| Error::Parse(format!("missing parameter {key}")))
    }

    fn require_int(&self, key: &str) -> Result<usize> {
        self.int(key)?.ok_or_else(|| Error::Parse(format!("missing parameter {key}")))
    }

    fn finish(self) -> Result<()> {
        let used = self.used.borrow();
        match self.map.keys().find(|k| !used.contains(k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unknown parameter {k}"))),
            None => Ok(()),
        }
    }
}

/// Builds a named generator instance.
pub fn generate(name: &str, params: &ParamMap) -> Result<SppInstance> {
    let rd = Reader::new(params);
    let inst = match name {
        "rank1" => {
            let mode = rd.string("mode")?.unwrap_or("example31").parse::<Rank1Mode>()?;
            rank1_hard_instance(rd.require_int("n")?, mode)?
        }
        "blocks" => block_hard_instance(rd.require_int("m")?, rd.require_int("k")?)?,
        "equal_partition" => {
            let p = rd.float("p")?.unwrap_or(1.0 / 3.0);
            equal_partition_hard_instance(rd.require_int("n")?, rd.require_int("r")?, p)?
        }
        other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
    };
    rd.finish()?;
    Ok(inst)
}

fn marginals_for(inst: &SppInstance, rd: &Reader, seed: u64) -> Result<Marginals> {
    match rd.string("marginals")?.unwrap_or("exact") {
        "exact" => exact_marginals(inst),
        "empirical" => {
            let n = rd.int("samples")?.unwrap_or(1000);
            estimate_marginals(inst, n, seed, rd.float("clamp")?)
        }
        other => Err(Error::Parse(format!("marginals must be exact or empirical, got {other:?}"))),
    }
}

/// Builds a sparsifier by its config name.
pub fn build_sparsifier(name: &str, params: &ParamMap, inst: &SppInstance, seed: u64) -> Result<Box<dyn Sparsifier>> {
    let rd = Reader::new(params);
    let sp: Box<dyn Sparsifier> = match name {
        "identity" => Box::new(Identity),
        "empty" => Box::new(Empty),
        "fixed" => Box::new(Fixed(rd.ids("q")?.unwrap_or_default().into_iter().map(ElementId).collect())),
        "crs" => Box::new(Crs { marginals: marginals_for(inst, &rd, seed)? }),
        "matroid_nss" => Box::new(MatroidNss { eps: rd.require_f64("eps")? }),
        "intersection_sample" => Box::new(IntersectionSample { eps: rd.require_f64("eps")? }),
        "matching_hybrid" => Box::new(MatchingHybrid {
            eps: rd.require_f64("eps")?,
            t_override: rd.int("t_override")?,
            marginals: marginals_for(inst, &rd, seed)?,
        }),
        "coverage_lp" => Box::new(CoverageLp::prepare(inst)?),
        other => return Err(Error::Parse(format!("unknown sparsifier {other:?}"))),
    };
    rd.finish()?;
    Ok(sp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub instance: String,
    pub sparsifier: String,
    pub params: String,
    pub ratio_mean: Option<f64>,
    pub ratio_stderr: Option<f64>,
    pub degree_mean: Option<f64>,
    pub opt_mean: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub notes: String,
    /// Reported on stderr only, so the CSV stays reproducible.
    pub wall_time: f64,
}

fn run_one(cfg: &Config, exp: &Experiment, trials_override: Option<usize>) -> Result<Row> {
    let inst = cfg.resolve(&exp.instance, &exp.generator)?;
    let trials = cfg.trials(exp.trials, trials_override)?;
    let seed = exp.seed.unwrap_or(cfg.seed);
    let label = exp.name.clone().unwrap_or_else(|| inst.name.clone());
    let skipped = |params: String| Row {
        instance: label.clone(),
        sparsifier: exp.sparsifier.clone(),
        params,
        ratio_mean: None,
        ratio_stderr: None,
        degree_mean: None,
        opt_mean: None,
        trials,
        seed,
        notes: "skipped:size".into(),
        wall_time: 0.0,
    };
    let sp = match build_sparsifier(&exp.sparsifier, &exp.params, &inst, seed) {
        Ok(sp) => sp,
        Err(e) if e.is_size_limit() => return Ok(skipped(String::new())),
        Err(e) => return Err(e),
    };
    let params = render_params(&sp.params());
    let report = match evaluate_sparsifier(&inst, sp.as_ref(), trials, seed) {
        Ok(r) => r,
        Err(e) if e.is_size_limit() => return Ok(skipped(params)),
        Err(e) => return Err(e),
    };
    let mut notes = Vec::new();
    if !report.rank_exact {
        notes.push("rank:approximate".to_string());
    }
    notes.extend(inst.meta.iter().map(|(k, v)| format!("{k}={v}")));
    Ok(Row {
        instance: label,
        sparsifier: sp.name().into(),
        params,
        ratio_mean: Some(report.ratio_mean),
        ratio_stderr: Some(report.ratio_stderr),
        degree_mean: Some(report.degree_mean),
        opt_mean: Some(report.opt_mean),
        trials,
        seed,
        notes: notes.join(";"),
        wall_time: report.wall_time,
    })
}

pub fn run_experiments(cfg: &Config, trials_override: Option<usize>) -> Result<Vec<Row>> {
    if cfg.experiments.is_empty() {
        return Err(Error::Parse("config has no [[experiment]] entries".into()));
    }
    cfg.experiments.iter().map(|exp| run_one(cfg, exp, trials_override)).collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_table(out: &mut dyn Write, header: &str, columns: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    writeln!(out, "{header}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_run_csv(out: &mut dyn Write, rows: &[Row]) -> Result<()> {
    let columns = [
        "instance", "sparsifier", "params", "ratio_mean", "ratio_stderr", "degree_mean", "opt_mean", "trials", "seed",
        "notes",
    ];
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.instance.clone(),
                r.sparsifier.clone(),
                r.params.clone(),
                opt(r.ratio_mean),
                opt(r.ratio_stderr),
                opt(r.degree_mean),
                opt(r.opt_mean),
                r.trials.to_string(),
                r.seed.to_string(),
                r.notes.clone(),
            ]
        })
        .collect();
    write_table(out, RUN_HEADER, &columns, records)
}

/// Per-element balance of a CRS, one CSV row per element.
pub fn run_balance(cfg: &Config, out: &mut dyn Write, trials_override: Option<usize>) -> Result<()> {
    if cfg.balance.is_empty() {
        return Err(Error::Parse("config has no [[balance]] entries".into()));
    }
    let mut rows = Vec::new();
    for spec in &cfg.balance {
        let inst = cfg.resolve(&spec.instance, &spec.generator)?;
        let trials = cfg.trials(spec.trials, trials_override)?;
        let seed = spec.seed.unwrap_or(cfg.seed);
        let kind = match spec.scheme.as_str() {
            "random" => CrsKind::RandomOrder,
            "weight" => CrsKind::WeightOrder(
                inst.objective.weights().cloned().ok_or_else(|| Error::Parse("weight order needs additive weights".into()))?,
            ),
            "rank1_uniform" => CrsKind::Rank1Uniform,
            other => return Err(Error::Parse(format!("unknown scheme {other:?}"))),
        };
        let x: Vec<f64> = match &spec.x {
            None => exact_marginals(&inst)?.q,
            Some(ParamValue::Str(s)) if s == "marginals" => exact_marginals(&inst)?.q,
            Some(ParamValue::Float(v)) => vec![*v; inst.len()],
            Some(other) => return Err(Error::Parse(format!("x must be \"marginals\" or a number, got {other:?}"))),
        };
        let crs = CrsScheme::new(kind, inst.system.clone());
        let report = empirical_balance(&crs, &x, trials, seed)?;
        let label = spec.name.clone().unwrap_or_else(|| inst.name.clone());
        for (i, est) in report.per_element.iter().enumerate() {
            rows.push(vec![
                label.clone(),
                crs.name().into(),
                i.to_string(),
                x[i].to_string(),
                opt(est.map(|e| e.mean)),
                opt(est.map(|e| e.stderr)),
                report.min.to_string(),
                trials.to_string(),
                seed.to_string(),
            ]);
        }
    }
    let columns = ["instance", "scheme", "element", "x", "balance", "stderr", "min_balance", "trials", "seed"];
    write_table(out, BALANCE_HEADER, &columns, rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyRow {
    pub suite: String,
    pub instance: String,
    pub subject: String,
    pub role: String,
    pub estimate: Estimate,
    pub bound: f64,
    pub pass: bool,
}

/// Exchange-map statistics for fixed `S1, S2` over `trials` draws of `R`.
pub fn certify_exchange(
    inst: &SppInstance,
    s1: &ElementSet,
    s2: &ElementSet,
    trials: usize,
    seed: u64,
) -> Result<Vec<CertifyRow>> {
    let matroids = inst
        .system
        .matroids()
        .ok_or_else(|| Error::Kind { expected: "matroid or intersection", found: inst.system.kind_name().into() })?;
    let k = matroids.len() as i32;
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = sample_active(inst, &mut substream(seed, tag::CERTIFY, t as u64));
            construct_t_intersection(&matroids, s1, s2, &r)
        })
        .collect::<Result<Vec<_>>>()?;
    let p = inst.p;
    let mut rows = Vec::new();
    let prob = |e: &ElementId| Estimate::proportion(hits.iter().filter(|t| t.contains(e)).count(), trials);
    for e in s1.difference(s2) {
        let est = prob(e);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        rows.push(("kept_if_active", *e, est, p, (est.mean - p).abs() <= 4.0 * sigma));
    }
    for f in s2.difference(s1) {
        let est = prob(f);
        let bound = (1.0 - p).powi(k);
        rows.push(("survives", *f, est, bound, est.mean >= bound - 4.0 * est.stderr));
    }
    Ok(rows
        .into_iter()
        .map(|(role, e, estimate, bound, pass)| CertifyRow {
            suite: "exchange".into(),
            instance: inst.name.clone(),
            subject: e.0.to_string(),
            role: role.into(),
            estimate,
            bound,
            pass,
        })
        .collect())
}

/// Stitching statistics: for each round `i`, the pooled rate at which
/// elements first seen in `Q_i` survive into the stitched solution,
/// against `p (1-p)^(k(i-1))`.
pub fn certify_stitch(inst: &SppInstance, eps: f64, trials: usize, seed: u64) -> Result<Vec<CertifyRow>> {
    let matroids = inst
        .system
        .matroids()
        .ok_or_else(|| Error::Kind { expected: "matroid or intersection", found: inst.system.kind_name().into() })?;
    let k = matroids.len() as i32;
    let sampler = IntersectionSample { eps };
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, tag::CERTIFY, t as u64);
            let sparse = sampler.sparsify(inst, &mut rng)?;
            let Provenance::Samples { samples } = sparse.provenance else {
                return Err(Error::Internal("sampler lost its provenance".into()));
            };
            let r = sample_active(inst, &mut rng);
            let stitched = construct_i(&matroids, &samples, &r)?;
            let mut seen = ElementSet::new();
            let mut counts = vec![(0usize, 0usize); samples.len()];
            for (i, q) in samples.iter().enumerate() {
                for e in q.difference(&seen.clone()) {
                    counts[i].0 += 1;
                    counts[i].1 += stitched.contains(e) as usize;
                    seen.insert(*e);
                }
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let rounds = per_trial.first().map_or(0, Vec::len);
    let mut rows = Vec::new();
    for i in 0..rounds {
        let (n, hit) = per_trial.iter().fold((0, 0), |acc, c| (acc.0 + c[i].0, acc.1 + c[i].1));
        if n == 0 {
            continue;
        }
        let est = Estimate::proportion(hit, n);
        let bound = inst.p * (1.0 - inst.p).powi(k * i as i32);
        rows.push(CertifyRow {
            suite: "stitch".into(),
            instance: inst.name.clone(),
            subject: (i + 1).to_string(),
            role: "round".into(),
            pass: est.mean >= bound - 4.0 * est.stderr,
            estimate: est,
            bound,
        });
    }
    Ok(rows)
}

pub fn run_certify(cfg: &Config, out: &mut dyn Write, trials_override: Option<usize>) -> Result<bool> {
    if cfg.certify.is_empty() {
        return Err(Error::Parse("config has no [[certify]] entries".into()));
    }
    let mut rows = Vec::new();
    for spec in &cfg.certify {
        let mut inst = cfg.resolve(&spec.instance, &spec.generator)?;
        if let Some(name) = &spec.name {
            inst.name = name.clone();
        }
        let trials = cfg.trials(spec.trials, trials_override)?;
        let seed = spec.seed.unwrap_or(cfg.seed);
        match spec.suite.as_str() {
            "exchange" => {
                let s1 = spec.s1.iter().copied().map(ElementId).collect();
                let s2 = spec.s2.iter().copied().map(ElementId).collect();
                rows.extend(certify_exchange(&inst, &s1, &s2, trials, seed)?);
            }
            "stitch" => {
                let eps = spec.eps.ok_or_else(|| Error::Parse("stitch suite needs eps".into()))?;
                rows.extend(certify_stitch(&inst, eps, trials, seed)?);
            }
            other => return Err(Error::Parse(format!("unknown certify suite {other:?}"))),
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    let columns = ["suite", "instance", "subject", "role", "estimate", "stderr", "bound", "samples", "pass"];
    let records = rows
        .into_iter()
        .map(|r| {
            vec![
                r.suite,
                r.instance,
                r.subject,
                r.role,
                r.estimate.mean.to_string(),
                r.estimate.stderr.to_string(),
                r.bound.to_string(),
                r.estimate.samples.to_string(),
                r.pass.to_string(),
            ]
        })
        .collect();
    write_table(out, CERTIFY_HEADER, &columns, records)?;
    Ok(all_pass)
}

/// A random LP with `x = 0` not necessarily feasible: right-hand sides may
/// be negative, so phase one is exercised.
pub fn random_lp(rng: &mut Rng, n: usize, m: usize) -> DenseLp {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let c = (0..n).map(|_| u(-1.0, 1.0)).collect();
    let rows = (0..m).map(|_| (0..n).map(|_| u(-1.0, 1.0)).collect()).collect();
    let rhs = (0..m).map(|_| u(-0.3, 2.0)).collect();
    let upper = (0..n).map(|_| u(0.2, 2.0)).collect();
    DenseLp::new(c, rows, rhs, upper).expect("generated LPs are well formed")
}

pub fn run_lpcheck(cfg: &Config, out: &mut dyn Write) -> Result<bool> {
    let spec = cfg.lpcheck.as_ref().ok_or_else(|| Error::Parse("config has no [lpcheck] table".into()))?;
    if spec.max_vars == 0 || spec.max_vars > 8 || spec.max_rows > 6 {
        return Err(Error::Parse("lpcheck supports 1..=8 variables and at most 6 rows".into()));
    }
    let seed = spec.seed.unwrap_or(cfg.seed);
    let rows: Vec<Vec<String>> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, tag::ROUNDING, i as u64);
            let n = rng.random_range(1..=spec.max_vars);
            let m = rng.random_range(0..=spec.max_rows);
            let lp = random_lp(&mut rng, n, m);
            let brute = vertex_enumeration(&lp)?;
            let simplex = solve(&lp);
            let (sv, bv, diff, viol, pass) = match (simplex, brute) {
                (Ok(s), Some((_, b))) => {
                    let d = (s.value - b).abs();
                    (s.value.to_string(), b.to_string(), d.to_string(), s.max_violation.to_string(), d <= 1e-9 && s.max_violation <= 1e-9)
                }
                (Err(_), None) => ("infeasible".into(), "infeasible".into(), String::new(), String::new(), true),
                (Ok(s), None) => (s.value.to_string(), "infeasible".into(), String::new(), s.max_violation.to_string(), false),
                (Err(e), Some((_, b))) => (format!("error: {e}"), b.to_string(), String::new(), String::new(), false),
            };
            Ok(vec![i.to_string(), n.to_string(), m.to_string(), sv, bv, diff, viol, pass.to_string()])
        })
        .collect::<Result<_>>()?;
    let all_pass = rows.iter().all(|r| r[7] == "true");
    let columns = ["index", "vars", "rows", "simplex", "brute", "abs_diff", "max_violation", "pass"];
    write_table(out, LPCHECK_HEADER, &columns, rows)?;
    Ok(all_pass)
}
