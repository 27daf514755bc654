//! Small dense LPs: `max c·x` subject to `A x ≤ b`, `0 ≤ x ≤ u`.

use std::fmt;

use serde::Serialize;

use crate::element::ElementId;
use crate::error::{Error, Result};
use crate::matroid::MatroidFamily;
use crate::objective::Coverage;
use crate::set_system::SetSystem;
use crate::stochastic::SppInstance;

pub const FEASIBILITY_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub upper: Vec<f64>,
    pub names: Vec<String>,
}

impl DenseLp {
    pub fn new(c: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if upper.len() != n || rows.len() != rhs.len() || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("LP dimensions do not agree"));
        }
        let finite = |v: &f64| v.is_finite();
        if !c.iter().all(finite) || !rhs.iter().all(finite) || !rows.iter().flatten().all(finite) {
            return Err(Error::invalid("LP data must be finite"));
        }
        if upper.iter().any(|&u| u.is_nan() || u < 0.0) {
            return Err(Error::invalid("variable upper bounds must be nonnegative"));
        }
        let names = (0..n).map(|j| format!("v{j}")).collect();
        Ok(DenseLp { c, rows, rhs, upper, names })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - b);
        let bounds = x.iter().zip(&self.upper).flat_map(|(&x, &u)| [-x, x - u]);
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

impl fmt::Display for DenseLp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, coef: &[f64]| -> fmt::Result {
            let mut first = true;
            for (j, &a) in coef.iter().enumerate().filter(|(_, a)| **a != 0.0) {
                match (first, a < 0.0) {
                    (true, false) => write!(f, "{} {}", a, self.names[j])?,
                    (true, true) => write!(f, "-{} {}", -a, self.names[j])?,
                    (false, neg) => write!(f, " {} {} {}", if neg { "-" } else { "+" }, a.abs(), self.names[j])?,
                }
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            Ok(())
        };
        write!(f, "max: ")?;
        term(f, &self.c)?;
        writeln!(f)?;
        for (i, (row, b)) in self.rows.iter().zip(&self.rhs).enumerate() {
            write!(f, "c{i}: ")?;
            term(f, row)?;
            writeln!(f, " <= {b}")?;
        }
        for (name, u) in self.names.iter().zip(&self.upper) {
            writeln!(f, "0 <= {name} <= {u}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub max_violation: f64,
}

struct Tableau {
    t: Vec<Vec<f64>>,
    beta: Vec<f64>,
    upper: Vec<f64>,
    basic: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    iterations: usize,
}

impl Tableau {
    fn basic_values(&self) -> Vec<f64> {
        let ncols = self.upper.len();
        (0..self.t.len())
            .map(|i| {
                let mut v = self.beta[i];
                for j in 0..ncols {
                    if !self.is_basic[j] && self.at_upper[j] {
                        v -= self.t[i][j] * self.upper[j];
                    }
                }
                v
            })
            .collect()
    }

    fn value_of(&self, j: usize, basic_vals: &[f64]) -> f64 {
        if let Some(i) = self.basic.iter().position(|&b| b == j) {
            basic_vals[i]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let pv = self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v /= pv;
        }
        self.beta[r] /= pv;
        let prow = self.t[r].clone();
        let pb = self.beta[r];
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let factor = self.t[i][j];
            if factor != 0.0 {
                for (v, p) in self.t[i].iter_mut().zip(&prow) {
                    *v -= factor * p;
                }
                self.beta[i] -= factor * pb;
            }
        }
        let leaving = self.basic[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.at_upper[j] = false;
        self.basic[r] = j;
    }

    /// Bounded-variable primal simplex with Bland's rule for both the
    /// entering and the leaving choice.
    fn optimize(&mut self, cost: &[f64]) -> Result<()> {
        let ncols = self.upper.len();
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::Internal("simplex iteration limit reached".into()));
            }
            self.iterations += 1;
            let vals = self.basic_values();
            let entering = (0..ncols).find(|&j| {
                if self.is_basic[j] || self.upper[j] <= 0.0 {
                    return false;
                }
                let d = cost[j] - (0..self.t.len()).map(|i| cost[self.basic[i]] * self.t[i][j]).sum::<f64>();
                if self.at_upper[j] {
                    d < -COST_TOL
                } else {
                    d > COST_TOL
                }
            });
            let Some(j) = entering else { return Ok(()) };
            let sigma = if self.at_upper[j] { -1.0 } else { 1.0 };
            // Ratio test: the smallest limit wins, ties go to the lowest
            // basic index; a bound flip wins when no row is strictly tighter.
            let mut limits = Vec::new();
            for i in 0..self.t.len() {
                let rate = sigma * self.t[i][j];
                let b = self.basic[i];
                if rate > PIVOT_TOL {
                    limits.push((vals[i].max(0.0) / rate, i, false));
                } else if rate < -PIVOT_TOL && self.upper[b].is_finite() {
                    limits.push(((self.upper[b] - vals[i]).max(0.0) / -rate, i, true));
                }
            }
            let tightest = limits.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
            let mut step = self.upper[j];
            let mut leave = None;
            if tightest < step {
                step = tightest;
                leave = limits
                    .iter()
                    .filter(|l| l.0 <= tightest + 1e-12)
                    .min_by_key(|l| self.basic[l.1])
                    .map(|l| (l.1, l.2));
            }
            if step.is_infinite() {
                return Err(Error::Internal("LP is unbounded".into()));
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let leaving = self.basic[r];
                    self.pivot(r, j);
                    self.at_upper[leaving] = to_upper;
                }
            }
        }
    }
}

/// Two-phase bounded simplex. Rows with negative right-hand side start on
/// an artificial variable; all others start on their slack.
pub fn solve(lp: &DenseLp) -> Result<LpSolution> {
    let (n, m) = (lp.num_vars(), lp.num_rows());
    let negative: Vec<usize> = (0..m).filter(|&i| lp.rhs[i] < 0.0).collect();
    let ncols = n + m + negative.len();
    let mut t = vec![vec![0.0; ncols]; m];
    let mut beta = vec![0.0; m];
    let mut basic = vec![0; m];
    for i in 0..m {
        let sign = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * lp.rows[i][j];
        }
        t[i][n + i] = sign;
        beta[i] = sign * lp.rhs[i];
        basic[i] = n + i;
    }
    for (k, &i) in negative.iter().enumerate() {
        t[i][n + m + k] = 1.0;
        basic[i] = n + m + k;
    }
    let mut upper = lp.upper.clone();
    upper.extend(std::iter::repeat_n(f64::INFINITY, m + negative.len()));
    let mut is_basic = vec![false; ncols];
    for &b in &basic {
        is_basic[b] = true;
    }
    let mut tab = Tableau { t, beta, upper, basic, is_basic, at_upper: vec![false; ncols], iterations: 0 };

    if !negative.is_empty() {
        let mut cost = vec![0.0; ncols];
        cost[n + m..].iter_mut().for_each(|c| *c = -1.0);
        tab.optimize(&cost)?;
        let vals = tab.basic_values();
        let infeasibility: f64 = (n + m..ncols).map(|j| tab.value_of(j, &vals)).sum();
        if infeasibility > FEASIBILITY_TOL {
            return Err(Error::Internal(format!("LP is infeasible (phase one residual {infeasibility:e})")));
        }
        for j in n + m..ncols {
            tab.upper[j] = 0.0;
            tab.at_upper[j] = false;
        }
    }
    let mut cost = lp.c.clone();
    cost.resize(ncols, 0.0);
    tab.optimize(&cost)?;

    let vals = tab.basic_values();
    let mut x: Vec<f64> = (0..n).map(|j| tab.value_of(j, &vals)).collect();
    let max_violation = lp.max_violation(&x);
    if max_violation > FEASIBILITY_TOL {
        return Err(Error::Invariant(format!("simplex solution violates a constraint by {max_violation:e}")));
    }
    for (xj, &u) in x.iter_mut().zip(&lp.upper) {
        *xj = xj.clamp(0.0, u);
    }
    Ok(LpSolution { value: lp.value(&x), x, iterations: tab.iterations, max_violation })
}

/// Optimum by enumerating basic solutions: every choice of tight rows `R`,
/// an equal number of free variables, and the remaining variables at a
/// bound. Needs finite bounds; meant for instances with a handful of
/// variables. Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(lp: &DenseLp) -> Result<Option<(Vec<f64>, f64)>> {
    let (n, m) = (lp.num_vars(), lp.num_rows());
    if n > 12 || m > 10 {
        return Err(Error::SizeLimit { what: "vertex enumeration", size: n.max(m), limit: 12 });
    }
    if lp.upper.iter().any(|u| !u.is_finite()) {
        return Err(Error::invalid("vertex enumeration needs finite upper bounds"));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for rmask in 0u32..(1 << m) {
        let rows: Vec<usize> = (0..m).filter(|i| rmask & (1 << i) != 0).collect();
        let k = rows.len();
        if k > n {
            continue;
        }
        for fmask in 0u32..(1 << n) {
            if fmask.count_ones() as usize != k {
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|j| fmask & (1 << j) != 0).collect();
            let fixed: Vec<usize> = (0..n).filter(|j| fmask & (1 << j) == 0).collect();
            for bmask in 0u32..(1 << fixed.len()) {
                let mut x = vec![0.0; n];
                for (b, &j) in fixed.iter().enumerate() {
                    if bmask & (1 << b) != 0 {
                        x[j] = lp.upper[j];
                    }
                }
                if k > 0 {
                    let mut a: Vec<Vec<f64>> = rows.iter().map(|&i| free.iter().map(|&j| lp.rows[i][j]).collect()).collect();
                    let mut rhs: Vec<f64> = rows
                        .iter()
                        .map(|&i| lp.rhs[i] - fixed.iter().map(|&j| lp.rows[i][j] * x[j]).sum::<f64>())
                        .collect();
                    let Some(sol) = gauss_solve(&mut a, &mut rhs) else { continue };
                    for (&j, v) in free.iter().zip(sol) {
                        x[j] = v;
                    }
                }
                if lp.max_violation(&x) <= FEASIBILITY_TOL {
                    let v = lp.value(&x);
                    if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                        best = Some((x, v));
                    }
                }
            }
        }
    }
    Ok(best)
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..k {
            if i != col {
                let f = a[i][col] / a[col][col];
                if f != 0.0 {
                    for c in col..k {
                        a[i][c] -= f * a[col][c];
                    }
                    b[i] -= f * b[col];
                }
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

/// The coverage LP over a compact matroid polytope. Variables are
/// `x_0..x_{n-1}` (elements) followed by `y_0..y_{|U|-1}` (points).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageLp {
    pub lp: DenseLp,
    pub num_elements: usize,
    pub coverage: Coverage,
}

/// Cardinality constraints `(members, cap)` describing the polytope of a
/// uniform or partition system.
fn polytope_rows(system: &SetSystem) -> Result<Vec<(Vec<ElementId>, usize)>> {
    let unsupported = || Error::Kind { expected: "uniform or partition matroid", found: system.kind_name().into() };
    match system {
        SetSystem::Rank1 { n } => Ok(vec![((0..*n).map(ElementId).collect(), 1)]),
        SetSystem::SingleMatroid(m) if m.views().is_empty() => match m.base() {
            MatroidFamily::Uniform { n, rank } => Ok(vec![((0..*n).map(ElementId).collect(), *rank)]),
            MatroidFamily::Partition(pf) => Ok(pf.blocks().iter().cloned().zip(pf.caps().iter().copied()).collect()),
            other => Err(Error::Kind { expected: "uniform or partition matroid", found: other.kind_name().into() }),
        },
        _ => Err(unsupported()),
    }
}

pub fn build_coverage_lp(inst: &SppInstance) -> Result<CoverageLp> {
    let cov = inst
        .objective
        .to_coverage()?
        .ok_or_else(|| Error::Kind { expected: "coverage objective", found: inst.objective.kind_name().into() })?;
    let blocks = polytope_rows(&inst.system)?;
    let n = inst.len();
    let u = cov.universe();
    let ground = inst.ground();
    let scale = if cov.normalized() && u > 0 { 1.0 / u as f64 } else { 1.0 };

    let mut c = vec![0.0; n + u];
    c[n..].iter_mut().for_each(|v| *v = scale);
    let mut upper: Vec<f64> = (0..n).map(|i| if ground.contains(&ElementId(i)) { inst.p } else { 0.0 }).collect();
    upper.extend(std::iter::repeat_n(1.0, u));

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut point_rows = vec![vec![0.0; n + u]; u];
    for (j, row) in point_rows.iter_mut().enumerate() {
        row[n + j] = 1.0;
    }
    for (i, s) in cov.sets().iter().enumerate() {
        for &pt in s {
            point_rows[pt as usize][i] -= 1.0;
        }
    }
    for row in point_rows {
        rows.push(row);
        rhs.push(0.0);
    }
    for (members, cap) in blocks {
        let mut row = vec![0.0; n + u];
        for e in members {
            row[e.0] = 1.0;
        }
        rows.push(row);
        rhs.push(cap as f64);
    }
    let mut lp = DenseLp::new(c, rows, rhs, upper)?;
    lp.names = (0..n).map(|i| format!("x{i}")).chain((0..u).map(|j| format!("y{j}"))).collect();
    Ok(CoverageLp { lp, num_elements: n, coverage: cov })
}
