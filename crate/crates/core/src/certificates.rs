//! Constructive procedures that certify sparsifier guarantees on a given
//! realization: exchange-map augmentation, feasible-solution stitching over
//! matroid intersections, matching augmentation and edge splitting.

use serde::{Deserialize, Serialize};

use crate::crs::{CrsKind, CrsScheme};
use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroid::MatroidOracle;
use crate::objective::Objective;
use crate::rng::Rng;
use crate::set_system::SetSystem;
use crate::sparsify::{Provenance, SparseSet};
use crate::stochastic::{Marginals, SppInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// `e` was not spanned by `S2`: active, so it joins `S2`.
    Add,
    /// `e` was not spanned by `S2`: inactive, so it leaves `S1`.
    Drop,
    /// `e` was spanned by `S2` and exchanged against `f`: active replaces
    /// `f` in `S2`, inactive moves `f` into `S1` in place of `e`.
    Swap { f: ElementId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeStep {
    pub element: ElementId,
    #[serde(flatten)]
    pub action: Action,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeTrace {
    pub s1: ElementSet,
    pub s2: ElementSet,
    pub steps: Vec<ExchangeStep>,
}

impl ExchangeTrace {
    /// Recomputes `T` from the recorded steps without consulting a matroid.
    pub fn replay(&self) -> ElementSet {
        let mut s1 = self.s1.clone();
        let mut s2 = self.s2.clone();
        for step in &self.steps {
            let e = step.element;
            match (step.action, step.active) {
                (Action::Add, _) => {
                    s2.insert(e);
                }
                (Action::Drop, _) => {
                    s1.remove(&e);
                }
                (Action::Swap { f }, true) => {
                    s2.remove(&f);
                    s2.insert(e);
                }
                (Action::Swap { f }, false) => {
                    s1.remove(&e);
                    s1.insert(f);
                }
            }
        }
        s2
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Augments the active part of `S1` with elements of `S2`. Elements of
/// `S1 \ S2` are processed by ascending id and exchange partners are the
/// first valid ones by ascending id. Returns `T` and the trace.
pub fn construct_t(
    m: &MatroidOracle,
    s1: &ElementSet,
    s2: &ElementSet,
    r: &ElementSet,
) -> Result<(ElementSet, ExchangeTrace)> {
    if !m.is_independent(s1)? || !m.is_independent(s2)? {
        return Err(Error::precondition("construct_t needs independent S1 and S2"));
    }
    let mut a = s1.clone();
    let mut b = s2.clone();
    let mut steps = Vec::new();
    let order: Vec<ElementId> = s1.difference(s2).copied().collect();
    for e in order {
        let active = r.contains(&e);
        let action = if !m.spans(&b, e)? {
            if active {
                b.insert(e);
                Action::Add
            } else {
                a.remove(&e);
                Action::Drop
            }
        } else {
            let f = m.find_exchange_pair(&a, &b, e)?;
            if active {
                b.remove(&f);
                b.insert(e);
            } else {
                a.remove(&e);
                a.insert(f);
            }
            Action::Swap { f }
        };
        steps.push(ExchangeStep { element: e, action, active });
    }
    let t = b;
    let allowed: ElementSet = s1.intersection(r).chain(s2.iter()).copied().collect();
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("construct_t output violates {what}")))
        }
    };
    check(t.is_subset(&allowed), "T ⊆ (S1 ∩ R) ∪ S2")?;
    check(m.is_independent(&t)?, "independence")?;
    check(s1.intersection(s2).all(|e| t.contains(e)), "S1 ∩ S2 ⊆ T")?;
    check(s1.difference(s2).filter(|e| r.contains(e)).all(|e| t.contains(e)), "(S1 \\ S2) ∩ R ⊆ T")?;
    Ok((t, ExchangeTrace { s1: s1.clone(), s2: s2.clone(), steps }))
}

/// `∩_ℓ T_ℓ` over the matroids of an intersection.
pub fn construct_t_intersection(
    matroids: &[MatroidOracle],
    s1: &ElementSet,
    s2: &ElementSet,
    r: &ElementSet,
) -> Result<ElementSet> {
    let mut out: Option<ElementSet> = None;
    for m in matroids {
        let (t, _) = construct_t(m, s1, s2, r)?;
        out = Some(match out {
            None => t,
            Some(acc) => acc.intersection(&t).copied().collect(),
        });
    }
    out.ok_or_else(|| Error::precondition("need at least one matroid"))
}

fn feasible_in_all(matroids: &[MatroidOracle], s: &ElementSet) -> Result<bool> {
    for m in matroids {
        if !m.is_independent(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stitches the samples `Q_1..Q_tau` into one feasible subset of
/// `R ∩ (∪ Q_t)`. Later samples are rewritten in place by the exchange
/// procedure against each (already rewritten) earlier sample; the output is
/// the last sample's active part.
pub fn construct_i(matroids: &[MatroidOracle], q_list: &[ElementSet], r: &ElementSet) -> Result<ElementSet> {
    for (t, q) in q_list.iter().enumerate() {
        if !feasible_in_all(matroids, q)? {
            return Err(Error::precondition(format!("sample {} is not feasible in every matroid", t + 1)));
        }
    }
    let mut qs = q_list.to_vec();
    let mut current = ElementSet::new();
    for t in 0..qs.len() {
        current = qs[t].intersection(r).copied().collect();
        for i in t + 1..qs.len() {
            let updated = construct_t_intersection(matroids, &qs[t], &qs[i], r)?;
            if !feasible_in_all(matroids, &updated)? {
                return Err(Error::Invariant(format!("rewritten sample {} is infeasible", i + 1)));
            }
            qs[i] = updated;
        }
    }
    let union: ElementSet = q_list.iter().flatten().copied().collect();
    if !current.is_subset(r) || !current.is_subset(&union) || !feasible_in_all(matroids, &current)? {
        return Err(Error::Invariant("construct_i output is not a feasible subset of R ∩ Q".into()));
    }
    Ok(current)
}

/// `eps^3 p / (20 ln(1/eps))`.
pub fn crucial_threshold(p: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(eps.powi(3) * p / (20.0 * (1.0 / eps).ln()))
}

/// Splits elements into crucial (`q_e ≥ threshold`) and non-crucial.
pub fn classify_crucial(q: &Marginals, p: f64, eps: f64) -> Result<(ElementSet, ElementSet)> {
    let tau = crucial_threshold(p, eps)?;
    let (c, nc): (Vec<usize>, Vec<usize>) = (0..q.q.len()).partition(|&i| q.q[i] >= tau);
    Ok((c.into_iter().map(ElementId).collect(), nc.into_iter().map(ElementId).collect()))
}

/// Adds edges of `M_NC`, by ascending id, whose endpoints are both free in
/// the growing augmented matching.
pub fn augment_matching(m_crs: &ElementSet, m_nc: &ElementSet, graph: &Graph) -> Result<ElementSet> {
    if !graph.is_matching(m_crs)? || !graph.is_matching(m_nc)? {
        return Err(Error::precondition("augment_matching needs two matchings"));
    }
    let mut used = vec![false; graph.vertices];
    for e in m_crs {
        let (u, v) = graph.edges[e.0];
        used[u] = true;
        used[v] = true;
    }
    let mut out = m_crs.clone();
    for e in m_nc {
        let (u, v) = graph.edges[e.0];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            out.insert(*e);
        }
    }
    Ok(out)
}

/// An instance whose edges were split into parallel copies of lower
/// activation probability.
#[derive(Clone, Debug)]
pub struct SplitInstance {
    pub instance: SppInstance,
    /// The real copy count `ln(1/(1-p)) / ln(1/(1-p̃))`.
    pub c_exact: f64,
    pub copies: usize,
    pub p_tilde: f64,
    /// `origin[e']` is the original edge behind copy `e'`.
    pub origin: Vec<ElementId>,
}

impl SplitInstance {
    /// An original edge is in the pulled-back set iff some copy is.
    pub fn pull_back(&self, q: &ElementSet) -> ElementSet {
        q.iter().map(|e| self.origin[e.0]).collect()
    }

    /// Copies of original edge `e`.
    pub fn copies_of(&self, e: ElementId) -> ElementSet {
        (e.0 * self.copies..(e.0 + 1) * self.copies).map(ElementId).collect()
    }
}

/// Replaces each edge by `ceil(c)` equal-weight copies active with
/// probability `eps^4 p`.
pub fn split_edges(inst: &SppInstance, eps: f64) -> Result<SplitInstance> {
    let SetSystem::Matching(g) = &inst.system else {
        return Err(Error::Kind { expected: "matching", found: inst.system.kind_name().into() });
    };
    let w = inst
        .objective
        .weights()
        .ok_or_else(|| Error::Kind { expected: "additive objective", found: inst.objective.kind_name().into() })?;
    let p = inst.p;
    if !(p > 0.0 && p < 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::precondition("edge splitting needs p and eps in (0,1)"));
    }
    let p_tilde = eps.powi(4) * p;
    let c_exact = (1.0 / (1.0 - p)).ln() / (1.0 / (1.0 - p_tilde)).ln();
    let copies = c_exact.ceil() as usize;
    let mut edges = Vec::with_capacity(g.num_edges() * copies);
    let mut weights = Vec::with_capacity(edges.capacity());
    let mut origin = Vec::with_capacity(edges.capacity());
    for (i, &uv) in g.edges.iter().enumerate() {
        for _ in 0..copies {
            edges.push(uv);
            weights.push(w.get(ElementId(i)));
            origin.push(ElementId(i));
        }
    }
    let graph = Graph::new(g.vertices, edges)?;
    let instance = SppInstance::new(
        format!("{}-split", inst.name),
        SetSystem::Matching(graph),
        Objective::Additive(WeightVector::new(weights)?),
        p_tilde,
        inst.seed,
    )?
    .with_meta("copies", copies)
    .with_meta("c_exact", c_exact);
    Ok(SplitInstance { instance, c_exact, copies, p_tilde, origin })
}

/// The three matchings built on one realization from a hybrid sparse set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridMatchings {
    pub m_crs: ElementSet,
    pub m_nc: ElementSet,
    pub m_aug: ElementSet,
    pub weight_crs: f64,
    pub weight_nc: f64,
    pub weight_aug: f64,
    /// Always true: `M_NC` is the max-weight matching on
    /// `Q_Greedy ∩ NC ∩ R`, a stand-in for the fractional construction.
    pub m_nc_stand_in: bool,
}

/// `M_CRS` resolves `Q_CRS ∩ R` greedily by weight, `M_NC` is the
/// max-weight matching on `Q_Greedy ∩ NC ∩ R`, and `M_AUG` augments the
/// former with the latter.
pub fn hybrid_matchings(
    inst: &SppInstance,
    sparse: &SparseSet,
    q: &Marginals,
    eps: f64,
    r: &ElementSet,
    rng: &mut Rng,
) -> Result<HybridMatchings> {
    let SetSystem::Matching(g) = &inst.system else {
        return Err(Error::Kind { expected: "matching", found: inst.system.kind_name().into() });
    };
    let Provenance::Hybrid { crs, greedy, .. } = &sparse.provenance else {
        return Err(Error::precondition("sparse set was not produced by the hybrid matching sparsifier"));
    };
    let w = inst
        .objective
        .weights()
        .ok_or_else(|| Error::Kind { expected: "additive objective", found: inst.objective.kind_name().into() })?;
    let (_, nc) = classify_crucial(q, inst.p, eps)?;
    let scheme = CrsScheme::new(CrsKind::WeightOrder(w.clone()), inst.system.clone());
    let crs_active: ElementSet = crs.intersection(r).copied().collect();
    let m_crs = scheme.resolve(&q.q, &crs_active, rng)?;
    let nc_active: ElementSet = greedy.iter().filter(|e| r.contains(e) && nc.contains(e)).copied().collect();
    let m_nc = inst.system.max_weight_feasible(w, &nc_active)?.elements;
    let m_aug = augment_matching(&m_crs, &m_nc, g)?;
    Ok(HybridMatchings {
        weight_crs: w.total(&m_crs),
        weight_nc: w.total(&m_nc),
        weight_aug: w.total(&m_aug),
        m_crs,
        m_nc,
        m_aug,
        m_nc_stand_in: true,
    })
}
