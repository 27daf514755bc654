//! Downward-closed set systems and their exact small-instance optimizers.

mod assignment;
mod bnb;

use std::collections::BTreeMap;

use serde::Serialize;

pub use bnb::EXACT_LIMIT;

use crate::element::{ElementId, ElementSet, WeightVector};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroid::{MatroidFamily, MatroidOracle};

/// Intersections and general matchings get an exact rank only up to here.
pub const EXACT_RANK_LIMIT: usize = 20;

#[derive(Clone, Debug)]
pub enum SetSystem {
    SingleMatroid(MatroidOracle),
    /// `k` matroids over one ground set; feasible means independent in all.
    Intersection(Vec<MatroidOracle>),
    /// Feasible sets are matchings; elements are the edges of the graph.
    Matching(Graph),
    /// At most one of `n` elements.
    Rank1 { n: usize },
    /// `m` disjoint blocks of `k` elements; feasible sets lie inside one block.
    /// Element `e` belongs to block `e / k`.
    Blocks { m: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibleSet {
    pub elements: ElementSet,
    pub weight: f64,
}

impl FeasibleSet {
    pub fn empty() -> Self {
        FeasibleSet { elements: ElementSet::new(), weight: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SystemRank {
    pub rank: usize,
    /// False when only a greedy lower bound was affordable.
    pub exact: bool,
}

impl SetSystem {
    pub fn matroid(m: impl Into<MatroidOracle>) -> Self {
        SetSystem::SingleMatroid(m.into())
    }

    pub fn intersection(ms: Vec<MatroidOracle>) -> Result<Self> {
        let Some(first) = ms.first() else {
            return Err(Error::invalid("an intersection needs at least one matroid"));
        };
        if ms.iter().any(|m| m.ground() != first.ground()) {
            return Err(Error::invalid("intersected matroids must share one ground set"));
        }
        Ok(SetSystem::Intersection(ms))
    }

    /// Bipartite matching on `graph` as the intersection of the two
    /// partition matroids "at most one edge per left vertex" and "... per
    /// right vertex".
    pub fn bipartite_intersection(graph: &Graph) -> Result<Self> {
        let side = graph
            .bipartition()
            .ok_or_else(|| Error::invalid("graph is not bipartite"))?;
        let mut left: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut right: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &(u, v)) in graph.edges.iter().enumerate() {
            let (l, r) = if side[u] { (v, u) } else { (u, v) };
            left.entry(l).or_default().push(i);
            right.entry(r).or_default().push(i);
        }
        let to_matroid = |blocks: BTreeMap<usize, Vec<usize>>| -> Result<MatroidOracle> {
            let caps = vec![1; blocks.len()];
            Ok(MatroidFamily::partition(blocks.into_values().collect(), caps)?.into())
        };
        SetSystem::intersection(vec![to_matroid(left)?, to_matroid(right)?])
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SetSystem::SingleMatroid(_) => "matroid",
            SetSystem::Intersection(_) => "intersection",
            SetSystem::Matching(_) => "matching",
            SetSystem::Rank1 { .. } => "rank1",
            SetSystem::Blocks { .. } => "blocks",
        }
    }

    pub fn ground(&self) -> ElementSet {
        match self {
            SetSystem::SingleMatroid(m) => m.ground().clone(),
            SetSystem::Intersection(ms) => ms[0].ground().clone(),
            SetSystem::Matching(g) => (0..g.num_edges()).map(ElementId).collect(),
            SetSystem::Rank1 { n } => (0..*n).map(ElementId).collect(),
            SetSystem::Blocks { m, k } => (0..m * k).map(ElementId).collect(),
        }
    }

    pub fn ground_len(&self) -> usize {
        match self {
            SetSystem::SingleMatroid(m) => m.ground().len(),
            SetSystem::Intersection(ms) => ms[0].ground().len(),
            SetSystem::Matching(g) => g.num_edges(),
            SetSystem::Rank1 { n } => *n,
            SetSystem::Blocks { m, k } => m * k,
        }
    }

    /// The system as a single matroid, when it is one.
    pub fn as_matroid(&self) -> Option<MatroidOracle> {
        match self {
            SetSystem::SingleMatroid(m) => Some(m.clone()),
            SetSystem::Intersection(ms) if ms.len() == 1 => Some(ms[0].clone()),
            SetSystem::Rank1 { n } => Some(MatroidOracle::uniform(*n, 1)),
            SetSystem::Blocks { m: 1, k } => Some(MatroidOracle::uniform(*k, *k)),
            _ => None,
        }
    }

    /// The matroids whose intersection is this system, when it is one.
    pub fn matroids(&self) -> Option<Vec<MatroidOracle>> {
        match self {
            SetSystem::Intersection(ms) => Some(ms.clone()),
            _ => self.as_matroid().map(|m| vec![m]),
        }
    }

    fn check_domain(&self, s: &ElementSet) -> Result<()> {
        let n = self.ground_len();
        match self {
            SetSystem::SingleMatroid(_) | SetSystem::Intersection(_) => {
                let ground = self.ground();
                match s.iter().find(|e| !ground.contains(e)) {
                    Some(&e) => Err(Error::Domain(e)),
                    None => Ok(()),
                }
            }
            _ => match s.iter().find(|e| e.0 >= n) {
                Some(&e) => Err(Error::Domain(e)),
                None => Ok(()),
            },
        }
    }

    pub fn is_feasible(&self, s: &ElementSet) -> Result<bool> {
        match self {
            SetSystem::SingleMatroid(m) => m.is_independent(s),
            SetSystem::Intersection(ms) => {
                for m in ms {
                    if !m.is_independent(s)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SetSystem::Matching(g) => g.is_matching(s),
            SetSystem::Rank1 { .. } => {
                self.check_domain(s)?;
                Ok(s.len() <= 1)
            }
            SetSystem::Blocks { k, .. } => {
                self.check_domain(s)?;
                let mut blocks = s.iter().map(|e| e.0 / k);
                Ok(match blocks.next() {
                    None => true,
                    Some(b) => blocks.all(|c| c == b),
                })
            }
        }
    }

    pub fn system_rank(&self) -> Result<SystemRank> {
        let exact = |rank| Ok(SystemRank { rank, exact: true });
        match self {
            SetSystem::SingleMatroid(m) => exact(m.full_rank()?),
            SetSystem::Rank1 { n } => exact((*n).min(1)),
            SetSystem::Blocks { m, k } => exact(if *m == 0 { 0 } else { *k }),
            SetSystem::Matching(g) => {
                let simple = dedupe_parallel(g, &self.ground(), &WeightVector::uniform(g.num_edges(), 1.0));
                let unit = WeightVector::uniform(g.num_edges(), 1.0);
                if g.bipartition().is_some() || simple.len() <= EXACT_RANK_LIMIT {
                    let best = self.max_weight_feasible(&unit, &simple)?;
                    exact(best.elements.len())
                } else {
                    let greedy = self.greedy_feasible(&unit, &simple)?;
                    Ok(SystemRank { rank: greedy.elements.len(), exact: false })
                }
            }
            SetSystem::Intersection(_) => {
                let ground = self.ground();
                let unit = WeightVector::uniform(ground.iter().map(|e| e.0 + 1).max().unwrap_or(0), 1.0);
                if ground.len() <= EXACT_RANK_LIMIT {
                    exact(self.max_weight_feasible(&unit, &ground)?.elements.len())
                } else {
                    let greedy = self.greedy_feasible(&unit, &ground)?;
                    Ok(SystemRank { rank: greedy.elements.len(), exact: false })
                }
            }
        }
    }

    /// Exact max-weight feasible subset of `s`.
    pub fn max_weight_feasible(&self, w: &WeightVector, s: &ElementSet) -> Result<FeasibleSet> {
        self.check_domain(s)?;
        let elements = match self {
            SetSystem::SingleMatroid(m) => {
                let mut order: Vec<ElementId> = s.iter().copied().collect();
                w.sort_desc(&mut order);
                let mut acc = ElementSet::new();
                for e in order {
                    acc.insert(e);
                    if !m.is_independent(&acc)? {
                        acc.remove(&e);
                    }
                }
                acc
            }
            SetSystem::Rank1 { .. } => {
                let mut order: Vec<ElementId> = s.iter().copied().collect();
                w.sort_desc(&mut order);
                order.first().copied().into_iter().collect()
            }
            SetSystem::Blocks { k, .. } => {
                let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
                for e in s {
                    *sums.entry(e.0 / k).or_default() += w.get(*e);
                }
                let best = sums
                    .iter()
                    .fold(None::<(usize, f64)>, |acc, (&b, &v)| match acc {
                        Some((_, bv)) if bv >= v => acc,
                        _ => Some((b, v)),
                    });
                match best {
                    Some((b, _)) => s.iter().filter(|e| e.0 / k == b).copied().collect(),
                    None => ElementSet::new(),
                }
            }
            SetSystem::Matching(g) => {
                let simple = dedupe_parallel(g, s, w);
                if let Some(side) = g.bipartition() {
                    bipartite_max_matching(g, &side, &simple, w)
                } else {
                    if simple.len() > EXACT_LIMIT {
                        return Err(Error::SizeLimit {
                            what: "exact matching on a general graph",
                            size: simple.len(),
                            limit: EXACT_LIMIT,
                        });
                    }
                    bnb::max_weight_subset(&simple, w, |c| g.is_matching(c))?.0
                }
            }
            SetSystem::Intersection(_) => {
                if s.len() > EXACT_LIMIT {
                    return Err(Error::SizeLimit {
                        what: "exact matroid intersection",
                        size: s.len(),
                        limit: EXACT_LIMIT,
                    });
                }
                bnb::max_weight_subset(s, w, |c| self.is_feasible(c))?.0
            }
        };
        let weight = w.total(&elements);
        Ok(FeasibleSet { elements, weight })
    }

    /// Greedy maximal feasible subset by nonincreasing weight. A
    /// `1/k`-approximation on a `k`-matroid intersection; exact on a matroid.
    pub fn greedy_feasible(&self, w: &WeightVector, s: &ElementSet) -> Result<FeasibleSet> {
        self.check_domain(s)?;
        let mut order: Vec<ElementId> = s.iter().copied().collect();
        w.sort_desc(&mut order);
        let mut acc = ElementSet::new();
        for e in order {
            acc.insert(e);
            if !self.is_feasible(&acc)? {
                acc.remove(&e);
            }
        }
        let weight = w.total(&acc);
        Ok(FeasibleSet { elements: acc, weight })
    }
}

/// Keeps one edge per vertex pair: the heaviest, ties by ascending id.
/// Self-loops are dropped since they never belong to a matching.
fn dedupe_parallel(g: &Graph, s: &ElementSet, w: &WeightVector) -> ElementSet {
    let mut best: BTreeMap<(usize, usize), ElementId> = BTreeMap::new();
    for &e in s {
        let (u, v) = g.edges[e.0];
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        best.entry(key)
            .and_modify(|cur| {
                if w.get(e) > w.get(*cur) {
                    *cur = e;
                }
            })
            .or_insert(e);
    }
    best.into_values().collect()
}

fn bipartite_max_matching(g: &Graph, side: &[bool], simple: &ElementSet, w: &WeightVector) -> ElementSet {
    let mut left_index = BTreeMap::new();
    let mut right_index = BTreeMap::new();
    for &e in simple {
        let (u, v) = g.edges[e.0];
        let (l, r) = if side[u] { (v, u) } else { (u, v) };
        let n = left_index.len();
        left_index.entry(l).or_insert(n);
        let n = right_index.len();
        right_index.entry(r).or_insert(n);
    }
    let mut gain = vec![vec![0.0; right_index.len()]; left_index.len()];
    let mut edge_at = vec![vec![None; right_index.len()]; left_index.len()];
    for &e in simple {
        let (u, v) = g.edges[e.0];
        let (l, r) = if side[u] { (v, u) } else { (u, v) };
        let (i, j) = (left_index[&l], right_index[&r]);
        gain[i][j] = w.get(e);
        edge_at[i][j] = Some(e);
    }
    let assignment = assignment::max_weight_assignment(&gain, right_index.len());
    assignment
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.and_then(|j| edge_at[i].get(j).copied().flatten()))
        .collect()
}
