use serde::{Deserialize, Serialize};

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};

/// Undirected multigraph whose edges are the ground elements: edge `i` is
/// `ElementId(i)`. Parallel edges and self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((i, (u, v))) = edges
            .iter()
            .enumerate()
            .find(|(_, (u, v))| *u >= vertices || *v >= vertices)
        {
            return Err(Error::invalid(format!(
                "edge {i} = ({u}, {v}) references a vertex outside 0..{vertices}"
            )));
        }
        Ok(Graph { vertices, edges })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: ElementId) -> Result<(usize, usize)> {
        self.edges.get(e.0).copied().ok_or(Error::Domain(e))
    }

    pub fn check_edges(&self, s: &ElementSet) -> Result<()> {
        match s.iter().find(|e| e.0 >= self.edges.len()) {
            Some(&e) => Err(Error::Domain(e)),
            None => Ok(()),
        }
    }

    /// True iff the edges of `s` form a forest (no cycles, no self-loops).
    pub fn is_forest(&self, s: &ElementSet) -> Result<bool> {
        self.check_edges(s)?;
        let mut uf = UnionFind::new(self.vertices);
        for e in s {
            let (u, v) = self.edges[e.0];
            if !uf.union(u, v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff no two edges of `s` share a vertex. A self-loop is never
    /// part of a matching.
    pub fn is_matching(&self, s: &ElementSet) -> Result<bool> {
        self.check_edges(s)?;
        let mut used = vec![false; self.vertices];
        for e in s {
            let (u, v) = self.edges[e.0];
            if u == v || used[u] || used[v] {
                return Ok(false);
            }
            used[u] = true;
            used[v] = true;
        }
        Ok(true)
    }

    /// Two-colouring of the vertices if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            if u == v {
                return None;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut side: Vec<Option<bool>> = vec![None; self.vertices];
        let mut stack = Vec::new();
        for s in 0..self.vertices {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            stack.push(s);
            while let Some(u) = stack.pop() {
                let su = side[u].unwrap();
                for &v in &adj[u] {
                    match side[v] {
                        None => {
                            side[v] = Some(!su);
                            stack.push(v);
                        }
                        Some(sv) if sv == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
