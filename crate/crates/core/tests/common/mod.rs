//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's algorithms; only its data types are used.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;
use sposs::element::set;
use sposs::{ElementSet, Graph, MatroidOracle, SetSystem};

/// A small matroid described independently of the library.
#[derive(Clone, Debug)]
pub enum TestMatroid {
    Uniform { n: usize, rank: usize },
    /// `block[e]` is the block of element `e`.
    Partition { block: Vec<usize>, caps: Vec<usize> },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
}

impl TestMatroid {
    pub fn len(&self) -> usize {
        match self {
            TestMatroid::Uniform { n, .. } => *n,
            TestMatroid::Partition { block, .. } => block.len(),
            TestMatroid::Graphic { edges, .. } => edges.len(),
        }
    }

    pub fn independent(&self, mask: u32) -> bool {
        match self {
            TestMatroid::Uniform { rank, .. } => mask.count_ones() as usize <= *rank,
            TestMatroid::Partition { block, caps } => {
                let mut used = vec![0; caps.len()];
                for (e, &b) in block.iter().enumerate() {
                    if mask & (1 << e) != 0 {
                        used[b] += 1;
                    }
                }
                used.iter().zip(caps).all(|(u, c)| u <= c)
            }
            TestMatroid::Graphic { vertices, edges } => is_forest(*vertices, edges, mask),
        }
    }

    pub fn rank(&self, mask: u32) -> usize {
        submasks(mask).filter(|&s| self.independent(s)).map(|s| s.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn build(&self) -> MatroidOracle {
        match self {
            TestMatroid::Uniform { n, rank } => MatroidOracle::uniform(*n, *rank),
            TestMatroid::Partition { block, caps } => {
                let mut blocks = vec![Vec::new(); caps.len()];
                for (e, &b) in block.iter().enumerate() {
                    blocks[b].push(e);
                }
                sposs::MatroidFamily::partition(blocks, caps.clone()).unwrap().into()
            }
            TestMatroid::Graphic { vertices, edges } => {
                sposs::MatroidFamily::graphic(Graph::new(*vertices, edges.clone()).unwrap()).into()
            }
        }
    }
}

/// Forest test by depth-first search: a set of edges is acyclic iff every
/// component with `v` vertices carries exactly `v - 1` of its edges.
pub fn is_forest(vertices: usize, edges: &[(usize, usize)], mask: u32) -> bool {
    let chosen: Vec<(usize, usize)> =
        edges.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect();
    if chosen.iter().any(|(u, v)| u == v) {
        return false;
    }
    let mut adj = vec![Vec::new(); vertices];
    for &(u, v) in &chosen {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; vertices];
    let mut components = 0;
    for start in 0..vertices {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    chosen.len() == vertices - components
}

pub fn is_matching(edges: &[(usize, usize)], mask: u32) -> bool {
    let mut used = BTreeSet::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        if mask & (1 << i) != 0 && (u == v || !used.insert(u) || !used.insert(v)) {
            return false;
        }
    }
    true
}

pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

pub fn to_set(mask: u32) -> ElementSet {
    set((0..32).filter(|i| mask & (1 << i) != 0))
}

pub fn to_mask(s: &ElementSet) -> u32 {
    s.iter().fold(0, |m, e| m | (1 << e.0))
}

/// Best total weight of a feasible subset of `mask`.
pub fn brute_best(mask: u32, w: &[f64], feasible: impl Fn(u32) -> bool) -> f64 {
    submasks(mask)
        .filter(|&s| feasible(s))
        .map(|s| (0..w.len()).filter(|i| s & (1 << i) != 0).map(|i| w[i]).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `E_R[f(R)]` when each of `n` elements is active with probability `p`,
/// by summing over all `2^n` realizations.
pub fn exact_expectation(n: usize, p: &BigRational, f: impl Fn(u32) -> BigRational) -> BigRational {
    let q = rat_int(1) - p;
    let mut total = rat_int(0);
    for mask in 0..(1u32 << n) {
        let k = mask.count_ones() as i32;
        total += p.pow(k) * q.pow(n as i32 - k) * f(mask);
    }
    total
}

pub fn exact_expectation_f64(n: usize, p: f64, f: impl Fn(u32) -> f64) -> f64 {
    (0..(1u32 << n))
        .map(|mask| {
            let k = mask.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(n as i32 - k) * f(mask)
        })
        .sum()
}

/// The equal-partition family from its interval formula: with 0-based
/// `i, j`, part `j` of partition `i` is the union over `l` of
/// `[l/r^i + j/r^(i+1), l/r^i + (j+1)/r^(i+1)]`. An atom belongs to it iff
/// its midpoint `m` has `floor(m r^(i+1)) mod r = j`. Indexed by `i*r + j`.
pub fn interval_family(n: usize, r: usize) -> (usize, Vec<Vec<usize>>) {
    let rows = n / r;
    let atoms = r.pow(rows as u32);
    let mut family = vec![Vec::new(); n];
    for a in 0..atoms {
        for i in 0..rows {
            let scaled = (2 * a as u128 + 1) * (r as u128).pow(i as u32 + 1) / (2 * atoms as u128);
            let j = (scaled % r as u128) as usize;
            family[i * r + j].push(a);
        }
    }
    (atoms, family)
}

pub fn atom_union(families: &[Vec<usize>], mask: u32, atoms: usize) -> f64 {
    let mut covered = vec![false; atoms];
    for (e, f) in families.iter().enumerate() {
        if mask & (1 << e) != 0 {
            for &a in f {
                covered[a] = true;
            }
        }
    }
    covered.iter().filter(|&&c| c).count() as f64 / atoms as f64
}

/// Random small matroids: uniform, partition or graphic on up to `max` elements.
pub fn arb_matroid(max: usize) -> impl Strategy<Value = TestMatroid> {
    let uniform = (1..=max).prop_flat_map(|n| (Just(n), 0..=n)).prop_map(|(n, rank)| TestMatroid::Uniform { n, rank });
    let partition = (1..=max, 1usize..4)
        .prop_flat_map(|(n, b)| (prop::collection::vec(0..b, n), prop::collection::vec(0usize..3, b)))
        .prop_map(|(block, caps)| TestMatroid::Partition { block, caps });
    let graphic = (2usize..6)
        .prop_flat_map(move |v| (Just(v), prop::collection::vec((0..v, 0..v), 1..=max)))
        .prop_map(|(vertices, edges)| TestMatroid::Graphic { vertices, edges });
    prop_oneof![uniform, partition, graphic]
}

/// Random simple-ish bipartite graph with `left + right` vertices.
pub fn arb_bipartite(max_edges: usize) -> impl Strategy<Value = Graph> {
    (1usize..4, 1usize..4)
        .prop_flat_map(move |(l, r)| (Just(l), Just(r), prop::collection::vec((0..l, 0..r), 1..=max_edges)))
        .prop_map(|(l, r, es)| Graph::new(l + r, es.into_iter().map(|(a, b)| (a, l + b)).collect()).unwrap())
}

pub fn arb_graph(max_edges: usize) -> impl Strategy<Value = Graph> {
    (2usize..6)
        .prop_flat_map(move |v| (Just(v), prop::collection::vec((0..v, 0..v), 1..=max_edges)))
        .prop_map(|(v, es)| Graph::new(v, es).unwrap())
}

pub fn arb_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u32..20).prop_map(f64::from), n)
}

pub fn feasible_mask(system: &SetSystem, mask: u32) -> bool {
    system.is_feasible(&to_set(mask)).unwrap()
}

/// Optimum of `max c.x, A x <= b, 0 <= x <= u` by enumerating basic
/// solutions: each variable sits at 0, at its upper bound, or is free, and
/// the free ones are pinned by as many tight rows. `None` if infeasible.
pub fn brute_lp(c: &[f64], a: &[Vec<f64>], b: &[f64], u: &[f64]) -> Option<f64> {
    let n = c.len();
    let m = a.len();
    let mut best: Option<f64> = None;
    let mut state = vec![0u8; n]; // 0 = lower, 1 = upper, 2 = free
    loop {
        let free: Vec<usize> = (0..n).filter(|&j| state[j] == 2).collect();
        let k = free.len();
        if k <= m {
            for rows in combinations(m, k) {
                let mut x: Vec<f64> = (0..n).map(|j| if state[j] == 1 { u[j] } else { 0.0 }).collect();
                let mut mat: Vec<Vec<f64>> = rows.iter().map(|&i| free.iter().map(|&j| a[i][j]).collect()).collect();
                let mut rhs: Vec<f64> = rows
                    .iter()
                    .map(|&i| b[i] - (0..n).filter(|&j| state[j] != 2).map(|j| a[i][j] * x[j]).sum::<f64>())
                    .collect();
                let Some(sol) = gauss(&mut mat, &mut rhs) else { continue };
                for (idx, &j) in free.iter().enumerate() {
                    x[j] = sol[idx];
                }
                let feasible = (0..n).all(|j| x[j] >= -1e-9 && x[j] <= u[j] + 1e-9)
                    && (0..m).all(|i| (0..n).map(|j| a[i][j] * x[j]).sum::<f64>() <= b[i] + 1e-9);
                if feasible {
                    let v: f64 = (0..n).map(|j| c[j] * x[j]).sum();
                    best = Some(best.map_or(v, |bv: f64| bv.max(v)));
                }
            }
        }
        let Some(pos) = (0..n).find(|&j| state[j] < 2) else { break };
        state[pos] += 1;
        state[..pos].fill(0);
    }
    best
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    (0..(1u32 << m)).filter(|s| s.count_ones() as usize == k).map(|s| (0..m).filter(|i| s & (1 << i) != 0).collect()).collect()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..k {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}
