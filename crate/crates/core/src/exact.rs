//! Exact (non-private) subgraph counts used as ground truth.

use crate::error::{param, Error, Result};
use crate::graph::{Adjacency, Graph};

fn to_u64(x: u128, what: &'static str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow(what))
}

pub(crate) fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

pub(crate) fn choose3(n: u64) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Number of triangles. Each triangle `u < v < w` is found once, from the
/// edge `(u, v)`, by intersecting the tails of the sorted neighbor lists.
pub fn count_triangles(g: &Graph) -> Result<u64> {
    let mut total: u128 = 0;
    for (u, v) in g.edges() {
        let a = g.neighbors(u);
        let b = g.neighbors(v);
        let a = &a[a.partition_point(|&w| w as usize <= v)..];
        let b = &b[b.partition_point(|&w| w as usize <= v)..];
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    total += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    to_u64(total, "triangle count")
}

/// Number of 4-cycles, `½ Σ_{i<j} C(codeg(i,j), 2)`, accumulated over
/// 2-paths in `O(Σ d²)` time.
pub fn count_four_cycles(g: &Graph) -> Result<u64> {
    let n = g.n();
    let mut codeg = vec![0u64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut total: u128 = 0;
    for i in 0..n {
        for &k in g.neighbors(i) {
            for &j in g.neighbors(k as usize) {
                let j = j as usize;
                if j > i {
                    if codeg[j] == 0 {
                        touched.push(j);
                    }
                    codeg[j] += 1;
                }
            }
        }
        for &j in &touched {
            total += choose2(codeg[j]);
            codeg[j] = 0;
        }
        touched.clear();
    }
    // every 4-cycle has two opposite pairs
    to_u64(total / 2, "4-cycle count")
}

fn check_pair(g: &Graph, i: usize, j: usize) -> Result<()> {
    if i == j {
        return param(format!("pair endpoints must differ, got ({i}, {j})"));
    }
    if i >= g.n() || j >= g.n() {
        return param(format!("pair ({i}, {j}) out of range for n = {}", g.n()));
    }
    Ok(())
}

/// Number of wedges `i - k - j`, i.e. common neighbors of `i` and `j`.
pub fn wedge_count_pair(g: &Graph, i: usize, j: usize) -> Result<u64> {
    check_pair(g, i, j)?;
    Ok(g.wedge_count(i, j) as u64)
}

/// Number of triangles containing both `i` and `j`: `a_{i,j} · f∧_{i,j}`.
pub fn triangles_involving_pair(g: &Graph, i: usize, j: usize) -> Result<u64> {
    let wedges = wedge_count_pair(g, i, j)?;
    Ok(if g.is_edge(i, j) { wedges } else { 0 })
}

/// `Σ_i C(d_i, 2)`.
pub fn count_two_stars(g: &Graph) -> Result<u64> {
    let total: u128 = g.degrees().into_iter().map(|d| choose2(d as u64)).sum();
    to_u64(total, "2-star count")
}

/// Global clustering coefficient `3 f△ / #2-stars`.
pub fn clustering_coefficient_exact(g: &Graph) -> Result<f64> {
    let stars = count_two_stars(g)?;
    if stars == 0 {
        return Err(Error::Undefined(
            "clustering coefficient of a graph without 2-stars".into(),
        ));
    }
    Ok(3.0 * count_triangles(g)? as f64 / stars as f64)
}

/// Node triples grouped by how many of their three pairs are edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleCensus {
    pub m3: u64,
    pub m2: u64,
    pub m1: u64,
    pub m0: u64,
}

impl TripleCensus {
    pub fn total(&self) -> u128 {
        self.m3 as u128 + self.m2 as u128 + self.m1 as u128 + self.m0 as u128
    }

    /// Closed-form census from the node count, edge count, 2-star count and
    /// triangle count of a graph.
    pub(crate) fn from_counts(n: u64, edges: u64, two_stars: u128, triangles: u64) -> Result<Self> {
        let m3 = triangles as i128;
        let m2 = two_stars as i128 - 3 * m3;
        let m1 = edges as i128 * (n as i128 - 2) - 2 * m2 - 3 * m3;
        let m0 = choose3(n) as i128 - m3 - m2 - m1;
        let conv = |x: i128, what| u64::try_from(x).map_err(|_| Error::Overflow(what));
        Ok(Self {
            m3: conv(m3, "census m3")?,
            m2: conv(m2, "census m2")?,
            m1: conv(m1, "census m1")?,
            m0: conv(m0, "census m0")?,
        })
    }
}

pub fn triple_census(g: &Graph) -> Result<TripleCensus> {
    if g.n() < 3 {
        return param("triple census needs at least three nodes");
    }
    let two_stars: u128 = g.degrees().into_iter().map(|d| choose2(d as u64)).sum();
    TripleCensus::from_counts(
        g.n() as u64,
        g.edge_count() as u64,
        two_stars,
        count_triangles(g)?,
    )
}
