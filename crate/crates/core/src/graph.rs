//! Undirected simple graphs, edge-list I/O, synthetic generation and transforms.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Error, Result};

/// Read access to the adjacency matrix `A`.
///
/// `is_edge(u, v)` reads the element `a_{u,v}`, i.e. entry `v` of user `u`'s
/// neighbor list. Protocol code reads the matrix only through this trait so an
/// instrumented implementation can audit which elements each run touches.
pub trait Adjacency {
    fn node_count(&self) -> usize;

    fn is_edge(&self, u: usize, v: usize) -> bool;

    fn degree(&self, u: usize) -> usize;

    /// Number of wedges `i - k - j` over all `k ∉ {i, j}`.
    fn wedge_count(&self, i: usize, j: usize) -> usize {
        (0..self.node_count())
            .filter(|&k| k != i && k != j && self.is_edge(k, i) && self.is_edge(k, j))
            .count()
    }
}

/// Immutable undirected simple graph stored as sorted neighbor lists (CSR).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops are dropped and duplicate
    /// (or reversed) edges collapse into one.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return param(format!("node count {n} exceeds u32 range"));
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return param(format!("edge ({u}, {v}) out of range for n = {n}"));
            }
            if u == v {
                continue;
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Ok(Self { offsets, targets })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::from_edges(n, edges).expect("complete graph edges are in range")
    }

    /// Complete bipartite graph with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j)));
        Self::from_edges(a + b, edges).expect("bipartite edges are in range")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|j| (0, j))).expect("star edges are in range")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|j| (j - 1, j))).expect("path edges are in range")
    }

    pub fn cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|j| (j, (j + 1) % n))).expect("cycle edges are in range")
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, edges).expect("random edges are in range")
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|u| self.neighbors(u).len()).collect()
    }

    /// Number of common neighbors of `i` and `j` by merging sorted lists.
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.neighbors(i), self.neighbors(j));
        let (mut x, mut y, mut count) = (0, 0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
        count
    }

    /// Full scan of the symmetry, loop-freeness and sortedness invariants.
    pub fn check_invariants(&self) -> bool {
        (0..self.n()).all(|u| {
            let list = self.neighbors(u);
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&v| {
                    let v = v as usize;
                    v != u && v < self.n() && self.neighbors(v).binary_search(&(u as u32)).is_ok()
                })
        })
    }
}

impl Adjacency for Graph {
    fn node_count(&self) -> usize {
        self.n()
    }

    fn is_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    fn degree(&self, u: usize) -> usize {
        self.neighbors(u).len()
    }

    fn wedge_count(&self, i: usize, j: usize) -> usize {
        // i and j never appear in their own lists, so the merge already
        // excludes them.
        self.common_neighbors(i, j)
    }
}

/// Per-node degrees with their mean and maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub d_avg: f64,
    pub d_max: usize,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.n() == 0 {
        return param("degree statistics need at least one node");
    }
    let degrees = g.degrees();
    let d_avg = degrees.iter().sum::<usize>() as f64 / g.n() as f64;
    let d_max = degrees.iter().copied().max().unwrap_or(0);
    Ok(DegreeStats {
        degrees,
        d_avg,
        d_max,
    })
}

/// Parses an edge list. Ids are arbitrary nonnegative integers and are
/// remapped to `0..n` in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |raw: u64| {
        let next = ids.len();
        *ids.entry(raw).or_insert(next)
    };
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("malformed node id `{tok}`"),
            })
        };
        let (u, v) = (next_id()?, next_id()?);
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unexpected token `{extra}`"),
            });
        }
        let u = intern(u);
        let v = intern(v);
        edges.push((u, v));
    }
    Graph::from_edges(ids.len(), edges)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

/// Writes one `u v` line per edge (u < v). Isolated nodes are recorded in a
/// `# nodes N` comment only, so reloading drops them.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes {} edges {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Barabási–Albert graph: `m` initial isolated nodes, then each of the
/// remaining `n - m` nodes attaches to `m` distinct existing nodes chosen
/// proportionally to degree (uniformly while every degree is zero).
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || m >= n {
        return param(format!("BA generator needs 1 <= m < n, got m = {m}, n = {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // every edge endpoint appears once, so a uniform draw is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * (n - m));
    let mut edges = Vec::with_capacity(m * (n - m));
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        if endpoints.is_empty() {
            while targets.len() < m {
                let cand = rng.random_range(0..v);
                if !targets.contains(&cand) {
                    targets.push(cand);
                }
            }
        } else {
            while targets.len() < m {
                let cand = endpoints[rng.random_range(0..endpoints.len())];
                if !targets.contains(&cand) {
                    targets.push(cand);
                }
            }
        }
        for &u in &targets {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

/// Group assignment used by [`bipartite_split`]: `true` for the first group
/// of size `⌈n/2⌉`.
pub fn bipartite_partition(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut side = vec![false; n];
    for &u in &order[..n.div_ceil(2)] {
        side[u] = true;
    }
    side
}

/// Splits users uniformly at random into two halves and drops every
/// intra-group edge. Node ids are preserved.
pub fn bipartite_split(g: &Graph, seed: u64) -> Result<Graph> {
    if g.n() < 2 {
        return param("bipartite split needs at least two nodes");
    }
    let side = bipartite_partition(g.n(), seed);
    Graph::from_edges(g.n(), g.edges().filter(|&(u, v)| side[u] != side[v]))
}

/// Induced subgraph on a uniformly random `n_sub`-subset. Selected nodes keep
/// their relative order when remapped to `0..n_sub`.
pub fn subsample(g: &Graph, n_sub: usize, seed: u64) -> Result<Graph> {
    if n_sub > g.n() {
        return param(format!("cannot sample {n_sub} of {} nodes", g.n()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, g.n(), n_sub).into_vec();
    chosen.sort_unstable();
    let mut remap = vec![usize::MAX; g.n()];
    for (new, &old) in chosen.iter().enumerate() {
        remap[old] = new;
    }
    let edges = chosen.iter().flat_map(|&u| {
        let remap = &remap;
        g.neighbors(u)
            .iter()
            .map(|&v| v as usize)
            .filter(move |&v| u < v && remap[v] != usize::MAX)
            .map(move |v| (remap[u], remap[v]))
    });
    Graph::from_edges(n_sub, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_path() {
        let g = parse_edge_list("0 1\n1 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.check_invariants());
    }

    #[test]
    fn collapses_duplicates() {
        let g = parse_edge_list("0 1\n1 0\n0 1\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 1));
    }

    #[test]
    fn remaps_ids_and_drops_loops() {
        let g = parse_edge_list("5 5\n5 7\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_edge(0, 1));
    }

    #[test]
    fn skips_comments_and_blanks() {
        let g = parse_edge_list("# header\n\n3 4\n   \n# x\n4 9\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 2));
    }

    #[test]
    fn reports_line_of_bad_token() {
        let err = parse_edge_list("0 1\n1 x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                msg: "malformed node id `x`".into()
            }
        );
        assert!(matches!(parse_edge_list("0 1\n2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 -1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn ba_edge_count_and_determinism() {
        let g = generate_ba(1000, 5, 1).unwrap();
        assert_eq!(g.edge_count(), 4975);
        assert!(g.check_invariants());
        assert_eq!(g, generate_ba(1000, 5, 1).unwrap());
        assert_ne!(g, generate_ba(1000, 5, 2).unwrap());
    }

    #[test]
    fn ba_average_degree_near_2m() {
        let g = generate_ba(10_000, 100, 3).unwrap();
        let stats = degree_stats(&g).unwrap();
        let expected = 2.0 * 100.0 * 9900.0 / 10_000.0;
        assert!((stats.d_avg - expected).abs() < 1e-9);
        assert!((stats.d_avg - 198.0).abs() < 1e-9);
    }

    #[test]
    fn ba_rejects_bad_m() {
        assert!(generate_ba(5, 5, 0).is_err());
        assert!(generate_ba(5, 0, 0).is_err());
        assert_eq!(generate_ba(2, 1, 0).unwrap().edge_count(), 1);
    }

    #[test]
    fn bipartite_k4_has_no_triangles() {
        let g = bipartite_split(&Graph::complete(4), 11).unwrap();
        assert_eq!(crate::exact::count_triangles(&g).unwrap(), 0);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn bipartite_edgeless_stays_edgeless() {
        let g = bipartite_split(&Graph::empty(9), 3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (9, 0));
        assert!(bipartite_split(&Graph::empty(1), 3).is_err());
    }

    #[test]
    fn bipartite_complete_keeps_cross_pairs() {
        let n = 13;
        let seed = 77;
        let side = bipartite_partition(n, seed);
        assert_eq!(side.iter().filter(|&&s| s).count(), 7);
        let mut cross = 0;
        for u in 0..n {
            for v in u + 1..n {
                if side[u] != side[v] {
                    cross += 1;
                }
            }
        }
        let g = bipartite_split(&Graph::complete(n), seed).unwrap();
        assert_eq!(g.edge_count(), cross);
        assert_eq!(cross, 42);
        assert!(g.edges().all(|(u, v)| side[u] != side[v]));
    }

    #[test]
    fn subsample_full_is_identity() {
        let g = Graph::erdos_renyi(30, 0.2, 5);
        assert_eq!(subsample(&g, 30, 9).unwrap(), g);
        assert_eq!(subsample(&g, 0, 9).unwrap().n(), 0);
        assert!(subsample(&g, 31, 9).is_err());
    }

    #[test]
    fn subsample_of_triangle_keeps_the_edge() {
        let k3 = Graph::complete(3);
        let with_edge = (0..10_000)
            .filter(|&s| subsample(&k3, 2, s).unwrap().edge_count() == 1)
            .count();
        assert_eq!(with_edge, 10_000);
    }

    #[test]
    fn degree_stats_examples() {
        let k4 = degree_stats(&Graph::complete(4)).unwrap();
        assert_eq!(k4.degrees, vec![3; 4]);
        assert_eq!((k4.d_avg, k4.d_max), (3.0, 3));
        let s5 = degree_stats(&Graph::star(5)).unwrap();
        assert_eq!(s5.d_max, 5);
        assert!((s5.d_avg - 10.0 / 6.0).abs() < 1e-12);
        assert!(degree_stats(&Graph::empty(0)).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = generate_ba(200, 3, 4).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.edge_count(), g.edge_count());
        assert_eq!(crate::exact::count_triangles(&back), crate::exact::count_triangles(&g));
    }
}
