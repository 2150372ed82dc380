//! One-round shuffle-model primitives.
//!
//! Users, the shuffler and the data collector run in one process; their
//! boundaries are the function signatures below. Users read only their own
//! neighbor list through [`Adjacency::is_edge`], the shuffler only permutes,
//! and the collector only sees the permuted bits and the local edge reports.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{param, Error, Result};
use crate::graph::Adjacency;
use crate::privacy::{flip_probability, local_privacy_budget, warner_rr};

/// Shuffled wedge bits for one user-pair, as received by the collector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeReport {
    pub pair: (usize, usize),
    pub bits: Vec<bool>,
}

impl WedgeReport {
    /// Number of 1 bits. The only statistic collectors may use.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// The two endpoint users' RR reports of the edge between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEdgeReports {
    pub z_i: bool,
    pub z_j: bool,
}

/// Disjoint user-pairs `(σ(1),σ(2)), …, (σ(2t−1),σ(2t))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPlan {
    pub pairs: Vec<(usize, usize)>,
}

impl PairPlan {
    pub fn t(&self) -> usize {
        self.pairs.len()
    }
}

/// RR budgets of one pair: `eps_edge` for the local edges, `eps_local` for
/// the wedge bits. `f64::INFINITY` disables the corresponding noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairBudgets {
    pub eps_edge: f64,
    pub eps_local: f64,
}

impl PairBudgets {
    pub fn new(eps_edge: f64, eps_local: f64) -> Result<Self> {
        for (name, eps) in [("edge", eps_edge), ("wedge", eps_local)] {
            if eps.is_nan() || eps <= 0.0 {
                return param(format!(
                    "{name} budget must be > 0 (zero makes the estimator divide by zero), got {eps}"
                ));
            }
        }
        Ok(Self {
            eps_edge,
            eps_local,
        })
    }

    /// Both budgets infinite: reports equal the true bits.
    pub fn noiseless() -> Self {
        Self {
            eps_edge: f64::INFINITY,
            eps_local: f64::INFINITY,
        }
    }

    pub fn q(&self) -> f64 {
        flip_probability(self.eps_edge)
    }

    pub fn q_l(&self) -> f64 {
        flip_probability(self.eps_local)
    }
}

fn check_pair<A: Adjacency + ?Sized>(g: &A, (i, j): (usize, usize)) -> Result<()> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::Parameter(format!(
            "no shufflers available: wedge shuffling needs n >= 3, got {n}"
        )));
    }
    if i == j || i >= n || j >= n {
        return param(format!("invalid user-pair ({i}, {j}) for n = {n}"));
    }
    Ok(())
}

/// Wedge shuffling for the pair `(i, j)`.
///
/// Each user `k ∉ {i, j}` computes `w = a_{k,i} · a_{k,j}` and sends
/// `ε_L`-RR of it; the shuffler applies a uniform permutation.
pub fn ws<A, R>(g: &A, eps_local: f64, pair: (usize, usize), rng: &mut R) -> Result<WedgeReport>
where
    A: Adjacency + ?Sized,
    R: Rng + ?Sized,
{
    check_pair(g, pair)?;
    let (i, j) = pair;
    let mut bits = Vec::with_capacity(g.node_count() - 2);
    for k in (0..g.node_count()).filter(|&k| k != i && k != j) {
        let wedge = g.is_edge(k, i) && g.is_edge(k, j);
        bits.push(warner_rr(wedge, eps_local, rng)?);
    }
    bits.shuffle(rng);
    Ok(WedgeReport { pair, bits })
}

/// Users `i` and `j` each send `ε`-RR of their own copy of the edge bit.
pub fn local_edges<A, R>(
    g: &A,
    eps: f64,
    (i, j): (usize, usize),
    rng: &mut R,
) -> Result<LocalEdgeReports>
where
    A: Adjacency + ?Sized,
    R: Rng + ?Sized,
{
    Ok(LocalEdgeReports {
        z_i: warner_rr(g.is_edge(i, j), eps, rng)?,
        z_j: warner_rr(g.is_edge(j, i), eps, rng)?,
    })
}

/// Collector side of WSLE: unbiased estimate of the triangles containing
/// the pair from the number of 1s among `reports` wedge bits.
pub fn wsle_estimate(ones: usize, reports: usize, edges: LocalEdgeReports, budgets: PairBudgets) -> f64 {
    let (q, q_l) = (budgets.q(), budgets.q_l());
    let z = edges.z_i as u8 as f64 + edges.z_j as u8 as f64;
    let wedge_sum = ones as f64 - reports as f64 * q_l;
    (z - 2.0 * q) * wedge_sum / (2.0 * (1.0 - 2.0 * q) * (1.0 - 2.0 * q_l))
}

/// Unbiased wedge-count estimate `Σ_k (y_k − q_L)/(1 − 2q_L)`.
pub fn wedge_estimate(ones: usize, reports: usize, q_l: f64) -> f64 {
    (ones as f64 - reports as f64 * q_l) / (1.0 - 2.0 * q_l)
}

/// WSLE with both budgets supplied directly. No amplification is claimed.
pub fn wsle_with_budgets<A, R>(
    g: &A,
    budgets: PairBudgets,
    pair: (usize, usize),
    rng: &mut R,
) -> Result<f64>
where
    A: Adjacency + ?Sized,
    R: Rng + ?Sized,
{
    let report = ws(g, budgets.eps_local, pair, rng)?;
    let edges = local_edges(g, budgets.eps_edge, pair, rng)?;
    Ok(wsle_estimate(report.ones(), report.len(), edges, budgets))
}

/// WSLE in the shuffle model: `ε_L` is chosen so that shuffling the `n − 2`
/// wedge reports gives `(ε, δ)`-DP.
pub fn wsle<A, R>(g: &A, eps: f64, delta: f64, pair: (usize, usize), rng: &mut R) -> Result<f64>
where
    A: Adjacency + ?Sized,
    R: Rng + ?Sized,
{
    check_pair(g, pair)?;
    let budget = local_privacy_budget(g.node_count() - 2, eps, delta)?;
    wsle_with_budgets(g, PairBudgets::new(eps, budget.eps_local)?, pair, rng)
}

/// How the estimators obtain the shuffled wedge reports of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportMode {
    /// Draw the number of 1s directly: `Bin(W, 1 − q_L) + Bin(n − 2 − W, q_L)`
    /// for a pair with `W` wedges. Same distribution as the simulated
    /// protocol, since collectors only use the count.
    #[default]
    Aggregated,
    /// Run every user's randomizer and the shuffler.
    Simulated,
}

/// Number of 1s the collector receives for `pair`, and the report count.
pub(crate) fn shuffled_ones<A, R>(
    g: &A,
    eps_local: f64,
    pair: (usize, usize),
    mode: ReportMode,
    rng: &mut R,
) -> Result<(usize, usize)>
where
    A: Adjacency + ?Sized,
    R: Rng + ?Sized,
{
    match mode {
        ReportMode::Simulated => {
            let report = ws(g, eps_local, pair, rng)?;
            Ok((report.ones(), report.len()))
        }
        ReportMode::Aggregated => {
            check_pair(g, pair)?;
            let reports = g.node_count() - 2;
            let wedges = g.wedge_count(pair.0, pair.1);
            let q_l = flip_probability(eps_local);
            let kept = binomial(wedges, 1.0 - q_l, rng)?;
            let flipped = binomial(reports - wedges, q_l, rng)?;
            Ok((kept + flipped, reports))
        }
    }
}

fn binomial<R: Rng + ?Sized>(trials: usize, p: f64, rng: &mut R) -> Result<usize> {
    if trials == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(trials);
    }
    let dist = Binomial::new(trials as u64, p).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

/// Samples `t` disjoint pairs from a uniform permutation of `0..n`.
pub fn sample_disjoint_pairs<R: Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<PairPlan> {
    if t == 0 || 2 * t > n {
        return param(format!("pair count t must lie in [1, {}], got {t}", n / 2));
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    let pairs = sigma[..2 * t].chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(PairPlan { pairs })
}
