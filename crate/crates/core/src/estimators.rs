//! Whole-graph private estimators: wedge-shuffle triangle and 4-cycle
//! counting, their local-model variants, the ARR triangle baseline and the
//! 2-star / clustering-coefficient pipeline.
//!
//! Every run is a pure function of `(graph, parameters, seed)`. Pairs draw
//! from their own stream (see [`RunStreams`]) so per-pair work runs in
//! parallel without changing any output bit.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::exact::{choose2, count_triangles, TripleCensus};
use crate::graph::{Adjacency, Graph};
use crate::privacy::{
    flip_probability, local_privacy_budget, standard_laplace, BudgetSplit, DpGuarantee,
    PrivacyLedger, TrustModel,
};
use crate::rng::RunStreams;
use crate::wedge::{
    local_edges, sample_disjoint_pairs, shuffled_ones, wedge_estimate, wsle_estimate, PairBudgets,
    PairPlan, ReportMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    WShuffleTri,
    WShuffleTriVr,
    WLocalTri,
    ArrTri,
    WShuffleC4,
    WLocalC4,
    TwoStar,
    Clustering,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::WShuffleTri,
        Algorithm::WShuffleTriVr,
        Algorithm::WLocalTri,
        Algorithm::ArrTri,
        Algorithm::WShuffleC4,
        Algorithm::WLocalC4,
        Algorithm::TwoStar,
        Algorithm::Clustering,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::WShuffleTri => "wshuffle-tri",
            Algorithm::WShuffleTriVr => "wshuffle-tri-vr",
            Algorithm::WLocalTri => "wlocal-tri",
            Algorithm::ArrTri => "arr-tri",
            Algorithm::WShuffleC4 => "wshuffle-c4",
            Algorithm::WLocalC4 => "wlocal-c4",
            Algorithm::TwoStar => "two-star",
            Algorithm::Clustering => "clustering",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Parameters a run was executed with. Fields that do not apply are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateParams {
    pub eps: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub delta: Option<f64>,
    pub eps_local: Option<f64>,
    pub t: Option<usize>,
    pub c: Option<f64>,
    pub p0: Option<f64>,
    pub eta_clip: Option<f64>,
    pub seed: u64,
}

/// Output of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub algorithm: Algorithm,
    pub estimate: f64,
    pub params: EstimateParams,
    pub ledger: PrivacyLedger,
    pub runtime_ms: f64,
}

/// How a wedge-based estimator sets its RR budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WedgeBudgets {
    /// Shuffle model: `ε_L` from inverting the amplification bound for the
    /// `n − 2` shuffled reports of each pair.
    Shuffle { eps: f64, delta: f64 },
    /// Budgets set directly. Only local-model guarantees are recorded.
    Direct(PairBudgets),
}

struct Resolved {
    budgets: PairBudgets,
    ledger: PrivacyLedger,
    delta: Option<f64>,
}

impl WedgeBudgets {
    fn resolve(&self, n: usize) -> Result<Resolved> {
        match *self {
            WedgeBudgets::Shuffle { eps, delta } => {
                if n < 3 {
                    return param(format!("wedge shuffling needs n >= 3, got {n}"));
                }
                let local = local_privacy_budget(n - 2, eps, delta)?;
                let mut ledger = PrivacyLedger::new(TrustModel::Shuffle);
                ledger.clamped = local.clamped;
                ledger.record(DpGuarantee::new(eps, delta));
                Ok(Resolved {
                    budgets: PairBudgets::new(eps, local.eps_local)?,
                    ledger,
                    delta: Some(delta),
                })
            }
            WedgeBudgets::Direct(b) => {
                let mut ledger = PrivacyLedger::new(TrustModel::Local);
                ledger.record(DpGuarantee::pure(b.eps_edge.max(b.eps_local)));
                Ok(Resolved {
                    budgets: b,
                    ledger,
                    delta: None,
                })
            }
        }
    }
}

/// Knobs that change cost but not the estimator's distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: ReportMode,
}

fn check_t(n: usize, t: usize) -> Result<()> {
    if t == 0 || 2 * t > n {
        return param(format!("pair count t must lie in [1, {}], got {t}", n / 2));
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Per-pair WSLE estimates, in plan order.
fn wsle_per_pair(
    g: &Graph,
    plan: &PairPlan,
    budgets: PairBudgets,
    streams: &RunStreams,
    opts: RunOptions,
    include: impl Fn(usize) -> bool + Sync,
) -> Result<Vec<f64>> {
    plan.pairs
        .par_iter()
        .with_min_len(32)
        .enumerate()
        .map(|(idx, &pair)| {
            if !include(idx) {
                return Ok(0.0);
            }
            let mut rng = streams.pair(idx);
            let (ones, reports) = shuffled_ones(g, budgets.eps_local, pair, opts.mode, &mut rng)?;
            let edges = local_edges(g, budgets.eps_edge, pair, &mut rng)?;
            Ok(wsle_estimate(ones, reports, edges, budgets))
        })
        .collect()
}

/// `n(n − 1) · sum / (k t)`. Multiplying before dividing keeps integer
/// inputs exact.
fn scaled(n: usize, t: usize, k: f64, sum: f64) -> f64 {
    n as f64 * (n as f64 - 1.0) * sum / (k * t as f64)
}

/// Triangle estimate from `t` disjoint pairs, each run through WSLE.
pub fn wshuffle_triangle_with(
    g: &Graph,
    budgets: WedgeBudgets,
    t: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<EstimateRecord> {
    let start = Instant::now();
    let n = g.n();
    check_t(n, t)?;
    let resolved = budgets.resolve(n)?;
    let streams = RunStreams::new(seed);
    let plan = sample_disjoint_pairs(n, t, &mut streams.pair_plan())?;
    let per_pair = wsle_per_pair(g, &plan, resolved.budgets, &streams, opts, |_| true)?;
    let estimate = scaled(n, t, 6.0, per_pair.iter().sum());
    Ok(EstimateRecord {
        algorithm: Algorithm::WShuffleTri,
        estimate,
        params: EstimateParams {
            eps: Some(resolved.budgets.eps_edge),
            delta: resolved.delta,
            eps_local: Some(resolved.budgets.eps_local),
            t: Some(t),
            seed,
            ..Default::default()
        },
        ledger: resolved.ledger,
        runtime_ms: elapsed_ms(start),
    })
}

/// Shuffle-model triangle counting with `(ε, δ)`-element DP.
pub fn wshuffle_triangle(g: &Graph, eps: f64, delta: f64, t: usize, seed: u64) -> Result<EstimateRecord> {
    wshuffle_triangle_with(g, WedgeBudgets::Shuffle { eps, delta }, t, seed, RunOptions::default())
}

/// Local-model variant: wedges are not shuffled, `ε_L = ε`.
pub fn wlocal_triangle(g: &Graph, eps: f64, t: usize, seed: u64) -> Result<EstimateRecord> {
    let b = PairBudgets::new(eps, eps)?;
    let mut rec = wshuffle_triangle_with(g, WedgeBudgets::Direct(b), t, seed, RunOptions::default())?;
    rec.algorithm = Algorithm::WLocalTri;
    Ok(rec)
}

/// Parameters of the variance-reduced triangle estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VrParams {
    /// Budget of the noisy degrees; `∞` releases exact degrees.
    pub eps1: f64,
    /// Budget of the WSLE step.
    pub eps2: f64,
    /// Threshold multiplier on the noisy average degree.
    pub c: f64,
    pub t: usize,
}

impl VrParams {
    /// Default 1:9 split of `eps`.
    pub fn with_default_split(eps: f64, c: f64, t: usize) -> Result<Self> {
        let split = BudgetSplit::default_for(eps)?;
        Ok(Self {
            eps1: split.eps1,
            eps2: split.eps2,
            c,
            t,
        })
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.eps1.is_nan() || self.eps1 <= 0.0 || self.eps2.is_nan() || self.eps2 <= 0.0 {
            return param(format!(
                "VR budgets must be > 0, got ({}, {})",
                self.eps1, self.eps2
            ));
        }
        if self.c.is_nan() || self.c < 0.0 {
            return param(format!("threshold multiplier c must be >= 0, got {}", self.c));
        }
        check_t(n, self.t)
    }
}

/// `d_i + Lap(1/eps)` for every user, drawn in user order.
fn noisy_degrees<R: Rng + ?Sized>(g: &Graph, eps: f64, rng: &mut R) -> Vec<f64> {
    (0..g.n())
        .map(|u| {
            let d = g.degree(u) as f64;
            if eps.is_infinite() {
                d
            } else {
                d + standard_laplace(rng) / eps
            }
        })
        .collect()
}

/// Variance-reduced triangle estimator. Pairs whose smaller noisy degree is
/// at most `c · d̃_avg` are dropped from the sum.
///
/// `wedge` must carry the `ε₂` part: `Shuffle { eps: vr.eps2, .. }` or a
/// direct override. Negative noisy degrees are used as released.
pub fn wshuffle_triangle_vr_with(
    g: &Graph,
    vr: VrParams,
    wedge: WedgeBudgets,
    seed: u64,
    opts: RunOptions,
) -> Result<EstimateRecord> {
    let start = Instant::now();
    let n = g.n();
    vr.validate(n)?;
    let mut resolved = wedge.resolve(n)?;
    let streams = RunStreams::new(seed);
    let plan = sample_disjoint_pairs(n, vr.t, &mut streams.pair_plan())?;

    let noisy = noisy_degrees(g, vr.eps1, &mut streams.users());
    let d_avg = noisy.iter().sum::<f64>() / n as f64;
    let threshold = vr.c * d_avg;
    let keep: Vec<bool> = plan
        .pairs
        .iter()
        .map(|&(i, j)| noisy[i].min(noisy[j]) > threshold)
        .collect();

    // Dropped pairs still report; their values never enter the sum, and each
    // pair has its own stream, so skipping them leaves the output unchanged.
    let per_pair = wsle_per_pair(g, &plan, resolved.budgets, &streams, opts, |idx| keep[idx])?;
    let sum: f64 = per_pair
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(v, _)| v)
        .sum();

    resolved.ledger.record(DpGuarantee::pure(vr.eps1));
    Ok(EstimateRecord {
        algorithm: Algorithm::WShuffleTriVr,
        estimate: scaled(n, vr.t, 6.0, sum),
        params: EstimateParams {
            eps: Some(vr.eps1 + vr.eps2),
            eps1: Some(vr.eps1),
            eps2: Some(vr.eps2),
            delta: resolved.delta,
            eps_local: Some(resolved.budgets.eps_local),
            t: Some(vr.t),
            c: Some(vr.c),
            seed,
            ..Default::default()
        },
        ledger: resolved.ledger,
        runtime_ms: elapsed_ms(start),
    })
}

/// Shuffle-model variance-reduced triangle counting with
/// `(ε₁ + ε₂, δ)`-element DP.
pub fn wshuffle_triangle_vr(g: &Graph, vr: VrParams, delta: f64, seed: u64) -> Result<EstimateRecord> {
    wshuffle_triangle_vr_with(
        g,
        vr,
        WedgeBudgets::Shuffle {
            eps: vr.eps2,
            delta,
        },
        seed,
        RunOptions::default(),
    )
}

/// Additive bias correction of `C(f̂∧, 2)` for `reports` wedge bits.
pub fn four_cycle_correction(reports: usize, q_l: f64) -> f64 {
    reports as f64 / 2.0 * q_l * (1.0 - q_l) / (1.0 - 2.0 * q_l).powi(2)
}

/// Unbiased 4-cycle estimate for one pair from its shuffled wedge bits.
pub fn four_cycle_pair_estimate(ones: usize, reports: usize, q_l: f64) -> f64 {
    let wedges = wedge_estimate(ones, reports, q_l);
    (wedges * wedges - wedges) / 2.0 - four_cycle_correction(reports, q_l)
}

/// 4-cycle estimate from `t` disjoint pairs. Only the wedge budget is used.
pub fn wshuffle_fourcycle_with(
    g: &Graph,
    budgets: WedgeBudgets,
    t: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<EstimateRecord> {
    let start = Instant::now();
    let n = g.n();
    check_t(n, t)?;
    let (eps_local, ledger, delta, eps) = match budgets {
        WedgeBudgets::Shuffle { eps, delta } => {
            let r = budgets.resolve(n)?;
            (r.budgets.eps_local, r.ledger, Some(delta), eps)
        }
        WedgeBudgets::Direct(b) => {
            let mut ledger = PrivacyLedger::new(TrustModel::Local);
            ledger.record(DpGuarantee::pure(b.eps_local));
            (b.eps_local, ledger, None, b.eps_local)
        }
    };
    let q_l = flip_probability(eps_local);
    let streams = RunStreams::new(seed);
    let plan = sample_disjoint_pairs(n, t, &mut streams.pair_plan())?;
    let per_pair: Vec<f64> = plan
        .pairs
        .par_iter()
        .with_min_len(32)
        .enumerate()
        .map(|(idx, &pair)| {
            let (ones, reports) = shuffled_ones(g, eps_local, pair, opts.mode, &mut streams.pair(idx))?;
            Ok(four_cycle_pair_estimate(ones, reports, q_l))
        })
        .collect::<Result<_>>()?;
    Ok(EstimateRecord {
        algorithm: Algorithm::WShuffleC4,
        estimate: scaled(n, t, 4.0, per_pair.iter().sum()),
        params: EstimateParams {
            eps: Some(eps),
            delta,
            eps_local: Some(eps_local),
            t: Some(t),
            seed,
            ..Default::default()
        },
        ledger,
        runtime_ms: elapsed_ms(start),
    })
}

pub fn wshuffle_fourcycle(g: &Graph, eps: f64, delta: f64, t: usize, seed: u64) -> Result<EstimateRecord> {
    wshuffle_fourcycle_with(g, WedgeBudgets::Shuffle { eps, delta }, t, seed, RunOptions::default())
}

/// Local-model 4-cycle counting: wedges are not shuffled, `ε_L = ε`.
pub fn wlocal_fourcycle(g: &Graph, eps: f64, t: usize, seed: u64) -> Result<EstimateRecord> {
    let b = PairBudgets::new(eps, eps)?;
    let mut rec = wshuffle_fourcycle_with(g, WedgeBudgets::Direct(b), t, seed, RunOptions::default())?;
    rec.algorithm = Algorithm::WLocalC4;
    Ok(rec)
}

/// Noisy graph `G*` released by asymmetric RR on the lower triangle of `A`:
/// an edge survives with probability `μ`, a non-edge becomes an edge with
/// probability `μ e^{−ε}`, where `μ = p0 · e^ε/(e^ε + 1)`.
pub fn arr_noisy_graph<R: Rng + ?Sized>(g: &Graph, eps: f64, p0: f64, rng: &mut R) -> Result<Graph> {
    let mu = p0 * (1.0 - flip_probability(eps));
    let p_non = p0 * flip_probability(eps);
    let log_stay = (-p_non).ln_1p();
    let mut edges = Vec::new();
    for i in 0..g.n() {
        let lower = g.neighbors(i);
        let lower = &lower[..lower.partition_point(|&v| (v as usize) < i)];
        for &j in lower {
            if rng.random_bool(mu) {
                edges.push((i, j as usize));
            }
        }
        if p_non <= 0.0 {
            continue;
        }
        // Geometric skips select each position in 0..i independently with
        // probability p_non; positions holding real edges were drawn above.
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.sample(rand::distr::Open01);
            let skip = (u.ln() / log_stay).floor();
            if skip >= (i - pos) as f64 {
                break;
            }
            pos += skip as usize;
            if lower.binary_search(&(pos as u32)).is_err() {
                edges.push((i, pos));
            }
            pos += 1;
        }
    }
    Graph::from_edges(g.n(), edges)
}

/// Triangle estimate from the triple census of an ARR-noised graph.
pub fn arr_triangle_estimate(census: &TripleCensus, n: usize, eps: f64, p0: f64) -> f64 {
    let m3 = census.m3 as f64 / p0.powi(3);
    let m2 = census.m2 as f64 / p0.powi(2) - 3.0 * (1.0 - p0) * m3;
    let m1 = census.m1 as f64 / p0 - 3.0 * (1.0 - p0).powi(2) * m3 - 2.0 * (1.0 - p0) * m2;
    let m0 = crate::exact::choose3(n as u64) as f64 - m3 - m2 - m1;
    let e = eps.exp();
    (e.powi(3) * m3 - e.powi(2) * m2 + e * m1 - m0) / (e - 1.0).powi(3)
}

/// One-round local triangle baseline with asymmetric RR (ε-edge LDP).
pub fn arr_triangle(g: &Graph, eps: f64, p0: f64, seed: u64) -> Result<EstimateRecord> {
    let start = Instant::now();
    if !(p0 > 0.0 && p0 <= 1.0) {
        return param(format!("sampling probability p0 must lie in (0, 1], got {p0}"));
    }
    if eps.is_nan() || eps < 0.0 {
        return param(format!("budget must be > 0, got {eps}"));
    }
    if eps == 0.0 {
        return Err(Error::Undefined("ARR estimator divides by (e^ε − 1)^3 = 0".into()));
    }
    if g.n() < 3 {
        return param("ARR triangle estimation needs n >= 3");
    }
    let noisy = arr_noisy_graph(g, eps, p0, &mut RunStreams::new(seed).users())?;
    let two_stars: u128 = noisy.degrees().into_iter().map(|d| choose2(d as u64)).sum();
    let census = TripleCensus::from_counts(
        noisy.n() as u64,
        noisy.edge_count() as u64,
        two_stars,
        count_triangles(&noisy)?,
    )?;
    let mut ledger = PrivacyLedger::lower_triangle(TrustModel::Local);
    ledger.record(DpGuarantee::pure(eps));
    Ok(EstimateRecord {
        algorithm: Algorithm::ArrTri,
        estimate: arr_triangle_estimate(&census, g.n(), eps, p0),
        params: EstimateParams {
            eps: Some(eps),
            p0: Some(p0),
            seed,
            ..Default::default()
        },
        ledger,
        runtime_ms: elapsed_ms(start),
    })
}

/// The RR triangle baseline: ARR without edge sampling.
pub fn rr_triangle(g: &Graph, eps: f64, seed: u64) -> Result<EstimateRecord> {
    arr_triangle(g, eps, 1.0, seed)
}

/// Default clipping slack added to noisy degrees in the 2-star estimator.
pub const DEFAULT_ETA_CLIP: f64 = 150.0;

/// One-round local 2-star counting with edge clipping.
///
/// User `i` releases `d̃_i = d_i + Lap(1/ε₁) + η`, clips its list to
/// `⌊d̃_i⌋` neighbors when `d̃_i < d_i`, and releases
/// `r_i + Lap(d̃_i/ε₂)` for its clipped 2-star count `r_i`. A noisy degree
/// at or below zero clips the list to nothing, leaving a count with zero
/// sensitivity, so no noise is added to it.
pub fn two_star_estimate(g: &Graph, eps1: f64, eps2: f64, eta_clip: f64, seed: u64) -> Result<EstimateRecord> {
    let start = Instant::now();
    if eps1.is_nan() || eps1 <= 0.0 || eps2.is_nan() || eps2 <= 0.0 {
        return param(format!("2-star budgets must be > 0, got ({eps1}, {eps2})"));
    }
    if eta_clip.is_nan() || eta_clip < 0.0 {
        return param(format!("clipping slack must be >= 0, got {eta_clip}"));
    }
    let mut rng = RunStreams::new(seed).users();
    let mut total = 0.0;
    for u in 0..g.n() {
        let d = g.degree(u) as f64;
        let noise = if eps1.is_infinite() { 0.0 } else { standard_laplace(&mut rng) / eps1 };
        let noisy_degree = d + noise + eta_clip;
        // which neighbors are removed does not change the 2-star count
        let kept = if noisy_degree < d {
            noisy_degree.floor().max(0.0)
        } else {
            d
        };
        let stars = kept * (kept - 1.0) / 2.0;
        let scale = noisy_degree.max(0.0) / eps2;
        let noise = if scale > 0.0 { scale * standard_laplace(&mut rng) } else { 0.0 };
        total += stars + noise;
    }
    let mut ledger = PrivacyLedger::new(TrustModel::Local);
    ledger.record(DpGuarantee::pure(eps1)).record(DpGuarantee::pure(eps2));
    Ok(EstimateRecord {
        algorithm: Algorithm::TwoStar,
        estimate: total,
        params: EstimateParams {
            eps: Some(eps1 + eps2),
            eps1: Some(eps1),
            eps2: Some(eps2),
            eta_clip: Some(eta_clip),
            seed,
            ..Default::default()
        },
        ledger,
        runtime_ms: elapsed_ms(start),
    })
}

/// Clustering coefficient `3 f̂△ / f̂²*` from two estimates.
pub fn clustering_coefficient_estimate(tri: &EstimateRecord, twostar: &EstimateRecord) -> Result<f64> {
    if twostar.estimate == 0.0 {
        return Err(Error::Undefined("2-star estimate is zero".into()));
    }
    Ok(3.0 * tri.estimate / twostar.estimate)
}
