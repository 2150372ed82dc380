//! Repeated estimator runs, relative error and CSV output.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::estimators::{
    arr_triangle, clustering_coefficient_estimate, two_star_estimate, wshuffle_fourcycle_with,
    wshuffle_triangle_vr_with, wshuffle_triangle_with, Algorithm, EstimateRecord, RunOptions,
    VrParams, WedgeBudgets, DEFAULT_ETA_CLIP,
};
use crate::exact::{clustering_coefficient_exact, count_four_cycles, count_triangles, count_two_stars};
use crate::graph::{generate_ba, load_edge_list, Graph};
use crate::privacy::BudgetSplit;
use crate::rng::split_seed;
use crate::wedge::{PairBudgets, ReportMode};

/// Which side of `max`/`min` the relative-error floor sits on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Denominator {
    /// `max(true, n/1000)`.
    #[default]
    Max,
    /// `min(true, n/1000)`.
    LiteralMin,
}

/// `|true − estimate| / max(true, n/1000)`.
pub fn relative_error(true_count: f64, estimate: f64, n: usize) -> f64 {
    relative_error_with(true_count, estimate, n, Denominator::Max)
}

pub fn relative_error_with(true_count: f64, estimate: f64, n: usize, denom: Denominator) -> f64 {
    let eta = n as f64 / 1000.0;
    let d = match denom {
        Denominator::Max => true_count.max(eta),
        Denominator::LiteralMin => true_count.min(eta),
    };
    (true_count - estimate).abs() / d
}

/// Sample mean and standard error of the mean (sample sd with `n − 1`,
/// divided by `√n`). A single value has standard error 0.
pub fn mean_stderr(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return param("cannot summarize zero values");
    }
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    // shifted by the first value, so identical inputs give exactly 0
    let shifted = values.iter().map(|v| v - values[0]).sum::<f64>() / r;
    let var = values
        .iter()
        .map(|v| (v - values[0] - shifted).powi(2))
        .sum::<f64>()
        / (r - 1.0);
    Ok((mean, (var / r).sqrt()))
}

/// One repetition of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub rep: usize,
    pub seed: u64,
    pub estimate: f64,
    pub truth: f64,
    pub rel_err: f64,
    pub runtime_ms: f64,
    pub record: EstimateRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mean_rel_err: f64,
    pub stderr_rel_err: f64,
    pub mean_estimate: f64,
    pub stderr_estimate: f64,
    pub records: Vec<RepRecord>,
}

pub fn summarize(records: Vec<RepRecord>) -> Result<RunSummary> {
    let errs: Vec<f64> = records.iter().map(|r| r.rel_err).collect();
    let ests: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    let (mean_rel_err, stderr_rel_err) = mean_stderr(&errs)?;
    let (mean_estimate, stderr_estimate) = mean_stderr(&ests)?;
    Ok(RunSummary {
        mean_rel_err,
        stderr_rel_err,
        mean_estimate,
        stderr_estimate,
        records,
    })
}

/// Where the input graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Ba { n: usize, m: usize, seed: u64 },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::File(path) => {
                let f = std::fs::File::open(path)
                    .map_err(|e| Error::Parameter(format!("cannot open {}: {e}", path.display())))?;
                load_edge_list(std::io::BufReader::new(f))
            }
            GraphSource::Ba { n, m, seed } => generate_ba(*n, *m, *seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub delta: f64,
    /// Pair count; `⌊n/2⌋` when unset.
    pub t: Option<usize>,
    pub c: f64,
    /// ARR sampling probability; `n^{-1/3}` when unset.
    pub p0: Option<f64>,
    /// Share of `eps` spent on degrees in split algorithms.
    pub split_fraction: f64,
    pub eta_clip: f64,
    pub reps: usize,
    pub seed: u64,
    /// Sets the wedge RR budget directly instead of by amplification.
    pub eps_local: Option<f64>,
    /// Worker threads; rayon's default when unset.
    pub threads: Option<usize>,
    /// Write wall-clock runtimes to the CSV. Off keeps output reproducible.
    pub timing: bool,
    pub report_mode: ReportMode,
    pub denominator: Denominator,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, eps: f64) -> Self {
        Self {
            algorithm,
            eps,
            delta: 1e-8,
            t: None,
            c: 1.0,
            p0: None,
            split_fraction: 0.1,
            eta_clip: DEFAULT_ETA_CLIP,
            reps: 20,
            seed: 0,
            eps_local: None,
            threads: None,
            timing: false,
            report_mode: ReportMode::Aggregated,
            denominator: Denominator::Max,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return param("repetitions must be >= 1");
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return param(format!("eps must be > 0, got {}", self.eps));
        }
        if self.threads == Some(0) {
            return param("thread count must be >= 1");
        }
        Ok(())
    }

    pub fn t_for(&self, n: usize) -> usize {
        self.t.unwrap_or(n / 2)
    }

    pub fn p0_for(&self, n: usize) -> f64 {
        self.p0.unwrap_or_else(|| (n as f64).powf(-1.0 / 3.0))
    }

    fn split(&self) -> Result<BudgetSplit> {
        BudgetSplit::with_fraction(self.eps, self.split_fraction)
    }

    fn wedge_budgets(&self, eps_edge: f64) -> Result<WedgeBudgets> {
        Ok(match self.eps_local {
            Some(l) => WedgeBudgets::Direct(PairBudgets::new(eps_edge, l)?),
            None => WedgeBudgets::Shuffle {
                eps: eps_edge,
                delta: self.delta,
            },
        })
    }
}

/// Exact value the algorithm estimates.
pub fn ground_truth(g: &Graph, algorithm: Algorithm) -> Result<f64> {
    Ok(match algorithm {
        Algorithm::WShuffleTri | Algorithm::WShuffleTriVr | Algorithm::WLocalTri | Algorithm::ArrTri => {
            count_triangles(g)? as f64
        }
        Algorithm::WShuffleC4 | Algorithm::WLocalC4 => count_four_cycles(g)? as f64,
        Algorithm::TwoStar => count_two_stars(g)? as f64,
        Algorithm::Clustering => clustering_coefficient_exact(g)?,
    })
}

/// One estimator run for `cfg` with the given seed.
pub fn run_once(g: &Graph, cfg: &ExperimentConfig, seed: u64) -> Result<EstimateRecord> {
    let n = g.n();
    let opts = RunOptions {
        mode: cfg.report_mode,
    };
    let vr = || -> Result<VrParams> {
        let s = cfg.split()?;
        Ok(VrParams {
            eps1: s.eps1,
            eps2: s.eps2,
            c: cfg.c,
            t: cfg.t_for(n),
        })
    };
    match cfg.algorithm {
        Algorithm::WShuffleTri => wshuffle_triangle_with(g, cfg.wedge_budgets(cfg.eps)?, cfg.t_for(n), seed, opts),
        Algorithm::WShuffleTriVr => {
            let vr = vr()?;
            wshuffle_triangle_vr_with(g, vr, cfg.wedge_budgets(vr.eps2)?, seed, opts)
        }
        Algorithm::WLocalTri => {
            let b = WedgeBudgets::Direct(PairBudgets::new(cfg.eps, cfg.eps)?);
            let mut rec = wshuffle_triangle_with(g, b, cfg.t_for(n), seed, opts)?;
            rec.algorithm = Algorithm::WLocalTri;
            Ok(rec)
        }
        Algorithm::ArrTri => arr_triangle(g, cfg.eps, cfg.p0_for(n), seed),
        Algorithm::WShuffleC4 => wshuffle_fourcycle_with(g, cfg.wedge_budgets(cfg.eps)?, cfg.t_for(n), seed, opts),
        Algorithm::WLocalC4 => {
            let b = WedgeBudgets::Direct(PairBudgets::new(cfg.eps, cfg.eps)?);
            let mut rec = wshuffle_fourcycle_with(g, b, cfg.t_for(n), seed, opts)?;
            rec.algorithm = Algorithm::WLocalC4;
            Ok(rec)
        }
        Algorithm::TwoStar => {
            let s = cfg.split()?;
            two_star_estimate(g, s.eps1, s.eps2, cfg.eta_clip, seed)
        }
        Algorithm::Clustering => {
            let vr = vr()?;
            let tri = wshuffle_triangle_vr_with(g, vr, cfg.wedge_budgets(vr.eps2)?, split_seed(seed, 0), opts)?;
            let stars = two_star_estimate(g, vr.eps1, vr.eps2, cfg.eta_clip, split_seed(seed, 1))?;
            let mut ledger = tri.ledger.clone();
            ledger.record(stars.ledger.element_dp());
            Ok(EstimateRecord {
                algorithm: Algorithm::Clustering,
                estimate: clustering_coefficient_estimate(&tri, &stars)?,
                params: crate::estimators::EstimateParams {
                    seed,
                    eta_clip: Some(cfg.eta_clip),
                    ..tri.params
                },
                ledger,
                runtime_ms: tri.runtime_ms + stars.runtime_ms,
            })
        }
    }
}

/// Runs `cfg.reps` repetitions on `g`. Rep `r` uses seed
/// `split_seed(cfg.seed, r)`; results come back in rep order whatever the
/// thread count.
pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let truth = ground_truth(g, cfg.algorithm)?;
    let n = g.n();
    let body = || -> Result<Vec<RepRecord>> {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let seed = split_seed(cfg.seed, rep as u64);
                let start = Instant::now();
                let record = run_once(g, cfg, seed)?;
                let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                let rel_err = match cfg.algorithm {
                    Algorithm::Clustering => (truth - record.estimate).abs() / truth,
                    _ => relative_error_with(truth, record.estimate, n, cfg.denominator),
                };
                Ok(RepRecord {
                    rep,
                    seed,
                    estimate: record.estimate,
                    truth,
                    rel_err,
                    runtime_ms,
                    record,
                })
            })
            .collect()
    };
    let records = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot start thread pool: {e}")))?
            .install(body)?,
        None => body()?,
    };
    summarize(records)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    algo: &'a str,
    n: usize,
    eps: String,
    eps1: String,
    eps2: String,
    delta: String,
    t: String,
    c: String,
    p0: String,
    rep: String,
    seed: u64,
    estimate: f64,
    #[serde(rename = "true")]
    truth: f64,
    rel_err: f64,
    runtime_ms: String,
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one row per rep, then `mean` and `stderr` rows.
pub fn write_csv<W: Write>(summary: &RunSummary, n: usize, cfg: &ExperimentConfig, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Parameter(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let base = |rec: &EstimateRecord, rep: String, seed: u64| CsvRow {
        algo: cfg.algorithm.id(),
        n,
        eps: cfg.eps.to_string(),
        eps1: opt(rec.params.eps1),
        eps2: opt(rec.params.eps2),
        delta: opt(rec.params.delta),
        t: opt(rec.params.t),
        c: opt(rec.params.c),
        p0: opt(rec.params.p0),
        rep,
        seed,
        estimate: 0.0,
        truth: 0.0,
        rel_err: 0.0,
        runtime_ms: String::new(),
    };
    for r in &summary.records {
        w.serialize(CsvRow {
            estimate: r.estimate,
            truth: r.truth,
            rel_err: r.rel_err,
            runtime_ms: if cfg.timing { format!("{:.3}", r.runtime_ms) } else { String::new() },
            ..base(&r.record, r.rep.to_string(), r.seed)
        })
        .map_err(io)?;
    }
    let first = &summary.records[0];
    let mean_runtime = summary.records.iter().map(|r| r.runtime_ms).sum::<f64>() / summary.records.len() as f64;
    w.serialize(CsvRow {
        estimate: summary.mean_estimate,
        truth: first.truth,
        rel_err: summary.mean_rel_err,
        runtime_ms: if cfg.timing { format!("{mean_runtime:.3}") } else { String::new() },
        ..base(&first.record, "mean".into(), cfg.seed)
    })
    .map_err(io)?;
    w.serialize(CsvRow {
        estimate: summary.stderr_estimate,
        truth: first.truth,
        rel_err: summary.stderr_rel_err,
        ..base(&first.record, "stderr".into(), cfg.seed)
    })
    .map_err(io)?;
    w.flush().map_err(|e| Error::Parameter(format!("cannot write CSV: {e}")))?;
    Ok(())
}
