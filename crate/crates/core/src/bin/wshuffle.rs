use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use wshuffle::bounds;
use wshuffle::exact;
use wshuffle::graph::{self, Graph};
use wshuffle::harness::{self, Denominator, ExperimentConfig, GraphSource};
use wshuffle::privacy::{self, flip_probability};
use wshuffle::{Algorithm, ReportMode};

#[derive(Parser)]
#[command(name = "wshuffle", version, about = "Private triangle and 4-cycle counting with wedge shuffling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Barabasi-Albert graph.
    GenBa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep only edges between two random halves of the nodes.
    Bipartite {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Induced subgraph on a uniform random node subset.
    Subsample {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print node count, edge count and degree statistics.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact subgraph counts.
    Exact {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
        /// Restrict to one pair `I,J` (triangles or wedges through that pair).
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
    },
    /// Repeated private estimation, written as CSV.
    Run(RunArgs),
    /// Evaluate a closed-form bound.
    Bound(BoundArgs),
    /// Local RR budget reaching a central budget through shuffling.
    Budget {
        /// Number of shuffled reports.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1e-8)]
        delta: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Triangles,
    FourCycles,
    TwoStars,
    Clustering,
    Wedges,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "ba", required_unless_present = "ba")]
    graph: Option<PathBuf>,
    /// Generate the input instead: `N,M[,SEED]`.
    #[arg(long)]
    ba: Option<String>,
    #[arg(long)]
    algo: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1e-8)]
    delta: f64,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    p0: Option<f64>,
    /// Share of eps spent on degrees by two-stage algorithms.
    #[arg(long, default_value_t = 0.1)]
    split: f64,
    #[arg(long, default_value_t = 150.0)]
    eta_clip: f64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Set the wedge RR budget directly, skipping amplification.
    #[arg(long)]
    eps_local: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Fill the runtime_ms column (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    /// Randomize every wedge bit and shuffle, instead of sampling the count.
    #[arg(long)]
    simulate_shuffle: bool,
    /// Relative error over min(true, n/1000) instead of max.
    #[arg(long)]
    literal_min: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Amplification,
    Wsle,
    Triangle,
    TriangleVrBias,
    TriangleVrVar,
    FourCycle,
}

#[derive(clap::Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    kind: BoundKind,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long)]
    d_avg: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Edge flip probability; or give --eps.
    #[arg(long)]
    q: Option<f64>,
    /// Wedge flip probability; or give --eps-local.
    #[arg(long)]
    q_l: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_local: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// WSLE variance term of the VR variance bound; computed when omitted.
    #[arg(long)]
    err: Option<f64>,
    /// Use (sum of squared degrees)^2/9 from this graph as the first VR variance term.
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn load(path: &Path) -> Result<Graph> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(graph::load_edge_list(BufReader::new(f))?)
}

fn save(g: &Graph, path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(f);
    graph::write_edge_list(g, &mut w)?;
    w.flush()?;
    eprintln!("wrote {} nodes, {} edges to {}", g.n(), g.edge_count(), path.display());
    Ok(())
}

fn need(x: Option<f64>, flag: &str) -> Result<f64> {
    x.with_context(|| format!("--{flag} is required for this bound"))
}

fn flip(q: Option<f64>, eps: Option<f64>, name: &str, eps_name: &str) -> Result<f64> {
    match (q, eps) {
        (Some(q), _) => Ok(q),
        (None, Some(e)) => Ok(flip_probability(e)),
        (None, None) => bail!("give --{name} or --{eps_name}"),
    }
}

fn bound(a: &BoundArgs) -> Result<f64> {
    let q = || flip(a.q, a.eps, "q", "eps");
    let q_l = || flip(a.q_l, a.eps_local, "q-l", "eps-local");
    Ok(match a.kind {
        BoundKind::Amplification => privacy::amplification_epsilon_closed(
            need(a.n, "n")? as usize,
            need(a.eps_local, "eps-local")?,
            need(a.delta, "delta")?,
        )?,
        BoundKind::Wsle => bounds::err_wsle(need(a.n, "n")?, need(a.d_max, "d-max")?, q()?, q_l()?)?,
        BoundKind::Triangle => bounds::triangle_mse_bound(
            need(a.n, "n")?,
            need(a.d_max, "d-max")?,
            need(a.t, "t")?,
            q()?,
            q_l()?,
        )?,
        BoundKind::TriangleVrBias => bounds::vr_bias_bound(
            need(a.n, "n")?,
            need(a.d_avg, "d-avg")?,
            need(a.c, "c")?,
            need(a.alpha, "alpha")?,
            need(a.eps1, "eps1")?,
        )?,
        BoundKind::TriangleVrVar => {
            let d_max = need(a.d_max, "d-max")?;
            let err = match a.err {
                Some(e) => e,
                None => bounds::err_wsle(need(a.n, "n")?, d_max, q()?, q_l()?)?,
            };
            match &a.graph {
                Some(path) => {
                    let g = load(path)?;
                    bounds::vr_variance_bound_degree_sum(&g.degrees(), d_max, need(a.t, "t")?, need(a.alpha, "alpha")?, err)?
                }
                None => bounds::vr_variance_bound(need(a.n, "n")?, d_max, need(a.t, "t")?, need(a.alpha, "alpha")?, err)?,
            }
        }
        BoundKind::FourCycle => {
            bounds::fourcycle_mse_bound(need(a.n, "n")?, need(a.d_max, "d-max")?, need(a.t, "t")?, q_l()?)?
        }
    })
}

fn run(a: &RunArgs) -> Result<()> {
    let source = match (&a.graph, &a.ba) {
        (Some(p), _) => GraphSource::File(p.clone()),
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
            if !(2..=3).contains(&parts.len()) {
                bail!("--ba expects N,M[,SEED], got {spec:?}");
            }
            GraphSource::Ba {
                n: parts[0].parse()?,
                m: parts[1].parse()?,
                seed: parts.get(2).map_or(Ok(0), |s| s.parse())?,
            }
        }
        (None, None) => bail!("give --graph or --ba"),
    };
    let g = source.load()?;
    let cfg = ExperimentConfig {
        delta: a.delta,
        t: a.t,
        c: a.c,
        p0: a.p0,
        split_fraction: a.split,
        eta_clip: a.eta_clip,
        reps: a.reps,
        seed: a.seed,
        eps_local: a.eps_local,
        threads: a.threads,
        timing: a.timing,
        report_mode: if a.simulate_shuffle { ReportMode::Simulated } else { ReportMode::Aggregated },
        denominator: if a.literal_min { Denominator::LiteralMin } else { Denominator::Max },
        ..ExperimentConfig::new(a.algo.parse::<Algorithm>()?, a.eps)
    };
    let summary = harness::run_experiment(&g, &cfg)?;
    let f = File::create(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    harness::write_csv(&summary, g.n(), &cfg, BufWriter::new(f))?;
    eprintln!(
        "{}: mean rel_err {:.6} (stderr {:.6}) over {} reps",
        cfg.algorithm, summary.mean_rel_err, summary.stderr_rel_err, cfg.reps
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenBa { n, m, seed, out } => save(&graph::generate_ba(n, m, seed)?, &out)?,
        Command::Bipartite { graph, seed, out } => save(&graph::bipartite_split(&load(&graph)?, seed)?, &out)?,
        Command::Subsample { graph, n, seed, out } => save(&graph::subsample(&load(&graph)?, n, seed)?, &out)?,
        Command::Stats { graph } => {
            let g = load(&graph)?;
            let s = graph::degree_stats(&g)?;
            println!("nodes\t{}", g.n());
            println!("edges\t{}", g.edge_count());
            println!("d_avg\t{}", s.d_avg);
            println!("d_max\t{}", s.d_max);
        }
        Command::Exact { graph, metric, pair } => {
            let g = load(&graph)?;
            match (metric, pair) {
                (Metric::Triangles, Some((i, j))) => println!("{}", exact::triangles_involving_pair(&g, i, j)?),
                (Metric::Wedges, Some((i, j))) => println!("{}", exact::wedge_count_pair(&g, i, j)?),
                (Metric::Wedges, None) => bail!("--metric wedges needs --pair"),
                (_, Some(_)) => bail!("--pair applies to triangles and wedges only"),
                (Metric::Triangles, None) => println!("{}", exact::count_triangles(&g)?),
                (Metric::FourCycles, None) => println!("{}", exact::count_four_cycles(&g)?),
                (Metric::TwoStars, None) => println!("{}", exact::count_two_stars(&g)?),
                (Metric::Clustering, None) => println!("{}", exact::clustering_coefficient_exact(&g)?),
            }
        }
        Command::Run(args) => run(&args)?,
        Command::Bound(args) => println!("{:e}", bound(&args)?),
        Command::Budget { n, eps, delta } => {
            let b = privacy::local_privacy_budget(n, eps, delta)?;
            println!("eps_local\t{}", b.eps_local);
            println!("flip_probability\t{}", flip_probability(b.eps_local));
            println!("achieved_eps\t{}", b.achieved_eps);
            println!("clamped\t{}", b.clamped);
        }
    }
    Ok(())
}
