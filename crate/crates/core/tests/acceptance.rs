//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wshuffle::bounds::{err_wsle, fourcycle_mse_bound, measure_tail, triangle_mse_bound, vr_bias_bound};
use wshuffle::estimators::{
    arr_triangle, four_cycle_pair_estimate, wshuffle_fourcycle, wshuffle_fourcycle_with,
    wshuffle_triangle_vr, wshuffle_triangle_vr_with, wshuffle_triangle_with, RunOptions,
    VrParams, WedgeBudgets,
};
use wshuffle::exact::{count_four_cycles, count_triangles, triangles_involving_pair, triple_census};
use wshuffle::graph::{generate_ba, Graph};
use wshuffle::harness::{mean_stderr, relative_error};
use wshuffle::privacy::{amplification_epsilon_closed, flip_probability, local_privacy_budget, warner_rr};
use wshuffle::wedge::{wsle_with_budgets, PairBudgets, ReportMode};
use wshuffle::{Adjacency, Algorithm};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Mean, standard error, sample variance, and the standard error of that
/// variance.
fn moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let (mean, se) = mean_stderr(xs).unwrap();
    let r = xs.len() as f64;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = sq.iter().sum::<f64>() / (r - 1.0);
    let (_, var_se) = mean_stderr(&sq).unwrap();
    (mean, se, var, var_se)
}

/// Mean squared error around `truth` and its standard error.
fn mse(xs: &[f64], truth: f64) -> (f64, f64) {
    let sq: Vec<f64> = xs.iter().map(|x| (x - truth).powi(2)).collect();
    mean_stderr(&sq).unwrap()
}

fn unbiased(name: &str, xs: &[f64], truth: f64) -> (bool, String) {
    let (mean, se, _, _) = moments(xs);
    let z = (mean - truth) / se;
    (z.abs() <= 4.0, format!("{name}: mean {mean:.4} vs {truth} (z = {z:.2})"))
}

fn c1() -> Outcome {
    let start = Instant::now();
    let b = local_privacy_budget(100_000, 1.0, 1e-8).unwrap();
    let q = flip_probability(b.eps_local);
    let fast = start.elapsed() < Duration::from_secs(1);
    outcome(
        (b.eps_local - 5.44).abs() <= 0.02 && (q - 0.0043).abs() <= 0.0001 && fast,
        format!("eps_L = {:.5}, flip = {:.6}", b.eps_local, q),
    )
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut unclamped) = (0.0f64, 0);
    for _ in 0..50 {
        let n = 10f64.powf(rng.random_range(3.0..7.0)) as usize;
        let eps = rng.random_range(0.05..3.0);
        let delta = 10f64.powf(rng.random_range(-12.0..-4.0));
        let Ok(b) = local_privacy_budget(n, eps, delta) else { continue };
        if b.clamped {
            continue;
        }
        unclamped += 1;
        let back = amplification_epsilon_closed(n, b.eps_local, delta).unwrap();
        worst = worst.max((back - eps).abs());
    }
    let fast = start.elapsed() < Duration::from_secs(5);
    outcome(
        worst <= 1e-6 && unclamped > 0 && fast,
        format!("{unclamped}/50 unclamped, max |round trip - eps| = {worst:.2e}"),
    )
}

fn c3() -> Outcome {
    let start = Instant::now();
    let draws = 1_000_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let q = flip_probability(eps);
        let flips = (0..draws)
            .filter(|k| warner_rr(k % 2 == 0, eps, &mut rng).unwrap() != (k % 2 == 0))
            .count() as f64;
        let rate = flips / draws as f64;
        let sigma = (q * (1.0 - q) / draws as f64).sqrt();
        let z = (rate - q) / sigma;
        pass &= z.abs() <= 4.0;
        parts.push(format!("eps {eps}: z = {z:.2}"));
    }
    pass &= start.elapsed() < Duration::from_secs(10);
    outcome(pass, parts.join(", "))
}

fn brute_triangles(g: &Graph) -> u64 {
    let n = g.n();
    let mut c = 0;
    for a in 0..n {
        for b in a + 1..n {
            for d in b + 1..n {
                if g.is_edge(a, b) && g.is_edge(b, d) && g.is_edge(a, d) {
                    c += 1;
                }
            }
        }
    }
    c
}

fn brute_four_cycles(g: &Graph) -> u64 {
    let n = g.n();
    let e = |x, y| g.is_edge(x, y);
    let mut c = 0;
    for a in 0..n {
        for b in a + 1..n {
            for x in b + 1..n {
                for y in x + 1..n {
                    // the three distinct cycles on {a, b, x, y}
                    c += (e(a, b) && e(b, x) && e(x, y) && e(y, a)) as u64;
                    c += (e(a, b) && e(b, y) && e(y, x) && e(x, a)) as u64;
                    c += (e(a, x) && e(x, b) && e(b, y) && e(y, a)) as u64;
                }
            }
        }
    }
    c
}

fn brute_census(g: &Graph) -> [u64; 4] {
    let n = g.n();
    let mut m = [0u64; 4];
    for a in 0..n {
        for b in a + 1..n {
            for d in b + 1..n {
                let k = g.is_edge(a, b) as usize + g.is_edge(b, d) as usize + g.is_edge(a, d) as usize;
                m[k] += 1;
            }
        }
    }
    m
}

fn c4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for k in 0..50u64 {
        let n = rng.random_range(3..=25);
        let p = rng.random_range(0.05..0.9);
        let g = Graph::erdos_renyi(n, p, 1000 + k);
        let census = triple_census(&g).unwrap();
        let ok = count_triangles(&g).unwrap() == brute_triangles(&g)
            && count_four_cycles(&g).unwrap() == brute_four_cycles(&g)
            && [census.m0, census.m1, census.m2, census.m3] == brute_census(&g);
        bad += (!ok) as usize;
    }
    outcome(
        bad == 0 && start.elapsed() < Duration::from_secs(30),
        format!("{bad} mismatches on 50 graphs"),
    )
}

fn runs(r: u64, f: impl Fn(u64) -> f64) -> Vec<f64> {
    (0..r).map(f).collect()
}

struct McData {
    wsle: Vec<f64>,
    wsle_truth: f64,
    tri_shuffle: Vec<f64>,
    tri_local: Vec<f64>,
    c4_shuffle: Vec<f64>,
    c4_local: Vec<f64>,
    arr: Vec<f64>,
    g: Graph,
    arr_graph: Graph,
}

const R: u64 = 20_000;
const T: usize = 20;

fn shuffle_budgets() -> PairBudgets {
    PairBudgets::new(1.0, 3.0).unwrap()
}

fn local_budgets() -> PairBudgets {
    PairBudgets::new(1.0, 1.0).unwrap()
}

fn mc_data() -> McData {
    let g = Graph::erdos_renyi(40, 0.3, 7);
    let arr_graph = Graph::erdos_renyi(25, 0.3, 7);
    let sim = RunOptions {
        mode: ReportMode::Simulated,
    };
    let pair = (0, 1);
    let wsle = runs(R, |s| {
        wsle_with_budgets(&g, shuffle_budgets(), pair, &mut ChaCha8Rng::seed_from_u64(s)).unwrap()
    });
    let tri = |b: PairBudgets| {
        runs(R, |s| {
            wshuffle_triangle_with(&g, WedgeBudgets::Direct(b), T, s, sim).unwrap().estimate
        })
    };
    let c4 = |b: PairBudgets| {
        runs(R, |s| {
            wshuffle_fourcycle_with(&g, WedgeBudgets::Direct(b), T, s, sim).unwrap().estimate
        })
    };
    McData {
        wsle,
        wsle_truth: triangles_involving_pair(&g, pair.0, pair.1).unwrap() as f64,
        tri_shuffle: tri(shuffle_budgets()),
        tri_local: tri(local_budgets()),
        c4_shuffle: c4(shuffle_budgets()),
        c4_local: c4(local_budgets()),
        arr: runs(50_000, |s| arr_triangle(&arr_graph, 2.0, 0.5, s).unwrap().estimate),
        g,
        arr_graph,
    }
}

fn c5(d: &McData) -> Outcome {
    let tri = count_triangles(&d.g).unwrap() as f64;
    let c4 = count_four_cycles(&d.g).unwrap() as f64;
    let checks = [
        unbiased("WSLE", &d.wsle, d.wsle_truth),
        unbiased("WShuffle-tri", &d.tri_shuffle, tri),
        unbiased("WLocal-tri", &d.tri_local, tri),
        unbiased("WShuffle-c4", &d.c4_shuffle, c4),
        unbiased("WLocal-c4", &d.c4_local, c4),
        unbiased("ARR-tri", &d.arr, count_triangles(&d.arr_graph).unwrap() as f64),
    ];
    outcome(
        checks.iter().all(|c| c.0),
        checks.iter().map(|c| c.1.as_str()).collect::<Vec<_>>().join("; "),
    )
}

fn c6(d: &McData) -> Outcome {
    let n = d.g.n() as f64;
    let d_max = d.g.degrees().into_iter().max().unwrap() as f64;
    let tri = count_triangles(&d.g).unwrap() as f64;
    let c4 = count_four_cycles(&d.g).unwrap() as f64;
    let t = T as f64;
    let mut rows = Vec::new();
    let (_, _, var, var_se) = moments(&d.wsle);
    let b = shuffle_budgets();
    rows.push(("WSLE var", var, var_se, err_wsle(n, d_max, b.q(), b.q_l()).unwrap()));
    for (name, xs, b) in [
        ("WShuffle-tri MSE", &d.tri_shuffle, shuffle_budgets()),
        ("WLocal-tri MSE", &d.tri_local, local_budgets()),
    ] {
        let (m, se) = mse(xs, tri);
        rows.push((name, m, se, triangle_mse_bound(n, d_max, t, b.q(), b.q_l()).unwrap()));
    }
    for (name, xs, b) in [
        ("WShuffle-c4 MSE", &d.c4_shuffle, shuffle_budgets()),
        ("WLocal-c4 MSE", &d.c4_local, local_budgets()),
    ] {
        let (m, se) = mse(xs, c4);
        rows.push((name, m, se, fourcycle_mse_bound(n, d_max, t, b.q_l()).unwrap()));
    }
    outcome(
        rows.iter().all(|&(_, v, se, bound)| v <= bound + 4.0 * se),
        rows.iter()
            .map(|(name, v, _, bound)| format!("{name} {v:.4e} <= {bound:.4e}"))
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn c7() -> Outcome {
    let start = Instant::now();
    let g = generate_ba(2000, 20, 1).unwrap();
    let truth = count_triangles(&g).unwrap() as f64;
    let vr = VrParams {
        eps1: 0.1,
        eps2: 1.0,
        c: 1.0,
        t: 1000,
    };
    let lambda = vr.c;
    let alpha = measure_tail(&g, lambda).unwrap();
    let d_avg = 2.0 * g.edge_count() as f64 / g.n() as f64;
    let bound = vr_bias_bound(g.n() as f64, d_avg, vr.c, alpha, vr.eps1).unwrap();
    let hook = WedgeBudgets::Direct(PairBudgets::noiseless());
    let xs = runs(10_000, |s| {
        wshuffle_triangle_vr_with(&g, vr, hook, s, RunOptions::default()).unwrap().estimate
    });
    let (mean, se, _, _) = moments(&xs);
    let bias = (mean - truth).abs();
    outcome(
        bias <= bound && start.elapsed() < Duration::from_secs(120),
        format!("|mean - f| = {bias:.1} (se {se:.1}) <= {bound:.4e} at lambda = {lambda}, alpha = {alpha:.4}"),
    )
}

fn c8() -> Outcome {
    let start = Instant::now();
    let noiseless = WedgeBudgets::Direct(PairBudgets::noiseless());
    let mut exact = true;
    for n in 4..=12usize {
        let g = Graph::complete(n);
        let expected = (n * (n - 1) * (n - 2) / 6) as f64;
        for t in 1..=n / 2 {
            for seed in 0..20 {
                let e = wshuffle_triangle_with(&g, noiseless, t, seed, RunOptions::default())
                    .unwrap()
                    .estimate;
                exact &= e == expected;
            }
        }
    }
    // The three pair-partitions of K_{2,2} (sides {0,1} and {2,3}).
    let k22 = Graph::complete_bipartite(2, 2);
    let partitions = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut values: Vec<f64> = partitions
        .iter()
        .map(|plan| {
            1.5 * plan
                .iter()
                .map(|&(i, j)| four_cycle_pair_estimate(k22.wedge_count(i, j), 2, 0.0))
                .sum::<f64>()
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let expectation = values.iter().sum::<f64>() / 3.0;
    let mut runs_ok = true;
    for seed in 0..300 {
        let e = wshuffle_fourcycle_with(&k22, noiseless, 2, seed, RunOptions::default())
            .unwrap()
            .estimate;
        runs_ok &= e == 0.0 || e == 3.0;
    }
    outcome(
        exact && values == [0.0, 0.0, 3.0] && expectation == 1.0 && runs_ok && start.elapsed() < Duration::from_secs(1),
        format!("K_n exact: {exact}; K22 partitions {values:?}, expectation {expectation}"),
    )
}

fn c9() -> Outcome {
    let start = Instant::now();
    let g = generate_ba(5000, 20, 9).unwrap();
    let n = g.n();
    let tri = count_triangles(&g).unwrap() as f64;
    let c4 = count_four_cycles(&g).unwrap() as f64;
    let t = n / 2;
    let reps = 20u64;
    let re = |truth: f64, f: &dyn Fn(u64) -> f64| -> (f64, f64) {
        let xs: Vec<f64> = (0..reps).map(|s| relative_error(truth, f(s), n)).collect();
        mean_stderr(&xs).unwrap()
    };
    let vr = VrParams::with_default_split(1.0, 1.0, t).unwrap();
    let tri_vr = re(tri, &|s| wshuffle_triangle_vr(&g, vr, 1e-8, s).unwrap().estimate);
    let tri_local = re(tri, &|s| wshuffle::estimators::wlocal_triangle(&g, 1.0, t, s).unwrap().estimate);
    let c4_shuffle = re(c4, &|s| wshuffle_fourcycle(&g, 1.0, 1e-8, t, s).unwrap().estimate);
    let c4_local = re(c4, &|s| wshuffle::estimators::wlocal_fourcycle(&g, 1.0, t, s).unwrap().estimate);
    let separated = |a: (f64, f64), b: (f64, f64)| b.0 - a.0 >= 3.0 * (a.1 * a.1 + b.1 * b.1).sqrt();
    outcome(
        separated(tri_vr, tri_local) && separated(c4_shuffle, c4_local) && start.elapsed() < Duration::from_secs(600),
        format!(
            "RE {} {:.4}±{:.4} vs {} {:.4}±{:.4}; {} {:.4}±{:.4} vs {} {:.4}±{:.4}",
            Algorithm::WShuffleTriVr,
            tri_vr.0,
            tri_vr.1,
            Algorithm::WLocalTri,
            tri_local.0,
            tri_local.1,
            Algorithm::WShuffleC4,
            c4_shuffle.0,
            c4_shuffle.1,
            Algorithm::WLocalC4,
            c4_local.0,
            c4_local.1
        ),
    )
}

fn c10() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_wshuffle");
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("ba.txt");
    let status = Command::new(bin)
        .args(["gen-ba", "--n", "3000", "--m", "10", "--seed", "5", "--out"])
        .arg(&graph)
        .output()
        .unwrap();
    if !status.status.success() {
        return outcome(false, "gen-ba failed".into());
    }
    let mut same = true;
    let mut checked = Vec::new();
    for algo in ["wshuffle-tri", "wshuffle-tri-vr", "wshuffle-c4", "arr-tri", "clustering"] {
        let run = |threads: &str, name: &str| {
            let out = dir.path().join(format!("{algo}-{name}.csv"));
            let o = Command::new(bin)
                .args(["run", "--algo", algo, "--eps", "1", "--reps", "8", "--seed", "42", "--threads", threads])
                .arg("--graph")
                .arg(&graph)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out).unwrap()
        };
        let a = run("1", "a");
        let b = run("1", "b");
        let c = run("8", "c");
        same &= a == b && a == c && !a.is_empty();
        checked.push(algo);
    }
    outcome(
        same && start.elapsed() < Duration::from_secs(120),
        format!("byte-identical across runs and 1 vs 8 threads for {}", checked.join(", ")),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |k: usize, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {tag} [{:.1}s] {}", start.elapsed().as_secs_f64(), o.detail);
        failed += (!o.pass) as usize;
    };
    report(1, &c1);
    report(2, &c2);
    report(3, &c3);
    report(4, &c4);
    let start = Instant::now();
    let data = mc_data();
    let mc_secs = start.elapsed();
    report(5, &|| {
        let mut o = c5(&data);
        o.pass &= mc_secs < Duration::from_secs(300);
        o.detail = format!("sampling {:.1}s; {}", mc_secs.as_secs_f64(), o.detail);
        o
    });
    report(6, &|| c6(&data));
    report(7, &c7);
    report(8, &c8);
    report(9, &c9);
    report(10, &c10);
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
