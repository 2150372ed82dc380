//! Randomizers and privacy accounting.
//!
//! All logarithms are natural. The amplification bound is the closed form for
//! shuffling `n` reports of an `ε_L`-LDP randomizer:
//!
//! ```text
//! ε = ln(1 + (e^εL − 1)/(e^εL + 1) · (8·sqrt(e^εL · ln(4/δ))/sqrt(n) + 8·e^εL/n))
//! ```
//!
//! valid whenever `ε_L ≤ ln(n / (16 · ln(2/δ)))`.

use rand::distr::Open01;
use rand::Rng;

use crate::error::{param, Error, Result};

/// Probability that `ε`-RR flips its input bit. `ε = ∞` gives exactly 0.
pub fn flip_probability(eps: f64) -> f64 {
    1.0 / (eps.exp() + 1.0)
}

/// Warner's randomized response: keep `bit` with probability `e^ε/(e^ε+1)`.
pub fn warner_rr<R: Rng + ?Sized>(bit: bool, eps: f64, rng: &mut R) -> Result<bool> {
    if eps.is_nan() || eps < 0.0 {
        return param(format!("RR budget must be >= 0, got {eps}"));
    }
    Ok(bit ^ rng.random_bool(flip_probability(eps)))
}

/// One draw from Laplace(0, `scale`) by inverse CDF.
pub fn laplace_noise<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if scale.is_nan() || scale <= 0.0 || scale.is_infinite() {
        return param(format!("Laplace scale must be finite and > 0, got {scale}"));
    }
    Ok(scale * standard_laplace(rng))
}

pub(crate) fn standard_laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0, 1), got {delta}"));
    }
    Ok(())
}

/// Largest local budget the closed-form amplification bound admits for `n`
/// shuffled reports. Non-positive means amplification is unavailable.
pub fn el_cap(n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n == 0 {
        return param("amplification needs at least one report");
    }
    Ok((n as f64 / (16.0 * (2.0 / delta).ln())).ln())
}

/// Central `ε` achieved by shuffling `n` reports of an `eps_local`-LDP randomizer.
pub fn amplification_epsilon_closed(n: usize, eps_local: f64, delta: f64) -> Result<f64> {
    let cap = el_cap(n, delta)?;
    if eps_local.is_nan() || eps_local < 0.0 {
        return param(format!("local budget must be >= 0, got {eps_local}"));
    }
    if eps_local > cap {
        return Err(Error::Amplification(format!(
            "local budget {eps_local} exceeds the amplification cap {cap:.6} for n = {n}, delta = {delta}"
        )));
    }
    let e = eps_local.exp();
    let n = n as f64;
    let inner = 8.0 * (e * (4.0 / delta).ln()).sqrt() / n.sqrt() + 8.0 * e / n;
    Ok(((e - 1.0) / (e + 1.0) * inner).ln_1p())
}

/// Result of inverting the amplification bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBudget {
    pub eps_local: f64,
    /// Central `ε` actually guaranteed by `eps_local` (≤ the request).
    pub achieved_eps: f64,
    /// Set when the request was above what the cap allows; the guarantee is
    /// then strictly stronger than requested.
    pub clamped: bool,
}

/// Finds `ε_L` with `amplification_epsilon_closed(n, ε_L, δ) = eps_central` by
/// bisection. The returned value never overshoots the requested `ε`.
pub fn local_privacy_budget(n: usize, eps_central: f64, delta: f64) -> Result<LocalBudget> {
    if eps_central.is_nan() || eps_central <= 0.0 {
        return param(format!("central budget must be > 0, got {eps_central}"));
    }
    let cap = el_cap(n, delta)?;
    if cap <= 0.0 {
        return Err(Error::Amplification(format!(
            "n = {n} too small for shuffle amplification at delta = {delta}"
        )));
    }
    let at_cap = amplification_epsilon_closed(n, cap, delta)?;
    if at_cap <= eps_central {
        return Ok(LocalBudget {
            eps_local: cap,
            achieved_eps: at_cap,
            clamped: at_cap < eps_central,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, cap);
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if amplification_epsilon_closed(n, mid, delta)? <= eps_central {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LocalBudget {
        eps_local: lo,
        achieved_eps: amplification_epsilon_closed(n, lo, delta)?,
        clamped: false,
    })
}

/// Privacy bookkeeping for one shuffle-model run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationParams {
    /// Number of shuffled reports (`n − 2` for a wedge-shuffled pair).
    pub n_shufflers: usize,
    pub eps_central: f64,
    pub delta: f64,
    pub eps_local: f64,
    /// Flip probability of the local edges.
    pub q: f64,
    /// Flip probability of the wedge bits.
    pub q_l: f64,
    pub clamped: bool,
}

impl AmplificationParams {
    pub fn for_shuffle(n_shufflers: usize, eps_central: f64, delta: f64) -> Result<Self> {
        let budget = local_privacy_budget(n_shufflers, eps_central, delta)?;
        Ok(Self {
            n_shufflers,
            eps_central,
            delta,
            eps_local: budget.eps_local,
            q: flip_probability(eps_central),
            q_l: flip_probability(budget.eps_local),
            clamped: budget.clamped,
        })
    }

    /// Central guarantee of the shuffled wedge reports.
    pub fn wedge_epsilon(&self) -> Result<f64> {
        amplification_epsilon_closed(self.n_shufflers, self.eps_local, self.delta)
    }
}

/// Split of a total budget between degree releases and the main estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSplit {
    pub eps1: f64,
    pub eps2: f64,
}

impl BudgetSplit {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        if !(eps1 > 0.0 && eps2 > 0.0) {
            return param(format!("split budgets must be > 0, got ({eps1}, {eps2})"));
        }
        Ok(Self { eps1, eps2 })
    }

    /// `eps1 = fraction · ε`, `eps2 = (1 − fraction) · ε`.
    pub fn with_fraction(eps: f64, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return param(format!("split fraction must lie in (0, 1), got {fraction}"));
        }
        Self::new(fraction * eps, (1.0 - fraction) * eps)
    }

    /// The 1:9 default.
    pub fn default_for(eps: f64) -> Result<Self> {
        Self::with_fraction(eps, 0.1)
    }

    pub fn total(&self) -> f64 {
        self.eps1 + self.eps2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpGuarantee {
    pub eps: f64,
    pub delta: f64,
}

impl DpGuarantee {
    pub fn new(eps: f64, delta: f64) -> Self {
        Self { eps, delta }
    }

    pub fn pure(eps: f64) -> Self {
        Self { eps, delta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrustModel {
    /// Reports pass through a shuffler that does not collude with the collector.
    Shuffle,
    /// Every report is seen by the collector as sent.
    Local,
}

/// Per-run record of claimed guarantees.
///
/// `element_dp` is the guarantee for one element `a_{i,j}` of the adjacency
/// matrix (element DP in the shuffle model, per-report edge LDP in the local
/// model). Each undirected edge lives in two elements, so edge DP doubles it
/// unless only one triangle of the matrix is ever read.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyLedger {
    pub model: TrustModel,
    element: DpGuarantee,
    reads_both_triangles: bool,
    pub clamped: bool,
}

impl PrivacyLedger {
    pub fn new(model: TrustModel) -> Self {
        Self {
            model,
            element: DpGuarantee::new(0.0, 0.0),
            reads_both_triangles: true,
            clamped: false,
        }
    }

    /// Ledger for mechanisms that read only the lower triangle of `A`.
    pub fn lower_triangle(model: TrustModel) -> Self {
        Self {
            reads_both_triangles: false,
            ..Self::new(model)
        }
    }

    /// Sequential composition with another mechanism touching the same elements.
    pub fn record(&mut self, g: DpGuarantee) -> &mut Self {
        self.element.eps += g.eps;
        self.element.delta += g.delta;
        self
    }

    pub fn element_dp(&self) -> DpGuarantee {
        self.element
    }

    pub fn edge_dp(&self) -> DpGuarantee {
        if self.reads_both_triangles {
            DpGuarantee::new(2.0 * self.element.eps, 2.0 * self.element.delta)
        } else {
            self.element
        }
    }
}
