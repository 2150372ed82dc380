//! Closed-form error bounds for the wedge-shuffle estimators.
//!
//! All calculators work in `f64`. At the largest inputs used here
//! (`n⁵ d_max⁶` with `n ≈ 10⁵`, `d_max ≈ 2·10⁴`) magnitudes stay near
//! `10⁵⁰`, far from overflow.

use crate::error::{param, Error, Result};
use crate::graph::{Adjacency, Graph};

fn check_flip(name: &str, p: f64) -> Result<()> {
    if p == 0.5 {
        return Err(Error::Parameter(format!("{name} = 1/2 makes the bound singular")));
    }
    if !(0.0..0.5).contains(&p) {
        return param(format!("{name} must lie in [0, 1/2), got {p}"));
    }
    Ok(())
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return param(format!("{name} must be >= 0, got {x}"));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 {
        return param(format!("t must be > 0, got {t}"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return param(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    Ok(())
}

/// Bound on the variance of one WSLE estimate.
pub fn err_wsle(n: f64, d_max: f64, q: f64, q_l: f64) -> Result<f64> {
    check_nonneg("n", n)?;
    check_nonneg("d_max", d_max)?;
    check_flip("q", q)?;
    check_flip("q_L", q_l)?;
    let a = (1.0 - 2.0 * q).powi(2);
    let b = (1.0 - 2.0 * q_l).powi(2);
    Ok((n * q_l + q * b * d_max * d_max) / (a * b))
}

/// MSE bound of the wedge-shuffle triangle estimator.
pub fn triangle_mse_bound(n: f64, d_max: f64, t: f64, q: f64, q_l: f64) -> Result<f64> {
    check_t(t)?;
    let err = err_wsle(n, d_max, q, q_l)?;
    Ok(n.powi(4) / (36.0 * t) * err + n.powi(3) / (36.0 * t) * d_max.powi(3))
}

/// Bias bound of the variance-reduced triangle estimator, for graphs where
/// at most `n^α` users exceed the degree threshold.
pub fn vr_bias_bound(n: f64, d_avg: f64, c: f64, alpha: f64, eps1: f64) -> Result<f64> {
    check_nonneg("n", n)?;
    check_nonneg("d_avg", d_avg)?;
    check_nonneg("c", c)?;
    check_alpha(alpha)?;
    if eps1.is_nan() || eps1 <= 0.0 {
        return param(format!("eps1 must be > 0, got {eps1}"));
    }
    Ok(n * c * c * d_avg * d_avg / 3.0 + 4.0 * n.powf(alpha) / (3.0 * eps1 * eps1))
}

/// Variance bound of the variance-reduced triangle estimator. `err` is the
/// WSLE variance bound, see [`err_wsle`].
pub fn vr_variance_bound(n: f64, d_max: f64, t: f64, alpha: f64, err: f64) -> Result<f64> {
    let first = n * n * d_max.powi(4) / 9.0;
    vr_variance_terms(first, n, d_max, t, alpha, err)
}

/// Same bound with first term `(Σ d_i²)² / 9`, which never exceeds
/// `n² d_max⁴ / 9`.
pub fn vr_variance_bound_degree_sum(
    degrees: &[usize],
    d_max: f64,
    t: f64,
    alpha: f64,
    err: f64,
) -> Result<f64> {
    let sum_sq: f64 = degrees.iter().map(|&d| (d as f64) * (d as f64)).sum();
    vr_variance_terms(sum_sq * sum_sq / 9.0, degrees.len() as f64, d_max, t, alpha, err)
}

fn vr_variance_terms(first: f64, n: f64, d_max: f64, t: f64, alpha: f64, err: f64) -> Result<f64> {
    check_nonneg("n", n)?;
    check_nonneg("d_max", d_max)?;
    check_nonneg("err", err)?;
    check_t(t)?;
    check_alpha(alpha)?;
    Ok(first
        + 2.0 * n.powf(2.0 + 2.0 * alpha) / (9.0 * t) * err
        + n.powf(2.0 + alpha) * d_max.powi(3) / (36.0 * t))
}

/// MSE bound of the wedge-shuffle 4-cycle estimator.
pub fn fourcycle_mse_bound(n: f64, d_max: f64, t: f64, q_l: f64) -> Result<f64> {
    check_nonneg("n", n)?;
    check_nonneg("d_max", d_max)?;
    check_t(t)?;
    check_flip("q_L", q_l)?;
    let noise = 9.0 * n.powi(5) * q_l * (d_max + n * q_l).powi(2)
        / (16.0 * t * (1.0 - 2.0 * q_l).powi(4));
    Ok(noise + n.powi(3) * d_max.powi(6) / (64.0 * t))
}

/// Smallest `α` such that at most `n^α` users have degree above
/// `λ · d_avg` in `g`.
pub fn measure_tail(g: &Graph, lambda: f64) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return param(format!("tail exponent needs n >= 2, got {n}"));
    }
    check_nonneg("lambda", lambda)?;
    let degrees = g.degrees();
    let d_avg = degrees.iter().sum::<usize>() as f64 / n as f64;
    let heavy = degrees.iter().filter(|&&d| d as f64 > lambda * d_avg).count();
    Ok((heavy.max(1) as f64).ln() / (n as f64).ln())
}

/// Every parameter the bounds take, gathered for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: f64,
    pub d_max: f64,
    pub d_avg: f64,
    pub t: f64,
    pub q: f64,
    pub q_l: f64,
    pub c: f64,
    pub eps1: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl BoundInputs {
    /// Inputs read off `g`; `alpha` is measured at degree multiplier `lambda`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_graph(g: &Graph, t: usize, q: f64, q_l: f64, c: f64, eps1: f64, lambda: f64) -> Result<Self> {
        let alpha = measure_tail(g, lambda)?;
        let degrees = g.degrees();
        let n = g.n() as f64;
        Ok(Self {
            n,
            d_max: degrees.iter().copied().max().unwrap_or(0) as f64,
            d_avg: (0..g.n()).map(|u| g.degree(u)).sum::<usize>() as f64 / n,
            t: t as f64,
            q,
            q_l,
            c,
            eps1,
            alpha,
            lambda,
        })
    }

    pub fn err_wsle(&self) -> Result<f64> {
        err_wsle(self.n, self.d_max, self.q, self.q_l)
    }

    pub fn triangle_mse(&self) -> Result<f64> {
        triangle_mse_bound(self.n, self.d_max, self.t, self.q, self.q_l)
    }

    pub fn vr_bias(&self) -> Result<f64> {
        vr_bias_bound(self.n, self.d_avg, self.c, self.alpha, self.eps1)
    }

    pub fn vr_variance(&self) -> Result<f64> {
        vr_variance_bound(self.n, self.d_max, self.t, self.alpha, self.err_wsle()?)
    }

    pub fn fourcycle_mse(&self) -> Result<f64> {
        fourcycle_mse_bound(self.n, self.d_max, self.t, self.q_l)
    }
}
