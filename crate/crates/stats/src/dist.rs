//! Survival functions for the Student t, Fisher F and studentized range
//! distributions. The t and F functions go through the regularized
//! incomplete beta (absolute accuracy well under 1e-8); the studentized
//! range is evaluated by numeric double integration to ~1e-5, comfortably
//! under its documented 1e-4 tolerance. A seeded resampling fallback for
//! the studentized range exists for validation.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::special::{ln_gamma, norm_pdf, reg_inc_beta};
use crate::{Error, IterBudget};

/// Two-sided survival helpers use this default budget.
pub const DEFAULT_BUDGET: IterBudget = IterBudget(400);

/// P(T > t) for Student's t with `df` degrees of freedom.
pub fn dist_t_sf(t: f64, df: f64) -> Result<f64, Error> {
    dist_t_sf_with_budget(t, df, DEFAULT_BUDGET)
}

pub fn dist_t_sf_with_budget(t: f64, df: f64, budget: IterBudget) -> Result<f64, Error> {
    if df <= 0.0 {
        return Err(Error::Domain(format!(
            "t distribution needs df > 0, got {df}"
        )));
    }
    if t.is_nan() {
        return Err(Error::Domain("t statistic is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 0.0 } else { 1.0 });
    }
    let tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + t * t), budget)?;
    Ok(if t >= 0.0 { tail } else { 1.0 - tail })
}

/// P(F > f) for the F distribution with `(df1, df2)` degrees of freedom.
pub fn dist_f_sf(f: f64, df1: f64, df2: f64) -> Result<f64, Error> {
    dist_f_sf_with_budget(f, df1, df2, DEFAULT_BUDGET)
}

pub fn dist_f_sf_with_budget(f: f64, df1: f64, df2: f64, budget: IterBudget) -> Result<f64, Error> {
    if df1 <= 0.0 || df2 <= 0.0 {
        return Err(Error::Domain(format!(
            "F distribution needs df > 0, got ({df1}, {df2})"
        )));
    }
    if f < 0.0 {
        return Err(Error::Domain(format!("F statistic must be >= 0, got {f}")));
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    reg_inc_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f), budget)
}

/// P(Q > q) for the studentized range with `k` groups and `df` error
/// degrees of freedom, by double integration of the CDF.
pub fn dist_q_sf(q: f64, k: usize, df: f64) -> Result<f64, Error> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "studentized range needs k >= 2 groups, got {k}"
        )));
    }
    if df <= 0.0 {
        return Err(Error::Domain(format!(
            "studentized range needs df > 0, got {df}"
        )));
    }
    if q <= 0.0 {
        return Ok(1.0);
    }
    if q.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 - studentized_range_cdf(q, k, df))
}

/// Horner-form rational approximation of the normal CDF (via the classic
/// 5-coefficient erfc fit, max absolute error ~1.5e-7). Used only inside
/// the range integrand, where the documented tolerance is 1e-4.
fn norm_cdf_fast(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    let y = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * y);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let half_erfc = 0.5 * poly * (-y * y).exp();
    if x >= 0.0 {
        1.0 - half_erfc
    } else {
        half_erfc
    }
}

/// CDF of the range of `k` standard normal draws evaluated at width `w`:
/// `k * integral phi(z) * (Phi(z) - Phi(z - w))^(k-1) dz`.
/// Nodes carry precomputed (z, weight, phi(z), Phi(z)).
fn normal_range_cdf(w: f64, k: usize, nodes: &[(f64, f64, f64, f64)]) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for &(z, weight, pdf, cdf) in nodes {
        let inner = cdf - norm_cdf_fast(z - w);
        if inner > 0.0 {
            acc += weight * pdf * inner.powi(k as i32 - 1);
        }
    }
    (k as f64 * acc).clamp(0.0, 1.0)
}

fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    // Inner panel: z in [-8, 8] captures the phi(z) mass to ~1e-15.
    let inner_nodes: Vec<(f64, f64, f64, f64)> = gauss_legendre_panels(-8.0, 8.0, 12, 16)
        .into_iter()
        .map(|(z, w)| (z, w, norm_pdf(z), norm_cdf_fast(z)))
        .collect();
    // Outer variable u is the pooled-sd scale factor chi_df / sqrt(df);
    // its density concentrates around 1 with width ~1/sqrt(2 df).
    let u_hi = (1.0 + 12.0 / df.sqrt()).min(14.0);
    let outer_nodes = gauss_legendre_panels(1e-10, u_hi, 20, 16);
    // log of the scale-factor density normalization constant.
    let ln_c = std::f64::consts::LN_2 + 0.5 * df * (0.5 * df).ln() - ln_gamma(0.5 * df);
    let mut acc = 0.0;
    for &(u, weight) in &outer_nodes {
        let ln_pdf = ln_c + (df - 1.0) * u.ln() - 0.5 * df * u * u;
        if ln_pdf < -700.0 {
            continue;
        }
        acc += weight * ln_pdf.exp() * normal_range_cdf(q * u, k, &inner_nodes);
    }
    acc.clamp(0.0, 1.0)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` points
/// over `[a, b]`, returned as (node, weight) pairs.
fn gauss_legendre_panels(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre_unit(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in &base {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre polynomial roots.
fn gauss_legendre_unit(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Seeded resampling estimate of the studentized range survival function,
/// kept as an independent validation route for the integration backend.
pub fn dist_q_sf_resampled(q: f64, k: usize, df: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chi = ChiSquared::new(df).expect("df > 0");
    let mut exceed = 0usize;
    for _ in 0..samples {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for _ in 0..k {
            let z: f64 = StandardNormal.sample(&mut rng);
            hi = hi.max(z);
            lo = lo.min(z);
        }
        let s = (chi.sample(&mut rng) / df).sqrt();
        if (hi - lo) / s > q {
            exceed += 1;
        }
    }
    exceed as f64 / samples as f64
}
