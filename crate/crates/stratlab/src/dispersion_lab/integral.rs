use rayon::prelude::*;

use super::phase::{
    cardan_roots, f1, f1_prime, f1_second, PhaseProfile, CRITICAL_POINT, CRITICAL_VALUE,
};
use super::quadrature::{integrate_adaptive, QuadEstimate};
use crate::error::{LabError, Result};

/// Integrand evaluations allowed per integral before giving up.
pub const MAX_EVALUATIONS: usize = 2_000_000;

fn check(alpha: f64, beta: f64, big_r: f64, sigma: f64) -> Result<()> {
    if !(alpha > 0.0 && big_r > alpha && big_r.is_finite()) {
        return Err(LabError::Argument(format!(
            "need 0 < alpha < R, got alpha={alpha}, R={big_r}"
        )));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(LabError::Argument(format!("beta must be >= 0, got {beta}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(LabError::Argument(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    Ok(())
}

/// Breakpoints for ∫₀^X dx/(1+σ(f₁−β)²): 1/√2, the roots of f₁ = β and a
/// few peak widths on either side of each.
fn peak_breaks(beta: f64, sigma: f64, upper: f64) -> Vec<f64> {
    let mut centres = vec![CRITICAL_POINT];
    if beta > 0.0 && beta < CRITICAL_VALUE {
        if let Ok((z1, z2)) = cardan_roots(beta) {
            centres.push(z1);
            centres.push(z2);
        }
    } else if beta == 0.0 {
        centres.push(0.0);
    }
    let mut out = Vec::new();
    for &z in &centres {
        out.push(z);
        if sigma > 0.0 {
            // Lorentzian half-width σ^{−1/2}/|f₁′|, or (2σ^{−1/2}/|f₁″|)^{1/2} at the top
            let lin = sigma.powf(-0.5) / f1_prime(z).abs().max(1e-300);
            let quad = (2.0 * sigma.powf(-0.5) / f1_second(z).abs().max(1e-300)).sqrt();
            let w = lin.min(quad);
            for m in [1.0, 10.0, 100.0] {
                out.push(z - m * w);
                out.push(z + m * w);
            }
        }
    }
    out.retain(|&x| x > 0.0 && x < upper);
    out
}

/// I^R_{1,β}(σ) with its error estimate.
fn eval_reduced(beta: f64, big_r: f64, sigma: f64, tol: f64) -> Result<QuadEstimate> {
    let upper = (big_r * big_r - 1.0).sqrt();
    if sigma == 0.0 {
        return Ok(QuadEstimate {
            value: upper,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let breaks = peak_breaks(beta, sigma, upper);
    integrate_adaptive(
        |x| {
            let d = f1(x) - beta;
            1.0 / (1.0 + sigma * d * d)
        },
        0.0,
        upper,
        &breaks,
        tol,
        0.0,
        MAX_EVALUATIONS,
    )
}

/// I^R_{α,β}(σ) = ∫₀^{√(R²−α²)} dx / (1 + σ(f_α(x) − β)²), relative tolerance `tol`.
pub fn eval_i(alpha: f64, beta: f64, big_r: f64, sigma: f64, tol: f64) -> Result<f64> {
    Ok(eval_i_detailed(alpha, beta, big_r, sigma, tol)?.value)
}

/// As [`eval_i`], keeping the error estimate and evaluation count.
///
/// Computed through I^R_{α,β}(σ) = α I^{R/α}_{1,αβ}(σ/α²).
pub fn eval_i_detailed(
    alpha: f64,
    beta: f64,
    big_r: f64,
    sigma: f64,
    tol: f64,
) -> Result<QuadEstimate> {
    check(alpha, beta, big_r, sigma)?;
    if !(tol > 0.0) {
        return Err(LabError::Argument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if sigma == 0.0 {
        let v = (big_r * big_r - alpha * alpha).sqrt();
        return Ok(QuadEstimate {
            value: v,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let q = eval_reduced(alpha * beta, big_r / alpha, sigma / (alpha * alpha), tol)?;
    Ok(QuadEstimate {
        value: alpha * q.value,
        abs_error: alpha * q.abs_error,
        evaluations: q.evaluations,
    })
}

/// Supremum over β ≥ 0 of I^R_{α,β}(σ) and where it is reached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSup {
    pub value: f64,
    pub beta: f64,
}

/// Relative tolerance used inside [`sup_beta_i`].
pub const SUP_TOLERANCE: f64 = 1e-9;

/// Maximises over a 200-point grid on [0, 1.2·max f_α] plus 0, max f_α and
/// f_α at the upper limit, then golden-section search around the best point.
pub fn sup_beta_i(alpha: f64, big_r: f64, sigma: f64) -> Result<BetaSup> {
    check(alpha, 0.0, big_r, sigma)?;
    let profile = PhaseProfile::new(alpha)?;
    let top = profile.max_value();
    let edge = profile.value((big_r * big_r - alpha * alpha).sqrt());
    let mut betas: Vec<f64> = (0..200).map(|i| 1.2 * top * i as f64 / 199.0).collect();
    betas.extend([0.0, top, edge]);
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let values = betas
        .par_iter()
        .map(|&b| eval_i(alpha, b, big_r, sigma, SUP_TOLERANCE))
        .collect::<Result<Vec<f64>>>()?;
    let (best, _) = values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let mut lo = betas[best.saturating_sub(1)];
    let mut hi = betas[(best + 1).min(betas.len() - 1)];
    let mut sup = BetaSup {
        value: values[best],
        beta: betas[best],
    };
    let f = |b: f64| eval_i(alpha, b, big_r, sigma, SUP_TOLERANCE);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if hi - lo <= 1e-12 * top {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    for (b, v) in [(c, fc), (d, fd)] {
        if v > sup.value {
            sup = BetaSup { value: v, beta: b };
        }
    }
    Ok(sup)
}
