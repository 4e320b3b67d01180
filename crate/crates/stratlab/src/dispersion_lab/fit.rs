use crate::error::{LabError, Result};

/// Least-squares line through (ln σ, ln value): value ≈ e^{intercept} σ^{exponent}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sigma_range: (f64, f64),
    pub samples: usize,
}

pub type FitResult = DecayFit;

pub const MIN_SAMPLES: usize = 8;
pub const MIN_DECADES: f64 = 2.0;

/// `window` keeps only samples with lo ≤ σ ≤ hi.
pub fn fit_decay(samples: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<DecayFit> {
    let kept: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(s, _)| window.map_or(true, |(lo, hi)| s >= lo && s <= hi))
        .collect();
    if let Some(&(s, v)) = kept
        .iter()
        .find(|&&(s, v)| !(s > 0.0 && v > 0.0) || !s.is_finite() || !v.is_finite())
    {
        return Err(LabError::Argument(format!(
            "decay fit needs positive finite samples, got ({s}, {v})"
        )));
    }
    if kept.len() < MIN_SAMPLES {
        return Err(LabError::Argument(format!(
            "decay fit needs at least {MIN_SAMPLES} samples, got {}",
            kept.len()
        )));
    }
    let lo = kept.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = kept.iter().map(|p| p.0).fold(0.0, f64::max);
    if (hi / lo).log10() < MIN_DECADES - 1e-9 {
        return Err(LabError::Argument(format!(
            "decay fit needs {MIN_DECADES} decades, got [{lo}, {hi}]"
        )));
    }
    let n = kept.len() as f64;
    let xs: Vec<f64> = kept.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - resid / syy } else { 1.0 };
    Ok(DecayFit {
        exponent,
        intercept,
        r_squared,
        sigma_range: (lo, hi),
        samples: kept.len(),
    })
}

/// `count` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
