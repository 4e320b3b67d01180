use crate::dispersion_lab::DecayFit;
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateRegime {
    NuDistinct,
    NuEqual,
    /// ν = ν′, global-in-time oscillating norm.
    NuEqualGlobal,
}

impl RateRegime {
    pub fn name(&self) -> &'static str {
        match self {
            RateRegime::NuDistinct => "nu_distinct",
            RateRegime::NuEqual => "nu_equal",
            RateRegime::NuEqualGlobal => "nu_equal_global",
        }
    }
}

/// K(q) = min(6/q − 1, 1 − 2/q)²/(6/q − 1), q ∈ (2, 6).
pub fn k_of_q(q: f64) -> Result<f64> {
    if !(q > 2.0 && q < 6.0) {
        return Err(LabError::Domain(format!("q = {q} outside (2, 6)")));
    }
    let a = 6.0 / q - 1.0;
    let b = 1.0 - 2.0 / q;
    Ok(a.min(b).powi(2) / a)
}

/// Reference decay exponent of ‖D_{ε,osc}‖_{L²_tL^q} in ε; a lower bound, not a prediction.
pub fn theoretical_rate(q: f64, regime: RateRegime) -> Result<f64> {
    let k = k_of_q(q)?;
    Ok(match regime {
        RateRegime::NuDistinct => k / 640.0,
        RateRegime::NuEqual => k / 544.0,
        RateRegime::NuEqualGlobal => 3.0 / 16.0,
    })
}

/// Least-squares norm ≈ e^{intercept} ε^{exponent}; a positive exponent
/// means decay as ε → 0. No sample-count requirement: sweeps are short.
pub fn fit_rate(epsilons: &[f64], norms: &[f64]) -> Result<DecayFit> {
    if epsilons.len() != norms.len() || epsilons.len() < 2 {
        return Err(LabError::Argument(format!(
            "rate fit needs matching series of >= 2 points, got {} and {}",
            epsilons.len(),
            norms.len()
        )));
    }
    if epsilons
        .iter()
        .chain(norms)
        .any(|&v| !(v > 0.0 && v.is_finite()))
    {
        return Err(LabError::Argument(
            "rate fit needs positive finite values".into(),
        ));
    }
    let n = epsilons.len() as f64;
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::Argument(
            "rate fit needs distinct epsilons".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    Ok(DecayFit {
        exponent,
        intercept,
        r_squared: if syy > 0.0 { 1.0 - resid / syy } else { 1.0 },
        sigma_range: (lo, hi),
        samples: epsilons.len(),
    })
}
