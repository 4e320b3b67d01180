use super::operator::ModeGeometry;
use super::params::PhysicsParams;
use crate::error::{LabError, Result};
use crate::spectral_core::{chi, horizontal_norm, norm3, Grid3, SpectralField4};

/// Frequency window C_{r,R} = {|ξ_h| ≥ r, |ξ| ≤ R} with r = ε^m, R = ε^{−M}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationWindow {
    pub r: f64,
    pub big_r: f64,
    pub m: f64,
    pub big_m: f64,
}

impl TruncationWindow {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && big_r > r) {
            return Err(LabError::Argument(format!(
                "need 0 < r < R, got r={r}, R={big_r}"
            )));
        }
        Ok(TruncationWindow {
            r,
            big_r,
            m: f64::NAN,
            big_m: f64::NAN,
        })
    }

    pub fn from_epsilon(epsilon: f64, m: f64, big_m: f64) -> Result<Self> {
        if !(m > 0.0 && big_m > 0.0) {
            return Err(LabError::Argument(format!(
                "window exponents must be positive, got m={m}, M={big_m}"
            )));
        }
        let mut w = Self::new(epsilon.powf(m), epsilon.powf(-big_m))?;
        w.m = m;
        w.big_m = big_m;
        Ok(w)
    }

    /// f_{r,R}(ξ) = χ(|ξ|/R)(1 − χ(|ξ_h|/(2r))).
    pub fn multiplier(&self, xi: [f64; 3]) -> f64 {
        chi(norm3(xi) / self.big_r) * (1.0 - chi(horizontal_norm(xi) / (2.0 * self.r)))
    }

    pub fn contains(&self, xi: [f64; 3]) -> bool {
        horizontal_norm(xi) >= self.r && norm3(xi) <= self.big_r
    }

    /// The enlarged window C_{r/2, 2R}.
    pub fn widened(&self) -> Self {
        TruncationWindow {
            r: 0.5 * self.r,
            big_r: 2.0 * self.big_r,
            ..*self
        }
    }

    /// 3M + m < 1 and, when ν ≠ ν′, ε ≤ ε₁.
    pub fn admissible(&self, p: &PhysicsParams) -> bool {
        if !(3.0 * self.big_m + self.m < 1.0) {
            return false;
        }
        match epsilon_threshold(p, self.m, self.big_m) {
            Ok(t) => p.epsilon <= t.eps1,
            Err(LabError::NotApplicable(_)) => true,
            Err(_) => false,
        }
    }
}

pub fn freq_truncate(field: &SpectralField4, window: &TruncationWindow) -> SpectralField4 {
    let mut out = field.clone();
    out.apply_multiplier(|_, xi| window.multiplier(xi));
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// (√2/|ν−ν′|)^{1/(1−(3M+m))}
    pub eps1: f64,
    /// (2/|ν−ν′|)^{1/(1−(3M+m))}
    pub eps0: f64,
}

pub fn epsilon_threshold(p: &PhysicsParams, m: f64, big_m: f64) -> Result<Thresholds> {
    if p.nu_equal() {
        return Err(LabError::NotApplicable(
            "nu = nu' needs no smallness threshold".into(),
        ));
    }
    let gap = 1.0 - (3.0 * big_m + m);
    if !(gap > 0.0) {
        return Err(LabError::Argument(format!(
            "window needs 3M + m < 1, got {}",
            3.0 * big_m + m
        )));
    }
    let d = (p.nu - p.nu_prime).abs();
    Ok(Thresholds {
        eps1: (2f64.sqrt() / d).powf(1.0 / gap),
        eps0: (2.0 / d).powf(1.0 / gap),
    })
}

/// Number of grid modes inside C_{r,R} whose discriminant is not negative.
pub fn count_nonadmissible_modes(
    grid: &Grid3,
    p: &PhysicsParams,
    window: &TruncationWindow,
) -> usize {
    (0..grid.len())
        .map(|idx| grid.xi(idx))
        .filter(|&xi| window.contains(xi))
        .filter(|&xi| match ModeGeometry::new(xi, p) {
            Ok(g) => !p.nu_equal() && g.discriminant >= 0.0,
            Err(_) => false,
        })
        .count()
}
