use super::field::SpectralField4;
use super::grid::{norm3, Grid3};
use crate::error::{LabError, Result};

/// Steepness of the transition; larger values push Σ_j ψ_j² towards 1.
const STEEPNESS: f64 = 4.0;

/// Smooth cutoff: 1 on |x| ≤ 1/2, 0 on |x| ≥ 1, C^∞ in between.
pub fn chi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let s = 2.0 * a - 1.0;
        let p = (-STEEPNESS / (1.0 - s)).exp();
        let q = (-STEEPNESS / s).exp();
        p / (p + q)
    }
}

/// Annular profile ψ(x) = χ(x/2) − χ(x), supported in 1/2 ≤ |x| ≤ 2, with ψ(1) = 1.
pub fn psi(x: f64) -> f64 {
    chi(0.5 * x) - chi(x)
}

/// Homogeneous Littlewood–Paley blocks Δ̇_j for j_min ≤ j ≤ j_max.
///
/// The finite sum telescopes to χ(2^{−j_max−1}|ξ|) − χ(2^{−j_min}|ξ|), which
/// is exactly 1 on 2^{j_min} ≤ |ξ| ≤ 2^{j_max}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicLadder {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicLadder {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(LabError::Argument(format!(
                "empty dyadic ladder {j_min}..{j_max}"
            )));
        }
        Ok(DyadicLadder { j_min, j_max })
    }

    /// Smallest ladder whose band covers every nonzero mode of the grid.
    pub fn for_grid(grid: &Grid3) -> Self {
        let lo = grid.dk();
        let hi = grid.max_axis_wavenumber() * 3f64.sqrt();
        DyadicLadder {
            j_min: lo.log2().floor() as i32,
            j_max: hi.log2().ceil() as i32,
        }
    }

    pub fn mask(&self, j: i32, xi_abs: f64) -> f64 {
        if j < self.j_min || j > self.j_max {
            return 0.0;
        }
        psi(xi_abs * 2f64.powi(-j))
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn band(&self) -> (f64, f64) {
        (2f64.powi(self.j_min), 2f64.powi(self.j_max))
    }

    /// |Σ_j mask_j(|ξ|) − 1|.
    pub fn partition_defect(&self, xi_abs: f64) -> f64 {
        (self.indices().map(|j| self.mask(j, xi_abs)).sum::<f64>() - 1.0).abs()
    }
}

/// Δ̇_j f; an index outside the ladder gives the zero field.
pub fn dyadic_project(field: &SpectralField4, j: i32, ladder: &DyadicLadder) -> SpectralField4 {
    let mut out = field.clone();
    out.apply_multiplier(|_, xi| ladder.mask(j, norm3(xi)));
    out
}
