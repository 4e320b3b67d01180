use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::spectral_core::{horizontal_norm, norm3, Grid3, SpectralField4, ZERO};

/// Worst observed ‖e^{tΔ}u‖_{L^p} / ((R³/r⁴) e^{−tr²/2} ‖u‖_{L^p}) over
/// `trials` random scalar fields with spectrum in C_{r,R} = {|ξ_h| ≥ r, |ξ| ≤ R}.
pub fn heat_truncated_ratio(
    grid: &Grid3,
    r: f64,
    big_r: f64,
    t: f64,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let nyquist = 0.5 * grid.dk() * grid.n() as f64;
    if !(r > 0.0 && big_r > r && big_r <= nyquist) {
        return Err(LabError::Argument(format!(
            "need 0 < r < R <= {nyquist}, got r={r}, R={big_r}"
        )));
    }
    if !(p >= 1.0) {
        return Err(LabError::Argument(format!(
            "p must lie in [1, inf], got {p}"
        )));
    }
    if !(t >= 0.0) {
        return Err(LabError::Argument(format!("t must be >= 0, got {t}")));
    }
    let inside = |xi: [f64; 3]| horizontal_norm(xi) >= r && norm3(xi) <= big_r;
    let count = (0..grid.len())
        .filter(|&i| !grid.touches_nyquist(i) && inside(grid.xi(i)))
        .count();
    if count == 0 {
        return Err(LabError::Argument(format!(
            "no grid mode in C_(r,R) for r={r}, R={big_r}"
        )));
    }
    let bound = big_r.powi(3) / r.powi(4) * (-0.5 * t * r * r).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let mut u = SpectralField4::from_fn(*grid, |_, xi| {
            let mut v = [ZERO; 4];
            if inside(xi) {
                v[3] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            v
        });
        u.symmetrize();
        let mut heated = u.clone();
        heated
            .apply_multiplier(|_, xi| (-t * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])).exp());
        let before = u.to_physical()?.lq(p);
        let after = heated.to_physical()?.lq(p);
        if before > 0.0 {
            worst = worst.max(after / (bound * before));
        }
    }
    Ok(worst)
}
