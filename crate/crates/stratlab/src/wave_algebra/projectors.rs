use super::basis::ModeBasis;
use super::params::PhysicsParams;
use crate::error::{LabError, Result};
use crate::spectral_core::{SpectralField4, C64, ZERO};

/// Velocity part projected onto ξ·v̂ = 0 mode by mode; θ untouched.
pub fn leray_project(field: &SpectralField4) -> SpectralField4 {
    field.map_modes(|_, xi, f| leray_mode(xi, f))
}

#[inline]
pub fn leray_mode(xi: [f64; 3], f: [C64; 4]) -> [C64; 4] {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if k2 == 0.0 {
        return f;
    }
    let d = (xi[0] * f[0] + xi[1] * f[1] + xi[2] * f[2]) / k2;
    [f[0] - xi[0] * d, f[1] - xi[1] * d, f[2] - xi[2] * d, f[3]]
}

/// ℙ₂ at one mode: (f̂·V₂)V₂, and 0 on the line ξ_h = 0.
#[inline]
pub fn stratified_mode(xi: [f64; 3], f: [C64; 4]) -> [C64; 4] {
    let h = xi[0].hypot(xi[1]);
    if h == 0.0 {
        return [ZERO; 4];
    }
    let (a, b) = (-xi[1] / h, xi[0] / h);
    let coef = f[0] * a + f[1] * b;
    [coef * a, coef * b, ZERO, ZERO]
}

/// (f_S, f_osc) with f_S = ℙ₂f and f_osc = f − f_S.
pub fn split_stratified_osc(field: &SpectralField4) -> (SpectralField4, SpectralField4) {
    let strat = field.map_modes(|_, xi, f| stratified_mode(xi, f));
    let osc = field.sub(&strat);
    (strat, osc)
}

pub fn stratified_part(field: &SpectralField4) -> SpectralField4 {
    field.map_modes(|_, xi, f| stratified_mode(xi, f))
}

pub fn oscillating_part(field: &SpectralField4) -> SpectralField4 {
    field.sub(&stratified_part(field))
}

/// ℙ_k f for k ∈ {2, 3, 4}.
///
/// On the line ξ_h = 0 there are no V₂/V± eigenvectors; ℙ₂ vanishes there and
/// ℙ₃, ℙ₄ each take half of the mode, so ℙ₂ + ℙ₃ + ℙ₄ still resolves the identity.
pub fn wave_project(field: &SpectralField4, k: usize, p: &PhysicsParams) -> Result<SpectralField4> {
    if !(2..=4).contains(&k) {
        return Err(LabError::Argument(format!(
            "wave projector index must be 2, 3 or 4, got {k}"
        )));
    }
    let grid = *field.grid();
    let mut out = SpectralField4::zeros(grid);
    for idx in 0..grid.len() {
        let xi = grid.xi(idx);
        let f = field.get(idx);
        if xi[0] == 0.0 && xi[1] == 0.0 {
            if k != 2 {
                out.set(idx, f.map(|z| 0.5 * z));
            }
            continue;
        }
        if f.iter().all(|z| *z == ZERO) {
            continue;
        }
        let basis = ModeBasis::new(xi, p)?;
        out.set(idx, basis.component(&f, k));
    }
    Ok(out)
}

/// 𝓑 applied mode by mode: (v, θ) ↦ (0, 0, θ, −v³).
pub fn apply_b(field: &SpectralField4) -> SpectralField4 {
    field.map_modes(|_, _, f| [ZERO, ZERO, f[3], -f[2]])
}

/// Spectrum of ω(f) = ∂₁f² − ∂₂f¹.
pub fn vorticity(field: &SpectralField4) -> Vec<C64> {
    let grid = field.grid();
    (0..grid.len())
        .map(|idx| {
            let xi = grid.xi(idx);
            C64::new(0.0, 1.0) * (xi[0] * field.comps[1][idx] - xi[1] * field.comps[0][idx])
        })
        .collect()
}
