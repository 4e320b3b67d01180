use crate::error::Result;
use crate::spectral_core::{
    to_physical_many, to_spectral_many, Grid3, ModeMask, SpectralField4, C64,
};
use crate::wave_algebra::leray_mode;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Flux components F[j][i] = (u^j U^i)(x), j ∈ {1,2,3}, i ∈ {1,..,4}.
pub(crate) type Flux = [[Vec<f64>; 4]; 3];

pub(crate) fn physical4(f: &SpectralField4) -> [Vec<f64>; 4] {
    let mut it = to_physical_many(
        f.grid(),
        &[&f.comps[0], &f.comps[1], &f.comps[2], &f.comps[3]],
    )
    .into_iter();
    std::array::from_fn(|_| it.next().unwrap())
}

pub(crate) fn max_speed(u: &[Vec<f64>; 4]) -> f64 {
    (0..u[0].len())
        .map(|p| (u[0][p] * u[0][p] + u[1][p] * u[1][p] + u[2][p] * u[2][p]).sqrt())
        .fold(0.0, f64::max)
}

/// Σ_j iξ_j F̂_{ji} on every mode kept by `mask` (no projection).
pub(crate) fn flux_divergence(grid: &Grid3, mask: &ModeMask, flux: Flux) -> SpectralField4 {
    let flat: Vec<Vec<f64>> = flux.into_iter().flatten().collect();
    let spec = to_spectral_many(grid, &flat);
    let mut out = SpectralField4::zeros(*grid);
    for idx in 0..grid.len() {
        if !mask.keeps(idx) {
            continue;
        }
        let xi = grid.xi(idx);
        for i in 0..4 {
            out.comps[i][idx] =
                I * (xi[0] * spec[i][idx] + xi[1] * spec[4 + i][idx] + xi[2] * spec[8 + i][idx]);
        }
    }
    out
}

/// −ℙ applied in place (velocity block only).
pub(crate) fn minus_leray(f: &mut SpectralField4) {
    let grid = *f.grid();
    for idx in 0..grid.len() {
        let v = f.get(idx);
        if v.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            continue;
        }
        f.set(idx, leray_mode(grid.xi(idx), v).map(|z| -z));
    }
}

pub(crate) fn self_flux(u: &[Vec<f64>; 4]) -> Flux {
    std::array::from_fn(|j| {
        std::array::from_fn(|i| u[j].iter().zip(&u[i]).map(|(a, b)| a * b).collect())
    })
}

/// Dealiased v·∇U in conservative form Σ_j ∂_j(v^j U).
#[derive(Clone, Debug)]
pub struct NonlinearTerm {
    pub value: SpectralField4,
    /// Set when the input velocity is not divergence-free, in which case the
    /// conservative form differs from v·∇U by (div v)U.
    pub div_warning: bool,
}

pub fn nonlinear_term(u: &SpectralField4) -> Result<NonlinearTerm> {
    let grid = *u.grid();
    let scale = u.max_abs() * grid.max_axis_wavenumber();
    let div_warning = u.max_divergence() > 1e-10 * scale.max(f64::MIN_POSITIVE);
    let phys = physical4(u);
    let mask = ModeMask::new(&grid, f64::INFINITY, true);
    let mut value = flux_divergence(&grid, &mask, self_flux(&phys));
    value.set_dealiased(true);
    Ok(NonlinearTerm { value, div_warning })
}

/// −mask·ℙ(v·∇U) and the largest speed |v|.
pub fn advection_rhs(u: &SpectralField4, mask: &ModeMask) -> (SpectralField4, f64) {
    let phys = physical4(u);
    let speed = max_speed(&phys);
    let mut out = flux_divergence(u.grid(), mask, self_flux(&phys));
    minus_leray(&mut out);
    (out, speed)
}
