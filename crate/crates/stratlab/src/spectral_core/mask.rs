use super::fft;
use super::field::C64;
use super::grid::{norm3, Grid3};

/// Retained modes of a Galerkin truncation: the 2/3 cube intersected with a
/// spectral ball |ξ| ≤ radius.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMask {
    keep: Vec<bool>,
    radius: f64,
}

impl ModeMask {
    pub fn new(grid: &Grid3, radius: f64, dealias: bool) -> Self {
        let keep = (0..grid.len())
            .map(|idx| {
                let inside = norm3(grid.xi(idx)) <= radius;
                let cube = if dealias {
                    grid.dealias_keep(idx)
                } else {
                    !grid.touches_nyquist(idx)
                };
                inside && cube
            })
            .collect();
        ModeMask { keep, radius }
    }

    /// Ball inscribed in the 2/3 cube.
    pub fn default_radius(grid: &Grid3) -> f64 {
        let n = grid.n() as i64;
        let kmax = (0..n).filter(|k| 3 * k < n).max().unwrap_or(0);
        grid.dk() * kmax as f64
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn keeps(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    pub fn apply(&self, data: &mut [C64]) {
        for (c, &k) in data.iter_mut().zip(&self.keep) {
            if !k {
                *c = C64::new(0.0, 0.0);
            }
        }
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    /// Largest |coefficient| on modes outside the mask.
    pub fn leakage(&self, data: &[C64]) -> f64 {
        data.iter()
            .zip(&self.keep)
            .filter(|(_, &k)| !k)
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Inverse transforms of several Hermitian spectra, two per complex FFT.
pub fn to_physical_many(grid: &Grid3, spectra: &[&[C64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(spectra.len());
    for pair in spectra.chunks(2) {
        if pair.len() == 2 {
            let (a, b) = fft::inverse_real_pair(grid, pair[0], pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft::inverse_real(grid, pair[0]));
        }
    }
    out
}

/// Forward transforms of several real fields, two per complex FFT.
pub fn to_spectral_many(grid: &Grid3, fields: &[Vec<f64>]) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        if pair.len() == 2 {
            let (a, b) = fft::forward_real_pair(grid, &pair[0], &pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft::forward_real(grid, &pair[0]));
        }
    }
    out
}
