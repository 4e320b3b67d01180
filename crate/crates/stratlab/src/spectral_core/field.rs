use num_complex::Complex64;

use super::fft;
use super::grid::Grid3;
use crate::error::{LabError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64 { re: 0.0, im: 0.0 };

/// Four-component spectral field; component order is (v¹, v², v³, θ).
#[derive(Clone, Debug)]
pub struct SpectralField4 {
    grid: Grid3,
    pub comps: [Vec<C64>; 4],
    dealiased: bool,
}

/// Real samples of a four-component field on the grid.
#[derive(Clone, Debug)]
pub struct PhysicalField4 {
    grid: Grid3,
    pub comps: [Vec<f64>; 4],
}

impl SpectralField4 {
    pub fn zeros(grid: Grid3) -> Self {
        let len = grid.len();
        SpectralField4 {
            grid,
            comps: std::array::from_fn(|_| vec![ZERO; len]),
            dealiased: false,
        }
    }

    /// Builds a field mode by mode from its flat index and wavenumber.
    /// Nyquist modes are left at zero.
    pub fn from_fn(grid: Grid3, mut f: impl FnMut(usize, [f64; 3]) -> [C64; 4]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            if !grid.touches_nyquist(idx) {
                out.set(idx, f(idx, grid.xi(idx)));
            }
        }
        out
    }

    pub fn from_components(grid: Grid3, comps: [Vec<C64>; 4]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(LabError::Argument(
                "component length does not match grid".into(),
            ));
        }
        Ok(SpectralField4 {
            grid,
            comps,
            dealiased: false,
        })
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn is_dealiased(&self) -> bool {
        self.dealiased
    }

    pub fn set_dealiased(&mut self, flag: bool) {
        self.dealiased = flag;
    }

    #[inline]
    pub fn get(&self, idx: usize) -> [C64; 4] {
        [
            self.comps[0][idx],
            self.comps[1][idx],
            self.comps[2][idx],
            self.comps[3][idx],
        ]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [C64; 4]) {
        for (c, x) in self.comps.iter_mut().zip(v) {
            c[idx] = x;
        }
    }

    /// New field with every mode replaced by `f(idx, ξ, coeffs)`; Nyquist modes become zero.
    pub fn map_modes(&self, mut f: impl FnMut(usize, [f64; 3], [C64; 4]) -> [C64; 4]) -> Self {
        let mut out = Self::zeros(self.grid);
        for idx in 0..self.grid.len() {
            if !self.grid.touches_nyquist(idx) {
                out.set(idx, f(idx, self.grid.xi(idx), self.get(idx)));
            }
        }
        out.dealiased = self.dealiased;
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.comps.iter_mut().flatten().for_each(|c| *c *= s);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// self += s·other
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Σ_k |f̂_k|², i.e. the grid mean of |f|² by Parseval.
    pub fn l2_sq(&self) -> f64 {
        self.comps.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2(&self) -> f64 {
        self.l2_sq().sqrt()
    }

    /// Real part of Σ_k f̂_k · conj(ĝ_k): the normalised L² inner product.
    pub fn inner(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>())
            .sum()
    }

    /// Σ_k |ξ|^{2s} w(k)·Re(f̂·conj ĝ), skipping ξ = 0.
    pub fn inner_hs(&self, other: &Self, s: f64) -> f64 {
        let mut acc = 0.0;
        for idx in 0..self.grid.len() {
            let xi = self.grid.xi(idx);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 == 0.0 {
                continue;
            }
            let w = k2.powf(s);
            for c in 0..4 {
                acc += w * (self.comps[c][idx] * other.comps[c][idx].conj()).re;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// max_k |ξ·v̂_k|.
    pub fn max_divergence(&self) -> f64 {
        (0..self.grid.len())
            .map(|idx| {
                let xi = self.grid.xi(idx);
                (xi[0] * self.comps[0][idx]
                    + xi[1] * self.comps[1][idx]
                    + xi[2] * self.comps[2][idx])
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// max_k |f̂(−k) − conj f̂(k)|; zero for fields of real data.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let m = self.grid.neg(idx);
            for c in &self.comps {
                worst = worst.max((c[m] - c[idx].conj()).norm());
            }
        }
        worst
    }

    /// Replaces each pair (k, −k) by its Hermitian average.
    pub fn symmetrize(&mut self) {
        for idx in 0..self.grid.len() {
            let m = self.grid.neg(idx);
            if m < idx {
                continue;
            }
            for c in self.comps.iter_mut() {
                let avg = 0.5 * (c[idx] + c[m].conj());
                c[idx] = avg;
                c[m] = avg.conj();
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Multiplies every mode by a real scalar multiplier m(idx, ξ).
    pub fn apply_multiplier(&mut self, mut m: impl FnMut(usize, [f64; 3]) -> f64) {
        for idx in 0..self.grid.len() {
            let w = m(idx, self.grid.xi(idx));
            if w != 1.0 {
                for c in self.comps.iter_mut() {
                    c[idx] *= w;
                }
            }
        }
    }

    /// Zeroes every mode outside the 2/3 dealiasing cube.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        self.apply_multiplier(|idx, _| if grid.dealias_keep(idx) { 1.0 } else { 0.0 });
        self.dealiased = true;
    }

    pub fn to_physical(&self) -> Result<PhysicalField4> {
        if !self.is_finite() {
            return Err(LabError::Numeric("spectral field".into()));
        }
        let (a, b) = fft::inverse_real_pair(&self.grid, &self.comps[0], &self.comps[1]);
        let (c, d) = fft::inverse_real_pair(&self.grid, &self.comps[2], &self.comps[3]);
        Ok(PhysicalField4 {
            grid: self.grid,
            comps: [a, b, c, d],
        })
    }
}

impl PhysicalField4 {
    pub fn zeros(grid: Grid3) -> Self {
        PhysicalField4 {
            grid,
            comps: std::array::from_fn(|_| vec![0.0; grid.len()]),
        }
    }

    pub fn from_fn(grid: Grid3, mut f: impl FnMut([f64; 3]) -> [f64; 4]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.position(idx));
            for c in 0..4 {
                out.comps[c][idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn to_spectral(&self) -> Result<SpectralField4> {
        if self.comps.iter().flatten().any(|x| !x.is_finite()) {
            return Err(LabError::Numeric("physical field".into()));
        }
        let (a, b) = fft::forward_real_pair(&self.grid, &self.comps[0], &self.comps[1]);
        let (c, d) = fft::forward_real_pair(&self.grid, &self.comps[2], &self.comps[3]);
        Ok(SpectralField4 {
            grid: self.grid,
            comps: [a, b, c, d],
            dealiased: false,
        })
    }

    /// Grid mean of |f|², with |f| the Euclidean modulus over components.
    pub fn mean_square(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.modulus_sq(i))
            .sum::<f64>()
            / self.grid.len() as f64
    }

    #[inline]
    pub fn modulus_sq(&self, i: usize) -> f64 {
        self.comps.iter().map(|c| c[i] * c[i]).sum()
    }

    /// Normalised L^q norm, q ∈ [1, ∞].
    pub fn lq(&self, q: f64) -> f64 {
        lq_of_modulus_sq(
            (0..self.grid.len()).map(|i| self.modulus_sq(i)),
            self.grid.len(),
            q,
        )
    }
}

/// (mean |f|^q)^{1/q} from an iterator of |f|²; q = ∞ gives the max.
pub fn lq_of_modulus_sq(sq: impl Iterator<Item = f64>, count: usize, q: f64) -> f64 {
    if q.is_infinite() {
        return sq.fold(0.0, f64::max).sqrt();
    }
    let half = 0.5 * q;
    let mean = if half == 1.0 {
        sq.sum::<f64>() / count as f64
    } else {
        sq.map(|s| s.powf(half)).sum::<f64>() / count as f64
    };
    mean.powf(1.0 / q)
}

/// Direction of a transform between representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Complex transform of four component arrays in either direction.
pub fn transform(
    grid: &Grid3,
    comps: &[Vec<C64>; 4],
    direction: Direction,
) -> Result<[Vec<C64>; 4]> {
    if comps
        .iter()
        .flatten()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(LabError::Numeric("transform input".into()));
    }
    if comps.iter().any(|c| c.len() != grid.len()) {
        return Err(LabError::Argument(
            "transform input does not match grid".into(),
        ));
    }
    let mut out = comps.clone();
    for c in out.iter_mut() {
        match direction {
            Direction::Forward => fft::forward(grid, c),
            Direction::Inverse => fft::inverse(grid, c),
        }
    }
    Ok(out)
}
