use std::f64::consts::PI;

use crate::error::{LabError, Result};

/// Periodic box [0, L)^3 with n modes per axis.
///
/// The Nyquist index n/2 is assigned wavenumber 0 so that index negation is an
/// exact involution on wavenumbers; coefficients there are kept at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3 {
    n: usize,
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(LabError::Argument(format!(
                "grid n must be even and >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(LabError::Argument(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Grid3 { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing of the wavenumber lattice, 2π/L.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    #[inline]
    pub fn centered(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else if i == n / 2 {
            0
        } else {
            i - n
        }
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    #[inline]
    pub fn wavenumber_1d(&self, i: usize) -> f64 {
        self.dk() * self.centered(i) as f64
    }

    pub fn grid_wavenumber(&self, index: [usize; 3]) -> Result<[f64; 3]> {
        if index.iter().any(|&i| i >= self.n) {
            return Err(LabError::Range { index, n: self.n });
        }
        Ok(index.map(|i| self.wavenumber_1d(i)))
    }

    #[inline]
    pub fn flat(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n + i[1]) * self.n + i[2]
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        self.unflat(idx).map(|i| self.wavenumber_1d(i))
    }

    #[inline]
    pub fn integer_mode(&self, idx: usize) -> [i64; 3] {
        self.unflat(idx).map(|i| self.centered(i))
    }

    /// Flat index of the mode −k.
    #[inline]
    pub fn neg(&self, idx: usize) -> usize {
        let n = self.n;
        self.flat(self.unflat(idx).map(|i| (n - i) % n))
    }

    #[inline]
    pub fn touches_nyquist(&self, idx: usize) -> bool {
        self.unflat(idx).iter().any(|&i| self.is_nyquist(i))
    }

    /// 2/3 rule: keep 3|k_i| < n on every axis.
    #[inline]
    pub fn dealias_keep(&self, idx: usize) -> bool {
        let n = self.n as i64;
        !self.touches_nyquist(idx) && self.integer_mode(idx).iter().all(|&k| 3 * k.abs() < n)
    }

    /// Physical coordinate of grid point i along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.unflat(idx).map(|i| self.coordinate(i))
    }

    /// Largest |ξ| on one axis (excluding Nyquist).
    pub fn max_axis_wavenumber(&self) -> f64 {
        self.dk() * (self.n / 2 - 1) as f64
    }
}

#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub fn horizontal_norm(v: [f64; 3]) -> f64 {
    v[0].hypot(v[1])
}
