use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::spectral_core::{fft, Grid3, SpectralField4, C64, ZERO};

/// Temperature profile θ(x₃) on a 1-D periodic grid of n points, stored as
/// normalised Fourier coefficients in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct Heat1DState {
    pub coeffs: Vec<C64>,
    pub box_length: f64,
    pub nu_prime: f64,
    pub time: f64,
}

impl Heat1DState {
    pub fn new(coeffs: Vec<C64>, box_length: f64, nu_prime: f64) -> Result<Self> {
        let n = coeffs.len();
        if n < 2 || n % 2 != 0 {
            return Err(LabError::Argument(format!(
                "1-D grid length must be even and >= 2, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(LabError::Argument(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        if !(nu_prime.is_finite() && nu_prime >= 0.0) {
            return Err(LabError::Argument(format!(
                "nu_prime must be nonnegative, got {nu_prime}"
            )));
        }
        let mut coeffs = coeffs;
        coeffs[n / 2] = ZERO;
        Ok(Heat1DState {
            coeffs,
            box_length,
            nu_prime,
            time: 0.0,
        })
    }

    /// Samples f at x₃ = jL/n and transforms.
    pub fn from_profile(
        n: usize,
        box_length: f64,
        nu_prime: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let dx = box_length / n.max(1) as f64;
        let mut buf: Vec<C64> = (0..n).map(|j| C64::new(f(j as f64 * dx), 0.0)).collect();
        fft::forward_1d(&mut buf);
        Self::new(buf, box_length, nu_prime)
    }

    /// The θ component of a field along the line ξ_h = 0.
    pub fn from_field(field: &SpectralField4, nu_prime: f64) -> Result<Self> {
        let g = field.grid();
        let coeffs = (0..g.n())
            .map(|i3| field.comps[3][g.flat([0, 0, i3])])
            .collect();
        Self::new(coeffs, g.box_length(), nu_prime)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// ξ₃ of coefficient i (Nyquist mapped to 0, as on the 3-D grid).
    pub fn wavenumber(&self, i: usize) -> f64 {
        let n = self.n();
        let k = if i < n / 2 {
            i as i64
        } else if i == n / 2 {
            0
        } else {
            i as i64 - n as i64
        };
        2.0 * PI / self.box_length * k as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        fft::inverse_1d(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// ‖θ‖_{Ḣ^s}, mean mode excluded.
    pub fn sobolev(&self, s: f64) -> f64 {
        (0..self.n())
            .filter_map(|i| {
                let k = self.wavenumber(i).abs();
                (k > 0.0).then(|| k.powf(2.0 * s) * self.coeffs[i].norm_sqr())
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| (self.coeffs[i] - self.coeffs[(n - i) % n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// The four-component field (0, 0, 0, θ(x₃)) on a 3-D grid of the same size.
    pub fn embed(&self, grid: &Grid3) -> Result<SpectralField4> {
        if grid.n() != self.n() {
            return Err(LabError::Argument(format!(
                "profile has {} points, grid has n = {}",
                self.n(),
                grid.n()
            )));
        }
        if (grid.box_length() - self.box_length).abs() > 1e-12 * self.box_length {
            return Err(LabError::Argument(
                "profile and grid have different box lengths".into(),
            ));
        }
        let mut out = SpectralField4::zeros(*grid);
        for (i3, &c) in self.coeffs.iter().enumerate() {
            out.comps[3][grid.flat([0, 0, i3])] = c;
        }
        Ok(out)
    }
}

/// Exact heat flow over an elapsed time t: each coefficient is multiplied by
/// e^{−ν′ξ₃²t}.
pub fn heat1d_solve(initial: &Heat1DState, t: f64) -> Result<Heat1DState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LabError::Argument(format!(
            "heat flow needs t >= 0, got {t}"
        )));
    }
    let mut out = initial.clone();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        let k = initial.wavenumber(i);
        *c *= (-initial.nu_prime * k * k * t).exp();
    }
    out.time = initial.time + t;
    Ok(out)
}

/// Samples of the heat flow from `initial` at absolute times `times`.
pub fn heat1d_series(initial: &Heat1DState, times: &[f64]) -> Result<Vec<Heat1DState>> {
    times
        .iter()
        .map(|&t| heat1d_solve(initial, t - initial.time))
        .collect()
}
