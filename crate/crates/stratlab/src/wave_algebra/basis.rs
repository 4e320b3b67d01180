use num_complex::Complex64;

use super::linalg::{c, inverse3, matmul3, norm1_3, Mat3, Mat4, Vec4};
use super::operator::{e_wave, eigen_closed_form, v2, Regime};
use super::params::PhysicsParams;
use crate::error::{LabError, Result};
use crate::spectral_core::{C64, ZERO};

/// Largest tolerated condition number of the per-mode eigenbasis.
pub const MAX_CONDITION: f64 = 1e8;

/// The divergence-free subspace at one mode (ξ_h ≠ 0) in the orthonormal
/// frame {V₂, e_wave, e₄}, with the eigenbasis {V₂, V₃, V₄} written in it.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    pub frame: [[f64; 4]; 3],
    /// Column j holds the frame coordinates of V_{j+2}.
    pub m: Mat3,
    pub minv: Mat3,
    pub lambdas: [C64; 3],
    pub regime: Regime,
    pub condition: f64,
}

impl ModeBasis {
    pub fn new(xi: [f64; 3], p: &PhysicsParams) -> Result<Self> {
        let es = eigen_closed_form(xi, p)?;
        let frame = [v2(xi), e_wave(xi), [0.0, 0.0, 0.0, 1.0]];
        let mut m = [[ZERO; 3]; 3];
        for (j, v) in es.vectors[1..].iter().enumerate() {
            for (i, q) in frame.iter().enumerate() {
                m[i][j] = (0..4).map(|r| v[r] * q[r]).sum();
            }
        }
        let minv = inverse3(&m).ok_or(LabError::Conditioning {
            mode: xi,
            condition: f64::INFINITY,
        })?;
        let condition = norm1_3(&m) * norm1_3(&minv);
        if !(condition <= MAX_CONDITION) {
            return Err(LabError::Conditioning {
                mode: xi,
                condition,
            });
        }
        Ok(ModeBasis {
            frame,
            m,
            minv,
            lambdas: [es.lambdas[1], es.lambdas[2], es.lambdas[3]],
            regime: es.regime,
            condition,
        })
    }

    /// Frame coordinates; anything outside the divergence-free subspace is dropped.
    #[inline]
    pub fn coords(&self, f: &Vec4) -> [C64; 3] {
        self.frame
            .map(|q| f[0] * q[0] + f[1] * q[1] + f[2] * q[2] + f[3] * q[3])
    }

    #[inline]
    pub fn from_coords(&self, x: &[C64; 3]) -> Vec4 {
        std::array::from_fn(|r| {
            x[0] * self.frame[0][r] + x[1] * self.frame[1][r] + x[2] * self.frame[2][r]
        })
    }

    /// Coefficients a_k of f = a₂V₂ + a₃V₃ + a₄V₄.
    pub fn amplitudes(&self, f: &Vec4) -> [C64; 3] {
        let x = self.coords(f);
        std::array::from_fn(|i| {
            self.minv[i][0] * x[0] + self.minv[i][1] * x[1] + self.minv[i][2] * x[2]
        })
    }

    /// ℙ_k f = a_k V_k for k ∈ {2, 3, 4}.
    pub fn component(&self, f: &Vec4, k: usize) -> Vec4 {
        let a = self.amplitudes(f)[k - 2];
        let col = [
            self.m[0][k - 2] * a,
            self.m[1][k - 2] * a,
            self.m[2][k - 2] * a,
        ];
        self.from_coords(&col)
    }

    /// exp(t𝔹) on the divergence-free subspace (zero on its complement).
    pub fn propagator(&self, t: f64) -> Mat4 {
        let mut d = [[ZERO; 3]; 3];
        for i in 0..3 {
            d[i][i] = (self.lambdas[i] * t).exp();
        }
        let p = matmul3(&matmul3(&self.m, &d), &self.minv);
        let mut out = [[ZERO; 4]; 4];
        for r in 0..4 {
            for s in 0..4 {
                let mut acc = ZERO;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += self.frame[i][r] * p[i][j] * self.frame[j][s];
                    }
                }
                out[r][s] = acc;
            }
        }
        out
    }
}

/// Per-mode Leray projector on the velocity block, identity on θ.
pub fn leray_matrix(xi: [f64; 3]) -> Mat4 {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let mut out = [[ZERO; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            out[i][j] = c(if k2 == 0.0 {
                delta
            } else {
                delta - xi[i] * xi[j] / k2
            });
        }
    }
    out[3][3] = Complex64::new(1.0, 0.0);
    out
}
