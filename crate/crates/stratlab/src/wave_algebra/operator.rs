use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::linalg::{c, charpoly4, null_vector4, poly_roots, refine_eigenpair, Mat4, Vec4};
use super::params::PhysicsParams;
use crate::error::{LabError, Result};
use crate::spectral_core::{C64, ZERO};

/// 𝔹(ξ, ε): Fourier symbol of L − (1/ε)ℙ𝓑. All entries are real.
pub fn wave_matrix(xi: [f64; 3], p: &PhysicsParams) -> Result<Mat4> {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if k2 == 0.0 {
        return Err(LabError::SingularMode);
    }
    let h2 = xi[0] * xi[0] + xi[1] * xi[1];
    let inv_eps = 1.0 / p.epsilon;
    let mut m = [[ZERO; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let proj = if i == j {
                k2 - xi[i] * xi[i]
            } else {
                -xi[i] * xi[j]
            };
            m[i][j] = c(-p.nu * proj);
        }
    }
    m[0][3] = c(xi[0] * xi[2] * inv_eps / k2);
    m[1][3] = c(xi[1] * xi[2] * inv_eps / k2);
    m[2][3] = c(-h2 * inv_eps / k2);
    m[3][2] = c(inv_eps);
    m[3][3] = c(-p.nu_prime * k2);
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    NuEqual,
    NuDistinctAdmissible,
    Fallback,
}

/// Eigenvalues λ₁..λ₄ and eigenvectors V₁..V₄ of 𝔹(ξ, ε).
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub lambdas: [C64; 4],
    pub vectors: [Vec4; 4],
    pub regime: Regime,
    /// (ν−ν′)²|ξ|⁴ − 4|ξ_h|²/(ε²|ξ|²)
    pub discriminant: f64,
    /// D(ε, ξ) in λ₃ = −(ν+ν′)|ξ|²/2 + i|ξ_h|/(ε|ξ|) − iεD.
    pub correction: Option<f64>,
}

/// Quantities shared by the closed forms at one mode.
#[derive(Clone, Copy, Debug)]
pub struct ModeGeometry {
    pub k2: f64,
    pub k: f64,
    pub h: f64,
    /// |ξ_h|/(ε|ξ|)
    pub omega: f64,
    /// (ν−ν′)ε|ξ|³/(2|ξ_h|)
    pub a: f64,
    pub discriminant: f64,
}

impl ModeGeometry {
    pub fn new(xi: [f64; 3], p: &PhysicsParams) -> Result<Self> {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            return Err(LabError::SingularMode);
        }
        let h = xi[0].hypot(xi[1]);
        if h == 0.0 {
            return Err(LabError::DegenerateLine(
                "V2 and V± are undefined for xi_h = 0".into(),
            ));
        }
        let k = k2.sqrt();
        let dnu = p.nu - p.nu_prime;
        let discriminant = dnu * dnu * k2 * k2 - 4.0 * h * h / (p.epsilon * p.epsilon * k2);
        Ok(ModeGeometry {
            k2,
            k,
            h,
            omega: h / (p.epsilon * k),
            a: if p.nu_equal() {
                0.0
            } else {
                dnu * p.epsilon * k2 * k / (2.0 * h)
            },
            discriminant,
        })
    }

    pub fn regime(&self, p: &PhysicsParams) -> Regime {
        if p.nu_equal() {
            Regime::NuEqual
        } else if self.discriminant < 0.0 {
            Regime::NuDistinctAdmissible
        } else {
            Regime::Fallback
        }
    }

    /// S = √(1 − a²) for a² < 1.
    pub fn s(&self) -> f64 {
        ((1.0 - self.a) * (1.0 + self.a)).sqrt()
    }
}

/// V₂ = (−ξ₂, ξ₁, 0, 0)/|ξ_h|.
pub fn v2(xi: [f64; 3]) -> [f64; 4] {
    let h = xi[0].hypot(xi[1]);
    [-xi[1] / h, xi[0] / h, 0.0, 0.0]
}

/// Unit vector (ξ₁ξ₃, ξ₂ξ₃, −|ξ_h|², 0)/(|ξ||ξ_h|), the velocity direction of the waves.
pub fn e_wave(xi: [f64; 3]) -> [f64; 4] {
    let h = xi[0].hypot(xi[1]);
    let k = (h * h + xi[2] * xi[2]).sqrt();
    let d = k * h;
    [xi[0] * xi[2] / d, xi[1] * xi[2] / d, -h * h / d, 0.0]
}

pub fn eigen_closed_form(xi: [f64; 3], p: &PhysicsParams) -> Result<Eigensystem> {
    let g = ModeGeometry::new(xi, p)?;
    let regime = g.regime(p);
    if regime == Regime::Fallback {
        return eigen_numeric(xi, p, g.discriminant);
    }
    let sum = p.nu + p.nu_prime;
    let s = if regime == Regime::NuEqual {
        1.0
    } else {
        g.s()
    };
    let re = -0.5 * sum * g.k2;
    let l3 = Complex64::new(re, g.omega * s);
    let lambdas = [ZERO, c(-p.nu * g.k2), l3, l3.conj()];

    let coef = p.epsilon * p.nu * p.nu_prime * g.k2;
    let horiz = coef + 1.0 / (p.epsilon * g.k2);
    let v1 = [
        c(horiz * xi[0]),
        c(horiz * xi[1]),
        c(coef * xi[2]),
        c(p.nu * xi[2]),
    ];
    let v2 = v2(xi).map(c);
    let e = e_wave(xi);
    let vpm = |eta: f64| -> Vec4 {
        [
            c(e[0] * FRAC_1_SQRT_2),
            c(e[1] * FRAC_1_SQRT_2),
            c(e[2] * FRAC_1_SQRT_2),
            Complex64::new(g.a, eta * s) * FRAC_1_SQRT_2,
        ]
    };
    let correction = if regime == Regime::NuEqual {
        0.0
    } else {
        let dnu = p.nu - p.nu_prime;
        dnu * dnu * g.k2 * g.k2 * g.k / (4.0 * g.h * (1.0 + s))
    };
    Ok(Eigensystem {
        lambdas,
        vectors: [v1, v2, vpm(1.0), vpm(-1.0)],
        regime,
        discriminant: g.discriminant,
        correction: Some(correction),
    })
}

/// Generic diagonalisation used where the closed forms do not apply.
///
/// Eigenvalues are ordered to mirror the closed form: the root nearest 0,
/// then the one nearest −ν|ξ|², then the remaining two by decreasing
/// imaginary part (decreasing real part when both are real).
pub fn eigen_numeric(xi: [f64; 3], p: &PhysicsParams, discriminant: f64) -> Result<Eigensystem> {
    let m = wave_matrix(xi, p)?;
    let mut roots = poly_roots(&charpoly4(&m));
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let take_nearest = |target: C64, roots: &mut Vec<C64>| {
        let (i, _) = roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
            .unwrap();
        roots.remove(i)
    };
    let l1 = take_nearest(ZERO, &mut roots);
    let l2 = take_nearest(c(-p.nu * k2), &mut roots);
    roots.sort_by(|a, b| b.im.total_cmp(&a.im).then(b.re.total_cmp(&a.re)));
    let rough = [l1, l2, roots[0], roots[1]];
    let mut lambdas = rough;
    let mut vectors = [[ZERO; 4]; 4];
    for (k, l) in rough.into_iter().enumerate() {
        let mut shifted = m;
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= l;
        }
        let guess = null_vector4(&shifted);
        let (lr, vr) = refine_eigenpair(&m, l, guess);
        // keep the polish only if it stayed on the same root
        let sep = (0..4)
            .filter(|&j| j != k)
            .map(|j| (rough[j] - l).norm())
            .fold(f64::INFINITY, f64::min);
        if (lr - l).norm() < 0.5 * sep {
            lambdas[k] = lr;
            vectors[k] = vr;
        } else {
            vectors[k] = guess;
        }
    }
    if lambdas
        .iter()
        .chain(vectors.iter().flatten())
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(LabError::Numeric(format!(
            "numerical diagonalisation at xi = {xi:?}"
        )));
    }
    Ok(Eigensystem {
        lambdas,
        vectors,
        regime: Regime::Fallback,
        discriminant,
        correction: None,
    })
}
