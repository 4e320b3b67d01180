use crate::error::{LabError, Result};
use crate::spectral_core::PhysicalField4;

/// Background of the classical Boussinesq system around which (S_ε) is a
/// perturbation: ρ̄_ε(x₃) = ρ̄₀ − x₃/(ε²κ²), P̄_ε = P̄₀ − κ²ρ̄₀x₃ + x₃²/(2ε²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoussinesqFrame {
    pub epsilon: f64,
    pub kappa: f64,
    pub rho0: f64,
    pub p0: f64,
}

impl BoussinesqFrame {
    pub fn new(epsilon: f64, kappa: f64, rho0: f64, p0: f64) -> Result<Self> {
        if !(epsilon > 0.0 && kappa > 0.0 && epsilon.is_finite() && kappa.is_finite()) {
            return Err(LabError::Argument(format!(
                "need epsilon, kappa > 0, got {epsilon}, {kappa}"
            )));
        }
        Ok(BoussinesqFrame {
            epsilon,
            kappa,
            rho0,
            p0,
        })
    }

    pub fn rho_bar(&self, x3: f64) -> f64 {
        self.rho0 - x3 / (self.epsilon * self.kappa).powi(2)
    }

    pub fn p_bar(&self, x3: f64) -> f64 {
        self.p0 - self.kappa * self.kappa * self.rho0 * x3 + x3 * x3 / (2.0 * self.epsilon * self.epsilon)
    }

    /// μ = εκ², with ρ = ρ̄ + θ/μ.
    pub fn mu(&self) -> f64 {
        self.epsilon * self.kappa * self.kappa
    }
}

/// (v, θ) ↦ (v, ρ̄_ε + θ/(εκ²)) at the grid points (x₃ ∈ [0, L)).
pub fn to_boussinesq(u: &PhysicalField4, frame: &BoussinesqFrame) -> PhysicalField4 {
    let g = *u.grid();
    let mut out = u.clone();
    let mu = frame.mu();
    for idx in 0..g.len() {
        let x3 = g.position(idx)[2];
        out.comps[3][idx] = frame.rho_bar(x3) + u.comps[3][idx] / mu;
    }
    out
}

/// Inverse of [`to_boussinesq`].
pub fn from_boussinesq(v: &PhysicalField4, frame: &BoussinesqFrame) -> PhysicalField4 {
    let g = *v.grid();
    let mut out = v.clone();
    let mu = frame.mu();
    for idx in 0..g.len() {
        let x3 = g.position(idx)[2];
        out.comps[3][idx] = mu * (v.comps[3][idx] - frame.rho_bar(x3));
    }
    out
}

/// P = P̄_ε + Φ/ε from the (S_ε) pressure Φ.
pub fn pressure_to_boussinesq(phi: &[f64], x3: &[f64], frame: &BoussinesqFrame) -> Vec<f64> {
    phi.iter()
        .zip(x3)
        .map(|(p, &z)| frame.p_bar(z) + p / frame.epsilon)
        .collect()
}

pub fn pressure_from_boussinesq(p: &[f64], x3: &[f64], frame: &BoussinesqFrame) -> Vec<f64> {
    p.iter()
        .zip(x3)
        .map(|(p, &z)| frame.epsilon * (p - frame.p_bar(z)))
        .collect()
}

/// Largest |θ_back − θ| / max|θ| (and the same for v) over a stored sequence
/// of states after the round trip through the Boussinesq variables.
pub fn roundtrip_error(states: &[PhysicalField4], frame: &BoussinesqFrame) -> f64 {
    let mut worst: f64 = 0.0;
    for u in states {
        let back = from_boussinesq(&to_boussinesq(u, frame), frame);
        for c in 0..4 {
            let scale = u.comps[c].iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
            let err = u.comps[c]
                .iter()
                .zip(&back.comps[c])
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(err / scale);
        }
    }
    worst
}
