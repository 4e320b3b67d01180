use crate::error::{LabError, Result};

/// Viscosity ν, diffusivity ν′ and Froude number ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicsParams {
    pub nu: f64,
    pub nu_prime: f64,
    pub epsilon: f64,
}

impl PhysicsParams {
    pub fn new(nu: f64, nu_prime: f64, epsilon: f64) -> Result<Self> {
        let p = PhysicsParams {
            nu,
            nu_prime,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("nu", self.nu),
            ("nu_prime", self.nu_prime),
            ("epsilon", self.epsilon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::Argument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        PhysicsParams { epsilon, ..*self }
    }

    /// ν₀ = min(ν, ν′).
    pub fn nu0(&self) -> f64 {
        self.nu.min(self.nu_prime)
    }

    pub fn nu_equal(&self) -> bool {
        (self.nu - self.nu_prime).abs() <= 1e-14 * self.nu.abs().max(self.nu_prime.abs())
    }
}
