use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI};

use crate::error::{LabError, Result};

/// max f₁ = f₁(1/√2) = 2/(3√3).
pub const CRITICAL_VALUE: f64 = 0.384_900_179_459_750_5;
/// argmax f₁.
pub const CRITICAL_POINT: f64 = FRAC_1_SQRT_2;

/// f₁(x) = x/(x²+1)^{3/2} and its first four derivatives.
pub fn f1_eval(x: f64, order: usize) -> Result<f64> {
    let q = 1.0 + x * x;
    let x2 = x * x;
    Ok(match order {
        0 => x / q.powf(1.5),
        1 => (1.0 - 2.0 * x2) / q.powf(2.5),
        2 => 3.0 * x * (2.0 * x2 - 3.0) / q.powf(3.5),
        3 => -3.0 * (8.0 * x2 * x2 - 24.0 * x2 + 3.0) / q.powf(4.5),
        4 => 15.0 * x * (8.0 * x2 * x2 - 40.0 * x2 + 15.0) / q.powf(5.5),
        _ => return Err(LabError::Argument(format!("derivative order {order} > 4"))),
    })
}

#[inline]
pub(crate) fn f1(x: f64) -> f64 {
    x / (1.0 + x * x).powf(1.5)
}

#[inline]
pub(crate) fn f1_prime(x: f64) -> f64 {
    (1.0 - 2.0 * x * x) / (1.0 + x * x).powf(2.5)
}

/// f₁′(x) − 1 = (−2x² − ((1+x²)^{5/2} − 1))/(1+x²)^{5/2}, without cancellation near 0.
pub(crate) fn f1_prime_minus_one(x: f64) -> f64 {
    let w = x * x;
    let lift = (2.5 * w.ln_1p()).exp_m1();
    (-2.0 * w - lift) / (1.0 + lift)
}

#[inline]
pub(crate) fn f1_second(x: f64) -> f64 {
    3.0 * x * (2.0 * x * x - 3.0) / (1.0 + x * x).powf(3.5)
}

/// f_α(x) = αx/(x²+α²)^{3/2}, with f_α(x) = f₁(x/α)/α.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseProfile {
    pub alpha: f64,
}

impl PhaseProfile {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::Argument(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(PhaseProfile { alpha })
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = self.alpha;
        a * x / (x * x + a * a).powf(1.5)
    }

    /// k-th derivative, from the f₁ table by the chain rule: f_α^{(k)}(x) = α^{−1−k} f₁^{(k)}(x/α).
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        Ok(f1_eval(x / self.alpha, order)? / self.alpha.powi(1 + order as i32))
    }

    pub fn max_value(&self) -> f64 {
        CRITICAL_VALUE / self.alpha
    }

    pub fn argmax(&self) -> f64 {
        CRITICAL_POINT * self.alpha
    }
}

/// Roots 0 < z₁(y) < 1/√2 < z₂(y) of f₁(x) = y.
///
/// With X = 1+x² the equation is X³ − X/y² + 1/y² = 0, solved by the
/// trigonometric Cardan formula. Writing s = (3√3/2)y and a = arcsin(s)/3, the
/// textbook roots become X = 1/(1 − (4/3)sin²a_k) with a_k ∈ {a, π/3 − a},
/// and 1 − (4/3)sin²b = (4/3)sin(π/3−b)sin(π/3+b) removes the cancellation
/// in X − 1 that ruins the arccos/cos form for small y.
pub fn cardan_roots(y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0 && y < CRITICAL_VALUE) {
        return Err(LabError::Domain(format!("y = {y} outside (0, 2/(3√3))")));
    }
    let s = 1.5 * 3f64.sqrt() * y;
    Ok(roots_from_s(s, 1.0 - s))
}

/// Same roots from the deficit η = 2/(3√3) − y, accurate when η is tiny.
pub fn cardan_roots_below_critical(eta: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eta < CRITICAL_VALUE) {
        return Err(LabError::Domain(format!(
            "eta = {eta} outside (0, 2/(3√3))"
        )));
    }
    let delta = 1.5 * 3f64.sqrt() * eta;
    Ok(roots_from_s(1.0 - delta, delta))
}

fn roots_from_s(s: f64, deficit: f64) -> (f64, f64) {
    // arcsin(1−δ) = π/2 − 2 arcsin(√(δ/2)) keeps digits near the double root
    let asin = if s < 0.5 {
        s.asin()
    } else {
        FRAC_PI_2 - 2.0 * (0.5 * deficit).sqrt().asin()
    };
    let a = asin / 3.0;
    let sa = a.sin();
    let z1 = sa / ((FRAC_PI_3 - a).sin() * (FRAC_PI_3 + a).sin()).sqrt();
    let b = FRAC_PI_3 - a;
    let z2 = b.sin() / (sa * (2.0 * FRAC_PI_3 - a).sin()).sqrt();
    (z1, z2)
}

/// The arccos/cos form exactly as usually printed; loses digits as y → 0.
pub fn cardan_roots_textbook(y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0 && y < CRITICAL_VALUE) {
        return Err(LabError::Domain(format!("y = {y} outside (0, 2/(3√3))")));
    }
    let scale = 2.0 / (y * 3f64.sqrt());
    let phi = (-1.5 * 3f64.sqrt() * y).acos() / 3.0;
    let x1 = scale * phi.cos();
    let x3 = scale * (phi + 4.0 * PI / 3.0).cos();
    Ok(((x3 - 1.0).sqrt(), (x1 - 1.0).sqrt()))
}

/// Which asymptotic expansion to test. `Dl0` expansions are in y → 0,
/// `Dl2` expansions in η → 0 with y = 2/(3√3) − η.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AsymptoticKind {
    Z1Dl0,
    Z2Dl0,
    F1pZ1Dl0,
    F1pZ2Dl0,
    Z1Dl2,
    Z2Dl2,
    F1pZ1Dl2,
    F1pZ2Dl2,
}

impl AsymptoticKind {
    pub const ALL: [AsymptoticKind; 8] = [
        AsymptoticKind::Z1Dl0,
        AsymptoticKind::Z2Dl0,
        AsymptoticKind::F1pZ1Dl0,
        AsymptoticKind::F1pZ2Dl0,
        AsymptoticKind::Z1Dl2,
        AsymptoticKind::Z2Dl2,
        AsymptoticKind::F1pZ1Dl2,
        AsymptoticKind::F1pZ2Dl2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AsymptoticKind::Z1Dl0 => "z1_DL0",
            AsymptoticKind::Z2Dl0 => "z2_DL0",
            AsymptoticKind::F1pZ1Dl0 => "f1p_z1_DL0",
            AsymptoticKind::F1pZ2Dl0 => "f1p_z2_DL0",
            AsymptoticKind::Z1Dl2 => "z1_DL2",
            AsymptoticKind::Z2Dl2 => "z2_DL2",
            AsymptoticKind::F1pZ1Dl2 => "f1p_z1_DL2",
            AsymptoticKind::F1pZ2Dl2 => "f1p_z2_DL2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// 3^{5/4}/(2√2), the η^{1/2} coefficient of both roots near the double root.
pub fn dl2_root_coefficient() -> f64 {
    3f64.powf(1.25) / (2.0 * 2f64.sqrt())
}

/// (exact − expansion)/(scale of the first omitted order).
///
/// The ratio tends to 0 with the argument when the expansion is right. The
/// η coefficient shared by both roots near the double root is b/(2a²) for
/// f₁ ≈ 2/(3√3) + a h² + b h³, i.e. 7√3/(8√2); the y coefficient of f₁′(z₂(y))
/// is −3/4.
pub fn asymptotic_residual(kind: AsymptoticKind, arg: f64) -> Result<f64> {
    if !(arg > 0.0 && arg <= 0.05) {
        return Err(LabError::Domain(format!(
            "argument {arg} outside (0, 0.05]"
        )));
    }
    let sq3 = 3f64.sqrt();
    let sq2 = 2f64.sqrt();
    let eta_coef = 7.0 * sq3 / (8.0 * sq2);
    let slope = 4.0 * sq2 / 3f64.powf(1.25);
    let k = dl2_root_coefficient();
    Ok(match kind {
        AsymptoticKind::Z1Dl0
        | AsymptoticKind::Z2Dl0
        | AsymptoticKind::F1pZ1Dl0
        | AsymptoticKind::F1pZ2Dl0 => {
            let y = arg;
            let (z1, z2) = cardan_roots(y)?;
            match kind {
                AsymptoticKind::Z1Dl0 => (z1 - y * (1.0 + 1.5 * y * y)) / y.powi(3),
                AsymptoticKind::Z2Dl0 => {
                    let series = 1.0 - 0.75 * y - 15.0 / 32.0 * y * y - 77.0 / 128.0 * y.powi(3);
                    (z2 - series / y.sqrt()) / y.powf(2.5)
                }
                AsymptoticKind::F1pZ1Dl0 => {
                    let series = -4.5 * y * y - 33.0 / 8.0 * y.powi(4);
                    (f1_prime_minus_one(z1) - series) / y.powi(4)
                }
                _ => {
                    let series = -2.0 * y.powf(1.5) * (1.0 - 0.75 * y - 27.0 / 32.0 * y * y);
                    (f1_prime(z2) - series) / y.powf(3.5)
                }
            }
        }
        _ => {
            let eta = arg;
            let (z1, z2) = cardan_roots_below_critical(eta)?;
            let r = eta.sqrt();
            match kind {
                AsymptoticKind::Z1Dl2 => (z1 - (CRITICAL_POINT - k * r + eta_coef * eta)) / eta,
                AsymptoticKind::Z2Dl2 => (z2 - (CRITICAL_POINT + k * r + eta_coef * eta)) / eta,
                AsymptoticKind::F1pZ1Dl2 => (f1_prime(z1) - slope * r) / r,
                _ => (f1_prime(z2) + slope * r) / r,
            }
        }
    })
}
