use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::composite_gauss;
use crate::error::{LabError, Result};
use crate::spectral_core::chi;
use crate::wave_algebra::{ModeGeometry, PhysicsParams, TruncationWindow};

/// Which oscillatory kernel a computation refers to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelVariant {
    /// K₀(σ)(x) = ∫ e^{ix·ξ + iσb(ξ)} φ₁(|ξ|) dξ.
    K0NuEqual { sigma: f64 },
    /// K_{ε,t,t′}: heat-damped, exact eigenvalue phase, window C_{r/2,2R}.
    KepsNuDistinct {
        epsilon: f64,
        t: f64,
        t_prime: f64,
        nu: f64,
        nu_prime: f64,
        r: f64,
        big_r: f64,
    },
}

/// Quadrature and sup-search settings shared by the kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub nodes_per_oscillation: f64,
    pub min_nodes: usize,
    /// Cap on (radial nodes) × (angular nodes) for one evaluation.
    pub node_budget: usize,
    pub radial_samples: usize,
    pub angle_samples: usize,
    pub x_min: f64,
    /// Largest |x| searched. The degenerate stationary set of σb sits over
    /// x = 0 (b is maximal on the whole equator ξ₃ = 0), so the sup lives near
    /// the origin; wide scans to |x| = σ/2 agree up to σ = 4096.
    pub x_max: f64,
    pub refine_iterations: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            nodes_per_oscillation: 8.0,
            min_nodes: 256,
            node_budget: 40_000_000,
            radial_samples: 64,
            angle_samples: 5,
            x_min: 1e-2,
            x_max: 16.0,
            refine_iterations: 30,
        }
    }
}

impl KernelSpec {
    /// Nodes for a phase that varies by `range` radians along one axis:
    /// at least `nodes_per_oscillation` per period and 8√range.
    pub fn nodes_for(&self, range: f64) -> usize {
        let by_period = (self.nodes_per_oscillation * range / TAU).ceil() as usize;
        let by_sqrt = (8.0 * range.sqrt()).ceil() as usize;
        self.min_nodes.max(by_period).max(by_sqrt)
    }
}

/// Location and size of a kernel supremum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSup {
    pub value: f64,
    /// (x₁, x₃) with x₂ = 0, x₃ ≥ 0.
    pub at: [f64; 2],
    pub evaluations: usize,
}

/// φ₁: 1 on 3/4 ≤ k ≤ 8/3, 0 outside 1/2 < k < 3, smooth.
pub fn phi1(k: f64) -> f64 {
    let inner = if k >= 0.75 {
        1.0
    } else if k <= 0.5 {
        0.0
    } else {
        chi(2.0 - 2.0 * k)
    };
    let outer = if k <= 8.0 / 3.0 {
        1.0
    } else {
        chi(0.5 + 1.5 * (k - 8.0 / 3.0))
    };
    inner * outer
}

/// b(ξ) = |ξ_h|/|ξ|.
pub fn phase_b(xi: [f64; 3]) -> f64 {
    xi[0].hypot(xi[1]) / (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

/// Closed-form Hessian D²b(ξ), ξ_h ≠ 0.
pub fn phase_hessian(xi: [f64; 3]) -> Result<[[f64; 3]; 3]> {
    let [x1, x2, x3] = xi;
    let h2 = x1 * x1 + x2 * x2;
    if h2 == 0.0 {
        return Err(LabError::DegenerateLine(
            "b is not differentiable on xi_h = 0".into(),
        ));
    }
    let k2 = h2 + x3 * x3;
    let scale = 1.0 / (h2.powf(1.5) * k2.powf(2.5));
    let off = -x1 * x2 * x3 * x3 * (k2 + 3.0 * h2);
    let mix = 3.0 * h2 - k2;
    let m = [
        [
            x3 * x3 * (x2 * x2 * k2 - 3.0 * x1 * x1 * h2),
            off,
            x1 * x3 * h2 * mix,
        ],
        [
            off,
            x3 * x3 * (x1 * x1 * k2 - 3.0 * x2 * x2 * h2),
            x2 * x3 * h2 * mix,
        ],
        [
            x1 * x3 * h2 * mix,
            x2 * x3 * h2 * mix,
            -h2 * h2 * (3.0 * h2 - 2.0 * k2),
        ],
    ];
    Ok(m.map(|row| row.map(|v| v * scale)))
}

/// Eigenvalues of D²b in closed form, ascending:
/// ξ₃²/(|ξ_h||ξ|³) and −(|ξ_h| ± √(|ξ|²+3ξ₃²))/(2|ξ|³).
pub fn hessian_eigenvalues(xi: [f64; 3]) -> Result<[f64; 3]> {
    let h = xi[0].hypot(xi[1]);
    if h == 0.0 {
        return Err(LabError::DegenerateLine(
            "b is not differentiable on xi_h = 0".into(),
        ));
    }
    let k2 = h * h + xi[2] * xi[2];
    let k3 = k2 * k2.sqrt();
    let root = (k2 + 3.0 * xi[2] * xi[2]).sqrt();
    let mut ev = [
        xi[2] * xi[2] / (h * k3),
        -(h + root) / (2.0 * k3),
        -(h - root) / (2.0 * k3),
    ];
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Nodes (ρ, ξ₃, weight) of a polar tensor rule on k ∈ [k_lo, k_hi], θ ∈ [0, π/2];
/// the weight holds the Jacobian k² sin θ, amplitude and phase factor.
struct CylinderRule {
    rho: Vec<f64>,
    xi3: Vec<f64>,
    w: Vec<Complex64>,
}

impl CylinderRule {
    fn build(
        k_range: (f64, f64),
        nk: usize,
        ntheta: usize,
        amp_phase: &(impl Fn(f64, f64) -> Result<(f64, f64)> + Sync),
    ) -> Result<Self> {
        let (ks, wk) = composite_gauss(k_range.0, k_range.1, nk.div_ceil(16));
        let (ts, wt) = composite_gauss(0.0, FRAC_PI_2, ntheta.div_ceil(16));
        let mut rule = CylinderRule {
            rho: Vec::new(),
            xi3: Vec::new(),
            w: Vec::new(),
        };
        for (&k, &a) in ks.iter().zip(&wk) {
            for (&th, &b) in ts.iter().zip(&wt) {
                let (amp, phase) = amp_phase(k, th)?;
                if amp == 0.0 {
                    continue;
                }
                let (s, c) = th.sin_cos();
                rule.rho.push(k * s);
                rule.xi3.push(k * c);
                rule.w
                    .push(Complex64::from_polar(a * b * k * k * s * amp, phase));
            }
        }
        Ok(rule)
    }

    /// ∫ e^{ix·ξ}(…)dξ at x = (x₁, 0, x₃) for a weight even in ξ₃: the
    /// azimuthal integral gives 2πJ₀(x₁ρ), the ξ₃ symmetry 2cos(x₃ξ₃).
    fn eval(&self, x1: f64, x3: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.w.len() {
            let j = if x1 == 0.0 {
                1.0
            } else {
                libm::j0(x1 * self.rho[i])
            };
            let c = if x3 == 0.0 {
                1.0
            } else {
                (x3 * self.xi3[i]).cos()
            };
            acc += self.w[i] * (j * c);
        }
        acc * (4.0 * PI)
    }
}

fn check_budget(spec: &KernelSpec, nk: usize, nt: usize) -> Result<()> {
    let total = nk.div_ceil(16) * 16 * nt.div_ceil(16) * 16;
    if total > spec.node_budget {
        return Err(LabError::Accuracy {
            estimate: f64::NAN,
            achieved: total as f64,
        });
    }
    Ok(())
}

/// Phase ranges (radial, angular) for e^{ix·ξ + iσ·(angular phase)} on the rule's domain.
fn node_counts(
    spec: &KernelSpec,
    k_range: (f64, f64),
    angular_phase: f64,
    x: f64,
) -> (usize, usize) {
    let nk = spec.nodes_for(2.0 * x * (k_range.1 - k_range.0));
    let nt = spec.nodes_for(angular_phase + 2.0 * x * k_range.1);
    (nk, nt)
}

/// K₀(σ)(x₁, 0, x₃) by polar tensor Gauss–Legendre.
pub fn kernel_k0(sigma: f64, x: [f64; 2], spec: &KernelSpec) -> Result<Complex64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(LabError::Argument(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    Ok(k0_rule(sigma, x[0].hypot(x[1]), spec)?.eval(x[0], x[1]))
}

/// Rule resolving K₀(σ) for every |x| ≤ x_reach.
fn k0_rule(sigma: f64, x_reach: f64, spec: &KernelSpec) -> Result<CylinderRule> {
    let range = (0.5, 3.0);
    let (nk, nt) = node_counts(spec, range, sigma, x_reach);
    check_budget(spec, nk, nt)?;
    CylinderRule::build(range, nk, nt, &|k, th| Ok((phi1(k), sigma * th.sin())))
}

/// sup_x |K₀(σ)(x)|: rotation invariance about the x₃ axis gives x₂ = 0 and
/// x₃ ↦ −x₃ symmetry gives x₃ ≥ 0.
pub fn kernel_k0_sup(sigma: f64, spec: &KernelSpec) -> Result<KernelSup> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(LabError::Argument(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    let rule = k0_rule(sigma, spec.x_max, spec)?;
    sup_search(spec, spec.x_max, |x| Ok(rule.eval(x[0], x[1]).norm()))
}

/// K_{ε,t,t′}(x₁, 0, x₃) = (2π)^{−3} ∫ e^{ix·ξ} e^{−(ν+ν′)(t+t′)|ξ|²/4} e^{i(t−t′)Im λ₃(ε,ξ)} f_{r/2,2R}(ξ) dξ,
/// with Im λ₃ = |ξ_h|/(ε|ξ|) − εD(ε,ξ) taken from the exact square root.
pub fn kernel_keps(
    epsilon: f64,
    t: f64,
    t_prime: f64,
    params: &PhysicsParams,
    window: &TruncationWindow,
    x: [f64; 2],
    spec: &KernelSpec,
) -> Result<Complex64> {
    let p = params.with_epsilon(epsilon);
    let rule = keps_rule(t, t_prime, &p, window, x[0].hypot(x[1]), spec)?;
    Ok(rule.eval(x[0], x[1]) / (TAU * TAU * TAU))
}

fn keps_rule(
    t: f64,
    t_prime: f64,
    p: &PhysicsParams,
    window: &TruncationWindow,
    x_reach: f64,
    spec: &KernelSpec,
) -> Result<CylinderRule> {
    p.validate()?;
    if !(t >= 0.0 && t_prime >= 0.0) {
        return Err(LabError::Argument(format!(
            "times must be >= 0, got t={t}, t'={t_prime}"
        )));
    }
    let wide = window.widened();
    let range = (0.5 * wide.r, 2.0 * wide.big_r);
    let sigma = (t - t_prime).abs() / p.epsilon;
    let (nk, nt) = node_counts(spec, range, sigma, x_reach);
    check_budget(spec, nk, nt)?;
    let damping = 0.25 * (p.nu + p.nu_prime) * (t + t_prime);
    CylinderRule::build(range, nk, nt, &|k, th| {
        let xi = [k * th.sin(), 0.0, k * th.cos()];
        let amp = wide.multiplier(xi) * (-damping * k * k).exp();
        if amp == 0.0 {
            return Ok((0.0, 0.0));
        }
        let g = ModeGeometry::new(xi, p)?;
        let freq = if p.nu_equal() {
            g.omega
        } else if g.discriminant < 0.0 {
            g.omega * g.s()
        } else {
            return Err(LabError::Domain(format!(
                "window contains non-oscillating mode |xi_h|={}, |xi|={k}",
                xi[0]
            )));
        };
        Ok((amp, (t - t_prime) * freq))
    })
}

/// sup_x |K_{ε,t,t′}(x)| over x₂ = 0, x₃ ≥ 0 (rotation about the x₃ axis and
/// ξ₃ ↦ −ξ₃). The rescaling x₃ ↦ (t−t′)x₃/ε leaves the supremum unchanged, so
/// the search runs in x directly. Needs 3M + m < 1 and ε ≤ ε₁.
pub fn kernel_keps_sup(
    epsilon: f64,
    t: f64,
    t_prime: f64,
    params: &PhysicsParams,
    window: &TruncationWindow,
    spec: &KernelSpec,
) -> Result<KernelSup> {
    let p = params.with_epsilon(epsilon);
    p.validate()?;
    if window.m.is_finite() && !window.admissible(&p) {
        return Err(LabError::Argument(format!(
            "window (m={}, M={}) is not admissible at epsilon={epsilon}",
            window.m, window.big_m
        )));
    }
    let rule = keps_rule(t, t_prime, &p, window, spec.x_max, spec)?;
    let norm = 1.0 / (TAU * TAU * TAU);
    sup_search(
        spec,
        spec.x_max,
        |x| Ok(norm * rule.eval(x[0], x[1]).norm()),
    )
}

/// Coarse search over radii log-spaced in [x_min, x_max] (plus the origin)
/// along `angle_samples` directions of the quarter plane x₁, x₃ ≥ 0, then
/// golden-section refinement in radius and in angle around the best.
fn sup_search(
    spec: &KernelSpec,
    x_max: f64,
    f: impl Fn([f64; 2]) -> Result<f64> + Sync,
) -> Result<KernelSup> {
    let to_x = |r: f64, a: f64| [r * a.cos(), r * a.sin()];
    let radii = super::fit::log_spaced(spec.x_min, x_max, spec.radial_samples.max(2));
    let na = spec.angle_samples.max(1);
    let angles: Vec<f64> = (0..na)
        .map(|i| {
            if na == 1 {
                0.0
            } else {
                FRAC_PI_2 * i as f64 / (na - 1) as f64
            }
        })
        .collect();
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for &a in &angles {
        for &r in &radii {
            cands.push((r, a));
        }
    }
    let vals = cands
        .par_iter()
        .map(|&(r, a)| f(to_x(r, a)))
        .collect::<Result<Vec<f64>>>()?;
    let mut evaluations = vals.len();
    let (bi, _) =
        vals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let (mut br, mut ba) = cands[bi];
    let mut best = vals[bi];

    // radial bracket: neighbouring grid radii (origin bracket is [0, x_min])
    let pos = radii.iter().position(|&r| r == br);
    let (rlo, rhi) = match pos {
        None => (0.0, radii[0]),
        Some(i) => (
            if i == 0 { 0.0 } else { radii[i - 1] },
            radii[(i + 1).min(radii.len() - 1)],
        ),
    };
    let (r, v, n) = golden_max(|r| f(to_x(r, ba)), rlo, rhi, spec.refine_iterations)?;
    evaluations += n;
    if v > best {
        best = v;
        br = r;
    }
    if br > 0.0 && na > 1 {
        let step = FRAC_PI_2 / (na - 1) as f64;
        let (a, v, n) = golden_max(
            |a| f(to_x(br, a)),
            (ba - step).max(0.0),
            (ba + step).min(FRAC_PI_2),
            spec.refine_iterations,
        )?;
        evaluations += n;
        if v > best {
            best = v;
            ba = a;
        }
    }
    Ok(KernelSup {
        value: best,
        at: to_x(br, ba),
        evaluations,
    })
}

fn golden_max(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<(f64, f64, usize)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut n = 2;
    for _ in 0..iters {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
        n += 1;
    }
    Ok(if fc > fd { (c, fc, n) } else { (d, fd, n) })
}

/// Supremum for either kernel family.
pub fn kernel_sup(variant: &KernelVariant, spec: &KernelSpec) -> Result<KernelSup> {
    match *variant {
        KernelVariant::K0NuEqual { sigma } => kernel_k0_sup(sigma, spec),
        KernelVariant::KepsNuDistinct {
            epsilon,
            t,
            t_prime,
            nu,
            nu_prime,
            r,
            big_r,
        } => {
            let p = PhysicsParams::new(nu, nu_prime, epsilon)?;
            let window = TruncationWindow::new(r, big_r)?;
            kernel_keps_sup(epsilon, t, t_prime, &p, &window, spec)
        }
    }
}
