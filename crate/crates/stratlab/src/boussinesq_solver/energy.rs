use super::nonlinear::physical4;
use super::simulate::Trajectory;
use crate::error::{LabError, Result};
use crate::spectral_core::{
    to_physical_many, to_spectral_many, trapezoid, SpectralField4, C64, ZERO,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Gronwall constant C₀ used when none is given.
pub const DEFAULT_GRONWALL_CONSTANT: f64 = 1.0;

/// Energy bookkeeping of a trajectory at its sample times.
///
/// For difference runs `a_term`, `b_term`, `c_term` are −(D·∇ṽ^h|D^h),
/// −(D³∂₃θ̃_ε|D⁴) and (G̃|D); they vanish for plain (S_ε) runs.
#[derive(Clone, Debug, Default)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub grad_sq: Vec<f64>,
    /// ν₀∫₀^t‖∇D‖² (trapezoid over the samples).
    pub dissipation: Vec<f64>,
    /// ν‖∇V‖² + ν′‖∇H‖².
    pub viscous: Vec<f64>,
    pub a_term: Vec<f64>,
    pub b_term: Vec<f64>,
    pub c_term: Vec<f64>,
    pub gtilde_l2: Vec<f64>,
    /// ‖∇ṽ^h‖²_{Ḣ^{1/2}}
    pub vh_sq: Vec<f64>,
    /// ‖θ̃_ε‖_{Ḣ¹}
    pub theta_h1: Vec<f64>,
    /// ‖q_ε‖_{L²} from the explicit pressure formula (difference runs only).
    pub pressure_l2: Vec<f64>,
    /// Right side of the a priori estimate with measured ingredients.
    pub bound: Vec<f64>,
    pub gronwall_constant: f64,
}

impl EnergyLedger {
    pub fn total(&self) -> Vec<f64> {
        self.l2_sq
            .iter()
            .zip(&self.dissipation)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Largest relative excess of ‖D‖² + ν₀∫‖∇D‖² over the estimate.
    pub fn bound_excess(&self) -> f64 {
        self.total()
            .iter()
            .zip(&self.bound)
            .map(|(t, b)| (t - b) / b.abs().max(f64::MIN_POSITIVE))
            .fold(f64::MIN, f64::max)
    }

    /// Largest relative increase of ‖D‖² + ν₀∫‖∇D‖² between samples.
    pub fn max_increase(&self) -> f64 {
        let tot = self.total();
        let scale = tot
            .first()
            .copied()
            .unwrap_or(1.0)
            .abs()
            .max(f64::MIN_POSITIVE);
        tot.windows(2)
            .map(|w| (w[1] - w[0]) / scale)
            .fold(f64::MIN, f64::max)
    }

    /// Per interval: ½Δ‖D‖² + ∫(viscous − A − B − C), trapezoid in time,
    /// relative to ‖D(0)‖² + ∫viscous.
    pub fn balance_defects(&self) -> Vec<f64> {
        let scale =
            self.l2_sq.first().copied().unwrap_or(0.0) + trapezoid(&self.times, &self.viscous);
        (1..self.times.len())
            .map(|i| {
                let h = self.times[i] - self.times[i - 1];
                let f =
                    |k: usize| self.viscous[k] - self.a_term[k] - self.b_term[k] - self.c_term[k];
                let lhs = 0.5 * (self.l2_sq[i] - self.l2_sq[i - 1]) + 0.5 * h * (f(i) + f(i - 1));
                lhs / scale.max(f64::MIN_POSITIVE)
            })
            .collect()
    }
}

fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; times.len()];
    for i in 1..times.len() {
        out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
    }
    out
}

fn weighted_sq(f: &SpectralField4, comps: &[usize], s: f64) -> f64 {
    let g = f.grid();
    let mut acc = 0.0;
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            continue;
        }
        let m: f64 = comps.iter().map(|&c| f.comps[c][idx].norm_sqr()).sum();
        if m > 0.0 {
            acc += k2.powf(s) * m;
        }
    }
    acc
}

fn derivative(f: &SpectralField4, comp: usize, axis: usize) -> Vec<C64> {
    let g = f.grid();
    (0..g.len())
        .map(|idx| I * g.xi(idx)[axis] * f.comps[comp][idx])
        .collect()
}

/// (A, B) = (−(D·∇ṽ^h|D^h), −(D³∂₃θ̃|D⁴)) from dealiased products.
pub fn coupling_terms(d: &SpectralField4, w: &SpectralField4) -> (f64, f64) {
    let g = *d.grid();
    let pd = physical4(d);
    let grads: Vec<Vec<C64>> = (0..2)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| derivative(w, i, j))
        .chain(std::iter::once(derivative(w, 3, 2)))
        .collect();
    let refs: Vec<&[C64]> = grads.iter().map(|v| v.as_slice()).collect();
    let pg = to_physical_many(&g, &refs);
    let len = g.len();
    let prods: Vec<Vec<f64>> = vec![
        (0..len)
            .map(|p| pd[0][p] * pg[0][p] + pd[1][p] * pg[1][p] + pd[2][p] * pg[2][p])
            .collect(),
        (0..len)
            .map(|p| pd[0][p] * pg[3][p] + pd[1][p] * pg[4][p] + pd[2][p] * pg[5][p])
            .collect(),
        (0..len).map(|p| pd[2][p] * pg[6][p]).collect(),
    ];
    let spec = to_spectral_many(&g, &prods);
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>();
    let a = -(dot(&spec[0], &d.comps[0]) + dot(&spec[1], &d.comps[1]));
    let b = -dot(&spec[2], &d.comps[3]);
    (a, b)
}

/// q_ε = −ε⁻¹∂₃Δ⁻¹H − Δ⁻¹div div(V⊗V + V⊗(ṽ^h,0) + (ṽ^h,0)⊗V), per mode.
pub fn pressure_diagnostic(d: &SpectralField4, w: &SpectralField4, epsilon: f64) -> Vec<C64> {
    let g = *d.grid();
    let pd = physical4(d);
    let pw = physical4(w);
    let len = g.len();
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let prods: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| {
            let wi = if i < 2 { Some(&pw[i]) } else { None };
            let wj = if j < 2 { Some(&pw[j]) } else { None };
            (0..len)
                .map(|p| {
                    let mut m = pd[i][p] * pd[j][p];
                    if let Some(wj) = wj {
                        m += pd[i][p] * wj[p];
                    }
                    if let Some(wi) = wi {
                        m += wi[p] * pd[j][p];
                    }
                    m
                })
                .collect()
        })
        .collect();
    let spec = to_spectral_many(&g, &prods);
    (0..len)
        .map(|idx| {
            let xi = g.xi(idx);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 == 0.0 || !g.dealias_keep(idx) {
                return ZERO;
            }
            let mut dd = ZERO;
            for (n, &(i, j)) in pairs.iter().enumerate() {
                let sym = if i == j { 1.0 } else { 2.0 };
                dd += sym * xi[i] * xi[j] * spec[n][idx];
            }
            I * xi[2] * d.comps[3][idx] / (epsilon * k2) - dd / k2
        })
        .collect()
}

pub fn energy_report(traj: &Trajectory) -> Result<EnergyLedger> {
    energy_report_with(traj, DEFAULT_GRONWALL_CONSTANT)
}

pub fn energy_report_with(traj: &Trajectory, c0: f64) -> Result<EnergyLedger> {
    if traj.states.is_empty() {
        return Err(LabError::Argument("empty trajectory".into()));
    }
    let p = &traj.params;
    let nu0 = p.nu0();
    let times = traj.states.times.clone();
    let ns = times.len();
    let mut led = EnergyLedger {
        times: times.clone(),
        gronwall_constant: c0,
        ..Default::default()
    };
    for (i, d) in traj.states.fields.iter().enumerate() {
        led.l2_sq.push(d.l2_sq());
        let gv = weighted_sq(d, &[0, 1, 2], 1.0);
        let gh = weighted_sq(d, &[3], 1.0);
        led.grad_sq.push(gv + gh);
        led.viscous.push(p.nu * gv + p.nu_prime * gh);
        match &traj.forcing {
            Some(f) => {
                let w = &f.limit[i];
                let (a, b) = coupling_terms(d, w);
                led.a_term.push(a);
                led.b_term.push(b);
                led.c_term.push(f.gtilde[i].inner(d));
                led.gtilde_l2.push(f.gtilde[i].l2());
                led.vh_sq.push(weighted_sq(w, &[0, 1], 1.5));
                led.theta_h1.push(weighted_sq(w, &[3], 1.0).sqrt());
                let q = pressure_diagnostic(d, w, p.epsilon);
                led.pressure_l2
                    .push(q.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
            }
            None => {
                for v in [
                    &mut led.a_term,
                    &mut led.b_term,
                    &mut led.c_term,
                    &mut led.gtilde_l2,
                    &mut led.vh_sq,
                    &mut led.theta_h1,
                ] {
                    v.push(0.0);
                }
            }
        }
    }
    led.dissipation = cumulative_trapezoid(&times, &led.grad_sq)
        .into_iter()
        .map(|x| nu0 * x)
        .collect();
    let g_int = cumulative_trapezoid(&times, &led.gtilde_l2);
    let rate: Vec<f64> = (0..ns)
        .map(|i| {
            led.gtilde_l2[i]
                + led.vh_sq[i] / nu0
                + led.theta_h1[i].powf(4.0 / 3.0) / nu0.powf(1.0 / 3.0)
        })
        .collect();
    let r_int = cumulative_trapezoid(&times, &rate);
    let e0 = led.l2_sq[0];
    led.bound = (0..ns)
        .map(|i| (e0 + 0.5 * g_int[i]) * (c0 * r_int[i]).exp())
        .collect();
    Ok(led)
}
