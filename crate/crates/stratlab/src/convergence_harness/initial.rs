use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::limit_solvers::Heat1DState;
use crate::spectral_core::{norm3, Grid3, ModeMask, SpectralField4, C64, ZERO};
use crate::wave_algebra::{leray_project, split_stratified_osc};

/// How the phases of the shell spectrum are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseMode {
    /// Independent random coefficient per mode and component.
    Random,
    /// One random real polarisation shared by every mode: a packet focused at
    /// the origin, which spreads under the wave flow.
    Coherent,
}

impl PhaseMode {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseMode::Random => "random",
            PhaseMode::Coherent => "coherent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(PhaseMode::Random),
            "coherent" => Some(PhaseMode::Coherent),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialDataSpec {
    pub seed: u64,
    /// |ξ| of the spectral shell.
    pub spectrum_peak: f64,
    /// Gaussian width of the shell.
    pub spectrum_width: f64,
    /// L² norm of ℙ₂U₀.
    pub amplitude_strat: f64,
    /// L² norm of (I − ℙ₂)U₀.
    pub amplitude_osc: f64,
    /// θ̃₀(x₃) = Σ_j a_j cos(j·2πx₃/L), j = 1, 2, …
    pub theta_profile: Vec<f64>,
    pub exclude_degenerate_line: bool,
    pub phases: PhaseMode,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            seed: 0,
            spectrum_peak: 3.0,
            spectrum_width: 1.5,
            amplitude_strat: 0.5,
            amplitude_osc: 1.0,
            theta_profile: vec![0.5, 0.25],
            exclude_degenerate_line: true,
            phases: PhaseMode::Coherent,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitialData {
    /// Div-free U₀ = (v₀, θ₀), without the θ̃₀(x₃) profile.
    pub u0: SpectralField4,
    /// ṽ₀^h as (v¹, v², 0, 0): the horizontal part of ℙ₂U₀.
    pub v_h0: SpectralField4,
    pub theta_profile: Vec<f64>,
    pub measured_strat: f64,
    pub measured_osc: f64,
}

impl InitialData {
    /// θ̃₀ sampled on the x₃ grid of `grid`.
    pub fn theta_state(&self, grid: &Grid3, nu_prime: f64) -> Result<Heat1DState> {
        let dk = grid.dk();
        let a = self.theta_profile.clone();
        Heat1DState::from_profile(grid.n(), grid.box_length(), nu_prime, move |x3| {
            a.iter()
                .enumerate()
                .map(|(j, c)| c * ((j + 1) as f64 * dk * x3).cos())
                .sum()
        })
    }
}

/// Shell spectrum exp(−(|ξ| − k_p)²/2w²) inside the Friedrichs ball,
/// Leray-projected, then ℙ₂ and (I − ℙ₂) parts rescaled to the requested
/// L² amplitudes.
pub fn build_initial_data(spec: &InitialDataSpec, grid: &Grid3) -> Result<InitialData> {
    let cutoff = ModeMask::default_radius(grid);
    if !(spec.spectrum_peak >= 0.0 && spec.spectrum_peak < cutoff) {
        return Err(LabError::Argument(format!(
            "spectrum_peak {} must lie below the dealiasing cutoff {cutoff}",
            spec.spectrum_peak
        )));
    }
    if !(spec.spectrum_width > 0.0) {
        return Err(LabError::Argument(format!(
            "spectrum_width must be positive, got {}",
            spec.spectrum_width
        )));
    }
    for (name, a) in [
        ("amplitude_strat", spec.amplitude_strat),
        ("amplitude_osc", spec.amplitude_osc),
    ] {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(LabError::Argument(format!(
                "{name} must be nonnegative, got {a}"
            )));
        }
    }
    if spec.theta_profile.len() >= grid.n() / 2 {
        return Err(LabError::Argument(format!(
            "theta_profile has {} modes, the grid resolves {}",
            spec.theta_profile.len(),
            grid.n() / 2 - 1
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let polar: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let envelope = |xi: [f64; 3]| {
        let d = (norm3(xi) - spec.spectrum_peak) / spec.spectrum_width;
        (-0.5 * d * d).exp()
    };
    let mut raw = SpectralField4::from_fn(*grid, |idx, xi| {
        let k = norm3(xi);
        let on_line = xi[0] == 0.0 && xi[1] == 0.0;
        let skip = k == 0.0
            || k > cutoff
            || grid.touches_nyquist(idx)
            || (spec.exclude_degenerate_line && on_line);
        // draw unconditionally so the stream does not depend on the flags
        let draw: [C64; 4] =
            std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if skip {
            return [ZERO; 4];
        }
        let e = envelope(xi);
        match spec.phases {
            PhaseMode::Random => draw.map(|c| c * e),
            PhaseMode::Coherent => polar.map(|c| C64::new(c * e, 0.0)),
        }
    });
    raw.symmetrize();
    let (strat, osc) = split_stratified_osc(&leray_project(&raw));
    let scale = |f: &SpectralField4, want: f64, what: &str| -> Result<SpectralField4> {
        if want == 0.0 {
            return Ok(SpectralField4::zeros(*grid));
        }
        let have = f.l2();
        if !(have > 0.0) {
            return Err(LabError::Argument(format!(
                "the shell spectrum has no {what} component to scale"
            )));
        }
        Ok(f.scaled(want / have))
    };
    let strat = scale(&strat, spec.amplitude_strat, "stratified")?;
    let osc = scale(&osc, spec.amplitude_osc, "oscillating")?;
    let u0 = strat.add(&osc);
    let (s, o) = split_stratified_osc(&u0);
    Ok(InitialData {
        v_h0: s.clone(),
        u0,
        theta_profile: spec.theta_profile.clone(),
        measured_strat: s.l2(),
        measured_osc: o.l2(),
    })
}
