use super::config::SolverConfig;
use super::linear::LinearPropagator;
use super::nonlinear::{advection_rhs, flux_divergence, max_speed, minus_leray, physical4, Flux};
use crate::error::{LabError, Result};
use crate::limit_solvers::{limit_forcing, Heat1DState};
use crate::spectral_core::{Grid3, ModeMask, SpaceTimeSeries, SpectralField4};
use crate::wave_algebra::PhysicsParams;

/// The limit state (ṽ^h, 0, θ̃_ε) and G̃ at the stored sample times of a
/// difference run.
#[derive(Clone, Debug)]
pub struct LimitSamples {
    pub limit: Vec<SpectralField4>,
    pub gtilde: Vec<SpectralField4>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: PhysicsParams,
    pub dt: f64,
    pub steps: usize,
    pub states: SpaceTimeSeries,
    pub forcing: Option<LimitSamples>,
    /// Retained modes propagated by the dense exponential.
    pub fallback_modes: usize,
    /// Largest |ξ·v̂| seen at any sample.
    pub max_divergence: f64,
    /// Largest coefficient seen outside the Friedrichs ball.
    pub mask_leakage: f64,
}

/// Called at every sampled step with (t, state).
pub type Observer<'a> = &'a mut dyn FnMut(f64, &SpectralField4) -> Result<()>;

fn check_div_free(u: &SpectralField4, what: &str) -> Result<()> {
    let scale = u.max_abs() * u.grid().max_axis_wavenumber();
    if u.max_divergence() > 1e-10 * scale.max(1.0) {
        return Err(LabError::Argument(format!(
            "{what} is not divergence-free ({:.3e})",
            u.max_divergence()
        )));
    }
    Ok(())
}

fn leakage(mask: &ModeMask, f: &SpectralField4) -> f64 {
    f.comps.iter().map(|c| mask.leakage(c)).fold(0.0, f64::max)
}

fn cfl_check(config: &SolverConfig, grid: &Grid3, speed: f64) -> Result<()> {
    let cfl = config.dt * speed / grid.dx();
    if cfl > config.cfl_limit {
        return Err(LabError::Cfl {
            cfl,
            suggested_dt: 0.9 * config.cfl_limit * grid.dx() / speed,
        });
    }
    Ok(())
}

struct Recorder<'a> {
    stride: usize,
    steps: usize,
    keep_all: bool,
    states: SpaceTimeSeries,
    observer: Option<Observer<'a>>,
    max_divergence: f64,
    leak: f64,
}

impl<'a> Recorder<'a> {
    /// Returns true when step n is a sample.
    fn record(&mut self, n: usize, t: f64, u: &SpectralField4, mask: &ModeMask) -> Result<bool> {
        let sample = n % self.stride == 0 || n == self.steps;
        if !sample {
            return Ok(false);
        }
        self.max_divergence = self.max_divergence.max(u.max_divergence());
        self.leak = self.leak.max(leakage(mask, u));
        if let Some(obs) = self.observer.as_mut() {
            obs(t, u)?;
        }
        if self.keep_all || n == 0 || n == self.steps {
            self.states.push(t, u.clone())?;
        }
        Ok(true)
    }
}

fn axpy_new(a: &SpectralField4, s: f64, k: &SpectralField4) -> SpectralField4 {
    let mut out = a.clone();
    out.axpy(s, k);
    out
}

fn heun_combine(a: &mut SpectralField4, dt: f64, k1: &SpectralField4, k2: &SpectralField4) {
    a.axpy(0.5 * dt, k1);
    a.axpy(0.5 * dt, k2);
}

/// Friedrichs-truncated (S_ε): Strang splitting of the exact linear flow
/// around a Heun step for −ℙ(v·∇U). The datum is U₀ + (0, 0, 0, θ̃₀(x₃)).
pub fn simulate_sepsilon(
    u0: &SpectralField4,
    theta0: Option<&Heat1DState>,
    config: &SolverConfig,
) -> Result<Trajectory> {
    run_sepsilon(u0, theta0, config, None, true)
}

/// As `simulate_sepsilon`, streaming every sample to `observer` and keeping
/// only the first and last states.
pub fn simulate_sepsilon_observed(
    u0: &SpectralField4,
    theta0: Option<&Heat1DState>,
    config: &SolverConfig,
    observer: Observer,
) -> Result<Trajectory> {
    run_sepsilon(u0, theta0, config, Some(observer), false)
}

fn run_sepsilon(
    u0: &SpectralField4,
    theta0: Option<&Heat1DState>,
    config: &SolverConfig,
    observer: Option<Observer>,
    keep_all: bool,
) -> Result<Trajectory> {
    let grid = *u0.grid();
    config.validate(&grid)?;
    check_div_free(u0, "U0")?;
    let steps = config.steps()?;
    let mask = config.mask(&grid);
    let half = LinearPropagator::new(&grid, &config.params, 0.5 * config.dt, &mask)?;

    let mut u = u0.clone();
    if let Some(th) = theta0 {
        u = u.add(&th.embed(&grid)?);
    }
    for c in u.comps.iter_mut() {
        mask.apply(c);
    }
    let mut rec = Recorder {
        stride: config.sample_stride,
        steps,
        keep_all,
        states: SpaceTimeSeries::default(),
        observer,
        max_divergence: 0.0,
        leak: 0.0,
    };
    let t0 = 0.0;
    rec.record(0, t0, &u, &mask)?;
    let mut last_stable = t0;
    for n in 1..=steps {
        let t = t0 + n as f64 * config.dt;
        let mut a = u;
        half.apply(&mut a);
        if config.nonlinear {
            let (k1, speed) = advection_rhs(&a, &mask);
            cfl_check(config, &grid, speed)?;
            let b = axpy_new(&a, config.dt, &k1);
            let (k2, _) = advection_rhs(&b, &mask);
            heun_combine(&mut a, config.dt, &k1, &k2);
        }
        half.apply(&mut a);
        if !a.is_finite() {
            return Err(LabError::Divergence { t, last_stable });
        }
        u = a;
        last_stable = t;
        rec.record(n, t, &u, &mask)?;
    }
    Ok(Trajectory {
        params: config.params,
        dt: config.dt,
        steps,
        states: rec.states,
        forcing: None,
        fallback_modes: half.fallback_modes(),
        max_divergence: rec.max_divergence,
        mask_leakage: rec.leak,
    })
}

fn check_alignment(times: &[f64], t0: f64, dt: f64, steps: usize, what: &str) -> Result<()> {
    if times.len() != steps + 1 {
        return Err(LabError::Argument(format!(
            "{what} has {} samples; the solver needs one per step ({})",
            times.len(),
            steps + 1
        )));
    }
    for (n, &t) in times.iter().enumerate() {
        let want = t0 + n as f64 * dt;
        if (t - want).abs() > 1e-9 * dt.max(want.abs() * 1e-3) {
            return Err(LabError::Argument(format!(
                "{what} sample {n} at t = {t}, solver step at {want}"
            )));
        }
    }
    Ok(())
}

/// Right-hand side of the difference system at one stage:
/// −mask·ℙ∂_j(d^jd + d^jw + w^jd) + mask·G̃(w), the limit tendency
/// −mask·ℙ₂ℙ(ṽ^h·∇_hṽ^h) used to advance w, and max|d + w|.
fn difference_rhs(
    d: &SpectralField4,
    w: &SpectralField4,
    mask: &ModeMask,
) -> (SpectralField4, SpectralField4, f64) {
    let grid = *d.grid();
    let pd = physical4(d);
    let pw = physical4(w);
    let pu: [Vec<f64>; 4] =
        std::array::from_fn(|i| pd[i].iter().zip(&pw[i]).map(|(a, b)| a + b).collect());
    let flux: Flux = std::array::from_fn(|j| {
        std::array::from_fn(|i| {
            (0..grid.len())
                .map(|p| pd[j][p] * pu[i][p] + pw[j][p] * pd[i][p])
                .collect()
        })
    });
    let mut k = flux_divergence(&grid, mask, flux);
    minus_leray(&mut k);
    let (ns, gt) = limit_forcing(w, mask);
    k.axpy(1.0, &gt);
    (k, ns, max_speed(&pu))
}

/// Friedrichs-truncated difference system for D_ε = U_ε − (ṽ^h, 0, θ̃_ε).
///
/// The limit inputs must be sampled at every solver step; the stage states
/// of the limit flow are rebuilt from them with the same half-step heat
/// factor and Heun update, so that the result matches U_ε − (ṽ^h, 0, θ̃_ε)
/// step for step. `gtilde_series` must share the sample times; it is kept
/// for the energy ledger.
pub fn simulate_difference(
    d0: &SpectralField4,
    v_h_series: &SpaceTimeSeries,
    theta_eps_series: &[Heat1DState],
    gtilde_series: &SpaceTimeSeries,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let grid = *d0.grid();
    config.validate(&grid)?;
    check_div_free(d0, "D0")?;
    let steps = config.steps()?;
    let t0 = v_h_series.times.first().copied().unwrap_or(0.0);
    check_alignment(&v_h_series.times, t0, config.dt, steps, "v_h series")?;
    let theta_times: Vec<f64> = theta_eps_series.iter().map(|s| s.time).collect();
    check_alignment(&theta_times, t0, config.dt, steps, "theta_eps series")?;
    check_alignment(&gtilde_series.times, t0, config.dt, steps, "G~ series")?;
    if v_h_series.fields[0].grid() != &grid || gtilde_series.fields[0].grid() != &grid {
        return Err(LabError::Argument(
            "limit series and D0 live on different grids".into(),
        ));
    }

    let mask = config.mask(&grid);
    let half = LinearPropagator::new(&grid, &config.params, 0.5 * config.dt, &mask)?;
    let limit_at = |n: usize| -> Result<SpectralField4> {
        let mut w = v_h_series.fields[n].clone();
        w.comps[2]
            .iter_mut()
            .for_each(|c| *c = crate::spectral_core::ZERO);
        w.comps[3] = theta_eps_series[n].embed(&grid)?.comps[3].clone();
        Ok(w)
    };

    let mut d = d0.clone();
    for c in d.comps.iter_mut() {
        mask.apply(c);
    }
    let mut rec = Recorder {
        stride: config.sample_stride,
        steps,
        keep_all: true,
        states: SpaceTimeSeries::default(),
        observer: None,
        max_divergence: 0.0,
        leak: 0.0,
    };
    let mut samples = LimitSamples {
        limit: Vec::new(),
        gtilde: Vec::new(),
    };
    let keep_sample = |n: usize, samples: &mut LimitSamples| -> Result<()> {
        samples.limit.push(limit_at(n)?);
        samples.gtilde.push(gtilde_series.fields[n].clone());
        Ok(())
    };
    if rec.record(0, t0, &d, &mask)? {
        keep_sample(0, &mut samples)?;
    }
    let mut last_stable = t0;
    for n in 1..=steps {
        let t = t0 + n as f64 * config.dt;
        let mut a = d;
        half.apply(&mut a);
        if config.nonlinear {
            let mut aw = limit_at(n - 1)?;
            half.apply(&mut aw);
            let (k1, ns1, speed) = difference_rhs(&a, &aw, &mask);
            cfl_check(config, &grid, speed)?;
            let b = axpy_new(&a, config.dt, &k1);
            let bw = axpy_new(&aw, config.dt, &ns1);
            let (k2, _, _) = difference_rhs(&b, &bw, &mask);
            heun_combine(&mut a, config.dt, &k1, &k2);
        }
        half.apply(&mut a);
        if !a.is_finite() {
            return Err(LabError::Divergence { t, last_stable });
        }
        d = a;
        last_stable = t;
        if rec.record(n, t, &d, &mask)? {
            keep_sample(n, &mut samples)?;
        }
    }
    Ok(Trajectory {
        params: config.params,
        dt: config.dt,
        steps,
        states: rec.states,
        forcing: Some(samples),
        fallback_modes: half.fallback_modes(),
        max_divergence: rec.max_divergence,
        mask_leakage: rec.leak,
    })
}
