use rayon::prelude::*;

use super::initial::{build_initial_data, InitialData, InitialDataSpec};
use super::rates::{fit_rate, theoretical_rate, RateRegime};
use crate::boussinesq_solver::{simulate_sepsilon_observed, SolverConfig};
use crate::dispersion_lab::DecayFit;
use crate::error::{LabError, Result};
use crate::limit_solvers::{biot_savart_h, heat1d_series, Heat1DState, SnsStepper, VorticityState};
use crate::spectral_core::{time_la, Grid3, PhysicalField4, SpaceTimeSeries, SpectralField4, C64, ZERO};
use crate::wave_algebra::{epsilon_threshold, split_stratified_osc, PhysicsParams};

/// Instantaneous ‖(I − ℙ₂)D(t)‖_{L^q} and the running (∫₀^t ‖·‖² ds)^{1/2}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OscNormSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub running: Vec<f64>,
}

impl OscNormSeries {
    pub fn push(&mut self, t: f64, value: f64) {
        let prev = self.running.last().copied().unwrap_or(0.0);
        let acc = match self.times.last() {
            Some(&t0) => {
                let v0 = *self.values.last().expect("values track times");
                prev * prev + 0.5 * (t - t0) * (v0 * v0 + value * value)
            }
            None => 0.0,
        };
        self.times.push(t);
        self.values.push(value);
        self.running.push(acc.sqrt());
    }

    /// ‖·‖_{L²(0,T; L^q)}.
    pub fn total(&self) -> f64 {
        self.running.last().copied().unwrap_or(0.0)
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 2.0 && q < 6.0) {
        return Err(LabError::Domain(format!("q = {q} outside (2, 6)")));
    }
    Ok(())
}

/// Oscillating-part L^q series of a stored trajectory of D_ε.
pub fn osc_norm_series(traj: &SpaceTimeSeries, q: f64) -> Result<OscNormSeries> {
    check_q(q)?;
    let mut out = OscNormSeries::default();
    for (t, d) in traj.times.iter().zip(&traj.fields) {
        let (_, osc) = split_stratified_osc(d);
        out.push(*t, osc.to_physical()?.lq(q));
    }
    Ok(out)
}

/// ṽ^h and θ̃ at the sample times of the solver, computed once per sweep.
/// Only vorticity is stored; velocities are rebuilt on demand.
#[derive(Clone, Debug)]
pub struct LimitReference {
    pub times: Vec<f64>,
    omega: Vec<Vec<C64>>,
    theta: Vec<Heat1DState>,
    grid: Grid3,
    nu: f64,
}

impl LimitReference {
    pub fn compute(v_h0: &SpectralField4, theta0: &Heat1DState, config: &SolverConfig) -> Result<Self> {
        let grid = *v_h0.grid();
        let opts = config.sns_options();
        let steps = opts.steps()?;
        let stepper = SnsStepper::new(grid, config.params.nu, &opts);
        let mut w = VorticityState::from_velocity(v_h0, config.params.nu)?.omega;
        if opts.advection {
            stepper.mask().apply(&mut w);
        }
        let mut times = vec![0.0];
        let mut omega = vec![w.clone()];
        for n in 1..=steps {
            w = stepper.step(&w)?;
            if w.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(LabError::Divergence {
                    t: n as f64 * opts.dt,
                    last_stable: (n - 1) as f64 * opts.dt,
                });
            }
            if n % opts.sample_stride == 0 || n == steps {
                times.push(n as f64 * opts.dt);
                omega.push(w.clone());
            }
        }
        let theta = heat1d_series(theta0, &times)?;
        Ok(LimitReference {
            times,
            omega,
            theta,
            grid,
            nu: config.params.nu,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// (ṽ^h, 0, θ̃) at sample k.
    pub fn state(&self, k: usize) -> Result<SpectralField4> {
        let mut vs = VorticityState::new(self.grid, self.omega[k].clone(), self.nu)?;
        vs.time = self.times[k];
        let mut w = biot_savart_h(&vs)?;
        w.comps[2].iter_mut().for_each(|c| *c = ZERO);
        w.comps[3] = self.theta[k].embed(&self.grid)?.comps[3].clone();
        Ok(w)
    }
}

/// Everything a sweep shares across ε.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub grid: Grid3,
    /// ν and ν′; the ε field is replaced per run.
    pub physics: PhysicsParams,
    /// dt, t_final, stride, radius; its params are replaced per run.
    pub solver: SolverConfig,
    pub q_list: Vec<f64>,
    /// Window exponents (m, M) for the ε ≤ ε₁ test when ν ≠ ν′.
    pub window: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub admissible: bool,
    pub t_final: f64,
    /// ‖D_{ε,osc}‖_{L²_tL^q}, one per q.
    pub norm_osc: Vec<f64>,
    /// ‖D_{ε,S}‖_{L²_tL^q}, one per q.
    pub norm_strat: Vec<f64>,
    pub max_divergence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub q_list: Vec<f64>,
    pub rows: Vec<EpsilonRow>,
    pub regime: RateRegime,
    /// One per q over the admissible ε, `None` with fewer than two.
    pub fits: Vec<Option<DecayFit>>,
    /// K(q)/640 or K(q)/544, one per q.
    pub theoretical: Vec<f64>,
    /// 3/16 when ν = ν′.
    pub global_reference: Option<f64>,
    pub eps1: Option<f64>,
}

impl SweepResult {
    pub fn norms_osc(&self, qi: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.norm_osc[qi]).collect()
    }

    /// Oscillating norms strictly decrease along the (decreasing) admissible ε.
    pub fn strictly_decreasing(&self, qi: usize) -> bool {
        let v: Vec<f64> = self.rows.iter().filter(|r| r.admissible).map(|r| r.norm_osc[qi]).collect();
        v.windows(2).all(|w| w[1] < w[0])
    }
}

fn run_one(
    epsilon: f64,
    data: &InitialData,
    theta0: &Heat1DState,
    limit: &LimitReference,
    plan: &SweepPlan,
) -> Result<(Vec<OscNormSeries>, Vec<OscNormSeries>, f64, SpectralField4)> {
    let mut cfg = plan.solver.clone();
    cfg.params = plan.physics.with_epsilon(epsilon);
    let nq = plan.q_list.len();
    let mut osc = vec![OscNormSeries::default(); nq];
    let mut strat = vec![OscNormSeries::default(); nq];
    let mut k = 0usize;
    let mut observer = |t: f64, u: &SpectralField4| -> Result<()> {
        if k >= limit.len() || (limit.times[k] - t).abs() > 1e-9 * cfg.dt {
            return Err(LabError::Consistency(format!(
                "limit sample {k} does not match solver time {t}"
            )));
        }
        let d = u.sub(&limit.state(k)?);
        let (s, o) = split_stratified_osc(&d);
        let (ps, po): (PhysicalField4, PhysicalField4) = (s.to_physical()?, o.to_physical()?);
        for (i, &q) in plan.q_list.iter().enumerate() {
            osc[i].push(t, po.lq(q));
            strat[i].push(t, ps.lq(q));
        }
        k += 1;
        Ok(())
    };
    let traj = simulate_sepsilon_observed(&data.u0, Some(theta0), &cfg, &mut observer)?;
    let last = traj
        .states
        .fields
        .last()
        .cloned()
        .ok_or_else(|| LabError::Consistency("solver kept no final state".into()))?;
    Ok((osc, strat, traj.max_divergence, last))
}

/// Runs (S_ε) for every ε, returning the rows obtained so far and the first
/// error if a run failed.
pub fn run_sweep_partial(
    eps_list: &[f64],
    spec: &InitialDataSpec,
    plan: &SweepPlan,
) -> (SweepResult, Option<LabError>) {
    let (r, _, e) = run_sweep_with_states(eps_list, spec, plan);
    (r, e)
}

/// As [`run_sweep_partial`], also handing back U_ε(T) for each completed row.
pub fn run_sweep_with_states(
    eps_list: &[f64],
    spec: &InitialDataSpec,
    plan: &SweepPlan,
) -> (SweepResult, Vec<SpectralField4>, Option<LabError>) {
    let regime = if plan.physics.nu_equal() {
        RateRegime::NuEqual
    } else {
        RateRegime::NuDistinct
    };
    let mut result = SweepResult {
        epsilons: Vec::new(),
        q_list: plan.q_list.clone(),
        rows: Vec::new(),
        regime,
        fits: Vec::new(),
        theoretical: Vec::new(),
        global_reference: None,
        eps1: None,
    };
    let setup = || -> Result<(InitialData, Heat1DState, LimitReference, Option<f64>)> {
        if eps_list.is_empty() {
            return Err(LabError::Argument("no epsilons to sweep".into()));
        }
        if eps_list.windows(2).any(|w| !(w[1] < w[0])) || !(eps_list[eps_list.len() - 1] > 0.0) {
            return Err(LabError::Argument(format!(
                "epsilons must be positive and strictly decreasing, got {eps_list:?}"
            )));
        }
        for &q in &plan.q_list {
            check_q(q)?;
        }
        plan.physics.validate()?;
        let eps1 = match epsilon_threshold(&plan.physics, plan.window.0, plan.window.1) {
            Ok(t) => Some(t.eps1),
            Err(LabError::NotApplicable(_)) => None,
            Err(e) => return Err(e),
        };
        let data = build_initial_data(spec, &plan.grid)?;
        let theta0 = data.theta_state(&plan.grid, plan.physics.nu_prime)?;
        let mut cfg = plan.solver.clone();
        cfg.params = plan.physics.with_epsilon(eps_list[0]);
        let limit = LimitReference::compute(&data.v_h0, &theta0, &cfg)?;
        Ok((data, theta0, limit, eps1))
    };
    let (data, theta0, limit, eps1) = match setup() {
        Ok(s) => s,
        Err(e) => return (result, Vec::new(), Some(e)),
    };
    result.eps1 = eps1;
    result.theoretical = plan
        .q_list
        .iter()
        .map(|&q| theoretical_rate(q, regime).unwrap_or(f64::NAN))
        .collect();
    if regime == RateRegime::NuEqual {
        result.global_reference = theoretical_rate(4.0, RateRegime::NuEqualGlobal).ok();
    }

    let runs: Vec<Result<_>> = eps_list
        .par_iter()
        .map(|&e| run_one(e, &data, &theta0, &limit, plan))
        .collect();
    let mut first_error = None;
    let mut finals = Vec::new();
    for (&epsilon, run) in eps_list.iter().zip(runs) {
        match run {
            Ok((osc, strat, div, last)) => {
                finals.push(last);
                result.epsilons.push(epsilon);
                result.rows.push(EpsilonRow {
                    epsilon,
                    admissible: eps1.map_or(true, |e1| epsilon <= e1),
                    t_final: plan.solver.t_final,
                    norm_osc: osc.iter().map(|s| s.total()).collect(),
                    norm_strat: strat.iter().map(|s| s.total()).collect(),
                    max_divergence: div,
                });
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    result.fits = (0..plan.q_list.len())
        .map(|qi| {
            let (e, v): (Vec<f64>, Vec<f64>) = result
                .rows
                .iter()
                .filter(|r| r.admissible)
                .map(|r| (r.epsilon, r.norm_osc[qi]))
                .unzip();
            fit_rate(&e, &v).ok()
        })
        .collect();
    (result, finals, first_error)
}

/// As [`run_sweep_partial`], failing on the first simulation error.
pub fn run_sweep(eps_list: &[f64], spec: &InitialDataSpec, plan: &SweepPlan) -> Result<SweepResult> {
    match run_sweep_partial(eps_list, spec, plan) {
        (r, None) => Ok(r),
        (_, Some(e)) => Err(e),
    }
}

/// ‖·‖_{L²_tL^q} of a sampled series, for cross-checking [`OscNormSeries::total`].
pub fn l2_in_time(times: &[f64], values: &[f64]) -> f64 {
    time_la(times, values, 2.0)
}
