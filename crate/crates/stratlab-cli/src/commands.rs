use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stratlab::boussinesq_solver::{
    energy_report, save_checkpoint, simulate_difference, simulate_sepsilon_observed, SolverConfig,
};
use stratlab::convergence_harness::{
    build_initial_data, run_sweep_with_states, InitialData, LimitReference, SweepPlan,
};
use stratlab::dispersion_lab::{
    eval_i_detailed, fit_decay, kernel_k0_sup, log_spaced, DecayFit, KernelSpec, CRITICAL_VALUE,
};
use stratlab::limit_solvers::{compute_gtilde, heat1d_series, solve_sns_with, Heat1DState, VorticityState};
use stratlab::spectral_core::SpectralField4;
use stratlab::wave_algebra::split_stratified_osc;

use crate::config::RunConfig;
use crate::csvio::{fmt_f64, Table};
use crate::error::{CliError, LabContext};

pub const CONFIG_SNAPSHOT: &str = "config.toml";
pub const SIMULATE_TRAJECTORY: &str = "simulate_trajectory.csv";
pub const SIMULATE_ENERGY: &str = "simulate_energy.csv";
pub const SIMULATE_CHECKPOINT: &str = "simulate_final.bqs";
pub const LIMIT_CSV: &str = "limit.csv";
pub const LIMIT_CHECKPOINT: &str = "limit_final.bqs";
pub const DIFF_CSV: &str = "diff.csv";
pub const DIFF_ENERGY: &str = "diff_energy.csv";
pub const DIFF_CHECKPOINT: &str = "diff_final.bqs";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_SUMMARY: &str = "sweep_summary.csv";
pub const DISPERSION_CSV: &str = "dispersion.csv";
pub const DISPERSION_FIT: &str = "dispersion_fit.csv";
pub const KERNEL_CSV: &str = "kernel.csv";
pub const KERNEL_FIT: &str = "kernel_fit.csv";
pub const REPORT_CSV: &str = "report.csv";

pub const TRAJECTORY_HEADER: [&str; 5] = ["time", "energy", "l2_strat", "l2_osc", "max_divergence"];
pub const ENERGY_HEADER: [&str; 5] = ["time", "energy", "viscous", "dissipated", "balance_defect"];
pub const LIMIT_HEADER: [&str; 3] = ["time", "vh_l2", "theta_l2"];
pub const DIFF_HEADER: [&str; 4] = ["time", "l2_strat", "l2_osc", "max_divergence"];
pub const DIFF_ENERGY_HEADER: [&str; 5] = ["time", "l2_sq", "dissipation", "total", "bound"];
pub const SWEEP_HEADER: [&str; 6] = [
    "epsilon",
    "q",
    "t_final",
    "norm_osc_L2tLq",
    "norm_strat_L2tLq",
    "admissible_flag",
];
pub const SWEEP_SUMMARY_HEADER: [&str; 9] = [
    "q",
    "regime",
    "theoretical_rate",
    "fitted_exponent",
    "intercept",
    "r2",
    "samples",
    "strictly_decreasing",
    "global_reference",
];
pub const DISPERSION_HEADER: [&str; 6] = ["sigma", "beta", "R", "value", "tol_achieved", "series"];
pub const DISPERSION_FIT_HEADER: [&str; 9] = [
    "series",
    "R",
    "beta",
    "exponent",
    "intercept",
    "r2",
    "window_lo",
    "window_hi",
    "lower_bound_c",
];
pub const KERNEL_HEADER: [&str; 5] = ["sigma", "sup", "x1", "x3", "evaluations"];
pub const FIT_HEADER: [&str; 5] = ["exponent", "intercept", "r2", "window_lo", "window_hi"];

/// Creates the run directory and writes the resolved config next to the outputs.
pub fn prepare(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(CONFIG_SNAPSHOT);
    fs::write(&path, cfg.to_toml()).map_err(|e| CliError::io(&path, e))
}

fn solver_config(cfg: &RunConfig, epsilon: f64) -> SolverConfig {
    let mut s = SolverConfig::new(cfg.physics().with_epsilon(epsilon), cfg.dt, cfg.t_final, &cfg.grid);
    s.sample_stride = cfg.sample_stride;
    s
}

fn initial(cfg: &RunConfig) -> Result<(InitialData, Heat1DState), CliError> {
    let data = build_initial_data(&cfg.ic, &cfg.grid).lab("convergence_harness")?;
    let theta0 = data
        .theta_state(&cfg.grid, cfg.nu_prime)
        .lab("limit_solvers")?;
    Ok((data, theta0))
}

/// Σ|ξ|²|v̂|² and Σ|ξ|²|θ̂|².
fn gradient_sq(u: &SpectralField4) -> (f64, f64) {
    let g = u.grid();
    let (mut gv, mut gh) = (0.0, 0.0);
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        gv += k2 * (0..3).map(|c| u.comps[c][idx].norm_sqr()).sum::<f64>();
        gh += k2 * u.comps[3][idx].norm_sqr();
    }
    (gv, gh)
}

fn l2_parts(u: &SpectralField4) -> (f64, f64) {
    let (s, o) = split_stratified_osc(u);
    (s.l2(), o.l2())
}

/// (S_ε) from the configured ill-prepared data at the first ε.
pub fn simulate(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let eps = cfg.epsilons[0];
    let solver = solver_config(cfg, eps);
    let (data, theta0) = initial(cfg)?;
    let mut traj = Table::new(&TRAJECTORY_HEADER);
    let mut energy = Table::new(&ENERGY_HEADER);
    let mut prev: Option<(f64, f64)> = None;
    let mut dissipated = 0.0;
    let mut e0 = 0.0;
    let mut observer = |t: f64, u: &SpectralField4| -> stratlab::Result<()> {
        let e = u.l2_sq();
        let (s, o) = l2_parts(u);
        traj.push(vec![
            fmt_f64(t),
            fmt_f64(e),
            fmt_f64(s),
            fmt_f64(o),
            fmt_f64(u.max_divergence()),
        ]);
        let (gv, gh) = gradient_sq(u);
        let visc = cfg.nu * gv + cfg.nu_prime * gh;
        match prev {
            Some((t0, v0)) => dissipated += 0.5 * (t - t0) * (v0 + visc),
            None => e0 = e,
        }
        prev = Some((t, visc));
        // ½‖U(t)‖² + ∫ν‖∇v‖² + ν′‖∇θ‖² = ½‖U₀‖²
        let defect = (0.5 * e + dissipated - 0.5 * e0) / (0.5 * e0).max(f64::MIN_POSITIVE);
        energy.push(vec![
            fmt_f64(t),
            fmt_f64(e),
            fmt_f64(visc),
            fmt_f64(dissipated),
            fmt_f64(defect),
        ]);
        Ok(())
    };
    let run = simulate_sepsilon_observed(&data.u0, Some(&theta0), &solver, &mut observer)
        .lab("boussinesq_solver")?;
    traj.write(&dir.join(SIMULATE_TRAJECTORY))?;
    energy.write(&dir.join(SIMULATE_ENERGY))?;
    let last = run.states.fields.last().expect("solver keeps the final state");
    let t_end = *run.states.times.last().expect("times track fields");
    let path = dir.join(SIMULATE_CHECKPOINT);
    save_checkpoint(&path, last, &run.params, t_end).lab("boussinesq_solver")?;
    Ok(())
}

/// ṽ^h from ℙ₂U₀ and θ̃ from the configured profile.
pub fn limit(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let solver = solver_config(cfg, cfg.epsilons[0]);
    let (data, theta0) = initial(cfg)?;
    let lim = LimitReference::compute(&data.v_h0, &theta0, &solver).lab("limit_solvers")?;
    let mut table = Table::new(&LIMIT_HEADER);
    let mut last = None;
    for k in 0..lim.len() {
        let w = lim.state(k).lab("limit_solvers")?;
        let vh = (w.comps[0].iter().chain(&w.comps[1]))
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let th = w.comps[3].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        table.push(vec![fmt_f64(lim.times[k]), fmt_f64(vh), fmt_f64(th)]);
        last = Some(w);
    }
    table.write(&dir.join(LIMIT_CSV))?;
    let w = last.expect("limit keeps t = 0");
    let path = dir.join(LIMIT_CHECKPOINT);
    save_checkpoint(&path, &w, &solver.params, cfg.t_final).lab("boussinesq_solver")?;
    Ok(())
}

/// Memory the difference run needs for its per-step limit inputs.
pub const DIFF_MEMORY_LIMIT: f64 = 2.0 * 1024.0 * 1024.0 * 1024.0;

/// D_ε = U_ε − (ṽ^h, 0, θ̃) from D₀ = (I − ℙ₂)U₀ via the difference system.
pub fn diff(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let mut solver = solver_config(cfg, cfg.epsilons[0]);
    let steps = solver.steps().lab("boussinesq_solver")?;
    // ṽ^h and G̃ at every step, four complex components each
    let bytes = (steps + 1) as f64 * 2.0 * 64.0 * cfg.grid.len() as f64;
    if bytes > DIFF_MEMORY_LIMIT {
        return Err(CliError::Lab {
            module: "boussinesq_solver",
            source: stratlab::LabError::Argument(format!(
                "the difference run keeps the limit flow at all {} steps ({:.1} GiB); \
                 reduce grid.n or time.t_final",
                steps + 1,
                bytes / DIFF_MEMORY_LIMIT * 2.0
            )),
        });
    }
    let (data, theta0) = initial(cfg)?;
    let mut opts = solver.sns_options();
    opts.sample_stride = 1;
    let w0 = VorticityState::from_velocity(&data.v_h0, cfg.nu).lab("limit_solvers")?;
    let sns = solve_sns_with(&w0, &opts).lab("limit_solvers")?;
    let theta = heat1d_series(&theta0, &sns.times).lab("limit_solvers")?;
    let gtilde = compute_gtilde(&sns.velocity).lab("limit_solvers")?;
    let d0 = data.u0.sub(&data.v_h0);
    solver.sample_stride = cfg.sample_stride;
    let run = simulate_difference(&d0, &sns.velocity, &theta, &gtilde, &solver)
        .lab("boussinesq_solver")?;

    let mut table = Table::new(&DIFF_HEADER);
    for (t, d) in run.states.times.iter().zip(&run.states.fields) {
        let (s, o) = l2_parts(d);
        table.push(vec![
            fmt_f64(*t),
            fmt_f64(s),
            fmt_f64(o),
            fmt_f64(d.max_divergence()),
        ]);
    }
    table.write(&dir.join(DIFF_CSV))?;
    let led = energy_report(&run).lab("boussinesq_solver")?;
    let mut table = Table::new(&DIFF_ENERGY_HEADER);
    let total = led.total();
    for i in 0..led.times.len() {
        table.push(vec![
            fmt_f64(led.times[i]),
            fmt_f64(led.l2_sq[i]),
            fmt_f64(led.dissipation[i]),
            fmt_f64(total[i]),
            fmt_f64(led.bound[i]),
        ]);
    }
    table.write(&dir.join(DIFF_ENERGY))?;
    let path = dir.join(DIFF_CHECKPOINT);
    let last = run.states.fields.last().expect("difference run keeps states");
    let t_end = *run.states.times.last().expect("times track fields");
    save_checkpoint(&path, last, &run.params, t_end).lab("boussinesq_solver")?;
    Ok(())
}

pub fn sweep_checkpoint_name(k: usize) -> String {
    format!("sweep_eps{k}.bqs")
}

fn fit_cells(fit: Option<&DecayFit>) -> [String; 3] {
    match fit {
        Some(f) => [fmt_f64(f.exponent), fmt_f64(f.intercept), fmt_f64(f.r_squared)],
        None => ["NaN".into(), "NaN".into(), "NaN".into()],
    }
}

/// ε-sweep against the shared limit; writes whatever finished even on failure.
pub fn sweep(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let plan = SweepPlan {
        grid: cfg.grid,
        physics: cfg.physics(),
        solver: solver_config(cfg, cfg.epsilons[0]),
        q_list: cfg.q_list.clone(),
        window: cfg.window,
    };
    let (res, finals, err) = run_sweep_with_states(&cfg.epsilons, &cfg.ic, &plan);
    for (k, (row, u)) in res.rows.iter().zip(&finals).enumerate() {
        let path = dir.join(sweep_checkpoint_name(k));
        save_checkpoint(&path, u, &plan.physics.with_epsilon(row.epsilon), row.t_final)
            .lab("boussinesq_solver")?;
    }
    let mut table = Table::new(&SWEEP_HEADER);
    for row in &res.rows {
        for (qi, &q) in res.q_list.iter().enumerate() {
            table.push(vec![
                fmt_f64(row.epsilon),
                fmt_f64(q),
                fmt_f64(row.t_final),
                fmt_f64(row.norm_osc[qi]),
                fmt_f64(row.norm_strat[qi]),
                (row.admissible as u8).to_string(),
            ]);
        }
    }
    table.write(&dir.join(SWEEP_CSV))?;
    let mut table = Table::new(&SWEEP_SUMMARY_HEADER);
    for (qi, &q) in res.q_list.iter().enumerate() {
        let [e, i, r2] = fit_cells(res.fits.get(qi).and_then(|f| f.as_ref()));
        table.push(vec![
            fmt_f64(q),
            res.regime.name().into(),
            fmt_f64(res.theoretical.get(qi).copied().unwrap_or(f64::NAN)),
            e,
            i,
            r2,
            res.fits
                .get(qi)
                .and_then(|f| f.as_ref())
                .map_or(0, |f| f.samples)
                .to_string(),
            (res.strictly_decreasing(qi) as u8).to_string(),
            fmt_f64(res.global_reference.unwrap_or(f64::NAN)),
        ]);
    }
    table.write(&dir.join(SWEEP_SUMMARY))?;
    match err {
        Some(e) => Err(CliError::Lab {
            module: "convergence_harness",
            source: e,
        }),
        None => Ok(()),
    }
}

pub const SERIES_CRITICAL: &str = "critical";
pub const SERIES_SMALL_BETA: &str = "small_beta";

/// I^R_{α,β}(σ) at the critical level and at a small β, with the fits.
pub fn dispersion(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let d = &cfg.dispersion;
    let crit = CRITICAL_VALUE / d.alpha;
    let mut jobs = Vec::new();
    for &r in &d.radii {
        for s in log_spaced(d.sigma_range.0, d.sigma_range.1, d.samples) {
            jobs.push((SERIES_CRITICAL, r, crit, s));
        }
    }
    for s in log_spaced(d.small_sigma_range.0, d.small_sigma_range.1, d.samples) {
        jobs.push((SERIES_SMALL_BETA, d.small_radius, d.small_beta, s));
    }
    let values = jobs
        .par_iter()
        .map(|&(_, r, b, s)| eval_i_detailed(d.alpha, b, r, s, d.tol))
        .collect::<stratlab::Result<Vec<_>>>()
        .lab("dispersion_lab")?;
    let mut table = Table::new(&DISPERSION_HEADER);
    for (&(series, r, b, s), v) in jobs.iter().zip(&values) {
        table.push(vec![
            fmt_f64(s),
            fmt_f64(b),
            fmt_f64(r),
            fmt_f64(v.value),
            fmt_f64(v.abs_error / v.value.abs().max(f64::MIN_POSITIVE)),
            series.into(),
        ]);
    }
    table.write(&dir.join(DISPERSION_CSV))?;

    let mut fits = Table::new(&DISPERSION_FIT_HEADER);
    let groups = d
        .radii
        .iter()
        .map(|&r| (SERIES_CRITICAL, r))
        .chain([(SERIES_SMALL_BETA, d.small_radius)]);
    for (series, r) in groups {
        {
            let pts: Vec<(f64, f64)> = jobs
                .iter()
                .zip(&values)
                .filter(|(j, _)| j.0 == series && j.1 == r)
                .map(|(j, v)| (j.3, v.value))
                .collect();
            let beta = jobs.iter().find(|j| j.0 == series).map_or(f64::NAN, |j| j.2);
            let fit = fit_decay(&pts, None).lab("dispersion_lab")?;
            // c in I ≥ c σ^{exponent}: the smallest ratio over the samples
            let c = pts
                .iter()
                .map(|&(s, v)| v / s.powf(fit.exponent))
                .fold(f64::INFINITY, f64::min);
            fits.push(vec![
                series.into(),
                fmt_f64(r),
                fmt_f64(beta),
                fmt_f64(fit.exponent),
                fmt_f64(fit.intercept),
                fmt_f64(fit.r_squared),
                fmt_f64(fit.sigma_range.0),
                fmt_f64(fit.sigma_range.1),
                fmt_f64(c),
            ]);
        }
    }
    fits.write(&dir.join(DISPERSION_FIT))
}

/// sup_x |K₀(σ)| over the configured σ range.
pub fn kernel(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let k = &cfg.kernel;
    let spec = KernelSpec::default();
    let sigmas = log_spaced(k.sigma_range.0, k.sigma_range.1, k.samples);
    let sups = sigmas
        .iter()
        .map(|&s| kernel_k0_sup(s, &spec))
        .collect::<stratlab::Result<Vec<_>>>()
        .lab("dispersion_lab")?;
    let mut table = Table::new(&KERNEL_HEADER);
    for (s, sup) in sigmas.iter().zip(&sups) {
        table.push(vec![
            fmt_f64(*s),
            fmt_f64(sup.value),
            fmt_f64(sup.at[0]),
            fmt_f64(sup.at[1]),
            sup.evaluations.to_string(),
        ]);
    }
    table.write(&dir.join(KERNEL_CSV))?;
    let pts: Vec<(f64, f64)> = sigmas.iter().zip(&sups).map(|(&s, u)| (s, u.value)).collect();
    let fit = fit_decay(&pts, None).lab("dispersion_lab")?;
    let mut t = Table::new(&FIT_HEADER);
    t.push(vec![
        fmt_f64(fit.exponent),
        fmt_f64(fit.intercept),
        fmt_f64(fit.r_squared),
        fmt_f64(fit.sigma_range.0),
        fmt_f64(fit.sigma_range.1),
    ]);
    t.write(&dir.join(KERNEL_FIT))
}

pub fn output_dir(cfg: &RunConfig, overridden: Option<&Path>) -> PathBuf {
    overridden.map_or_else(|| cfg.output_dir.clone(), Path::to_path_buf)
}
