use std::f64::consts::TAU;

use stratlab::boussinesq_solver::{simulate_sepsilon, SolverConfig};
use stratlab::convergence_harness::*;
use stratlab::spectral_core::{spacetime_norm, Grid3, SpaceTimeSeries};
use stratlab::wave_algebra::{oscillating_part, stratified_part, PhysicsParams};
use stratlab::LabError;

fn grid(n: usize) -> Grid3 {
    Grid3::new(n, TAU).unwrap()
}

#[test]
fn initial_data_is_div_free_with_requested_amplitudes() {
    for phases in [PhaseMode::Random, PhaseMode::Coherent] {
        let spec = InitialDataSpec { phases, amplitude_strat: 0.7, amplitude_osc: 1.3, ..Default::default() };
        let d = build_initial_data(&spec, &grid(16)).unwrap();
        assert!(d.u0.max_divergence() <= 1e-12);
        assert!((d.measured_strat / 0.7 - 1.0).abs() < 0.05);
        assert!((d.measured_osc / 1.3 - 1.0).abs() < 0.05);
        assert!(d.u0.hermitian_defect() < 1e-14);
        // ṽ₀^h is exactly the stratified part of U₀
        assert!(d.v_h0.sub(&stratified_part(&d.u0)).max_abs() == 0.0);
        assert!(d.v_h0.comps[2].iter().chain(&d.v_h0.comps[3]).all(|c| c.norm() == 0.0));
    }
}

#[test]
fn zero_oscillating_amplitude_gives_stratified_data() {
    let spec = InitialDataSpec { amplitude_osc: 0.0, ..Default::default() };
    let d = build_initial_data(&spec, &grid(16)).unwrap();
    assert!(d.u0.sub(&stratified_part(&d.u0)).max_abs() < 1e-15);
    assert!(oscillating_part(&d.u0).l2() < 1e-15);
}

#[test]
fn initial_data_is_deterministic_and_seed_dependent() {
    let g = grid(16);
    let spec = InitialDataSpec { phases: PhaseMode::Random, ..Default::default() };
    let a = build_initial_data(&spec, &g).unwrap();
    let b = build_initial_data(&spec, &g).unwrap();
    assert_eq!(a.u0.comps, b.u0.comps);
    let c = build_initial_data(&InitialDataSpec { seed: 9, ..spec }, &g).unwrap();
    assert!(a.u0.sub(&c.u0).max_abs() > 1e-3);
}

#[test]
fn degenerate_line_is_excluded_when_flagged() {
    let g = grid(16);
    let spec = InitialDataSpec { phases: PhaseMode::Random, ..Default::default() };
    let d = build_initial_data(&spec, &g).unwrap();
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        if xi[0] == 0.0 && xi[1] == 0.0 {
            assert!(d.u0.get(idx).iter().all(|c| c.norm() == 0.0));
        }
    }
    let kept = build_initial_data(&InitialDataSpec { exclude_degenerate_line: false, ..spec }, &g).unwrap();
    let on_line = (0..g.len()).filter(|&i| g.xi(i)[0] == 0.0 && g.xi(i)[1] == 0.0);
    assert!(on_line.map(|i| kept.u0.get(i)[3].norm()).sum::<f64>() > 0.0);
}

#[test]
fn initial_data_errors() {
    let g = grid(16);
    let peak = InitialDataSpec { spectrum_peak: 6.0, ..Default::default() };
    assert!(matches!(build_initial_data(&peak, &g), Err(LabError::Argument(_))));
    let neg = InitialDataSpec { amplitude_osc: -1.0, ..Default::default() };
    assert!(matches!(build_initial_data(&neg, &g), Err(LabError::Argument(_))));
    let long = InitialDataSpec { theta_profile: vec![1.0; 8], ..Default::default() };
    assert!(build_initial_data(&long, &g).is_err());
}

#[test]
fn theta_profile_is_the_cosine_series() {
    let g = grid(16);
    let spec = InitialDataSpec { theta_profile: vec![0.5, 0.0, -0.2], ..Default::default() };
    let th = build_initial_data(&spec, &g).unwrap().theta_state(&g, 0.05).unwrap();
    for (j, v) in th.values().iter().enumerate() {
        let x = j as f64 * TAU / 16.0;
        assert!((v - (0.5 * x.cos() - 0.2 * (3.0 * x).cos())).abs() < 1e-14);
    }
}

#[test]
fn theoretical_rates() {
    assert_eq!(k_of_q(4.0).unwrap(), 0.5);
    assert!((theoretical_rate(4.0, RateRegime::NuDistinct).unwrap() - 7.8125e-4).abs() < 1e-18);
    assert!((theoretical_rate(4.0, RateRegime::NuEqual).unwrap() - 0.5 / 544.0).abs() < 1e-18);
    assert_eq!(theoretical_rate(3.0, RateRegime::NuEqualGlobal).unwrap(), 0.1875);
    assert!(k_of_q(2.0 + 1e-9).unwrap() < 1e-8);
    for q in [2.0, 6.0, 1.0, 7.0] {
        assert!(matches!(theoretical_rate(q, RateRegime::NuDistinct), Err(LabError::Domain(_))));
    }
    // q = 3 and q = 5: K = (1/3)²/1 and (1/5)²/(1/5)
    assert!((k_of_q(3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    assert!((k_of_q(5.0).unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn rate_fit_recovers_power_law() {
    let e = [0.1, 0.05, 0.025, 0.0125];
    let v: Vec<f64> = e.iter().map(|x: &f64| 2.0 * x.powf(0.3)).collect();
    let f = fit_rate(&e, &v).unwrap();
    assert!((f.exponent - 0.3).abs() < 1e-12 && (f.intercept - 2f64.ln()).abs() < 1e-12);
    assert!(fit_rate(&e[..1], &v[..1]).is_err());
    assert!(fit_rate(&e, &[1.0, 0.0, 1.0, 1.0]).is_err());
}

fn small_trajectory() -> (SpaceTimeSeries, PhysicsParams) {
    let g = grid(16);
    let p = PhysicsParams::new(0.1, 0.1, 0.2).unwrap();
    let d = build_initial_data(&InitialDataSpec::default(), &g).unwrap();
    let cfg = SolverConfig::new(p, 0.01, 0.1, &g);
    (simulate_sepsilon(&d.u0, None, &cfg).unwrap().states, p)
}

#[test]
fn osc_norm_series_bookkeeping() {
    let (traj, _) = small_trajectory();
    let s = osc_norm_series(&traj, 4.0).unwrap();
    let osc = SpaceTimeSeries::new(traj.times.clone(), traj.fields.iter().map(oscillating_part).collect()).unwrap();
    let direct = spacetime_norm(&osc, 2.0, 4.0).unwrap();
    assert!((s.total() - direct).abs() <= 1e-12 * direct);
    assert!((l2_in_time(&s.times, &s.values) - direct).abs() <= 1e-12 * direct);
    assert!(s.running.windows(2).all(|w| w[1] >= w[0]));

    let doubled = SpaceTimeSeries::new(traj.times.clone(), traj.fields.iter().map(|f| f.scaled(2.0)).collect()).unwrap();
    let s2 = osc_norm_series(&doubled, 4.0).unwrap();
    for (a, b) in s.values.iter().zip(&s2.values) {
        assert!((b - 2.0 * a).abs() <= 1e-12 * b.abs().max(1e-300));
    }
    assert!(matches!(osc_norm_series(&traj, 6.0), Err(LabError::Domain(_))));
}

#[test]
fn osc_norm_of_stratified_trajectory_is_zero() {
    let (traj, _) = small_trajectory();
    let strat = SpaceTimeSeries::new(traj.times.clone(), traj.fields.iter().map(stratified_part).collect()).unwrap();
    let s = osc_norm_series(&strat, 3.0).unwrap();
    assert!(s.values.iter().all(|&v| v < 1e-14));
}

#[test]
fn boussinesq_change_of_variables_roundtrip() {
    let (traj, p) = small_trajectory();
    let states: Vec<_> = traj.fields.iter().map(|f| f.to_physical().unwrap()).collect();
    for eps in [p.epsilon, 0.0125] {
        let frame = BoussinesqFrame::new(eps, 1.3, 0.4, 0.0).unwrap();
        assert!(roundtrip_error(&states, &frame) <= 1e-12);
        // the background is the linear stratification
        let v = to_boussinesq(&states[0], &frame);
        let g = *states[0].grid();
        let idx = g.flat([1, 2, 5]);
        let x3 = g.position(idx)[2];
        let want = 0.4 - x3 / (eps * 1.3f64).powi(2) + states[0].comps[3][idx] / (eps * 1.69);
        assert!((v.comps[3][idx] - want).abs() <= 1e-12 * want.abs());
        assert_eq!(v.comps[0], states[0].comps[0]);
    }
    let frame = BoussinesqFrame::new(0.1, 1.0, 0.0, 2.0).unwrap();
    let x3 = [0.0, 1.0, 2.5];
    let phi = [0.3, -0.1, 0.7];
    let back = pressure_from_boussinesq(&pressure_to_boussinesq(&phi, &x3, &frame), &x3, &frame);
    for (a, b) in phi.iter().zip(&back) {
        assert!((a - b).abs() < 1e-12);
    }
    // ∂₃P̄ = −κ²ρ̄ (hydrostatic balance of the background)
    let h = 1e-4;
    let dp = (frame.p_bar(1.0 + h) - frame.p_bar(1.0 - h)) / (2.0 * h);
    assert!((dp + frame.kappa.powi(2) * frame.rho_bar(1.0)).abs() < 1e-5);
    assert!(BoussinesqFrame::new(0.0, 1.0, 0.0, 0.0).is_err());
}

fn tiny_plan(nu: f64, nu_prime: f64) -> SweepPlan {
    let g = grid(16);
    let physics = PhysicsParams::new(nu, nu_prime, 0.1).unwrap();
    let mut solver = SolverConfig::new(physics, 0.005, 0.1, &g);
    solver.sample_stride = 2;
    SweepPlan { grid: g, physics, solver, q_list: vec![3.0, 4.0, 5.0], window: (1.0 / 320.0, 1.0 / 320.0) }
}

#[test]
fn stratified_well_prepared_data_has_small_flat_oscillating_norm() {
    let spec = InitialDataSpec { amplitude_osc: 0.0, theta_profile: vec![], ..Default::default() };
    let r = run_sweep(&[0.2, 0.1, 0.05], &spec, &tiny_plan(0.1, 0.1)).unwrap();
    let ill = run_sweep(&[0.2, 0.1, 0.05], &InitialDataSpec::default(), &tiny_plan(0.1, 0.1)).unwrap();
    // the stratified flow still feeds the oscillating part through its own
    // advection, so "small" is relative to the ill-prepared run
    for qi in 0..3 {
        let well = r.norms_osc(qi);
        let bad = ill.norms_osc(qi);
        for (w, b) in well.iter().zip(&bad) {
            assert!(*w < 0.1 * b, "well-prepared {w} vs ill-prepared {b}");
        }
        let hi = well.iter().cloned().fold(0.0, f64::max);
        let lo = well.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi <= 1.1 * lo, "not flat in epsilon: {well:?}");
    }
    assert_eq!(r.regime, RateRegime::NuEqual);
    assert_eq!(r.global_reference, Some(0.1875));
    assert!(r.rows.iter().all(|row| row.admissible && row.max_divergence < 1e-10));
}

#[test]
fn sweep_records_admissibility_and_fits() {
    let r = run_sweep(&[0.2, 0.1], &InitialDataSpec::default(), &tiny_plan(0.1, 0.12)).unwrap();
    assert_eq!(r.regime, RateRegime::NuDistinct);
    let e1 = r.eps1.unwrap();
    assert!(r.rows.iter().all(|row| row.admissible == (row.epsilon <= e1)));
    assert_eq!(r.fits.len(), 3);
    assert!((r.theoretical[1] - 7.8125e-4).abs() < 1e-15);
    assert_eq!(r.epsilons, vec![0.2, 0.1]);
}

#[test]
fn sweep_rejects_bad_inputs_and_keeps_partial_results() {
    let plan = tiny_plan(0.1, 0.1);
    let spec = InitialDataSpec::default();
    assert!(run_sweep(&[0.1, 0.2], &spec, &plan).is_err());
    assert!(run_sweep(&[], &spec, &plan).is_err());
    let bad_q = SweepPlan { q_list: vec![6.5], ..plan.clone() };
    assert!(matches!(run_sweep(&[0.1], &spec, &bad_q), Err(LabError::Domain(_))));
    // a step far beyond the CFL limit fails every run; nothing is kept
    let mut wild = plan.clone();
    wild.solver.dt = 0.05;
    wild.solver.t_final = 0.1;
    let loud = InitialDataSpec { amplitude_osc: 400.0, amplitude_strat: 400.0, ..spec };
    let (partial, err) = run_sweep_partial(&[0.2, 0.1], &loud, &wild);
    assert!(err.is_some());
    assert!(partial.rows.len() < 2);
}

#[test]
fn oscillating_norm_does_not_grow_when_epsilon_shrinks_eightfold() {
    let r = run_sweep(&[0.2, 0.025], &InitialDataSpec::default(), &tiny_plan(0.1, 0.1)).unwrap();
    for qi in 0..3 {
        let v = r.norms_osc(qi);
        assert!(v[1] <= v[0], "q={}: {v:?}", r.q_list[qi]);
    }
}
