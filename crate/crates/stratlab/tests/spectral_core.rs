use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratlab::spectral_core::*;
use stratlab::LabError;

fn random_physical(grid: Grid3, seed: u64) -> PhysicalField4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = PhysicalField4::zeros(grid);
    for c in f.comps.iter_mut() {
        for x in c.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
    }
    f
}

/// Smooth random real field with energy on |ξ| ≤ kmax.
fn random_smooth(grid: Grid3, kmax: f64, seed: u64) -> SpectralField4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField4::from_fn(grid, |_, xi| {
        if norm3(xi) > kmax || norm3(xi) == 0.0 {
            return [ZERO; 4];
        }
        std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    });
    f.symmetrize();
    f
}

#[test]
fn grid_wavenumber_examples() {
    let g = Grid3::new(8, TAU).unwrap();
    assert_eq!(g.grid_wavenumber([1, 0, 0]).unwrap(), [1.0, 0.0, 0.0]);
    assert_eq!(g.grid_wavenumber([7, 0, 0]).unwrap(), [-1.0, 0.0, 0.0]);
    let g = Grid3::new(8, PI).unwrap();
    let xi = g.grid_wavenumber([1, 1, 1]).unwrap();
    for c in xi {
        assert!((c - 2.0).abs() < 1e-15);
    }
    assert!(matches!(
        g.grid_wavenumber([8, 0, 0]),
        Err(LabError::Range { .. })
    ));
}

#[test]
fn grid_rejects_bad_shapes() {
    assert!(Grid3::new(7, 1.0).is_err());
    assert!(Grid3::new(6, 1.0).is_err());
    assert!(Grid3::new(8, 0.0).is_err());
    assert!(Grid3::new(8, -1.0).is_err());
}

proptest! {
    #[test]
    fn wavenumber_is_odd_under_negation(i in 0usize..16, j in 0usize..16, k in 0usize..16) {
        let g = Grid3::new(16, 3.0).unwrap();
        let idx = g.flat([i, j, k]);
        let a = g.xi(idx);
        let b = g.xi(g.neg(idx));
        for c in 0..3 {
            prop_assert_eq!(a[c], -b[c]);
        }
        prop_assert_eq!(g.neg(g.neg(idx)), idx);
    }
}

#[test]
fn nyquist_maps_to_zero_wavenumber() {
    let g = Grid3::new(8, TAU).unwrap();
    assert_eq!(g.grid_wavenumber([4, 0, 0]).unwrap(), [0.0, 0.0, 0.0]);
    assert!(g.touches_nyquist(g.flat([4, 1, 0])));
    assert!(!g.dealias_keep(g.flat([3, 0, 0])));
    assert!(g.dealias_keep(g.flat([2, 0, 0])));
}

#[test]
fn plane_wave_has_one_coefficient() {
    let g = Grid3::new(8, TAU).unwrap();
    let mut data: Vec<Complex64> = (0..g.len())
        .map(|idx| {
            let x = g.position(idx);
            Complex64::new(0.0, 2.0 * x[0] - x[1] + 3.0 * x[2]).exp()
        })
        .collect();
    stratlab::spectral_core::fft::forward(&g, &mut data);
    let target = g.flat([2, 7, 3]);
    for (idx, c) in data.iter().enumerate() {
        let want = if idx == target { 1.0 } else { 0.0 };
        assert!(
            (c - Complex64::new(want, 0.0)).norm() < 1e-14,
            "mode {idx}: {c}"
        );
    }
}

#[test]
fn forward_matches_direct_dft() {
    let g = Grid3::new(8, 2.5).unwrap();
    let phys = random_physical(g, 3);
    let spec = phys.to_spectral().unwrap();
    let n = g.n();
    let mut worst: f64 = 0.0;
    for idx in (0..g.len()).step_by(7) {
        let [a, b, c] = g.unflat(idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..g.len() {
            let [x, y, z] = g.unflat(p);
            let phase = -TAU * ((a * x + b * y + c * z) % n) as f64 / n as f64;
            acc += phys.comps[2][p] * Complex64::from_polar(1.0, phase);
        }
        acc /= g.len() as f64;
        worst = worst.max((acc - spec.comps[2][idx]).norm());
    }
    assert!(worst < 1e-14, "direct DFT mismatch {worst:e}");
}

#[test]
fn transform_roundtrip_and_parseval_on_1000_fields() {
    let g = Grid3::new(8, TAU).unwrap();
    for seed in 0..1000 {
        let phys = random_physical(g, seed);
        let spec = phys.to_spectral().unwrap();
        let back = spec.to_physical().unwrap();
        let scale = phys
            .comps
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let err = phys
            .comps
            .iter()
            .flatten()
            .zip(back.comps.iter().flatten())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-12 * scale, "seed {seed}: roundtrip {err:e}");
        let (ms, l2) = (phys.mean_square(), spec.l2_sq());
        assert!(
            (ms - l2).abs() <= 1e-12 * ms,
            "seed {seed}: Parseval {ms} vs {l2}"
        );
    }
}

#[test]
fn complex_transform_roundtrip_and_errors() {
    let g = Grid3::new(8, TAU).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let comps: [Vec<Complex64>; 4] = std::array::from_fn(|_| {
        (0..g.len())
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect()
    });
    let fwd = transform(&g, &comps, Direction::Forward).unwrap();
    let back = transform(&g, &fwd, Direction::Inverse).unwrap();
    for (a, b) in comps.iter().flatten().zip(back.iter().flatten()) {
        assert!((a - b).norm() < 1e-13);
    }
    let mut bad = comps.clone();
    bad[1][5] = Complex64::new(f64::NAN, 0.0);
    assert!(matches!(
        transform(&g, &bad, Direction::Forward),
        Err(LabError::Numeric(_))
    ));
}

#[test]
fn dyadic_block_examples() {
    let ladder = DyadicLadder::new(-2, 6).unwrap();
    // |ξ| = 2^j sits in the core of block j
    assert!((ladder.mask(2, 4.0) - 1.0).abs() < 1e-15);
    assert_eq!(ladder.mask(2, 4.0 * 32.0), 0.0);
    assert_eq!(ladder.mask(9, 4.0), 0.0);

    let g = Grid3::new(16, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let f = SpectralField4::from_fn(g, |idx, _| {
        if idx == g.flat([4, 0, 0]) || idx == g.flat([12, 0, 0]) {
            [ZERO, ZERO, ZERO, Complex64::new(1.0, 0.0)]
        } else {
            [ZERO; 4]
        }
    });
    let block = dyadic_project(&f, 2, &lad);
    assert!((block.l2_sq() - f.l2_sq()).abs() < 1e-15);
    assert_eq!(dyadic_project(&f, lad.j_max + 3, &lad).l2(), 0.0);
}

#[test]
fn dyadic_blocks_resum_to_field() {
    let g = Grid3::new(16, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let f = random_smooth(g, 12.0, 5);
    let mut sum = SpectralField4::zeros(g);
    for j in lad.indices() {
        sum = sum.add(&dyadic_project(&f, j, &lad));
    }
    let err = sum.sub(&f).max_abs();
    assert!(err < 1e-12, "ladder resummation defect {err:e}");
}

proptest! {
    #[test]
    fn partition_of_unity_on_band(x in 0.0f64..1.0) {
        let lad = DyadicLadder::new(-3, 7).unwrap();
        let (lo, hi) = lad.band();
        let r = lo * (hi / lo).powf(x);
        prop_assert!(lad.partition_defect(r) <= 1e-12);
    }

    #[test]
    fn chi_is_a_cutoff(x in -3.0f64..3.0) {
        let v = chi(x);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, chi(-x));
        if x.abs() <= 0.5 { prop_assert_eq!(v, 1.0); }
        if x.abs() >= 1.0 { prop_assert_eq!(v, 0.0); }
    }
}

#[test]
fn chi_is_monotone_and_smooth_at_the_edges() {
    let mut prev = 1.0;
    for i in 0..=1000 {
        let x = 0.5 + 0.5 * i as f64 / 1000.0;
        let v = chi(x);
        assert!(v <= prev + 1e-15);
        prev = v;
    }
    // flat contact: χ(1/2 + δ) deviates from 1 faster than any power
    assert!(1.0 - chi(0.5 + 1e-3) < 1e-100);
    assert!(chi(1.0 - 1e-3) < 1e-100);
    assert!((psi(1.0) - 1.0).abs() < 1e-15);
}

#[test]
fn sobolev_single_mode() {
    let g = Grid3::new(8, TAU).unwrap();
    let f = SpectralField4::from_fn(g, |idx, _| {
        if idx == g.flat([2, 0, 0]) {
            [Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]
        } else {
            [ZERO; 4]
        }
    });
    let h1 = norm(&f, NormKind::Sobolev { s: 1.0 }).unwrap();
    assert!((h1 - 2.0).abs() < 1e-14, "{h1}");
    assert!((norm(&f, NormKind::Sobolev { s: 0.0 }).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn sobolev_overflow_is_reported() {
    let g = Grid3::new(8, 1e-3).unwrap();
    let f = random_smooth(g, 1e9, 1);
    assert!(matches!(sobolev(&f, 200.0), Err(LabError::Numeric(_))));
}

#[test]
fn gaussian_besov_l2_matches_h0() {
    let g = Grid3::new(32, TAU).unwrap();
    let c = PI;
    let phys = PhysicalField4::from_fn(g, |x| {
        let r2 = (x[0] - c).powi(2) + (x[1] - c).powi(2) + (x[2] - c).powi(2);
        [0.0, 0.0, 0.0, (-r2 / 0.3).exp()]
    });
    let f = phys.to_spectral().unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let b = besov(&f, 0.0, 2.0, 2.0, &lad).unwrap();
    let h = sobolev(&f, 0.0).unwrap();
    assert!((b / h - 1.0).abs() < 0.05, "B^0_22 / H^0 = {}", b / h);
}

#[test]
fn l4_besov_embedding_constant_is_finite() {
    let g = Grid3::new(16, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let f = random_smooth(g, 7.0, 100 + seed);
        let l4 = lq(&f, 4.0).unwrap();
        let b = besov(&f, 0.0, 4.0, 2.0, &lad).unwrap();
        assert!(b > 0.0 && l4.is_finite());
        worst = worst.max(l4 / b);
    }
    println!("empirical C in ||f||_L4 <= C ||f||_B^0_(4,2): {worst:.4}");
    assert!(worst.is_finite() && worst < 10.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn norms_are_homogeneous(seed in 0u64..1000, lambda in -5.0f64..5.0) {
        let g = Grid3::new(8, TAU).unwrap();
        let f = random_smooth(g, 2.5, seed);
        let kinds = [
            NormKind::Sobolev { s: 0.5 },
            NormKind::Sobolev { s: -0.5 },
            NormKind::Besov { s: 0.5, p: 2.0, r: 1.0 },
            NormKind::Besov { s: -1.0, p: 3.0, r: f64::INFINITY },
            NormKind::Lq { q: 3.0 },
            NormKind::Lq { q: f64::INFINITY },
        ];
        for kind in kinds {
            let a = norm(&f.scaled(lambda), kind).unwrap();
            let b = lambda.abs() * norm(&f, kind).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{:?}: {} vs {}", kind, a, b);
        }
    }
}

fn single_mode_series(g: Grid3, times: &[f64], env: impl Fn(f64) -> f64) -> SpaceTimeSeries {
    let f = SpectralField4::from_fn(g, |idx, _| {
        if idx == g.flat([2, 1, 0]) || idx == g.flat([6, 7, 0]) {
            [ZERO, ZERO, Complex64::new(0.5, 0.0), ZERO]
        } else {
            [ZERO; 4]
        }
    });
    let fields = times.iter().map(|&t| f.scaled(env(t))).collect();
    SpaceTimeSeries::new(times.to_vec(), fields).unwrap()
}

#[test]
fn chemin_lerner_constant_series_at_infinity() {
    let g = Grid3::new(8, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let s = single_mode_series(g, &[0.0, 0.5, 1.0], |_| 1.0);
    let cl = chemin_lerner_norm(&s, f64::INFINITY, 2.0, 1.0, 0.5, &lad).unwrap();
    let inst = besov(&s.fields[0], 0.5, 2.0, 1.0, &lad).unwrap();
    assert!((cl - inst).abs() < 1e-14 * inst);
}

#[test]
fn series_validation() {
    let g = Grid3::new(8, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let empty = SpaceTimeSeries::default();
    assert!(matches!(
        chemin_lerner_norm(&empty, 1.0, 2.0, 1.0, 0.0, &lad),
        Err(LabError::Argument(_))
    ));
    assert!(matches!(
        spacetime_norm(&empty, 2.0, 2.0),
        Err(LabError::Argument(_))
    ));
    let z = SpectralField4::zeros(g);
    assert!(SpaceTimeSeries::new(vec![0.0, 0.0], vec![z.clone(), z.clone()]).is_err());
    let s = SpaceTimeSeries::new(vec![0.0, 1.0], vec![z.clone(), z]).unwrap();
    assert!(matches!(
        spacetime_norm(&s, 0.5, 2.0),
        Err(LabError::Argument(_))
    ));
    assert!(matches!(
        spacetime_norm(&s, 2.0, 0.5),
        Err(LabError::Argument(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    /// Minkowski: time-then-ℓ^c is dominated by ℓ^c-then-time when a ≤ c.
    #[test]
    fn chemin_lerner_ordering(seed in 0u64..10_000, a in 1.0f64..2.0, dc in 0.0f64..2.0) {
        let g = Grid3::new(8, TAU).unwrap();
        let lad = DyadicLadder::for_grid(&g);
        let c = a + dc;
        let times: Vec<f64> = (0..6).map(|i| 0.2 * i as f64).collect();
        let fields: Vec<_> = (0..6).map(|i| random_smooth(g, 3.5, seed * 10 + i)).collect();
        let s = SpaceTimeSeries::new(times, fields).unwrap();
        let tilde = chemin_lerner_norm(&s, a, 2.0, c, 0.5, &lad).unwrap();
        let plain = time_besov_norm(&s, a, 2.0, c, 0.5, &lad).unwrap();
        prop_assert!(tilde <= plain * (1.0 + 1e-12), "{} > {}", tilde, plain);
    }
}

#[test]
fn heat_flow_chemin_lerner_bound() {
    let g = Grid3::new(16, TAU).unwrap();
    let lad = DyadicLadder::for_grid(&g);
    let theta0 = random_smooth(g, 7.0, 42).map_modes(|_, _, f| [ZERO, ZERO, ZERO, f[3]]);
    let times: Vec<f64> = (0..=4000)
        .map(|i| 2.0 * (i as f64 / 4000.0).powi(3))
        .collect();
    let fields = times
        .iter()
        .map(|&t| {
            let mut f = theta0.clone();
            f.apply_multiplier(|_, xi| (-t * norm3(xi).powi(2)).exp());
            f
        })
        .collect();
    let s = SpaceTimeSeries::new(times, fields).unwrap();
    let lhs = chemin_lerner_norm(&s, 1.0, 2.0, 1.0, 1.5, &lad).unwrap();
    let rhs = besov(&theta0, -0.5, 2.0, 1.0, &lad).unwrap();
    println!(
        "heat flow: L~1 B^(3/2)_(2,1) / B^(-1/2)_(2,1) = {:.4}",
        lhs / rhs
    );
    assert!(lhs.is_finite() && lhs / rhs < 4.0);
}

#[test]
fn spacetime_norm_examples() {
    let g = Grid3::new(8, TAU).unwrap();
    let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let s = single_mode_series(g, &times, |_| 1.0);
    for q in [2.0, 3.0, 5.0] {
        let lq0 = lq(&s.fields[0], q).unwrap();
        assert!((spacetime_norm(&s, 2.0, q).unwrap() - lq0).abs() < 1e-13 * lq0);
    }
    let scaled = SpaceTimeSeries::new(
        times.clone(),
        s.fields.iter().map(|f| f.scaled(-3.0)).collect(),
    )
    .unwrap();
    let (a, b) = (
        spacetime_norm(&scaled, 2.0, 4.0).unwrap(),
        spacetime_norm(&s, 2.0, 4.0).unwrap(),
    );
    assert!((a - 3.0 * b).abs() < 1e-13 * a);

    // e^{-t} envelope: ∫₀^∞ e^{-2t} dt = 1/2
    let times: Vec<f64> = (0..=6000).map(|i| i as f64 * 0.005).collect();
    let s = single_mode_series(g, &times, |t| (-t).exp());
    let want = lq(&s.fields[0], 4.0).unwrap() / 2f64.sqrt();
    let got = spacetime_norm(&s, 2.0, 4.0).unwrap();
    assert!((got / want - 1.0).abs() < 1e-5, "{got} vs {want}");
}
