//! 3-D complex FFTs on the cubic grid, with plans cached per thread.
//!
//! Forward transforms are normalised by 1/N³ so that coefficients are the
//! Fourier-series amplitudes of the grid function.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid3;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Arc<Plans>>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Arc<Plans> {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Plans {
                    fwd: planner.plan_fft_forward(n),
                    inv: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    })
}

fn fft3_raw(data: &mut [Complex64], n: usize, plan: &dyn Fft<f64>) {
    assert_eq!(data.len(), n * n * n);
    let zero = Complex64::new(0.0, 0.0);
    let mut scratch = vec![zero; plan.get_inplace_scratch_len()];
    // last axis is contiguous
    plan.process_with_scratch(data, &mut scratch);

    let mut buf = vec![zero; n * n];
    for i1 in 0..n {
        let plane = &mut data[i1 * n * n..(i1 + 1) * n * n];
        for i2 in 0..n {
            for i3 in 0..n {
                buf[i3 * n + i2] = plane[i2 * n + i3];
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for i2 in 0..n {
            for i3 in 0..n {
                plane[i2 * n + i3] = buf[i3 * n + i2];
            }
        }
    }
    for i2 in 0..n {
        for i1 in 0..n {
            let base = (i1 * n + i2) * n;
            for i3 in 0..n {
                buf[i3 * n + i1] = data[base + i3];
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for i1 in 0..n {
            let base = (i1 * n + i2) * n;
            for i3 in 0..n {
                data[base + i3] = buf[i3 * n + i1];
            }
        }
    }
}

/// Physical samples → normalised coefficients, in place.
pub fn forward(grid: &Grid3, data: &mut [Complex64]) {
    let n = grid.n();
    fft3_raw(data, n, plans(n).fwd.as_ref());
    let s = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= s);
}

/// Normalised coefficients → physical samples, in place.
pub fn inverse(grid: &Grid3, data: &mut [Complex64]) {
    let n = grid.n();
    fft3_raw(data, n, plans(n).inv.as_ref());
}

/// Inverse transform of two Hermitian spectra with a single complex FFT.
pub fn inverse_real_pair(grid: &Grid3, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    inverse(grid, &mut buf);
    (
        buf.iter().map(|c| c.re).collect(),
        buf.iter().map(|c| c.im).collect(),
    )
}

pub fn inverse_real(grid: &Grid3, a: &[Complex64]) -> Vec<f64> {
    let mut buf = a.to_vec();
    inverse(grid, &mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Forward transform of two real fields with a single complex FFT.
pub fn forward_real_pair(grid: &Grid3, x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut buf: Vec<Complex64> = x
        .iter()
        .zip(y)
        .map(|(&p, &q)| Complex64::new(p, q))
        .collect();
    forward(grid, &mut buf);
    let len = buf.len();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    for idx in 0..len {
        let c = buf[idx];
        let cm = buf[grid.neg(idx)].conj();
        a[idx] = 0.5 * (c + cm);
        // (c − cm) / 2i
        let d = 0.5 * (c - cm);
        b[idx] = Complex64::new(d.im, -d.re);
    }
    (a, b)
}

pub fn forward_real(grid: &Grid3, x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    forward(grid, &mut buf);
    buf
}

/// 1-D transforms of length n (used for the x₃-only temperature profile).
pub fn forward_1d(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(data);
    let s = 1.0 / n as f64;
    data.iter_mut().for_each(|c| *c *= s);
}

pub fn inverse_1d(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(data);
}
