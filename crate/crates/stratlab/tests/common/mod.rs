#![allow(dead_code)]

use nalgebra::{Complex, Matrix4};
use stratlab::wave_algebra::linalg::{Mat4, Vec4};

/// Eigenvalues of a real 4×4 matrix by nalgebra's dense Schur solver.
pub fn oracle_eigenvalues(m: &Mat4) -> Vec<Complex<f64>> {
    let real = Matrix4::from_fn(|i, j| m[i][j].re);
    real.complex_eigenvalues().iter().copied().collect()
}

/// Unit kernel vector of (m − λI) from the smallest singular triplet.
pub fn oracle_null_vector(m: &Mat4, lambda: Complex<f64>) -> Vec4 {
    let a = Matrix4::from_fn(|i, j| if i == j { m[i][j] - lambda } else { m[i][j] });
    let svd = a.svd(false, true);
    let vt = svd.v_t.unwrap();
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut x = nalgebra::Vector4::from_fn(|j, _| vt[(imin, j)].conj());
    // inverse iteration with a slightly offset shift sharpens the SVD guess
    let scale = a.norm();
    let shift = lambda + Complex::new(scale * 1e-13, scale * 1e-13);
    let b = Matrix4::from_fn(|i, j| if i == j { m[i][j] - shift } else { m[i][j] });
    let lu = b.lu();
    for _ in 0..3 {
        if let Some(y) = lu.solve(&x) {
            let nrm = y.norm();
            if nrm.is_finite() && nrm > 0.0 {
                x = y / Complex::new(nrm, 0.0);
            }
        }
    }
    std::array::from_fn(|j| x[j])
}

/// Sine of the angle between two complex vectors, via the orthogonal residual.
pub fn sin_angle(a: &Vec4, b: &Vec4) -> f64 {
    let na2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let dot: Complex<f64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let coef = dot / na2;
    let resid: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (y - coef * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    resid / nb
}

/// Best match of `target` in `pool`, removed from the pool.
pub fn take_closest(pool: &mut Vec<Complex<f64>>, target: Complex<f64>) -> Complex<f64> {
    let (i, _) = pool
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        .unwrap();
    pool.remove(i)
}

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratlab::spectral_core::{norm3, Grid3, SpectralField4, ZERO};

/// Real field with random coefficients on 0 < |ξ| ≤ kmax.
pub fn random_modes(grid: Grid3, kmax: f64, seed: u64) -> SpectralField4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField4::from_fn(grid, |_, xi| {
        let k = norm3(xi);
        if k > kmax || k == 0.0 {
            return [ZERO; 4];
        }
        std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    });
    f.symmetrize();
    f
}

/// Vorticity −|ξ_h|²ψ̂ of a random stream function; optionally x₃-independent.
pub fn random_vorticity(grid: Grid3, kmax: f64, seed: u64, x3_dependent: bool) -> Vec<Complex64> {
    let psi = random_modes(grid, kmax, seed);
    (0..grid.len())
        .map(|idx| {
            let xi = grid.xi(idx);
            if !x3_dependent && xi[2] != 0.0 {
                return ZERO;
            }
            -(xi[0] * xi[0] + xi[1] * xi[1]) * psi.comps[0][idx]
        })
        .collect()
}
