//! Small dense complex linear algebra for per-mode 3×3 and 4×4 problems.

use num_complex::Complex64;

use crate::spectral_core::{C64, ZERO};

pub type Vec4 = [C64; 4];
pub type Mat4 = [[C64; 4]; 4];
pub type Mat3 = [[C64; 3]; 3];

const ONE: C64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

pub fn identity4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

#[inline]
pub fn matvec4(a: &Mat4, v: &Vec4) -> Vec4 {
    std::array::from_fn(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2] + a[i][3] * v[3])
}

pub fn norm_inf4(a: &Mat4) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// exp(A) by scaling and squaring with a Taylor core.
pub fn expm4(a: &Mat4) -> Mat4 {
    let norm = norm_inf4(a);
    let mut s = 0;
    if norm > 0.25 {
        s = (norm / 0.25).log2().ceil() as i32;
    }
    let scale = 0.5f64.powi(s);
    let mut x = *a;
    x.iter_mut().flatten().for_each(|v| *v *= scale);
    let mut result = identity4();
    let mut term = identity4();
    for k in 1..=18 {
        term = matmul4(&term, &x);
        term.iter_mut().flatten().for_each(|v| *v /= k as f64);
        for i in 0..4 {
            for j in 0..4 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = matmul4(&result, &result);
    }
    result
}

/// Coefficients (c₀..c₄, monic) of det(λI − A) by Faddeev–LeVerrier.
pub fn charpoly4(a: &Mat4) -> [C64; 5] {
    let mut coeffs = [ZERO; 5];
    coeffs[4] = ONE;
    let mut m = identity4();
    for k in 1..=4 {
        let am = matmul4(a, &m);
        let tr: C64 = (0..4).map(|i| am[i][i]).sum();
        let ck = -tr / k as f64;
        coeffs[4 - k] = ck;
        m = am;
        for i in 0..4 {
            m[i][i] += ck;
        }
    }
    coeffs
}

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic polynomial (ascending coefficients) by Durand–Kerner
/// followed by Newton polishing.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len() - 1;
    let bound = 1.0 + coeffs[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..deg).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let (p, _) = horner(coeffs, roots[i]);
            let mut denom = ONE;
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom == ZERO {
                continue;
            }
            let step = p / denom;
            roots[i] -= step;
            delta = delta.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = horner(coeffs, *r);
            if dp == ZERO {
                break;
            }
            *r -= p / dp;
        }
    }
    roots
}

/// Unit vector spanning the (numerical) kernel of a singular 4×4 matrix,
/// by Gaussian elimination with complete pivoting.
pub fn null_vector4(a: &Mat4) -> Vec4 {
    let mut m = *a;
    let mut cols = [0usize, 1, 2, 3];
    for k in 0..3 {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..4 {
            for j in k..4 {
                let v = m[i][cols[j]].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        m.swap(k, pi);
        cols.swap(k, pj);
        let piv = m[k][cols[k]];
        if piv == ZERO {
            break;
        }
        for i in (k + 1)..4 {
            let f = m[i][cols[k]] / piv;
            for j in k..4 {
                let sub = f * m[k][cols[j]];
                m[i][cols[j]] -= sub;
            }
        }
    }
    // free variable is the last pivot column
    let mut x = [ZERO; 4];
    x[cols[3]] = ONE;
    for k in (0..3).rev() {
        let mut s = ZERO;
        for j in (k + 1)..4 {
            s += m[k][cols[j]] * x[cols[j]];
        }
        let piv = m[k][cols[k]];
        x[cols[k]] = if piv == ZERO { ZERO } else { -s / piv };
    }
    let n = vec_norm(&x);
    x.map(|v| v / n)
}

/// Solves A x = b (4×4) with partial pivoting; `None` if a pivot vanishes.
pub fn solve4(a: &Mat4, b: &Vec4) -> Option<Vec4> {
    let mut m = *a;
    let mut rhs = *b;
    for k in 0..4 {
        let pi = (k..4)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .unwrap();
        if m[pi][k] == ZERO {
            return None;
        }
        m.swap(k, pi);
        rhs.swap(k, pi);
        for i in (k + 1)..4 {
            let f = m[i][k] / m[k][k];
            for j in k..4 {
                let sub = f * m[k][j];
                m[i][j] -= sub;
            }
            let sub = f * rhs[k];
            rhs[i] -= sub;
        }
    }
    let mut x = [ZERO; 4];
    for k in (0..4).rev() {
        let mut s = rhs[k];
        for j in (k + 1)..4 {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Some(x)
}

/// Polishes an approximate eigenpair of `a`: Newton on det(A − λI), whose step is
/// 1/tr((A − λI)⁻¹), followed by inverse iteration for the vector.
pub fn refine_eigenpair(a: &Mat4, lambda: C64, v: Vec4) -> (C64, Vec4) {
    let shifted = |l: C64| {
        let mut s = *a;
        for (i, row) in s.iter_mut().enumerate() {
            row[i] -= l;
        }
        s
    };
    let mut l = lambda;
    for _ in 0..3 {
        let s = shifted(l);
        let mut tr = ZERO;
        let mut ok = true;
        for i in 0..4 {
            let mut e = [ZERO; 4];
            e[i] = ONE;
            match solve4(&s, &e) {
                Some(col) => tr += col[i],
                None => ok = false,
            }
        }
        if !ok || tr == ZERO {
            break;
        }
        let step = ONE / tr;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        l += step;
        if step.norm() <= 1e-17 * (l.norm() + norm_inf4(a)) {
            break;
        }
    }
    let mut x = v;
    // a roundoff-sized offset keeps the shifted matrix numerically invertible
    let s = shifted(l + c(1e-14 * norm_inf4(a)));
    for _ in 0..2 {
        match solve4(&s, &x) {
            Some(y) => {
                let n = vec_norm(&y);
                if !(n.is_finite() && n > 0.0) {
                    break;
                }
                x = y.map(|z| z / n);
            }
            None => break,
        }
    }
    (l, x)
}

/// Solves A x = b with partial pivoting; `None` if A is singular.
pub fn solve3(a: &Mat3, b: &[C64; 3]) -> Option<[C64; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for k in 0..3 {
        let pi = (k..3)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .unwrap();
        if m[pi][k] == ZERO {
            return None;
        }
        m.swap(k, pi);
        rhs.swap(k, pi);
        for i in (k + 1)..3 {
            let f = m[i][k] / m[k][k];
            for j in k..3 {
                let sub = f * m[k][j];
                m[i][j] -= sub;
            }
            let sub = f * rhs[k];
            rhs[i] -= sub;
        }
    }
    let mut x = [ZERO; 3];
    for k in (0..3).rev() {
        let mut s = rhs[k];
        for j in (k + 1)..3 {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Some(x)
}

pub fn inverse3(a: &Mat3) -> Option<Mat3> {
    let mut inv = [[ZERO; 3]; 3];
    for j in 0..3 {
        let mut e = [ZERO; 3];
        e[j] = ONE;
        let col = solve3(a, &e)?;
        for i in 0..3 {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

pub fn norm1_3(a: &Mat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}
