use super::dyadic::{dyadic_project, DyadicLadder};
use super::field::SpectralField4;
use super::grid::norm3;
use crate::error::{LabError, Result};

/// Norm families; exponents may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    Sobolev { s: f64 },
    Besov { s: f64, p: f64, r: f64 },
    Lq { q: f64 },
}

pub fn norm(field: &SpectralField4, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Sobolev { s } => sobolev(field, s),
        NormKind::Besov { s, p, r } => besov(field, s, p, r, &DyadicLadder::for_grid(field.grid())),
        NormKind::Lq { q } => lq(field, q),
    }
}

/// Ḣ^s, excluding ξ = 0.
pub fn sobolev(field: &SpectralField4, s: f64) -> Result<f64> {
    let grid = field.grid();
    let mut acc = 0.0;
    for idx in 0..grid.len() {
        let k = norm3(grid.xi(idx));
        if k == 0.0 {
            continue;
        }
        let mass: f64 = field.comps.iter().map(|c| c[idx].norm_sqr()).sum();
        if mass == 0.0 {
            continue;
        }
        let w = k.powf(2.0 * s);
        if !w.is_finite() {
            return Err(LabError::Numeric(format!("|xi|^(2s) with s = {s}")));
        }
        acc += w * mass;
    }
    Ok(acc.sqrt())
}

pub fn lq(field: &SpectralField4, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(LabError::Argument(format!("L^q needs q >= 1, got {q}")));
    }
    if q == 2.0 {
        return Ok(field.l2());
    }
    Ok(field.to_physical()?.lq(q))
}

/// ℓ^r-combination; r = ∞ gives the max.
pub fn lr_sum(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

pub fn besov(field: &SpectralField4, s: f64, p: f64, r: f64, ladder: &DyadicLadder) -> Result<f64> {
    if !(p >= 1.0 && r >= 1.0) {
        return Err(LabError::Argument(format!(
            "Besov indices need p, r >= 1, got p={p}, r={r}"
        )));
    }
    let mut blocks = Vec::new();
    for j in ladder.indices() {
        let b = lq(&dyadic_project(field, j, ladder), p)?;
        blocks.push(2f64.powf(j as f64 * s) * b);
    }
    Ok(lr_sum(blocks.into_iter(), r))
}

/// Trapezoid rule for ∫ g dt on the given samples.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// (∫|g|^a dt)^{1/a} by trapezoid; a = ∞ gives the max.
pub fn time_la(times: &[f64], values: &[f64], a: f64) -> f64 {
    if a.is_infinite() {
        return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(a)).collect();
    trapezoid(times, &powered).powf(1.0 / a)
}
