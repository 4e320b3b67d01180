use super::dyadic::{dyadic_project, DyadicLadder};
use super::field::SpectralField4;
use super::norms::{lq, lr_sum, time_la};
use crate::error::{LabError, Result};

/// Time-sampled fields on a common grid.
#[derive(Clone, Debug, Default)]
pub struct SpaceTimeSeries {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField4>,
}

impl SpaceTimeSeries {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField4>) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(LabError::Argument(
                "times and fields differ in length".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LabError::Argument(
                "sample times must be strictly increasing".into(),
            ));
        }
        if let Some(first) = fields.first() {
            if fields.iter().any(|f| f.grid() != first.grid()) {
                return Err(LabError::Argument(
                    "series fields live on different grids".into(),
                ));
            }
        }
        Ok(SpaceTimeSeries { times, fields })
    }

    pub fn push(&mut self, t: f64, field: SpectralField4) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(LabError::Argument(format!(
                    "sample time {t} not after {last}"
                )));
            }
        }
        self.times.push(t);
        self.fields.push(field);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// ‖f‖_{L̃^a_t Ḃ^s_{b,c}}: time norm taken blockwise before the ℓ^c sum.
pub fn chemin_lerner_norm(
    series: &SpaceTimeSeries,
    a: f64,
    b: f64,
    c: f64,
    s: f64,
    ladder: &DyadicLadder,
) -> Result<f64> {
    if series.is_empty() {
        return Err(LabError::Argument("empty series".into()));
    }
    let mut blocks = Vec::new();
    for j in ladder.indices() {
        let mut inst = Vec::with_capacity(series.len());
        for f in &series.fields {
            inst.push(lq(&dyadic_project(f, j, ladder), b)?);
        }
        blocks.push(2f64.powf(j as f64 * s) * time_la(&series.times, &inst, a));
    }
    Ok(lr_sum(blocks.into_iter(), c))
}

/// ‖f‖_{L^a_t Ḃ^s_{b,c}}: Besov norm at each instant, then the time norm.
pub fn time_besov_norm(
    series: &SpaceTimeSeries,
    a: f64,
    b: f64,
    c: f64,
    s: f64,
    ladder: &DyadicLadder,
) -> Result<f64> {
    if series.is_empty() {
        return Err(LabError::Argument("empty series".into()));
    }
    let mut inst = Vec::with_capacity(series.len());
    for f in &series.fields {
        inst.push(super::norms::besov(f, s, b, c, ladder)?);
    }
    Ok(time_la(&series.times, &inst, a))
}

/// (∫ ‖f(t)‖_{L^q}^p dt)^{1/p}.
pub fn spacetime_norm(series: &SpaceTimeSeries, p_time: f64, q_space: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(LabError::Argument("empty series".into()));
    }
    if !(p_time >= 1.0 && q_space >= 1.0) {
        return Err(LabError::Argument(format!(
            "need p, q >= 1, got p={p_time}, q={q_space}"
        )));
    }
    let mut inst = Vec::with_capacity(series.len());
    for f in &series.fields {
        inst.push(lq(f, q_space)?);
    }
    Ok(time_la(&series.times, &inst, p_time))
}
