use crate::error::{LabError, Result};
use crate::limit_solvers::SnsOptions;
use crate::spectral_core::{Grid3, ModeMask};
use crate::wave_algebra::PhysicsParams;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub params: PhysicsParams,
    pub dt: f64,
    pub t_final: f64,
    /// Radius of the spectral ball J_n of the Friedrichs scheme.
    pub friedrichs_radius: f64,
    pub dealias: bool,
    pub sample_stride: usize,
    /// Switch for the quadratic terms (linear runs keep the same splitting).
    pub nonlinear: bool,
    pub cfl_limit: f64,
}

impl SolverConfig {
    /// Ball inscribed in the 2/3 cube, dealiasing on, every step sampled.
    pub fn new(params: PhysicsParams, dt: f64, t_final: f64, grid: &Grid3) -> Self {
        SolverConfig {
            params,
            dt,
            t_final,
            friedrichs_radius: ModeMask::default_radius(grid),
            dealias: true,
            sample_stride: 1,
            nonlinear: true,
            cfl_limit: 0.5,
        }
    }

    pub fn validate(&self, grid: &Grid3) -> Result<()> {
        self.params.validate()?;
        let nyquist = grid.dk() * (grid.n() / 2) as f64;
        if !(self.friedrichs_radius > 0.0 && self.friedrichs_radius <= nyquist) {
            return Err(LabError::Argument(format!(
                "friedrichs_radius {} must lie in (0, {nyquist}]",
                self.friedrichs_radius
            )));
        }
        if !(self.cfl_limit > 0.0) {
            return Err(LabError::Argument("cfl_limit must be positive".into()));
        }
        self.steps().map(|_| ())
    }

    pub fn steps(&self) -> Result<usize> {
        self.sns_options().steps()
    }

    pub fn mask(&self, grid: &Grid3) -> ModeMask {
        ModeMask::new(grid, self.friedrichs_radius, self.dealias)
    }

    /// Options that make the limit solver step in lock-step with this one.
    pub fn sns_options(&self) -> SnsOptions {
        SnsOptions {
            dt: self.dt,
            t_final: self.t_final,
            sample_stride: self.sample_stride,
            advection: self.nonlinear,
            radius: Some(self.friedrichs_radius),
            cfl_limit: self.cfl_limit,
        }
    }
}
