use crate::error::{LabError, Result};
use crate::spectral_core::{
    to_physical_many, to_spectral_many, Grid3, ModeMask, SpaceTimeSeries, SpectralField4, C64, ZERO,
};
use crate::wave_algebra::vorticity;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Horizontal vorticity ω = ∂₁v² − ∂₂v¹ of the limit flow, as a spectrum on the
/// 3-D grid (x₃ enters as a parameter).
#[derive(Clone, Debug)]
pub struct VorticityState {
    pub omega: Vec<C64>,
    pub grid: Grid3,
    pub nu: f64,
    pub time: f64,
}

impl VorticityState {
    pub fn new(grid: Grid3, omega: Vec<C64>, nu: f64) -> Result<Self> {
        if omega.len() != grid.len() {
            return Err(LabError::Argument(
                "vorticity length does not match grid".into(),
            ));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(LabError::Argument(format!(
                "nu must be nonnegative, got {nu}"
            )));
        }
        Ok(VorticityState {
            omega,
            grid,
            nu,
            time: 0.0,
        })
    }

    /// Vorticity of the horizontal components of `field`.
    pub fn from_velocity(field: &SpectralField4, nu: f64) -> Result<Self> {
        Self::new(*field.grid(), vorticity(field), nu)
    }

    pub fn velocity(&self) -> Result<SpectralField4> {
        biot_savart_h(self)
    }

    pub fn l2_sq(&self) -> f64 {
        self.omega.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// (v̂¹, v̂²) = (iξ₂, −iξ₁)ω̂/|ξ_h|² at one mode; zero on ξ_h = 0.
#[inline]
fn biot_savart_mode(xi: [f64; 3], w: C64) -> (C64, C64) {
    let h2 = xi[0] * xi[0] + xi[1] * xi[1];
    if h2 == 0.0 {
        return (ZERO, ZERO);
    }
    (I * xi[1] * w / h2, -I * xi[0] * w / h2)
}

/// ṽ^h = ∇_h^⊥Δ_h⁻¹ω, returned as (v¹, v², 0, 0).
pub fn biot_savart_h(state: &VorticityState) -> Result<SpectralField4> {
    let g = state.grid;
    let scale = state.omega.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = SpectralField4::zeros(g);
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        let w = state.omega[idx];
        if xi[0] == 0.0 && xi[1] == 0.0 {
            if w.norm() > 1e-12 * scale {
                return Err(LabError::Consistency(format!(
                    "vorticity {:.3e} on the line xi_h = 0 (mode {:?})",
                    w.norm(),
                    g.integer_mode(idx)
                )));
            }
            continue;
        }
        let (a, b) = biot_savart_mode(xi, w);
        out.comps[0][idx] = a;
        out.comps[1][idx] = b;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SnsOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Keep every `sample_stride`-th step (the final time is always kept).
    pub sample_stride: usize,
    pub advection: bool,
    /// Galerkin ball radius; `None` uses the ball inscribed in the 2/3 cube.
    pub radius: Option<f64>,
    pub cfl_limit: f64,
}

impl SnsOptions {
    pub fn new(t_final: f64, dt: f64) -> Self {
        SnsOptions {
            dt,
            t_final,
            sample_stride: 1,
            advection: true,
            radius: None,
            cfl_limit: 0.5,
        }
    }

    /// Number of steps; t_final must be an integer multiple of dt.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(LabError::Argument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(LabError::Argument(format!(
                "t_final must be nonnegative, got {}",
                self.t_final
            )));
        }
        if self.sample_stride == 0 {
            return Err(LabError::Argument(
                "sample_stride must be at least 1".into(),
            ));
        }
        let ratio = self.t_final / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-8 * ratio.max(1.0) {
            return Err(LabError::Argument(format!(
                "t_final = {} is not a multiple of dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// One Strang step of the vorticity equation: exact viscous half steps around
/// a Heun step for −ṽ^h·∇_hω (conservative form ∂_j(v^j ω)).
#[derive(Clone, Debug)]
pub struct SnsStepper {
    grid: Grid3,
    dt: f64,
    mask: ModeMask,
    half_heat: Vec<f64>,
    advection: bool,
    cfl_limit: f64,
}

impl SnsStepper {
    pub fn new(grid: Grid3, nu: f64, opts: &SnsOptions) -> Self {
        let radius = opts
            .radius
            .unwrap_or_else(|| ModeMask::default_radius(&grid));
        let half_heat = (0..grid.len())
            .map(|idx| {
                let xi = grid.xi(idx);
                let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                (-nu * k2 * 0.5 * opts.dt).exp()
            })
            .collect();
        SnsStepper {
            grid,
            dt: opts.dt,
            mask: ModeMask::new(&grid, radius, true),
            half_heat,
            advection: opts.advection,
            cfl_limit: opts.cfl_limit,
        }
    }

    pub fn mask(&self) -> &ModeMask {
        &self.mask
    }

    pub fn half_heat(&self, w: &mut [C64]) {
        for (c, m) in w.iter_mut().zip(&self.half_heat) {
            *c *= m;
        }
    }

    /// −mask·∂_j(v^j ω), j = 1, 2, and the largest horizontal speed.
    pub fn rhs(&self, w: &[C64]) -> (Vec<C64>, f64) {
        let g = &self.grid;
        let len = g.len();
        let mut v1 = vec![ZERO; len];
        let mut v2 = vec![ZERO; len];
        for idx in 0..len {
            let (a, b) = biot_savart_mode(g.xi(idx), w[idx]);
            v1[idx] = a;
            v2[idx] = b;
        }
        let phys = to_physical_many(g, &[&v1, &v2, w]);
        let speed = phys[0]
            .iter()
            .zip(&phys[1])
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max);
        if !self.advection {
            return (vec![ZERO; len], speed);
        }
        let fluxes: Vec<Vec<f64>> = vec![
            phys[0].iter().zip(&phys[2]).map(|(v, o)| v * o).collect(),
            phys[1].iter().zip(&phys[2]).map(|(v, o)| v * o).collect(),
        ];
        let spec = to_spectral_many(g, &fluxes);
        let mut out = vec![ZERO; len];
        for idx in 0..len {
            if self.mask.keeps(idx) {
                let xi = g.xi(idx);
                out[idx] = -I * (xi[0] * spec[0][idx] + xi[1] * spec[1][idx]);
            }
        }
        (out, speed)
    }

    pub fn step(&self, w: &[C64]) -> Result<Vec<C64>> {
        let mut a = w.to_vec();
        self.half_heat(&mut a);
        let (k1, speed) = self.rhs(&a);
        if self.advection {
            let cfl = self.dt * speed / self.grid.dx();
            if cfl > self.cfl_limit {
                return Err(LabError::Cfl {
                    cfl,
                    suggested_dt: 0.9 * self.cfl_limit * self.grid.dx() / speed,
                });
            }
        }
        let b: Vec<C64> = a.iter().zip(&k1).map(|(x, k)| x + self.dt * k).collect();
        let (k2, _) = self.rhs(&b);
        let mut c: Vec<C64> = (0..a.len())
            .map(|i| a[i] + 0.5 * self.dt * (k1[i] + k2[i]))
            .collect();
        self.half_heat(&mut c);
        Ok(c)
    }
}

/// Sampled solution of the limit system: vorticity and velocity at the same times.
#[derive(Clone, Debug)]
pub struct SnsRun {
    pub times: Vec<f64>,
    pub omega: Vec<Vec<C64>>,
    pub velocity: SpaceTimeSeries,
    pub final_state: VorticityState,
    pub steps: usize,
}

pub fn solve_sns(omega0: &VorticityState, t_final: f64, dt: f64) -> Result<SnsRun> {
    solve_sns_with(omega0, &SnsOptions::new(t_final, dt))
}

/// Integrates ∂_tω + ṽ^h·∇_hω − νΔω = 0. The datum is restricted to the
/// retained modes first.
pub fn solve_sns_with(omega0: &VorticityState, opts: &SnsOptions) -> Result<SnsRun> {
    let steps = opts.steps()?;
    let stepper = SnsStepper::new(omega0.grid, omega0.nu, opts);
    let mut w = omega0.omega.clone();
    if opts.advection {
        stepper.mask.apply(&mut w);
    }
    let t0 = omega0.time;
    let mut state = VorticityState {
        omega: w,
        ..omega0.clone()
    };
    let mut run = SnsRun {
        times: vec![t0],
        omega: vec![state.omega.clone()],
        velocity: SpaceTimeSeries::new(vec![t0], vec![biot_savart_h(&state)?])?,
        final_state: state.clone(),
        steps,
    };
    for n in 1..=steps {
        let next = stepper.step(&state.omega)?;
        let t = t0 + n as f64 * opts.dt;
        if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(LabError::Divergence {
                t,
                last_stable: state.time,
            });
        }
        state.omega = next;
        state.time = t;
        if n % opts.sample_stride == 0 || n == steps {
            run.times.push(t);
            run.omega.push(state.omega.clone());
            run.velocity.push(t, biot_savart_h(&state)?)?;
        }
    }
    run.final_state = state;
    Ok(run)
}
