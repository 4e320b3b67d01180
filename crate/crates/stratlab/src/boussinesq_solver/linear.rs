use crate::error::{LabError, Result};
use crate::spectral_core::{Grid3, ModeMask, SpectralField4, C64};
use crate::wave_algebra::linalg::{expm4, matmul4, Mat4};
use crate::wave_algebra::{
    leray_matrix, wave_matrix, ModeBasis, ModeGeometry, PhysicsParams, Regime,
};

type RealMat4 = [[f64; 4]; 4];

/// exp(t𝔹(ξ)) restricted to divergence-free data (the gradient part is
/// dropped). The flag marks modes handled by the dense exponential.
pub fn mode_propagator(xi: [f64; 3], p: &PhysicsParams, t: f64) -> Result<(RealMat4, bool)> {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let mut out = [[0.0; 4]; 4];
    if k2 == 0.0 {
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return Ok((out, false));
    }
    if xi[0] == 0.0 && xi[1] == 0.0 {
        // 𝔹 is diagonal on divergence-free data there (v³ = 0)
        let ev = (-p.nu * k2 * t).exp();
        out[0][0] = ev;
        out[1][1] = ev;
        out[3][3] = (-p.nu_prime * k2 * t).exp();
        return Ok((out, false));
    }
    let g = ModeGeometry::new(xi, p)?;
    let closed = match g.regime(p) {
        Regime::Fallback => None,
        _ => match ModeBasis::new(xi, p) {
            Ok(b) => Some(b.propagator(t)),
            Err(LabError::Conditioning { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    let fallback = closed.is_none();
    let m: Mat4 = match closed {
        Some(m) => m,
        None => {
            let mut b = wave_matrix(xi, p)?;
            b.iter_mut().flatten().for_each(|z| *z *= t);
            matmul4(&expm4(&b), &leray_matrix(xi))
        }
    };
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[i][j].re;
        }
    }
    Ok((out, fallback))
}

/// Per-mode propagators over a fixed time span on the retained modes.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    grid: Grid3,
    span: f64,
    slots: Vec<u32>,
    mats: Vec<RealMat4>,
    fallback_modes: usize,
}

const NONE: u32 = u32::MAX;

impl LinearPropagator {
    pub fn new(grid: &Grid3, p: &PhysicsParams, span: f64, mask: &ModeMask) -> Result<Self> {
        let mut slots = vec![NONE; grid.len()];
        let mut mats = Vec::with_capacity(mask.count());
        let mut fallback_modes = 0;
        for (idx, slot) in slots.iter_mut().enumerate() {
            if !mask.keeps(idx) {
                continue;
            }
            let (m, fb) = mode_propagator(grid.xi(idx), p, span)?;
            fallback_modes += fb as usize;
            *slot = mats.len() as u32;
            mats.push(m);
        }
        Ok(LinearPropagator {
            grid: *grid,
            span,
            slots,
            mats,
            fallback_modes,
        })
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn fallback_modes(&self) -> usize {
        self.fallback_modes
    }

    /// Applies the flow in place; modes outside the mask are set to zero.
    pub fn apply(&self, f: &mut SpectralField4) {
        debug_assert_eq!(f.grid(), &self.grid);
        let zero = C64::new(0.0, 0.0);
        for (idx, &slot) in self.slots.iter().enumerate() {
            if slot == NONE {
                for c in f.comps.iter_mut() {
                    c[idx] = zero;
                }
                continue;
            }
            let m = &self.mats[slot as usize];
            let v = f.get(idx);
            let out = std::array::from_fn(|i| {
                v[0] * m[i][0] + v[1] * m[i][1] + v[2] * m[i][2] + v[3] * m[i][3]
            });
            f.set(idx, out);
        }
    }
}

/// The linear part of (S_ε) over a time dt on every resolved mode.
pub fn linear_flow(u: &SpectralField4, dt: f64, params: &PhysicsParams) -> Result<SpectralField4> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(LabError::Argument(format!(
            "dt must be nonnegative, got {dt}"
        )));
    }
    let grid = *u.grid();
    let mask = ModeMask::new(&grid, f64::INFINITY, false);
    let prop = LinearPropagator::new(&grid, params, dt, &mask)?;
    let mut out = u.clone();
    prop.apply(&mut out);
    Ok(out)
}
