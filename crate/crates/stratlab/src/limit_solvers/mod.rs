//! Solvers for the ε → 0 limit: the 1-D heat equation for θ̃(x₃), the
//! horizontal Navier–Stokes flow ṽ^h in vorticity form, and the forcing G̃.

pub mod gtilde;
pub mod heat;
pub mod sns;

pub use gtilde::{compute_gtilde, gtilde_field, gtilde_mode, limit_forcing, q0_spectrum};
pub use heat::{heat1d_series, heat1d_solve, Heat1DState};
pub use sns::{
    biot_savart_h, solve_sns, solve_sns_with, SnsOptions, SnsRun, SnsStepper, VorticityState,
};
