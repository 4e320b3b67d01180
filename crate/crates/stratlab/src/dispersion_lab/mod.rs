//! Numerical checks of the dispersive estimates: the model integral
//! I^R_{α,β}(σ) and its σ^{−1/4} rate, the Cardan roots of f₁ and their
//! expansions, oscillatory kernel sup-norms and truncated heat smoothing.

pub mod fit;
pub mod heat;
pub mod integral;
pub mod kernel;
pub mod phase;
pub mod quadrature;

pub use fit::{fit_decay, log_spaced, DecayFit, FitResult};
pub use heat::heat_truncated_ratio;
pub use integral::{eval_i, eval_i_detailed, sup_beta_i, BetaSup};
pub use kernel::{
    hessian_eigenvalues, kernel_k0, kernel_k0_sup, kernel_keps, kernel_keps_sup, kernel_sup,
    phase_b, phase_hessian, phi1, KernelSpec, KernelSup, KernelVariant,
};
pub use phase::{
    asymptotic_residual, cardan_roots, cardan_roots_below_critical, cardan_roots_textbook,
    dl2_root_coefficient, f1_eval, AsymptoticKind, PhaseProfile, CRITICAL_POINT, CRITICAL_VALUE,
};
pub use quadrature::{gauss_legendre, integrate_adaptive, QuadEstimate};
