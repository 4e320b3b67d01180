//! The linearised wave operator 𝔹(ξ, ε), its closed-form eigen-decomposition,
//! the projectors ℙ, ℙ₂, ℙ₃, ℙ₄ and the frequency windows 𝒫_{r,R}.

pub mod basis;
pub mod linalg;
pub mod operator;
pub mod params;
pub mod projectors;
pub mod truncation;

pub use basis::{leray_matrix, ModeBasis, MAX_CONDITION};
pub use operator::{
    e_wave, eigen_closed_form, eigen_numeric, v2, wave_matrix, Eigensystem, ModeGeometry, Regime,
};
pub use params::PhysicsParams;
pub use projectors::{
    apply_b, leray_mode, leray_project, oscillating_part, split_stratified_osc, stratified_mode,
    stratified_part, vorticity, wave_project,
};
pub use truncation::{
    count_nonadmissible_modes, epsilon_threshold, freq_truncate, Thresholds, TruncationWindow,
};
