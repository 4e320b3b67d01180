//! Fourier representation of four-component fields on the periodic box,
//! Littlewood–Paley blocks and the norms used by the estimates.
//!
//! Homogeneous norms never include ξ = 0.

pub mod dyadic;
pub mod fft;
pub mod field;
pub mod grid;
pub mod mask;
pub mod norms;
pub mod series;

pub use dyadic::{chi, dyadic_project, psi, DyadicLadder};
pub use field::{transform, Direction, PhysicalField4, SpectralField4, C64, ZERO};
pub use grid::{horizontal_norm, norm3, Grid3};
pub use mask::{to_physical_many, to_spectral_many, ModeMask};
pub use norms::{besov, lq, norm, sobolev, time_la, trapezoid, NormKind};
pub use series::{chemin_lerner_norm, spacetime_norm, time_besov_norm, SpaceTimeSeries};
