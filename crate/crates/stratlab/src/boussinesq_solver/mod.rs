//! Friedrichs-truncated pseudo-spectral solvers for (S_ε) and for the
//! difference D_ε = U_ε − (ṽ^h, 0, θ̃_ε), with exact per-mode linear flow and
//! an energy ledger.

pub mod checkpoint;
pub mod config;
pub mod energy;
pub mod linear;
pub mod nonlinear;
pub mod simulate;

pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint,
};
pub use config::SolverConfig;
pub use energy::{
    coupling_terms, energy_report, energy_report_with, pressure_diagnostic, EnergyLedger,
    DEFAULT_GRONWALL_CONSTANT,
};
pub use linear::{linear_flow, mode_propagator, LinearPropagator};
pub use nonlinear::{advection_rhs, nonlinear_term, NonlinearTerm};
pub use simulate::{
    simulate_difference, simulate_sepsilon, simulate_sepsilon_observed, LimitSamples, Observer,
    Trajectory,
};
