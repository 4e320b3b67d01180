//! The ε-sweep: ill-prepared data, (S_ε) runs against the shared limit
//! (ṽ^h, 0, θ̃), oscillating/stratified norms of D_ε and fitted rates.

pub mod boussinesq;
pub mod initial;
pub mod rates;
pub mod sweep;

pub use boussinesq::{
    from_boussinesq, pressure_from_boussinesq, pressure_to_boussinesq, roundtrip_error, to_boussinesq,
    BoussinesqFrame,
};
pub use initial::{build_initial_data, InitialData, InitialDataSpec, PhaseMode};
pub use rates::{fit_rate, k_of_q, theoretical_rate, RateRegime};
pub use sweep::{
    l2_in_time, osc_norm_series, run_sweep, run_sweep_partial, run_sweep_with_states, EpsilonRow, LimitReference, OscNormSeries,
    SweepPlan, SweepResult,
};
