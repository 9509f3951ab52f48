//! Constellation design and link analysis for a non-coherent fast-forward
//! full-duplex relay that shields a jammed user.
//!
//! Alice's bit reaches Bob on two paths: directly on the jammed band, and
//! through Charlie, who detects it and multiplexes it with his own bit on
//! his band by choosing one of four energy levels. Bob decodes both bits
//! with a single energy detector over `n_r` antennas.
//!
//! * [`specfun`] regularized incomplete gamma functions.
//! * [`linkmodel`] detection and pair-error probabilities in closed form.
//! * [`optimizer`] minimization of the error bound over the constellation.
//! * [`simulator`] Monte Carlo check of the above.

// `!(x > y)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linkmodel;
pub mod optimizer;
pub mod simulator;
pub mod specfun;

pub use error::{Error, Result};
pub use linkmodel::{
    complete_constellation, error_breakdown, noise_power, pe_exact, pe_star, Constellation,
    ErrorBreakdown, SystemParams, ThresholdMode,
};
pub use optimizer::{
    exhaustive_search, greedy_descent, DescentConfig, GridResolution, Method, OptimizerResult,
    StepRule,
};
pub use simulator::{
    expected_band_powers, simulate_jammed_baseline, simulate_ncf2fd, BaselineResult, SimConfig,
    SimResult,
};
