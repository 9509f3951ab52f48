use thiserror::Error;

use crate::optimizer::OptimizerResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Incomplete gamma evaluated outside `a > 0, x >= 0`, or with non-finite input.
    #[error("incomplete gamma domain error: a = {a}, x = {x}")]
    GammaDomain { a: f64, x: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("constellation ordering violated: {0}")]
    Ordering(String),

    #[error("power constraint violated: mean energy {mean} != {target}")]
    PowerConstraint { mean: f64, target: f64 },

    /// Relay energy levels collapsed (N_C1 <= N_C0).
    #[error("degenerate relay detector: N_C0 = {n_c0}, N_C1 = {n_c1}")]
    DegenerateRelay { n_c0: f64, n_c1: f64 },

    #[error("singular threshold between variances {lower} and {upper}")]
    SingularThreshold { lower: f64, upper: f64 },

    #[error("probability {name} = {value} outside [0, 1] beyond rounding")]
    Probability { name: &'static str, value: f64 },

    #[error("no sign change for {variable} on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        variable: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder for {variable} did not converge in {iterations} iterations")]
    RootNotConverged {
        variable: &'static str,
        iterations: usize,
    },

    #[error("descent stopped at the {which} iteration cap ({cap}); best P_e* so far {}", best.pe_star_value)]
    IterationCap {
        which: &'static str,
        cap: usize,
        best: Box<OptimizerResult>,
    },

    #[error("outer iteration {outer}, inner iteration {inner} (eta1 = {eta1}): {source}")]
    InLoop {
        outer: usize,
        inner: usize,
        eta1: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("grid has about {points} points, above the cap of {cap}; use coarser steps")]
    GridTooLarge { points: u128, cap: u128 },

    #[error("grid contains no feasible constellation")]
    EmptyGrid,

    #[error("invalid configuration: {0}")]
    Config(String),
}
