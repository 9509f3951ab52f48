//! Design of Charlie's constellation: the root-seeded coordinate descent
//! and a brute-force grid search used to check it.

mod balance;
mod descent;
mod grid;
mod roots;

use std::fmt;
use std::time::Duration;

use crate::linkmodel::Constellation;

pub use balance::{
    alpha_balance, alpha_search_range, eta2_balance, eta2_search_range, find_alpha_star,
    find_eta2_star, ALPHA_MAX, ALPHA_MIN,
};
pub use descent::{greedy_descent, DescentConfig, StepRule};
pub use grid::{exhaustive_search, grid_size, GridResolution};
pub use roots::{brent_minimize, safeguarded_newton, Root, RootTolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Algorithm,
    Exhaustive,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Algorithm => "algorithm",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub constellation: Constellation,
    pub pe_star_value: f64,
    pub pe_exact_value: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    /// Number of `P_e*` evaluations, including those inside root finding.
    pub evaluations: u64,
    pub wall_time: Duration,
    pub method: Method,
}
