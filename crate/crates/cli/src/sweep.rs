//! Evaluation of every `(snr, n_r, method)` point of a [`SweepSpec`].

use std::cmp::Ordering;
use std::time::Instant;

use ncf2fd_core::{
    complete_constellation, error_breakdown, exhaustive_search, greedy_descent,
    simulate_jammed_baseline, simulate_ncf2fd, Constellation, Error, Method, OptimizerResult,
    SimConfig, SystemParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, SweepSpec};

/// One output line. `None` is written as `NA` (CSV) or `null` (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub n_r: u32,
    pub alpha: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub pe_star: Option<f64>,
    pub pe_exact: Option<f64>,
    pub ser_mc: Option<f64>,
    pub alice_ber: Option<f64>,
    pub charlie_ber: Option<f64>,
    pub fab_power: Option<f64>,
    pub wall_time_s: Option<f64>,
    /// `algorithm`, `exhaustive`, `fixed` or `baseline`, with `:error`
    /// appended when the point failed.
    pub method: String,
    pub seed: Option<u64>,
}

impl ResultRow {
    fn empty(snr_db: f64, n_r: u32, method: &str) -> Self {
        ResultRow {
            snr_db,
            n_r,
            alpha: None,
            eta1: None,
            eta2: None,
            eps1: None,
            eps2: None,
            pe_star: None,
            pe_exact: None,
            ser_mc: None,
            alice_ber: None,
            charlie_ber: None,
            fab_power: None,
            wall_time_s: None,
            method: method.to_string(),
            seed: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.method.ends_with(":error")
    }

    fn set_constellation(&mut self, c: &Constellation) {
        self.alpha = finite(c.alpha());
        self.eta1 = finite(c.eta1());
        self.eta2 = finite(c.eta2());
        self.eps1 = finite(c.eps1());
        self.eps2 = finite(c.eps2());
    }

    fn sort_key(&self, other: &Self) -> Ordering {
        self.snr_db
            .total_cmp(&other.snr_db)
            .then(self.n_r.cmp(&other.n_r))
            .then_with(|| self.method.cmp(&other.method))
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    /// One message per failed or capped point, in row order.
    pub warnings: Vec<String>,
}

/// Simulation stream for a point, so that each row draws from its own
/// sequence whatever order the points run in.
fn stream(point: usize, slot: u64) -> u64 {
    point as u64 * 4 + slot
}

const SLOT_ALGORITHM: u64 = 0;
const SLOT_EXHAUSTIVE: u64 = 1;
const SLOT_FIXED: u64 = 2;
const SLOT_BASELINE: u64 = 3;

struct Point<'a> {
    spec: &'a SweepSpec,
    params: SystemParams,
    index: usize,
}

impl Point<'_> {
    fn sim(&self, slot: u64) -> SimConfig {
        SimConfig {
            stream: stream(self.index, slot),
            ..self.spec.sim
        }
    }

    fn optimize(&self, method: Method) -> Result<(OptimizerResult, Option<String>), Error> {
        let r = match method {
            Method::Algorithm => greedy_descent(&self.params, &self.spec.descent),
            Method::Exhaustive => exhaustive_search(&self.params, &self.spec.grid),
        };
        match r {
            Ok(r) => Ok((r, None)),
            // The best point so far is still worth reporting.
            Err(e @ Error::IterationCap { .. }) => {
                let msg = e.to_string();
                let Error::IterationCap { best, .. } = e else {
                    unreachable!()
                };
                Ok((*best, Some(msg)))
            }
            Err(e) => Err(e),
        }
    }

    fn with_closed_form(&self, row: &mut ResultRow, c: &Constellation) -> Result<(), Error> {
        let b = error_breakdown(&self.params, c)?;
        row.set_constellation(c);
        row.pe_star = finite(b.pe_star);
        row.pe_exact = finite(b.pe);
        Ok(())
    }

    fn with_simulation(
        &self,
        row: &mut ResultRow,
        c: &Constellation,
        slot: u64,
    ) -> Result<(), Error> {
        let sim = self.sim(slot);
        let r = simulate_ncf2fd(&self.params, c, &sim)?;
        row.ser_mc = finite(r.joint_ser);
        row.alice_ber = finite(r.alice_ber);
        row.charlie_ber = finite(r.charlie_ber);
        row.fab_power = finite(r.fab_mean_power);
        row.seed = Some(sim.seed);
        Ok(())
    }

    fn simulate(&self) -> bool {
        matches!(self.spec.mode, Mode::Simulate | Mode::Sweep)
    }

    fn fixed_row(&self, (alpha, eta1, eta2): (f64, f64, f64)) -> (ResultRow, Option<String>) {
        let mut row = ResultRow::empty(self.params.snr_db, self.params.n_r, "fixed");
        let start = Instant::now();
        let res = complete_constellation(alpha, eta1, eta2).and_then(|c| {
            self.with_closed_form(&mut row, &c)?;
            if self.simulate() {
                self.with_simulation(&mut row, &c, SLOT_FIXED)?;
            }
            Ok(())
        });
        self.finish(row, start, res.err().map(|e| e.to_string()))
    }

    fn optimized_row(&self, method: Method) -> (ResultRow, Option<String>) {
        let slot = match method {
            Method::Algorithm => SLOT_ALGORITHM,
            Method::Exhaustive => SLOT_EXHAUSTIVE,
        };
        let mut row = ResultRow::empty(self.params.snr_db, self.params.n_r, method.tag());
        let start = Instant::now();
        let problem = match self.optimize(method) {
            Ok((r, capped)) => {
                let c = r.constellation;
                row.set_constellation(&c);
                row.pe_star = finite(r.pe_star_value);
                row.pe_exact = finite(r.pe_exact_value);
                let sim_err = if self.simulate() {
                    self.with_simulation(&mut row, &c, slot)
                        .err()
                        .map(|e| e.to_string())
                } else {
                    None
                };
                capped.or(sim_err)
            }
            Err(e) => Some(e.to_string()),
        };
        self.finish(row, start, problem)
    }

    fn baseline_row(&self) -> (ResultRow, Option<String>) {
        let mut row = ResultRow::empty(self.params.snr_db, self.params.n_r, "baseline");
        let start = Instant::now();
        let sim = self.sim(SLOT_BASELINE);
        let res = simulate_jammed_baseline(&self.params, &sim).map(|b| {
            row.alice_ber = finite(b.alice_ber);
            row.seed = Some(sim.seed);
        });
        self.finish(row, start, res.err().map(|e| e.to_string()))
    }

    fn finish(
        &self,
        mut row: ResultRow,
        start: Instant,
        problem: Option<String>,
    ) -> (ResultRow, Option<String>) {
        if self.spec.record_timing {
            row.wall_time_s = Some(start.elapsed().as_secs_f64());
        }
        let warning = problem.map(|p| {
            row.method.push_str(":error");
            format!("{} dB, N_r {}, {}: {p}", row.snr_db, row.n_r, row.method)
        });
        (row, warning)
    }

    fn rows(&self) -> Vec<(ResultRow, Option<String>)> {
        let mut out = Vec::new();
        match (self.spec.mode, self.spec.fixed) {
            (Mode::Analyze, fixed) => {
                out.push(self.fixed_row(fixed.unwrap_or(crate::config::DEFAULT_FIXED)))
            }
            (Mode::Simulate, Some(fixed)) => out.push(self.fixed_row(fixed)),
            _ => {
                for &m in &self.spec.methods {
                    out.push(self.optimized_row(m));
                }
            }
        }
        if self.spec.baseline && self.simulate() {
            out.push(self.baseline_row());
        }
        out
    }
}

/// Evaluates every point on the rayon pool. Rows come back sorted by
/// `(snr, n_r, method)` so the result does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> SweepOutput {
    let points: Vec<(f64, u32)> = spec
        .snr_db
        .iter()
        .flat_map(|&s| spec.n_r.iter().map(move |&n| (s, n)))
        .collect();
    let mut pairs: Vec<(ResultRow, Option<String>)> = points
        .par_iter()
        .enumerate()
        .flat_map_iter(|(index, &(snr, n_r))| {
            Point {
                spec,
                params: spec.params(snr, n_r),
                index,
            }
            .rows()
        })
        .collect();
    pairs.sort_by(|a, b| a.0.sort_key(&b.0));
    let (rows, warnings): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    SweepOutput {
        rows,
        warnings: warnings.into_iter().flatten().collect(),
    }
}
