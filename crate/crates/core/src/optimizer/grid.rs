use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;

use super::{Method, OptimizerResult};
use crate::error::{Error, Result};
use crate::linkmodel::{complete_constellation, error_breakdown, Constellation, SystemParams};

/// Step sizes of the exhaustive grid.
///
/// `alpha` runs over `k·alpha` for `k >= 1` below 1, `eta1` over `j·eta1`
/// from 0 below 1, and `eta2` over `eta1 + m·eta2` for `m >= 1` below the
/// feasibility bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResolution {
    pub alpha: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub max_points: u128,
}

impl Default for GridResolution {
    fn default() -> Self {
        Self {
            alpha: 0.02,
            eta1: 0.02,
            eta2: 0.02,
            max_points: 10_000_000,
        }
    }
}

impl GridResolution {
    fn validate(&self) -> Result<()> {
        let ok = |s: f64| s > 0.0 && s < 1.0;
        if ok(self.alpha) && ok(self.eta1) && self.eta2 > 0.0 && self.eta2.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "grid steps must lie in (0, 1) (got alpha {}, eta1 {}, eta2 {})",
                self.alpha, self.eta1, self.eta2
            )))
        }
    }

    fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        (1..)
            .map(move |k| k as f64 * self.alpha)
            .take_while(|&a| a < 1.0)
    }

    fn eta1s(&self) -> impl Iterator<Item = f64> + '_ {
        (0..)
            .map(move |j| j as f64 * self.eta1)
            .take_while(|&e| e < 1.0)
    }

    /// Number of `m >= 1` with `eta1 + m·eta2` below the upper bound.
    fn eta2_count(&self, alpha: f64, eta1: f64) -> u64 {
        let ub = Constellation::eta2_upper_bound(alpha, eta1);
        let below = |m: u64| eta1 + m as f64 * self.eta2 < ub;
        let mut m = (((ub - eta1) / self.eta2).ceil() as u64).saturating_sub(1);
        while below(m + 1) {
            m += 1;
        }
        while m > 0 && !below(m) {
            m -= 1;
        }
        m
    }
}

/// Number of grid points, or [`Error::GridTooLarge`] as soon as the count
/// passes `max_points`.
pub fn grid_size(res: &GridResolution) -> Result<u128> {
    res.validate()?;
    let mut total: u128 = 0;
    for alpha in res.alphas() {
        for eta1 in res.eta1s() {
            total += u128::from(res.eta2_count(alpha, eta1));
            if total > res.max_points {
                return Err(Error::GridTooLarge {
                    points: estimate(res),
                    cap: res.max_points,
                });
            }
        }
    }
    Ok(total)
}

/// Approximate grid size, with the eta2 span averaged over eta1.
fn estimate(res: &GridResolution) -> u128 {
    let n_eta1 = res.eta1s().count() as f64;
    let mean_eta1 = 0.5 * (n_eta1 - 1.0) * res.eta1;
    let span: f64 = res
        .alphas()
        .map(|a| Constellation::eta2_upper_bound(a, mean_eta1) - mean_eta1)
        .sum();
    (n_eta1 * span / res.eta2) as u128
}

#[derive(Debug, Clone, Copy)]
struct Best {
    pe: f64,
    key: (u64, u64, u64),
    alpha: f64,
    eta1: f64,
    eta2: f64,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match a.pe.total_cmp(&b.pe).then(a.key.cmp(&b.key)) {
            Ordering::Greater => Some(b),
            _ => Some(a),
        },
    }
}

/// Minimizes `P_e*` over every point of the grid. Ties go to the point with
/// the smallest `(alpha, eta1, eta2)` index, so the result does not depend
/// on the thread count.
pub fn exhaustive_search(params: &SystemParams, res: &GridResolution) -> Result<OptimizerResult> {
    params.validate()?;
    grid_size(res)?;
    let started = Instant::now();
    let alphas: Vec<f64> = res.alphas().collect();
    let best = alphas
        .par_iter()
        .enumerate()
        .map(|(ia, &alpha)| -> Result<(Option<Best>, u64)> {
            let mut best = None;
            let mut evaluated = 0;
            for (ie, eta1) in res.eta1s().enumerate() {
                for m in 1..=res.eta2_count(alpha, eta1) {
                    let eta2 = eta1 + m as f64 * res.eta2;
                    let c = match complete_constellation(alpha, eta1, eta2) {
                        Ok(c) => c,
                        // Rounding at the eta2 bound can still break the ordering.
                        Err(Error::Ordering(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let pe = error_breakdown(params, &c)?.pe_star;
                    evaluated += 1;
                    best = better(
                        best,
                        Some(Best {
                            pe,
                            key: (ia as u64, ie as u64, m),
                            alpha,
                            eta1,
                            eta2,
                        }),
                    );
                }
            }
            Ok((best, evaluated))
        })
        .try_reduce(|| (None, 0), |a, b| Ok((better(a.0, b.0), a.1 + b.1)))?;
    let (best, evaluated) = (best.0.ok_or(Error::EmptyGrid)?, best.1);

    let constellation = complete_constellation(best.alpha, best.eta1, best.eta2)?;
    let b = error_breakdown(params, &constellation)?;
    Ok(OptimizerResult {
        constellation,
        pe_star_value: b.pe_star,
        pe_exact_value: b.pe,
        outer_iterations: 0,
        inner_iterations: 0,
        evaluations: evaluated,
        wall_time: started.elapsed(),
        method: Method::Exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> GridResolution {
        GridResolution {
            alpha: 0.5,
            eta1: 0.9,
            eta2: 0.9,
            max_points: 100,
        }
    }

    #[test]
    fn three_point_grid() {
        // alpha = 0.5; eta1 = 0 gives eta2 in {0.9, 1.8}, eta1 = 0.9 gives {1.8}.
        assert_eq!(grid_size(&coarse()).unwrap(), 3);
        let p = SystemParams::new(30.0, 2);
        let r = exhaustive_search(&p, &coarse()).unwrap();
        assert_eq!(r.evaluations, 3);
        let c = r.constellation;
        let manual = [(0.0, 0.9), (0.0, 1.8), (0.9, 1.8)]
            .iter()
            .map(|&(e1, e2)| {
                crate::linkmodel::pe_star(&p, &complete_constellation(0.5, e1, e2).unwrap())
                    .unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.pe_star_value, manual);
        assert_eq!(c.alpha(), 0.5);
    }

    #[test]
    fn oversized_grid_is_refused() {
        let res = GridResolution {
            alpha: 1e-4,
            eta1: 1e-4,
            eta2: 1e-4,
            max_points: 10_000_000,
        };
        let err = grid_size(&res).unwrap_err();
        match err {
            Error::GridTooLarge { points, cap } => {
                assert!(points > cap);
                assert_eq!(cap, 10_000_000);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn grid_size_matches_enumeration() {
        let res = GridResolution {
            alpha: 0.1,
            eta1: 0.1,
            eta2: 0.1,
            max_points: 1_000_000,
        };
        let mut n = 0u128;
        for a in res.alphas() {
            for e in res.eta1s() {
                let ub = Constellation::eta2_upper_bound(a, e);
                n += (1..).take_while(|&m| e + m as f64 * 0.1 < ub).count() as u128;
            }
        }
        assert_eq!(grid_size(&res).unwrap(), n);
    }

    #[test]
    fn result_independent_of_thread_count() {
        let p = SystemParams::new(25.0, 2);
        let res = GridResolution {
            alpha: 0.1,
            eta1: 0.2,
            eta2: 0.1,
            max_points: 100_000,
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = one.install(|| exhaustive_search(&p, &res)).unwrap();
        let b = exhaustive_search(&p, &res).unwrap();
        assert_eq!(a.constellation, b.constellation);
        assert_eq!(a.pe_star_value, b.pe_star_value);
    }
}
