//! One-dimensional solvers: bracketed Newton-Raphson with bisection
//! fallback, and Brent's bounded minimizer.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

/// Tolerances for [`safeguarded_newton`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance {
    /// Stop when the bracket is narrower than this.
    pub x_tol: f64,
    /// Stop when `|f(x)|` falls below this.
    pub f_tol: f64,
    pub max_iter: usize,
}

/// Root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` must have
/// opposite signs.
///
/// Newton steps use a central-difference slope with step `1e-6·|x|`; any
/// step that would leave the current bracket, or that fails to halve the
/// residual, is replaced by bisection. The bracket always shrinks, so the
/// iteration terminates.
pub fn safeguarded_newton<F>(
    variable: &'static str,
    mut f: F,
    lo: f64,
    hi: f64,
    tol: RootTolerance,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            f: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            f: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket {
            variable,
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut x = 0.5 * (a + b);
    let mut fx = f(x)?;
    let mut last_fx = f64::INFINITY;
    for iteration in 1..=tol.max_iter {
        if fx.abs() <= tol.f_tol || (b - a) <= tol.x_tol {
            return Ok(Root {
                x,
                f: fx,
                iterations: iteration,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }

        let slope = central_slope(&mut f, x, a, b)?;
        let newton = if slope != 0.0 && slope.is_finite() {
            x - fx / slope
        } else {
            f64::NAN
        };
        let stalled = fx.abs() > 0.5 * last_fx.abs();
        x = if newton > a && newton < b && !stalled {
            newton
        } else {
            0.5 * (a + b)
        };
        last_fx = fx;
        fx = f(x)?;
    }
    Err(Error::RootNotConverged {
        variable,
        iterations: tol.max_iter,
    })
}

fn central_slope<F>(f: &mut F, x: f64, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = 1e-6 * x.abs().max(1e-300);
    let left = (x - h).max(a);
    let right = (x + h).min(b);
    if right <= left {
        return Ok(0.0);
    }
    Ok((f(right)? - f(left)?) / (right - left))
}

/// Brent's method for the minimum of `f` on `[lo, hi]`, started from `start`.
///
/// Returns `(x, f(x))`. Assumes `f` is unimodal near `start`; callers bracket
/// the basin first.
pub fn brent_minimize<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    start: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = start.clamp(a, b);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = 1e-10 * x.abs() + 0.25 * x_tol;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // Parabola through x, w, v.
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u)?;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}
