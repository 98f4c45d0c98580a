//! Bounded scalar minimization (Brent: golden section with parabolic steps).

use crate::error::{HurstError, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` on `[lo, hi]` to absolute tolerance `tol` in `x`.
pub(crate) fn brent_minimize<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for iter in 0..max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = f64::EPSILON.sqrt() * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum {
                x,
                value: fx,
                iterations: iter,
            });
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < mid { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < mid { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if !fu.is_finite() {
            return Err(HurstError::NumericFailure(format!("objective is {fu} at {u}")));
        }

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
    Err(HurstError::NumericFailure(format!(
        "minimizer did not converge within {max_iter} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let m = brent_minimize(|x| (x - 0.37).powi(2) + 2.0, 0.0, 1.0, 1e-8, 200).unwrap();
        assert!((m.x - 0.37).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-12);
        assert!(m.iterations < 30);
    }

    #[test]
    fn boundary_minimum() {
        let m = brent_minimize(|x| x, 0.01, 0.99, 1e-6, 200).unwrap();
        assert!((m.x - 0.01).abs() < 1e-5);
    }

    #[test]
    fn non_smooth_and_budget() {
        let m = brent_minimize(|x| (x - 0.6).abs(), 0.0, 1.0, 1e-6, 200).unwrap();
        assert!((m.x - 0.6).abs() < 1e-5);
        assert!(matches!(
            brent_minimize(|x| (x - 0.6).abs(), 0.0, 1.0, 1e-6, 3),
            Err(HurstError::NumericFailure(_))
        ));
    }
}
