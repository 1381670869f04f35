use crate::error::{Error, Result};

pub(crate) const MAX_ITER: usize = 200;
pub(crate) const ABS_TOL: f64 = 1e-12;

/// Finds a zero of a nondecreasing continuous map on `[lo, hi]` with
/// `g(lo) <= 0 <= g(hi)`.
///
/// `g` returns the residual and, when available, its derivative. Newton steps
/// are taken while they stay strictly inside the bracket; otherwise the
/// bracket is bisected. Without derivatives this degrades to plain bisection.
pub(crate) fn solve_increasing<G>(mut lo: f64, mut hi: f64, mut g: G) -> Result<f64>
where
    G: FnMut(f64) -> (f64, Option<f64>),
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    if lo == hi {
        return Ok(lo);
    }
    let mut u = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let (val, der) = g(u);
        if val == 0.0 {
            return Ok(u);
        }
        residual = val.abs();
        if val < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let scale = lo.abs().max(hi.abs()).max(1.0);
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            return Ok(0.5 * (lo + hi));
        }
        let newton = der
            .filter(|d| d.is_finite() && *d > 0.0 && val.is_finite())
            .map(|d| u - val / d)
            .filter(|c| *c > lo && *c < hi);
        match newton {
            Some(c) => {
                if (c - u).abs() <= 2.0 * f64::EPSILON * scale {
                    return Ok(c);
                }
                u = c;
            }
            None => u = 0.5 * (lo + hi),
        }
    }
    if hi - lo <= ABS_TOL {
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root_with_newton() {
        let u = solve_increasing(0.0, 2.0, |u| (u + u * u * u - 2.0, Some(1.0 + 3.0 * u * u))).unwrap();
        assert!((u - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisection_only() {
        let u = solve_increasing(-3.0, 3.0, |u| (u.powi(3) - 0.125, None)).unwrap();
        assert!((u - 0.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_bracket() {
        assert_eq!(solve_increasing(1.5, 1.5, |u| (u, None)).unwrap(), 1.5);
    }

    #[test]
    fn infinite_at_endpoint() {
        // ln((1+u)/(1-u)) blows up at u = 1
        let u = solve_increasing(0.0, 1.0, |u| (u + ((1.0 + u) / (1.0 - u)).ln() - 30.0, None)).unwrap();
        assert!(u < 1.0 && u > 0.999_999);
    }
}
