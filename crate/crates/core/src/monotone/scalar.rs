use serde::{Deserialize, Serialize};

use super::root::solve_increasing;
use crate::error::{Error, Result};
use crate::potentials::ConvexPart;

/// A maximal monotone graph on the real line.
///
/// Multivalued points are represented through [`ScalarGraph::values`], which
/// returns the closed interval `A(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalarGraph {
    /// `sign(r)`, with `sign(0) = [-1, 1]`.
    Sign,
    /// Stefan enthalpy graph: slope `low_slope` on `r < 0`, zero on
    /// `[0, 1)`, slope `high_slope` on `r > 1` and the vertical segment
    /// `[0, high_slope]` at `r = 1`.
    Stefan { low_slope: f64, high_slope: f64 },
    /// `weight·|r|^(q-1)·r` with `0 < q < 1`.
    Power { q: f64, weight: f64 },
    /// Subdifferential of a convex potential part.
    Subdiff(ConvexPart),
    Zero,
}

/// Effective domain `D(A)` as an interval with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl ScalarGraph {
    pub fn name(&self) -> String {
        match self {
            ScalarGraph::Sign => "sign".into(),
            ScalarGraph::Stefan { low_slope, high_slope } => format!("stefan({low_slope},{high_slope})"),
            ScalarGraph::Power { q, weight } => format!("power(q={q},w={weight})"),
            ScalarGraph::Subdiff(c) => format!("subdiff({})", c.name()),
            ScalarGraph::Zero => "zero".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarGraph::Stefan { low_slope, high_slope } if !(low_slope > 0.0 && high_slope > 0.0) => {
                Err(Error::invalid("stefan graph needs positive slopes"))
            }
            ScalarGraph::Power { q, weight } if !(q > 0.0 && q < 1.0) || !(weight >= 0.0) => {
                Err(Error::invalid(format!("power graph needs 0 < q < 1 and weight >= 0, got q={q}, weight={weight}")))
            }
            _ => Ok(()),
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            ScalarGraph::Subdiff(ConvexPart::Logarithmic) => Interval {
                lo: -1.0,
                hi: 1.0,
                lo_closed: false,
                hi_closed: false,
            },
            ScalarGraph::Subdiff(ConvexPart::Indicator) => Interval {
                lo: -1.0,
                hi: 1.0,
                lo_closed: true,
                hi_closed: true,
            },
            _ => Interval::REAL_LINE,
        }
    }

    /// The value set `A(x)` as a closed interval, `None` when `x ∉ D(A)`.
    pub fn values(&self, x: f64) -> Option<(f64, f64)> {
        if !x.is_finite() {
            return None;
        }
        let single = |v: f64| Some((v, v));
        match *self {
            ScalarGraph::Sign => {
                if x > 0.0 {
                    single(1.0)
                } else if x < 0.0 {
                    single(-1.0)
                } else {
                    Some((-1.0, 1.0))
                }
            }
            ScalarGraph::Stefan { low_slope, high_slope } => {
                if x < 0.0 {
                    single(low_slope * x)
                } else if x < 1.0 {
                    single(0.0)
                } else if x == 1.0 {
                    Some((0.0, high_slope))
                } else {
                    single(high_slope * x)
                }
            }
            ScalarGraph::Power { q, weight } => single(power_value(q, weight, x)),
            ScalarGraph::Subdiff(ConvexPart::Quartic) => single(x * x * x),
            ScalarGraph::Subdiff(ConvexPart::Logarithmic) => {
                if x.abs() < 1.0 {
                    single(log_beta(x))
                } else {
                    None
                }
            }
            ScalarGraph::Subdiff(ConvexPart::Indicator) => {
                if x.abs() < 1.0 {
                    single(0.0)
                } else if x == 1.0 {
                    Some((0.0, f64::INFINITY))
                } else if x == -1.0 {
                    Some((f64::NEG_INFINITY, 0.0))
                } else {
                    None
                }
            }
            ScalarGraph::Subdiff(ConvexPart::Flat) | ScalarGraph::Zero => single(0.0),
        }
    }

    /// Whether `(x, v)` belongs to the graph, up to `tol`.
    pub fn contains(&self, x: f64, v: f64, tol: f64) -> bool {
        match self.values(x) {
            Some((lo, hi)) => v >= lo - tol && v <= hi + tol,
            None => false,
        }
    }

    /// Minimal section `A⁰x`: the element of `A(x)` closest to zero.
    pub fn minimal_section(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let (lo, hi) = self.values(x).ok_or_else(|| Error::OutsideDomain { graph: self.name(), x })?;
        Ok(0f64.clamp(lo, hi))
    }

    /// Resolvent `J_ε x = (I + εA)⁻¹ x`.
    pub fn resolvent(&self, eps: f64, x: f64) -> Result<f64> {
        check_eps(eps)?;
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let u = match *self {
            ScalarGraph::Sign => {
                if x.abs() <= eps {
                    0.0
                } else {
                    x - eps * x.signum()
                }
            }
            ScalarGraph::Stefan { low_slope, high_slope } => {
                if x < 0.0 {
                    x / (1.0 + eps * low_slope)
                } else if x < 1.0 {
                    x
                } else if x <= 1.0 + eps * high_slope {
                    1.0
                } else {
                    x / (1.0 + eps * high_slope)
                }
            }
            ScalarGraph::Power { q, weight } => power_resolvent(q, weight, eps, x)?,
            ScalarGraph::Subdiff(ConvexPart::Quartic) => {
                solve_increasing(0.0, x, |u| (u + eps * u * u * u - x, Some(1.0 + 3.0 * eps * u * u)))?
            }
            ScalarGraph::Subdiff(ConvexPart::Logarithmic) => {
                let edge = x.signum() * x.abs().min(1.0);
                let u = solve_increasing(0.0, edge, |u| {
                    (u + eps * log_beta(u) - x, Some(1.0 + 2.0 * eps / ((1.0 - u) * (1.0 + u))))
                })?;
                // stay strictly inside (-1, 1)
                u.clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON / 2.0)
            }
            ScalarGraph::Subdiff(ConvexPart::Indicator) => x.clamp(-1.0, 1.0),
            ScalarGraph::Subdiff(ConvexPart::Flat) | ScalarGraph::Zero => x,
        };
        Ok(u)
    }

    /// Yosida regularization `A_ε x = (x - J_ε x)/ε`.
    pub fn yosida(&self, eps: f64, x: f64) -> Result<f64> {
        let u = self.resolvent(eps, x)?;
        Ok((x - u) / eps)
    }

    /// Constant `C` in `|v| ≤ C(1 + |x|)` for all `v ∈ A(x)`, when one exists.
    pub fn growth_constant(&self) -> Option<f64> {
        match *self {
            ScalarGraph::Sign => Some(1.0),
            ScalarGraph::Stefan { low_slope, high_slope } => Some(low_slope.max(high_slope)),
            ScalarGraph::Power { weight, .. } => Some(weight),
            ScalarGraph::Zero | ScalarGraph::Subdiff(ConvexPart::Flat) => Some(0.0),
            ScalarGraph::Subdiff(_) => None,
        }
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("regularization parameter must be positive, got {eps}")))
    }
}

pub(crate) fn log_beta(u: f64) -> f64 {
    ((1.0 + u) / (1.0 - u)).ln()
}

fn power_value(q: f64, weight: f64, x: f64) -> f64 {
    if x == 0.0 || weight == 0.0 {
        0.0
    } else {
        weight * x.abs().powf(q) * x.signum()
    }
}

fn power_resolvent(q: f64, weight: f64, eps: f64, x: f64) -> Result<f64> {
    if weight == 0.0 || x == 0.0 {
        return Ok(x);
    }
    let a = x.abs();
    let c = eps * weight;
    let s = if q == 0.5 {
        // r² + c·r - a = 0 with r = √s; rationalized to avoid cancellation
        let r = 2.0 * a / (c + (c * c + 4.0 * a).sqrt());
        r * r
    } else {
        solve_increasing(0.0, a, |s| {
            let der = if s > 0.0 { Some(1.0 + c * q * s.powf(q - 1.0)) } else { None };
            (s + c * s.powf(q) - a, der)
        })?
    };
    Ok(s * x.signum())
}
