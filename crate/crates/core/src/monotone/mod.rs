//! Maximal monotone graphs, their resolvents and Yosida regularizations.
//!
//! Local graphs act pointwise on grid values; the nonlocal `Sign` operator
//! acts on a whole field through its `H`-norm. All objects are immutable and
//! every operation is a pure function.

mod root;
mod scalar;

pub use scalar::{Interval, ScalarGraph};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::ConvexPart;
use scalar::check_eps;

pub(crate) use root::solve_increasing;

/// Spatial weight of the power graph: uniform or one value per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Uniform(f64),
    Grid(Vec<f64>),
}

impl Weight {
    pub fn at(&self, node: usize) -> f64 {
        match self {
            Weight::Uniform(w) => *w,
            Weight::Grid(w) => w[node],
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Weight::Uniform(w) => *w,
            Weight::Grid(w) => w.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// The perturbing operator `A` of the phase-field system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MonotoneGraph {
    /// Pointwise `sign`.
    ScalarSign,
    /// `Sign(v) = v/‖v‖`, the closed unit ball at `v = 0`.
    NonlocalSign,
    Stefan { alpha1: f64, alpha2: f64 },
    WeightedPower { q: f64, weight: Weight },
    SubdiffBetaHat(ConvexPart),
    Zero,
}

impl MonotoneGraph {
    pub fn name(&self) -> String {
        match self {
            MonotoneGraph::NonlocalSign => "Sign".into(),
            MonotoneGraph::WeightedPower { q, weight: Weight::Grid(_) } => format!("power(q={q},w=grid)"),
            other => other.at_node(0).map(|g| g.name()).unwrap_or_default(),
        }
    }

    pub fn is_nonlocal(&self) -> bool {
        matches!(self, MonotoneGraph::NonlocalSign)
    }

    /// Validates parameters; `grid_len` is the number of quadrature nodes a
    /// spatially varying weight must match.
    pub fn validate(&self, grid_len: Option<usize>) -> Result<()> {
        if let MonotoneGraph::WeightedPower { weight: Weight::Grid(w), .. } = self {
            if let Some(n) = grid_len {
                if w.len() != n {
                    return Err(Error::SizeMismatch { expected: n, got: w.len() });
                }
            }
            if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::invalid("power graph weight must be nonnegative and finite"));
            }
        }
        match self {
            MonotoneGraph::NonlocalSign => Ok(()),
            MonotoneGraph::WeightedPower { q, weight } => {
                ScalarGraph::Power { q: *q, weight: weight.max() }.validate()
            }
            other => other.at_node(0).expect("local graph").validate(),
        }
    }

    /// The scalar graph acting at grid node `node`; `None` for nonlocal graphs.
    pub fn at_node(&self, node: usize) -> Option<ScalarGraph> {
        Some(match self {
            MonotoneGraph::ScalarSign => ScalarGraph::Sign,
            MonotoneGraph::NonlocalSign => return None,
            MonotoneGraph::Stefan { alpha1, alpha2 } => ScalarGraph::Stefan {
                low_slope: *alpha1,
                high_slope: *alpha2,
            },
            MonotoneGraph::WeightedPower { q, weight } => ScalarGraph::Power { q: *q, weight: weight.at(node) },
            MonotoneGraph::SubdiffBetaHat(c) => ScalarGraph::Subdiff(*c),
            MonotoneGraph::Zero => ScalarGraph::Zero,
        })
    }

    /// The scalar graph of a spatially uniform local variant.
    pub fn as_scalar(&self) -> Option<ScalarGraph> {
        match self {
            MonotoneGraph::WeightedPower { weight: Weight::Grid(_), .. } => None,
            other => other.at_node(0),
        }
    }

    fn scalar_or_err(&self) -> Result<ScalarGraph> {
        self.as_scalar()
            .ok_or_else(|| Error::invalid(format!("{} has no scalar form; use the field operations", self.name())))
    }

    pub fn resolvent(&self, eps: f64, x: f64) -> Result<f64> {
        self.scalar_or_err()?.resolvent(eps, x)
    }

    pub fn yosida(&self, eps: f64, x: f64) -> Result<f64> {
        self.scalar_or_err()?.yosida(eps, x)
    }

    pub fn minimal_section(&self, x: f64) -> Result<f64> {
        self.scalar_or_err()?.minimal_section(x)
    }

    /// Resolvent applied to a field. Local graphs act pointwise on grid values;
    /// the nonlocal `Sign` acts on `H`-orthonormal coefficients.
    pub fn resolvent_field(&self, eps: f64, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            MonotoneGraph::NonlocalSign => nonlocal_sign_resolvent(eps, v),
            _ => v
                .iter()
                .enumerate()
                .map(|(j, &x)| self.at_node(j).expect("local graph").resolvent(eps, x))
                .collect(),
        }
    }

    pub fn yosida_field(&self, eps: f64, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            MonotoneGraph::NonlocalSign => {
                check_eps(eps)?;
                Ok(yosida_nonlocal_sign(eps, v))
            }
            _ => v
                .iter()
                .enumerate()
                .map(|(j, &x)| self.at_node(j).expect("local graph").yosida(eps, x))
                .collect(),
        }
    }

    /// Minimal section of a field.
    pub fn minimal_section_field(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            MonotoneGraph::NonlocalSign => {
                let n = euclid(v);
                Ok(if n == 0.0 { vec![0.0; v.len()] } else { v.iter().map(|x| x / n).collect() })
            }
            _ => v
                .iter()
                .enumerate()
                .map(|(j, &x)| self.at_node(j).expect("local graph").minimal_section(x))
                .collect(),
        }
    }

    /// Growth constant of the scalar graph (pointwise bound).
    pub fn growth_constant(&self) -> Option<f64> {
        match self {
            MonotoneGraph::NonlocalSign => Some(1.0),
            MonotoneGraph::WeightedPower { weight, .. } => Some(weight.max()),
            other => other.at_node(0).and_then(|g| g.growth_constant()),
        }
    }

    /// Constant `C` in `‖v‖_H ≤ C(1 + ‖x‖_H)` for the operator induced on
    /// `H = L²(Ω)` with `|Ω| = measure`.
    pub fn h_growth_constant(&self, measure: f64) -> Option<f64> {
        let c = self.growth_constant()?;
        if self.is_nonlocal() {
            Some(c)
        } else {
            Some(c * measure.sqrt().max(1.0))
        }
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Resolvent of the nonlocal `Sign`: `J_ε v = v·max(0, ‖v‖-ε)/‖v‖`.
pub fn nonlocal_sign_resolvent(eps: f64, v: &[f64]) -> Result<Vec<f64>> {
    check_eps(eps)?;
    let n = euclid(v);
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    if n <= eps {
        return Ok(vec![0.0; v.len()]);
    }
    let shrink = (n - eps) / n;
    Ok(v.iter().map(|x| x * shrink).collect())
}

/// Yosida map of the nonlocal `Sign`: `v/‖v‖` if `‖v‖ > ε`, else `v/ε`.
///
/// The norm is the Euclidean norm of the coefficient vector, which equals the
/// `H`-norm for an `H`-orthonormal basis.
pub fn yosida_nonlocal_sign(eps: f64, v: &[f64]) -> Vec<f64> {
    yosida_nonlocal_sign_with_norm(eps, v, euclid(v))
}

/// Same as [`yosida_nonlocal_sign`] with a precomputed `H`-norm.
pub fn yosida_nonlocal_sign_with_norm(eps: f64, v: &[f64], norm: f64) -> Vec<f64> {
    let scale = 1.0 / norm.max(eps);
    v.iter().map(|x| x * scale).collect()
}

/// The Yosida regularization `A_ε` viewed as a maximal monotone graph in its
/// own right, so it can be regularized again.
#[derive(Debug, Clone, PartialEq)]
pub struct YosidaGraph {
    pub base: MonotoneGraph,
    pub epsilon: f64,
}

impl YosidaGraph {
    pub fn new(base: MonotoneGraph, epsilon: f64) -> Result<Self> {
        check_eps(epsilon)?;
        Ok(Self { base, epsilon })
    }

    /// `A_ε x` for scalar bases.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.base.yosida(self.epsilon, x)
    }

    pub fn value_field(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.base.yosida_field(self.epsilon, v)
    }

    /// `(I + δA_ε)⁻¹ x`, found by bisection on the Lipschitz map `u + δA_ε(u)`.
    pub fn resolvent(&self, delta: f64, x: f64) -> Result<f64> {
        check_eps(delta)?;
        let a = self.value(x)?;
        let other = x - delta * a;
        let mut err = None;
        let u = solve_increasing(other, x, |u| match self.value(u) {
            Ok(v) => (u + delta * v - x, None),
            Err(e) => {
                err = Some(e);
                (0.0, None)
            }
        });
        // the closure cannot propagate errors itself
        if let Some(e) = err {
            return Err(e);
        }
        u
    }

    pub fn yosida(&self, delta: f64, x: f64) -> Result<f64> {
        Ok((x - self.resolvent(delta, x)?) / delta)
    }

    /// Field version; for the nonlocal `Sign` the problem is radial and reduces
    /// to a scalar equation for the norm.
    pub fn resolvent_field(&self, delta: f64, v: &[f64]) -> Result<Vec<f64>> {
        check_eps(delta)?;
        match self.base {
            MonotoneGraph::NonlocalSign => {
                let r = euclid(v);
                if r == 0.0 {
                    return Ok(vec![0.0; v.len()]);
                }
                let eps = self.epsilon;
                // s + δ·s/max(ε, s) = r
                let s = solve_increasing(0.0, r, |s| (s + delta * s / s.max(eps) - r, None))?;
                Ok(v.iter().map(|x| x * s / r).collect())
            }
            _ => v
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let g = YosidaGraph {
                        base: scalar_to_graph(self.base.at_node(j).expect("local graph")),
                        epsilon: self.epsilon,
                    };
                    g.resolvent(delta, x)
                })
                .collect(),
        }
    }

    pub fn yosida_field(&self, delta: f64, v: &[f64]) -> Result<Vec<f64>> {
        let u = self.resolvent_field(delta, v)?;
        Ok(v.iter().zip(&u).map(|(x, u)| (x - u) / delta).collect())
    }
}

fn scalar_to_graph(g: ScalarGraph) -> MonotoneGraph {
    match g {
        ScalarGraph::Sign => MonotoneGraph::ScalarSign,
        ScalarGraph::Stefan { low_slope, high_slope } => MonotoneGraph::Stefan {
            alpha1: low_slope,
            alpha2: high_slope,
        },
        ScalarGraph::Power { q, weight } => MonotoneGraph::WeightedPower {
            q,
            weight: Weight::Uniform(weight),
        },
        ScalarGraph::Subdiff(c) => MonotoneGraph::SubdiffBetaHat(c),
        ScalarGraph::Zero => MonotoneGraph::Zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nonlocal_sign_examples() {
        let v = [1.2, -1.6];
        // ‖v‖ = 2
        let a = yosida_nonlocal_sign(1.0, &v);
        assert_abs_diff_eq!(a[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], -0.8, epsilon = 1e-15);
        assert_eq!(yosida_nonlocal_sign(0.3, &[0.0, 0.0]), vec![0.0, 0.0]);
        let w = [0.3, 0.4];
        assert_eq!(yosida_nonlocal_sign(1.0, &w), w.to_vec());
    }

    #[test]
    fn nonlocal_matches_generic_definition() {
        let v = [0.5, -2.0, 1.0, 0.25];
        for eps in [0.1, 1.0, 3.0] {
            let j = nonlocal_sign_resolvent(eps, &v).unwrap();
            let direct: Vec<f64> = v.iter().zip(&j).map(|(x, u)| (x - u) / eps).collect();
            let closed = MonotoneGraph::NonlocalSign.yosida_field(eps, &v).unwrap();
            for (a, b) in direct.iter().zip(&closed) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn weighted_power_uses_node_weight() {
        let g = MonotoneGraph::WeightedPower {
            q: 0.5,
            weight: Weight::Grid(vec![0.0, 1.0, 4.0]),
        };
        let m = g.minimal_section_field(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(m, vec![0.0, 2.0, 8.0]);
        assert!(g.as_scalar().is_none());
        assert!(g.validate(Some(4)).is_err());
        assert!(g.validate(Some(3)).is_ok());
    }

    #[test]
    fn semigroup_identity_scalar() {
        let base = MonotoneGraph::Stefan { alpha1: 1.0, alpha2: 3.0 };
        let yg = YosidaGraph::new(base.clone(), 0.2).unwrap();
        for x in [-2.0, 0.3, 1.0, 1.4, 5.0] {
            assert_abs_diff_eq!(yg.yosida(0.3, x).unwrap(), base.yosida(0.5, x).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn semigroup_identity_nonlocal() {
        let yg = YosidaGraph::new(MonotoneGraph::NonlocalSign, 0.4).unwrap();
        for v in [[0.1, 0.2], [1.0, -3.0], [0.3, 0.35]] {
            let lhs = yg.yosida_field(0.25, &v).unwrap();
            let rhs = yosida_nonlocal_sign(0.65, &v);
            for (a, b) in lhs.iter().zip(&rhs) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn h_growth_scales_with_domain() {
        assert_eq!(MonotoneGraph::ScalarSign.h_growth_constant(4.0), Some(2.0));
        assert_eq!(MonotoneGraph::NonlocalSign.h_growth_constant(4.0), Some(1.0));
        assert_eq!(MonotoneGraph::SubdiffBetaHat(ConvexPart::Quartic).h_growth_constant(1.0), None);
    }
}
