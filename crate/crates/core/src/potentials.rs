//! Double-well potentials `F = β̂ + π̂`.
//!
//! Each potential is split into a proper, convex, lower semicontinuous part
//! `β̂` with `β̂(0) = 0` and a smooth part whose derivative `π` is Lipschitz.
//! The convex part enters the dynamics only through the Yosida map of its
//! subdifferential `β = ∂β̂`; the Moreau envelope `β̂_ε` is what the energy
//! monitor integrates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::ScalarGraph;

/// Convex part `β̂` of a double-well potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexPart {
    /// `r⁴/4`, subdifferential `r³`.
    Quartic,
    /// `(1+r)ln(1+r) + (1-r)ln(1-r)` on `[-1, 1]`, subdifferential
    /// `ln((1+r)/(1-r))` on `(-1, 1)`.
    Logarithmic,
    /// Indicator function of `[-1, 1]`.
    Indicator,
    /// `β̂ ≡ 0`.
    Flat,
}

impl ConvexPart {
    /// Evaluates `β̂(r)`, returning `+∞` outside the effective domain.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            ConvexPart::Quartic => 0.25 * r.powi(4),
            ConvexPart::Logarithmic => {
                if r.abs() > 1.0 {
                    f64::INFINITY
                } else {
                    xlogx(1.0 + r) + xlogx(1.0 - r)
                }
            }
            ConvexPart::Indicator => {
                if r.abs() <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexPart::Flat => 0.0,
        }
    }

    pub fn in_domain(&self, r: f64) -> bool {
        self.value(r).is_finite()
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConvexPart::Quartic => "quartic",
            ConvexPart::Logarithmic => "logarithmic",
            ConvexPart::Indicator => "indicator",
            ConvexPart::Flat => "flat",
        }
    }
}

// 0 ln 0 = 0
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Lipschitz perturbation `π(r) = -slope·r`, i.e. `π̂(r) = -slope·r²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub slope: f64,
}

impl Perturbation {
    pub fn eval(&self, r: f64) -> f64 {
        -self.slope * r
    }

    /// Lipschitz constant `C_π`.
    pub fn lipschitz(&self) -> f64 {
        self.slope.abs()
    }

    pub fn antiderivative(&self, r: f64) -> f64 {
        -0.5 * self.slope * r * r
    }
}

/// The double-well potentials supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `F(r) = (r² - 1)²/4`.
    Regular,
    /// `F(r) = (1+r)ln(1+r) + (1-r)ln(1-r) - c₀r²`, `c₀ > 1`.
    Logarithmic { c0: f64 },
    /// `F(r) = I_[-1,1](r) - c₀r²`, `c₀ > 0`.
    Obstacle { c0: f64 },
    /// `F ≡ 0`. Only used to decouple the order parameter in linear
    /// verification runs.
    None,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialSpec::Logarithmic { c0 } if !(c0 > 1.0 && c0.is_finite()) => Err(Error::invalid(
                format!("logarithmic potential needs c0 > 1 for a double well, got {c0}"),
            )),
            PotentialSpec::Obstacle { c0 } if !(c0 > 0.0 && c0.is_finite()) => Err(Error::invalid(
                format!("obstacle potential needs c0 > 0, got {c0}"),
            )),
            _ => Ok(()),
        }
    }

    /// The fixed convex/Lipschitz splitting of each variant.
    pub fn split(&self) -> (ConvexPart, Perturbation) {
        match *self {
            PotentialSpec::Regular => (ConvexPart::Quartic, Perturbation { slope: 1.0 }),
            PotentialSpec::Logarithmic { c0 } => (ConvexPart::Logarithmic, Perturbation { slope: 2.0 * c0 }),
            PotentialSpec::Obstacle { c0 } => (ConvexPart::Indicator, Perturbation { slope: 2.0 * c0 }),
            PotentialSpec::None => (ConvexPart::Flat, Perturbation { slope: 0.0 }),
        }
    }

    pub fn convex_part(&self) -> ConvexPart {
        self.split().0
    }

    pub fn perturbation(&self) -> Perturbation {
        self.split().1
    }

    /// `β = ∂β̂` as a scalar maximal monotone graph.
    pub fn beta(&self) -> ScalarGraph {
        ScalarGraph::Subdiff(self.convex_part())
    }

    pub fn lipschitz_pi(&self) -> f64 {
        self.perturbation().lipschitz()
    }

    /// Full potential `F(r)`.
    pub fn value(&self, r: f64) -> f64 {
        let (convex, pert) = self.split();
        let shift = if matches!(self, PotentialSpec::Regular) { 0.25 } else { 0.0 };
        convex.value(r) + pert.antiderivative(r) + shift
    }

    /// Moreau envelope `β̂_ε(r) = β̂(R_ε r) + |r - R_ε r|²/(2ε)`.
    pub fn envelope(&self, eps: f64, r: f64) -> Result<f64> {
        MoreauEnvelope::new(*self, eps)?.value(r)
    }

    /// `β_ε(r)`, the Yosida map of `β`.
    pub fn beta_eps(&self, eps: f64, r: f64) -> Result<f64> {
        self.beta().yosida(eps, r)
    }

    /// True when the whole real line is admissible for `φ`.
    pub fn unconstrained(&self) -> bool {
        matches!(self, PotentialSpec::Regular | PotentialSpec::None)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Regular => "regular",
            PotentialSpec::Logarithmic { .. } => "logarithmic",
            PotentialSpec::Obstacle { .. } => "obstacle",
            PotentialSpec::None => "none",
        }
    }
}

/// Moreau–Yosida envelope `β̂_ε` of the convex part of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoreauEnvelope {
    pub base: PotentialSpec,
    pub epsilon: f64,
}

impl MoreauEnvelope {
    pub fn new(base: PotentialSpec, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { base, epsilon })
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        let (convex, _) = self.base.split();
        let proj = ScalarGraph::Subdiff(convex).resolvent(self.epsilon, r)?;
        let d = r - proj;
        Ok(convex.value(proj) + d * d / (2.0 * self.epsilon))
    }

    /// Derivative of the envelope, equal to the Yosida map `β_ε`.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.base.beta_eps(self.epsilon, r)
    }
}
