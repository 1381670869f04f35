//! Scenario configuration in TOML.
//!
//! ```toml
//! name = "example"
//! seed = 1
//!
//! [domain]
//! lengths = [1.0]
//! n = 16
//!
//! [model]
//! latent_heat = 1.0
//! alpha = 1.0
//! k = 1.0
//! nu = 1.0
//! gamma = 1.0
//! t_final = 0.5
//!
//! [potential]
//! kind = "regular"
//!
//! [graph]
//! kind = "sign"
//!
//! [regularization]
//! eps = 0.1
//!
//! [initial]
//! eta0 = { profile = "constant", value = 0.0 }
//! phi0 = { profile = "cosine", mode = [1] }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::Schedule;
use crate::error::{Error, Result};
use crate::monotone::{MonotoneGraph, Weight};
use crate::potentials::{ConvexPart, PotentialSpec};
use crate::profiles::{Profile, TimeProfile};
use crate::spectral::{Domain, Normalization, SpectralBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainConfig,
    pub model: ModelConfig,
    pub potential: PotentialSpec,
    pub graph: GraphConfig,
    pub regularization: RegularizationConfig,
    pub initial: InitialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<ForcingConfig>,
    #[serde(default)]
    pub integrator: Schedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// One length for an interval, two for a rectangle.
    pub lengths: Vec<f64>,
    /// Modes per dimension.
    pub n: usize,
    /// Grid nodes per dimension; defaults to `3n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default)]
    pub normalization: Normalization,
}

impl DomainConfig {
    pub fn domain(&self) -> Result<Domain> {
        match self.lengths[..] {
            [length] => Ok(Domain::Interval { length }),
            [lx, ly] => Ok(Domain::Rectangle { lx, ly }),
            _ => Err(Error::config(format!("domain needs 1 or 2 lengths, got {}", self.lengths.len()))),
        }
    }

    pub fn basis_with(&self, n: usize) -> Result<SpectralBasis> {
        let m = match self.m {
            Some(m) if n == self.n => m,
            Some(m) => m.max(3 * n),
            None => 3 * n,
        };
        SpectralBasis::new(self.domain()?, n, m, self.normalization)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub latent_heat: f64,
    pub alpha: f64,
    pub k: f64,
    pub nu: f64,
    pub gamma: f64,
    pub t_final: f64,
}

/// The perturbing graph `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphConfig {
    Sign,
    NonlocalSign,
    Stefan { alpha1: f64, alpha2: f64 },
    Power {
        q: f64,
        #[serde(default = "unit")]
        weight: f64,
        /// Spatially varying weight; overrides `weight`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight_profile: Option<Profile>,
    },
    Subdiff { part: ConvexPart },
    Zero,
}

fn unit() -> f64 {
    1.0
}

impl GraphConfig {
    pub fn build(&self, basis: &SpectralBasis, seed: u64, base_dir: &Path) -> Result<MonotoneGraph> {
        Ok(match self {
            GraphConfig::Sign => MonotoneGraph::ScalarSign,
            GraphConfig::NonlocalSign => MonotoneGraph::NonlocalSign,
            GraphConfig::Stefan { alpha1, alpha2 } => MonotoneGraph::Stefan { alpha1: *alpha1, alpha2: *alpha2 },
            GraphConfig::Power { q, weight, weight_profile } => MonotoneGraph::WeightedPower {
                q: *q,
                weight: match weight_profile {
                    Some(p) => Weight::Grid(p.sample(basis, seed, base_dir)?),
                    None => Weight::Uniform(*weight),
                },
            },
            GraphConfig::Subdiff { part } => MonotoneGraph::SubdiffBetaHat(*part),
            GraphConfig::Zero => MonotoneGraph::Zero,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    pub eps: f64,
    /// Replace `f` by the solution of `-εf'' + f = f`, `f(0) = f(T) = 0`.
    #[serde(default)]
    pub mollify_forcing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub eta0: Profile,
    pub phi0: Profile,
    #[serde(default = "Profile::zero")]
    pub eta_star: Profile,
}

/// Separable forcing `f(x, t) = g(t)s(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingConfig {
    pub spatial: Profile,
    pub time: TimeProfile,
    /// Number of time samples on `[0, T]`.
    #[serde(default = "forcing_samples")]
    pub samples: usize,
}

fn forcing_samples() -> usize {
    201
}

/// Optional scenario certificates checked by `run`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Mode whose coefficient must decay as `exp(-kλT)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_mode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_tol: Option<f64>,
    /// Upper bound on `sup|ζ|` along the trajectory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_bound: Option<f64>,
    /// Every stored coefficient must vanish.
    #[serde(default)]
    pub all_zero: bool,
}

impl ScenarioConfig {
    /// Parses TOML, reporting the line of the first syntax or type error.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    /// Checks the constraints that do not need a basis.
    pub fn validate(&self) -> Result<()> {
        self.domain.domain()?;
        if self.domain.n == 0 {
            return Err(Error::config("domain.n must be at least 1"));
        }
        let m = &self.model;
        for (name, v) in [("latent_heat", m.latent_heat), ("alpha", m.alpha), ("k", m.k), ("nu", m.nu), ("t_final", m.t_final)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("model.{name} must be positive, got {v}")));
            }
        }
        if !(m.gamma >= 0.0 && m.gamma.is_finite()) {
            return Err(Error::config(format!("model.gamma must be non-negative, got {}", m.gamma)));
        }
        if !(self.regularization.eps > 0.0 && self.regularization.eps.is_finite()) {
            return Err(Error::config("regularization.eps must be positive"));
        }
        self.potential.validate().map_err(|e| Error::config(e.to_string()))?;
        self.integrator.validate().map_err(|e| Error::config(e.to_string()))?;
        if let Some(f) = &self.forcing {
            if f.samples < 3 {
                return Err(Error::config("forcing.samples must be at least 3"));
            }
        }
        Ok(())
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"

[domain]
lengths = [1.0]
n = 4

[model]
latent_heat = 1.0
alpha = 1.0
k = 1.0
nu = 1.0
gamma = 1.0
t_final = 1.0

[potential]
kind = "obstacle"
c0 = 0.5

[graph]
kind = "stefan"
alpha1 = 1.0
alpha2 = 2.0

[regularization]
eps = 0.1

[initial]
eta0 = { profile = "constant", value = 0.0 }
phi0 = { profile = "tanh", center = 0.5, width = 0.1, amplitude = 0.9 }
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ScenarioConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.potential, PotentialSpec::Obstacle { c0: 0.5 });
        assert_eq!(cfg.integrator, Schedule::default());
        let again = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let bad = MINIMAL.replace("n = 4", "n = ");
        match ScenarioConfig::from_toml(&bad) {
            Err(Error::Config { line: Some(6), .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("n = 4", "n = 4\nbogus = 1");
        assert!(matches!(ScenarioConfig::from_toml(&bad), Err(Error::Config { line: Some(_), .. })));
    }

    #[test]
    fn semantic_errors_are_config_errors() {
        let bad = MINIMAL.replace("k = 1.0", "k = -1.0");
        assert!(matches!(ScenarioConfig::from_toml(&bad), Err(Error::Config { line: None, .. })));
    }
}
