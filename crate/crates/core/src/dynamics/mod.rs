//! Faedo–Galerkin dynamics of the regularized phase-field system.
//!
//! The state is integrated in the variables `(θ, φ)` with
//! `θ = η + (ℓ - α)φ`, which removes the time derivative of `φ` from the
//! temperature equation:
//!
//! ```text
//! θ' = kΔθ - kℓΔφ - A_ε(η) + f_ε - kΔη*
//! φ' = νΔφ - β_ε(φ) - π(φ) + γ(θ - ℓφ + η*)
//! ```
//!
//! The linear part is diagonal per mode up to a 2×2 block. Nonlinear terms are
//! evaluated on the quadrature grid and projected back onto `V_n`, except
//! the nonlocal `Sign`, which is applied to coefficients directly.

mod forcing;
mod integrate;
mod solve;

pub use forcing::{l2_time, mollify, Forcing};
pub use integrate::{step, Method};
pub use solve::{solve, Sample, Schedule, SolutionTrajectory, SolveStats};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::{yosida_nonlocal_sign_with_norm, MonotoneGraph};
use crate::potentials::PotentialSpec;
use crate::spectral::SpectralBasis;

/// Physical constants, the Yosida parameter and the problem data.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Latent heat `ℓ`.
    pub latent_heat: f64,
    pub alpha: f64,
    /// Heat diffusivity `k`.
    pub k: f64,
    /// Interface mobility `ν`.
    pub nu: f64,
    pub gamma: f64,
    pub t_final: f64,
    /// Yosida parameter `ε`.
    pub eps: f64,
    pub graph: MonotoneGraph,
    pub potential: PotentialSpec,
    pub basis: SpectralBasis,
    /// Coefficients of the boundary-lifting datum `η*`.
    pub eta_star: Vec<f64>,
    /// The forcing actually used by the solver, already mollified if
    /// requested.
    pub forcing: Forcing,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("k", self.k), ("nu", self.nu), ("alpha", self.alpha), ("latent_heat", self.latent_heat), ("t_final", self.t_final), ("eps", self.eps)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        self.potential.validate()?;
        let grid = if self.graph.is_nonlocal() { None } else { Some(self.basis.num_nodes()) };
        self.graph.validate(grid)?;
        if self.graph.growth_constant().is_none() {
            return Err(Error::invalid(format!(
                "graph {} has no linear growth bound and cannot be used as the perturbation",
                self.graph.name()
            )));
        }
        let modes = self.basis.num_modes();
        if self.eta_star.len() != modes {
            return Err(Error::SizeMismatch { expected: modes, got: self.eta_star.len() });
        }
        if let Some(c) = self.forcing.coeffs.iter().find(|c| c.len() != modes) {
            return Err(Error::SizeMismatch { expected: modes, got: c.len() });
        }
        Ok(())
    }

    pub fn ell_minus_alpha(&self) -> f64 {
        self.latent_heat - self.alpha
    }

    /// Operator growth constant `C` of `A` on `H`.
    pub fn growth(&self) -> f64 {
        self.graph.h_growth_constant(self.basis.measure()).unwrap_or(f64::INFINITY)
    }

    /// The same model on another basis: `η*` and the forcing are re-projected
    /// through the grid values of the current basis.
    pub fn with_basis(&self, basis: SpectralBasis) -> Result<Self> {
        let eta_star = transfer(&self.basis, &basis, &self.eta_star)?;
        let forcing = Forcing {
            times: self.forcing.times.clone(),
            coeffs: self
                .forcing
                .coeffs
                .iter()
                .map(|c| transfer(&self.basis, &basis, c))
                .collect::<Result<_>>()?,
        };
        Ok(Self { basis, eta_star, forcing, ..self.clone() })
    }
}

/// Moves coefficients between bases on the same domain by matching the
/// `H`-normalized cosine coefficients; modes missing from `to` are dropped.
fn transfer(from: &SpectralBasis, to: &SpectralBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
    if from.domain() != to.domain() {
        return Err(Error::invalid("bases live on different domains"));
    }
    let h = from.to_h_coeffs(coeffs);
    let mut out = vec![0.0; to.num_modes()];
    for (mode, c) in h.iter().enumerate() {
        if let Some(target) = to.mode_at(&from.mode_index(mode)) {
            out[target] = *c;
        }
    }
    Ok(to.from_h_coeffs(&out))
}

/// Projected initial data together with the raw grid values of `φ₀` needed
/// for the energy bound.
#[derive(Debug, Clone, Serialize)]
pub struct InitialData {
    pub eta0: Vec<f64>,
    pub phi0: Vec<f64>,
    /// `φ₀` sampled on the grid before projection.
    pub phi0_grid: Vec<f64>,
}

impl InitialData {
    /// Projects grid samples of `η₀` and `φ₀`, checking that `β̂(φ₀)` is
    /// finite at every node.
    pub fn from_grid(basis: &SpectralBasis, potential: &PotentialSpec, eta0: &[f64], phi0: &[f64]) -> Result<Self> {
        let convex = potential.convex_part();
        if let Some((j, x)) = phi0.iter().enumerate().find(|(_, x)| !convex.value(**x).is_finite()) {
            return Err(Error::invalid(format!(
                "initial phase {x} at node {j} lies outside the domain of the {} potential",
                potential.name()
            )));
        }
        Ok(Self {
            eta0: basis.project(eta0)?,
            phi0: basis.project(phi0)?,
            phi0_grid: phi0.to_vec(),
        })
    }

    pub fn from_fns(basis: &SpectralBasis, potential: &PotentialSpec, eta0: impl Fn(&[f64]) -> f64, phi0: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let nodes = basis.nodes();
        let e: Vec<f64> = nodes.iter().map(|x| eta0(x)).collect();
        let p: Vec<f64> = nodes.iter().map(|x| phi0(x)).collect();
        Self::from_grid(basis, potential, &e, &p)
    }

    /// `Q_ε(n) = ∫β̂(φ₀) + (1/2ε)‖φ₀ - φ₀ₙ‖(‖φ₀‖ + ‖φ₀ₙ‖)`, which bounds
    /// `∫β̂_ε(φ₀ₙ)` uniformly in `n`.
    pub fn envelope_bound(&self, basis: &SpectralBasis, potential: &PotentialSpec, eps: f64) -> Result<f64> {
        let convex = potential.convex_part();
        let beta_hat: Vec<f64> = self.phi0_grid.iter().map(|x| convex.value(*x)).collect();
        let projected = basis.to_grid(&self.phi0)?;
        let diff: Vec<f64> = self.phi0_grid.iter().zip(&projected).map(|(a, b)| a - b).collect();
        Ok(basis.grid_integral(&beta_hat)
            + basis.grid_norm(&diff) * (basis.grid_norm(&self.phi0_grid) + basis.h_norm(&self.phi0)) / (2.0 * eps))
    }

    /// `∫β̂_ε(φ₀ₙ)` by grid quadrature.
    pub fn initial_envelope(&self, basis: &SpectralBasis, potential: &PotentialSpec, eps: f64) -> Result<f64> {
        envelope_integral(basis, potential, eps, &self.phi0)
    }
}

pub(crate) fn envelope_integral(basis: &SpectralBasis, potential: &PotentialSpec, eps: f64, phi: &[f64]) -> Result<f64> {
    let grid = basis.to_grid(phi)?;
    let vals = grid.iter().map(|r| potential.envelope(eps, *r)).collect::<Result<Vec<_>>>()?;
    Ok(basis.grid_integral(&vals))
}

/// Galerkin state in the integration variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinState {
    pub t: f64,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl GalerkinState {
    pub fn initial(params: &ModelParams, data: &InitialData) -> Self {
        let shift = params.ell_minus_alpha();
        Self {
            t: 0.0,
            theta: data.eta0.iter().zip(&data.phi0).map(|(e, p)| e + shift * p).collect(),
            phi: data.phi0.clone(),
        }
    }

    pub fn eta(&self, params: &ModelParams) -> Vec<f64> {
        let shift = params.ell_minus_alpha();
        self.theta.iter().zip(&self.phi).map(|(t, p)| t - shift * p).collect()
    }
}

/// Time derivative of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub dtheta: Vec<f64>,
    pub dphi: Vec<f64>,
}

impl Derivative {
    /// `∂tη = ∂tθ - (ℓ - α)∂tφ`.
    pub fn deta(&self, params: &ModelParams) -> Vec<f64> {
        let shift = params.ell_minus_alpha();
        self.dtheta.iter().zip(&self.dphi).map(|(t, p)| t - shift * p).collect()
    }
}

/// Nonlinear terms evaluated at one state.
#[derive(Debug, Clone)]
pub struct Selections {
    /// Projected `A_ε(η)`.
    pub zeta: Vec<f64>,
    /// Projected `β_ε(φ)`.
    pub xi: Vec<f64>,
    /// Projected `π(φ)`.
    pub pi: Vec<f64>,
    /// `‖A_ε(η)‖_H` before projection.
    pub zeta_norm: f64,
    /// `sup |A_ε(η)|` over grid nodes (the `H`-norm for the nonlocal graph).
    pub zeta_sup: f64,
    /// `(A_ε(η), η)_H` before projection.
    pub zeta_eta: f64,
}

/// Evaluates `A_ε(η)`, `β_ε(φ)` and `π(φ)` for the current state.
pub fn selections(params: &ModelParams, eta: &[f64], phi: &[f64]) -> Result<Selections> {
    let basis = &params.basis;
    let eps = params.eps;
    let (zeta, zeta_norm, zeta_sup, zeta_eta) = if params.graph.is_nonlocal() {
        let norm = basis.h_norm(eta);
        let z = yosida_nonlocal_sign_with_norm(eps, eta, norm);
        let zn = basis.h_norm(&z);
        let ze = basis.inner(&z, eta);
        (z, zn, zn, ze)
    } else if matches!(params.graph, MonotoneGraph::Zero) {
        (vec![0.0; eta.len()], 0.0, 0.0, 0.0)
    } else {
        let grid = basis.to_grid(eta)?;
        let z = params.graph.yosida_field(eps, &grid)?;
        let sup = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        (basis.from_grid(&z)?, basis.grid_norm(&z), sup, basis.grid_inner(&z, &grid))
    };
    let modes = phi.len();
    let (xi, pi) = if matches!(params.potential, PotentialSpec::None) {
        (vec![0.0; modes], vec![0.0; modes])
    } else {
        let grid = basis.to_grid(phi)?;
        let xi = grid.iter().map(|r| params.potential.beta_eps(eps, *r)).collect::<Result<Vec<_>>>()?;
        let pert = params.potential.perturbation();
        let pi: Vec<f64> = grid.iter().map(|r| pert.eval(*r)).collect();
        (basis.from_grid(&xi)?, basis.from_grid(&pi)?)
    };
    Ok(Selections { zeta, xi, pi, zeta_norm, zeta_sup, zeta_eta })
}

/// Explicit part `N(u, t)` of the right-hand side: graph terms, forcing and
/// the `η*` contributions.
pub(crate) fn explicit_part(params: &ModelParams, t: f64, theta: &[f64], phi: &[f64]) -> Result<Derivative> {
    let shift = params.ell_minus_alpha();
    let eta: Vec<f64> = theta.iter().zip(phi).map(|(t, p)| t - shift * p).collect();
    let sel = selections(params, &eta, phi)?;
    let f = params.forcing.at(t, params.basis.num_modes());
    let lam = params.basis.eigenvalues();
    let k = params.k;
    let g = params.gamma;
    let dtheta: Vec<f64> = (0..eta.len())
        .map(|i| -sel.zeta[i] + f[i] + k * lam[i] * params.eta_star[i])
        .collect();
    let dphi: Vec<f64> = (0..eta.len())
        .map(|i| -sel.xi[i] - sel.pi[i] + g * params.eta_star[i])
        .collect();
    Ok(Derivative { dtheta, dphi })
}

/// The 2×2 linear block of mode `i`, acting on `(θ_i, φ_i)`.
pub(crate) fn linear_block(params: &ModelParams, lambda: f64) -> [[f64; 2]; 2] {
    let k = params.k;
    let l = params.latent_heat;
    let g = params.gamma;
    [[-k * lambda, k * l * lambda], [g, -params.nu * lambda - g * l]]
}

/// Full right-hand side of the Galerkin system at `state`.
pub fn assemble_rhs(params: &ModelParams, state: &GalerkinState) -> Result<Derivative> {
    rhs(params, state.t, &state.theta, &state.phi)
}

pub(crate) fn rhs(params: &ModelParams, t: f64, theta: &[f64], phi: &[f64]) -> Result<Derivative> {
    let mut d = explicit_part(params, t, theta, phi)?;
    for (i, lam) in params.basis.eigenvalues().iter().enumerate() {
        let m = linear_block(params, *lam);
        d.dtheta[i] += m[0][0] * theta[i] + m[0][1] * phi[i];
        d.dphi[i] += m[1][0] * theta[i] + m[1][1] * phi[i];
    }
    if let Some(bad) = d.dtheta.iter().chain(&d.dphi).find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    Ok(d)
}
