use serde::Serialize;

use super::cumulative_trapezoid;
use crate::dynamics::{InitialData, ModelParams, SolutionTrajectory};
use crate::error::Result;

/// Constants of the first a priori estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyConstants {
    /// Lipschitz constant of `π`.
    pub c_pi: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl EnergyConstants {
    pub fn new(params: &ModelParams) -> Self {
        let pert = params.potential.perturbation();
        let c_pi = pert.lipschitz();
        let c1 = c_pi.max(pert.eval(0.0).abs());
        let la = params.ell_minus_alpha();
        let g = params.gamma;
        let c2 = 2.0 * (2.0 * la * la + 0.125 + 8.0 * g * g);
        let c3 = params.k * params.alpha * params.alpha / params.nu;
        let nag = params.nu - params.alpha * g;
        let c4 = 2.0 * (4.0 * c1 * c1 + 8.0 * nag * nag) / params.nu;
        Self { c_pi, c1, c2, c3, c4, c5: c2.max(c3).max(c4) }
    }
}

/// The five terms of `E₁(t)` at one sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EnergyComponents {
    /// `½‖η(t)‖²`
    pub eta: f64,
    /// `k∫₀ᵗ‖∇η‖²`
    pub grad_eta: f64,
    /// `∫₀ᵗ‖∂tφ‖²`
    pub dphi: f64,
    /// `(ν/2)‖φ(t)‖²_V`
    pub phi: f64,
    /// `∫β̂_ε(φ(t))`
    pub envelope: f64,
}

impl EnergyComponents {
    pub fn total(&self) -> f64 {
        self.eta + self.grad_eta + self.dphi + self.phi + self.envelope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub components: Vec<EnergyComponents>,
    pub e1: Vec<f64>,
    /// Gronwall bound `2K(t)e^{C₅t}`.
    pub bound: Vec<f64>,
    pub constants: EnergyConstants,
    /// `∫β̂_ε(φ₀ₙ)`.
    pub initial_envelope: f64,
    /// `Q_ε(n)`.
    pub q_eps: f64,
    /// `‖Δφ‖_{L²(0,t;H)}`.
    pub second: Vec<f64>,
    /// `‖∂tη‖_{L²(0,t;H)} + ‖∇η(t)‖_H`.
    pub third: Vec<f64>,
    /// `‖Δη‖_{L²(0,t;H)}`.
    pub fourth: Vec<f64>,
    /// Growth constant `C` of `A` on `H`.
    pub growth: f64,
    /// `max_t ‖ζ(t)‖ / (C(1 + ‖η(t)‖))`; at most 1 when the growth bound holds.
    pub selection_ratio: f64,
    /// `min_t (A_ε η, η)`.
    pub min_zeta_eta: f64,
    /// `min` over sample pairs of `∫(ξ₁ - ξ₂)(φ₁ - φ₂)`.
    pub min_xi_pair: f64,
    /// `min` over sample pairs of `(ζ₁ - ζ₂, η₁ - η₂)`.
    pub min_zeta_pair: f64,
    pub warnings: Vec<String>,
}

impl EnergyReport {
    /// `max_t E₁(t)/bound(t)`.
    pub fn bound_ratio(&self) -> f64 {
        self.e1.iter().zip(&self.bound).map(|(e, b)| e / b).fold(0.0, f64::max)
    }

    pub fn bound_holds(&self) -> bool {
        self.e1.iter().zip(&self.bound).all(|(e, b)| e <= b)
    }

    pub fn selection_bound_holds(&self, tol: f64) -> bool {
        self.selection_ratio <= 1.0 + tol
    }

    /// All monotone dissipation terms are above `-tol`.
    pub fn dissipation_holds(&self, tol: f64) -> bool {
        self.min_zeta_eta >= -tol && self.min_xi_pair >= -tol && self.min_zeta_pair >= -tol
    }

    pub fn envelope_holds(&self) -> bool {
        self.initial_envelope <= self.q_eps * (1.0 + 1e-12) + 1e-14
            && self.components.iter().all(|c| c.envelope >= 0.0)
    }
}

const MIN_SAMPLES: usize = 20;

/// Evaluates the a priori estimates along a trajectory.
pub fn energy_monitor(trajectory: &SolutionTrajectory, params: &ModelParams, initial: &InitialData) -> Result<EnergyReport> {
    let basis = &params.basis;
    let eps = params.eps;
    let samples = &trajectory.samples;
    let times = trajectory.times();
    let constants = EnergyConstants::new(params);
    let mut warnings = Vec::new();
    if samples.len() < MIN_SAMPLES {
        warnings.push(format!(
            "only {} samples; time integrals use the trapezoid rule and may be inaccurate",
            samples.len()
        ));
    }

    let grad_eta = cumulative_trapezoid(&times, &samples.iter().map(|s| basis.dirichlet(&s.eta)).collect::<Vec<_>>());
    let dphi = cumulative_trapezoid(&times, &samples.iter().map(|s| basis.inner(&s.dphi, &s.dphi)).collect::<Vec<_>>());
    let lap_phi = cumulative_trapezoid(&times, &samples.iter().map(|s| basis.laplacian_norm(&s.phi).powi(2)).collect::<Vec<_>>());
    let deta = cumulative_trapezoid(&times, &samples.iter().map(|s| basis.inner(&s.deta, &s.deta)).collect::<Vec<_>>());
    let lap_eta = cumulative_trapezoid(&times, &samples.iter().map(|s| basis.laplacian_norm(&s.eta).powi(2)).collect::<Vec<_>>());

    let modes = basis.num_modes();
    let lam = basis.eigenvalues();
    let source: Vec<f64> = times
        .iter()
        .map(|&t| {
            let f = params.forcing.at(t, modes);
            let g: Vec<f64> = (0..modes).map(|i| f[i] + params.k * lam[i] * params.eta_star[i]).collect();
            basis.inner(&g, &g)
        })
        .collect();
    let source = cumulative_trapezoid(&times, &source);

    let convex = params.potential.convex_part();
    let phi_grids = samples.iter().map(|s| basis.to_grid(&s.phi)).collect::<Result<Vec<_>>>()?;
    let mut components = Vec::with_capacity(samples.len());
    for (j, s) in samples.iter().enumerate() {
        let envelope = if matches!(convex, crate::potentials::ConvexPart::Flat) {
            0.0
        } else {
            let vals = phi_grids[j].iter().map(|r| params.potential.envelope(eps, *r)).collect::<Result<Vec<_>>>()?;
            basis.grid_integral(&vals)
        };
        let n = basis.norms(&s.phi);
        components.push(EnergyComponents {
            eta: 0.5 * basis.inner(&s.eta, &s.eta),
            grad_eta: params.k * grad_eta[j],
            dphi: dphi[j],
            phi: 0.5 * params.nu * n.v * n.v,
            envelope,
        });
    }
    let e1: Vec<f64> = components.iter().map(EnergyComponents::total).collect();

    let initial_envelope = initial.initial_envelope(basis, &params.potential, eps)?;
    let q_eps = initial.envelope_bound(basis, &params.potential, eps)?;
    let v0 = basis.norms(&initial.phi0).v;
    let k0 = 0.5 * basis.inner(&initial.eta0, &initial.eta0) + 0.5 * params.nu * v0 * v0 + initial_envelope;
    let c1 = constants.c1;
    let g = params.gamma;
    let star = basis.inner(&params.eta_star, &params.eta_star);
    let bound: Vec<f64> = times
        .iter()
        .zip(&source)
        .map(|(&t, src)| {
            let k = k0 + 4.0 * c1 * c1 * basis.measure() * t + 2.0 * src + 8.0 * g * g * t * star;
            2.0 * k * (constants.c5 * t).exp()
        })
        .collect();

    let second: Vec<f64> = lap_phi.iter().map(|x| x.sqrt()).collect();
    let third: Vec<f64> = deta.iter().zip(samples).map(|(d, s)| d.sqrt() + basis.dirichlet(&s.eta).sqrt()).collect();
    let fourth: Vec<f64> = lap_eta.iter().map(|x| x.sqrt()).collect();

    let growth = params.growth();
    let selection_ratio = samples
        .iter()
        .map(|s| if s.zeta_norm == 0.0 { 0.0 } else { s.zeta_norm / (growth * (1.0 + basis.h_norm(&s.eta))) })
        .fold(0.0, f64::max);
    let min_zeta_eta = samples.iter().map(|s| s.zeta_eta).fold(f64::INFINITY, f64::min);

    let (min_xi_pair, min_zeta_pair) = pair_dissipation(trajectory, params, &phi_grids)?;

    Ok(EnergyReport {
        times,
        components,
        e1,
        bound,
        constants,
        initial_envelope,
        q_eps,
        second,
        third,
        fourth,
        growth,
        selection_ratio,
        min_zeta_eta,
        min_xi_pair,
        min_zeta_pair,
        warnings,
    })
}

/// Minimum over all sample pairs of the monotonicity integrals of the
/// unprojected selections.
fn pair_dissipation(trajectory: &SolutionTrajectory, params: &ModelParams, phi_grids: &[Vec<f64>]) -> Result<(f64, f64)> {
    let basis = &params.basis;
    let eps = params.eps;
    let xi = phi_grids
        .iter()
        .map(|g| g.iter().map(|r| params.potential.beta_eps(eps, *r)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let nonlocal = params.graph.is_nonlocal();
    let eta: Vec<Vec<f64>> = if nonlocal {
        trajectory.samples.iter().map(|s| s.eta.clone()).collect()
    } else {
        trajectory.samples.iter().map(|s| basis.to_grid(&s.eta)).collect::<Result<_>>()?
    };
    let zeta: Vec<Vec<f64>> = if nonlocal {
        trajectory.samples.iter().map(|s| s.zeta.clone()).collect()
    } else {
        eta.iter().map(|g| params.graph.yosida_field(eps, g)).collect::<Result<_>>()?
    };
    let pair = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += (a[i] - b[i]) * (c[i] - d[i]);
        }
        s
    };
    let mut min_xi = f64::INFINITY;
    let mut min_zeta = f64::INFINITY;
    let n = phi_grids.len();
    let w = basis.node_weight();
    for i in 0..n {
        for j in (i + 1)..n {
            min_xi = min_xi.min(w * pair(&xi[i], &xi[j], &phi_grids[i], &phi_grids[j]));
            let z = if nonlocal {
                let d: Vec<f64> = zeta[i].iter().zip(&zeta[j]).map(|(a, b)| a - b).collect();
                let e: Vec<f64> = eta[i].iter().zip(&eta[j]).map(|(a, b)| a - b).collect();
                basis.inner(&d, &e)
            } else {
                w * pair(&zeta[i], &zeta[j], &eta[i], &eta[j])
            };
            min_zeta = min_zeta.min(z);
        }
    }
    if n < 2 {
        return Ok((0.0, 0.0));
    }
    Ok((min_xi, min_zeta))
}
