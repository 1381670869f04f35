use rayon::prelude::*;
use serde::Serialize;

use super::{cumulative_trapezoid, fit_slope};
use crate::dynamics::{solve, InitialData, ModelParams, Schedule, SolutionTrajectory};
use crate::error::{Error, Result};

/// Constants of the continuous-dependence estimate, reported for comparison
/// with the observed ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionConstants {
    pub m: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `C₂/C₃`, which bounds the squared solution difference by the squared
    /// data difference.
    pub c4: f64,
}

impl ContractionConstants {
    pub fn new(params: &ModelParams) -> Self {
        let (k, l, nu, g, t) = (params.k, params.latent_heat, params.nu, params.gamma, params.t_final);
        let c_pi = params.potential.lipschitz_pi();
        let m = ((4.0 * g * g * k * l * l + 2.0 * nu * c_pi) / nu).max(0.5);
        let c0 = (0.5f64).max(k * l * l / (2.0 * nu));
        let c1 = (t * m).exp();
        let c2 = (4.0 * c1).max(4.0 * k * k * t * c1).max(t * c1 / 8.0).max(c1 * c0);
        let c3 = (0.5f64).min(k * l * l / (2.0 * nu)).min(l * l / 2.0);
        Self { m, c0, c1, c2, c3, c4: c2 / c3 }
    }
}

/// Norms of the data difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DataDifference {
    /// `‖f₁ - f₂‖_{L²(Q)}`
    pub forcing: f64,
    /// `‖η*₁ - η*₂‖_W`
    pub eta_star: f64,
    /// `‖η₀₁ - η₀₂‖_H`
    pub eta0: f64,
    /// `‖φ₀₁ - φ₀₂‖_H`
    pub phi0: f64,
}

impl DataDifference {
    pub fn total(&self) -> f64 {
        self.forcing + self.eta_star + self.eta0 + self.phi0
    }
}

/// Norms of the solution difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolutionDifference {
    pub eta_linf_h: f64,
    pub eta_l2_v: f64,
    pub phi_linf_h: f64,
    pub phi_l2_v: f64,
}

impl SolutionDifference {
    /// `‖η₁ - η₂‖_{L∞(H) ∩ L²(V)} + ‖φ₁ - φ₂‖_{L∞(H) ∩ L²(V)}`, each
    /// intersection norm taken as the sum of its two parts.
    pub fn total(&self) -> f64 {
        self.eta_linf_h + self.eta_l2_v + self.phi_linf_h + self.phi_l2_v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub data: DataDifference,
    pub solution: SolutionDifference,
    /// Observed ratio; `None` when the data coincide.
    pub c_obs: Option<f64>,
    /// The two trajectories are bitwise identical.
    pub identical: bool,
    pub constants: ContractionConstants,
}

fn check_compatible(p1: &ModelParams, p2: &ModelParams) -> Result<()> {
    let tol = 1e-12 * p1.latent_heat.abs().max(1.0);
    if (p1.alpha - p1.latent_heat).abs() > tol {
        return Err(Error::invalid(format!(
            "continuous dependence requires alpha = latent_heat (got alpha = {}, latent_heat = {})",
            p1.alpha, p1.latent_heat
        )));
    }
    let same = p1.latent_heat == p2.latent_heat
        && p1.alpha == p2.alpha
        && p1.k == p2.k
        && p1.nu == p2.nu
        && p1.gamma == p2.gamma
        && p1.t_final == p2.t_final
        && p1.eps == p2.eps
        && p1.graph == p2.graph
        && p1.potential == p2.potential
        && p1.basis.num_modes() == p2.basis.num_modes()
        && p1.basis.domain() == p2.basis.domain();
    if !same {
        return Err(Error::invalid("both runs must share coefficients, graphs, epsilon and basis"));
    }
    Ok(())
}

/// Compares two solved trajectories against their data difference.
pub fn compare(
    p1: &ModelParams,
    d1: &InitialData,
    s1: &SolutionTrajectory,
    p2: &ModelParams,
    d2: &InitialData,
    s2: &SolutionTrajectory,
) -> Result<ContractionReport> {
    check_compatible(p1, p2)?;
    let b = &p1.basis;
    let diff = |u: &[f64], w: &[f64]| u.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>();
    let data = DataDifference {
        forcing: p1.forcing.l2_distance(&p2.forcing, b, p1.t_final),
        eta_star: b.w_norm(&diff(&p1.eta_star, &p2.eta_star)),
        eta0: b.h_norm(&diff(&d1.eta0, &d2.eta0)),
        phi0: b.h_norm(&diff(&d1.phi0, &d2.phi0)),
    };
    if s1.samples.len() != s2.samples.len() {
        return Err(Error::SizeMismatch { expected: s1.samples.len(), got: s2.samples.len() });
    }
    let times = s1.times();
    let mut eta_h = Vec::with_capacity(times.len());
    let mut eta_v = Vec::with_capacity(times.len());
    let mut phi_h = Vec::with_capacity(times.len());
    let mut phi_v = Vec::with_capacity(times.len());
    for (a, c) in s1.samples.iter().zip(&s2.samples) {
        let ne = b.norms(&diff(&a.eta, &c.eta));
        let np = b.norms(&diff(&a.phi, &c.phi));
        eta_h.push(ne.h);
        eta_v.push(ne.v * ne.v);
        phi_h.push(np.h);
        phi_v.push(np.v * np.v);
    }
    let last = |v: Vec<f64>| v.last().copied().unwrap_or(0.0).sqrt();
    let solution = SolutionDifference {
        eta_linf_h: eta_h.iter().cloned().fold(0.0, f64::max),
        eta_l2_v: last(cumulative_trapezoid(&times, &eta_v)),
        phi_linf_h: phi_h.iter().cloned().fold(0.0, f64::max),
        phi_l2_v: last(cumulative_trapezoid(&times, &phi_v)),
    };
    let total = data.total();
    Ok(ContractionReport {
        data,
        solution,
        c_obs: (total > 0.0).then(|| solution.total() / total),
        identical: s1 == s2,
        constants: ContractionConstants::new(p1),
    })
}

/// Solves both problems and compares them.
pub fn contraction_check(
    p1: &ModelParams,
    d1: &InitialData,
    p2: &ModelParams,
    d2: &InitialData,
    schedule: &Schedule,
) -> Result<ContractionReport> {
    check_compatible(p1, p2)?;
    let (s1, s2) = rayon::join(|| solve(p1, d1, schedule), || solve(p2, d2, schedule));
    compare(p1, d1, &s1?, p2, d2, &s2?)
}

/// Result of a dyadic perturbation sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionSweep {
    pub deltas: Vec<f64>,
    pub reports: Vec<ContractionReport>,
    /// Least-squares slope of `log(solution difference)` against `log δ`.
    pub slope: f64,
    /// `max C_obs / min C_obs` over the sweep.
    pub c_obs_spread: f64,
}

impl ContractionSweep {
    pub fn c_obs(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.c_obs.unwrap_or(0.0)).collect()
    }
}

/// Perturbs `φ₀` by `δ·direction` for each `δ` and reports the observed
/// constants. The unperturbed run is shared by all members.
pub fn contraction_sweep(
    params: &ModelParams,
    data: &InitialData,
    direction: &[f64],
    deltas: &[f64],
    schedule: &Schedule,
) -> Result<ContractionSweep> {
    check_compatible(params, params)?;
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::invalid("perturbation sizes must be positive"));
    }
    let base = solve(params, data, schedule)?;
    let reports = deltas
        .par_iter()
        .map(|&delta| {
            let mut other = data.clone();
            for (p, v) in other.phi0.iter_mut().zip(direction) {
                *p += delta * v;
            }
            solve(params, &other, schedule)
                .and_then(|sol| compare(params, data, &base, params, &other, &sol))
                .map_err(|e| Error::Member { label: format!("delta = {delta}"), source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.solution.total().ln()).collect();
    let c: Vec<f64> = reports.iter().filter_map(|r| r.c_obs).collect();
    let spread = c.iter().cloned().fold(0.0, f64::max) / c.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ContractionSweep {
        deltas: deltas.to_vec(),
        slope: fit_slope(&xs, &ys),
        c_obs_spread: spread,
        reports,
    })
}
