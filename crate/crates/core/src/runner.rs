//! Builds a model from a [`ScenarioConfig`], runs it and certifies the
//! result; also drives the refinement and perturbation sweeps.

use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::dynamics::{solve, Forcing, InitialData, ModelParams, SolutionTrajectory};
use crate::error::{Error, Result};
use crate::estimates::{
    contraction_sweep, energy_monitor, galerkin_convergence, yosida_convergence, ContractionSweep, ConvergenceReport,
    EnergyReport,
};

// Offsets added to the scenario seed so that each random field gets its own
// stream.
const SALT_GRAPH: u64 = 0;
const SALT_ETA0: u64 = 1;
const SALT_PHI0: u64 = 2;
const SALT_ETA_STAR: u64 = 3;
const SALT_FORCING: u64 = 4;

/// Tolerance of the selection and dissipation certificates.
pub const CERT_TOL: f64 = 1e-9;

/// Model parameters and initial data described by `cfg`. Relative CSV paths
/// are resolved against `base_dir`.
pub fn prepare(cfg: &ScenarioConfig, base_dir: &Path) -> Result<(ModelParams, InitialData)> {
    cfg.validate()?;
    let basis = cfg.domain.basis_with(cfg.domain.n)?;
    let seed = cfg.seed;
    let m = &cfg.model;
    let graph = cfg.graph.build(&basis, seed.wrapping_add(SALT_GRAPH), base_dir)?;
    let eta_star = basis.project(&cfg.initial.eta_star.sample(&basis, seed.wrapping_add(SALT_ETA_STAR), base_dir)?)?;
    let forcing = match &cfg.forcing {
        None => Forcing::zero(),
        Some(f) => {
            let spatial = basis.project(&f.spatial.sample(&basis, seed.wrapping_add(SALT_FORCING), base_dir)?)?;
            let time = f.time;
            let raw = Forcing::separable(&spatial, m.t_final, f.samples, |t| time.eval(t, m.t_final))?;
            if cfg.regularization.mollify_forcing {
                raw.mollified(cfg.regularization.eps)?
            } else {
                raw
            }
        }
    };
    let params = ModelParams {
        latent_heat: m.latent_heat,
        alpha: m.alpha,
        k: m.k,
        nu: m.nu,
        gamma: m.gamma,
        t_final: m.t_final,
        eps: cfg.regularization.eps,
        graph,
        potential: cfg.potential,
        basis,
        eta_star,
        forcing,
    };
    params.validate()?;
    let eta0 = cfg.initial.eta0.sample(&params.basis, seed.wrapping_add(SALT_ETA0), base_dir)?;
    let phi0 = cfg.initial.phi0.sample(&params.basis, seed.wrapping_add(SALT_PHI0), base_dir)?;
    let data = InitialData::from_grid(&params.basis, &params.potential, &eta0, &phi0)?;
    Ok((params, data))
}

/// A named pass/fail check with a human-readable detail line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Certificate {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub method: String,
    pub modes: usize,
    pub samples: usize,
    pub steps: usize,
    pub rejected_steps: usize,
    pub t_final: f64,
    pub final_eta_h: f64,
    pub final_phi_h: f64,
    pub max_zeta: f64,
    /// `max_t max_x (|φ| - 1)₊` on the grid.
    pub max_overshoot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Everything `run` reports. `run` leaves `timing` empty so that the report
/// is a deterministic function of the config; callers may fill it from
/// [`RunOutcome::elapsed`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub summary: TrajectorySummary,
    pub certificates: Vec<Certificate>,
    pub energy: EnergyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Certificate> {
        self.certificates.iter().filter(|c| !c.passed).collect()
    }
}

pub struct RunOutcome {
    pub params: ModelParams,
    pub initial: InitialData,
    pub trajectory: SolutionTrajectory,
    pub report: RunReport,
    pub elapsed: Duration,
}

/// Solves the scenario, evaluates the estimates and collects the
/// certificates. Invariant failures are reported, not returned as errors.
pub fn run(cfg: &ScenarioConfig, base_dir: &Path) -> Result<RunOutcome> {
    let start = Instant::now();
    let (params, initial) = prepare(cfg, base_dir)?;
    let trajectory = solve(&params, &initial, &cfg.integrator)?;
    let energy = energy_monitor(&trajectory, &params, &initial)?;
    let summary = summarize(&params, &trajectory)?;
    let certificates = certify(cfg, &params, &trajectory, &energy, &summary);
    let report = RunReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        summary,
        certificates,
        energy,
        timing: None,
    };
    Ok(RunOutcome { params, initial, trajectory, report, elapsed: start.elapsed() })
}

fn summarize(params: &ModelParams, traj: &SolutionTrajectory) -> Result<TrajectorySummary> {
    let b = &params.basis;
    let last = traj.last();
    let mut overshoot = 0.0f64;
    for s in &traj.samples {
        for x in b.to_grid(&s.phi)? {
            overshoot = overshoot.max(x.abs() - 1.0);
        }
    }
    Ok(TrajectorySummary {
        method: traj.method.to_string(),
        modes: b.num_modes(),
        samples: traj.samples.len(),
        steps: traj.stats.steps,
        rejected_steps: traj.stats.rejected,
        t_final: last.t,
        final_eta_h: b.h_norm(&last.eta),
        final_phi_h: b.h_norm(&last.phi),
        max_zeta: traj.samples.iter().map(|s| s.zeta_sup).fold(0.0, f64::max),
        max_overshoot: overshoot,
    })
}

fn certify(
    cfg: &ScenarioConfig,
    params: &ModelParams,
    traj: &SolutionTrajectory,
    energy: &EnergyReport,
    summary: &TrajectorySummary,
) -> Vec<Certificate> {
    let mut out = vec![
        Certificate::new(
            "energy-bound",
            energy.bound_holds(),
            format!("max E1/bound = {:.6e}", energy.bound_ratio()),
        ),
        Certificate::new(
            "selection-bound",
            energy.selection_bound_holds(CERT_TOL),
            format!("max |zeta| / (C(1 + |eta|)) = {:.6e} with C = {}", energy.selection_ratio, energy.growth),
        ),
        Certificate::new(
            "dissipation",
            energy.dissipation_holds(CERT_TOL),
            format!(
                "min zeta.eta = {:.3e}, min pair terms (zeta, xi) = ({:.3e}, {:.3e})",
                energy.min_zeta_eta, energy.min_zeta_pair, energy.min_xi_pair
            ),
        ),
        Certificate::new(
            "envelope",
            energy.envelope_holds(),
            format!("initial envelope {:.6e} <= Q = {:.6e}", energy.initial_envelope, energy.q_eps),
        ),
    ];
    let Some(expect) = &cfg.expect else { return out };
    if let Some(i) = expect.decay_mode {
        let tol = expect.decay_tol.unwrap_or(1e-4);
        let (passed, detail) = match (traj.samples.first(), traj.samples.last()) {
            (Some(a), Some(z)) if i < a.eta.len() && a.eta[i] != 0.0 => {
                let ratio = z.eta[i] / a.eta[i];
                let exact = (-params.k * params.basis.eigenvalue(i) * (z.t - a.t)).exp();
                ((ratio - exact).abs() <= tol, format!("b(T)/b(0) = {ratio:.12}, exp(-k lambda T) = {exact:.12}"))
            }
            _ => (false, format!("mode {i} is absent or starts at zero")),
        };
        out.push(Certificate::new("decay", passed, detail));
    }
    if let Some(bound) = expect.zeta_bound {
        out.push(Certificate::new(
            "zeta-bound",
            summary.max_zeta <= bound + CERT_TOL,
            format!("max |zeta| = {:.12} (bound {bound})", summary.max_zeta),
        ));
    }
    if expect.all_zero {
        let zero = traj
            .samples
            .iter()
            .all(|s| s.eta.iter().chain(&s.phi).chain(&s.zeta).chain(&s.xi).all(|v| *v == 0.0));
        out.push(Certificate::new("all-zero", zero, format!("{} samples checked", traj.samples.len())));
    }
    out
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Yosida parameter `ε`, strictly decreasing.
    EpsLadder,
    /// Mode count per dimension, strictly increasing.
    NLadder,
    /// Size `δ` of a perturbation of `φ₀` along the first cosine mode.
    ContractionDelta,
}

impl SweepAxis {
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepAxis::EpsLadder => vec![1e-1, 1e-2, 1e-3, 1e-4],
            SweepAxis::NLadder => vec![8.0, 16.0, 32.0, 64.0],
            SweepAxis::ContractionDelta => (1..=4).map(|j| 0.1 * 0.5f64.powi(j)).collect(),
        }
    }
}

impl SweepAxis {
    /// Default tolerance: on the last difference of a ladder, or on the
    /// deviation of the log-log slope from 1 for a perturbation sweep.
    pub fn default_tol(self) -> f64 {
        match self {
            SweepAxis::NLadder => 1e-3,
            SweepAxis::EpsLadder => 1e-2,
            SweepAxis::ContractionDelta => 0.15,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps-ladder" | "eps" => Ok(SweepAxis::EpsLadder),
            "n-ladder" | "n" => Ok(SweepAxis::NLadder),
            "contraction-delta" | "contraction" => Ok(SweepAxis::ContractionDelta),
            _ => Err(Error::config(format!(
                "unknown sweep axis `{s}` (expected eps-ladder, n-ladder or contraction-delta)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SweepResult {
    Ladder(ConvergenceReport),
    Contraction(ContractionSweep),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub tool: String,
    pub version: String,
    pub axis: SweepAxis,
    pub config: ScenarioConfig,
    pub result: SweepResult,
    pub certificates: Vec<Certificate>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }
}

/// Runs the members of a sweep in parallel. `tol` bounds the last
/// difference of a ladder, or `|slope - 1|` for a perturbation sweep.
pub fn sweep(cfg: &ScenarioConfig, base_dir: &Path, axis: SweepAxis, values: &[f64], tol: f64) -> Result<SweepReport> {
    let schedule = cfg.integrator;
    let (result, certificates) = match axis {
        SweepAxis::NLadder => {
            let levels = values
                .iter()
                .map(|v| {
                    if *v >= 1.0 && v.fract() == 0.0 {
                        Ok(*v as usize)
                    } else {
                        Err(Error::config(format!("n-ladder levels must be positive integers, got {v}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let build = |n: usize| {
                let mut c = cfg.clone();
                c.domain.n = n;
                c.domain.m = None;
                prepare(&c, base_dir)
            };
            let r = galerkin_convergence(&levels, build, &schedule)?;
            let certs = vec![
                Certificate::new("decreasing", r.strictly_decreasing(0.0), format!("differences {:?}", r.differences)),
                Certificate::new(
                    "final-difference",
                    r.final_difference() <= tol,
                    format!("{:.6e} <= {tol:e}", r.final_difference()),
                ),
            ];
            (SweepResult::Ladder(r), certs)
        }
        SweepAxis::EpsLadder => {
            let build = |eps: f64| {
                let mut c = cfg.clone();
                c.regularization.eps = eps;
                prepare(&c, base_dir)
            };
            let r = yosida_convergence(values, build, &schedule)?;
            let certs = vec![
                Certificate::new("overshoot-decreasing", r.overshoot_decreasing(), format!("overshoot {:?}", r.overshoot)),
                Certificate::new(
                    "cauchy",
                    r.is_cauchy(tol),
                    format!("differences {:?}, tolerance {tol:e}", r.differences),
                ),
            ];
            (SweepResult::Ladder(r), certs)
        }
        SweepAxis::ContractionDelta => {
            let (params, data) = prepare(cfg, base_dir)?;
            if params.basis.num_modes() < 2 {
                return Err(Error::config("contraction sweep needs at least two modes"));
            }
            let mut unit = vec![0.0; params.basis.num_modes()];
            unit[1] = 1.0;
            let direction = params.basis.from_h_coeffs(&unit);
            let s = contraction_sweep(&params, &data, &direction, values, &schedule)?;
            let c = s.c_obs();
            let bounded = c.iter().all(|x| x.is_finite() && *x > 0.0);
            let certs = vec![
                Certificate::new(
                    "linear-scaling",
                    (s.slope - 1.0).abs() <= tol,
                    format!("log-log slope {:.6}", s.slope),
                ),
                Certificate::new(
                    "bounded-constant",
                    bounded,
                    format!("C_obs {c:?}; formula C4 = {:.6e}", s.reports.first().map(|r| r.constants.c4).unwrap_or(f64::NAN)),
                ),
            ];
            (SweepResult::Contraction(s), certs)
        }
    };
    Ok(SweepReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        axis,
        config: cfg.clone(),
        result,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    #[test]
    fn heat_decay_is_certified() {
        let out = run(&scenarios::get("heat_decay").unwrap(), Path::new(".")).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.failures());
        assert!(out.report.certificates.iter().any(|c| c.name == "decay"));
    }

    #[test]
    fn zero_scenario_stays_zero() {
        let out = run(&scenarios::get("zero").unwrap(), Path::new(".")).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.failures());
        assert_eq!(out.report.summary.final_phi_h, 0.0);
    }

    #[test]
    fn config_echo_round_trips_through_json() {
        let cfg = scenarios::get("stefan_random").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn random_fields_use_distinct_streams() {
        let (_, d) = prepare(&scenarios::get("stefan_random").unwrap(), Path::new(".")).unwrap();
        assert_ne!(d.eta0, d.phi0);
    }

    #[test]
    fn sweep_axis_parses() {
        assert_eq!("n-ladder".parse::<SweepAxis>().unwrap(), SweepAxis::NLadder);
        assert!("bogus".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn graph_free_eps_ladder_is_flat() {
        let mut cfg = scenarios::get("heat_decay").unwrap();
        cfg.integrator.samples = 5;
        let r = sweep(&cfg, Path::new("."), SweepAxis::EpsLadder, &[0.1, 0.01], 1e-12).unwrap();
        assert!(r.passed());
        match r.result {
            SweepResult::Ladder(l) => assert_eq!(l.differences, vec![0.0]),
            _ => unreachable!(),
        }
    }
}
