use serde::{Deserialize, Serialize};

use super::integrate::dopri;
use super::{rhs, selections, step, GalerkinState, InitialData, Method, ModelParams};
use crate::error::{Error, Result};

/// Time stepping and output controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    pub method: Method,
    /// Step size for the fixed-step methods, initial step for `rk45`.
    pub dt: f64,
    /// Relative and absolute tolerance of `rk45`.
    pub tol: f64,
    /// Number of output intervals on `[0, T]`.
    pub samples: usize,
    /// Blow-up ceiling on `‖(θ, φ)‖_H`.
    pub max_norm: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            method: Method::Imex,
            dt: 1e-3,
            tol: 1e-8,
            samples: 50,
            max_norm: 1e8,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if !(self.max_norm > 0.0) {
            return Err(Error::invalid("max_norm must be positive"));
        }
        Ok(())
    }
}

/// One stored time slice of the trajectory. All vectors are Galerkin
/// coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub phi: Vec<f64>,
    pub eta: Vec<f64>,
    pub dphi: Vec<f64>,
    pub deta: Vec<f64>,
    /// Projected selection `A_ε(η)`.
    pub zeta: Vec<f64>,
    /// Projected selection `β_ε(φ)`.
    pub xi: Vec<f64>,
    pub zeta_norm: f64,
    pub zeta_sup: f64,
    pub zeta_eta: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub steps: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionTrajectory {
    pub method: Method,
    pub samples: Vec<Sample>,
    pub stats: SolveStats,
}

impl SolutionTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }
}

const MAX_STEPS: usize = 5_000_000;

fn sample(params: &ModelParams, state: &GalerkinState) -> Result<Sample> {
    let eta = state.eta(params);
    let sel = selections(params, &eta, &state.phi)?;
    let d = rhs(params, state.t, &state.theta, &state.phi)?;
    Ok(Sample {
        t: state.t,
        deta: d.deta(params),
        dphi: d.dphi,
        phi: state.phi.clone(),
        eta,
        zeta: sel.zeta,
        xi: sel.xi,
        zeta_norm: sel.zeta_norm,
        zeta_sup: sel.zeta_sup,
        zeta_eta: sel.zeta_eta,
    })
}

fn check_bounded(params: &ModelParams, state: &GalerkinState, max_norm: f64) -> Result<()> {
    let b = &params.basis;
    let norm = (b.inner(&state.theta, &state.theta) + b.inner(&state.phi, &state.phi)).sqrt();
    if !norm.is_finite() || norm > max_norm {
        return Err(Error::BlowUp { t: state.t, norm });
    }
    Ok(())
}

fn blow_up_on_nan(t: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonFinite(_) => Error::BlowUp { t, norm: f64::NAN },
        other => other,
    }
}

/// Integrates the Galerkin system on `[0, T]` and stores `samples + 1`
/// equally spaced time slices.
pub fn solve(params: &ModelParams, data: &InitialData, schedule: &Schedule) -> Result<SolutionTrajectory> {
    params.validate()?;
    schedule.validate()?;
    let modes = params.basis.num_modes();
    for v in [&data.eta0, &data.phi0] {
        if v.len() != modes {
            return Err(Error::SizeMismatch { expected: modes, got: v.len() });
        }
    }
    let mut state = GalerkinState::initial(params, data);
    let mut out = vec![sample(params, &state)?];
    let mut stats = SolveStats::default();
    let interval = params.t_final / schedule.samples as f64;
    let mut h_next = schedule.dt.min(interval);
    for k in 0..schedule.samples {
        let target = params.t_final * (k + 1) as f64 / schedule.samples as f64;
        match schedule.method {
            Method::Imex | Method::Rk4 => {
                let span = target - state.t;
                let n = ((span / schedule.dt) - 1e-9).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for _ in 0..n {
                    state = step(params, &state, h, schedule.method).map_err(blow_up_on_nan(state.t))?;
                    stats.steps += 1;
                    check_bounded(params, &state, schedule.max_norm)?;
                }
            }
            Method::Rk45 => {
                while target - state.t > 1e-13 * params.t_final {
                    if stats.steps + stats.rejected > MAX_STEPS || h_next < 1e-14 * params.t_final {
                        return Err(Error::StepRejection { t: state.t });
                    }
                    let h = h_next.min(target - state.t);
                    let (trial, err) = dopri(params, &state, h).map_err(blow_up_on_nan(state.t))?;
                    let n = state.theta.len();
                    let mut acc = 0.0;
                    for i in 0..2 * n {
                        let (y0, y1) = if i < n {
                            (state.theta[i], trial.theta[i])
                        } else {
                            (state.phi[i - n], trial.phi[i - n])
                        };
                        let sc = schedule.tol * (1.0 + y0.abs().max(y1.abs()));
                        acc += (err[i] / sc).powi(2);
                    }
                    let e = (acc / (2 * n) as f64).sqrt();
                    let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    if e.is_finite() && e <= 1.0 {
                        state = trial;
                        stats.steps += 1;
                        check_bounded(params, &state, schedule.max_norm)?;
                        // a step shortened to hit the output time does not limit the next one
                        if h < h_next {
                            h_next = h_next.max(h * factor);
                        } else {
                            h_next = h * factor;
                        }
                    } else {
                        stats.rejected += 1;
                        h_next = h * if e.is_finite() { factor.min(0.9) } else { 0.2 };
                    }
                }
            }
        }
        state.t = target;
        out.push(sample(params, &state)?);
    }
    Ok(SolutionTrajectory {
        method: schedule.method,
        samples: out,
        stats,
    })
}
