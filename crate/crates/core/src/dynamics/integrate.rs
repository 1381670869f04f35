use serde::{Deserialize, Serialize};

use super::{explicit_part, linear_block, rhs, GalerkinState, ModelParams};
use crate::error::{Error, Result};

/// Time integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Linear block implicit, graph terms and forcing explicit. First order.
    #[default]
    Imex,
    /// Classical fourth-order Runge–Kutta.
    Rk4,
    /// Dormand–Prince 5(4) with adaptive step size.
    Rk45,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "imex" | "imex-euler" => Ok(Method::Imex),
            "rk4" => Ok(Method::Rk4),
            "rk45" | "dopri5" => Ok(Method::Rk45),
            other => Err(Error::invalid(format!("unknown method `{other}` (expected imex, rk4 or rk45)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Imex => "imex",
            Method::Rk4 => "rk4",
            Method::Rk45 => "rk45",
        })
    }
}

/// Advances `state` by one step of size `dt`. For `Rk45` this is a single
/// fifth-order Dormand–Prince step without step-size control.
pub fn step(params: &ModelParams, state: &GalerkinState, dt: f64, method: Method) -> Result<GalerkinState> {
    match method {
        Method::Imex => imex(params, state, dt),
        Method::Rk4 => rk4(params, state, dt),
        Method::Rk45 => Ok(dopri(params, state, dt)?.0),
    }
}

fn imex(params: &ModelParams, s: &GalerkinState, dt: f64) -> Result<GalerkinState> {
    let n = explicit_part(params, s.t, &s.theta, &s.phi)?;
    let lam = params.basis.eigenvalues();
    let mut theta = vec![0.0; s.theta.len()];
    let mut phi = vec![0.0; s.phi.len()];
    for i in 0..theta.len() {
        let l = linear_block(params, lam[i]);
        // (I - dt L) u = u + dt N
        let a = 1.0 - dt * l[0][0];
        let b = -dt * l[0][1];
        let c = -dt * l[1][0];
        let d = 1.0 - dt * l[1][1];
        let r0 = s.theta[i] + dt * n.dtheta[i];
        let r1 = s.phi[i] + dt * n.dphi[i];
        let det = a * d - b * c;
        theta[i] = (d * r0 - b * r1) / det;
        phi[i] = (a * r1 - c * r0) / det;
    }
    Ok(GalerkinState { t: s.t + dt, theta, phi })
}

fn axpy(base: &[f64], terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = base.to_vec();
    for (w, v) in terms {
        if *w != 0.0 {
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o += w * x;
            }
        }
    }
    out
}

fn rk4(params: &ModelParams, s: &GalerkinState, dt: f64) -> Result<GalerkinState> {
    let k1 = rhs(params, s.t, &s.theta, &s.phi)?;
    let th = axpy(&s.theta, &[(0.5 * dt, &k1.dtheta)]);
    let ph = axpy(&s.phi, &[(0.5 * dt, &k1.dphi)]);
    let k2 = rhs(params, s.t + 0.5 * dt, &th, &ph)?;
    let th = axpy(&s.theta, &[(0.5 * dt, &k2.dtheta)]);
    let ph = axpy(&s.phi, &[(0.5 * dt, &k2.dphi)]);
    let k3 = rhs(params, s.t + 0.5 * dt, &th, &ph)?;
    let th = axpy(&s.theta, &[(dt, &k3.dtheta)]);
    let ph = axpy(&s.phi, &[(dt, &k3.dphi)]);
    let k4 = rhs(params, s.t + dt, &th, &ph)?;
    let w = dt / 6.0;
    Ok(GalerkinState {
        t: s.t + dt,
        theta: axpy(&s.theta, &[(w, &k1.dtheta), (2.0 * w, &k2.dtheta), (2.0 * w, &k3.dtheta), (w, &k4.dtheta)]),
        phi: axpy(&s.phi, &[(w, &k1.dphi), (2.0 * w, &k2.dphi), (2.0 * w, &k3.dphi), (w, &k4.dphi)]),
    })
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step. Returns the fifth-order state and the
/// difference to the embedded fourth-order solution.
pub(crate) fn dopri(params: &ModelParams, s: &GalerkinState, dt: f64) -> Result<(GalerkinState, Vec<f64>)> {
    let mut kt: Vec<Vec<f64>> = Vec::with_capacity(7);
    let mut kp: Vec<Vec<f64>> = Vec::with_capacity(7);
    for stage in 0..7 {
        let mut th = s.theta.clone();
        let mut ph = s.phi.clone();
        for j in 0..stage {
            let a = DP_A[stage][j] * dt;
            if a != 0.0 {
                for i in 0..th.len() {
                    th[i] += a * kt[j][i];
                    ph[i] += a * kp[j][i];
                }
            }
        }
        let d = rhs(params, s.t + DP_C[stage] * dt, &th, &ph)?;
        kt.push(d.dtheta);
        kp.push(d.dphi);
    }
    let n = s.theta.len();
    let mut theta = s.theta.clone();
    let mut phi = s.phi.clone();
    let mut err = vec![0.0; 2 * n];
    for stage in 0..7 {
        let b5 = DP_B5[stage] * dt;
        let e = (DP_B5[stage] - DP_B4[stage]) * dt;
        for i in 0..n {
            theta[i] += b5 * kt[stage][i];
            phi[i] += b5 * kp[stage][i];
            err[i] += e * kt[stage][i];
            err[n + i] += e * kp[stage][i];
        }
    }
    Ok((GalerkinState { t: s.t + dt, theta, phi }, err))
}
