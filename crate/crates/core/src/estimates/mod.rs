//! Runtime monitors for the a priori estimates, the continuous-dependence
//! inequality and the refinement studies in `n` and `ε`.

mod contraction;
mod convergence;
mod energy;

pub use contraction::{
    compare, contraction_check, contraction_sweep, ContractionConstants, ContractionReport, ContractionSweep,
    DataDifference, SolutionDifference,
};
pub use convergence::{galerkin_convergence, trajectory_distance, yosida_convergence, ConvergenceReport};
pub use energy::{energy_monitor, EnergyComponents, EnergyConstants, EnergyReport};

/// Running trapezoid integral of `values` over the (possibly uneven) `times`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Least-squares slope of `ys` against `xs`; non-finite pairs are skipped.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(x, y)| (*x, *y)).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
