use rayon::prelude::*;
use serde::Serialize;

use super::fit_slope;
use crate::dynamics::{solve, InitialData, ModelParams, Schedule, SolutionTrajectory};
use crate::error::{Error, Result};

/// Differences between consecutive members of a refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `"n"` or `"eps"`.
    pub axis: String,
    pub levels: Vec<f64>,
    /// `differences[i]` compares `levels[i]` with `levels[i + 1]` in
    /// `C⁰([0,T]; H)` (maximum over samples of `‖Δη‖ + ‖Δφ‖`).
    pub differences: Vec<f64>,
    /// `log(d_i / d_{i+1}) / log 2` for consecutive differences.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log d` against `log level`.
    pub fitted_slope: f64,
    /// `max_t max_x (|φ| - 1)₊` per level.
    pub overshoot: Vec<f64>,
    /// `max_t sup|ζ|` per level.
    pub zeta_sup: Vec<f64>,
}

impl ConvergenceReport {
    /// Consecutive differences decrease strictly, or all vanish below `floor`.
    pub fn strictly_decreasing(&self, floor: f64) -> bool {
        self.differences.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) <= floor)
    }

    pub fn final_difference(&self) -> f64 {
        self.differences.last().copied().unwrap_or(0.0)
    }

    /// Cauchy along the ladder: decreasing differences with the last one at
    /// most `tol`.
    pub fn is_cauchy(&self, tol: f64) -> bool {
        self.strictly_decreasing(tol) && self.final_difference() <= tol
    }

    pub fn overshoot_decreasing(&self) -> bool {
        self.overshoot.windows(2).all(|w| w[1] <= w[0])
    }
}

fn overshoot(params: &ModelParams, sol: &SolutionTrajectory) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in &sol.samples {
        for x in params.basis.to_grid(&s.phi)? {
            worst = worst.max(x.abs() - 1.0);
        }
    }
    Ok(worst)
}

/// `max_t (‖Δη‖_H + ‖Δφ‖_H)` with the coarse member embedded in the fine
/// basis.
pub fn trajectory_distance(coarse: (&ModelParams, &SolutionTrajectory), fine: (&ModelParams, &SolutionTrajectory)) -> Result<f64> {
    let (pc, sc) = coarse;
    let (pf, sf) = fine;
    if sc.samples.len() != sf.samples.len() {
        return Err(Error::SizeMismatch { expected: sf.samples.len(), got: sc.samples.len() });
    }
    let b = &pf.basis;
    let mut worst = 0.0f64;
    for (a, c) in sc.samples.iter().zip(&sf.samples) {
        let e = b.embed(&pc.basis, &a.eta)?;
        let p = b.embed(&pc.basis, &a.phi)?;
        let de: Vec<f64> = e.iter().zip(&c.eta).map(|(x, y)| x - y).collect();
        let dp: Vec<f64> = p.iter().zip(&c.phi).map(|(x, y)| x - y).collect();
        worst = worst.max(b.h_norm(&de) + b.h_norm(&dp));
    }
    Ok(worst)
}

fn ladder<T: Copy + Send + Sync + std::fmt::Display>(
    axis: &str,
    levels: &[T],
    as_f64: impl Fn(T) -> f64,
    build: impl Fn(T) -> Result<(ModelParams, InitialData)> + Sync,
    schedule: impl Fn(&ModelParams) -> Schedule + Sync,
) -> Result<ConvergenceReport> {
    if levels.len() < 2 {
        return Err(Error::invalid("a ladder needs at least two levels"));
    }
    let runs = levels
        .par_iter()
        .map(|&level| {
            let member = |e: Error| Error::Member { label: format!("{axis} = {level}"), source: Box::new(e) };
            let (p, d) = build(level).map_err(member)?;
            let sol = solve(&p, &d, &schedule(&p)).map_err(member)?;
            Ok((p, sol))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut differences = Vec::with_capacity(levels.len() - 1);
    for w in runs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        // embed into whichever basis is larger
        let d = if a.0.basis.num_modes() <= b.0.basis.num_modes() {
            trajectory_distance((&a.0, &a.1), (&b.0, &b.1))?
        } else {
            trajectory_distance((&b.0, &b.1), (&a.0, &a.1))?
        };
        differences.push(d);
    }
    let ratios = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let xs: Vec<f64> = levels[..levels.len() - 1].iter().map(|l| as_f64(*l).ln()).collect();
    let ys: Vec<f64> = differences.iter().map(|d| d.ln()).collect();
    let overshoot = runs.iter().map(|(p, s)| overshoot(p, s)).collect::<Result<Vec<_>>>()?;
    let zeta_sup = runs
        .iter()
        .map(|(_, s)| s.samples.iter().map(|x| x.zeta_sup).fold(0.0, f64::max))
        .collect();
    Ok(ConvergenceReport {
        axis: axis.into(),
        levels: levels.iter().map(|l| as_f64(*l)).collect(),
        differences,
        ratios,
        fitted_slope: fit_slope(&xs, &ys),
        overshoot,
        zeta_sup,
    })
}

/// Runs the model for each mode count in `levels` (strictly increasing) at
/// fixed `ε`.
pub fn galerkin_convergence(
    levels: &[usize],
    build: impl Fn(usize) -> Result<(ModelParams, InitialData)> + Sync,
    schedule: &Schedule,
) -> Result<ConvergenceReport> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n-ladder must be strictly increasing"));
    }
    ladder("n", levels, |n| n as f64, build, |_| *schedule)
}

/// Runs the model for each `ε` in `levels` (strictly decreasing) at fixed
/// `n`. All members share the step size `min(dt, ε_min/2)` so the explicit
/// treatment of `β_ε` stays stable for the smallest `ε`.
pub fn yosida_convergence(
    levels: &[f64],
    build: impl Fn(f64) -> Result<(ModelParams, InitialData)> + Sync,
    schedule: &Schedule,
) -> Result<ConvergenceReport> {
    if levels.windows(2).any(|w| !(w[1] < w[0])) || levels.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::invalid("eps-ladder must be positive and strictly decreasing"));
    }
    let eps_min = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    let shared = Schedule { dt: schedule.dt.min(0.5 * eps_min), ..*schedule };
    ladder("eps", levels, |e| e, build, |_| shared)
}
