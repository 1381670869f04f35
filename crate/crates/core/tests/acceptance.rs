//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles live here and only use the public API for the values
//! under test.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phasefield::config::ScenarioConfig;
use phasefield::dynamics::{solve, InitialData, Method, ModelParams, Schedule, SolutionTrajectory};
use phasefield::estimates::{contraction_check, energy_monitor, fit_slope};
use phasefield::monotone::{MonotoneGraph, ScalarGraph};
use phasefield::output::{energy_csv, to_json, trajectory_csv};
use phasefield::potentials::ConvexPart;
use phasefield::runner::{self, SweepAxis, SweepResult};
use phasefield::selftest::graph_selftest;
use phasefield::{scenarios, Result};

const HERE: &str = ".";

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn sci(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "))
}

fn prepare(cfg: &ScenarioConfig) -> Result<(ModelParams, InitialData)> {
    runner::prepare(cfg, Path::new(HERE))
}

// ---------------------------------------------------------------- oracles

/// Bisection for `x ∈ u + εA(u)` using nothing but the value sets.
fn oracle_resolvent(g: &ScalarGraph, eps: f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (x.min(0.0), x.max(0.0));
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match g.values(mid) {
            Some((a, _)) if mid + eps * a > x => hi = mid,
            Some((_, b)) if mid + eps * b < x => lo = mid,
            Some(_) => return mid,
            // outside the domain the graph is at ±∞
            None if mid > 0.0 => hi = mid,
            None => lo = mid,
        }
    }
    for c in [lo, hi] {
        if let Some((a, b)) = g.values(c) {
            if c + eps * a <= x && x <= c + eps * b {
                return c;
            }
        }
    }
    0.5 * (lo + hi)
}

/// `u(x) = Σ c_i e_i(x)` with the `H`-orthonormal Neumann cosines on `[0, L]`.
fn cosine_series(c: &[f64], length: f64, x: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(i, ci)| {
            let norm = if i == 0 { (1.0 / length).sqrt() } else { (2.0 / length).sqrt() };
            ci * norm * (i as f64 * PI * x / length).cos()
        })
        .sum()
}

/// `max_t ‖u - w‖_{L²}` evaluated by a fine midpoint rule, independently of
/// the spectral machinery.
fn l2_distance_series(a: &SolutionTrajectory, b: &SolutionTrajectory, length: f64) -> f64 {
    let m = 4000;
    let h = length / m as f64;
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(sa, sb)| {
            let mut de = 0.0;
            let mut dp = 0.0;
            for j in 0..m {
                let x = (j as f64 + 0.5) * h;
                de += (cosine_series(&sa.eta, length, x) - cosine_series(&sb.eta, length, x)).powi(2) * h;
                dp += (cosine_series(&sa.phi, length, x) - cosine_series(&sb.phi, length, x)).powi(2) * h;
            }
            de.sqrt() + dp.sqrt()
        })
        .fold(0.0, f64::max)
}

// --------------------------------------------------------------- criteria

fn resolvent_oracle() -> Result<Verdict> {
    let graphs = [
        ScalarGraph::Sign,
        ScalarGraph::Stefan { low_slope: 0.5, high_slope: 2.0 },
        ScalarGraph::Power { q: 0.5, weight: 1.5 },
        ScalarGraph::Subdiff(ConvexPart::Quartic),
        ScalarGraph::Subdiff(ConvexPart::Logarithmic),
        ScalarGraph::Subdiff(ConvexPart::Indicator),
        ScalarGraph::Zero,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for g in &graphs {
        for eps in [1e-6, 1e-3, 1e-1, 1.0] {
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(-4.0..=4.0);
                let j = g.resolvent(eps, x)?;
                worst = worst.max((j - oracle_resolvent(g, eps, x)).abs() / (1.0 + x.abs()));
            }
        }
    }
    let suite = graph_selftest(7);
    let failures: Vec<String> = suite.failures().iter().map(|r| format!("{}/{}", r.subject, r.property)).collect();
    Ok(verdict(
        worst <= 1e-10 && failures.is_empty(),
        format!(
            "max |J - bisection| = {worst:.2e} (tol 1e-10) over {} graphs; Yosida property table {}/{} rows pass{}",
            graphs.len(),
            suite.rows.len() - failures.len(),
            suite.rows.len(),
            if failures.is_empty() { String::new() } else { format!(", failing {failures:?}") }
        ),
    ))
}

fn growth_bound() -> Result<Verdict> {
    let (a1, a2) = (0.5, 2.0);
    let g = ScalarGraph::Stefan { low_slope: a1, high_slope: a2 };
    let c = f64::max(a1, a2);
    let mut worst_pointwise = f64::NEG_INFINITY;
    for i in 0..=200_000 {
        let r = -50.0 + 5e-4 * i as f64;
        if let Some((lo, hi)) = g.values(r) {
            worst_pointwise = worst_pointwise.max(lo.abs().max(hi.abs()) - c * (1.0 + r.abs()));
        }
    }
    let mut worst_ratio = 0.0f64;
    let mut names = scenarios::NONLINEAR.to_vec();
    names.push("stefan_random");
    for name in &names {
        let cfg = scenarios::get(name)?;
        let (p, d) = prepare(&cfg)?;
        let sol = solve(&p, &d, &cfg.integrator)?;
        let growth = match p.graph {
            MonotoneGraph::ScalarSign | MonotoneGraph::NonlocalSign => 1.0,
            MonotoneGraph::Stefan { alpha1, alpha2 } => alpha1.max(alpha2),
            _ => unreachable!("{name} uses an unexpected graph"),
        };
        let c_h = growth * p.basis.measure().sqrt().max(1.0);
        for s in &sol.samples {
            worst_ratio = worst_ratio.max(p.basis.h_norm(&s.zeta) / (c_h * (1.0 + p.basis.h_norm(&s.eta))));
        }
    }
    Ok(verdict(
        worst_pointwise <= 0.0 && worst_ratio <= 1.0 + 1e-12,
        format!(
            "stefan max(|v| - C(1+|r|)) = {worst_pointwise:.2e}; max |zeta|/(C(1+|eta|)) = {worst_ratio:.6} over {} trajectories",
            names.len()
        ),
    ))
}

fn heat_oracle() -> Result<Verdict> {
    let cfg = scenarios::get("heat_decay")?;
    let (p, d) = prepare(&cfg)?;
    let length = cfg.domain.lengths[0];
    let lambda = (PI / length).powi(2);
    let exact = (-p.k * lambda * p.t_final).exp();
    let sched = Schedule { method: Method::Rk45, tol: 1e-8, ..cfg.integrator };
    let sol = solve(&p, &d, &sched)?;
    let ratio = sol.last().eta[1] / sol.samples[0].eta[1];
    let rk45_err = (ratio - exact).abs();

    let dts = [0.02, 0.01, 0.005, 0.0025];
    let mut errs = Vec::new();
    for dt in dts {
        let s = solve(&p, &d, &Schedule { method: Method::Imex, dt, samples: 1, ..cfg.integrator })?;
        errs.push((s.last().eta[1] / s.samples[0].eta[1] - exact).abs());
    }
    let order = fit_slope(&dts.map(f64::ln), &errs.iter().map(|e| e.ln()).collect::<Vec<_>>());
    let o_dt = errs.iter().zip(dts).all(|(e, dt)| *e <= dt);
    Ok(verdict(
        rk45_err <= 1e-4 && (order - 1.0).abs() <= 0.2 && o_dt,
        format!("rk45 |b(T)/b(0) - e^-1| = {rk45_err:.2e} (tol 1e-4); imex errors {}, order {order:.3}", sci(&errs)),
    ))
}

fn energy_estimate() -> Result<Verdict> {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in scenarios::NONLINEAR {
        let cfg = scenarios::get(name)?;
        let (p, d) = prepare(&cfg)?;
        let sol = solve(&p, &d, &cfg.integrator)?;
        let r = energy_monitor(&sol, &p, &d)?;
        // recompute ∫A_ε(η)η at every sample from the stored coefficients
        let min_zeta_eta = sol.samples.iter().map(|s| p.basis.inner(&s.zeta, &s.eta)).fold(f64::INFINITY, f64::min);
        let pass = r.bound_holds() && r.dissipation_holds(1e-9) && min_zeta_eta >= -1e-9;
        ok &= pass;
        lines.push(format!(
            "{name}: E1/bound <= {:.3}, min dissipation {:.1e}",
            r.bound_ratio(),
            min_zeta_eta.min(r.min_xi_pair).min(r.min_zeta_pair)
        ));
    }
    Ok(verdict(ok, lines.join("; ")))
}

fn galerkin_ladder() -> Result<Verdict> {
    let cfg = scenarios::get("tanh_front")?;
    let report = runner::sweep(&cfg, Path::new(HERE), SweepAxis::NLadder, &[8.0, 16.0, 32.0, 64.0], 1e-3)?;
    let SweepResult::Ladder(r) = &report.result else { unreachable!() };
    // the finest difference once more, from the cosine series on a fine grid
    let run = |n: usize| -> Result<SolutionTrajectory> {
        let mut c = cfg.clone();
        c.domain.n = n;
        let (p, d) = prepare(&c)?;
        solve(&p, &d, &c.integrator)
    };
    let independent = l2_distance_series(&run(32)?, &run(64)?, cfg.domain.lengths[0]);
    let agree = (independent - r.final_difference()).abs() <= 1e-6 * (1.0 + independent);
    Ok(verdict(
        r.strictly_decreasing(0.0) && r.final_difference() <= 1e-3 && agree,
        format!(
            "differences {} (final tol 1e-3); series check of the last one {independent:.6e}",
            sci(&r.differences)
        ),
    ))
}

fn yosida_ladder() -> Result<Verdict> {
    let cfg = scenarios::get("obstacle_sign")?;
    let tol = 1e-2;
    let report = runner::sweep(&cfg, Path::new(HERE), SweepAxis::EpsLadder, &[1e-1, 1e-2, 1e-3, 1e-4], tol)?;
    let SweepResult::Ladder(r) = &report.result else { unreachable!() };
    let strictly = r.overshoot.windows(2).all(|w| w[1] < w[0]) && r.overshoot[0] > 0.0;
    Ok(verdict(
        strictly && r.is_cauchy(tol),
        format!("overshoot {}; differences {} (final tol {tol:e})", sci(&r.overshoot), sci(&r.differences)),
    ))
}

fn continuous_dependence() -> Result<Verdict> {
    let cfg = scenarios::get("contraction")?;
    let (p, d) = prepare(&cfg)?;
    let a = solve(&p, &d, &cfg.integrator)?;
    let b = solve(&p, &d, &cfg.integrator)?;
    let bitwise = a.samples.iter().zip(&b.samples).all(|(x, y)| {
        x.t.to_bits() == y.t.to_bits()
            && x.eta.iter().zip(&y.eta).chain(x.phi.iter().zip(&y.phi)).all(|(u, v)| u.to_bits() == v.to_bits())
    });
    let same = contraction_check(&p, &d, &p, &d, &cfg.integrator)?;
    let report = runner::sweep(&cfg, Path::new(HERE), SweepAxis::ContractionDelta, &SweepAxis::ContractionDelta.default_values(), 0.15)?;
    let SweepResult::Contraction(s) = &report.result else { unreachable!() };
    // slope from the raw differences, fitted here
    let xs: Vec<f64> = s.deltas.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = s.reports.iter().map(|r| r.solution.total().ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let c = s.c_obs();
    let bounded = c.iter().all(|x| x.is_finite() && *x > 0.0) && s.c_obs_spread < 2.0;
    let c4 = s.reports[0].constants.c4;
    Ok(verdict(
        bitwise && same.identical && (slope - 1.0).abs() <= 0.15 && bounded,
        format!("bitwise {bitwise}; slope {slope:.4}; C_obs {c:.4?}; formula C4 = {c4:.3e} (ordering not asserted)"),
    ))
}

fn reproducibility() -> Result<Verdict> {
    let mut checked = 0;
    for name in scenarios::list() {
        let cfg = scenarios::get(name)?;
        let render = || -> Result<String> {
            let o = runner::run(&cfg, Path::new(HERE))?;
            Ok(trajectory_csv(&o)? + &energy_csv(&o)? + &to_json(&o.report)?)
        };
        if render()? != render()? {
            return Ok(verdict(false, format!("{name} differs between runs")));
        }
        checked += 1;
    }
    // a parallel sweep must not depend on the thread count
    let cfg = scenarios::get("tanh_front")?;
    let sweep_json = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| to_json(&runner::sweep(&cfg, Path::new(HERE), SweepAxis::NLadder, &[8.0, 16.0, 32.0], 1e-3)?))
    };
    let parallel_ok = sweep_json(1)? == sweep_json(4)?;
    Ok(verdict(
        parallel_ok,
        format!("{checked} scenarios rendered twice identically; sweep output identical on 1 and 4 threads: {parallel_ok}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Verdict>); 8] = [
        ("resolvent and Yosida oracle equivalence", resolvent_oracle),
        ("growth bound", growth_bound),
        ("exact linear decay and IMEX order", heat_oracle),
        ("energy estimate", energy_estimate),
        ("Galerkin convergence", galerkin_ladder),
        ("Yosida convergence", yosida_ladder),
        ("continuous dependence", continuous_dependence),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        failed += usize::from(!v.passed);
        println!("{} [{}] {name}: {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
