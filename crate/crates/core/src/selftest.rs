//! Property suite for the built-in graphs and potentials.
//!
//! Every resolvent is compared with a bisection oracle that only uses the
//! value sets `A(x)`, and the Yosida semigroup identity is checked by
//! bisection on the regularized map itself, so no check relies on the
//! closed forms it is testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::monotone::{nonlocal_sign_resolvent, yosida_nonlocal_sign, Interval, ScalarGraph};
use crate::potentials::{ConvexPart, PotentialSpec};

/// Regularization parameters exercised by the suite.
pub const EPSILONS: [f64; 4] = [1e-6, 1e-3, 1e-1, 1.0];
/// Random points per graph and `ε`.
pub const POINTS: usize = 1000;
pub const RESOLVENT_TOL: f64 = 1e-10;
pub const SEMIGROUP_TOL: f64 = 1e-9;
const SAMPLE_RANGE: f64 = 4.0;

/// What the suite needs to know about a scalar graph.
pub trait GraphProbe: Sync {
    fn name(&self) -> String;
    /// `A(x)` as a closed interval, `None` outside the domain.
    fn values(&self, x: f64) -> Option<(f64, f64)>;
    fn domain(&self) -> Interval;
    fn resolvent(&self, eps: f64, x: f64) -> Result<f64>;
    fn yosida(&self, eps: f64, x: f64) -> Result<f64>;
    fn minimal_section(&self, x: f64) -> Result<f64>;
    fn growth_constant(&self) -> Option<f64>;
}

impl GraphProbe for ScalarGraph {
    fn name(&self) -> String {
        ScalarGraph::name(self)
    }
    fn values(&self, x: f64) -> Option<(f64, f64)> {
        ScalarGraph::values(self, x)
    }
    fn domain(&self) -> Interval {
        ScalarGraph::domain(self)
    }
    fn resolvent(&self, eps: f64, x: f64) -> Result<f64> {
        ScalarGraph::resolvent(self, eps, x)
    }
    fn yosida(&self, eps: f64, x: f64) -> Result<f64> {
        ScalarGraph::yosida(self, eps, x)
    }
    fn minimal_section(&self, x: f64) -> Result<f64> {
        ScalarGraph::minimal_section(self, x)
    }
    fn growth_constant(&self) -> Option<f64> {
        ScalarGraph::growth_constant(self)
    }
}

/// A decreasing "graph" `A(x) = -x/2`, used as a negative control: the
/// monotonicity and contraction checks must flag it.
#[derive(Debug, Clone, Copy)]
pub struct BrokenFixture;

impl GraphProbe for BrokenFixture {
    fn name(&self) -> String {
        "broken(-x/2)".into()
    }
    fn values(&self, x: f64) -> Option<(f64, f64)> {
        Some((-0.5 * x, -0.5 * x))
    }
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn resolvent(&self, eps: f64, x: f64) -> Result<f64> {
        Ok(x / (1.0 - 0.5 * eps))
    }
    fn yosida(&self, eps: f64, x: f64) -> Result<f64> {
        Ok((x - self.resolvent(eps, x)?) / eps)
    }
    fn minimal_section(&self, x: f64) -> Result<f64> {
        Ok(-0.5 * x)
    }
    fn growth_constant(&self) -> Option<f64> {
        Some(0.5)
    }
}

/// The scalar graphs shipped with the library.
pub fn builtin_graphs() -> Vec<ScalarGraph> {
    vec![
        ScalarGraph::Sign,
        ScalarGraph::Stefan { low_slope: 0.5, high_slope: 2.0 },
        ScalarGraph::Stefan { low_slope: 3.0, high_slope: 1.0 },
        ScalarGraph::Power { q: 0.5, weight: 1.5 },
        ScalarGraph::Subdiff(ConvexPart::Quartic),
        ScalarGraph::Subdiff(ConvexPart::Logarithmic),
        ScalarGraph::Subdiff(ConvexPart::Indicator),
        ScalarGraph::Zero,
    ]
}

/// One line of the pass/fail table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestRow {
    pub subject: String,
    pub property: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub passed: bool,
    /// Largest violation measure seen; what it measures depends on the property.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub rows: Vec<SelfTestRow>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&SelfTestRow> {
        self.rows.iter().filter(|r| !r.passed).collect()
    }

    /// Tab-separated table with a header line.
    pub fn table(&self) -> String {
        let mut s = String::from("subject\tproperty\teps\tresult\tworst\n");
        for r in &self.rows {
            let eps = r.eps.map(|e| format!("{e:e}")).unwrap_or_else(|| "-".into());
            let res = if r.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{}\t{}\t{eps}\t{res}\t{:.3e}\n", r.subject, r.property, r.worst));
        }
        s
    }
}

fn row(subject: &str, property: &str, eps: Option<f64>, worst: f64, passed: bool) -> SelfTestRow {
    SelfTestRow { subject: subject.into(), property: property.into(), eps, passed, worst }
}

/// Random points in `[-4, 4]` plus the kinks of the built-in graphs.
pub fn sample_points(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![0.0, 1.0, -1.0, 1e-12, -1e-12, 1.0 + 1e-9, 1.0 - 1e-9, -1.0 + 1e-9, -1.0 - 1e-9];
    pts.extend((0..count).map(|_| rng.gen_range(-SAMPLE_RANGE..=SAMPLE_RANGE)));
    pts
}

/// Solves `x ∈ u + εA(u)` by bisection on `[min(0, x), max(0, x)]`, which
/// holds the root whenever `0 ∈ A(0)`.
pub fn bisect_resolvent(graph: &dyn GraphProbe, eps: f64, x: f64) -> f64 {
    let dom = graph.domain();
    let (mut lo, mut hi) = (x.min(0.0).max(dom.lo), x.max(0.0).min(dom.hi));
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // Points beyond the domain behave like A = ±∞.
        let side = match graph.values(mid) {
            Some((a, b)) => {
                if mid + eps * a > x {
                    1
                } else if mid + eps * b < x {
                    -1
                } else {
                    0
                }
            }
            None if mid >= dom.hi => 1,
            None => -1,
        };
        match side {
            1 => hi = mid,
            -1 => lo = mid,
            _ => return mid,
        }
    }
    // Prefer an endpoint that lies in the graph when the bracket collapsed
    // onto a domain boundary.
    for c in [lo, hi] {
        if let Some((a, b)) = graph.values(c) {
            if c + eps * a <= x && x <= c + eps * b {
                return c;
            }
        }
    }
    0.5 * (lo + hi)
}

/// `(A_ε)_δ x` by bisection on `u + δA_ε(u) = x`.
fn bisect_double_yosida(graph: &dyn GraphProbe, eps: f64, delta: f64, x: f64) -> Result<f64> {
    let (mut lo, mut hi) = (x.min(0.0), x.max(0.0));
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + delta * graph.yosida(eps, mid)? > x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    Ok((x - u) / delta)
}

/// Distance of `(u, v)` from the graph: the vertical gap to `A(u)` or, when
/// smaller, the horizontal gap to `A⁻¹(v)`. Near a vertical asymptote the
/// exact `u` may not be representable, so only the horizontal gap is
/// meaningful there. `x` bounds the search for `A⁻¹(v)`.
fn graph_gap(graph: &dyn GraphProbe, u: f64, v: f64, x: f64) -> f64 {
    let vertical = match graph.values(u) {
        Some((lo, hi)) => (if v < lo { lo - v } else if v > hi { v - hi } else { 0.0 }) / (1.0 + v.abs()),
        None => f64::INFINITY,
    };
    if vertical <= 1e-12 {
        return vertical;
    }
    let dom = graph.domain();
    let reach = x.abs() + 1.0;
    let (mut lo, mut hi) = (dom.lo.max(-reach), dom.hi.min(reach));
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match graph.values(mid) {
            Some((a, _)) if a > v => hi = mid,
            Some((_, b)) if b < v => lo = mid,
            Some(_) => {
                lo = mid;
                hi = mid;
            }
            None if mid >= dom.hi => hi = mid,
            None => lo = mid,
        }
    }
    vertical.min((u - 0.5 * (lo + hi)).abs())
}

fn close(a: f64, b: f64, tol: f64) -> f64 {
    (a - b).abs() / (tol * (1.0 + a.abs().max(b.abs())))
}

/// Runs the scalar suite on one graph. Errors from the graph count as
/// failures of the property being checked.
pub fn probe_graph(graph: &dyn GraphProbe, seed: u64) -> Vec<SelfTestRow> {
    let name = graph.name();
    let pts = sample_points(seed, POINTS);
    let dom = graph.domain();
    let mut rows = Vec::new();

    // Monotonicity over all value-set endpoints of consecutive points.
    let mut worst = 0.0f64;
    for w in pts.windows(2) {
        if let (Some(a), Some(b)) = (graph.values(w[0]), graph.values(w[1])) {
            for va in [a.0, a.1] {
                for vb in [b.0, b.1] {
                    let p = (va - vb) * (w[0] - w[1]);
                    if p.is_finite() {
                        worst = worst.max(-p);
                    }
                }
            }
        }
    }
    rows.push(row(&name, "monotone", None, worst, worst <= 1e-12));

    // Linear growth |v| <= C(1 + |x|) on a dense grid.
    if let Some(c) = graph.growth_constant() {
        let mut worst = 0.0f64;
        for i in 0..=20_000 {
            let x = -10.0 + 1e-3 * i as f64;
            if let Some((a, b)) = graph.values(x) {
                worst = worst.max(a.abs().max(b.abs()) - c * (1.0 + x.abs()));
            }
        }
        rows.push(row(&name, "growth", None, worst, worst <= 1e-12));
    }

    for &eps in &EPSILONS {
        let mut oracle = 0.0f64;
        let mut contraction = 0.0f64;
        let mut lipschitz = 0.0f64;
        let mut section = 0.0f64;
        let mut inclusion = 0.0f64;
        let mut semigroup = 0.0f64;
        let mut failed = false;
        let mut prev: Option<(f64, f64, f64)> = None;
        let delta = 0.5 * eps;
        for &x in &pts {
            let (j, a) = match (graph.resolvent(eps, x), graph.yosida(eps, x)) {
                (Ok(j), Ok(a)) => (j, a),
                _ => {
                    failed = true;
                    continue;
                }
            };
            oracle = oracle.max((j - bisect_resolvent(graph, eps, x)).abs() / (1.0 + x.abs()));
            inclusion = inclusion.max(graph_gap(graph, j, a, x));
            // Rounding in (x - Jx)/ε is of order ulp(x)/ε.
            let rounding = 1e-14 * (1.0 + x.abs()) / eps;
            if dom.contains(x) {
                if let Ok(m) = graph.minimal_section(x) {
                    section = section.max(a.abs() - m.abs() * (1.0 + 1e-12) - rounding);
                }
            }
            match bisect_double_yosida(graph, eps, delta, x) {
                Ok(aa) => match graph.yosida(eps + delta, x) {
                    Ok(direct) => semigroup = semigroup.max(close(aa, direct, 1.0)),
                    Err(_) => failed = true,
                },
                Err(_) => failed = true,
            }
            if let Some((y, jy, ay)) = prev {
                let dx = (x - y).abs();
                contraction = contraction.max((j - jy).abs() - dx * (1.0 + 1e-12) - 1e-15);
                // Rounding in (x - Jx)/ε is of order ulp(x)/ε.
                let slack = 1e-14 * (x.abs() + y.abs() + 1.0) / eps;
                lipschitz = lipschitz.max(((a - ay).abs() - dx / eps - slack) / (dx / eps + slack));
            }
            prev = Some((x, j, a));
        }
        rows.push(row(&name, "resolvent-oracle", Some(eps), oracle, !failed && oracle <= RESOLVENT_TOL));
        rows.push(row(&name, "inclusion", Some(eps), inclusion, !failed && inclusion <= 1e-9));
        rows.push(row(&name, "contraction", Some(eps), contraction, !failed && contraction <= 0.0));
        rows.push(row(&name, "lipschitz", Some(eps), lipschitz, !failed && lipschitz <= 1e-9));
        rows.push(row(&name, "minimal-section-bound", Some(eps), section, !failed && section <= 0.0));
        rows.push(row(&name, "semigroup", Some(eps), semigroup, !failed && semigroup <= SEMIGROUP_TOL));
    }
    rows
}

/// The nonlocal `Sign` on random vectors of `R⁵` with the Euclidean norm.
pub fn probe_nonlocal_sign(seed: u64) -> Vec<SelfTestRow> {
    let name = "Sign";
    let dim = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vecs: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for _ in 0..POINTS {
        let scale = 10f64.powf(rng.gen_range(-7.0..=0.7));
        vecs.push((0..dim).map(|_| scale * rng.gen_range(-1.0..=1.0)).collect());
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut rows = Vec::new();
    for &eps in &EPSILONS {
        let mut oracle = 0.0f64;
        let mut contraction = 0.0f64;
        let mut lipschitz = 0.0f64;
        let mut monotone = 0.0f64;
        let mut section = 0.0f64;
        let mut semigroup = 0.0f64;
        let mut failed = false;
        let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;
        for v in &vecs {
            let Ok(j) = nonlocal_sign_resolvent(eps, v) else {
                failed = true;
                continue;
            };
            let a = yosida_nonlocal_sign(eps, v);
            let r = norm(v);
            // J_ε is radial; its length solves |v| ∈ ρ + ε·sign(ρ).
            let rho = bisect_resolvent(&ScalarGraph::Sign, eps, r);
            let expect: Vec<f64> = if r > 0.0 { v.iter().map(|x| x * rho / r).collect() } else { v.clone() };
            oracle = oracle.max(norm(&sub(&j, &expect)) / (1.0 + r));
            section = section.max(norm(&a) - if r > 0.0 { 1.0 } else { 0.0 });
            // (A_ε)_δ is radial with length s/δ, where s = r - ρ solves
            // s = δ·min((r - s)/ε, 1). Solving for s avoids the cancellation
            // in r - ρ.
            let delta = 0.5 * eps;
            let (mut lo, mut hi) = (0.0, r);
            for _ in 0..400 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if mid > delta * ((r - mid) / eps).min(1.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let twice = 0.5 * (lo + hi) / delta;
            semigroup = semigroup.max(close(twice, norm(&yosida_nonlocal_sign(eps + delta, v)), 1.0));
            if let Some((w, jw, aw)) = &prev {
                let d = norm(&sub(v, w));
                contraction = contraction.max(norm(&sub(&j, jw)) - d * (1.0 + 1e-12) - 1e-15);
                let slack = 1e-14 * (r + norm(w) + 1.0) / eps;
                lipschitz = lipschitz.max((norm(&sub(&a, aw)) - d / eps - slack) / (d / eps + slack));
                monotone = monotone.max(-dot(&sub(&a, aw), &sub(v, w)));
            }
            prev = Some((v.clone(), j, a));
        }
        rows.push(row(name, "resolvent-oracle", Some(eps), oracle, !failed && oracle <= RESOLVENT_TOL));
        rows.push(row(name, "contraction", Some(eps), contraction, !failed && contraction <= 0.0));
        rows.push(row(name, "lipschitz", Some(eps), lipschitz, !failed && lipschitz <= 1e-9));
        rows.push(row(name, "monotone", Some(eps), monotone, !failed && monotone <= 1e-12));
        rows.push(row(name, "minimal-section-bound", Some(eps), section, !failed && section <= 1e-12));
        rows.push(row(name, "semigroup", Some(eps), semigroup, !failed && semigroup <= SEMIGROUP_TOL));
    }
    rows
}

/// Envelope identities of the convex parts of the potentials.
pub fn probe_potential(potential: PotentialSpec, seed: u64) -> Vec<SelfTestRow> {
    let name = format!("potential:{}", potential.name());
    let convex = potential.convex_part();
    let pts = sample_points(seed, POINTS);
    let mut rows = Vec::new();
    for &eps in &EPSILONS {
        let mut below = 0.0f64;
        let mut subgradient = 0.0f64;
        let mut derivative = 0.0f64;
        let mut failed = false;
        let zero = potential.envelope(eps, 0.0).map(|v| v.abs()).unwrap_or(f64::INFINITY);
        let h = 1e-6 * eps.max(1e-3);
        for w in pts.windows(2) {
            let (r, s) = (w[0], w[1]);
            let (Ok(er), Ok(es), Ok(br)) = (potential.envelope(eps, r), potential.envelope(eps, s), potential.beta_eps(eps, r))
            else {
                failed = true;
                continue;
            };
            // 0 ≤ β̂_ε ≤ β̂
            below = below.max(-er).max(er - convex.value(r));
            // convexity with slope β_ε: β̂_ε(s) ≥ β̂_ε(r) + β_ε(r)(s - r)
            subgradient = subgradient.max((er + br * (s - r) - es) / (1.0 + er.abs() + es.abs()));
            if let (Ok(p), Ok(m)) = (potential.envelope(eps, r + h), potential.envelope(eps, r - h)) {
                let fd = (p - m) / (2.0 * h);
                // central differences across the kinks of β_ε cost h/ε
                derivative = derivative.max((fd - br).abs() / ((h / eps + 1e-6) * (1.0 + br.abs())));
            }
        }
        rows.push(row(&name, "envelope-zero", Some(eps), zero, !failed && zero == 0.0));
        rows.push(row(&name, "envelope-bounds", Some(eps), below, !failed && below <= 1e-12));
        rows.push(row(&name, "envelope-subgradient", Some(eps), subgradient, !failed && subgradient <= 1e-12));
        rows.push(row(&name, "envelope-derivative", Some(eps), derivative, !failed && derivative <= 1.0));
    }
    rows
}

/// The whole suite over every built-in graph and potential.
pub fn graph_selftest(seed: u64) -> SelfTestReport {
    let graphs = builtin_graphs();
    let mut rows: Vec<SelfTestRow> = graphs.par_iter().flat_map(|g| probe_graph(g, seed)).collect();
    rows.extend(probe_nonlocal_sign(seed));
    for p in [
        PotentialSpec::Regular,
        PotentialSpec::Logarithmic { c0: 1.5 },
        PotentialSpec::Obstacle { c0: 1.0 },
    ] {
        rows.extend(probe_potential(p, seed));
    }
    SelfTestReport { seed, rows }
}
