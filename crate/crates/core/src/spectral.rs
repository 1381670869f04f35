//! Neumann Laplacian eigenbasis on an interval or a rectangle.
//!
//! Modes are the cosines `cos(iπx/L)` (tensor products in 2D) with
//! eigenvalues `(iπ/L)²`. Grid functions live on the cell-midpoint grid
//! `x_p = (p + ½)L/M`, where the midpoint rule is exact for every product of
//! two modes below `M`, so [`SpectralBasis::from_grid`] inverts
//! [`SpectralBasis::to_grid`] on `V_n` and coincides with the `H`-orthogonal
//! projection of band-limited data.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn dims(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    pub fn lengths(&self) -> Vec<f64> {
        match *self {
            Domain::Interval { length } => vec![length],
            Domain::Rectangle { lx, ly } => vec![lx, ly],
        }
    }

    /// Lebesgue measure `|Ω|`.
    pub fn measure(&self) -> f64 {
        self.lengths().iter().product()
    }
}

/// Which inner product the modes are normalized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `‖v_i‖_H = 1`; the mass matrix is the identity.
    #[default]
    H,
    /// `‖v_i‖_V = 1`.
    V,
}

/// `H`, `V` norms and Dirichlet energy of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub h: f64,
    pub v: f64,
    /// `∫|∇u|²`.
    pub dirichlet: f64,
}

/// One-dimensional cosine family sampled on the midpoint grid.
#[derive(Debug, Clone)]
struct Axis {
    length: f64,
    n: usize,
    m: usize,
    nodes: Vec<f64>,
    eigenvalues: Vec<f64>,
    // table[i * m + p] = e_i(x_p), H-normalized
    table: Vec<f64>,
}

impl Axis {
    fn new(length: f64, n: usize, m: usize) -> Self {
        let h = length / m as f64;
        let nodes: Vec<f64> = (0..m).map(|p| (p as f64 + 0.5) * h).collect();
        let eigenvalues = (0..n).map(|i| (i as f64 * PI / length).powi(2)).collect();
        let mut table = Vec::with_capacity(n * m);
        for i in 0..n {
            for &x in &nodes {
                table.push(mode_1d(length, i, x));
            }
        }
        Self {
            length,
            n,
            m,
            nodes,
            eigenvalues,
            table,
        }
    }

    fn weight(&self) -> f64 {
        self.length / self.m as f64
    }
}

fn mode_1d(length: f64, i: usize, x: f64) -> f64 {
    if i == 0 {
        1.0 / length.sqrt()
    } else {
        (2.0 / length).sqrt() * (i as f64 * PI * x / length).cos()
    }
}

/// Truncated Neumann eigenbasis `V_n` together with its quadrature grid.
///
/// `n` is the number of modes per dimension (`i = 0, …, n-1`), `m` the
/// number of grid nodes per dimension. Coefficient vectors in 2D are indexed
/// `i * n + j` and grid vectors `p * m + q`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    domain: Domain,
    normalization: Normalization,
    axes: Vec<Axis>,
    eigenvalues: Vec<f64>,
    scale: Vec<f64>,
    mass: Vec<f64>,
}

impl SpectralBasis {
    pub fn new(domain: Domain, n: usize, m: usize, normalization: Normalization) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("basis needs at least one mode"));
        }
        if m < 2 * n {
            return Err(Error::invalid(format!("grid of {m} nodes is too coarse for {n} modes (need M >= 2n)")));
        }
        let lengths = domain.lengths();
        if lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("domain lengths must be positive"));
        }
        let axes: Vec<Axis> = lengths.iter().map(|&l| Axis::new(l, n, m)).collect();
        let eigenvalues: Vec<f64> = match axes.as_slice() {
            [a] => a.eigenvalues.clone(),
            [a, b] => a
                .eigenvalues
                .iter()
                .flat_map(|la| b.eigenvalues.iter().map(move |lb| la + lb))
                .collect(),
            _ => unreachable!(),
        };
        let scale: Vec<f64> = match normalization {
            Normalization::H => vec![1.0; eigenvalues.len()],
            Normalization::V => eigenvalues.iter().map(|l| 1.0 / (1.0 + l).sqrt()).collect(),
        };
        let mass = scale.iter().map(|s| s * s).collect();
        Ok(Self {
            domain,
            normalization,
            axes,
            eigenvalues,
            scale,
            mass,
        })
    }

    /// 1D basis on `[0, length]` with the default grid of `3n` nodes.
    pub fn interval(length: f64, n: usize) -> Result<Self> {
        Self::new(Domain::Interval { length }, n, 3 * n, Normalization::H)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Modes per dimension.
    pub fn n(&self) -> usize {
        self.axes[0].n
    }

    /// Grid nodes per dimension.
    pub fn m(&self) -> usize {
        self.axes[0].m
    }

    pub fn num_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.m).product()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.eigenvalues[mode]
    }

    /// Diagonal mass matrix `(v_i, v_i)_H`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Amplitude of each mode relative to the `H`-normalized cosine.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn measure(&self) -> f64 {
        self.domain.measure()
    }

    /// Quadrature weight of a grid node (cell size).
    pub fn node_weight(&self) -> f64 {
        self.axes.iter().map(Axis::weight).product()
    }

    /// Coordinates of every grid node, in grid order.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        match self.axes.as_slice() {
            [a] => a.nodes.iter().map(|&x| vec![x]).collect(),
            [a, b] => a
                .nodes
                .iter()
                .flat_map(|&x| b.nodes.iter().map(move |&y| vec![x, y]))
                .collect(),
            _ => unreachable!(),
        }
    }

    /// Per-dimension mode indices of a flattened mode index.
    pub fn mode_index(&self, mode: usize) -> Vec<usize> {
        match self.dims() {
            1 => vec![mode],
            _ => vec![mode / self.n(), mode % self.n()],
        }
    }

    /// Flattened index of a mode given per-dimension indices.
    pub fn mode_at(&self, idx: &[usize]) -> Option<usize> {
        let n = self.n();
        match (self.dims(), idx) {
            (1, [i]) if *i < n => Some(*i),
            (2, [i, j]) if *i < n && *j < n => Some(i * n + j),
            _ => None,
        }
    }

    /// Evaluates basis function `mode` at an arbitrary point.
    pub fn mode_value(&self, mode: usize, point: &[f64]) -> f64 {
        let idx = self.mode_index(mode);
        let v: f64 = self
            .axes
            .iter()
            .zip(&idx)
            .zip(point)
            .map(|((a, &i), &x)| mode_1d(a.length, i, x))
            .product();
        v * self.scale[mode]
    }

    fn check_len(&self, got: usize, expected: usize) -> Result<()> {
        if got == expected {
            Ok(())
        } else {
            Err(Error::SizeMismatch { expected, got })
        }
    }

    /// Evaluates `Σ c_i v_i` on the grid.
    pub fn to_grid(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len(), self.num_modes())?;
        let h: Vec<f64> = coeffs.iter().zip(&self.scale).map(|(c, s)| c * s).collect();
        Ok(match self.axes.as_slice() {
            [a] => {
                let mut u = vec![0.0; a.m];
                for (i, &c) in h.iter().enumerate() {
                    if c == 0.0 {
                        continue;
                    }
                    let row = &a.table[i * a.m..(i + 1) * a.m];
                    for (u, t) in u.iter_mut().zip(row) {
                        *u += c * t;
                    }
                }
                u
            }
            [a, b] => {
                // contract y-modes first: tmp[i][q]
                let mut tmp = vec![0.0; a.n * b.m];
                for i in 0..a.n {
                    let out = &mut tmp[i * b.m..(i + 1) * b.m];
                    for j in 0..b.n {
                        let c = h[i * b.n + j];
                        if c == 0.0 {
                            continue;
                        }
                        for (o, t) in out.iter_mut().zip(&b.table[j * b.m..(j + 1) * b.m]) {
                            *o += c * t;
                        }
                    }
                }
                let mut u = vec![0.0; a.m * b.m];
                for i in 0..a.n {
                    let src = &tmp[i * b.m..(i + 1) * b.m];
                    for p in 0..a.m {
                        let e = a.table[i * a.m + p];
                        for (o, s) in u[p * b.m..(p + 1) * b.m].iter_mut().zip(src) {
                            *o += e * s;
                        }
                    }
                }
                u
            }
            _ => unreachable!(),
        })
    }

    /// Quadrature transform: `c_i = (u, v_i)_H / (v_i, v_i)_H`.
    pub fn from_grid(&self, grid: &[f64]) -> Result<Vec<f64>> {
        self.check_len(grid.len(), self.num_nodes())?;
        let mut c = match self.axes.as_slice() {
            [a] => {
                let w = a.weight();
                (0..a.n)
                    .map(|i| {
                        let row = &a.table[i * a.m..(i + 1) * a.m];
                        w * row.iter().zip(grid).map(|(t, u)| t * u).sum::<f64>()
                    })
                    .collect::<Vec<f64>>()
            }
            [a, b] => {
                let w = a.weight() * b.weight();
                // tmp[p][j] = Σ_q u[p][q] e_j(y_q)
                let mut tmp = vec![0.0; a.m * b.n];
                for p in 0..a.m {
                    let row = &grid[p * b.m..(p + 1) * b.m];
                    for j in 0..b.n {
                        tmp[p * b.n + j] = b.table[j * b.m..(j + 1) * b.m].iter().zip(row).map(|(t, u)| t * u).sum();
                    }
                }
                let mut c = vec![0.0; a.n * b.n];
                for i in 0..a.n {
                    for p in 0..a.m {
                        let e = a.table[i * a.m + p];
                        for j in 0..b.n {
                            c[i * b.n + j] += e * tmp[p * b.n + j];
                        }
                    }
                }
                c.iter_mut().for_each(|x| *x *= w);
                c
            }
            _ => unreachable!(),
        };
        for (c, s) in c.iter_mut().zip(&self.scale) {
            *c /= s;
        }
        Ok(c)
    }

    /// `H`-orthogonal projection `P_{V_n}` of a grid function sampled on the
    /// quadrature grid.
    pub fn project(&self, grid: &[f64]) -> Result<Vec<f64>> {
        self.from_grid(grid)
    }

    /// Samples `f` on the grid and projects it.
    pub fn project_fn(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let grid: Vec<f64> = self.nodes().iter().map(|x| f(x)).collect();
        self.from_grid(&grid).expect("grid size matches")
    }

    /// Coefficients of `Δu`.
    pub fn laplacian(&self, coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().zip(&self.eigenvalues).map(|(c, l)| -l * c).collect()
    }

    /// `(u, w)_H` by Parseval.
    pub fn inner(&self, u: &[f64], w: &[f64]) -> f64 {
        u.iter().zip(w).zip(&self.mass).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn h_norm(&self, coeffs: &[f64]) -> f64 {
        self.inner(coeffs, coeffs).sqrt()
    }

    /// `∫|∇u|² = Σ λ_i c_i² (v_i, v_i)_H`.
    pub fn dirichlet(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.mass)
            .zip(&self.eigenvalues)
            .map(|((c, m), l)| l * m * c * c)
            .sum()
    }

    pub fn norms(&self, coeffs: &[f64]) -> Norms {
        let h2 = self.inner(coeffs, coeffs);
        let d = self.dirichlet(coeffs);
        Norms {
            h: h2.sqrt(),
            v: (h2 + d).sqrt(),
            dirichlet: d,
        }
    }

    /// `‖Δu‖_H`.
    pub fn laplacian_norm(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.mass)
            .zip(&self.eigenvalues)
            .map(|((c, m), l)| l * l * m * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `W = H²`-norm with `‖u‖²_W = ‖u‖²_H + ‖∇u‖²_H + ‖Δu‖²_H`.
    pub fn w_norm(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.mass)
            .zip(&self.eigenvalues)
            .map(|((c, m), l)| (1.0 + l + l * l) * m * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `∫ u w` by the midpoint rule.
    pub fn grid_inner(&self, u: &[f64], w: &[f64]) -> f64 {
        self.node_weight() * u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `∫ u` by the midpoint rule.
    pub fn grid_integral(&self, u: &[f64]) -> f64 {
        self.node_weight() * u.iter().sum::<f64>()
    }

    pub fn grid_norm(&self, u: &[f64]) -> f64 {
        self.grid_inner(u, u).sqrt()
    }

    /// Coefficients with respect to the `H`-normalized cosines.
    pub fn to_h_coeffs(&self, coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().zip(&self.scale).map(|(c, s)| c * s).collect()
    }

    pub fn from_h_coeffs(&self, h: &[f64]) -> Vec<f64> {
        h.iter().zip(&self.scale).map(|(c, s)| c / s).collect()
    }

    /// Embeds coefficients of `coarse` into this (finer or equal) basis.
    pub fn embed(&self, coarse: &SpectralBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coarse.dims() != self.dims() || coarse.n() > self.n() || coarse.domain != self.domain {
            return Err(Error::invalid("embedding requires a nested basis on the same domain"));
        }
        let h = coarse.to_h_coeffs(coeffs);
        let mut out = vec![0.0; self.num_modes()];
        for (mode, c) in h.iter().enumerate() {
            let idx = coarse.mode_index(mode);
            let fine = self.mode_at(&idx).expect("nested");
            out[fine] = *c;
        }
        Ok(self.from_h_coeffs(&out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit(n: usize, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }

    #[test]
    fn eigenvalues_closed_form() {
        let b = SpectralBasis::interval(PI, 6).unwrap();
        assert_abs_diff_eq!(b.eigenvalue(3), 9.0, epsilon = 1e-12);
        assert_eq!(b.eigenvalue(0), 0.0);
        assert!(b.eigenvalues().windows(2).all(|w| w[1] > w[0]));
        let v0 = b.to_grid(&unit(6, 0)).unwrap();
        assert!(v0.iter().all(|x| (x - v0[0]).abs() < 1e-15));
    }

    #[test]
    fn rectangle_eigenvalue_is_sum() {
        let b = SpectralBasis::new(Domain::Rectangle { lx: PI, ly: PI }, 4, 8, Normalization::H).unwrap();
        let mode = b.mode_at(&[1, 2]).unwrap();
        assert_abs_diff_eq!(b.eigenvalue(mode), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpectralBasis::new(Domain::Interval { length: 1.0 }, 0, 4, Normalization::H).is_err());
        assert!(SpectralBasis::new(Domain::Interval { length: 1.0 }, 8, 15, Normalization::H).is_err());
        let b = SpectralBasis::interval(1.0, 4).unwrap();
        assert!(matches!(b.from_grid(&[0.0; 5]), Err(Error::SizeMismatch { expected: 12, got: 5 })));
        assert!(b.to_grid(&[0.0; 3]).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for norm in [Normalization::H, Normalization::V] {
            let b = SpectralBasis::new(Domain::Rectangle { lx: 1.0, ly: 2.0 }, 5, 10, norm).unwrap();
            let grids: Vec<Vec<f64>> = (0..b.num_modes()).map(|i| b.to_grid(&unit(b.num_modes(), i)).unwrap()).collect();
            for i in 0..b.num_modes() {
                for j in 0..b.num_modes() {
                    let g = b.grid_inner(&grids[i], &grids[j]);
                    let expected = if i == j { b.mass()[i] } else { 0.0 };
                    assert_abs_diff_eq!(g, expected, epsilon = 1e-10);
                    if norm == Normalization::V && i == j {
                        // ‖v_i‖_V = 1
                        assert_abs_diff_eq!(b.norms(&unit(b.num_modes(), i)).v, 1.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn projection_of_single_cosine() {
        let b = SpectralBasis::interval(PI, 4).unwrap();
        let c = b.project_fn(|x| x[0].cos());
        for (i, ci) in c.iter().enumerate() {
            if i == 1 {
                assert_abs_diff_eq!(*ci, (PI / 2.0).sqrt(), epsilon = 1e-12);
            } else {
                assert_abs_diff_eq!(*ci, 0.0, epsilon = 1e-13);
            }
        }
        let z = b.project(&vec![0.0; b.num_nodes()]).unwrap();
        assert!(z.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn mode_beyond_truncation_projects_to_zero() {
        let n = 6;
        let l = 2.0;
        let b = SpectralBasis::interval(l, n).unwrap();
        let c = b.project_fn(|x| ((n + 1) as f64 * PI * x[0] / l).cos());
        assert!(c.iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn norm_examples() {
        let b = SpectralBasis::interval(PI, 3).unwrap();
        let n = b.norms(&[0.0, 1.0, 0.0]);
        assert_abs_diff_eq!(n.h, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.dirichlet, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.norms(&[2.0, 1.0, 0.0]).h.powi(2), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn laplacian_matches_second_differences() {
        let l = 1.0;
        let b = SpectralBasis::new(Domain::Interval { length: l }, 5, 400, Normalization::H).unwrap();
        let c = [0.3, -0.2, 0.5, 0.1, -0.05];
        let lap = b.to_grid(&b.laplacian(&c)).unwrap();
        let h = l / 400.0;
        let mut prev_err = 0.0f64;
        // field evaluated exactly at x ± h through mode_value
        let eval = |x: f64| -> f64 { (0..5).map(|i| c[i] * b.mode_value(i, &[x])).sum() };
        for (p, x) in b.nodes().iter().enumerate().skip(1).take(398) {
            let fd = (eval(x[0] + h) - 2.0 * eval(x[0]) + eval(x[0] - h)) / (h * h);
            prev_err = prev_err.max((fd - lap[p]).abs());
        }
        // O(h²) with fourth derivative of order (4π)⁴
        assert!(prev_err < 2e-2, "{prev_err}");
    }

    #[test]
    fn projection_equals_discrete_least_squares() {
        // with discrete orthogonality the normal equations are diagonal; solve
        // them the long way with Gaussian elimination to check
        let b = SpectralBasis::new(Domain::Interval { length: 1.5 }, 4, 9, Normalization::V).unwrap();
        let data: Vec<f64> = b.nodes().iter().map(|x| (3.0 * x[0]).exp() - x[0].powi(2)).collect();
        let cols: Vec<Vec<f64>> = (0..4).map(|i| b.to_grid(&unit(4, i)).unwrap()).collect();
        let mut a = [[0.0; 5]; 4];
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
            }
            a[i][4] = cols[i].iter().zip(&data).map(|(x, y)| x * y).sum();
        }
        for k in 0..4 {
            for i in k + 1..4 {
                let f = a[i][k] / a[k][k];
                for j in k..5 {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        let mut x = [0.0; 4];
        for i in (0..4).rev() {
            x[i] = (a[i][4] - (i + 1..4).map(|j| a[i][j] * x[j]).sum::<f64>()) / a[i][i];
        }
        let proj = b.project(&data).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(proj[i], x[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn nested_projection_converges_in_v() {
        let f = |x: &[f64]| (3.0 * (PI * x[0]).cos()).exp();
        let fine = SpectralBasis::new(Domain::Interval { length: 1.0 }, 128, 384, Normalization::H).unwrap();
        let reference = fine.project_fn(f);
        let mut prev = f64::INFINITY;
        for n in [4, 8, 16, 32] {
            let b = SpectralBasis::interval(1.0, n).unwrap();
            let c = fine.embed(&b, &b.project_fn(f)).unwrap();
            let diff: Vec<f64> = c.iter().zip(&reference).map(|(a, r)| a - r).collect();
            let err = fine.norms(&diff).v;
            assert!(err < prev, "n={n}: {err} !< {prev}");
            prev = err;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn embed_preserves_field() {
        let coarse = SpectralBasis::new(Domain::Rectangle { lx: 1.0, ly: 1.0 }, 3, 6, Normalization::V).unwrap();
        let fine = SpectralBasis::new(Domain::Rectangle { lx: 1.0, ly: 1.0 }, 5, 10, Normalization::H).unwrap();
        let c: Vec<f64> = (0..9).map(|i| i as f64 * 0.1 - 0.3).collect();
        let e = fine.embed(&coarse, &c).unwrap();
        let p = [0.37, 0.81];
        let a: f64 = (0..9).map(|i| c[i] * coarse.mode_value(i, &p)).sum();
        let b: f64 = (0..25).map(|i| e[i] * fine.mode_value(i, &p)).sum();
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(coeffs in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let b = SpectralBasis::new(Domain::Interval { length: 2.5 }, 16, 48, Normalization::H).unwrap();
            let back = b.from_grid(&b.to_grid(&coeffs).unwrap()).unwrap();
            for (a, c) in back.iter().zip(&coeffs) {
                prop_assert!((a - c).abs() <= 1e-10);
            }
        }

        #[test]
        fn round_trip_2d(coeffs in proptest::collection::vec(-1.0f64..1.0, 25)) {
            let b = SpectralBasis::new(Domain::Rectangle { lx: 1.0, ly: 0.5 }, 5, 10, Normalization::V).unwrap();
            let back = b.from_grid(&b.to_grid(&coeffs).unwrap()).unwrap();
            for (a, c) in back.iter().zip(&coeffs) {
                prop_assert!((a - c).abs() <= 1e-10);
            }
        }

        #[test]
        fn projection_is_idempotent_and_nonexpansive(data in proptest::collection::vec(-2.0f64..2.0, 30)) {
            let b = SpectralBasis::new(Domain::Interval { length: 1.0 }, 7, 30, Normalization::H).unwrap();
            let p = b.project(&data).unwrap();
            let pp = b.project(&b.to_grid(&p).unwrap()).unwrap();
            for (a, c) in p.iter().zip(&pp) {
                prop_assert!((a - c).abs() <= 1e-10);
            }
            prop_assert!(b.h_norm(&p) <= b.grid_norm(&data) + 1e-12);
        }
    }
}
