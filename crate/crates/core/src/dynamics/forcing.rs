//! Source term `f` sampled in time, and its elliptic-in-time regularization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// Solves `-ε f_ε'' + f_ε = f` on `(0, T)` with `f_ε(0) = f_ε(T) = 0`.
///
/// `samples` are values of `f` on the uniform grid `t_j = jT/(N-1)`. The
/// second derivative is discretized by centered differences and the
/// tridiagonal system is solved with the Thomas algorithm.
pub fn mollify(samples: &[f64], t_final: f64, eps: f64) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::invalid(format!("mollifier needs at least 3 time samples, got {n}")));
    }
    if !(eps > 0.0) || !(t_final > 0.0) {
        return Err(Error::invalid("mollifier needs eps > 0 and T > 0"));
    }
    let h = t_final / (n - 1) as f64;
    let off = -eps / (h * h);
    let diag = 1.0 + 2.0 * eps / (h * h);
    let m = n - 2;
    // forward sweep on the interior unknowns
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    for i in 0..m {
        let rhs = samples[i + 1];
        if i == 0 {
            c[i] = off / diag;
            d[i] = rhs / diag;
        } else {
            let denom = diag - off * c[i - 1];
            c[i] = off / denom;
            d[i] = (rhs - off * d[i - 1]) / denom;
        }
    }
    let mut out = vec![0.0; n];
    for i in (0..m).rev() {
        let next = if i + 1 < m { out[i + 2] } else { 0.0 };
        out[i + 1] = d[i] - c[i] * next;
    }
    Ok(out)
}

/// `L²(0,T)` norm of a uniformly sampled series by the trapezoid rule.
pub fn l2_time(samples: &[f64], t_final: f64) -> f64 {
    trapezoid_uniform(&samples.iter().map(|x| x * x).collect::<Vec<_>>(), t_final).sqrt()
}

pub(crate) fn trapezoid_uniform(values: &[f64], t_final: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let h = t_final / (n - 1) as f64;
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

/// Time-sampled forcing in coefficient space, linearly interpolated in time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Forcing {
    /// Uniform sample times covering `[0, T]`; empty means `f ≡ 0`.
    pub times: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

impl Forcing {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|x| *x == 0.0))
    }

    /// Builds a separable forcing `f(x, t) = g(t)·s(x)` from spatial
    /// coefficients and a time profile sampled at `samples` points.
    pub fn separable(spatial: &[f64], t_final: f64, samples: usize, time_profile: impl Fn(f64) -> f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::invalid("forcing needs at least two time samples"));
        }
        let times: Vec<f64> = (0..samples).map(|j| t_final * j as f64 / (samples - 1) as f64).collect();
        let coeffs = times
            .iter()
            .map(|&t| {
                let g = time_profile(t);
                spatial.iter().map(|c| c * g).collect()
            })
            .collect();
        Ok(Self { times, coeffs })
    }

    /// Coefficients of `f(t)`; zero vector when no forcing is configured.
    pub fn at(&self, t: f64, modes: usize) -> Vec<f64> {
        if self.times.is_empty() {
            return vec![0.0; modes];
        }
        let n = self.times.len();
        if t <= self.times[0] {
            return self.coeffs[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.coeffs[n - 1].clone();
        }
        let h = self.times[1] - self.times[0];
        let j = (((t - self.times[0]) / h).floor() as usize).min(n - 2);
        let w = (t - self.times[j]) / h;
        self.coeffs[j].iter().zip(&self.coeffs[j + 1]).map(|(a, b)| (1.0 - w) * a + w * b).collect()
    }

    /// Applies [`mollify`] to every coefficient series.
    pub fn mollified(&self, eps: f64) -> Result<Self> {
        if self.times.is_empty() {
            return Ok(self.clone());
        }
        let t_final = *self.times.last().unwrap() - self.times[0];
        let modes = self.coeffs[0].len();
        let mut out = self.coeffs.clone();
        for i in 0..modes {
            let series: Vec<f64> = self.coeffs.iter().map(|c| c[i]).collect();
            let smooth = mollify(&series, t_final, eps)?;
            for (row, v) in out.iter_mut().zip(smooth) {
                row[i] = v;
            }
        }
        Ok(Self {
            times: self.times.clone(),
            coeffs: out,
        })
    }

    /// `‖f - g‖_{L²(Q)}` evaluated on the time samples of `self` (or `other`
    /// when `self` is empty).
    pub fn l2_distance(&self, other: &Forcing, basis: &SpectralBasis, t_final: f64) -> f64 {
        let times = if self.times.len() >= other.times.len() { &self.times } else { &other.times };
        if times.is_empty() {
            return 0.0;
        }
        let modes = basis.num_modes();
        let sq: Vec<f64> = times
            .iter()
            .map(|&t| {
                let d: Vec<f64> = self.at(t, modes).iter().zip(other.at(t, modes)).map(|(a, b)| a - b).collect();
                basis.inner(&d, &d)
            })
            .collect();
        trapezoid_uniform(&sq, t_final).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_stays_zero() {
        let f = mollify(&[0.0; 11], 1.0, 0.1).unwrap();
        assert!(f.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn constant_matches_closed_form() {
        let n = 1001;
        let f = mollify(&vec![1.0; n], 1.0, 0.01).unwrap();
        for (j, v) in f.iter().enumerate() {
            let t = j as f64 / (n - 1) as f64;
            let exact = 1.0 - ((t - 0.5) / 0.1).cosh() / 5f64.cosh();
            assert_abs_diff_eq!(*v, exact, epsilon = 1e-4);
        }
    }

    #[test]
    fn l2_error_decreases_with_eps() {
        let n = 2001;
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let f = mollify(&vec![1.0; n], 1.0, eps).unwrap();
            let err: Vec<f64> = f.iter().map(|v| v - 1.0).collect();
            let e = l2_time(&err, 1.0);
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(mollify(&[1.0, 1.0], 1.0, 0.1).is_err());
    }

    #[test]
    fn interpolation_in_time() {
        let f = Forcing::separable(&[1.0, 2.0], 1.0, 3, |t| t).unwrap();
        assert_eq!(f.at(0.25, 2), vec![0.25, 0.5]);
        assert_eq!(f.at(2.0, 2), vec![1.0, 2.0]);
        assert_eq!(Forcing::zero().at(0.3, 3), vec![0.0; 3]);
    }
}
