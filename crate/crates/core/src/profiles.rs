//! Named spatial profiles used to build initial data, `η*` and forcing.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// A field on `Ω`, evaluated at the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `amplitude·Π_d cos(i_d π x_d / L_d)`.
    Cosine {
        mode: Vec<usize>,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `amplitude·tanh((x_axis - center)/width)`.
    Tanh {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        axis: usize,
    },
    /// Random cosine series `Σ c_i cos(iπx/L)` over `modes` modes per
    /// dimension with `c_i` uniform in `[-1, 1]·(1 + |i|)^(-decay)`, scaled
    /// so that `Σ|c_i| = amplitude`. The field is then bounded by
    /// `amplitude` and does not depend on the grid.
    RandomSmooth {
        modes: usize,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "two")]
        decay: f64,
    },
    /// Grid values read from a CSV file, one value per node in grid order
    /// (optionally under a header `value`).
    Csv {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Constant { value } if *value == 0.0)
    }

    /// Grid values on `basis`. `seed` feeds the random profiles; `base_dir`
    /// resolves relative CSV paths.
    pub fn sample(&self, basis: &SpectralBasis, seed: u64, base_dir: &Path) -> Result<Vec<f64>> {
        let nodes = basis.nodes();
        let lengths = basis.domain().lengths();
        match self {
            Profile::Constant { value } => Ok(vec![*value; nodes.len()]),
            Profile::Cosine { mode, amplitude, offset } => {
                if mode.len() != lengths.len() {
                    return Err(Error::config(format!(
                        "cosine profile needs {} mode indices, got {}",
                        lengths.len(),
                        mode.len()
                    )));
                }
                Ok(nodes
                    .iter()
                    .map(|x| {
                        offset
                            + amplitude
                                * mode
                                    .iter()
                                    .zip(x)
                                    .zip(&lengths)
                                    .map(|((i, xd), l)| (*i as f64 * PI * xd / l).cos())
                                    .product::<f64>()
                    })
                    .collect())
            }
            Profile::Tanh { center, width, amplitude, axis } => {
                if *axis >= lengths.len() || !(*width > 0.0) {
                    return Err(Error::config("tanh profile needs width > 0 and a valid axis"));
                }
                Ok(nodes.iter().map(|x| amplitude * ((x[*axis] - center) / width).tanh()).collect())
            }
            Profile::RandomSmooth { modes, amplitude, decay } => {
                if *modes == 0 {
                    return Err(Error::config("random-smooth profile needs at least one mode"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let dims = lengths.len();
                let count = modes.pow(dims as u32);
                let terms: Vec<(Vec<usize>, f64)> = (0..count)
                    .map(|flat| {
                        let idx: Vec<usize> = (0..dims).map(|d| (flat / modes.pow((dims - 1 - d) as u32)) % modes).collect();
                        let size = 1.0 + idx.iter().sum::<usize>() as f64;
                        let c = rng.gen_range(-1.0..=1.0) * size.powf(-decay);
                        (idx, c)
                    })
                    .collect();
                let total: f64 = terms.iter().map(|(_, c)| c.abs()).sum();
                let scale = if total > 0.0 { amplitude / total } else { 0.0 };
                Ok(nodes
                    .iter()
                    .map(|x| {
                        terms
                            .iter()
                            .map(|(idx, c)| {
                                c * idx.iter().zip(x).zip(&lengths).map(|((i, xd), l)| (*i as f64 * PI * xd / l).cos()).product::<f64>()
                            })
                            .sum::<f64>()
                            * scale
                    })
                    .collect())
            }
            Profile::Csv { path } => {
                let full = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let values = read_column(&full)?;
                if values.len() != nodes.len() {
                    return Err(Error::config(format!(
                        "{} holds {} values but the grid has {} nodes",
                        full.display(),
                        values.len(),
                        nodes.len()
                    )));
                }
                Ok(values)
            }
        }
    }
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let field = rec.get(rec.len().saturating_sub(1)).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if row == 0 => {}
            Err(_) => {
                return Err(Error::Config {
                    line: Some(row + 1),
                    message: format!("{}: `{field}` is not a number", path.display()),
                })
            }
        }
    }
    Ok(out)
}

/// Time profile of a separable forcing `f(x, t) = g(t)s(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant,
    /// `sin(ωt)`
    Sine { omega: f64 },
    /// `t/T`
    Ramp,
    /// `1` on `[0, T/2)`, `0` afterwards. Rough in time.
    Step,
}

impl TimeProfile {
    pub fn eval(&self, t: f64, t_final: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Sine { omega } => (omega * t).sin(),
            TimeProfile::Ramp => t / t_final,
            TimeProfile::Step => {
                if t < 0.5 * t_final {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
