//! CSV and JSON emission. Floats are written in the shortest decimal form
//! that parses back to the same `f64`, so identical runs produce identical
//! bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::runner::{RunOutcome, SweepReport, SweepResult};

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn to_csv(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// `t`, the `η` and `φ` coefficients, then `‖η‖`, `‖φ‖`, `‖φ‖_V` and
/// `‖ζ‖`.
pub fn trajectory_csv(outcome: &RunOutcome) -> Result<String> {
    let b = &outcome.params.basis;
    let n = b.num_modes();
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("eta_{i}")));
    header.extend((0..n).map(|i| format!("phi_{i}")));
    header.extend(["eta_h", "phi_h", "phi_v", "zeta_h"].map(String::from));
    let rows = outcome.trajectory.samples.iter().map(|s| {
        let mut row = Vec::with_capacity(2 * n + 5);
        row.push(s.t);
        row.extend(&s.eta);
        row.extend(&s.phi);
        row.push(b.h_norm(&s.eta));
        let np = b.norms(&s.phi);
        row.push(np.h);
        row.push(np.v);
        row.push(s.zeta_norm);
        row
    });
    to_csv(&header, rows)
}

/// Plot data: energies, the Gronwall bound and the monitored terms against `t`.
pub fn energy_csv(outcome: &RunOutcome) -> Result<String> {
    let e = &outcome.report.energy;
    let header = [
        "t", "e1", "bound", "eta", "grad_eta", "dphi", "phi", "envelope", "second", "third", "fourth",
    ]
    .map(String::from);
    let rows = (0..e.times.len()).map(|i| {
        let c = &e.components[i];
        vec![
            e.times[i], e.e1[i], e.bound[i], c.eta, c.grad_eta, c.dphi, c.phi, c.envelope, e.second[i], e.third[i],
            e.fourth[i],
        ]
    });
    to_csv(&header, rows)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// One row per ladder level or perturbation size.
pub fn sweep_csv(report: &SweepReport) -> Result<String> {
    match &report.result {
        SweepResult::Ladder(r) => {
            let header = ["level", "difference_to_next", "overshoot", "zeta_sup"].map(String::from);
            let rows = (0..r.levels.len()).map(|i| {
                vec![r.levels[i], r.differences.get(i).copied().unwrap_or(f64::NAN), r.overshoot[i], r.zeta_sup[i]]
            });
            to_csv(&header, rows)
        }
        SweepResult::Contraction(s) => {
            let header = ["delta", "data_difference", "solution_difference", "c_obs"].map(String::from);
            let rows = s.reports.iter().zip(&s.deltas).map(|(r, d)| {
                vec![*d, r.data.total(), r.solution.total(), r.c_obs.unwrap_or(f64::NAN)]
            });
            to_csv(&header, rows)
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

/// Writes `trajectory.csv`, `energy.csv` and `report.json` into `dir`.
pub fn write_run(dir: &Path, outcome: &RunOutcome) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![
        write(dir, "trajectory.csv", &trajectory_csv(outcome)?)?,
        write(dir, "energy.csv", &energy_csv(outcome)?)?,
        write(dir, "report.json", &to_json(&outcome.report)?)?,
    ])
}

/// Writes `sweep.csv` and `sweep.json` into `dir`.
pub fn write_sweep(dir: &Path, report: &SweepReport) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![write(dir, "sweep.csv", &sweep_csv(report)?)?, write(dir, "sweep.json", &to_json(report)?)?])
}
