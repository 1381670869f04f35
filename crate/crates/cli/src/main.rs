use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phasefield::config::ScenarioConfig;
use phasefield::dynamics::Method;
use phasefield::output::{to_json, write_run, write_sweep};
use phasefield::runner::{self, SweepAxis, Timing};
use phasefield::selftest::graph_selftest;
use phasefield::{scenarios, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_BLOWUP: u8 = 4;

/// Spectral Galerkin simulator for a phase-field system with a maximal
/// monotone perturbation.
#[derive(Parser)]
#[command(name = "phasefield", version)]
struct Cli {
    /// Worker threads for parallel solves (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write trajectory, plot data and report.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (default: phasefield-out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the report. Breaks byte-identical reruns.
        #[arg(long)]
        timing: bool,
    },
    /// Run a refinement ladder or a perturbation sweep.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// eps-ladder, n-ladder or contraction-delta.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated levels; defaults depend on the axis.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Bound on the last ladder difference (default 1e-3 for n-ladder,
        /// 1e-2 for eps-ladder) or on |slope - 1| (default 0.15).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the built-in graphs and potentials against their defining properties.
    GraphSelftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write selftest.tsv and selftest.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bundled scenarios.
    Scenarios {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
    /// Print the TOML of a bundled scenario.
    Show { name: String },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file in TOML.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Name of a bundled scenario.
    #[arg(long)]
    scenario: Option<String>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the integrator: imex, rk4 or rk45.
    #[arg(long)]
    method: Option<Method>,
}

impl ScenarioArgs {
    /// The config and the directory relative CSV paths are resolved against.
    fn load(&self) -> phasefield::Result<(ScenarioConfig, PathBuf)> {
        let (mut cfg, base) = match (&self.config, &self.scenario) {
            (Some(path), _) => {
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (ScenarioConfig::from_path(path)?, base)
            }
            (None, Some(name)) => (scenarios::get(name)?, PathBuf::from(".")),
            (None, None) => return Err(Error::Config { line: None, message: "pass --config or --scenario".into() }),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = self.method {
            cfg.integrator.method = m;
        }
        Ok((cfg, base))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::BlowUp { .. } | Error::NonFinite(_) | Error::StepRejection { .. } | Error::NoConvergence { .. } => {
            EXIT_BLOWUP
        }
        _ => EXIT_CONFIG,
    }
}

fn out_dir(out: Option<PathBuf>, cfg: &ScenarioConfig, suffix: &str) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("phasefield-out").join(format!("{}{suffix}", cfg.name)))
}

fn print_certificates(certs: &[runner::Certificate]) {
    for c in certs {
        println!("{:<4} {:<22} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(command: Command) -> phasefield::Result<u8> {
    match command {
        Command::Run { scenario, out, timing } => {
            let (cfg, base) = scenario.load()?;
            let mut outcome = runner::run(&cfg, &base)?;
            if timing {
                outcome.report.timing = Some(Timing { wall_seconds: outcome.elapsed.as_secs_f64() });
            }
            let dir = out_dir(out, &cfg, "");
            let files = write_run(&dir, &outcome)?;
            let s = &outcome.report.summary;
            println!(
                "{}: {} modes, {} samples, {} steps ({} rejected), method {}",
                cfg.name, s.modes, s.samples, s.steps, s.rejected_steps, s.method
            );
            print_certificates(&outcome.report.certificates);
            for w in &outcome.report.energy.warnings {
                println!("warning: {w}");
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(if outcome.report.passed() { 0 } else { EXIT_INVARIANT })
        }
        Command::Sweep { scenario, axis, values, tol, out } => {
            let (cfg, base) = scenario.load()?;
            let values = values.unwrap_or_else(|| axis.default_values());
            let tol = tol.unwrap_or_else(|| axis.default_tol());
            let report = runner::sweep(&cfg, &base, axis, &values, tol)?;
            let dir = out_dir(out, &cfg, "-sweep");
            let files = write_sweep(&dir, &report)?;
            println!("{}: {} over {:?}", cfg.name, to_json(&axis)?.trim().trim_matches('"'), values);
            print_certificates(&report.certificates);
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(if report.passed() { 0 } else { EXIT_INVARIANT })
        }
        Command::GraphSelftest { seed, out } => {
            let report = graph_selftest(seed);
            let table = report.table();
            print!("{table}");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("selftest.tsv"), &table)?;
                std::fs::write(dir.join("selftest.json"), to_json(&report)?)?;
            }
            let failed = report.failures().len();
            println!("{} of {} checks passed", report.rows.len() - failed, report.rows.len());
            Ok(if failed == 0 { 0 } else { EXIT_INVARIANT })
        }
        Command::Scenarios { action: ScenarioAction::List } => {
            for name in scenarios::list() {
                let cfg = scenarios::get(name)?;
                println!("{name:<22} {}", cfg.description);
            }
            Ok(0)
        }
        Command::Scenarios { action: ScenarioAction::Show { name } } => {
            print!("{}", scenarios::source(&name)?);
            Ok(0)
        }
    }
}
