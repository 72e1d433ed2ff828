//! `qcgeom` command-line front end.

mod commands;
mod failure;
mod grid;
mod json;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcgeom::qc::Settings;

use crate::commands::LeafArgs;
use crate::failure::Failure;

#[derive(Parser)]
#[command(name = "qcgeom", version, about = "Curvature analysis of quasi-constant curvature metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Metric spec (TOML)
    #[arg(short = 'm', long = "metric")]
    metric: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads (default: one per core)
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 1e-7)]
    tol_iso: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_qc: f64,
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
}

impl Common {
    fn settings(&self) -> Result<Settings, Failure> {
        for (name, v) in [("tol-iso", self.tol_iso), ("tol-qc", self.tol_qc), ("fd-step", self.fd_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::input(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(Settings {
            tol_iso: self.tol_iso,
            tol_qc: self.tol_qc,
            fd_step: self.fd_step,
            seed: self.seed,
            ..Settings::default()
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify one point and report its curvature
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Coordinates, comma separated
        #[arg(short = 'p', long = "point", allow_hyphen_values = true)]
        point: String,
        /// Random planes for the anisotropy estimate
        #[arg(long, default_value_t = 64)]
        planes: usize,
    },
    /// Classify every point of a grid
    Scan {
        #[command(flatten)]
        common: Common,
        /// `lo:hi:count` per coordinate, comma separated
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Width of the neighbourhood |H - N| < epsilon of the isotropic set
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 64)]
        planes: usize,
    },
    /// Trace a curve inside a curvature leaf
    Leaf {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'p', long = "point", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Seed of the drift direction (default: --seed)
        #[arg(long)]
        direction_seed: Option<u64>,
        /// Write the trace as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also measure the holonomy defect around a loop of this size
        #[arg(long, num_args = 0..=1, default_missing_value = "0.01")]
        holonomy: Option<f64>,
    },
    /// Check the Gauss and Codazzi equations of the hypersurface data
    Immerse {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Grid used to pick the ambient curvature (default: --grid)
        #[arg(long, allow_hyphen_values = true)]
        kappa_grid: Option<String>,
    },
    /// Built-in example metrics
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the entries with their parameters
    List,
    /// Write an entry as a metric spec
    Emit {
        name: String,
        /// `key=value`, repeatable
        #[arg(long = "param", visible_alias = "params", value_parser = parse_key_value)]
        params: Vec<(String, String)>,
        /// Output file (default: stdout)
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("`{s}` is not key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        Some(0) => Err(Failure::input("--threads must be at least 1")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Failure::input(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, point, planes } => {
            let settings = common.settings()?;
            let loaded = commands::load(&common.metric)?;
            let report = commands::analyze(&loaded, &point, planes, settings)?;
            report.emit(common.json.as_deref())
        }
        Command::Scan {
            common,
            grid,
            epsilon,
            planes,
        } => {
            let settings = common.settings()?;
            let loaded = commands::load(&common.metric)?;
            let report = in_pool(common.threads, || commands::scan(&loaded, &grid, epsilon, planes, settings))??;
            report.emit(common.json.as_deref())
        }
        Command::Leaf {
            common,
            point,
            steps,
            step,
            direction_seed,
            csv,
            holonomy,
        } => {
            let settings = common.settings()?;
            let loaded = commands::load(&common.metric)?;
            let args = LeafArgs {
                point: &point,
                steps,
                step,
                direction_seed: direction_seed.unwrap_or(common.seed),
                holonomy,
                csv: csv.as_ref(),
            };
            let (report, abort) = commands::leaf(&loaded, args, settings)?;
            report.emit(common.json.as_deref())?;
            abort.map_or(Ok(()), Err)
        }
        Command::Immerse {
            common,
            grid,
            kappa_grid,
        } => {
            let settings = common.settings()?;
            let loaded = commands::load(&common.metric)?;
            let report = in_pool(common.threads, || {
                commands::immerse(&loaded, &grid, kappa_grid.as_deref(), settings)
            })??;
            report.emit(common.json.as_deref())
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                print!("{}", commands::catalog_list());
                Ok(())
            }
            CatalogAction::Emit { name, params, output } => {
                let toml = commands::catalog_emit(&name, &params)?;
                match output {
                    Some(path) => std::fs::write(&path, toml).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
                    None => {
                        print!("{toml}");
                        Ok(())
                    }
                }
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qcgeom: {f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
