use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msforge_core::Error;

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "msforge",
    version,
    about = "Solve, verify and mesh two-ended minimal surfaces"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all commands. Flags win over `MSFORGE_*` variables,
/// which win over the defaults.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Largest accepted period residual.
    #[arg(
        long,
        global = true,
        env = "MSFORGE_TOL_PERIOD",
        default_value_t = 1e-8
    )]
    pub tol_period: f64,
    /// Largest accepted symmetry deviation.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_symmetry: f64,
    /// Largest accepted relative error of the total curvature.
    #[arg(long, global = true, default_value_t = 1e-2)]
    pub tol_curvature: f64,
    /// Grid size per direction for meshes.
    #[arg(long, global = true, env = "MSFORGE_MESH_RES", default_value_t = 64)]
    pub res: usize,
    /// Seed for the random sample points of the symmetry checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

impl RunConfig {
    fn validate(&self) -> msforge_core::Result<()> {
        for (name, v) in [
            ("tol-period", self.tol_period),
            ("tol-symmetry", self.tol_symmetry),
            ("tol-curvature", self.tol_curvature),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.res < 2 {
            return Err(Error::Invalid(format!(
                "mesh resolution must be at least 2, got {}",
                self.res
            )));
        }
        Ok(())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Genus,
    Even,
    Weber,
    Catenoid,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the period conditions and write the parameters as JSON.
    Solve {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, short, default_value = "params.json")]
        out: PathBuf,
    },
    /// Check periods, residues, ends, total curvature and symmetries.
    Verify {
        /// Parameter file written by `solve` or `weber`.
        params: Option<PathBuf>,
        /// Use a built-in surface instead of a parameter file.
        #[arg(long, value_enum, conflicts_with = "params")]
        builtin: Option<Builtin>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Sample points per symmetry.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Triangulate the surface and write OBJ plus a JSON sidecar.
    Mesh {
        params: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "params")]
        builtin: Option<Builtin>,
        #[arg(long, short, default_value = "mesh.obj")]
        out: PathBuf,
        /// Also write a binary PLY file.
        #[arg(long)]
        ply: Option<PathBuf>,
        /// Circles of the grid; defaults to the mesh resolution.
        #[arg(long)]
        radial: Option<usize>,
        /// Rays of the grid; defaults to the mesh resolution.
        #[arg(long)]
        angular: Option<usize>,
        #[arg(long, requires = "r_max")]
        r_min: Option<f64>,
        #[arg(long, requires = "r_min")]
        r_max: Option<f64>,
        /// Mesh even if the periods do not close.
        #[arg(long)]
        force: bool,
    },
    /// Ramification tables and, with `--ends`, the candidate catalog.
    Classify {
        /// Rows for this genus only.
        #[arg(long, conflicts_with = "max_gamma")]
        gamma: Option<u32>,
        /// All rows up to this genus.
        #[arg(long)]
        max_gamma: Option<u32>,
        /// End profile for the candidate catalog, e.g. `1,3`.
        #[arg(long, value_delimiter = ',', requires = "gamma")]
        ends: Option<Vec<u32>>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sign obstructions for the excluded period configurations.
    Nonexist {
        /// Case name; all cases when omitted.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Solve the Weber family for the given genus.
    Weber {
        #[arg(long)]
        gamma: u32,
        #[arg(long, short, default_value = "params.json")]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Catenoid,
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Invalid(_) => "invalid",
        Error::MalformedCurve(_) => "malformed_curve",
        Error::NoConvergence(_) => "no_convergence",
        Error::Clearance { .. } => "clearance",
        Error::Branch(_) => "branch",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .config
        .validate()
        .and_then(|()| commands::run(cli.command, &cli.config));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.exit_code();
            let body = serde_json::json!({
                "error": { "kind": kind(&e), "message": e.to_string(), "exit_code": code }
            });
            eprintln!("{body}");
            ExitCode::from(code as u8)
        }
    }
}
