use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tdc_plates::cli::{run, run_export, ExportOptions, FloorMode, RunConfig, RunOutput};
use tdc_plates::error::PlateError;
use tdc_plates::solver::SolverKind;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "TDC_PLATES_THREADS";

#[derive(Parser)]
#[command(name = "tdc-plates", version, about = "Kirchhoff plate structures in 3D with a c/dG finite element method")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the structure described by a config file.
    Solve { config: PathBuf },
    /// Run the convergence study named by a config file.
    Converge { config: PathBuf },
    /// Run a built-in demonstration.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Write selected artifacts for a solve or demo config.
    Export {
        config: PathBuf,
        /// Deformed geometry (legacy VTK).
        #[arg(long)]
        vtk: Option<PathBuf>,
        /// Displacement scale for the deformed geometry.
        #[arg(long)]
        scale: Option<f64>,
        /// Plain-text mesh dump.
        #[arg(long)]
        mesh_dump: Option<PathBuf>,
        /// Assembled operator in coordinate format.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Floor {
    /// Fix the floor perimeter and clamp its open side.
    ClampBoundary,
    /// Fix every floor node.
    FixFace,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Direct,
    Cg,
    Auto,
}

#[derive(Subcommand)]
enum Demo {
    /// Open box fixed to the floor, pushed on the x = 0 wall.
    Box {
        /// Plate thickness.
        #[arg(long = "t")]
        thickness: f64,
        #[arg(long, default_value_t = 8)]
        subdivisions: usize,
        #[arg(long, value_enum, default_value = "clamp-boundary")]
        floor: Floor,
        #[arg(long, value_enum, default_value = "direct")]
        solver: Solver,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

fn configure_threads() -> Result<(), PlateError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| PlateError::InvalidInput(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| PlateError::InvalidInput(format!("{THREADS_VAR}: {e}")))
}

fn print_output(out: &RunOutput) {
    print!("{}", out.report.to_text());
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
}

fn execute(cli: Cli) -> Result<(), PlateError> {
    configure_threads()?;
    match cli.command {
        Command::Solve { config } | Command::Converge { config } => {
            let cfg = RunConfig::from_file(&config)?;
            print_output(&run(&cfg)?);
        }
        Command::Demo {
            demo:
                Demo::Box {
                    thickness,
                    subdivisions,
                    floor,
                    solver,
                    out,
                    scale,
                },
        } => {
            let floor = match floor {
                Floor::FixFace => FloorMode::FixFace,
                Floor::ClampBoundary => FloorMode::ClampBoundary,
            };
            let mut cfg = RunConfig::box_demo(thickness, floor);
            cfg.mesh.subdivisions = Some(subdivisions);
            cfg.solver = match solver {
                Solver::Direct => SolverKind::Direct,
                Solver::Cg => SolverKind::Cg,
                Solver::Auto => SolverKind::Auto,
            };
            cfg.output.dir = out;
            cfg.output.scale = scale;
            print_output(&run(&cfg)?);
        }
        Command::Export {
            config,
            vtk,
            scale,
            mesh_dump,
            matrix,
        } => {
            let cfg = RunConfig::from_file(&config)?;
            let opts = ExportOptions {
                vtk,
                scale,
                mesh_dump,
                matrix,
            };
            for f in run_export(&cfg, &opts)? {
                eprintln!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
