//! `teachsim` command-line interface.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use teachsim::experiments::ParamPath;
use teachsim::{
    break_length_study, optimize_constant_u, parameter_sweep, parse_config_with_warnings, pr1_config, render_svg, run,
    write_csv, Objective, PlotScales, SimConfig, SimError, Trajectory,
};

#[derive(Parser)]
#[command(name = "teachsim", version, about = "Teacher-student learning dynamics simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: Outputs,
    },
    /// Run the built-in two-component school day.
    #[command(name = "replicate-pr1")]
    ReplicatePr1 {
        #[command(flatten)]
        out: Outputs,
    },
    /// Terminal knowledge for several break lengths of a uniform day.
    Breaks {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated break lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        tp: Vec<f64>,
    },
    /// One run per value of a parameter (b, k1..k4, P0, dt, alphaN, gammaN).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Grid search for the constant requirement level U.
    #[command(name = "optimize-u")]
    OptimizeU {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Z)]
        objective: ObjectiveArg,
    },
}

#[derive(clap::Args)]
struct Outputs {
    /// Write the trajectory as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG chart.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Channels to chart (default: Z, last category, r, P).
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Z,
    Pr,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<SimError> for Failure {
    fn from(err: SimError) -> Self {
        if err.is_validation() {
            Failure::Invalid(err.to_string())
        } else {
            Failure::Io(err.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let traj = run(&cfg)?;
            emit(&traj, &out)
        }
        Command::ReplicatePr1 { out } => {
            let traj = run(&pr1_config())?;
            emit(&traj, &out)
        }
        Command::Breaks { config, tp } => {
            let cfg = load_config(&config)?;
            print!("{}", break_length_study(&cfg, &tp)?.to_table());
            Ok(())
        }
        Command::Sweep { config, param, values } => {
            let cfg = load_config(&config)?;
            // resolve before running anything so a bad path fails fast
            ParamPath::resolve(&param, cfg.params.n)?;
            print!("{}", parameter_sweep(&cfg, &param, &values)?.to_table());
            Ok(())
        }
        Command::OptimizeU {
            config,
            min,
            max,
            grid,
            objective,
        } => {
            let cfg = load_config(&config)?;
            let objective = match objective {
                ObjectiveArg::Z => Objective::TerminalZ,
                ObjectiveArg::Pr => Objective::TerminalPr,
            };
            let opt = optimize_constant_u(&cfg, min, max, grid, objective)?;
            println!("U,objective");
            for (u, v) in &opt.evaluations {
                println!("{},{}", teachsim::csv::format_g17(*u), teachsim::csv::format_g17(*v));
            }
            println!(
                "# best U = {} (objective {})",
                teachsim::csv::format_g17(opt.u_star),
                teachsim::csv::format_g17(opt.value)
            );
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<SimConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let (cfg, warnings) =
        parse_config_with_warnings(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    for w in warnings {
        eprintln!("{}: {w}", path.display());
    }
    Ok(cfg)
}

fn emit(traj: &Trajectory, out: &Outputs) -> Result<(), Failure> {
    if let Some(path) = &out.csv {
        let mut buf = Vec::new();
        write_csv(traj, &mut buf)?;
        write_atomically(path, &buf)?;
    }
    if let Some(path) = &out.svg {
        let channels: Vec<String> = match &out.channels {
            Some(c) => c.clone(),
            None => vec!["Z".into(), format!("Z{}", traj.n()), "r".into(), "P".into()],
        };
        let names: Vec<&str> = channels.iter().map(String::as_str).collect();
        let svg = render_svg(traj, &names, &PlotScales::default())?;
        write_atomically(path, svg.as_bytes())?;
    }
    let last = traj.last();
    println!(
        "t = {}  Z = {}  Pr = {}  r = {}",
        teachsim::csv::format_g17(last.t),
        teachsim::csv::format_g17(last.z_total),
        teachsim::csv::format_g17(last.pr),
        teachsim::csv::format_g17(last.r)
    );
    Ok(())
}

/// Writes to a temporary file beside `path` and renames it into place.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
