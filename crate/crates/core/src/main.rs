use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use torus_vortex::experiments::{run_scenario, RunStatus};
use torus_vortex::scenario::{parse_real, Mode, ScenarioSpec, PRESETS};
use torus_vortex::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_PDE_COLLISION: u8 = 3;
const EXIT_BLOW_UP: u8 = 4;
const EXIT_FAILURE: u8 = 1;

/// Vortex dipoles on the unit torus: reduced dynamics and PDE comparison.
///
/// The worker thread count is read from RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "torus-vortex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig1-left, fig1-right, fig2-left, fig2-right) or a key = value config file.
    Run {
        source: String,
        /// Reduced-dynamics time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Horizon (t_cmp in compare mode).
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Comma-separated eps values; fractions such as 1/32 are accepted.
        #[arg(long)]
        eps: Option<String>,
        /// PDE grid size per side.
        #[arg(long)]
        grid: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// ode, pde or compare.
        #[arg(long)]
        mode: Option<String>,
    },
}

fn build_spec(
    source: &str,
    dt: Option<f64>,
    t_end: Option<f64>,
    eps: Option<String>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    mode: Option<String>,
) -> torus_vortex::Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::load(source)?;
    if let Some(m) = mode {
        spec.mode = m.parse::<Mode>()?;
    }
    if let Some(dt) = dt {
        spec.dt = dt;
    }
    if let Some(t) = t_end {
        spec.t_end = t;
    }
    if let Some(list) = eps {
        spec.eps_list = list
            .split(',')
            .map(|s| parse_real(s).ok_or_else(|| Error::Scenario(format!("bad eps value '{s}'"))))
            .collect::<torus_vortex::Result<_>>()?;
    }
    if let Some(g) = grid {
        spec.grid = g;
    }
    if let Some(o) = out {
        spec.output_dir = o;
    }
    Ok(spec)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Scenario(_) | Error::Resolution { .. } | Error::NearCollision { .. } => {
            EXIT_INVALID
        }
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let Command::Run {
        source,
        dt,
        t_end,
        eps,
        grid,
        out,
        mode,
    } = Cli::parse().command;

    let result = build_spec(&source, dt, t_end, eps, grid, out, mode).and_then(|spec| {
        let report = run_scenario(&spec)?;
        Ok((spec, report))
    });
    match result {
        Ok((spec, report)) => {
            for line in &report.summary {
                println!("{line}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            match report.status {
                RunStatus::Annihilation { t } if spec.mode == Mode::Pde => {
                    eprintln!("collision stop: vortex annihilation at t = {t}");
                    ExitCode::from(EXIT_PDE_COLLISION)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, Error::Scenario(_)) && !PRESETS.contains(&source.as_str()) {
                eprintln!("presets: {}", PRESETS.join(", "));
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
