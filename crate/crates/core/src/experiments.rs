//! Scenario execution: reduced-dynamics runs, PDE runs with vortex tracking,
//! and the ODE-vs-PDE convergence comparison.

use crate::dynamics::{integrate, IntegrationParams, Termination, TrajectoryRecord, TrajectorySample};
use crate::energy::{q_star, VortexConfig};
use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Vec2};
use crate::green::{build_green, GreenEvaluator, MIN_TRUNCATION_ORDER};
use crate::harmonic_map::initial_data;
use crate::nlw::{default_dt, diagnostics, Diagnostics, NlwSolver};
use crate::output::{
    coordinates_svg, trajectories_svg, write_convergence_csv, write_diagnostics_csv, write_trajectory_csv,
    DiagnosticsRow,
};
use crate::scenario::{Mode, ScenarioSpec};
use crate::vortices::{close_tracks, detect_vortices, track_from, DetectedVortex, Track};
use std::path::{Path, PathBuf};

/// Relative Hamiltonian drift accepted before the PDE step is halved.
pub const PDE_DRIFT_TOLERANCE: f64 = 1e-3;
/// Halvings tried after the default PDE step.
pub const MAX_STEP_HALVINGS: u32 = 4;
/// Longest PDE step, so that tracks are sampled densely enough for `dev`.
pub const MAX_FRAME_INTERVAL: f64 = 1e-3;
/// Expected bound on vortex displacement between consecutive PDE frames.
pub const TRACK_MAX_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeParams {
    pub eps: f64,
    pub grid: usize,
    /// Fixed step; `None` starts from the default and halves on excessive drift.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Stop as soon as the number of detected vortices changes.
    pub stop_on_annihilation: bool,
}

#[derive(Clone, Debug)]
pub struct PdeFrame {
    pub diagnostics: Diagnostics,
    pub detections: Vec<DetectedVortex>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PdeStop {
    Completed,
    /// First frame at which the vortex count differed from the initial one.
    Annihilation { t: f64 },
}

#[derive(Clone, Debug)]
pub struct PdeRun {
    pub eps: f64,
    pub grid: usize,
    pub dt: f64,
    pub frames: Vec<PdeFrame>,
    /// Tracks up to and including the first frame with an annihilation,
    /// where annihilated pairs end at their midpoint.
    pub tracks: Vec<Track>,
    pub stop: PdeStop,
    pub max_relative_drift: f64,
}

impl PdeRun {
    /// Frames covered by the tracks.
    pub fn tracked_frames(&self) -> &[PdeFrame] {
        let n = self.tracks.first().map_or(0, |t| t.positions.len());
        &self.frames[..n]
    }

    /// Tracked positions as trajectory samples; velocities by finite differences.
    pub fn samples(&self, config: &VortexConfig) -> Vec<TrajectorySample> {
        let frames = self.tracked_frames();
        let n = frames.len();
        (0..n)
            .map(|f| {
                let positions: Vec<LiftedPoint> = self.tracks.iter().map(|t| t.positions[f]).collect();
                let (a, b) = (f.saturating_sub(1), (f + 1).min(n - 1));
                let span = frames[b].diagnostics.t - frames[a].diagnostics.t;
                let velocities = self
                    .tracks
                    .iter()
                    .map(|t| if span > 0.0 { (1.0 / span) * (t.positions[b] - t.positions[a]) } else { Vec2::ZERO })
                    .collect();
                TrajectorySample {
                    t: frames[f].diagnostics.t,
                    q_star: q_star(&config.with_positions(positions.clone())),
                    positions,
                    velocities,
                    conserved_energy: frames[f].diagnostics.hamiltonian,
                }
            })
            .collect()
    }

    pub fn diagnostics_rows(&self) -> Vec<DiagnosticsRow> {
        let h0 = self.frames[0].diagnostics.hamiltonian;
        self.frames
            .iter()
            .map(|f| DiagnosticsRow {
                diagnostics: f.diagnostics,
                relative_drift: (f.diagnostics.hamiltonian - h0) / h0.abs().max(f64::MIN_POSITIVE),
                vortex_count: f.detections.len(),
            })
            .collect()
    }
}

fn run_pde_with_step(config: &VortexConfig, params: &PdeParams, dt: f64, green: &GreenEvaluator) -> Result<PdeRun> {
    let mut state = initial_data(config, params.eps, green, params.grid)?;
    let mut solver = NlwSolver::new(params.grid, params.eps)?;
    let steps = (params.t_end / dt).ceil().max(1.0) as u64;
    let first = PdeFrame {
        diagnostics: diagnostics(&state),
        detections: detect_vortices(&state),
    };
    let h0 = first.diagnostics.hamiltonian;
    let initial_count = first.detections.len();
    let mut frames = vec![first];
    let mut stop = PdeStop::Completed;
    let mut max_drift: f64 = 0.0;
    for n in 1..=steps {
        solver.step(&mut state, dt)?;
        state.t = n as f64 * dt;
        let frame = PdeFrame {
            diagnostics: diagnostics(&state),
            detections: detect_vortices(&state),
        };
        max_drift = max_drift.max((frame.diagnostics.hamiltonian - h0).abs() / h0.abs().max(f64::MIN_POSITIVE));
        let changed = frame.detections.len() != initial_count;
        if changed && matches!(stop, PdeStop::Completed) {
            stop = PdeStop::Annihilation { t: state.t };
        }
        frames.push(frame);
        if changed && params.stop_on_annihilation {
            break;
        }
    }
    let tracked = match stop {
        PdeStop::Completed => frames.len(),
        PdeStop::Annihilation { t } => frames.iter().position(|f| f.diagnostics.t >= t).unwrap_or(frames.len()),
    };
    let detections: Vec<Vec<DetectedVortex>> = frames[..tracked].iter().map(|f| f.detections.clone()).collect();
    let mut tracks = track_from(config.positions(), config.degrees(), &detections, TRACK_MAX_STEP)?;
    if let Some(frame) = frames.get(tracked) {
        close_tracks(&mut tracks, &frame.detections);
    }
    Ok(PdeRun {
        eps: params.eps,
        grid: params.grid,
        dt,
        frames,
        tracks,
        stop,
        max_relative_drift: max_drift,
    })
}

/// Runs the PDE from the constructed initial data, detecting vortices every step.
///
/// Without a fixed step the default `0.1 ε √κ_ε` (capped at
/// [`MAX_FRAME_INTERVAL`]) is halved until the relative Hamiltonian drift
/// stays below [`PDE_DRIFT_TOLERANCE`].
pub fn run_pde(config: &VortexConfig, params: &PdeParams, green: &GreenEvaluator) -> Result<PdeRun> {
    if !(params.t_end.is_finite() && params.t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {}", params.t_end)));
    }
    if let Some(dt) = params.dt {
        return run_pde_with_step(config, params, dt, green);
    }
    let mut dt = default_dt(params.eps).min(MAX_FRAME_INTERVAL);
    let mut run = run_pde_with_step(config, params, dt, green)?;
    for _ in 0..MAX_STEP_HALVINGS {
        if run.max_relative_drift < PDE_DRIFT_TOLERANCE {
            break;
        }
        dt *= 0.5;
        run = run_pde_with_step(config, params, dt, green)?;
    }
    Ok(run)
}

/// `dev(ε)`: largest periodic distance between matched PDE tracks and ODE
/// paths over the tracked frames with `t ≤ t_max`.
pub fn deviation(run: &PdeRun, ode: &TrajectoryRecord, t_max: f64) -> f64 {
    let mut dev: f64 = 0.0;
    for (f, frame) in run.tracked_frames().iter().enumerate() {
        let t = frame.diagnostics.t;
        if t > t_max {
            break;
        }
        let Some(reference) = ode.positions_at(t) else { break };
        for (track, r) in run.tracks.iter().zip(&reference) {
            dev = dev.max(track.positions[f].periodic_distance(*r));
        }
    }
    dev
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub dev: f64,
    /// End of the window over which `dev` was taken.
    pub t_window: f64,
    pub pde_dt: f64,
    pub stop: PdeStop,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub ode: TrajectoryRecord,
    pub runs: Vec<PdeRun>,
    pub rows: Vec<ConvergenceRow>,
}

impl Comparison {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].dev < w[0].dev)
    }
}

/// Compares PDE vortex paths with the reduced dynamics for each ε.
///
/// The window is `t ≤ t_cmp`, cut short at an ODE collision or a PDE
/// annihilation, since neither side has vortex paths beyond that.
pub fn compare(spec: &ScenarioSpec, green: &GreenEvaluator) -> Result<Comparison> {
    let config = spec.config()?;
    let t_cmp = spec.t_end;
    let ode = integrate(&config, None, &IntegrationParams::new(spec.dt, t_cmp, spec.output_stride()), green)?;
    let ode_end = ode.samples.last().map_or(0.0, |s| s.t);
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for &eps in &spec.eps_list {
        let params = PdeParams {
            eps,
            grid: spec.grid,
            dt: spec.pde_dt,
            t_end: t_cmp,
            stop_on_annihilation: true,
        };
        let run = run_pde(&config, &params, green)?;
        let tracked_end = run.tracked_frames().last().map_or(0.0, |f| f.diagnostics.t);
        let t_window = t_cmp.min(ode_end).min(tracked_end);
        rows.push(ConvergenceRow {
            eps,
            dev: deviation(&run, &ode, t_window),
            t_window,
            pde_dt: run.dt,
            stop: run.stop,
        });
        runs.push(run);
    }
    Ok(Comparison { ode, runs, rows })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Reduced dynamics stopped at a collision.
    Collision { t: f64, distance: f64 },
    /// PDE vortex count changed.
    Annihilation { t: f64 },
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub status: RunStatus,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn fmt_eps(eps: f64) -> String {
    let inv = 1.0 / eps;
    if (inv - inv.round()).abs() < 1e-9 {
        format!("1/{}", inv.round())
    } else {
        format!("{eps}")
    }
}

fn write_text(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(path, text)?;
    files.push(path.to_path_buf());
    Ok(())
}

fn write_plots(
    spec: &ScenarioSpec,
    dir: &Path,
    title: &str,
    degrees: &[i32],
    samples: &[TrajectorySample],
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let count = degrees.len();
    let paths: Vec<Vec<LiftedPoint>> = (0..count).map(|j| samples.iter().map(|s| s.positions[j]).collect()).collect();
    write_text(&dir.join("trajectories.svg"), &trajectories_svg(title, degrees, &paths), files)?;
    if spec.wants_coordinate_plot() {
        let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
        write_text(&dir.join("coordinates.svg"), &coordinates_svg(title, &times, &paths), files)?;
    }
    Ok(())
}

fn ode_samples(record: &TrajectoryRecord, green: &GreenEvaluator) -> Result<Vec<TrajectorySample>> {
    let mut samples = record.samples.clone();
    let last = &record.final_state;
    if samples.last().is_none_or(|s| s.t < last.t) {
        samples.push(TrajectorySample {
            t: last.t,
            positions: last.positions().to_vec(),
            velocities: last.velocities.clone(),
            conserved_energy: crate::dynamics::conserved_energy(last, green)?,
            q_star: q_star(&last.config),
        });
    }
    Ok(samples)
}

fn run_ode_mode(spec: &ScenarioSpec, green: &GreenEvaluator) -> Result<RunReport> {
    let config = spec.config()?;
    let record = integrate(&config, None, &IntegrationParams::new(spec.dt, spec.t_end, spec.output_stride()), green)?;
    let dir = &spec.output_dir;
    let mut files = Vec::new();
    let samples = ode_samples(&record, green)?;
    let csv = dir.join("trajectory.csv");
    write_trajectory_csv(&csv, &samples)?;
    files.push(csv);
    write_plots(spec, dir, &spec.name, config.degrees(), &samples, &mut files)?;
    let mut summary = vec![format!(
        "{}: reduced dynamics, dt = {}, relative drift of conserved energy = {:e}",
        spec.name,
        spec.dt,
        record.max_relative_drift()
    )];
    let status = match record.termination {
        Termination::Completed => {
            summary.push(format!("completed at t = {}", record.final_state.t));
            RunStatus::Completed
        }
        Termination::Collision { t, distance } => {
            summary.push(format!("collision at t = {t} (separation {distance:e})"));
            RunStatus::Collision { t, distance }
        }
    };
    Ok(RunReport { status, files, summary })
}

fn write_pde_outputs(
    config: &VortexConfig,
    run: &PdeRun,
    dir: &Path,
    traj_name: &str,
    diag_name: &str,
    files: &mut Vec<PathBuf>,
) -> Result<Vec<TrajectorySample>> {
    let samples = run.samples(config);
    let traj = dir.join(traj_name);
    write_trajectory_csv(&traj, &samples)?;
    files.push(traj);
    let diag = dir.join(diag_name);
    write_diagnostics_csv(&diag, &run.diagnostics_rows())?;
    files.push(diag);
    Ok(samples)
}

fn run_pde_mode(spec: &ScenarioSpec, green: &GreenEvaluator) -> Result<RunReport> {
    let config = spec.config()?;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    let mut status = RunStatus::Completed;
    for &eps in &spec.eps_list {
        let dir = if spec.eps_list.len() == 1 {
            spec.output_dir.clone()
        } else {
            spec.output_dir.join(format!("eps-{eps}"))
        };
        std::fs::create_dir_all(&dir)?;
        let params = PdeParams {
            eps,
            grid: spec.grid,
            dt: spec.pde_dt,
            t_end: spec.t_end,
            stop_on_annihilation: true,
        };
        let run = run_pde(&config, &params, green)?;
        let samples = write_pde_outputs(&config, &run, &dir, "trajectory.csv", "diagnostics.csv", &mut files)?;
        let title = format!("{} (PDE, eps = {})", spec.name, fmt_eps(eps));
        write_plots(spec, &dir, &title, config.degrees(), &samples, &mut files)?;
        summary.push(format!(
            "eps = {}: grid {}, dt = {:e}, relative Hamiltonian drift = {:e}",
            fmt_eps(eps),
            run.grid,
            run.dt,
            run.max_relative_drift
        ));
        match run.stop {
            PdeStop::Completed => summary.push(format!("  completed at t = {}", spec.t_end)),
            PdeStop::Annihilation { t } => {
                summary.push(format!("  vortex annihilation at t = {t}"));
                if status == RunStatus::Completed {
                    status = RunStatus::Annihilation { t };
                }
            }
        }
    }
    Ok(RunReport { status, files, summary })
}

fn run_compare_mode(spec: &ScenarioSpec, green: &GreenEvaluator) -> Result<RunReport> {
    let config = spec.config()?;
    let cmp = compare(spec, green)?;
    let dir = &spec.output_dir;
    let mut files = Vec::new();
    let samples = ode_samples(&cmp.ode, green)?;
    let csv = dir.join("trajectory.csv");
    write_trajectory_csv(&csv, &samples)?;
    files.push(csv);
    write_plots(spec, dir, &spec.name, config.degrees(), &samples, &mut files)?;
    for run in &cmp.runs {
        let tag = format!("eps-{}", run.eps);
        write_pde_outputs(
            &config,
            run,
            dir,
            &format!("pde-trajectory-{tag}.csv"),
            &format!("diagnostics-{tag}.csv"),
            &mut files,
        )?;
    }
    let conv = dir.join("convergence.csv");
    let pairs: Vec<(f64, f64)> = cmp.rows.iter().map(|r| (r.eps, r.dev)).collect();
    write_convergence_csv(&conv, &pairs)?;
    files.push(conv);

    let mut summary = vec![format!("{}: ODE vs PDE, t_cmp = {}", spec.name, spec.t_end)];
    for r in &cmp.rows {
        summary.push(format!(
            "eps = {:>6}: dev = {:.6} over t <= {:.4} (pde dt = {:e})",
            fmt_eps(r.eps),
            r.dev,
            r.t_window,
            r.pde_dt
        ));
    }
    summary.push(if cmp.strictly_decreasing() {
        "dev is strictly decreasing in eps".to_string()
    } else {
        "WARNING: dev is not strictly decreasing in eps".to_string()
    });
    Ok(RunReport {
        status: RunStatus::Completed,
        files,
        summary,
    })
}

/// Validates `spec`, runs it, and writes every output file into `spec.output_dir`.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunReport> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.output_dir)?;
    let green = build_green(MIN_TRUNCATION_ORDER)?;
    match spec.mode {
        Mode::Ode => run_ode_mode(spec, &green),
        Mode::Pde => run_pde_mode(spec, &green),
        Mode::Compare => run_compare_mode(spec, &green),
    }
}
