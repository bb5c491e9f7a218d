//! Reduced dynamical law `ä_j = -(1/π) ∇_{a_j} W(a; q_*(a))`.
//!
//! Integrated as the first-order system `(a, ȧ)` with classical fixed-step
//! RK4. Positions stay lifted so the momentum branch `q_*` stays continuous;
//! the conserved quantity is `W(a; q_*(a)) + (π/2) Σ_j |ȧ_j|²`.

use crate::energy::{grad_w, q_star, renormalized_w, VortexConfig};
use crate::error::{Error, Result};
use crate::geometry::{min_pair_distance, LiftedPoint, Vec2};
use crate::green::GreenEvaluator;
use std::f64::consts::PI;

/// Time step used for the published dipole runs.
pub const DEFAULT_DT: f64 = 5e-6;

/// Integration stops once two vortices come closer than this.
pub const DEFAULT_COLLISION_DISTANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub t: f64,
    pub config: VortexConfig,
    pub velocities: Vec<Vec2>,
}

impl ReducedState {
    pub fn at_rest(config: VortexConfig) -> Self {
        let velocities = vec![Vec2::ZERO; config.len()];
        Self {
            t: 0.0,
            config,
            velocities,
        }
    }

    pub fn new(config: VortexConfig, velocities: Vec<Vec2>) -> Result<Self> {
        if velocities.len() != config.len() {
            return Err(Error::InvalidArgument(format!(
                "{} velocities for {} vortices",
                velocities.len(),
                config.len()
            )));
        }
        Ok(Self {
            t: 0.0,
            config,
            velocities,
        })
    }

    pub fn positions(&self) -> &[LiftedPoint] {
        self.config.positions()
    }

    pub fn branch_offset(&self) -> [i64; 2] {
        self.config.branch_offset()
    }

    pub fn min_distance(&self) -> f64 {
        min_pair_distance(self.positions()).map_or(f64::INFINITY, |(d, _, _)| d)
    }
}

/// Time derivative of `(a, ȧ)`: the velocities and `-(1/π) ∇W`.
pub fn rhs(state: &ReducedState, green: &GreenEvaluator) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    let acc = grad_w(&state.config, green)?
        .into_iter()
        .map(|g| (-1.0 / PI) * g)
        .collect();
    Ok((state.velocities.clone(), acc))
}

fn offset(state: &ReducedState, dt: f64, dx: &[Vec2], dv: &[Vec2]) -> ReducedState {
    let positions = state
        .positions()
        .iter()
        .zip(dx)
        .map(|(&p, &d)| p + dt * d)
        .collect();
    ReducedState {
        t: state.t + dt,
        config: state.config.with_positions(positions),
        velocities: state.velocities.iter().zip(dv).map(|(&v, &d)| v + dt * d).collect(),
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step(state: &ReducedState, dt: f64, green: &GreenEvaluator) -> Result<ReducedState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be finite and nonzero, got {dt}")));
    }
    let (x1, v1) = rhs(state, green)?;
    let (x2, v2) = rhs(&offset(state, 0.5 * dt, &x1, &v1), green)?;
    let (x3, v3) = rhs(&offset(state, 0.5 * dt, &x2, &v2), green)?;
    let (x4, v4) = rhs(&offset(state, dt, &x3, &v3), green)?;
    let combine = |a: &[Vec2], b: &[Vec2], c: &[Vec2], d: &[Vec2]| -> Vec<Vec2> {
        (0..a.len())
            .map(|j| (1.0 / 6.0) * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]))
            .collect()
    };
    let mut next = offset(state, dt, &combine(&x1, &x2, &x3, &x4), &combine(&v1, &v2, &v3, &v4));
    next.t = state.t + dt;
    Ok(next)
}

/// `W(a; q_*(a)) + (π/2) Σ_j |ȧ_j|²`.
pub fn conserved_energy(state: &ReducedState, green: &GreenEvaluator) -> Result<f64> {
    let kinetic: f64 = state.velocities.iter().map(|v| v.norm_sq()).sum();
    Ok(renormalized_w(&state.config, green)? + 0.5 * PI * kinetic)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationParams {
    pub dt: f64,
    pub t_end: f64,
    /// Record a sample every this many steps.
    pub output_stride: usize,
    pub collision_distance: f64,
}

impl IntegrationParams {
    pub fn new(dt: f64, t_end: f64, output_stride: usize) -> Self {
        Self {
            dt,
            t_end,
            output_stride,
            collision_distance: DEFAULT_COLLISION_DISTANCE,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidArgument("output stride must be at least 1".into()));
        }
        if !(self.collision_distance > 0.0) {
            return Err(Error::InvalidArgument("collision distance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub positions: Vec<LiftedPoint>,
    pub velocities: Vec<Vec2>,
    pub conserved_energy: f64,
    pub q_star: Vec2,
}

impl TrajectorySample {
    pub fn torus_positions(&self) -> Vec<LiftedPoint> {
        self.positions.iter().map(|p| p.torus_image()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    Collision { t: f64, distance: f64 },
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub degrees: Vec<i32>,
    pub branch_offset: [i64; 2],
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    /// State at the last completed step; may fall between output samples.
    pub final_state: ReducedState,
    pub final_energy: f64,
}

impl TrajectoryRecord {
    pub fn initial_energy(&self) -> f64 {
        self.samples[0].conserved_energy
    }

    /// Largest relative deviation of the conserved quantity from its initial value.
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.initial_energy();
        self.samples
            .iter()
            .map(|s| s.conserved_energy)
            .chain(std::iter::once(self.final_energy))
            .map(|e| (e - e0).abs() / e0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_y(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.positions.iter().map(|p| p.y.abs()))
            .fold(0.0, f64::max)
    }

    /// Lifted positions at time `t` by cubic Hermite interpolation between samples.
    pub fn positions_at(&self, t: f64) -> Option<Vec<LiftedPoint>> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.t <= t).max(1) - 1;
        let a = &self.samples[idx];
        let Some(b) = self.samples.get(idx + 1) else {
            return Some(a.positions.clone());
        };
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some(
            (0..a.positions.len())
                .map(|j| {
                    let p = h00 * a.positions[j].as_vec()
                        + (h10 * h) * a.velocities[j]
                        + h01 * b.positions[j].as_vec()
                        + (h11 * h) * b.velocities[j];
                    p.into()
                })
                .collect(),
        )
    }
}

fn sample(state: &ReducedState, green: &GreenEvaluator) -> Result<TrajectorySample> {
    Ok(TrajectorySample {
        t: state.t,
        positions: state.positions().to_vec(),
        velocities: state.velocities.clone(),
        conserved_energy: conserved_energy(state, green)?,
        q_star: q_star(&state.config),
    })
}

/// Integrates from `config` with initial velocities `v0` (zero when `None`).
///
/// Stops at `t_end` or as soon as the closest pair is nearer than the
/// collision distance, whichever comes first.
pub fn integrate(
    config: &VortexConfig,
    v0: Option<&[Vec2]>,
    params: &IntegrationParams,
    green: &GreenEvaluator,
) -> Result<TrajectoryRecord> {
    params.validate()?;
    let mut state = match v0 {
        Some(v) => ReducedState::new(config.clone(), v.to_vec())?,
        None => ReducedState::at_rest(config.clone()),
    };
    let steps = (params.t_end / params.dt).round().max(1.0) as u64;
    let mut samples = vec![sample(&state, green)?];
    let mut termination = Termination::Completed;
    for n in 1..=steps {
        let mut next = rk4_step(&state, params.dt, green)?;
        // Multiply rather than accumulate so sample times carry no drift.
        next.t = n as f64 * params.dt;
        state = next;
        let distance = state.min_distance();
        if n % params.output_stride as u64 == 0 {
            samples.push(sample(&state, green)?);
        }
        if distance < params.collision_distance {
            termination = Termination::Collision { t: state.t, distance };
            break;
        }
    }
    let final_energy = conserved_energy(&state, green)?;
    Ok(TrajectoryRecord {
        final_energy,
        degrees: config.degrees().to_vec(),
        branch_offset: config.branch_offset(),
        dt: params.dt,
        samples,
        termination,
        final_state: state,
    })
}
