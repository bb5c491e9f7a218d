//! Canonical harmonic map on the torus and well-prepared initial data.
//!
//! The current of the canonical harmonic map `H(x; a, q)` is
//!
//! ```text
//! j_H(x) = -Σ_j d_j 𝕁 ∇F(x - a_j) + 𝕁 q
//! ```
//!
//! which is divergence free, has curl `2π Σ d_j δ_{a_j}` and mean `𝕁 q`. Its
//! phase is recovered on the grid by integrating edge increments along a
//! spanning tree; the remaining (co-tree) edges must close modulo 2π, which
//! holds exactly when `q` lies in its lattice coset.

use crate::core_profile::CoreProfile;
use crate::energy::{q_star, VortexConfig};
use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Vec2};
use crate::green::GreenEvaluator;
use crate::nlw::FieldState;
use crate::spectral::Complex;
use rayon::prelude::*;
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Sign in front of `Σ d_j 𝕁 ∇F(x - a_j)`, fixed by the winding check in the tests.
pub const CURRENT_SIGN: f64 = -1.0;

/// Largest tolerated co-tree closure defect (radians).
pub const CLOSURE_TOLERANCE: f64 = 1e-3;

/// Vortices closer than this to a grid line are nudged off it.
pub const GRID_NUDGE: f64 = 1e-9;

/// Current of the canonical harmonic map sampled at the grid nodes, split into
/// a screened point-vortex part and a smooth band-limited part.
#[derive(Clone, Debug)]
pub struct CurrentField {
    pub m: usize,
    pub values: Vec<Vec2>,
    /// Screened real-space images; divergence free pointwise.
    pub singular: Vec<Vec2>,
    /// Fourier-side remainder plus the constant `𝕁 q`.
    pub smooth: Vec<Vec2>,
    /// `values - Σ d ∇arg` with the nearest image of each vortex, formed from
    /// the same displacement as the current so the near-core cancellation is exact.
    pub remainder: Vec<Vec2>,
}

#[derive(Clone, Debug)]
pub struct PhaseGrid {
    pub m: usize,
    pub theta: Vec<f64>,
    pub current: CurrentField,
    pub max_closure_defect: f64,
}

fn node(i: usize, m: usize) -> LiftedPoint {
    let h = 1.0 / m as f64;
    LiftedPoint::new((i % m) as f64 * h, (i / m) as f64 * h)
}

/// Moves vortices lying on a grid line by `GRID_NUDGE` so that no edge passes through a core.
pub fn nudge_off_grid(config: &VortexConfig, m: usize) -> VortexConfig {
    let h = 1.0 / m as f64;
    let nudge = |c: f64| {
        let off = c / h - (c / h).round();
        if off.abs() * h < GRID_NUDGE {
            c + GRID_NUDGE
        } else {
            c
        }
    };
    let positions = config
        .positions()
        .iter()
        .map(|p| LiftedPoint::new(nudge(p.x), nudge(p.y)))
        .collect();
    config.with_positions(positions)
}

fn check_grid(m: usize) -> Result<()> {
    if m < 64 || !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("grid size must be a power of two >= 64, got {m}")));
    }
    Ok(())
}

/// Samples `j_H` at the grid nodes. Vortices should already be off the grid lines.
pub fn canonical_current(config: &VortexConfig, green: &GreenEvaluator, m: usize) -> Result<CurrentField> {
    check_grid(m)?;
    let jq = q_star(config).rotate_j();
    let parts: Vec<(Vec2, Vec2, Vec2)> = (0..m * m)
        .into_par_iter()
        .map(|i| {
            let x = node(i, m);
            let (mut s, mut r, mut winding) = (Vec2::ZERO, jq, Vec2::ZERO);
            for (a, &d) in config.positions().iter().zip(config.degrees()) {
                let v = (x - *a).wrap_centered();
                if v.norm() <= crate::green::SINGULARITY_CUTOFF {
                    return Err(Error::Singularity { x: x.x, y: x.y });
                }
                let w = CURRENT_SIGN * d as f64;
                s += w * green.screened_gradient(v).rotate_j();
                r += w * green.smooth_gradient(v).rotate_j();
                winding += d as f64 * arg_gradient(v);
            }
            Ok((s, r, winding))
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(parts.len());
    let mut singular = Vec::with_capacity(parts.len());
    let mut smooth = Vec::with_capacity(parts.len());
    let mut remainder = Vec::with_capacity(parts.len());
    for (s, r, w) in parts {
        values.push(s + r);
        remainder.push((s - w) + r);
        singular.push(s);
        smooth.push(r);
    }
    Ok(CurrentField {
        m,
        values,
        singular,
        smooth,
        remainder,
    })
}

/// Gradient of the polar angle, `(-y, x)/|v|²`.
fn arg_gradient(v: Vec2) -> Vec2 {
    (1.0 / v.norm_sq()) * v.rotate_jt()
}

/// `∇arg` of the node's nearest image minus that of the edge's image; zero when they coincide.
fn image_shift(x: LiftedPoint, p: LiftedPoint, v_edge: Vec2) -> Vec2 {
    let v_node = (x - p).wrap_centered();
    if (v_node - v_edge).norm() < 0.5 {
        Vec2::ZERO
    } else {
        arg_gradient(v_node) - arg_gradient(v_edge)
    }
}

fn wrap_angle(a: f64) -> f64 {
    a - 2.0 * PI * (a / (2.0 * PI)).round()
}

/// Phase increment of `j_H` along the grid edge `from → from + step`.
///
/// The winding part `Σ d_j Δarg` is exact; the smooth remainder is
/// integrated with the trapezoid rule.
fn edge_increment(current: &CurrentField, config: &VortexConfig, from: usize, to: usize, step: Vec2) -> f64 {
    let m = current.m;
    let a = node(from, m);
    let b = a + step;
    let mid = a + 0.5 * step;
    let mut winding = 0.0;
    let mut rem_a = current.remainder[from];
    let mut rem_b = current.remainder[to];
    for (p, &d) in config.positions().iter().zip(config.degrees()) {
        // Image of the vortex nearest to this edge.
        let image = LiftedPoint::from(mid.as_vec() - mid.periodic_displacement(*p));
        let va = a - image;
        let vb = b - image;
        let d = d as f64;
        winding += d * wrap_angle(vb.y.atan2(vb.x) - va.y.atan2(va.x));
        rem_a += d * image_shift(a, *p, va);
        rem_b += d * image_shift(b, *p, vb);
    }
    winding + 0.5 * (rem_a + rem_b).dot(step)
}

fn neighbours(i: usize, m: usize) -> [(usize, Vec2); 4] {
    let h = 1.0 / m as f64;
    let (ix, iy) = (i % m, i / m);
    [
        (iy * m + (ix + 1) % m, Vec2::new(h, 0.0)),
        (iy * m + (ix + m - 1) % m, Vec2::new(-h, 0.0)),
        (((iy + 1) % m) * m + ix, Vec2::new(0.0, h)),
        (((iy + m - 1) % m) * m + ix, Vec2::new(0.0, -h)),
    ]
}

/// Integrates the current along a breadth-first spanning tree of the periodic
/// grid graph and checks that every co-tree edge closes modulo 2π.
pub fn reconstruct_phase(current: &CurrentField, config: &VortexConfig) -> Result<PhaseGrid> {
    let m = current.m;
    let n = m * m;
    let mut theta = vec![f64::NAN; n];
    let mut parent = vec![usize::MAX; n];
    theta[0] = 0.0;
    parent[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (j, step) in neighbours(i, m) {
            if parent[j] == usize::MAX {
                parent[j] = i;
                theta[j] = theta[i] + edge_increment(current, config, i, j, step);
                queue.push_back(j);
            }
        }
    }

    let h = 1.0 / m as f64;
    let mut max_defect: f64 = 0.0;
    for i in 0..n {
        let (ix, iy) = (i % m, i / m);
        let right = iy * m + (ix + 1) % m;
        let up = ((iy + 1) % m) * m + ix;
        for (j, step) in [(right, Vec2::new(h, 0.0)), (up, Vec2::new(0.0, h))] {
            if parent[j] == i || parent[i] == j {
                continue;
            }
            let defect = wrap_angle(theta[j] - theta[i] - edge_increment(current, config, i, j, step));
            max_defect = max_defect.max(defect.abs());
        }
    }
    if max_defect > CLOSURE_TOLERANCE {
        return Err(Error::PhaseClosure { defect: max_defect });
    }
    Ok(PhaseGrid {
        m,
        theta,
        current: current.clone(),
        max_closure_defect: max_defect,
    })
}

/// Canonical harmonic map phase on an `m × m` grid.
pub fn harmonic_phase(config: &VortexConfig, green: &GreenEvaluator, m: usize) -> Result<PhaseGrid> {
    let config = nudge_off_grid(config, m);
    let current = canonical_current(&config, green, m)?;
    reconstruct_phase(&current, &config)
}

/// `u_0 = Π_j f(|x - a_j|/ε) e^{iθ_H}` with zero time derivative.
pub fn initial_data_with_profile(
    config: &VortexConfig,
    eps: f64,
    green: &GreenEvaluator,
    m: usize,
    profile: &CoreProfile,
) -> Result<FieldState> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    if eps * (m as f64) < 8.0 - 1e-9 {
        return Err(Error::Resolution { eps, grid: m });
    }
    let config = nudge_off_grid(config, m);
    let phase = reconstruct_phase(&canonical_current(&config, green, m)?, &config)?;
    let u = (0..m * m)
        .map(|i| {
            let x = node(i, m);
            let rho: f64 = config
                .positions()
                .iter()
                .map(|a| profile.eval(x.periodic_distance(*a) / eps))
                .product();
            Complex::from_polar(rho, phase.theta[i])
        })
        .collect();
    FieldState::new(m, u, vec![Complex::new(0.0, 0.0); m * m], eps)
}

pub fn initial_data(config: &VortexConfig, eps: f64, green: &GreenEvaluator, m: usize) -> Result<FieldState> {
    let profile = CoreProfile::standard()?;
    initial_data_with_profile(config, eps, green, m, &profile)
}

/// Circulation of the sampled current around the plaquette with lower-left node `i`.
pub fn plaquette_circulation(phase: &PhaseGrid, config: &VortexConfig, i: usize) -> f64 {
    let m = phase.m;
    let h = 1.0 / m as f64;
    let (ix, iy) = (i % m, i / m);
    let i10 = iy * m + (ix + 1) % m;
    let i11 = ((iy + 1) % m) * m + (ix + 1) % m;
    let i01 = ((iy + 1) % m) * m + ix;
    let c = &phase.current;
    edge_increment(c, config, i, i10, Vec2::new(h, 0.0))
        + edge_increment(c, config, i10, i11, Vec2::new(0.0, h))
        - edge_increment(c, config, i01, i11, Vec2::new(h, 0.0))
        - edge_increment(c, config, i, i01, Vec2::new(0.0, h))
}
