//! Renormalized energy `W(a; q)` of a vortex configuration on the torus.
//!
//! ```text
//! W(a; q) = -π Σ_{k≠l} d_k d_l F(a_k - a_l) + |q|²/2
//! q_*(a)  = 2π Σ_j d_j a_j + 2π m
//! ```
//!
//! Positions are lifts, never wrapped, and the integer offset `m` is fixed
//! when the configuration is built. `q_*` is then a continuous function of
//! the lifted positions and always lies in its lattice coset.

use crate::error::{Error, Result};
use crate::geometry::{min_pair_distance, LiftedPoint, Vec2};
use crate::green::GreenEvaluator;
use std::f64::consts::PI;

/// Pairs closer than this (torus lengths) count as collided.
pub const NEAR_COLLISION_DISTANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct VortexConfig {
    positions: Vec<LiftedPoint>,
    degrees: Vec<i32>,
    branch_offset: [i64; 2],
}

impl VortexConfig {
    pub fn new(positions: Vec<LiftedPoint>, degrees: Vec<i32>, branch_offset: [i64; 2]) -> Result<Self> {
        if positions.len() != degrees.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions but {} degrees",
                positions.len(),
                degrees.len()
            )));
        }
        if positions.is_empty() {
            return Err(Error::InvalidArgument("configuration has no vortices".into()));
        }
        if let Some(d) = degrees.iter().find(|d| d.abs() != 1) {
            return Err(Error::InvalidArgument(format!("degree {d} is not +1 or -1")));
        }
        if degrees.iter().sum::<i32>() != 0 {
            return Err(Error::InvalidArgument("degrees must sum to zero on the torus".into()));
        }
        if let Some(p) = positions.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::InvalidArgument(format!("non-finite position ({}, {})", p.x, p.y)));
        }
        if let Some((d, i, j)) = min_pair_distance(&positions) {
            if d <= 0.0 {
                return Err(Error::NearCollision {
                    first: i,
                    second: j,
                    distance: d,
                });
            }
        }
        Ok(Self {
            positions,
            degrees,
            branch_offset,
        })
    }

    /// A `+1` vortex at `plus` and a `-1` vortex at `minus`.
    pub fn dipole(plus: LiftedPoint, minus: LiftedPoint, branch_offset: [i64; 2]) -> Result<Self> {
        Self::new(vec![plus, minus], vec![1, -1], branch_offset)
    }

    /// No vortices; the momentum is the lattice vector `2π m`.
    pub fn vortex_free(branch_offset: [i64; 2]) -> Self {
        Self {
            positions: Vec::new(),
            degrees: Vec::new(),
            branch_offset,
        }
    }

    /// Four vortices on the half lattice with alternating degrees, a critical point of `W`.
    pub fn checkerboard() -> Self {
        Self {
            positions: vec![
                LiftedPoint::new(0.0, 0.0),
                LiftedPoint::new(0.5, 0.5),
                LiftedPoint::new(0.5, 0.0),
                LiftedPoint::new(0.0, 0.5),
            ],
            degrees: vec![1, 1, -1, -1],
            branch_offset: [0, 0],
        }
    }

    pub fn positions(&self) -> &[LiftedPoint] {
        &self.positions
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn branch_offset(&self) -> [i64; 2] {
        self.branch_offset
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Same degrees and branch with new lifted positions.
    pub fn with_positions(&self, positions: Vec<LiftedPoint>) -> Self {
        assert_eq!(positions.len(), self.degrees.len());
        Self {
            positions,
            degrees: self.degrees.clone(),
            branch_offset: self.branch_offset,
        }
    }

    /// `Σ_j d_j a_j` over the lifted positions.
    pub fn dipole_moment(&self) -> Vec2 {
        self.positions
            .iter()
            .zip(&self.degrees)
            .fold(Vec2::ZERO, |acc, (p, &d)| acc + (d as f64) * p.as_vec())
    }

    pub fn q_star(&self) -> Vec2 {
        q_star(self)
    }
}

/// Continuous momentum branch `2π Σ_j d_j a_j + 2π m`.
pub fn q_star(config: &VortexConfig) -> Vec2 {
    let m = config.branch_offset;
    2.0 * PI * (config.dipole_moment() + Vec2::new(m[0] as f64, m[1] as f64))
}

/// `r(a)`: a quarter of the smallest pairwise periodic distance.
pub fn pair_separation(config: &VortexConfig) -> f64 {
    min_pair_distance(&config.positions).map_or(f64::INFINITY, |(d, _, _)| 0.25 * d)
}

fn check_admissible(config: &VortexConfig) -> Result<()> {
    match min_pair_distance(&config.positions) {
        Some((d, i, j)) if d <= NEAR_COLLISION_DISTANCE => Err(Error::NearCollision {
            first: i,
            second: j,
            distance: d,
        }),
        _ => Ok(()),
    }
}

/// Interaction part `-π Σ_{k≠l} d_k d_l F(a_k - a_l)`.
pub fn pair_energy(config: &VortexConfig, green: &GreenEvaluator) -> Result<f64> {
    check_admissible(config)?;
    let mut sum = 0.0;
    for k in 0..config.len() {
        for l in k + 1..config.len() {
            let dd = (config.degrees[k] * config.degrees[l]) as f64;
            sum += dd * green.value(config.positions[k] - config.positions[l])?;
        }
    }
    // Each unordered pair appears twice in the double sum since F is even.
    Ok(-2.0 * PI * sum)
}

pub fn renormalized_w(config: &VortexConfig, green: &GreenEvaluator) -> Result<f64> {
    Ok(pair_energy(config, green)? + 0.5 * q_star(config).norm_sq())
}

/// `∇_{a_j} W = -2π Σ_{l≠j} d_j d_l ∇F(a_j - a_l) + 2π d_j q_*`.
pub fn grad_w(config: &VortexConfig, green: &GreenEvaluator) -> Result<Vec<Vec2>> {
    check_admissible(config)?;
    let n = config.len();
    let q = q_star(config);
    let mut grad: Vec<Vec2> = config
        .degrees
        .iter()
        .map(|&d| (2.0 * PI * d as f64) * q)
        .collect();
    // Fixed pair order keeps the reduction bitwise reproducible.
    for j in 0..n {
        for l in j + 1..n {
            let dd = (config.degrees[j] * config.degrees[l]) as f64;
            let g = green.gradient(config.positions[j] - config.positions[l])?;
            let force = (-2.0 * PI * dd) * g;
            grad[j] += force;
            grad[l] -= force;
        }
    }
    Ok(grad)
}

/// `W_ε = 2N(π log(1/ε) + γ) + W(a; q_*(a))`, where `2N` is the number of vortices.
pub fn w_eps(config: &VortexConfig, green: &GreenEvaluator, eps: f64, gamma: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(core_energy(config.len(), eps, gamma) + renormalized_w(config, green)?)
}

/// Divergent self-energy `2N(π log(1/ε) + γ)` of `2N` cores.
pub fn core_energy(count: usize, eps: f64, gamma: f64) -> f64 {
    count as f64 * (PI * (1.0 / eps).ln() + gamma)
}
