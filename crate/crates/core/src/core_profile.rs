//! Radial vortex core profile and the core energy constant γ.
//!
//! For `u = f(r) e^{iθ}` on the unit disc with `f(1) = 1` the Ginzburg-Landau
//! energy in the stretched variable `s = r/ε` reads
//!
//! ```text
//! E_ε[f] = 2π ∫_0^{1/ε} [ (f'² + f²/s²)/2 + (1 - f²)²/4 ] s ds
//! ```
//!
//! The discrete energy (midpoint rule on a uniform grid) is minimized by
//! damped Newton iteration with a tridiagonal Hessian. Two grid spacings are
//! combined by Richardson extrapolation to remove the `O(h²)` error, and γ is
//! the limit of `E_ε - π log(1/ε)` as `ε → 0`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Default grid spacing in the stretched variable.
pub const DEFAULT_SPACING: f64 = 0.01;

/// Default sequence used to extrapolate γ.
pub const DEFAULT_EPS_SEQUENCE: [f64; 4] = [1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0];

/// Sampled radial profile `f(s)` on `[0, s_max]` with `f(0) = 0`, `f(s_max) = 1`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    spacing: f64,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn radius(&self) -> f64 {
        self.spacing * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Linear interpolation; `1` beyond the outer radius.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let t = s / self.spacing;
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 1.0;
        }
        let w = t - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

/// Whole-plane core profile used to build initial data.
///
/// Solved on a large disc; beyond it the far-field law `1 - f ∝ s^{-2}` is
/// continued from the last interior sample.
#[derive(Clone, Debug)]
pub struct CoreProfile {
    inner: RadialProfile,
    tail_radius: f64,
    tail_deficit: f64,
}

impl CoreProfile {
    pub fn solve(outer_radius: f64, spacing: f64) -> Result<Self> {
        let inner = minimize_radial(outer_radius, spacing)?.profile;
        // Anchor the tail a little inside the pinned boundary value.
        let tail_radius = 0.75 * outer_radius;
        let tail_deficit = 1.0 - inner.eval(tail_radius);
        Ok(Self {
            inner,
            tail_radius,
            tail_deficit,
        })
    }

    pub fn standard() -> Result<Self> {
        Self::solve(120.0, 0.02)
    }

    /// `f(s)` in core units `s = r/ε`.
    pub fn eval(&self, s: f64) -> f64 {
        if s < self.tail_radius {
            self.inner.eval(s)
        } else {
            1.0 - self.tail_deficit * (self.tail_radius / s).powi(2)
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub profile: RadialProfile,
    /// Discrete energy `E_ε` at this spacing.
    pub energy: f64,
    pub newton_iterations: usize,
}

struct Cell {
    s: f64,
}

impl Cell {
    fn potential(&self, m: f64) -> (f64, f64, f64) {
        let s = self.s;
        let one = 1.0 - m * m;
        let p = 0.5 * m * m / s + 0.25 * s * one * one;
        let dp = m / s - s * m * one;
        let ddp = 1.0 / s - s * (1.0 - 3.0 * m * m);
        (p, dp, ddp)
    }
}

fn discrete_energy(values: &[f64], h: f64) -> f64 {
    let mut e = 0.0;
    for i in 0..values.len() - 1 {
        let cell = Cell { s: (i as f64 + 0.5) * h };
        let (a, b) = (values[i], values[i + 1]);
        let (p, _, _) = cell.potential(0.5 * (a + b));
        e += cell.s * (b - a) * (b - a) / (2.0 * h) + h * p;
    }
    2.0 * PI * e
}

/// Minimizes the discrete radial energy on `[0, outer_radius]` (stretched units).
pub fn minimize_radial(outer_radius: f64, spacing: f64) -> Result<RadialSolution> {
    if !(outer_radius > 1.0 && spacing > 0.0 && spacing < outer_radius / 16.0) {
        return Err(Error::InvalidArgument(format!(
            "radial problem needs outer radius > 1 and a finer spacing (radius {outer_radius}, spacing {spacing})"
        )));
    }
    let n = (outer_radius / spacing).round() as usize;
    let h = outer_radius / n as f64;
    let mut f: Vec<f64> = (0..=n)
        .map(|i| {
            let s = i as f64 * h;
            s / (s * s + 2.0).sqrt()
        })
        .collect();
    f[n] = 1.0;
    let mut energy = discrete_energy(&f, h);

    let interior = n - 1;
    let mut grad = vec![0.0; interior];
    let mut diag = vec![0.0; interior];
    let mut off = vec![0.0; interior.saturating_sub(1)];
    for iter in 1..=100 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        diag.iter_mut().for_each(|d| *d = 0.0);
        off.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..n {
            let cell = Cell { s: (i as f64 + 0.5) * h };
            let (a, b) = (f[i], f[i + 1]);
            let (_, dp, ddp) = cell.potential(0.5 * (a + b));
            let stiff = cell.s / h;
            let ga = -stiff * (b - a) + 0.5 * h * dp;
            let gb = stiff * (b - a) + 0.5 * h * dp;
            let haa = stiff + 0.25 * h * ddp;
            let hab = -stiff + 0.25 * h * ddp;
            // Unknown k corresponds to node k + 1.
            if i >= 1 {
                grad[i - 1] += ga;
                diag[i - 1] += haa;
            }
            if i < interior {
                grad[i] += gb;
                diag[i] += haa;
            }
            if i >= 1 && i < interior {
                off[i - 1] += hab;
            }
        }
        let step = solve_tridiagonal(&off, &diag, &off, &grad).ok_or_else(|| {
            Error::NonConvergence("singular Hessian in radial Newton iteration".into())
        })?;
        let step_size = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if step_size < 1e-12 {
            return Ok(RadialSolution {
                profile: RadialProfile { spacing: h, values: f },
                energy,
                newton_iterations: iter,
            });
        }
        // Backtrack until the energy does not increase.
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = f
                .iter()
                .enumerate()
                .map(|(k, &v)| if k == 0 || k == n { v } else { v - alpha * step[k - 1] })
                .collect();
            let e = discrete_energy(&trial, h);
            if e <= energy + 1e-14 * energy.abs() {
                f = trial;
                energy = e;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-8 {
                return Err(Error::NonConvergence("radial line search stalled".into()));
            }
        }
    }
    Err(Error::NonConvergence("radial Newton iteration did not converge in 100 steps".into()))
}

/// Thomas algorithm; `lower[i]` couples rows `i+1, i`, `upper[i]` rows `i, i+1`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom.abs() < 1e-300 {
        return None;
    }
    c[0] = if n > 1 { upper[0] / denom } else { 0.0 };
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom.abs() < 1e-300 {
            return None;
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Minimal disc energy `E_ε`, extrapolated in the grid spacing.
pub fn disc_energy(eps: f64, spacing: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    let coarse = minimize_radial(1.0 / eps, spacing)?.energy;
    let fine = minimize_radial(1.0 / eps, 0.5 * spacing)?.energy;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Clone, Debug)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// `(ε, E_ε - π log(1/ε))` for each input ε.
    pub finite_eps: Vec<(f64, f64)>,
}

/// Estimates γ from a decreasing sequence of ε.
///
/// The finite-ε values approach γ like `ε²`; the two finest are combined by
/// Richardson extrapolation with the ratio of their ε.
pub fn gamma_constant(eps_sequence: &[f64]) -> Result<GammaEstimate> {
    if eps_sequence.len() < 2 {
        return Err(Error::InvalidArgument("need at least two values of eps".into()));
    }
    if eps_sequence.windows(2).any(|w| !(w[1] < w[0])) || eps_sequence.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidArgument("eps sequence must be decreasing in (0, 1)".into()));
    }
    let finite_eps = eps_sequence
        .iter()
        .map(|&eps| Ok((eps, disc_energy(eps, DEFAULT_SPACING)? - PI * (1.0 / eps).ln())))
        .collect::<Result<Vec<_>>>()?;
    let (e1, g1) = finite_eps[finite_eps.len() - 2];
    let (e2, g2) = finite_eps[finite_eps.len() - 1];
    let ratio = (e1 / e2).powi(2);
    let gamma = (ratio * g2 - g1) / (ratio - 1.0);
    Ok(GammaEstimate { gamma, finite_eps })
}
