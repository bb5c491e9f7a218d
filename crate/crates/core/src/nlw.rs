//! Pseudo-spectral solver for `κ_ε u_tt = Δu - (|u|² - 1) u / ε²` on the torus,
//! with `κ_ε = 1/|log ε|`, and its conserved and diagnostic functionals.
//!
//! Time stepping is a time-symmetric trigonometric integrator of Gautschi
//! type (Deuflhard's filter choice). Writing the equation as
//! `u'' = -Ω² u + g(u)` with `Ω = |2πk|/√κ` in Fourier space and
//! `g(u) = -(|u|² - 1) u / (κ ε²)`:
//!
//! ```text
//! û⁺ = cos(hΩ) û + Ω⁻¹ sin(hΩ) v̂ + (h²/2) sinc(hΩ) ĝ(u)
//! v̂⁺ = -Ω sin(hΩ) û + cos(hΩ) v̂ + (h/2) (cos(hΩ) ĝ(u) + ĝ(u⁺))
//! ```
//!
//! The Laplacian is integrated exactly, so the step size is limited by the
//! nonlinearity (`∝ ε √κ`) and not by the grid.

use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Vec2};
use crate::spectral::{angular_wavenumber, Complex, Fft2};

/// `|u|` above this aborts the run.
pub const BLOW_UP_MODULUS: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct FieldState {
    pub m: usize,
    pub u: Vec<Complex>,
    pub u_t: Vec<Complex>,
    pub eps: f64,
    pub kappa: f64,
    pub t: f64,
}

/// `κ_ε = 1/|log ε|`.
pub fn kappa_for(eps: f64) -> f64 {
    1.0 / eps.ln().abs()
}

/// Default step `0.1 ε √κ_ε`.
pub fn default_dt(eps: f64) -> f64 {
    0.1 * eps * kappa_for(eps).sqrt()
}

impl FieldState {
    pub fn new(m: usize, u: Vec<Complex>, u_t: Vec<Complex>, eps: f64) -> Result<Self> {
        if m < 4 || u.len() != m * m || u_t.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "field arrays must be {m}x{m} (got {} and {})",
                u.len(),
                u_t.len()
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
        }
        Ok(Self {
            m,
            u,
            u_t,
            eps,
            kappa: kappa_for(eps),
            t: 0.0,
        })
    }

    /// Samples `u(x, y)` on the grid with zero time derivative.
    pub fn from_fn(m: usize, eps: f64, f: impl Fn(f64, f64) -> Complex) -> Result<Self> {
        let h = 1.0 / m as f64;
        let u = (0..m * m).map(|i| f((i % m) as f64 * h, (i / m) as f64 * h)).collect();
        Self::new(m, u, vec![Complex::new(0.0, 0.0); m * m], eps)
    }

    pub fn cell_area(&self) -> f64 {
        1.0 / (self.m * self.m) as f64
    }

    pub fn max_modulus(&self) -> f64 {
        self.u.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Time integrator bound to one grid size and one ε.
#[derive(Debug)]
pub struct NlwSolver {
    m: usize,
    eps: f64,
    kappa: f64,
    fft: Fft2,
    omega: Vec<f64>,
    cached: Option<StepTables>,
}

#[derive(Debug)]
struct StepTables {
    dt: f64,
    cos: Vec<f64>,
    /// `sin(hΩ)/Ω`, equal to `h` at `Ω = 0`.
    sin_over: Vec<f64>,
    /// `Ω sin(hΩ)`.
    omega_sin: Vec<f64>,
    sinc: Vec<f64>,
}

impl NlwSolver {
    pub fn new(m: usize, eps: f64) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidArgument(format!("grid size {m} too small")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
        }
        let kappa = kappa_for(eps);
        let mut omega = vec![0.0; m * m];
        for iy in 0..m {
            let ky = angular_wavenumber(iy, m);
            for ix in 0..m {
                let kx = angular_wavenumber(ix, m);
                omega[iy * m + ix] = ((kx * kx + ky * ky) / kappa).sqrt();
            }
        }
        Ok(Self {
            m,
            eps,
            kappa,
            fft: Fft2::new(m),
            omega,
            cached: None,
        })
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    fn tables(&mut self, dt: f64) -> &StepTables {
        if self.cached.as_ref().is_none_or(|t| t.dt != dt) {
            let n = self.omega.len();
            let mut tables = StepTables {
                dt,
                cos: vec![0.0; n],
                sin_over: vec![0.0; n],
                omega_sin: vec![0.0; n],
                sinc: vec![0.0; n],
            };
            for (i, &w) in self.omega.iter().enumerate() {
                let x = dt * w;
                let (s, c) = x.sin_cos();
                tables.cos[i] = c;
                if w == 0.0 {
                    tables.sin_over[i] = dt;
                    tables.sinc[i] = 1.0;
                } else {
                    tables.sin_over[i] = s / w;
                    tables.sinc[i] = s / x;
                }
                tables.omega_sin[i] = w * s;
            }
            self.cached = Some(tables);
        }
        self.cached.as_ref().expect("tables just built")
    }

    /// Nonlinear acceleration `-(|u|² - 1) u / (κ ε²)` in Fourier space.
    fn forcing_hat(&self, u: &[Complex]) -> Vec<Complex> {
        let scale = -1.0 / (self.kappa * self.eps * self.eps);
        let mut g: Vec<Complex> = u.iter().map(|&z| z * (scale * (z.norm_sqr() - 1.0))).collect();
        self.fft.forward(&mut g);
        g
    }

    /// Advances `state` by `dt` (negative `dt` integrates backwards).
    pub fn step(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        if state.m != self.m || state.eps != self.eps {
            return Err(Error::InvalidArgument("state does not match solver grid or eps".into()));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidArgument(format!("time step must be finite and nonzero, got {dt}")));
        }
        let mut u_hat = state.u.clone();
        self.fft.forward(&mut u_hat);
        let mut v_hat = state.u_t.clone();
        self.fft.forward(&mut v_hat);
        let g_hat = self.forcing_hat(&state.u);

        self.tables(dt);
        let t = self.cached.as_ref().expect("tables");
        let half_h2 = 0.5 * dt * dt;
        let mut next_u: Vec<Complex> = (0..u_hat.len())
            .map(|i| u_hat[i] * t.cos[i] + v_hat[i] * t.sin_over[i] + g_hat[i] * (half_h2 * t.sinc[i]))
            .collect();
        self.fft.inverse(&mut next_u);

        let g_next = self.forcing_hat(&next_u);
        let t = self.cached.as_ref().expect("tables");
        let half_h = 0.5 * dt;
        let mut next_v: Vec<Complex> = (0..u_hat.len())
            .map(|i| {
                -u_hat[i] * t.omega_sin[i] + v_hat[i] * t.cos[i] + (g_hat[i] * t.cos[i] + g_next[i]) * half_h
            })
            .collect();
        self.fft.inverse(&mut next_v);

        state.u = next_u;
        state.u_t = next_v;
        state.t += dt;
        let max_modulus = state.max_modulus();
        if !(max_modulus <= BLOW_UP_MODULUS) {
            return Err(Error::BlowUp {
                t: state.t,
                max_modulus,
            });
        }
        Ok(())
    }
}

/// One step with a freshly planned solver; prefer [`NlwSolver`] in loops.
pub fn pde_step(state: &FieldState, dt: f64) -> Result<FieldState> {
    let mut solver = NlwSolver::new(state.m, state.eps)?;
    let mut next = state.clone();
    solver.step(&mut next, dt)?;
    Ok(next)
}

/// Grid quadratures of the diagnostic functionals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub energy: f64,
    pub momentum: Vec2,
    pub hamiltonian: f64,
}

fn gradient(state: &FieldState) -> (Vec<Complex>, Vec<Complex>) {
    Fft2::new(state.m).gradient(&state.u)
}

fn energy_from(state: &FieldState, ux: &[Complex], uy: &[Complex]) -> f64 {
    let inv = 1.0 / (4.0 * state.eps * state.eps);
    let sum: f64 = (0..state.u.len())
        .map(|i| {
            let defect = 1.0 - state.u[i].norm_sqr();
            0.5 * (ux[i].norm_sqr() + uy[i].norm_sqr()) + inv * defect * defect
        })
        .sum();
    sum * state.cell_area()
}

fn momentum_from(state: &FieldState, ux: &[Complex], uy: &[Complex]) -> Vec2 {
    let mut q = Vec2::ZERO;
    for i in 0..state.u.len() {
        let c = state.u[i].conj();
        q += Vec2::new((c * ux[i]).im, (c * uy[i]).im);
    }
    state.cell_area() * q
}

fn kinetic(state: &FieldState) -> f64 {
    0.5 * state.kappa * state.u_t.iter().map(|z| z.norm_sqr()).sum::<f64>() * state.cell_area()
}

/// Ginzburg-Landau energy `∫ |∇u|²/2 + (1 - |u|²)²/(4ε²)`.
pub fn energy(state: &FieldState) -> f64 {
    let (ux, uy) = gradient(state);
    energy_from(state, &ux, &uy)
}

/// `∫ Im(ū ∇u)`.
pub fn momentum(state: &FieldState) -> Vec2 {
    let (ux, uy) = gradient(state);
    momentum_from(state, &ux, &uy)
}

/// `∫ κ|u_t|²/2 + e_ε(u)`, conserved by the flow.
pub fn hamiltonian(state: &FieldState) -> f64 {
    energy(state) + kinetic(state)
}

/// Pointwise Jacobian `Im(∂x ū ∂y u)`.
pub fn jacobian_grid(state: &FieldState) -> Vec<f64> {
    let (ux, uy) = gradient(state);
    ux.iter().zip(&uy).map(|(a, b)| (a.conj() * b).im).collect()
}

/// `∫ J(u) φ` for a radial bump `φ` equal to 1 inside `0.75 R` and
/// decaying smoothly to 0 at `R` around `center`.
pub fn localized_jacobian(state: &FieldState, center: LiftedPoint, radius: f64) -> f64 {
    let m = state.m;
    let h = 1.0 / m as f64;
    let inner = 0.75 * radius;
    let bump = |r: f64| {
        if r <= inner {
            1.0
        } else if r < radius {
            let z = (r - inner) / (radius - inner);
            0.5 * (1.0 + (std::f64::consts::PI * z).cos())
        } else {
            0.0
        }
    };
    jacobian_grid(state)
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let x = LiftedPoint::new((i % m) as f64 * h, (i / m) as f64 * h);
            j * bump(x.periodic_distance(center))
        })
        .sum::<f64>()
        * state.cell_area()
}

pub fn diagnostics(state: &FieldState) -> Diagnostics {
    let (ux, uy) = gradient(state);
    let energy = energy_from(state, &ux, &uy);
    Diagnostics {
        t: state.t,
        energy,
        momentum: momentum_from(state, &ux, &uy),
        hamiltonian: energy + kinetic(state),
    }
}
