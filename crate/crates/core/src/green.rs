//! Green's function of the Laplacian on the unit torus.
//!
//! `F` solves `ΔF = 2π(δ - 1)` with zero mean. Its Fourier coefficients are
//! `-1/(2π|k|²)` for `k ≠ 0`, which converge far too slowly for point
//! evaluation near the singularity. The evaluator splits `F` with a Gaussian
//! screen of width set by `split_parameter` `s`:
//!
//! ```text
//! F(x) = -1/2 Σ_n E1(π²|x+n|²/s)                    (real-space images)
//!        + s/(2π) - 1/(2π) Σ_{k≠0} e^{-s|k|²} cos(2πk·x)/|k|²   (smooth part)
//! ```
//!
//! Both sums converge like Gaussians, so a handful of images and modes give
//! full double precision. The nearest real-space image carries the
//! `log|x|` singularity exactly.

use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Vec2};
use std::f64::consts::PI;

/// Lower bound on the number of Fourier modes per axis.
pub const MIN_TRUNCATION_ORDER: usize = 16;

/// Points closer than this to a lattice point are rejected.
pub const SINGULARITY_CUTOFF: f64 = 1e-12;

pub const DEFAULT_SPLIT_PARAMETER: f64 = 1.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Terms with Gaussian weight below `e^{-CUTOFF_EXPONENT}` are dropped.
const CUTOFF_EXPONENT: f64 = 50.0;

#[derive(Clone, Copy, Debug)]
struct Mode {
    kx: usize,
    ky: i64,
    k: Vec2,
    weight: f64,
}

/// Immutable evaluator of `F` and `∇F`.
#[derive(Clone, Debug)]
pub struct GreenEvaluator {
    truncation_order: usize,
    split_parameter: f64,
    /// Gaussian rate `π²/s` of the real-space screen.
    screen: f64,
    images: Vec<Vec2>,
    /// Half-plane of wave vectors: `kx > 0`, or `kx = 0` and `ky > 0`.
    modes: Vec<Mode>,
    max_kx: usize,
    max_ky: usize,
}

/// Builds an evaluator with the default split parameter.
pub fn build_green(truncation_order: usize) -> Result<GreenEvaluator> {
    GreenEvaluator::new(truncation_order, DEFAULT_SPLIT_PARAMETER)
}

pub fn eval_f(green: &GreenEvaluator, p: LiftedPoint) -> Result<f64> {
    green.value(p.as_vec())
}

pub fn eval_grad_f(green: &GreenEvaluator, p: LiftedPoint) -> Result<Vec2> {
    green.gradient(p.as_vec())
}

impl GreenEvaluator {
    pub fn new(truncation_order: usize, split_parameter: f64) -> Result<Self> {
        if truncation_order < MIN_TRUNCATION_ORDER {
            return Err(Error::InvalidArgument(format!(
                "truncation order {truncation_order} is below the minimum {MIN_TRUNCATION_ORDER}"
            )));
        }
        if !(split_parameter.is_finite() && split_parameter > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "split parameter must be positive, got {split_parameter}"
            )));
        }
        let screen = PI * PI / split_parameter;

        // After centering, |x| <= 1/√2, so images beyond this radius are negligible.
        let reach = (CUTOFF_EXPONENT / screen).sqrt() + 1.0;
        let n_max = reach.ceil() as i64;
        let mut images = Vec::new();
        for nx in -n_max..=n_max {
            for ny in -n_max..=n_max {
                let n = Vec2::new(nx as f64, ny as f64);
                if n.norm() <= reach {
                    images.push(n);
                }
            }
        }
        // Nearest images first: the centered point lies closest to n = 0.
        images.sort_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()));

        let k_max = ((CUTOFF_EXPONENT / split_parameter).sqrt().floor() as usize).min(truncation_order);
        let mut modes = Vec::new();
        for kx in 0..=k_max {
            for ky in -(k_max as i64)..=(k_max as i64) {
                if kx == 0 && ky <= 0 {
                    continue;
                }
                let k = Vec2::new(kx as f64, ky as f64);
                let k2 = k.norm_sq();
                if split_parameter * k2 > CUTOFF_EXPONENT {
                    continue;
                }
                modes.push(Mode {
                    kx,
                    ky,
                    k,
                    weight: (-split_parameter * k2).exp() / k2,
                });
            }
        }
        let max_kx = modes.iter().map(|m| m.kx).max().unwrap_or(0);
        let max_ky = modes.iter().map(|m| m.ky.unsigned_abs() as usize).max().unwrap_or(0);

        Ok(Self {
            truncation_order,
            split_parameter,
            screen,
            images,
            modes,
            max_kx,
            max_ky,
        })
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn split_parameter(&self) -> f64 {
        self.split_parameter
    }

    /// Rate `c` of the Gaussian screen `e^{-c r²}`.
    pub fn screen_rate(&self) -> f64 {
        self.screen
    }

    fn check(&self, p: Vec2) -> Result<Vec2> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite point ({}, {})", p.x, p.y)));
        }
        let c = p.wrap_centered();
        if c.norm() <= SINGULARITY_CUTOFF {
            return Err(Error::Singularity { x: p.x, y: p.y });
        }
        Ok(c)
    }

    pub fn value(&self, p: Vec2) -> Result<f64> {
        let c = self.check(p)?;
        Ok(self.screened_value(c) + self.smooth_value(c))
    }

    pub fn gradient(&self, p: Vec2) -> Result<Vec2> {
        let c = self.check(p)?;
        Ok(self.screened_gradient(c) + self.smooth_gradient(c))
    }

    pub fn value_and_gradient(&self, p: Vec2) -> Result<(f64, Vec2)> {
        let c = self.check(p)?;
        let (sv, sg) = self.smooth_both(c);
        Ok((self.screened_value(c) + sv, self.screened_gradient(c) + sg))
    }

    /// Sum of the screened logarithms `-1/2 Σ_n E1(c|p+n|²)`; singular at lattice points.
    pub fn screened_value(&self, p: Vec2) -> f64 {
        let c = p.wrap_centered();
        self.images
            .iter()
            .map(|&n| {
                let z = self.screen * (c + n).norm_sq();
                if z > CUTOFF_EXPONENT {
                    0.0
                } else {
                    -0.5 * exp_integral_e1(z)
                }
            })
            .sum()
    }

    pub fn screened_gradient(&self, p: Vec2) -> Vec2 {
        let c = p.wrap_centered();
        let mut g = Vec2::ZERO;
        for &n in &self.images {
            let r = c + n;
            let r2 = r.norm_sq();
            let z = self.screen * r2;
            if z <= CUTOFF_EXPONENT {
                g += ((-z).exp() / r2) * r;
            }
        }
        g
    }

    /// Smooth, band-limited remainder `F - screened_value`.
    pub fn smooth_value(&self, p: Vec2) -> f64 {
        self.smooth_both(p).0
    }

    pub fn smooth_gradient(&self, p: Vec2) -> Vec2 {
        self.smooth_both(p).1
    }

    fn smooth_both(&self, p: Vec2) -> (f64, Vec2) {
        let ex = unit_powers(p.x, self.max_kx);
        let ey = unit_powers(p.y, self.max_ky);
        let mut cos_sum = 0.0;
        let mut grad = Vec2::ZERO;
        for m in &self.modes {
            let (cx, sx) = ex[m.kx];
            let (cy, sy) = ey[m.ky.unsigned_abs() as usize];
            let sy = if m.ky < 0 { -sy } else { sy };
            let cos = cx * cy - sx * sy;
            let sin = sx * cy + cx * sy;
            cos_sum += m.weight * cos;
            grad += (2.0 * m.weight * sin) * m.k;
        }
        (self.split_parameter / (2.0 * PI) - cos_sum / PI, grad)
    }

    /// `lim_{x→0} F(x) - log|x|`.
    pub fn regular_part_at_origin(&self) -> f64 {
        let far: f64 = self
            .images
            .iter()
            .filter(|n| n.norm_sq() > 0.0)
            .map(|&n| {
                let z = self.screen * n.norm_sq();
                if z > CUTOFF_EXPONENT {
                    0.0
                } else {
                    -0.5 * exp_integral_e1(z)
                }
            })
            .sum();
        0.5 * (EULER_GAMMA + self.screen.ln()) + far + self.smooth_value(Vec2::ZERO)
    }
}

/// `(cos 2πkt, sin 2πkt)` for `k = 0..=n`.
fn unit_powers(t: f64, n: usize) -> Vec<(f64, f64)> {
    let (s1, c1) = (2.0 * PI * t).sin_cos();
    let mut out = Vec::with_capacity(n + 1);
    out.push((1.0, 0.0));
    // Re-seed from sin_cos every few powers to keep the recurrence error tiny.
    for k in 1..=n {
        if k % 8 == 0 {
            let (s, c) = (2.0 * PI * k as f64 * t).sin_cos();
            out.push((c, s));
        } else {
            let (c, s) = out[k - 1];
            out.push((c * c1 - s * s1, s * c1 + c * s1));
        }
    }
    out
}

/// Exponential integral `E1(z) = ∫_z^∞ e^{-t}/t dt` for `z > 0`.
pub fn exp_integral_e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= 1.0 {
        // E1 = -γ - ln z + Σ_{k≥1} (-1)^{k+1} z^k / (k k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -z / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() + sum
    } else {
        // Modified Lentz evaluation of the continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    }
}
