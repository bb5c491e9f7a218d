//! Two-dimensional FFTs and spectral derivatives on the periodic unit square.
//!
//! Grids are `m × m`, row-major, index `iy * m + ix`, node `(ix/m, iy/m)`.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub type Complex = Complex64;

const ROWS_PER_TASK: usize = 16;

#[derive(Clone)]
pub struct Fft2 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("m", &self.m).finish()
    }
}

impl Fft2 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Row transforms, transpose, row transforms, transpose back.
    fn apply(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex]) {
        assert_eq!(data.len(), self.m * self.m);
        let block = self.m * ROWS_PER_TASK.min(self.m);
        data.par_chunks_mut(block).for_each(|rows| plan.process(rows));
        transpose(data, self.m);
        data.par_chunks_mut(block).for_each(|rows| plan.process(rows));
        transpose(data, self.m);
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, data: &mut [Complex]) {
        self.apply(&self.forward, data);
    }

    /// Inverse transform including the `1/m²` factor.
    pub fn inverse(&self, data: &mut [Complex]) {
        self.apply(&self.inverse, data);
        let scale = 1.0 / (self.m * self.m) as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// Physical-space partial derivatives `(∂x, ∂y)` of a periodic field.
    pub fn gradient(&self, field: &[Complex]) -> (Vec<Complex>, Vec<Complex>) {
        let mut hat = field.to_vec();
        self.forward(&mut hat);
        let mut dx = hat.clone();
        let mut dy = hat;
        let m = self.m;
        for iy in 0..m {
            let ky = derivative_wavenumber(iy, m);
            for ix in 0..m {
                let kx = derivative_wavenumber(ix, m);
                let i = iy * m + ix;
                dx[i] *= Complex::new(0.0, kx);
                dy[i] *= Complex::new(0.0, ky);
            }
        }
        self.inverse(&mut dx);
        self.inverse(&mut dy);
        (dx, dy)
    }

    pub fn gradient_real(&self, field: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let z: Vec<Complex> = field.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let (dx, dy) = self.gradient(&z);
        (dx.iter().map(|c| c.re).collect(), dy.iter().map(|c| c.re).collect())
    }

    /// Spectral Laplacian of a real periodic field.
    pub fn laplacian_real(&self, field: &[f64]) -> Vec<f64> {
        let mut hat: Vec<Complex> = field.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward(&mut hat);
        let m = self.m;
        for iy in 0..m {
            let ky = angular_wavenumber(iy, m);
            for ix in 0..m {
                let kx = angular_wavenumber(ix, m);
                hat[iy * m + ix] *= -(kx * kx + ky * ky);
            }
        }
        self.inverse(&mut hat);
        hat.iter().map(|c| c.re).collect()
    }

    /// `∂x fx + ∂y fy` of a real vector field.
    pub fn divergence_real(&self, fx: &[f64], fy: &[f64]) -> Vec<f64> {
        let (dxx, _) = self.gradient_real(fx);
        let (_, dyy) = self.gradient_real(fy);
        dxx.iter().zip(&dyy).map(|(a, b)| a + b).collect()
    }
}

fn transpose(data: &mut [Complex], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

/// Signed integer frequency of FFT bin `i`.
pub fn frequency(i: usize, m: usize) -> i64 {
    if i <= m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

/// `2πk` for bin `i`.
pub fn angular_wavenumber(i: usize, m: usize) -> f64 {
    2.0 * PI * frequency(i, m) as f64
}

/// `2πk` with the Nyquist bin zeroed, as required for odd-order derivatives.
pub fn derivative_wavenumber(i: usize, m: usize) -> f64 {
    if m.is_multiple_of(2) && i == m / 2 {
        0.0
    } else {
        angular_wavenumber(i, m)
    }
}

/// Trapezoid (spectrally exact) mean over the torus.
pub fn grid_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let m = 16;
        let fft = Fft2::new(m);
        let orig: Vec<Complex> = (0..m * m).map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in orig.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_trigonometric_field() {
        let m = 32;
        let fft = Fft2::new(m);
        let h = 1.0 / m as f64;
        let f: Vec<f64> = (0..m * m)
            .map(|i| {
                let (x, y) = ((i % m) as f64 * h, (i / m) as f64 * h);
                (2.0 * PI * x).sin() * (4.0 * PI * y).cos()
            })
            .collect();
        let (dx, dy) = fft.gradient_real(&f);
        let lap = fft.laplacian_real(&f);
        for i in 0..m * m {
            let (x, y) = ((i % m) as f64 * h, (i / m) as f64 * h);
            let ex = 2.0 * PI * (2.0 * PI * x).cos() * (4.0 * PI * y).cos();
            let ey = -4.0 * PI * (2.0 * PI * x).sin() * (4.0 * PI * y).sin();
            assert!((dx[i] - ex).abs() < 1e-11);
            assert!((dy[i] - ey).abs() < 1e-11);
            assert!((lap[i] + 20.0 * PI * PI * f[i]).abs() < 1e-9);
        }
    }
}
