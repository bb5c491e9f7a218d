use std::f64::consts::PI;
use torus_vortex::energy::VortexConfig;
use torus_vortex::green::build_green;
use torus_vortex::harmonic_map::initial_data;
use torus_vortex::nlw::{
    default_dt, diagnostics, energy, hamiltonian, jacobian_grid, kappa_for, momentum, pde_step, FieldState,
    NlwSolver,
};
use torus_vortex::spectral::Complex;
use torus_vortex::vortices::detect_vortices;
use torus_vortex::{Error, LiftedPoint};

fn smooth_field(m: usize, eps: f64) -> FieldState {
    FieldState::from_fn(m, eps, |x, y| {
        let a = 0.05 * (2.0 * PI * x).sin() + 0.03 * (2.0 * PI * (x + 2.0 * y)).cos();
        Complex::from_polar(1.0 + a, 2.0 * PI * x + 0.2 * (2.0 * PI * y).sin())
    })
    .unwrap()
}

fn evolve(mut state: FieldState, dt: f64, steps: usize) -> FieldState {
    let mut solver = NlwSolver::new(state.m, state.eps).unwrap();
    for _ in 0..steps {
        solver.step(&mut state, dt).unwrap();
    }
    state
}

fn max_diff(a: &FieldState, b: &FieldState) -> f64 {
    a.u.iter().zip(&b.u).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn kappa_is_inverse_log() {
    let s = smooth_field(16, 1.0 / 8.0);
    assert_eq!(s.kappa, 1.0 / (8f64).ln());
    assert_eq!(kappa_for(0.125), s.kappa);
    assert!((default_dt(0.125) - 0.1 * 0.125 * s.kappa.sqrt()).abs() < 1e-18);
}

#[test]
fn ground_state_is_an_exact_equilibrium() {
    let s = FieldState::from_fn(32, 0.125, |_, _| Complex::new(1.0, 0.0)).unwrap();
    let out = evolve(s.clone(), 1e-3, 100);
    assert!(max_diff(&s, &out) < 1e-14);
    assert!(out.u_t.iter().all(|z| z.norm() < 1e-14));
    let d = diagnostics(&out);
    assert!(d.energy.abs() < 1e-14 && d.hamiltonian.abs() < 1e-14 && d.momentum.norm() < 1e-14);
    assert!(jacobian_grid(&out).iter().all(|j| j.abs() < 1e-14));
}

#[test]
fn plane_wave_functionals() {
    let s = FieldState::from_fn(64, 0.125, |x, _| Complex::from_polar(1.0, 2.0 * PI * x)).unwrap();
    assert!((energy(&s) - 2.0 * PI * PI).abs() < 1e-10);
    let q = momentum(&s);
    assert!((q.x - 2.0 * PI).abs() < 1e-10 && q.y.abs() < 1e-10);
    assert!((hamiltonian(&s) - energy(&s)).abs() < 1e-14);
}

#[test]
fn linear_wave_converges_at_second_order() {
    // A small perturbation of |u| = 1 follows the linearised equation.
    let base = FieldState::from_fn(32, 0.125, |x, y| {
        Complex::new(1.0, 0.0) + Complex::new(1e-4 * (2.0 * PI * (x + y)).cos(), 1e-4 * (2.0 * PI * x).sin())
    })
    .unwrap();
    let t = 0.05;
    let run = |n: usize| evolve(base.clone(), t / n as f64, n);
    let (a, b, c) = (run(10), run(20), run(40));
    let ratio = max_diff(&a, &b) / max_diff(&b, &c);
    assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn nonlinear_field_converges_at_second_order() {
    let base = smooth_field(32, 0.25);
    let t = 0.05;
    let run = |n: usize| evolve(base.clone(), t / n as f64, n);
    let (a, b, c) = (run(20), run(40), run(80));
    let ratio = max_diff(&a, &b) / max_diff(&b, &c);
    assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn stepping_back_restores_the_state() {
    let s = smooth_field(64, 0.125);
    let mut solver = NlwSolver::new(64, 0.125).unwrap();
    let mut t = s.clone();
    let dt = default_dt(0.125);
    solver.step(&mut t, dt).unwrap();
    solver.step(&mut t, -dt).unwrap();
    assert!(max_diff(&s, &t) < 1e-10);
    assert!(t.u_t.iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn resolved_energy_is_spectrally_accurate() {
    let coarse = energy(&smooth_field(64, 0.25));
    let fine = energy(&smooth_field(128, 0.25));
    assert!(((coarse - fine) / fine).abs() < 1e-8);
}

#[test]
fn hamiltonian_drift_over_ten_thousand_steps() {
    let g = build_green(16).unwrap();
    let eps = 0.125;
    let config = VortexConfig::checkerboard();
    let s = initial_data(&config, eps, &g, 128).unwrap();
    let h0 = hamiltonian(&s);
    let mut solver = NlwSolver::new(128, eps).unwrap();
    let mut state = s;
    let mut worst: f64 = 0.0;
    for n in 0..10_000 {
        solver.step(&mut state, 0.5 * default_dt(eps)).unwrap();
        if n % 100 == 99 {
            worst = worst.max(((hamiltonian(&state) - h0) / h0).abs());
        }
    }
    assert!(worst < 1e-3, "drift {worst}");
}

#[test]
fn one_shot_step_matches_the_solver() {
    let s = smooth_field(32, 0.25);
    let a = pde_step(&s, 1e-3).unwrap();
    let b = evolve(s, 1e-3, 1);
    assert_eq!(max_diff(&a, &b), 0.0);
    assert_eq!(a.t, 1e-3);
}

#[test]
fn blow_up_is_reported() {
    // A step far beyond the nonlinear stability limit.
    let mut s = FieldState::from_fn(16, 0.25, |_, _| Complex::new(3.0, 0.0)).unwrap();
    let mut solver = NlwSolver::new(16, 0.25).unwrap();
    let mut result = Ok(());
    for _ in 0..1000 {
        result = solver.step(&mut s, 0.5);
        if result.is_err() {
            break;
        }
    }
    assert!(matches!(result, Err(Error::BlowUp { .. })));
}

#[test]
fn mismatched_inputs_are_rejected() {
    assert!(FieldState::new(8, vec![Complex::new(1.0, 0.0); 10], vec![Complex::new(0.0, 0.0); 64], 0.1).is_err());
    assert!(FieldState::from_fn(8, 1.5, |_, _| Complex::new(1.0, 0.0)).is_err());
    let mut s = smooth_field(16, 0.25);
    let mut solver = NlwSolver::new(32, 0.25).unwrap();
    assert!(solver.step(&mut s, 1e-3).is_err());
    let mut solver = NlwSolver::new(16, 0.25).unwrap();
    assert!(solver.step(&mut s, 0.0).is_err());
}

#[test]
fn degrees_sum_to_zero_along_a_run() {
    let g = build_green(16).unwrap();
    let eps = 0.125;
    let config =
        VortexConfig::dipole(LiftedPoint::new(0.3, 0.0), LiftedPoint::new(0.7, 0.0), [0, 0]).unwrap();
    let mut state = initial_data(&config, eps, &g, 64).unwrap();
    let mut solver = NlwSolver::new(64, eps).unwrap();
    for _ in 0..40 {
        solver.step(&mut state, 2.5e-3).unwrap();
        let d = detect_vortices(&state);
        assert_eq!(d.iter().map(|v| v.degree).sum::<i32>(), 0);
    }
}
