use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use torus_vortex::energy::{grad_w, pair_energy, q_star, renormalized_w, VortexConfig};
use torus_vortex::geometry::min_pair_distance;
use torus_vortex::green::{build_green, GreenEvaluator};
use torus_vortex::output::num;
use torus_vortex::scenario::parse_real;
use torus_vortex::vortices::{track, DetectedVortex};
use torus_vortex::{LiftedPoint, Vec2};

fn green() -> &'static GreenEvaluator {
    static G: OnceLock<GreenEvaluator> = OnceLock::new();
    G.get_or_init(|| build_green(16).unwrap())
}

fn point() -> impl Strategy<Value = LiftedPoint> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| LiftedPoint::new(x, y))
}

/// Admissible configurations of `2n` vortices, `n` in 1..=3.
fn config() -> impl Strategy<Value = VortexConfig> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let degrees: Vec<i32> = (0..2 * n).map(|j| if j < n { 1 } else { -1 }).collect();
            (
                prop::collection::vec(point(), 2 * n),
                Just(degrees).prop_shuffle(),
                prop::array::uniform2(-3i64..=3),
            )
        })
        .prop_filter_map("vortices too close", |(positions, degrees, m)| {
            if min_pair_distance(&positions)?.0 < 0.02 {
                return None;
            }
            VortexConfig::new(positions, degrees, m).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_image_lies_in_the_unit_square(p in point()) {
        let q = p.torus_image();
        prop_assert!((0.0..1.0).contains(&q.x) && (0.0..1.0).contains(&q.y));
        prop_assert!(p.periodic_distance(q) < 1e-12);
    }

    #[test]
    fn periodic_displacement_is_the_shortest(a in point(), b in point()) {
        let d = a.periodic_displacement(b);
        prop_assert!(d.x.abs() <= 0.5 + 1e-12 && d.y.abs() <= 0.5 + 1e-12);
        prop_assert!((a.periodic_distance(b) - b.periodic_distance(a)).abs() < 1e-12);
        let shifted = LiftedPoint::new(a.x + 2.0, a.y - 1.0);
        prop_assert!((shifted.periodic_distance(b) - a.periodic_distance(b)).abs() < 1e-12);
    }

    #[test]
    fn green_function_is_even_and_periodic(p in point(), nx in -2i32..=2, ny in -2i32..=2) {
        let v = p.as_vec();
        prop_assume!(v.wrap_centered().norm() > 1e-3);
        let g = green();
        let f = g.value(v).unwrap();
        prop_assert!((f - g.value(-v).unwrap()).abs() < 1e-12);
        prop_assert!((f - g.value(v + Vec2::new(nx as f64, ny as f64)).unwrap()).abs() < 1e-12);
        prop_assert!((g.gradient(v).unwrap() + g.gradient(-v).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn momentum_lies_in_its_coset(c in config()) {
        let q = q_star(&c);
        let r = (1.0 / (2.0 * PI)) * q - c.dipole_moment();
        prop_assert!((r.x - r.x.round()).abs() < 1e-12 && (r.y - r.y.round()).abs() < 1e-12);
    }

    #[test]
    fn forces_sum_to_zero(c in config()) {
        let total = grad_w(&c, green()).unwrap().into_iter().fold(Vec2::ZERO, |a, b| a + b);
        prop_assert!(total.norm() < 1e-9);
    }

    #[test]
    fn lattice_shift_with_compensating_branch_leaves_w(c in config(), j in 0usize..6, ex in -1i64..=1, ey in -1i64..=1) {
        let j = j % c.len();
        let d = c.degrees()[j] as i64;
        let mut positions = c.positions().to_vec();
        positions[j] = positions[j] + Vec2::new(ex as f64, ey as f64);
        let m = c.branch_offset();
        let moved = VortexConfig::new(positions, c.degrees().to_vec(), [m[0] - d * ex, m[1] - d * ey]).unwrap();
        let g = green();
        prop_assert!((q_star(&moved) - q_star(&c)).norm() < 1e-10);
        prop_assert!((renormalized_w(&moved, g).unwrap() - renormalized_w(&c, g).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pair_energy_ignores_rigid_translation(c in config(), sx in -1.0..1.0f64, sy in -1.0..1.0f64) {
        let s = Vec2::new(sx, sy);
        let moved = c.with_positions(c.positions().iter().map(|&p| p + s).collect());
        let g = green();
        prop_assert!((pair_energy(&moved, g).unwrap() - pair_energy(&c, g).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn csv_numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = num(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn fractions_parse(p in 1u32..1000, q in 1u32..1000) {
        prop_assert_eq!(parse_real(&format!("{p}/{q}")), Some(p as f64 / q as f64));
        prop_assert_eq!(parse_real(&format!(" {p} ")), Some(p as f64));
    }

    #[test]
    fn constant_velocity_tracks_are_straight(
        start in point(),
        vx in -0.02..0.02f64,
        vy in -0.02..0.02f64,
        frames in 2usize..40,
    ) {
        let other = LiftedPoint::new(start.x + 0.5, start.y + 0.5);
        let detections: Vec<Vec<DetectedVortex>> = (0..frames)
            .map(|f| {
                let s = f as f64;
                vec![
                    DetectedVortex { position: LiftedPoint::new(start.x + s * vx, start.y + s * vy).torus_image(), degree: 1 },
                    DetectedVortex { position: other.torus_image(), degree: -1 },
                ]
            })
            .collect();
        let tracks = track(&detections, 0.05).unwrap();
        let first = tracks[0].positions[0];
        for (f, p) in tracks[0].positions.iter().enumerate() {
            let expected = Vec2::new(f as f64 * vx, f as f64 * vy);
            prop_assert!((*p - first - expected).norm() < 1e-9);
        }
    }
}
