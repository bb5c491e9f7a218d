//! Vortex detection from plaquette phase winding, and frame-to-frame tracking.

use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Vec2};
use crate::nlw::FieldState;
use crate::spectral::Complex;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectedVortex {
    /// Torus image, refined below the grid spacing.
    pub position: LiftedPoint,
    pub degree: i32,
}

fn wrap_angle(a: f64) -> f64 {
    a - 2.0 * PI * (a / (2.0 * PI)).round()
}

/// Zero of the bilinear interpolant on the unit cell with corners
/// `c00, c10, c01, c11`, by Newton from the centre. `None` if it leaves the cell.
fn bilinear_zero(c00: Complex, c10: Complex, c01: Complex, c11: Complex) -> Option<(f64, f64)> {
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..50 {
        let f = c00 * ((1.0 - s) * (1.0 - t)) + c10 * (s * (1.0 - t)) + c01 * ((1.0 - s) * t) + c11 * (s * t);
        let fs = (c10 - c00) * (1.0 - t) + (c11 - c01) * t;
        let ft = (c01 - c00) * (1.0 - s) + (c11 - c10) * s;
        let det = fs.re * ft.im - fs.im * ft.re;
        if det.abs() < 1e-300 {
            return None;
        }
        let ds = (f.re * ft.im - f.im * ft.re) / det;
        let dt = (fs.re * f.im - fs.im * f.re) / det;
        s -= ds;
        t -= dt;
        if !(s.is_finite() && t.is_finite()) || s.abs() > 3.0 || t.abs() > 3.0 {
            return None;
        }
        if ds.abs().max(dt.abs()) < 1e-14 {
            break;
        }
    }
    const SLACK: f64 = 1e-9;
    ((-SLACK..=1.0 + SLACK).contains(&s) && (-SLACK..=1.0 + SLACK).contains(&t))
        .then(|| (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
}

/// Every plaquette with nonzero winding, in grid order.
///
/// Each edge phase difference is computed once and shared by both adjacent
/// plaquettes, so windings sum to zero exactly.
pub fn detect_vortices(state: &FieldState) -> Vec<DetectedVortex> {
    let m = state.m;
    let h = 1.0 / m as f64;
    let arg: Vec<f64> = state.u.iter().map(|z| z.im.atan2(z.re)).collect();
    let right = |i: usize| (i / m) * m + (i % m + 1) % m;
    let up = |i: usize| ((i / m + 1) % m) * m + i % m;
    let ex: Vec<f64> = (0..m * m).map(|i| wrap_angle(arg[right(i)] - arg[i])).collect();
    let ey: Vec<f64> = (0..m * m).map(|i| wrap_angle(arg[up(i)] - arg[i])).collect();

    let mut found = Vec::new();
    for i in 0..m * m {
        let circulation = ex[i] + ey[right(i)] - ex[up(i)] - ey[i];
        let degree = (circulation / (2.0 * PI)).round() as i32;
        if degree == 0 {
            continue;
        }
        let (s, t) = bilinear_zero(state.u[i], state.u[right(i)], state.u[up(i)], state.u[up(right(i))])
            .unwrap_or((0.5, 0.5));
        let corner = Vec2::new((i % m) as f64 * h, (i / m) as f64 * h);
        let p = LiftedPoint::from(corner + h * Vec2::new(s, t));
        found.push(DetectedVortex {
            position: p.torus_image(),
            degree,
        });
    }
    found
}

#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub degree: i32,
    /// One lifted position per frame.
    pub positions: Vec<LiftedPoint>,
    /// First frame whose match was ambiguous; later positions are unreliable.
    pub unreliable_from: Option<usize>,
}

/// Greedy nearest-neighbour matching within degree classes.
///
/// `max_step` bounds the expected displacement between frames; a match is
/// flagged when the runner-up is within twice the best distance and the best
/// distance exceeds `max_step / 2`.
pub fn track_from(
    initial: &[LiftedPoint],
    degrees: &[i32],
    frames: &[Vec<DetectedVortex>],
    max_step: f64,
) -> Result<Vec<Track>> {
    if initial.len() != degrees.len() {
        return Err(Error::InvalidArgument("initial positions and degrees differ in length".into()));
    }
    let mut tracks: Vec<Track> = degrees
        .iter()
        .map(|&d| Track {
            degree: d,
            positions: Vec::with_capacity(frames.len()),
            unreliable_from: None,
        })
        .collect();
    let mut last: Vec<LiftedPoint> = initial.to_vec();

    for (f, frame) in frames.iter().enumerate() {
        if frame.len() != tracks.len() {
            return Err(Error::Tracking {
                frame: f,
                reason: format!("expected {} vortices, detected {}", tracks.len(), frame.len()),
            });
        }
        let mut pairs = Vec::new();
        for (k, tr) in tracks.iter().enumerate() {
            for (j, det) in frame.iter().enumerate() {
                if det.degree == tr.degree {
                    pairs.push((last[k].periodic_distance(det.position), k, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut track_done = vec![false; tracks.len()];
        let mut det_used = vec![false; frame.len()];
        for &(dist, k, j) in &pairs {
            if track_done[k] || det_used[j] {
                continue;
            }
            track_done[k] = true;
            det_used[j] = true;
            let runner_up = pairs
                .iter()
                .filter(|&&(_, kk, jj)| kk == k && jj != j)
                .map(|p| p.0)
                .fold(f64::INFINITY, f64::min);
            if runner_up < 2.0 * dist && dist > 0.5 * max_step && tracks[k].unreliable_from.is_none() {
                tracks[k].unreliable_from = Some(f);
            }
            let next = last[k] + frame[j].position.periodic_displacement(last[k]);
            last[k] = next;
            tracks[k].positions.push(next);
        }
        if let Some(k) = track_done.iter().position(|d| !d) {
            return Err(Error::Tracking {
                frame: f,
                reason: format!("no detection of degree {} left for vortex {k}", tracks[k].degree),
            });
        }
    }
    Ok(tracks)
}

/// Extends every track by one frame in which some vortices have annihilated.
///
/// Survivors are matched greedily as in [`track_from`]. Each vanished vortex
/// is paired with the nearest vanished vortex of opposite degree and both
/// end at the midpoint of their last positions.
pub fn close_tracks(tracks: &mut [Track], frame: &[DetectedVortex]) {
    let last: Vec<LiftedPoint> = tracks.iter().map(|t| *t.positions.last().expect("non-empty track")).collect();
    let mut pairs = Vec::new();
    for (k, tr) in tracks.iter().enumerate() {
        for (j, det) in frame.iter().enumerate() {
            if det.degree == tr.degree {
                pairs.push((last[k].periodic_distance(det.position), k, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut next: Vec<Option<LiftedPoint>> = vec![None; tracks.len()];
    let mut det_used = vec![false; frame.len()];
    for &(_, k, j) in &pairs {
        if next[k].is_none() && !det_used[j] {
            det_used[j] = true;
            next[k] = Some(last[k] + frame[j].position.periodic_displacement(last[k]));
        }
    }
    let mut vanished: Vec<(f64, usize, usize)> = Vec::new();
    for a in 0..tracks.len() {
        for b in a + 1..tracks.len() {
            if next[a].is_none() && next[b].is_none() && tracks[a].degree == -tracks[b].degree {
                vanished.push((last[a].periodic_distance(last[b]), a, b));
            }
        }
    }
    vanished.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    for (_, a, b) in vanished {
        if next[a].is_none() && next[b].is_none() {
            let mid = last[a] + 0.5 * last[b].periodic_displacement(last[a]);
            next[a] = Some(mid);
            next[b] = Some(last[b] + mid.periodic_displacement(last[b]));
        }
    }
    for (tr, p) in tracks.iter_mut().zip(next) {
        tr.positions.push(p.unwrap_or(*tr.positions.last().expect("non-empty track")));
    }
}

/// Tracks seeded from the detections of the first frame.
pub fn track(frames: &[Vec<DetectedVortex>], max_step: f64) -> Result<Vec<Track>> {
    let Some(first) = frames.first() else {
        return Ok(Vec::new());
    };
    let initial: Vec<LiftedPoint> = first.iter().map(|d| d.position).collect();
    let degrees: Vec<i32> = first.iter().map(|d| d.degree).collect();
    track_from(&initial, &degrees, frames, max_step)
}
