//! CSV tables and self-contained SVG plots.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! inputs always give byte-identical files.

use crate::dynamics::TrajectorySample;
use crate::error::Result;
use crate::geometry::LiftedPoint;
use crate::nlw::Diagnostics;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Shortest round-trip digits; scientific notation outside `[1e-4, 1e6)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn trajectory_header(count: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for j in 1..=count {
        cols.push(format!("x{j}"));
        cols.push(format!("y{j}"));
    }
    for j in 1..=count {
        cols.push(format!("x{j}_torus"));
        cols.push(format!("y{j}_torus"));
    }
    for j in 1..=count {
        cols.push(format!("vx{j}"));
        cols.push(format!("vy{j}"));
    }
    cols.extend(["conserved_energy", "qx", "qy"].map(String::from));
    cols.join(",")
}

pub fn trajectory_row(s: &TrajectorySample) -> String {
    let mut row = num(s.t);
    for p in &s.positions {
        let _ = write!(row, ",{},{}", num(p.x), num(p.y));
    }
    for p in s.torus_positions() {
        let _ = write!(row, ",{},{}", num(p.x), num(p.y));
    }
    for v in &s.velocities {
        let _ = write!(row, ",{},{}", num(v.x), num(v.y));
    }
    let _ = write!(row, ",{},{},{}", num(s.conserved_energy), num(s.q_star.x), num(s.q_star.y));
    row
}

pub fn write_trajectory_csv(path: &Path, samples: &[TrajectorySample]) -> Result<()> {
    let count = samples.first().map_or(0, |s| s.positions.len());
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", trajectory_header(count))?;
    for s in samples {
        writeln!(out, "{}", trajectory_row(s))?;
    }
    out.flush()?;
    Ok(())
}

/// One PDE frame: functionals plus the number of detected vortices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub diagnostics: Diagnostics,
    pub relative_drift: f64,
    pub vortex_count: usize,
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "t,energy,momentum_x,momentum_y,hamiltonian,relative_drift,vortex_count")?;
    for r in rows {
        let d = &r.diagnostics;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(d.t),
            num(d.energy),
            num(d.momentum.x),
            num(d.momentum.y),
            num(d.hamiltonian),
            num(r.relative_drift),
            r.vortex_count
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_convergence_csv(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "eps,dev")?;
    for (eps, dev) in rows {
        writeln!(out, "{},{}", num(*eps), num(*dev))?;
    }
    out.flush()?;
    Ok(())
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

fn marker(out: &mut String, x: f64, y: f64, degree: i32, color: &str) {
    let r = 7.0;
    let (a, b) = if degree > 0 { ((r, 0.0), (0.0, r)) } else { ((r, r), (r, -r)) };
    for (dx, dy) in [a, b] {
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            x - dx,
            y - dy,
            x + dx,
            y + dy
        );
    }
}

/// Torus-image paths in the fundamental domain, `+` / `×` at the start points.
pub fn trajectories_svg(title: &str, degrees: &[i32], paths: &[Vec<LiftedPoint>]) -> String {
    let total = SIZE + 2.0 * MARGIN;
    let px = |p: LiftedPoint| (MARGIN + p.x * SIZE, MARGIN + (1.0 - p.y) * SIZE);
    let mut out = svg_open(total, total);
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{}</text>", total / 2.0, escape(title));
    for (label, x, y) in [("0", MARGIN, MARGIN + SIZE + 16.0), ("1", MARGIN + SIZE, MARGIN + SIZE + 16.0)] {
        let _ = writeln!(out, "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">{label}</text>");
    }
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">1</text>", MARGIN - 6.0, MARGIN + 4.0);

    for (j, path) in paths.iter().enumerate() {
        let color = COLORS[j % COLORS.len()];
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let mut prev: Option<LiftedPoint> = None;
        let flush = |seg: &mut Vec<(f64, f64)>, out: &mut String| {
            if seg.len() > 1 {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                    pts.join(" ")
                );
            }
            seg.clear();
        };
        for p in path.iter().map(|p| p.torus_image()) {
            if let Some(q) = prev {
                if (p.x - q.x).abs() > 0.5 || (p.y - q.y).abs() > 0.5 {
                    flush(&mut segment, &mut out);
                }
            }
            segment.push(px(p));
            prev = Some(p);
        }
        flush(&mut segment, &mut out);
        if let Some(&start) = path.first() {
            let (x, y) = px(start.torus_image());
            marker(&mut out, x, y, degrees[j], color);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Lifted coordinates of every vortex against time.
pub fn coordinates_svg(title: &str, times: &[f64], paths: &[Vec<LiftedPoint>]) -> String {
    let (w, h) = (2.0 * SIZE, SIZE);
    let mut out = svg_open(w + 2.0 * MARGIN + 80.0, h + 2.0 * MARGIN);
    let t_max = times.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let values = paths.iter().flat_map(|p| p.iter().flat_map(|q| [q.x, q.y]));
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let px = |t: f64, v: f64| (MARGIN + t / t_max * w, MARGIN + (hi - v) / (hi - lo) * h);
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{}</text>", MARGIN + w / 2.0, escape(title));
    let _ = writeln!(out, "<text x=\"{MARGIN}\" y=\"{}\" text-anchor=\"middle\">0</text>", MARGIN + h + 16.0);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t = {t_max:.4}</text>",
        MARGIN + w,
        MARGIN + h + 16.0
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{hi:.3}</text>", MARGIN - 4.0, MARGIN + 4.0);
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{lo:.3}</text>", MARGIN - 4.0, MARGIN + h);

    let mut series = 0;
    for (j, path) in paths.iter().enumerate() {
        for (axis, dash) in [("x", ""), ("y", " stroke-dasharray=\"6 3\"")] {
            let color = COLORS[j % COLORS.len()];
            let pts: Vec<String> = times
                .iter()
                .zip(path)
                .map(|(&t, p)| {
                    let (x, y) = px(t, if axis == "x" { p.x } else { p.y });
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
                pts.join(" ")
            );
            let ly = MARGIN + 16.0 * (series as f64 + 1.0);
            let lx = MARGIN + w + 12.0;
            let _ = writeln!(
                out,
                "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
                lx + 20.0
            );
            let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{axis}{}</text>", lx + 26.0, ly + 4.0, j + 1);
            series += 1;
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn sample(t: f64) -> TrajectorySample {
        TrajectorySample {
            t,
            positions: vec![LiftedPoint::new(1.25, -0.5), LiftedPoint::new(0.5, 0.5)],
            velocities: vec![Vec2::new(0.1, 0.0), Vec2::new(-0.1, 0.0)],
            conserved_energy: -3.5,
            q_star: Vec2::new(1.0, 2.0),
        }
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 0.3, -2.5132741228718345, 5.1429473673379704e-27, 1.5e7, 1e-4] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(5e-27), "5e-27");
        assert_eq!(num(0.25), "0.25");
    }

    #[test]
    fn header_and_row_agree_in_width() {
        let header = trajectory_header(2);
        assert!(header.starts_with("t,x1,y1,x2,y2,x1_torus"));
        assert!(header.ends_with("conserved_energy,qx,qy"));
        let row = trajectory_row(&sample(0.5));
        assert_eq!(header.split(',').count(), row.split(',').count());
        assert!(row.contains(",0.25,0.5,"));
    }

    #[test]
    fn trajectory_svg_has_markers_and_breaks_at_the_boundary() {
        let paths = vec![
            vec![LiftedPoint::new(0.9, 0.5), LiftedPoint::new(0.95, 0.5), LiftedPoint::new(1.05, 0.5), LiftedPoint::new(1.1, 0.5)],
            vec![LiftedPoint::new(0.2, 0.2), LiftedPoint::new(0.3, 0.2)],
        ];
        let svg = trajectories_svg("test", &[1, -1], &paths);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        // Two strokes per marker.
        assert_eq!(svg.matches("stroke-width=\"2\"").count(), 4);
        assert!(!svg.contains("href"));
    }

    #[test]
    fn coordinate_plot_has_one_series_per_axis() {
        let times = [0.0, 0.1, 0.2];
        let paths = vec![vec![LiftedPoint::new(0.48, 0.0); 3], vec![LiftedPoint::new(0.52, 0.0); 3]];
        let svg = coordinates_svg("a", &times, &paths);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains(">y2<"));
    }
}
