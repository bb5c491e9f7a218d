//! Scenario descriptions: built-in presets and a flat `key = value` format.
//!
//! ```text
//! # comment
//! preset = fig1-left          # optional starting point
//! name = my-dipole
//! mode = ode                  # ode | pde | compare
//! positions = 0.3,0; 0.7,0
//! degrees = 1,-1
//! branch_offset = 0,0
//! dt = 5e-6
//! t_end = 1.0
//! eps = 0.125, 0.0625
//! grid = 256
//! output_interval = 1e-4
//! out = runs/my-dipole
//! ```

use crate::dynamics::DEFAULT_DT;
use crate::energy::VortexConfig;
use crate::error::{Error, Result};
use crate::geometry::LiftedPoint;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const PRESETS: [&str; 4] = ["fig1-left", "fig1-right", "fig2-left", "fig2-right"];

/// Horizon for presets; runs usually stop earlier at a collision.
pub const DEFAULT_T_END: f64 = 1.0;
pub const DEFAULT_OUTPUT_INTERVAL: f64 = 1e-4;
pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_EPS: f64 = 1.0 / 32.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Ode,
    Pde,
    Compare,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ode" => Ok(Mode::Ode),
            "pde" => Ok(Mode::Pde),
            "compare" => Ok(Mode::Compare),
            other => Err(Error::Scenario(format!("unknown mode '{other}' (expected ode, pde or compare)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ode => "ode",
            Mode::Pde => "pde",
            Mode::Compare => "compare",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub positions: Vec<LiftedPoint>,
    pub degrees: Vec<i32>,
    pub branch_offset: [i64; 2],
    /// Reduced-dynamics step.
    pub dt: f64,
    /// Horizon; in compare mode this is `t_cmp`.
    pub t_end: f64,
    pub mode: Mode,
    pub eps_list: Vec<f64>,
    pub grid: usize,
    /// PDE step; `None` picks `0.1 ε √κ_ε` and halves it until the Hamiltonian drift is acceptable.
    pub pde_dt: Option<f64>,
    pub output_interval: f64,
    pub output_dir: PathBuf,
}

impl ScenarioSpec {
    fn base(name: &str, positions: [(f64, f64); 2], branch_offset: [i64; 2]) -> Self {
        Self {
            name: name.to_string(),
            positions: positions.iter().map(|&(x, y)| LiftedPoint::new(x, y)).collect(),
            degrees: vec![1, -1],
            branch_offset,
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            mode: Mode::Ode,
            eps_list: vec![DEFAULT_EPS],
            grid: DEFAULT_GRID,
            pde_dt: None,
            output_interval: DEFAULT_OUTPUT_INTERVAL,
            output_dir: PathBuf::from(name),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        let spec = match name {
            "fig1-left" => Self::base(name, [(0.3, 0.0), (0.7, 0.0)], [0, 0]),
            "fig1-right" => Self::base(name, [(0.3, 0.0), (0.7, 0.0)], [1, 0]),
            "fig2-left" => Self::base(name, [(0.48, 0.0), (0.52, 0.0)], [0, 0]),
            "fig2-right" => Self::base(name, [(0.48, 0.0), (0.52, 0.0)], [0, 2]),
            _ => return None,
        };
        Some(spec)
    }

    /// Whether the t-vs-coordinate plot is produced.
    pub fn wants_coordinate_plot(&self) -> bool {
        self.name.starts_with("fig2")
    }

    pub fn config(&self) -> Result<VortexConfig> {
        VortexConfig::new(self.positions.clone(), self.degrees.clone(), self.branch_offset)
            .map_err(|e| Error::Scenario(e.to_string()))
    }

    /// Output stride in reduced-dynamics steps.
    pub fn output_stride(&self) -> usize {
        ((self.output_interval / self.dt).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        self.config()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.output_interval.is_finite() && self.output_interval > 0.0) {
            return bad(format!("output_interval must be positive, got {}", self.output_interval));
        }
        if let Some(h) = self.pde_dt {
            if !(h.is_finite() && h > 0.0) {
                return bad(format!("pde_dt must be positive, got {h}"));
            }
        }
        if self.mode != Mode::Ode {
            if self.eps_list.is_empty() {
                return bad("eps list is empty".into());
            }
            if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
                return bad(format!("eps {e} outside (0, 1)"));
            }
            if self.grid < 64 || !self.grid.is_power_of_two() {
                return bad(format!("grid must be a power of two >= 64, got {}", self.grid));
            }
            if let Some(e) = self.eps_list.iter().find(|&&e| e * (self.grid as f64) < 8.0 - 1e-9) {
                return bad(format!("eps {e} is under-resolved on a {} grid (need eps * grid >= 8)", self.grid));
            }
        }
        if self.mode == Mode::Compare {
            if self.eps_list.len() < 2 {
                return bad("compare needs at least two eps values".into());
            }
            if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
                return bad("compare eps values must be strictly decreasing".into());
            }
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Scenario(format!("bad value for {key}: '{value}' ({what})"));
        match key.trim() {
            "name" => self.name = value.to_string(),
            "mode" => self.mode = value.parse()?,
            "positions" => {
                self.positions = value
                    .split(';')
                    .map(|pair| {
                        let v = parse_list::<f64>(pair).map_err(|_| bad("expected x,y; x,y; ..."))?;
                        match v[..] {
                            [x, y] => Ok(LiftedPoint::new(x, y)),
                            _ => Err(bad("each position needs two coordinates")),
                        }
                    })
                    .collect::<Result<_>>()?
            }
            "degrees" => self.degrees = parse_list(value).map_err(|_| bad("expected integers"))?,
            "branch_offset" => {
                let v: Vec<i64> = parse_list(value).map_err(|_| bad("expected two integers"))?;
                self.branch_offset = v.try_into().map_err(|_| bad("expected two integers"))?;
            }
            "dt" => self.dt = parse_real(value).ok_or_else(|| bad("expected a number"))?,
            "t_end" | "t_cmp" => self.t_end = parse_real(value).ok_or_else(|| bad("expected a number"))?,
            "eps" | "eps_list" => {
                self.eps_list = value
                    .split(',')
                    .map(|s| parse_real(s).ok_or_else(|| bad("expected numbers or fractions like 1/32")))
                    .collect::<Result<_>>()?
            }
            "grid" => self.grid = value.parse().map_err(|_| bad("expected an integer"))?,
            "pde_dt" => self.pde_dt = Some(parse_real(value).ok_or_else(|| bad("expected a number"))?),
            "output_interval" => {
                self.output_interval = parse_real(value).ok_or_else(|| bad("expected a number"))?
            }
            "out" | "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(Error::Scenario(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a configuration file body. A leading `preset` line selects the starting values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Scenario(format!("line {}: expected key = value", n + 1)))?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut spec = match entries.iter().find(|(k, _)| k == "preset") {
            Some((_, p)) => Self::preset(p).ok_or_else(|| Error::Scenario(format!("unknown preset '{p}'")))?,
            None => {
                let mut s = Self::base("custom", [(0.0, 0.0), (0.0, 0.0)], [0, 0]);
                s.positions.clear();
                s.degrees.clear();
                s
            }
        };
        for (k, v) in entries.iter().filter(|(k, _)| k != "preset") {
            spec.set(k, v)?;
        }
        if !entries.iter().any(|(k, _)| k == "out" || k == "output_dir") {
            spec.output_dir = PathBuf::from(&spec.name);
        }
        Ok(spec)
    }

    /// A preset name or a path to a configuration file.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(spec) = Self::preset(source) {
            return Ok(spec);
        }
        let path = Path::new(source);
        if !path.is_file() {
            return Err(Error::Scenario(format!(
                "'{source}' is neither a preset ({}) nor a readable file",
                PRESETS.join(", ")
            )));
        }
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, ()> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| ())).collect()
}

/// A decimal number or a fraction `p/q`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?,
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}
