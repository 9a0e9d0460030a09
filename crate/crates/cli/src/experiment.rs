//! `ExperimentSpec`: every setting of a run, with a flat `key=value` text form.
//!
//! The canonical text lists keys in a fixed order, one per line, and omits keys
//! whose value is unset. `candidate` may repeat; list values are comma separated.
//! Parsing accepts blank lines and `#` comments and rejects unknown or duplicated keys.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nws_core::{BoundaryCondition, Candidate64, Grid64, GridSpec, Params64, PdeParams, QuadTolerance, StencilSpec};

use crate::error::{CliError, CliResult};

/// `<dim>d:<lo>:<hi>:<points>`, the same bounds on every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridArg {
    pub const fn new(dim: usize, lo: f64, hi: f64, points: usize) -> Self {
        Self { dim, lo, hi, points }
    }

    pub fn build(&self) -> CliResult<Grid64> {
        Ok(GridSpec::cube(self.dim, self.lo, self.hi, self.points)?)
    }
}

impl fmt::Display for GridArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}d:{}:{}:{}", self.dim, self.lo, self.hi, self.points)
    }
}

impl FromStr for GridArg {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::usage(format!("grid '{s}' is not of the form <dim>d:<lo>:<hi>:<points>"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [dim, lo, hi, points] = parts[..] else {
            return Err(bad());
        };
        let dim = dim.strip_suffix('d').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        Ok(Self {
            dim,
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            points: points.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub nu: f64,
    pub beta: f64,
    pub n: f64,
    /// Evaluation time of residual runs.
    pub t: f64,
    pub candidates: Vec<Candidate64>,
    pub grid: Option<GridArg>,
    /// Spatial FD order of the residual engine (2 or 4).
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub bc: BoundaryCondition,
    /// Solver step; `None` is the automatic CFL step.
    pub dt: Option<f64>,
    pub safety: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub levels: Vec<f64>,
    pub out: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let quad = StencilSpec::<f64>::default().quad;
        Self {
            name: "experiment".into(),
            nu: 1.0,
            beta: 1.0,
            n: 2.0,
            t: 1.0,
            candidates: Vec::new(),
            grid: None,
            order: 2,
            rel_tol: quad.rel,
            abs_tol: quad.abs,
            bc: BoundaryCondition::Dirichlet,
            dt: None,
            safety: 0.4,
            t_start: 0.0,
            t_end: 1.0,
            snapshots: Vec::new(),
            levels: Vec::new(),
            out: PathBuf::from("nws-out"),
        }
    }
}

const KEYS: [&str; 18] = [
    "name", "nu", "beta", "n", "t", "candidate", "grid", "order", "rel_tol", "abs_tol", "bc", "dt", "safety",
    "t_start", "t_end", "snapshots", "levels", "out",
];

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentSpec {
    pub fn params(&self) -> CliResult<Params64> {
        Ok(PdeParams::new(self.nu, self.beta, self.n)?)
    }

    pub fn quad(&self) -> QuadTolerance<f64> {
        QuadTolerance::new(self.rel_tol, self.abs_tol)
    }

    pub fn stencil(&self) -> CliResult<StencilSpec<f64>> {
        Ok(StencilSpec {
            spatial_order: nws_core::SpatialOrder::from_order(self.order)?,
            quad: self.quad(),
            ..StencilSpec::default()
        })
    }

    /// Canonical `(key, value)` pairs in file order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("name", self.name.clone()),
            ("nu", self.nu.to_string()),
            ("beta", self.beta.to_string()),
            ("n", self.n.to_string()),
            ("t", self.t.to_string()),
        ];
        out.extend(self.candidates.iter().map(|c| ("candidate", c.to_string())));
        if let Some(g) = &self.grid {
            out.push(("grid", g.to_string()));
        }
        out.push(("order", self.order.to_string()));
        out.push(("rel_tol", self.rel_tol.to_string()));
        out.push(("abs_tol", self.abs_tol.to_string()));
        out.push(("bc", self.bc.to_string()));
        out.push(("dt", self.dt.map_or_else(|| "auto".to_string(), |d| d.to_string())));
        out.push(("safety", self.safety.to_string()));
        out.push(("t_start", self.t_start.to_string()));
        out.push(("t_end", self.t_end.to_string()));
        if !self.snapshots.is_empty() {
            out.push(("snapshots", join(&self.snapshots)));
        }
        if !self.levels.is_empty() {
            out.push(("levels", join(&self.levels)));
        }
        out.push(("out", self.out.display().to_string()));
        out
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        let num = |v: &str| -> CliResult<f64> {
            v.parse::<f64>()
                .map_err(|_| CliError::usage(format!("{key}: '{v}' is not a number")))
        };
        let list = |v: &str| -> CliResult<Vec<f64>> {
            if v.is_empty() {
                Ok(Vec::new())
            } else {
                v.split(',').map(|s| num(s.trim())).collect()
            }
        };
        match key {
            "name" => self.name = value.to_string(),
            "nu" => self.nu = num(value)?,
            "beta" => self.beta = num(value)?,
            "n" => self.n = num(value)?,
            "t" => self.t = num(value)?,
            "candidate" => self.candidates.push(
                value
                    .parse()
                    .map_err(|e| CliError::usage(format!("candidate '{value}': {e}")))?,
            ),
            "grid" => self.grid = Some(value.parse()?),
            "order" => {
                self.order = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("order: '{value}' is not an integer")))?
            }
            "rel_tol" => self.rel_tol = num(value)?,
            "abs_tol" => self.abs_tol = num(value)?,
            "bc" => self.bc = value.parse().map_err(|e| CliError::usage(format!("bc: {e}")))?,
            "dt" => self.dt = if value == "auto" { None } else { Some(num(value)?) },
            "safety" => self.safety = num(value)?,
            "t_start" => self.t_start = num(value)?,
            "t_end" => self.t_end = num(value)?,
            "snapshots" => self.snapshots = list(value)?,
            "levels" => self.levels = list(value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(CliError::usage(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut spec = Self::default();
        let mut seen = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::usage(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if key != "candidate" && seen.contains(&key) {
                return Err(CliError::usage(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            seen.push(key);
            spec.set(key, value)?;
        }
        Ok(spec)
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
