use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Uniform grid in `t = log x` on `[t_min, t_max]`, with `x_max = e^{t_max} < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    t_min: f64,
    t_max: f64,
    n: usize,
}

pub const DEFAULT_T_MIN: f64 = -40.0;
pub const DEFAULT_NODES: usize = 4096;
pub const MIN_NODES: usize = 8;

impl RadialGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if t_min >= t_max {
            return Err(Error::InvalidGrid(format!(
                "t_min ({t_min}) must be below t_max ({t_max})"
            )));
        }
        if t_max >= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "x_max = e^{t_max} must be below 1"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes, got {n}"
            )));
        }
        Ok(Self { t_min, t_max, n })
    }

    /// `t ∈ [−40, log 0.5]` with 4096 nodes.
    pub fn default_cusp() -> Self {
        Self::new(DEFAULT_T_MIN, 0.5f64.ln(), DEFAULT_NODES).expect("default grid is valid")
    }

    pub fn with_nodes(n: usize) -> Result<Self> {
        Self::new(DEFAULT_T_MIN, 0.5f64.ln(), n)
    }

    pub fn from_x_range(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min > 0.0) {
            return Err(Error::InvalidGrid(format!("x_min must be positive, got {x_min}")));
        }
        Self::new(x_min.ln(), x_max.ln(), n)
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * (self.n - 1) + 1,
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn x_max(&self) -> f64 {
        self.t_max.exp()
    }

    pub fn x_min(&self) -> f64 {
        self.t_min.exp()
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t_max
        } else {
            self.t_min + i as f64 * self.spacing()
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.t(i).exp()
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.t(i))
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }

    /// Grids agree up to round-off of a CSV round trip.
    pub fn same_as(&self, other: &Self) -> bool {
        let tol = 1e-12 * (1.0 + self.t_min.abs());
        self.n == other.n
            && (self.t_min - other.t_min).abs() <= tol
            && (self.t_max - other.t_max).abs() <= tol
    }

    /// Index of the first node with `x ≥ x_target` (clamped to the grid).
    pub fn index_at_or_above(&self, x_target: f64) -> usize {
        let t = x_target.ln();
        let raw = ((t - self.t_min) / self.spacing()).ceil();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.n - 1)
        }
    }

    /// Index of the last node with `x ≤ x_target` (clamped to the grid).
    pub fn index_at_or_below(&self, x_target: f64) -> usize {
        let t = x_target.ln();
        let raw = ((t - self.t_min) / self.spacing() + 1e-9).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.n - 1)
        }
    }
}

/// Samples of a scalar function of `x` on a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { node, value });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &RadialGrid, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    /// Sample `f(x)`. Panics on non-finite samples; use [`RadialField::new`] to check.
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_log_fn(grid, |t| f(t.exp()))
    }

    /// Sample `g(t)` with `t = log x`.
    pub fn from_log_fn(grid: &RadialGrid, g: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.ts().map(g).collect();
        Self::new(grid.clone(), values).expect("sampled function must be finite on the grid")
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `"x,value"` header, ascending `x`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.xs().zip(&self.values) {
            let _ = writeln!(out, "{x:.16e},{v:.16e}");
        }
        out
    }

    /// Read the CSV written by [`RadialField::to_csv`]; rows must be uniform in `log x`.
    pub fn from_csv(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        if header.trim() != "x,value" {
            return Err(Error::Parse(format!("expected header \"x,value\", got {header:?}")));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (x, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", lineno + 2)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {s:?}", lineno + 2)))
            };
            xs.push(parse(x)?);
            vs.push(parse(v)?);
        }
        if xs.len() < MIN_NODES {
            return Err(Error::InvalidGrid(format!("only {} rows", xs.len())));
        }
        let grid = RadialGrid::new(xs[0].ln(), xs[xs.len() - 1].ln(), xs.len())?;
        let h = grid.spacing();
        for (i, x) in xs.iter().enumerate() {
            if (x.ln() - grid.t(i)).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "row {} is not on a uniform log-x grid",
                    i + 2
                )));
            }
        }
        Self::new(grid, vs)
    }
}
