use serde::Serialize;

use crate::banded::Tridiagonal;
use crate::error::{Error, Result};
use crate::geometry::{ricci_radial, ModelMetric, RadialField, RadialGrid};
use crate::newton::{self, NewtonParams, NewtonSystem};

/// Density of `ω_t = −Ric(ω₀) + e^{−t}(ω₀ + Ric(ω₀))` relative to the base model
/// `a dx²/x² + b x²dθ²`.
pub fn omega_t_schedule(omega0: &ModelMetric, grid: &RadialGrid, t: f64) -> Result<RadialField> {
    let ric = ricci_radial(omega0, grid)?;
    let d0 = omega0.conformal_density(grid)?;
    let decay = (-t).exp();
    let values: Vec<f64> = ric
        .values()
        .iter()
        .zip(d0.values())
        .map(|(r, d)| -r + decay * (d + r))
        .collect();
    if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Positivity {
            node,
            x: grid.x(node),
            value,
        });
    }
    RadialField::new(grid.clone(), values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowProblem {
    pub omega0: ModelMetric,
    pub grid: RadialGrid,
    pub t_final: f64,
    pub dt: f64,
    /// Smallest step allowed after halvings.
    pub dt_min: f64,
    /// Times at which states are recorded (the initial state is always recorded).
    pub output_times: Vec<f64>,
    pub newton: NewtonParams,
}

impl FlowProblem {
    pub fn new(omega0: ModelMetric, grid: RadialGrid, t_final: f64, dt: f64) -> Self {
        Self {
            omega0,
            grid,
            t_final,
            dt,
            dt_min: dt * 2f64.powi(-10),
            output_times: vec![t_final],
            newton: NewtonParams::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "final time {} must be at least dt {}",
                self.t_final, self.dt
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt) {
            return Err(Error::InvalidParameter("dt_min must lie in (0, dt]".into()));
        }
        if self.output_times.iter().any(|&t| !(t >= 0.0 && t <= self.t_final)) {
            return Err(Error::InvalidParameter("output times must lie in [0, T]".into()));
        }
        self.newton.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSummary {
    pub t: f64,
    pub sup_u: f64,
    /// `min (ω_t + i∂∂̄u)` density over nodes carrying the Laplacian.
    pub min_positivity: f64,
    pub boundary_constant: f64,
    pub newton_iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u: RadialField,
    pub omega_t_density: RadialField,
    /// Density of `ω_t + i∂∂̄u` relative to the base model; node 0 repeats node 1.
    pub flow_density: RadialField,
    pub summary: FlowSummary,
}

/// Operator with interior rows and a mirrored-ghost Neumann row at `t_max`.
fn flow_laplacian(omega0: &ModelMetric, grid: &RadialGrid) -> Result<Tridiagonal> {
    let base = omega0.base();
    let mut m = base.laplacian_matrix(grid)?;
    let n = grid.len();
    let h = grid.spacing();
    let s = 1.0 / (2.0 * base.a());
    let (up, down) = ((0.5 * h).exp() / (h * h), (-0.5 * h).exp() / (h * h));
    m.lower[n - 1] = s * (up + down);
    m.diag[n - 1] = -s * (up + down);
    m.upper[n - 1] = 0.0;
    Ok(m)
}

struct StepSystem<'a> {
    lap: &'a Tridiagonal,
    w: &'a [f64],
    d0: &'a [f64],
    prev: &'a [f64],
    dt: f64,
    left: f64,
}

impl NewtonSystem for StepSystem<'_> {
    fn residual(&self, u: &[f64]) -> Option<Vec<f64>> {
        let n = u.len();
        let lu = self.lap.mul_vec(u);
        let mut r = vec![0.0; n];
        r[0] = u[0] - self.left;
        for i in 1..n {
            let dens = self.w[i] + lu[i];
            if !(dens > 0.0) {
                return None;
            }
            r[i] = u[i] - self.prev[i] - self.dt * ((dens / self.d0[i]).ln() - u[i]);
        }
        Some(r)
    }

    fn jacobian(&self, u: &[f64]) -> Tridiagonal {
        let n = u.len();
        let lu = self.lap.mul_vec(u);
        let mut j = Tridiagonal::zeros(n);
        j.diag[0] = 1.0;
        for i in 1..n {
            let w = self.dt / (self.w[i] + lu[i]);
            j.lower[i] = -w * self.lap.lower[i];
            j.diag[i] = 1.0 + self.dt - w * self.lap.diag[i];
            j.upper[i] = -w * self.lap.upper[i];
        }
        j
    }
}

/// Average of the flow density over the deepest tenth of the grid (node 0 excluded).
pub fn boundary_constant(flow_density: &RadialField) -> f64 {
    let n = flow_density.len();
    let hi = (n / 10).max(2);
    let vals = &flow_density.values()[1..hi];
    vals.iter().sum::<f64>() / vals.len() as f64
}

fn make_state(
    t: f64,
    u: Vec<f64>,
    lap: &Tridiagonal,
    w: &RadialField,
    grid: &RadialGrid,
    iterations: usize,
    residual: f64,
) -> Result<FlowState> {
    let lu = lap.mul_vec(&u);
    let mut dens: Vec<f64> = w.values().iter().zip(&lu).map(|(a, b)| a + b).collect();
    dens[0] = dens[1];
    let min_positivity = dens[1..].iter().copied().fold(f64::INFINITY, f64::min);
    let flow_density = RadialField::new(grid.clone(), dens)?;
    let u = RadialField::new(grid.clone(), u)?;
    Ok(FlowState {
        t,
        summary: FlowSummary {
            t,
            sup_u: u.max_abs(),
            min_positivity,
            boundary_constant: boundary_constant(&flow_density),
            newton_iterations: iterations,
            residual,
        },
        u,
        omega_t_density: w.clone(),
        flow_density,
    })
}

/// Backward Euler for `∂_t u = log((ω_t + i∂∂̄u)/ω₀) − u`, `u(0) = 0`.
///
/// The node at `t_min` follows the backward-Euler discretization of the restricted
/// equation `u' = −u + log(c_t/c)` with the node-0 densities; `t_max` is Neumann.
/// A failed step is retried with half the step size down to `dt_min`.
pub fn run_flow(p: &FlowProblem) -> Result<Vec<FlowState>> {
    p.validate()?;
    let grid = &p.grid;
    let n = grid.len();
    let lap = flow_laplacian(&p.omega0, grid)?;
    let d0 = p.omega0.conformal_density(grid)?;
    let mut outputs: Vec<f64> = p.output_times.clone();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let mut t = 0.0;
    let mut u = vec![0.0; n];
    let w0 = omega_t_schedule(&p.omega0, grid, 0.0)?;
    let mut states = vec![make_state(0.0, u.clone(), &lap, &w0, grid, 0, 0.0)?];
    let mut next_out = outputs.iter().position(|&o| o > 0.0);
    let eps = 1e-12 * p.t_final;

    while t < p.t_final - eps {
        let target = next_out.map_or(p.t_final, |k| outputs[k]).min(p.t_final);
        let mut dt = p.dt.min(target - t);
        loop {
            let t_new = if target - (t + dt) <= eps { target } else { t + dt };
            let step = t_new - t;
            let w = omega_t_schedule(&p.omega0, grid, t_new)?;
            let left = (u[0] + step * (w.values()[0] / d0.values()[0]).ln()) / (1.0 + step);
            let sys = StepSystem {
                lap: &lap,
                w: w.values(),
                d0: d0.values(),
                prev: &u,
                dt: step,
                left,
            };
            match newton::solve(&sys, u.clone(), &p.newton) {
                Ok((u_new, rep)) => {
                    t = t_new;
                    u = u_new;
                    if next_out.is_some_and(|k| (outputs[k] - t).abs() <= eps) {
                        states.push(make_state(t, u.clone(), &lap, &w, grid, rep.iterations, rep.final_residual())?);
                        next_out = next_out.map(|k| k + 1).filter(|&k| k < outputs.len());
                    }
                    break;
                }
                Err(err) => {
                    dt *= 0.5;
                    if dt < p.dt_min {
                        return Err(Error::StepRejected {
                            time: t,
                            dt,
                            reason: err.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(states)
}
