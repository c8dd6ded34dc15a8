use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitter::linear_regression;
use crate::geometry::{ModelMetric, RadialGrid};

/// Linear model problem `∂_t u = Δu − u + x^γ g(x, t)`, `u(0) = 0`, Dirichlet zero at
/// both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayProblem {
    pub metric: ModelMetric,
    pub grid: RadialGrid,
    pub gamma: f64,
    pub t_final: f64,
    pub dt: f64,
}

impl DecayProblem {
    pub fn new(grid: RadialGrid, gamma: f64, t_final: f64, dt: f64) -> Self {
        Self {
            metric: ModelMetric::poincare(),
            grid,
            gamma,
            t_final,
            dt,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter("final time must be at least dt".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayTrajectory {
    pub times: Vec<f64>,
    /// `sup_x |u(t)|/x^γ` for each time slice.
    pub ratios: Vec<f64>,
    /// `sup |g|` sampled over the run.
    pub sup_g: f64,
}

impl DecayTrajectory {
    pub fn sup_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub gamma: f64,
    pub trajectory: DecayTrajectory,
    /// Fitted bound `sup|u|/x^γ ≤ K e^{ct}`; `K` is inflated until the bound holds at
    /// every slice.
    pub k: f64,
    pub c: f64,
    pub refined_sup_ratio: f64,
    /// `|sup ratio (refined) − sup ratio| / sup ratio`, zero when both vanish.
    pub refinement_change: f64,
}

impl DecayCertificate {
    pub fn bound(&self, t: f64) -> f64 {
        self.k * (self.c * t).exp()
    }

    pub fn holds(&self) -> bool {
        self.trajectory
            .times
            .iter()
            .zip(&self.trajectory.ratios)
            .all(|(&t, &r)| r <= self.bound(t) * (1.0 + 1e-12))
    }
}

/// Integrate the linear model problem by implicit Euler.
pub fn integrate_linear(p: &DecayProblem, g: &dyn Fn(f64, f64) -> f64) -> Result<DecayTrajectory> {
    p.validate()?;
    let grid = &p.grid;
    let n = grid.len();
    let xs: Vec<f64> = grid.xs().collect();
    let weights: Vec<f64> = xs.iter().map(|x| x.powf(p.gamma)).collect();
    let lap = p.metric.base().laplacian_matrix(grid)?;
    let steps = (p.t_final / p.dt).round().max(1.0) as usize;
    let dt = p.t_final / steps as f64;

    let mut m = lap.clone();
    for i in 0..n {
        m.lower[i] *= -dt;
        m.upper[i] *= -dt;
        m.diag[i] = 1.0 + dt - dt * m.diag[i];
    }
    m.pin_row(0);
    m.pin_row(n - 1);

    let mut u = vec![0.0; n];
    let mut times = vec![0.0];
    let mut ratios = vec![0.0];
    let mut sup_g = 0.0f64;
    for step in 1..=steps {
        let t = step as f64 * dt;
        let mut rhs = u.clone();
        for i in 1..n - 1 {
            let gi = g(xs[i], t);
            if !gi.is_finite() {
                return Err(Error::NonFinite { node: i, value: gi });
            }
            sup_g = sup_g.max(gi.abs());
            rhs[i] += dt * weights[i] * gi;
        }
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        u = m.solve(&rhs)?;
        let ratio = (1..n - 1).fold(0.0f64, |r, i| r.max(u[i].abs() / weights[i]));
        times.push(t);
        ratios.push(ratio);
    }
    Ok(DecayTrajectory { times, ratios, sup_g })
}

/// Fit `K e^{ct}` over the positive slices and compare against one spatial refinement.
pub fn decay_certificate(p: &DecayProblem, g: &dyn Fn(f64, f64) -> f64) -> Result<DecayCertificate> {
    let trajectory = integrate_linear(p, g)?;
    let refined = DecayProblem {
        grid: p.grid.refined(),
        ..p.clone()
    };
    let refined_sup_ratio = integrate_linear(&refined, g)?.sup_ratio();

    let pts: Vec<(f64, f64)> = trajectory
        .times
        .iter()
        .zip(&trajectory.ratios)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&t, &r)| (t, r.ln()))
        .collect();
    let c = linear_regression(&pts).map_or(0.0, |(slope, _)| slope.max(0.0));
    let k = trajectory
        .times
        .iter()
        .zip(&trajectory.ratios)
        .fold(0.0f64, |k, (&t, &r)| k.max(r * (-c * t).exp()));
    let sup = trajectory.sup_ratio();
    let refinement_change = if sup == 0.0 && refined_sup_ratio == 0.0 {
        0.0
    } else {
        (refined_sup_ratio - sup).abs() / sup.max(refined_sup_ratio)
    };
    Ok(DecayCertificate {
        gamma: p.gamma,
        trajectory,
        k,
        c,
        refined_sup_ratio,
        refinement_change,
    })
}
