//! Damped Newton iteration for systems with tridiagonal Jacobians.

use serde::{Deserialize, Serialize};

use crate::banded::Tridiagonal;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonParams {
    pub max_iter: usize,
    /// Stop once the sup-norm residual is at or below this.
    pub tol: f64,
    /// Smallest step fraction tried before giving up.
    pub damping_min: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self {
            max_iter: 60,
            tol: 1e-11,
            damping_min: 2f64.powi(-20),
        }
    }
}

impl NewtonParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("newton.max_iter must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("newton.tol must be positive".into()));
        }
        if !(self.damping_min > 0.0 && self.damping_min <= 1.0) {
            return Err(Error::InvalidParameter("newton.damping_min must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Sup-norm residual of every accepted iterate, starting with the initial guess.
    pub residuals: Vec<f64>,
    /// Step fraction used for each accepted step.
    pub dampings: Vec<f64>,
}

impl NewtonReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// A nonlinear system `R(u) = 0` with tridiagonal Jacobian.
pub trait NewtonSystem {
    /// `None` when `u` is outside the admissible set (e.g. positivity fails).
    fn residual(&self, u: &[f64]) -> Option<Vec<f64>>;
    fn jacobian(&self, u: &[f64]) -> Tridiagonal;
    /// Jacobian entry at `(0, 2)`, for three-point boundary rows.
    fn corner(&self) -> f64 {
        0.0
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const ARMIJO: f64 = 1e-4;

/// Newton with step halving; a step is accepted when admissible and
/// `|R(u + sδ)| ≤ (1 − 10⁻⁴ s)|R(u)|`.
pub fn solve(system: &impl NewtonSystem, mut u: Vec<f64>, params: &NewtonParams) -> Result<(Vec<f64>, NewtonReport)> {
    params.validate()?;
    let mut r = system.residual(&u).ok_or_else(|| {
        Error::InvalidParameter("initial iterate is outside the admissible set".into())
    })?;
    let mut norm = sup_norm(&r);
    let mut report = NewtonReport {
        residuals: vec![norm],
        ..Default::default()
    };
    for iteration in 0..params.max_iter {
        if norm <= params.tol {
            return Ok((u, report));
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = system.jacobian(&u).solve_with_corner(system.corner(), &neg)?;
        let mut s = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + s * d).collect();
            if let Some(rt) = system.residual(&trial) {
                let nt = sup_norm(&rt);
                if nt.is_finite() && nt <= (1.0 - ARMIJO * s) * norm {
                    u = trial;
                    r = rt;
                    norm = nt;
                    break;
                }
            }
            s *= 0.5;
            if s < params.damping_min {
                // Round-off floor: the full step no longer decreases the residual.
                if norm <= params.tol * 1e3 {
                    return Ok((u, report));
                }
                return Err(Error::DampingFloor {
                    iteration,
                    residual: norm,
                });
            }
        }
        report.iterations += 1;
        report.residuals.push(norm);
        report.dampings.push(s);
    }
    if norm <= params.tol {
        Ok((u, report))
    } else {
        Err(Error::NewtonFailure {
            iterations: params.max_iter,
            residual: norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `uᵢ³ + uᵢ − bᵢ = 0`, decoupled.
    struct Cubic(Vec<f64>);

    impl NewtonSystem for Cubic {
        fn residual(&self, u: &[f64]) -> Option<Vec<f64>> {
            Some(u.iter().zip(&self.0).map(|(x, b)| x * x * x + x - b).collect())
        }
        fn jacobian(&self, u: &[f64]) -> Tridiagonal {
            let mut m = Tridiagonal::zeros(u.len());
            for (i, x) in u.iter().enumerate() {
                m.diag[i] = 3.0 * x * x + 1.0;
            }
            m
        }
    }

    #[test]
    fn converges_quadratically() {
        let sys = Cubic(vec![2.0, 10.0, -30.0]);
        let (u, rep) = solve(&sys, vec![0.0; 3], &NewtonParams::default()).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12);
        assert!(rep.residuals.windows(2).all(|w| w[1] < w[0]));
        let n = rep.residuals.len();
        assert!(rep.residuals[n - 1] <= 10.0 * rep.residuals[n - 2].powi(2) + 1e-14);
    }

    #[test]
    fn reports_iteration_limit() {
        let sys = Cubic(vec![1e6]);
        let params = NewtonParams {
            max_iter: 2,
            ..Default::default()
        };
        assert!(matches!(solve(&sys, vec![0.0], &params), Err(Error::NewtonFailure { .. })));
    }

    #[test]
    fn rejects_bad_params() {
        let p = NewtonParams {
            damping_min: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
