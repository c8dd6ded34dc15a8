//! Radial linear problems `(Δ − λ)u = f` and the dimension-one complex
//! Monge–Ampère equation `(1 + Δu)e^{−u} = e^F`.

use serde::{Deserialize, Serialize};

use crate::banded::Tridiagonal;
use crate::error::{Error, Result};
use crate::geometry::{ModelMetric, RadialField, RadialGrid};
use crate::newton::{self, NewtonParams, NewtonReport, NewtonSystem};

/// Condition imposed at the deep-cusp endpoint `t_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeftBoundary {
    Dirichlet { value: f64 },
    /// `u₀ = e^{−zh} u₁`, exact for `x^z`.
    Decaying { exponent: f64 },
    /// `u₀ − 2e^{−zh} u₁ + e^{−2zh} u₂ = 0`, exact for `x^z (a log x + b)`.
    Asymptotic { exponent: f64 },
}

impl Default for LeftBoundary {
    fn default() -> Self {
        LeftBoundary::Dirichlet { value: 0.0 }
    }
}

impl LeftBoundary {
    /// Coefficients of `u₀, u₁, u₂` and the right-hand side.
    fn row(&self, h: f64) -> [f64; 4] {
        match *self {
            LeftBoundary::Dirichlet { value } => [1.0, 0.0, 0.0, value],
            LeftBoundary::Decaying { exponent } => [1.0, -(-exponent * h).exp(), 0.0, 0.0],
            LeftBoundary::Asymptotic { exponent } => {
                let q = (-exponent * h).exp();
                [1.0, -2.0 * q, q * q, 0.0]
            }
        }
    }

    /// Write row 0 into `m` and `rhs`; returns the `(0, 2)` entry.
    fn apply_row(&self, m: &mut Tridiagonal, rhs: &mut [f64], h: f64) -> f64 {
        let [d, up, corner, value] = self.row(h);
        m.diag[0] = d;
        m.upper[0] = up;
        rhs[0] = value;
        corner
    }

    fn residual(&self, u: &[f64], h: f64) -> f64 {
        let [d, up, corner, value] = self.row(h);
        d * u[0] + up * u[1] + corner * u[2] - value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProblem {
    pub metric: ModelMetric,
    pub lambda: f64,
    pub rhs: RadialField,
    pub left: LeftBoundary,
    pub right: f64,
}

impl LinearProblem {
    pub fn grid(&self) -> &RadialGrid {
        self.rhs.grid()
    }

    /// `Δ − λ` on interior rows with the boundary rows in place, plus the `(0, 2)` entry.
    fn system(&self) -> Result<(Tridiagonal, Vec<f64>, f64)> {
        let grid = self.grid();
        let mut m = self.metric.laplacian_matrix(grid)?;
        let n = grid.len();
        for i in 1..n - 1 {
            m.diag[i] -= self.lambda;
        }
        let mut rhs = self.rhs.values().to_vec();
        let corner = self.left.apply_row(&mut m, &mut rhs, grid.spacing());
        m.pin_row(n - 1);
        rhs[n - 1] = self.right;
        Ok((m, rhs, corner))
    }
}

pub fn solve_linear(p: &LinearProblem) -> Result<RadialField> {
    if !p.lambda.is_finite() {
        return Err(Error::InvalidParameter("lambda must be finite".into()));
    }
    let (m, rhs, corner) = p.system()?;
    RadialField::new(p.grid().clone(), m.solve_with_corner(corner, &rhs)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MongeAmpereProblem {
    pub background: ModelMetric,
    pub f: RadialField,
    pub left: LeftBoundary,
    pub right: f64,
    pub newton: NewtonParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MongeAmpereReport {
    pub newton: NewtonReport,
    pub converged: bool,
    /// `min (1 + Δu)` over interior nodes of the returned solution.
    pub min_positivity: f64,
}

struct MongeAmpereSystem<'a> {
    lap: Tridiagonal,
    p: &'a MongeAmpereProblem,
    h: f64,
}

impl MongeAmpereSystem<'_> {
    fn positivity(&self, u: &[f64]) -> Vec<f64> {
        self.lap.mul_vec(u).into_iter().map(|l| 1.0 + l).collect()
    }
}

impl NewtonSystem for MongeAmpereSystem<'_> {
    fn residual(&self, u: &[f64]) -> Option<Vec<f64>> {
        let n = u.len();
        let lu = self.lap.mul_vec(u);
        let f = self.p.f.values();
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            if !(1.0 + lu[i] > 0.0) {
                return None;
            }
            r[i] = lu[i].ln_1p() - u[i] - f[i];
        }
        r[0] = self.p.left.residual(u, self.h);
        r[n - 1] = u[n - 1] - self.p.right;
        Some(r)
    }

    fn jacobian(&self, u: &[f64]) -> Tridiagonal {
        let n = u.len();
        let lu = self.lap.mul_vec(u);
        let mut j = self.lap.clone();
        for i in 1..n - 1 {
            let w = 1.0 / (1.0 + lu[i]);
            j.lower[i] *= w;
            j.diag[i] = j.diag[i] * w - 1.0;
            j.upper[i] *= w;
        }
        let mut dummy = vec![0.0; n];
        self.p.left.apply_row(&mut j, &mut dummy, self.h);
        j.pin_row(n - 1);
        j
    }

    fn corner(&self) -> f64 {
        self.p.left.row(self.h)[2]
    }
}

/// Damped Newton from `u⁰ = 0` with linearization `(1 + Δu)⁻¹Δ − 1`.
pub fn solve_monge_ampere_radial(p: &MongeAmpereProblem) -> Result<(RadialField, MongeAmpereReport)> {
    let grid = p.f.grid();
    let system = MongeAmpereSystem {
        lap: p.background.laplacian_matrix(grid)?,
        p,
        h: grid.spacing(),
    };
    let (u, newton) = newton::solve(&system, vec![0.0; grid.len()], &p.newton)?;
    let pos = system.positivity(&u);
    let min_positivity = pos[1..pos.len() - 1].iter().copied().fold(f64::INFINITY, f64::min);
    let converged = newton.final_residual() <= p.newton.tol * 1e3;
    Ok((
        RadialField::new(grid.clone(), u)?,
        MongeAmpereReport {
            newton,
            converged,
            min_positivity,
        },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvertibilityReport {
    pub delta: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition_number: f64,
}

/// Interior block of `x^{−δ}(Δ − λ)x^{δ}`.
pub fn conjugated_operator(p: &LinearProblem, delta: f64) -> Result<Tridiagonal> {
    let (m, _, _) = p.system()?;
    let n = m.len();
    let h = p.grid().spacing();
    let mut block = m.block(1, n - 1);
    let (down, up) = ((-delta * h).exp(), (delta * h).exp());
    for i in 0..block.len() {
        block.lower[i] *= down;
        block.upper[i] *= up;
    }
    Ok(block)
}

const SV_MAX_ITER: usize = 5000;
const SV_TOL: f64 = 1e-12;

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
    normalize(&mut v);
    v
}

/// Largest singular value by power iteration on `AᵀA`.
pub fn sigma_max(a: &Tridiagonal) -> f64 {
    let at = a.transpose();
    let mut v = start_vector(a.len());
    let mut est = 0.0;
    for _ in 0..SV_MAX_ITER {
        let mut w = at.mul_vec(&a.mul_vec(&v));
        let next = normalize(&mut w).sqrt();
        v = w;
        if (next - est).abs() <= SV_TOL * next {
            return next;
        }
        est = next;
    }
    est
}

/// Smallest singular value by inverse iteration on `AᵀA`.
pub fn sigma_min(a: &Tridiagonal) -> Result<f64> {
    let at = a.transpose();
    let mut v = start_vector(a.len());
    let mut est = f64::INFINITY;
    for _ in 0..SV_MAX_ITER {
        let mut w = a.solve(&at.solve(&v)?)?;
        let next = 1.0 / normalize(&mut w).sqrt();
        v = w;
        if (next - est).abs() <= SV_TOL * next {
            return Ok(next);
        }
        est = next;
    }
    Ok(est)
}

pub fn weighted_invertibility_probe(p: &LinearProblem, delta: f64) -> Result<InvertibilityReport> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    let a = conjugated_operator(p, delta)?;
    let smin = sigma_min(&a)?;
    let smax = sigma_max(&a);
    Ok(InvertibilityReport {
        delta,
        sigma_min: smin,
        sigma_max: smax,
        condition_number: smax / smin,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub perturbation: f64,
    /// Slope of `log |δu|` against `log x` over the first two decades above `x_min`.
    pub decay_exponent: f64,
    /// `sup |δu|` over nodes with `x ≥ 100 x_min`.
    pub far_change: f64,
}

/// Re-solve with the left Dirichlet value shifted by `perturbation` and measure how the
/// change decays into the interior.
pub fn left_boundary_sensitivity(p: &LinearProblem, perturbation: f64) -> Result<SensitivityReport> {
    let LeftBoundary::Dirichlet { value } = p.left else {
        return Err(Error::InvalidParameter("sensitivity needs a Dirichlet left boundary".into()));
    };
    let base = solve_linear(p)?;
    let shifted = solve_linear(&LinearProblem {
        left: LeftBoundary::Dirichlet {
            value: value + perturbation,
        },
        ..p.clone()
    })?;
    let diff = shifted.sub(&base)?;
    let grid = p.grid();
    let hi = grid.index_at_or_below(grid.x_min() * 100.0).max(3);
    let pts: Vec<(f64, f64)> = (1..hi)
        .map(|i| (grid.t(i), diff.values()[i].abs()))
        .filter(|(_, d)| *d > 0.0)
        .map(|(t, d)| (t, d.ln()))
        .collect();
    let slope = crate::fitter::linear_regression(&pts).map(|(s, _)| s).unwrap_or(f64::NAN);
    let lo_far = grid.index_at_or_above(grid.x_min() * 100.0);
    let far_change = diff.values()[lo_far..].iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(SensitivityReport {
        perturbation,
        decay_exponent: slope,
        far_change,
    })
}
