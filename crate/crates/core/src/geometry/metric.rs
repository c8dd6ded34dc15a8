use std::f64::consts::PI;

use super::{RadialField, RadialGrid};
use crate::banded::Tridiagonal;
use crate::error::{Error, Result};

/// `g = e^{2φ}(a dx²/x² + b x² dθ²)`; `φ = None` is the constant-coefficient model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelMetric {
    a: f64,
    b: f64,
    phi: Option<RadialField>,
}

impl ModelMetric {
    pub fn new(a: f64, b: f64, phi: Option<RadialField>) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "metric coefficients must be positive, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b, phi })
    }

    /// The Poincaré cusp `dx²/x² + x²dθ²`.
    pub fn poincare() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            phi: None,
        }
    }

    pub fn conformal(phi: RadialField) -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            phi: Some(phi),
        }
    }

    /// Build from a density `e^{2φ}` relative to the unit model.
    pub fn from_density(density: &RadialField) -> Result<Self> {
        let grid = density.grid();
        if let Some((node, &value)) = density.values().iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::Positivity {
                node,
                x: grid.x(node),
                value,
            });
        }
        Ok(Self::conformal(density.map(|d| 0.5 * d.ln())))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn phi(&self) -> Option<&RadialField> {
        self.phi.as_ref()
    }

    /// Same `a`, `b` without the conformal factor.
    pub fn base(&self) -> Self {
        Self {
            a: self.a,
            b: self.b,
            phi: None,
        }
    }

    fn check_grid(&self, grid: &RadialGrid) -> Result<()> {
        match &self.phi {
            Some(phi) if !phi.grid().same_as(grid) => Err(Error::GridMismatch),
            _ => Ok(()),
        }
    }

    fn phi_at(&self, i: usize) -> f64 {
        self.phi.as_ref().map_or(0.0, |p| p.values()[i])
    }

    /// `e^{2φ}` on the grid, relative to the constant-coefficient model.
    pub fn conformal_density(&self, grid: &RadialGrid) -> Result<RadialField> {
        self.check_grid(grid)?;
        Ok(match &self.phi {
            Some(phi) => phi.map(|p| (2.0 * p).exp()),
            None => RadialField::constant(grid, 1.0),
        })
    }

    /// Area density in `dx ∧ dθ`: `√(ab) e^{2φ}`.
    pub fn area_density(&self, grid: &RadialGrid) -> Result<RadialField> {
        let root = (self.a * self.b).sqrt();
        Ok(self.conformal_density(grid)?.map(|d| root * d))
    }

    /// Interior rows of the discrete ∂̄-Laplacian `e^{−2φ}/(2a) (∂_t² + ∂_t)` in
    /// conservative form; the first and last rows are left zero.
    pub fn laplacian_matrix(&self, grid: &RadialGrid) -> Result<Tridiagonal> {
        self.check_grid(grid)?;
        let n = grid.len();
        let h = grid.spacing();
        let up = (0.5 * h).exp() / (h * h);
        let down = (-0.5 * h).exp() / (h * h);
        let mut m = Tridiagonal::zeros(n);
        for i in 1..n - 1 {
            let s = (-2.0 * self.phi_at(i)).exp() / (2.0 * self.a);
            m.lower[i] = s * down;
            m.upper[i] = s * up;
            m.diag[i] = -s * (up + down);
        }
        Ok(m)
    }

    /// Weight making [`ModelMetric::laplacian_matrix`] symmetric: area density times `dx/dt`.
    pub fn symmetry_weights(&self, grid: &RadialGrid) -> Result<Vec<f64>> {
        let area = self.area_density(grid)?;
        Ok(grid.xs().zip(area.values()).map(|(x, d)| x * d).collect())
    }
}

/// One-sided second-order `(u', u'')` in `t` at node 0 (`forward`) or the last node.
fn endpoint_derivatives(u: &[f64], h: f64, forward: bool) -> (f64, f64) {
    let n = u.len();
    let at = |k: usize| if forward { u[k] } else { u[n - 1 - k] };
    let sign = if forward { 1.0 } else { -1.0 };
    let d1 = sign * (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    let d2 = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
    (d1, d2)
}

/// `Δ_∂̄ u` for the metric; endpoints use one-sided differences.
pub fn cusp_laplacian(metric: &ModelMetric, u: &RadialField) -> Result<RadialField> {
    let grid = u.grid();
    let m = metric.laplacian_matrix(grid)?;
    let mut out = m.mul_vec(u.values());
    let h = grid.spacing();
    let n = grid.len();
    for (i, forward) in [(0, true), (n - 1, false)] {
        let (d1, d2) = endpoint_derivatives(u.values(), h, forward);
        let s = (-2.0 * metric.phi_at(i)).exp() / (2.0 * metric.a);
        out[i] = s * (d2 + d1);
    }
    RadialField::new(grid.clone(), out)
}

/// `∂_t` of a field, centered inside and one-sided at the ends.
pub fn t_derivative(u: &RadialField) -> RadialField {
    let v = u.values();
    let n = v.len();
    let h = u.grid().spacing();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = endpoint_derivatives(v, h, true).0;
    d[n - 1] = endpoint_derivatives(v, h, false).0;
    RadialField::new(u.grid().clone(), d).expect("finite differences of finite data")
}

/// Ricci-form density of `e^{2φ}g₀` relative to the area form of `g₀ = a dx²/x² + b x²dθ²`:
/// `−1/a − 2 Δ_{g₀} φ`. Equals `−1` for the Poincaré cusp.
pub fn ricci_radial(metric: &ModelMetric, grid: &RadialGrid) -> Result<RadialField> {
    let base_curvature = -1.0 / metric.a;
    match metric.phi() {
        None => Ok(RadialField::constant(grid, base_curvature)),
        Some(phi) => {
            if !phi.grid().same_as(grid) {
                return Err(Error::GridMismatch);
            }
            let lap = cusp_laplacian(&metric.base(), phi)?;
            Ok(lap.map(|l| base_curvature - 2.0 * l))
        }
    }
}

/// Ricci density measured against the metric's own area form, i.e. its Gauss curvature.
pub fn ricci_relative_to_self(metric: &ModelMetric, grid: &RadialGrid) -> Result<RadialField> {
    let ric = ricci_radial(metric, grid)?;
    let dens = metric.conformal_density(grid)?;
    let values = ric.values().iter().zip(dens.values()).map(|(r, d)| r / d).collect();
    RadialField::new(grid.clone(), values)
}

/// Area of `{x_lo ≤ x ≤ x_hi}`. Closed form without a conformal factor; otherwise the
/// trapezoid rule in `t` on the conformal factor's grid, which must cover the range.
pub fn cusp_volume(metric: &ModelMetric, x_lo: f64, x_hi: f64) -> Result<f64> {
    if !(x_lo >= 0.0 && x_lo <= x_hi && x_hi < 1.0) {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    let root = (metric.a * metric.b).sqrt();
    let Some(phi) = metric.phi() else {
        return Ok(2.0 * PI * root * (x_hi - x_lo));
    };
    if x_lo == x_hi {
        return Ok(0.0);
    }
    let grid = phi.grid();
    let tol = 1e-12;
    if x_lo < grid.x_min() * (1.0 - tol) || x_hi > grid.x_max() * (1.0 + tol) {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    let h = grid.spacing();
    let (t_lo, t_hi) = (x_lo.ln().max(grid.t_min()), x_hi.ln().min(grid.t_max()));
    let integrand = |t: f64| {
        let pos = ((t - grid.t_min()) / h).clamp(0.0, (grid.len() - 1) as f64);
        let i = (pos.floor() as usize).min(grid.len() - 2);
        let w = pos - i as f64;
        let p = (1.0 - w) * phi.values()[i] + w * phi.values()[i + 1];
        (t + 2.0 * p).exp()
    };
    let mut nodes = vec![t_lo];
    let first = grid.index_at_or_above(x_lo);
    nodes.extend((first..grid.len()).map(|i| grid.t(i)).filter(|&t| t > t_lo && t < t_hi));
    nodes.push(t_hi);
    let integral: f64 = nodes
        .windows(2)
        .map(|w| 0.5 * (w[1] - w[0]) * (integrand(w[0]) + integrand(w[1])))
        .sum();
    Ok(2.0 * PI * root * integral)
}

/// Change of bdf under `ρ' = e^{φ₀} ρ`: `x' = x/(1 − xφ₀) = x(1 + xb̄ + x² b̃)` with
/// `b̄ = φ₀` and `b̃ = φ₀²/(1 − xφ₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BdfTransform {
    pub bbar: f64,
    pub x: Vec<f64>,
    pub x_prime: Vec<f64>,
    pub btilde: Vec<f64>,
    /// `sup |x' − x(1 + xφ₀)| / x³` over the samples.
    pub remainder_ratio: f64,
    /// `sup φ₀²/(1 − xφ₀)` over the samples.
    pub remainder_bound: f64,
}

impl BdfTransform {
    /// `dx'/dx = 1/(1 − xφ₀)²`.
    pub fn derivative(&self, x: f64) -> f64 {
        let m = 1.0 - x * self.bbar;
        1.0 / (m * m)
    }
}

pub fn bdf_transform(phi0: f64, xs: &[f64]) -> Result<BdfTransform> {
    if !phi0.is_finite() {
        return Err(Error::InvalidParameter(format!("phi0 must be finite, got {phi0}")));
    }
    let mut x_prime = Vec::with_capacity(xs.len());
    let mut btilde = Vec::with_capacity(xs.len());
    let mut ratio: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for (node, &x) in xs.iter().enumerate() {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::InvalidParameter(format!("bdf sample {node} must lie in (0, 1), got {x}")));
        }
        let margin = 1.0 - x * phi0;
        if margin <= 0.0 {
            return Err(Error::BdfOutOfRange { node, x, margin });
        }
        let log_rho = -1.0 / x;
        let xp = -1.0 / (log_rho + phi0);
        let bt = phi0 * phi0 / margin;
        ratio = ratio.max((xp - x * (1.0 + x * phi0)).abs() / (x * x * x));
        bound = bound.max(bt);
        x_prime.push(xp);
        btilde.push(bt);
    }
    Ok(BdfTransform {
        bbar: phi0,
        x: xs.to_vec(),
        x_prime,
        btilde,
        remainder_ratio: ratio,
        remainder_bound: bound,
    })
}

/// Cusp part of the Carlson–Griffiths form for `‖s‖² = h ρ²`, as a density relative to
/// the Poincaré cusp: `(2 + x∂_t log h)² / (2 − x(log ε + log h))²`.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlsonGriffiths {
    pub metric: ModelMetric,
    pub density: RadialField,
    /// `density − 1`.
    pub deviation: RadialField,
    /// `sup |density − 1| / x`.
    pub relative_deviation: f64,
    /// Every `ε` strictly below this keeps `ε‖s‖² < 1` on the grid.
    pub epsilon_threshold: f64,
}

pub fn carlson_griffiths_radial(epsilon: f64, h: &RadialField) -> Result<CarlsonGriffiths> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let grid = h.grid();
    if let Some((node, &value)) = h.values().iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::Positivity {
            node,
            x: grid.x(node),
            value,
        });
    }
    let log_h = h.map(f64::ln);
    let dlog_h = t_derivative(&log_h);
    let log_eps = epsilon.ln();
    let mut density = Vec::with_capacity(grid.len());
    let mut threshold_log = f64::INFINITY;
    for i in 0..grid.len() {
        let x = grid.x(i);
        let lh = log_h.values()[i];
        threshold_log = threshold_log.min(2.0 / x - lh);
        let denom = 2.0 - x * (log_eps + lh);
        let numer = 2.0 + x * dlog_h.values()[i];
        let d = (numer / denom).powi(2);
        if denom <= 0.0 || d <= 0.0 || !d.is_finite() {
            return Err(Error::Positivity {
                node: i,
                x,
                value: if denom <= 0.0 { denom } else { d },
            });
        }
        density.push(d);
    }
    let density = RadialField::new(grid.clone(), density)?;
    let deviation = density.map(|d| d - 1.0);
    let relative_deviation = grid
        .xs()
        .zip(deviation.values())
        .fold(0.0f64, |m, (x, d)| m.max(d.abs() / x));
    Ok(CarlsonGriffiths {
        metric: ModelMetric::from_density(&density)?,
        density,
        deviation,
        relative_deviation,
        epsilon_threshold: threshold_log.exp(),
    })
}
