use serde::Serialize;

use crate::error::{Error, Result};

/// Classical fourth-order Runge–Kutta for `y' = f(t, y)` from `t0` to `t1`; the last
/// step is shortened to land on `t1`.
pub fn rk4(f: impl Fn(f64, f64) -> f64, y0: f64, t0: f64, t1: f64, dt: f64) -> f64 {
    let mut t = t0;
    let mut y = y0;
    while t < t1 {
        let h = dt.min(t1 - t);
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = if t1 - t - h <= 1e-14 * t1.abs().max(1.0) { t1 } else { t + h };
    }
    y
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `c_t = 1 + e^{−t}(c₀ − 1)`, the solution of `c' = 1 − c`.
pub fn cusp_constant_evolution(c0: f64, t: f64) -> Result<f64> {
    check_cusp_constant(c0)?;
    Ok(1.0 + (-t).exp() * (c0 - 1.0))
}

/// RK4 integration of `c' = 1 − c` from `c(0) = c₀`.
pub fn cusp_constant_rk4(c0: f64, t: f64, dt: f64) -> Result<f64> {
    check_cusp_constant(c0)?;
    check_step(dt)?;
    Ok(rk4(|_, c| 1.0 - c, c0, 0.0, t, dt))
}

fn check_cusp_constant(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveCuspConstant(c.to_string()))
    }
}

fn check_step(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")))
    }
}

/// `Σᵢ log((1 + e^{−t}(cᵢ − 1))/cᵢ)`.
pub fn restricted_source(c_list: &[f64], t: f64) -> f64 {
    c_list
        .iter()
        .map(|&c| ((1.0 + (-t).exp() * (c - 1.0)) / c).ln())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedOdeSolution {
    pub times: Vec<f64>,
    /// `e^{−t} ∫₀ᵗ eˢ S(s) ds` by adaptive quadrature.
    pub quadrature: Vec<f64>,
    pub rk4: Vec<f64>,
    pub max_difference: f64,
}

const QUAD_TOL: f64 = 1e-14;

/// Solve `u' = −u + S(t)`, `u(0) = 0`, on `[0, T]` sampled every `dt`, two ways.
pub fn restricted_ode_solution(c_list: &[f64], t_final: f64, dt: f64) -> Result<RestrictedOdeSolution> {
    for &c in c_list {
        check_cusp_constant(c)?;
    }
    check_step(dt)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time must be non-negative, got {t_final}")));
    }
    let steps = (t_final / dt).round() as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { t_final } else { i as f64 * dt })
        .collect();
    let integrand = |s: f64| s.exp() * restricted_source(c_list, s);
    let mut quadrature = Vec::with_capacity(times.len());
    let mut integral = 0.0;
    let mut prev = 0.0;
    for &t in &times {
        integral += adaptive_simpson(&integrand, prev, t, QUAD_TOL);
        prev = t;
        quadrature.push((-t).exp() * integral);
    }
    let rhs = |t: f64, u: f64| -u + restricted_source(c_list, t);
    let mut rk = Vec::with_capacity(times.len());
    let mut u = 0.0;
    let mut prev = 0.0;
    for &t in &times {
        u = rk4(rhs, u, prev, t, dt);
        prev = t;
        rk.push(u);
    }
    let max_difference = quadrature
        .iter()
        .zip(&rk)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(RestrictedOdeSolution {
        times,
        quadrature,
        rk4: rk,
        max_difference,
    })
}
