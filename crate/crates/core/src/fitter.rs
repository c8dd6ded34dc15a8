//! Least-squares fits of sampled fields to truncated expansions
//! `Σ a_{z,k} x^z (log x)^k`, a dedicated `x log x` detector and remainder decay rates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RadialField, RadialGrid};
use crate::index_algebra::{IndexSet, IndexTerm};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FittedTerm {
    pub z: f64,
    pub z_exact: String,
    pub k: u32,
    pub a: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhomFit {
    pub index_set: IndexSet,
    pub window: (f64, f64),
    pub samples: usize,
    pub z_min: f64,
    pub terms: Vec<FittedTerm>,
    /// `sup |r| / x^{z_min}` over the window.
    pub residual_sup: f64,
    /// `sup |r| / x^N` over the window, `N` the cutoff of the index set.
    pub residual_sup_cutoff: f64,
}

impl PolyhomFit {
    pub fn coefficient(&self, z: f64, k: u32) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.k == k && (t.z - z).abs() < 1e-12)
            .map(|t| t.a)
    }

    pub fn eval_log(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.a * (term.z * t).exp() * t.powi(term.k as i32))
            .sum()
    }

    pub fn cutoff(&self) -> f64 {
        rational::to_f64(self.index_set.cutoff())
    }
}

fn term_label(t: &IndexTerm) -> String {
    format!("({}, {})", t.z, t.k)
}

/// Node range `[lo, hi]` of samples with `x_lo ≤ x ≤ x_hi`.
fn window_nodes(grid: &RadialGrid, x_lo: f64, x_hi: f64) -> Result<(usize, usize)> {
    if !(x_lo > 0.0 && x_lo < x_hi) {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    let tol = 1e-9;
    if x_lo < grid.x_min() * (1.0 - tol) || x_hi > grid.x_max() * (1.0 + tol) {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    let lo = grid.index_at_or_above(x_lo * (1.0 - tol));
    let hi = grid.index_at_or_below(x_hi * (1.0 + tol));
    if hi < lo {
        return Err(Error::InvalidRange { lo: x_lo, hi: x_hi });
    }
    Ok((lo, hi))
}

/// Weighted least squares in `t = log x` with basis `e^{zt} tᵏ`, weights `e^{−z_min t}`,
/// unit-norm column scaling and Householder QR.
fn least_squares(
    ts: &[f64],
    ys: &[f64],
    basis: &[(f64, u32)],
    labels: &[String],
) -> Result<Vec<f64>> {
    let m = ts.len();
    let p = basis.len();
    if m < 3 * p {
        return Err(Error::TooFewSamples { samples: m, terms: p });
    }
    let z_min = basis.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let mut a = DMatrix::from_fn(m, p, |i, j| {
        let (z, k) = basis[j];
        let t = ts[i];
        ((z - z_min) * t).exp() * t.powi(k as i32)
    });
    let b = DVector::from_fn(m, |i, _| ys[i] * (-z_min * ts[i]).exp());
    let scales: Vec<f64> = (0..p).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        if !(*s > 0.0 && s.is_finite()) {
            return Err(Error::RankDeficient {
                term: labels[j].clone(),
                partner: "zero column".into(),
            });
        }
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    for j in 0..p {
        if r[(j, j)].abs() < 1e-10 {
            let partner = (0..j)
                .max_by(|&x, &y| {
                    let cx = a.column(j).dot(&a.column(x)).abs();
                    let cy = a.column(j).dot(&a.column(y)).abs();
                    cx.total_cmp(&cy)
                })
                .map(|i| labels[i].clone())
                .unwrap_or_else(|| "span of earlier terms".into());
            return Err(Error::RankDeficient {
                term: labels[j].clone(),
                partner,
            });
        }
    }
    let qtb = qr.q().transpose() * b;
    let c = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::SingularSystem { row: 0 })?;
    Ok(c.iter().zip(&scales).map(|(c, s)| c / s).collect())
}

pub fn fit_polyhom(samples: &RadialField, index_set: &IndexSet, window: (f64, f64)) -> Result<PolyhomFit> {
    let grid = samples.grid();
    let (lo, hi) = window_nodes(grid, window.0, window.1)?;
    let terms = index_set.terms();
    if terms.is_empty() {
        return Err(Error::InvalidParameter("index set has no terms below its cutoff".into()));
    }
    let basis: Vec<(f64, u32)> = terms.iter().map(|t| (t.z.to_f64(), t.k)).collect();
    let labels: Vec<String> = terms.iter().map(term_label).collect();
    let ts: Vec<f64> = (lo..=hi).map(|i| grid.t(i)).collect();
    let ys = &samples.values()[lo..=hi];
    let coeffs = least_squares(&ts, ys, &basis, &labels)?;
    let z_min = basis[0].0;
    let cutoff = rational::to_f64(index_set.cutoff());
    let mut fit = PolyhomFit {
        index_set: index_set.clone(),
        window,
        samples: ts.len(),
        z_min,
        terms: terms
            .iter()
            .zip(&coeffs)
            .map(|(t, &a)| FittedTerm {
                z: t.z.to_f64(),
                z_exact: t.z.to_string(),
                k: t.k,
                a,
            })
            .collect(),
        residual_sup: 0.0,
        residual_sup_cutoff: 0.0,
    };
    for (t, y) in ts.iter().zip(ys) {
        let r = (y - fit.eval_log(*t)).abs();
        fit.residual_sup = fit.residual_sup.max(r * (-z_min * t).exp());
        fit.residual_sup_cutoff = fit.residual_sup_cutoff.max(r * (-cutoff * t).exp());
    }
    Ok(fit)
}

/// Ordinary least-squares line through `(x, y)` pairs: `(slope, intercept)`.
pub fn linear_regression(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogTermOptions {
    /// Nodes next to `t_min` left out of every window.
    pub skip: usize,
    /// Widths in decades of the nested windows; the first one gives the estimate.
    pub decades: [f64; 3],
    /// Reject when the spread exceeds this fraction of `|b̃|` ...
    pub rel_spread: f64,
    /// ... and also exceeds this absolute floor.
    pub abs_floor: f64,
}

impl Default for LogTermOptions {
    fn default() -> Self {
        Self {
            skip: 5,
            decades: [2.0, 1.5, 1.0],
            rel_spread: 0.5,
            abs_floor: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowEstimate {
    pub x_lo: f64,
    pub x_hi: f64,
    pub b_tilde: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogTermEstimate {
    pub b_tilde: f64,
    pub b: f64,
    /// `max − min` of `b̃` over the nested windows.
    pub spread: f64,
    pub windows: Vec<WindowEstimate>,
}

pub fn detect_log_term(samples: &RadialField) -> Result<LogTermEstimate> {
    detect_log_term_with(samples, &LogTermOptions::default())
}

/// Fit `b̃ x log x + b x` on nested windows anchored at the deepest admissible node.
pub fn detect_log_term_with(samples: &RadialField, opts: &LogTermOptions) -> Result<LogTermEstimate> {
    let grid = samples.grid();
    let h = grid.spacing();
    let lo = opts.skip;
    let basis = [(1.0, 1), (1.0, 0)];
    let labels = ["(1, 1)".to_string(), "(1, 0)".to_string()];
    let mut windows = Vec::new();
    for &dec in &opts.decades {
        if !(dec > 0.0) {
            return Err(Error::InvalidParameter("window widths must be positive".into()));
        }
        let width = (dec * std::f64::consts::LN_10 / h).round() as usize;
        let hi = (lo + width).min(grid.len() - 1);
        if hi <= lo {
            return Err(Error::TooFewSamples { samples: 0, terms: 2 });
        }
        let ts: Vec<f64> = (lo..=hi).map(|i| grid.t(i)).collect();
        let c = least_squares(&ts, &samples.values()[lo..=hi], &basis, &labels)?;
        windows.push(WindowEstimate {
            x_lo: grid.x(lo),
            x_hi: grid.x(hi),
            b_tilde: c[0],
            b: c[1],
        });
    }
    let max = windows.iter().map(|w| w.b_tilde).fold(f64::NEG_INFINITY, f64::max);
    let min = windows.iter().map(|w| w.b_tilde).fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let est = LogTermEstimate {
        b_tilde: windows[0].b_tilde,
        b: windows[0].b,
        spread,
        windows,
    };
    if spread > opts.rel_spread * est.b_tilde.abs() && spread > opts.abs_floor {
        return Err(Error::NoReliableLogTerm {
            estimate: est.b_tilde,
            spread,
        });
    }
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RemainderReport {
    /// Remainder at round-off level in every window.
    Saturated { n: f64 },
    Decay {
        n: f64,
        slope: f64,
        /// Slopes from the full samples and from every other sample.
        interval: (f64, f64),
        passes: bool,
    },
}

impl RemainderReport {
    pub fn slope(&self) -> Option<f64> {
        match self {
            RemainderReport::Decay { slope, .. } => Some(*slope),
            RemainderReport::Saturated { .. } => None,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, RemainderReport::Saturated { .. })
    }
}

/// Relative size below which a window remainder counts as round-off.
const NOISE_FLOOR: f64 = 1e-12;

/// Remainder slope from refits on one-decade windows stepping down through the fit window.
fn remainder_slope(fit: &PolyhomFit, samples: &RadialField) -> Result<Option<f64>> {
    let (x_lo, x_hi) = fit.window;
    let grid = samples.grid();
    let mut pts = Vec::new();
    let mut top = x_hi;
    while top / 10.0 >= x_lo * (1.0 - 1e-9) {
        let bottom = top / 10.0;
        let (lo, hi) = window_nodes(grid, bottom, top)?;
        let sub = fit_polyhom(samples, &fit.index_set, (bottom, top))?;
        let mut rmax: f64 = 0.0;
        let mut smax: f64 = 0.0;
        for i in lo..=hi {
            let t = grid.t(i);
            let y = samples.values()[i];
            rmax = rmax.max((y - sub.eval_log(t)).abs());
            smax = smax.max(y.abs());
        }
        if rmax > NOISE_FLOOR * smax && rmax > 0.0 {
            pts.push((top.ln(), rmax.ln()));
        }
        top /= 10f64.sqrt();
    }
    if pts.len() < 2 {
        return Ok(None);
    }
    Ok(linear_regression(&pts).map(|(s, _)| s))
}

fn decimate(samples: &RadialField) -> Result<RadialField> {
    let grid = samples.grid();
    let count = (grid.len() - 1) / 2 + 1;
    let coarse = RadialGrid::new(grid.t_min(), grid.t(2 * (count - 1)), count)?;
    let values = (0..count).map(|i| samples.values()[2 * i]).collect();
    RadialField::new(coarse, values)
}

/// Empirical decay exponent of `samples − expansion`; passes when `slope ≥ N − 0.25`.
pub fn remainder_check(fit: &PolyhomFit, samples: &RadialField, n: f64) -> Result<RemainderReport> {
    let Some(slope) = remainder_slope(fit, samples)? else {
        return Ok(RemainderReport::Saturated { n });
    };
    let coarse = decimate(samples)?;
    let coarse_fit = PolyhomFit {
        window: (fit.window.0.max(coarse.grid().x_min()), fit.window.1.min(coarse.grid().x_max())),
        ..fit.clone()
    };
    let other = remainder_slope(&coarse_fit, &coarse).ok().flatten().unwrap_or(slope);
    Ok(RemainderReport::Decay {
        n,
        slope,
        interval: (slope.min(other), slope.max(other)),
        passes: slope >= n - 0.25,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_algebra::{closure, TermSet};
    use crate::rational::int;

    fn set(cutoff: i64, gens: &[(i64, u32)]) -> IndexSet {
        closure(&TermSet::new(int(cutoff), gens.iter().map(|&(z, k)| IndexTerm::int(z, k))))
    }

    fn grid() -> RadialGrid {
        RadialGrid::new(-40.0, 0.5f64.ln(), 4096).unwrap()
    }

    #[test]
    fn recovers_polynomial_coefficients() {
        let g = grid();
        let f = RadialField::from_fn(&g, |x| 2.0 * x + 5.0 * x * x);
        let fit = fit_polyhom(&f, &set(2, &[(1, 0)]), (1e-6, 1e-2)).unwrap();
        assert!((fit.coefficient(1.0, 0).unwrap() - 2.0).abs() < 1e-8);
        assert!((fit.coefficient(2.0, 0).unwrap() - 5.0).abs() < 1e-6);
        assert!(fit.residual_sup <= 1e-10);
    }

    #[test]
    fn recovers_log_term() {
        let g = grid();
        let f = RadialField::from_fn(&g, |x| x * x.ln());
        let fit = fit_polyhom(&f, &set(1, &[(1, 1)]), (1e-6, 1e-2)).unwrap();
        assert!((fit.coefficient(1.0, 1).unwrap() - 1.0).abs() < 1e-8);
        assert!(fit.coefficient(1.0, 0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn missing_log_term_leaves_large_residual() {
        let g = grid();
        let f = RadialField::from_fn(&g, |x| x * x.ln() + x);
        let fit = fit_polyhom(&f, &set(2, &[(1, 0)]), (1e-6, 1e-2)).unwrap();
        let half_width = 0.5 * (1e-2f64.ln() - 1e-6f64.ln());
        assert!(fit.residual_sup > 0.5 * half_width, "{}", fit.residual_sup);
    }

    #[test]
    fn too_few_samples_and_rank_deficiency() {
        let g = RadialGrid::new(-10.0, -1.0, 8).unwrap();
        let f = RadialField::from_fn(&g, |x| x);
        assert!(matches!(
            fit_polyhom(&f, &set(3, &[(1, 0)]), (g.x_min(), g.x_max())),
            Err(Error::TooFewSamples { .. })
        ));
        let g = grid();
        let f = RadialField::from_fn(&g, |x| x);
        // x^1 and x^{1 + 1e-13} are indistinguishable on any window.
        let near = closure(&TermSet::new(
            int(2),
            [
                IndexTerm::int(1, 0),
                IndexTerm::new(
                    crate::index_algebra::Exponent::rational(rational::ratio(10_000_000_000_001, 10_000_000_000_000)),
                    0,
                ),
            ],
        ));
        assert!(matches!(fit_polyhom(&f, &near, (1e-6, 1e-2)), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn log_detector_on_synthetic_data() {
        let g = grid();
        let f = RadialField::from_fn(&g, |x| 8.0 / 3.0 * x * x.ln() + x);
        let est = detect_log_term(&f).unwrap();
        assert!((est.b_tilde - 8.0 / 3.0).abs() < 0.01 * 8.0 / 3.0);
        let f = RadialField::from_fn(&g, |x| x * x);
        assert!(detect_log_term(&f).unwrap().b_tilde.abs() < 1e-6);
    }

    #[test]
    fn log_detector_is_linear() {
        let g = grid();
        let f = RadialField::from_fn(&g, |x| 1.3 * x * x.ln() - 0.2 * x + x * x);
        let a = detect_log_term(&f).unwrap().b_tilde;
        let b = detect_log_term(&f.map(|v| -7.5 * v)).unwrap().b_tilde;
        assert!((b + 7.5 * a).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn remainder_slopes() {
        let g = grid();
        let exact = RadialField::from_fn(&g, |x| x + 3.0 * x * x);
        let e = set(2, &[(1, 0)]);
        let fit = fit_polyhom(&exact, &e, (1e-8, 1e-2)).unwrap();
        assert!(remainder_check(&fit, &exact, 2.0).unwrap().is_saturated());

        let f = RadialField::from_fn(&g, |x| x + x.powf(2.5));
        let fit = fit_polyhom(&f, &e, (1e-8, 1e-2)).unwrap();
        let rep = remainder_check(&fit, &f, 2.0).unwrap();
        let slope = rep.slope().unwrap();
        assert!((slope - 2.5).abs() < 0.05, "{slope}");
        assert!(matches!(rep, RemainderReport::Decay { passes: true, .. }));
    }

    #[test]
    fn regression_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (s, c) = linear_regression(&pts).unwrap();
        assert!((s - 3.0).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
        assert!(linear_regression(&pts[..1]).is_none());
    }
}
