//! Finite expansions `Σ aᵢ x^{zᵢ} (log x)^{kᵢ}` used to specify sources,
//! conformal factors and manufactured solutions.

use serde::{Deserialize, Serialize};

use crate::geometry::{RadialField, RadialGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub a: f64,
    pub z: f64,
    #[serde(default)]
    pub k: u32,
}

impl Term {
    pub fn new(a: f64, z: f64, k: u32) -> Self {
        Self { a, z, k }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x.ln();
        self.eval_log(t)
    }

    /// Evaluate at `t = log x`.
    pub fn eval_log(&self, t: f64) -> f64 {
        self.a * (self.z * t).exp() * t.powi(self.k as i32)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermList(pub Vec<Term>);

impl TermList {
    pub fn new(terms: Vec<Term>) -> Self {
        Self(terms)
    }

    pub fn eval_log(&self, t: f64) -> f64 {
        self.0.iter().map(|term| term.eval_log(t)).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_log(x.ln())
    }

    pub fn on_grid(&self, grid: &RadialGrid) -> RadialField {
        RadialField::from_log_fn(grid, |t| self.eval_log(t))
    }

    /// Coefficient of the plain `x` term.
    pub fn linear_coefficient(&self) -> f64 {
        self.0
            .iter()
            .filter(|t| t.z == 1.0 && t.k == 0)
            .map(|t| t.a)
            .sum()
    }

    /// `x → 0` limit when every term decays or is constant; `None` otherwise.
    pub fn limit_at_cusp(&self) -> Option<f64> {
        let mut value = 0.0;
        for t in &self.0 {
            if t.a == 0.0 || t.z > 0.0 {
                continue;
            }
            if t.z == 0.0 && t.k == 0 {
                value += t.a;
            } else {
                return None;
            }
        }
        Some(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_log_terms() {
        let list = TermList::new(vec![Term::new(2.0, 1.0, 1), Term::new(1.0, 0.0, 0)]);
        let x: f64 = 0.25;
        assert!((list.eval(x) - (2.0 * x * x.ln() + 1.0)).abs() < 1e-15);
        assert_eq!(list.linear_coefficient(), 0.0);
        assert_eq!(list.limit_at_cusp(), Some(1.0));
    }

    #[test]
    fn cusp_limit_diverges_for_negative_powers() {
        let list = TermList::new(vec![Term::new(1.0, -0.5, 0)]);
        assert_eq!(list.limit_at_cusp(), None);
        let list = TermList::new(vec![Term::new(1.0, 0.0, 1)]);
        assert_eq!(list.limit_at_cusp(), None);
    }
}
