//! Exact evaluation of the `x log x` coefficient from Chern numbers of a
//! smooth divisor.

use num::{BigRational, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, int};

/// Chern-number input for a smooth divisor `D` in an `n`-dimensional manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernData {
    pub n: u32,
    /// `∫_D c₁(TD)^{n−1}`
    pub td_top: BigRational,
    /// `∫_D c₁(TD)^{n−2} ∪ c₁(ND)`
    pub td_mixed: BigRational,
}

impl ChernData {
    pub fn new(n: u32, td_top: BigRational, td_mixed: BigRational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "ambient dimension must be at least 2, got {n}"
            )));
        }
        Ok(Self {
            n,
            td_top,
            td_mixed,
        })
    }
}

/// `b̃ = −(2(n−1)/3) · td_mixed / td_top`.
pub fn log_coefficient(data: &ChernData) -> Result<BigRational> {
    if data.td_top.is_zero() {
        return Err(Error::DegenerateDivisor);
    }
    let n_minus_one = int(i64::from(data.n) - 1);
    Ok(-(int(2) * n_minus_one / int(3)) * &data.td_mixed / &data.td_top)
}

/// Chern data of a smooth plane curve of degree `d` in `CP²`, via adjunction
/// (`deg K_D = d(d−3)`) and `deg N_D = d²`.
pub fn plane_curve_chern(d: i64) -> Result<ChernData> {
    if d < 4 {
        return Err(Error::DegreeTooSmall(d));
    }
    ChernData::new(2, int(-d * (d - 3)), int(d * d))
}

pub fn log_coefficient_plane_curve(d: i64) -> Result<BigRational> {
    log_coefficient(&plane_curve_chern(d)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalJson {
    fn from(q: &BigRational) -> Self {
        Self {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

/// `sign(b̃) = −sign(td_mixed/td_top)` for `n ≥ 2`.
pub fn predicted_sign(data: &ChernData) -> i8 {
    let q = &data.td_mixed / &data.td_top;
    if q.is_zero() {
        0
    } else if q.is_positive() {
        -1
    } else {
        1
    }
}

pub fn display(q: &BigRational) -> String {
    rational::display(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn quartic_plane_curve() {
        let data = plane_curve_chern(4).unwrap();
        assert_eq!(data.td_top, int(-4));
        assert_eq!(data.td_mixed, int(16));
        assert_eq!(log_coefficient(&data).unwrap(), ratio(8, 3));
    }

    #[test]
    fn quintic_and_sextic() {
        let d5 = plane_curve_chern(5).unwrap();
        assert_eq!((d5.td_top.clone(), d5.td_mixed.clone()), (int(-10), int(25)));
        assert_eq!(log_coefficient_plane_curve(5).unwrap(), ratio(5, 3));
        assert_eq!(log_coefficient_plane_curve(6).unwrap(), ratio(4, 3));
    }

    #[test]
    fn low_degrees_are_rejected() {
        assert_eq!(plane_curve_chern(3), Err(Error::DegreeTooSmall(3)));
        assert!(log_coefficient_plane_curve(1).is_err());
    }

    #[test]
    fn general_formula_cases() {
        let zero = ChernData::new(2, int(-4), int(0)).unwrap();
        assert_eq!(log_coefficient(&zero).unwrap(), int(0));
        let three = ChernData::new(3, int(2), int(6)).unwrap();
        assert_eq!(log_coefficient(&three).unwrap(), int(-4));
        let degenerate = ChernData::new(2, int(0), int(1)).unwrap();
        assert_eq!(log_coefficient(&degenerate), Err(Error::DegenerateDivisor));
        assert!(ChernData::new(1, int(1), int(1)).is_err());
    }

    #[test]
    fn sign_rule_matches_formula() {
        for (top, mixed) in [(-4, 16), (2, 6), (3, -1), (-5, -7), (1, 0)] {
            let data = ChernData::new(2, int(top), int(mixed)).unwrap();
            let b = log_coefficient(&data).unwrap();
            let sign = if b.is_zero() { 0 } else if b.is_positive() { 1 } else { -1 };
            assert_eq!(sign, predicted_sign(&data));
        }
    }
}
