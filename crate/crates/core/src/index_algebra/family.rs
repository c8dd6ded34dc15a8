use num::{BigRational, Signed, Zero};
use serde::Serialize;

use super::Exponent;
use crate::error::{Error, Result};
use crate::rational::{self, int, ratio};

/// Eigenvalue `−ν` of the divisor ∂̄-Laplacian with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenvalue {
    pub nu: BigRational,
    pub multiplicity: u32,
}

impl Eigenvalue {
    pub fn new(nu: BigRational, multiplicity: u32) -> Self {
        Self { nu, multiplicity }
    }

    pub fn simple(nu: BigRational) -> Self {
        Self::new(nu, 1)
    }
}

/// The indicial family `P̂_λ(τ) = Δ_D + (c/2)(−τ² + iτ) − λ`, described by
/// `λ`, the cusp constant `c` and the (truncated) spectrum of `Δ_D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicialFamily {
    lambda: BigRational,
    c: BigRational,
    spectrum: Vec<Eigenvalue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndicialRoot {
    #[serde(serialize_with = "serialize_exponent")]
    pub z: Exponent,
    /// Pole order of `P̂⁻¹` at `τ = −iz`: 2 only for the double root `z = −1/2`.
    pub order: u8,
    pub eigenvalue_index: usize,
    /// Carried for bookkeeping; does not raise the pole order.
    pub multiplicity: u32,
}

fn serialize_exponent<S: serde::Serializer>(z: &Exponent, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&z.to_string())
}

/// Real part of `Spec_b`, ascending in `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecB {
    pub roots: Vec<IndicialRoot>,
    /// Eigenvalues whose discriminant is negative (complex roots, excluded).
    pub complex_eigenvalues: usize,
}

impl SpecB {
    pub fn order_at(&self, z: &Exponent) -> u32 {
        self.roots
            .iter()
            .filter(|r| &r.z == z)
            .map(|r| r.order as u32)
            .sum()
    }
}

impl IndicialFamily {
    pub fn new(lambda: BigRational, c: BigRational, spectrum: Vec<Eigenvalue>) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonPositiveCuspConstant(rational::display(&c)));
        }
        for (i, ev) in spectrum.iter().enumerate() {
            if ev.nu.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "spectrum entry {i} has negative nu {}",
                    rational::display(&ev.nu)
                )));
            }
            if ev.multiplicity == 0 {
                return Err(Error::InvalidParameter(format!(
                    "spectrum entry {i} has zero multiplicity"
                )));
            }
            if i > 0 && spectrum[i - 1].nu >= ev.nu {
                return Err(Error::InvalidParameter(
                    "spectrum must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            lambda,
            c,
            spectrum,
        })
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn cusp_constant(&self) -> &BigRational {
        &self.c
    }

    pub fn spectrum(&self) -> &[Eigenvalue] {
        &self.spectrum
    }

    /// `2(λ + ν)/c + 1/4`, the square of `z + 1/2` at a root.
    pub fn discriminant(&self, nu: &BigRational) -> BigRational {
        int(2) * (&self.lambda + nu) / &self.c + ratio(1, 4)
    }

    pub fn spec_b_roots(&self) -> SpecB {
        let half = ratio(-1, 2);
        let mut roots = Vec::new();
        let mut complex = 0;
        for (idx, ev) in self.spectrum.iter().enumerate() {
            let disc = self.discriminant(&ev.nu);
            if disc.is_negative() {
                complex += 1;
                continue;
            }
            let make = |sign: i8, order: u8| IndicialRoot {
                z: Exponent::with_root(half.clone(), sign, disc.clone())
                    .expect("discriminant is non-negative"),
                order,
                eigenvalue_index: idx,
                multiplicity: ev.multiplicity,
            };
            if disc.is_zero() {
                roots.push(make(0, 2));
            } else {
                roots.push(make(-1, 1));
                roots.push(make(1, 1));
            }
        }
        roots.sort_by(|a, b| a.z.cmp(&b.z));
        SpecB {
            roots,
            complex_eigenvalues: complex,
        }
    }

    /// Evaluate `(c/2)(z² + z) − ν − λ`, which vanishes exactly at the roots.
    pub fn indicial_polynomial(&self, nu: &BigRational, z: &BigRational) -> BigRational {
        &self.c / int(2) * (z * z + z) - nu - &self.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots_f64(spec: &SpecB) -> Vec<(f64, u8)> {
        spec.roots.iter().map(|r| (r.z.to_f64(), r.order)).collect()
    }

    #[test]
    fn lambda_one_gives_one_and_minus_two() {
        let fam = IndicialFamily::new(int(1), int(1), vec![Eigenvalue::simple(int(0))]).unwrap();
        let spec = fam.spec_b_roots();
        assert_eq!(spec.roots[0].z, Exponent::integer(-2));
        assert_eq!(spec.roots[1].z, Exponent::integer(1));
        assert!(spec.roots.iter().all(|r| r.order == 1));
        for r in &spec.roots {
            let z = r.z.as_rational().unwrap();
            assert!(fam.indicial_polynomial(&int(0), z).is_zero());
        }
    }

    #[test]
    fn lambda_zero_gives_zero_and_minus_one() {
        let fam = IndicialFamily::new(int(0), int(1), vec![Eigenvalue::simple(int(0))]).unwrap();
        assert_eq!(roots_f64(&fam.spec_b_roots()), vec![(-1.0, 1), (0.0, 1)]);
    }

    #[test]
    fn vanishing_discriminant_gives_double_root() {
        let fam =
            IndicialFamily::new(ratio(-1, 4), int(2), vec![Eigenvalue::simple(int(0))]).unwrap();
        let spec = fam.spec_b_roots();
        assert_eq!(spec.roots.len(), 1);
        assert_eq!(spec.roots[0].z, Exponent::rational(ratio(-1, 2)));
        assert_eq!(spec.roots[0].order, 2);
    }

    #[test]
    fn negative_discriminant_is_counted_not_returned() {
        let fam = IndicialFamily::new(
            int(-3),
            int(1),
            vec![Eigenvalue::simple(int(0)), Eigenvalue::new(int(5), 3)],
        )
        .unwrap();
        let spec = fam.spec_b_roots();
        assert_eq!(spec.complex_eigenvalues, 1);
        assert_eq!(spec.roots.len(), 2);
        assert!(spec.roots.iter().all(|r| r.eigenvalue_index == 1 && r.multiplicity == 3));
    }

    #[test]
    fn rejects_invalid_families() {
        let sp = vec![Eigenvalue::simple(int(0))];
        assert!(matches!(
            IndicialFamily::new(int(1), int(0), sp.clone()),
            Err(Error::NonPositiveCuspConstant(_))
        ));
        assert!(IndicialFamily::new(int(1), int(-1), sp).is_err());
        let unsorted = vec![Eigenvalue::simple(int(2)), Eigenvalue::simple(int(1))];
        assert!(IndicialFamily::new(int(1), int(1), unsorted).is_err());
        let negative = vec![Eigenvalue::simple(int(-1))];
        assert!(IndicialFamily::new(int(1), int(1), negative).is_err());
    }

    #[test]
    fn irrational_roots_stay_exact() {
        let fam = IndicialFamily::new(int(1), int(1), vec![Eigenvalue::simple(int(1))]).unwrap();
        let spec = fam.spec_b_roots();
        // (z + 1/2)² = 4 + 1/4 = 17/4
        assert!(spec.roots.iter().all(|r| !r.z.is_rational()));
        let expected = -0.5 + (17.0f64 / 4.0).sqrt();
        assert!((spec.roots[1].z.to_f64() - expected).abs() < 1e-15);
    }
}
