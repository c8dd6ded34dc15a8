//! Index sets, indicial families and the `Spec_b` root calculus of the
//! model cusp operator `Δ_D + (c/2)((x∂_x)² + x∂_x) − λ`.
//!
//! All computations are exact. Exponents are [`Exponent`] values
//! (rationals or `q ± √m`), and every enumeration is truncated at a
//! rational cutoff: returned sets are the finite part `z ≤ cutoff` of
//! infinite index sets.

mod exponent;
mod family;
mod sets;

pub use exponent::Exponent;
pub use family::{Eigenvalue, IndicialFamily, IndicialRoot, SpecB};
pub use sets::{closure, extended_union, IndexSet, IndexSetJson, IndexTerm, IndexTermJson, TermSet};

use num::BigRational;

use crate::error::{Error, Result};
use crate::rational;

/// Raw pole set `E⁺(α)`: real `Spec_b` roots `z > α` with `k < order`,
/// truncated at `cutoff`. Not closed under integer shifts.
pub fn index_set_eplus(
    family: &IndicialFamily,
    alpha: &BigRational,
    cutoff: &BigRational,
) -> Result<TermSet> {
    check_cutoff(alpha, cutoff)?;
    let spec = family.spec_b_roots();
    let terms: Vec<IndexTerm> = spec
        .roots
        .iter()
        .filter(|r| r.z.cmp_rational(alpha).is_gt() && r.z.cmp_rational(cutoff).is_le())
        .flat_map(|r| (0..r.order as u32).map(move |k| IndexTerm::new(r.z.clone(), k)))
        .collect();
    Ok(TermSet::new(cutoff.clone(), terms))
}

/// The index set `Ê⁺(α)` that accounts for accidental multiplicities:
/// `(z, k)` is present when some `z − r` (`r ≥ 0`) is a root above `α`
/// and `k + 1` does not exceed the number of roots (with order) among
/// `z, z − 1, …, z − r`.
pub fn index_set_hat_eplus(
    family: &IndicialFamily,
    alpha: &BigRational,
    cutoff: &BigRational,
) -> Result<IndexSet> {
    check_cutoff(alpha, cutoff)?;
    let spec = family.spec_b_roots();
    let admissible: Vec<&IndicialRoot> = spec
        .roots
        .iter()
        .filter(|r| r.z.cmp_rational(alpha).is_gt())
        .collect();

    let mut terms = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for root in &admissible {
        let mut shift = 0i64;
        loop {
            let z = root.z.shifted(shift);
            if z.cmp_rational(cutoff).is_gt() {
                break;
            }
            if seen.insert(z.clone()) {
                let max_poles = stacked_order(&spec, &admissible, &z);
                terms.extend((0..max_poles).map(|k| IndexTerm::new(z.clone(), k)));
            }
            shift += 1;
        }
    }
    Ok(closure(&TermSet::new(cutoff.clone(), terms)))
}

/// Largest `Σ_{j=0}^{r} ord(z − j)` over admissible `r`.
fn stacked_order(spec: &SpecB, admissible: &[&IndicialRoot], z: &Exponent) -> u32 {
    let deepest = admissible
        .iter()
        .filter_map(|root| z.integer_offset(&root.z))
        .filter(|r| *r >= 0)
        .max();
    let Some(r_max) = deepest else { return 0 };
    (0..=r_max).map(|j| spec.order_at(&z.shifted(-j))).sum()
}

fn check_cutoff(alpha: &BigRational, cutoff: &BigRational) -> Result<()> {
    if cutoff < alpha {
        return Err(Error::CutoffBelowAlpha {
            cutoff: rational::display(cutoff),
            alpha: rational::display(alpha),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn unit_family(spectrum: &[i64]) -> IndicialFamily {
        IndicialFamily::new(
            int(1),
            int(1),
            spectrum.iter().map(|&v| Eigenvalue::simple(int(v))).collect(),
        )
        .unwrap()
    }

    fn pairs(terms: &[IndexTerm]) -> Vec<(f64, u32)> {
        terms.iter().map(|t| (t.z.to_f64(), t.k)).collect()
    }

    #[test]
    fn eplus_keeps_roots_above_alpha() {
        let fam = unit_family(&[0]);
        let e = index_set_eplus(&fam, &int(0), &int(3)).unwrap();
        assert_eq!(pairs(e.terms()), vec![(1.0, 0)]);
        let e = index_set_eplus(&fam, &int(-3), &int(3)).unwrap();
        assert_eq!(pairs(e.terms()), vec![(-2.0, 0), (1.0, 0)]);
        let e = index_set_eplus(&fam, &int(2), &int(3)).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn eplus_double_root_has_log_partner() {
        // λ = −1/4, c = 2, ν = 0: discriminant vanishes.
        let fam = IndicialFamily::new(ratio(-1, 4), int(2), vec![Eigenvalue::simple(int(0))])
            .unwrap();
        let e = index_set_eplus(&fam, &int(-1), &int(1)).unwrap();
        assert_eq!(pairs(e.terms()), vec![(-0.5, 0), (-0.5, 1)]);
    }

    #[test]
    fn cutoff_below_alpha_is_rejected() {
        let fam = unit_family(&[0]);
        assert!(matches!(
            index_set_eplus(&fam, &int(2), &int(1)),
            Err(Error::CutoffBelowAlpha { .. })
        ));
        assert!(index_set_hat_eplus(&fam, &int(2), &int(1)).is_err());
    }

    #[test]
    fn hat_eplus_single_root_shifts() {
        let fam = unit_family(&[0]);
        let e = index_set_hat_eplus(&fam, &int(0), &int(4)).unwrap();
        assert_eq!(pairs(e.terms()), vec![(1.0, 0), (2.0, 0), (3.0, 0), (4.0, 0)]);
    }

    #[test]
    fn hat_eplus_accidental_multiplicity() {
        let fam = unit_family(&[0, 2]);
        let e = index_set_hat_eplus(&fam, &int(0), &int(3)).unwrap();
        assert_eq!(
            pairs(e.terms()),
            vec![(1.0, 0), (2.0, 0), (2.0, 1), (3.0, 0), (3.0, 1)]
        );
    }

    #[test]
    fn hat_eplus_empty_above_all_roots() {
        let fam = unit_family(&[0, 2]);
        let e = index_set_hat_eplus(&fam, &int(5), &int(5)).unwrap();
        assert!(e.is_empty());
    }
}
