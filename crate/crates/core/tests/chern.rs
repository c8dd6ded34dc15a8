use cuspkit::chern::{log_coefficient, log_coefficient_plane_curve, plane_curve_chern, predicted_sign, ChernData};
use cuspkit::rational::{int, ratio};
use num::{BigRational, Signed, Zero};
use proptest::prelude::*;

#[test]
fn plane_curve_identity_for_all_degrees() {
    for d in 4..=100 {
        assert_eq!(log_coefficient_plane_curve(d).unwrap(), ratio(2 * d, 3 * (d - 3)), "d = {d}");
    }
    assert_eq!(log_coefficient_plane_curve(4).unwrap(), ratio(8, 3));
    assert_eq!(log_coefficient_plane_curve(5).unwrap(), ratio(5, 3));
}

#[test]
fn plane_curve_coefficients_decrease_towards_two_thirds() {
    let values: Vec<BigRational> = (4..=100).map(|d| log_coefficient_plane_curve(d).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(values.iter().all(|v| v > &ratio(2, 3)));
    let gap = values.last().unwrap() - ratio(2, 3);
    assert!(gap < ratio(1, 40));
}

#[test]
fn low_degrees_rejected() {
    for d in [-1, 0, 1, 2, 3] {
        assert!(plane_curve_chern(d).is_err());
    }
}

proptest! {
    #[test]
    fn sign_rule(n in 2u32..=6, top in -50i64..=50, mixed in -50i64..=50) {
        prop_assume!(top != 0);
        let data = ChernData::new(n, int(top), int(mixed)).unwrap();
        let b = log_coefficient(&data).unwrap();
        let sign = if b.is_zero() { 0 } else if b.is_positive() { 1 } else { -1 };
        prop_assert_eq!(sign, predicted_sign(&data));
    }

    #[test]
    fn coefficient_is_linear_in_mixed_term(n in 2u32..=6, top in 1i64..=50, m1 in -50i64..=50, m2 in -50i64..=50) {
        let f = |m: i64| log_coefficient(&ChernData::new(n, int(top), int(m)).unwrap()).unwrap();
        prop_assert_eq!(f(m1) + f(m2), f(m1 + m2));
    }
}
