use num_complex::Complex64 as C64;
use proptest::prelude::*;
use robin::poly::Poly;
use robin::selftest::tuple_identities;
use robin::torus::{
    autc_integral_curve, classify_direction, direction_from_tuple, foliation_data, rat, scalar, sigma_t_disjoint, xi,
    AlgebraicScalar, DirectionCase, SixTuple,
};

fn lin(c0: i64, c1: i64) -> AlgebraicScalar {
    AlgebraicScalar::from_poly(Poly::new(vec![rat(c0, 1), rat(c1, 1)]))
}

fn sample() -> SixTuple {
    SixTuple::new(1, 1, 0, 1, 1, 1).unwrap()
}

#[test]
fn sample_tuple_data() {
    let (a, b) = direction_from_tuple(&sample());
    let den = AlgebraicScalar::from_poly(Poly::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]));
    assert_eq!(a, &lin(1, 1) / &den);
    assert_eq!(b, &lin(1, -1) / &den);
    let fd = foliation_data(&sample()).unwrap();
    assert_eq!(fd.big_a, &lin(1, 1) / &lin(1, -1));
    assert_eq!(fd.big_c, &scalar(2, 1) / &lin(1, -1));
    assert_eq!(fd.eta, &scalar(2, 1) / &lin(1, -1));
    assert!(fd.eta.degree() > 0);
    let jac = &(-&(&fd.big_a * &fd.big_a)) - &(&fd.big_b * &fd.big_c);
    assert_eq!(jac, AlgebraicScalar::one());
}

#[test]
fn sample_tuple_map() {
    let fd = foliation_data(&sample()).unwrap();
    let one = scalar(1, 1);
    assert_eq!(fd.f_apply(&one, &one), (xi(), one.clone()));
    let z = AlgebraicScalar::zero();
    assert_eq!(fd.f_apply(&z, &z), (z.clone(), z.clone()));
    // F(p/n, 0) = (q/n', 0) + η (M', n') with M' = ξ.
    let (x3, x4) = fd.f_apply(&one, &z);
    assert_eq!(x3, &one + &(&fd.eta * &xi()));
    assert_eq!(x4, fd.eta);
}

#[test]
fn leaf_periodicity() {
    let fd = foliation_data(&sample()).unwrap();
    assert!(!sigma_t_disjoint(&fd, &rat(1, 3), &rat(4, 3)));
    assert!(sigma_t_disjoint(&fd, &rat(0, 1), &rat(1, 2)));
    assert!(!sigma_t_disjoint(&fd, &rat(2, 7), &rat(2, 7)));
}

#[test]
fn b_zero_directions() {
    let z = AlgebraicScalar::zero();
    let d = classify_direction(&scalar(1, 2), &z, 10).unwrap();
    assert_eq!(d.case, DirectionCase::RationalSlope { p: 2.into(), q: 1.into() });
    assert_eq!(classify_direction(&xi(), &z, 10).unwrap().case, DirectionCase::CannotOccur);
}

#[test]
fn integral_curve_values() {
    let (one, zero) = (C64::from(1.0), C64::from(0.0));
    let (a, b) = autc_integral_curve(one, zero, one, one, zero);
    assert!((a - C64::from(std::f64::consts::E)).norm() < 1e-12 && b.norm() < 1e-12);
    let (a, b) = autc_integral_curve(zero, one, C64::from(2.0), one, zero);
    assert!((a - one).norm() < 1e-12 && (b - C64::from(2.0)).norm() < 1e-12);
    let (a, b) = autc_integral_curve(one, one, C64::new(0.0, std::f64::consts::PI), one, zero);
    assert!((a + one).norm() < 1e-12 && (b + C64::from(2.0)).norm() < 1e-12);
}

fn tuple(height: i64) -> impl Strategy<Value = SixTuple> {
    (
        -height..=height,
        -height..=height,
        -height..=height,
        1..=height,
        1..=height,
        1..=height,
    )
        .prop_filter_map("gcd conditions", |(m, n, mp, np, p, q)| SixTuple::new(m, n, mp, np, p, q).ok())
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_identities(t in tuple(20)) {
        prop_assert_eq!(tuple_identities(&t), Ok(()));
    }

    #[test]
    fn f_inverse_is_inverse(t in tuple(20), x1 in (-9i64..9, 1i64..9), x2 in (-9i64..9, 1i64..9)) {
        let fd = foliation_data(&t).unwrap();
        let (x1, x2) = (scalar(x1.0, x1.1), &scalar(x2.0, x2.1) * &xi());
        let (x3, x4) = fd.f_apply(&x1, &x2);
        prop_assert_eq!(fd.f_inverse(&x3, &x4), (x1, x2));
    }

    #[test]
    fn leaves_repeat_with_period_one(t in tuple(10), s in (-20i64..20, 1i64..7), k in -3i64..3) {
        let fd = foliation_data(&t).unwrap();
        let s = rat(s.0, s.1);
        let shifted = &s + &rat(k, 1);
        prop_assert!(!sigma_t_disjoint(&fd, &s, &shifted));
    }

    #[test]
    fn integral_curve_stays_on_its_line(alpha in complex(), beta in complex(), t in complex(), a0 in complex(), b0 in complex()) {
        let (a, b) = autc_integral_curve(alpha, beta, t, a0, b0);
        let lhs = beta * a - alpha * b;
        let rhs = beta * a0 - alpha * b0;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + a.norm() + b.norm()) * (1.0 + alpha.norm() + beta.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn classification_recovers_tuple(t in tuple(6)) {
        let (a, b) = direction_from_tuple(&t);
        let d = classify_direction(&a, &b, 6).unwrap();
        prop_assert_eq!(d.case, DirectionCase::BNonzero(t));
    }
}
