use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robin::lie::{
    conjugated_tangent, expm, extract_composition, flag_point_numeric, flag_point_of_group_element, flag_tangent,
    grassmann_spanning_rank, hopf_closure_report, parabolic_closure, qi, qi_to_c64, random_upper_triangular,
    Composition, LieError, MatrixSubspace, SquareMatrix,
};
use robin::selftest::{brute_force_parabolic, random_lower_units};

fn zero_vec(n: usize) -> Vec<robin::lie::Qi> {
    vec![qi(0, 0); n]
}

#[test]
fn bracket_relations() {
    let (e12, e21) = (SquareMatrix::unit(2, 0, 1), SquareMatrix::unit(2, 1, 0));
    let h = &SquareMatrix::unit(2, 0, 0) - &SquareMatrix::unit(2, 1, 1);
    assert_eq!(e12.bracket(&e21).unwrap(), h);
    assert!(e12.bracket(&e12).unwrap().is_zero());
    assert_eq!(e12.bracket(&SquareMatrix::identity(3)), Err(LieError::DimensionMismatch));
}

#[test]
fn hopf_bracket_with_vanishing_c2() {
    // X = E_11 (c = (1, 0)), Y supported on the second column: [X, Y] stays in
    // the base algebra.
    let x = SquareMatrix::unit(2, 0, 0);
    let mut y = SquareMatrix::zeros(2, 2);
    y[(0, 1)] = qi(3, 1);
    y[(1, 1)] = qi(-2, 0);
    let base = MatrixSubspace::hopf_base(2);
    assert!(base.contains(&y).unwrap());
    assert!(base.contains(&x.bracket(&y).unwrap()).unwrap());
}

#[test]
fn tangent_examples() {
    let mut x = SquareMatrix::zeros(3, 3);
    x[(1, 0)] = qi(2, 0);
    x[(2, 0)] = qi(3, 0);
    x[(2, 1)] = qi(5, 0);
    assert_eq!(flag_tangent(&x), vec![qi(2, 0), qi(3, 0), qi(5, 0)]);
    let upper = SquareMatrix::from_ints(3, &[1, 2, 3, 0, 4, 5, 0, 0, 6]);
    assert_eq!(flag_tangent(&upper), zero_vec(3));
    assert_eq!(flag_tangent(&(&x + &upper)), flag_tangent(&x));
}

#[test]
fn flag_point_examples() {
    assert_eq!(flag_point_of_group_element(&SquareMatrix::identity(3)).unwrap(), zero_vec(3));
    let s = qi(7, -2);
    let mut a = SquareMatrix::identity(3);
    a[(1, 0)] = s.clone();
    assert_eq!(flag_point_of_group_element(&a).unwrap(), vec![s, qi(0, 0), qi(0, 0)]);
    let upper = SquareMatrix::from_ints(3, &[1, 2, 3, 0, 4, 5, 0, 0, 6]);
    assert_eq!(flag_point_of_group_element(&upper).unwrap(), zero_vec(3));
    let singular = SquareMatrix::from_ints(2, &[0, 1, 1, 0]);
    assert_eq!(flag_point_of_group_element(&singular), Err(LieError::SingularLeadingMinor(1)));
}

#[test]
fn closure_examples() {
    let b3 = MatrixSubspace::upper_triangular(3);
    assert_eq!(parabolic_closure(&[], &b3).unwrap(), b3);
    assert_eq!(extract_composition(&b3).unwrap().parts(), &[1, 1, 1]);
    assert_eq!(extract_composition(&MatrixSubspace::full(4)).unwrap().parts(), &[4]);
    let p = parabolic_closure(&[SquareMatrix::unit(3, 1, 0)], &b3).unwrap();
    assert_eq!(p.dim(), 7);
    assert_eq!(extract_composition(&p).unwrap().parts(), &[2, 1]);
    let h = parabolic_closure(&[SquareMatrix::unit(2, 1, 0)], &MatrixSubspace::hopf_base(2)).unwrap();
    assert_eq!(h, MatrixSubspace::full(2));
}

#[test]
fn hopf_reports() {
    for n in 2..=4 {
        let r = hopf_closure_report(n).unwrap();
        assert_eq!(r.x0.dim(), 1 + n * (n - 1));
        assert!(r.escapes.iter().all(|(_, full)| *full));
    }
    // {(x, a; 0, b)}
    let r = hopf_closure_report(2).unwrap();
    let pattern = MatrixSubspace::from_pattern(2, |i, j| !(i == 1 && j == 0));
    assert_eq!(r.x0, pattern);
}

#[test]
fn grassmann_examples() {
    let k = num_rational::BigRational::from_integer(1000.into());
    let one = grassmann_spanning_rank(1, 1, &SquareMatrix::unit(2, 1, 0), &k).unwrap();
    assert_eq!((one.rank_formal, one.rank_at_k), (1, 1));
    let two = grassmann_spanning_rank(2, 1, &SquareMatrix::unit(3, 2, 0), &k).unwrap();
    assert_eq!((two.rank_formal, two.rank_at_k), (2, 2));
    let mut x = SquareMatrix::zeros(4, 4);
    for (r, c, v) in [(2, 0, 3), (2, 1, -1), (3, 0, 2), (3, 1, 5)] {
        x[(r, c)] = qi(v, 0);
    }
    let four = grassmann_spanning_rank(2, 2, &x, &k).unwrap();
    assert_eq!((four.rank_formal, four.rank_at_k), (4, 4));
    assert_eq!(
        grassmann_spanning_rank(2, 2, &SquareMatrix::identity(4), &k).map(|r| r.rank_formal),
        Err(LieError::StarViolation)
    );
}

fn gaussian_matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec((-5i64..=5, -5i64..=5), n * n).prop_map(move |v| {
        let mut m = SquareMatrix::zeros(n, n);
        for (k, (re, im)) in v.into_iter().enumerate() {
            m[(k / n, k % n)] = qi(re, im);
        }
        m
    })
}

fn triple() -> impl Strategy<Value = (SquareMatrix, SquareMatrix, SquareMatrix)> {
    (2usize..=5).prop_flat_map(|n| (gaussian_matrix(n), gaussian_matrix(n), gaussian_matrix(n)))
}

fn to_c64(m: &SquareMatrix) -> DMatrix<Complex64> {
    let n = m.n();
    DMatrix::from_fn(n, n, |i, j| qi_to_c64(&m[(i, j)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn jacobi_identity((x, y, z) in triple()) {
        let a = x.bracket(&y).unwrap().bracket(&z).unwrap();
        let b = y.bracket(&z).unwrap().bracket(&x).unwrap();
        let c = z.bracket(&x).unwrap().bracket(&y).unwrap();
        prop_assert!((&(&a + &b) + &c).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugated_tangent_routes(seed in any::<u64>(), x in (2usize..=4).prop_flat_map(gaussian_matrix)) {
        let n = x.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_upper_triangular(n, 3, &mut rng);
        let exact = conjugated_tangent(&a, &x).unwrap();

        // Route 2: lower part of A X A⁻¹.
        let ainv = a.inverse().unwrap();
        prop_assert_eq!(&flag_tangent(&x.conjugate_by(&a, &ainv).unwrap()), &exact);

        // Route 3: central difference of the chart along A exp(tX).
        let (ac, xc) = (to_c64(&a), to_c64(&x));
        let h = 1e-6;
        let p = flag_point_numeric(&(&ac * expm(&(&xc * Complex64::from(h))))).unwrap();
        let m = flag_point_numeric(&(&ac * expm(&(&xc * Complex64::from(-h))))).unwrap();
        for (k, e) in exact.iter().enumerate() {
            let fd = (p[k] - m[k]) / (2.0 * h);
            let e = qi_to_c64(e);
            prop_assert!((fd - e).norm() <= 1e-8 * e.norm().max(1.0), "{} vs {}", fd, e);
        }
    }

    #[test]
    fn closure_matches_brute_force(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = random_lower_units(n, &mut rng);
        let b = MatrixSubspace::upper_triangular(n);
        let p = parabolic_closure(&gens, &b).unwrap();
        let c = extract_composition(&p).unwrap();
        prop_assert_eq!(&c, &brute_force_parabolic(n, &gens).unwrap());
        prop_assert_eq!(&p, &MatrixSubspace::parabolic(&c));
        // Idempotence.
        prop_assert_eq!(&parabolic_closure(&p.basis(), &b).unwrap(), &p);
        // Fibre dimension of the generalized flag.
        prop_assert_eq!(p.dim() - b.dim(), c.fibre_dim());
    }

    #[test]
    fn every_composition_is_its_own_closure(n in 1usize..=5, pick in any::<prop::sample::Index>()) {
        let all = Composition::all(n);
        let c = pick.get(&all);
        let p = MatrixSubspace::parabolic(c);
        prop_assert_eq!(&extract_composition(&p).unwrap(), c);
        prop_assert_eq!(&parabolic_closure(&p.basis(), &MatrixSubspace::upper_triangular(n)).unwrap(), &p);
    }
}
