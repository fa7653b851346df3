use num_complex::Complex64 as C64;
use robin::geometry::{DefiningFunction, PolyFamily, RealPoly};
use robin::green::{
    ball_green, ball_lambda, flat_directions, hessian_flat_directions, robin_function, solve_green, CField,
    GreenError, GridDomain,
};
use std::sync::Arc;

fn ball(n: usize, radius: f64) -> Arc<dyn DefiningFunction> {
    Arc::new(PolyFamily::static_ball(n, &vec![C64::from(0.0); n], radius))
}

fn pole_at(y: f64) -> Vec<f64> {
    vec![0.0, 0.0, y, 0.0]
}

fn lambda(psi: &Arc<dyn DefiningFunction>, npa: usize, pole: Vec<f64>) -> f64 {
    solve_green(&GridDomain::new(psi.clone(), C64::from(0.0), npa, pole), &CField::Zero).unwrap().lambda
}

#[test]
fn centred_balls() {
    assert!((lambda(&ball(2, 1.0), 24, pole_at(0.0)) + 1.0).abs() < 1e-8);
    assert!((lambda(&ball(2, 2.0), 24, pole_at(0.0)) + 0.25).abs() < 1e-8);
}

#[test]
fn robin_function_on_the_ball() {
    let d = GridDomain::new(ball(2, 1.0), C64::from(0.0), 32, pole_at(0.0));
    let poles: Vec<Vec<f64>> = [0.0, 0.25, 0.5].into_iter().map(pole_at).collect();
    let f = robin_function(&d, &poles, &CField::Zero, &[]).unwrap();
    for (l, y) in f.lambda.iter().zip([0.0, 0.25, 0.5]) {
        let exact = ball_lambda(2, 1.0, y);
        assert!((l - exact).abs() < 1e-3 * exact.abs(), "|y| = {y}: {l} vs {exact}");
    }
    assert!((f.lambda[1] + 1.1378).abs() < 1e-3);
    assert!(f.lambda[2] < f.lambda[1] && f.lambda[1] < f.lambda[0]);
}

#[test]
fn grid_convergence_off_centre() {
    // Nested grids: 65 nodes halve the spacing of 33 on the same box.
    let psi = ball(2, 1.0);
    let exact = -16.0 / 9.0;
    let coarse = (lambda(&psi, 33, pole_at(0.5)) - exact).abs();
    let fine = (lambda(&psi, 65, pole_at(0.5)) - exact).abs();
    assert!(coarse >= 3.0 * fine, "{coarse:e} -> {fine:e}");
}

#[test]
fn boundary_blow_up() {
    let d = GridDomain::new(ball(2, 1.0), C64::from(0.0), 32, pole_at(0.0));
    let poles: Vec<Vec<f64>> = [0.0, 0.2, 0.4, 0.5, 0.6].into_iter().map(pole_at).collect();
    let f = robin_function(&d, &poles, &CField::Zero, &[]).unwrap();
    assert!(f.lambda.windows(2).all(|w| w[1] < w[0]), "{:?}", f.lambda);
    assert!(f.lambda[4] < -2.4);
}

#[test]
fn nested_balls_are_monotone() {
    let err = 1e-3;
    let pole = pole_at(0.1);
    let small = lambda(&ball(2, 0.8), 32, pole.clone());
    let big = lambda(&ball(2, 1.0), 32, pole);
    assert!(small <= big + 2.0 * err, "{small} vs {big}");
}

#[test]
fn green_function_is_nonnegative_and_vanishes_on_the_boundary() {
    let pole = pole_at(0.4);
    let f = solve_green(&GridDomain::new(ball(2, 1.0), C64::from(0.0), 32, pole.clone()), &CField::Zero).unwrap();
    let tol = 1e-6 * f.lambda.abs();
    for id in (0..f.grid.len()).filter(|&id| f.is_interior(id)) {
        let x = f.grid.point(id);
        let g = f.q0(&x) + f.u[id];
        assert!(g >= -tol, "g = {g} at {x:?}");
    }
    for x in [[1.0, 0.0, 0.0, 0.0], [0.0, 0.6, 0.0, -0.8], [0.5, 0.5, 0.5, 0.5]] {
        let g = f.g_at(&x).unwrap();
        assert!(g.abs() < 0.05, "g = {g} at {x:?}");
    }
    let x = [0.2, -0.1, 0.1, 0.3];
    assert!((f.g_at(&x).unwrap() - ball_green(2, 1.0, &x, &pole)).abs() < 0.01);
}

#[test]
fn hessian_at_the_centre() {
    let d = GridDomain::new(ball(2, 1.0), C64::from(0.0), 24, pole_at(0.0));
    let f = robin_function(&d, &[pole_at(0.0)], &CField::Zero, &[0]).unwrap();
    let h = f.hessian[0].as_ref().unwrap();
    assert!((h - h.adjoint()).norm() < 1e-4 * h.norm());
    for e in f.eigen[0].as_ref().unwrap() {
        assert!((e - 2.0).abs() < 0.05, "{e}");
    }
    assert!(hessian_flat_directions(&f, 0, 0.1).unwrap().is_empty());
    assert!(matches!(hessian_flat_directions(&f, 1, 0.1), Err(GreenError::StencilOutOfRange)));
}

#[test]
fn synthetic_flat_direction() {
    // −Λ = 1 + |z₁|².
    let h = robin::green::complex_hessian(
        |x: &[f64]| -> Result<f64, ()> { Ok(1.0 + x[0] * x[0] + x[1] * x[1]) },
        &[0.0; 4],
        0.05,
    )
    .unwrap();
    let flat = flat_directions(&h, 0.1);
    assert_eq!(flat.len(), 1);
    assert!((flat[0].vector[1].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn solver_errors() {
    let psi = ball(2, 1.0);
    let near = GridDomain::new(psi.clone(), C64::from(0.0), 24, pole_at(0.95));
    assert!(matches!(solve_green(&near, &CField::Zero), Err(GreenError::PoleTooCloseToBoundary)));
    let outside = GridDomain::new(psi.clone(), C64::from(0.0), 24, pole_at(1.5));
    assert!(matches!(solve_green(&outside, &CField::Zero), Err(GreenError::PoleTooCloseToBoundary)));
    let centre = GridDomain::new(psi, C64::from(0.0), 24, pole_at(0.0));
    assert!(matches!(solve_green(&centre, &CField::Constant(-1.0)), Err(GreenError::NegativeC)));
}

#[test]
fn positive_c_lowers_the_robin_constant() {
    let d = GridDomain::new(ball(1, 1.0), C64::from(0.0), 65, vec![0.0, 0.0]);
    let free = solve_green(&d, &CField::Zero).unwrap().lambda;
    let damped = solve_green(&d, &CField::Constant(1.0)).unwrap().lambda;
    assert!(damped < free, "{damped} vs {free}");
}

#[test]
fn unit_disk() {
    let psi = ball(1, 1.0);
    for (y, npa, tol) in [(0.0, 33, 1e-9), (0.5, 129, 1e-6)] {
        let l = lambda(&psi, npa, vec![y, 0.0]);
        assert!((l - ball_lambda(1, 1.0, y)).abs() < tol, "{y}: {l}");
    }
    assert!((ball_lambda(1, 1.0, 0.5) - 0.75f64.ln()).abs() < 1e-15);
}

#[test]
fn disconnected_domain_uses_the_pole_component() {
    // Two disks of radius 1/2 centred at (±1, 0).
    let disk = |cx: f64| {
        let x = &RealPoly::var(2, 0) - &RealPoly::constant(2, cx);
        let y = RealPoly::var(2, 1);
        &(&(&x * &x) + &(&y * &y)) - &RealPoly::constant(2, 0.25)
    };
    let p = &disk(1.0) * &disk(-1.0);
    let psi: Arc<dyn DefiningFunction> =
        Arc::new(PolyFamily::static_poly(1, &p, vec![-1.6, -0.6], vec![1.6, 0.6]));
    let f = solve_green(&GridDomain::new(psi, C64::from(0.0), 161, vec![1.0, 0.0]), &CField::Zero).unwrap();
    assert!((f.lambda - ball_lambda(1, 0.5, 0.0)).abs() < 1e-3, "{}", f.lambda);
    let far = f.grid.coords(&[-1.0, 0.0]).iter().map(|v| v.round() as usize).collect::<Vec<_>>();
    let id = far.iter().zip(0..).map(|(m, k)| m * f.grid.stride(k)).sum::<usize>();
    assert!(!f.is_interior(id));
}
