use num_complex::Complex64 as C64;
use proptest::prelude::*;
use robin::geometry::{DefiningFunction, PolyFamily};
use robin::variation::{
    first_variation_check, lambda_of_t, second_variation_check, subharmonicity_scan, DomainFamily, VariationError,
};
use std::sync::Arc;

const ORIGIN: [f64; 4] = [0.0; 4];

fn family(psi: PolyFamily) -> DomainFamily {
    DomainFamily::new(Arc::new(psi) as Arc<dyn DefiningFunction>, 0.5, ORIGIN.to_vec())
}

fn translation(a0: C64, a1: C64) -> DomainFamily {
    family(PolyFamily::translation(2, &[a0, a1], 1.0))
}

fn static_ball() -> DomainFamily {
    family(PolyFamily::static_ball(2, &[C64::from(0.0); 2], 1.0))
}

#[test]
fn static_family_is_trivial() {
    let f = static_ball();
    let t0 = C64::from(0.0);
    assert!((lambda_of_t(&f, C64::new(0.2, -0.1), 24).unwrap() + 1.0).abs() < 1e-8);
    let r = second_variation_check(&f, t0, 0.1, 24).unwrap();
    assert!(r.lhs.abs() < 5e-3 && r.rhs.abs() < 5e-3, "{} {}", r.lhs, r.rhs);
    assert!(r.first_var_lhs.iter().chain(&r.first_var_rhs).all(|v| v.abs() < 5e-3));
    // λ is constant on the stencil, so ∂g/∂t must vanish up to solver noise.
    assert!(r.dgdt_norm2 < 10.0 * r.residual.max(1e-12), "{}", r.dgdt_norm2);
    assert_eq!(r.rhs_cross, 0.0);
}

#[test]
fn translated_ball_lambda() {
    let f = translation(C64::from(1.0), C64::from(0.0));
    assert!((lambda_of_t(&f, C64::from(0.0), 32).unwrap() + 1.0).abs() < 1e-8);
    let l = lambda_of_t(&f, C64::from(0.3), 32).unwrap();
    let exact = -1.0 / 0.91f64.powi(2);
    assert!((l - exact).abs() < 1e-3 * exact.abs(), "{l} vs {exact}");
    assert!((l + 1.2079).abs() < 1e-3 * 1.2079, "{l}");
    assert!(matches!(lambda_of_t(&f, C64::from(0.6), 32), Err(VariationError::Invalid(_))));
}

#[test]
fn half_speed_translation() {
    let r = second_variation_check(&translation(C64::from(0.5), C64::from(0.0)), C64::from(0.0), 0.1, 32).unwrap();
    assert!((r.lhs + 0.5).abs() < 0.05, "{}", r.lhs);
    assert!(r.mismatch < 0.2, "{} vs {}", r.lhs, r.rhs);
    // Translation has a critical point at t = 0.
    assert!(r.first_var_lhs.iter().all(|v| v.abs() < 5e-3), "{:?}", r.first_var_lhs);
    // Both forms of the volume term agree.
    assert!((r.rhs_volume - r.rhs_volume_forms).abs() < 1e-9 * r.rhs_volume.abs().max(1.0));
}

#[test]
fn radial_first_variation() {
    let f = family(PolyFamily::radial(2, 1.0));
    let (lhs, rhs, mismatch) = first_variation_check(&f, C64::from(0.0), 0.05, 24).unwrap();
    assert!((lhs - C64::from(1.0)).norm() < 0.02, "{lhs}");
    assert!(mismatch < 0.1, "{lhs} vs {rhs}");
}

#[test]
fn subharmonicity_scans() {
    let ts = [C64::from(0.0), C64::new(0.1, 0.1)];
    let tr = subharmonicity_scan(&translation(C64::from(1.0), C64::from(0.0)), &ts, 0.1, 28, true).unwrap();
    assert!(tr.subharmonic && tr.min >= 2.0 * 0.8, "{:?}", tr.samples);
    let st = subharmonicity_scan(&static_ball(), &ts, 0.1, 28, false).unwrap();
    assert!(st.samples.iter().all(|s| s[2].abs() <= 5e-3), "{:?}", st.samples);
    let a = [C64::from(1.0), C64::new(0.3, -0.5)];
    let q = subharmonicity_scan(&family(PolyFamily::quartic(2, &a)), &ts, 0.1, 28, true).unwrap();
    assert!(q.subharmonic, "{:?}", q.samples);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn translation_lhs_tracks_speed(re in -1.0f64..1.0, im in -1.0f64..1.0, second in -0.5f64..0.5) {
        let (a0, a1) = (C64::new(re, im), C64::new(second, 0.0));
        let speed2 = a0.norm_sqr() + a1.norm_sqr();
        prop_assume!(speed2 > 0.1);
        let r = second_variation_check(&translation(a0, a1), C64::from(0.0), 0.1, 28).unwrap();
        prop_assert!((r.lhs + 2.0 * speed2).abs() <= 0.1 * 2.0 * speed2, "{} vs {}", r.lhs, -2.0 * speed2);
        prop_assert!(-r.lhs >= -5e-3 * r.lhs.abs().max(1.0));
    }
}
