use num_complex::Complex64;

/// `(e^x − 1)/x` without cancellation near `x = 0`.
fn exprel(x: Complex64) -> Complex64 {
    if x.norm() < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    let (a, b) = (x.re, x.im);
    let s = (b / 2.0).sin();
    let em1 = Complex64::new(a.exp_m1() * b.cos() - 2.0 * s * s, a.exp() * b.sin());
    em1 / x
}

/// Integral curve of the affine field `X = (α, β)` on `{(a, b)}` through `(a0, b0)`:
/// `(a0 e^{αt}, a0 β (e^{αt} − 1)/α + b0)`, continuous at `α = 0` where it is
/// `(a0, a0 β t + b0)`.
pub fn autc_integral_curve(
    alpha: Complex64,
    beta: Complex64,
    t: Complex64,
    a0: Complex64,
    b0: Complex64,
) -> (Complex64, Complex64) {
    let at = alpha * t;
    (a0 * at.exp(), a0 * beta * t * exprel(at) + b0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_values() {
        let (a, b) = autc_integral_curve(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!((a - c(E, 0.0)).norm() < 1e-14 && b.norm() < 1e-14);
        let (a, b) = autc_integral_curve(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!((a - c(1.0, 0.0)).norm() < 1e-15 && (b - c(2.0, 0.0)).norm() < 1e-15);
        let (a, b) = autc_integral_curve(c(1.0, 0.0), c(1.0, 0.0), c(0.0, PI), c(1.0, 0.0), c(0.0, 0.0));
        assert!((a - c(-1.0, 0.0)).norm() < 1e-14 && (b - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn small_alpha_is_continuous() {
        let beta = c(0.3, -0.7);
        let t = c(1.5, 0.25);
        let (_, b0) = autc_integral_curve(c(0.0, 0.0), beta, t, c(1.0, 0.0), c(0.0, 0.0));
        let (_, b1) = autc_integral_curve(c(1e-12, 1e-12), beta, t, c(1.0, 0.0), c(0.0, 0.0));
        assert!((b0 - b1).norm() < 1e-11);
    }
}
