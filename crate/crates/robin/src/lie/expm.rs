use nalgebra::DMatrix;
use num_complex::Complex64;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = x.nrows();
    let norm = x.iter().map(|v| v.norm()).fold(0.0, f64::max) * n as f64;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let y = x / Complex64::new(2f64.powi(s), 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=18 {
        term = &term * &y / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_and_diagonal() {
        let c = |r: f64| Complex64::new(r, 0.0);
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0), c(3.0), c(0.0), c(0.0)]);
        let e = expm(&x);
        assert!((e[(0, 1)] - c(3.0)).norm() < 1e-13);
        assert!((e[(0, 0)] - c(1.0)).norm() < 1e-14);
        let d = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), Complex64::new(0.0, std::f64::consts::PI)]);
        let e = expm(&d);
        assert!((e[(0, 0)] - c(std::f64::consts::E)).norm() < 1e-13);
        assert!((e[(1, 1)] - c(-1.0)).norm() < 1e-13);
    }
}
