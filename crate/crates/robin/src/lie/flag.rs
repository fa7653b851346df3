use super::mat::{Mat, Qi, SquareMatrix};
use super::LieError;
use crate::poly::Field;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

/// Dimension `n(n−1)/2` of the full flag space.
pub fn tangent_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Tangent at the base point of `t ↦ exp(tX)(O)` in standard coordinates:
/// the strictly lower entries, column by column
/// `(λ21, …, λn1; λ32, …, λn2; …; λn,n−1)`.
pub fn flag_tangent<F: Field>(x: &Mat<F>) -> Vec<F> {
    let n = x.n();
    let mut v = Vec::with_capacity(tangent_dim(n));
    for j in 0..n {
        for i in j + 1..n {
            v.push(x[(i, j)].clone());
        }
    }
    v
}

/// Standard coordinates of `A(O)`: block `k` is the last column of
/// `A^k_{n−k} A_k⁻¹`, where `A_k` is the leading `k×k` block and `A^k_{n−k}`
/// the rows below it in the same columns.
pub fn flag_point_of_group_element<F: Field>(a: &Mat<F>) -> Result<Vec<F>, LieError> {
    let n = a.n();
    let mut out = Vec::with_capacity(tangent_dim(n));
    for k in 1..n {
        let ak_inv = a
            .block(0, k, 0, k)
            .inverse()
            .map_err(|_| LieError::SingularLeadingMinor(k))?;
        let alpha = a.block(k, n, 0, k).checked_mul(&ak_inv)?;
        out.extend((0..n - k).map(|i| alpha[(i, k - 1)].clone()));
    }
    Ok(out)
}

/// Floating-point version for numerical differentiation.
pub fn flag_point_numeric(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>, LieError> {
    let n = a.nrows();
    let m = Mat::from_vec(n, n, (0..n * n).map(|k| a[(k / n, k % n)]).collect());
    flag_point_of_group_element(&m)
}

/// Tangent at `O` of `t ↦ A exp(tX)(O)` for upper-triangular invertible `A`.
///
/// Block `k` is `M_k d_k`, with `(M_k)_{rj} = Σ_{i≥r} a_{ri} λ_{ij}` for rows
/// `r > k`, columns `j ≤ k`, and `d_k` the last column of `A_k⁻¹`.
pub fn conjugated_tangent(a: &SquareMatrix, x: &SquareMatrix) -> Result<Vec<Qi>, LieError> {
    let n = a.n();
    if x.n() != n {
        return Err(LieError::DimensionMismatch);
    }
    if !a.is_upper_triangular() {
        return Err(LieError::Invalid("A must be upper triangular".into()));
    }
    let mut out = Vec::with_capacity(tangent_dim(n));
    for k in 1..n {
        let ak_inv = a
            .block(0, k, 0, k)
            .inverse()
            .map_err(|_| LieError::SingularLeadingMinor(k))?;
        for r in k..n {
            let mut acc = Qi::zero();
            for j in 0..k {
                let d = &ak_inv[(j, k - 1)];
                if d.is_zero() {
                    continue;
                }
                let mut m = Qi::zero();
                for i in r..n {
                    m = m + a[(r, i)].clone() * x[(i, j)].clone();
                }
                acc = acc + m * d.clone();
            }
            out.push(acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::mat::qi;
    use super::*;

    #[test]
    fn tangent_order() {
        let x = SquareMatrix::from_ints(3, &[0, 7, 7, 2, 0, 7, 3, 5, 0]);
        assert_eq!(flag_tangent(&x), vec![qi(2, 0), qi(3, 0), qi(5, 0)]);
    }

    #[test]
    fn point_of_elementary() {
        let a = SquareMatrix::from_ints(3, &[1, 0, 0, 4, 1, 0, 0, 0, 1]);
        assert_eq!(
            flag_point_of_group_element(&a).unwrap(),
            vec![qi(4, 0), qi(0, 0), qi(0, 0)]
        );
        let u = SquareMatrix::from_ints(3, &[2, 1, 5, 0, 3, 1, 0, 0, 1]);
        assert!(flag_point_of_group_element(&u).unwrap().iter().all(|v| *v == qi(0, 0)));
        let s = SquareMatrix::from_ints(2, &[0, 1, 1, 0]);
        assert_eq!(
            flag_point_of_group_element(&s),
            Err(LieError::SingularLeadingMinor(1))
        );
    }

    #[test]
    fn contraction_matches_conjugation() {
        let a = SquareMatrix::from_ints(3, &[2, -1, 3, 0, 1, 4, 0, 0, -3]);
        let x = SquareMatrix::from_ints(3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let ax = x.conjugate_by(&a, &a.inverse().unwrap()).unwrap();
        assert_eq!(conjugated_tangent(&a, &x).unwrap(), flag_tangent(&ax));
    }
}
