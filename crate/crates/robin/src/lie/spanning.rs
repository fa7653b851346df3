use super::flag::{conjugated_tangent, tangent_dim};
use super::mat::{rank, Mat, Qi, SquareMatrix};
use super::LieError;
use crate::poly::RatFunc;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// ℚ(i)(K) with `K` a formal scale.
type QiK = RatFunc<Qi>;

#[derive(Clone, Debug)]
pub struct GrassmannSpanning {
    pub p: usize,
    pub q: usize,
    /// Position `(row, col)` inside the lower-left `q×p` block moved to `(1,1)`.
    pub pivot: (usize, usize),
    /// `v_ij` for `i = 1..p`, `j = 1..q` (outer loop over `i`), row-major in `(t)`.
    pub vectors: Vec<Vec<QiK>>,
    /// Rank over ℚ(i)(K).
    pub rank_formal: usize,
    /// Rank after substituting the numeric scale.
    pub rank_at_k: usize,
    pub k: BigRational,
}

/// Antidiagonal identity of size `s` plus identity of size `total − s`.
fn reversal(s: usize, total: usize) -> SquareMatrix {
    let mut m = SquareMatrix::identity(total);
    for r in 0..s {
        for c in 0..s {
            m[(r, c)] = if r + c + 1 == s { Qi::one() } else { Qi::zero() };
        }
    }
    m
}

/// Antidiagonal ones of size `s` with the bottom-left entry replaced by
/// `corner`, padded by identity to size `total`.
fn scaled_reversal(s: usize, total: usize, corner: &QiK) -> Mat<QiK> {
    let mut m = Mat::<QiK>::identity(total);
    for r in 0..s {
        for c in 0..s {
            m[(r, c)] = if r + c + 1 == s { QiK::one() } else { QiK::zero() };
        }
    }
    m[(s - 1, 0)] = corner.clone();
    m
}

/// Rank of the tangent vectors `V[h_ij(K)]` of the curves
/// `h_ij(K)(I + tA)h_ij(K)⁻¹(O)` on the Grassmannian `G(p, p+q)`, where `A` is
/// the lower-left block of `X`.
pub fn grassmann_spanning_rank(
    p: usize,
    q: usize,
    x: &SquareMatrix,
    k: &BigRational,
) -> Result<GrassmannSpanning, LieError> {
    let n = p + q;
    if p == 0 || q == 0 || x.n() != n {
        return Err(LieError::DimensionMismatch);
    }
    let mut lower = SquareMatrix::zeros(n, n);
    for r in p..n {
        for c in 0..p {
            lower[(r, c)] = x[(r, c)].clone();
        }
    }
    let pivot = (0..q)
        .flat_map(|r| (0..p).map(move |c| (r, c)))
        .find(|&(r, c)| !x[(p + r, c)].is_zero())
        .ok_or(LieError::StarViolation)?;
    // Reversals are involutions, so the pivot conjugation is h·A·h.
    let h = Mat::block_diag(&reversal(pivot.1 + 1, p), &reversal(pivot.0 + 1, q));
    let a = h.checked_mul(&lower)?.checked_mul(&h)?;
    debug_assert!(!a[(p, 0)].is_zero());

    let kk = QiK::x();
    let kinv = kk.inv();
    let a_k = a.map(|v| QiK::constant(v.clone()));
    let mut vectors = Vec::with_capacity(p * q);
    for i in 1..=p {
        for j in 1..=q {
            let hij = Mat::block_diag(&scaled_reversal(i, p, &kinv), &scaled_reversal(j, q, &kk));
            let conj = hij.checked_mul(&a_k)?.checked_mul(&hij.inverse()?)?;
            let mut v = Vec::with_capacity(p * q);
            for r in p..n {
                for c in 0..p {
                    v.push(conj[(r, c)].clone());
                }
            }
            vectors.push(v);
        }
    }
    let rank_formal = rank(&vectors);
    let kq = Qi::new(k.clone(), BigRational::zero());
    let numeric: Vec<Vec<Qi>> = vectors
        .iter()
        .map(|v| v.iter().map(|e| e.eval(&kq).ok_or(LieError::Singular)).collect())
        .collect::<Result<_, _>>()?;
    Ok(GrassmannSpanning {
        p,
        q,
        pivot,
        rank_formal,
        rank_at_k: rank(&numeric),
        vectors,
        k: k.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct FlagSpanning {
    pub n: usize,
    pub samples: usize,
    pub rank: usize,
    /// All tangents vanish outside the first block `(t21, …, tn1)`.
    pub first_block_only: bool,
}

/// Rank of the tangents of `A exp(tX)(O)` over the sampled `A`.
pub fn flag_spanning_rank(x: &SquareMatrix, samples: &[SquareMatrix]) -> Result<FlagSpanning, LieError> {
    let n = x.n();
    let tangents = samples
        .iter()
        .map(|a| conjugated_tangent(a, x))
        .collect::<Result<Vec<_>, _>>()?;
    let first_block_only = tangents
        .iter()
        .all(|t| t[n - 1..].iter().all(|v| v.is_zero()));
    debug_assert!(tangents.iter().all(|t| t.len() == tangent_dim(n)));
    Ok(FlagSpanning {
        n,
        samples: samples.len(),
        rank: rank(&tangents),
        first_block_only,
    })
}

/// Random invertible upper-triangular Gaussian-integer matrix with entries in
/// `[-bound, bound]` and nonzero diagonal.
pub fn random_upper_triangular<R: Rng>(n: usize, bound: i64, rng: &mut R) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = super::mat::qi(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            while i == j && v.is_zero() {
                v = super::mat::qi(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            }
            m[(i, j)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::super::mat::qi;
    use super::*;

    fn k1000() -> BigRational {
        BigRational::from_integer(1000.into())
    }

    #[test]
    fn one_by_one() {
        let x = SquareMatrix::from_ints(2, &[0, 0, 1, 0]);
        let r = grassmann_spanning_rank(1, 1, &x, &k1000()).unwrap();
        assert_eq!((r.rank_formal, r.rank_at_k), (1, 1));
        assert_eq!(r.vectors[0][0], QiK::x().pow(2));
    }

    #[test]
    fn k_squared_lands_on_j_i() {
        // p = 2, q = 2, a11 = 1 only.
        let mut x = SquareMatrix::zeros(4, 4);
        x[(2, 0)] = qi(1, 0);
        let r = grassmann_spanning_rank(2, 2, &x, &k1000()).unwrap();
        let k2 = QiK::x().pow(2);
        for i in 1..=2 {
            for j in 1..=2 {
                let v = &r.vectors[(i - 1) * 2 + (j - 1)];
                for (idx, e) in v.iter().enumerate() {
                    let expect = if idx == (j - 1) * 2 + (i - 1) { k2.clone() } else { QiK::zero() };
                    assert_eq!(*e, expect);
                }
            }
        }
        assert_eq!(r.rank_formal, 4);
    }

    #[test]
    fn star_violation() {
        let x = SquareMatrix::from_ints(2, &[1, 1, 0, 1]);
        assert!(matches!(
            grassmann_spanning_rank(1, 1, &x, &k1000()),
            Err(LieError::StarViolation)
        ));
    }
}
