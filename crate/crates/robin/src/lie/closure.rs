use super::mat::{qi, SquareMatrix};
use super::{Composition, LieError, MatrixSubspace};
use std::collections::VecDeque;

/// `(I + sB, (I + sB)⁻¹)` for each basis element `B` of `base` and `s ∈ {1, 2}`,
/// skipping the singular ones.
pub fn group_generators(base: &MatrixSubspace) -> Vec<(SquareMatrix, SquareMatrix)> {
    let n = base.n();
    let id = SquareMatrix::identity(n);
    let mut out = Vec::new();
    for b in base.basis() {
        for s in [1, 2] {
            let a = &id + &b.scale(&qi(s, 0));
            if let Ok(inv) = a.inverse() {
                out.push((a, inv));
            }
        }
    }
    out
}

/// Smallest subspace containing `base` and `generators` that is closed under
/// brackets and under conjugation by the elementary group elements of `base`.
///
/// Every vector that enlarges the span is bracketed with all earlier such
/// vectors and conjugated by each group generator, so the result is closed by
/// bilinearity. Termination: each accepted vector raises the dimension, which is
/// bounded by `n²`.
pub fn parabolic_closure(
    generators: &[SquareMatrix],
    base: &MatrixSubspace,
) -> Result<MatrixSubspace, LieError> {
    let n = base.n();
    let group = group_generators(base);
    let mut span = MatrixSubspace::empty(n);
    let mut accepted: Vec<SquareMatrix> = Vec::new();
    let mut queue: VecDeque<SquareMatrix> = base.basis().into();
    queue.extend(generators.iter().cloned());
    while let Some(v) = queue.pop_front() {
        if span.is_full() {
            break;
        }
        if !span.insert(&v)? {
            continue;
        }
        for w in &accepted {
            queue.push_back(v.bracket(w)?);
        }
        for (a, a_inv) in &group {
            queue.push_back(v.conjugate_by(a, a_inv)?);
        }
        accepted.push(v);
    }
    Ok(span)
}

/// Read the composition off the subdiagonal units and verify the block pattern.
pub fn extract_composition(p: &MatrixSubspace) -> Result<Composition, LieError> {
    let n = p.n();
    let joins = (0..n.saturating_sub(1))
        .map(|i| p.contains(&SquareMatrix::unit(n, i + 1, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let c = Composition::from_joins(&joins);
    if MatrixSubspace::parabolic(&c) == *p {
        Ok(c)
    } else {
        Err(LieError::NotParabolic)
    }
}

#[derive(Clone, Debug)]
pub struct HopfReport {
    pub n: usize,
    /// Closure of the base with `E_11`.
    pub x0: MatrixSubspace,
    /// Whether `x0` is `{x E_11} ⊕ (first column zero)`.
    pub x0_is_stabilizer: bool,
    /// `(j, closure with E_j1 is all of M_n)` for `j = 2..n` (1-based).
    pub escapes: Vec<(usize, bool)>,
    pub verdict: String,
}

/// Closures over the algebra of matrices with zero first column.
pub fn hopf_closure_report(n: usize) -> Result<HopfReport, LieError> {
    if n < 2 {
        return Err(LieError::Invalid("n must be at least 2".into()));
    }
    let base = MatrixSubspace::hopf_base(n);
    let x0 = parabolic_closure(&[SquareMatrix::unit(n, 0, 0)], &base)?;
    let x0_is_stabilizer = x0 == MatrixSubspace::hopf_stabilizer(n);
    let escapes = (1..n)
        .map(|j| {
            parabolic_closure(&[SquareMatrix::unit(n, j, 0)], &base).map(|s| (j + 1, s.is_full()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = if x0_is_stabilizer && escapes.iter().all(|e| e.1) {
        format!(
            "proper intermediate algebra has dimension {}; non-Stein pseudoconvex domains fibre over P^{}",
            x0.dim(),
            n - 1
        )
    } else {
        "unexpected closure pattern".to_string()
    };
    Ok(HopfReport {
        n,
        x0,
        x0_is_stabilizer,
        escapes,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_generators_give_base() {
        let base = MatrixSubspace::upper_triangular(4);
        assert_eq!(parabolic_closure(&[], &base).unwrap(), base);
    }

    #[test]
    fn single_subdiagonal_unit() {
        let base = MatrixSubspace::upper_triangular(3);
        let p = parabolic_closure(&[SquareMatrix::unit(3, 1, 0)], &base).unwrap();
        assert_eq!(p.dim(), 7);
        assert_eq!(extract_composition(&p).unwrap().parts(), &[2, 1]);
    }

    #[test]
    fn extremes() {
        assert_eq!(
            extract_composition(&MatrixSubspace::upper_triangular(4)).unwrap().parts(),
            &[1, 1, 1, 1]
        );
        assert_eq!(extract_composition(&MatrixSubspace::full(4)).unwrap().parts(), &[4]);
        assert_eq!(
            extract_composition(&MatrixSubspace::hopf_base(3)),
            Err(LieError::NotParabolic)
        );
    }

    #[test]
    fn hopf_small() {
        let r = hopf_closure_report(2).unwrap();
        assert_eq!(r.x0.dim(), 3);
        assert!(r.x0_is_stabilizer);
        assert_eq!(r.escapes, vec![(2, true)]);
    }
}
