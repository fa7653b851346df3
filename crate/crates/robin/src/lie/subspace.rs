use super::mat::{Qi, SquareMatrix};
use super::{Composition, LieError};
use num_traits::{One, Zero};

/// Complex-linear subspace of `M_n(ℂ)` with a Gaussian-rational basis, stored in
/// reduced row echelon form on row-major flattened coordinates. Equal subspaces
/// have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixSubspace {
    n: usize,
    /// `(pivot column, row)` sorted by pivot; each row has a 1 at its pivot and
    /// zeros at every other pivot column.
    rows: Vec<(usize, Vec<Qi>)>,
}

impl MatrixSubspace {
    pub fn empty(n: usize) -> Self {
        MatrixSubspace { n, rows: Vec::new() }
    }

    pub fn span<'a>(n: usize, mats: impl IntoIterator<Item = &'a SquareMatrix>) -> Result<Self, LieError> {
        let mut s = Self::empty(n);
        for m in mats {
            s.insert(m)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n * self.n
    }

    fn reduce(&self, mut v: Vec<Qi>) -> Vec<Qi> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
        v
    }

    fn check(&self, m: &SquareMatrix) -> Result<(), LieError> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(LieError::DimensionMismatch);
        }
        Ok(())
    }

    pub fn contains(&self, m: &SquareMatrix) -> Result<bool, LieError> {
        self.check(m)?;
        Ok(self.reduce(m.entries().to_vec()).iter().all(|x| x.is_zero()))
    }

    pub fn contains_all(&self, other: &MatrixSubspace) -> Result<bool, LieError> {
        for b in other.basis() {
            if !self.contains(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Adds `m` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, m: &SquareMatrix) -> Result<bool, LieError> {
        self.check(m)?;
        let mut v = self.reduce(m.entries().to_vec());
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = Qi::one() / v[p].clone();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        Ok(true)
    }

    /// Canonical basis (the echelon rows as matrices).
    pub fn basis(&self) -> Vec<SquareMatrix> {
        self.rows
            .iter()
            .map(|(_, r)| SquareMatrix::from_vec(self.n, self.n, r.clone()))
            .collect()
    }

    /// Upper-triangular matrices (the isotropy algebra of the standard flag).
    pub fn upper_triangular(n: usize) -> Self {
        Self::from_pattern(n, |i, j| i <= j)
    }

    /// Block upper-triangular matrices for a composition of `n`.
    pub fn parabolic(c: &Composition) -> Self {
        let block = c.block_index();
        Self::from_pattern(c.n(), |i, j| block[i] <= block[j])
    }

    /// Matrices with vanishing first column.
    pub fn hopf_base(n: usize) -> Self {
        Self::from_pattern(n, |_, j| j > 0)
    }

    /// `{x E_11} ⊕ (matrices supported off the first column)`.
    pub fn hopf_stabilizer(n: usize) -> Self {
        Self::from_pattern(n, |i, j| j > 0 || i == 0)
    }

    pub fn full(n: usize) -> Self {
        Self::from_pattern(n, |_, _| true)
    }

    /// Span of the units `E_ij` with `keep(i, j)`.
    pub fn from_pattern(n: usize, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if keep(i, j) {
                    let mut v = vec![Qi::zero(); n * n];
                    v[i * n + j] = Qi::one();
                    rows.push((i * n + j, v));
                }
            }
        }
        MatrixSubspace { n, rows }
    }
}
