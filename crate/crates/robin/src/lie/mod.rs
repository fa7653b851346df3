//! Exact matrix Lie algebra: brackets, subalgebra closure over a base algebra,
//! flag-space coordinates, and spanning-rank checks.

mod closure;
mod expm;
mod flag;
mod mat;
mod spanning;
mod subspace;

pub use closure::{
    extract_composition, group_generators, hopf_closure_report, parabolic_closure, HopfReport,
};
pub use expm::expm;
pub use flag::{
    conjugated_tangent, flag_point_numeric, flag_point_of_group_element, flag_tangent,
    tangent_dim,
};
pub use mat::{qi, qi_rat, qi_to_c64, rank, Mat, Qi, SquareMatrix};
pub use spanning::{
    flag_spanning_rank, grassmann_spanning_rank, random_upper_triangular, FlagSpanning,
    GrassmannSpanning,
};
pub use subspace::MatrixSubspace;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("leading principal minor of order {0} is singular")]
    SingularLeadingMinor(usize),
    #[error("subspace is not block upper triangular for any composition")]
    NotParabolic,
    #[error("lower-left block of X vanishes")]
    StarViolation,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Ordered composition `(m_1, …, m_μ)` of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self, LieError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(LieError::Invalid("composition parts must be positive".into()));
        }
        Ok(Composition { parts })
    }

    /// From the subdiagonal pattern: `joined[i]` glues rows `i` and `i + 1`
    /// into one block.
    pub fn from_joins(joined: &[bool]) -> Self {
        let mut parts = vec![1];
        for &j in joined {
            if j {
                *parts.last_mut().unwrap() += 1;
            } else {
                parts.push(1);
            }
        }
        Composition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Block number of each row index.
    pub fn block_index(&self) -> Vec<usize> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(b, &m)| std::iter::repeat_n(b, m))
            .collect()
    }

    /// Dimension of the generalized-flag fibre `Π F_{m_j}`.
    pub fn fibre_dim(&self) -> usize {
        self.parts.iter().map(|m| m * (m - 1) / 2).sum()
    }

    /// All `2^{n-1}` compositions of `n`.
    pub fn all(n: usize) -> Vec<Self> {
        (0..1usize << (n - 1))
            .map(|bits| {
                let joins: Vec<bool> = (0..n - 1).map(|i| bits >> i & 1 == 1).collect();
                Self::from_joins(&joins)
            })
            .collect()
    }
}
