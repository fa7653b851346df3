//! Pointwise Hermitian geometry on charts of ℂⁿ.
//!
//! Sign convention: `Δu = −2[Pu + Ru]`, so on the Euclidean chart
//! `Δ = −2 Σ ∂²/∂z_a∂z̄_a = −½ Δ_{ℝ^{2n}}`.

mod chart;
mod curvature;
mod defining;
mod realpoly;
pub mod schema;

pub use chart::{
    ball_metric, derive, fd_metric_jet, hopf_metric, BallFactor, CMat, Conformal, ConformalFactor, Derived,
    Euclidean, FdChart, HopfFactor, KahlerBall, MetricChart, MetricJet, PolyFactor, FD_STEP,
};
pub use curvature::{
    christoffel, domega_residual, hodge_condition_residual, laplacian_apply, levi_big_k2, levi_k1, levi_k2,
    scalar_w, scalar_w_direct, scalar_w_torsion, torsion, torsion_trace, ScalarJet, HERM_TOL, TOL_GRAD,
};
pub use defining::{DefiningFunction, PolyFamily, PsiJet, RealJet, Rescaled};
pub use realpoly::RealPoly;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("metric is singular or not positive definite")]
    SingularMetric,
    #[error("metric is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("derivatives are not available at this point")]
    DerivativeUnavailable,
    #[error("point is not on the boundary (psi = {0:e})")]
    NotOnBoundary(f64),
    #[error("spatial gradient of the defining function vanishes")]
    ZeroGradient,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("W routes disagree: torsion {0}, direct {1}")]
    RouteMismatch(f64, f64),
    #[error("schema: {0}")]
    Schema(String),
}

/// Dimensional constants in complex dimension `n`.
///
/// | quantity | value |
/// |---|---|
/// | `Ω_n` | area of the unit sphere in ℝ^{2n}, `2πⁿ/(n−1)!` |
/// | `c_n` | `1/((n−1)Ω_n)`, `n ≥ 2` |
/// | `Δ` on the Euclidean chart | `−½ Δ_{ℝ^{2n}}` |
/// | `Σ ∂²/∂z_a∂z̄_a` | `¼ Δ_{ℝ^{2n}}` |
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionalConstants {
    pub n: usize,
    pub omega_n: f64,
    pub c_n: f64,
}

impl DimensionalConstants {
    pub fn new(n: usize) -> Self {
        let fact: f64 = (1..n).map(|k| k as f64).product();
        let omega_n = 2.0 * std::f64::consts::PI.powi(n as i32) / fact;
        let c_n = if n >= 2 { 1.0 / ((n - 1) as f64 * omega_n) } else { f64::NAN };
        DimensionalConstants { n, omega_n, c_n }
    }

    /// Factor converting the complex-convention Laplacian to the ℝ^{2n} one.
    pub const REAL_LAPLACIAN_FACTOR: f64 = -0.5;
}
