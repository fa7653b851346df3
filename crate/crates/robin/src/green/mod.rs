//! c-Green functions and Robin constants for the Euclidean metric on
//! gridded domains in ℂ¹ and ℂ².
//!
//! The unknown is the regular part `u = g − Q₀`, discretized with cut-cell
//! stencils and solved by preconditioned conjugate gradients. `λ = u(z₀)`.

mod grid;
mod robin;
mod solver;

pub use grid::{Grid, GridDomain, EXTERIOR, INTERIOR, PAD};
pub use robin::{
    complex_hessian, flat_directions, hessian_flat_directions, robin_function, FlatDirection, RobinFunctionField,
    HESSIAN_STEP_FRACTION,
};
pub use solver::{grad_q0, q0, solve_green, CField, GreenField, GreenSystem, BAND, REL_TOL, THETA_MIN};

use crate::geometry::GeometryError;

#[derive(Debug, thiserror::Error)]
pub enum GreenError {
    #[error("pole is outside the domain or within 3 cells of its boundary")]
    PoleTooCloseToBoundary,
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:e}")]
    NonconvergentSolver { iterations: usize, residual: f64 },
    #[error("c must be nonnegative")]
    NegativeC,
    #[error("finite-difference stencil leaves the sampled region")]
    StencilOutOfRange,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Robin constant of the ball `‖z‖ < R` in ℂⁿ (c ≡ 0) with pole at distance
/// `r` from the centre.
pub fn ball_lambda(n: usize, radius: f64, r: f64) -> f64 {
    let s = radius * radius - r * r;
    if n == 1 {
        (s / radius).ln()
    } else {
        -radius.powi(2 * n as i32 - 2) / s.powi(2 * n as i32 - 2)
    }
}

/// Green function of the ball centred at 0, by the image-charge formula.
pub fn ball_green(n: usize, radius: f64, z: &[f64], pole: &[f64]) -> f64 {
    let w2: f64 = pole.iter().map(|v| v * v).sum();
    let q = q0(n, z, pole);
    if w2 == 0.0 {
        return q - if n == 1 { -radius.ln() } else { radius.powi(2 - 2 * n as i32) };
    }
    let k = radius * radius / w2;
    let image: Vec<f64> = pole.iter().map(|v| v * k).collect();
    let scale = radius / w2.sqrt();
    if n == 1 {
        q - q0(1, z, &image) - scale.ln()
    } else {
        q - scale.powi(2 * n as i32 - 2) * q0(n, z, &image)
    }
}
