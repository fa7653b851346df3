//! Robin constants and variation formulas for domains in ℂⁿ, with exact
//! torus-foliation and parabolic-subalgebra computations.

pub mod cli;
pub mod geometry;
pub mod green;
pub mod lie;
pub mod poly;
pub mod torus;
pub mod selftest;
pub mod variation;
