//! Numerical verification toolkit for Brunn-Minkowski type inequalities
//! between unconditional convex bodies, under coordinate-wise and Firey
//! `p`-combinations and convex measures.

pub mod bodies;
pub mod certify;
pub mod verify;
pub mod error;
mod linalg;
pub mod means;
pub mod measures;

pub use error::{Error, Result};
pub use linalg::symmetric_eigenvalues;
