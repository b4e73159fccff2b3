//! Finite étale Λ-rings over Q through their description as finite sets
//! with an action of the multiplicative monoid `Z/r`.

pub mod algebra;
pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod factorization;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod monoid;
pub mod orders;
pub mod poly;
pub mod scalar;
pub mod selftest;

pub use error::{Error, Result};
pub use scalar::{Int, Rat};
