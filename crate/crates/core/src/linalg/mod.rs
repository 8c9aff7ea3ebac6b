//! Exact linear algebra over F_p and Z/p^k.

mod matrix;
mod subspace;
pub mod zpk;

pub use matrix::FpMatrix;
pub use subspace::{SpanBuilder, Subspace};
pub use zpk::{elementary_divisors, ElementaryDivisors, ZpkMatrix};
