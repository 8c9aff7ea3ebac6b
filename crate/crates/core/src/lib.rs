pub mod bar;
pub mod cochain;
pub mod error;
pub mod exterior;
pub mod fp;
pub mod group;
pub mod guard;
pub mod linalg;
pub mod obstruction;

pub use error::{Error, Result};
pub use fp::{FpScalar, PrimeField};
pub use guard::Guard;
