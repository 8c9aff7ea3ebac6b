use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// The variants are grouped so that callers (the CLI, the C ABI) can map them
/// onto a small set of exit codes with [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = 2 is not supported: the construction needs an odd prime")]
    EvenPrime,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("gamma is not surjective: rank {rank} < dim V = {dim_v}")]
    NotSurjective { rank: usize, dim_v: usize },
    #[error("gamma has a nontrivial radical of dimension {0}, so Z(G) != [G,G]")]
    NontrivialRadical(usize),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate pairing: rank {rank} < {size}")]
    DegeneratePairing { rank: usize, size: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("guard exceeded: {what} needs {required} work units, guard allows {allowed}")]
    GuardExceeded {
        what: String,
        required: u128,
        allowed: u64,
    },
    #[error("deadline exceeded while computing {0}")]
    Timeout(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code: 1 for bad input, 3 for resource guards, 4 otherwise.
    /// Exit code 2 is reserved for verification failures, which are not errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GuardExceeded { .. } | Error::Timeout(_) => 3,
            Error::Internal(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
