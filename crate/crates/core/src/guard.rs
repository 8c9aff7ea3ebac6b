//! Resource guard shared by every enumerating routine.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Default budget in work units (enumerated elements or table cells).
pub const DEFAULT_BUDGET: u64 = 1 << 28;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const GUARD_ENV: &str = "UNRAMIFIED_GUARD";

/// A budget on the number of elements an algorithm may enumerate or store,
/// plus an optional wall-clock deadline for long eliminations.
#[derive(Debug, Clone, Copy)]
pub struct Guard {
    pub budget: u64,
    pub deadline: Option<Instant>,
}

impl Default for Guard {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            deadline: None,
        }
    }
}

impl Guard {
    pub fn new(budget: u64) -> Self {
        Self {
            budget,
            deadline: None,
        }
    }

    /// Default guard, honouring `UNRAMIFIED_GUARD` when it parses.
    pub fn from_env() -> Self {
        let budget = std::env::var(GUARD_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self::new(budget)
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.deadline = Some(Instant::now() + t);
        self
    }

    pub fn check(&self, what: &str, required: u128) -> Result<()> {
        if required > self.budget as u128 {
            Err(Error::GuardExceeded {
                what: what.to_string(),
                required,
                allowed: self.budget,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_time(&self, what: &str) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Timeout(what.to_string())),
            _ => Ok(()),
        }
    }
}

/// `base^exp` as u128, saturating.
pub fn pow_u128(base: u64, exp: u32) -> u128 {
    let mut r: u128 = 1;
    for _ in 0..exp {
        r = r.saturating_mul(base as u128);
    }
    r
}
