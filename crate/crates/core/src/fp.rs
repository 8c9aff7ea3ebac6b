//! Arithmetic in the prime field F_p for odd p.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime modulus. Construction rejects 2 and composites, so every
/// instance has 2 invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p > 65521 {
            return Err(Error::InvalidArgument(format!("prime {p} too large")));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "zero has no inverse in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// The element 1/2 = (p+1)/2.
    #[inline]
    pub fn half(self) -> u32 {
        (self.p + 1) / 2
    }

    /// Symmetric lift into (-p/2, p/2], used for printing.
    pub fn signed(self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A single element of F_p together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    field: PrimeField,
}

impl FpScalar {
    pub fn new(field: PrimeField, value: i64) -> Self {
        Self {
            value: field.reduce(value),
            field,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn half(field: PrimeField) -> Self {
        Self {
            value: field.half(),
            field,
        }
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| Self {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }
}

impl std::ops::Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Sub for FpScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.field, rhs.field);
        Self {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_two_and_composites() {
        assert_eq!(PrimeField::new(2), Err(Error::EvenPrime));
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(PrimeField::new(3).is_ok());
    }

    #[test]
    fn half_is_inverse_of_two() {
        for p in [3, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(f.mul(f.half(), 2), 1);
            assert_eq!(f.half(), (p + 1) / 2);
        }
    }

    #[test]
    fn inverses() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        let a = FpScalar::new(f, -1);
        assert_eq!(a.value(), 6);
        assert_eq!((a * a).value(), 1);
        assert_eq!(FpScalar::new(f, 0).inv(), None);
    }
}
