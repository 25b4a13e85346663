use serde::{Deserialize, Serialize};

use super::LinalgError;

/// The default modulus used throughout the crate.
pub const DEFAULT_PRIME: u32 = 10007;

/// The prime field GF(p) for a word-sized prime `p`.
///
/// Elements are plain `u32` values in `[0, p)`; all arithmetic goes through
/// this type so that callers never have to think about the modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Creates GF(p), checking primality by trial division.
    pub fn new(p: u32) -> Result<Self, LinalgError> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in GF({})", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Maps a signed integer (e.g. a binomial-type multiplicity or a sign) into the field.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u32 {
        self.reduce_i64(x)
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = LinalgError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let n = n as u64;
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The smallest prime strictly larger than `n`, if it fits in a `u32`.
pub fn next_prime(n: u32) -> Option<u32> {
    let mut c = n.checked_add(1)?;
    while !is_prime(c) {
        c = c.checked_add(1)?;
    }
    Some(c)
}
