//! Exact scalar fields: prime fields `F_p` and the rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

/// The Mersenne prime 2^31 - 1, used as the default modulus.
pub const P31: u64 = (1 << 31) - 1;
/// The Mersenne prime 2^61 - 1, used for cross-checks and rational reconstruction.
pub const P61: u64 = (1 << 61) - 1;

/// A field whose elements are plain values and whose operations carry the context.
///
/// Keeping the modulus in the field object (rather than in every element) lets
/// prime-field elements stay `u64` in the evaluation hot loop.
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Zero for fields of characteristic zero.
    fn characteristic(&self) -> u64;
    /// Whether `a` is a canonical element of this field.
    fn contains(&self, a: &Self::Elem) -> bool;
    /// Draws a random element (uniform for prime fields, from an integer box for rationals).
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
}

/// `Z/pZ` for a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
    #[serde(skip)]
    mersenne: u32,
}

impl PrimeField {
    /// Builds the field, checking primality by trial division against small
    /// factors and a deterministic Miller-Rabin test.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(2..(1 << 63)).contains(&p) || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let mersenne = if (p + 1).is_power_of_two() { (p + 1).trailing_zeros() } else { 0 };
        Ok(PrimeField { p, mersenne })
    }

    pub fn p31() -> Self {
        PrimeField { p: P31, mersenne: 31 }
    }

    pub fn p61() -> Self {
        PrimeField { p: P61, mersenne: 61 }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline(always)]
    fn reduce(&self, x: u128) -> u64 {
        if self.mersenne != 0 {
            let k = self.mersenne;
            let p = self.p as u128;
            let mut s = (x & p) + (x >> k);
            s = (s & p) + (s >> k);
            if s >= p {
                s -= p;
            }
            s as u64
        } else {
            (x % self.p as u128) as u64
        }
    }

    #[inline(always)]
    pub fn mul_u64(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add_u64(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_u64(acc, base);
            }
            base = self.mul_u64(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Maps a residue to the symmetric range `(-p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    #[inline(always)]
    fn zero(&self) -> u64 {
        0
    }
    #[inline(always)]
    fn one(&self) -> u64 {
        1
    }
    #[inline(always)]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.add_u64(*a, *b)
    }
    #[inline(always)]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline(always)]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mul_u64(*a, *b)
    }
    #[inline(always)]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    #[inline(always)]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_i64(&self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.p as i128);
        r as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = ((v % &m) + &m) % &m;
        r.to_string().parse().expect("residue fits in u64")
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn contains(&self, a: &u64) -> bool {
        *a < self.p
    }
    fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// The field of rationals. Random samples are integers in `[-bound, bound]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rationals {
    pub sample_bound: i64,
}

impl Default for Rationals {
    fn default() -> Self {
        Rationals { sample_bound: 99 }
    }
}

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn contains(&self, a: &BigRational) -> bool {
        // BigRational keeps itself reduced with a positive denominator.
        a.denom().is_positive()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> BigRational {
        self.from_i64(rng.gen_range(-self.sample_bound..=self.sample_bound))
    }
}

/// `Z/pZ x Z/qZ` for two distinct primes: one pass of an exact computation
/// that only adds, multiplies and tests for zero yields its value modulo both.
///
/// This is a ring, not a field. `inv` fails on every element with a zero
/// component and `is_zero` means zero in both components, so elimination
/// routines must not be run over it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimePair(pub PrimeField, pub PrimeField);

impl PrimePair {
    pub fn new(p: u64, q: u64) -> Result<Self, FieldError> {
        if p == q {
            return Err(FieldError::NotPrime(q));
        }
        Ok(PrimePair(PrimeField::new(p)?, PrimeField::new(q)?))
    }

    pub fn moduli(&self) -> [u64; 2] {
        [self.0.modulus(), self.1.modulus()]
    }
}

impl Field for PrimePair {
    type Elem = [u64; 2];

    #[inline(always)]
    fn zero(&self) -> [u64; 2] {
        [0, 0]
    }
    #[inline(always)]
    fn one(&self) -> [u64; 2] {
        [1, 1]
    }
    #[inline(always)]
    fn add(&self, a: &[u64; 2], b: &[u64; 2]) -> [u64; 2] {
        [self.0.add_u64(a[0], b[0]), self.1.add_u64(a[1], b[1])]
    }
    #[inline(always)]
    fn sub(&self, a: &[u64; 2], b: &[u64; 2]) -> [u64; 2] {
        [self.0.sub(&a[0], &b[0]), self.1.sub(&a[1], &b[1])]
    }
    #[inline(always)]
    fn mul(&self, a: &[u64; 2], b: &[u64; 2]) -> [u64; 2] {
        [self.0.mul_u64(a[0], b[0]), self.1.mul_u64(a[1], b[1])]
    }
    #[inline(always)]
    fn neg(&self, a: &[u64; 2]) -> [u64; 2] {
        [self.0.neg(&a[0]), self.1.neg(&a[1])]
    }
    fn inv(&self, a: &[u64; 2]) -> Option<[u64; 2]> {
        Some([self.0.inv(&a[0])?, self.1.inv(&a[1])?])
    }
    #[inline(always)]
    fn is_zero(&self, a: &[u64; 2]) -> bool {
        a[0] == 0 && a[1] == 0
    }
    fn from_i64(&self, v: i64) -> [u64; 2] {
        [self.0.from_i64(v), self.1.from_i64(v)]
    }
    fn from_bigint(&self, v: &BigInt) -> [u64; 2] {
        [self.0.from_bigint(v), self.1.from_bigint(v)]
    }
    /// The smaller prime: the one that bounds which degrees are safe.
    fn characteristic(&self) -> u64 {
        self.0.modulus().min(self.1.modulus())
    }
    fn contains(&self, a: &[u64; 2]) -> bool {
        self.0.contains(&a[0]) && self.1.contains(&a[1])
    }
    fn sample(&self, rng: &mut dyn RngCore) -> [u64; 2] {
        [self.0.sample(rng), self.1.sample(rng)]
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("prime {p} must exceed degree {d}")]
    PrimeTooSmall { p: u64, d: usize },
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn mersenne_reduction_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for f in [PrimeField::p31(), PrimeField::p61()] {
            for _ in 0..10_000 {
                let a = f.sample(&mut rng);
                let b = f.sample(&mut rng);
                assert_eq!(f.mul(&a, &b), mul_mod(a, b, f.modulus()));
            }
            assert_eq!(f.mul(&(f.modulus() - 1), &(f.modulus() - 1)), 1);
        }
    }

    #[test]
    fn inverse_and_negation() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
            assert_eq!(f.add(&a, &f.neg(&a)), 0);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 100);
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(91).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(is_prime(P31) && is_prime(P61));
        assert!(!is_prime((1u64 << 61) + 1));
    }
}
