//! Chinese remaindering and rational reconstruction, used to lift kernel
//! vectors computed modulo several primes to primitive integer vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Combines residues `r_i mod m_i` (pairwise coprime moduli) into a residue
/// modulo the product.
pub fn crt(residues: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    let mut acc = BigInt::zero();
    let mut modulus = BigInt::one();
    for (r, m) in residues {
        // acc + modulus * t = r (mod m)
        let inv = mod_inverse(&(&modulus % m), m).expect("moduli must be coprime");
        let diff = (r - &acc).mod_floor(m);
        let t = (diff * inv).mod_floor(m);
        acc += &modulus * t;
        modulus *= m;
    }
    (acc.mod_floor(&modulus), modulus)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Finds `n/d` with `n = a d (mod m)`, `|n|, d <= sqrt(m/2)` via the half extended
/// Euclidean algorithm. Returns `None` when no such fraction exists.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if !n.gcd(&d).is_one() {
        return None;
    }
    Some((n, d))
}

/// Divides out the content and makes the first nonzero entry positive.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    v.iter().map(|x| x / &g * &sign).collect()
}

/// True when `u` and `v` span the same line.
pub fn projectively_equal(u: &[BigInt], v: &[BigInt]) -> bool {
    if u.len() != v.len() || u.iter().all(Zero::is_zero) || v.iter().all(Zero::is_zero) {
        return false;
    }
    // all 2x2 minors vanish
    (0..u.len()).all(|i| (i + 1..u.len()).all(|j| &u[i] * &v[j] == &u[j] * &v[i]))
}
