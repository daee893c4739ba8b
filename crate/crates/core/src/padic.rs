//! Number-theoretic primitives: valuations, Legendre's formula, modular
//! powers and inverses over prime-power moduli, sieving and totients.
//!
//! Primes and indices are plain `u64` (every prime in scope is far below
//! `10^5`); anything that grows with the precision exponent is a
//! [`BigUint`]. Index arithmetic is checked so nothing wraps silently.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime power `p^r`. `r = 0` is the trivial modulus 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    p: u64,
    r: u32,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.r)
    }
}

/// Exponent of the largest power of `p` dividing `n`.
pub fn nu(p: u64, n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("nu_p(0) is infinite".into()));
    }
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    Ok(nu_unchecked(p, n))
}

#[inline]
pub(crate) fn nu_unchecked(p: u64, mut n: u64) -> u32 {
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// `nu_p(n!)` by Legendre's formula, `sum_{i>=1} floor(n / p^i)`.
pub fn nu_factorial(p: u64, n: u64) -> u64 {
    assert!(p >= 2, "nu_factorial needs a prime, got {p}");
    let mut total = 0u64;
    let mut q = p;
    while q <= n {
        total += n / q;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    total
}

/// `a^e mod m` for `m >= 1`. In the trivial ring (`m = 1`) the result is 0.
pub fn mod_pow(a: &BigUint, e: &BigUint, m: &BigUint) -> BigUint {
    assert!(!m.is_zero(), "mod_pow modulus must be positive");
    a.modpow(e, m)
}

/// Inverse of `u` modulo `m`, in `[0, m)`.
///
/// The trivial ring `m = 1` has a single element, canonicalised to 0; it
/// still acts as the identity under multiplication there.
pub fn mod_inverse(u: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if m.is_one() {
        return Ok(BigUint::zero());
    }
    let modulus = BigInt::from_biguint(Sign::Plus, m.clone());
    let mut old_r = BigInt::from_biguint(Sign::Plus, u % m);
    let mut r = modulus.clone();
    let mut old_s = BigInt::one();
    let mut s = BigInt::zero();
    while !r.is_zero() {
        let (q, rem) = old_r.div_rem(&r);
        old_r = std::mem::replace(&mut r, rem);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(Error::NotInvertible {
            unit: u.to_string(),
            modulus: m.to_string(),
        });
    }
    let mut v = old_s.mod_floor(&modulus);
    if v.is_negative() {
        v += &modulus;
    }
    Ok(v.magnitude().clone())
}

/// `phi(p^r) = p^(r-1) (p - 1)`.
pub fn totient_prime_power(pp: PrimePower) -> Result<BigUint> {
    if pp.r == 0 {
        return Err(Error::Domain("totient of p^0 is not used; need r >= 1".into()));
    }
    Ok(BigUint::from(pp.p).pow(pp.r - 1) * (pp.p - 1))
}

/// All primes `<= n`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let len = usize::try_from(n).expect("sieve bound exceeds address space") + 1;
    let mut composite = vec![false; len];
    let mut primes = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
