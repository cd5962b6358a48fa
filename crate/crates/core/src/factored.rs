//! Positive integers kept in factored form, plus the small amount of
//! elementary number theory the spectra need.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// A positive integer as a map from prime to positive exponent.
///
/// The empty map is 1. Ordering compares the represented integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factored {
    factors: BTreeMap<u64, u64>,
}

impl Factored {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: u64, exponent: u64) -> Self {
        let mut factors = BTreeMap::new();
        if exponent > 0 {
            factors.insert(p, exponent);
        }
        Self { factors }
    }

    /// Builds from a map, dropping zero exponents. Keys are trusted to be prime.
    pub fn from_factors(map: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut out = Self::one();
        for (p, k) in map {
            out.mul_prime_power(p, k);
        }
        out
    }

    /// Factors `n` by trial division. Panics on `n == 0`.
    pub fn of_u64(n: u64) -> Self {
        assert!(n > 0, "cannot factor zero");
        Self::from_factors(factorize(n))
    }

    pub fn factors(&self) -> &BTreeMap<u64, u64> {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The exponent of `p` in this number.
    pub fn valuation(&self, p: u64) -> u64 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn mul_prime_power(&mut self, p: u64, exponent: u64) {
        if exponent > 0 {
            *self.factors.entry(p).or_insert(0) += exponent;
        }
    }

    pub fn divides(&self, other: &Factored) -> bool {
        self.factors.iter().all(|(&p, &k)| other.valuation(p) >= k)
    }

    pub fn to_biguint(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (&p, &k)| acc * pow_big(p, k))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_biguint().to_u64()
    }

    /// Factors a positive big integer whose prime divisors are all in `primes`.
    pub fn from_biguint_over(n: &BigUint, primes: &[u64]) -> Option<Self> {
        if n.is_zero() {
            return None;
        }
        let mut rest = n.clone();
        let mut out = Self::one();
        for &p in primes {
            let pb = BigUint::from(p);
            let mut k = 0;
            loop {
                let (q, r) = rest.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                k += 1;
            }
            out.mul_prime_power(p, k);
        }
        rest.is_one().then_some(out)
    }
}

impl Mul for &Factored {
    type Output = Factored;

    fn mul(self, rhs: &Factored) -> Factored {
        let mut out = self.clone();
        for (&p, &k) in &rhs.factors {
            out.mul_prime_power(p, k);
        }
        out
    }
}

impl Mul for Factored {
    type Output = Factored;

    fn mul(self, rhs: Factored) -> Factored {
        &self * &rhs
    }
}

impl std::iter::Product for Factored {
    fn product<I: Iterator<Item = Factored>>(iter: I) -> Self {
        iter.fold(Factored::one(), |acc, x| &acc * &x)
    }
}

impl Ord for Factored {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        // single-prime comparisons are common and need no bignum
        if self.factors.len() <= 1 && other.factors.len() <= 1 {
            let a = self.factors.iter().next();
            let b = other.factors.iter().next();
            match (a, b) {
                (Some((pa, ka)), Some((pb, kb))) if pa == pb => return ka.cmp(kb),
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                _ => {}
            }
        }
        self.to_biguint().cmp(&other.to_biguint())
    }
}

impl PartialOrd for Factored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `2^3 * 3`, or `1` for the empty product.
impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (p, k)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, " * ")?;
            }
            if *k == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{k}")?;
            }
        }
        Ok(())
    }
}

pub fn pow_big(p: u64, k: u64) -> BigUint {
    num_traits::pow::pow(BigUint::from(p), k as usize)
}

pub fn pow_bigint(p: u64, k: u64) -> BigInt {
    BigInt::from(pow_big(p, k))
}

/// `p^k` if it fits in a `u64`.
pub fn checked_pow(p: u64, k: u64) -> Option<u64> {
    let k = u32::try_from(k).ok()?;
    p.checked_pow(k)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
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

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation_bigint(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut rest = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return Some(k);
        }
        rest = q;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn factorize_and_display() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        let f = Factored::of_u64(360);
        assert_eq!(f.to_string(), "2^3 * 3^2 * 5");
        assert_eq!(f.to_u64(), Some(360));
        assert_eq!(Factored::one().to_string(), "1");
        assert_eq!(Factored::of_u64(97).to_string(), "97");
    }

    #[test]
    fn ordering_is_numeric() {
        let mut v: Vec<Factored> = [12u64, 1, 9, 8, 6, 2].map(Factored::of_u64).to_vec();
        v.sort();
        let back: Vec<u64> = v.iter().map(|f| f.to_u64().unwrap()).collect();
        assert_eq!(back, vec![1, 2, 6, 8, 9, 12]);
        assert!(Factored::prime_power(2, 70) > Factored::prime_power(3, 44));
    }

    #[test]
    fn divisibility_and_product() {
        let a = Factored::of_u64(12);
        let b = Factored::of_u64(18);
        assert_eq!((&a * &b).to_u64(), Some(216));
        assert!(Factored::of_u64(6).divides(&a));
        assert!(!Factored::of_u64(8).divides(&a));
        assert_eq!(
            Factored::from_biguint_over(&BigUint::from(96u32), &[2, 3]),
            Some(Factored::of_u64(96))
        );
        assert_eq!(
            Factored::from_biguint_over(&BigUint::from(10u32), &[2]),
            None
        );
    }
}
