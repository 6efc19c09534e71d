//! Exact rational scalars and p-adic valuations.
//!
//! Every quantity downstream — Fourier coefficients, Bernoulli numbers,
//! local densities, masses — is an element of `Q` represented by
//! [`Rational`] in lowest terms. Congruences mod p^m reduce to valuation
//! comparisons, so this module provides `v_p` on integers and rationals
//! together with a small set of constructors and (de)serialization helpers
//! shared by the file formats ("a/b", or "a" when the denominator is 1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// The additive p-adic valuation, normalized with v_p(p) = 1.
///
/// `Infinite` occurs only for the zero element; keeping it a distinct
/// variant (rather than a large sentinel integer) makes minima over
/// coefficient sets exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// True iff the valuation is at least `m` (every valuation bound is
    /// satisfied by the zero element).
    pub fn at_least(self, m: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= m,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// `BigInt` from a machine integer.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(big(n))
}

/// Rational n/d from machine integers. Panics if d = 0.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(big(n), big(d))
}

/// Exact power with integer (possibly negative) exponent.
///
/// Panics on 0^e with e < 0.
pub fn pow_i(base: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut sq = if e > 0 { base.clone() } else { base.recip() };
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &sq;
        }
        n >>= 1;
        if n > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// v_p of a nonzero integer, `Infinite` for 0.
pub fn vp_int(x: &BigInt, p: u64) -> Valuation {
    debug_assert!(p >= 2);
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = big(p as i64);
    let mut v = 0i64;
    let mut n = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        v += 1;
        n = q;
    }
}

/// v_p of a rational: v_p(num) − v_p(den), `Infinite` for 0.
pub fn vp(x: &Rational, p: u64) -> Valuation {
    match (vp_int(x.numer(), p), vp_int(x.denom(), p)) {
        (Valuation::Infinite, _) => Valuation::Infinite,
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => unreachable!("denominator is never zero"),
    }
}

/// True iff x ≡ y mod p^m, i.e. v_p(x − y) ≥ m.
pub fn congruent(x: &Rational, y: &Rational, p: u64, m: i64) -> bool {
    vp(&(x - y), p).at_least(m)
}

/// Canonical string form: "a/b", or "a" when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse "a/b" or "a" (the inverse of [`format_rational`]).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::InvalidArgument(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
    }
}

/// Deterministic Miller–Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    // This base set is a known deterministic witness set for n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Validates that p is prime, as an argument check.
pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_basics() {
        assert_eq!(vp(&rat(7), 7), Valuation::Finite(1));
        assert_eq!(vp(&rat(0), 7), Valuation::Infinite);
        assert_eq!(vp(&frac(49, 3), 7), Valuation::Finite(2));
        assert_eq!(vp(&frac(3, 49), 7), Valuation::Finite(-2));
        assert_eq!(vp(&rat(-392), 7), Valuation::Finite(2));
    }

    #[test]
    fn valuation_ordering() {
        assert!(Valuation::Finite(5) < Valuation::Infinite);
        assert!(Valuation::Finite(-3) < Valuation::Finite(0));
        assert_eq!(
            [Valuation::Infinite, Valuation::Finite(2)].iter().min(),
            Some(&Valuation::Finite(2))
        );
    }

    #[test]
    fn congruences() {
        assert!(congruent(&rat(1), &rat(1), 7, 5));
        assert!(congruent(&rat(1 + 343), &rat(1), 7, 3));
        assert!(!congruent(&frac(1, 7), &frac(8, 7), 7, 1));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&frac(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
        for s in ["-3/2", "5", "0", "1/3"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_i(&frac(2, 3), 3), frac(8, 27));
        assert_eq!(pow_i(&frac(2, 3), -2), frac(9, 4));
        assert_eq!(pow_i(&rat(17), 0), rat(1));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (2..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(1));
        assert!(!is_prime((1u64 << 32) + 1));
    }
}
