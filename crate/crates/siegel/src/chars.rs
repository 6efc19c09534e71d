//! Kronecker symbols and real quadratic characters.
//!
//! The characters appearing here are all of the form d ↦ (D/d) (Kronecker
//! symbol) for a fundamental discriminant D, plus the trivial character
//! mod 1. They enter in two roles: as χ_p, the quadratic character mod an
//! odd prime p, and as η_T, the primitive character attached to the
//! discriminant (−1)^{n/2}·det(2T) of an even-rank matrix.

use crate::{Error, Result};

/// Kronecker symbol (a/n), extended to all integers n.
///
/// (a/0) is 1 for a = ±1 and 0 otherwise; (a/−1) is the sign of a; the
/// symbol is completely multiplicative in n.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut acc = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            acc = -acc;
        }
    }
    // (a/2) factors: 0 for even a, else depends on a mod 8.
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => acc = -acc,
            _ => return 0,
        }
    }
    if n == 1 {
        return acc;
    }
    // Jacobi symbol for odd n > 1 by quadratic reciprocity.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                acc = -acc;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        a %= n;
    }
    if n == 1 {
        acc
    } else {
        0
    }
}

/// Splits a discriminant (an integer ≡ 0 or 1 mod 4, nonzero) as D·f² with
/// D fundamental. Returns (D, f). For perfect-square inputs D = 1 and the
/// associated character is trivial.
pub fn fundamental_discriminant(disc: i64) -> Result<(i64, u64)> {
    if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidArgument(format!(
            "{disc} is not a discriminant (must be nonzero and 0 or 1 mod 4)"
        )));
    }
    // Squarefree part (with sign), by trial division.
    let mut m = disc.unsigned_abs();
    let mut core = 1i64;
    let mut square = 1u64;
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            let mut e = 0u32;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            square *= q.pow(e / 2);
            if e % 2 == 1 {
                core *= q as i64;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    core *= m as i64;
    if disc < 0 {
        core = -core;
    }
    // disc = core · square², core squarefree.
    let (d, f) = if core.rem_euclid(4) == 1 {
        (core, square)
    } else {
        // core ≡ 2, 3 mod 4: the fundamental discriminant is 4·core, which
        // requires square to be even (guaranteed since disc ≡ 0, 1 mod 4).
        debug_assert_eq!(square % 2, 0);
        (4 * core, square / 2)
    };
    debug_assert_eq!(d * (f as i64) * (f as i64), disc);
    Ok((d, f))
}

/// A real character: either trivial mod 1 or d ↦ kronecker(D, d) for a
/// fundamental discriminant D (conductor |D|).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadCharacter {
    disc: i64,
}

impl QuadCharacter {
    /// The trivial character mod 1 (identically 1).
    pub fn trivial() -> Self {
        QuadCharacter { disc: 1 }
    }

    /// Character of a fundamental discriminant. Fails if `d` is not
    /// fundamental (d = 1 is allowed and trivial).
    pub fn from_fundamental(d: i64) -> Result<Self> {
        if d == 1 {
            return Ok(Self::trivial());
        }
        let (d0, f) = fundamental_discriminant(d)?;
        if f != 1 {
            return Err(Error::InvalidArgument(format!("{d} is not fundamental: {d} = {d0}·{f}²")));
        }
        Ok(QuadCharacter { disc: d })
    }

    /// χ_p, the unique nontrivial quadratic character mod an odd prime p:
    /// the Kronecker character of (−1)^{(p−1)/2}·p.
    pub fn chi_p(p: u64) -> Result<Self> {
        crate::exact::require_prime(p)?;
        if p == 2 {
            return Err(Error::InvalidArgument("chi_p requires an odd prime".into()));
        }
        let p = p as i64;
        let disc = if p % 4 == 1 { p } else { -p };
        Ok(QuadCharacter { disc })
    }

    /// The attached fundamental discriminant (1 for the trivial character).
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn conductor(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.disc == 1
    }

    /// χ(−1) = −1 exactly for negative discriminants.
    pub fn is_odd(&self) -> bool {
        self.disc < 0
    }

    /// Evaluate at d (0 on integers sharing a factor with the conductor).
    pub fn eval(&self, d: i64) -> i32 {
        kronecker(self.disc, d)
    }
}

impl std::fmt::Display for QuadCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            write!(f, "trivial")
        } else {
            write!(f, "kronecker({})", self.disc)
        }
    }
}
