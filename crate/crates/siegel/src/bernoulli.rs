//! Bernoulli numbers, Bernoulli polynomials, generalized Bernoulli numbers,
//! regular-prime tests, and the p-adic limits of weight/Bernoulli ratios.
//!
//! Conventions, fixed globally:
//!   B_1 = −1/2,  B_k(x) = Σ_j binom(k,j)·B_j·x^{k−j},
//!   B_{k,χ} = N^{k−1}·Σ_{a=1}^{N} χ(a)·B_k(a/N)   (N = conductor of χ),
//! and B_{k,χ} = B_k for the trivial character mod 1.
//!
//! Verification runs evaluate Bernoulli numbers at weights in the hundreds
//! (e.g. B_506 for p = 23), so all plain B_k are memoized in a process-wide
//! append-only cache behind a reader/writer lock.

use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chars::QuadCharacter;
use crate::exact::{self, big, rat, Rational};
use crate::{Error, Result};

static CACHE: LazyLock<RwLock<Vec<Rational>>> = LazyLock::new(|| RwLock::new(vec![rat(1)]));

/// Appends B_{len}, …, B_k to the cache using the defining recurrence
/// Σ_{j=0}^{k} binom(k+1, j)·B_j = 0, i.e. B_k = −(1/(k+1))·Σ_{j<k} binom(k+1,j)·B_j.
fn extend_cache(cache: &mut Vec<Rational>, k: usize) {
    while cache.len() <= k {
        let n = cache.len();
        if n % 2 == 1 && n > 1 {
            cache.push(Rational::zero());
            continue;
        }
        let mut sum = Rational::zero();
        let mut binom = BigInt::one(); // binom(n+1, j), starting at j = 0
        for (j, bj) in cache.iter().enumerate() {
            if !bj.is_zero() {
                sum += Rational::from(binom.clone()) * bj;
            }
            // binom(n+1, j+1) = binom(n+1, j)·(n+1−j)/(j+1), exact division.
            binom = binom * big((n + 1 - j) as i64) / big((j + 1) as i64);
        }
        cache.push(-sum / rat((n + 1) as i64));
    }
}

fn with_bernoulli<R>(k: usize, f: impl FnOnce(&[Rational]) -> R) -> R {
    {
        let cache = CACHE.read().expect("bernoulli cache poisoned");
        if cache.len() > k {
            return f(&cache);
        }
    }
    let mut cache = CACHE.write().expect("bernoulli cache poisoned");
    extend_cache(&mut cache, k);
    f(&cache)
}

/// B_k, with B_0 = 1, B_1 = −1/2, and B_k = 0 for odd k ≥ 3.
pub fn bernoulli_number(k: u64) -> Rational {
    with_bernoulli(k as usize, |b| b[k as usize].clone())
}

/// B_k(x) = Σ_{j=0}^{k} binom(k,j)·B_j·x^{k−j}.
pub fn bernoulli_polynomial(k: u64, x: &Rational) -> Rational {
    let k = k as usize;
    with_bernoulli(k, |b| {
        let mut powers = Vec::with_capacity(k + 1);
        powers.push(Rational::one());
        for _ in 0..k {
            powers.push(powers.last().unwrap() * x);
        }
        let mut sum = Rational::zero();
        let mut binom = BigInt::one(); // binom(k, j)
        for (j, bj) in b.iter().enumerate().take(k + 1) {
            if !bj.is_zero() {
                sum += Rational::from(binom.clone()) * bj * &powers[k - j];
            }
            if j < k {
                binom = binom * big((k - j) as i64) / big((j + 1) as i64);
            }
        }
        sum
    })
}

/// B_{k,χ} = N^{k−1}·Σ_{a=1}^{N} χ(a)·B_k(a/N); reduces to B_k for the
/// trivial character mod 1. Vanishes whenever the parities of χ and k
/// disagree (χ(−1) ≠ (−1)^k) with the lone exception B_{1,𝟏} = −1/2.
pub fn generalized_bernoulli(k: u64, chi: &QuadCharacter) -> Rational {
    if chi.is_trivial() {
        return bernoulli_number(k);
    }
    let n = chi.conductor();
    let mut sum = Rational::zero();
    for a in 1..=n {
        let v = chi.eval(a as i64);
        if v != 0 {
            let x = exact::frac(a as i64, n as i64);
            sum += rat(v as i64) * bernoulli_polynomial(k, &x);
        }
    }
    exact::pow_i(&rat(n as i64), k as i64 - 1) * sum
}

/// True iff p divides no numerator of B_2, B_4, …, B_{p−3}. Stops at the
/// first irregular index, so irregular primes with an early witness (such
/// as 691 | numerator(B_12)) remain cheap.
pub fn is_regular_prime(p: u64) -> Result<bool> {
    exact::require_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidArgument("regularity is defined for odd primes".into()));
    }
    let pb = big(p as i64);
    for k in (2..=p.saturating_sub(3)).step_by(2) {
        if (bernoulli_number(k).numer() % &pb).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All even indices k in [2, p−3] with p | numerator(B_k); empty iff p is
/// regular.
pub fn irregular_indices(p: u64) -> Result<Vec<u64>> {
    exact::require_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidArgument("regularity is defined for odd primes".into()));
    }
    let pb = big(p as i64);
    Ok((2..=p.saturating_sub(3))
        .step_by(2)
        .filter(|&k| (bernoulli_number(k).numer() % &pb).is_zero())
        .collect())
}

/// The stage weight k_j(m) = k + ((p−1)/2^j)·p^m.
pub(crate) fn stage_weight(k: u64, j: u8, p: u64, m: u32) -> Result<u64> {
    if j > 1 {
        return Err(Error::InvalidArgument(format!("j must be 0 or 1, got {j}")));
    }
    exact::require_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidArgument("stage weights require an odd prime".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("precision m must be positive".into()));
    }
    let step = ((p - 1) >> j)
        .checked_mul(p.checked_pow(m).ok_or_else(|| {
            Error::InvalidArgument(format!("p^m overflows: p={p}, m={m}"))
        })?)
        .ok_or_else(|| Error::InvalidArgument(format!("stage weight overflows: p={p}, m={m}")))?;
    Ok(k + step)
}

/// The p-adic limit of k_j(m)/B_{k_j(m)} as m → ∞:
///
///   j = 0:  k / ((1 − p^{k−1})·B_k)
///   j = 1:  k / B_{k,χ_p}
///
/// Requires k even for j = 0, k ≡ (p−1)/2 mod 2 for j = 1, and p > 2k+1.
/// As an internal consistency check the finite-stage ratio at weight
/// k_j(precision_m) is computed and must agree with the limit mod
/// p^precision_m; disagreement signals an implementation bug and is
/// reported as an internal error.
pub fn limit_ratio_k_over_bk(k: u64, j: u8, p: u64, precision_m: u32) -> Result<Rational> {
    if j == 0 && k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("j=0 requires even k, got k={k}")));
    }
    if j == 1 && k % 2 != ((p - 1) / 2) % 2 {
        return Err(Error::InvalidArgument(format!(
            "j=1 requires k ≡ (p−1)/2 mod 2: k={k}, (p−1)/2={}",
            (p - 1) / 2
        )));
    }
    if p <= 2 * k + 1 {
        return Err(Error::InvalidArgument(format!("requires p > 2k+1: p={p}, k={k}")));
    }
    let limit = if j == 0 {
        let denom = (rat(1) - exact::pow_i(&rat(p as i64), k as i64 - 1)) * bernoulli_number(k);
        rat(k as i64) / denom
    } else {
        rat(k as i64) / generalized_bernoulli(k, &QuadCharacter::chi_p(p)?)
    };
    let w = stage_weight(k, j, p, precision_m)?;
    let stage = rat(w as i64) / bernoulli_number(w);
    if !exact::congruent(&stage, &limit, p, precision_m as i64) {
        return Err(Error::Inconsistent(format!(
            "stage ratio k_j(m)/B at weight {w} does not match the closed-form limit mod {p}^{precision_m}"
        )));
    }
    Ok(limit)
}

/// Finite-precision nonvanishing check for the auxiliary Bernoulli ratios:
/// with n' = max(n, 4k), verifies that for every i with k < i ≤ ⌊n'/2⌋ and
/// i ≢ k mod (p−1)/2, the ratio B_{2k_j(m)−2i}/(2k_j(m)−2i) is a p-adic
/// unit at stage m. Returns a finite-precision answer, never a proof.
pub fn assumption_nv_check(k: u64, j: u8, p: u64, n: u32, precision_m: u32) -> Result<bool> {
    let w = stage_weight(k, j, p, precision_m)?;
    let n_prime = std::cmp::max(n as u64, 4 * k);
    let half_period = (p - 1) / 2;
    for i in (k + 1)..=(n_prime / 2) {
        if (i % half_period) == (k % half_period) {
            continue;
        }
        let idx = 2 * w - 2 * i;
        let ratio = bernoulli_number(idx) / rat(idx as i64);
        if exact::vp(&ratio, p) != exact::Valuation::Finite(0) {
            return Ok(false);
        }
    }
    Ok(true)
}
