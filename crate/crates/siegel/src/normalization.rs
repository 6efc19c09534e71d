//! Sign and power-of-two normalization constants for the closed coefficient
//! formulas.
//!
//! The literature normalizes the degree-n Eisenstein coefficient formulas in
//! several inequivalent ways (choices of Gauss-sum sign, functional-equation
//! constant, and the splitting between the "Bernoulli" and "local" factors).
//! Rather than thread those choices through every call site, this module
//! pins them in one place. The values are forced by exactly computable
//! expansions: the degree-2 weight-4 series must equal the degree-2 theta
//! series of the E8 lattice coefficient by coefficient, and the degree-1
//! series must reproduce −(2k/B_k)·σ_{k−1}. Changing either constant breaks
//! those identities (and the test suites) immediately.

/// Prefactor of the archimedean/Bernoulli part of a nonsingular degree-n
/// coefficient, n even: (−1)^{n/2}·2^{n/2}.
pub fn bernoulli_part_prefactor(n: usize) -> i64 {
    debug_assert!(n % 2 == 0 && n > 0);
    let half = (n / 2) as u32;
    let sign = if half % 2 == 0 { 1 } else { -1 };
    sign * (1i64 << half)
}

/// Prefactor of the interpolated-limit coefficient at nome weight k:
/// (−1)^k·2^k. The remaining factor 2 from the two pole directions of the
/// completed zeta quotients is applied inside the limit evaluation itself.
pub fn limit_prefactor(k: u32) -> i64 {
    let sign = if k % 2 == 0 { 1 } else { -1 };
    sign * (1i64 << k)
}
