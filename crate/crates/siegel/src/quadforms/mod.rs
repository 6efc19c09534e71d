//! Half-integral symmetric matrices and positive definite quadratic forms.
//!
//! A half-integral matrix T of size n has t_ii ∈ Z and 2t_ij ∈ Z; we store
//! the doubled matrix 2T, which is integral, symmetric, and has even
//! diagonal. All invariants below (determinant, level, character,
//! representation numbers) are phrased in terms of 2T, matching the
//! det(2T) normalizations used throughout.
//!
//! For a positive definite even matrix G = 2S:
//!   level(S) = min { N ≥ 1 : N·G⁻¹ integral with even diagonal },
//!   χ_S(d) = sign(d)^{m/2} · ((−1)^{m/2} det G | |d|)  (Kronecker symbol),
//!   A(S, T) = #{ X ∈ Z^{m×n} : XᵀSX = T },  ε(S) = A(S, S).

mod classes;
mod genus;
mod reduce;
mod repr;

pub use classes::{enumerate_classes, has_improper_automorph, proper_class_count};
pub(crate) use genus::prime_factors;
pub use genus::{genus_partition, hasse_invariant, hilbert_symbol, mass, Genus, GenusClass};
pub use reduce::reduce;
pub use repr::{epsilon, repr_count};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chars::kronecker;
use crate::exact::{big, Rational};
use crate::{linalg, Error, Result};

/// Symmetric matrix with even diagonal, stored as the doubled matrix 2T of a
/// half-integral T (row-major `entries`, size `rank`²).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GramRepr", into = "GramRepr")]
pub struct Gram {
    pub rank: usize,
    pub entries: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct GramRepr {
    rank: usize,
    twice_gram: Vec<Vec<i64>>,
}

impl From<Gram> for GramRepr {
    fn from(g: Gram) -> Self {
        let rows = (0..g.rank).map(|i| g.entries[i * g.rank..(i + 1) * g.rank].to_vec()).collect();
        GramRepr { rank: g.rank, twice_gram: rows }
    }
}

impl TryFrom<GramRepr> for Gram {
    type Error = Error;
    fn try_from(r: GramRepr) -> Result<Self> {
        if r.twice_gram.len() != r.rank || r.twice_gram.iter().any(|row| row.len() != r.rank) {
            return Err(Error::InvalidArgument("twice_gram must be rank × rank".into()));
        }
        Gram::from_twice(r.rank, r.twice_gram.into_iter().flatten().collect())
    }
}

impl Ord for Gram {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, self.trace2(), &self.entries).cmp(&(other.rank, other.trace2(), &other.entries))
    }
}

impl PartialOrd for Gram {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Gram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rank {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", &self.entries[i * self.rank..(i + 1) * self.rank])?;
        }
        write!(f, "]")
    }
}

impl Gram {
    /// Builds from the doubled matrix entries (row-major), validating
    /// symmetry and even diagonal.
    pub fn from_twice(rank: usize, entries: Vec<i64>) -> Result<Gram> {
        if entries.len() != rank * rank {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for rank {rank}, got {}",
                rank * rank,
                entries.len()
            )));
        }
        for i in 0..rank {
            if entries[i * rank + i] % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "doubled matrix must have even diagonal, entry ({i},{i}) is {}",
                    entries[i * rank + i]
                )));
            }
            for j in 0..i {
                if entries[i * rank + j] != entries[j * rank + i] {
                    return Err(Error::InvalidArgument("matrix must be symmetric".into()));
                }
            }
        }
        Ok(Gram { rank, entries })
    }

    /// The rank-0 (empty) matrix.
    pub fn empty() -> Gram {
        Gram { rank: 0, entries: Vec::new() }
    }

    /// diag(t_1, …, t_r) as a half-integral matrix (stored doubled).
    pub fn diag_t(ts: &[i64]) -> Gram {
        let n = ts.len();
        let mut entries = vec![0i64; n * n];
        for (i, &t) in ts.iter().enumerate() {
            entries[i * n + i] = 2 * t;
        }
        Gram { rank: n, entries }
    }

    /// Binary form a·x² + b·xy + c·y² (so the doubled matrix is
    /// [[2a, b], [b, 2c]]).
    pub fn binary(a: i64, b: i64, c: i64) -> Gram {
        Gram { rank: 2, entries: vec![2 * a, b, b, 2 * c] }
    }

    /// Entry of the doubled matrix.
    pub fn e2(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.rank + j]
    }

    /// Trace of the doubled matrix (= 2·tr T).
    pub fn trace2(&self) -> i64 {
        (0..self.rank).map(|i| self.e2(i, i)).sum()
    }

    /// Trace of T itself.
    pub fn t_trace(&self) -> i64 {
        self.trace2() / 2
    }

    /// det(2T).
    pub fn det2(&self) -> i128 {
        linalg::det(&self.entries, self.rank)
    }

    /// Rank over Q of the matrix.
    pub fn matrix_rank(&self) -> usize {
        linalg::rank(&self.entries, self.rank, self.rank)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// c·T (doubles entries scale linearly).
    pub fn scale(&self, c: i64) -> Gram {
        Gram { rank: self.rank, entries: self.entries.iter().map(|&x| c * x).collect() }
    }

    /// T[W] = WᵀTW for an integral rank×r matrix W given by columns.
    pub fn transform(&self, cols: &[Vec<i64>]) -> Gram {
        let entries = linalg::transform(&self.entries, self.rank, cols);
        Gram { rank: cols.len(), entries }
    }

    /// Positive definiteness of T.
    pub fn is_positive_definite(&self) -> bool {
        self.rank > 0 && linalg::ldlt(&self.entries, self.rank).is_some()
    }

    /// Positive semidefiniteness of T (radical split + definite check).
    pub fn is_positive_semidefinite(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let (_, completion) = linalg::kernel_and_completion(&self.entries, self.rank);
        if completion.is_empty() {
            return true;
        }
        let restricted = linalg::transform(&self.entries, self.rank, &completion);
        linalg::ldlt(&restricted, completion.len()).is_some()
    }

    /// level(S): minimal N ≥ 1 with N·(2S)⁻¹ integral and of even diagonal.
    pub fn level(&self) -> Result<i64> {
        if !self.is_positive_definite() {
            return Err(Error::InvalidArgument("level requires a positive definite form".into()));
        }
        let m: Vec<Vec<Rational>> = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| crate::exact::rat(self.e2(i, j))).collect())
            .collect();
        let inv = linalg::rat_inverse(&m).expect("positive definite matrix is invertible");
        let mut n0 = big(1);
        for row in &inv {
            for x in row {
                n0 = num_integer::lcm(n0, x.denom().clone());
            }
        }
        // N is valid iff N₀ | N and N·(2S)⁻¹ has even diagonal; if some
        // diagonal entry of N₀·(2S)⁻¹ is odd the minimal multiplier is 2.
        let two = big(2);
        let even_diag = (0..self.rank).all(|i| {
            let v = &inv[i][i] * &n0;
            debug_assert!(v.is_integer());
            (v.to_integer() % &two).is_zero()
        });
        let n = if even_diag { n0 } else { n0 * two };
        i64::try_from(&n).map_err(|_| Error::Inconsistent("level overflows i64".into()))
    }

    /// χ_S(d) = sign(d)^{m/2} · ((−1)^{m/2} det(2S) | |d|) for even rank m.
    pub fn chi_s(&self, d: i64) -> Result<i32> {
        if self.rank % 2 != 0 {
            return Err(Error::Unsupported("character defined only for even rank".into()));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("character argument must be nonzero".into()));
        }
        let m2 = self.rank / 2;
        let det2 = i64::try_from(self.det2())
            .map_err(|_| Error::Inconsistent("determinant overflows i64".into()))?;
        let disc = if m2 % 2 == 0 { det2 } else { -det2 };
        let sign = if d < 0 && m2 % 2 == 1 { -1 } else { 1 };
        Ok(sign * kronecker(disc, d.abs()))
    }

    /// Jordan splitting data of S at an odd prime p with level(S) | p:
    /// s = corank of S mod p, and the character λ_p of the regular part
    /// (λ = 1 by convention when s is odd or s = rank).
    pub fn jordan_split_at_p(&self, p: u64) -> Result<(usize, i32)> {
        crate::exact::require_prime(p)?;
        if p == 2 {
            return Err(Error::Unsupported("Jordan data implemented for odd primes only".into()));
        }
        // The splitting (s, λ) at p is read off mod p, which is valid only
        // when no p²-scaled Jordan block is present, i.e. p² ∤ level. The
        // prime-to-p part of the level is irrelevant here.
        let level = self.level()?;
        if level % (p * p) as i64 == 0 {
            return Err(Error::Unsupported(format!(
                "Jordan split at {p} requires p² ∤ level, got level {level}"
            )));
        }
        let diag = linalg::fq_diagonal(&self.entries, self.rank, p);
        let s = diag.iter().filter(|&&x| x == 0).count();
        let lambda = regular_part_character(&diag, p, s, self.rank);
        Ok((s, lambda))
    }
}

/// λ_q of the regular part of a form from its F_q diagonalization: for even
/// s < n this is the Legendre symbol of (−1)^{r₀/2}·det(regular part) with
/// r₀ = n − s; by convention 1 for odd s or s = n.
pub(crate) fn regular_part_character(diag: &[u64], q: u64, s: usize, n: usize) -> i32 {
    if s == n || s % 2 != 0 {
        return 1;
    }
    let r0 = n - s;
    debug_assert!(r0 % 2 == 0);
    let mut unit: i64 = if (r0 / 2) % 2 == 1 { -1 } else { 1 };
    for &d in diag.iter().filter(|&&d| d != 0) {
        unit = (unit * d as i64).rem_euclid(q as i64);
    }
    kronecker(unit, q as i64)
}

/// Doubled Gram matrix of the E8 root lattice (even unimodular, 240 roots).
pub fn e8_twice_gram() -> Gram {
    #[rustfmt::skip]
    let entries = vec![
         2, -1,  0,  0,  0,  0,  0,  0,
        -1,  2, -1,  0,  0,  0,  0,  0,
         0, -1,  2, -1,  0,  0,  0,  0,
         0,  0, -1,  2, -1,  0,  0,  0,
         0,  0,  0, -1,  2, -1,  0, -1,
         0,  0,  0,  0, -1,  2, -1,  0,
         0,  0,  0,  0,  0, -1,  2,  0,
         0,  0,  0,  0, -1,  0,  0,  2,
    ];
    Gram { rank: 8, entries }
}

/// All integer vectors x with xᵀGx = `target` for positive definite G,
/// enumerated by a rational Cholesky (Fincke–Pohst) walk; `target` = the
/// doubled value 2·S[x]. Returns every solution including sign pairs.
pub(crate) fn vectors_with_norm(g: &Gram, target: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if target == 0 {
        out.push(vec![0; g.rank]);
        return out;
    }
    for v in vectors_up_to_norm(g, target) {
        if norm2(g, &v) == target {
            let neg = v.iter().map(|&x| -x).collect();
            out.push(v);
            out.push(neg);
        }
    }
    out
}

/// Nonzero vectors with 0 < xᵀGx ≤ bound, one representative per ± pair
/// (the last nonzero coordinate is positive).
pub(crate) fn vectors_up_to_norm(g: &Gram, bound: i64) -> Vec<Vec<i64>> {
    let n = g.rank;
    let (l, d) = linalg::ldlt(&g.entries, n).expect("positive definite form required");
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    // Remaining quadratic budget Σ_{i≤level} d_i (x_i + Σ_{j>i} l_ji x_j)².
    fn walk(
        level: usize,
        budget: Rational,
        x: &mut Vec<i64>,
        l: &[Vec<Rational>],
        d: &[Rational],
        out: &mut Vec<Vec<i64>>,
        all_zero_above: bool,
    ) {
        let n = x.len();
        // center = −Σ_{j>level} l_{j,level}·x_j
        let mut center = Rational::zero();
        for j in level + 1..n {
            center -= &l[j][level] * crate::exact::rat(x[j]);
        }
        // d_level (x + center·(−1)…)² ≤ budget, i.e. |x − center| ≤ √(budget/d).
        let radius2 = &budget / &d[level];
        // Integer loop bounds: x ∈ [ceil(center − r), floor(center + r)].
        let lo = floor_of(&(center.clone() - isqrt_upper(&radius2)));
        let hi = -floor_of(&(-(center.clone() + isqrt_upper(&radius2))));
        for xv in lo..=hi {
            let dev = crate::exact::rat(xv) - &center;
            let used = &d[level] * &dev * &dev;
            if used > budget {
                continue;
            }
            x[level] = xv;
            if level == 0 {
                if !(all_zero_above && xv <= 0) && x.iter().any(|&c| c != 0) {
                    out.push(x.clone());
                }
            } else {
                walk(level - 1, budget.clone() - used, x, l, d, out, all_zero_above && xv == 0);
            }
            x[level] = 0;
        }
    }
    // Enforce "last nonzero coordinate positive" by only descending from
    // nonnegative top coordinates and skipping the all-zero-suffix ≤ 0 case.
    if n > 0 {
        walk(n - 1, crate::exact::rat(bound), &mut x, &l, &d, &mut out, true);
    }
    // Filter the sign convention: keep vectors whose last nonzero entry > 0.
    out.retain(|v| v.iter().rev().find(|&&c| c != 0).is_some_and(|&c| c > 0));
    out
}

pub(crate) fn norm2(g: &Gram, x: &[i64]) -> i64 {
    dot2(g, x, x)
}

/// xᵀ·G·y for the doubled matrix G.
pub(crate) fn dot2(g: &Gram, x: &[i64], y: &[i64]) -> i64 {
    let n = g.rank;
    let mut acc: i128 = 0;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        let mut row: i128 = 0;
        for (j, &yj) in y.iter().enumerate() {
            row += g.entries[i * n + j] as i128 * yj as i128;
        }
        acc += xi as i128 * row;
    }
    i64::try_from(acc).expect("inner product overflow")
}

/// Largest integer t with t² ≤ r (r ≥ 0), returned as Rational.
fn isqrt_upper(r: &Rational) -> Rational {
    if r.is_negative() {
        return Rational::zero();
    }
    let num = r.numer();
    let den = r.denom();
    // √(num/den) ≤ (isqrt(num·den) + 1)/den as a safe upper bound.
    let s = (num * den).sqrt();
    Rational::new(s + big(1), den.clone())
}

fn floor_of(r: &Rational) -> i64 {
    i64::try_from(&r.floor().to_integer()).expect("loop bound overflow")
}
