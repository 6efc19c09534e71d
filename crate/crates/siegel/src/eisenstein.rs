//! Fourier coefficients of Siegel–Eisenstein series of degrees 1 and 2,
//! normalized to constant term 1.
//!
//! Degree 1 is classical:
//!
//!   E_k(τ) = 1 − (2k/B_k) Σ_{t ≥ 1} σ_{k−1}(t) q^t.
//!
//! In degree 2 a nonsingular coefficient factors through the "primitive"
//! coefficient a*_k(T), evaluated by a closed formula, and the overlattice
//! sum a_k(T) = Σ_D a*_k(T[D⁻¹]) over integral D (in Hermite normal form)
//! for which T[D⁻¹] remains half-integral. The primitive coefficient is
//!
//!   a*_k(T) = b_k(T) · c_k(T),
//!
//!   b_k(T) = (−1)^{n/2} 2^{n/2} · (k/B_k) · (B_{k−n/2, η_T}/(k−n/2))
//!            · Π_{i=1}^{n/2} (2k−2i)/B_{2k−2i},
//!
//!   c_k(T) = f^{2k−n−1} · Π_{q | det 2T} (1 − η_T(q) q^{n/2−k}) · B*_q(T),
//!
//! where (−1)^{n/2} det 2T = d·f² with d the fundamental discriminant,
//! η_T = χ_d, and B*_q is a polynomial in q^{−1} read off the mod-q kernel
//! of 2T. The normalization is pinned down by exact identities: in degree 2
//! and weight 4 the series equals the degree-2 theta expansion of E8, and
//! restriction to the diagonal multiplies two degree-1 series.

use num_traits::{One, Zero};

use crate::bernoulli::{bernoulli_number, generalized_bernoulli};
use crate::chars::{fundamental_discriminant, QuadCharacter};
use crate::exact::{big, pow_i, rat, Rational};
use crate::normalization::bernoulli_part_prefactor;
use crate::qexp::QExpansion;
use crate::quadforms::{prime_factors, reduce, Gram};
use crate::{linalg, Error, Result};

/// σ_{k−1}(t) = Σ_{d | t} d^{k−1}.
fn sigma(k1: u64, t: i64) -> Rational {
    debug_assert!(t >= 1);
    let mut s = num_bigint::BigInt::zero();
    for d in 1..=t {
        if t % d == 0 {
            s += big(d).pow(k1 as u32);
        }
    }
    Rational::from(s)
}

/// Degree-1 Eisenstein expansion of even weight k ≥ 4.
pub fn eis_deg1(k: u32, trace_bound: i64) -> Result<QExpansion> {
    check_weight(k, 1)?;
    let factor = -rat(2 * k as i64) / bernoulli_number(k as u64);
    let mut exp = QExpansion::from_fn(1, trace_bound, |key| {
        let t = key.t_trace();
        if t == 0 {
            return Ok(Rational::one());
        }
        Ok(&factor * sigma(k as u64 - 1, t))
    })?;
    stamp(&mut exp, k, 1);
    Ok(exp)
}

/// Degree-2 Eisenstein expansion of even weight k ≥ 4.
pub fn eis_deg2(k: u32, trace_bound: i64) -> Result<QExpansion> {
    check_weight(k, 2)?;
    let deg1_factor = -rat(2 * k as i64) / bernoulli_number(k as u64);
    let mut exp = QExpansion::from_fn(2, trace_bound, |key| match key.matrix_rank() {
        0 => Ok(Rational::one()),
        1 => {
            // Singular coefficients come from degree 1 via the Φ operator.
            debug_assert_eq!(key.e2(1, 1), 0);
            Ok(&deg1_factor * sigma(k as u64 - 1, key.e2(0, 0) / 2))
        }
        _ => coefficient_deg2(k, key),
    })?;
    stamp(&mut exp, k, 2);
    Ok(exp)
}

fn stamp(exp: &mut QExpansion, k: u32, degree: usize) {
    exp.metadata.insert("kind".into(), "eisenstein".into());
    exp.metadata.insert("weight".into(), k.to_string());
    exp.metadata.insert("degree".into(), degree.to_string());
}

fn check_weight(k: u32, degree: usize) -> Result<()> {
    debug_assert!(degree == 1 || degree == 2);
    if k % 2 != 0 || k < 4 {
        return Err(Error::InvalidArgument(format!(
            "Eisenstein weight must be even and ≥ 4, got k={k}"
        )));
    }
    Ok(())
}

/// Full nonsingular degree-2 coefficient: overlattice sum of primitive ones.
fn coefficient_deg2(k: u32, t: &Gram) -> Result<Rational> {
    let mut acc = Rational::zero();
    for member in overlattice_divisors(t)? {
        acc += primitive_coeff(k, &member)?.value;
    }
    Ok(acc)
}

/// The factorization of a primitive coefficient, exposed for the p-adic
/// verifier which needs the pieces separately.
#[derive(Clone, Debug)]
pub struct PrimitiveCoeffBreakdown {
    /// a*_k(T) = bernoulli_part · local_part.
    pub value: Rational,
    /// (−1)^{n/2} 2^{n/2} (k/B_k)(B_{k−n/2,η}/(k−n/2)) Π (2k−2i)/B_{2k−2i}.
    pub bernoulli_part: Rational,
    /// f^{2k−n−1} · Π_q (1 − η(q) q^{n/2−k}) B*_q; always an integer.
    pub local_part: Rational,
    /// Fundamental discriminant d with (−1)^{n/2}·det(2T) = d·f².
    pub eta_discriminant: i64,
    /// The conductor-like integer f above.
    pub conductor: u64,
    /// The factor (1 − η(q) q^{n/2−k})·B*_q for each prime q | det(2T).
    pub local_factors: Vec<(i64, Rational)>,
}

/// Closed-formula coefficient at a nonsingular T of even size n ∈ {2, 4},
/// weight k > n + 1.
pub fn primitive_coeff(k: u32, t: &Gram) -> Result<PrimitiveCoeffBreakdown> {
    let n = t.rank;
    if n == 0 || n % 2 != 0 || n > 4 {
        return Err(Error::Unsupported(format!(
            "primitive coefficients implemented for sizes 2 and 4, got {n}"
        )));
    }
    if k as usize <= n + 1 {
        return Err(Error::InvalidArgument(format!(
            "weight must exceed n+1: k={k}, n={n}"
        )));
    }
    if !t.is_positive_definite() {
        return Err(Error::InvalidArgument(
            "primitive coefficients require positive definite T".into(),
        ));
    }
    let det2 = t.det2();
    let det2_small = i64::try_from(det2)
        .map_err(|_| Error::Unsupported("determinant exceeds i64".into()))?;
    let disc_arg = if (n / 2) % 2 == 1 { -det2_small } else { det2_small };
    let (d, f) = fundamental_discriminant(disc_arg)?;
    let eta =
        if d == 1 { QuadCharacter::trivial() } else { QuadCharacter::from_fundamental(d)? };

    let k64 = k as u64;
    let m = k64 - (n as u64) / 2;
    let mut bern = rat(bernoulli_part_prefactor(n));
    bern *= rat(k as i64) / bernoulli_number(k64);
    bern *= generalized_bernoulli(m, &eta) / rat(m as i64);
    for i in 1..=(n as i64 / 2) {
        let idx = 2 * k as i64 - 2 * i;
        bern *= rat(idx) / bernoulli_number(idx as u64);
    }

    let mut local = pow_i(&rat(f as i64), 2 * k as i64 - n as i64 - 1);
    let mut local_factors = Vec::new();
    for q in prime_factors(det2) {
        let factor = if q == 2 {
            if n != 2 {
                return Err(Error::Unsupported(
                    "even determinants are implemented only in degree 2".into(),
                ));
            }
            local_factor_two(t, k, &eta)
        } else {
            local_factor_odd(t, q, k, &eta)
        };
        local *= &factor;
        local_factors.push((q, factor));
    }
    if !local.denom().is_one() {
        return Err(Error::Inconsistent(format!(
            "local part of the coefficient at {t} is not integral: {local}"
        )));
    }

    let value = &bern * &local;
    Ok(PrimitiveCoeffBreakdown {
        value,
        bernoulli_part: bern,
        local_part: local,
        eta_discriminant: d,
        conductor: f,
        local_factors,
    })
}

/// (1 − η(q)·q^{n/2−k}) · B*_q(T) at an odd prime q | det(2T), where the
/// branch of B*_q depends on the corank s of 2T mod q:
///
///   s odd:  Π_{j=1}^{(s−1)/2} (1 − q^{2j+n−2k}),
///   s even: (1 + λ_q·q^{(n+s−2k)/2}) · Π_{j=1}^{s/2−1} (1 − q^{2j+n−2k}).
fn local_factor_odd(t: &Gram, q: i64, k: u32, eta: &QuadCharacter) -> Rational {
    let n = t.rank;
    let diag = linalg::fq_diagonal(&t.entries, n, q as u64);
    let s = diag.iter().filter(|&&x| x == 0).count();
    debug_assert!(s >= 1, "q | det(2T) forces a kernel mod q");
    let lambda = crate::quadforms::regular_part_character(&diag, q as u64, s, n);
    let qr = rat(q);
    let mut b = if s % 2 == 0 {
        let e = (n as i64 + s as i64 - 2 * k as i64) / 2;
        Rational::one() + rat(lambda as i64) * pow_i(&qr, e)
    } else {
        Rational::one()
    };
    let pairs = if s % 2 == 0 { s / 2 - 1 } else { (s - 1) / 2 };
    for j in 1..=pairs as i64 {
        b *= Rational::one() - pow_i(&qr, 2 * j + n as i64 - 2 * k as i64);
    }
    character_factor(q, k, eta, t.rank) * b
}

/// The q = 2 factor in degree 2. The corank of the quadratic form
/// x ↦ T[x] mod 2 is 2 when both diagonal entries of T are even (then
/// B*_2 = 1 + 2^{2−k}) and 1 otherwise (B*_2 = 1).
fn local_factor_two(t: &Gram, k: u32, eta: &QuadCharacter) -> Rational {
    debug_assert_eq!(t.rank, 2);
    let fully_even = t.e2(0, 0) % 4 == 0 && t.e2(1, 1) % 4 == 0;
    let b = if fully_even {
        Rational::one() + pow_i(&rat(2), 2 - k as i64)
    } else {
        Rational::one()
    };
    character_factor(2, k, eta, t.rank) * b
}

fn character_factor(q: i64, k: u32, eta: &QuadCharacter, n: usize) -> Rational {
    Rational::one() - rat(eta.eval(q) as i64) * pow_i(&rat(q), n as i64 / 2 - k as i64)
}

/// All half-integral quotients T[D⁻¹] over integral D in Hermite normal
/// form (with multiplicity, reduced). For size 1, divisors d with d² | t;
/// for size 2, D = [[a, b], [0, dd]] with 0 ≤ b < dd and (a·dd)² | det 2T.
pub fn overlattice_divisors(t: &Gram) -> Result<Vec<Gram>> {
    match t.rank {
        1 => {
            let t1 = t.e2(0, 0) / 2;
            if t1 <= 0 {
                return Err(Error::InvalidArgument("nonsingular T required".into()));
            }
            let mut out = Vec::new();
            let mut d = 1;
            while d * d <= t1 {
                if t1 % (d * d) == 0 {
                    out.push(Gram::diag_t(&[t1 / (d * d)]));
                }
                d += 1;
            }
            out.sort();
            Ok(out)
        }
        2 => {
            let det2 = t.det2();
            if det2 <= 0 {
                return Err(Error::InvalidArgument("nonsingular T required".into()));
            }
            let mut out = Vec::new();
            let mut e = 1i64;
            while (e * e) as i128 <= det2 {
                if det2 % ((e * e) as i128) == 0 {
                    for a in 1..=e {
                        if e % a != 0 {
                            continue;
                        }
                        let dd = e / a;
                        for b in 0..dd {
                            if let Some(g) = quotient_form(t, a, b, dd) {
                                out.push(reduce(&g)?);
                            }
                        }
                    }
                }
                e += 1;
            }
            out.sort();
            Ok(out)
        }
        other => Err(Error::Unsupported(format!(
            "overlattice scan implemented for sizes 1 and 2, got {other}"
        ))),
    }
}

/// 2·T[D⁻¹] for D = [[a, b], [0, dd]] if half-integral, where
/// D⁻¹ = (1/e)·[[dd, −b], [0, a]] with e = a·dd.
fn quotient_form(t: &Gram, a: i64, b: i64, dd: i64) -> Option<Gram> {
    let e = a * dd;
    let e2 = e * e;
    let adj = [dd, -b, 0, a];
    // X = adjᵀ · (2T) · adj.
    let g = &t.entries;
    let mut x = [0i64; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = 0i64;
            for r in 0..2 {
                for c in 0..2 {
                    acc += adj[r * 2 + i] * g[r * 2 + c] * adj[c * 2 + j];
                }
            }
            x[i * 2 + j] = acc;
        }
    }
    // Entries divide by e², diagonal stays even.
    if x.iter().any(|v| v % e2 != 0) || x[0] % (2 * e2) != 0 || x[3] % (2 * e2) != 0 {
        return None;
    }
    Some(Gram { rank: 2, entries: x.iter().map(|v| v / e2).collect() })
}

/// The degree-n integrality constant c_{k,n}: a(T)/c_{k,n} is an integer
/// for every nonsingular coefficient of the weight-k degree-n expansion.
/// D_m denotes the denominator of B_m; the corrective divisor runs over the
/// primes dividing D_{2k−n} (all of them for n ≡ 0 mod 4, only those
/// ≡ 3 mod 4 for n ≡ 2 mod 4), each contributing q^{1+v_q(k−n/2)}.
pub fn integrality_constant(k: u32, n: usize) -> Result<Rational> {
    if n == 0 || 2 * k as i64 - n as i64 - 1 <= 0 {
        return Err(Error::InvalidArgument(format!(
            "integrality constant needs n ≥ 1 and 2k > n+1: k={k}, n={n}"
        )));
    }
    let k64 = k as i64;
    let mut c = rat(k64) / bernoulli_number(k as u64);
    let half = n as i64 / 2;
    if n % 2 == 1 {
        c *= pow_i(&rat(2), n as i64);
        for i in 1..=(n as i64 - 1) / 2 {
            c *= rat(k64 - i) / bernoulli_number((2 * k64 - 2 * i) as u64);
        }
    } else {
        let two_pow = if n % 4 == 0 { n as i64 } else { n as i64 - 1 };
        c *= pow_i(&rat(2), two_pow);
        for i in 1..=half {
            c *= rat(k64 - i) / bernoulli_number((2 * k64 - 2 * i) as u64);
        }
        let dm = bernoulli_number((2 * k64 - n as i64) as u64);
        let mut star = num_bigint::BigInt::one();
        for q in prime_factors(to_i128(dm.denom())) {
            if n % 4 == 2 && q % 4 != 3 {
                continue;
            }
            let mut e = 1u32;
            let mut v = k64 - half;
            while v % q == 0 {
                v /= q;
                e += 1;
            }
            star *= big(q).pow(e);
        }
        c /= Rational::from(star);
    }
    Ok(c)
}

fn to_i128(x: &num_bigint::BigInt) -> i128 {
    use num_traits::ToPrimitive;
    x.to_i128().expect("Bernoulli denominator exceeds i128")
}

/// a(T)/c is an integer for every coefficient and c the integrality
/// constant — used as a spot check by the verifier and test suites.
pub fn divisible_by_constant(a: &Rational, c: &Rational) -> bool {
    (a / c).denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::Gram;

    fn deg2_coeff(e: &QExpansion, a: i64, b: i64, c: i64) -> Rational {
        e.coeff(&Gram::binary(a, b, c)).unwrap()
    }

    #[test]
    fn degree1_weight4() {
        let e = eis_deg1(4, 4).unwrap();
        let expect = [1, 240, 2160, 6720, 17520];
        for (t, &v) in expect.iter().enumerate() {
            assert_eq!(e.coeff(&Gram::diag_t(&[t as i64])).unwrap(), rat(v));
        }
    }

    #[test]
    fn degree1_weight6() {
        let e = eis_deg1(6, 3).unwrap();
        assert_eq!(e.coeff(&Gram::diag_t(&[1])).unwrap(), rat(-504));
        assert_eq!(e.coeff(&Gram::diag_t(&[2])).unwrap(), rat(-504 * 33));
    }

    #[test]
    fn primitive_values_weight4() {
        let hex = primitive_coeff(4, &Gram::binary(1, 1, 1)).unwrap();
        assert_eq!(hex.value, rat(13440));
        assert_eq!(hex.eta_discriminant, -3);
        assert_eq!(hex.conductor, 1);

        let i2 = primitive_coeff(4, &Gram::diag_t(&[1, 1])).unwrap();
        assert_eq!(i2.value, rat(30240));
        assert_eq!(i2.eta_discriminant, -4);

        let s7 = primitive_coeff(4, &Gram::binary(1, 1, 2)).unwrap();
        assert_eq!(s7.value, rat(138240));
        assert_eq!(s7.eta_discriminant, -7);

        let d8 = primitive_coeff(4, &Gram::diag_t(&[1, 2])).unwrap();
        assert_eq!(d8.value, rat(181440));
        assert_eq!(d8.eta_discriminant, -8);

        // Imprimitive forms: scale of the hexagonal and square classes.
        let h2 = primitive_coeff(4, &Gram::binary(2, 2, 2)).unwrap();
        assert_eq!(h2.value, rat(604800));
        let sq2 = primitive_coeff(4, &Gram::diag_t(&[2, 2])).unwrap();
        assert_eq!(sq2.value, rat(1209600));
        assert_eq!(sq2.conductor, 2);
    }

    #[test]
    fn overlattice_members() {
        // Size 1: quotients t/d².
        let o = overlattice_divisors(&Gram::diag_t(&[9])).unwrap();
        assert_eq!(o, vec![Gram::diag_t(&[1]), Gram::diag_t(&[9])]);
        let o = overlattice_divisors(&Gram::diag_t(&[12])).unwrap();
        assert_eq!(o, vec![Gram::diag_t(&[3]), Gram::diag_t(&[12])]);

        // diag(1,1) admits no proper quotient (any would be unimodular even).
        let o = overlattice_divisors(&Gram::diag_t(&[1, 1])).unwrap();
        assert_eq!(o, vec![Gram::diag_t(&[1, 1])]);

        // 2·hexagonal: every index-2 quotient has an odd diagonal, so the
        // sum collapses to the primitive term alone.
        let o = overlattice_divisors(&Gram::binary(2, 2, 2)).unwrap();
        assert_eq!(o, vec![Gram::binary(2, 2, 2)]);

        // diag(2,2) keeps exactly one proper quotient, equivalent to
        // diag(1,1), coming from D = [[1,1],[0,2]].
        let o = overlattice_divisors(&Gram::diag_t(&[2, 2])).unwrap();
        assert_eq!(o, vec![Gram::diag_t(&[1, 1]), Gram::diag_t(&[2, 2])]);
    }

    #[test]
    fn deg2_weight4_small_keys() {
        let e = eis_deg2(4, 4).unwrap();
        assert_eq!(e.coeff(&Gram::diag_t(&[0, 0])).unwrap(), rat(1));
        assert_eq!(e.coeff(&Gram::diag_t(&[1, 0])).unwrap(), rat(240));
        assert_eq!(e.coeff(&Gram::diag_t(&[2, 0])).unwrap(), rat(2160));
        assert_eq!(deg2_coeff(&e, 1, 1, 1), rat(13440));
        assert_eq!(deg2_coeff(&e, 1, 0, 1), rat(30240));
        assert_eq!(deg2_coeff(&e, 1, 1, 2), rat(138240));
        assert_eq!(deg2_coeff(&e, 1, 0, 2), rat(181440));
        // a(diag(1,3)) = a*(det 12) + a*(det 3) via the index-2 quotient.
        assert_eq!(deg2_coeff(&e, 1, 0, 3), rat(483840 + 13440));
        // a(2·hex) = a*(2·hex): no integral quotient survives.
        assert_eq!(deg2_coeff(&e, 2, 2, 2), rat(604800));
        // a(diag(2,2)) = a*(diag(2,2)) + a*(diag(1,1)).
        assert_eq!(deg2_coeff(&e, 2, 0, 2), rat(1209600 + 30240));
    }

    #[test]
    fn diagonal_restriction_identity() {
        // Σ_b a_k([t1, b, t2]) = (coefficient t1)·(coefficient t2) of E_k.
        let k = 4u32;
        let e2 = eis_deg2(k, 6).unwrap();
        let e1 = eis_deg1(k, 6).unwrap();
        for (t1, t2) in [(1i64, 1i64), (1, 2), (2, 2), (1, 3), (3, 3), (1, 5), (2, 3)] {
            let mut lhs = Rational::zero();
            let mut b = 0i64;
            while b * b <= 4 * t1 * t2 {
                let g = Gram::from_twice(2, vec![2 * t1, b, b, 2 * t2]).unwrap();
                lhs += e2.coeff(&g).unwrap();
                if b > 0 {
                    lhs += e2.coeff(&g).unwrap(); // ±b
                }
                b += 1;
            }
            let rhs = e1.coeff(&Gram::diag_t(&[t1])).unwrap()
                * e1.coeff(&Gram::diag_t(&[t2])).unwrap();
            assert_eq!(lhs, rhs, "restriction fails at ({t1},{t2})");
        }
    }

    #[test]
    fn integrality_constants() {
        assert_eq!(integrality_constant(4, 2).unwrap(), rat(-480));
        assert_eq!(integrality_constant(4, 1).unwrap(), rat(-240));
        // Degree-1 weight-4 coefficients are multiples of −240.
        let e = eis_deg1(4, 5).unwrap();
        let c = integrality_constant(4, 1).unwrap();
        for (key, a) in e.iter() {
            if key.t_trace() > 0 {
                assert!(divisible_by_constant(a, &c), "σ-coefficient at {key}");
            }
        }
    }

    #[test]
    fn preconditions() {
        assert!(eis_deg1(5, 3).is_err());
        assert!(eis_deg1(2, 3).is_err());
        assert!(primitive_coeff(4, &Gram::diag_t(&[1, 1, 1])).is_err());
        assert!(primitive_coeff(3, &Gram::binary(1, 1, 1)).is_err());
        assert!(overlattice_divisors(&Gram::diag_t(&[1, 1, 1])).is_err());
    }
}
