//! Degree-n theta series of positive definite even matrices and their
//! genus-averaged versions.
//!
//! For S positive definite of even size m and a degree n ≤ 4, the theta
//! expansion assigns to each key T the representation number
//! A(S, T) = #{X ∈ Z^{m×n} : Xᵀ(2S)X = 2T}. The genus average
//! Σ_j Θ(S_j)/ε(S_j) over a genus has constant term equal to the mass
//! Σ_j 1/ε(S_j); dividing by the mass gives the version with constant
//! term 1.

use std::collections::HashMap;

use num_traits::One;

use crate::exact::{big, frac, Rational};
use crate::par::par_map;
use crate::qexp::QExpansion;
use crate::quadforms::{repr_count, Genus, Gram};
use crate::{Error, Result};

/// Fourier expansion of the degree-`degree` theta series of S, up to
/// tr(T) ≤ `trace_bound`.
pub fn theta_qexp(s: &Gram, degree: usize, trace_bound: i64) -> Result<QExpansion> {
    if s.rank == 0 || s.rank % 2 != 0 {
        return Err(Error::Unsupported(format!(
            "theta series of odd-size matrices (size {}) have half-integral weight",
            s.rank
        )));
    }
    if !s.is_positive_definite() {
        return Err(Error::InvalidArgument("theta series requires positive definite S".into()));
    }
    let mut exp = match degree {
        1 => theta_degree1(s, trace_bound)?,
        2 => theta_degree2(s, trace_bound)?,
        3 | 4 => theta_by_keys(s, degree, trace_bound)?,
        _ => {
            return Err(Error::Unsupported(format!(
                "theta expansions implemented for degrees 1–4, got {degree}"
            )))
        }
    };
    exp.metadata.insert("kind".into(), "theta".into());
    exp.metadata.insert("weight".into(), (s.rank / 2).to_string());
    exp.metadata.insert("level".into(), s.level()?.to_string());
    Ok(exp)
}

/// One representative per ±-pair of nonzero vectors up to a norm bound,
/// with the norm cached.
fn half_vectors(s: &Gram, bound: i64) -> Vec<(Vec<i64>, i64)> {
    crate::quadforms::vectors_up_to_norm(s, bound)
        .into_iter()
        .map(|v| {
            let n = crate::quadforms::norm2(s, &v);
            (v, n)
        })
        .collect()
}

/// Histogram of vector norms: a([t]) = #{x : x·(2S)·x = 2t}.
fn theta_degree1(s: &Gram, trace_bound: i64) -> Result<QExpansion> {
    let mut counts: HashMap<i64, i64> = HashMap::new();
    for (_, n) in half_vectors(s, 2 * trace_bound) {
        *counts.entry(n).or_insert(0) += 2;
    }
    QExpansion::from_fn(1, trace_bound, |key| {
        let t2 = key.e2(0, 0);
        if t2 == 0 {
            return Ok(Rational::one());
        }
        Ok(big(counts.get(&t2).copied().unwrap_or(0)).into())
    })
}

/// Histogram over ordered pairs of vectors: for each ordered pair of
/// ±-classes with norms (n1, n2) and inner product d, the four sign choices
/// contribute 2 to the (n1, n2, d) and (n1, n2, −d) buckets each.
fn theta_degree2(s: &Gram, trace_bound: i64) -> Result<QExpansion> {
    let max_norm = (2 * trace_bound - 2).max(0);
    let w = half_vectors(s, max_norm);
    let mut single: HashMap<i64, i64> = HashMap::new();
    for (_, n) in half_vectors(s, 2 * trace_bound) {
        *single.entry(n).or_insert(0) += 2;
    }
    let mut pairs: HashMap<(i64, i64, i64), i64> = HashMap::new();
    for (xa, na) in &w {
        for (xb, nb) in &w {
            if na + nb > 2 * trace_bound {
                continue;
            }
            let d = crate::quadforms::dot2(s, xa, xb);
            if d == 0 {
                *pairs.entry((*na, *nb, 0)).or_insert(0) += 4;
            } else {
                *pairs.entry((*na, *nb, d)).or_insert(0) += 2;
                *pairs.entry((*na, *nb, -d)).or_insert(0) += 2;
            }
        }
    }
    QExpansion::from_fn(2, trace_bound, |key| {
        let c = match key.matrix_rank() {
            0 => 1,
            1 => {
                // Canonical singular key is diag(2t, 0).
                debug_assert_eq!(key.e2(1, 1), 0);
                single.get(&key.e2(0, 0)).copied().unwrap_or(0)
            }
            _ => pairs
                .get(&(key.e2(0, 0), key.e2(1, 1), key.e2(0, 1)))
                .copied()
                .unwrap_or(0),
        };
        Ok(big(c).into())
    })
}

/// Direct per-key representation counts (degrees 3–4).
fn theta_by_keys(s: &Gram, degree: usize, trace_bound: i64) -> Result<QExpansion> {
    let keys = QExpansion::keys(degree, trace_bound)?;
    let values = par_map(&keys, |k| repr_count(s, k));
    let mut exp = QExpansion::zero(degree, trace_bound)?;
    for (k, v) in keys.into_iter().zip(values) {
        exp.set(k, big(v as i64).into())?;
    }
    Ok(exp)
}

/// Genus average Σ_j Θ^(n)(S_j)/ε(S_j); its constant term is the mass of
/// the genus.
pub fn genus_theta0(genus: &Genus, degree: usize, trace_bound: i64) -> Result<QExpansion> {
    let mut acc = QExpansion::zero(degree, trace_bound)?;
    for class in &genus.classes {
        let theta = theta_qexp(&class.form, degree, trace_bound)?;
        acc.add_scaled(&theta, &frac(1, class.epsilon as i64))?;
    }
    acc.metadata.insert("kind".into(), "genus-theta".into());
    acc.metadata.insert("weight".into(), (genus.rank / 2).to_string());
    acc.metadata.insert("level".into(), genus.level.to_string());
    acc.metadata.insert("classes".into(), genus.classes.len().to_string());
    Ok(acc)
}

/// Genus average rescaled to constant term 1.
pub fn genus_theta_normalized(
    genus: &Genus,
    degree: usize,
    trace_bound: i64,
) -> Result<QExpansion> {
    let mut exp = genus_theta0(genus, degree, trace_bound)?;
    let mass = genus.mass();
    exp.scale_values(&mass.recip());
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::quadforms::{enumerate_classes, genus_partition};

    fn coeff(e: &QExpansion, t: &Gram) -> Rational {
        e.coeff(t).unwrap()
    }

    #[test]
    fn square_lattice_degree1() {
        // x² + y²: representation numbers 1, 4, 4, 0, 4, 8.
        let s = Gram::diag_t(&[1, 1]);
        let e = theta_qexp(&s, 1, 5).unwrap();
        let expect = [1, 4, 4, 0, 4, 8];
        for (t, &r) in expect.iter().enumerate() {
            assert_eq!(coeff(&e, &Gram::diag_t(&[t as i64])), rat(r));
        }
    }

    #[test]
    fn e8_degree1() {
        let e = theta_qexp(&crate::quadforms::e8_twice_gram(), 1, 3).unwrap();
        assert_eq!(coeff(&e, &Gram::diag_t(&[0])), rat(1));
        assert_eq!(coeff(&e, &Gram::diag_t(&[1])), rat(240));
        assert_eq!(coeff(&e, &Gram::diag_t(&[2])), rat(2160));
        assert_eq!(coeff(&e, &Gram::diag_t(&[3])), rat(6720));
    }

    #[test]
    fn square_lattice_degree2() {
        let s = Gram::diag_t(&[1, 1]);
        let e = theta_qexp(&s, 2, 2).unwrap();
        assert_eq!(coeff(&e, &Gram::diag_t(&[0, 0])), rat(1));
        assert_eq!(coeff(&e, &Gram::diag_t(&[1, 0])), rat(4));
        // A(I₂, I₂) = ε(I₂) = 8 ordered orthonormal pairs.
        assert_eq!(coeff(&e, &Gram::diag_t(&[1, 1])), rat(8));
        // The hexagonal key has determinant 3, not represented by x²+y².
        assert_eq!(coeff(&e, &Gram::binary(1, 1, 1)), rat(0));
    }

    #[test]
    fn degree2_matches_direct_counts() {
        let s = Gram::binary(1, 1, 2);
        let e = theta_qexp(&s, 2, 3).unwrap();
        for key in QExpansion::keys(2, 3).unwrap() {
            assert_eq!(coeff(&e, &key), rat(repr_count(&s, &key) as i64), "at {key}");
        }
    }

    #[test]
    fn degree3_by_keys() {
        let s = Gram::diag_t(&[1, 1, 1, 1]);
        let e = theta_qexp(&s, 3, 2).unwrap();
        // A(I₄, diag(1,1,0)): ordered pairs of orthogonal unit vectors ×
        // the zero column: 8·6 = 48.
        let key = crate::quadforms::reduce(&Gram::diag_t(&[1, 1, 0])).unwrap();
        assert_eq!(coeff(&e, &key), rat(48));
    }

    #[test]
    fn odd_size_rejected() {
        assert!(theta_qexp(&Gram::diag_t(&[1]), 1, 2).is_err());
    }

    #[test]
    fn genus_theta_masses() {
        let classes = enumerate_classes(2, 23, 23).unwrap();
        let genus = &genus_partition(&classes).unwrap()[0];
        let g0 = genus_theta0(genus, 1, 3).unwrap();
        assert_eq!(coeff(&g0, &Gram::diag_t(&[0])), frac(3, 4));
        // Only [1,1,6] represents 1 (twice), weighted by 1/ε = 1/4.
        assert_eq!(coeff(&g0, &Gram::diag_t(&[1])), frac(1, 2));
        let gn = genus_theta_normalized(genus, 1, 3).unwrap();
        assert_eq!(coeff(&gn, &Gram::diag_t(&[0])), rat(1));
        assert_eq!(coeff(&gn, &Gram::diag_t(&[1])), frac(2, 3));
    }

    #[test]
    fn disc7_genus_theta_degree1() {
        let classes = enumerate_classes(2, 7, 7).unwrap();
        let genus = &genus_partition(&classes).unwrap()[0];
        let g0 = genus_theta0(genus, 1, 2).unwrap();
        assert_eq!(coeff(&g0, &Gram::diag_t(&[0])), frac(1, 4));
        assert_eq!(coeff(&g0, &Gram::diag_t(&[1])), frac(1, 2));
        assert_eq!(coeff(&g0, &Gram::diag_t(&[2])), rat(1));
    }
}
