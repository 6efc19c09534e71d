//! Truncated Fourier expansions of degree-n modular forms.
//!
//! A degree-n expansion stores one rational coefficient per GL_n(Z)-class of
//! positive semidefinite half-integral T with tr(T) ≤ trace bound, keyed by
//! the canonical representative of the class ([`crate::quadforms::reduce`]).
//! Every key up to the bound is present explicitly — zero coefficients are
//! stored, not implied — so two expansions agree as truncated series exactly
//! when they compare equal.
//!
//! The JSON form is deterministic: keys ascend in the canonical matrix
//! order, coefficients are exact `"p/q"` strings, and metadata is sorted.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, parse_rational, Rational};
use crate::par::par_map;
use crate::quadforms::{reduce, Gram};
use crate::{Error, Result};

/// A truncated Fourier expansion with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QExpansionRepr", into = "QExpansionRepr")]
pub struct QExpansion {
    degree: usize,
    trace_bound: i64,
    coeffs: BTreeMap<Gram, Rational>,
    /// Free-form descriptive metadata shown in the JSON output (weight, level, …).
    pub metadata: BTreeMap<String, String>,
}

impl QExpansion {
    /// The zero expansion: every key up to the bound present with value 0.
    pub fn zero(degree: usize, trace_bound: i64) -> Result<Self> {
        Self::from_fn(degree, trace_bound, |_| Ok(Rational::zero()))
    }

    /// Build an expansion by evaluating `f` at every reduced key, in
    /// parallel when enabled.
    pub fn from_fn(
        degree: usize,
        trace_bound: i64,
        f: impl Fn(&Gram) -> Result<Rational> + Sync + Send,
    ) -> Result<Self> {
        let keys = Self::keys(degree, trace_bound)?;
        let values = par_map(&keys, |k| f(k));
        let mut coeffs = BTreeMap::new();
        for (k, v) in keys.into_iter().zip(values) {
            coeffs.insert(k, v?);
        }
        Ok(QExpansion { degree, trace_bound, coeffs, metadata: BTreeMap::new() })
    }

    /// All canonical keys of degree `n` with tr(T) ≤ `trace_bound`, in
    /// ascending order.
    ///
    /// Completeness: every semidefinite class contains a representative with
    /// ascending even diagonal (permute a reduced basis) whose off-diagonal
    /// entries satisfy e_ij² ≤ e_ii·e_jj, so scanning that box and
    /// canonicalizing visits every class.
    pub fn keys(degree: usize, trace_bound: i64) -> Result<Vec<Gram>> {
        if degree == 0 || degree > 4 {
            return Err(Error::Unsupported(format!(
                "expansions implemented for degrees 1–4, got {degree}"
            )));
        }
        if trace_bound < 0 {
            return Err(Error::InvalidArgument("trace bound must be ≥ 0".into()));
        }
        let budget = 2 * trace_bound;
        let mut set = std::collections::BTreeSet::new();
        let mut diag = vec![0i64; degree];
        enumerate_diagonals(&mut diag, 0, 0, budget, &mut |d| {
            scan_box(d, &mut set)
        })?;
        Ok(set.into_iter().collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn trace_bound(&self) -> i64 {
        self.trace_bound
    }

    /// Coefficient at an arbitrary (not necessarily reduced) semidefinite T
    /// within the bound.
    pub fn coeff(&self, t: &Gram) -> Result<Rational> {
        if t.rank != self.degree {
            return Err(Error::InvalidArgument(format!(
                "degree mismatch: key of size {} in expansion of degree {}",
                t.rank, self.degree
            )));
        }
        if t.t_trace() > self.trace_bound {
            return Err(Error::InvalidArgument(format!(
                "coefficient at trace {} beyond bound {}",
                t.t_trace(),
                self.trace_bound
            )));
        }
        let key = reduce(t)?;
        Ok(self.coeffs.get(&key).cloned().unwrap_or_else(Rational::zero))
    }

    /// Insert a coefficient at a reduced key.
    pub fn set(&mut self, key: Gram, value: Rational) -> Result<()> {
        if key.rank != self.degree || key.t_trace() > self.trace_bound {
            return Err(Error::InvalidArgument("key outside expansion domain".into()));
        }
        debug_assert_eq!(reduce(&key).unwrap(), key, "keys must be canonical");
        self.coeffs.insert(key, value);
        Ok(())
    }

    /// Iterate (canonical key, coefficient) in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Gram, &Rational)> {
        self.coeffs.iter()
    }

    /// The same expansion truncated to a smaller trace bound.
    pub fn restrict(&self, trace_bound: i64) -> Result<QExpansion> {
        if trace_bound > self.trace_bound || trace_bound < 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict bound {} to {}",
                self.trace_bound, trace_bound
            )));
        }
        Ok(QExpansion {
            degree: self.degree,
            trace_bound,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.t_trace() <= trace_bound)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            metadata: self.metadata.clone(),
        })
    }

    /// self += c · other, over the keys of self (other must reach as far).
    pub fn add_scaled(&mut self, other: &QExpansion, c: &Rational) -> Result<()> {
        if other.degree != self.degree || other.trace_bound < self.trace_bound {
            return Err(Error::InvalidArgument(
                "addition needs equal degree and a donor bound at least as large".into(),
            ));
        }
        for (k, v) in self.coeffs.iter_mut() {
            if let Some(o) = other.coeffs.get(k) {
                *v += o * c;
            }
        }
        Ok(())
    }

    /// Pointwise difference over the smaller of the two bounds.
    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        if other.degree != self.degree {
            return Err(Error::InvalidArgument("degree mismatch in difference".into()));
        }
        let bound = self.trace_bound.min(other.trace_bound);
        let mut out = self.restrict(bound)?;
        for (k, v) in out.coeffs.iter_mut() {
            *v -= other.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
        }
        out.metadata.clear();
        Ok(out)
    }

    /// Multiply every coefficient by c.
    pub fn scale_values(&mut self, c: &Rational) {
        for v in self.coeffs.values_mut() {
            *v *= c;
        }
    }

    /// Deterministic JSON encoding.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expansion serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("malformed expansion JSON: {e}")))
    }
}

/// Ascending even diagonals (d_0 ≤ … ≤ d_{r−1}, Σ ≤ budget), continued by
/// the off-diagonal scan.
fn enumerate_diagonals(
    diag: &mut Vec<i64>,
    pos: usize,
    used: i64,
    budget: i64,
    emit: &mut impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    if pos == diag.len() {
        return emit(diag);
    }
    let lo = if pos == 0 { 0 } else { diag[pos - 1] };
    let mut d = lo;
    while used + d + (diag.len() - pos - 1) as i64 * d <= budget {
        diag[pos] = d;
        enumerate_diagonals(diag, pos + 1, used + d, budget, emit)?;
        d += 2;
    }
    Ok(())
}

/// All symmetric integer completions of a fixed even diagonal that are
/// positive semidefinite, canonicalized into `set`.
fn scan_box(diag: &[i64], set: &mut std::collections::BTreeSet<Gram>) -> Result<()> {
    let n = diag.len();
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        entries[i * n + i] = diag[i];
    }
    let off: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    fn rec(
        entries: &mut Vec<i64>,
        n: usize,
        off: &[(usize, usize)],
        k: usize,
        set: &mut std::collections::BTreeSet<Gram>,
    ) -> Result<()> {
        if k == off.len() {
            let g = Gram { rank: n, entries: entries.clone() };
            if g.is_positive_semidefinite() {
                set.insert(reduce(&g)?);
            }
            return Ok(());
        }
        let (i, j) = off[k];
        let prod = entries[i * n + i] * entries[j * n + j];
        let mut b = 0i64;
        while b * b <= prod {
            for v in [b, -b] {
                entries[i * n + j] = v;
                entries[j * n + i] = v;
                rec(entries, n, off, k + 1, set)?;
                if b == 0 {
                    break;
                }
            }
            b += 1;
        }
        entries[i * n + j] = 0;
        entries[j * n + i] = 0;
        Ok(())
    }
    rec(&mut entries, n, &off, 0, set)
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    t: Vec<Vec<i64>>,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct QExpansionRepr {
    degree: usize,
    trace_bound: i64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    coeffs: Vec<CoeffEntry>,
}

impl From<QExpansion> for QExpansionRepr {
    fn from(e: QExpansion) -> Self {
        QExpansionRepr {
            degree: e.degree,
            trace_bound: e.trace_bound,
            metadata: e.metadata,
            coeffs: e
                .coeffs
                .into_iter()
                .map(|(k, v)| CoeffEntry {
                    t: (0..k.rank)
                        .map(|i| (0..k.rank).map(|j| k.e2(i, j)).collect())
                        .collect(),
                    c: format_rational(&v),
                })
                .collect(),
        }
    }
}

impl TryFrom<QExpansionRepr> for QExpansion {
    type Error = Error;

    fn try_from(r: QExpansionRepr) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for entry in r.coeffs {
            let rank = entry.t.len();
            if entry.t.iter().any(|row| row.len() != rank) {
                return Err(Error::InvalidArgument("expansion key is not square".into()));
            }
            let g = Gram::from_twice(rank, entry.t.into_iter().flatten().collect())?;
            if g.rank != r.degree || g.t_trace() > r.trace_bound {
                return Err(Error::InvalidArgument("expansion key outside domain".into()));
            }
            let key = reduce(&g)?;
            let c = parse_rational(&entry.c)?;
            if coeffs.insert(key, c).is_some() {
                return Err(Error::InvalidArgument(
                    "duplicate key (after reduction) in expansion".into(),
                ));
            }
        }
        Ok(QExpansion {
            degree: r.degree,
            trace_bound: r.trace_bound,
            coeffs,
            metadata: r.metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn degree_one_keys() {
        let keys = QExpansion::keys(1, 5).unwrap();
        let expect: Vec<Gram> = (0..=5).map(|t| Gram::diag_t(&[t])).collect();
        assert_eq!(keys, expect);
    }

    #[test]
    fn degree_two_key_counts() {
        // Classes with tr ≤ 4: rank 0 (1), rank 1 (4), rank 2 (9).
        let keys = QExpansion::keys(2, 4).unwrap();
        let by_rank = |r: usize| keys.iter().filter(|k| k.matrix_rank() == r).count();
        assert_eq!(by_rank(0), 1);
        assert_eq!(by_rank(1), 4);
        assert_eq!(by_rank(2), 9);
        let nine: Vec<Gram> = keys.iter().filter(|k| k.matrix_rank() == 2).cloned().collect();
        assert!(nine.contains(&Gram::diag_t(&[1, 1])));
        assert!(nine.contains(&Gram::binary(1, 1, 1)));
        assert!(nine.contains(&Gram::binary(1, 1, 2)));
        assert!(nine.contains(&Gram::binary(1, 1, 3)));
        assert!(nine.contains(&Gram::diag_t(&[1, 2])));
        // tr ≤ 5 adds [1,·,4]-type and [2,·,3]-type classes: 14 in total.
        let keys5 = QExpansion::keys(2, 5).unwrap();
        assert_eq!(keys5.iter().filter(|k| k.matrix_rank() == 2).count(), 14);
    }

    #[test]
    fn keys_are_canonical_and_sorted() {
        let keys = QExpansion::keys(2, 5).unwrap();
        for k in &keys {
            assert_eq!(&reduce(k).unwrap(), k);
        }
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn degree_three_keys_include_embeddings() {
        let keys = QExpansion::keys(3, 2).unwrap();
        // diag(1,1,0) reduced keeps zeros trailing.
        let emb = reduce(&Gram::diag_t(&[1, 1, 0])).unwrap();
        assert!(keys.contains(&emb));
        assert!(keys.contains(&Gram::diag_t(&[0, 0, 0])));
    }

    #[test]
    fn coeff_lookup_reduces() {
        let mut e = QExpansion::zero(2, 3).unwrap();
        e.set(Gram::binary(1, 1, 2), frac(5, 3)).unwrap();
        // [[2,−1],[−1,4]] is GL-equivalent to the stored key.
        let twisted = Gram::from_twice(2, vec![2, -1, -1, 4]).unwrap();
        assert_eq!(e.coeff(&twisted).unwrap(), frac(5, 3));
        assert_eq!(e.coeff(&Gram::diag_t(&[1, 1])).unwrap(), frac(0, 1));
        assert!(e.coeff(&Gram::diag_t(&[4, 4])).is_err());
    }

    #[test]
    fn arithmetic() {
        let mut a = QExpansion::zero(1, 3).unwrap();
        a.set(Gram::diag_t(&[1]), frac(2, 1)).unwrap();
        let mut b = QExpansion::zero(1, 3).unwrap();
        b.set(Gram::diag_t(&[1]), frac(1, 2)).unwrap();
        b.set(Gram::diag_t(&[3]), frac(7, 1)).unwrap();
        a.add_scaled(&b, &frac(2, 1)).unwrap();
        assert_eq!(a.coeff(&Gram::diag_t(&[1])).unwrap(), frac(3, 1));
        assert_eq!(a.coeff(&Gram::diag_t(&[3])).unwrap(), frac(14, 1));
        let d = a.sub(&b).unwrap();
        assert_eq!(d.coeff(&Gram::diag_t(&[1])).unwrap(), frac(5, 2));
        assert_eq!(d.coeff(&Gram::diag_t(&[3])).unwrap(), frac(7, 1));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut e = QExpansion::zero(2, 2).unwrap();
        e.set(Gram::binary(1, 1, 1), frac(-7, 3)).unwrap();
        e.metadata.insert("kind".into(), "test".into());
        let s = e.to_json();
        let back = QExpansion::from_json(&s).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_json(), s);
        assert!(s.starts_with("{\"degree\":2,\"trace_bound\":2,\"metadata\":"));
    }

    #[test]
    fn restriction() {
        let mut e = QExpansion::zero(1, 4).unwrap();
        e.set(Gram::diag_t(&[4]), frac(9, 1)).unwrap();
        e.set(Gram::diag_t(&[2]), frac(4, 1)).unwrap();
        let r = e.restrict(2).unwrap();
        assert_eq!(r.trace_bound(), 2);
        assert_eq!(r.coeff(&Gram::diag_t(&[2])).unwrap(), frac(4, 1));
        assert!(r.coeff(&Gram::diag_t(&[4])).is_err());
        assert!(e.restrict(9).is_err());
    }
}
