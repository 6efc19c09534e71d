//! Hecke-type operators on truncated expansions: U(p), the Siegel Φ
//! operator, Eisenstein eigenvalues, and the action of U(p) on theta series.

use num_bigint::BigInt;
use num_traits::One;

use crate::exact::{big, frac, rat, require_prime, Rational};
use crate::linalg;
use crate::qexp::QExpansion;
use crate::quadforms::{enumerate_classes, epsilon, repr_count, Gram};
use crate::{Error, Result};

/// U(p): (U(p)F)(T) = F(pT). The result is truncated at ⌊B/p⌋.
pub fn apply_up(e: &QExpansion, p: u64) -> Result<QExpansion> {
    require_prime(p)?;
    let new_bound = e.trace_bound() / p as i64;
    let mut out = QExpansion::from_fn(e.degree(), new_bound, |key| {
        e.coeff(&key.scale(p as i64))
    })?;
    out.metadata = e.metadata.clone();
    out.metadata.insert("applied".into(), format!("U({p})"));
    Ok(out)
}

/// Siegel Φ: drops the degree by one; the coefficient at T′ is the
/// coefficient of the input at diag(T′, 0).
pub fn phi_operator(e: &QExpansion) -> Result<QExpansion> {
    let n = e.degree();
    if n < 2 {
        return Err(Error::Unsupported(
            "Φ lowers the degree; degree-1 input would leave a constant".into(),
        ));
    }
    let mut out = QExpansion::from_fn(n - 1, e.trace_bound(), |key| {
        let mut entries = vec![0i64; n * n];
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                entries[i * n + j] = key.e2(i, j);
            }
        }
        e.coeff(&Gram { rank: n, entries })
    })?;
    out.metadata = e.metadata.clone();
    out.metadata.insert("applied".into(), "phi".into());
    Ok(out)
}

/// Eigenvalue of U(p) on the degree-n Eisenstein series of weight k:
///
///   λ_{n,k}(p) = Σ_{r=0}^{n} p^{rk − r(r+1)/2}
///
/// (recursively λ_{n,k} = p^{nk − n(n+1)/2} + λ_{n−1,k}, λ_{0,k} = 1).
pub fn lambda_eigenvalue(n: u32, k: u32, p: u64) -> Result<BigInt> {
    require_prime(p)?;
    if n == 0 || 2 * k < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue needs n ≥ 1 and 2k ≥ n+1, got n={n}, k={k}"
        )));
    }
    let mut acc = BigInt::one();
    for r in 1..=n as i64 {
        let exponent = r * k as i64 - r * (r + 1) / 2;
        debug_assert!(exponent >= 0);
        acc += big(p as i64).pow(exponent as u32);
    }
    Ok(acc)
}

/// The matrix of U(p)^e on the span of the full-degree theta series of all
/// rank-2 classes of p-power level dividing p^e.
#[derive(Clone, Debug)]
pub struct UpThetaDecomposition {
    /// Classes S_1, …, S_r in ascending determinant order.
    pub forms: Vec<Gram>,
    /// level(S_i) for each class.
    pub levels: Vec<i64>,
    /// α with Θ(S_i)|U(p)^e = Σ_t α[i][t]·Θ(S_t) as degree-2 expansions.
    pub alpha: Vec<Vec<Rational>>,
}

/// Decompose Θ(S_i)|U(p)^e over the theta series of the same class list,
/// by solving against the evaluation matrix A(S_t, S_j)/ε(S_j). The
/// evaluations determine the span because the full-degree theta
/// coefficients A(·, S_j) separate classes.
pub fn up_theta_decompose(rank: usize, p: u64, e: u32) -> Result<UpThetaDecomposition> {
    require_prime(p)?;
    if rank != 2 {
        return Err(Error::Unsupported(format!(
            "U(p)-theta decomposition implemented for rank 2, got {rank}"
        )));
    }
    if e == 0 || p == 2 {
        return Err(Error::InvalidArgument("need e ≥ 1 and odd p".into()));
    }
    let level_cap = (p as i64)
        .checked_pow(e)
        .ok_or_else(|| Error::InvalidArgument(format!("p^e overflows: p={p}, e={e}")))?;
    // det(2S) divides level², so level | p^e forces det(2S) = p^s, s ≤ 2e;
    // for odd p only odd s gives a legal discriminant −p^s ≡ 0, 1 (mod 4).
    let mut forms = Vec::new();
    for i in 0..e {
        let det2 = (p as i64)
            .checked_pow(2 * i + 1)
            .ok_or_else(|| Error::InvalidArgument("p^s overflows".into()))?;
        forms.extend(enumerate_classes(2, det2, level_cap)?);
    }
    if forms.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no rank-2 classes of level dividing {p}^{e}"
        )));
    }
    let eps: Vec<i64> = forms.iter().map(|f| epsilon(f) as i64).collect();
    let r = forms.len();
    let scale = (p as i64).pow(e);
    let mat = |targets: &dyn Fn(usize) -> Gram| -> Vec<Vec<Rational>> {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| frac(repr_count(&forms[i], &targets(j)) as i64, eps[j]))
                    .collect()
            })
            .collect()
    };
    let g = mat(&|j: usize| forms[j].clone());
    let m = mat(&|j: usize| forms[j].scale(scale));
    let g_inv = linalg::rat_inverse(&g).ok_or_else(|| {
        Error::Inconsistent("theta evaluation matrix is singular; class list incomplete".into())
    })?;
    let alpha: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|t| {
                    let mut acc = rat(0);
                    for u in 0..r {
                        acc += &m[i][u] * &g_inv[u][t];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut levels = Vec::with_capacity(r);
    for f in &forms {
        levels.push(f.level()?);
    }
    Ok(UpThetaDecomposition { forms, levels, alpha })
}
