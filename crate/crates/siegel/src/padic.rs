//! p-adic comparison of Eisenstein expansions with genus theta combinations.
//!
//! A weight family is indexed by (k, j) with j ∈ {0, 1}: member m of the
//! family is the classical weight k_j(m) = k + ((p−1)/2^j)·p^m. As m grows,
//! the degree-n expansions of weight k_j(m) converge coefficientwise
//! p-adically, and the limit is a finite combination Σ_g c_g·Θ⁰(gen g) of
//! normalized genus theta series of rank-2k forms whose level divides p.
//! This module computes the limit coefficients c_g in closed form, measures
//! the congruence order actually achieved by a stage expansion against the
//! limit combination, and packages the outcome as a machine-readable report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bernoulli::{self, bernoulli_number, is_regular_prime};
use crate::chars::QuadCharacter;
use crate::eisenstein::{eis_deg1, eis_deg2};
use crate::exact::{format_rational, pow_i, rat, require_prime, vp, Rational, Valuation};
use crate::normalization::limit_prefactor;
use crate::qexp::QExpansion;
use crate::quadforms::{enumerate_classes, genus_partition, Genus, Gram};
use crate::theta::genus_theta0;
use crate::{Error, Result};

/// A weight family target (k, j) at the prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightTarget {
    pub k: u64,
    pub j: u8,
    pub p: u64,
}

impl WeightTarget {
    /// Validates the standing hypotheses: p is an odd prime with p > 2k+1,
    /// j ∈ {0, 1}, and the parity of k matches the family (k even for j = 0;
    /// k ≡ (p−1)/2 (mod 2) for j = 1, so that every stage weight is even).
    pub fn new(k: u64, j: u8, p: u64) -> Result<Self> {
        require_prime(p)?;
        if p == 2 {
            return Err(Error::InvalidArgument("p must be odd".into()));
        }
        if j > 1 {
            return Err(Error::InvalidArgument(format!("j must be 0 or 1, got {j}")));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if p <= 2 * k + 1 {
            return Err(Error::InvalidArgument(format!(
                "need p > 2k+1, got p={p}, k={k}"
            )));
        }
        if j == 0 && k % 2 != 0 {
            return Err(Error::InvalidArgument("j=0 requires even k".into()));
        }
        if j == 1 && k % 2 != ((p - 1) / 2) % 2 {
            return Err(Error::InvalidArgument(format!(
                "j=1 requires k ≡ (p−1)/2 (mod 2), got k={k}, p={p}"
            )));
        }
        Ok(WeightTarget { k, j, p })
    }

    /// Classical weight of stage m: k + ((p−1)/2^j)·p^m.
    pub fn stage_weight(&self, m: u32) -> Result<u64> {
        bernoulli::stage_weight(self.k, self.j, self.p, m)
    }

    /// Character of the family: trivial for j = 0, the quadratic character
    /// of conductor p for j = 1.
    pub fn character(&self) -> Result<QuadCharacter> {
        match self.j {
            0 => Ok(QuadCharacter::trivial()),
            _ => QuadCharacter::chi_p(self.p),
        }
    }

    /// Rank of the quadratic forms on the theta side: 2k.
    pub fn theta_rank(&self) -> usize {
        2 * self.k as usize
    }
}

/// Genus-independent factor of the limit coefficient:
///
///   (−1)^k·2^k · L_j · 2 · Π_{i=1}^{k−1} (2k−2i) / ((1−p^{2k−2i−1})·B_{2k−2i})
///
/// with L_0 = k/((1−p^{k−1})·B_k) and L_1 = k/B_{k,χ_p}. `precision_m` is
/// forwarded to the L_j evaluation, which cross-checks itself against the
/// stage-m Bernoulli congruence.
pub fn limit_global_factor(k: u64, j: u8, p: u64, precision_m: u32) -> Result<Rational> {
    let target = WeightTarget::new(k, j, p)?;
    let l = bernoulli::limit_ratio_k_over_bk(target.k, target.j, target.p, precision_m)?;
    let mut acc = rat(limit_prefactor(k as u32)) * l * rat(2);
    for i in 1..k {
        let w = 2 * k - 2 * i;
        let euler = rat(1) - pow_i(&rat(p as i64), (w - 1) as i64);
        acc *= rat(w as i64) / (euler * bernoulli_number(w));
    }
    Ok(acc)
}

/// μ_j = v_p of the genus-independent limit factor; the reports normalize
/// all expansions by p^{−μ} so the limit combination has a p-unit somewhere.
pub fn mu_j(k: u64, j: u8, p: u64) -> Result<i64> {
    let b = limit_global_factor(k, j, p, 1)?;
    Ok(vp(&b, p)
        .finite()
        .expect("the limit factor is a nonzero rational"))
}

fn vp_i128(mut x: i128, p: u64) -> u32 {
    debug_assert!(x != 0);
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Limit coefficient of one genus: the global factor times a local factor
/// read off the Jordan splitting at p. Writing s = v_p(det 2S) (which must
/// have the parity of j) and λ_p for the character of the regular part:
///
///   j = 0:  (−1)^{s/2}·λ_p·p^{(s/2−1)(s/2)}
///   j = 1:  (−1)^{(s−1)/2}·p^{((s−1)/2)²}
///
/// Genera of level divisible by p² get coefficient 0: they are annihilated
/// in the limit. Levels with a factor prime to p are rejected.
pub fn limit_genus_coefficient(
    target: &WeightTarget,
    genus: &Genus,
    precision_m: u32,
) -> Result<Rational> {
    let p = target.p;
    if genus.rank != target.theta_rank() {
        return Err(Error::InvalidArgument(format!(
            "genus rank {} does not match theta rank {}",
            genus.rank,
            target.theta_rank()
        )));
    }
    let mut level = genus.level;
    let mut t = 0u32;
    while level % p as i64 == 0 {
        level /= p as i64;
        t += 1;
    }
    if level != 1 {
        return Err(Error::InvalidArgument(format!(
            "genus level {} is not a power of p={p}",
            genus.level
        )));
    }
    if t >= 2 {
        return Ok(rat(0));
    }
    let s = if genus.det2 == 1 {
        0u32
    } else {
        let v = vp_i128(genus.det2, p);
        if (p as i128).pow(v) != genus.det2 {
            return Err(Error::InvalidArgument(format!(
                "genus determinant {} is not a power of p={p}",
                genus.det2
            )));
        }
        v
    };
    if s % 2 != target.j as u32 {
        return Err(Error::InvalidArgument(format!(
            "v_p(det 2S) = {s} must have the parity of j = {}",
            target.j
        )));
    }
    if s as u64 > 2 * target.k {
        return Err(Error::InvalidArgument(format!(
            "v_p(det 2S) = {s} exceeds 2k = {}",
            2 * target.k
        )));
    }
    let (s_jordan, lambda) = genus.classes[0].form.jordan_split_at_p(p)?;
    debug_assert_eq!(s_jordan as u32, s);
    let local = match target.j {
        0 => {
            let half = s as i64 / 2;
            let sign = if half % 2 == 0 { 1 } else { -1 };
            rat(sign * lambda as i64) * pow_i(&rat(p as i64), (half - 1) * half)
        }
        _ => {
            let half = (s as i64 - 1) / 2;
            let sign = if half % 2 == 0 { 1 } else { -1 };
            rat(sign) * pow_i(&rat(p as i64), half * half)
        }
    };
    Ok(limit_global_factor(target.k, target.j, target.p, precision_m)? * local)
}

/// All genera on the theta side of a target: rank-2k classes of level
/// dividing p, grouped by determinant p^s for each s ≡ j (mod 2), s ≤ 2k.
pub fn stage_genera(target: &WeightTarget) -> Result<Vec<Genus>> {
    let rank = target.theta_rank();
    let mut genera = Vec::new();
    let mut s = target.j as u32;
    while s as u64 <= 2 * target.k {
        let det2 = (target.p as i64).checked_pow(s).ok_or_else(|| {
            Error::InvalidArgument(format!("p^{s} overflows a machine integer"))
        })?;
        let forms = enumerate_classes(rank, det2, target.p as i64)?;
        genera.extend(genus_partition(&forms)?);
        s += 2;
    }
    Ok(genera)
}

/// v^{(r)} for r = 0, …, degree: the minimum of v_p over all coefficients
/// whose key has matrix rank r. `Infinite` means every such coefficient
/// vanishes (or no key of that rank exists below the trace bound).
pub fn rank_valuation_profile(e: &QExpansion, p: u64) -> Result<Vec<Valuation>> {
    require_prime(p)?;
    let mut profile = vec![Valuation::Infinite; e.degree() + 1];
    for key in QExpansion::keys(e.degree(), e.trace_bound())? {
        let v = vp(&e.coeff(&key)?, p);
        let r = key.matrix_rank();
        profile[r] = profile[r].min(v);
    }
    Ok(profile)
}

/// Mod-p singularity data of an expansion: the p-rank (largest matrix rank
/// r whose minimal valuation attains the global minimum) and the order
/// (how far above the global minimum the ranks beyond the p-rank sit;
/// `Infinite` when they vanish identically or the p-rank is already full).
pub fn detect_singular(e: &QExpansion, p: u64) -> Result<(usize, Valuation)> {
    let profile = rank_valuation_profile(e, p)?;
    let global = profile
        .iter()
        .filter_map(|v| v.finite())
        .min()
        .ok_or_else(|| Error::InvalidArgument("expansion is identically zero".into()))?;
    let p_rank = profile
        .iter()
        .rposition(|v| *v == Valuation::Finite(global))
        .expect("some rank attains the global minimum");
    let order = profile[p_rank + 1..]
        .iter()
        .copied()
        .min()
        .unwrap_or(Valuation::Infinite);
    let order = match order {
        Valuation::Finite(v) => Valuation::Finite(v - global),
        Valuation::Infinite => Valuation::Infinite,
    };
    Ok((p_rank, order))
}

/// Checks the valuation profile of a weight-w stage against the jump rule:
/// an increase v^{(r+1)} = v^{(r)} + m between consecutive finite entries
/// is admissible only if r is even and 2w − r ≡ 0 mod (p−1)p^{m−1}. A jump
/// from a finite entry to `Infinite` (or a revival after `Infinite`) is
/// never admissible; a flat or descending profile passes vacuously.
pub fn weight_constraint_check(profile: &[Valuation], weight: u64, p: u64) -> bool {
    for r in 0..profile.len().saturating_sub(1) {
        match (profile[r], profile[r + 1]) {
            (Valuation::Finite(a), Valuation::Finite(b)) if b > a => {
                let m = (b - a) as u32;
                if r % 2 != 0 {
                    return false;
                }
                let modulus = ((p - 1) as i64) * (p as i64).pow(m - 1);
                if (2 * weight as i64 - r as i64).rem_euclid(modulus) != 0 {
                    return false;
                }
            }
            (Valuation::Finite(_), Valuation::Finite(_)) => {}
            (Valuation::Infinite, Valuation::Infinite) => {}
            _ => return false,
        }
    }
    true
}

/// Outcomes of the standing-hypothesis checks attached to a report.
#[derive(Clone, Debug, Serialize)]
pub struct AssumptionChecks {
    /// Stage weights stay clear of the forbidden residue classes for the
    /// auxiliary nonvanishing needed by the comparison.
    pub nv: bool,
    /// p divides no numerator of B_2, B_4, …, B_{p−3}.
    pub regular_prime: bool,
    /// The valuation profile of the normalized stage obeys the jump rule.
    pub weight_constraint: bool,
}

/// Echo of the run parameters, stamped with the library version.
#[derive(Clone, Debug, Serialize)]
pub struct ReportParams {
    pub degree: usize,
    pub j: u8,
    pub k: u64,
    pub m: u32,
    pub mode: String,
    pub mu: i64,
    pub p: u64,
    pub stage_weight: u64,
    pub trace_bound: i64,
    pub version: String,
}

/// A key attaining the worst congruence order, with both coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub lhs: String,
    pub rhs: String,
    pub t: Vec<Vec<i64>>,
    pub valuation: i64,
}

/// Machine-readable verification outcome. Serialization is deterministic:
/// fields are declared alphabetically and maps are ordered.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// min_T v_p(lhs(T) − rhs(T)) − μ, or null when the sides agree exactly.
    pub achieved_order: Option<i64>,
    pub assumption_checks: AssumptionChecks,
    /// Whether the constant terms agree exactly (not merely p-adically).
    pub constant_term_exact: bool,
    /// Trace bound on which the two sides were actually compared.
    pub effective_trace_bound: i64,
    pub params: ReportParams,
    /// v^{(r)} − μ of the normalized stage expansion per matrix rank r;
    /// null when every rank-r coefficient vanishes.
    pub rank_valuations: BTreeMap<String, Option<i64>>,
    /// True iff the constant terms match exactly and the achieved order is
    /// at least the requested precision m.
    pub verified: bool,
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Flat key\tvalue rendering with one witness per line.
    pub fn to_tsv(&self) -> String {
        let mut lines = Vec::new();
        match self.achieved_order {
            Some(v) => lines.push(format!("achieved_order\t{v}")),
            None => lines.push("achieved_order\tinf".to_string()),
        }
        lines.push(format!("assumption.nv\t{}", self.assumption_checks.nv));
        lines.push(format!(
            "assumption.regular_prime\t{}",
            self.assumption_checks.regular_prime
        ));
        lines.push(format!(
            "assumption.weight_constraint\t{}",
            self.assumption_checks.weight_constraint
        ));
        lines.push(format!("constant_term_exact\t{}", self.constant_term_exact));
        lines.push(format!("effective_trace_bound\t{}", self.effective_trace_bound));
        let p = &self.params;
        lines.push(format!("param.degree\t{}", p.degree));
        lines.push(format!("param.j\t{}", p.j));
        lines.push(format!("param.k\t{}", p.k));
        lines.push(format!("param.m\t{}", p.m));
        lines.push(format!("param.mode\t{}", p.mode));
        lines.push(format!("param.mu\t{}", p.mu));
        lines.push(format!("param.p\t{}", p.p));
        lines.push(format!("param.stage_weight\t{}", p.stage_weight));
        lines.push(format!("param.trace_bound\t{}", p.trace_bound));
        lines.push(format!("param.version\t{}", p.version));
        for (r, v) in &self.rank_valuations {
            match v {
                Some(v) => lines.push(format!("rank_valuation.{r}\t{v}")),
                None => lines.push(format!("rank_valuation.{r}\tinf")),
            }
        }
        lines.push(format!("verified\t{}", self.verified));
        for w in &self.witnesses {
            lines.push(format!(
                "witness\t{:?}\t{}\t{}\t{}",
                w.t, w.lhs, w.rhs, w.valuation
            ));
        }
        lines.join("\n") + "\n"
    }
}

fn build_report(
    mode: &str,
    target: &WeightTarget,
    m: u32,
    degree: usize,
    trace_bound: i64,
    stage_weight: u64,
    mu: i64,
    stage: &QExpansion,
    lhs_side: &QExpansion,
    diff: &QExpansion,
) -> Result<VerificationReport> {
    let p = target.p;
    let mut min_v = Valuation::Infinite;
    for key in QExpansion::keys(diff.degree(), diff.trace_bound())? {
        min_v = min_v.min(vp(&diff.coeff(&key)?, p));
    }
    let achieved_order = min_v.finite().map(|v| v - mu);
    let mut witnesses = Vec::new();
    if let Valuation::Finite(worst) = min_v {
        for key in QExpansion::keys(diff.degree(), diff.trace_bound())? {
            let d = diff.coeff(&key)?;
            if vp(&d, p) == min_v {
                let rows: Vec<Vec<i64>> = (0..key.rank)
                    .map(|i| (0..key.rank).map(|j| key.e2(i, j)).collect())
                    .collect();
                let lhs_v = lhs_side.coeff(&key)?;
                witnesses.push(Witness {
                    lhs: format_rational(&lhs_v),
                    rhs: format_rational(&(lhs_v - d)),
                    t: rows,
                    valuation: worst - mu,
                });
            }
        }
    }
    let zero_key = Gram {
        rank: degree,
        entries: vec![0; degree * degree],
    };
    let constant_term_exact = diff.coeff(&zero_key)? == rat(0);
    let profile = rank_valuation_profile(stage, p)?;
    let rank_valuations: BTreeMap<String, Option<i64>> = profile
        .iter()
        .enumerate()
        .map(|(r, v)| (r.to_string(), v.finite().map(|x| x - mu)))
        .collect();
    let shifted: Vec<Valuation> = profile
        .iter()
        .map(|v| match v {
            Valuation::Finite(x) => Valuation::Finite(x - mu),
            Valuation::Infinite => Valuation::Infinite,
        })
        .collect();
    let assumption_checks = AssumptionChecks {
        nv: bernoulli::assumption_nv_check(target.k, target.j, target.p, degree as u32, m)?,
        regular_prime: is_regular_prime(p)?,
        weight_constraint: weight_constraint_check(&shifted, stage_weight, p),
    };
    let verified = constant_term_exact
        && match achieved_order {
            Some(v) => v >= m as i64,
            None => true,
        };
    Ok(VerificationReport {
        achieved_order,
        assumption_checks,
        constant_term_exact,
        effective_trace_bound: diff.trace_bound(),
        params: ReportParams {
            degree,
            j: target.j,
            k: target.k,
            m,
            mode: mode.to_string(),
            mu,
            p,
            stage_weight,
            trace_bound,
            version: crate::VERSION.to_string(),
        },
        rank_valuations,
        verified,
        witnesses,
    })
}

fn stage_expansion(w: u64, degree: usize, trace_bound: i64) -> Result<QExpansion> {
    let w32 = u32::try_from(w)
        .map_err(|_| Error::InvalidArgument(format!("stage weight {w} too large")))?;
    match degree {
        1 => eis_deg1(w32, trace_bound),
        2 => eis_deg2(w32, trace_bound),
        _ => Err(Error::Unsupported(format!(
            "verification covers degrees 1 and 2, got {degree}"
        ))),
    }
}

/// Compare the stage-m expansion of the family (k, j) at p, in the given
/// degree and up to the given trace bound, against the limit combination
/// Σ_g c_g·Θ⁰(gen g). The report's `achieved_order` is
/// min_T v_p(difference) − μ_j, and `verified` additionally demands that
/// the constant terms agree exactly (Σ_g c_g·mass(g) = 1).
pub fn verify_main_theorem(
    k: u64,
    j: u8,
    p: u64,
    m: u32,
    degree: usize,
    trace_bound: i64,
) -> Result<VerificationReport> {
    let target = WeightTarget::new(k, j, p)?;
    if m == 0 {
        return Err(Error::InvalidArgument("precision m must be ≥ 1".into()));
    }
    if trace_bound < 0 {
        return Err(Error::InvalidArgument("trace bound must be ≥ 0".into()));
    }
    let w = target.stage_weight(m)?;
    let mu = mu_j(k, j, p)?;
    let lhs = stage_expansion(w, degree, trace_bound)?;
    let mut rhs = QExpansion::zero(degree, trace_bound)?;
    for genus in stage_genera(&target)? {
        let c = limit_genus_coefficient(&target, &genus, m)?;
        let theta0 = genus_theta0(&genus, degree, trace_bound)?;
        rhs.add_scaled(&theta0, &c)?;
    }
    let diff = lhs.sub(&rhs)?;
    build_report("main", &target, m, degree, trace_bound, w, mu, &lhs, &lhs, &diff)
}

/// Check that the stage-m expansion is fixed by U(p) to order m: compare
/// E|U(p) with E on all keys of trace ≤ ⌊B/p⌋.
pub fn verify_up_fixed(
    k: u64,
    j: u8,
    p: u64,
    m: u32,
    degree: usize,
    trace_bound: i64,
) -> Result<VerificationReport> {
    let target = WeightTarget::new(k, j, p)?;
    if m == 0 {
        return Err(Error::InvalidArgument("precision m must be ≥ 1".into()));
    }
    if trace_bound < p as i64 {
        return Err(Error::InvalidArgument(format!(
            "U(p) comparison needs trace bound ≥ p = {p}"
        )));
    }
    let w = target.stage_weight(m)?;
    let mu = mu_j(k, j, p)?;
    let stage = stage_expansion(w, degree, trace_bound)?;
    let up = crate::hecke::apply_up(&stage, p)?;
    let restricted = stage.restrict(up.trace_bound())?;
    let diff = up.sub(&restricted)?;
    build_report("up", &target, m, degree, trace_bound, w, mu, &stage, &up, &diff)
}
