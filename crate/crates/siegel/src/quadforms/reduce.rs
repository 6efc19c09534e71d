//! Canonical reduction of positive semidefinite half-integral matrices of
//! rank ≤ 4.
//!
//! The canonical representative of a GL_n(Z)-class minimizes, among all
//! bases, the key
//!
//!   (g_11, …, g_nn; (|g_12|, sgn), (|g_13|, sgn), (|g_23|, sgn), …)
//!
//! compared lexicographically, where g = 2T and a nonnegative entry beats a
//! negative one of the same magnitude. Minimizing the diagonal first forces
//! g_jj to equal the j-th successive minimum of the lattice: for n ≤ 4
//! every lattice has a basis attaining its successive minima, and any basis
//! prefix is saturated. This also bounds the search: every canonical basis
//! vector has norm ≤ max diagonal entry of any pre-reduced basis, so a
//! single Fincke–Pohst enumeration provides a complete candidate pool.
//!
//! Rank-deficient input is split off its radical (a saturated kernel
//! summand), reduced on the definite part, and re-embedded as diag(T′, 0).

use super::{dot2, norm2, vectors_up_to_norm, Gram};
use crate::{linalg, Error, Result};

/// Canonical representative of the GL-class of a positive semidefinite T.
pub fn reduce(t: &Gram) -> Result<Gram> {
    if t.rank > 4 {
        return Err(Error::Unsupported("reduction implemented for rank ≤ 4".into()));
    }
    if !t.is_positive_semidefinite() {
        return Err(Error::InvalidArgument("reduce requires positive semidefinite input".into()));
    }
    if t.is_zero() {
        return Ok(t.clone());
    }
    let (kernel, completion) = linalg::kernel_and_completion(&t.entries, t.rank);
    if kernel.is_empty() {
        return Ok(canonical_posdef(t));
    }
    let c = canonical_posdef(&t.transform(&completion));
    let n = t.rank;
    let mut entries = vec![0i64; n * n];
    for i in 0..c.rank {
        for j in 0..c.rank {
            entries[i * n + j] = c.e2(i, j);
        }
    }
    Ok(Gram { rank: n, entries })
}

fn canonical_posdef(g: &Gram) -> Gram {
    let n = g.rank;
    let pre = pre_reduce(g);
    let bound = (0..n).map(|i| pre.e2(i, i)).max().unwrap();
    let mut pool: Vec<Vec<i64>> = Vec::new();
    for v in vectors_up_to_norm(&pre, bound) {
        pool.push(v.iter().map(|&x| -x).collect());
        pool.push(v);
    }
    pool.sort_by_key(|v| (norm2(&pre, v), v.clone()));
    let minima = successive_minima(&pre, &pool);

    // Candidate indices per level (vectors of norm exactly m_j).
    let per_level: Vec<Vec<usize>> = minima
        .iter()
        .map(|&m| (0..pool.len()).filter(|&i| norm2(&pre, &pool[i]) == m).collect())
        .collect();

    let mut search = Search {
        pre: &pre,
        pool: &pool,
        per_level: &per_level,
        chosen: Vec::with_capacity(n),
        cur_off: Vec::new(),
        best_off: None,
        best_cols: Vec::new(),
    };
    search.dfs(0);
    let cols = search.best_cols;
    debug_assert_eq!(cols.len(), n, "canonical search must find a basis");
    let out = pre.transform(&cols);
    debug_assert_eq!(out.det2(), g.det2());
    out
}

struct Search<'a> {
    pre: &'a Gram,
    pool: &'a [Vec<i64>],
    per_level: &'a [Vec<usize>],
    chosen: Vec<usize>,
    /// Flattened off-diagonal key so far: pairs (|g_ij|, 0 or 1 for sign).
    cur_off: Vec<i64>,
    best_off: Option<Vec<i64>>,
    best_cols: Vec<Vec<i64>>,
}

impl Search<'_> {
    fn dfs(&mut self, level: usize) {
        let n = self.pre.rank;
        if level == n {
            let better = match &self.best_off {
                None => true,
                Some(b) => self.cur_off < *b,
            };
            if better {
                self.best_off = Some(self.cur_off.clone());
                self.best_cols = self.chosen.iter().map(|&i| self.pool[i].clone()).collect();
            }
            return;
        }
        'cand: for &ci in &self.per_level[level] {
            let v = &self.pool[ci];
            let mut ext = Vec::with_capacity(2 * level);
            for &pi in &self.chosen {
                let d = dot2(self.pre, &self.pool[pi], v);
                ext.push(d.abs());
                ext.push(i64::from(d < 0));
            }
            if let Some(best) = &self.best_off {
                let len = self.cur_off.len() + ext.len();
                let cand_key = || self.cur_off.iter().chain(ext.iter());
                if cand_key().gt(best[..len.min(best.len())].iter()) {
                    continue 'cand;
                }
            }
            // Prefix must stay extendable to a basis: the chosen columns
            // must span a saturated sublattice (gcd of maximal minors 1).
            self.chosen.push(ci);
            if !self.saturated() {
                self.chosen.pop();
                continue 'cand;
            }
            let keep = self.cur_off.len();
            self.cur_off.extend_from_slice(&ext);
            self.dfs(level + 1);
            self.cur_off.truncate(keep);
            self.chosen.pop();
        }
    }

    fn saturated(&self) -> bool {
        let n = self.pre.rank;
        let k = self.chosen.len();
        let cols: Vec<&Vec<i64>> = self.chosen.iter().map(|&i| &self.pool[i]).collect();
        let mut gcd: i128 = 0;
        for rows in combinations(n, k) {
            let sub: Vec<i64> = rows
                .iter()
                .flat_map(|&r| cols.iter().map(move |c| c[r]))
                .collect();
            gcd = num_integer::gcd(gcd, linalg::det(&sub, k));
            if gcd == 1 {
                return true;
            }
        }
        gcd.abs() == 1
    }
}

/// All k-element subsets of {0, …, n−1} in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Successive minima m_1 ≤ … ≤ m_n read off a norm-sorted pool by greedy
/// independent selection.
fn successive_minima(g: &Gram, pool: &[Vec<i64>]) -> Vec<i64> {
    let n = g.rank;
    let mut kept: Vec<&Vec<i64>> = Vec::new();
    let mut minima = Vec::with_capacity(n);
    for v in pool {
        if kept.len() == n {
            break;
        }
        let mut flat: Vec<i64> = Vec::with_capacity((kept.len() + 1) * n);
        for w in &kept {
            flat.extend_from_slice(w);
        }
        flat.extend_from_slice(v);
        if linalg::rank(&flat, kept.len() + 1, n) == kept.len() + 1 {
            kept.push(v);
            minima.push(norm2(g, v));
        }
    }
    debug_assert_eq!(minima.len(), n, "pool must span the lattice");
    minima
}

/// Greedy size reduction: repeatedly shorten basis vectors against each
/// other and keep the diagonal sorted; terminates because the diagonal sum
/// strictly decreases on every productive pass.
fn pre_reduce(g: &Gram) -> Gram {
    let n = g.rank;
    let mut m = g.entries.clone();
    loop {
        let mut changed = false;
        // Keep diagonal ascending.
        for i in 0..n {
            for j in i + 1..n {
                if m[j * n + j] < m[i * n + i] {
                    swap_cols(&mut m, n, i, j);
                    changed = true;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let gii = m[i * n + i];
                let gij = m[j * n + i];
                // r = nearest integer to g_ij / g_ii.
                let r = (2 * gij + gii).div_euclid(2 * gii);
                if r != 0 {
                    let new_jj = m[j * n + j] - 2 * r * gij + r * r * gii;
                    if new_jj < m[j * n + j] {
                        sub_col(&mut m, n, j, i, r);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Gram { rank: n, entries: m };
        }
    }
}

fn swap_cols(m: &mut [i64], n: usize, a: usize, b: usize) {
    for r in 0..n {
        m.swap(r * n + a, r * n + b);
    }
    for c in 0..n {
        m.swap(a * n + c, b * n + c);
    }
}

/// Basis change b_a ← b_a − r·b_s applied to the Gram matrix.
fn sub_col(m: &mut [i64], n: usize, a: usize, s: usize, r: i64) {
    for row in 0..n {
        m[row * n + a] -= r * m[row * n + s];
    }
    for col in 0..n {
        m[a * n + col] -= r * m[s * n + col];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_examples() {
        assert_eq!(reduce(&Gram::diag_t(&[2, 1])).unwrap(), Gram::diag_t(&[1, 2]));
        let m = Gram::from_twice(2, vec![2, -1, -1, 2]).unwrap();
        assert_eq!(reduce(&m).unwrap(), Gram::binary(1, 1, 1));
        let zero = Gram::diag_t(&[0, 0]);
        assert_eq!(reduce(&zero).unwrap(), zero);
        assert!(reduce(&Gram::from_twice(2, vec![2, 3, 3, 2]).unwrap()).is_err());
        let rank5 = Gram::diag_t(&[1, 1, 1, 1, 1]);
        assert!(reduce(&rank5).is_err());
    }

    #[test]
    fn idempotent_and_invariant() {
        let forms = [
            Gram::binary(1, 1, 2),
            Gram::binary(2, 1, 3),
            Gram::binary(1, 0, 7),
            Gram::diag_t(&[1, 1, 7, 7]),
        ];
        for f in &forms {
            let r = reduce(f).unwrap();
            assert_eq!(reduce(&r).unwrap(), r, "idempotence for {f}");
            assert_eq!(r.det2(), f.det2());
        }
        // A scrambled basis of the disc −7 form reduces back to it.
        let u = vec![vec![3, 1], vec![2, 1]]; // det 1
        let scrambled = Gram::binary(1, 1, 2).transform(&u);
        assert_eq!(reduce(&scrambled).unwrap(), Gram::binary(1, 1, 2));
        // Scaling commutes with reduction.
        let s = Gram::binary(1, 1, 2).transform(&u).scale(7);
        assert_eq!(reduce(&s).unwrap(), Gram::binary(1, 1, 2).scale(7));
    }

    #[test]
    fn rank_deficient_split() {
        // [[2,2],[2,2]] has radical (1,−1); definite part [2] ⇒ diag(2, 0).
        let g = Gram::from_twice(2, vec![2, 2, 2, 2]).unwrap();
        let r = reduce(&g).unwrap();
        assert_eq!(r.entries, vec![2, 0, 0, 0]);
        // diag(0, 3) moves the definite block to the front.
        let g = Gram::diag_t(&[0, 3]);
        assert_eq!(reduce(&g).unwrap().entries, vec![6, 0, 0, 0]);
        // Singular but nonzero rank-3 example.
        let g = Gram::from_twice(3, vec![2, 1, 3, 1, 4, 5, 3, 5, 8]).unwrap();
        assert_eq!(g.matrix_rank(), 2);
        let r = reduce(&g).unwrap();
        assert_eq!(r.e2(2, 2), 0);
        assert_eq!(r.matrix_rank(), 2);
        assert_eq!(reduce(&r).unwrap(), r);
    }

    #[test]
    fn sign_tie_breaking() {
        // Hexagonal lattice: smallest off-diagonal magnitude is 1; the
        // canonical pick is +1.
        for (a, b, c) in [(1, 1, 1), (1, -1, 1), (2, 1, 2), (2, -1, 2), (1, 1, 2)] {
            let r = reduce(&Gram::binary(a, b, c)).unwrap();
            assert!(r.e2(0, 1) >= 0, "({a},{b},{c}) reduced to {r}");
        }
    }
}
