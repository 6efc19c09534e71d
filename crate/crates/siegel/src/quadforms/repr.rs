//! Representation numbers A(S, T) = #{X ∈ Z^{m×n} : XᵀSX = T} by pruned
//! column-by-column backtracking.
//!
//! Columns of X are constrained to S[x] = t_jj (Fincke–Pohst candidate
//! lists) and cross-column inner products to 2·s(x_i, x_j) = (2T)_ij. Two
//! engines share this structure:
//!
//! * a bitset engine used when the distinct candidate vectors fit a small
//!   shared pool: all pairwise inner products are tabulated once, per-level
//!   admissible sets become bitmasks updated incrementally, and the last
//!   level is counted by popcount (this is what makes ε(E8) ≈ 7·10⁸
//!   feasible);
//! * a plain backtracking fallback for large pools.

use super::{dot2, vectors_with_norm, Gram};

/// How many distinct candidate vectors the tabulating engine accepts.
const POOL_LIMIT: usize = 2600;

/// A(S, T): the number of integral matrices X with S[X] = T. S must be
/// positive definite; T may be arbitrary (non-semidefinite T yields 0).
pub fn repr_count(s: &Gram, t: &Gram) -> u64 {
    debug_assert!(s.is_positive_definite(), "representation counts need definite S");
    if t.rank == 0 {
        return 1;
    }
    if !t.is_positive_semidefinite() {
        return 0;
    }
    // Permute T so columns with few candidates are fixed first; X ↦ X·P is a
    // bijection between representations of T and of PᵀTP.
    let lists: Vec<Vec<Vec<i64>>> =
        (0..t.rank).map(|j| vectors_with_norm(s, t.e2(j, j))).collect();
    let mut order: Vec<usize> = (0..t.rank).collect();
    order.sort_by_key(|&j| lists[j].len());
    let perm: Vec<Vec<i64>> = order
        .iter()
        .map(|&j| (0..t.rank).map(|i| i64::from(i == j)).collect())
        .collect();
    let tp = t.transform(&perm);
    let lists: Vec<Vec<Vec<i64>>> = order.iter().map(|&j| lists[j].clone()).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return 0;
    }

    let mut pool: Vec<Vec<i64>> = lists.concat();
    pool.sort();
    pool.dedup();
    if pool.len() <= POOL_LIMIT {
        count_bitset(s, &tp, &pool, &lists)
    } else {
        count_plain(s, &tp, &lists)
    }
}

/// ε(S) = A(S, S), the order of the automorphism group of S.
pub fn epsilon(s: &Gram) -> u64 {
    repr_count(s, s)
}

fn count_plain(s: &Gram, t: &Gram, lists: &[Vec<Vec<i64>>]) -> u64 {
    let n = t.rank;
    fn rec(s: &Gram, t: &Gram, lists: &[Vec<Vec<i64>>], chosen: &mut Vec<usize>) -> u64 {
        let level = chosen.len();
        let n = t.rank;
        let mut total = 0;
        'cand: for (ci, cand) in lists[level].iter().enumerate() {
            for (i, &pi) in chosen.iter().enumerate() {
                if dot2(s, &lists[i][pi], cand) != t.e2(i, level) {
                    continue 'cand;
                }
            }
            if level + 1 == n {
                total += 1;
            } else {
                chosen.push(ci);
                total += rec(s, t, lists, chosen);
                chosen.pop();
            }
        }
        total
    }
    let mut chosen = Vec::with_capacity(n);
    rec(s, t, lists, &mut chosen)
}

/// Bitmask over pool indices.
type Mask = Vec<u64>;

fn count_bitset(s: &Gram, t: &Gram, pool: &[Vec<i64>], lists: &[Vec<Vec<i64>>]) -> u64 {
    let n = t.rank;
    let p = pool.len();
    let words = p.div_ceil(64);

    // Pairwise inner products (fits: POOL_LIMIT² i32 ≈ 27 MB transient max).
    let dots: Vec<i32> = {
        let mut d = vec![0i32; p * p];
        for (a, va) in pool.iter().enumerate() {
            for (b, vb) in pool.iter().enumerate().skip(a) {
                let v = i32::try_from(dot2(s, va, vb)).expect("inner product overflow");
                d[a * p + b] = v;
                d[b * p + a] = v;
            }
        }
        d
    };

    // For each required value t_ij, the per-vector bitset of partners.
    let mut values: Vec<i64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| t.e2(i, j))).collect();
    values.sort_unstable();
    values.dedup();
    let partner: Vec<Vec<Mask>> = values
        .iter()
        .map(|&val| {
            (0..p)
                .map(|a| {
                    let mut m = vec![0u64; words];
                    for b in 0..p {
                        if i64::from(dots[a * p + b]) == val {
                            m[b / 64] |= 1 << (b % 64);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let value_index = |v: i64| values.binary_search(&v).expect("tabulated value");

    // Initial per-level masks: candidates of that column.
    let pool_index = |v: &Vec<i64>| pool.binary_search(v).expect("pool member");
    let init: Vec<Mask> = lists
        .iter()
        .map(|l| {
            let mut m = vec![0u64; words];
            for v in l {
                let b = pool_index(v);
                m[b / 64] |= 1 << (b % 64);
            }
            m
        })
        .collect();

    // Constraint value index for each (level, future column) pair.
    let constraint: Vec<Vec<usize>> =
        (0..n).map(|i| (i + 1..n).map(|j| value_index(t.e2(i, j))).collect()).collect();

    // Allocation-free DFS: arena[level] holds the admissible masks for
    // columns level..n (flattened, `words` u64 each); descending refines the
    // suffix of the parent frame into the child frame.
    let mut arena: Vec<Vec<u64>> = (0..n).map(|l| vec![0u64; (n - l) * words]).collect();
    arena[0].copy_from_slice(&init.concat());

    fn run(
        level: usize,
        n: usize,
        words: usize,
        constraint: &[Vec<usize>],
        partner: &[Vec<Mask>],
        arena: &mut [Vec<u64>],
    ) -> u64 {
        if level + 1 == n {
            return arena[level].iter().map(|w| u64::from(w.count_ones())).sum();
        }
        let mut total = 0;
        for wi in 0..words {
            let mut bits = arena[level][wi];
            while bits != 0 {
                let b = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let (cur, rest) = arena.split_at_mut(level + 1);
                let parent = &cur[level];
                let child = &mut rest[0];
                let mut feasible = true;
                for (jj, &ci) in constraint[level].iter().enumerate() {
                    let pm = &partner[ci][b];
                    let mut any = 0u64;
                    for w in 0..words {
                        let v = parent[(jj + 1) * words + w] & pm[w];
                        child[jj * words + w] = v;
                        any |= v;
                    }
                    if any == 0 {
                        feasible = false;
                        break;
                    }
                }
                if feasible {
                    total += run(level + 1, n, words, constraint, partner, arena);
                }
            }
        }
        total
    }
    run(0, n, words, &constraint, &partner, &mut arena)
}
