//! Small exact matrix kernels: fraction-free determinants, integer kernel
//! bases, rational symmetric diagonalization, F_q diagonalization, and LDLᵀ
//! factorizations.
//!
//! Matrices are flat row-major `&[i64]` slices with explicit dimensions.
//! Everything here targets the tiny sizes (n ≤ 8) used by quadratic-form
//! bookkeeping; intermediate values of the fraction-free eliminations are
//! minors of the input, so `i128` working storage cannot overflow at these
//! sizes.

use num_traits::{One, Signed, Zero};

use crate::exact::{rat, Rational};

/// Determinant by the Bareiss fraction-free algorithm.
pub fn det(a: &[i64], n: usize) -> i128 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return 1;
    }
    let mut m: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for j in 0..n {
                m.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j];
                debug_assert_eq!(v % prev, 0);
                m[i * n + j] = v / prev;
            }
            m[i * n + k] = 0;
        }
        prev = m[k * n + k];
    }
    sign * m[n * n - 1]
}

/// Leading principal minors det(A_1), …, det(A_n).
pub fn leading_minors(a: &[i64], n: usize) -> Vec<i128> {
    (1..=n)
        .map(|r| {
            let sub: Vec<i64> = (0..r).flat_map(|i| (0..r).map(move |j| a[i * n + j])).collect();
            det(&sub, r)
        })
        .collect()
}

/// Rank over Q of an r×c integer matrix.
pub fn rank(a: &[i64], rows: usize, cols: usize) -> usize {
    let mut m: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..rows).find(|&r| m[r * cols + col] != 0) else {
            continue;
        };
        for j in 0..cols {
            m.swap(row * cols + j, piv * cols + j);
        }
        for r in row + 1..rows {
            let (f, g) = (m[r * cols + col], m[row * cols + col]);
            if f != 0 {
                for j in 0..cols {
                    m[r * cols + j] = m[r * cols + j] * g - f * m[row * cols + j];
                }
            }
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Basis of the integer kernel of `a` (n×n) together with a completion: the
/// two lists concatenated form a Z-basis of Z^n (so the kernel summand is
/// saturated). Computed by unimodular column reduction of A tracked in V:
/// the columns of V at which A·V vanishes span ker over Z.
pub fn kernel_and_completion(a: &[i64], n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    debug_assert_eq!(a.len(), n * n);
    let mut av: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut v: Vec<i128> = vec![0; n * n];
    for i in 0..n {
        v[i * n + i] = 1;
    }
    let col_swap = |m: &mut Vec<i128>, c1: usize, c2: usize| {
        for i in 0..n {
            m.swap(i * n + c1, i * n + c2);
        }
    };
    let col_addmul = |m: &mut Vec<i128>, dst: usize, src: usize, f: i128| {
        for i in 0..n {
            m[i * n + dst] += f * m[i * n + src];
        }
    };
    let mut pivot_cols = 0usize;
    for row in 0..n {
        // Gcd-reduce the entries of this row across the non-pivot columns.
        loop {
            let mut best: Option<usize> = None;
            for c in pivot_cols..n {
                if av[row * n + c] != 0
                    && best.is_none_or(|b| av[row * n + c].abs() < av[row * n + b].abs())
                {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            let pivot = av[row * n + b];
            let mut done = true;
            for c in pivot_cols..n {
                if c != b && av[row * n + c] != 0 {
                    let f = av[row * n + c].div_euclid(pivot);
                    col_addmul(&mut av, c, b, -f);
                    col_addmul(&mut v, c, b, -f);
                    if av[row * n + c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                col_swap(&mut av, pivot_cols, b);
                col_swap(&mut v, pivot_cols, b);
                pivot_cols += 1;
                break;
            }
        }
    }
    let column = |m: &Vec<i128>, c: usize| -> Vec<i64> {
        (0..n).map(|i| i64::try_from(m[i * n + c]).expect("kernel entry overflow")).collect()
    };
    let mut kernel = Vec::new();
    let mut completion = Vec::new();
    for c in 0..n {
        if (0..n).all(|i| av[i * n + c] == 0) {
            kernel.push(column(&v, c));
        } else {
            completion.push(column(&v, c));
        }
    }
    (kernel, completion)
}

/// W ᵀ·A·W for an n×n symmetric A and n×r transform W (columns = images of
/// the new basis vectors); result is r×r row-major.
pub fn transform(a: &[i64], n: usize, w: &[Vec<i64>]) -> Vec<i64> {
    let r = w.len();
    let mut out = vec![0i64; r * r];
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            let mut acc: i128 = 0;
            for (p, &wip) in wi.iter().enumerate() {
                for (q, &wjq) in wj.iter().enumerate() {
                    acc += wip as i128 * a[p * n + q] as i128 * wjq as i128;
                }
            }
            out[i * r + j] = i64::try_from(acc).expect("transform overflow");
        }
    }
    out
}

/// Diagonal of a congruence diagonalization of a symmetric matrix over Q
/// (zero entries kept for singular input).
pub fn symmetric_diagonal(a: &[i64], n: usize) -> Vec<Rational> {
    let mut g: Vec<Rational> = a.iter().map(|&x| rat(x)).collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if g[k * n + k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !g[i * n + i].is_zero()) {
                for j in 0..n {
                    g.swap(k * n + j, i * n + j);
                }
                for j in 0..n {
                    g.swap(j * n + k, j * n + i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !g[k * n + j].is_zero()) {
                // Whole remaining diagonal is zero: make g_kk = 2·g_kj ≠ 0.
                for c in 0..n {
                    let add = g[j * n + c].clone();
                    g[k * n + c] += add;
                }
                for r in 0..n {
                    let add = g[r * n + j].clone();
                    g[r * n + k] += add;
                }
            } else {
                diag.push(Rational::zero());
                continue;
            }
        }
        let pivot = g[k * n + k].clone();
        for i in k + 1..n {
            if !g[i * n + k].is_zero() {
                let f = &g[i * n + k] / &pivot;
                for c in 0..n {
                    let sub = &f * &g[k * n + c];
                    g[i * n + c] -= sub;
                }
                for r in 0..n {
                    let sub = &f * &g[r * n + k];
                    g[r * n + i] -= sub;
                }
            }
        }
        diag.push(pivot);
    }
    diag
}

/// Diagonal of a congruence diagonalization over F_q (q an odd prime);
/// entries returned in [0, q).
pub fn fq_diagonal(a: &[i64], n: usize, q: u64) -> Vec<u64> {
    let q = q as i128;
    let md = |x: i128| -> i128 { x.rem_euclid(q) };
    let mut g: Vec<i128> = a.iter().map(|&x| md(x as i128)).collect();
    let inv = |x: i128| -> i128 {
        // Fermat inverse, q prime.
        let mut base = md(x);
        let mut e = q - 2;
        let mut acc = 1i128;
        while e > 0 {
            if e & 1 == 1 {
                acc = md(acc * base);
            }
            base = md(base * base);
            e >>= 1;
        }
        acc
    };
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if g[k * n + k] == 0 {
            if let Some(i) = (k + 1..n).find(|&i| g[i * n + i] != 0) {
                for j in 0..n {
                    g.swap(k * n + j, i * n + j);
                }
                for j in 0..n {
                    g.swap(j * n + k, j * n + i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| g[k * n + j] != 0) {
                for c in 0..n {
                    g[k * n + c] = md(g[k * n + c] + g[j * n + c]);
                }
                for r in 0..n {
                    g[r * n + k] = md(g[r * n + k] + g[r * n + j]);
                }
            } else {
                diag.push(0);
                continue;
            }
        }
        let pivot = g[k * n + k];
        let pinv = inv(pivot);
        for i in k + 1..n {
            if g[i * n + k] != 0 {
                let f = md(g[i * n + k] * pinv);
                for c in 0..n {
                    g[i * n + c] = md(g[i * n + c] - f * g[k * n + c]);
                }
                for r in 0..n {
                    g[r * n + i] = md(g[r * n + i] - f * g[r * n + k]);
                }
            }
        }
        diag.push(pivot as u64);
    }
    diag
}

/// LDLᵀ factorization of a symmetric positive definite integer matrix:
/// returns (L, D) with L unit lower triangular and D the positive pivot
/// diagonal, or None if the matrix is not positive definite.
pub fn ldlt(a: &[i64], n: usize) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = rat(a[j * n + j]);
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        l[j][j] = Rational::one();
        for i in j + 1..n {
            let mut v = rat(a[i * n + j]);
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d.push(dj);
    }
    Some((l, d))
}

/// Inverse of a square rational matrix, or None if singular.
pub fn rat_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let (sa, si) = (&f * &a[col][j], &f * &inv[col][j]);
                    a[r][j] -= sa;
                    inv[r][j] -= si;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[], 0), 1);
        assert_eq!(det(&[5], 1), 5);
        assert_eq!(det(&[2, 1, 1, 4], 2), 7);
        assert_eq!(det(&[0, 1, 1, 0], 2), -1);
        // Singular.
        assert_eq!(det(&[1, 2, 2, 4], 2), 0);
        let e8 = crate::quadforms::e8_twice_gram();
        assert_eq!(det(&e8.entries, 8), 1);
    }

    #[test]
    fn ranks_and_kernels() {
        assert_eq!(rank(&[1, 2, 2, 4], 2, 2), 1);
        assert_eq!(rank(&[2, 1, 1, 4], 2, 2), 2);
        let (ker, comp) = kernel_and_completion(&[1, 2, 2, 4], 2);
        assert_eq!(ker.len(), 1);
        assert_eq!(comp.len(), 1);
        let k = &ker[0];
        assert_eq!(k[0] + 2 * k[1], 0);
        // Completion really completes: the 2×2 matrix [comp | ker] is unimodular.
        let u = [comp[0][0], ker[0][0], comp[0][1], ker[0][1]];
        assert_eq!(det(&u, 2).abs(), 1);
        let (ker0, comp0) = kernel_and_completion(&[0, 0, 0, 0], 2);
        assert_eq!((ker0.len(), comp0.len()), (2, 0));
    }

    #[test]
    fn diagonalization() {
        let d = symmetric_diagonal(&[2, 1, 1, 4], 2);
        assert_eq!(d[0], rat(2));
        assert_eq!(d[1], crate::exact::frac(7, 2));
        // Zero-diagonal trick.
        let d = symmetric_diagonal(&[0, 1, 1, 0], 2);
        assert!(!d[0].is_zero() && !d[1].is_zero());
        assert!((&d[0] * &d[1]).is_negative());
    }

    #[test]
    fn fq_diagonals() {
        let d = fq_diagonal(&[2, 1, 1, 4], 2, 7);
        assert_eq!(d.iter().filter(|&&x| x == 0).count(), 1);
        let unit: u64 = d.iter().copied().filter(|&x| x != 0).product();
        // Regular part is ⟨2⟩ up to squares mod 7.
        assert_eq!(crate::chars::kronecker(unit as i64, 7), crate::chars::kronecker(2, 7));
        let d = fq_diagonal(&[0, 1, 1, 0], 2, 5);
        assert!(d.iter().all(|&x| x != 0));
    }

    #[test]
    fn ldlt_and_inverse() {
        assert!(ldlt(&[2, 1, 1, 4], 2).is_some());
        assert!(ldlt(&[2, 3, 3, 2], 2).is_none());
        assert!(ldlt(&[0, 0, 0, 0], 2).is_none());
        let (l, d) = ldlt(&[2, 1, 1, 4], 2).unwrap();
        assert_eq!(d[0], rat(2));
        assert_eq!(d[1], crate::exact::frac(7, 2));
        assert_eq!(l[1][0], crate::exact::frac(1, 2));

        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(4)]];
        let inv = rat_inverse(&m).unwrap();
        assert_eq!(inv[0][0], crate::exact::frac(4, 7));
        assert_eq!(inv[0][1], crate::exact::frac(-1, 7));
        assert!(rat_inverse(&vec![vec![rat(0)]]).is_none());
    }
}
