//! Exact integer matrix algebra: determinants, Smith normal form, integer
//! kernels and characteristic polynomials.
//!
//! Matrices are small (at most 8x8 in practice), so everything is dense and
//! straightforward. Entries are `i64`; intermediate products use `i128`.

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::Zero;

pub type IntMatrix = DMatrix<i64>;

pub fn identity(n: usize) -> IntMatrix {
    IntMatrix::identity(n, n)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMatrix) -> i64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    rational_rank(&to_rational(m))
}

pub fn to_rational(m: &IntMatrix) -> DMatrix<Rational64> {
    m.map(Rational64::from_integer)
}

pub fn rational_rank(m: &DMatrix<Rational64>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let piv = a[(r, c)];
        for i in 0..rows {
            if i != r && !a[(i, c)].is_zero() {
                let f = a[(i, c)] / piv;
                for j in 0..cols {
                    let v = a[(r, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Result of a Smith normal form computation: `left * m * right = diag`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub diag: IntMatrix,
    /// Nonzero elementary divisors, each dividing the next.
    pub divisors: Vec<i64>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

pub fn smith(m: &IntMatrix) -> Smith {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut left = identity(rows);
    let mut right = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[(i, j)] != 0
                    && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_columns(t, pj);
        right.swap_columns(t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            let q = a[(i, t)].div_euclid(a[(t, t)]);
            if q != 0 {
                row_add(&mut a, i, t, -q);
                row_add(&mut left, i, t, -q);
            }
            if a[(i, t)] != 0 {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = a[(t, j)].div_euclid(a[(t, t)]);
            if q != 0 {
                col_add(&mut a, j, t, -q);
                col_add(&mut right, j, t, -q);
            }
            if a[(t, j)] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // enforce divisibility of the remaining block by the pivot
        let p = a[(t, t)];
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| a[(i, j)] % p != 0);
        if let Some((i, _)) = bad {
            row_add(&mut a, t, i, 1);
            row_add(&mut left, t, i, 1);
            continue;
        }
        if p < 0 {
            for j in 0..cols {
                a[(t, j)] = -a[(t, j)];
            }
            for j in 0..rows {
                left[(t, j)] = -left[(t, j)];
            }
        }
        t += 1;
    }
    let divisors = (0..rows.min(cols))
        .map(|i| a[(i, i)])
        .take_while(|&d| d != 0)
        .collect();
    Smith {
        left,
        right,
        diag: a,
        divisors,
    }
}

fn row_add(m: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    for j in 0..m.ncols() {
        let v = m[(src, j)];
        m[(dst, j)] += k * v;
    }
}

fn col_add(m: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    for i in 0..m.nrows() {
        let v = m[(i, src)];
        m[(i, dst)] += k * v;
    }
}

/// A saturated Z-basis of `{x in Z^n : m x = 0}`, as columns.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let s = smith(m);
    let r = s.rank();
    let n = m.ncols();
    s.right.columns(r, n - r).into_owned()
}

/// Characteristic polynomial `det(xI - m)`, coefficients in ascending degree.
pub fn charpoly(m: &IntMatrix) -> Vec<i64> {
    // Faddeev-LeVerrier; every division is exact for integer input.
    let n = m.nrows();
    let a: DMatrix<i128> = m.map(|v| v as i128);
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let mut mk = DMatrix::<i128>::zeros(n, n);
    for k in 1..=n {
        let mut next = &a * &mk;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        mk = next;
        let am = &a * &mk;
        let tr: i128 = (0..n).map(|i| am[(i, i)]).sum();
        debug_assert_eq!(tr % k as i128, 0);
        coeffs[n - k] = -tr / k as i128;
    }
    coeffs.into_iter().map(|c| c as i64).collect()
}

/// Multiplicative order of `m`, if it is at most `bound`.
pub fn order(m: &IntMatrix, bound: usize) -> Option<usize> {
    let n = m.nrows();
    let id = identity(n);
    let mut p = m.clone();
    for k in 1..=bound {
        if p == id {
            return Some(k);
        }
        p = &p * m;
    }
    None
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let d = det(m);
    if d.abs() != 1 {
        return None;
    }
    let n = m.nrows();
    let q = to_rational(m);
    let inv = rational_inverse(&q)?;
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = inv[(i, j)];
            if !v.is_integer() {
                return None;
            }
            out[(i, j)] = v.to_integer();
        }
    }
    Some(out)
}

pub fn rational_inverse(m: &DMatrix<Rational64>) -> Option<DMatrix<Rational64>> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = DMatrix::<Rational64>::identity(n, n);
    for c in 0..n {
        let p = (c..n).find(|&i| !a[(i, c)].is_zero())?;
        a.swap_rows(p, c);
        inv.swap_rows(p, c);
        let piv = a[(c, c)];
        for j in 0..n {
            a[(c, j)] /= piv;
            inv[(c, j)] /= piv;
        }
        for i in 0..n {
            if i != c && !a[(i, c)].is_zero() {
                let f = a[(i, c)];
                for j in 0..n {
                    let (x, y) = (a[(c, j)], inv[(c, j)]);
                    a[(i, j)] -= f * x;
                    inv[(i, j)] -= f * y;
                }
            }
        }
    }
    Some(inv)
}
