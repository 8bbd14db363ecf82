//! Cyclotomic polynomials and exact arithmetic in the field Q(zeta_N).
//!
//! Elements are stored as rational coefficient vectors in the power basis
//! `1, z, ..., z^(phi(N)-1)` and reduced modulo the N-th cyclotomic
//! polynomial after every multiplication.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial, coefficients in ascending degree.
pub type Poly = Vec<i64>;

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count() as u32
}

fn trim(p: &mut Poly) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// Exact division by a monic polynomial; `None` if the remainder is nonzero.
pub fn div_exact(p: &[i64], d: &[i64]) -> Option<Poly> {
    debug_assert_eq!(*d.last().unwrap(), 1);
    if p.len() < d.len() {
        return if p.iter().all(|&c| c == 0) { Some(vec![0]) } else { None };
    }
    let mut r = p.to_vec();
    let mut q = vec![0i64; p.len() - d.len() + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + d.len() - 1];
        q[k] = c;
        if c != 0 {
            for (j, &dj) in d.iter().enumerate() {
                r[k + j] -= c * dj;
            }
        }
    }
    if r.iter().any(|&c| c != 0) {
        return None;
    }
    trim(&mut q);
    Some(q)
}

pub fn poly_mul(a: &[i64], b: &[i64]) -> Poly {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn cache() -> &'static Mutex<HashMap<u32, Arc<Poly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-th cyclotomic polynomial.
pub fn cyclotomic(n: u32) -> Arc<Poly> {
    assert!(n >= 1);
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut p: Poly = vec![0; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = div_exact(&p, &cyclotomic(d)).expect("cyclotomic divisor");
    }
    let p = Arc::new(p);
    cache().lock().unwrap().insert(n, p.clone());
    p
}

/// Factor a monic integer polynomial into cyclotomic factors.
///
/// Returns `(n, multiplicity)` pairs in increasing `n`, or `None` when some
/// factor is not cyclotomic.
pub fn cyclotomic_factors(p: &[i64]) -> Option<Vec<(u32, usize)>> {
    let mut rest = p.to_vec();
    trim(&mut rest);
    let deg = rest.len() as u32 - 1;
    let mut out = Vec::new();
    let mut n = 1;
    while rest.len() > 1 {
        if n > 4 * deg * deg + 4 {
            return None;
        }
        if euler_phi(n) <= deg {
            let phi = cyclotomic(n);
            let mut m = 0;
            while let Some(q) = div_exact(&rest, &phi) {
                rest = q;
                m += 1;
            }
            if m > 0 {
                out.push((n, m));
            }
        }
        n += 1;
    }
    (rest == vec![1]).then_some(out)
}

/// An element of Q(zeta_n).
#[derive(Clone)]
pub struct Cyc {
    n: u32,
    modulus: Arc<Poly>,
    c: Vec<BigRational>,
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        assert_eq!(self.n, other.n, "mixing cyclotomic fields");
        self.c == other.c
    }
}

impl Eq for Cyc {}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})z^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0 in Q(z{})", self.n)
        } else {
            write!(f, "{} in Q(z{})", terms.join(" + "), self.n)
        }
    }
}

impl Cyc {
    pub fn zero(n: u32) -> Self {
        let modulus = cyclotomic(n);
        let d = modulus.len() - 1;
        Cyc {
            n,
            modulus,
            c: vec![BigRational::zero(); d],
        }
    }

    pub fn from_rational(n: u32, q: &BigRational) -> Self {
        let mut z = Cyc::zero(n);
        z.c[0] = q.clone();
        z
    }

    pub fn from_int(n: u32, k: i64) -> Self {
        Cyc::from_rational(n, &BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_ratio(n: u32, q: Rational64) -> Self {
        Cyc::from_rational(n, &to_big(q))
    }

    pub fn one(n: u32) -> Self {
        Cyc::from_int(n, 1)
    }

    /// `zeta_n^k`.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let mut raw = vec![BigRational::zero(); k + 1];
        raw[k] = BigRational::one();
        Cyc::reduce(n, raw)
    }

    /// `e^(2 pi i t)` for a rational turn fraction `t` whose denominator divides `n`.
    pub fn root(n: u32, t: Rational64) -> Self {
        let k = t * Rational64::from_integer(n as i64);
        assert!(k.is_integer(), "turn {t} is not an {n}-th root of unity");
        Cyc::zeta_pow(n, k.to_integer())
    }

    /// The imaginary unit; requires `4 | n`.
    pub fn i(n: u32) -> Self {
        assert_eq!(n % 4, 0, "Q(zeta_{n}) does not contain i");
        Cyc::zeta_pow(n, (n / 4) as i64)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.c[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.c[0].clone())
    }

    fn reduce(n: u32, mut raw: Vec<BigRational>) -> Self {
        let modulus = cyclotomic(n);
        let d = modulus.len() - 1;
        for k in (d..raw.len()).rev() {
            let t = std::mem::take(&mut raw[k]);
            if t.is_zero() {
                continue;
            }
            for (j, &m) in modulus[..d].iter().enumerate() {
                if m != 0 {
                    raw[k - d + j] -= &t * BigRational::from_integer(BigInt::from(m));
                }
            }
        }
        raw.resize(d, BigRational::zero());
        Cyc { n, modulus, c: raw }
    }

    pub fn conj(&self) -> Self {
        let mut raw = vec![BigRational::zero(); self.n as usize + 1];
        for (k, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                let j = (self.n as usize - k) % self.n as usize;
                raw[j] += c;
            }
        }
        Cyc::reduce(self.n, raw)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyc {
            n: self.n,
            modulus: self.modulus.clone(),
            c: self.c.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Cyc::from_rational(self.n, &q.recip()));
        }
        // Solve (self * y) = 1 through the multiplication matrix.
        let d = self.c.len();
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        for j in 0..d {
            cols.push((self * &Cyc::zeta_pow(self.n, j as i64)).c);
        }
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let p = (col..d).find(|&r| !a[r][col].is_zero())?;
            a.swap(p, col);
            let piv = a[col][col].clone();
            for v in a[col].iter_mut() {
                *v /= &piv;
            }
            let prow = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= &f * pv;
                    }
                }
            }
        }
        let y = a.into_iter().map(|row| row[d].clone()).collect();
        Some(Cyc {
            n: self.n,
            modulus: self.modulus.clone(),
            c: y,
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI / self.n as f64;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Complex64::from_polar(1.0, w * k as f64) * c.to_f64().unwrap())
            .sum()
    }
}

impl Add<&Cyc> for &Cyc {
    type Output = Cyc;
    fn add(self, o: &Cyc) -> Cyc {
        assert_eq!(self.n, o.n);
        Cyc {
            n: self.n,
            modulus: self.modulus.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Cyc> for &Cyc {
    type Output = Cyc;
    fn sub(self, o: &Cyc) -> Cyc {
        assert_eq!(self.n, o.n);
        Cyc {
            n: self.n,
            modulus: self.modulus.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Cyc> for &Cyc {
    type Output = Cyc;
    fn mul(self, o: &Cyc) -> Cyc {
        assert_eq!(self.n, o.n);
        let d = self.c.len();
        let mut raw = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.c.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                raw[i + j] += a * b;
            }
        }
        Cyc::reduce(self.n, raw)
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            n: self.n,
            modulus: self.modulus.clone(),
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Cyc> for Cyc {
            type Output = Cyc;
            fn $m(self, o: Cyc) -> Cyc {
                (&self).$m(&o)
            }
        }
        impl $tr<&Cyc> for Cyc {
            type Output = Cyc;
            fn $m(self, o: &Cyc) -> Cyc {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -(&self)
    }
}

pub fn to_big(q: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Convert back to a machine rational when it fits.
pub fn from_big(q: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(q.numer().to_i64()?, q.denom().to_i64()?))
}

/// Smallest field order `N` (a multiple of 4) containing all `e^(2 pi i t)`.
pub fn field_for(turns: &[Rational64]) -> u32 {
    turns
        .iter()
        .fold(4i64, |acc, t| acc.lcm(t.denom()))
        .try_into()
        .expect("field order")
}

/// `cot(pi t)`; `None` when `t` is an integer.
pub fn cot_pi(n: u32, t: Rational64) -> Option<Cyc> {
    let z = Cyc::root(n, t);
    let den = &z - &Cyc::one(n);
    let num = &(&z + &Cyc::one(n)) * &Cyc::i(n);
    Some(&num * &den.inv()?)
}

/// `sin(2 pi t)`.
pub fn sin_2pi(n: u32, t: Rational64) -> Cyc {
    let z = Cyc::root(n, t);
    let diff = &z - &z.conj();
    // (z - 1/z) / (2i) = -(i/2)(z - 1/z)
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    (&diff * &Cyc::i(n)).scale(&half)
}

/// `cos(2 pi t)`.
pub fn cos_2pi(n: u32, t: Rational64) -> Cyc {
    let z = Cyc::root(n, t);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    (&z + &z.conj()).scale(&half)
}

/// A dense matrix over Q(zeta_n), row-major.
pub type CycMatrix = Vec<Vec<Cyc>>;

pub fn mat_identity(n: u32, dim: usize) -> CycMatrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { Cyc::one(n) } else { Cyc::zero(n) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &CycMatrix, b: &CycMatrix) -> CycMatrix {
    let n = a[0][0].order();
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Cyc::zero(n);
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc + &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &CycMatrix, v: &[Cyc]) -> Vec<Cyc> {
    let n = v[0].order();
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Cyc::zero(n), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

pub fn mat_scale_add(a: &CycMatrix, s: &Cyc, b: &CycMatrix) -> CycMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + &(s * y)).collect())
        .collect()
}

pub fn mat_neg(a: &CycMatrix) -> CycMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut CycMatrix) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].inv().unwrap();
        for v in a[r].iter_mut().skip(c) {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow).skip(c) {
                    if !pv.is_zero() {
                        *v = &*v - &(&f * pv);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of the right kernel, as vectors.
pub fn kernel(a: &CycMatrix) -> Vec<Vec<Cyc>> {
    let cols = a[0].len();
    let n = a[0][0].order();
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Cyc::zero(n); cols];
            v[f] = Cyc::one(n);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            v
        })
        .collect()
}

pub fn rank(a: &CycMatrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Coordinates of `v` in the basis `basis` (columns), if it lies in their span.
pub fn solve_in_span(basis: &[Vec<Cyc>], v: &[Cyc]) -> Option<Vec<Cyc>> {
    let dim = v.len();
    let k = basis.len();
    let n = v[0].order();
    let mut a: CycMatrix = (0..dim)
        .map(|i| {
            let mut row: Vec<Cyc> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Cyc::zero(n); k];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][k].clone();
    }
    Some(x)
}

/// Magnitude of the largest rational coefficient, for diagnostics.
pub fn height(z: &Cyc) -> f64 {
    z.c.iter()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic(1), vec![-1, 1]);
        assert_eq!(*cyclotomic(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn factor_product_of_cyclotomics() {
        let p = poly_mul(&poly_mul(&cyclotomic(1), &cyclotomic(3)), &cyclotomic(3));
        assert_eq!(cyclotomic_factors(&p), Some(vec![(1, 1), (3, 2)]));
        assert_eq!(cyclotomic_factors(&[1, -3, 1]), None);
    }

    #[test]
    fn cot_and_sin_at_thirds() {
        let n = 12;
        let c = cot_pi(n, r(1, 3)).unwrap();
        // cot(pi/3)^2 = 1/3
        let sq = (&c * &c).as_rational().unwrap();
        assert_eq!(sq, to_big(r(1, 3)));
        assert!((c.to_complex().re - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let s = sin_2pi(n, r(1, 4));
        assert_eq!(s.as_rational().unwrap(), to_big(r(1, 1)));
        assert!(cot_pi(n, r(0, 1)).is_none());
    }

    #[test]
    fn inverse_is_exact() {
        let n = 28;
        let z = &Cyc::zeta_pow(n, 3) + &Cyc::from_int(n, 2);
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, Cyc::one(n));
    }

    #[test]
    fn kernel_of_rotation_minus_identity() {
        let n = 12;
        let c = cos_2pi(n, r(1, 6));
        let s = sin_2pi(n, r(1, 6));
        let one = Cyc::one(n);
        let rot = vec![
            vec![&c - &one, -&s, Cyc::zero(n)],
            vec![s.clone(), &c - &one, Cyc::zero(n)],
            vec![Cyc::zero(n), Cyc::zero(n), Cyc::zero(n)],
        ];
        let k = kernel(&rot);
        assert_eq!(k.len(), 1);
        assert!(k[0][0].is_zero() && k[0][1].is_zero());
    }
}
