//! The flat G2-structure on R^7: the 3-form, the cross product it induces,
//! Clifford multiplication on spinors `S = C ⊕ C^7`, the eigenspaces of
//! Clifford multiplication by a vector, and exact rotation angles of
//! integer matrices.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{Num, Zero};

use crate::cyclo;
use crate::error::{Error, Result};
use crate::group::AffineIsometry;
use crate::intmat;
use crate::lattice::{fixed_dual_sublattice, TorusLattice};
use crate::rational::{frac, r, to_f64};

/// Monomials `(i, j, k, sign)` of the standard 3-form, 1-based indices.
pub const PHI: [(usize, usize, usize, i8); 7] = [
    (1, 2, 7, 1),
    (1, 3, 6, 1),
    (1, 4, 5, 1),
    (2, 3, 5, 1),
    (2, 4, 6, -1),
    (3, 4, 7, 1),
    (5, 6, 7, 1),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeForm {
    pub coefficients: BTreeMap<(usize, usize, usize), i8>,
}

impl ThreeForm {
    pub fn standard() -> Self {
        ThreeForm {
            coefficients: PHI.iter().map(|&(i, j, k, s)| ((i, j, k), s)).collect(),
        }
    }

    /// Coefficient of `e^a ∧ e^b ∧ e^c` for arbitrary (0-based) indices, with sign.
    pub fn component(&self, a: usize, b: usize, c: usize) -> i8 {
        let mut idx = [a + 1, b + 1, c + 1];
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            return 0;
        }
        let mut sign = 1i8;
        for i in 0..3 {
            for j in 0..2 - i {
                if idx[j] > idx[j + 1] {
                    idx.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        sign * self
            .coefficients
            .get(&(idx[0], idx[1], idx[2]))
            .copied()
            .unwrap_or(0)
    }

    pub fn eval(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    let k = self.component(a, b, c);
                    if k != 0 {
                        s += k as f64 * u[a] * v[b] * w[c];
                    }
                }
            }
        }
        s
    }
}

/// `u × v`, defined by `φ(u, v, w) = <u × v, w>`.
pub fn cross_product<T>(u: &[T; 7], v: &[T; 7]) -> [T; 7]
where
    T: Copy + Num + Neg<Output = T>,
{
    let phi = ThreeForm::standard();
    let mut out = [T::zero(); 7];
    for (c, o) in out.iter_mut().enumerate() {
        for a in 0..7 {
            for b in 0..7 {
                match phi.component(a, b, c) {
                    1 => *o = *o + u[a] * v[b],
                    -1 => *o = *o - u[a] * v[b],
                    _ => {}
                }
            }
        }
    }
    out
}

/// An element `(λ, v)` of `S = C ⊕ C^7`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T> {
    pub scalar: T,
    pub vector: [T; 7],
}

impl<T: Copy + Num + Neg<Output = T>> Spinor<T> {
    pub fn new(scalar: T, vector: [T; 7]) -> Self {
        Spinor { scalar, vector }
    }

    pub fn zero() -> Self {
        Spinor::new(T::zero(), [T::zero(); 7])
    }

    pub fn scale(&self, k: T) -> Self {
        Spinor::new(self.scalar * k, self.vector.map(|x| x * k))
    }

    pub fn to_array(&self) -> [T; 8] {
        let mut a = [T::zero(); 8];
        a[0] = self.scalar;
        a[1..].copy_from_slice(&self.vector);
        a
    }

    pub fn from_array(a: [T; 8]) -> Self {
        let mut v = [T::zero(); 7];
        v.copy_from_slice(&a[1..]);
        Spinor::new(a[0], v)
    }
}

impl<T: Copy + Num + Neg<Output = T>> Add for Spinor<T> {
    type Output = Spinor<T>;
    fn add(self, o: Self) -> Self {
        let mut v = self.vector;
        for (x, y) in v.iter_mut().zip(o.vector) {
            *x = *x + y;
        }
        Spinor::new(self.scalar + o.scalar, v)
    }
}

impl<T: Copy + Num + Neg<Output = T>> Sub for Spinor<T> {
    type Output = Spinor<T>;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

/// `u · (λ, v) = (−<v, u>, λu + u × v)`.
pub fn clifford_mul<T>(u: &[T; 7], s: &Spinor<T>) -> Spinor<T>
where
    T: Copy + Num + Neg<Output = T>,
{
    let dot = (0..7).fold(T::zero(), |acc, i| acc + s.vector[i] * u[i]);
    let cross = cross_product(u, &s.vector);
    let mut v = [T::zero(); 7];
    for i in 0..7 {
        v[i] = s.scalar * u[i] + cross[i];
    }
    Spinor::new(-dot, v)
}

/// Hermitian product, linear in the first slot.
pub fn hermitian<T>(s: &Spinor<Complex<T>>, t: &Spinor<Complex<T>>) -> Complex<T>
where
    T: Copy + Num + Neg<Output = T>,
{
    s.to_array()
        .iter()
        .zip(t.to_array().iter())
        .fold(Complex::zero(), |acc, (a, b)| acc + *a * b.conj())
}

/// Real 8x8 matrix of Clifford multiplication by `u` on `R ⊕ R^7`.
pub fn clifford_matrix(u: &[f64; 7]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    for j in 0..8 {
        let mut e = [0.0; 8];
        e[j] = 1.0;
        let col = clifford_mul(u, &Spinor::from_array(e)).to_array();
        for i in 0..8 {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Action `(λ, v) -> (λ, R v)` of an ambient rotation on real spinors.
pub fn spinor_action(rot: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    m[(0, 0)] = 1.0;
    m.view_mut((1, 1), (7, 7)).copy_from(rot);
    m
}

pub type CSpinor = Spinor<Complex64>;

fn real_vec(u: &[f64; 7]) -> [Complex64; 7] {
    u.map(|x| Complex64::new(x, 0.0))
}

/// Orthonormal bases of `S_u^+` and `S_u^-`, the `-i|u|` and `+i|u|`
/// eigenspaces of Clifford multiplication by `u`.
pub fn spinor_eigenbasis(u: &[f64; 7]) -> Result<([CSpinor; 4], [CSpinor; 4])> {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if u[..6].iter().all(|&x| x == 0.0) {
        let (p, m) = (standard_basis(1.0), standard_basis(-1.0));
        return Ok(if u[6] > 0.0 { (p, m) } else { (m, p) });
    }
    let c = clifford_matrix(u).map(|x| Complex64::new(x, 0.0));
    let id = DMatrix::<Complex64>::identity(8, 8);
    let half = Complex64::new(0.5, 0.0);
    let i_over = Complex64::new(0.0, 1.0 / norm);
    let plus = (&id + &c * i_over) * half;
    let minus = (&id - &c * i_over) * half;
    Ok((gram_schmidt4(&plus), gram_schmidt4(&minus)))
}

/// The basis `s_0^± = (1, ±i e_7)/√2`, `s_k^± = (0, e_{2k-1} ± i e_{2k})/√2`.
fn standard_basis(sign: f64) -> [CSpinor; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = [CSpinor::zero(); 4];
    out[0].scalar = Complex64::new(h, 0.0);
    out[0].vector[6] = Complex64::new(0.0, sign * h);
    for k in 1..4 {
        out[k].vector[2 * k - 2] = Complex64::new(h, 0.0);
        out[k].vector[2 * k - 1] = Complex64::new(0.0, sign * h);
    }
    out
}

fn gram_schmidt4(proj: &DMatrix<Complex64>) -> [CSpinor; 4] {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for j in 0..8 {
        let mut v = proj.column(j).into_owned();
        for b in &basis {
            let c = b.dotc(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / Complex64::new(n, 0.0));
        }
        if basis.len() == 4 {
            break;
        }
    }
    assert_eq!(basis.len(), 4, "eigenspace of Clifford multiplication is not 4-dimensional");
    let mut out = [CSpinor::zero(); 4];
    for (o, b) in out.iter_mut().zip(&basis) {
        let mut a = [Complex64::zero(); 8];
        for i in 0..8 {
            a[i] = b[i];
        }
        *o = Spinor::from_array(a);
    }
    out
}

/// Numerical dimension of the `∓i|u|` eigenspaces.
pub fn eigenspace_dims(u: &[f64; 7]) -> (usize, usize) {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c = clifford_matrix(u).map(|x| Complex64::new(x, 0.0));
    let id = DMatrix::<Complex64>::identity(8, 8);
    let null = |lambda: Complex64| {
        let m = &c - &id * lambda;
        8 - m.svd(false, false).rank(1e-9 * norm.max(1.0))
    };
    (null(Complex64::new(0.0, -norm)), null(Complex64::new(0.0, norm)))
}

/// The Donnelly data of an element: circle translation `d` and rotation
/// angles, all in turns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleProfile {
    pub d: Rational64,
    pub angles: [Rational64; 3],
    pub sum_zero_certificate: bool,
}

impl AngleProfile {
    pub fn new(d: Rational64, angles: [Rational64; 3]) -> Self {
        let angles = angles.map(frac);
        let sum = angles.iter().fold(Rational64::zero(), |a, &b| a + b);
        AngleProfile {
            d: frac(d),
            angles,
            sum_zero_certificate: sum.is_integer(),
        }
    }

    /// `(x - 1) ∏ (x^2 - 2cos(2πθ_k) x + 1)`, computed exactly; `None` if not integral.
    pub fn charpoly(&self) -> Option<Vec<i64>> {
        let n = cyclo::field_for(&self.angles);
        let c = |k: i64| cyclo::Cyc::from_int(n, k);
        let mut p = vec![c(-1), c(1)];
        for &t in &self.angles {
            let mid = cyclo::cos_2pi(n, t) * c(-2);
            let mut next = vec![cyclo::Cyc::zero(n); p.len() + 2];
            for (i, a) in p.iter().enumerate() {
                next[i] = &next[i] + a;
                next[i + 1] = &next[i + 1] + &(a * &mid);
                next[i + 2] = &next[i + 2] + a;
            }
            p = next;
        }
        p.iter()
            .map(|z| {
                let q = z.as_rational()?;
                q.is_integer().then(|| q.to_integer().try_into().ok())?
            })
            .collect()
    }
}

/// Eigenvalue angles in `[0, 1/2]` of the linear part, one per conjugate
/// pair, after removing one eigenvalue 1.
fn pair_angles(linear: &intmat::IntMatrix) -> Result<Vec<Rational64>> {
    let cp = intmat::charpoly(linear);
    let factors = cyclo::cyclotomic_factors(&cp)
        .ok_or_else(|| Error::ValidationError("linear part is not of finite order".into()))?;
    let mut ones = 0usize;
    let mut minus = 0usize;
    let mut angles = Vec::new();
    for (n, m) in factors {
        match n {
            1 => ones += m,
            2 => minus += m,
            _ => {
                for _ in 0..m {
                    for k in 1..(n as i64 + 1) / 2 {
                        if num_integer::gcd(k, n as i64) == 1 {
                            angles.push(r(k, n as i64));
                        }
                    }
                }
            }
        }
    }
    if ones == 0 {
        return Err(Error::NoFixedDirection);
    }
    ones -= 1;
    if !ones.is_multiple_of(2) || !minus.is_multiple_of(2) {
        return Err(Error::ValidationError("eigenvalues do not pair into rotations".into()));
    }
    angles.extend(std::iter::repeat_n(Rational64::zero(), ones / 2));
    angles.extend(std::iter::repeat_n(r(1, 2), minus / 2));
    angles.sort();
    Ok(angles)
}

/// Complex structure `v -> f × v` on the complement of a unit vector `f`.
pub fn complex_structure(f: &[f64; 7]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(7, 7);
    for c in 0..7 {
        let mut e = [0.0; 7];
        e[c] = 1.0;
        let col = cross_product(f, &e);
        for i in 0..7 {
            j[(i, c)] = col[i];
        }
    }
    j
}

/// Unit ambient vector spanning the fixed line of `rot`, oriented so that its
/// last nonzero coordinate is positive.
pub fn fixed_direction(rot: &DMatrix<f64>) -> Option<[f64; 7]> {
    let m = rot - DMatrix::<f64>::identity(7, 7);
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let (idx, smallest) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    if *smallest > 1e-8 {
        return None;
    }
    let mut f = [0.0; 7];
    for i in 0..7 {
        f[i] = vt[(idx, i)];
    }
    let lead = f.iter().rev().find(|x| x.abs() > 1e-9).copied()?;
    if lead < 0.0 {
        f = f.map(|x| -x);
    }
    Some(f)
}

/// Circle translation `<u0, b>` where `u0` spans the fixed dual lattice;
/// zero when that lattice does not have rank one.
fn circle_translation(g: &AffineIsometry, lattice: &TorusLattice, f: Option<&[f64; 7]>) -> Rational64 {
    let fixed = fixed_dual_sublattice(&g.linear);
    if fixed.len() != 1 {
        return Rational64::zero();
    }
    let mut u0 = fixed[0].clone();
    if let (Some(f), Ok(amb)) = (f, lattice.dual_ambient(&u0)) {
        let dot: f64 = (0..7).map(|i| amb[i] * f[i]).sum();
        if dot < 0.0 {
            u0 = u0.neg();
        }
    } else if u0.coords.iter().rev().find(|&&c| c != 0).copied().unwrap_or(0) < 0 {
        u0 = u0.neg();
    }
    frac(
        u0.coords
            .iter()
            .zip(&g.translation)
            .fold(Rational64::zero(), |a, (&c, &b)| a + b * c),
    )
}

/// Exact rotation angles of an element with a fixed direction.
pub fn rotation_angles(g: &AffineIsometry, lattice: &TorusLattice) -> Result<AngleProfile> {
    if g.dim() != 7 {
        return Err(Error::ValidationError("rotation angles need a rank-7 action".into()));
    }
    let pairs = pair_angles(&g.linear)?;
    let candidates = sign_assignments(&pairs);
    if candidates.is_empty() {
        return Err(Error::ValidationError("no sign assignment sums to zero".into()));
    }
    match &lattice.embedding {
        Some(_) => {
            let rot = lattice.ambient_linear(&g.linear)?;
            let f = fixed_direction(&rot).ok_or(Error::NoFixedDirection)?;
            let chosen = match_orientation(&rot, &f, &candidates)?;
            let angles = order_by_planes(&rot, &f, chosen);
            Ok(AngleProfile::new(circle_translation(g, lattice, Some(&f)), angles))
        }
        None => {
            let sums: Vec<f64> = candidates
                .iter()
                .map(|a| a.iter().map(|&t| (2.0 * std::f64::consts::PI * to_f64(t)).sin()).sum())
                .collect();
            if sums.iter().any(|s| (s - sums[0]).abs() > 1e-12) {
                return Err(Error::AmbiguousOrientation);
            }
            Ok(AngleProfile::new(circle_translation(g, lattice, None), candidates[0]))
        }
    }
}

fn sign_assignments(pairs: &[Rational64]) -> Vec<[Rational64; 3]> {
    let mut out: Vec<[Rational64; 3]> = Vec::new();
    for mask in 0..8u8 {
        let a: [Rational64; 3] = std::array::from_fn(|k| {
            if mask >> k & 1 == 1 {
                frac(-pairs[k])
            } else {
                frac(pairs[k])
            }
        });
        let sum = a.iter().fold(Rational64::zero(), |s, &t| s + t);
        let mut sorted = a;
        sorted.sort();
        if sum.is_integer() && !out.contains(&sorted) {
            out.push(sorted);
        }
    }
    out
}

fn match_orientation(
    rot: &DMatrix<f64>,
    f: &[f64; 7],
    candidates: &[[Rational64; 3]],
) -> Result<[Rational64; 3]> {
    let j = complex_structure(f);
    let mut power = DMatrix::<f64>::identity(7, 7);
    let mut traces = Vec::new();
    for _ in 1..=3 {
        power = &power * rot;
        let re = power.trace() - 1.0;
        let im = -(&j * &power).trace();
        traces.push(Complex64::new(re / 2.0, im / 2.0));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut hits = candidates.iter().filter(|a| {
        (1..=3).all(|k| {
            let s: Complex64 = a
                .iter()
                .map(|&t| Complex64::from_polar(1.0, tau * k as f64 * to_f64(t)))
                .sum();
            (s - traces[k - 1]).norm() < 1e-8
        })
    });
    hits.next()
        .copied()
        .ok_or_else(|| Error::ValidationError("embedding does not preserve the G2-structure".into()))
}

/// Order angles by the planes `(e1,e2), (e3,e4), (e5,e6)` when the rotation
/// preserves them and fixes `e7`; otherwise keep ascending order.
fn order_by_planes(rot: &DMatrix<f64>, f: &[f64; 7], angles: [Rational64; 3]) -> [Rational64; 3] {
    if (f[6] - 1.0).abs() > 1e-9 {
        return angles;
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut pool = angles.to_vec();
    let mut out = [Rational64::zero(); 3];
    for k in 0..3 {
        let (a, b) = (2 * k, 2 * k + 1);
        let invariant = (0..7)
            .filter(|&i| i != a && i != b)
            .all(|i| rot[(i, a)].abs() < 1e-9 && rot[(i, b)].abs() < 1e-9);
        if !invariant {
            return angles;
        }
        let z = Complex64::new(rot[(a, a)], rot[(b, a)]);
        let Some(pos) = pool
            .iter()
            .position(|&t| (Complex64::from_polar(1.0, tau * to_f64(t)) - z).norm() < 1e-8)
        else {
            return angles;
        };
        out[k] = pool.remove(pos);
    }
    out
}

/// Maximum deviation of `φ(Ru, Rv, Rw)` from `φ(u, v, w)` over basis triples.
pub fn phi_residual(rot: &DMatrix<f64>) -> f64 {
    let phi = ThreeForm::standard();
    let col = |j: usize| -> Vec<f64> { (0..7).map(|i| rot[(i, j)]).collect() };
    let mut worst: f64 = 0.0;
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let lhs = phi.eval(&col(a), &col(b), &col(c));
                worst = worst.max((lhs - phi.component(a, b, c) as f64).abs());
            }
        }
    }
    worst
}

/// Exact check of `Σ sin(2π·2θ_k) = −4 ∏ sin(2πθ_k)` in a cyclotomic field.
pub fn trig_identity_exact(angles: &[Rational64; 3]) -> bool {
    let doubled: Vec<Rational64> = angles.iter().map(|&t| t * 2).collect();
    let n = cyclo::field_for(&doubled);
    let lhs = doubled
        .iter()
        .fold(cyclo::Cyc::zero(n), |acc, &t| acc + cyclo::sin_2pi(n, t));
    let prod = angles
        .iter()
        .fold(cyclo::Cyc::one(n), |acc, &t| acc * cyclo::sin_2pi(n, t));
    lhs == prod * cyclo::Cyc::from_int(n, -4)
}

/// `Σ_k sin(2πθ_k)` in double precision.
pub fn sin_sum(angles: &[Rational64; 3]) -> f64 {
    angles
        .iter()
        .map(|&t| (2.0 * std::f64::consts::PI * to_f64(t)).sin())
        .sum()
}

pub fn vec7<T: Copy>(v: &[T]) -> [T; 7] {
    std::array::from_fn(|i| v[i])
}

pub fn real_to_complex(u: &[f64; 7]) -> [Complex64; 7] {
    real_vec(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> [f64; 7] {
        let mut v = [0.0; 7];
        v[i - 1] = 1.0;
        v
    }

    #[test]
    fn cross_products_from_phi() {
        assert_eq!(cross_product(&e(1), &e(2)), e(7));
        assert_eq!(cross_product(&e(2), &e(4)), e(6).map(|x| -x));
        assert_eq!(cross_product(&e(3), &e(3)), [0.0; 7]);
    }

    #[test]
    fn clifford_on_e7() {
        let u = real_vec(&e(7));
        let one = Complex64::new(1.0, 0.0);
        let s = Spinor::new(one, [Complex64::zero(); 7]);
        let t = clifford_mul(&u, &s);
        assert_eq!(t.vector[6], one);
        let back = clifford_mul(&u, &t);
        assert_eq!(back.scalar, -one);
        let (plus, minus) = spinor_eigenbasis(&e(7)).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for s in plus {
            let d = clifford_mul(&u, &s) - s.scale(-i);
            assert!(d.to_array().iter().all(|z| z.norm() < 1e-15));
        }
        for s in minus {
            let d = clifford_mul(&u, &s) - s.scale(i);
            assert!(d.to_array().iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn negative_axis_swaps_roles() {
        let (p, m) = spinor_eigenbasis(&e(7)).unwrap();
        let (p2, m2) = spinor_eigenbasis(&e(7).map(|x| -2.0 * x)).unwrap();
        assert_eq!(p, m2);
        assert_eq!(m, p2);
        assert_eq!(spinor_eigenbasis(&[0.0; 7]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn generic_eigenbasis() {
        let u = [0.3, -1.0, 0.2, 0.0, 0.5, 0.1, -0.7];
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (plus, _) = spinor_eigenbasis(&u).unwrap();
        let uc = real_vec(&u);
        for s in plus {
            let d = clifford_mul(&uc, &s) - s.scale(Complex64::new(0.0, -norm));
            assert!(d.to_array().iter().all(|z| z.norm() < 1e-12));
        }
        assert_eq!(eigenspace_dims(&u), (4, 4));
    }

    #[test]
    fn standard_form_is_preserved_by_identity() {
        assert!(phi_residual(&DMatrix::identity(7, 7)) < 1e-15);
    }

    #[test]
    fn exact_trig_identity_at_thirds() {
        assert!(trig_identity_exact(&[r(1, 3), r(1, 3), r(1, 3)]));
        assert!(trig_identity_exact(&[r(1, 7), r(2, 7), r(4, 7)]));
        assert!(!trig_identity_exact(&[r(1, 3), r(1, 3), r(1, 4)]));
    }

    #[test]
    fn identity_angles() {
        let p = rotation_angles(&AffineIsometry::identity(7), &TorusLattice::standard(7)).unwrap();
        assert_eq!(p, AngleProfile::new(r(0, 1), [r(0, 1); 3]));
    }
}
