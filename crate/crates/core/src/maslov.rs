//! Maslov indices for the decomposition of a dihedral orbifold along the
//! cross-section `T^6`: `O_+ = (T^6 x [-1/4a, 1/4a]) / beta` and
//! `O_- = (T^6 x [1/4a, 3/4a]) / alpha beta`.
//!
//! Both the 20-dimensional `H^3(T^6)` (complex structure: Hodge star) and the
//! 8-dimensional spinor space `R + R^7` (complex structure: Clifford
//! multiplication by `e_7`) are handled exactly over a cyclotomic field.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::catalog::{DihedralData, OrbifoldSpec};
use crate::cyclo::{self, Cyc, CycMatrix};
use crate::error::{Error, Result};
use crate::eta_sign::{EtaValue, Provenance};
use crate::g2clifford::clifford_matrix;
use crate::nu::{compute_nu, group_of};
use crate::rational::{format_rational, frac};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// `H^3(T^6) = Lambda^3 (R^6)^*`.
    Cohomology,
    /// Parallel spinors `R + R^7` on `T^6 x R`.
    Spinor,
}

#[derive(Debug, Clone)]
pub struct SymplecticSpace {
    pub kind: SpaceKind,
    pub dimension: usize,
    pub basis_labels: Vec<String>,
    pub complex_structure: CycMatrix,
    field: u32,
}

#[derive(Debug, Clone)]
pub struct Lagrangian {
    pub space: SymplecticSpace,
    pub basis: Vec<Vec<Cyc>>,
    pub involution: CycMatrix,
}

/// Sorted 3-subsets of `{0, .., 5}` in lexicographic order.
pub fn triples() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(20);
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn coordinate_name(i: usize) -> String {
    let plane = i / 2 + 1;
    if i.is_multiple_of(2) {
        format!("x{plane}")
    } else {
        format!("y{plane}")
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn int_matrix(n: u32, rows: &[Vec<i64>]) -> CycMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| Cyc::from_int(n, x)).collect())
        .collect()
}

fn hodge_star(n: u32) -> CycMatrix {
    let ts = triples();
    let mut m = vec![vec![0i64; 20]; 20];
    for (col, t) in ts.iter().enumerate() {
        let rest: Vec<usize> = (0..6).filter(|i| !t.contains(i)).collect();
        let mut perm = t.to_vec();
        perm.extend(&rest);
        let row = ts.iter().position(|s| s[..] == rest[..]).unwrap();
        m[row][col] = permutation_sign(&perm);
    }
    int_matrix(n, &m)
}

fn clifford_e7(n: u32) -> CycMatrix {
    let mut e7 = [0.0; 7];
    e7[6] = 1.0;
    let m = clifford_matrix(&e7);
    let rows: Vec<Vec<i64>> = (0..8)
        .map(|i| (0..8).map(|j| m[(i, j)].round() as i64).collect())
        .collect();
    int_matrix(n, &rows)
}

impl SymplecticSpace {
    pub fn cohomology(field: u32) -> Self {
        SymplecticSpace {
            kind: SpaceKind::Cohomology,
            dimension: 20,
            basis_labels: triples()
                .iter()
                .map(|t| t.iter().map(|&i| format!("d{}", coordinate_name(i))).collect())
                .collect(),
            complex_structure: hodge_star(field),
            field,
        }
    }

    pub fn spinor(field: u32) -> Self {
        let mut labels = vec!["1".to_string()];
        labels.extend((1..=7).map(|i| format!("e{i}")));
        SymplecticSpace {
            kind: SpaceKind::Spinor,
            dimension: 8,
            basis_labels: labels,
            complex_structure: clifford_e7(field),
            field,
        }
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    /// Action of an isometry of `R^7` (given on vectors) on this space.
    pub fn induced(&self, rot: &CycMatrix) -> CycMatrix {
        let n = self.field;
        match self.kind {
            SpaceKind::Cohomology => {
                let ts = triples();
                let minor = |rows: &[usize; 3], cols: &[usize; 3]| {
                    let m = |i: usize, j: usize| &rot[rows[i]][cols[j]];
                    let a = &(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1));
                    let b = &(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0));
                    let c = &(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0));
                    &(&(m(0, 0) * &a) - &(m(0, 1) * &b)) + &(m(0, 2) * &c)
                };
                // pullback: g^* e_I = sum_J det G[I, J] e_J
                ts.iter()
                    .map(|j| ts.iter().map(|i| minor(i, j)).collect())
                    .collect()
            }
            SpaceKind::Spinor => {
                let mut m = cyclo::mat_identity(n, 8);
                for i in 0..7 {
                    for j in 0..7 {
                        m[i + 1][j + 1] = rot[i][j].clone();
                    }
                }
                m
            }
        }
    }

    /// Basis of the `(-i)`-eigenspace of the complex structure.
    pub fn minus_i_eigenspace(&self) -> Vec<Vec<Cyc>> {
        let n = self.field;
        let shifted = cyclo::mat_scale_add(
            &self.complex_structure,
            &Cyc::i(n),
            &cyclo::mat_identity(n, self.dimension),
        );
        cyclo::kernel(&shifted)
    }
}

fn is_identity(m: &CycMatrix) -> bool {
    let n = m[0][0].order();
    *m == cyclo::mat_identity(n, m.len())
}

fn anticommutes(a: &CycMatrix, j: &CycMatrix) -> bool {
    let ab = cyclo::mat_mul(a, j);
    let ba = cyclo::mat_mul(j, a);
    ab == cyclo::mat_neg(&ba)
}

/// The `+1`-eigenspace of the action of `iso` (a 7x7 matrix on vectors).
pub fn lagrangian_from_involution(space: &SymplecticSpace, iso: &CycMatrix) -> Result<Lagrangian> {
    let a = space.induced(iso);
    if !is_identity(&cyclo::mat_mul(&a, &a)) {
        return Err(Error::NotInvolution);
    }
    let n = space.field;
    let shifted = cyclo::mat_scale_add(&a, &Cyc::from_int(n, -1), &cyclo::mat_identity(n, space.dimension));
    let basis = cyclo::kernel(&shifted);
    if basis.len() * 2 != space.dimension {
        return Err(Error::NotLagrangianPair(format!(
            "fixed space has dimension {} in a space of dimension {}",
            basis.len(),
            space.dimension
        )));
    }
    Ok(Lagrangian {
        space: space.clone(),
        basis,
        involution: a,
    })
}

/// An eigenvalue `e^(2 pi i turn)` on `E_-`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenangle {
    /// In `(-1/2, 1/2]`.
    pub turn: Rational64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct MaslovResult {
    pub value: EtaValue,
    pub eigenangles: Vec<Eigenangle>,
}

fn centered(t: Rational64) -> Rational64 {
    let t = frac(t);
    if t > Rational64::new(1, 2) {
        t - 1
    } else {
        t
    }
}

/// The matrix of `-A_- A_+ = (-A_+ A_-)^{-1}` on `E_-`; with isometries
/// acting on vectors this order yields the eigenvalues `e^(i(pi - theta_j))`.
fn restricted(l_plus: &Lagrangian, l_minus: &Lagrangian) -> Result<CycMatrix> {
    let space = &l_plus.space;
    let j = &space.complex_structure;
    if space.kind != l_minus.space.kind || space.field != l_minus.space.field {
        return Err(Error::NotLagrangianPair("different ambient spaces".into()));
    }
    if !anticommutes(&l_plus.involution, j) || !anticommutes(&l_minus.involution, j) {
        return Err(Error::NotLagrangianPair(
            "involution does not anticommute with the complex structure".into(),
        ));
    }
    let m = cyclo::mat_neg(&cyclo::mat_mul(&l_minus.involution, &l_plus.involution));
    let e = space.minus_i_eigenspace();
    let k = e.len();
    let mut r = vec![vec![Cyc::zero(space.field); k]; k];
    for (col, v) in e.iter().enumerate() {
        let image = cyclo::mat_vec(&m, v);
        let coords = cyclo::solve_in_span(&e, &image)
            .ok_or_else(|| Error::NotLagrangianPair("E_- is not invariant".into()))?;
        for (row, c) in coords.into_iter().enumerate() {
            r[row][col] = c;
        }
    }
    Ok(r)
}

fn numeric_eigenvalues(r: &CycMatrix) -> Vec<Complex64> {
    let k = r.len();
    let m = DMatrix::<Complex64>::from_fn(k, k, |i, j| r[i][j].to_complex());
    m.eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_else(|| nalgebra::Schur::new(m).eigenvalues().map_or(vec![], |v| v.iter().copied().collect()))
}

/// `m(L_+, L_-) = -sum_{phi_j != pi} phi_j / pi` over the eigenvalues
/// `e^(i phi_j)` on `E_-`.
pub fn maslov_index(l_plus: &Lagrangian, l_minus: &Lagrangian) -> Result<MaslovResult> {
    let r = restricted(l_plus, l_minus)?;
    let n = l_plus.space.field;
    let k = r.len();
    let eig = numeric_eigenvalues(&r);
    // numeric eigenvalues nominate roots of unity; exact ranks confirm them
    let mut candidates: Vec<i64> = eig
        .iter()
        .map(|z| (z.arg() / std::f64::consts::TAU * n as f64).round() as i64)
        .map(|p| p.rem_euclid(n as i64))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut eigenangles = Vec::new();
    let mut found = 0;
    for p in candidates {
        let z = Cyc::zeta_pow(n, p);
        let shifted = cyclo::mat_scale_add(&r, &-z, &cyclo::mat_identity(n, k));
        let mult = k - cyclo::rank(&shifted);
        if mult > 0 {
            eigenangles.push(Eigenangle {
                turn: centered(Rational64::new(p, n as i64)),
                multiplicity: mult,
            });
            found += mult;
        }
    }
    if found != k {
        return Err(Error::NotLagrangianPair(format!(
            "only {found} of {k} eigenvalues are {n}-th roots of unity"
        )));
    }
    eigenangles.sort_by_key(|e| e.turn);
    let half = Rational64::new(1, 2);
    let exact = eigenangles
        .iter()
        .filter(|e| e.turn != half)
        .fold(Rational64::zero(), |acc, e| {
            acc - e.turn * 2 * Rational64::from_integer(e.multiplicity as i64)
        });

    let mut numeric = 0.0;
    let mut deviation: f64 = 0.0;
    for z in &eig {
        deviation = deviation.max((z.norm() - 1.0).abs());
        let phi = z.arg();
        if (phi.abs() - std::f64::consts::PI).abs() > 1e-8 {
            numeric -= phi / std::f64::consts::PI;
        }
    }
    if eig.len() != k || deviation > 1e-10 {
        return Err(Error::NotLagrangianPair(format!(
            "eigenvalues leave the unit circle by {deviation:e}"
        )));
    }
    Ok(MaslovResult {
        value: EtaValue {
            exact: Some(exact),
            numeric,
            error_bound: 1e-9,
            provenance: Provenance::ClosedForm,
        },
        eigenangles,
    })
}

/// Field order for a dihedral family: contains `i` and every `e^(i theta_k / 2)`.
pub fn dihedral_field(d: &DihedralData) -> u32 {
    d.angles
        .iter()
        .fold(4i64, |acc, t| acc.lcm(&(2 * t.denom())))
        .try_into()
        .expect("field order")
}

/// `beta` and `alpha beta` on `C^3 x R` for rotation angles `theta` (turns):
/// `beta(z, x) = (-conj z, -x)`, `alpha(z, x) = (e^(2 pi i theta) z, x + 1/a)`.
pub fn dihedral_involutions(d: &DihedralData, field: u32) -> (CycMatrix, CycMatrix) {
    let n = field;
    let mut beta = int_matrix(n, &vec![vec![0; 7]; 7]);
    let mut alpha = cyclo::mat_identity(n, 7);
    for (k, &t) in d.angles.iter().enumerate() {
        let (x, y) = (2 * k, 2 * k + 1);
        beta[x][x] = Cyc::from_int(n, -1);
        beta[y][y] = Cyc::one(n);
        let (c, s) = (cyclo::cos_2pi(n, t), cyclo::sin_2pi(n, t));
        alpha[x][x] = c.clone();
        alpha[x][y] = -&s;
        alpha[y][x] = s;
        alpha[y][y] = c;
    }
    beta[6][6] = Cyc::from_int(n, -1);
    let alpha_beta = cyclo::mat_mul(&alpha, &beta);
    (beta, alpha_beta)
}

#[derive(Debug, Clone)]
pub struct TcsReport {
    pub example: String,
    pub cohomology: MaslovResult,
    pub spinor: MaslovResult,
    pub eta_sign: Rational64,
    pub eta_dirac: Rational64,
    pub sign_agrees: bool,
    pub dirac_agrees_mod_z: bool,
    pub dirac_agrees_as_integers: bool,
    /// `m(L, L') + m(L', L)` for the cohomology and spinor pairs.
    pub swap_sums: (Rational64, Rational64),
}

impl TcsReport {
    pub fn passed(&self) -> bool {
        self.sign_agrees && self.dirac_agrees_mod_z
    }
}

/// Both Maslov indices of the dihedral family with the given data.
pub fn dihedral_maslov(d: &DihedralData) -> Result<(MaslovResult, MaslovResult, (Rational64, Rational64))> {
    let n = dihedral_field(d);
    let (beta, alpha_beta) = dihedral_involutions(d, n);
    let mut out = Vec::new();
    let mut swaps = Vec::new();
    for space in [SymplecticSpace::cohomology(n), SymplecticSpace::spinor(n)] {
        let lp = lagrangian_from_involution(&space, &beta)?;
        let lm = lagrangian_from_involution(&space, &alpha_beta)?;
        let m = maslov_index(&lp, &lm)?;
        let back = maslov_index(&lm, &lp)?;
        swaps.push(m.value.exact.unwrap() + back.value.exact.unwrap());
        out.push(m);
    }
    let spinor = out.pop().unwrap();
    let cohomology = out.pop().unwrap();
    Ok((cohomology, spinor, (swaps[0], swaps[1])))
}

/// Compare the Maslov indices with the orbifold eta-invariants of a purely
/// dihedral catalog entry (`|Gamma| = 2a`).
pub fn tcs_cross_check(spec: &OrbifoldSpec) -> Result<TcsReport> {
    let d = spec
        .dihedral
        .as_ref()
        .ok_or_else(|| Error::ValidationError(format!("{} has no dihedral data", spec.name)))?;
    let order = group_of(spec)?.order();
    if order != 2 * d.a as usize {
        return Err(Error::ValidationError(format!(
            "{}: |Gamma| = {order} is not the dihedral order {}",
            spec.name,
            2 * d.a
        )));
    }
    let nu = compute_nu(spec)?;
    let eta_sign = nu.eta_sign.exact.unwrap_or_default();
    let eta_dirac = nu.eta_dirac.exact.unwrap_or_default();
    let (cohomology, spinor, swap_sums) = dihedral_maslov(d)?;
    let ms = cohomology.value.exact.unwrap();
    let md = spinor.value.exact.unwrap();
    Ok(TcsReport {
        example: spec.name.clone(),
        sign_agrees: ms == eta_sign,
        dirac_agrees_mod_z: (md - eta_dirac).is_integer(),
        dirac_agrees_as_integers: md == eta_dirac,
        cohomology,
        spinor,
        eta_sign,
        eta_dirac,
        swap_sums,
    })
}

impl std::fmt::Display for TcsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: m(H3) = {} vs eta(B) = {} [{}]; m(S) = {} vs eta(D) = {} [{}]",
            self.example,
            format_rational(self.cohomology.value.exact.unwrap_or_default()),
            format_rational(self.eta_sign),
            if self.sign_agrees { "equal" } else { "DIFFER" },
            format_rational(self.spinor.value.exact.unwrap_or_default()),
            format_rational(self.eta_dirac),
            if self.dirac_agrees_as_integers {
                "equal"
            } else if self.dirac_agrees_mod_z {
                "equal mod Z"
            } else {
                "DIFFER"
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::rational::r;

    fn family(a: u32, t: [Rational64; 3]) -> DihedralData {
        DihedralData { a, angles: t, copies: 1 }
    }

    fn ex7() -> DihedralData {
        family(3, [r(1, 3); 3])
    }

    #[test]
    fn structures_square_to_minus_one() {
        for s in [SymplecticSpace::cohomology(12), SymplecticSpace::spinor(12)] {
            let sq = cyclo::mat_mul(&s.complex_structure, &s.complex_structure);
            assert_eq!(sq, cyclo::mat_neg(&cyclo::mat_identity(12, s.dimension)));
            assert_eq!(s.minus_i_eigenspace().len() * 2, s.dimension);
        }
    }

    #[test]
    fn beta_fixes_imaginary_parts() {
        let n = 12;
        let (beta, _) = dihedral_involutions(&ex7(), n);
        let l = lagrangian_from_involution(&SymplecticSpace::cohomology(n), &beta).unwrap();
        assert_eq!(l.basis.len(), 10);
        // Im(dz1 dz2 dz3) = dx1dx2dy3 + dx1dy2dx3 + dy1dx2dx3 - dy1dy2dy3
        let ts = triples();
        let mut v = vec![Cyc::zero(n); 20];
        for (t, s) in [([0, 2, 5], 1), ([0, 3, 4], 1), ([1, 2, 4], 1), ([1, 3, 5], -1)] {
            v[ts.iter().position(|x| *x == t).unwrap()] = Cyc::from_int(n, s);
        }
        assert!(cyclo::solve_in_span(&l.basis, &v).is_some());
    }

    #[test]
    fn beta_on_spinors() {
        let n = 12;
        let (beta, _) = dihedral_involutions(&ex7(), n);
        let l = lagrangian_from_involution(&SymplecticSpace::spinor(n), &beta).unwrap();
        for idx in [0, 2, 4, 6] {
            let mut v = vec![Cyc::zero(n); 8];
            v[idx] = Cyc::one(n);
            assert!(cyclo::solve_in_span(&l.basis, &v).is_some(), "{idx}");
        }
    }

    #[test]
    fn example_seven_values() {
        let (h, s, _) = dihedral_maslov(&ex7()).unwrap();
        assert_eq!(h.value.exact, Some(r(1, 1)));
        assert_eq!(s.value.exact, Some(r(-1, 1)));
        assert!((h.value.numeric - 1.0).abs() < 1e-9);
        assert!((s.value.numeric + 1.0).abs() < 1e-9);
    }

    #[test]
    fn example_seven_eigenvalue_pattern() {
        let (h, s, _) = dihedral_maslov(&ex7()).unwrap();
        let mult = |m: &MaslovResult, t| m.eigenangles.iter().find(|e| e.turn == t).map_or(0, |e| e.multiplicity);
        // -1 once, -e^{-2 i theta} = e^{-i pi/3} three times, then three conjugate pairs
        let mut rest: std::collections::BTreeMap<Rational64, usize> =
            h.eigenangles.iter().map(|e| (e.turn, e.multiplicity)).collect();
        assert_eq!(rest.remove(&r(1, 2)), Some(1));
        *rest.get_mut(&r(-1, 6)).unwrap() -= 3;
        for (t, m) in &rest {
            assert_eq!(rest.get(&-*t), Some(m), "{t}");
        }
        assert_eq!(rest.values().sum::<usize>(), 6);
        // spinors: -1 and e^{i(pi - theta)} = e^{i pi/3}
        assert_eq!(mult(&s, r(1, 2)), 1);
        assert_eq!(mult(&s, r(1, 6)), 3);
    }

    #[test]
    fn identical_lagrangians_give_zero() {
        let n = 12;
        let (beta, _) = dihedral_involutions(&ex7(), n);
        for space in [SymplecticSpace::cohomology(n), SymplecticSpace::spinor(n)] {
            let l = lagrangian_from_involution(&space, &beta).unwrap();
            assert_eq!(maslov_index(&l, &l).unwrap().value.exact, Some(r(0, 1)));
        }
    }

    #[test]
    fn non_involution_is_rejected() {
        let n = 12;
        let mut m = cyclo::mat_identity(n, 7);
        m[0][0] = Cyc::from_int(n, 2);
        assert!(matches!(
            lagrangian_from_involution(&SymplecticSpace::spinor(n), &m),
            Err(Error::NotInvolution)
        ));
    }

    #[test]
    fn cross_checks_on_pure_dihedral_examples() {
        for name in ["ex07", "ex08", "ex09", "ex11", "ex13"] {
            let rep = tcs_cross_check(&builtin(name).unwrap()).unwrap();
            assert!(rep.passed(), "{rep}");
            assert!(rep.swap_sums.0.is_integer() && rep.swap_sums.1.is_integer());
        }
    }

    #[test]
    fn non_dihedral_order_is_rejected() {
        assert!(tcs_cross_check(&builtin("ex14").unwrap()).is_err());
    }
}
