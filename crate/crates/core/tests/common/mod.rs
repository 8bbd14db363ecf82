#![allow(dead_code)]

use g2nu::catalog::builtin;
use g2nu::g2clifford::{clifford_mul, hermitian, Spinor};
use g2nu::group::{betti_one, generate_group, AffineIsometry, DEFAULT_ORDER_BOUND};
use g2nu::intmat::{identity, IntMatrix};
use g2nu::lattice::TorusLattice;
use g2nu::rational::sawtooth;
use num_complex::Complex;
use num_rational::Rational64;
use num_traits::Zero;

pub type Q = Rational64;

pub const FULL_EXAMPLES: [&str; 14] = [
    "ex01", "ex02", "ex03", "ex04", "ex05", "ex06", "ex07", "ex08", "ex09", "ex10", "ex11", "ex12",
    "ex13", "ex14",
];

pub fn q(p: i64, d: i64) -> Q {
    Q::new(p, d)
}

/// `u·(u·s) = −|u|² s` over the rationals.
pub fn clifford_relation(u: &[Q; 7], s: &Spinor<Q>) -> bool {
    let norm = u.iter().fold(Q::zero(), |acc, x| acc + x * x);
    clifford_mul(u, &clifford_mul(u, s)) == s.scale(-norm)
}

/// `<u·s, t> = −<s, u·t>` over the Gaussian rationals.
pub fn skew_hermitian(u: &[Q; 7], s: &Spinor<Complex<Q>>, t: &Spinor<Complex<Q>>) -> bool {
    let uc = u.map(|x| Complex::new(x, Q::zero()));
    hermitian(&clifford_mul(&uc, s), t) + hermitian(s, &clifford_mul(&uc, t)) == Complex::zero()
}

/// `((−t)) = −((t))` and `((t + k)) = ((t))`.
pub fn sawtooth_laws(t: Q, k: i64) -> bool {
    sawtooth(-t) == -sawtooth(t) && sawtooth(t + k) == sawtooth(t)
}

/// Product of elementary matrices `I + c E_ij`.
pub fn elementary_product(ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut p = identity(7);
    for &(i, j, c) in ops {
        if i != j {
            let mut e = identity(7);
            e[(i, j)] = c;
            p = &p * &e;
        }
    }
    p
}

/// Conjugates the generators of a catalog group by `(P, shift)` and checks
/// that the new group has the same order and the same integral `b_1`.
pub fn conjugated_betti(example: &str, p: IntMatrix, shift: Vec<Q>) -> Result<(), String> {
    let spec = builtin(example).map_err(|e| e.to_string())?;
    let lat = TorusLattice::standard(7);
    let base = generate_group(&lat, &spec.generators, DEFAULT_ORDER_BOUND).map_err(|e| e.to_string())?;
    let h = AffineIsometry::unchecked(p, shift, "h");
    let hinv = h.inverse();
    let gens: Vec<AffineIsometry> = spec
        .generators
        .iter()
        .map(|g| h.compose(g).compose(&hinv))
        .collect();
    let conj = generate_group(&lat, &gens, DEFAULT_ORDER_BOUND).map_err(|e| e.to_string())?;
    if conj.order() != base.order() {
        return Err(format!("{example}: order {} vs {}", conj.order(), base.order()));
    }
    let (a, b) = (
        betti_one(&base).map_err(|e| e.to_string())?,
        betti_one(&conj).map_err(|e| e.to_string())?,
    );
    if a != b {
        return Err(format!("{example}: b1 {b} vs {a}"));
    }
    Ok(())
}
