//! Independent numeric checks of the closed forms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclo::{self, Cyc};
use crate::error::Result;
use crate::eta_dirac::{phase, shell_terms};
use crate::eta_sign::{check_donnelly, witnesses, VanishingCertificate};
use crate::g2clifford::{
    hermitian, phi_residual, rotation_angles, sin_sum, spinor_action,
    spinor_eigenbasis, vec7, CSpinor, Spinor,
};
use crate::group::{AffineIsometry, GroupAction};
use crate::intmat;
use crate::lattice::{first_dual_shells, TorusLattice};
use crate::rational::{frac, sawtooth, to_f64};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

pub const SHELL_TOLERANCE: f64 = 1e-8;
pub const TRIG_TOLERANCE: f64 = 1e-12;
pub const EISENSTEIN_TOLERANCE: f64 = 1e-10;
pub const ABEL_TOLERANCE: f64 = 1e-3;
pub const ABEL_RADIUS: f64 = 1.0 - 1e-6;
pub const DEFAULT_SHELLS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub check_name: String,
    pub instances: usize,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(check_name: &str, instances: usize, max_abs_deviation: f64, tolerance: f64) -> Self {
        OracleReport {
            check_name: check_name.to_string(),
            instances,
            max_abs_deviation,
            tolerance,
            passed: max_abs_deviation <= tolerance,
        }
    }

    /// Fold several reports of the same check into one.
    pub fn merge(check_name: &str, reports: &[OracleReport]) -> Self {
        let tolerance = reports.iter().map(|r| r.tolerance).fold(f64::INFINITY, f64::min);
        let dev = reports.iter().map(|r| r.max_abs_deviation).fold(0.0, f64::max);
        let mut r = OracleReport::new(
            check_name,
            reports.iter().map(|r| r.instances).sum(),
            dev,
            if reports.is_empty() { 0.0 } else { tolerance },
        );
        r.passed = reports.iter().all(|r| r.passed);
        r
    }
}

fn apply(m: &DMatrix<f64>, s: &CSpinor) -> CSpinor {
    let a = s.to_array();
    let out: [Complex64; 8] = std::array::from_fn(|i| (0..8).map(|j| a[j] * m[(i, j)]).sum());
    Spinor::from_array(out)
}

fn trace_on(g: &DMatrix<f64>, basis: &[CSpinor; 4]) -> Complex64 {
    basis.iter().map(|b| hermitian(&apply(g, b), b)).sum()
}

/// Per shell, `sum_u e^{-2 pi i <u, b>} (Tr(g | S_u^+) - Tr(g | S_u^-))` from
/// explicit eigenbases, against the closed-form shell term.
pub fn verify_shell_traces(group: &GroupAction, shells: usize) -> Result<OracleReport> {
    let lattice = &group.lattice;
    lattice.embedding()?;
    let mut instances = 0;
    let mut worst: f64 = 0.0;
    for g in &group.elements {
        if check_donnelly(g).is_err() {
            continue;
        }
        let rot = lattice.ambient_linear(&g.linear)?;
        let spin = spinor_action(&rot);
        let closed = shell_terms(g, lattice, shells)?;
        let direct = first_dual_shells(lattice, &g.linear, shells)?;
        for (c, shell) in closed.iter().zip(&direct) {
            let mut total = Complex64::new(0.0, 0.0);
            for u in &shell.vectors {
                let amb = lattice.dual_ambient(u)?;
                let (plus, minus) = spinor_eigenbasis(&vec7(amb.as_slice()))?;
                total += phase(u, g) * (trace_on(&spin, &plus) - trace_on(&spin, &minus));
            }
            worst = worst.max((total - c.term_value).norm());
            instances += 1;
        }
    }
    Ok(OracleReport::new("shell_traces", instances, worst, SHELL_TOLERANCE))
}

fn random_triple(rng: &mut ChaCha8Rng) -> [Rational64; 3] {
    let q1 = rng.gen_range(1..=60);
    let q2 = rng.gen_range(1..=60);
    let t1 = Rational64::new(rng.gen_range(0..q1), q1);
    let t2 = Rational64::new(rng.gen_range(0..q2), q2);
    [t1, t2, frac(-(t1 + t2))]
}

/// `-4 prod sin(2 pi t_k) = sum sin(4 pi t_k)` for `t_1 + t_2 + t_3 = 0` mod 1.
pub fn verify_trig_identity(samples: usize, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t = random_triple(&mut rng);
        let small = t.iter().all(|q| *q.denom() <= 24);
        let dev = if small {
            let doubled: Vec<Rational64> = t.iter().map(|&x| x * 2).collect();
            let n = cyclo::field_for(&t);
            let lhs = t
                .iter()
                .fold(Cyc::from_int(n, -4), |acc, &x| &acc * &cyclo::sin_2pi(n, x));
            let rhs = doubled
                .iter()
                .fold(Cyc::zero(n), |acc, &x| &acc + &cyclo::sin_2pi(n, x));
            if lhs == rhs {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            let lhs = -4.0 * t.iter().map(|&x| (TAU * to_f64(x)).sin()).product::<f64>();
            let rhs: f64 = t.iter().map(|&x| (2.0 * TAU * to_f64(x)).sin()).sum();
            (lhs - rhs).abs()
        };
        worst = worst.max(dev);
    }
    OracleReport::new("trig_identity", samples, worst, TRIG_TOLERANCE)
}

/// `-(1/2a) sum_{j=1}^{a-1} cot(pi j/a) sin(2 pi j x/a)`.
pub fn eisenstein_lhs(a: i64, x: i64) -> f64 {
    let s: f64 = (1..a)
        .map(|j| {
            let t = j as f64 / a as f64;
            (PI * t).cos() / (PI * t).sin() * (TAU * t * x as f64).sin()
        })
        .sum();
    -s / (2 * a) as f64
}

/// The Eisenstein cotangent sum against `((x/a))` for `2 <= a <= a_max`.
pub fn verify_eisenstein(a_max: i64) -> OracleReport {
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for a in 2..=a_max {
        for x in 0..a {
            let rhs = to_f64(sawtooth(Rational64::new(x, a)));
            worst = worst.max((eisenstein_lhs(a, x) - rhs).abs());
            instances += 1;
        }
    }
    OracleReport::new("eisenstein", instances, worst, EISENSTEIN_TOLERANCE)
}

/// `sum_{n >= 1} r^n sin(2 pi n d)`, summed one period at a time.
pub fn abel_sine_sum(d: Rational64, r: f64) -> f64 {
    let d = frac(d);
    let q = *d.denom();
    let block: f64 = (1..=q)
        .map(|m| r.powi(m as i32) * (TAU * to_f64(d) * m as f64).sin())
        .sum();
    block / (1.0 - r.powi(q as i32))
}

/// Abel-summed `eta_g(D) = -4 sum_n r^n sin(2 pi n d) sum_k sin(2 pi theta_k)`
/// against `-2 cot(pi d) sum_k sin(2 pi theta_k)` for every Donnelly element.
pub fn verify_abel(group: &GroupAction, r: f64) -> Result<OracleReport> {
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for g in &group.elements {
        if check_donnelly(g).is_err() {
            continue;
        }
        let p = rotation_angles(g, &group.lattice)?;
        let sines = sin_sum(&p.angles);
        let abel = -4.0 * abel_sine_sum(p.d, r) * sines;
        let closed = -2.0 / (PI * to_f64(p.d)).tan() * sines;
        worst = worst.max((abel - closed).abs());
        instances += 1;
    }
    Ok(OracleReport::new("abel_polylog", instances, worst, ABEL_TOLERANCE))
}

/// Commutation and determinant of the witness, exactly; for spin
/// certificates also that the witness reverses the 3-form.
pub fn verify_certificate(
    cert: &VanishingCertificate,
    g: &AffineIsometry,
    lattice: &TorusLattice,
) -> OracleReport {
    let ok = match &cert.witness {
        None => false,
        Some(w) => {
            let mut ok = witnesses(w, g);
            if cert.spin {
                ok &= reverses_phi(&w.linear, lattice);
            }
            ok
        }
    };
    OracleReport::new("certificate", 1, if ok { 0.0 } else { 1.0 }, 0.0)
}

fn reverses_phi(m: &intmat::IntMatrix, lattice: &TorusLattice) -> bool {
    match lattice.ambient_linear(m) {
        Ok(rot) => phi_residual(&(-rot)) <= lattice.embedding_precision.max(1e-12),
        Err(_) => {
            let rot = DMatrix::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] as f64);
            m.nrows() == 7 && phi_residual(&(-rot)) == 0.0
        }
    }
}

/// Whether `g(x) = x` mod `Z^n` for some `x` in `(1/grid) Z^n`, by exhaustive
/// search with row-wise pruning.
pub fn grid_fixed_point(g: &AffineIsometry, grid: i64) -> bool {
    let n = g.dim();
    let nb: Vec<i64> = g
        .translation
        .iter()
        .map(|&b| {
            let v = b * grid;
            assert!(v.is_integer(), "grid {grid} does not resolve translation {b}");
            v.to_integer()
        })
        .collect();
    // last column each row depends on
    let last: Vec<usize> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| g.linear[(i, j)] != if i == j { 1 } else { 0 })
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut x = vec![0i64; n];
    fn search(k: usize, x: &mut [i64], g: &AffineIsometry, nb: &[i64], last: &[usize], grid: i64) -> bool {
        let n = x.len();
        if k == n {
            return true;
        }
        for v in 0..grid {
            x[k] = v;
            let ok = (0..n).filter(|&i| last[i] == k).all(|i| {
                let row: i64 = (0..n).map(|j| g.linear[(i, j)] * x[j]).sum();
                (row + nb[i] - x[i]).rem_euclid(grid) == 0
            });
            if ok && search(k + 1, x, g, nb, last, grid) {
                return true;
            }
        }
        false
    }
    search(0, &mut x, g, &nb, &last, grid)
}

/// Fixed-point solvability against the grid search for every element.
pub fn verify_fixed_points(group: &GroupAction, grid: i64) -> OracleReport {
    let mismatches = group
        .elements
        .iter()
        .filter(|g| crate::group::fixed_point_set(g).is_some() != grid_fixed_point(g, grid))
        .count();
    OracleReport::new("fixed_points", group.order(), mismatches as f64, 0.0)
}
