//! Equivariant and orbifold eta-invariants of the spin Dirac operator.
//!
//! For a fixed-point-free element whose fixed dual lattice is a line spanned
//! by `u0`, the sum over `u = ±n u0` collapses to a polylogarithm at `s = 0`,
//! giving `-2 cot(pi d) sum_k sin(2 pi theta_k)`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::cyclo::{self, Cyc};
use crate::error::{Error, Result};
use crate::eta_sign::{
    average, check_donnelly, find_certificate, ElementEta, EtaValue, OrbifoldEta, Provenance,
    Tier, VanishingCertificate,
};
use crate::g2clifford::{fixed_direction, rotation_angles, AngleProfile};
use crate::group::{fixed_point_set, AffineIsometry, GroupAction};
use crate::lattice::{first_dual_shells, DualVector, TorusLattice};
use crate::rational::{sawtooth, to_f64};

const TAU: f64 = std::f64::consts::TAU;

/// The closed-form contribution of one dual shell to `eta_g(D)` at `s = 0`,
/// before the `|u|^{-s}` weight.
#[derive(Debug, Clone)]
pub struct DiracShellTerm {
    pub shell_norm: f64,
    pub term_value: Complex64,
    pub fixed_vectors: Vec<DualVector>,
}

/// Present iff `g` is fixed-point-free and its linear part has eigenvalue 1
/// with multiplicity at least two.
pub fn multiplicity_certificate(g: &AffineIsometry) -> Option<VanishingCertificate> {
    if g.is_identity() || fixed_point_set(g).is_some() || g.eigenvalue_one_multiplicity() < 2 {
        return None;
    }
    Some(VanishingCertificate {
        kind: crate::eta_sign::CertificateKind::EigenvaluePm1,
        witness: None,
        spin: true,
        tier: Tier::Mod2Z,
    })
}

/// `-2 cot(pi d) sum sin(2 pi theta_k)`, exactly when rational.
fn donnelly_dirac_exact(p: &AngleProfile) -> Option<Rational64> {
    let mut turns = p.angles.to_vec();
    turns.push(p.d);
    let n = cyclo::field_for(&turns);
    let sines = p
        .angles
        .iter()
        .fold(Cyc::zero(n), |acc, &t| &acc + &cyclo::sin_2pi(n, t));
    let v = &(&cyclo::cot_pi(n, p.d)? * &sines) * &Cyc::from_int(n, -2);
    cyclo::from_big(&v.as_rational()?)
}

pub fn donnelly_dirac(g: &AffineIsometry, lattice: &TorusLattice) -> Result<EtaValue> {
    check_donnelly(g)?;
    let p = rotation_angles(g, lattice)?;
    let sines: f64 = p.angles.iter().map(|&t| (TAU * to_f64(t)).sin()).sum();
    let numeric = -2.0 / (std::f64::consts::PI * to_f64(p.d)).tan() * sines;
    Ok(EtaValue {
        exact: donnelly_dirac_exact(&p),
        numeric,
        error_bound: 1e-12 * (1.0 + numeric.abs()),
        provenance: Provenance::ClosedForm,
    })
}

/// `eta_g(D_{T^7})` together with the certificate used, if any.
pub fn eta_gamma_dirac(
    g: &AffineIsometry,
    lattice: &TorusLattice,
    hints: &[VanishingCertificate],
) -> Result<(EtaValue, Option<VanishingCertificate>)> {
    let cert = find_certificate(g, lattice, hints).filter(|c| c.spin);
    if cert.is_some() {
        return Ok((EtaValue::certified_zero(), cert));
    }
    match donnelly_dirac(g, lattice) {
        Ok(v) => Ok((v, None)),
        Err(Error::NotDonnellySituation(_)) => Err(Error::UnsupportedElement(g.label.clone())),
        Err(e) => Err(e),
    }
}

/// `2 sum ((theta_k))`, the average of `eta_{alpha^j}(D)` over the dihedral
/// group of order `2a` generated by an element with angles `theta` and
/// circle translation `1/a`.
pub fn eta_dirac_dihedral(a: u32, angles: &AngleProfile) -> EtaValue {
    debug_assert!(a >= 2);
    let s = angles
        .angles
        .iter()
        .fold(Rational64::zero(), |acc, &t| acc + sawtooth(t));
    EtaValue::exact(s * 2, Provenance::Eisenstein)
}

/// `eta(D_O)`; the tier records the weakest certificate used.
pub fn eta_dirac_orbifold(
    group: &GroupAction,
    hints: &[VanishingCertificate],
) -> Result<OrbifoldEta> {
    let mut elements = Vec::with_capacity(group.order());
    let mut tier = Tier::Exact;
    for (index, g) in group.elements.iter().enumerate() {
        let (value, certificate) = eta_gamma_dirac(g, &group.lattice, hints)?;
        if let Some(c) = &certificate {
            tier = tier.max(c.tier);
        }
        elements.push(ElementEta {
            index,
            label: g.label.clone(),
            value,
            certificate,
        });
    }
    average(elements, group.order(), tier)
}

/// Closed-form shell terms `sum_u e^{-2 pi i <u,b>} eps_u (-2i) sum sin(gamma_k)`
/// over the first `count` shells of `g`-fixed dual vectors.
pub fn shell_terms(
    g: &AffineIsometry,
    lattice: &TorusLattice,
    count: usize,
) -> Result<Vec<DiracShellTerm>> {
    check_donnelly(g)?;
    let p = rotation_angles(g, lattice)?;
    let rot = lattice.ambient_linear(&g.linear)?;
    let f = fixed_direction(&rot).ok_or(Error::NoFixedDirection)?;
    let sines: f64 = p.angles.iter().map(|&t| (TAU * to_f64(t)).sin()).sum();
    let mut out = Vec::new();
    for shell in first_dual_shells(lattice, &g.linear, count)? {
        let mut total = Complex64::zero();
        for u in &shell.vectors {
            let amb = lattice.dual_ambient(u)?;
            let eps = if (0..7).map(|i| amb[i] * f[i]).sum::<f64>() > 0.0 { 1.0 } else { -1.0 };
            total += phase(u, g) * eps * Complex64::new(0.0, -2.0 * sines);
        }
        out.push(DiracShellTerm {
            shell_norm: shell.norm,
            term_value: total,
            fixed_vectors: shell.vectors,
        });
    }
    Ok(out)
}

/// `e^{-2 pi i <u, b>}`.
pub fn phase(u: &DualVector, g: &AffineIsometry) -> Complex64 {
    let ub = u
        .coords
        .iter()
        .zip(&g.translation)
        .fold(Rational64::zero(), |a, (&c, &b)| a + b * c);
    Complex64::from_polar(1.0, -TAU * to_f64(ub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::generate_group;
    use crate::intmat::IntMatrix;
    use crate::rational::r;

    fn ex7() -> GroupAction {
        let s = 3f64.sqrt() / 2.0;
        let mut e = nalgebra::DMatrix::<f64>::identity(7, 7);
        let mut a = IntMatrix::zeros(7, 7);
        let mut b = IntMatrix::zeros(7, 7);
        for k in 0..3 {
            e[(2 * k, 2 * k + 1)] = -0.5;
            e[(2 * k + 1, 2 * k + 1)] = s;
            a[(2 * k, 2 * k + 1)] = -1;
            a[(2 * k + 1, 2 * k)] = 1;
            a[(2 * k + 1, 2 * k + 1)] = -1;
            b[(2 * k, 2 * k)] = -1;
            b[(2 * k, 2 * k + 1)] = 1;
            b[(2 * k + 1, 2 * k + 1)] = 1;
        }
        a[(6, 6)] = 1;
        b[(6, 6)] = -1;
        let mut t = vec![r(0, 1); 7];
        t[6] = r(1, 3);
        let lattice = TorusLattice::new(7, Some(e), 1e-10).unwrap();
        let alpha = AffineIsometry::new(a, t, "alpha").unwrap();
        let beta = AffineIsometry::new(b, vec![r(0, 1); 7], "beta").unwrap();
        generate_group(&lattice, &[alpha, beta], 100).unwrap()
    }

    #[test]
    fn order_three_rotation_value() {
        let g = ex7();
        let alpha = &g.elements[g.generators[0]];
        let (v, c) = eta_gamma_dirac(alpha, &g.lattice, &[]).unwrap();
        assert!(c.is_none());
        assert_eq!(v.exact, Some(r(-3, 1)));
    }

    #[test]
    fn example_seven_average() {
        let eta = eta_dirac_orbifold(&ex7(), &[]).unwrap();
        assert_eq!(eta.value.exact, Some(r(-1, 1)));
        assert_eq!(eta.tier, Tier::Exact);
    }

    #[test]
    fn dihedral_closed_form() {
        let p = |a, b, c| AngleProfile::new(r(0, 1), [a, b, c]);
        assert_eq!(eta_dirac_dihedral(3, &p(r(1, 3), r(1, 3), r(1, 3))).exact, Some(r(-1, 1)));
        assert_eq!(eta_dirac_dihedral(4, &p(r(1, 4), r(1, 4), r(1, 2))).exact, Some(r(-1, 1)));
        assert_eq!(eta_dirac_dihedral(5, &p(r(0, 1), r(1, 5), r(4, 5))).exact, Some(r(0, 1)));
    }

    #[test]
    fn rotation_has_no_multiplicity_certificate() {
        let g = ex7();
        assert!(multiplicity_certificate(&g.elements[g.generators[0]]).is_none());
        assert!(multiplicity_certificate(&g.elements[g.generators[1]]).is_none());
    }

    #[test]
    fn shell_terms_are_real() {
        let g = ex7();
        let alpha = &g.elements[g.generators[0]];
        let terms = shell_terms(alpha, &g.lattice, 5).unwrap();
        assert_eq!(terms.len(), 5);
        for (n, t) in terms.iter().enumerate() {
            assert!(t.term_value.im.abs() < 1e-10);
            // -4 sin(2 pi n d) * 3 sin(2 pi / 3)
            let d = (n + 1) as f64 / 3.0;
            let expect = -4.0 * (TAU * d).sin() * 3.0 * (TAU / 3.0).sin();
            assert!((t.term_value.re - expect).abs() < 1e-9, "{n}: {t:?}");
        }
    }
}
