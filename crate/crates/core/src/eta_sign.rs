//! Equivariant and orbifold eta-invariants of the odd signature operator:
//! Donnelly's cotangent formula, Lefschetz counts, the Eisenstein closed form
//! for dihedral groups and vanishing certificates.

use std::fmt;

use nalgebra::DVector;
use num_rational::Rational64;
use num_traits::Zero;

use crate::cyclo::{self, Cyc};
use crate::error::{Error, Result};
use crate::g2clifford::{rotation_angles, AngleProfile};
use crate::group::{fixed_point_set, AffineIsometry, GroupAction};
use crate::intmat::{self, IntMatrix};
use crate::lattice::{fixed_dual_sublattice, TorusLattice};
use crate::rational::{self, r, reconstruct, to_f64};

pub use crate::rational::sawtooth;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Eisenstein,
    VanishingCertificate,
    NumericOnly,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "CLOSED_FORM",
            Provenance::Eisenstein => "EISENSTEIN",
            Provenance::VanishingCertificate => "VANISHING_CERTIFICATE",
            Provenance::NumericOnly => "NUMERIC_ONLY",
        }
    }
}

/// An eta-invariant with its exact value when known.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaValue {
    pub exact: Option<Rational64>,
    pub numeric: f64,
    pub error_bound: f64,
    pub provenance: Provenance,
}

impl EtaValue {
    pub fn exact(q: Rational64, provenance: Provenance) -> Self {
        EtaValue {
            exact: Some(q),
            numeric: to_f64(q),
            error_bound: 0.0,
            provenance,
        }
    }

    pub fn certified_zero() -> Self {
        Self::exact(Rational64::zero(), Provenance::VanishingCertificate)
    }

    pub fn is_consistent(&self) -> bool {
        self.exact
            .is_none_or(|q| (self.numeric - to_f64(q)).abs() <= self.error_bound + 1e-15)
    }
}

impl fmt::Display for EtaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(q) => write!(f, "{}", rational::format_rational(q)),
            None => write!(f, "{:.12}", self.numeric),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    OrientationReversingCommutant,
    EigenvaluePm1,
    ZeroTranslation,
    HasFixedPointsWithIsometry,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::OrientationReversingCommutant => "ORIENTATION_REVERSING_COMMUTANT",
            CertificateKind::EigenvaluePm1 => "EIGENVALUE_PM1",
            CertificateKind::ZeroTranslation => "ZERO_TRANSLATION",
            CertificateKind::HasFixedPointsWithIsometry => "HAS_FIXED_POINTS_WITH_ISOMETRY",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            CertificateKind::OrientationReversingCommutant,
            CertificateKind::EigenvaluePm1,
            CertificateKind::ZeroTranslation,
            CertificateKind::HasFixedPointsWithIsometry,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// How strongly a certificate pins the Dirac eta-invariant. Ordered from
/// strongest to weakest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Exact,
    Mod2Z,
    ModZ,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Exact => "exact",
            Tier::Mod2Z => "mod_2z",
            Tier::ModZ => "mod_z",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Tier::Exact, Tier::Mod2Z, Tier::ModZ]
            .into_iter()
            .find(|t| t.name() == s)
    }
}

/// A reason for an equivariant eta-invariant to vanish.
///
/// The signature invariant vanishes exactly whenever a certificate applies.
/// The Dirac invariant vanishes only for `spin` certificates, and then only
/// up to `tier`.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingCertificate {
    pub kind: CertificateKind,
    pub witness: Option<AffineIsometry>,
    pub spin: bool,
    pub tier: Tier,
}

impl VanishingCertificate {
    fn bare(kind: CertificateKind, spin: bool, tier: Tier) -> Self {
        VanishingCertificate {
            kind,
            witness: None,
            spin,
            tier,
        }
    }
}

/// Whether `w` is an orientation-reversing map commuting with `g`.
pub fn witnesses(w: &AffineIsometry, g: &AffineIsometry) -> bool {
    w.dim() == g.dim() && intmat::det(&w.linear) == -1 && w.compose(g).same_map(&g.compose(w))
}

/// Whether the linear part of `w` is orthogonal in the ambient metric.
fn is_isometry(w: &AffineIsometry, lattice: &TorusLattice) -> bool {
    match lattice.ambient_linear(&w.linear) {
        Ok(m) => {
            let n = m.nrows();
            (m.transpose() * &m - nalgebra::DMatrix::<f64>::identity(n, n)).amax()
                <= lattice.embedding_precision.max(1e-9)
        }
        Err(_) => false,
    }
}

/// Search for a vanishing certificate, in order: identity, catalog hints,
/// point reflection through a fixed point, repeated eigenvalue 1, and
/// diagonal sign changes combined with half translations.
pub fn find_certificate(
    g: &AffineIsometry,
    lattice: &TorusLattice,
    hints: &[VanishingCertificate],
) -> Option<VanishingCertificate> {
    if g.is_identity() {
        return Some(VanishingCertificate::bare(CertificateKind::ZeroTranslation, true, Tier::Exact));
    }
    for h in hints {
        if let Some(w) = &h.witness {
            if witnesses(w, g) {
                return Some(h.clone());
            }
        }
    }
    let n = g.dim();
    if let Some(fs) = fixed_point_set(g) {
        let x0 = &fs.components[0].point;
        let w = AffineIsometry::unchecked(
            -intmat::identity(n),
            x0.iter().map(|x| x * 2).collect(),
            "point reflection",
        );
        debug_assert!(witnesses(&w, g));
        return Some(VanishingCertificate {
            kind: CertificateKind::HasFixedPointsWithIsometry,
            witness: Some(w),
            spin: true,
            tier: Tier::Exact,
        });
    }
    if g.eigenvalue_one_multiplicity() >= 2 {
        return Some(VanishingCertificate::bare(CertificateKind::EigenvaluePm1, true, Tier::Mod2Z));
    }
    if lattice.embedding.is_some() {
        for signs in 0u32..1 << n {
            if signs.count_ones() % 2 == 0 {
                continue;
            }
            let d = DVector::from_iterator(n, (0..n).map(|i| if signs >> i & 1 == 1 { -1 } else { 1 }));
            let linear = IntMatrix::from_diagonal(&d);
            if linear.clone() * &g.linear != &g.linear * linear.clone() {
                continue;
            }
            for halves in 0u32..1 << n {
                let t = (0..n).map(|i| r((halves >> i & 1) as i64, 2)).collect();
                let w = AffineIsometry::unchecked(linear.clone(), t, "sign change");
                if witnesses(&w, g) && is_isometry(&w, lattice) {
                    return Some(VanishingCertificate {
                        kind: CertificateKind::OrientationReversingCommutant,
                        witness: Some(w),
                        spin: false,
                        tier: Tier::Exact,
                    });
                }
            }
        }
    }
    None
}

/// Check that `g` is fixed-point-free with a rank-one fixed dual lattice.
pub fn check_donnelly(g: &AffineIsometry) -> Result<()> {
    let rank = fixed_dual_sublattice(&g.linear).len();
    if rank != 1 {
        return Err(Error::NotDonnellySituation(format!(
            "`{}` has a fixed dual lattice of rank {rank}",
            g.label
        )));
    }
    if fixed_point_set(g).is_some() {
        return Err(Error::NotDonnellySituation(format!("`{}` has fixed points", g.label)));
    }
    Ok(())
}

/// `|det(I - A)|` for the transverse part `A`: the number of fixed points of
/// the extension of `g` to `T^6 x D^2`.
pub fn lefschetz_count(g: &AffineIsometry) -> Result<i64> {
    check_donnelly(g)?;
    // charpoly = (x - 1) q(x), so q(1) = p'(1) = prod (1 - lambda) over the rest.
    let cp = intmat::charpoly(&g.linear);
    let derivative: i64 = cp.iter().enumerate().skip(1).map(|(k, c)| k as i64 * c).sum();
    Ok(derivative.abs())
}

/// `nu cot(pi d) prod cot(pi theta_k)` in `Q(zeta_N)`; `None` when irrational.
fn donnelly_exact(nu: i64, p: &AngleProfile) -> Option<Rational64> {
    let mut turns = p.angles.to_vec();
    turns.push(p.d);
    let n = cyclo::field_for(&turns);
    let mut v = Cyc::from_int(n, nu);
    for &t in std::iter::once(&p.d).chain(&p.angles) {
        match cyclo::cot_pi(n, t) {
            Some(c) => v = &v * &c,
            None => return Some(Rational64::zero()),
        }
    }
    cyclo::from_big(&v.as_rational()?)
}

fn cot(t: Rational64) -> f64 {
    1.0 / (std::f64::consts::PI * to_f64(t)).tan()
}

/// Donnelly's formula for an element in the Donnelly situation.
pub fn donnelly_signature(g: &AffineIsometry, lattice: &TorusLattice) -> Result<EtaValue> {
    let nu = lefschetz_count(g)?;
    let p = rotation_angles(g, lattice)?;
    let numeric = if p.angles.iter().any(|t| t.is_integer()) {
        0.0
    } else {
        nu as f64 * cot(p.d) * p.angles.iter().map(|&t| cot(t)).product::<f64>()
    };
    Ok(EtaValue {
        exact: donnelly_exact(nu, &p),
        numeric,
        error_bound: 1e-12 * (1.0 + numeric.abs()),
        provenance: Provenance::ClosedForm,
    })
}

/// `eta_g(B_{T^7})`, zero under a certificate and by Donnelly's formula otherwise.
pub fn eta_gamma_signature(
    g: &AffineIsometry,
    lattice: &TorusLattice,
    hints: &[VanishingCertificate],
) -> Result<EtaValue> {
    if find_certificate(g, lattice, hints).is_some() {
        return Ok(EtaValue::certified_zero());
    }
    donnelly_signature(g, lattice).map_err(|e| match e {
        Error::NotDonnellySituation(_) => Error::UnsupportedElement(g.label.clone()),
        e => e,
    })
}

/// `2 sum ((2 theta_k))` for a dihedral group of order `2a` generated by an
/// element with the given angles (in turns).
pub fn eta_signature_dihedral(angles: &AngleProfile) -> EtaValue {
    let s = angles
        .angles
        .iter()
        .fold(Rational64::zero(), |acc, &t| acc + sawtooth(t * 2));
    EtaValue::exact(s * 2, Provenance::Eisenstein)
}

/// One element's contribution to an orbifold average.
#[derive(Debug, Clone)]
pub struct ElementEta {
    pub index: usize,
    pub label: String,
    pub value: EtaValue,
    pub certificate: Option<VanishingCertificate>,
}

#[derive(Debug, Clone)]
pub struct OrbifoldEta {
    pub value: EtaValue,
    pub elements: Vec<ElementEta>,
    /// Weakest Dirac tier among the certificates used.
    pub tier: Tier,
}

/// Average of exact and numeric per-element values, with reconstruction of
/// the numeric total and a consistency check between the two.
pub(crate) fn average(elements: Vec<ElementEta>, order: usize, tier: Tier) -> Result<OrbifoldEta> {
    let numeric = elements.iter().map(|e| e.value.numeric).sum::<f64>() / order as f64;
    let error_bound = elements.iter().map(|e| e.value.error_bound).sum::<f64>() / order as f64;
    let window = (1e3 * error_bound).max(1e-9);
    let rebuilt = reconstruct(numeric, order as i64, window)?;
    let exact_sum: Option<Rational64> = elements.iter().map(|e| e.value.exact).sum();
    let (exact, provenance) = match exact_sum {
        Some(s) => {
            let q = s / Rational64::from_integer(order as i64);
            if q != rebuilt {
                return Err(Error::ReconstructionFailed {
                    value: numeric,
                    max_den: order as i64,
                    window,
                });
            }
            let all_certified = elements
                .iter()
                .all(|e| e.value.provenance == Provenance::VanishingCertificate);
            let prov = if all_certified {
                Provenance::VanishingCertificate
            } else {
                Provenance::ClosedForm
            };
            (q, prov)
        }
        None => (rebuilt, Provenance::NumericOnly),
    };
    Ok(OrbifoldEta {
        value: EtaValue {
            exact: Some(exact),
            numeric,
            error_bound,
            provenance,
        },
        elements,
        tier,
    })
}

/// `eta(B_O) = (1/|Gamma|) sum_g eta_g(B_{T^7})`.
pub fn eta_signature_orbifold(
    group: &GroupAction,
    hints: &[VanishingCertificate],
) -> Result<OrbifoldEta> {
    let mut elements = Vec::with_capacity(group.order());
    for (index, g) in group.elements.iter().enumerate() {
        let certificate = find_certificate(g, &group.lattice, hints);
        let value = match &certificate {
            Some(_) => EtaValue::certified_zero(),
            None => donnelly_signature(g, &group.lattice).map_err(|e| match e {
                Error::NotDonnellySituation(_) => Error::UnsupportedElement(g.label.clone()),
                e => e,
            })?,
        };
        elements.push(ElementEta {
            index,
            label: g.label.clone(),
            value,
            certificate,
        });
    }
    average(elements, group.order(), Tier::Exact)
}

/// Weight of a dihedral subfamily inside a group of order `order`:
/// `copies * 2a / order`.
pub fn dihedral_weight(a: u32, copies: u32, order: usize) -> Rational64 {
    Rational64::new(2 * a as i64 * copies as i64, order as i64)
}

/// Whether `q` is an integer multiple of `1/order`.
pub fn has_denominator_dividing(q: Rational64, order: usize) -> bool {
    (q * Rational64::from_integer(order as i64)).is_integer()
}
