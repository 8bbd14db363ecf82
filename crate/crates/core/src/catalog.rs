//! Orbifold description files and the built-in examples.
//!
//! A description is a TOML document:
//!
//! ```toml
//! name = "ex07"
//! partial = false
//!
//! [lattice]
//! rank = 7
//! precision = 1e-10
//! embedding = [["1", "-0.5", ...], ...]   # columns are basis vectors
//!
//! [generator.alpha]
//! linear = [[0, -1, ...], ...]            # integer rows
//! translation = ["0", ..., "1/3"]         # exact rationals
//!
//! [[certificate_hint]]
//! kind = "ORIENTATION_REVERSING_COMMUTANT"
//! linear = [...]
//! translation = [...]
//! spin = true
//! tier = "exact"                          # exact | mod_2z | mod_z
//!
//! [resolution]
//! ell_parity = "even"
//! spin_isometries = true
//! component_reflections = false
//! declared_hypothesis = "HYP2_SPIN"       # partial entries only
//! b1 = 0                                  # partial entries only
//!
//! [dihedral]
//! a = 3
//! angles = ["1/3", "1/3", "1/3"]
//! copies = 1
//!
//! [expected]
//! group_order = 6
//! b1 = 0
//! eta_sign = "1"
//! eta_dirac = "-1"
//! nu = 3
//! modulus = 48
//! b2 = 5
//! b3 = 13
//! ```

use std::fmt;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::eta_sign::{CertificateKind, Tier, VanishingCertificate};
use crate::g2clifford::{phi_residual, AngleProfile};
use crate::group::{AffineIsometry, HypothesisLevel, Parity, ResolutionMetadata};
use crate::intmat::{self, IntMatrix};
use crate::lattice::TorusLattice;
use crate::rational::{format_rational, parse_rational};

/// An exact rational written as `"p/q"`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Q(Rational64);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                parse_rational(v)
                    .map(Q)
                    .ok_or_else(|| E::custom(format!("`{v}` is not a rational \"p/q\"")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(Rational64::from_integer(v)))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    #[serde(default)]
    partial: bool,
    lattice: RawLattice,
    #[serde(default)]
    generator: IndexMap<String, RawMap>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    certificate_hint: Vec<RawHint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<RawResolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dihedral: Option<RawDihedral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<Expected>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    rank: usize,
    #[serde(default = "default_precision")]
    precision: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<Vec<Vec<String>>>,
}

fn default_precision() -> f64 {
    crate::lattice::DEFAULT_PRECISION
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    linear: Vec<Vec<i64>>,
    translation: Vec<Q>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHint {
    kind: String,
    linear: Vec<Vec<i64>>,
    translation: Vec<Q>,
    #[serde(default)]
    spin: bool,
    #[serde(default = "default_tier")]
    tier: String,
}

fn default_tier() -> String {
    Tier::Exact.name().to_string()
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResolution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ell_parity: Option<String>,
    #[serde(default)]
    spin_isometries: bool,
    #[serde(default)]
    component_reflections: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared_hypothesis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b1: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDihedral {
    a: u32,
    angles: [Q; 3],
    #[serde(default = "one")]
    copies: u32,
}

fn one() -> u32 {
    1
}

/// Values the computation is expected to reproduce.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_q")]
    pub eta_sign: Option<Rational64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_q")]
    pub eta_dirac: Option<Rational64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_ell_even: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus_ell_even: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b3: Option<i64>,
}

mod opt_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(q) => Q(*q).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational64>, D::Error> {
        Ok(Some(Q::deserialize(d)?.0))
    }
}

/// The dihedral subfamily `<alpha, beta>` inside the group, used for the
/// Eisenstein cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct DihedralData {
    pub a: u32,
    pub angles: [Rational64; 3],
    /// Number of dihedral copies `<alpha, beta> g` carrying the same contribution.
    pub copies: u32,
}

impl DihedralData {
    pub fn profile(&self) -> AngleProfile {
        AngleProfile::new(Rational64::new(1, self.a as i64), self.angles)
    }
}

/// A validated orbifold description.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbifoldSpec {
    pub name: String,
    pub title: Option<String>,
    /// Only certificate-level data; no generators.
    pub partial: bool,
    pub lattice: TorusLattice,
    /// The embedding as written, to keep round trips digit-exact.
    pub embedding_digits: Option<Vec<Vec<String>>>,
    pub generators: Vec<AffineIsometry>,
    pub certificate_hints: Vec<VanishingCertificate>,
    pub resolution: ResolutionMetadata,
    pub declared_hypothesis: Option<HypothesisLevel>,
    pub declared_b1: Option<i64>,
    pub dihedral: Option<DihedralData>,
    pub expected: Option<Expected>,
}

impl OrbifoldSpec {
    /// Copy with the resolution parity set, adjusting the expected values.
    pub fn with_ell_parity(&self, parity: Parity) -> OrbifoldSpec {
        let mut s = self.clone();
        s.resolution.ell_parity = Some(parity);
        if let Some(e) = s.expected.as_mut() {
            if parity == Parity::Even && e.nu_ell_even.is_some() {
                e.nu = e.nu_ell_even;
                e.modulus = e.modulus_ell_even;
            }
        }
        let suffix = match parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        s.name = format!("{}-{suffix}", self.name);
        s
    }
}

fn byte_to_line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn int_matrix(rows: &[Vec<i64>], n: usize, what: &str) -> Result<IntMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::ValidationError(format!("{what}: expected a {n}x{n} matrix")));
    }
    Ok(IntMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn translation(v: &[Q], n: usize, what: &str) -> Result<Vec<Rational64>> {
    if v.len() != n {
        return Err(Error::ValidationError(format!(
            "{what}: translation has {} entries, expected {n}",
            v.len()
        )));
    }
    Ok(v.iter().map(|q| q.0).collect())
}

pub fn parse_spec(text: &str) -> Result<OrbifoldSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((0, 0), |s| byte_to_line_col(text, s.start));
        Error::ParseError {
            line,
            col,
            msg: e.message().to_string(),
        }
    })?;
    from_raw(raw)
}

fn from_raw(raw: RawSpec) -> Result<OrbifoldSpec> {
    let n = raw.lattice.rank;
    let embedding = match &raw.lattice.embedding {
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::ValidationError(format!(
                    "lattice.embedding: expected a {n}x{n} matrix"
                )));
            }
            let mut m = DMatrix::<f64>::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    m[(i, j)] = s.trim().parse().map_err(|_| {
                        Error::ValidationError(format!("lattice.embedding[{i}][{j}]: `{s}` is not a decimal"))
                    })?;
                }
            }
            Some(m)
        }
        None => None,
    };
    let lattice = TorusLattice::new(n, embedding, raw.lattice.precision)?;

    let mut generators = Vec::new();
    for (label, g) in &raw.generator {
        let what = format!("generator.{label}");
        let map = AffineIsometry::new(
            int_matrix(&g.linear, n, &what)?,
            translation(&g.translation, n, &what)?,
            label,
        )?;
        if lattice.embedding.is_some() {
            if n != 7 {
                return Err(Error::ValidationError(format!("{what}: the G2 check needs rank 7")));
            }
            let res = phi_residual(&lattice.ambient_linear(&map.linear)?);
            if res > lattice.embedding_precision {
                return Err(Error::ValidationError(format!(
                    "{what} does not preserve the 3-form (residual {res:e})"
                )));
            }
        }
        generators.push(map);
    }

    let mut certificate_hints = Vec::new();
    for (i, h) in raw.certificate_hint.iter().enumerate() {
        let what = format!("certificate_hint[{i}]");
        let kind = CertificateKind::from_name(&h.kind)
            .ok_or_else(|| Error::ValidationError(format!("{what}: unknown kind `{}`", h.kind)))?;
        let tier = Tier::from_name(&h.tier)
            .ok_or_else(|| Error::ValidationError(format!("{what}: unknown tier `{}`", h.tier)))?;
        let witness = AffineIsometry::unchecked(
            int_matrix(&h.linear, n, &what)?,
            translation(&h.translation, n, &what)?,
            &what,
        );
        if intmat::det(&witness.linear) != -1 {
            return Err(Error::ValidationError(format!("{what}: witness must reverse orientation")));
        }
        certificate_hints.push(VanishingCertificate {
            kind,
            witness: Some(witness),
            spin: h.spin,
            tier,
        });
    }

    let res = raw.resolution.unwrap_or_default();
    let ell_parity = match res.ell_parity.as_deref() {
        None => None,
        Some("even") => Some(Parity::Even),
        Some("odd") => Some(Parity::Odd),
        Some(other) => {
            return Err(Error::ValidationError(format!("resolution.ell_parity: `{other}`")))
        }
    };
    let declared_hypothesis = match res.declared_hypothesis.as_deref() {
        None => None,
        Some(s) => Some(HypothesisLevel::from_name(s).ok_or_else(|| {
            Error::ValidationError(format!("resolution.declared_hypothesis: `{s}`"))
        })?),
    };
    if raw.partial && !raw.generator.is_empty() {
        return Err(Error::ValidationError("partial entries carry no generators".into()));
    }
    if raw.partial && (declared_hypothesis.is_none() || res.b1.is_none()) {
        return Err(Error::ValidationError(
            "partial entries need resolution.declared_hypothesis and resolution.b1".into(),
        ));
    }

    let dihedral = match raw.dihedral {
        Some(d) => {
            if d.a < 2 || d.copies == 0 {
                return Err(Error::ValidationError("dihedral: need a >= 2 and copies >= 1".into()));
            }
            let data = DihedralData {
                a: d.a,
                angles: d.angles.map(|q| q.0),
                copies: d.copies,
            };
            if !data.profile().sum_zero_certificate {
                return Err(Error::ValidationError("dihedral.angles must sum to 0 mod 1".into()));
            }
            Some(data)
        }
        None => None,
    };

    Ok(OrbifoldSpec {
        name: raw.name,
        title: raw.title,
        partial: raw.partial,
        lattice,
        embedding_digits: raw.lattice.embedding,
        generators,
        certificate_hints,
        resolution: ResolutionMetadata {
            ell_parity,
            spin_isometries: res.spin_isometries,
            component_reflections: res.component_reflections,
        },
        declared_hypothesis,
        declared_b1: res.b1,
        dihedral,
        expected: raw.expected,
    })
}

fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn serialize_spec(spec: &OrbifoldSpec) -> String {
    let embedding = spec.embedding_digits.clone().or_else(|| {
        spec.lattice.embedding.as_ref().map(|m| {
            m.row_iter()
                .map(|r| r.iter().map(|x| format!("{x:?}")).collect())
                .collect()
        })
    });
    let raw = RawSpec {
        name: spec.name.clone(),
        title: spec.title.clone(),
        partial: spec.partial,
        lattice: RawLattice {
            rank: spec.lattice.rank,
            precision: spec.lattice.embedding_precision,
            embedding,
        },
        generator: spec
            .generators
            .iter()
            .map(|g| {
                (
                    g.label.clone(),
                    RawMap {
                        linear: rows(&g.linear),
                        translation: g.translation.iter().map(|&q| Q(q)).collect(),
                    },
                )
            })
            .collect(),
        certificate_hint: spec
            .certificate_hints
            .iter()
            .filter_map(|h| {
                let w = h.witness.as_ref()?;
                Some(RawHint {
                    kind: h.kind.name().to_string(),
                    linear: rows(&w.linear),
                    translation: w.translation.iter().map(|&q| Q(q)).collect(),
                    spin: h.spin,
                    tier: h.tier.name().to_string(),
                })
            })
            .collect(),
        resolution: Some(RawResolution {
            ell_parity: spec.resolution.ell_parity.map(|p| match p {
                Parity::Even => "even".to_string(),
                Parity::Odd => "odd".to_string(),
            }),
            spin_isometries: spec.resolution.spin_isometries,
            component_reflections: spec.resolution.component_reflections,
            declared_hypothesis: spec.declared_hypothesis.map(|h| h.name().to_string()),
            b1: spec.declared_b1,
        }),
        dihedral: spec.dihedral.as_ref().map(|d| RawDihedral {
            a: d.a,
            angles: d.angles.map(Q),
            copies: d.copies,
        }),
        expected: spec.expected.clone(),
    };
    toml::to_string(&raw).expect("catalog entries serialize")
}

const SOURCES: [(&str, &str); 18] = [
    ("ex01", include_str!("../catalog/ex01.toml")),
    ("ex02", include_str!("../catalog/ex02.toml")),
    ("ex03", include_str!("../catalog/ex03.toml")),
    ("ex04", include_str!("../catalog/ex04.toml")),
    ("ex05", include_str!("../catalog/ex05.toml")),
    ("ex06", include_str!("../catalog/ex06.toml")),
    ("ex07", include_str!("../catalog/ex07.toml")),
    ("ex08", include_str!("../catalog/ex08.toml")),
    ("ex09", include_str!("../catalog/ex09.toml")),
    ("ex10", include_str!("../catalog/ex10.toml")),
    ("ex11", include_str!("../catalog/ex11.toml")),
    ("ex12", include_str!("../catalog/ex12.toml")),
    ("ex13", include_str!("../catalog/ex13.toml")),
    ("ex14", include_str!("../catalog/ex14.toml")),
    ("ex15", include_str!("../catalog/ex15.toml")),
    ("ex16", include_str!("../catalog/ex16.toml")),
    ("ex17", include_str!("../catalog/ex17.toml")),
    ("ex18", include_str!("../catalog/ex18.toml")),
];

/// Source text of a shipped catalog file.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin_names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

/// All 18 shipped examples, in order.
pub fn builtin_examples() -> Vec<OrbifoldSpec> {
    SOURCES
        .iter()
        .map(|(n, s)| parse_spec(s).unwrap_or_else(|e| panic!("shipped catalog `{n}` is invalid: {e}")))
        .collect()
}

/// Look up `exNN`, or `exNN-even` / `exNN-odd` for the parity variants.
pub fn builtin(name: &str) -> Result<OrbifoldSpec> {
    let (base, parity) = match name.rsplit_once('-') {
        Some((b, "even")) => (b, Some(Parity::Even)),
        Some((b, "odd")) => (b, Some(Parity::Odd)),
        _ => (name, None),
    };
    let src = builtin_source(base).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    let spec = parse_spec(src)?;
    Ok(match parity {
        Some(p) => spec.with_ell_parity(p),
        None => spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::r;

    const MINIMAL: &str = "name = \"t\"\n[lattice]\nrank = 7\n";

    #[test]
    fn all_builtins_parse() {
        let all = builtin_examples();
        assert_eq!(all.len(), 18);
        assert_eq!(all[6].generators.len(), 2);
        assert!(all[14].partial);
    }

    #[test]
    fn example_seven_metadata() {
        let s = builtin("ex07").unwrap();
        let e = s.expected.unwrap();
        assert_eq!((e.b2, e.b3, e.nu), (Some(5), Some(13), Some(3)));
        assert_eq!(s.dihedral.unwrap().a, 3);
    }

    #[test]
    fn empty_generator_list_is_valid() {
        let s = parse_spec(MINIMAL).unwrap();
        assert!(s.generators.is_empty());
        assert!(s.lattice.embedding.is_none());
    }

    #[test]
    fn non_integer_matrix_entry_is_a_parse_error() {
        let text = format!(
            "{MINIMAL}[generator.g]\nlinear = [[1.5, 0, 0, 0, 0, 0, 0]]\ntranslation = [\"0\"]\n"
        );
        assert!(matches!(parse_spec(&text), Err(Error::ParseError { line: 5, .. })));
    }

    #[test]
    fn bad_rational_is_a_parse_error() {
        let text = format!(
            "{MINIMAL}[dihedral]\na = 3\nangles = [\"1/3\", \"x\", \"1/3\"]\n"
        );
        assert!(matches!(parse_spec(&text), Err(Error::ParseError { .. })));
    }

    #[test]
    fn determinant_minus_one_generator_is_rejected() {
        let mut rows = vec![vec![0i64; 7]; 7];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = if i == 0 { -1 } else { 1 };
        }
        let text = format!(
            "{MINIMAL}[generator.g]\nlinear = {rows:?}\ntranslation = [\"0\", \"0\", \"0\", \"0\", \"0\", \"0\", \"0\"]\n"
        );
        assert!(matches!(parse_spec(&text), Err(Error::ValidationError(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        for spec in builtin_examples() {
            let again = parse_spec(&serialize_spec(&spec)).unwrap();
            assert_eq!(again, spec, "{}", spec.name);
        }
    }

    #[test]
    fn parity_variants() {
        let even = builtin("ex03-even").unwrap();
        assert_eq!(even.resolution.ell_parity, Some(Parity::Even));
        let e = even.expected.unwrap();
        assert_eq!((e.nu, e.modulus), (Some(24), Some(48)));
        let odd = builtin("ex03-odd").unwrap().expected.unwrap();
        assert_eq!((odd.nu, odd.modulus), (Some(0), Some(24)));
    }

    #[test]
    fn unknown_builtin() {
        assert_eq!(builtin("ex99").unwrap_err(), Error::UnknownBuiltin("ex99".into()));
    }

    #[test]
    fn example_fourteen_expected_values() {
        let e = builtin("ex14").unwrap().expected.unwrap();
        assert_eq!(e.eta_sign, Some(r(1, 3)));
        assert_eq!(e.eta_dirac, Some(r(-1, 3)));
    }
}
