//! The ν-invariant `3 eta(B) - 24 eta(D) + 24 (1 + b_1)` of a resolved
//! orbifold, reduced modulo 48 or 24 according to the hypothesis verdict.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::catalog::OrbifoldSpec;
use crate::error::{Error, Result};
use crate::eta_dirac::{eta_dirac_dihedral, eta_dirac_orbifold};
use crate::eta_sign::{
    check_donnelly, dihedral_weight, eta_signature_dihedral, eta_signature_orbifold, EtaValue,
    Provenance, Tier,
};
use crate::g2clifford::rotation_angles;
use crate::group::{
    betti_one, check_hypothesis, generate_group, singular_locus, GroupAction, HypothesisLevel,
    HypothesisVerdict, DEFAULT_ORDER_BOUND,
};
use crate::rational::{format_rational, frac};

/// A named consistency check attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuResult {
    pub nu_value: i64,
    pub modulus: i64,
    pub eta_sign: EtaValue,
    pub eta_dirac: EtaValue,
    /// Weakest certificate tier behind `eta_dirac`.
    pub dirac_tier: Tier,
    pub b1: i64,
    /// `None` for partial entries.
    pub group_order: Option<usize>,
    pub hypothesis: HypothesisVerdict,
    pub derivation_log: Vec<String>,
    pub checks: Vec<Check>,
}

impl NuResult {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn exact(v: &EtaValue, what: &str) -> Result<Rational64> {
    v.exact
        .ok_or_else(|| Error::NonIntegralNu(format!("{what} has no exact value")))
}

/// Reduce `3 eta_b - 24 eta_d + 24 (1 + b1)` modulo `modulus`.
pub fn nu_from_parts(eta_b: Rational64, eta_d: Rational64, b1: i64, modulus: i64) -> Result<i64> {
    let x = eta_b * 3 - eta_d * 24;
    if !x.is_integer() {
        return Err(Error::NonIntegralNu(format_rational(x)));
    }
    Ok((x.to_integer() + 24 * (1 + b1)).mod_floor(&modulus))
}

/// Enumerate the group of a full spec.
pub fn group_of(spec: &OrbifoldSpec) -> Result<GroupAction> {
    generate_group(&spec.lattice, &spec.generators, DEFAULT_ORDER_BOUND)
}

pub fn compute_nu(spec: &OrbifoldSpec) -> Result<NuResult> {
    if spec.partial {
        return compute_partial(spec);
    }
    let mut log = Vec::new();
    let mut checks = Vec::new();
    let group = group_of(spec)?;
    log.push(format!("|Gamma| = {}", group.order()));
    let b1 = betti_one(&group)?;
    log.push(format!("b1 = {b1} (average trace of the linear parts)"));

    let locus = singular_locus(&group);
    let hypothesis = check_hypothesis(&locus, Some(&spec.resolution));
    log.push(format!(
        "singular locus: {} component orbit(s); verdict {}",
        locus.len(),
        hypothesis.level.name()
    ));
    if !hypothesis.level.licenses_mod24() {
        return Err(Error::HypothesisInsufficient(format!(
            "{}: {}",
            hypothesis.level.name(),
            hypothesis.witness_notes.last().cloned().unwrap_or_default()
        )));
    }

    let sign = eta_signature_orbifold(&group, &spec.certificate_hints)?;
    let dirac = eta_dirac_orbifold(&group, &spec.certificate_hints)?;
    let certified = |es: &[crate::eta_sign::ElementEta]| es.iter().filter(|e| e.certificate.is_some()).count();
    log.push(format!(
        "eta(B) = {} ({} of {} elements by certificate)",
        sign.value,
        certified(&sign.elements),
        group.order()
    ));
    log.push(format!(
        "eta(D) = {} ({} of {} elements by certificate, tier {})",
        dirac.value,
        certified(&dirac.elements),
        group.order(),
        dirac.tier.name()
    ));

    if let Some(d) = &spec.dihedral {
        checks.extend(dihedral_checks(spec, &group, &sign.value, &dirac.value, d)?);
    }

    finish(
        spec,
        sign.value,
        dirac.value,
        dirac.tier,
        b1,
        Some(group.order()),
        hypothesis,
        log,
        checks,
    )
}

fn compute_partial(spec: &OrbifoldSpec) -> Result<NuResult> {
    let level = spec
        .declared_hypothesis
        .ok_or_else(|| Error::HypothesisInsufficient("partial entry without a declared hypothesis".into()))?;
    let b1 = spec
        .declared_b1
        .ok_or_else(|| Error::HypothesisInsufficient("partial entry without b1".into()))?;
    let hypothesis = HypothesisVerdict {
        level,
        witness_notes: vec!["declared by the catalog entry".into()],
    };
    if !level.licenses_mod24() {
        return Err(Error::HypothesisInsufficient(level.name().into()));
    }
    let cert = spec
        .certificate_hints
        .first()
        .ok_or_else(|| Error::UnsupportedElement(format!("{}: no global certificate", spec.name)))?;
    let mut log = vec![
        "partial entry: the group is not enumerated".to_string(),
        format!(
            "global {} certificate (spin = {}, tier {}) forces both equivariant eta to vanish",
            cert.kind.name(),
            cert.spin,
            cert.tier.name()
        ),
    ];
    if !cert.spin {
        return Err(Error::UnsupportedElement(format!("{}: certificate is not spin", spec.name)));
    }
    let zero = EtaValue::certified_zero();
    log.push(format!("b1 = {b1} (declared); verdict {} (declared)", level.name()));
    finish(spec, zero.clone(), zero, cert.tier, b1, None, hypothesis, log, Vec::new())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &OrbifoldSpec,
    eta_sign: EtaValue,
    eta_dirac: EtaValue,
    dirac_tier: Tier,
    b1: i64,
    group_order: Option<usize>,
    hypothesis: HypothesisVerdict,
    mut log: Vec<String>,
    mut checks: Vec<Check>,
) -> Result<NuResult> {
    let eb = exact(&eta_sign, "eta(B)")?;
    let ed = exact(&eta_dirac, "eta(D)")?;
    let mut modulus = if hypothesis.level.licenses_mod48() { 48 } else { 24 };
    match dirac_tier {
        Tier::ModZ => {
            modulus = 24;
            log.push("eta(D) is known mod Z only: -24 eta(D) is defined mod 24".into());
        }
        Tier::Mod2Z => log.push("eta(D) is known mod 2Z: -24 eta(D) is still defined mod 48".into()),
        Tier::Exact => {}
    }
    let nu = nu_from_parts(eb, ed, b1, modulus)?;
    log.push(format!(
        "nu = 3*({}) - 24*({}) + 24*(1+{b1}) = {} = {nu} mod {modulus}",
        format_rational(eb),
        format_rational(ed),
        eb * 3 - ed * 24 + Rational64::from_integer(24 * (1 + b1)),
    ));

    if let Some(e) = &spec.expected {
        let mut cmp = |name: &str, got: String, want: Option<String>| {
            if let Some(w) = want {
                checks.push(Check::new(name, got == w, format!("computed {got}, expected {w}")));
            }
        };
        if let Some(n) = group_order {
            cmp("group_order", n.to_string(), e.group_order.map(|v| v.to_string()));
        }
        cmp("b1", b1.to_string(), e.b1.map(|v| v.to_string()));
        cmp("eta_sign", format_rational(eb), e.eta_sign.map(format_rational));
        cmp("eta_dirac", format_rational(ed), e.eta_dirac.map(format_rational));
        cmp("nu", nu.to_string(), e.nu.map(|v| v.to_string()));
        cmp("modulus", modulus.to_string(), e.modulus.map(|v| v.to_string()));
    }

    Ok(NuResult {
        nu_value: nu,
        modulus,
        eta_sign,
        eta_dirac,
        dirac_tier,
        b1,
        group_order,
        hypothesis,
        derivation_log: log,
        checks,
    })
}

fn dihedral_checks(
    spec: &OrbifoldSpec,
    group: &GroupAction,
    sign: &EtaValue,
    dirac: &EtaValue,
    d: &crate::catalog::DihedralData,
) -> Result<Vec<Check>> {
    let profile = d.profile();
    let weight = dihedral_weight(d.a, d.copies, group.order());
    let mut out = Vec::new();
    for (name, closed, got) in [
        ("dihedral_sign", eta_signature_dihedral(&profile), sign),
        ("dihedral_dirac", eta_dirac_dihedral(d.a, &profile), dirac),
    ] {
        let want = closed.exact.map(|q| q * weight);
        out.push(Check::new(
            name,
            want.is_some() && want == got.exact,
            format!(
                "{} x {} vs {}",
                format_rational(weight),
                closed,
                got
            ),
        ));
    }

    let mut catalog_angles = d.angles.map(frac);
    catalog_angles.sort();
    let target = Rational64::new(1, d.a as i64);
    let mut found = false;
    for g in &group.elements {
        if check_donnelly(g).is_err() {
            continue;
        }
        let p = rotation_angles(g, &spec.lattice)?;
        let mut a = p.angles.map(frac);
        a.sort();
        if frac(p.d) == target && a == catalog_angles {
            found = true;
            break;
        }
    }
    out.push(Check::new(
        "dihedral_angles",
        found,
        format!("an element with d = 1/{} and the catalog angles", d.a),
    ));
    Ok(out)
}

/// The even-parity result with vanishing eta, licensed only at the mod-48 level.
pub fn compute_nu_situation1_mod48(spec: &OrbifoldSpec) -> Result<NuResult> {
    let res = compute_nu(spec)?;
    if !res.hypothesis.level.licenses_mod48() || res.modulus != 48 {
        return Err(Error::HypothesisInsufficient(format!(
            "verdict {} does not give Situation 1",
            res.hypothesis.level.name()
        )));
    }
    let certified = |v: &EtaValue| v.provenance == Provenance::VanishingCertificate;
    if !certified(&res.eta_sign) || !certified(&res.eta_dirac) {
        return Err(Error::HypothesisInsufficient(
            "eta is not certified to vanish".into(),
        ));
    }
    Ok(res)
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub example: String,
    pub group_order: Option<usize>,
    pub b1: i64,
    pub b2: Option<i64>,
    pub b3: Option<i64>,
    pub eta_sign: String,
    pub eta_dirac: String,
    pub nu: i64,
    pub modulus: i64,
    pub checks_passed: bool,
}

pub const CSV_HEADER: &str =
    "example,group_order,b1,b2,b3,eta_sign,eta_dirac,nu,modulus,checks_passed";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> Option<Option<T>> {
    if s.is_empty() {
        Some(None)
    } else {
        s.parse().ok().map(Some)
    }
}

impl ReportRow {
    pub fn new(spec: &OrbifoldSpec, res: &NuResult) -> Self {
        let e = spec.expected.clone().unwrap_or_default();
        let q = |v: &EtaValue| v.exact.map(format_rational).unwrap_or_default();
        ReportRow {
            example: spec.name.clone(),
            group_order: res.group_order,
            b1: res.b1,
            b2: e.b2,
            b3: e.b3,
            eta_sign: q(&res.eta_sign),
            eta_dirac: q(&res.eta_dirac),
            nu: res.nu_value,
            modulus: res.modulus,
            checks_passed: res.checks_passed(),
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.example,
            opt(self.group_order),
            self.b1,
            opt(self.b2),
            opt(self.b3),
            self.eta_sign,
            self.eta_dirac,
            self.nu,
            self.modulus,
            self.checks_passed
        )
    }

    pub fn from_csv(line: &str) -> Option<ReportRow> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 10 {
            return None;
        }
        Some(ReportRow {
            example: f[0].to_string(),
            group_order: parse_opt(f[1])?,
            b1: f[2].parse().ok()?,
            b2: parse_opt(f[3])?,
            b3: parse_opt(f[4])?,
            eta_sign: f[5].to_string(),
            eta_dirac: f[6].to_string(),
            nu: f[7].parse().ok()?,
            modulus: f[8].parse().ok()?,
            checks_passed: f[9].parse().ok()?,
        })
    }
}

/// Partition rows into the classes of the (b2, b3) diagram: rows sharing a
/// node pool their ν values; rows without a node are classed by (ν, modulus).
pub fn classify(rows: &[ReportRow]) -> BTreeMap<String, BTreeSet<String>> {
    let mut nodes: BTreeMap<(i64, i64), BTreeSet<i64>> = BTreeMap::new();
    for r in rows {
        if let (Some(b2), Some(b3)) = (r.b2, r.b3) {
            nodes.entry((b2, b3)).or_default().insert(r.nu);
        }
    }
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in rows {
        let class = match (r.b2, r.b3) {
            (Some(b2), Some(b3)) => {
                let values = &nodes[&(b2, b3)];
                if values.len() == 1 && values.contains(&0) {
                    "0 (48)".to_string()
                } else {
                    values
                        .iter()
                        .rev()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                }
            }
            _ if r.modulus == 24 => format!("{} (24) only", r.nu),
            _ => format!("{} (48)", r.nu),
        };
        out.entry(class).or_default().insert(r.example.clone());
    }
    out
}

/// The class of every supported example, given results at both parities.
pub fn classification_report(rows: &[ReportRow]) -> Vec<(String, Vec<String>)> {
    classify(rows)
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().collect()))
        .collect()
}

/// Whether a level admits the formula at all.
pub fn is_supported(level: HypothesisLevel) -> bool {
    level.licenses_mod24()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::group::Parity;
    use crate::rational::r;

    #[test]
    fn formula_examples() {
        assert_eq!(nu_from_parts(r(1, 1), r(-1, 1), 0, 48).unwrap(), 3);
        assert_eq!(nu_from_parts(r(1, 3), r(-1, 3), 0, 48).unwrap(), 33);
        assert_eq!(nu_from_parts(r(0, 1), r(0, 1), 3, 48).unwrap(), 0);
        assert_eq!(nu_from_parts(r(0, 1), r(0, 1), 0, 48).unwrap(), 24);
        assert!(matches!(
            nu_from_parts(r(1, 2), r(0, 1), 0, 48),
            Err(Error::NonIntegralNu(_))
        ));
    }

    #[test]
    fn example_seven() {
        let res = compute_nu(&builtin("ex07").unwrap()).unwrap();
        assert_eq!((res.nu_value, res.modulus), (3, 48));
        assert!(res.checks_passed(), "{:?}", res.checks);
    }

    #[test]
    fn example_fourteen() {
        let res = compute_nu(&builtin("ex14").unwrap()).unwrap();
        assert_eq!(res.eta_sign.exact, Some(r(1, 3)));
        assert_eq!(res.eta_dirac.exact, Some(r(-1, 3)));
        assert_eq!((res.nu_value, res.modulus), (33, 48));
        assert!(res.checks_passed(), "{:?}", res.checks);
    }

    #[test]
    fn partial_entries_are_mod_24() {
        for n in ["ex15", "ex16", "ex17", "ex18"] {
            let res = compute_nu(&builtin(n).unwrap()).unwrap();
            assert_eq!((res.nu_value, res.modulus), (0, 24), "{n}");
        }
    }

    #[test]
    fn situation_one_variants() {
        let even = builtin("ex03").unwrap().with_ell_parity(Parity::Even);
        let res = compute_nu_situation1_mod48(&even).unwrap();
        assert_eq!((res.nu_value, res.modulus), (24, 48));
        let odd = builtin("ex03-odd").unwrap();
        assert!(compute_nu_situation1_mod48(&odd).is_err());
        let ex1 = compute_nu_situation1_mod48(&builtin("ex01-even").unwrap()).unwrap();
        assert_eq!((ex1.nu_value, ex1.modulus), (0, 48));
    }

    #[test]
    fn precision_does_not_change_results() {
        for n in ["ex07", "ex13", "ex14"] {
            let spec = builtin(n).unwrap();
            let mut tight = spec.clone();
            tight.lattice.embedding_precision = 1e-20;
            let (a, b) = (compute_nu(&spec).unwrap(), compute_nu(&tight).unwrap());
            assert_eq!((a.nu_value, a.modulus, a.eta_sign.exact), (b.nu_value, b.modulus, b.eta_sign.exact));
            assert_eq!(a.eta_dirac.exact, b.eta_dirac.exact);
        }
    }

    #[test]
    fn every_builtin_matches_its_expected_block() {
        let mut names: Vec<String> = crate::catalog::builtin_names().iter().map(|s| s.to_string()).collect();
        names.extend((1..=6).flat_map(|i| [format!("ex0{i}-even"), format!("ex0{i}-odd")]));
        for n in names {
            let res = compute_nu(&builtin(&n).unwrap()).unwrap();
            assert!(res.checks_passed(), "{n}: {:?}", res.checks);
            assert!(!res.checks.is_empty(), "{n}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let spec = builtin("ex14").unwrap();
        let row = ReportRow::new(&spec, &compute_nu(&spec).unwrap());
        assert_eq!(row.to_csv(), "ex14,18,0,2,10,1/3,-1/3,33,48,true");
        assert_eq!(ReportRow::from_csv(&row.to_csv()), Some(row));
    }

    #[test]
    fn shared_nodes_pool_values() {
        let row = |name: &str, b: Option<(i64, i64)>, nu, m| ReportRow {
            example: name.into(),
            group_order: None,
            b1: 0,
            b2: b.map(|x| x.0),
            b3: b.map(|x| x.1),
            eta_sign: "0".into(),
            eta_dirac: "0".into(),
            nu,
            modulus: m,
            checks_passed: true,
        };
        let c = classify(&[
            row("a", Some((2, 10)), 45, 48),
            row("b", Some((2, 10)), 33, 48),
            row("c", None, 0, 24),
            row("d", Some((5, 13)), 3, 48),
        ]);
        assert_eq!(c["45,33"].len(), 2);
        assert!(c["0 (24) only"].contains("c"));
        assert!(c["3"].contains("d"));
    }
}
