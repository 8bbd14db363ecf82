//! One PASS/FAIL line per acceptance criterion, written to stderr.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use g2nu::catalog::{builtin, builtin_names};
use g2nu::eta_sign::Provenance;
use g2nu::g2clifford::{eigenspace_dims, Spinor};
use g2nu::group::Parity;
use g2nu::maslov::tcs_cross_check;
use g2nu::nu::{classify, compute_nu, compute_nu_situation1_mod48, group_of, ReportRow};
use g2nu::oracle::{self, OracleReport};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { passed: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { passed: false, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{} ({:.2?})", out.detail, took);
    if let Some(l) = limit {
        if took > l {
            out.passed = false;
            out.detail = format!("{}; over the {:?} budget", out.detail, l);
        }
    }
    out
}

fn examples_seven_to_fourteen() -> Outcome {
    let expected = [
        ("ex07", 6, q(1, 1), q(-1, 1), 3),
        ("ex08", 12, q(-1, 1), q(-1, 1), 45),
        ("ex09", 8, q(0, 1), q(-1, 1), 0),
        ("ex10", 16, q(0, 1), q(-1, 1), 0),
        ("ex11", 12, q(0, 1), q(-1, 1), 0),
        ("ex12", 24, q(0, 1), q(-1, 1), 0),
        ("ex13", 14, q(-1, 1), q(-1, 1), 45),
        ("ex14", 18, q(1, 3), q(-1, 3), 33),
    ];
    for (name, order, eb, ed, nu) in expected {
        let res = match compute_nu(&builtin(name).unwrap()) {
            Ok(r) => r,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        let got = (res.group_order, res.eta_sign.exact, res.eta_dirac.exact, res.nu_value, res.modulus);
        if got != (Some(order), Some(eb), Some(ed), nu, 48) {
            return fail(format!("{name}: got {got:?}"));
        }
    }
    ok("group orders, eta values and nu match exactly")
}

fn examples_one_to_six() -> Outcome {
    let b1 = [3, 1, 0, 0, 0, 0];
    for (i, name) in ["ex01", "ex02", "ex03", "ex04", "ex05", "ex06"].into_iter().enumerate() {
        let spec = builtin(name).unwrap();
        let res = match compute_nu(&spec) {
            Ok(r) => r,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        let zero = q(0, 1);
        if res.eta_sign.exact != Some(zero) || res.eta_dirac.exact != Some(zero) {
            return fail(format!("{name}: eta values {} and {}", res.eta_sign, res.eta_dirac));
        }
        if res.eta_sign.provenance != Provenance::VanishingCertificate
            || res.eta_dirac.provenance != Provenance::VanishingCertificate
        {
            return fail(format!("{name}: eta not from certificates"));
        }
        if res.nu_value % 24 != 0 {
            return fail(format!("{name}: nu = {} mod {}", res.nu_value, res.modulus));
        }
        if res.b1 != b1[i] {
            return fail(format!("{name}: b1 = {}", res.b1));
        }
        let even = spec.with_ell_parity(Parity::Even);
        match compute_nu_situation1_mod48(&even) {
            Ok(r) if r.modulus == 48 && r.nu_value == (24 * (1 + b1[i])).rem_euclid(48) => {}
            Ok(r) => return fail(format!("{name} even: nu = {} mod {}", r.nu_value, r.modulus)),
            Err(e) => return fail(format!("{name} even: {e}")),
        }
    }
    ok("certified eta = 0, nu = 0 mod 24, even variants give 24(1+b1) mod 48")
}

fn examples_fifteen_to_eighteen() -> Outcome {
    for name in ["ex15", "ex16", "ex17", "ex18"] {
        let spec = builtin(name).unwrap();
        let res = match compute_nu(&spec) {
            Ok(r) => r,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        let global = spec.certificate_hints.iter().any(|h| {
            h.witness.as_ref().is_some_and(|w| {
                (0..7).all(|i| (0..7).all(|j| w.linear[(i, j)] == if i == j { -1 } else { 0 }))
            })
        });
        if !global {
            return fail(format!("{name}: no global reflection certificate"));
        }
        if res.eta_sign.provenance != Provenance::VanishingCertificate || (res.modulus, res.nu_value) != (24, 0) {
            return fail(format!("{name}: nu = {} mod {}", res.nu_value, res.modulus));
        }
    }
    ok("nu = 0 mod 24 by the global reflection")
}

fn maslov() -> Outcome {
    let mut downgraded = Vec::new();
    for name in ["ex07", "ex08", "ex09", "ex11", "ex13"] {
        let rep = match tcs_cross_check(&builtin(name).unwrap()) {
            Ok(r) => r,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        if !rep.sign_agrees || !rep.dirac_agrees_mod_z {
            return fail(rep.to_string());
        }
        if !rep.dirac_agrees_as_integers {
            downgraded.push(name);
        }
    }
    if downgraded.is_empty() {
        ok("H3 Maslov = eta(B) exactly, spinor Maslov = eta(D) as integers")
    } else {
        ok(format!("spinor agreement only mod Z for {} (flagged)", downgraded.join(", ")))
    }
}

fn oracles() -> Outcome {
    let mut reports: Vec<(String, OracleReport)> = Vec::new();
    for name in ["ex07", "ex08", "ex09", "ex10", "ex11", "ex12", "ex13", "ex14"] {
        let group = group_of(&builtin(name).unwrap()).unwrap();
        match oracle::verify_shell_traces(&group, oracle::DEFAULT_SHELLS) {
            Ok(r) => reports.push((name.into(), r)),
            Err(e) => return fail(format!("{name} shells: {e}")),
        }
        match oracle::verify_abel(&group, oracle::ABEL_RADIUS) {
            Ok(r) => reports.push((name.into(), r)),
            Err(e) => return fail(format!("{name} abel: {e}")),
        }
    }
    reports.push(("-".into(), oracle::verify_eisenstein(24)));
    reports.push(("-".into(), oracle::verify_trig_identity(500, 2024)));
    let pinned = [
        ("shell_traces", 1e-8),
        ("abel_polylog", 1e-3),
        ("eisenstein", 1e-10),
        ("trig_identity", 1e-12),
    ];
    for (ex, r) in &reports {
        let tol = pinned.iter().find(|p| p.0 == r.check_name).map(|p| p.1);
        if tol != Some(r.tolerance) {
            return fail(format!("{ex}/{}: tolerance {:e} not pinned", r.check_name, r.tolerance));
        }
        if !r.passed || r.instances == 0 {
            return fail(format!("{ex}/{}: deviation {:e}", r.check_name, r.max_abs_deviation));
        }
    }
    let worst = reports.iter().map(|(_, r)| r.max_abs_deviation).fold(0.0, f64::max);
    ok(format!("{} reports, worst deviation {worst:e}", reports.len()))
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(-30..=30), rng.gen_range(1..=12))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let u: [Q; 7] = std::array::from_fn(|_| random_q(&mut rng));
        let s = Spinor::new(random_q(&mut rng), std::array::from_fn(|_| random_q(&mut rng)));
        let mut c = || Complex::new(random_q(&mut rng), random_q(&mut rng));
        let cs = Spinor::from_array(std::array::from_fn(|_| c()));
        let ct = Spinor::from_array(std::array::from_fn(|_| c()));
        if !clifford_relation(&u, &s) || !skew_hermitian(&u, &cs, &ct) {
            return fail("Clifford relation or skew-Hermitian check");
        }
        let uf: [f64; 7] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        if eigenspace_dims(&uf) != (4, 4) {
            return fail("half-spinor dimension");
        }
    }
    for _ in 0..1000 {
        let t = q(rng.gen_range(-500..=500), rng.gen_range(1..=60));
        if !sawtooth_laws(t, rng.gen_range(-20..=20)) {
            return fail(format!("sawtooth at {t}"));
        }
    }
    for name in ["ex07", "ex09"] {
        let group = group_of(&builtin(name).unwrap()).unwrap();
        if !oracle::verify_fixed_points(&group, 24).passed {
            return fail(format!("{name}: fixed points disagree with the grid"));
        }
    }
    for _ in 0..100 {
        let ex = FULL_EXAMPLES[rng.gen_range(0..FULL_EXAMPLES.len())];
        let ops: Vec<(usize, usize, i64)> = (0..rng.gen_range(0..6))
            .map(|_| (rng.gen_range(0..7), rng.gen_range(0..7), rng.gen_range(-2..=2)))
            .collect();
        let shift = (0..7).map(|_| q(rng.gen_range(0..12), rng.gen_range(1..=12))).collect();
        if let Err(e) = conjugated_betti(ex, elementary_product(&ops), shift) {
            return fail(e);
        }
    }
    ok("Clifford, half-spinor, sawtooth, fixed-point and b1 suites")
}

fn classification() -> Outcome {
    let mut rows = Vec::new();
    for name in builtin_names() {
        let spec = builtin(name).unwrap();
        let spec = match name {
            "ex03" | "ex04" | "ex05" | "ex06" => spec.with_ell_parity(Parity::Odd),
            _ => spec,
        };
        rows.push(ReportRow::new(&spec, &compute_nu(&spec).unwrap()));
    }
    for name in ["ex03", "ex04", "ex05", "ex06"] {
        let spec = builtin(name).unwrap().with_ell_parity(Parity::Even);
        rows.push(ReportRow::new(&spec, &compute_nu(&spec).unwrap()));
    }
    let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let want: BTreeMap<String, BTreeSet<String>> = [
        ("0 (48)", set(&["ex01", "ex02", "ex09", "ex10", "ex11", "ex12"])),
        (
            "0 (24) only",
            set(&["ex03-odd", "ex04-odd", "ex05-odd", "ex06-odd", "ex15", "ex16", "ex17", "ex18"]),
        ),
        ("24 (48)", set(&["ex03-even", "ex04-even", "ex05-even", "ex06-even"])),
        ("3", set(&["ex07"])),
        ("45", set(&["ex08"])),
        ("45,33", set(&["ex13", "ex14"])),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let got = classify(&rows);
    if got == want {
        ok("six classes match")
    } else {
        fail(format!("got {got:?}"))
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("Examples 7-14", Some(Duration::from_secs(5)), examples_seven_to_fourteen),
        ("Examples 1-6", None, examples_one_to_six),
        ("Examples 15-18", None, examples_fifteen_to_eighteen),
        ("Maslov cross-check", Some(Duration::from_secs(2)), maslov),
        ("oracle suites", Some(Duration::from_secs(30)), oracles),
        ("property suites", None, properties),
        ("classification", None, classification),
    ];
    let mut all = true;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out = timed(limit, f);
        all &= out.passed;
        // written to the raw handle so the lines survive output capture
        writeln!(
            std::io::stderr(),
            "criterion {}: {} {name}: {}",
            i + 1,
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        )
        .unwrap();
    }
    assert!(all, "some acceptance criteria failed");
}
