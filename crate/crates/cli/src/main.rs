use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use g2nu::catalog::{builtin, builtin_names, parse_spec, OrbifoldSpec};
use g2nu::eta_dirac::eta_gamma_dirac;
use g2nu::eta_sign::{eta_gamma_signature, find_certificate, EtaValue};
use g2nu::group::{betti_one, check_hypothesis, singular_locus, Parity};
use g2nu::maslov::tcs_cross_check;
use g2nu::nu::{classify, compute_nu, group_of, ReportRow, CSV_HEADER};
use g2nu::oracle::{self, OracleReport};
use g2nu::rational::format_rational;
use g2nu::Error;

#[derive(Parser)]
#[command(name = "g2nu", version, about = "nu-invariants of flat G2-orbifolds T^7/Gamma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    format: Format,
    /// Number of dual shells for the trace oracle.
    #[arg(long, global = true, default_value_t = oracle::DEFAULT_SHELLS)]
    shells: usize,
    /// Significant digits for numeric witnesses.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
    /// Parity of the resolution data for Examples 1-6.
    #[arg(long, global = true, value_enum)]
    ell_parity: Option<ParityArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a spec and check its invariants.
    Validate { spec: String },
    /// Singular locus and hypothesis verdict.
    Analyze { spec: String },
    /// Both orbifold eta-invariants with provenance.
    Eta { spec: String },
    /// The nu-invariant with its derivation.
    Nu { spec: String },
    /// Maslov cross-checks (default: Examples 7, 8, 9, 11, 13).
    Maslov { spec: Option<String> },
    /// Numeric verification sweeps (default: Examples 7-14).
    Oracle { spec: Option<String> },
    /// All built-in examples as a table.
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Md,
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

enum Failure {
    Usage(Error),
    Module(Error),
    Refused(String),
    Oracle(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Module(e)
    }
}

type Outcome = Result<String, Failure>;

const MASLOV_DEFAULT: [&str; 5] = ["ex07", "ex08", "ex09", "ex11", "ex13"];
const ORACLE_DEFAULT: [&str; 8] = ["ex07", "ex08", "ex09", "ex10", "ex11", "ex12", "ex13", "ex14"];

const FIXED_POINT_GRID: [&str; 2] = ["ex07", "ex09"];

fn is_parity_example(name: &str) -> bool {
    matches!(name, "ex01" | "ex02" | "ex03" | "ex04" | "ex05" | "ex06")
}

fn load(arg: &str, parity: Option<ParityArg>) -> Result<OrbifoldSpec, Failure> {
    read_spec(arg, parity).map_err(Failure::Usage)
}

fn read_spec(arg: &str, parity: Option<ParityArg>) -> Result<OrbifoldSpec, Error> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ValidationError(format!("{arg}: {e}")))?;
        parse_spec(&text)?
    } else {
        builtin(arg)?
    };
    Ok(match parity {
        Some(p) => spec.with_ell_parity(p.into()),
        None => spec,
    })
}

fn num(x: f64, digits: u8) -> String {
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
}

fn eta_json(v: &EtaValue, digits: u8) -> serde_json::Value {
    json!({
        "exact": v.exact.map(format_rational),
        "numeric": num(v.numeric, digits),
        "error_bound": v.error_bound,
        "provenance": v.provenance.name(),
    })
}

fn lines<T: serde::Serialize>(records: &[T]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("json") + "\n")
        .collect()
}

fn validate(cli: &Cli, spec: &OrbifoldSpec) -> Outcome {
    let mut checks: Vec<(String, bool, String)> = vec![
        ("parse".into(), true, format!("`{}` parsed and validated", spec.name)),
        (
            "generators".into(),
            true,
            format!("{} generator(s) preserve the lattice and the 3-form", spec.generators.len()),
        ),
        (
            "certificate_hints".into(),
            true,
            format!("{} hint(s) with determinant -1", spec.certificate_hints.len()),
        ),
    ];
    if !spec.partial {
        let group = group_of(spec)?;
        checks.push(("group_closure".into(), true, format!("|Gamma| = {}", group.order())));
        match betti_one(&group) {
            Ok(b) => checks.push(("b1_integral".into(), true, format!("b1 = {b}"))),
            Err(e) => checks.push(("b1_integral".into(), false, e.to_string())),
        }
    }
    if spec.expected.is_some() {
        let res = compute_nu(spec)?;
        for c in res.checks {
            checks.push((format!("expected.{}", c.name), c.passed, c.detail));
        }
    }
    let all = checks.iter().all(|c| c.1);
    let out = match cli.format {
        Format::JsonLines => lines(
            &checks
                .iter()
                .map(|(n, p, d)| json!({"check": n, "passed": p, "detail": d}))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for (n, p, d) in &checks {
                writeln!(s, "{n},{p},\"{d}\"").unwrap();
            }
            s
        }
        Format::Md => {
            let mut s = format!("# validate {}\n\n", spec.name);
            for (n, p, d) in &checks {
                writeln!(s, "- [{}] {n}: {d}", if *p { "ok" } else { "FAIL" }).unwrap();
            }
            s
        }
    };
    if all {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Refused(format!("{}: some checks failed", spec.name)))
    }
}

fn analyze(cli: &Cli, spec: &OrbifoldSpec) -> Outcome {
    if spec.partial {
        let level = spec.declared_hypothesis.map_or("UNKNOWN", |h| h.name());
        let rec = json!({"example": spec.name, "partial": true, "hypothesis": level, "b1": spec.declared_b1});
        return Ok(match cli.format {
            Format::Md => format!(
                "# analyze {}\n\npartial entry: hypothesis {level} and b1 = {} are declared\n",
                spec.name,
                spec.declared_b1.unwrap_or_default()
            ),
            _ => lines(&[rec]),
        });
    }
    let group = group_of(spec)?;
    let b1 = betti_one(&group)?;
    let locus = singular_locus(&group);
    let verdict = check_hypothesis(&locus, Some(&spec.resolution));
    let comps: Vec<serde_json::Value> = locus
        .iter()
        .map(|c| {
            json!({
                "fix_dim": c.representative_fix_dim,
                "orbit_size": c.orbit_size,
                "centralizer_order": c.centralizer_order,
                "normalizer_quotient_order": c.normalizer_quotient_order,
                "transversal_group": c.transversal_group_tag,
                "intersects_other": c.intersects_other_component,
                "quotient_free": c.quotient_acts_freely,
                "quotient_translations": c.quotient_acts_by_translations,
            })
        })
        .collect();
    Ok(match cli.format {
        Format::Md => {
            let mut s = format!("# analyze {}\n\n|Gamma| = {}, b1 = {b1}\n\n", spec.name, group.order());
            s.push_str("| dim | orbit | |A| | |B| | transversal | intersects | B free | B translations |\n");
            s.push_str("|---|---|---|---|---|---|---|---|\n");
            for c in &locus {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    c.representative_fix_dim,
                    c.orbit_size,
                    c.centralizer_order,
                    c.normalizer_quotient_order,
                    c.transversal_group_tag,
                    c.intersects_other_component,
                    c.quotient_acts_freely,
                    c.quotient_acts_by_translations
                )
                .unwrap();
            }
            writeln!(s, "\nverdict: {}", verdict.level.name()).unwrap();
            for n in &verdict.witness_notes {
                writeln!(s, "- {n}").unwrap();
            }
            s
        }
        _ => lines(&[json!({
            "example": spec.name,
            "group_order": group.order(),
            "b1": b1,
            "components": comps,
            "hypothesis": verdict.level.name(),
            "notes": verdict.witness_notes,
        })]),
    })
}

fn eta(cli: &Cli, spec: &OrbifoldSpec) -> Outcome {
    let res = compute_nu(spec)?;
    let d = cli.precision;
    let mut elements = Vec::new();
    if !spec.partial {
        let group = group_of(spec)?;
        for g in &group.elements {
            let s = eta_gamma_signature(g, &group.lattice, &spec.certificate_hints)?;
            let (dv, _) = eta_gamma_dirac(g, &group.lattice, &spec.certificate_hints)?;
            let cert = find_certificate(g, &group.lattice, &spec.certificate_hints);
            elements.push((g.label.clone(), s, dv, cert.map(|c| c.kind.name())));
        }
    }
    Ok(match cli.format {
        Format::Md => {
            let mut s = format!("# eta {}\n\n", spec.name);
            writeln!(
                s,
                "eta(B) = {} ({}, numeric {})",
                res.eta_sign,
                res.eta_sign.provenance.name(),
                num(res.eta_sign.numeric, d)
            )
            .unwrap();
            writeln!(
                s,
                "eta(D) = {} ({}, tier {}, numeric {})",
                res.eta_dirac,
                res.eta_dirac.provenance.name(),
                res.dirac_tier.name(),
                num(res.eta_dirac.numeric, d)
            )
            .unwrap();
            if !elements.is_empty() {
                s.push_str("\n| element | eta_g(B) | eta_g(D) | certificate |\n|---|---|---|---|\n");
                for (l, b, dv, c) in &elements {
                    writeln!(s, "| {l} | {b} | {dv} | {} |", c.unwrap_or("-")).unwrap();
                }
            }
            s
        }
        Format::Csv => format!(
            "example,eta_sign,eta_dirac,provenance_sign,provenance_dirac,dirac_tier\n{},{},{},{},{},{}\n",
            spec.name,
            res.eta_sign,
            res.eta_dirac,
            res.eta_sign.provenance.name(),
            res.eta_dirac.provenance.name(),
            res.dirac_tier.name()
        ),
        Format::JsonLines => lines(&[json!({
            "example": spec.name,
            "eta_sign": eta_json(&res.eta_sign, d),
            "eta_dirac": eta_json(&res.eta_dirac, d),
            "dirac_tier": res.dirac_tier.name(),
        })]),
    })
}

fn nu(cli: &Cli, spec: &OrbifoldSpec) -> Outcome {
    let res = compute_nu(spec)?;
    Ok(match cli.format {
        Format::Md => {
            let mut s = format!("ν ≡ {} (mod {})\n\n", res.nu_value, res.modulus);
            writeln!(s, "hypothesis: {}", res.hypothesis.level.name()).unwrap();
            for l in &res.derivation_log {
                writeln!(s, "- {l}").unwrap();
            }
            for c in &res.checks {
                writeln!(s, "- [{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail).unwrap();
            }
            s
        }
        Format::Csv => format!("{CSV_HEADER}\n{}\n", ReportRow::new(spec, &res).to_csv()),
        Format::JsonLines => lines(&[json!({
            "example": spec.name,
            "nu": res.nu_value,
            "modulus": res.modulus,
            "eta_sign": eta_json(&res.eta_sign, cli.precision),
            "eta_dirac": eta_json(&res.eta_dirac, cli.precision),
            "b1": res.b1,
            "hypothesis": res.hypothesis.level.name(),
            "derivation_log": res.derivation_log,
            "checks": res.checks,
        })]),
    })
}

fn maslov(cli: &Cli, spec: Option<&str>) -> Outcome {
    let names: Vec<String> = match spec {
        Some(s) => vec![s.to_string()],
        None => MASLOV_DEFAULT.iter().map(|s| s.to_string()).collect(),
    };
    let mut out = String::new();
    let mut failed = Vec::new();
    if cli.format == Format::Csv {
        out.push_str("example,maslov_cohomology,eta_sign,maslov_spinor,eta_dirac,sign_agrees,dirac_mod_z,dirac_integer\n");
    }
    for n in &names {
        let rep = tcs_cross_check(&load(n, cli.ell_parity)?)?;
        if !rep.passed() {
            failed.push(rep.example.clone());
        }
        let mh = format_rational(rep.cohomology.value.exact.unwrap_or_default());
        let ms = format_rational(rep.spinor.value.exact.unwrap_or_default());
        match cli.format {
            Format::Md => writeln!(out, "{rep}").unwrap(),
            Format::Csv => writeln!(
                out,
                "{},{mh},{},{ms},{},{},{},{}",
                rep.example,
                format_rational(rep.eta_sign),
                format_rational(rep.eta_dirac),
                rep.sign_agrees,
                rep.dirac_agrees_mod_z,
                rep.dirac_agrees_as_integers
            )
            .unwrap(),
            Format::JsonLines => out.push_str(&lines(&[json!({
                "example": rep.example,
                "maslov_cohomology": mh,
                "eta_sign": format_rational(rep.eta_sign),
                "maslov_spinor": ms,
                "eta_dirac": format_rational(rep.eta_dirac),
                "sign_agrees": rep.sign_agrees,
                "dirac_agrees_mod_z": rep.dirac_agrees_mod_z,
                "dirac_agrees_as_integers": rep.dirac_agrees_as_integers,
            })])),
        }
    }
    if failed.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Oracle(format!("Maslov cross-check failed for {}", failed.join(", "))))
    }
}

/// Every oracle report for one catalog entry.
fn oracle_reports(spec: &OrbifoldSpec, shells: usize) -> Result<Vec<OracleReport>, Error> {
    if spec.partial {
        let id = g2nu::group::AffineIsometry::identity(spec.lattice.rank);
        return Ok(spec
            .certificate_hints
            .iter()
            .map(|c| oracle::verify_certificate(c, &id, &spec.lattice))
            .collect());
    }
    let group = group_of(spec)?;
    let mut reps = Vec::new();
    if spec.lattice.embedding.is_some() {
        reps.push(oracle::verify_shell_traces(&group, shells)?);
        reps.push(oracle::verify_abel(&group, oracle::ABEL_RADIUS)?);
    }
    let certs: Vec<OracleReport> = group
        .elements
        .iter()
        .filter_map(|g| {
            let c = find_certificate(g, &group.lattice, &spec.certificate_hints)?;
            c.witness.as_ref()?;
            Some(oracle::verify_certificate(&c, g, &group.lattice))
        })
        .collect();
    reps.push(OracleReport::merge("certificate", &certs));
    if FIXED_POINT_GRID.contains(&spec.name.as_str()) {
        reps.push(oracle::verify_fixed_points(&group, 24));
    }
    Ok(reps)
}

fn run_oracle(cli: &Cli, spec: Option<&str>) -> Outcome {
    let names: Vec<String> = match spec {
        Some(s) => vec![s.to_string()],
        None => ORACLE_DEFAULT.iter().map(|s| s.to_string()).collect(),
    };
    let mut records: Vec<(String, OracleReport)> = Vec::new();
    for n in &names {
        let s = load(n, cli.ell_parity)?;
        for r in oracle_reports(&s, cli.shells)? {
            records.push((s.name.clone(), r));
        }
    }
    if spec.is_none() {
        records.push(("-".into(), oracle::verify_trig_identity(500, 2024)));
        records.push(("-".into(), oracle::verify_eisenstein(24)));
    }
    let mut out = String::new();
    if cli.format == Format::Csv {
        out.push_str("example,check_name,instances,max_abs_deviation,tolerance,passed\n");
    }
    for (ex, r) in &records {
        match cli.format {
            Format::JsonLines => out.push_str(&lines(&[json!({"example": ex, "report": r})])),
            Format::Csv => writeln!(
                out,
                "{ex},{},{},{:e},{:e},{}",
                r.check_name, r.instances, r.max_abs_deviation, r.tolerance, r.passed
            )
            .unwrap(),
            Format::Md => writeln!(
                out,
                "example={ex} check={} instances={} max_abs_deviation={:e} tolerance={:e} passed={}",
                r.check_name, r.instances, r.max_abs_deviation, r.tolerance, r.passed
            )
            .unwrap(),
        }
    }
    let failed: Vec<String> = records
        .iter()
        .filter(|(_, r)| !r.passed)
        .map(|(e, r)| format!("{e}/{}", r.check_name))
        .collect();
    if failed.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Oracle(format!("oracle checks failed: {}", failed.join(", "))))
    }
}

fn report_rows(parity: Option<ParityArg>) -> Result<Vec<ReportRow>, Error> {
    builtin_names()
        .into_iter()
        .map(|n| {
            let spec = read_spec(n, parity.filter(|_| is_parity_example(n)))?;
            Ok(ReportRow::new(&spec, &compute_nu(&spec)?))
        })
        .collect()
}

fn report(cli: &Cli) -> Outcome {
    let rows = report_rows(cli.ell_parity)?;
    Ok(match cli.format {
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in &rows {
                writeln!(s, "{}", r.to_csv()).unwrap();
            }
            s
        }
        Format::JsonLines => lines(&rows),
        Format::Md => {
            let mut s = String::from(
                "| Ex. | |Gamma| | b1 | b2 | b3 | eta(B) | eta(D) | nu | mod | checks |\n|---|---|---|---|---|---|---|---|---|---|\n",
            );
            let o = |v: Option<i64>| v.map_or("-".to_string(), |x| x.to_string());
            for r in &rows {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.example,
                    r.group_order.map_or("-".to_string(), |x| x.to_string()),
                    r.b1,
                    o(r.b2),
                    o(r.b3),
                    r.eta_sign,
                    r.eta_dirac,
                    r.nu,
                    r.modulus,
                    if r.checks_passed { "ok" } else { "FAIL" }
                )
                .unwrap();
            }
            let mut pooled = report_rows(None)?;
            pooled.retain(|r| !is_parity_example(&r.example));
            pooled.extend(report_rows(Some(ParityArg::Odd))?.into_iter().filter(|r| r.example.ends_with("-odd")));
            pooled.extend(report_rows(Some(ParityArg::Even))?.into_iter().filter(|r| r.example.ends_with("-even")));
            s.push_str("\nClassification (both parities for Examples 1-6):\n\n");
            for (class, members) in classify(&pooled) {
                let m: Vec<String> = members.into_iter().collect();
                writeln!(s, "- {class}: {}", m.join(", ")).unwrap();
            }
            s
        }
    })
}

fn dispatch(cli: &Cli) -> Outcome {
    let p = cli.ell_parity;
    match &cli.command {
        Command::Validate { spec } => validate(cli, &load(spec, p)?),
        Command::Analyze { spec } => analyze(cli, &load(spec, p)?),
        Command::Eta { spec } => eta(cli, &load(spec, p)?),
        Command::Nu { spec } => nu(cli, &load(spec, p)?),
        Command::Maslov { spec } => maslov(cli, spec.as_deref()),
        Command::Oracle { spec } => run_oracle(cli, spec.as_deref()),
        Command::Report => report(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (kind, message, code) = match f {
                Failure::Usage(e) => (e.kind().to_string(), e.to_string(), 2),
                Failure::Module(e) => (e.kind().to_string(), e.to_string(), 1),
                Failure::Refused(m) => ("ChecksFailed".to_string(), m, 1),
                Failure::Oracle(m) => ("OracleFailure".to_string(), m, 3),
            };
            eprintln!("{}", json!({"error": kind, "message": message}));
            ExitCode::from(code)
        }
    }
}
