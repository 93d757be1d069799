use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use lops_core::analysis::{analyze, cone_sample, AnalysisConfig, AnalysisError, Check, ConeSamples};
use lops_core::analysis::sphere::transverse_directions;
use lops_core::ens::{reference_product, verify_ens, EnsError, FluidState, VerifyConfig};
use lops_core::lab::{run_lab, LabConfig, LabError, LabReport};
use lops_core::poly::Assignment;
use lops_core::rational::{parse_q, Q};
use lops_core::system::{parse_system, ParseError};

use crate::args::{AnalyzeArgs, Cli, Command, ConesArgs, EnsCommand, LabArgs, LabCommand, Output, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, line: usize, source: ParseError },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Ens(#[from] EnsError),
    #[error(transparent)]
    Lab(#[from] LabError),
}

enum Format {
    Text,
    Json,
    Csv,
}

fn format_of(o: &Output, csv_allowed: bool) -> Result<Format, CliError> {
    match (o.json, o.csv) {
        (_, true) if !csv_allowed => Err(CliError::Invalid("--csv is only available for cones and lab".into())),
        (_, true) => Ok(Format::Csv),
        (true, _) => Ok(Format::Json),
        _ => Ok(Format::Text),
    }
}

fn emit(o: &Output, body: &str) -> Result<(), CliError> {
    match &o.out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn rational(flag: &str, s: &str) -> Result<Q, CliError> {
    parse_q(s)
        .or_else(|| decimal(s))
        .ok_or_else(|| CliError::Invalid(format!("{flag} expects a rational like 3, -1/2 or 0.25, got `{s}`")))
}

/// Exact value of a plain decimal literal.
fn decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    let (int, frac) = s.split_once('.')?;
    if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    parse_q(&format!("{digits}/1{}", "0".repeat(frac.len())))
}

fn tau(s: &str) -> Result<[Q; 4], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Invalid(format!("--tau expects four comma separated components, got `{s}`")));
    }
    let v: Vec<Q> = parts.iter().map(|p| rational("--tau", p)).collect::<Result<_, _>>()?;
    Ok([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
}

fn positive_tol(t: f64) -> Result<f64, CliError> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(CliError::Invalid(format!("--tol must be positive, got {t}")))
    }
}

fn at_least_one(flag: &str, n: usize) -> Result<usize, CliError> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(CliError::Invalid(format!("{flag} must be at least 1")))
    }
}

fn render_checks(out: &mut String, checks: &[Check]) {
    for c in checks {
        let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.detail);
    }
}

fn verdict_line(out: &mut String, pass: bool) {
    let _ = writeln!(out, "{}", if pass { "all checks passed" } else { "some checks failed" });
}

pub fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Ens { command: EnsCommand::Verify(a) } => cmd_ens_verify(&a),
        Command::Cones(a) => cmd_cones(&a),
        Command::Lab { command: LabCommand::Run(a) } => cmd_lab(&a),
    }
}

fn read_system(path: &Path) -> Result<lops_core::LeraySystem, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_system(&src).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        line: source.line(),
        source,
    })
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<bool, CliError> {
    let format = format_of(&a.output, false)?;
    let cfg = AnalysisConfig {
        tau: tau(&a.tau)?,
        samples: at_least_one("--samples", a.samples)?,
        tol: positive_tol(a.tol)?,
        seed: a.seed,
    };
    let sys = read_system(&a.file)?;
    let report = analyze(&sys, &cfg)?;
    let body = match format {
        Format::Json => json(&report),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "system {}", report.system);
            let _ = writeln!(s, "total order {}", report.total_order);
            let _ = writeln!(
                s,
                "determinant: dimension {}, {} terms, degree {:?}",
                report.determinant.dimension, report.determinant.term_count, report.determinant.degree
            );
            let _ = writeln!(
                s,
                "factorization ({}): {} factors, prefactor {}",
                report.factorization.source, report.factorization.factor_count, report.factorization.prefactor
            );
            let _ = writeln!(s, "sigma0 {}", report.sigma0.as_deref().unwrap_or("none"));
            render_checks(&mut s, &report.checks);
            verdict_line(&mut s, report.pass);
            s
        }
    };
    emit(&a.output, &body)?;
    Ok(report.pass)
}

pub fn cmd_ens_verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let format = format_of(&a.output, false)?;
    let cfg = VerifyConfig {
        samples: at_least_one("--samples", a.samples)?,
        directions: at_least_one("--directions", a.directions)?,
        tol: positive_tol(a.tol)?,
        seed: a.seed,
        f: rational("--F", &a.f)?,
        q: rational("--q", &a.q)?,
        skip_symbolic: a.skip_symbolic,
        ..VerifyConfig::default()
    };
    let report = verify_ens(&cfg)?;
    let body = match format {
        Format::Json => json(&report),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "system {} (total order {})", report.system, report.total_order);
            let f = &report.factorization;
            let _ = writeln!(
                s,
                "{}: {} factors of total degree {}, sigma0 {}",
                f.state,
                f.factor_count,
                f.total_degree,
                f.sigma0.as_deref().unwrap_or("none")
            );
            let d = &report.degeneration;
            let _ = writeln!(
                s,
                "q = 0: P = {}; factor count {} -> {}; sigma0 {} -> {}",
                d.p_at_q0,
                d.factor_count,
                d.factor_count_q0,
                d.sigma0.as_deref().unwrap_or("none"),
                d.sigma0_q0.as_deref().unwrap_or("none")
            );
            render_checks(&mut s, &report.checks);
            verdict_line(&mut s, report.pass);
            s
        }
    };
    emit(&a.output, &body)?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct ConesReport {
    f: String,
    q: String,
    tau: [String; 4],
    seed: u64,
    #[serde(flatten)]
    samples: ConeSamples,
    all_real: bool,
    pass: bool,
}

pub fn cmd_cones(a: &ConesArgs) -> Result<bool, CliError> {
    let format = format_of(&a.output, true)?;
    let n = at_least_one("--n", a.n)?;
    let tol = positive_tol(a.tol)?;
    let tau = tau(&a.tau)?;
    let (f, qv) = (rational("--F", &a.f)?, rational("--q", &a.q)?);
    let state = FluidState::minkowski_rest(f.clone(), qv.clone());
    let product = reference_product(&state)?;
    let names: Vec<&str> = product.factors.iter().map(|x| x.name.as_str()).collect();
    let factor = product
        .factors
        .iter()
        .find(|x| x.name == a.factor)
        .ok_or_else(|| CliError::Invalid(format!("--factor must be one of {}, got `{}`", names.join(", "), a.factor)))?;
    let light = state.light();
    let directions = transverse_directions(&tau, n, a.seed);
    let samples = cone_sample(&factor.name, &factor.poly, &tau, &Assignment::new(), &directions, Some(&light), tol)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let all_real = samples.rows.iter().all(|r| r.roots.len() == samples.degree as usize);
    let pass = all_real && samples.inside_light_cone == Some(true);
    let report = ConesReport {
        f: lops_core::rational::fmt_q(&f),
        q: lops_core::rational::fmt_q(&qv),
        tau: tau.each_ref().map(lops_core::rational::fmt_q),
        seed: a.seed,
        samples,
        all_real,
        pass,
    };
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => report.samples.to_csv(),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "factor {} (degree {}) at F = {}, q = {}: {} directions",
                report.samples.factor,
                report.samples.degree,
                report.f,
                report.q,
                report.samples.rows.len()
            );
            let _ = writeln!(s, "max |root| {:.12}", report.samples.max_abs_root);
            let _ = writeln!(s, "all roots real: {}", report.all_real);
            let _ = writeln!(s, "inside light cone: {}", report.samples.inside_light_cone == Some(true));
            verdict_line(&mut s, pass);
            s
        }
    };
    emit(&a.output, &body)?;
    Ok(pass)
}

fn render_lab(r: &LabReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed {}, spacings {:?}, nodes per axis {:?}", r.seed, r.spacings, r.nodes);
    let _ = writeln!(s, "{:<48} {:>10} {:>12} {:>8}", "identity", "h", "residual", "ratio");
    for row in &r.rows {
        for l in &row.levels {
            let ratio = l.ratio.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "{:<48} {:>10} {:>12.3e} {:>8}", row.name, l.h, l.residual, ratio);
        }
    }
    render_checks(&mut s, &r.checks);
    verdict_line(&mut s, r.pass);
    s
}

pub fn cmd_lab(a: &LabArgs) -> Result<bool, CliError> {
    let format = format_of(&a.output, true)?;
    let cfg = LabConfig {
        h: a.h,
        nodes: a.nodes,
        refine: a.refine,
        vartheta: a.vartheta,
        seed: a.seed,
    };
    let report = run_lab(&cfg)?;
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => report.to_csv(),
        Format::Text => render_lab(&report),
    };
    emit(&a.output, &body)?;
    Ok(report.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(rational("--q", "0.25").unwrap(), parse_q("1/4").unwrap());
        assert_eq!(rational("--q", "-1/2").unwrap(), parse_q("-1/2").unwrap());
        assert!(rational("--q", "abc").is_err());
        assert!(rational("--q", "1.").is_err());
    }

    #[test]
    fn tau_needs_four_components() {
        assert!(tau("1,0,0").is_err());
        assert_eq!(tau("1,0,0,1/2").unwrap()[3], parse_q("1/2").unwrap());
    }

    #[test]
    fn run_config_invariants() {
        assert!(positive_tol(0.0).is_err());
        assert!(positive_tol(1e-9).is_ok());
        assert!(at_least_one("--samples", 0).is_err());
    }
}
