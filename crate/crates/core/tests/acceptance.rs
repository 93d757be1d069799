//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails when a criterion's outcome differs from the recorded
//! expectation; criterion 10 is expected to fail on its entropy-sign part
//! (see `EXPECTED_FAILURES`).

use std::time::{Duration, Instant};

use lops_core::analysis::sphere::transverse_directions;
use lops_core::analysis::{analyze, cone_sample, verify_minkowski_inequalities, AnalysisConfig};
use lops_core::ens::verify::{block_check, degeneration_check, fq_grid, hyperbolicity_suite, omega_current_check};
use lops_core::ens::{
    derive_biquadratic, discriminant_report, reference_product, EnsReferenceValues, FluidState,
    ENS_SPEC,
};
use lops_core::lab::{fd_tolerance, ratio_in_band, run_lab, LabConfig, RowKind};
use lops_core::poly::{Assignment, Atom};
use lops_core::rational::{fmt_q, q, ratio};
use lops_core::system::parse_system;

const SEED: u64 = 0;
const HYPER_TOL: f64 = 1e-9;
const HYPER_STATES: usize = 100;
const HYPER_DIRECTIONS: usize = 1000;
const BLOCK_STATES: usize = 100;
const INEQUALITY_DIRECTIONS: usize = 10_000;
const LAB_SPACINGS: (f64, f64) = (0.1, 0.05);
const LAB_VARTHETA: f64 = -1.0;
const BUDGET_ANALYZE: Duration = Duration::from_secs(300);
const BUDGET_BLOCK: Duration = Duration::from_secs(60);
const BUDGET_LAB: Duration = Duration::from_secs(120);

/// Criteria whose faithful implementation fails, with the reason.
const EXPECTED_FAILURES: &[(usize, &str)] = &[(
    10,
    "with signature (+,-,-,-) a symmetric tensor orthogonal to u has Sigma^ab Sigma_ab >= 0, \
     so (vartheta/2F) Sigma^ab Sigma_ab <= 0 for vartheta = -1",
)];

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: usize, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    let elapsed = t.elapsed();
    let o = Outcome { id, title, pass, detail, elapsed };
    println!(
        "criterion {:>2} {} [{}] {} ({:.1} s)",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.title,
        o.detail,
        o.elapsed.as_secs_f64()
    );
    o
}

fn main() {
    let sys = parse_system(ENS_SPEC).expect("shipped system parses");
    let cfg = AnalysisConfig { samples: HYPER_DIRECTIONS, tol: HYPER_TOL, seed: SEED, ..AnalysisConfig::default() };
    let mut analysis = None;
    let mut outcomes = Vec::new();

    outcomes.push(run(1, "gevrey exponent", || {
        let t = Instant::now();
        let r = analyze(&sys, &cfg).expect("analysis runs");
        let took = t.elapsed();
        let expected = fmt_q(&EnsReferenceValues::sigma0());
        let pass = r.sigma0.as_deref() == Some(expected.as_str())
            && expected == "24/23"
            && r.factorization.factor_count == EnsReferenceValues::FACTOR_COUNT
            && r.pass
            && took < BUDGET_ANALYZE;
        let detail = format!(
            "sigma0 {} (expected {expected}), {} factors, all analysis checks {}",
            r.sigma0.clone().unwrap_or_else(|| "none".into()),
            r.factorization.factor_count,
            if r.pass { "pass" } else { "do not pass" }
        );
        analysis = Some(r);
        (pass, detail)
    }));
    let report = analysis.expect("analysis ran");

    outcomes.push(run(2, "degree identity", || {
        let sum_m: i64 = sys.unknowns.iter().map(|u| u.multiplicity as i64 * u.m).sum();
        let sum_n: i64 = sys.equations.iter().map(|e| e.multiplicity as i64 * e.n).sum();
        let reference_m: i64 = EnsReferenceValues::M.iter().zip(EnsReferenceValues::MULTIPLICITIES).map(|(m, k)| m * k as i64).sum();
        let reference_n: i64 = EnsReferenceValues::N.iter().zip(EnsReferenceValues::MULTIPLICITIES).map(|(n, k)| n * k as i64).sum();
        let d = &report.determinant;
        let pass = d.homogeneous
            && d.degree == Some(44)
            && (sum_m, sum_n) == (54, 10)
            && (reference_m, reference_n) == (sum_m, sum_n)
            && sum_m - sum_n == EnsReferenceValues::TOTAL_ORDER;
        (pass, format!("xi-degree {:?}, homogeneous {}, l = {sum_m} - {sum_n} = {}", d.degree, d.homogeneous, sum_m - sum_n))
    }));

    outcomes.push(run(3, "block determinants", || {
        let b = block_check(&sys);
        let detail = b
            .blocks
            .iter()
            .map(|c| format!("{} = {} (power {}, cofactor {})", c.block, c.claim, c.found_power, c.cofactor))
            .collect::<Vec<_>>()
            .join("; ");
        (b.pass, detail)
    }));

    outcomes.push(run(4, "vorticity-current block", || {
        let t = Instant::now();
        let r = omega_current_check(&sys, BLOCK_STATES, SEED).expect("block check runs");
        let took = t.elapsed();
        (
            r.pass && r.states >= 100 && took < BUDGET_BLOCK,
            format!(
                "{} states, {} elimination and {} cofactor-oracle mismatches",
                r.states, r.elimination_mismatches, r.oracle_mismatches
            ),
        )
    }));

    let bq = derive_biquadratic().expect("biquadratic derivation");
    outcomes.push(run(5, "discriminant identity", || {
        let d = discriminant_report(bq);
        (
            d.pass && d.perfect_square,
            format!(
                "B^2 - 4AC = {} (sqrt {}), square factor {}; printed A/B/C match: {}/{}/{}; printed discriminant matches derived: {}",
                d.discriminant,
                d.sqrt_discriminant.clone().unwrap_or_default(),
                d.square_factor.clone().unwrap_or_default(),
                d.printed_a_matches,
                d.printed_b_matches,
                d.printed_c_matches,
                d.printed_discriminant_matches_derived
            ),
        )
    }));

    outcomes.push(run(6, "minkowski inequalities", || {
        let metric: Assignment = (1..4).map(|k| (Atom::param(&format!("gi{k}{k}")), q(-1))).collect();
        let r = verify_minkowski_inequalities(&bq.a, &bq.b, &bq.c, &metric, &fq_grid(), INEQUALITY_DIRECTIONS, SEED);
        let violations: usize = r.samples.iter().map(|s| s.violations_derived).sum();
        let full = r.samples.len() == 9 && r.samples.iter().all(|s| s.directions == INEQUALITY_DIRECTIONS);
        let steps_ok = r.steps.iter().all(|s| s.pass);
        (
            r.pass && steps_ok && violations == 0 && full,
            format!(
                "{} exact reductions, {} grid points x {} directions, {violations} violations",
                r.steps.len(),
                r.samples.len(),
                INEQUALITY_DIRECTIONS
            ),
        )
    }));

    outcomes.push(run(7, "hyperbolicity suite", || {
        let s = hyperbolicity_suite(HYPER_STATES, HYPER_DIRECTIONS, HYPER_TOL, SEED).expect("suite runs");
        (
            s.pass && s.disagreements.is_empty() && s.light_passed == HYPER_STATES && s.flow_passed == HYPER_STATES,
            format!(
                "light {}/{}, flow {}/{}, split factors on grid {}/{}, {} disagreements in {} comparisons",
                s.light_passed,
                s.states,
                s.flow_passed,
                s.states,
                s.grid.iter().filter(|v| v.is_hyperbolic()).count(),
                s.grid.len(),
                s.disagreements.len(),
                s.comparisons
            ),
        )
    }));

    outcomes.push(run(8, "leray-ohya condition", || {
        let c = &report.leray_condition;
        (
            c.pass && c.max_factor_degree == 3 && c.max_m - c.min_n == 3,
            c.statement.clone(),
        )
    }));

    outcomes.push(run(9, "q = 0 degeneration", || {
        let d = degeneration_check(&sys, bq, &q(1), HYPER_DIRECTIONS, HYPER_TOL, SEED).expect("degeneration runs");
        (
            d.pass && d.p_identity_holds,
            format!(
                "P|q=0 = F (xi.xi)^2: {}; determinant matches: {}; factor count {} -> {}; sigma0 {} -> {}",
                d.p_identity_holds,
                d.determinant_matches_q0,
                d.factor_count,
                d.factor_count_q0,
                d.sigma0.clone().unwrap_or_default(),
                d.sigma0_q0.clone().unwrap_or_default()
            ),
        )
    }));

    let lab_cfg = LabConfig { h: LAB_SPACINGS.0, refine: 2, vartheta: LAB_VARTHETA, ..LabConfig::default() };
    let mut lab_parts = (false, false, false, false);
    outcomes.push(run(10, "tensor lab", || {
        let t = Instant::now();
        let r = run_lab(&lab_cfg).expect("lab runs");
        let took = t.elapsed();
        let spacings_ok = r.spacings.len() == 2
            && (r.spacings[0] - LAB_SPACINGS.0).abs() < 1e-15
            && (r.spacings[1] - LAB_SPACINGS.1).abs() < 1e-15;
        let ratio = |name: &str| {
            r.rows
                .iter()
                .find(|row| row.kind == RowKind::Identity && row.name == name)
                .and_then(|row| row.levels[1].ratio)
                .unwrap_or(f64::NAN)
        };
        let required = ["rescaled-shear-split", "rescaled-shear-vorticity", "acceleration", "conformal-derivative", "shear-contraction"];
        let identities_ok = required.iter().all(|n| ratio_in_band(ratio(n)));
        let controls: Vec<_> = r.rows.iter().filter(|row| row.kind == RowKind::Control).collect();
        let controls_ok = !controls.is_empty() && controls.iter().all(|row| !ratio_in_band(row.levels[1].ratio.unwrap_or(4.0)));
        let entropy_ok = r.signs.levels.iter().all(|l| l.entropy_min >= -fd_tolerance(l.h));
        let shear_nonneg = r.signs.levels.iter().all(|l| l.shear_square_min >= -fd_tolerance(l.h));
        lab_parts = (identities_ok, controls_ok, entropy_ok, shear_nonneg);
        let ratios = required.iter().map(|n| format!("{n} {:.3}", ratio(n))).collect::<Vec<_>>().join(", ");
        let control_ratios = controls
            .iter()
            .map(|row| format!("{:.3}", row.levels[1].ratio.unwrap_or(f64::NAN)))
            .collect::<Vec<_>>()
            .join(", ");
        let entropy = r
            .signs
            .levels
            .iter()
            .map(|l| format!("h={} min {:.4e} vs -{:.1e}", l.h, l.entropy_min, fd_tolerance(l.h)))
            .collect::<Vec<_>>()
            .join("; ");
        (
            spacings_ok && identities_ok && controls_ok && entropy_ok && took < BUDGET_LAB,
            format!("ratios: {ratios}; control ratios: {control_ratios}; entropy sign at vartheta = -1: {entropy}"),
        )
    }));

    outcomes.push(run(11, "determinism", || {
        let again = analyze(&sys, &cfg).expect("analysis runs");
        let a = serde_json::to_string(&report).unwrap() == serde_json::to_string(&again).unwrap();
        let l1 = run_lab(&lab_cfg).unwrap();
        let l2 = run_lab(&lab_cfg).unwrap();
        let b = serde_json::to_string(&l1).unwrap() == serde_json::to_string(&l2).unwrap() && l1.to_csv() == l2.to_csv();
        let st = FluidState::minkowski_rest(q(2), ratio(1, 10));
        let product = reference_product(&st).unwrap();
        let p1 = &product.factors.iter().find(|f| f.name == "P1").unwrap().poly;
        let tau = FluidState::tau();
        let cones = || {
            let dirs = transverse_directions(&tau, 500, SEED);
            cone_sample("P1", p1, &tau, &Assignment::new(), &dirs, Some(&st.light()), HYPER_TOL).unwrap().to_csv()
        };
        let c = cones() == cones();
        let h1 = hyperbolicity_suite(5, 100, HYPER_TOL, SEED).unwrap();
        let h2 = hyperbolicity_suite(5, 100, HYPER_TOL, SEED).unwrap();
        let d = serde_json::to_string(&h1).unwrap() == serde_json::to_string(&h2).unwrap();
        (a && b && c && d, format!("analysis {a}, lab {b}, cones {c}, hyperbolicity {d}"))
    }));

    println!();
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let expected_failure = EXPECTED_FAILURES.iter().find(|(id, _)| *id == o.id);
        match (o.pass, expected_failure) {
            (true, None) => {}
            (false, Some((_, why))) => println!("criterion {} fails as recorded: {why}", o.id),
            (true, Some(_)) => unexpected.push(format!("criterion {} passed but is recorded as failing", o.id)),
            (false, None) => unexpected.push(format!("criterion {} failed: {}", o.id, o.detail)),
        }
    }
    // the recorded failure must be the sign statement alone
    let (identities_ok, controls_ok, entropy_ok, shear_nonneg) = lab_parts;
    if !(identities_ok && controls_ok && !entropy_ok && shear_nonneg) {
        unexpected.push(format!(
            "criterion 10 parts changed: identities {identities_ok}, controls {controls_ok}, entropy {entropy_ok}, shear square nonnegative {shear_nonneg}"
        ));
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("{u}");
        }
        std::process::exit(1);
    }
}
