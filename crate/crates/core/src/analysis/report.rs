use serde::Serialize;

use super::factor::{verify_factorization, Factorization, VerifyReport};
use super::hyper::{
    gevrey_sigma, hyperbolicity_auto, hyperbolicity_sampled, verdict_or_inconclusive,
    HyperbolicityVerdict, Method,
};
use super::{block_determinants, build_symbol_matrix};
use crate::poly::{Homogeneity, Poly};
use crate::rational::{q, Q};
use crate::system::{ConditionReport, DependencyCheck, EntryCheck, LeraySystem};

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub tau: [Q; 4],
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tau: [q(1), q(0), q(0), q(0)],
            samples: 1000,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureSummary {
    pub pass: bool,
    pub entries_checked: usize,
    pub dependencies_checked: usize,
    pub entry_failures: Vec<EntryCheck>,
    pub dependency_failures: Vec<DependencyCheck>,
    pub problems: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantStats {
    pub dimension: usize,
    pub block_sizes: Vec<usize>,
    pub term_count: usize,
    pub degree: Option<u32>,
    pub homogeneous: bool,
    pub equals_total_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorInfo {
    pub name: String,
    pub multiplicity: u32,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationSummary {
    /// `declared` when the system carries a `factors:` block, otherwise the
    /// determinant is treated as a single factor.
    pub source: String,
    pub prefactor: String,
    pub factors: Vec<FactorInfo>,
    pub factor_count: u32,
    pub verify: Option<VerifyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub system: String,
    pub total_order: i64,
    pub structure: StructureSummary,
    pub determinant: DeterminantStats,
    pub factorization: FactorizationSummary,
    pub hyperbolicity: Vec<HyperbolicityVerdict>,
    pub sigma0: Option<String>,
    pub leray_condition: ConditionReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Full pipeline: structure, symbol, determinant, factorization,
/// hyperbolicity per factor, Gevrey exponent and the index condition.
pub fn analyze(sys: &LeraySystem, cfg: &AnalysisConfig) -> Result<AnalysisReport, super::AnalysisError> {
    let structure = sys.validate_structure();
    let mut checks = vec![Check::new(
        "structure",
        structure.pass,
        format!(
            "{} entries and {} dependencies checked",
            structure.entries.len(),
            structure.dependencies.len()
        ),
    )];

    let matrix = build_symbol_matrix(sys)?;
    let blocks = block_determinants(&matrix);
    let det = blocks.expand();
    let total_order = sys.total_order();
    let degree = match det.xi_homogeneity() {
        Homogeneity::Degree(d) => Some(d),
        _ => None,
    };
    let equals_total_order = degree.map(|d| d as i64) == Some(total_order);
    checks.push(Check::new(
        "determinant-degree",
        equals_total_order,
        format!("degree {degree:?}, total order {total_order}"),
    ));

    let bindings = sys.binding_map();
    let (factorization, source) = match &sys.factors {
        Some(decl) => (Factorization::from_decl(decl).substitute(&bindings), "declared"),
        None => (Factorization::new(Poly::one()).with("det", det.clone(), 1), "determinant"),
    };
    let verify = sys.factors.as_ref().map(|_| verify_factorization(&det, &factorization));
    if let Some(v) = &verify {
        checks.push(Check::new(
            "factorization",
            v.pass,
            match &v.witness {
                None => format!("{} terms match", v.determinant_terms),
                Some(w) => format!(
                    "differs at {}: determinant {} vs claimed {}",
                    w.monomial, w.determinant_coefficient, w.claimed_coefficient
                ),
            },
        ));
    }

    let state = sys.state_map();
    let mut verdicts = Vec::new();
    for f in &factorization.factors {
        let primary = verdict_or_inconclusive(
            &f.name,
            Method::Sampled,
            hyperbolicity_auto(&f.name, &f.poly, &cfg.tau, &state, cfg.samples, cfg.tol, cfg.seed),
        );
        let exact = primary.method != Method::Sampled;
        verdicts.push(primary);
        if exact {
            // sampled cross-check of the closed-form verdict
            verdicts.push(verdict_or_inconclusive(
                &f.name,
                Method::Sampled,
                hyperbolicity_sampled(&f.name, &f.poly, &cfg.tau, &state, cfg.samples, cfg.tol, cfg.seed),
            ));
        }
    }
    for v in &verdicts {
        checks.push(Check::new(
            format!("hyperbolicity:{}:{}", v.factor, serde_json::to_value(v.method).unwrap().as_str().unwrap()),
            v.is_hyperbolic(),
            v.detail.clone().or_else(|| v.witness.clone()).unwrap_or_default(),
        ));
    }

    let sigma = gevrey_sigma(&factorization, &verdicts);
    checks.push(Check::new(
        "gevrey-exponent",
        sigma.is_ok(),
        match &sigma {
            Ok(s) => format!("{} factors, sigma0 = {s}", factorization.factor_count()),
            Err(e) => e.to_string(),
        },
    ));

    let condition = sys.leray_condition(&factorization.degrees());
    checks.push(Check::new("leray-condition", condition.pass, condition.statement.clone()));

    let pass = checks.iter().all(|c| c.pass);
    Ok(AnalysisReport {
        system: sys.name.clone(),
        total_order,
        structure: StructureSummary {
            pass: structure.pass,
            entries_checked: structure.entries.len(),
            dependencies_checked: structure.dependencies.len(),
            entry_failures: structure.failures().cloned().collect(),
            dependency_failures: structure.dependencies.iter().filter(|d| !d.pass).cloned().collect(),
            problems: structure.problems.clone(),
        },
        determinant: DeterminantStats {
            dimension: matrix.dim(),
            block_sizes: blocks.blocks.iter().map(|b| b.len()).collect(),
            term_count: det.len(),
            degree,
            homogeneous: degree.is_some(),
            equals_total_order,
        },
        factorization: FactorizationSummary {
            source: source.to_string(),
            prefactor: factorization.prefactor.to_string(),
            factors: factorization
                .factors
                .iter()
                .map(|f| super::report::FactorInfo {
                    name: f.name.clone(),
                    multiplicity: f.multiplicity,
                    degree: f.poly.xi_degree(),
                })
                .collect(),
            factor_count: factorization.factor_count(),
            verify,
        },
        hyperbolicity: verdicts,
        sigma0: sigma.ok().map(|s| s.to_string()),
        leray_condition: condition,
        checks,
        pass,
    })
}
