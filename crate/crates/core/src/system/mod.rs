//! Block data model for quasi-linear systems with Leray-Ohya indices,
//! plus structural validation of symbol degrees and dependency orders.

mod dsl;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::poly::{Atom, Homogeneity, Poly};
use crate::rational::Q;

pub use dsl::{parse_system, print_system, ParseError};

/// Unknown `v^I` with its index `m_I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownBlock {
    pub name: String,
    pub multiplicity: usize,
    pub m: i64,
}

/// Equation block with its index `n_J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationBlock {
    pub name: String,
    pub multiplicity: usize,
    pub n: i64,
}

/// One scalar principal-symbol entry. Component indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolEntry {
    pub eq: String,
    pub eq_index: usize,
    pub unk: String,
    pub unk_index: usize,
    pub symbol: Poly,
}

/// Highest derivative order of `unk` entering the coefficients or the
/// right-hand side of equation `eq`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyDecl {
    pub eq: String,
    pub unk: String,
    pub order: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamConstraint {
    Free,
    Positive,
    Nonzero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub constraint: ParamConstraint,
}

/// A claimed factor of the characteristic determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorDecl {
    pub name: String,
    pub multiplicity: u32,
    pub poly: Poly,
}

/// Claimed factorization `prefactor * prod factor^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorsDecl {
    pub prefactor: Poly,
    pub factors: Vec<FactorDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeraySystem {
    pub name: String,
    pub params: Vec<ParamDecl>,
    pub unknowns: Vec<UnknownBlock>,
    pub equations: Vec<EquationBlock>,
    pub entries: Vec<SymbolEntry>,
    pub deps: Vec<DependencyDecl>,
    /// Relations imposed on the data before the symbol is formed.
    pub bindings: Vec<(Atom, Poly)>,
    /// Evaluation point used by the hyperbolicity tests.
    pub state: Vec<(Atom, Q)>,
    pub factors: Option<FactorsDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub eq: String,
    pub eq_index: usize,
    pub unk: String,
    pub unk_index: usize,
    pub required_degree: i64,
    /// `None` when the symbol is not homogeneous in the covector.
    pub actual_degree: Option<u32>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyCheck {
    pub eq: String,
    pub unk: String,
    pub declared_order: i64,
    pub max_allowed: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub square: bool,
    pub rows: usize,
    pub columns: usize,
    pub entries: Vec<EntryCheck>,
    pub dependencies: Vec<DependencyCheck>,
    /// Problems that are not tied to one entry (negative indices and the like).
    pub problems: Vec<String>,
    pub pass: bool,
}

impl StructureReport {
    pub fn failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub max_factor_degree: i64,
    pub max_m: i64,
    pub min_n: i64,
    pub required: i64,
    pub pass: bool,
    pub statement: String,
}

impl LeraySystem {
    pub fn unknown(&self, name: &str) -> Option<&UnknownBlock> {
        self.unknowns.iter().find(|u| u.name == name)
    }

    pub fn equation(&self, name: &str) -> Option<&EquationBlock> {
        self.equations.iter().find(|e| e.name == name)
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.iter().map(|u| u.multiplicity).sum()
    }

    pub fn equation_count(&self) -> usize {
        self.equations.iter().map(|e| e.multiplicity).sum()
    }

    /// Scalar column offset of each unknown block.
    pub fn unknown_offsets(&self) -> HashMap<&str, usize> {
        offsets(self.unknowns.iter().map(|u| (u.name.as_str(), u.multiplicity)))
    }

    pub fn equation_offsets(&self) -> HashMap<&str, usize> {
        offsets(self.equations.iter().map(|e| (e.name.as_str(), e.multiplicity)))
    }

    pub fn binding_map(&self) -> HashMap<Atom, Poly> {
        self.bindings.iter().cloned().collect()
    }

    pub fn state_map(&self) -> HashMap<Atom, Q> {
        self.state.iter().cloned().collect()
    }

    /// `sum m_I - sum n_J`, counted with multiplicities.
    pub fn total_order(&self) -> i64 {
        let m: i64 = self.unknowns.iter().map(|u| u.multiplicity as i64 * u.m).sum();
        let n: i64 = self.equations.iter().map(|e| e.multiplicity as i64 * e.n).sum();
        m - n
    }

    pub fn validate_structure(&self) -> StructureReport {
        let mut problems = Vec::new();
        for u in &self.unknowns {
            if u.m < 0 {
                problems.push(format!("unknown `{}` has negative index {}", u.name, u.m));
            }
        }
        for e in &self.equations {
            if e.n < 0 {
                problems.push(format!("equation `{}` has negative index {}", e.name, e.n));
            }
        }
        let (rows, columns) = (self.equation_count(), self.unknown_count());
        let square = rows == columns;
        if !square {
            problems.push(format!("{rows} equations for {columns} unknowns"));
        }

        let mut entries = Vec::new();
        for entry in &self.entries {
            let (Some(eq), Some(unk)) = (self.equation(&entry.eq), self.unknown(&entry.unk)) else {
                problems.push(format!("entry refers to unknown block {}/{}", entry.eq, entry.unk));
                continue;
            };
            let required = unk.m - eq.n;
            let (actual, pass) = match entry.symbol.xi_homogeneity() {
                Homogeneity::Zero => (None, true),
                Homogeneity::Degree(d) => (Some(d), required >= 0 && d as i64 == required),
                Homogeneity::NotHomogeneous => (None, false),
            };
            if entry.symbol.is_zero() {
                continue;
            }
            entries.push(EntryCheck {
                eq: entry.eq.clone(),
                eq_index: entry.eq_index,
                unk: entry.unk.clone(),
                unk_index: entry.unk_index,
                required_degree: required,
                actual_degree: actual,
                pass,
            });
        }

        let mut dependencies = Vec::new();
        for dep in &self.deps {
            let (Some(eq), Some(unk)) = (self.equation(&dep.eq), self.unknown(&dep.unk)) else {
                problems.push(format!("dependency refers to unknown block {}/{}", dep.eq, dep.unk));
                continue;
            };
            let max_allowed = unk.m - eq.n - 1;
            dependencies.push(DependencyCheck {
                eq: dep.eq.clone(),
                unk: dep.unk.clone(),
                declared_order: dep.order,
                max_allowed,
                pass: dep.order >= 0 && dep.order <= max_allowed,
            });
        }

        let pass = problems.is_empty()
            && entries.iter().all(|e| e.pass)
            && dependencies.iter().all(|d| d.pass);
        StructureReport {
            square,
            rows,
            columns,
            entries,
            dependencies,
            problems,
            pass,
        }
    }

    /// Checks `max_q l_q >= max_I m_I - min_J n_J`.
    pub fn leray_condition(&self, factor_degrees: &[u32]) -> ConditionReport {
        let max_factor_degree = factor_degrees.iter().copied().max().unwrap_or(0) as i64;
        let max_m = self.unknowns.iter().map(|u| u.m).max().unwrap_or(0);
        let min_n = self.equations.iter().map(|e| e.n).min().unwrap_or(0);
        let required = max_m - min_n;
        let pass = max_factor_degree >= required;
        let rel = if pass { ">=" } else { "<" };
        ConditionReport {
            max_factor_degree,
            max_m,
            min_n,
            required,
            pass,
            statement: format!(
                "max factor degree {max_factor_degree} {rel} max m - min n = {max_m} - {min_n} = {required}"
            ),
        }
    }

    /// Entry map keyed by scalar `(row, column)`.
    pub fn scalar_entries(&self) -> BTreeMap<(usize, usize), &Poly> {
        let rows = self.equation_offsets();
        let cols = self.unknown_offsets();
        self.entries
            .iter()
            .filter_map(|e| {
                let r = rows.get(e.eq.as_str())? + e.eq_index;
                let c = cols.get(e.unk.as_str())? + e.unk_index;
                Some(((r, c), &e.symbol))
            })
            .collect()
    }
}

fn offsets<'a>(blocks: impl Iterator<Item = (&'a str, usize)>) -> HashMap<&'a str, usize> {
    let mut acc = 0;
    blocks
        .map(|(name, mult)| {
            let at = acc;
            acc += mult;
            (name, at)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const WAVE: &str = "\
system wave
param gi00 gi11 gi22 gi33
unknown phi multiplicity 1 index 2
equation box multiplicity 1 index 0
entry box[0] phi[0] := gi00*xi0^2 + gi11*xi1^2 + gi22*xi2^2 + gi33*xi3^2
depends box on phi order 1
";

    #[test]
    fn wave_total_order() {
        let s = parse_system(WAVE).unwrap();
        assert_eq!(s.total_order(), 2);
        let report = s.validate_structure();
        assert!(report.pass, "{report:?}");
        assert!(s.leray_condition(&[2]).pass);
    }

    #[test]
    fn wrong_degree_names_the_entry() {
        let text = WAVE.replace("gi33*xi3^2", "gi33*xi3");
        let report = parse_system(&text).unwrap().validate_structure();
        assert!(!report.pass);
        let bad: Vec<_> = report.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].eq.as_str(), bad[0].unk.as_str()), ("box", "phi"));
        assert_eq!(bad[0].actual_degree, None);
    }

    #[test]
    fn dependency_order_is_bounded() {
        let text = WAVE.replace("order 1", "order 2");
        let report = parse_system(&text).unwrap().validate_structure();
        assert!(!report.pass);
        assert_eq!(report.dependencies[0].max_allowed, 1);
    }

    #[test]
    fn condition_fails_for_low_degree_factors() {
        let s = parse_system(WAVE).unwrap();
        let r = s.leray_condition(&[1, 1]);
        assert!(!r.pass);
        assert_eq!(r.required, 2);
    }
}
