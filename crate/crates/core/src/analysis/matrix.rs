use std::collections::HashMap;

use crate::poly::{Assignment, Atom, Poly, PolyError};
use crate::rational::Q;
use crate::system::LeraySystem;

use super::AnalysisError;

/// Scalar principal symbol: rows are equation components, columns unknown
/// components, both in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub entries: Vec<Vec<Poly>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl SymbolMatrix {
    pub fn from_rows(entries: Vec<Vec<Poly>>) -> Self {
        let n = entries.len();
        SymbolMatrix {
            entries,
            row_labels: (0..n).map(|i| format!("r{i}")).collect(),
            col_labels: (0..n).map(|i| format!("c{i}")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &Poly {
        &self.entries[row][col]
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.iter().position(|l| l == label)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly + Sync) -> SymbolMatrix {
        use rayon::prelude::*;
        SymbolMatrix {
            entries: self
                .entries
                .par_iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    pub fn substitute(&self, bindings: &HashMap<Atom, Poly>) -> SymbolMatrix {
        self.map(|p| p.substitute(bindings))
    }

    pub fn partial_eval(&self, values: &Assignment) -> SymbolMatrix {
        self.map(|p| p.partial_eval(values))
    }

    /// Fully numeric matrix; every atom must be assigned.
    pub fn evaluate(&self, values: &Assignment) -> Result<Vec<Vec<Q>>, PolyError> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval(values)).collect())
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SymbolMatrix {
        SymbolMatrix {
            entries: rows
                .iter()
                .map(|&r| cols.iter().map(|&c| self.entries[r][c].clone()).collect())
                .collect(),
            row_labels: rows.iter().map(|&r| self.row_labels[r].clone()).collect(),
            col_labels: cols.iter().map(|&c| self.col_labels[c].clone()).collect(),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().flatten().filter(|p| !p.is_zero()).count()
    }
}

/// Expands the block system to its scalar symbol, applying the system's
/// bindings to every entry.
pub fn build_symbol_matrix(sys: &LeraySystem) -> Result<SymbolMatrix, AnalysisError> {
    build_symbol_matrix_with(sys, &sys.binding_map())
}

/// As [`build_symbol_matrix`] with explicit bindings (empty for the
/// fully general symbol).
pub fn build_symbol_matrix_with(
    sys: &LeraySystem,
    bindings: &HashMap<Atom, Poly>,
) -> Result<SymbolMatrix, AnalysisError> {
    let (rows, cols) = (sys.equation_count(), sys.unknown_count());
    if rows != cols {
        return Err(AnalysisError::NotSquare { rows, cols });
    }
    let mut entries = vec![vec![Poly::zero(); cols]; rows];
    for ((r, c), p) in sys.scalar_entries() {
        entries[r][c] = p.substitute(bindings);
    }
    let labels = |blocks: Vec<(&str, usize)>| -> Vec<String> {
        blocks
            .into_iter()
            .flat_map(|(name, mult)| (0..mult).map(move |k| format!("{name}[{k}]")))
            .collect()
    };
    Ok(SymbolMatrix {
        entries,
        row_labels: labels(sys.equations.iter().map(|e| (e.name.as_str(), e.multiplicity)).collect()),
        col_labels: labels(sys.unknowns.iter().map(|u| (u.name.as_str(), u.multiplicity)).collect()),
    })
}
