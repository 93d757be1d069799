use std::collections::HashMap;

use serde::Serialize;

use crate::poly::{Atom, Poly, PolyError};
use crate::rational::fmt_q;
use crate::system::FactorsDecl;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub poly: Poly,
    pub multiplicity: u32,
}

/// `prefactor * prod factor^multiplicity`; the prefactor carries no covector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub prefactor: Poly,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn new(prefactor: Poly) -> Self {
        Factorization {
            prefactor,
            factors: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, poly: Poly, multiplicity: u32) -> Self {
        self.factors.push(Factor {
            name: name.to_string(),
            poly,
            multiplicity,
        });
        self
    }

    pub fn from_decl(decl: &FactorsDecl) -> Self {
        Factorization {
            prefactor: decl.prefactor.clone(),
            factors: decl
                .factors
                .iter()
                .map(|f| Factor {
                    name: f.name.clone(),
                    poly: f.poly.clone(),
                    multiplicity: f.multiplicity,
                })
                .collect(),
        }
    }

    pub fn substitute(&self, bindings: &HashMap<Atom, Poly>) -> Factorization {
        Factorization {
            prefactor: self.prefactor.substitute(bindings),
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    poly: f.poly.substitute(bindings),
                    ..f.clone()
                })
                .collect(),
        }
    }

    /// Number of hyperbolic factors counted with multiplicity.
    pub fn factor_count(&self) -> u32 {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }

    pub fn total_degree(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| f.multiplicity * f.poly.xi_degree())
            .sum()
    }

    /// Distinct factor degrees, one per factor (multiplicity ignored).
    pub fn degrees(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.poly.xi_degree()).collect()
    }

    /// Multiplies the claim out, one factor copy at a time.
    pub fn expand(&self) -> Poly {
        let mut pieces = vec![self.prefactor.clone()];
        for f in &self.factors {
            pieces.extend(std::iter::repeat_n(f.poly.clone(), f.multiplicity as usize));
        }
        Poly::product(pieces)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub monomial: String,
    pub determinant_coefficient: String,
    pub claimed_coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub determinant_terms: usize,
    pub claimed_terms: usize,
    /// First monomial (in the internal term order) where the two sides differ.
    pub witness: Option<Witness>,
}

/// Expands the claimed factorization and compares it with `det` term by term.
pub fn verify_factorization(det: &Poly, f: &Factorization) -> VerifyReport {
    let claimed = f.expand();
    let diff = det - &claimed;
    let witness = diff.leading().map(|(m, _)| {
        let coeff = |p: &Poly| {
            p.terms()
                .iter()
                .find(|(t, _)| t == m)
                .map(|(_, c)| fmt_q(c))
                .unwrap_or_else(|| "0".into())
        };
        Witness {
            monomial: Poly::monomial(m.clone(), num_traits::One::one()).to_string(),
            determinant_coefficient: coeff(det),
            claimed_coefficient: coeff(&claimed),
        }
    });
    VerifyReport {
        pass: witness.is_none(),
        determinant_terms: det.len(),
        claimed_terms: claimed.len(),
        witness,
    }
}

/// Divides every claimed factor out of `det` in turn and returns what is
/// left, which must equal the prefactor for the claim to hold.
pub fn divide_out(det: &Poly, f: &Factorization) -> Result<Poly, PolyError> {
    let mut rest = det.clone();
    for factor in &f.factors {
        for _ in 0..factor.multiplicity {
            rest = rest.exact_div(&factor.poly)?;
        }
    }
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;

    #[test]
    fn wrong_exponent_yields_witness() {
        let light = p("xi0^2 - xi1^2");
        let det = p("F").pow(1) * light.pow(3);
        let good = Factorization::new(p("F")).with("light", light.clone(), 3);
        assert!(verify_factorization(&det, &good).pass);
        assert_eq!(divide_out(&det, &good).unwrap(), p("F"));
        let bad = Factorization::new(p("F")).with("light", light, 2);
        let r = verify_factorization(&det, &bad);
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert_eq!(w.monomial, "xi0^6*F");
        assert_eq!((w.determinant_coefficient.as_str(), w.claimed_coefficient.as_str()), ("1", "0"));
    }

    #[test]
    fn counts() {
        let f = Factorization::new(p("1"))
            .with("a", p("xi0"), 6)
            .with("b", p("xi0^2 - xi1^2"), 14);
        assert_eq!(f.factor_count(), 20);
        assert_eq!(f.total_degree(), 34);
        assert_eq!(f.degrees(), vec![1, 2]);
    }
}
