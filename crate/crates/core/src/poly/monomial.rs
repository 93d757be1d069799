use std::cmp::Ordering;

use smallvec::SmallVec;

use super::Atom;

/// Sparse exponent vector: `(atom, exponent)` pairs sorted by atom id,
/// exponents strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Atom, u16); 14]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(atom: Atom, exp: u16) -> Self {
        let mut m = Monomial::one();
        if exp > 0 {
            m.0.push((atom, exp));
        }
        m
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Atom, u16)>) -> Self {
        let mut m = Monomial::one();
        for (a, e) in pairs {
            m = m.mul(&Monomial::var(a, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Atom, u16)] {
        &self.0
    }

    pub fn exponent(&self, atom: Atom) -> u16 {
        self.0
            .binary_search_by_key(&atom, |p| p.0)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1 as u32).sum()
    }

    /// Total degree in the covector atoms only.
    pub fn xi_degree(&self) -> u32 {
        self.0
            .iter()
            .take_while(|p| p.0.is_covector())
            .map(|p| p.1 as u32)
            .sum()
    }

    pub fn degree_in(&self, atoms: &[Atom]) -> u32 {
        self.0
            .iter()
            .filter(|p| atoms.contains(&p.0))
            .map(|p| p.1 as u32)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1.checked_add(b[j].1).expect("exponent overflow");
                    out.push((a[i].0, e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        let b = &other.0;
        for &(atom, e) in &self.0 {
            if j < b.len() && b[j].0 < atom {
                return None;
            }
            if j < b.len() && b[j].0 == atom {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((atom, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((atom, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Square root if every exponent is even.
    pub fn sqrt(&self) -> Option<Monomial> {
        if self.0.iter().any(|p| p.1 % 2 != 0) {
            return None;
        }
        Some(Monomial(self.0.iter().map(|&(a, e)| (a, e / 2)).collect()))
    }

    /// Drops the given atom, returning its exponent and the remainder.
    pub fn split_off(&self, atom: Atom) -> (u16, Monomial) {
        let e = self.exponent(atom);
        let rest = Monomial(self.0.iter().copied().filter(|p| p.0 != atom).collect());
        (e, rest)
    }

    /// Keeps only pairs accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(Atom) -> bool) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| keep(p.0)).collect())
    }
}

/// Graded lexicographic order; atoms with smaller ids rank as larger
/// variables, so the covector atoms lead.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        for (x, y) in a.iter().zip(b.iter()) {
            if x.0 != y.0 {
                return if x.0 < y.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(usize, u16)]) -> Monomial {
        Monomial::from_pairs(pairs.iter().map(|&(a, e)| (Atom::xi(a), e)))
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = m(&[(0, 2), (2, 1)]);
        let b = m(&[(1, 1), (2, 3)]);
        let c = a.mul(&b);
        assert_eq!(c, m(&[(0, 2), (1, 1), (2, 4)]));
        assert_eq!(c.div(&b), Some(a.clone()));
        assert_eq!(a.div(&b), None);
    }

    #[test]
    fn graded_lex() {
        // degree dominates
        assert!(m(&[(3, 3)]) > m(&[(0, 2)]));
        // xi0 outranks xi1 at equal degree
        assert!(m(&[(0, 1), (3, 1)]) > m(&[(1, 2)]));
        assert!(m(&[(0, 2)]) > m(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let a = m(&[(0, 1), (3, 1)]);
        let b = m(&[(1, 2)]);
        let w = m(&[(2, 5), (1, 1)]);
        assert_eq!(a.cmp(&b), a.mul(&w).cmp(&b.mul(&w)));
    }
}
