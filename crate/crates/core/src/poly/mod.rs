//! Exact multivariate polynomials with rational coefficients.
//!
//! A [`Poly`] is a sorted list of `(Monomial, coefficient)` terms, leading
//! term first under a graded lexicographic order. Zero coefficients are never
//! stored, so structural equality is polynomial equality.

mod atom;
mod monomial;
mod parse;
pub mod univariate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

pub use atom::{Atom, AtomKind};
pub use monomial::Monomial;
pub use parse::{parse_expr, ExprError};

use crate::rational::{fmt_q, sqrt_exact, Q};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: Poly },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("assignment is missing atom `{0}`")]
    MissingAtom(String),
    #[error("not a perfect square; remainder {remainder}")]
    NotPerfectSquare { remainder: Poly },
}

/// Result of a homogeneity query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero polynomial is homogeneous of every degree.
    Zero,
    Degree(u32),
    NotHomogeneous,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Q)>,
}

pub type Assignment = HashMap<Atom, Q>;

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(crate::rational::q(n))
    }

    pub fn var(atom: Atom) -> Self {
        Poly::monomial(Monomial::var(atom, 1), Q::one())
    }

    pub fn xi(k: usize) -> Self {
        Poly::var(Atom::xi(k))
    }

    pub fn param(name: &str) -> Self {
        Poly::var(Atom::param(name))
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Q::zero) += c;
        }
        Poly::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Q>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.pairs().iter().map(|p| p.0))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn xi_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.xi_degree()).max().unwrap_or(0)
    }

    pub fn degree_in_atom(&self, atom: Atom) -> u16 {
        self.terms.iter().map(|(m, _)| m.exponent(atom)).max().unwrap_or(0)
    }

    /// Degree `d` iff every term has total degree `d` in `atoms`.
    pub fn homogeneous_degree_in(&self, atoms: &[Atom]) -> Homogeneity {
        let mut degrees = self.terms.iter().map(|(m, _)| m.degree_in(atoms));
        match degrees.next() {
            None => Homogeneity::Zero,
            Some(d) if degrees.all(|e| e == d) => Homogeneity::Degree(d),
            Some(_) => Homogeneity::NotHomogeneous,
        }
    }

    pub fn xi_homogeneity(&self) -> Homogeneity {
        let mut degrees = self.terms.iter().map(|(m, _)| m.xi_degree());
        match degrees.next() {
            None => Homogeneity::Zero,
            Some(d) if degrees.all(|e| e == d) => Homogeneity::Degree(d),
            Some(_) => Homogeneity::NotHomogeneous,
        }
    }

    /// True when no covector atom occurs.
    pub fn is_parameter_only(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.xi_degree() == 0)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // multiplication by a monomial preserves the order
        Poly {
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Product of many polynomials: the longest first, then the others from
    /// shortest up, so the running product only meets small factors.
    pub fn product(mut pieces: Vec<Poly>) -> Poly {
        if pieces.iter().any(Poly::is_zero) {
            return Poly::zero();
        }
        pieces.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let mut rest = pieces.into_iter();
        let Some(mut acc) = rest.next() else {
            return Poly::one();
        };
        let mut rest: Vec<Poly> = rest.collect();
        rest.reverse();
        for p in &rest {
            acc = &acc * p;
        }
        acc
    }

    fn add_terms(&self, other: &Poly, sign: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if sign { b[j].1.clone() } else { -&b[j].1 };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if sign { &a[i].1 + &b[j].1 } else { &a[i].1 - &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if sign { t.1.clone() } else { -&t.1 };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    fn mul_terms(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(m, c);
        }
        if other.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(m, c);
        }
        // split the longer operand so large products use every worker
        let (long, short) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        if short.len() <= MERGE_PRODUCT {
            if let Some(p) = merge_product_int(long, short) {
                return p;
            }
        }
        if long.len() * short.len() < PARALLEL_PRODUCT {
            return mul_chunk(&long.terms, short);
        }
        let chunk = long.len().div_ceil(4 * rayon::current_num_threads()).max(16);
        long.terms
            .par_chunks(chunk)
            .map(|part| mul_chunk(part, short))
            .reduce(Poly::zero, |a, b| &a + &b)
    }

    /// Multivariate division by a single divisor under the graded order:
    /// returns `(quotient, remainder)` with `self = quotient * den + remainder`
    /// and no term of the remainder divisible by the leading monomial of `den`.
    pub fn div_rem(&self, den: &Poly) -> Result<(Poly, Poly), PolyError> {
        let (lm, lc) = den.leading().ok_or(PolyError::DivisionByZero)?.clone();
        let mut work: BTreeMap<Monomial, Q> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        let mut rem = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            match m.div(&lm) {
                Some(qm) => {
                    let qc = &c / &lc;
                    for (dm, dc) in den.terms.iter().skip(1) {
                        let key = dm.mul(&qm);
                        let delta = dc * &qc;
                        match work.get_mut(&key) {
                            Some(v) => {
                                *v -= delta;
                                if v.is_zero() {
                                    work.remove(&key);
                                }
                            }
                            None => {
                                work.insert(key, -delta);
                            }
                        }
                    }
                    quot.push((qm, qc));
                }
                None => rem.push((m, c)),
            }
        }
        Ok((Poly::from_terms(quot), Poly::from_terms(rem)))
    }

    /// Quotient if `den` divides `self` exactly in the polynomial ring.
    pub fn exact_div(&self, den: &Poly) -> Result<Poly, PolyError> {
        if let Some(c) = den.constant_value() {
            if c.is_zero() {
                return Err(PolyError::DivisionByZero);
            }
            return Ok(self.scale(&c.recip()));
        }
        let (quot, rem) = self.div_rem(den)?;
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(PolyError::NotDivisible { remainder: rem })
        }
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Q, PolyError> {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(a, e) in m.pairs() {
                let x = assignment
                    .get(&a)
                    .ok_or_else(|| PolyError::MissingAtom(a.to_string()))?;
                v *= num_traits::pow(x.clone(), e as usize);
            }
            total += v;
        }
        Ok(total)
    }

    /// Substitutes rational values for the atoms present in `values`,
    /// leaving every other atom symbolic.
    pub fn partial_eval(&self, values: &Assignment) -> Poly {
        let mut powers: HashMap<(Atom, u16), Q> = HashMap::new();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut rest = Monomial::one();
            for &(a, e) in m.pairs() {
                match values.get(&a) {
                    Some(x) => {
                        let p = powers
                            .entry((a, e))
                            .or_insert_with(|| num_traits::pow(x.clone(), e as usize));
                        coeff *= &*p;
                    }
                    None => rest = rest.mul(&Monomial::var(a, e)),
                }
            }
            (rest, coeff)
        });
        Poly::from_terms(terms.collect::<Vec<_>>())
    }

    /// Composition: every atom bound in `bindings` is replaced by its polynomial.
    pub fn substitute(&self, bindings: &HashMap<Atom, Poly>) -> Poly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<(Atom, u16), Poly> = HashMap::new();
        let mut acc = Poly::zero();
        // group terms by their bound part to limit the number of products
        let mut groups: HashMap<Monomial, Vec<(Monomial, Q)>> = HashMap::new();
        for (m, c) in &self.terms {
            let bound = m.filter(|a| bindings.contains_key(&a));
            let free = m.filter(|a| !bindings.contains_key(&a));
            groups.entry(bound).or_default().push((free, c.clone()));
        }
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        for bound in keys {
            let free = Poly::from_terms(groups.remove(&bound).unwrap());
            let mut factor = Poly::one();
            for &(a, e) in bound.pairs() {
                let p = cache
                    .entry((a, e))
                    .or_insert_with(|| bindings[&a].pow(e as u32))
                    .clone();
                factor = &factor * &p;
            }
            acc = &acc + &(&free * &factor);
        }
        acc
    }

    /// Coefficient of `atom^power`, as a polynomial in the remaining atoms.
    pub fn coefficient_of(&self, atom: Atom, power: u16) -> Poly {
        Poly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.split_off(atom);
            (e == power).then(|| (rest, c.clone()))
        }))
    }

    /// Exact square root in the ring, matched term by term from the leading
    /// monomial downward.
    pub fn sqrt(&self) -> Result<Poly, PolyError> {
        let fail = |rem: &Poly| PolyError::NotPerfectSquare {
            remainder: rem.clone(),
        };
        let Some((lm, lc)) = self.leading() else {
            return Ok(Poly::zero());
        };
        let (rm, rc) = match (lm.sqrt(), sqrt_exact(lc)) {
            (Some(m), Some(c)) => (m, c),
            _ => return Err(fail(self)),
        };
        let lead = Poly::monomial(rm.clone(), rc.clone());
        let two_lead_c = &rc + &rc;
        let mut root = lead.clone();
        let mut rem = self - &(&lead * &lead);
        let mut last = rm.clone();
        let max_steps = self.len() + 2;
        for _ in 0..=max_steps {
            let Some((m, c)) = rem.leading().cloned() else {
                return Ok(root);
            };
            let tm = match m.div(&rm) {
                Some(tm) if tm < last => tm,
                _ => return Err(fail(&rem)),
            };
            let t = Poly::monomial(tm.clone(), &c / &two_lead_c);
            // (r + t)^2 = r^2 + 2 r t + t^2
            rem = &(&rem - &(&root * &t).scale(&crate::rational::q(2))) - &(&t * &t);
            root = &root + &t;
            last = tm;
        }
        Err(fail(&rem))
    }

    /// Sum of absolute values of coefficients; a crude size measure.
    pub fn height(&self) -> Q {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }
}

/// Products with at least this many term pairs are split across threads.
const PARALLEL_PRODUCT: usize = 1 << 16;
/// Factors with at most this many terms are multiplied by merging.
const MERGE_PRODUCT: usize = 16;

fn small_int(c: &Q) -> Option<i64> {
    if c.is_integer() {
        c.numer().to_i64()
    } else {
        None
    }
}

/// Product with a short integer polynomial as a k-way merge of the shifted
/// copies of `long`, which stay sorted under a monomial order. `None` when a
/// coefficient is not a small integer or the accumulation overflows.
fn merge_product_int(long: &Poly, short: &Poly) -> Option<Poly> {
    let la: Vec<i64> = long.terms.iter().map(|(_, c)| small_int(c)).collect::<Option<_>>()?;
    let lb: Vec<i64> = short.terms.iter().map(|(_, c)| small_int(c)).collect::<Option<_>>()?;
    let k = short.len();
    let mut pos = vec![0usize; k];
    let mut heads: Vec<Option<Monomial>> = short
        .terms
        .iter()
        .map(|(mb, _)| long.terms.first().map(|(ma, _)| ma.mul(mb)))
        .collect();
    let mut out: Vec<(Monomial, Q)> = Vec::with_capacity(long.len() * k / 2);
    loop {
        let mut top: Option<&Monomial> = None;
        for h in heads.iter().flatten() {
            if top.is_none_or(|t| h > t) {
                top = Some(h);
            }
        }
        let Some(top) = top.cloned() else { break };
        let mut acc: i128 = 0;
        for s in 0..k {
            if heads[s].as_ref() == Some(&top) {
                acc = acc.checked_add(la[pos[s]] as i128 * lb[s] as i128)?;
                pos[s] += 1;
                heads[s] = long.terms.get(pos[s]).map(|(ma, _)| ma.mul(&short.terms[s].0));
            }
        }
        if acc != 0 {
            out.push((top, Q::from_integer(acc.into())));
        }
    }
    Some(Poly { terms: out })
}

/// Schoolbook product of a run of terms with `other`. Integer
/// coefficients accumulate in `i128` and fall back to rationals on overflow.
fn mul_chunk(part: &[(Monomial, Q)], other: &Poly) -> Poly {
    let cap = (part.len() * other.len()).min(1 << 20);
    let ints: Option<(Vec<i64>, Vec<i64>)> = part
        .iter()
        .map(|(_, c)| small_int(c))
        .collect::<Option<Vec<_>>>()
        .zip(other.terms.iter().map(|(_, c)| small_int(c)).collect::<Option<Vec<_>>>());
    if let Some((ia, ib)) = ints {
        let mut acc: HashMap<Monomial, i128> = HashMap::with_capacity(cap);
        let mut overflow = false;
        'outer: for ((ma, _), &ca) in part.iter().zip(&ia) {
            for ((mb, _), &cb) in other.terms.iter().zip(&ib) {
                let c = ca as i128 * cb as i128;
                let slot = acc.entry(ma.mul(mb)).or_insert(0);
                match slot.checked_add(c) {
                    Some(v) => *slot = v,
                    None => {
                        overflow = true;
                        break 'outer;
                    }
                }
            }
        }
        if !overflow {
            let mut terms: Vec<_> = acc
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(m, c)| (m, Q::from_integer(c.into())))
                .collect();
            terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
            return Poly { terms };
        }
    }
    let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(cap);
    for (ma, ca) in part {
        for (mb, cb) in &other.terms {
            *acc.entry(ma.mul(mb)).or_insert_with(Q::zero) += ca * cb;
        }
    }
    Poly::from_map(acc)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.add_terms(rhs, true)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.add_terms(rhs, false)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_terms(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for Poly {
    fn product<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::one(), |a, b| &a * &b)
    }
}

impl From<Atom> for Poly {
    fn from(a: Atom) -> Poly {
        Poly::var(a)
    }
}

impl From<Q> for Poly {
    fn from(c: Q) -> Poly {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Poly {
        Poly::int(n)
    }
}

type RenderKey = (std::cmp::Reverse<u32>, Vec<((AtomKind, String, Option<u32>), std::cmp::Reverse<u16>)>);

fn render_key(m: &Monomial) -> RenderKey {
    let mut atoms: Vec<_> = m
        .pairs()
        .iter()
        .map(|&(a, e)| (a.sort_key(), std::cmp::Reverse(e)))
        .collect();
    atoms.sort();
    (std::cmp::Reverse(m.degree()), atoms)
}

fn render_monomial(m: &Monomial) -> String {
    let mut atoms: Vec<_> = m.pairs().to_vec();
    atoms.sort_by_key(|p| p.0.sort_key());
    atoms
        .iter()
        .map(|&(a, e)| if e == 1 { a.to_string() } else { format!("{a}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical rendering: terms ordered by descending degree, then by atom
/// names, so the text does not depend on interning order.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().map(|t| (render_key(&t.0), t)).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (_, (m, c))) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", fmt_q(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", render_monomial(m))?;
            } else {
                write!(f, "{}*{}", fmt_q(&mag), render_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl FromStr for Poly {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Poly, ExprError> {
        parse_expr(s, &|name: &str, index: Option<u32>| {
            Ok(Poly::var(match index {
                Some(i) => Atom::param_indexed(name, i),
                None => Atom::from_text(name),
            }))
        })
    }
}

/// Shorthand used throughout tests and the reference instance.
pub fn p(text: &str) -> Poly {
    text.parse().unwrap_or_else(|e| panic!("bad polynomial `{text}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, ratio};

    #[test]
    fn difference_of_squares() {
        assert_eq!(p("(xi0+xi1)*(xi0-xi1)"), p("xi0^2 - xi1^2"));
        let a = p("3*xi0*F - q/2");
        assert_eq!(&a + &Poly::zero(), a);
    }

    #[test]
    fn cube_of_parameter_factor() {
        let s = p("F+q");
        assert_eq!(&s * &(&s * &s), p("F^3 + 3*F^2*q + 3*F*q^2 + q^3"));
        assert_eq!(s.pow(3), &s * &s.pow(2));
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("xi0^2 - xi1^2").exact_div(&p("xi0 - xi1")).unwrap(), p("xi0 + xi1"));
        match p("xi0^2").exact_div(&p("xi1")) {
            Err(PolyError::NotDivisible { remainder }) => assert_eq!(remainder, p("xi0^2")),
            other => panic!("expected NotDivisible, got {other:?}"),
        }
        assert_eq!(p("xi0").exact_div(&Poly::zero()), Err(PolyError::DivisionByZero));
        assert_eq!(p("4*F").exact_div(&p("2")).unwrap(), p("2*F"));
    }

    #[test]
    fn evaluation() {
        let mut env = Assignment::new();
        env.insert(Atom::xi(0), q(3));
        env.insert(Atom::xi(1), q(2));
        assert_eq!(p("xi0^2 - xi1^2").eval(&env).unwrap(), q(5));
        assert_eq!(p("7/3").eval(&Assignment::new()).unwrap(), ratio(7, 3));
        assert_eq!(
            p("xi2").eval(&env),
            Err(PolyError::MissingAtom("xi2".into()))
        );
    }

    #[test]
    fn homogeneity() {
        assert_eq!(p("xi0*xi1 + xi2^2").xi_homogeneity(), Homogeneity::Degree(2));
        assert_eq!(p("xi0 + xi1^2").xi_homogeneity(), Homogeneity::NotHomogeneous);
        assert_eq!(Poly::zero().xi_homogeneity(), Homogeneity::Zero);
        // parameters do not count towards the covector degree
        assert_eq!(p("F*xi0^2 + q^3*xi1*xi2").xi_homogeneity(), Homogeneity::Degree(2));
        let f = Atom::param("F");
        assert_eq!(p("F*q + F^2").homogeneous_degree_in(&[f]), Homogeneity::NotHomogeneous);
    }

    #[test]
    fn substitution_composes() {
        let mut b = HashMap::new();
        b.insert(Atom::param("C0"), p("F*u0"));
        assert_eq!(p("C0*xi0 + q").substitute(&b), p("F*u0*xi0 + q"));
        let mut vals = Assignment::new();
        vals.insert(Atom::param("q"), ratio(1, 2));
        assert_eq!(p("q*xi0 + F").partial_eval(&vals), p("xi0/2 + F"));
    }

    #[test]
    fn square_roots() {
        let r = p("q*xi3*(xi2 - xi3) + 2*F");
        assert_eq!((&r * &r).sqrt().unwrap().pow(2), &r * &r);
        assert_eq!(Poly::zero().sqrt().unwrap(), Poly::zero());
        assert!(matches!(p("-4").sqrt(), Err(PolyError::NotPerfectSquare { .. })));
        assert!(matches!(p("xi0^2 + xi1^2").sqrt(), Err(PolyError::NotPerfectSquare { .. })));
    }

    #[test]
    fn rendering_round_trips() {
        for text in ["0", "-1", "xi0^2 - 3/4*F*xi1 + q[2]", "-(F+q)^3*xi3"] {
            let a = p(text);
            assert_eq!(p(&a.to_string()), a, "{text} -> {a}");
        }
        assert_eq!(p("xi1 + 2*xi0").to_string(), "2*xi0 + xi1");
    }

    #[test]
    fn coefficient_extraction() {
        let f = p("(F+q)*xi0^4 + 2*B*xi0^2 + Cc");
        assert_eq!(f.coefficient_of(Atom::xi(0), 4), p("F+q"));
        assert_eq!(f.coefficient_of(Atom::xi(0), 2), p("2*B"));
        assert_eq!(f.coefficient_of(Atom::xi(0), 0), p("Cc"));
    }
}
