//! Hyperbolicity tests for homogeneous factors of the characteristic
//! polynomial, the biquadratic split and the Gevrey exponent.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::factor::Factorization;
use super::sphere::transverse_directions;
use crate::poly::univariate::UniPoly;
use crate::poly::{Assignment, Atom, Homogeneity, Poly, PolyError};
use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperbolicityError {
    #[error("expected a form of degree {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: String },
    #[error("quadratic form is degenerate: signature {0}")]
    DegeneracyDetected(Signature),
    #[error("leading coefficient p(tau) vanishes")]
    LeadingCoefficientVanishes,
    #[error("parameters left unassigned: {0}")]
    Unassigned(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LinearExact,
    QuadraticSignature,
    BiquadraticClosedForm,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Hyperbolic,
    NotHyperbolic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityVerdict {
    pub factor: String,
    pub method: Method,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_imag: Option<f64>,
    pub detail: Option<String>,
}

impl HyperbolicityVerdict {
    fn new(factor: &str, method: Method, verdict: Verdict) -> Self {
        HyperbolicityVerdict {
            factor: factor.to_string(),
            method,
            verdict,
            witness: None,
            samples: None,
            tolerance: None,
            max_imag: None,
            detail: None,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.verdict == Verdict::Hyperbolic
    }
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.negative, self.zero)
    }
}

pub fn fmt_covector(v: &[Q; 4]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

/// Substitutes `params` and requires that only covector atoms remain.
fn prepare(p: &Poly, params: &Assignment) -> Result<Poly, HyperbolicityError> {
    let r = p.partial_eval(params);
    let left: BTreeSet<String> = r
        .atoms()
        .into_iter()
        .filter(|a| !a.is_covector())
        .map(|a| a.to_string())
        .collect();
    if left.is_empty() {
        Ok(r)
    } else {
        Err(HyperbolicityError::Unassigned(left.into_iter().collect::<Vec<_>>().join(", ")))
    }
}

fn covector_assignment(xi: &[Q; 4]) -> Assignment {
    (0..4).map(|k| (Atom::xi(k), xi[k].clone())).collect()
}

fn eval_at(p: &Poly, xi: &[Q; 4]) -> Q {
    p.eval(&covector_assignment(xi))
        .expect("only covector atoms remain after prepare")
}

fn require_degree(p: &Poly, d: u32) -> Result<(), HyperbolicityError> {
    match p.xi_homogeneity() {
        Homogeneity::Degree(e) if e == d => Ok(()),
        Homogeneity::Degree(e) => Err(HyperbolicityError::DegreeMismatch {
            expected: d,
            found: e.to_string(),
        }),
        Homogeneity::Zero => Err(HyperbolicityError::DegreeMismatch {
            expected: d,
            found: "zero polynomial".into(),
        }),
        Homogeneity::NotHomogeneous => Err(HyperbolicityError::DegreeMismatch {
            expected: d,
            found: "not homogeneous".into(),
        }),
    }
}

/// A linear form is hyperbolic in direction `tau` iff it does not vanish there.
pub fn hyperbolicity_linear(
    name: &str,
    p: &Poly,
    tau: &[Q; 4],
    params: &Assignment,
) -> Result<HyperbolicityVerdict, HyperbolicityError> {
    let p = prepare(p, params)?;
    require_degree(&p, 1)?;
    let at_tau = eval_at(&p, tau);
    let mut v = HyperbolicityVerdict::new(
        name,
        Method::LinearExact,
        if at_tau.is_zero() { Verdict::NotHyperbolic } else { Verdict::Hyperbolic },
    );
    v.detail = Some(format!("p(tau) = {}", fmt_q(&at_tau)));
    if at_tau.is_zero() {
        v.witness = Some(fmt_covector(tau));
    }
    Ok(v)
}

/// Symmetric coefficient matrix of a quadratic covector form.
pub fn quadratic_form_matrix(p: &Poly) -> [[Q; 4]; 4] {
    let mut m: [[Q; 4]; 4] = Default::default();
    let half = Q::new(1.into(), 2.into());
    for (mono, c) in p.terms() {
        let idx: Vec<usize> = mono
            .pairs()
            .iter()
            .flat_map(|&(a, e)| std::iter::repeat_n(a.0 as usize, e as usize))
            .collect();
        if let [i, j] = idx[..] {
            if i == j {
                m[i][i] += c;
            } else {
                m[i][j] += c * &half;
                m[j][i] += c * &half;
            }
        }
    }
    m
}

/// Exact inertia by symmetric elimination (congruence transforms only).
pub fn signature(mut a: Vec<Vec<Q>>) -> Signature {
    let n = a.len();
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    let mut k = 0;
    while k < n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            swap_sym(&mut a, k, i);
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        {
            // row/col i += row/col j turns the zero diagonal into 2 a_ij
            for c in 0..n {
                let v = a[j][c].clone();
                a[i][c] += v;
            }
            for r in 0..n {
                let v = a[r][j].clone();
                a[r][i] += v;
            }
            swap_sym(&mut a, k, i);
        } else {
            sig.zero += n - k;
            break;
        }
        let pivot = a[k][k].clone();
        if pivot.is_positive() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &pivot;
            for c in k..n {
                let v = &f * &a[k][c];
                a[r][c] -= v;
            }
            for rr in k..n {
                let v = &f * &a[rr][k];
                a[rr][r] -= v;
            }
        }
        k += 1;
    }
    sig
}

fn swap_sym(a: &mut [Vec<Q>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// A quadratic form is hyperbolic in direction `tau` iff it is
/// non-degenerate with exactly one eigenvalue of one sign and `tau` lies
/// on that sign's side. Works for either sign convention.
pub fn hyperbolicity_quadratic(
    name: &str,
    p: &Poly,
    tau: &[Q; 4],
    params: &Assignment,
) -> Result<HyperbolicityVerdict, HyperbolicityError> {
    let p = prepare(p, params)?;
    require_degree(&p, 2)?;
    let m = quadratic_form_matrix(&p);
    let sig = signature(m.iter().map(|r| r.to_vec()).collect());
    let at_tau = eval_at(&p, tau);
    let lorentz_plus = sig.positive == 1 && sig.negative + sig.zero == 3;
    let lorentz_minus = sig.negative == 1 && sig.positive + sig.zero == 3;
    if !(lorentz_plus || lorentz_minus) {
        let mut v = HyperbolicityVerdict::new(name, Method::QuadraticSignature, Verdict::NotHyperbolic);
        v.witness = Some(format!("signature {sig}"));
        v.detail = Some(format!("signature {sig}"));
        return Ok(v);
    }
    if sig.zero > 0 {
        return Err(HyperbolicityError::DegeneracyDetected(sig));
    }
    let inside = if lorentz_plus && !lorentz_minus {
        at_tau.is_positive()
    } else if lorentz_minus && !lorentz_plus {
        at_tau.is_negative()
    } else {
        // 2-dimensional edge case; both signs qualify
        !at_tau.is_zero()
    };
    let mut v = HyperbolicityVerdict::new(
        name,
        Method::QuadraticSignature,
        if inside { Verdict::Hyperbolic } else { Verdict::NotHyperbolic },
    );
    v.detail = Some(format!("signature {sig}, p(tau) = {}", fmt_q(&at_tau)));
    if !inside {
        v.witness = Some(fmt_covector(tau));
    }
    Ok(v)
}

/// Per-direction root data for the sampled test.
#[derive(Debug, Clone)]
pub struct LineRoots {
    pub direction: [Q; 4],
    pub roots: Vec<crate::poly::univariate::Root>,
}

/// Roots of `s -> p(eta + s tau)` for each `eta`; `p` must be covector-only.
pub fn line_roots(p: &Poly, tau: &[Q; 4], directions: &[[Q; 4]]) -> Vec<LineRoots> {
    directions
        .par_iter()
        .map(|eta| {
            let u = UniPoly::along_line(p, eta, tau).expect("covector-only polynomial");
            LineRoots {
                direction: eta.clone(),
                roots: u.roots(),
            }
        })
        .collect()
}

/// Falsification screen: at `n_samples` directions transverse to `tau`
/// every root of `p(eta + s tau)` must be real up to `tol * (1 + |re|)`.
pub fn hyperbolicity_sampled(
    name: &str,
    p: &Poly,
    tau: &[Q; 4],
    params: &Assignment,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<HyperbolicityVerdict, HyperbolicityError> {
    let p = prepare(p, params)?;
    if let Homogeneity::NotHomogeneous | Homogeneity::Zero = p.xi_homogeneity() {
        return Err(HyperbolicityError::DegreeMismatch {
            expected: p.xi_degree(),
            found: "not homogeneous".into(),
        });
    }
    if eval_at(&p, tau).is_zero() {
        return Err(HyperbolicityError::LeadingCoefficientVanishes);
    }
    let directions = transverse_directions(tau, n_samples, seed);
    let rows = line_roots(&p, tau, &directions);
    let mut worst = 0.0f64;
    let mut witness = None;
    for row in &rows {
        for r in &row.roots {
            let excess = r.im.abs();
            if excess > tol * (1.0 + r.re.abs()) && witness.is_none() {
                witness = Some(fmt_covector(&row.direction));
            }
            worst = worst.max(excess);
        }
    }
    let mut v = HyperbolicityVerdict::new(
        name,
        Method::Sampled,
        if witness.is_some() { Verdict::NotHyperbolic } else { Verdict::Hyperbolic },
    );
    v.samples = Some(n_samples);
    v.tolerance = Some(tol);
    v.max_imag = Some(worst);
    v.witness = witness;
    Ok(v)
}

/// Dispatches on the degree: linear and quadratic factors get the exact
/// tests, higher degrees the sampled screen.
pub fn hyperbolicity_auto(
    name: &str,
    p: &Poly,
    tau: &[Q; 4],
    params: &Assignment,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<HyperbolicityVerdict, HyperbolicityError> {
    match prepare(p, params)?.xi_degree() {
        1 => hyperbolicity_linear(name, p, tau, params),
        2 => hyperbolicity_quadratic(name, p, tau, params),
        _ => hyperbolicity_sampled(name, p, tau, params, n_samples, tol, seed),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("leading coefficient A vanishes")]
    LeadingCoefficientZero,
    #[error("discriminant is not a perfect square; remainder {remainder}")]
    NotPerfectSquare { discriminant: Poly, remainder: Poly },
    #[error("split check failed: {0}")]
    Check(#[from] PolyError),
}

/// `factor_scale * p1 * p2 == poly_scale * P` with `P = A xi0^4 + B xi0^2 + C`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiquadraticSplit {
    pub p1: Poly,
    pub p2: Poly,
    pub discriminant: Poly,
    pub sqrt_discriminant: Poly,
    pub factor_scale: Poly,
    pub poly_scale: Poly,
}

/// Splits `A xi0^4 + B xi0^2 + C` into two quadratics in `xi0` when the
/// discriminant `B^2 - 4AC` is a perfect square in the ring.
pub fn biquadratic_split(
    a: &Poly,
    b: &Poly,
    c: &Poly,
    params: &Assignment,
) -> Result<BiquadraticSplit, SplitError> {
    let (a, b, c) = (a.partial_eval(params), b.partial_eval(params), c.partial_eval(params));
    if a.is_zero() {
        return Err(SplitError::LeadingCoefficientZero);
    }
    let disc = &(&b * &b) - &(&a * &c).scale(&Q::from_integer(4.into()));
    let root = disc.sqrt().map_err(|e| match e {
        PolyError::NotPerfectSquare { remainder } => SplitError::NotPerfectSquare {
            discriminant: disc.clone(),
            remainder,
        },
        other => SplitError::Check(other),
    })?;
    let x2 = Poly::xi(0).pow(2);
    let big_p = &(&(&a * &x2.pow(2)) + &(&b * &x2)) + &c;
    let two_a = a.scale(&Q::from_integer(2.into()));
    let lower = &b - &root;
    let upper = &b + &root;
    let split = match (lower.exact_div(&two_a), upper.exact_div(&two_a)) {
        (Ok(l), Ok(u)) => BiquadraticSplit {
            p1: &x2 + &l,
            p2: &x2 + &u,
            discriminant: disc.clone(),
            sqrt_discriminant: root.clone(),
            factor_scale: a.clone(),
            poly_scale: Poly::one(),
        },
        _ => BiquadraticSplit {
            p1: &(&two_a * &x2) + &lower,
            p2: &(&two_a * &x2) + &upper,
            discriminant: disc.clone(),
            sqrt_discriminant: root.clone(),
            factor_scale: Poly::one(),
            poly_scale: a.scale(&Q::from_integer(4.into())),
        },
    };
    // the defining identity, checked by exact division
    let lhs = &split.factor_scale * &(&split.p1 * &split.p2);
    let quotient = lhs.exact_div(&big_p)?;
    if quotient != split.poly_scale {
        return Err(SplitError::Check(PolyError::NotDivisible {
            remainder: &lhs - &(&split.poly_scale * &big_p),
        }));
    }
    Ok(split)
}

/// Upper end of the admissible Gevrey range: `q/(q-1)` for `q` factors,
/// with `q = 1` mapping to the Sobolev sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GevreyExponent {
    Exact(Q),
    Sobolev,
}

impl fmt::Display for GevreyExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GevreyExponent::Exact(q) => write!(f, "{}", fmt_q(q)),
            GevreyExponent::Sobolev => write!(f, "sobolev"),
        }
    }
}

impl Serialize for GevreyExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GevreyError {
    #[error("factor `{0}` is not verified hyperbolic")]
    NotAllHyperbolic(String),
    #[error("the factorization has no covector factors")]
    NoFactors,
}

pub fn sigma_from_count(count: u32) -> Result<GevreyExponent, GevreyError> {
    match count {
        0 => Err(GevreyError::NoFactors),
        1 => Ok(GevreyExponent::Sobolev),
        n => Ok(GevreyExponent::Exact(Q::new(n.into(), (n - 1).into()))),
    }
}

/// Every factor needs at least one verdict, and all of its verdicts must be
/// hyperbolic.
pub fn gevrey_sigma(
    f: &Factorization,
    verdicts: &[HyperbolicityVerdict],
) -> Result<GevreyExponent, GevreyError> {
    for factor in &f.factors {
        let mut mine = verdicts.iter().filter(|v| v.factor == factor.name).peekable();
        if mine.peek().is_none() || !mine.all(|v| v.is_hyperbolic()) {
            return Err(GevreyError::NotAllHyperbolic(factor.name.clone()));
        }
    }
    sigma_from_count(f.factor_count())
}

/// True when the leading coefficient is nonzero and every root real.
pub fn roots_are_real(roots: &[crate::poly::univariate::Root], tol: f64) -> bool {
    roots.iter().all(|r| r.im.abs() <= tol * (1.0 + r.re.abs()))
}

/// `p(tau)` after parameter substitution, for reports.
pub fn value_at_tau(p: &Poly, tau: &[Q; 4], params: &Assignment) -> Result<Q, HyperbolicityError> {
    Ok(eval_at(&prepare(p, params)?, tau))
}

/// Convenience for reports: turns an error into an inconclusive verdict.
pub fn verdict_or_inconclusive(
    name: &str,
    method: Method,
    r: Result<HyperbolicityVerdict, HyperbolicityError>,
) -> HyperbolicityVerdict {
    r.unwrap_or_else(|e| {
        let mut v = HyperbolicityVerdict::new(name, method, Verdict::Inconclusive);
        v.detail = Some(e.to_string());
        v
    })
}

/// Verdict for a biquadratic factor: closed form when both split factors
/// pass the signature test.
pub fn biquadratic_verdict(
    name: &str,
    split: &BiquadraticSplit,
    tau: &[Q; 4],
    params: &Assignment,
) -> HyperbolicityVerdict {
    let checks = [&split.p1, &split.p2]
        .map(|p| hyperbolicity_quadratic(name, p, tau, params));
    let ok = checks.iter().all(|c| matches!(c, Ok(v) if v.is_hyperbolic()));
    let mut v = HyperbolicityVerdict::new(
        name,
        Method::BiquadraticClosedForm,
        if ok { Verdict::Hyperbolic } else { Verdict::NotHyperbolic },
    );
    v.detail = Some(format!("discriminant {}", split.discriminant));
    if !ok {
        v.witness = Some(
            checks
                .iter()
                .map(|c| match c {
                    Ok(v) => v.detail.clone().unwrap_or_default(),
                    Err(e) => e.to_string(),
                })
                .collect::<Vec<_>>()
                .join("; "),
        );
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;
    use crate::rational::{q, ratio};

    fn dt() -> [Q; 4] {
        [q(1), q(0), q(0), q(0)]
    }

    fn none() -> Assignment {
        Assignment::new()
    }

    #[test]
    fn linear_cases() {
        let v = hyperbolicity_linear("flow", &p("xi0"), &dt(), &none()).unwrap();
        assert!(v.is_hyperbolic());
        let v = hyperbolicity_linear("x", &p("xi1"), &dt(), &none()).unwrap();
        assert_eq!(v.verdict, Verdict::NotHyperbolic);
        assert!(v.witness.is_some());
        assert!(matches!(
            hyperbolicity_linear("x", &p("xi1^2"), &dt(), &none()),
            Err(HyperbolicityError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_cases() {
        let light = p("xi0^2 - xi1^2 - xi2^2 - xi3^2");
        assert!(hyperbolicity_quadratic("l", &light, &dt(), &none()).unwrap().is_hyperbolic());
        let v = hyperbolicity_quadratic("d", &p("xi0^2 + xi1^2"), &dt(), &none()).unwrap();
        assert_eq!(v.verdict, Verdict::NotHyperbolic);
        assert!(matches!(
            hyperbolicity_quadratic("s", &p("xi0^2 - xi1^2 - xi2^2"), &dt(), &none()),
            Err(HyperbolicityError::DegeneracyDetected(_))
        ));
        // spacelike tau
        let v = hyperbolicity_quadratic("l", &light, &[q(0), q(1), q(0), q(0)], &none()).unwrap();
        assert_eq!(v.verdict, Verdict::NotHyperbolic);
        // off-diagonal form: xi0*xi1 - xi2^2 - xi3^2 has signature (1, 3)
        let sig = signature(quadratic_form_matrix(&p("xi0*xi1 - xi2^2 - xi3^2")).iter().map(|r| r.to_vec()).collect());
        assert_eq!(sig, Signature { positive: 1, negative: 3, zero: 0 });
    }

    #[test]
    fn sampled_cases() {
        let cubic = p("xi0*(xi0^2 - xi1^2 - xi2^2 - xi3^2)");
        let v = hyperbolicity_sampled("c", &cubic, &dt(), &none(), 500, 1e-9, 0).unwrap();
        assert!(v.is_hyperbolic());
        assert_eq!(v.max_imag, Some(0.0));
        let v = hyperbolicity_sampled("e", &p("xi0^2 + xi1^2 + xi2^2 + xi3^2"), &dt(), &none(), 50, 1e-9, 0).unwrap();
        assert_eq!(v.verdict, Verdict::NotHyperbolic);
        assert!(v.witness.is_some());
        assert_eq!(
            hyperbolicity_sampled("z", &p("xi1^3"), &dt(), &none(), 5, 1e-9, 0),
            Err(HyperbolicityError::LeadingCoefficientVanishes)
        );
    }

    #[test]
    fn split_and_obstruction() {
        // (xi0^2 - xi1^2)(xi0^2 - 4 xi1^2) = xi0^4 - 5 xi0^2 xi1^2 + 4 xi1^4
        let s = biquadratic_split(&p("1"), &p("-5*xi1^2"), &p("4*xi1^4"), &none()).unwrap();
        assert_eq!(s.discriminant, p("9*xi1^4"));
        assert_eq!(s.p1, p("xi0^2 - 4*xi1^2"));
        assert_eq!(s.p2, p("xi0^2 - xi1^2"));
        assert!(matches!(
            biquadratic_split(&p("1"), &p("0"), &p("1"), &none()),
            Err(SplitError::NotPerfectSquare { .. })
        ));
        assert_eq!(
            biquadratic_split(&p("F - 1"), &p("0"), &p("1"), &[(Atom::param("F"), q(1))].into_iter().collect()),
            Err(SplitError::LeadingCoefficientZero)
        );
        // symbolic leading coefficient still splits
        let s = biquadratic_split(&p("F"), &p("-2*F*xi1^2"), &p("F*xi1^4"), &none()).unwrap();
        assert_eq!(s.p1, p("xi0^2 - xi1^2"));
        assert_eq!(s.factor_scale, p("F"));
    }

    #[test]
    fn gevrey_values() {
        assert_eq!(sigma_from_count(24).unwrap().to_string(), "24/23");
        assert_eq!(sigma_from_count(1).unwrap(), GevreyExponent::Sobolev);
        assert_eq!(sigma_from_count(2).unwrap(), GevreyExponent::Exact(q(2)));
        assert_eq!(sigma_from_count(3).unwrap(), GevreyExponent::Exact(ratio(3, 2)));
        let f = Factorization::new(p("1")).with("a", p("xi0"), 1);
        assert!(matches!(gevrey_sigma(&f, &[]), Err(GevreyError::NotAllHyperbolic(_))));
    }
}
