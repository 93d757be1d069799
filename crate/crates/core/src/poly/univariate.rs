//! Dense univariate polynomials over the rationals, used to study the
//! restriction `s -> p(eta + s*tau)` of a homogeneous symbol to a line.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Assignment, Atom, Homogeneity, Poly, PolyError};
use crate::rational::{to_f64, Q};

/// Coefficients in ascending order, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Q>);

/// A root with multiplicity, as found in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    /// Restricts a covector polynomial to the line `eta + s*tau`.
    /// All non-covector atoms must already be evaluated away.
    pub fn along_line(p: &Poly, eta: &[Q; 4], tau: &[Q; 4]) -> Result<UniPoly, PolyError> {
        if let Homogeneity::Degree(d) = p.xi_homogeneity() {
            if p.atoms().iter().all(|a| a.is_covector()) {
                return Ok(Self::along_line_homogeneous(p, eta, tau, d as usize));
            }
        }
        Self::along_line_generic(p, eta, tau)
    }

    fn along_line_generic(p: &Poly, eta: &[Q; 4], tau: &[Q; 4]) -> Result<UniPoly, PolyError> {
        let line: [UniPoly; 4] =
            std::array::from_fn(|k| UniPoly::new(vec![eta[k].clone(), tau[k].clone()]));
        let mut acc = UniPoly::new(vec![]);
        for (m, c) in p.terms() {
            let mut t = UniPoly::new(vec![c.clone()]);
            for &(a, e) in m.pairs() {
                if !a.is_covector() {
                    return Err(PolyError::MissingAtom(a.to_string()));
                }
                for _ in 0..e {
                    t = t.mul(&line[a.0 as usize]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Integer version for a homogeneous `p` of degree `d`: with
    /// `eta = e / De`, `tau = t / Dt` and `s = x Dt / De`,
    /// `p(eta + s tau) = De^-d p(e + x t)`.
    fn along_line_homogeneous(p: &Poly, eta: &[Q; 4], tau: &[Q; 4], d: usize) -> UniPoly {
        let lcm = |v: &mut dyn Iterator<Item = &Q>| v.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let de = lcm(&mut eta.iter());
        let dt = lcm(&mut tau.iter());
        let dp = lcm(&mut p.terms().iter().map(|(_, c)| c));
        let int = |x: &Q, scale: &BigInt| (x * Q::from_integer(scale.clone())).to_integer();
        let line: [Vec<BigInt>; 4] = std::array::from_fn(|k| vec![int(&eta[k], &de), int(&tau[k], &dt)]);
        let mul = |a: &[BigInt], b: &[BigInt]| {
            let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let mut powers: [Vec<Vec<BigInt>>; 4] = std::array::from_fn(|_| vec![vec![BigInt::one()]]);
        let mut acc = vec![BigInt::zero(); d + 1];
        for (m, c) in p.terms() {
            let mut t = vec![int(c, &dp)];
            for &(a, e) in m.pairs() {
                let k = a.0 as usize;
                while powers[k].len() <= e as usize {
                    let next = mul(powers[k].last().unwrap(), &line[k]);
                    powers[k].push(next);
                }
                t = mul(&t, &powers[k][e as usize]);
            }
            for (i, x) in t.into_iter().enumerate() {
                acc[i] += x;
            }
        }
        let base = Q::from_integer(de.pow(d as u32) * &dp);
        let step = Q::new(de, dt);
        let mut scale = Q::one() / base;
        let mut out = Vec::with_capacity(d + 1);
        for x in acc {
            out.push(Q::from_integer(x) * &scale);
            scale = scale * &step;
        }
        UniPoly::new(out)
    }

    /// Same as [`UniPoly::along_line`] after substituting parameter values.
    pub fn along_line_at(
        p: &Poly,
        params: &Assignment,
        eta: &[Q; 4],
        tau: &[Q; 4],
    ) -> Result<UniPoly, PolyError> {
        UniPoly::along_line(&p.partial_eval(params), eta, tau)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.0.len().max(other.0.len());
        let z = Q::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(vec![]);
        }
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer((i as i64).into()))
                .collect(),
        )
    }

    pub fn monic(&self) -> UniPoly {
        let l = self.lead();
        if l.is_zero() {
            return self.clone();
        }
        UniPoly::new(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, den: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let mut rem = self.0.clone();
        let dd = den.degree();
        let dl = den.lead();
        if rem.len() < den.0.len() {
            return (UniPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &dl;
            if !c.is_zero() {
                for (j, d) in den.0.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: `self = lead * prod_i a_i^i` with squarefree,
    /// pairwise coprime `a_i`. Returns `(a_i, i)` for non-constant `a_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.add(&b.derivative().scale(&-Q::one()));
        let mut i = 1;
        while b.degree() > 0 {
            a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.add(&b.derivative().scale(&-Q::one()));
            i += 1;
        }
        out
    }

    pub fn scale(&self, k: &Q) -> UniPoly {
        UniPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, s: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * s + c)
    }

    /// All complex roots with multiplicity. Multiplicities come from the
    /// exact squarefree decomposition; each squarefree part is solved as
    /// the eigenvalues of its companion matrix.
    pub fn roots(&self) -> Vec<Root> {
        if self.degree() <= 2 {
            return self.low_degree_roots();
        }
        let mut out = Vec::new();
        for (part, mult) in self.squarefree_decomposition() {
            for (re, im) in companion_eigenvalues(&part) {
                out.push(Root {
                    re,
                    im,
                    multiplicity: mult,
                });
            }
        }
        out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        out
    }

    /// Degrees 1 and 2 in closed form; the sign of the discriminant is exact.
    fn low_degree_roots(&self) -> Vec<Root> {
        let root = |re: f64, im: f64, multiplicity| Root { re, im, multiplicity };
        match self.0.len() {
            0 | 1 => vec![],
            2 => vec![root(-to_f64(&(&self.0[0] / &self.0[1])), 0.0, 1)],
            _ => {
                let (c, b, a) = (&self.0[0], &self.0[1], &self.0[2]);
                let disc = b * b - Q::from_integer(4.into()) * a * c;
                let center = -to_f64(&(b / (a * Q::from_integer(2.into()))));
                if disc.is_zero() {
                    return vec![root(center, 0.0, 2)];
                }
                let half = to_f64(&(disc.abs() / (a * a * Q::from_integer(4.into())))).sqrt();
                if disc.is_negative() {
                    return vec![root(center, -half, 1), root(center, half, 1)];
                }
                // avoid cancellation in the smaller root
                let (fa, fb, fc) = (to_f64(a), to_f64(b), to_f64(c));
                let qv = -0.5 * (fb + fb.signum() * half * 2.0 * fa.abs());
                let (r1, r2) = if fb == 0.0 { (center - half, center + half) } else { (qv / fa, fc / qv) };
                let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                vec![root(lo, 0.0, 1), root(hi, 0.0, 1)]
            }
        }
    }

    /// Number of distinct real roots, exactly, via a Sturm sequence.
    pub fn distinct_real_roots(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let f = self.squarefree_decomposition().into_iter().fold(
            UniPoly::new(vec![Q::one()]),
            |acc, (a, _)| acc.mul(&a),
        );
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Q::one()));
        }
        // sign changes at -inf and +inf
        let sign_changes = |at_pos_inf: bool| {
            let signs: Vec<i32> = seq
                .iter()
                .filter(|p| !p.is_zero())
                .map(|p| {
                    let s = if p.lead() > Q::zero() { 1 } else { -1 };
                    if !at_pos_inf && p.degree() % 2 == 1 {
                        -s
                    } else {
                        s
                    }
                })
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        sign_changes(false) - sign_changes(true)
    }
}

fn companion_eigenvalues(p: &UniPoly) -> Vec<(f64, f64)> {
    let m = p.monic();
    let n = m.degree();
    match n {
        0 => vec![],
        1 => vec![(-to_f64(&m.0[0]), 0.0)],
        _ => {
            let mut c = DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                c[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                c[(i, n - 1)] = -to_f64(&m.0[i]);
            }
            c.complex_eigenvalues()
                .iter()
                .map(|z| (z.re, z.im))
                .collect()
        }
    }
}

/// Unused-atom guard for callers that build lines from a subset of atoms.
pub fn covector_only(p: &Poly) -> bool {
    p.atoms().iter().all(|a: &Atom| a.is_covector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;
    use crate::rational::{q, ratio};

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn line_restriction() {
        let eta = [q(0), q(1), q(0), q(0)];
        let tau = [q(1), q(0), q(0), q(0)];
        // s^2 - 1
        let u = UniPoly::along_line(&p("xi0^2 - xi1^2 - xi2^2"), &eta, &tau).unwrap();
        assert_eq!(u, up(&[-1, 0, 1]));
    }

    #[test]
    fn squarefree_parts() {
        // (s-1)^2 (s+2)^3 s
        let f = up(&[-1, 1]).mul(&up(&[-1, 1])).mul(&up(&[2, 1]).mul(&up(&[2, 1])).mul(&up(&[2, 1]))).mul(&up(&[0, 1]));
        let parts = f.squarefree_decomposition();
        assert_eq!(parts, vec![(up(&[0, 1]), 1), (up(&[-1, 1]), 2), (up(&[2, 1]), 3)]);
        let roots = f.roots();
        assert_eq!(roots.len(), 3);
        assert!((roots[0].re + 2.0).abs() < 1e-12 && roots[0].multiplicity == 3);
        assert_eq!(f.distinct_real_roots(), 3);
    }

    #[test]
    fn double_roots_stay_real() {
        // (s^2 - 1)^2: naive companion eigenvalues would split off the axis
        let f = up(&[-1, 0, 1]).mul(&up(&[-1, 0, 1]));
        for r in f.roots() {
            assert_eq!(r.im, 0.0);
            assert_eq!(r.multiplicity, 2);
        }
    }

    #[test]
    fn integer_restriction_matches_generic() {
        let polys = [
            p("3/7*xi0^2 - 5/3*xi1^2 + 2/9*xi0*xi3 - xi2^2"),
            p("(xi0 - 1/2*xi1)*(2/5*xi0^2 - xi2^2 - 3*xi3^2)"),
            p("xi1 + 4/3*xi2"),
        ];
        let etas = [[ratio(1, 3), ratio(-2, 5), ratio(7, 11), q(0)], [q(0), q(1), ratio(-1, 16), ratio(3, 2)]];
        let taus = [[q(1), q(0), q(0), q(0)], [ratio(2, 3), ratio(1, 7), q(0), ratio(-1, 2)]];
        for poly in &polys {
            for eta in &etas {
                for tau in &taus {
                    assert_eq!(
                        UniPoly::along_line(poly, eta, tau).unwrap(),
                        UniPoly::along_line_generic(poly, eta, tau).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_roots_closed_form() {
        let r = UniPoly::new(vec![q(-6), q(1), q(1)]).roots();
        assert_eq!((r[0].re, r[1].re), (-3.0, 2.0));
        let r = UniPoly::new(vec![q(1), q(2), q(1)]).roots();
        assert_eq!(r, vec![Root { re: -1.0, im: 0.0, multiplicity: 2 }]);
        let r = UniPoly::new(vec![q(5), q(2), q(1)]).roots();
        assert_eq!((r[0].re, r[0].im.abs()), (-1.0, 2.0));
        let r = UniPoly::new(vec![q(0), ratio(1, 3)]).roots();
        assert_eq!(r[0].re, 0.0);
    }

    #[test]
    fn complex_pair() {
        let f = up(&[1, 0, 1]);
        let roots = f.roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].im.abs() - 1.0).abs() < 1e-12);
        assert_eq!(f.distinct_real_roots(), 0);
        assert_eq!(UniPoly::new(vec![ratio(1, 2), q(1)]).eval(&q(2)), ratio(5, 2));
    }
}
