//! The biquadratic factor `P` derived from the vorticity-current block,
//! its split into two quadratics, and the closed-form reference product.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::Serialize;

use super::build::build_ens_system;
use super::state::FluidState;
use super::EnsError;
use crate::analysis::{
    biquadratic_split, build_symbol_matrix, build_symbol_matrix_with, det_poly, BiquadraticSplit,
    Factorization, SymbolMatrix,
};
use crate::poly::{Assignment, Atom, Poly};
use crate::rational::{q, Q};
use crate::system::LeraySystem;

/// `xi0^2 + gi11 xi1^2 + gi22 xi2^2 + gi33 xi3^2`: the light cone with the
/// symbolic-path bindings applied.
pub fn specialized_light() -> Poly {
    (1..4).fold(Poly::xi(0).pow(2), |acc, k| {
        &acc + &(&Poly::param(&format!("gi{k}{k}")) * &Poly::xi(k).pow(2))
    })
}

/// `u^a xi_a` with symbolic velocity.
pub fn symbolic_flow() -> Poly {
    (0..4).fold(Poly::zero(), |acc, k| &acc + &(&Poly::param(&format!("u{k}")) * &Poly::xi(k)))
}

fn f_atom() -> Poly {
    Poly::param("F")
}

fn f_plus_q() -> Poly {
    &Poly::param("F") + &Poly::param("q")
}

/// The known part of the vorticity-current block determinant,
/// `F^3 (F+q)^2 (u.xi)^6 (xi.xi)^2`.
pub fn block_cofactor(light: &Poly, flow: &Poly) -> Poly {
    Poly::product(vec![f_atom().pow(3), f_plus_q().pow(2), flow.pow(6), light.pow(2)])
}

/// Row and column indices of the vorticity-current block.
pub fn omega_current_indices(sys: &LeraySystem) -> (Vec<usize>, Vec<usize>) {
    let (eo, uo) = (sys.equation_offsets(), sys.unknown_offsets());
    let rows = (eo["vorticity"]..eo["vorticity"] + 6).chain(eo["current"]..eo["current"] + 4).collect();
    let cols = (uo["Omega"]..uo["Omega"] + 6).chain(uo["C"]..uo["C"] + 4).collect();
    (rows, cols)
}

pub fn omega_current_block(matrix: &SymbolMatrix, sys: &LeraySystem) -> SymbolMatrix {
    let (rows, cols) = omega_current_indices(sys);
    matrix.submatrix(&rows, &cols)
}

/// `P = A xi0^4 + B xi0^2 + C` extracted from the block determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct Biquadratic {
    pub block_det: Poly,
    pub p: Poly,
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub split: BiquadraticSplit,
}

fn derive() -> Result<Biquadratic, EnsError> {
    let sys = build_ens_system();
    let matrix = build_symbol_matrix(&sys).map_err(|e| EnsError::Derivation(e.to_string()))?;
    let block = omega_current_block(&matrix, &sys);
    let block_det = det_poly(block.entries);
    let known = block_cofactor(&specialized_light(), &symbolic_flow());
    let p = block_det
        .exact_div(&known)
        .map_err(|e| EnsError::Derivation(format!("block determinant / F^3 (F+q)^2 (u.xi)^6 (xi.xi)^2: {e}")))?;
    let x0 = Atom::xi(0);
    if p.degree_in_atom(x0) > 4 {
        return Err(EnsError::Derivation(format!("P has degree {} in xi0", p.degree_in_atom(x0))));
    }
    for odd in [1, 3] {
        if !p.coefficient_of(x0, odd).is_zero() {
            return Err(EnsError::Derivation(format!("P has an odd xi0^{odd} term")));
        }
    }
    let (a, b, c) = (p.coefficient_of(x0, 4), p.coefficient_of(x0, 2), p.coefficient_of(x0, 0));
    let split = biquadratic_split(&a, &b, &c, &Assignment::new()).map_err(EnsError::Split)?;
    Ok(Biquadratic { block_det, p, a, b, c, split })
}

/// Derived once per process.
pub fn derive_biquadratic() -> Result<&'static Biquadratic, EnsError> {
    static CELL: OnceLock<Result<Biquadratic, EnsError>> = OnceLock::new();
    CELL.get_or_init(derive).as_ref().map_err(Clone::clone)
}

/// Symbolic-path reference: `F^3 (F+q)^2 * A * light^14 flow^6
/// (flow light)^2 P1 P2` with the bindings `g^00 = 1`, `g^0i = 0`,
/// diagonal spatial inverse metric.
pub fn reference_factorization_symbolic() -> Result<Factorization, EnsError> {
    let bq = derive_biquadratic()?;
    let prefactor = (&(&f_atom().pow(3) * &f_plus_q().pow(2)) * &bq.split.factor_scale)
        .exact_div(&bq.split.poly_scale)
        .map_err(|e| EnsError::Derivation(e.to_string()))?;
    let (light, flow) = (specialized_light(), symbolic_flow());
    Ok(Factorization::new(prefactor)
        .with("light", light.clone(), 14)
        .with("flow", flow.clone(), 6)
        .with("flow_light", &flow * &light, 2)
        .with("P1", bq.split.p1.clone(), 1)
        .with("P2", bq.split.p2.clone(), 1))
}

/// Parameters of the diagonal frame at `state`: `gi_kk = d_k / d_0`.
fn frame_params(state: &FluidState, d: &[Q; 4]) -> Assignment {
    let mut env = Assignment::new();
    for k in 1..4 {
        env.insert(Atom::param(&format!("gi{k}{k}")), &d[k] / &d[0]);
    }
    env.insert(Atom::param("F"), state.f.clone());
    env.insert(Atom::param("q"), state.q.clone());
    env
}

/// Numeric split factors at `state`, as polynomials in `xi`: with
/// `g^-1 = M^T diag(d) M` the split is evaluated in the frame `xi' = M xi`
/// and pulled back; the density factor `d_0^2` goes to the prefactor.
pub fn split_at_state(state: &FluidState) -> Result<(Q, Poly, Poly), EnsError> {
    let bq = derive_biquadratic()?;
    let frame = state.frame().ok_or(EnsError::DegenerateFrame)?;
    let env = frame_params(state, &frame.d);
    let mut pieces = Vec::new();
    for p in [&bq.split.p1, &bq.split.p2, &bq.split.factor_scale, &bq.split.poly_scale] {
        let r = p.partial_eval(&env);
        if let Some(a) = r.atoms().into_iter().find(|a| !a.is_covector()) {
            return Err(EnsError::UnexpectedAtom(a.to_string()));
        }
        pieces.push(r);
    }
    let pull: HashMap<Atom, Poly> = (0..4)
        .map(|a| {
            let row = (0..4).fold(Poly::zero(), |acc, mu| &acc + &Poly::xi(mu).scale(&frame.m[a][mu]));
            (Atom::xi(a), row)
        })
        .collect();
    let const_of = |p: &Poly| p.constant_value().unwrap_or_else(Q::zero);
    let scale = const_of(&pieces[2]) / const_of(&pieces[3]) * &frame.d[0] * &frame.d[0];
    Ok((scale, pieces[0].substitute(&pull), pieces[1].substitute(&pull)))
}

/// Closed-form product at a numeric state; every factor is a polynomial in
/// `xi` only and the prefactor is a constant.
pub fn reference_product(state: &FluidState) -> Result<Factorization, EnsError> {
    let (scale, p1, p2) = split_at_state(state)?;
    let fq = &state.f + &state.q;
    let pre = &state.f * &state.f * &state.f * &fq * &fq * scale;
    let (light, flow) = (state.light(), state.flow());
    Ok(Factorization::new(Poly::constant(pre))
        .with("light", light.clone(), 14)
        .with("flow", flow.clone(), 6)
        .with("flow_light", &flow * &light, 2)
        .with("P1", p1, 1)
        .with("P2", p2, 1))
}

/// `P` at a numeric state.
pub fn p_at_state(state: &FluidState) -> Result<Poly, EnsError> {
    let (scale, p1, p2) = split_at_state(state)?;
    Ok((&p1 * &p2).scale(&scale))
}

fn xi_env(xi: &[Q; 4]) -> Assignment {
    (0..4).map(|k| (Atom::xi(k), xi[k].clone())).collect()
}

/// Evaluates `prefactor * prod factor^multiplicity` at `xi` without
/// expanding the product.
pub fn eval_factorization(f: &Factorization, xi: &[Q; 4], params: &Assignment) -> Result<Q, EnsError> {
    let mut env = params.clone();
    env.extend(xi_env(xi));
    let mut acc = f.prefactor.eval(&env).map_err(|e| EnsError::Derivation(e.to_string()))?;
    for factor in &f.factors {
        let v = factor.poly.eval(&env).map_err(|e| EnsError::Derivation(e.to_string()))?;
        for _ in 0..factor.multiplicity {
            acc *= &v;
        }
    }
    Ok(acc)
}

/// Number of times `factor` divides `p` exactly, and the cofactor left.
pub fn multiplicity_of(p: &Poly, factor: &Poly) -> (u32, Poly) {
    if p.is_zero() || factor.constant_value().is_some() {
        return (0, p.clone());
    }
    let mut rest = p.clone();
    let mut k = 0;
    while let Ok(next) = rest.exact_div(factor) {
        rest = next;
        k += 1;
    }
    (k, rest)
}

/// Exponent of `F + q` in the symbolic reference prefactor.
pub fn f_plus_q_exponent(prefactor: &Poly) -> u32 {
    multiplicity_of(prefactor, &f_plus_q()).0
}

/// The general symbol matrix (no bindings) of the ENS system.
pub fn general_symbol(sys: &LeraySystem) -> SymbolMatrix {
    build_symbol_matrix_with(sys, &HashMap::new()).expect("ENS symbol is square")
}

/// Coefficients as printed in the source text, transcribed literally with
/// `xi^i = gi_ii xi_i` (`g^00 = 1`, `g^0i = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedCoefficients {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub discriminant: Poly,
}

pub fn printed_coefficients() -> PrintedCoefficients {
    let lo = |k: usize| Poly::xi(k);
    let up = |k: usize| {
        if k == 0 {
            Poly::xi(0)
        } else {
            &Poly::param(&format!("gi{k}{k}")) * &Poly::xi(k)
        }
    };
    let (f, qq) = (f_atom(), Poly::param("q"));
    let t = |c: &Poly, k: i64, parts: &[Poly]| -> Poly {
        parts.iter().fold(c.scale(&q(k)), |acc, p| &acc * p)
    };
    let b = [
        t(&f, 2, &[lo(1), up(1)]),
        t(&qq, 2, &[lo(1), up(1)]),
        t(&f, 2, &[lo(2), up(2)]),
        t(&qq, 2, &[lo(2), up(2)]),
        t(&qq, 1, &[lo(3), up(2)]),
        t(&f, 2, &[lo(3), up(3)]),
        t(&qq, 1, &[lo(3), up(3)]),
    ]
    .into_iter()
    .fold(Poly::zero(), |acc, p| &acc + &p);
    let sq = |k: usize| (&lo(k) * &up(k)).pow(2);
    let c = [
        &f * &sq(1),
        &qq * &sq(1),
        t(&f, 2, &[lo(1), up(2), lo(2), up(2)]),
        t(&qq, 2, &[lo(1), up(2), lo(2), up(2)]),
        t(&qq, 1, &[lo(1), lo(3), up(1), up(2)]),
        &f * &sq(2),
        &qq * &sq(2),
        t(&qq, 1, &[lo(2), lo(3), lo(2), lo(2)]),
        t(&f, 2, &[lo(1), lo(3), up(1), up(3)]),
        t(&qq, 1, &[lo(1), lo(3), up(1), up(3)]),
        t(&f, 2, &[lo(2), lo(3), up(2), up(3)]),
        t(&qq, 1, &[lo(2), lo(3), up(2), up(3)]),
        t(&qq, 1, &[lo(3), lo(3), up(2), up(3)]),
        &f * &sq(3),
    ]
    .into_iter()
    .fold(Poly::zero(), |acc, p| &acc + &p);
    let discriminant = Poly::product(vec![qq.pow(2), lo(3).pow(2), (&up(2) - &up(3)).pow(2)]);
    PrintedCoefficients { a: f_plus_q(), b, c, discriminant }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminantReport {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    pub discriminant: String,
    pub perfect_square: bool,
    pub sqrt_discriminant: Option<String>,
    /// `B^2 - 4AC = q^2 xi3^2 R^2` with this `R`.
    pub square_factor: Option<String>,
    pub printed_a_matches: bool,
    pub printed_b_matches: bool,
    pub printed_c_matches: bool,
    /// Whether the printed coefficients satisfy the printed identity.
    pub printed_identity_holds: bool,
    pub printed_discriminant_matches_derived: bool,
    pub pass: bool,
}

/// Perfect-square check of `B^2 - 4AC` for the derived coefficients and
/// its `q^2 xi3^2 R^2` shape, with the printed coefficients compared.
pub fn discriminant_report(bq: &Biquadratic) -> DiscriminantReport {
    let four = q(4);
    let disc = &(&bq.b * &bq.b) - &(&bq.a * &bq.c).scale(&four);
    let root = disc.sqrt().ok();
    let shape = Poly::product(vec![Poly::param("q").pow(2), Poly::xi(3).pow(2)]);
    let square_factor = if disc.is_zero() {
        Some(Poly::zero())
    } else {
        disc.exact_div(&shape).ok().and_then(|r| r.sqrt().ok())
    };
    let printed = printed_coefficients();
    let printed_disc = &(&printed.b * &printed.b) - &(&printed.a * &printed.c).scale(&four);
    let pass = root.is_some() && square_factor.is_some();
    DiscriminantReport {
        a: bq.a.to_string(),
        b: bq.b.to_string(),
        c: bq.c.to_string(),
        discriminant: disc.to_string(),
        perfect_square: root.is_some(),
        sqrt_discriminant: root.map(|r| r.to_string()),
        square_factor: square_factor.map(|r| r.to_string()),
        printed_a_matches: printed.a == bq.a,
        printed_b_matches: printed.b == bq.b,
        printed_c_matches: printed.c == bq.c,
        printed_identity_holds: printed_disc == printed.discriminant,
        printed_discriminant_matches_derived: printed.discriminant == disc,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;
    use crate::rational::ratio;

    #[test]
    fn derived_p_is_scaled_square_of_light() {
        let bq = derive_biquadratic().unwrap();
        let light = specialized_light();
        assert_eq!(bq.p, &f_plus_q() * &light.pow(2));
        assert_eq!(bq.a, f_plus_q());
        assert_eq!(bq.split.factor_scale, f_plus_q());
        assert_eq!(bq.split.p1, light);
        assert_eq!(bq.split.p2, light);
    }

    #[test]
    fn reference_degree_and_rest_value() {
        let st = FluidState::minkowski_rest(q(1), ratio(1, 2));
        let f = reference_product(&st).unwrap();
        assert_eq!(f.total_degree(), 44);
        assert_eq!(f.factor_count(), 24);
        let tau = FluidState::tau();
        let v = eval_factorization(&f, &tau, &Assignment::new()).unwrap();
        assert_eq!(v, ratio(27, 8));
        let pv = p_at_state(&st).unwrap().eval(&xi_env(&tau)).unwrap();
        assert_eq!(pv, ratio(3, 2));
    }

    #[test]
    fn q_zero_light_power() {
        let st = FluidState::minkowski_rest(q(2), q(0));
        let f = reference_product(&st).unwrap();
        let light = st.light();
        let full = f.expand();
        let (k, rest) = multiplicity_of(&full, &light);
        // light^14, two from flow_light, two from P = F (xi.xi)^2
        assert_eq!(k, 18);
        assert_eq!(rest, (&f.prefactor * &st.flow().pow(8)));
        // P itself degenerates to F (xi.xi)^2
        assert_eq!(p_at_state(&st).unwrap(), light.pow(2).scale(&q(2)));
    }

    #[test]
    fn printed_coefficients_differ_from_derived() {
        let bq = derive_biquadratic().unwrap();
        let r = discriminant_report(bq);
        assert!(r.pass);
        assert!(r.perfect_square);
        assert_eq!(r.discriminant, "0");
        assert!(r.printed_a_matches);
        assert!(!r.printed_b_matches);
        // the derived B in the printed notation
        let gi = |k| format!("gi{k}{k}*xi{k}^2");
        let b = p(&format!("2*(F+q)*({} + {} + {})", gi(1), gi(2), gi(3)));
        assert_eq!(bq.b, b);
    }

    #[test]
    fn multiplicity_counts() {
        let l = p("xi0^2 - xi1^2");
        let (k, rest) = multiplicity_of(&(&l.pow(3) * &p("F*xi2")), &l);
        assert_eq!(k, 3);
        assert_eq!(rest, p("F*xi2"));
        assert_eq!(f_plus_q_exponent(&p("F^3*(F+q)^3")), 3);
    }
}
