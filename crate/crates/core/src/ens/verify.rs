//! End-to-end checks of the ENS characteristic determinant.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::build::build_ens_system;
use super::reference::{
    derive_biquadratic, discriminant_report, eval_factorization, f_plus_q_exponent,
    general_symbol, multiplicity_of, omega_current_indices, p_at_state, reference_factorization_symbolic,
    reference_product, specialized_light, Biquadratic, DiscriminantReport,
};
use super::state::{validate_state, FluidState, StiffToy};
use super::EnsError;
use crate::analysis::{
    block_determinants, build_symbol_matrix, cofactor_det_rational, det_poly,
    det_rational, gevrey_sigma, hyperbolicity_linear, hyperbolicity_quadratic, hyperbolicity_sampled,
    triangular_blocks, verdict_or_inconclusive, verify_factorization, verify_minkowski_inequalities,
    Check, Factorization, HyperbolicityVerdict, InequalityReport, Method, SymbolMatrix, VerifyReport,
};
use crate::analysis::hyper::biquadratic_verdict;
use crate::poly::{Assignment, Atom, Homogeneity, Poly};
use crate::rational::{fmt_q, q, random_q, ratio, Q};
use crate::system::{ConditionReport, LeraySystem};

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Random general states for the full 25x25 comparison.
    pub samples: usize,
    /// Random states for the vorticity-current block comparison.
    pub block_states: usize,
    /// Random metrics / velocities for the hyperbolicity suite.
    pub hyper_states: usize,
    /// Directions for sampled hyperbolicity.
    pub directions: usize,
    /// Directions per grid point for the Minkowski inequality.
    pub inequality_directions: usize,
    pub tol: f64,
    pub seed: u64,
    /// Point for the factor verdicts and the Gevrey exponent.
    pub f: Q,
    pub q: Q,
    /// Skips the symbolic expansion of the full determinant.
    pub skip_symbolic: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 20,
            block_states: 100,
            hyper_states: 100,
            directions: 1000,
            inequality_directions: 10_000,
            tol: 1e-9,
            seed: 0,
            f: q(1),
            q: ratio(1, 2),
            skip_symbolic: false,
        }
    }
}

/// `{1, 2, 10} x {1/10, 1/2, 3}`.
pub fn fq_grid() -> Vec<(Q, Q)> {
    let mut out = Vec::new();
    for f in [q(1), q(2), q(10)] {
        for qv in [ratio(1, 10), ratio(1, 2), q(3)] {
            out.push((f.clone(), qv));
        }
    }
    out
}

fn rng_for(seed: u64, stream: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos((i as u128) << 20);
    r
}

fn random_xi(rng: &mut ChaCha8Rng) -> [Q; 4] {
    loop {
        let xi: [Q; 4] = std::array::from_fn(|_| random_q(rng, -2.0, 2.0, 4));
        if xi.iter().any(|x| !x.is_zero()) {
            return xi;
        }
    }
}

fn fmt_vec(v: &[Q; 4]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

fn with_xi(env: &Assignment, xi: &[Q; 4]) -> Assignment {
    let mut e = env.clone();
    for (k, x) in xi.iter().enumerate() {
        e.insert(Atom::xi(k), x.clone());
    }
    e
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolicReport {
    pub determinant_terms: usize,
    pub degree: Option<u32>,
    pub block_sizes: Vec<usize>,
    pub prefactor: String,
    pub f_plus_q_exponent: u32,
    pub verify: VerifyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericMismatch {
    pub sample: usize,
    pub xi: String,
    pub determinant: String,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericReport {
    pub samples: usize,
    pub rest_example: NumericMismatch,
    pub rest_example_equal: bool,
    pub mismatches: Vec<NumericMismatch>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCheck {
    pub block: String,
    pub claim: String,
    pub expected_power: u32,
    pub found_power: u32,
    pub cofactor: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub block_sizes: Vec<usize>,
    pub blocks: Vec<BlockCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaCurrentReport {
    pub states: usize,
    pub elimination_mismatches: usize,
    pub oracle_mismatches: usize,
    pub first_witness: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRow {
    pub factor: String,
    pub closed_form: String,
    pub sampled: String,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicitySuite {
    pub light_passed: usize,
    pub flow_passed: usize,
    pub states: usize,
    pub grid: Vec<HyperbolicityVerdict>,
    pub directions: usize,
    pub tol: f64,
    pub disagreements: Vec<AgreementRow>,
    pub comparisons: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerationReport {
    pub p_at_q0: String,
    pub p_identity_holds: bool,
    pub discriminant_at_q0: String,
    pub prefactor_q0: String,
    pub factor_count: u32,
    pub factor_count_q0: u32,
    pub sigma0: Option<String>,
    pub sigma0_q0: Option<String>,
    pub determinant_matches_q0: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarthetaReport {
    /// Sign convention assumed by this check.
    pub convention: String,
    pub entries_with_vartheta: usize,
    pub all_linear: bool,
    pub all_off_diagonal_blocks: bool,
    pub determinant_independent: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSummary {
    pub state: String,
    pub factors: Vec<(String, u32, u32)>,
    pub factor_count: u32,
    pub total_degree: u32,
    pub verdicts: Vec<HyperbolicityVerdict>,
    pub sigma0: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsReport {
    pub system: String,
    pub total_order: i64,
    pub symbolic: Option<SymbolicReport>,
    pub numeric: NumericReport,
    pub blocks: BlockReport,
    pub omega_current: OmegaCurrentReport,
    pub discriminant: DiscriminantReport,
    pub inequalities: InequalityReport,
    pub hyperbolicity: HyperbolicitySuite,
    pub factorization: FactorSummary,
    pub leray_condition: ConditionReport,
    pub degeneration: DegenerationReport,
    pub vartheta: VarthetaReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Symbolic path: the full determinant under the bindings against the
/// closed-form product.
pub fn symbolic_check(sys: &LeraySystem) -> Result<SymbolicReport, EnsError> {
    let m = build_symbol_matrix(sys).map_err(|e| EnsError::Derivation(e.to_string()))?;
    let blocks = block_determinants(&m);
    let det = blocks.expand();
    let reference = reference_factorization_symbolic()?;
    let verify = verify_factorization(&det, &reference);
    Ok(SymbolicReport {
        determinant_terms: det.len(),
        degree: match det.xi_homogeneity() {
            Homogeneity::Degree(d) => Some(d),
            _ => None,
        },
        block_sizes: blocks.blocks.iter().map(|b| b.len()).collect(),
        prefactor: reference.prefactor.to_string(),
        f_plus_q_exponent: f_plus_q_exponent(&reference.prefactor),
        verify,
    })
}

fn numeric_compare(
    general: &SymbolMatrix,
    state: &FluidState,
    xi: &[Q; 4],
    sample: usize,
) -> Result<(bool, NumericMismatch), EnsError> {
    let env = with_xi(&state.assignment(&StiffToy), xi);
    let numeric = general.evaluate(&env).map_err(|e| EnsError::Derivation(e.to_string()))?;
    let det = det_rational(numeric);
    let reference = eval_factorization(&reference_product(state)?, xi, &Assignment::new())?;
    Ok((
        det == reference,
        NumericMismatch {
            sample,
            xi: fmt_vec(xi),
            determinant: fmt_q(&det),
            reference: fmt_q(&reference),
        },
    ))
}

/// Numeric path: exact 25x25 determinants at random general states.
pub fn numeric_check(sys: &LeraySystem, samples: usize, seed: u64) -> Result<NumericReport, EnsError> {
    let general = general_symbol(sys);
    let rest = FluidState::minkowski_rest(q(1), ratio(1, 2));
    let (rest_equal, rest_example) = numeric_compare(&general, &rest, &[q(2), q(1), q(1), q(1)], 0)?;
    let results: Vec<Result<(bool, NumericMismatch), EnsError>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 1, i);
            let st = FluidState::random(&mut rng);
            let xi = random_xi(&mut rng);
            numeric_compare(&general, &st, &xi, i)
        })
        .collect();
    let mut mismatches = Vec::new();
    for r in results {
        let (ok, row) = r?;
        if !ok {
            mismatches.push(row);
        }
    }
    let pass = rest_equal && mismatches.is_empty();
    Ok(NumericReport {
        samples,
        rest_example,
        rest_example_equal: rest_equal,
        mismatches,
        pass,
    })
}

/// The triangular block structure of the general symbol and the three
/// simple diagonal blocks, each checked by repeated exact division.
pub fn block_check(sys: &LeraySystem) -> BlockReport {
    let general = general_symbol(sys);
    let sizes: Vec<usize> = triangular_blocks(&general).iter().map(|b| b.len()).collect();
    let (eo, uo) = (sys.equation_offsets(), sys.unknown_offsets());
    let light = general.get(eo["metric"], uo["g"]).clone();
    let flow = (0..4).fold(Poly::zero(), |acc, k| {
        &acc + &(&Poly::param(&format!("u{k}")) * &Poly::xi(k))
    });
    let diag = |eq: &str, unk: &str, n: usize| {
        let rows: Vec<usize> = (eo[eq]..eo[eq] + n).collect();
        let cols: Vec<usize> = (uo[unk]..uo[unk] + n).collect();
        det_poly(general.submatrix(&rows, &cols).entries)
    };
    let check = |name: &str, claim: &str, det: Poly, factor: &Poly, power: u32| {
        let (found, rest) = multiplicity_of(&det, factor);
        BlockCheck {
            block: name.into(),
            claim: claim.into(),
            expected_power: power,
            found_power: found,
            cofactor: rest.to_string(),
            pass: found == power && rest == Poly::one(),
        }
    };
    let blocks = vec![
        check("metric-g", "(xi.xi)^10", diag("metric", "g", 10), &light, 10),
        check("entropy-s", "(u.xi)^2", diag("entropy", "s", 1), &flow, 2),
        check("velocity-u", "(xi.xi)^4", diag("velocity", "u", 4), &light, 4),
    ];
    // every index outside the vorticity-current block is its own component
    let mut sorted = sizes.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut expected = vec![10];
    expected.extend(std::iter::repeat_n(1, 15));
    let pass = blocks.iter().all(|b| b.pass) && sorted == expected;
    BlockReport {
        block_sizes: sizes,
        blocks,
        pass,
    }
}

/// The vorticity-current block at random general states: elimination and
/// cofactor expansion against `F^3 (F+q)^2 (u.xi)^6 (xi.xi)^2 P`.
pub fn omega_current_check(sys: &LeraySystem, states: usize, seed: u64) -> Result<OmegaCurrentReport, EnsError> {
    let general = general_symbol(sys);
    let (rows, cols) = omega_current_indices(sys);
    let block = general.submatrix(&rows, &cols);
    let results: Vec<Result<(bool, bool, String), EnsError>> = (0..states)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 2, i);
            let st = FluidState::random(&mut rng);
            let xi = random_xi(&mut rng);
            let env = with_xi(&st.principal_assignment(), &xi);
            let numeric = block.evaluate(&env).map_err(|e| EnsError::Derivation(e.to_string()))?;
            let elim = det_rational(numeric.clone());
            let oracle = cofactor_det_rational(&numeric);
            let xenv = with_xi(&Assignment::new(), &xi);
            let at = |p: &Poly| p.eval(&xenv).map_err(|e| EnsError::Derivation(e.to_string()));
            let fq = &st.f + &st.q;
            let known = &st.f * &st.f * &st.f * &fq * &fq * at(&st.flow())?.pow(6) * at(&st.light())?.pow(2);
            let p = at(&p_at_state(&st)?)?;
            let formula = known * p;
            Ok((
                elim == formula,
                oracle == formula,
                format!("state {i}, xi {}: formula {}, cofactor {}", fmt_vec(&xi), fmt_q(&formula), fmt_q(&oracle)),
            ))
        })
        .collect();
    let (mut e_bad, mut o_bad, mut first) = (0, 0, None);
    for r in results {
        let (e, o, w) = r?;
        if !e {
            e_bad += 1;
        }
        if !o {
            o_bad += 1;
            first.get_or_insert(w);
        }
    }
    Ok(OmegaCurrentReport {
        states,
        elimination_mismatches: e_bad,
        oracle_mismatches: o_bad,
        first_witness: first,
        pass: states >= 1 && e_bad == 0 && o_bad == 0,
    })
}

fn verdict_name(v: &HyperbolicityVerdict) -> String {
    serde_json::to_value(v.verdict).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default()
}

/// Closed-form verdicts for the light cone at random metrics, the flow
/// factor at random velocities and the split factors on the `(F, q)` grid,
/// each cross-checked by the sampled screen.
pub fn hyperbolicity_suite(
    states: usize,
    directions: usize,
    tol: f64,
    seed: u64,
) -> Result<HyperbolicitySuite, EnsError> {
    let tau = FluidState::tau();
    let none = Assignment::new();
    let sampled = |name: &str, p: &Poly| {
        verdict_or_inconclusive(name, Method::Sampled, hyperbolicity_sampled(name, p, &tau, &none, directions, tol, seed))
    };
    let mut closed: Vec<(HyperbolicityVerdict, Poly)> = Vec::new();
    let (mut light_ok, mut flow_ok) = (0, 0);
    for i in 0..states {
        let mut rng = rng_for(seed, 3, i);
        let st = FluidState::random(&mut rng);
        let light = st.light();
        let flow = st.flow();
        let l = verdict_or_inconclusive("light", Method::QuadraticSignature, hyperbolicity_quadratic("light", &light, &tau, &none));
        let f = verdict_or_inconclusive("flow", Method::LinearExact, hyperbolicity_linear("flow", &flow, &tau, &none));
        light_ok += l.is_hyperbolic() as usize;
        flow_ok += f.is_hyperbolic() as usize;
        closed.push((l, light));
        closed.push((f, flow));
    }
    let bq = derive_biquadratic()?;
    let mut grid = Vec::new();
    for (f, qv) in fq_grid() {
        let st = FluidState::minkowski_rest(f, qv);
        let (_, p1, p2) = super::reference::split_at_state(&st)?;
        for (name, p) in [("P1", p1), ("P2", p2)] {
            let v = verdict_or_inconclusive(name, Method::QuadraticSignature, hyperbolicity_quadratic(name, &p, &tau, &none));
            grid.push(v.clone());
            closed.push((v, p));
        }
        let env = minkowski_params(&st);
        let v = biquadratic_verdict("P", &bq.split, &tau, &env);
        grid.push(v.clone());
        closed.push((v, (&bq.p).partial_eval(&env)));
    }
    let rows: Vec<AgreementRow> = closed
        .par_iter()
        .map(|(v, p)| {
            let s = sampled(&v.factor, p);
            AgreementRow {
                factor: v.factor.clone(),
                closed_form: verdict_name(v),
                sampled: verdict_name(&s),
                agree: v.verdict == s.verdict,
            }
        })
        .collect();
    let comparisons = rows.len();
    let disagreements: Vec<AgreementRow> = rows.into_iter().filter(|r| !r.agree).collect();
    let pass = light_ok == states
        && flow_ok == states
        && grid.iter().all(|v| v.is_hyperbolic())
        && disagreements.is_empty();
    Ok(HyperbolicitySuite {
        light_passed: light_ok,
        flow_passed: flow_ok,
        states,
        grid,
        directions,
        tol,
        disagreements,
        comparisons,
        pass,
    })
}

/// Symbolic-path atoms at a Minkowski rest state.
fn minkowski_params(st: &FluidState) -> Assignment {
    let mut env = Assignment::new();
    for k in 1..4 {
        env.insert(Atom::param(&format!("gi{k}{k}")), st.g_up[k][k].clone());
        env.insert(Atom::param(&format!("u{k}")), st.u_up[k].clone());
    }
    env.insert(Atom::param("u0"), st.u_up[0].clone());
    env.insert(Atom::param("F"), st.f.clone());
    env.insert(Atom::param("q"), st.q.clone());
    env
}

/// Factor list and verdicts of the reference product at `state`.
pub fn factor_summary(state: &FluidState, directions: usize, tol: f64, seed: u64) -> Result<(Factorization, FactorSummary), EnsError> {
    let f = reference_product(state)?;
    let tau = FluidState::tau();
    let none = Assignment::new();
    let mut verdicts = Vec::new();
    for factor in &f.factors {
        let (name, p) = (factor.name.as_str(), &factor.poly);
        let primary = match p.xi_degree() {
            1 => verdict_or_inconclusive(name, Method::LinearExact, hyperbolicity_linear(name, p, &tau, &none)),
            2 => verdict_or_inconclusive(name, Method::QuadraticSignature, hyperbolicity_quadratic(name, p, &tau, &none)),
            _ => verdict_or_inconclusive(name, Method::Sampled, hyperbolicity_sampled(name, p, &tau, &none, directions, tol, seed)),
        };
        let exact = primary.method != Method::Sampled;
        verdicts.push(primary);
        if exact {
            verdicts.push(verdict_or_inconclusive(
                name,
                Method::Sampled,
                hyperbolicity_sampled(name, p, &tau, &none, directions, tol, seed),
            ));
        }
    }
    let sigma = gevrey_sigma(&f, &verdicts).ok().map(|s| s.to_string());
    let summary = FactorSummary {
        state: format!("Minkowski rest, F = {}, q = {}", fmt_q(&state.f), fmt_q(&state.q)),
        factors: f.factors.iter().map(|x| (x.name.clone(), x.multiplicity, x.poly.xi_degree())).collect(),
        factor_count: f.factor_count(),
        total_degree: f.total_degree(),
        verdicts,
        sigma0: sigma,
    };
    Ok((f, summary))
}

/// `q = 0`: the derived `P` against `F (xi.xi)^2` at Minkowski, and the
/// factor list recomputed there.
pub fn degeneration_check(
    sys: &LeraySystem,
    bq: &Biquadratic,
    f: &Q,
    directions: usize,
    tol: f64,
    seed: u64,
) -> Result<DegenerationReport, EnsError> {
    let st = FluidState::minkowski_rest(f.clone(), q(0));
    let mut env = minkowski_params(&st);
    env.remove(&Atom::param("F"));
    let p0 = bq.p.partial_eval(&env);
    let light = specialized_light().partial_eval(&env);
    let p_identity_holds = p0 == &Poly::param("F") * &light.pow(2);
    let disc = &(&bq.b * &bq.b) - &(&bq.a * &bq.c).scale(&q(4));
    let disc0 = disc.partial_eval(&[(Atom::param("q"), Q::zero())].into_iter().collect());
    let (_, base) = factor_summary(&st.clone().with_q(ratio(1, 2)), directions, tol, seed)?;
    let (fac0, sum0) = factor_summary(&st, directions, tol, seed)?;
    let general = general_symbol(sys);
    let mut matches = true;
    let mut rng = rng_for(seed, 4, 0);
    for _ in 0..3 {
        let xi = random_xi(&mut rng);
        let numeric = general
            .evaluate(&with_xi(&st.assignment(&StiffToy), &xi))
            .map_err(|e| EnsError::Derivation(e.to_string()))?;
        matches &= det_rational(numeric) == eval_factorization(&fac0, &xi, &Assignment::new())?;
    }
    let pass = p_identity_holds && matches && disc0.is_zero();
    Ok(DegenerationReport {
        p_at_q0: p0.to_string(),
        p_identity_holds,
        discriminant_at_q0: disc0.to_string(),
        prefactor_q0: fac0.prefactor.to_string(),
        factor_count: base.factor_count,
        factor_count_q0: sum0.factor_count,
        sigma0: base.sigma0,
        sigma0_q0: sum0.sigma0,
        determinant_matches_q0: matches,
        pass,
    })
}

/// `vartheta` enters linearly, only in blocks off the diagonal of the
/// triangular structure, so the determinant does not see it.
pub fn vartheta_check(sys: &LeraySystem, seed: u64) -> Result<VarthetaReport, EnsError> {
    let general = general_symbol(sys);
    let th = Atom::param("vartheta");
    let blocks = triangular_blocks(&general);
    let block_of = |i: usize| blocks.iter().position(|b| b.contains(&i));
    let (mut n, mut linear, mut off_diag) = (0, true, true);
    for r in 0..general.dim() {
        for c in 0..general.dim() {
            let e = general.get(r, c);
            let d = e.degree_in_atom(th);
            if d == 0 {
                continue;
            }
            n += 1;
            linear &= d == 1 && e.coefficient_of(th, 0).is_zero();
            off_diag &= block_of(r) != block_of(c);
        }
    }
    let mut rng = rng_for(seed, 5, 0);
    let st = FluidState::random(&mut rng);
    let xi = random_xi(&mut rng);
    let dets: Vec<Q> = [q(-1), q(3), ratio(-2, 7)]
        .into_iter()
        .map(|v| {
            let env = with_xi(&st.clone().with_vartheta(v).assignment(&StiffToy), &xi);
            general.evaluate(&env).map(det_rational).map_err(|e| EnsError::Derivation(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let independent = dets.windows(2).all(|w| w[0] == w[1]);
    Ok(VarthetaReport {
        convention: "any nonzero vartheta".into(),
        entries_with_vartheta: n,
        all_linear: linear,
        all_off_diagonal_blocks: off_diag,
        determinant_independent: independent,
        pass: n > 0 && linear && off_diag && independent,
    })
}

/// Runs every ENS check.
pub fn verify_ens(cfg: &VerifyConfig) -> Result<EnsReport, EnsError> {
    let sys = build_ens_system();
    let bq = derive_biquadratic()?;
    let symbolic = if cfg.skip_symbolic { None } else { Some(symbolic_check(&sys)?) };
    let numeric = numeric_check(&sys, cfg.samples, cfg.seed)?;
    let blocks = block_check(&sys);
    let omega_current = omega_current_check(&sys, cfg.block_states, cfg.seed)?;
    let discriminant = discriminant_report(bq);
    let mut metric = Assignment::new();
    for k in 1..4 {
        metric.insert(Atom::param(&format!("gi{k}{k}")), q(-1));
    }
    let inequalities =
        verify_minkowski_inequalities(&bq.a, &bq.b, &bq.c, &metric, &fq_grid(), cfg.inequality_directions, cfg.seed);
    let hyperbolicity = hyperbolicity_suite(cfg.hyper_states, cfg.directions, cfg.tol, cfg.seed)?;
    let point = FluidState::minkowski_rest(cfg.f.clone(), cfg.q.clone());
    let (fac, factorization) = factor_summary(&point, cfg.directions, cfg.tol, cfg.seed)?;
    let leray_condition = sys.leray_condition(&fac.degrees());
    let degeneration = degeneration_check(&sys, bq, &cfg.f, cfg.directions, cfg.tol, cfg.seed)?;
    let vartheta = vartheta_check(&sys, cfg.seed)?;
    let state_report = validate_state(&point, &StiffToy);

    let mut checks = vec![Check::new("structure", sys.validate_structure().pass, format!("total order {}", sys.total_order()))];
    if let Some(s) = &symbolic {
        checks.push(Check::new(
            "determinant-degree",
            s.degree == Some(sys.total_order() as u32),
            format!("degree {:?}, total order {}", s.degree, sys.total_order()),
        ));
        checks.push(Check::new(
            "symbolic-factorization",
            s.verify.pass,
            format!("{} terms; prefactor {}; F+q exponent {}", s.determinant_terms, s.prefactor, s.f_plus_q_exponent),
        ));
    }
    checks.push(Check::new(
        "numeric-factorization",
        numeric.pass,
        format!("{} general states plus the rest example, {} mismatches", numeric.samples, numeric.mismatches.len()),
    ));
    checks.push(Check::new("block-determinants", blocks.pass, format!("blocks {:?}", blocks.block_sizes)));
    checks.push(Check::new(
        "vorticity-current-block",
        omega_current.pass,
        format!("{} states, {} oracle mismatches", omega_current.states, omega_current.oracle_mismatches),
    ));
    checks.push(Check::new(
        "discriminant",
        discriminant.pass,
        format!(
            "B^2 - 4AC = {}; printed B matches: {}, printed C matches: {}",
            discriminant.discriminant, discriminant.printed_b_matches, discriminant.printed_c_matches
        ),
    ));
    checks.push(Check::new("minkowski-inequalities", inequalities.pass, inequalities.derived_expression.clone()));
    checks.push(Check::new(
        "hyperbolicity-suite",
        hyperbolicity.pass,
        format!(
            "light {}/{}, flow {}/{}, {} disagreements in {} comparisons",
            hyperbolicity.light_passed,
            hyperbolicity.states,
            hyperbolicity.flow_passed,
            hyperbolicity.states,
            hyperbolicity.disagreements.len(),
            hyperbolicity.comparisons
        ),
    ));
    checks.push(Check::new(
        "gevrey-exponent",
        factorization.sigma0.is_some(),
        format!("{} factors, sigma0 = {}", factorization.factor_count, factorization.sigma0.clone().unwrap_or_else(|| "none".into())),
    ));
    checks.push(Check::new("leray-condition", leray_condition.pass, leray_condition.statement.clone()));
    checks.push(Check::new(
        "q-zero-degeneration",
        degeneration.pass,
        format!("P at q = 0: {}", degeneration.p_at_q0),
    ));
    checks.push(Check::new("vartheta-scaling", vartheta.pass, format!("{} entries", vartheta.entries_with_vartheta)));
    checks.push(Check::new("state", state_report.pass, format!("eos {}", state_report.eos)));
    let pass = checks.iter().all(|c| c.pass);
    Ok(EnsReport {
        system: sys.name.clone(),
        total_order: sys.total_order(),
        symbolic,
        numeric,
        blocks,
        omega_current,
        discriminant,
        inequalities,
        hyperbolicity,
        factorization,
        leray_condition,
        degeneration,
        vartheta,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_of_general_symbol() {
        let r = block_check(&build_ens_system());
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn numeric_path_small() {
        let r = numeric_check(&build_ens_system(), 2, 11).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn omega_current_small() {
        let r = omega_current_check(&build_ens_system(), 5, 3).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn vartheta_does_not_reach_the_determinant() {
        let r = vartheta_check(&build_ens_system(), 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.entries_with_vartheta, 10 * 4 + 4);
    }

    #[test]
    fn degeneration_at_q_zero() {
        let bq = derive_biquadratic().unwrap();
        let r = degeneration_check(&build_ens_system(), bq, &q(1), 100, 1e-9, 0).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.prefactor_q0, "1");
    }

    #[test]
    fn factor_summary_at_rest() {
        let (_, s) = factor_summary(&FluidState::minkowski_rest(q(1), ratio(1, 2)), 200, 1e-9, 0).unwrap();
        assert_eq!(s.factor_count, 24);
        assert_eq!(s.total_degree, 44);
        assert_eq!(s.sigma0.as_deref(), Some("24/23"));
    }
}
