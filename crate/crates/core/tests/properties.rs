use std::collections::HashMap;

use proptest::prelude::*;

use lops_core::analysis::{bareiss, cofactor_det_poly, cofactor_det_rational, det_poly, det_rational};
use lops_core::ens::build_ens_system;
use lops_core::lab::{ratio_in_band, run_lab, LabConfig, RowKind};
use lops_core::poly::{Assignment, Atom, Poly};
use lops_core::rational::{fmt_q, parse_q, ratio, Q};

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

/// Polynomials in `xi0..xi2` and `F` with up to four terms of degree <= 2
/// per atom.
fn small_poly() -> impl Strategy<Value = Poly> {
    let term = (small_q(), 0u32..=2, 0u32..=2, 0u32..=1, 0u32..=1);
    prop::collection::vec(term, 0..4).prop_map(|terms| {
        terms.into_iter().fold(Poly::zero(), |acc, (c, a, b, e, f)| {
            let m = &(&Poly::xi(0).pow(a) * &Poly::xi(1).pow(b)) * &(&Poly::xi(2).pow(e) * &Poly::param("F").pow(f));
            &acc + &m.scale(&c)
        })
    })
}

fn point() -> impl Strategy<Value = Assignment> {
    prop::array::uniform4(small_q()).prop_map(|v| {
        let mut a: Assignment = HashMap::new();
        for k in 0..3 {
            a.insert(Atom::xi(k), v[k].clone());
        }
        a.insert(Atom::param("F"), v[3].clone());
        a
    })
}

fn poly_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Poly>>> {
    prop::collection::vec(prop::collection::vec(small_poly(), n), n)
}

fn rational_matrix() -> impl Strategy<Value = Vec<Vec<Q>>> {
    (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(small_q(), n), n))
}

proptest! {
    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Poly::zero());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), x in point()) {
        let (va, vb) = (a.eval(&x).unwrap(), b.eval(&x).unwrap());
        prop_assert_eq!((&a + &b).eval(&x).unwrap(), &va + &vb);
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), &va * &vb);
        prop_assert_eq!(a.pow(3).eval(&x).unwrap(), &va * &va * &va);
    }

    #[test]
    fn exact_division_inverts_multiplication(a in small_poly(), b in small_poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn rational_cofactor_oracle(m in rational_matrix()) {
        prop_assert_eq!(det_rational(m.clone()), cofactor_det_rational(&m));
    }

    #[test]
    fn determinant_commutes_with_evaluation(m in (1usize..=3).prop_flat_map(poly_matrix), x in point()) {
        let d = det_poly(m.clone());
        let numeric: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|p| p.eval(&x).unwrap()).collect()).collect();
        prop_assert_eq!(d.eval(&x).unwrap(), det_rational(numeric));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polynomial_determinants_match_cofactor_oracle(m in (1usize..=6).prop_flat_map(|n| {
        let entry = prop_oneof![3 => Just(Poly::zero()), 2 => small_poly()];
        prop::collection::vec(prop::collection::vec(entry, n), n)
    })) {
        let oracle = cofactor_det_poly(&m);
        prop_assert_eq!(bareiss(m.clone()), oracle.clone());
        prop_assert_eq!(det_poly(m), oracle);
    }
}

proptest! {
    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let v = ratio(n, d);
        prop_assert_eq!(parse_q(&fmt_q(&v)).unwrap(), v);
    }
}

#[derive(Debug, Clone, Copy)]
enum Block {
    Unknown(usize),
    Equation(usize),
}

fn ens_blocks() -> Vec<Block> {
    let sys = build_ens_system();
    (0..sys.unknowns.len())
        .map(Block::Unknown)
        .chain((0..sys.equations.len()).map(Block::Equation))
        .collect()
}

proptest! {
    #[test]
    fn any_index_perturbation_breaks_structure(
        block in prop::sample::select(ens_blocks()),
        up in any::<bool>(),
    ) {
        let mut sys = build_ens_system();
        prop_assert!(sys.validate_structure().pass);
        let delta = if up { 1 } else { -1 };
        match block {
            Block::Unknown(i) => sys.unknowns[i].m += delta,
            Block::Equation(i) => sys.equations[i].n += delta,
        }
        prop_assert!(!sys.validate_structure().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn identities_converge_for_other_seeds(seed in 0u64..1_000_000) {
        let r = run_lab(&LabConfig { seed, ..LabConfig::default() }).unwrap();
        for row in &r.rows {
            let ratio = row.levels[1].ratio.unwrap();
            match row.kind {
                RowKind::Identity => prop_assert!(ratio_in_band(ratio), "{} {}", row.name, ratio),
                RowKind::Control => prop_assert!(!ratio_in_band(ratio), "{} {}", row.name, ratio),
            }
        }
        prop_assert!(r.invariants.iter().all(|i| i.pass));
        prop_assert!(r.signs.levels.iter().all(|l| l.shear_square_min >= -l.tolerance));
    }
}
