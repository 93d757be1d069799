//! Programmatic construction of the ENS block system. The shipped
//! `ens.lops` file encodes the same system; a test keeps the two in sync.

use crate::poly::{Atom, Poly};
use crate::rational::{q, ratio};
use crate::system::{
    DependencyDecl, EquationBlock, FactorDecl, FactorsDecl, LeraySystem, ParamConstraint,
    ParamDecl, SymbolEntry, UnknownBlock,
};

/// Metric components `(a, b)`, `a <= b`, in block order.
pub const METRIC_PAIRS: [(usize, usize); 10] = [
    (0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3),
];

/// Vorticity components `(a, b)`, `a < b`, in block order.
pub const VORTICITY_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn par(name: &str) -> Poly {
    Poly::param(name)
}

fn sym_name(base: &str, a: usize, b: usize) -> String {
    format!("{base}{}{}", a.min(b), a.max(b))
}

pub(crate) fn gi(a: usize, b: usize) -> Poly {
    par(&sym_name("gi", a, b))
}

fn gl(a: usize, b: usize) -> Poly {
    par(&sym_name("g", a, b))
}

fn u(k: usize) -> Poly {
    par(&format!("u{k}"))
}

fn ul(k: usize) -> Poly {
    par(&format!("ul{k}"))
}

fn xi(k: usize) -> Poly {
    Poly::xi(k)
}

/// Contractions shared by many entries.
struct Contractions {
    ux: Poly,
    cx: Poly,
    xu: [Poly; 4],
    xx: Poly,
    pl: [Poly; 4],
    pu: [Poly; 4],
    pm: [[Poly; 4]; 4],
    pp: [[Poly; 4]; 4],
}

impl Contractions {
    fn new() -> Self {
        let sum = |f: &dyn Fn(usize) -> Poly| (0..4).fold(Poly::zero(), |acc, k| &acc + &f(k));
        let ux = sum(&|k| &u(k) * &xi(k));
        let cx = sum(&|k| &par(&format!("C{k}")) * &xi(k));
        let xu: [Poly; 4] = std::array::from_fn(|n| sum(&|m| &gi(n, m) * &xi(m)));
        let xx = sum(&|n| &xu[n] * &xi(n));
        let pl = std::array::from_fn(|a| &xi(a) - &(&ul(a) * &ux));
        let pu = std::array::from_fn(|a| &xu[a] - &(&u(a) * &ux));
        let pm = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let delta = if a == b { Poly::one() } else { Poly::zero() };
                &delta - &(&ul(a) * &u(b))
            })
        });
        let pp = std::array::from_fn(|a| std::array::from_fn(|b| &gi(a, b) - &(&u(a) * &u(b))));
        Contractions { ux, cx, xu, xx, pl, pu, pm, pp }
    }
}

fn params() -> Vec<ParamDecl> {
    let free = |n: String| ParamDecl { name: n, constraint: ParamConstraint::Free };
    let mut out: Vec<ParamDecl> = Vec::new();
    out.extend(METRIC_PAIRS.iter().map(|&(a, b)| free(sym_name("gi", a, b))));
    out.extend(METRIC_PAIRS.iter().map(|&(a, b)| free(sym_name("g", a, b))));
    for base in ["u", "ul", "C"] {
        out.extend((0..4).map(|k| free(format!("{base}{k}"))));
    }
    for n in ["F", "invF", "inv_theta_r", "q"] {
        out.push(ParamDecl { name: n.into(), constraint: ParamConstraint::Positive });
    }
    out.push(ParamDecl { name: "vartheta".into(), constraint: ParamConstraint::Nonzero });
    for base in ["dU", "du"] {
        out.extend((0..4).flat_map(|a| (0..4).map(move |b| format!("{base}{a}{b}"))).map(free));
    }
    out
}

/// The ENS system: unknowns `g, s, u, Omega, C` with indices
/// `(3, 2, 2, 1, 2)` and equations with indices `(1, 0, 0, 0, 0)`.
pub fn build_ens_system() -> LeraySystem {
    let k = Contractions::new();
    let mut entries = Vec::new();
    let mut put = |eq: &str, i: usize, unk: &str, j: usize, symbol: Poly| {
        entries.push(SymbolEntry {
            eq: eq.into(),
            eq_index: i,
            unk: unk.into(),
            unk_index: j,
            symbol,
        });
    };
    let vartheta = par("vartheta");
    let f = par("F");
    let inv_f = par("invF");
    let qq = par("q");

    for i in 0..10 {
        put("metric", i, "g", i, k.xx.clone());
    }
    let visc = (&vartheta * &f).scale(&q(-2));
    for (i, &(a, b)) in METRIC_PAIRS.iter().enumerate() {
        for c in 0..4 {
            let inner = &(&(&k.pl[a] * &k.pm[b][c]) + &(&k.pm[a][c] * &k.pl[b])) - &(&k.pu[c] * &gl(a, b));
            put("metric", i, "u", c, &visc * &inner);
        }
    }

    put("entropy", 0, "s", 0, k.ux.pow(2));
    let heat = &(&(&vartheta * &f) * &par("inv_theta_r")) * &k.ux;
    for c in 0..4 {
        let mut inner = Poly::zero();
        for a in 0..4 {
            inner = &inner + &(&k.pu[a] * &par(&format!("dU{a}{c}")));
            let grad = (0..4).fold(Poly::zero(), |acc, n| &acc + &(&par(&format!("dU{a}{n}")) * &xi(n)));
            inner = &inner + &(&k.pp[a][c] * &grad);
        }
        for m in 0..4 {
            for n in 0..4 {
                let sym = &par(&format!("du{m}{n}")) + &par(&format!("du{n}{m}"));
                inner = &inner + &(&(&sym * &k.pu[m]) * &gi(n, c));
            }
        }
        put("entropy", 0, "u", c, -&(&heat * &inner));
    }

    for c in 0..4 {
        put("velocity", c, "u", c, k.xx.clone());
    }
    let half_inv_f = inv_f.scale(&ratio(-1, 2));
    for c in 0..4 {
        for (j, &(a, b)) in VORTICITY_PAIRS.iter().enumerate() {
            let mut inner = -&(&ul(c) * &(&(&k.xu[a] * &u(b)) - &(&k.xu[b] * &u(a))));
            if b == c {
                inner = &inner + &(&k.xu[a] + &(&k.ux * &u(a)));
            }
            if a == c {
                inner = &inner - &(&k.xu[b] + &(&k.ux * &u(b)));
            }
            put("velocity", c, "Omega", j, &half_inv_f * &inner);
        }
    }
    for c in 0..4 {
        for m in 0..4 {
            put("velocity", c, "C", m, &(&inv_f * &k.pu[m]) * &k.pl[c]);
        }
    }

    for j in 0..6 {
        put("vorticity", j, "Omega", j, k.cx.clone());
    }
    let q_flow = &qq * &k.ux;
    for (j, &(a, b)) in VORTICITY_PAIRS.iter().enumerate() {
        put("vorticity", j, "C", a, -&(&q_flow * &xi(b)));
        put("vorticity", j, "C", b, &q_flow * &xi(a));
    }

    for c in 0..4 {
        put("current", c, "C", c, k.xx.clone());
    }
    for c in 0..4 {
        for (j, &(a, b)) in VORTICITY_PAIRS.iter().enumerate() {
            if b == c {
                put("current", c, "Omega", j, -&k.xu[a]);
            }
            if a == c {
                put("current", c, "Omega", j, k.xu[b].clone());
            }
        }
    }

    let unknown = |name: &str, multiplicity, m| UnknownBlock { name: name.into(), multiplicity, m };
    let equation = |name: &str, multiplicity, n| EquationBlock { name: name.into(), multiplicity, n };
    let deps: Vec<DependencyDecl> = [
        ("metric", &[("g", 1), ("s", 0), ("u", 0), ("C", 0)][..]),
        ("entropy", &[("g", 2), ("s", 1), ("u", 1), ("C", 1)][..]),
        ("velocity", &[("g", 2), ("s", 1), ("u", 1), ("Omega", 0), ("C", 1)][..]),
        ("vorticity", &[("g", 2), ("s", 1), ("u", 1), ("Omega", 0), ("C", 1)][..]),
        ("current", &[("g", 2), ("Omega", 0), ("C", 1)][..]),
    ]
    .iter()
    .flat_map(|(eq, list)| {
        list.iter().map(move |&(unk, order)| DependencyDecl {
            eq: eq.to_string(),
            unk: unk.to_string(),
            order,
        })
    })
    .collect();

    let mut bindings = Vec::new();
    for &(a, b) in &METRIC_PAIRS {
        if (a, b) == (0, 0) {
            bindings.push((Atom::param("gi00"), Poly::one()));
        } else if a != b {
            bindings.push((Atom::param(&sym_name("gi", a, b)), Poly::zero()));
        }
    }
    for m in 0..4 {
        bindings.push((Atom::param(&format!("C{m}")), &f * &u(m)));
    }
    let state = [
        ("gi11", q(-1)), ("gi22", q(-1)), ("gi33", q(-1)),
        ("u0", q(1)), ("u1", q(0)), ("u2", q(0)), ("u3", q(0)),
        ("F", q(1)), ("q", ratio(1, 2)),
    ]
    .into_iter()
    .map(|(n, v)| (Atom::param(n), v))
    .collect();

    let factor = |name: &str, multiplicity, poly: Poly| FactorDecl { name: name.into(), multiplicity, poly };
    let f_plus_q = &f + &qq;
    let factors = FactorsDecl {
        prefactor: &f.pow(3) * &f_plus_q.pow(3),
        factors: vec![
            factor("light", 14, k.xx.clone()),
            factor("flow", 6, k.ux.clone()),
            factor("flow_light", 2, &k.ux * &k.xx),
            factor("P1", 1, k.xx.clone()),
            factor("P2", 1, k.xx.clone()),
        ],
    };

    LeraySystem {
        name: "ens".into(),
        params: params(),
        unknowns: vec![
            unknown("g", 10, 3),
            unknown("s", 1, 2),
            unknown("u", 4, 2),
            unknown("Omega", 6, 1),
            unknown("C", 4, 2),
        ],
        equations: vec![
            equation("metric", 10, 1),
            equation("entropy", 1, 0),
            equation("velocity", 4, 0),
            equation("vorticity", 6, 0),
            equation("current", 4, 0),
        ],
        entries,
        deps,
        bindings,
        state,
        factors: Some(factors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    #[test]
    fn matches_shipped_file() {
        let parsed = parse_system(super::super::ENS_SPEC).unwrap();
        let built = build_ens_system();
        assert_eq!(parsed.params, built.params);
        assert_eq!(parsed.unknowns, built.unknowns);
        assert_eq!(parsed.equations, built.equations);
        assert_eq!(parsed.entries.len(), built.entries.len());
        for (a, b) in parsed.entries.iter().zip(&built.entries) {
            assert_eq!(a, b, "entry {}[{}] {}[{}]", a.eq, a.eq_index, a.unk, a.unk_index);
        }
        assert_eq!(parsed, built);
    }

    #[test]
    fn structure_and_total_order() {
        let sys = build_ens_system();
        assert_eq!(sys.unknown_count(), 25);
        assert_eq!(sys.total_order(), 44);
        assert!(sys.validate_structure().pass);
    }

    #[test]
    fn printed_matrix_placements() {
        let sys = build_ens_system();
        let find = |eq: &str, i, unk: &str, j| {
            sys.entries
                .iter()
                .find(|e| e.eq == eq && e.eq_index == i && e.unk == unk && e.unk_index == j)
                .map(|e| e.symbol.clone())
        };
        let k = Contractions::new();
        // first vorticity row: -q ux xi1 in the C0 column, q ux xi0 in C1
        assert_eq!(find("vorticity", 0, "C", 0), Some(-&(&(&par("q") * &k.ux) * &xi(1))));
        assert_eq!(find("vorticity", 0, "C", 1), Some(&(&par("q") * &k.ux) * &xi(0)));
        // first current row picks up xi^1, xi^2, xi^3 in the Omega_0b columns
        for (j, b) in [(0, 1), (1, 2), (2, 3)] {
            assert_eq!(find("current", 0, "Omega", j), Some(k.xu[b].clone()));
        }
        assert_eq!(find("vorticity", 3, "C", 0), None);
    }
}
