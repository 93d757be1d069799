//! Node-local residuals of the tensor identities. Each side of an identity is
//! assembled from its own sampled fields, so the mismatch is pure
//! finite-difference error when the identity holds.

use super::patch::{cov_deriv_covector, cov_deriv_tensor, dot, FieldPatch, NodeFields, M4, V4};

/// Identities checked on every interior node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `Sigma-bar = Sigma + 2 pi u^r d_r F`.
    ShearSplit,
    /// `Sigma-bar_ab = 2 nabla-bar_b C_a + Theta_ab`.
    ShearVorticity,
    /// `u^a nabla_a u_b = pi^a_b d_a F / F + u^a Omega_ab / F`.
    Acceleration,
    /// Connection of `F^2 g` against `nabla` corrected by `K = d log F`.
    ConformalDerivative,
    /// `Sigma^ab Sigma_ab = 2F^2 (A^mn A_mn + A^mn A_nm - a^2)`, `A = nabla u`.
    ShearContraction,
    /// `u^a nabla_b u_a = 0`.
    UnitTangency,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::ShearSplit,
        Identity::ShearVorticity,
        Identity::Acceleration,
        Identity::ConformalDerivative,
        Identity::ShearContraction,
        Identity::UnitTangency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::ShearSplit => "rescaled-shear-split",
            Identity::ShearVorticity => "rescaled-shear-vorticity",
            Identity::Acceleration => "acceleration",
            Identity::ConformalDerivative => "conformal-derivative",
            Identity::ShearContraction => "shear-contraction",
            Identity::UnitTangency => "unit-tangency",
        }
    }

    /// Term removed by the mutation control, if the identity has one.
    pub fn mutation(self) -> Option<&'static str> {
        match self {
            Identity::ShearSplit => Some("drop-expansion-term"),
            Identity::ShearVorticity => Some("drop-transport-terms"),
            Identity::Acceleration => Some("drop-vorticity-term"),
            Identity::ConformalDerivative => Some("drop-trace-term"),
            Identity::ShearContraction => Some("drop-acceleration-term"),
            Identity::UnitTangency => None,
        }
    }
}

fn max_abs_diff(a: &M4, b: &M4) -> f64 {
    let mut m = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

fn flow_derivative_of_f(n: &NodeFields) -> f64 {
    dot(&n.u_up, &n.df)
}

/// Residual of one identity at a node; `mutated` drops the control term.
/// `aux` is the auxiliary covector and its gradient.
pub fn residual(id: Identity, n: &NodeFields, aux: (&V4, &M4), mutated: bool) -> f64 {
    match id {
        Identity::ShearSplit => {
            let lhs = n.sigma_bar();
            let mut rhs = n.sigma();
            if !mutated {
                let pi = n.pi_dn();
                let ud = flow_derivative_of_f(n);
                for a in 0..4 {
                    for b in 0..4 {
                        rhs[a][b] += 2.0 * pi[a][b] * ud;
                    }
                }
            }
            max_abs_diff(&lhs, &rhs)
        }
        Identity::ShearVorticity => {
            let lhs = n.sigma_bar();
            let nb = n.nabla_bar_c();
            let theta = if mutated { n.omega() } else { n.theta() };
            let mut rhs = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    rhs[a][b] = 2.0 * nb[b][a] + theta[a][b];
                }
            }
            max_abs_diff(&lhs, &rhs)
        }
        Identity::Acceleration => {
            let nu = n.nabla_u();
            let pm = n.pi_mixed();
            let o = n.omega();
            let mut r = 0.0f64;
            for b in 0..4 {
                let lhs: f64 = (0..4).map(|a| n.u_up[a] * nu[a][b]).sum();
                let mut rhs: f64 = (0..4).map(|a| pm[a][b] * n.df[a]).sum::<f64>() / n.f;
                if !mutated {
                    rhs += (0..4).map(|a| n.u_up[a] * o[a][b]).sum::<f64>() / n.f;
                }
                r = r.max((lhs - rhs).abs());
            }
            r
        }
        Identity::ConformalDerivative => {
            let (v, dv) = aux;
            let lhs = cov_deriv_covector(&n.gamma_bar, v, dv);
            let mut rhs = cov_deriv_covector(&n.gamma, v, dv);
            let k_up = super::patch::raise(&n.ginv, &n.k);
            let trace = dot(&k_up, v);
            for a in 0..4 {
                for b in 0..4 {
                    rhs[a][b] -= n.k[a] * v[b] + n.k[b] * v[a];
                    if !mutated {
                        rhs[a][b] += trace * n.g[a][b];
                    }
                }
            }
            max_abs_diff(&lhs, &rhs)
        }
        Identity::ShearContraction => {
            let s = n.sigma();
            let lhs = n.contract(&s, &s);
            let a = n.nabla_u();
            let at = transpose(&a);
            let acc: V4 = std::array::from_fn(|b| (0..4).map(|m| n.u_up[m] * a[m][b]).sum());
            let acc_sq = dot(&super::patch::raise(&n.ginv, &acc), &acc);
            let mut bracket = n.contract(&a, &a) + n.contract(&a, &at);
            if !mutated {
                bracket -= acc_sq;
            }
            (lhs - 2.0 * n.f * n.f * bracket).abs()
        }
        Identity::UnitTangency => {
            let a = n.nabla_u();
            (0..4)
                .map(|b| (0..4).map(|m| n.u_up[m] * a[b][m]).sum::<f64>().abs())
                .fold(0.0, f64::max)
        }
    }
}

fn transpose(a: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Algebraic invariants that hold to rounding at every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// `pi^a_m pi^m_b = pi^a_b`.
    ProjectorIdempotent,
    /// `pi_ab u^b = 0`.
    ProjectorAnnihilatesFlow,
    /// `C-bar^a C_a = 1`.
    UnitRescaledCovector,
    /// `nabla_a g_bc = 0` for the connection built from the same samples.
    MetricCompatibility,
}

impl Invariant {
    pub const ALL: [Invariant; 4] = [
        Invariant::ProjectorIdempotent,
        Invariant::ProjectorAnnihilatesFlow,
        Invariant::UnitRescaledCovector,
        Invariant::MetricCompatibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::ProjectorIdempotent => "projector-idempotent",
            Invariant::ProjectorAnnihilatesFlow => "projector-annihilates-flow",
            Invariant::UnitRescaledCovector => "unit-rescaled-covector",
            Invariant::MetricCompatibility => "metric-compatibility",
        }
    }

    pub fn residual(self, n: &NodeFields) -> f64 {
        match self {
            Invariant::ProjectorIdempotent => {
                let p = n.pi_mixed();
                let mut sq = [[0.0; 4]; 4];
                for a in 0..4 {
                    for b in 0..4 {
                        sq[a][b] = (0..4).map(|m| p[a][m] * p[m][b]).sum();
                    }
                }
                max_abs_diff(&sq, &p)
            }
            Invariant::ProjectorAnnihilatesFlow => {
                let p = n.pi_dn();
                (0..4)
                    .map(|a| (0..4).map(|b| p[a][b] * n.u_up[b]).sum::<f64>().abs())
                    .fold(0.0, f64::max)
            }
            Invariant::UnitRescaledCovector => (dot(&n.c_bar(), &n.c) - 1.0).abs(),
            Invariant::MetricCompatibility => cov_deriv_tensor(&n.gamma, &n.g, &n.dg)
                .iter()
                .flatten()
                .flatten()
                .fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

/// `Sigma^ab Sigma_ab` at a node.
pub fn shear_square(n: &NodeFields) -> f64 {
    let s = n.sigma();
    n.contract(&s, &s)
}

/// `(vartheta / 2F) Sigma^ab Sigma_ab`, the entropy production
/// `theta r u^a d_a s` implied by the energy balance.
pub fn entropy_production(n: &NodeFields, vartheta: f64) -> f64 {
    vartheta / (2.0 * n.f) * shear_square(n)
}

/// Per-node evaluation bundle used by the lattice sweeps.
pub(crate) fn node_with_aux(
    patch: &FieldPatch,
    aux: &(dyn Fn(V4) -> V4 + Sync),
    i: [usize; 4],
) -> (NodeFields, V4, M4) {
    let (v, dv) = patch.sample_covector(aux, i);
    (patch.node(i), v, dv)
}

#[cfg(test)]
mod tests {
    use super::super::patch::{flat_patch, Lattice, TestFamily};
    use super::*;

    #[test]
    fn constant_fields_give_zero_residuals() {
        let p = flat_patch(Lattice::new(5, 0.1).unwrap(), [1.3, 0.2, -0.1, 0.4]).unwrap();
        let aux = |_x: V4| [0.5, 0.1, 0.2, -0.3];
        for i in p.lattice.interior() {
            let (n, v, dv) = node_with_aux(&p, &aux, i);
            for id in Identity::ALL {
                assert!(residual(id, &n, (&v, &dv), false) < 1e-13, "{}", id.name());
            }
            assert_eq!(shear_square(&n), 0.0);
            assert_eq!(entropy_production(&n, -1.0), 0.0);
        }
    }

    #[test]
    fn invariants_hold_to_rounding() {
        let fam = TestFamily::standard();
        let p = fam.patch(Lattice::new(5, 0.1).unwrap()).unwrap();
        for i in p.lattice.interior() {
            let n = p.node(i);
            for inv in Invariant::ALL {
                assert!(inv.residual(&n) < 1e-12, "{}", inv.name());
            }
        }
    }

    #[test]
    fn shear_is_spatial_and_symmetric() {
        let fam = TestFamily::standard();
        let p = fam.patch(Lattice::new(5, 0.1).unwrap()).unwrap();
        let n = p.node([2, 2, 2, 2]);
        let s = n.sigma();
        for a in 0..4 {
            let su: f64 = (0..4).map(|b| s[a][b] * n.u_up[b]).sum();
            assert!(su.abs() < 1e-12);
            for b in 0..4 {
                assert!((s[a][b] - s[b][a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_production_is_linear_in_vartheta() {
        let fam = TestFamily::standard();
        let p = fam.patch(Lattice::new(5, 0.1).unwrap()).unwrap();
        let n = p.node([2, 2, 2, 2]);
        let a = entropy_production(&n, -1.0);
        assert!(a != 0.0);
        assert_eq!(entropy_production(&n, 1.0), -a);
        assert!((entropy_production(&n, -3.0) - 3.0 * a).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn shear_square_is_nonnegative_with_mostly_minus_signature() {
        // C = (1, a x1, 0, 0) on Minkowski: at x1 = 0, u = (1,0,0,0) and the
        // only shear component is Sigma_11 = 2a, so Sigma^ab Sigma_ab = 4a^2.
        let a = 0.3;
        let lat = super::super::patch::Lattice::new(5, 0.1).unwrap();
        let p = super::super::patch::FieldPatch::new(
            lat,
            Box::new(|_| super::super::patch::minkowski()),
            Box::new(move |x| [1.0, a * x[1], 0.0, 0.0]),
        )
        .unwrap();
        let n = p.node([2, 2, 2, 2]);
        assert_eq!(n.x[1], 0.0);
        assert!((shear_square(&n) - 4.0 * a * a).abs() < 1e-12);
        assert!(entropy_production(&n, -1.0) < 0.0);
    }
}
