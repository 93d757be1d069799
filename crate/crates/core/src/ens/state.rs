//! Exact rational fluid states and the equation-of-state interface.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::EnsError;
use crate::analysis::Check;
use crate::poly::{Assignment, Atom, Poly};
use crate::rational::{fmt_q, from_f64_grid, q, random_q, to_f64, Q};

pub type Mat4 = [[Q; 4]; 4];

pub fn identity4() -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() }))
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(Q::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
    })
}

pub fn transpose(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat_vec(a: &Mat4, v: &[Q; 4]) -> [Q; 4] {
    std::array::from_fn(|i| (0..4).fold(Q::zero(), |acc, k| acc + &a[i][k] * &v[k]))
}

/// Exact Gauss-Jordan inverse.
pub fn inverse4(m: &Mat4) -> Option<Mat4> {
    let mut a = m.clone();
    let mut inv = identity4();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for j in 0..4 {
            a[col][j] = &a[col][j] / &d;
            inv[col][j] = &inv[col][j] / &d;
        }
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..4 {
                    let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

/// `g^{-1} = M^T diag(d) M` with `M` unit upper triangular, so that
/// `g^{ab} xi_a xi_b = sum_k d_k (M xi)_k^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub m: Mat4,
    pub d: [Q; 4],
}

pub fn ldl(sym: &Mat4) -> Option<Frame> {
    let mut a = sym.clone();
    let mut m = identity4();
    let mut d: [Q; 4] = std::array::from_fn(|_| Q::zero());
    for k in 0..4 {
        if a[k][k].is_zero() {
            return None;
        }
        d[k] = a[k][k].clone();
        for j in k + 1..4 {
            m[k][j] = &a[k][j] / &d[k];
        }
        for i in k + 1..4 {
            for j in k + 1..4 {
                let t = &a[i][k] * &a[k][j] / &d[k];
                a[i][j] -= t;
            }
        }
    }
    Some(Frame { m, d })
}

/// Thermodynamic closure in the variables `(r, s)`.
pub trait EquationOfState: Sync {
    fn name(&self) -> &str;
    fn energy_density(&self, r: f64, s: f64) -> f64;
    fn pressure(&self, r: f64, s: f64) -> f64;
    fn temperature(&self, r: f64, s: f64) -> f64;
    fn specific_energy(&self, r: f64, s: f64) -> f64;
    /// `F = 1 + eps + p / r`.
    fn index(&self, r: f64, s: f64) -> f64 {
        1.0 + self.specific_energy(r, s) + self.pressure(r, s) / r
    }
    /// Inverse view `r(F, s)`.
    fn rest_density(&self, f: f64, s: f64) -> f64;
}

/// `r(F, s) = F h(s)` with `h(s) = 1 + s^2`: the boundary case of the
/// sound-speed condition, `dr/dF = r/F`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StiffToy;

impl StiffToy {
    fn h(s: f64) -> f64 {
        1.0 + s * s
    }
}

impl EquationOfState for StiffToy {
    fn name(&self) -> &str {
        "stiff-toy"
    }
    fn energy_density(&self, r: f64, s: f64) -> f64 {
        r * (1.0 + self.specific_energy(r, s))
    }
    fn pressure(&self, r: f64, s: f64) -> f64 {
        r * (r / Self::h(s) - 1.0) / 2.0
    }
    fn temperature(&self, r: f64, s: f64) -> f64 {
        Self::h(s) * (1.0 + r)
    }
    fn specific_energy(&self, r: f64, s: f64) -> f64 {
        (r / Self::h(s) - 1.0) / 2.0
    }
    fn rest_density(&self, f: f64, s: f64) -> f64 {
        f * Self::h(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub g_down: Mat4,
    pub g_up: Mat4,
    pub u_up: [Q; 4],
    pub u_down: [Q; 4],
    pub f: Q,
    pub q: Q,
    pub s: Q,
    pub vartheta: Q,
    /// `du[a][b] = d_a u_b`; only enters lower-order coupling entries.
    pub du: Mat4,
}

impl FluidState {
    pub fn new(g_down: Mat4, u_up: [Q; 4], f: Q, q: Q) -> Result<Self, EnsError> {
        let g_up = inverse4(&g_down).ok_or(EnsError::SingularMetric)?;
        let u_down = mat_vec(&g_down, &u_up);
        Ok(FluidState {
            g_down,
            g_up,
            u_up,
            u_down,
            f,
            q,
            s: Q::zero(),
            vartheta: q_neg_one(),
            du: std::array::from_fn(|_| std::array::from_fn(|_| Q::zero())),
        })
    }

    pub fn minkowski(u_up: [Q; 4], f: Q, q: Q) -> Self {
        let mut eta = identity4();
        for (k, row) in eta.iter_mut().enumerate().skip(1) {
            row[k] = q_neg_one();
        }
        Self::new(eta, u_up, f, q).expect("Minkowski metric is invertible")
    }

    pub fn minkowski_rest(f: Q, qv: Q) -> Self {
        Self::minkowski(Self::tau(), f, qv)
    }

    /// A general Lorentzian metric `L^T diag(1, -k1^2, -k2^2, -k3^2) L`
    /// and a unit future velocity `L^-1 v`, all with small denominators.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut l = identity4();
            for (i, row) in l.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    if i != j {
                        *x = random_q(rng, -0.3, 0.3, 4);
                    }
                }
            }
            let k: [Q; 3] = std::array::from_fn(|_| random_q(rng, 0.5, 1.5, 3));
            let mut d = identity4();
            for i in 1..4 {
                d[i][i] = -(&k[i - 1] * &k[i - 1]);
            }
            let g_down = mat_mul(&transpose(&l), &mat_mul(&d, &l));
            // unit vector of the diagonal form from a point of the hyperboloid
            let w: [Q; 3] = std::array::from_fn(|_| random_q(rng, -0.4, 0.4, 4));
            let s: Q = w.iter().map(|x| x * x).sum();
            let den = Q::one() - &s;
            let mut v: [Q; 4] = std::array::from_fn(|_| Q::zero());
            v[0] = (Q::one() + &s) / &den;
            for i in 1..4 {
                v[i] = q(2) * &w[i - 1] / (&den * &k[i - 1]);
            }
            let Some(l_inv) = inverse4(&l) else { continue };
            let u_up = mat_vec(&l_inv, &v);
            let f = random_q(rng, 1.0, 4.0, 4);
            let qv = random_q(rng, 0.0625, 3.0, 4);
            let Ok(mut st) = Self::new(g_down, u_up, f, qv) else { continue };
            if !st.u_up[0].is_positive() || !st.g_up[0][0].is_positive() || st.frame().is_none() {
                continue;
            }
            st.s = random_q(rng, 0.0, 2.0, 4);
            st.du = std::array::from_fn(|_| std::array::from_fn(|_| random_q(rng, -1.0, 1.0, 4)));
            return st;
        }
    }

    pub fn with_q(mut self, qv: Q) -> Self {
        self.q = qv;
        self
    }

    pub fn with_vartheta(mut self, v: Q) -> Self {
        self.vartheta = v;
        self
    }

    /// `u^a u_a - 1`, recomputed from the metric.
    pub fn normalization_residual(&self) -> Q {
        let mut acc = -Q::one();
        for a in 0..4 {
            for b in 0..4 {
                acc += &self.g_down[a][b] * &self.u_up[a] * &self.u_up[b];
            }
        }
        acc
    }

    pub fn frame(&self) -> Option<Frame> {
        ldl(&self.g_up)
    }

    /// Atoms entering the principal part: metric, velocity, `C = F u`,
    /// `F`, `1/F` and `q`.
    pub fn principal_assignment(&self) -> Assignment {
        let mut env = Assignment::new();
        for a in 0..4 {
            for b in a..4 {
                env.insert(Atom::param(&format!("gi{a}{b}")), self.g_up[a][b].clone());
                env.insert(Atom::param(&format!("g{a}{b}")), self.g_down[a][b].clone());
            }
            env.insert(Atom::param(&format!("u{a}")), self.u_up[a].clone());
            env.insert(Atom::param(&format!("ul{a}")), self.u_down[a].clone());
            env.insert(Atom::param(&format!("C{a}")), &self.f * &self.u_up[a]);
        }
        env.insert(Atom::param("F"), self.f.clone());
        env.insert(Atom::param("invF"), Q::one() / &self.f);
        env.insert(Atom::param("q"), self.q.clone());
        env
    }

    /// Every ENS atom: the principal ones plus `vartheta`, `1/(theta r)`
    /// from the equation of state and the velocity gradients.
    pub fn assignment(&self, eos: &dyn EquationOfState) -> Assignment {
        let mut env = self.principal_assignment();
        let (f, s) = (to_f64(&self.f), to_f64(&self.s));
        let r = eos.rest_density(f, s);
        let inv = 1.0 / (eos.temperature(r, s) * r);
        env.insert(Atom::param("vartheta"), self.vartheta.clone());
        env.insert(Atom::param("inv_theta_r"), from_f64_grid(inv, 1 << 16));
        for a in 0..4 {
            for b in 0..4 {
                env.insert(Atom::param(&format!("du{a}{b}")), self.du[a][b].clone());
                // d_a u^b with the metric held constant
                let up = (0..4).fold(Q::zero(), |acc, c| acc + &self.g_up[b][c] * &self.du[a][c]);
                env.insert(Atom::param(&format!("dU{a}{b}")), up);
            }
        }
        env
    }

    /// `g^{ab} xi_a xi_b` at this state.
    pub fn light(&self) -> Poly {
        let mut acc = Poly::zero();
        for a in 0..4 {
            for b in 0..4 {
                let m = &Poly::xi(a) * &Poly::xi(b);
                acc = &acc + &m.scale(&self.g_up[a][b]);
            }
        }
        acc
    }

    /// `u^a xi_a` at this state.
    pub fn flow(&self) -> Poly {
        (0..4).fold(Poly::zero(), |acc, a| &acc + &Poly::xi(a).scale(&self.u_up[a]))
    }

    /// Time direction `dt`.
    pub fn tau() -> [Q; 4] {
        [q(1), q(0), q(0), q(0)]
    }
}

fn q_neg_one() -> Q {
    -Q::one()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateReport {
    pub eos: String,
    pub normalization_residual: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

const S_SAMPLES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

/// Normalization (exact), `F >= 1`, `q > 0`, `vartheta != 0`, positive
/// temperature on sampled `(r, s)` and the sound-speed condition
/// `dr/dF >= r/F` by central differences.
pub fn validate_state(state: &FluidState, eos: &dyn EquationOfState) -> StateReport {
    let residual = state.normalization_residual();
    let lowered = mat_vec(&state.g_down, &state.u_up);
    let mut checks = vec![
        Check::new(
            "normalization",
            residual.is_zero() && lowered == state.u_down,
            format!("u^a u_a - 1 = {}", fmt_q(&residual)),
        ),
        Check::new(
            "metric-inverse",
            mat_mul(&state.g_up, &state.g_down) == identity4(),
            "g^ab g_bc = delta",
        ),
        Check::new("future-directed", state.u_up[0].is_positive(), format!("u^0 = {}", fmt_q(&state.u_up[0]))),
        Check::new("index-at-least-one", state.f >= Q::one(), format!("F = {}", fmt_q(&state.f))),
        Check::new("q-positive", state.q.is_positive(), format!("q = {}", fmt_q(&state.q))),
        Check::new("vartheta-nonzero", !state.vartheta.is_zero(), format!("vartheta = {}", fmt_q(&state.vartheta))),
    ];
    let f0 = to_f64(&state.f);
    let mut s_values = S_SAMPLES.to_vec();
    s_values.push(to_f64(&state.s));
    let mut worst_theta = f64::INFINITY;
    let mut worst_gap = f64::INFINITY;
    for &s in &s_values {
        for scale in [1.0, 1.5, 2.0] {
            let f = f0.max(1.0) * scale;
            let r = eos.rest_density(f, s);
            worst_theta = worst_theta.min(eos.temperature(r, s));
            let h = 1e-4 * f;
            let drdf = (eos.rest_density(f + h, s) - eos.rest_density(f - h, s)) / (2.0 * h);
            worst_gap = worst_gap.min((drdf - r / f) / (1.0 + r / f));
        }
    }
    checks.push(Check::new("temperature-positive", worst_theta > 0.0, format!("min theta = {worst_theta:.6}")));
    checks.push(Check::new(
        "sound-speed",
        worst_gap >= -1e-6,
        format!("min (dr/dF - r/F) relative = {worst_gap:.3e}"),
    ));
    let pass = checks.iter().all(|c| c.pass);
    StateReport {
        eos: eos.name().to_string(),
        normalization_residual: fmt_q(&residual),
        checks,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rest_state_is_valid() {
        let st = FluidState::minkowski_rest(q(1), ratio(1, 2));
        let r = validate_state(&st, &StiffToy);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.normalization_residual, "0");
    }

    #[test]
    fn null_velocity_fails_normalization() {
        let st = FluidState::minkowski([q(1), q(1), q(0), q(0)], q(1), ratio(1, 2));
        let r = validate_state(&st, &StiffToy);
        assert!(!r.pass);
        assert_eq!(r.normalization_residual, "-1");
        assert!(!r.checks[0].pass);
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let st = FluidState::random(&mut rng);
            assert!(validate_state(&st, &StiffToy).pass);
            assert_eq!(mat_mul(&st.g_down, &st.g_up), identity4());
            let fr = st.frame().unwrap();
            assert!(fr.d[0].is_positive() && fr.d[1..].iter().all(|x| x.is_negative()));
        }
    }

    #[test]
    fn frame_diagonalizes_inverse_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = FluidState::random(&mut rng);
        let fr = st.frame().unwrap();
        let mut dm = fr.m.clone();
        for (k, row) in dm.iter_mut().enumerate() {
            for x in row.iter_mut() {
                *x = &*x * &fr.d[k];
            }
        }
        assert_eq!(mat_mul(&transpose(&fr.m), &dm), st.g_up);
    }

    #[test]
    fn stiff_toy_identities() {
        let e = StiffToy;
        for (r, s) in [(1.0, 0.0), (2.5, 0.7), (4.0, 1.5)] {
            let f = e.index(r, s);
            assert!((r * f - (e.energy_density(r, s) + e.pressure(r, s))).abs() < 1e-12);
            assert!((e.rest_density(f, s) - r).abs() < 1e-12);
        }
    }
}
