use nalgebra::{Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabError;

pub type V4 = [f64; 4];
pub type M4 = [[f64; 4]; 4];
/// `t[a][b][c]`; for connections the first slot is the upper index.
pub type T3 = [[[f64; 4]; 4]; 4];

pub type MetricFn = Box<dyn Fn(V4) -> M4 + Send + Sync>;
pub type CovectorFn = Box<dyn Fn(V4) -> V4 + Send + Sync>;
pub type ScalarFn = Box<dyn Fn(V4) -> f64 + Send + Sync>;

pub const MIN_NODES: usize = 5;

pub(crate) fn zero3() -> T3 {
    [[[0.0; 4]; 4]; 4]
}

pub(crate) fn inverse(m: &M4) -> Option<M4> {
    let inv = Matrix4::from_fn(|i, j| m[i][j]).try_inverse()?;
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = inv[(i, j)];
        }
    }
    Some(out)
}

pub(crate) fn raise(ginv: &M4, w: &V4) -> V4 {
    let mut out = [0.0; 4];
    for (a, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|b| ginv[a][b] * w[b]).sum();
    }
    out
}

pub(crate) fn dot(a: &V4, b: &V4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Signature `(+ - - -)`: one positive and three negative eigenvalues.
pub fn is_lorentzian(g: &M4) -> bool {
    let eig = SymmetricEigen::new(Matrix4::from_fn(|i, j| g[i][j])).eigenvalues;
    let pos = eig.iter().filter(|&&e| e > 0.0).count();
    let neg = eig.iter().filter(|&&e| e < 0.0).count();
    pos == 1 && neg == 3
}

/// Uniform 4-D lattice centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub nodes: usize,
    pub h: f64,
}

impl Lattice {
    pub fn new(nodes: usize, h: f64) -> Result<Self, LabError> {
        if nodes < MIN_NODES {
            return Err(LabError::PatchTooSmall { nodes, min: MIN_NODES });
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(LabError::InvalidSpacing(h));
        }
        Ok(Lattice { nodes, h })
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn extent(&self) -> f64 {
        self.h * (self.nodes - 1) as f64
    }

    pub fn index(&self, i: [usize; 4]) -> usize {
        ((i[0] * self.nodes + i[1]) * self.nodes + i[2]) * self.nodes + i[3]
    }

    pub fn multi_index(&self, mut k: usize) -> [usize; 4] {
        let mut i = [0; 4];
        for slot in i.iter_mut().rev() {
            *slot = k % self.nodes;
            k /= self.nodes;
        }
        i
    }

    pub fn coords(&self, i: [usize; 4]) -> V4 {
        let half = self.extent() / 2.0;
        i.map(|k| k as f64 * self.h - half)
    }

    /// Nodes with a full neighbour stencil; the outer ring is excluded.
    pub fn interior(&self) -> Vec<[usize; 4]> {
        let r = 1..self.nodes - 1;
        let mut out = Vec::with_capacity((self.nodes - 2).pow(4));
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    for d in r.clone() {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
        out
    }

    fn shifted(&self, i: [usize; 4], axis: usize, up: bool) -> usize {
        let mut j = i;
        j[axis] = if up { j[axis] + 1 } else { j[axis] - 1 };
        self.index(j)
    }
}

/// Analytic metric and covector fields sampled on a lattice. Everything
/// downstream of the samples is recomputed node by node.
pub struct FieldPatch {
    pub lattice: Lattice,
    metric: MetricFn,
    covector: CovectorFn,
    g: Vec<M4>,
    gbar: Vec<M4>,
    c: Vec<V4>,
    u: Vec<V4>,
    f: Vec<f64>,
    log_f: Vec<f64>,
}

impl std::fmt::Debug for FieldPatch {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("FieldPatch").field("lattice", &self.lattice).finish_non_exhaustive()
    }
}

impl FieldPatch {
    pub fn new(lattice: Lattice, metric: MetricFn, covector: CovectorFn) -> Result<Self, LabError> {
        let n = lattice.len();
        let mut g = Vec::with_capacity(n);
        let mut gbar = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(n);
        let mut log_f = Vec::with_capacity(n);
        for k in 0..n {
            let x = lattice.coords(lattice.multi_index(k));
            let gk = metric(x);
            if !is_lorentzian(&gk) {
                return Err(LabError::NotLorentzian { at: x });
            }
            let ginv = inverse(&gk).ok_or(LabError::NotLorentzian { at: x })?;
            let ck = covector(x);
            let norm = dot(&raise(&ginv, &ck), &ck);
            if !(norm > 0.0) {
                return Err(LabError::NotTimelike { at: x });
            }
            let fk = norm.sqrt();
            g.push(gk);
            gbar.push(gk.map(|row| row.map(|v| fk * fk * v)));
            c.push(ck);
            u.push(ck.map(|v| v / fk));
            f.push(fk);
            log_f.push(fk.ln());
        }
        Ok(FieldPatch { lattice, metric, covector, g, gbar, c, u, f, log_f })
    }

    pub fn metric_at(&self, x: V4) -> M4 {
        (self.metric)(x)
    }

    pub fn covector_at(&self, x: V4) -> V4 {
        (self.covector)(x)
    }

    fn grad_scalar(&self, field: &[f64], i: [usize; 4]) -> V4 {
        let l = &self.lattice;
        let mut out = [0.0; 4];
        for (a, o) in out.iter_mut().enumerate() {
            *o = (field[l.shifted(i, a, true)] - field[l.shifted(i, a, false)]) / (2.0 * l.h);
        }
        out
    }

    /// `out[a][b] = d_a w_b`.
    fn grad_vec(&self, field: &[V4], i: [usize; 4]) -> M4 {
        let l = &self.lattice;
        let mut out = [[0.0; 4]; 4];
        for (a, row) in out.iter_mut().enumerate() {
            let (p, m) = (&field[l.shifted(i, a, true)], &field[l.shifted(i, a, false)]);
            for b in 0..4 {
                row[b] = (p[b] - m[b]) / (2.0 * l.h);
            }
        }
        out
    }

    /// `out[a][b][c] = d_a m_bc`.
    fn grad_mat(&self, field: &[M4], i: [usize; 4]) -> T3 {
        let l = &self.lattice;
        let mut out = zero3();
        for (a, slab) in out.iter_mut().enumerate() {
            let (p, m) = (&field[l.shifted(i, a, true)], &field[l.shifted(i, a, false)]);
            for b in 0..4 {
                for c in 0..4 {
                    slab[b][c] = (p[b][c] - m[b][c]) / (2.0 * l.h);
                }
            }
        }
        out
    }

    /// Evaluates an auxiliary covector closure at an interior node and its
    /// neighbours, returning the value and central-difference gradient.
    pub fn sample_covector(&self, w: &(dyn Fn(V4) -> V4 + Sync), i: [usize; 4]) -> (V4, M4) {
        let h = self.lattice.h;
        let x = self.lattice.coords(i);
        let mut d = [[0.0; 4]; 4];
        for (a, row) in d.iter_mut().enumerate() {
            let (mut xp, mut xm) = (x, x);
            xp[a] += h;
            xm[a] -= h;
            let (p, m) = (w(xp), w(xm));
            for b in 0..4 {
                row[b] = (p[b] - m[b]) / (2.0 * h);
            }
        }
        (w(x), d)
    }

    /// Node-local geometry at an interior node.
    pub fn node(&self, i: [usize; 4]) -> NodeFields {
        let k = self.lattice.index(i);
        let g = self.g[k];
        let ginv = inverse(&g).expect("sampled metric is invertible");
        let f = self.f[k];
        let gbar_inv = ginv.map(|row| row.map(|v| v / (f * f)));
        let dg = self.grad_mat(&self.g, i);
        let gamma = christoffel_from(&ginv, &dg);
        let gamma_bar = christoffel_from(&gbar_inv, &self.grad_mat(&self.gbar, i));
        let u_dn = self.u[k];
        NodeFields {
            x: self.lattice.coords(i),
            g,
            ginv,
            dg,
            gbar_inv,
            gamma,
            gamma_bar,
            c: self.c[k],
            dc: self.grad_vec(&self.c, i),
            f,
            df: self.grad_scalar(&self.f, i),
            k: self.grad_scalar(&self.log_f, i),
            u_dn,
            u_up: raise(&ginv, &u_dn),
            du: self.grad_vec(&self.u, i),
        }
    }

    pub fn interior_check(&self) -> Result<(), LabError> {
        if self.lattice.nodes < MIN_NODES {
            return Err(LabError::PatchTooSmall { nodes: self.lattice.nodes, min: MIN_NODES });
        }
        Ok(())
    }
}

/// `Gamma^l_mn = 1/2 g^lr (d_m g_rn + d_n g_rm - d_r g_mn)` from `dg[a][b][c] = d_a g_bc`.
pub fn christoffel_from(ginv: &M4, dg: &T3) -> T3 {
    let mut lower = zero3();
    for r in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                lower[r][m][n] = 0.5 * (dg[m][r][n] + dg[n][r][m] - dg[r][m][n]);
            }
        }
    }
    let mut out = zero3();
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                out[l][m][n] = (0..4).map(|r| ginv[l][r] * lower[r][m][n]).sum();
            }
        }
    }
    out
}

/// Connection coefficients of the sampled metric at every interior node.
pub fn christoffel(patch: &FieldPatch) -> Result<Vec<([usize; 4], T3)>, LabError> {
    patch.interior_check()?;
    Ok(patch
        .lattice
        .interior()
        .into_iter()
        .map(|i| (i, patch.node(i).gamma))
        .collect())
}

/// `nabla_a w_b = d_a w_b - Gamma^l_ab w_l`.
pub fn cov_deriv_covector(gamma: &T3, w: &V4, dw: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = dw[a][b] - (0..4).map(|l| gamma[l][a][b] * w[l]).sum::<f64>();
        }
    }
    out
}

/// `nabla_a w^b = d_a w^b + Gamma^b_al w^l`.
pub fn cov_deriv_vector(gamma: &T3, w: &V4, dw: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = dw[a][b] + (0..4).map(|l| gamma[b][a][l] * w[l]).sum::<f64>();
        }
    }
    out
}

/// `nabla_a m_bc` for a rank-2 covariant tensor.
pub fn cov_deriv_tensor(gamma: &T3, m: &M4, dm: &T3) -> T3 {
    let mut out = zero3();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut v = dm[a][b][c];
                for l in 0..4 {
                    v -= gamma[l][a][b] * m[l][c] + gamma[l][a][c] * m[b][l];
                }
                out[a][b][c] = v;
            }
        }
    }
    out
}

/// Covariant derivative of the sampled covector `C` at every interior node.
pub fn cov_deriv(patch: &FieldPatch) -> Result<Vec<([usize; 4], M4)>, LabError> {
    patch.interior_check()?;
    Ok(patch
        .lattice
        .interior()
        .into_iter()
        .map(|i| {
            let n = patch.node(i);
            (i, cov_deriv_covector(&n.gamma, &n.c, &n.dc))
        })
        .collect())
}

/// Sampled values and central differences at one interior node.
#[derive(Debug, Clone)]
pub struct NodeFields {
    pub x: V4,
    pub g: M4,
    pub ginv: M4,
    /// `dg[a][b][c] = d_a g_bc`.
    pub dg: T3,
    pub gbar_inv: M4,
    pub gamma: T3,
    pub gamma_bar: T3,
    pub c: V4,
    pub dc: M4,
    pub f: f64,
    pub df: V4,
    /// `K_a = d_a log F`.
    pub k: V4,
    pub u_dn: V4,
    pub u_up: V4,
    pub du: M4,
}

impl NodeFields {
    /// `pi_ab = g_ab - u_a u_b`.
    pub fn pi_dn(&self) -> M4 {
        let mut p = self.g;
        for (a, row) in p.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v -= self.u_dn[a] * self.u_dn[b];
            }
        }
        p
    }

    /// `pi^a_b = delta^a_b - u^a u_b`.
    pub fn pi_mixed(&self) -> M4 {
        let mut p = [[0.0; 4]; 4];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = if a == b { 1.0 } else { 0.0 } - self.u_up[a] * self.u_dn[b];
            }
        }
        p
    }

    /// `C-bar^a = g-bar^ab C_b`.
    pub fn c_bar(&self) -> V4 {
        raise(&self.gbar_inv, &self.c)
    }

    pub fn omega(&self) -> M4 {
        let mut o = [[0.0; 4]; 4];
        for (a, row) in o.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.dc[a][b] - self.dc[b][a];
            }
        }
        o
    }

    pub fn nabla_c(&self) -> M4 {
        cov_deriv_covector(&self.gamma, &self.c, &self.dc)
    }

    pub fn nabla_bar_c(&self) -> M4 {
        cov_deriv_covector(&self.gamma_bar, &self.c, &self.dc)
    }

    pub fn nabla_u(&self) -> M4 {
        cov_deriv_covector(&self.gamma, &self.u_dn, &self.du)
    }

    /// `Sigma_ab = pi_a^m pi_b^n (nabla_m C_n + nabla_n C_m)`.
    pub fn sigma(&self) -> M4 {
        let nc = self.nabla_c();
        let pm = self.pi_mixed();
        let mut s = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let mut v = 0.0;
                for m in 0..4 {
                    for n in 0..4 {
                        v += pm[m][a] * pm[n][b] * (nc[m][n] + nc[n][m]);
                    }
                }
                s[a][b] = v;
            }
        }
        s
    }

    /// Rescaled shear built from the conformal connection.
    pub fn sigma_bar(&self) -> M4 {
        let nb = self.nabla_bar_c();
        let cb = self.c_bar();
        let mut s = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let transport_a: f64 = (0..4).map(|l| cb[l] * nb[l][a]).sum();
                let transport_b: f64 = (0..4).map(|l| cb[l] * nb[l][b]).sum();
                s[a][b] = nb[a][b] + nb[b][a] - (transport_a * self.c[b] + transport_b * self.c[a]);
            }
        }
        s
    }

    /// `Theta_ab = Omega_ab - u^l (Omega_la u_b + Omega_lb u_a)`.
    pub fn theta(&self) -> M4 {
        let o = self.omega();
        let mut t = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let oa: f64 = (0..4).map(|l| self.u_up[l] * o[l][a]).sum();
                let ob: f64 = (0..4).map(|l| self.u_up[l] * o[l][b]).sum();
                t[a][b] = o[a][b] - (oa * self.u_dn[b] + ob * self.u_dn[a]);
            }
        }
        t
    }

    /// Full contraction `A^ab B_ab` with both indices raised by `g`.
    pub fn contract(&self, a: &M4, b: &M4) -> f64 {
        let mut v = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                let mut up = 0.0;
                for r in 0..4 {
                    for s in 0..4 {
                        up += self.ginv[m][r] * self.ginv[n][s] * a[r][s];
                    }
                }
                v += up * b[m][n];
            }
        }
        v
    }
}

/// Seeded analytic fields: a curved metric close to Minkowski, a covector
/// with nonzero vorticity and varying norm, an auxiliary covector and a
/// positive scalar standing in for the product of temperature and index.
#[derive(Debug, Clone)]
pub struct TestFamily {
    pub seed: u64,
    metric_waves: Vec<Wave<10>>,
    covector_mean: V4,
    covector_linear: M4,
    covector_waves: Vec<Wave<4>>,
    aux_waves: Vec<Wave<4>>,
}

#[derive(Debug, Clone)]
struct Wave<const K: usize> {
    k: V4,
    phase: f64,
    amp: [f64; K],
}

impl<const K: usize> Wave<K> {
    fn random(rng: &mut ChaCha8Rng, amp: f64) -> Self {
        Wave {
            k: std::array::from_fn(|_| rng.gen_range(-1.5..1.5)),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
            amp: std::array::from_fn(|_| rng.gen_range(-amp..amp)),
        }
    }

    fn eval(&self, x: V4) -> [f64; K] {
        let s = (dot(&self.k, &x) + self.phase).sin();
        self.amp.map(|a| a * s)
    }
}

const UPPER: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Seed of the standard test family.
pub const STANDARD_SEED: u64 = 1729;

impl TestFamily {
    pub fn standard() -> Self {
        Self::from_seed(STANDARD_SEED)
    }

    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let metric_waves = (0..3).map(|_| Wave::random(&mut rng, 0.08)).collect();
        let covector_mean = [3.0, rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
        let covector_linear = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-0.3..0.3)));
        let covector_waves = (0..3).map(|_| Wave::random(&mut rng, 0.25)).collect();
        let aux_waves = (0..3).map(|_| Wave::random(&mut rng, 1.0)).collect();
        TestFamily { seed, metric_waves, covector_mean, covector_linear, covector_waves, aux_waves }
    }

    pub fn metric(&self) -> MetricFn {
        let waves = self.metric_waves.clone();
        Box::new(move |x| {
            let mut g = minkowski();
            for w in &waves {
                let v = w.eval(x);
                for (slot, &(a, b)) in UPPER.iter().enumerate() {
                    g[a][b] += v[slot];
                    if a != b {
                        g[b][a] += v[slot];
                    }
                }
            }
            g
        })
    }

    pub fn covector(&self) -> CovectorFn {
        let (mean, lin, waves) = (self.covector_mean, self.covector_linear, self.covector_waves.clone());
        Box::new(move |x| {
            let mut c = mean;
            for a in 0..4 {
                c[a] += dot(&lin[a], &x) + 0.5 * lin[a][a] * x[a] * x[(a + 1) % 4];
            }
            for w in &waves {
                let v = w.eval(x);
                for a in 0..4 {
                    c[a] += v[a];
                }
            }
            c
        })
    }

    /// Auxiliary covector for the conformal connection check.
    pub fn auxiliary(&self) -> CovectorFn {
        let waves = self.aux_waves.clone();
        Box::new(move |x| {
            let mut v = [0.3, -0.2, 0.5, 0.1];
            for w in &waves {
                let e = w.eval(x);
                for a in 0..4 {
                    v[a] += e[a];
                }
            }
            v
        })
    }

    pub fn theta_r(&self) -> ScalarFn {
        Box::new(|x| 2.0 + (x[0] + x[1] - x[3]).sin())
    }

    pub fn patch(&self, lattice: Lattice) -> Result<FieldPatch, LabError> {
        FieldPatch::new(lattice, self.metric(), self.covector())
    }
}

pub fn minkowski() -> M4 {
    let mut g = [[0.0; 4]; 4];
    g[0][0] = 1.0;
    for (i, row) in g.iter_mut().enumerate().skip(1) {
        row[i] = -1.0;
    }
    g
}

/// Constant Minkowski metric with a constant timelike covector.
pub fn flat_patch(lattice: Lattice, c: V4) -> Result<FieldPatch, LabError> {
    FieldPatch::new(lattice, Box::new(|_| minkowski()), Box::new(move |_| c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_small_patch_is_rejected() {
        assert!(matches!(Lattice::new(4, 0.1), Err(LabError::PatchTooSmall { nodes: 4, .. })));
        assert!(Lattice::new(5, 0.1).is_ok());
        assert!(matches!(Lattice::new(5, 0.0), Err(LabError::InvalidSpacing(_))));
    }

    #[test]
    fn lattice_indexing_round_trips() {
        let l = Lattice::new(6, 0.2).unwrap();
        for k in [0, 17, 555, l.len() - 1] {
            assert_eq!(l.index(l.multi_index(k)), k);
        }
        assert_eq!(l.coords([0, 0, 0, 0]), [-0.5; 4]);
        assert_eq!(l.interior().len(), 4usize.pow(4));
    }

    #[test]
    fn flat_metric_has_vanishing_connection() {
        let p = flat_patch(Lattice::new(5, 0.1).unwrap(), [2.0, 0.1, 0.0, 0.3]).unwrap();
        for (_, gamma) in christoffel(&p).unwrap() {
            assert!(gamma.iter().flatten().flatten().all(|&v| v == 0.0));
        }
        for (_, d) in cov_deriv(&p).unwrap() {
            assert!(d.iter().flatten().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn connection_matches_analytic_conformally_flat_metric() {
        // g = e^{2 phi} eta with phi = 0.3 x0 gives Gamma^l_mn = d_m phi delta^l_n
        // + d_n phi delta^l_m - eta_mn eta^lr d_r phi.
        let lat = Lattice::new(5, 0.05).unwrap();
        let metric: MetricFn = Box::new(|x| minkowski().map(|r| r.map(|v| v * (0.6 * x[0]).exp())));
        let p = FieldPatch::new(lat, metric, Box::new(|_| [1.0, 0.0, 0.0, 0.0])).unwrap();
        let (_, gamma) = christoffel(&p).unwrap()[0];
        let eta = minkowski();
        let dphi = [0.3, 0.0, 0.0, 0.0];
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    let exact = dphi[m] * d(l, n) + dphi[n] * d(l, m) - eta[m][n] * eta[l][l] * dphi[l];
                    assert!((gamma[l][m][n] - exact).abs() < 1e-3, "{l}{m}{n}");
                }
            }
        }
    }

    #[test]
    fn standard_family_is_admissible() {
        let fam = TestFamily::standard();
        let p = fam.patch(Lattice::new(9, 0.1).unwrap()).unwrap();
        let n = p.node([4, 4, 4, 4]);
        assert!(n.f > 1.0);
        assert!(n.omega().iter().flatten().any(|v| v.abs() > 0.05));
        assert!(dot(&n.u_up, &n.df).abs() > 1e-3);
    }
}
