//! Finite-difference checks of tensor identities for the rescaled fluid
//! variables on analytic test fields.
//!
//! A [`FieldPatch`] samples a metric `g` and a timelike covector `C` on a
//! uniform lattice; `F = sqrt(C^a C_a)`, `u = C / F`, the conformal metric
//! `F^2 g` and `log F` are sampled alongside. Every derived tensor is built
//! at a node from central differences of those samples, and each identity
//! compares two independently assembled sides. Convergence under `h -> h/2`
//! at the second-order rate is the verdict; mutated identities must not
//! converge.

mod identities;
mod patch;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::Check;

pub use identities::{entropy_production, residual, shear_square, Identity, Invariant};
pub use patch::{
    christoffel, christoffel_from, cov_deriv, cov_deriv_covector, cov_deriv_tensor, cov_deriv_vector,
    flat_patch, is_lorentzian, minkowski, CovectorFn, FieldPatch, Lattice, MetricFn, NodeFields,
    ScalarFn, TestFamily, M4, MIN_NODES, STANDARD_SEED, T3, V4,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("patch has {nodes} nodes per axis; central differences need at least {min}")]
    PatchTooSmall { nodes: usize, min: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("refinement level count must be at least 1")]
    InvalidRefine,
    #[error("metric is not Lorentzian (+,-,-,-) at {at:?}")]
    NotLorentzian { at: V4 },
    #[error("covector is not timelike at {at:?}")]
    NotTimelike { at: V4 },
}

/// Acceptance band for the two-grid ratio of a second-order scheme.
pub const RATIO_BAND: (f64, f64) = (3.5, 4.5);
/// Rounding allowance for the algebraic invariants.
pub const INVARIANT_TOL: f64 = 1e-10;

pub fn ratio_in_band(r: f64) -> bool {
    r >= RATIO_BAND.0 && r <= RATIO_BAND.1
}

/// Sign checks pass within `10 h^2`.
pub fn fd_tolerance(h: f64) -> f64 {
    10.0 * h * h
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    /// Coarsest spacing.
    pub h: f64,
    /// Nodes per axis on the coarsest grid; the physical extent is kept
    /// fixed under refinement.
    pub nodes: usize,
    /// Number of grids, each halving the spacing of the previous one.
    pub refine: usize,
    pub vartheta: f64,
    pub seed: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { h: 0.1, nodes: 9, refine: 2, vartheta: -1.0, seed: STANDARD_SEED }
    }
}

impl LabConfig {
    pub fn lattices(&self) -> Result<Vec<Lattice>, LabError> {
        if self.refine == 0 {
            return Err(LabError::InvalidRefine);
        }
        (0..self.refine)
            .map(|j| {
                let s = 1usize << j;
                Lattice::new((self.nodes.max(1) - 1) * s + 1, self.h / s as f64)
                    .map_err(|e| match e {
                        LabError::PatchTooSmall { .. } => LabError::PatchTooSmall { nodes: self.nodes, min: MIN_NODES },
                        other => other,
                    })
            })
            .collect()
    }
}

/// Residual of one identity on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    /// Max of the componentwise absolute difference over the interior nodes
    /// of the coarsest grid, which every refined grid contains.
    pub residual: f64,
    pub h: f64,
    /// `residual(2h) / residual(h)`; absent on the coarsest grid.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Identity,
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub name: String,
    pub kind: RowKind,
    pub levels: Vec<IdentityResidual>,
    /// Identities: every ratio in the band. Controls: no ratio in the band.
    /// `None` with a single grid.
    pub converges: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantRow {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

/// Pointwise sign statements on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignLevel {
    pub h: f64,
    pub tolerance: f64,
    /// Range of `Sigma^ab Sigma_ab`.
    pub shear_square_min: f64,
    pub shear_square_max: f64,
    /// Minimum of `(vartheta / 2F) Sigma^ab Sigma_ab`.
    pub entropy_min: f64,
    /// Minimum of the implied `u^a d_a s`, dividing by the `theta r` field.
    pub entropy_rate_min: f64,
    /// Minimum with the sign of `vartheta` reversed.
    pub flipped_entropy_min: f64,
    /// Max of `|E(vartheta) + E(-vartheta)|`.
    pub flip_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignReport {
    pub vartheta: f64,
    pub convention: String,
    pub levels: Vec<SignLevel>,
    /// `Sigma^ab Sigma_ab <= tol` at every node.
    pub shear_square_nonpositive: bool,
    /// `(vartheta / 2F) Sigma^ab Sigma_ab >= -tol` at every node.
    pub entropy_nonnegative: bool,
    /// Reversing `vartheta` reverses the production exactly.
    pub flip_control: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabReport {
    pub seed: u64,
    pub spacings: Vec<f64>,
    pub nodes: Vec<usize>,
    pub rows: Vec<ConvergenceRow>,
    pub invariants: Vec<InvariantRow>,
    pub signs: SignReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl LabReport {
    /// Residual-vs-spacing table, one line per identity and grid.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["identity", "kind", "h", "residual", "ratio"]).expect("in-memory write");
        for row in &self.rows {
            let kind = match row.kind {
                RowKind::Identity => "identity",
                RowKind::Control => "control",
            };
            for l in &row.levels {
                let ratio = l.ratio.map(|r| format!("{r:.6}")).unwrap_or_default();
                w.write_record([
                    row.name.clone(),
                    kind.to_string(),
                    format!("{}", l.h),
                    format!("{:.6e}", l.residual),
                    ratio,
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

struct Sweep {
    identities: Vec<f64>,
    controls: Vec<f64>,
    invariants: Vec<f64>,
    shear_min: f64,
    shear_max: f64,
    entropy_min: f64,
    rate_min: f64,
    flipped_min: f64,
    flip_residual: f64,
}

fn controlled() -> Vec<Identity> {
    Identity::ALL.into_iter().filter(|i| i.mutation().is_some()).collect()
}

impl Sweep {
    fn empty() -> Self {
        Sweep {
            identities: vec![0.0; Identity::ALL.len()],
            controls: vec![0.0; controlled().len()],
            invariants: vec![0.0; Invariant::ALL.len()],
            shear_min: f64::INFINITY,
            shear_max: f64::NEG_INFINITY,
            entropy_min: f64::INFINITY,
            rate_min: f64::INFINITY,
            flipped_min: f64::INFINITY,
            flip_residual: 0.0,
        }
    }

    fn merge(mut self, o: Sweep) -> Sweep {
        let maxv = |a: &mut Vec<f64>, b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(*y));
        maxv(&mut self.identities, &o.identities);
        maxv(&mut self.controls, &o.controls);
        maxv(&mut self.invariants, &o.invariants);
        self.shear_min = self.shear_min.min(o.shear_min);
        self.shear_max = self.shear_max.max(o.shear_max);
        self.entropy_min = self.entropy_min.min(o.entropy_min);
        self.rate_min = self.rate_min.min(o.rate_min);
        self.flipped_min = self.flipped_min.min(o.flipped_min);
        self.flip_residual = self.flip_residual.max(o.flip_residual);
        self
    }
}

/// Identity residuals on the probe nodes shared by every grid; invariants
/// and signs on all interior nodes.
fn sweep(patch: &FieldPatch, family: &TestFamily, vartheta: f64, probe_stride: usize) -> Sweep {
    let aux = family.auxiliary();
    let theta_r = family.theta_r();
    let ctl = controlled();
    patch
        .lattice
        .interior()
        .into_par_iter()
        .map(|i| {
            let (n, v, dv) = identities::node_with_aux(patch, aux.as_ref(), i);
            let ss = shear_square(&n);
            let e = entropy_production(&n, vartheta);
            let ef = entropy_production(&n, -vartheta);
            let probe = i.iter().all(|k| k % probe_stride == 0);
            let on_probe = |f: &dyn Fn() -> f64| if probe { f() } else { 0.0 };
            Sweep {
                identities: Identity::ALL
                    .iter()
                    .map(|&id| on_probe(&|| residual(id, &n, (&v, &dv), false)))
                    .collect(),
                controls: ctl.iter().map(|&id| on_probe(&|| residual(id, &n, (&v, &dv), true))).collect(),
                invariants: Invariant::ALL.iter().map(|inv| inv.residual(&n)).collect(),
                shear_min: ss,
                shear_max: ss,
                entropy_min: e,
                rate_min: e / theta_r(n.x),
                flipped_min: ef,
                flip_residual: (e + ef).abs(),
            }
        })
        .reduce(Sweep::empty, Sweep::merge)
}

fn convergence_row(name: String, kind: RowKind, spacings: &[f64], residuals: &[f64]) -> ConvergenceRow {
    let levels: Vec<IdentityResidual> = spacings
        .iter()
        .zip(residuals)
        .enumerate()
        .map(|(j, (&h, &r))| IdentityResidual {
            name: name.clone(),
            residual: r,
            h,
            ratio: (j > 0).then(|| residuals[j - 1] / r),
        })
        .collect();
    let ratios: Vec<f64> = levels.iter().filter_map(|l| l.ratio).collect();
    let converges = (!ratios.is_empty()).then(|| match kind {
        RowKind::Identity => ratios.iter().all(|&r| ratio_in_band(r)),
        RowKind::Control => ratios.iter().any(|&r| ratio_in_band(r)),
    });
    let finite = residuals.iter().all(|r| r.is_finite());
    let pass = finite
        && match (kind, converges) {
            (RowKind::Identity, Some(c)) => c,
            (RowKind::Control, Some(c)) => !c,
            (_, None) => true,
        };
    ConvergenceRow { name, kind, levels, converges, pass }
}

/// Runs every identity, control, invariant and sign check on the seeded
/// test family over the configured grids.
pub fn run_lab(cfg: &LabConfig) -> Result<LabReport, LabError> {
    let lattices = cfg.lattices()?;
    let family = TestFamily::from_seed(cfg.seed);
    let mut sweeps = Vec::with_capacity(lattices.len());
    for (j, lat) in lattices.iter().enumerate() {
        let patch = family.patch(*lat)?;
        sweeps.push(sweep(&patch, &family, cfg.vartheta, 1 << j));
    }
    let spacings: Vec<f64> = lattices.iter().map(|l| l.h).collect();

    let mut rows = Vec::new();
    for (k, id) in Identity::ALL.iter().enumerate() {
        let res: Vec<f64> = sweeps.iter().map(|s| s.identities[k]).collect();
        rows.push(convergence_row(id.name().to_string(), RowKind::Identity, &spacings, &res));
    }
    for (k, id) in controlled().iter().enumerate() {
        let res: Vec<f64> = sweeps.iter().map(|s| s.controls[k]).collect();
        let name = format!("{}:{}", id.name(), id.mutation().unwrap_or_default());
        rows.push(convergence_row(name, RowKind::Control, &spacings, &res));
    }

    let invariants: Vec<InvariantRow> = Invariant::ALL
        .iter()
        .enumerate()
        .map(|(k, inv)| {
            let m = sweeps.iter().map(|s| s.invariants[k]).fold(0.0, f64::max);
            InvariantRow { name: inv.name().to_string(), max_residual: m, pass: m <= INVARIANT_TOL }
        })
        .collect();

    let levels: Vec<SignLevel> = sweeps
        .iter()
        .zip(&spacings)
        .map(|(s, &h)| SignLevel {
            h,
            tolerance: fd_tolerance(h),
            shear_square_min: s.shear_min,
            shear_square_max: s.shear_max,
            entropy_min: s.entropy_min,
            entropy_rate_min: s.rate_min,
            flipped_entropy_min: s.flipped_min,
            flip_residual: s.flip_residual,
        })
        .collect();
    let shear_square_nonpositive = levels.iter().all(|l| l.shear_square_max <= l.tolerance);
    let entropy_nonnegative = levels.iter().all(|l| l.entropy_min >= -l.tolerance);
    let flip_control = levels.iter().all(|l| {
        let scale = l.entropy_min.abs().max(l.flipped_entropy_min.abs());
        scale > 0.0 && l.flip_residual <= 1e-12 * scale
    });
    let signs = SignReport {
        vartheta: cfg.vartheta,
        convention: "metric signature (+,-,-,-); vartheta as configured".to_string(),
        levels,
        shear_square_nonpositive,
        entropy_nonnegative,
        flip_control,
    };

    let mut checks = Vec::new();
    for row in &rows {
        let detail = row
            .levels
            .iter()
            .map(|l| match l.ratio {
                Some(r) => format!("h={} residual={:.3e} ratio={:.3}", l.h, l.residual, r),
                None => format!("h={} residual={:.3e}", l.h, l.residual),
            })
            .collect::<Vec<_>>()
            .join("; ");
        let prefix = match row.kind {
            RowKind::Identity => "identity",
            RowKind::Control => "control",
        };
        checks.push(Check::new(format!("{prefix}:{}", row.name), row.pass, detail));
    }
    for inv in &invariants {
        checks.push(Check::new(
            format!("invariant:{}", inv.name),
            inv.pass,
            format!("max residual {:.3e}", inv.max_residual),
        ));
    }
    let fmt_levels = |f: &dyn Fn(&SignLevel) -> String| {
        signs.levels.iter().map(f).collect::<Vec<_>>().join("; ")
    };
    checks.push(Check::new(
        "sign:shear-square-nonpositive",
        signs.shear_square_nonpositive,
        fmt_levels(&|l| format!("h={} max={:.6e} tol={:.1e}", l.h, l.shear_square_max, l.tolerance)),
    ));
    checks.push(Check::new(
        "sign:entropy-production",
        signs.entropy_nonnegative,
        fmt_levels(&|l| format!("h={} vartheta={} min={:.6e} tol={:.1e}", l.h, cfg.vartheta, l.entropy_min, l.tolerance)),
    ));
    checks.push(Check::new(
        "sign:entropy-flip-control",
        signs.flip_control,
        fmt_levels(&|l| format!("h={} min={:.6e} flipped min={:.6e}", l.h, l.entropy_min, l.flipped_entropy_min)),
    ));
    let pass = checks.iter().all(|c| c.pass);
    Ok(LabReport {
        seed: cfg.seed,
        spacings,
        nodes: lattices.iter().map(|l| l.nodes).collect(),
        rows,
        invariants,
        signs,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattices_keep_extent() {
        let l = LabConfig { refine: 3, ..LabConfig::default() }.lattices().unwrap();
        assert_eq!(l.iter().map(|x| x.nodes).collect::<Vec<_>>(), vec![9, 17, 33]);
        assert!(l.iter().all(|x| (x.extent() - 0.8).abs() < 1e-12));
        assert_eq!(LabConfig { refine: 0, ..LabConfig::default() }.lattices(), Err(LabError::InvalidRefine));
        assert!(matches!(
            LabConfig { nodes: 4, ..LabConfig::default() }.lattices(),
            Err(LabError::PatchTooSmall { nodes: 4, .. })
        ));
    }

    #[test]
    fn single_grid_reports_no_ratio() {
        let r = run_lab(&LabConfig { refine: 1, nodes: 5, ..LabConfig::default() }).unwrap();
        assert!(r.rows.iter().all(|row| row.converges.is_none() && row.levels[0].ratio.is_none()));
        assert!(r.rows.iter().all(|row| row.levels[0].residual >= 0.0));
    }

    #[test]
    fn csv_has_row_per_identity_and_grid() {
        let r = run_lab(&LabConfig { nodes: 5, ..LabConfig::default() }).unwrap();
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + r.rows.len() * 2);
        assert!(csv.starts_with("identity,kind,h,residual,ratio"));
    }
}
