use serde::Serialize;

use super::hyper::{line_roots, HyperbolicityError};
use crate::poly::{Assignment, Poly};
use crate::rational::{to_f64, Q};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeRow {
    pub direction: [f64; 4],
    /// Real roots `s` of `p(eta + s tau)`, ascending, repeated by multiplicity.
    pub roots: Vec<f64>,
    /// Whether the roots stay between the outermost light-cone roots.
    pub inside_light_cone: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSamples {
    pub factor: String,
    pub degree: u32,
    pub rows: Vec<ConeRow>,
    pub max_abs_root: f64,
    pub inside_light_cone: Option<bool>,
}

fn real_roots(p: &Poly, tau: &[Q; 4], directions: &[[Q; 4]], tol: f64) -> Vec<Vec<f64>> {
    line_roots(p, tau, directions)
        .into_iter()
        .map(|row| {
            let mut out = Vec::new();
            for r in row.roots {
                if r.im.abs() <= tol * (1.0 + r.re.abs()) {
                    out.extend(std::iter::repeat_n(r.re, r.multiplicity));
                }
            }
            out.sort_by(f64::total_cmp);
            out
        })
        .collect()
}

/// Root sheets of `p` along `eta + s tau` for each direction. With a light
/// cone supplied, each row also records whether its roots lie between the
/// light cone's outermost roots (within `tol`).
pub fn cone_sample(
    name: &str,
    p: &Poly,
    tau: &[Q; 4],
    params: &Assignment,
    directions: &[[Q; 4]],
    light: Option<&Poly>,
    tol: f64,
) -> Result<ConeSamples, HyperbolicityError> {
    let prepared = |poly: &Poly| -> Result<Poly, HyperbolicityError> {
        let r = poly.partial_eval(params);
        match r.atoms().into_iter().find(|a| !a.is_covector()) {
            Some(a) => Err(HyperbolicityError::Unassigned(a.to_string())),
            None => Ok(r),
        }
    };
    let p = prepared(p)?;
    let sheets = real_roots(&p, tau, directions, tol);
    let light_sheets = match light {
        Some(l) => Some(real_roots(&prepared(l)?, tau, directions, tol)),
        None => None,
    };
    let mut rows = Vec::with_capacity(directions.len());
    let mut max_abs_root = 0.0f64;
    for (i, (eta, roots)) in directions.iter().zip(sheets).enumerate() {
        for r in &roots {
            max_abs_root = max_abs_root.max(r.abs());
        }
        let inside = light_sheets.as_ref().map(|ls| {
            let l = &ls[i];
            match (l.first(), l.last()) {
                (Some(lo), Some(hi)) => {
                    let slack = tol * (1.0 + lo.abs().max(hi.abs()));
                    roots.iter().all(|r| *r >= lo - slack && *r <= hi + slack)
                }
                _ => false,
            }
        });
        rows.push(ConeRow {
            direction: std::array::from_fn(|k| to_f64(&eta[k])),
            roots,
            inside_light_cone: inside,
        });
    }
    let inside_light_cone = light.map(|_| rows.iter().all(|r| r.inside_light_cone == Some(true)));
    Ok(ConeSamples {
        factor: name.to_string(),
        degree: p.xi_degree(),
        rows,
        max_abs_root,
        inside_light_cone,
    })
}

fn fmt_f(x: f64) -> String {
    let s = format!("{x:.12}");
    // avoid a signed zero in the output
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

impl ConeSamples {
    /// CSV with one row per direction: `eta0..eta3` then the sorted roots.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut header: Vec<String> = (0..4).map(|k| format!("eta{k}")).collect();
        header.extend((1..=self.degree).map(|k| format!("s{k}")));
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec: Vec<String> = row.direction.iter().map(|x| fmt_f(*x)).collect();
            rec.extend(row.roots.iter().map(|x| fmt_f(*x)));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sphere::transverse_directions;
    use crate::poly::p;
    use crate::rational::q;

    #[test]
    fn light_cone_roots_are_unit() {
        let dt = [q(1), q(0), q(0), q(0)];
        let dirs = transverse_directions(&dt, 40, 0);
        let light = p("xi0^2 - xi1^2 - xi2^2 - xi3^2");
        let c = cone_sample("light", &light, &dt, &Assignment::new(), &dirs, Some(&light), 1e-9).unwrap();
        assert_eq!(c.rows.len(), 40);
        for r in &c.rows {
            assert_eq!(r.roots.len(), 2);
            assert!((r.roots[0] + 1.0).abs() < 1e-12 && (r.roots[1] - 1.0).abs() < 1e-12);
        }
        assert_eq!(c.inside_light_cone, Some(true));
        let flow = cone_sample("flow", &p("xi0"), &dt, &Assignment::new(), &dirs, Some(&light), 1e-9).unwrap();
        assert!(flow.rows.iter().all(|r| r.roots == vec![0.0]));
        let csv = flow.to_csv();
        assert!(csv.starts_with("eta0,eta1,eta2,eta3,s1\n"));
        assert_eq!(csv.lines().count(), 41);
        // a cone wider than the light cone is flagged
        let wide = cone_sample("w", &p("xi0^2 - 4*xi1^2 - 4*xi2^2 - 4*xi3^2"), &dt, &Assignment::new(), &dirs, Some(&light), 1e-9).unwrap();
        assert_eq!(wide.inside_light_cone, Some(false));
    }
}
