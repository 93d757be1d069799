//! Deterministic, exactly rational points on the unit 2-sphere.
//!
//! A Halton point in the unit square is mapped to the sphere by the
//! area-preserving cylinder map, projected stereographically, rounded to a
//! dyadic grid and mapped back with the exact inverse projection. The
//! result lies on the sphere exactly and stays low-discrepancy.

use num_traits::{One, Zero};

use crate::rational::{from_f64_grid, to_f64, Q};

const GRID: i64 = 1 << 14;

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` points on the unit sphere; `seed` shifts the Halton index.
pub fn sphere_points(n: usize, seed: u64) -> Vec<[Q; 3]> {
    (0..n as u64)
        .map(|i| {
            let k = i + 1 + seed;
            let z = 1.0 - 2.0 * halton(k, 2);
            let phi = 2.0 * std::f64::consts::PI * halton(k, 3);
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (x, y) = (rho * phi.cos(), rho * phi.sin());
            // project from the south pole, which the sequence never hits
            let s = 1.0 + z;
            let big_x = from_f64_grid(x / s, GRID);
            let big_y = from_f64_grid(y / s, GRID);
            inverse_stereographic(&big_x, &big_y)
        })
        .collect()
}

/// Exact inverse of the projection from `(0, 0, -1)`.
pub fn inverse_stereographic(x: &Q, y: &Q) -> [Q; 3] {
    let r2 = x * x + y * y;
    let d = &r2 + Q::one();
    let two = Q::one() + Q::one();
    [&two * x / &d, &two * y / &d, (Q::one() - r2) / d]
}

/// A rational basis of the Euclidean complement of `tau` in covector space.
pub fn transverse_basis(tau: &[Q; 4]) -> [[Q; 4]; 3] {
    let k = (0..4)
        .max_by(|&a, &b| to_f64(&tau[a]).abs().total_cmp(&to_f64(&tau[b]).abs()).then(b.cmp(&a)))
        .unwrap();
    assert!(!tau[k].is_zero(), "tau must be nonzero");
    let others: Vec<usize> = (0..4).filter(|&j| j != k).collect();
    std::array::from_fn(|i| {
        let j = others[i];
        let mut v: [Q; 4] = std::array::from_fn(|_| Q::zero());
        v[j] = Q::one();
        v[k] = -(&tau[j] / &tau[k]);
        v
    })
}

/// Directions `eta` transverse to `tau`, built from sphere points in the
/// transverse basis. For `tau = dt` they are `(0, n)` with `|n| = 1`.
pub fn transverse_directions(tau: &[Q; 4], n: usize, seed: u64) -> Vec<[Q; 4]> {
    let basis = transverse_basis(tau);
    sphere_points(n, seed)
        .into_iter()
        .map(|s| {
            std::array::from_fn(|c| {
                (0..3).fold(Q::zero(), |acc, i| acc + &s[i] * &basis[i][c])
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn points_are_exactly_unit() {
        let pts = sphere_points(500, 0);
        for p in &pts {
            assert_eq!(&p[0] * &p[0] + &p[1] * &p[1] + &p[2] * &p[2], Q::one());
        }
        // coverage: every octant is visited
        let mut octants = [false; 8];
        for p in &pts {
            let idx = (p[0] > Q::zero()) as usize
                | ((p[1] > Q::zero()) as usize) << 1
                | ((p[2] > Q::zero()) as usize) << 2;
            octants[idx] = true;
        }
        assert!(octants.iter().all(|o| *o));
        assert_eq!(sphere_points(10, 3), sphere_points(10, 3));
    }

    #[test]
    fn transverse_to_tau() {
        let tau = [q(2), q(1), q(0), q(-1)];
        for eta in transverse_directions(&tau, 50, 0) {
            let dot = (0..4).fold(Q::zero(), |acc, i| acc + &eta[i] * &tau[i]);
            assert!(dot.is_zero());
        }
        let dt = [q(1), q(0), q(0), q(0)];
        for eta in transverse_directions(&dt, 20, 0) {
            assert!(eta[0].is_zero());
        }
    }
}
