use std::collections::HashMap;

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::poly::Poly;
use crate::rational::Q;

use super::SymbolMatrix;

/// Diagonal blocks of the finest block-triangular form reachable by a
/// simultaneous row/column permutation, with their determinants.
#[derive(Debug, Clone)]
pub struct BlockDeterminant {
    /// Scalar indices of each block, ascending within a block; blocks are
    /// ordered by their smallest index.
    pub blocks: Vec<Vec<usize>>,
    pub block_dets: Vec<Poly>,
}

impl BlockDeterminant {
    /// Product of the block determinants.
    pub fn expand(&self) -> Poly {
        Poly::product(self.block_dets.clone())
    }
}

/// Strongly connected components of the entry graph `i -> j` for every
/// nonzero entry `(i, j)`. Reordering rows and columns by the condensation
/// makes the matrix block triangular, so the determinant factors over them.
pub fn triangular_blocks(m: &SymbolMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut graph = DiGraph::<usize, ()>::with_capacity(n, m.nonzero_count());
    let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && !m.get(i, j).is_zero() {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            let mut idx: Vec<usize> = comp.into_iter().map(|v| graph[v]).collect();
            idx.sort_unstable();
            idx
        })
        .collect();
    blocks.sort();
    blocks
}

pub fn block_determinants(m: &SymbolMatrix) -> BlockDeterminant {
    let blocks = triangular_blocks(m);
    let block_dets = blocks
        .par_iter()
        .map(|b| det_poly(m.submatrix(b, b).entries))
        .collect();
    BlockDeterminant { blocks, block_dets }
}

/// Exact determinant, exploiting block-triangular structure.
pub fn determinant(m: &SymbolMatrix) -> Poly {
    block_determinants(m).expand()
}

/// Largest set of indices sharing one diagonal entry `d` whose principal
/// submatrix is `d` times the identity.
fn scalar_diagonal_group(a: &[Vec<Poly>]) -> Option<(Poly, Vec<usize>)> {
    let n = a.len();
    let mut best: Option<(Poly, Vec<usize>)> = None;
    let mut seen: Vec<&Poly> = Vec::new();
    for i in 0..n {
        let d = &a[i][i];
        if d.is_zero() || seen.contains(&d) {
            continue;
        }
        seen.push(d);
        let mut group: Vec<usize> = Vec::new();
        for j in i..n {
            if a[j][j] == *d && group.iter().all(|&k| a[j][k].is_zero() && a[k][j].is_zero()) {
                group.push(j);
            }
        }
        if group.len() >= 2 && best.as_ref().is_none_or(|(_, g)| g.len() < group.len()) {
            best = Some((d.clone(), group));
        }
    }
    best
}

/// Determinant with a Schur step: a block `d I` on indices `S` is
/// eliminated exactly via `det = d^(|S| - m) det(d G - E B)` where `m` is the
/// size of the remaining block; the remainder goes to Bareiss.
pub fn det_poly(a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    let Some((d, group)) = scalar_diagonal_group(&a) else {
        return bareiss(a);
    };
    let rest: Vec<usize> = (0..n).filter(|i| !group.contains(i)).collect();
    let m = rest.len();
    let schur: Vec<Vec<Poly>> = rest
        .par_iter()
        .map(|&r| {
            rest.iter()
                .map(|&c| {
                    let mut v = &d * &a[r][c];
                    for &i in &group {
                        if !a[r][i].is_zero() && !a[i][c].is_zero() {
                            v = &v - &(&a[r][i] * &a[i][c]);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let inner = if m == 0 { Poly::one() } else { det_poly(schur) };
    let k = group.len();
    if k >= m {
        &d.pow((k - m) as u32) * &inner
    } else {
        inner
            .exact_div(&d.pow((m - k) as u32))
            .expect("Schur complement determinant carries the diagonal power")
    }
}

/// Fraction-free Bareiss elimination over the polynomial ring. Row updates
/// below the pivot run in parallel.
pub fn bareiss(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        // sparsest nonzero pivot keeps intermediate entries small
        let pivot = (k..n)
            .filter(|&r| !a[r][k].is_zero())
            .min_by_key(|&r| (a[r][k].len(), r));
        let Some(p) = pivot else {
            return Poly::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pk = &pivot_row[k];
        let divide = !prev.constant_value().is_some_and(|c| c.is_one());
        bottom.par_iter_mut().for_each(|row| {
            let lead = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let mut v = pk * &row[j];
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v = &v - &(&lead * &pivot_row[j]);
                }
                row[j] = if divide {
                    v.exact_div(&prev).expect("Bareiss step must divide exactly")
                } else {
                    v
                };
            }
        });
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Gaussian elimination over the rationals.
pub fn det_rational(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Q::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = &row[k] / &pivot;
            for j in k + 1..n {
                if !pivot_row[j].is_zero() {
                    row[j] -= &f * &pivot_row[j];
                }
            }
            row[k] = Q::zero();
        }
    }
    det
}

/// Laplace expansion along the first row; exponential, for small oracles.
pub fn cofactor_det_poly(a: &[Vec<Poly>]) -> Poly {
    let n = a.len();
    if n == 0 {
        return Poly::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = Poly::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * &cofactor_det_poly(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Laplace expansion over the rationals, memoized on the set of remaining
/// columns so that 10x10 matrices stay cheap.
pub fn cofactor_det_rational(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    assert!(n <= 24, "cofactor oracle limited to 24x24");
    fn go(a: &[Vec<Q>], row: usize, cols: u32, memo: &mut HashMap<u32, Q>) -> Q {
        if row == a.len() {
            return Q::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Q::zero();
        let mut sign_pos = true;
        for j in 0..a.len() {
            if cols & (1 << j) == 0 {
                continue;
            }
            if !a[row][j].is_zero() {
                let sub = go(a, row + 1, cols & !(1 << j), memo);
                let term = &a[row][j] * sub;
                if sign_pos {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    go(a, 0, (1u32 << n) - 1, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::p;
    use crate::rational::{q, ratio};

    fn m(rows: &[&[&str]]) -> Vec<Vec<Poly>> {
        rows.iter().map(|r| r.iter().map(|t| p(t)).collect()).collect()
    }

    #[test]
    fn diagonal_is_product() {
        let a = m(&[&["xi0", "0", "0"], &["0", "xi1^2", "0"], &["0", "0", "F"]]);
        let sm = SymbolMatrix::from_rows(a.clone());
        assert_eq!(determinant(&sm), p("F*xi0*xi1^2"));
        assert_eq!(triangular_blocks(&sm).len(), 3);
        assert_eq!(bareiss(a), p("F*xi0*xi1^2"));
    }

    #[test]
    fn two_by_two_with_pivoting() {
        let a = m(&[&["0", "xi1"], &["xi0", "F"]]);
        assert_eq!(bareiss(a.clone()), p("-xi0*xi1"));
        assert_eq!(cofactor_det_poly(&a), p("-xi0*xi1"));
    }

    #[test]
    fn triangular_coupling_is_ignored() {
        let a = m(&[&["xi0", "q*xi1", "F"], &["0", "xi1", "xi2"], &["0", "xi3", "xi0"]]);
        let sm = SymbolMatrix::from_rows(a.clone());
        let bd = block_determinants(&sm);
        assert_eq!(bd.blocks, vec![vec![0], vec![1, 2]]);
        assert_eq!(determinant(&sm), cofactor_det_poly(&a));
    }

    #[test]
    fn schur_step_matches_cofactor() {
        let a = m(&[
            &["F*xi0", "0", "0", "q*xi1", "xi2"],
            &["0", "F*xi0", "0", "xi0", "0"],
            &["0", "0", "F*xi0", "0", "q*xi3"],
            &["xi1", "xi2", "0", "xi0^2", "xi1"],
            &["0", "xi3", "xi1", "F", "xi2^2 - xi0^2"],
        ]);
        assert_eq!(scalar_diagonal_group(&a).unwrap().1, vec![0, 1, 2]);
        assert_eq!(det_poly(a.clone()), cofactor_det_poly(&a));
        // more diagonal entries than remaining ones, and the reverse
        let b = m(&[&["xi0", "0", "xi1"], &["0", "xi0", "xi2"], &["xi3", "xi1", "F"]]);
        assert_eq!(det_poly(b.clone()), cofactor_det_poly(&b));
        let c = m(&[
            &["xi0", "0", "xi1", "F", "0"],
            &["0", "xi0", "0", "xi2", "xi3"],
            &["xi1", "xi3", "q", "xi0", "xi1"],
            &["xi2", "q", "xi0", "xi1", "F"],
            &["F", "xi2", "xi1", "q", "xi0"],
        ]);
        assert_eq!(det_poly(c.clone()), cofactor_det_poly(&c));
    }

    #[test]
    fn rational_paths_agree() {
        let a = vec![
            vec![q(2), ratio(1, 3), q(0)],
            vec![q(0), q(0), q(5)],
            vec![q(1), q(4), ratio(-1, 2)],
        ];
        let d = det_rational(a.clone());
        assert_eq!(d, cofactor_det_rational(&a));
        assert_eq!(d, ratio(-115, 3));
    }
}
