//! Isometry testing and automorphism groups by backtracking over images of basis vectors.

use crate::lattice::{shortest_vectors, GramMatrix};
use crate::matrix::{Matrix, SymMatrix};
use crate::num::Rational;
use crate::{Error, Result};

/// Automorphism group as generators `U` (with `UᵗGU = G`) and its order.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub generators: Vec<Matrix<i64>>,
    pub order: u128,
}

/// Integer Gram matrix proportional to `g` (same scaling for a pair).
fn scaled_pair(g1: &SymMatrix, g2: &SymMatrix) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let l = g1.denominator_lcm();
    let l2 = g2.denominator_lcm();
    let l = num_integer::Integer::lcm(&l, &l2);
    let to_int = |g: &SymMatrix| -> Result<Vec<Vec<i64>>> {
        let n = g.dim();
        let lr = Rational::from_bigint(l.clone());
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (g.get(i, j) * &lr).to_i64_exact().ok_or(Error::Overflow("isometry scaling")))
                    .collect()
            })
            .collect()
    };
    Ok((to_int(g1)?, to_int(g2)?))
}

struct Search {
    n: usize,
    /// Candidate images with both signs.
    cands: Vec<Vec<i64>>,
    /// `G1·c` for each candidate.
    gc: Vec<Vec<i64>>,
    norms: Vec<i64>,
    target: Vec<Vec<i64>>,
}

impl Search {
    fn new(g1: &[Vec<i64>], g2: &[Vec<i64>], s1: &SymMatrix, s2: &SymMatrix) -> Self {
        let n = g1.len();
        let bound = (0..n).map(|i| s2.get(i, i).clone()).max().expect("nonempty");
        let mut cands = Vec::new();
        for (v, _) in shortest_vectors(s1, &bound) {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            cands.push(v);
            cands.push(neg);
        }
        let gc: Vec<Vec<i64>> = cands.iter().map(|c| (0..n).map(|i| (0..n).map(|j| g1[i][j] * c[j]).sum()).collect()).collect();
        let norms = cands.iter().zip(&gc).map(|(c, g)| c.iter().zip(g).map(|(a, b)| a * b).sum()).collect();
        Search { n, cands, gc, norms, target: g2.to_vec() }
    }

    fn fits(&self, level: usize, c: usize, chosen: &[usize]) -> bool {
        if self.norms[c] != self.target[level][level] {
            return false;
        }
        chosen.iter().enumerate().all(|(j, &w)| {
            let ip: i64 = self.cands[w].iter().zip(&self.gc[c]).map(|(a, b)| a * b).sum();
            ip == self.target[level][j]
        })
    }

    fn extend(&self, chosen: &mut Vec<usize>) -> bool {
        let level = chosen.len();
        if level == self.n {
            return true;
        }
        for c in 0..self.cands.len() {
            if self.fits(level, c, chosen) {
                chosen.push(c);
                if self.extend(chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    fn matrix(&self, chosen: &[usize]) -> Matrix<i64> {
        Matrix::from_fn(self.n, self.n, |i, j| self.cands[chosen[j]][i])
    }
}

/// An integral `U` with `UᵗG1U = G2`, if the lattices are isometric.
pub fn isometry_test(g1: &GramMatrix, g2: &GramMatrix) -> Result<Option<Matrix<i64>>> {
    if g1.dim() != g2.dim() {
        return Ok(None);
    }
    if g1.det() != g2.det() {
        return Ok(None);
    }
    let (a, b) = scaled_pair(g1.sym(), g2.sym())?;
    let s = Search::new(&a, &b, g1.sym(), g2.sym());
    let mut chosen = Vec::new();
    Ok(s.extend(&mut chosen).then(|| s.matrix(&chosen)))
}

/// Automorphism group via the chain of pointwise stabilizers of `e_1, e_2, …`.
pub fn automorphisms(g: &GramMatrix) -> Result<AutGroup> {
    let (a, _) = scaled_pair(g.sym(), g.sym())?;
    let s = Search::new(&a, &a, g.sym(), g.sym());
    let n = s.n;
    let unit = |i: usize| -> usize {
        s.cands.iter().position(|c| c.iter().enumerate().all(|(k, &x)| x == i64::from(k == i))).expect("basis vector among candidates")
    };
    let ident: Vec<usize> = (0..n).map(unit).collect();
    let mut generators = Vec::new();
    let mut order: u128 = 1;
    for level in 0..n {
        let mut orbit = 0u128;
        for c in 0..s.cands.len() {
            let mut chosen = ident[..level].to_vec();
            if !s.fits(level, c, &chosen) {
                continue;
            }
            chosen.push(c);
            if s.extend(&mut chosen) {
                orbit += 1;
                if c != ident[level] {
                    generators.push(s.matrix(&chosen));
                }
            }
        }
        order = order.checked_mul(orbit).ok_or(Error::Overflow("automorphism group order"))?;
    }
    Ok(AutGroup { generators, order })
}

/// Checks `UᵗGU = G`.
pub fn is_automorphism(g: &GramMatrix, u: &Matrix<i64>) -> bool {
    g.sym().congruence_int(u) == *g.sym()
}

/// Applies `x ↦ Ux`.
pub fn apply(u: &Matrix<i64>, x: &[i64]) -> Vec<i64> {
    (0..u.rows()).map(|i| (0..u.cols()).map(|j| u[(i, j)] * x[j]).sum()).collect()
}
