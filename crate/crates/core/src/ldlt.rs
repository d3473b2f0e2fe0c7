//! Symmetric LDLᵀ with 1×1 pivoting and a non-positivity witness.

use num_traits::Zero;

use crate::matrix::{primitive_int_vector, Matrix, SymMatrix};
use crate::num::{Field, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Posdef,
    Semidefinite,
    Indefinite,
}

/// `P A Pᵗ = L D Lᵗ` where `P` reorders rows by `perm` (row `k` of `PAPᵗ` is row `perm[k]` of `A`).
///
/// `direction` is set when some pivot is `≤ 0`: a vector `w` with `wᵗ A w ≤ 0`, `w ≠ 0`,
/// taken at the first such pivot before any reordering happens.
#[derive(Debug, Clone)]
pub struct Ldlt<T> {
    pub status: Definiteness,
    pub perm: Vec<usize>,
    pub l: Matrix<T>,
    pub d: Vec<T>,
    pub direction: Option<Vec<T>>,
    /// False when the trailing block has a zero diagonal but nonzero off-diagonal entries,
    /// where no 1×1 pivot exists; `L`, `D` then only cover the processed columns.
    pub complete: bool,
}

pub fn ldlt_generic<T: Field>(a: &Matrix<T>) -> Ldlt<T> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "square matrix required");
    let mut s = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = Matrix::<T>::identity(n);
    let mut d = vec![T::zero(); n];
    let mut direction = None;
    let mut status = Definiteness::Posdef;
    let mut reordered = false;
    let mut complete = true;

    let mut k = 0;
    while k < n {
        if direction.is_none() && !reordered && s[(k, k)] <= T::zero() {
            // Lᵗ w = e_k restricted to the leading block.
            let mut w = vec![T::zero(); n];
            w[k] = T::one();
            for i in (0..k).rev() {
                let mut acc = T::zero();
                for j in i + 1..=k {
                    acc = acc + l[(j, i)].clone() * w[j].clone();
                }
                w[i] = -acc;
            }
            direction = Some(w);
        }
        for i in k..n {
            if s[(i, i)].is_zero() {
                if (k..n).any(|j| j != i && !s[(i, j)].is_zero()) {
                    status = Definiteness::Indefinite;
                } else if status == Definiteness::Posdef {
                    status = Definiteness::Semidefinite;
                }
            }
        }
        // First nonzero diagonal in the trailing block.
        let Some(p) = (k..n).find(|&i| !s[(i, i)].is_zero()) else {
            complete = !(k..n).any(|i| (k..n).any(|j| i != j && !s[(i, j)].is_zero()));
            break;
        };
        if p != k {
            reordered = true;
            s.swap_rows(p, k);
            s = s.transpose();
            s.swap_rows(p, k);
            perm.swap(p, k);
            for j in 0..k {
                let tmp = l[(p, j)].clone();
                l[(p, j)] = l[(k, j)].clone();
                l[(k, j)] = tmp;
            }
        }
        let dk = s[(k, k)].clone();
        if dk < T::zero() {
            status = Definiteness::Indefinite;
        }
        for i in k + 1..n {
            l[(i, k)] = s[(i, k)].clone() / dk.clone();
        }
        for i in k + 1..n {
            if s[(i, k)].is_zero() {
                continue;
            }
            for j in k + 1..n {
                if !s[(k, j)].is_zero() {
                    s[(i, j)] = s[(i, j)].clone() - l[(i, k)].clone() * s[(k, j)].clone();
                }
            }
        }
        d[k] = dk;
        k += 1;
    }
    if status == Definiteness::Posdef && direction.is_some() {
        status = Definiteness::Semidefinite;
    }
    Ldlt { status, perm, l, d, direction, complete }
}

/// Result of [`ldlt`] on a rational symmetric matrix, with an integral witness.
#[derive(Debug, Clone)]
pub struct LdltResult {
    pub status: Definiteness,
    pub perm: Vec<usize>,
    pub l: Matrix<Rational>,
    pub d: Vec<Rational>,
    pub witness: Option<Vec<i64>>,
    pub complete: bool,
}

pub fn ldlt(g: &SymMatrix) -> LdltResult {
    let f = ldlt_generic(&g.to_full());
    let witness = f.direction.as_ref().and_then(|w| primitive_int_vector(w));
    LdltResult { status: f.status, perm: f.perm, l: f.l, d: f.d, witness, complete: f.complete }
}

/// Leading-minor test; cheaper than [`ldlt`] when only the answer is needed.
pub fn is_positive_definite(g: &SymMatrix) -> bool {
    let n = g.dim();
    let mut s = g.to_full();
    for k in 0..n {
        let dk = s[(k, k)].clone();
        if dk <= Rational::zero() {
            return false;
        }
        for i in k + 1..n {
            if s[(i, k)].is_zero() {
                continue;
            }
            let f = &s[(i, k)] / &dk;
            for j in k + 1..n {
                if !s[(k, j)].is_zero() {
                    s[(i, j)] = &s[(i, j)] - &(&f * &s[(k, j)]);
                }
            }
        }
    }
    true
}
