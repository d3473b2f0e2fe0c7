//! Hermite and Smith normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::Matrix;
use crate::num::Rational;
use crate::Error;

pub type IntMatrix = Matrix<BigInt>;

/// Lower-triangular row HNF of the lattice spanned by the integer rows of `m`.
///
/// Output rows `h_0..h_{n-1}`: `h_i` is supported on columns `0..=i`, with `h_ii > 0`
/// and `0 ≤ h_ij < h_jj` for `j < i`.
pub fn hnf_rows(m: &[Vec<BigInt>], n: usize) -> Result<Vec<Vec<BigInt>>, Error> {
    let mut rows: Vec<Vec<BigInt>> = m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis: Vec<Option<Vec<BigInt>>> = vec![None; n];
    for c in (0..n).rev() {
        // gcd elimination on column c among remaining rows
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            let pv = rows[p][c].clone();
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = rows[i][c].div_floor(&pv);
                if !q.is_zero() {
                    let (src, dst) = if i < p {
                        let (a, b) = rows.split_at_mut(p);
                        (&b[0], &mut a[i])
                    } else {
                        let (a, b) = rows.split_at_mut(i);
                        (&a[p], &mut b[0])
                    };
                    for j in 0..=c {
                        if !src[j].is_zero() {
                            dst[j] -= &q * &src[j];
                        }
                    }
                }
            }
        }
        let Some(p) = (0..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            return Err(Error::RankDeficient);
        };
        let mut r = rows.remove(p);
        if r[c].is_negative() {
            for x in r.iter_mut() {
                *x = -&*x;
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        basis[c] = Some(r);
    }
    let mut h: Vec<Vec<BigInt>> = basis.into_iter().map(|r| r.unwrap()).collect();
    for i in 1..n {
        for j in (0..i).rev() {
            let q = h[i][j].div_floor(&h[j][j]);
            if !q.is_zero() {
                let hj = h[j].clone();
                for (k, v) in hj.iter().enumerate().take(j + 1) {
                    h[i][k] -= &q * v;
                }
            }
        }
    }
    Ok(h)
}

/// Canonical basis (rows) of the ℤ-module generated by the rational rows of `m`.
///
/// Denominators are cleared, the integer HNF is taken, and the result is scaled back.
pub fn hnf_basis(m: &Matrix<Rational>) -> Result<Matrix<Rational>, Error> {
    let n = m.cols();
    let l = (0..m.rows())
        .flat_map(|i| m.row(i).iter().map(|x| x.denom()))
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let ints: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.numer() * (&l / x.denom())).collect())
        .collect();
    let h = hnf_rows(&ints, n)?;
    let lr = Rational::from_bigint(l);
    Ok(Matrix::from_rows(
        h.into_iter().map(|r| r.into_iter().map(|x| Rational::from_bigint(x) / &lr).collect()).collect(),
    ))
}

/// Elementary divisors `d_1 | d_2 | …` of an integer matrix, including trivial ones
/// (one per unit of the rank).
pub fn snf_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.row_vecs();
    let rows = m.rows();
    let cols = m.cols();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let (top, rest) = a.split_at_mut(i);
                    for j in t..cols {
                        let v = &q * &top[t][j];
                        rest[0][j] -= v;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for r in a.iter_mut().skip(t) {
                        let v = &q * &r[t];
                        r[j] -= v;
                    }
                    if !a[t][j].is_zero() {
                        for r in a.iter_mut() {
                            r.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility: the pivot must divide the trailing block
            let mut fixed = true;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        let (top, rest) = a.split_at_mut(i);
                        for k in t..cols {
                            let v = rest[0][k].clone();
                            top[t][k] += v;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// `snf_divisors` on a small machine-integer square matrix, with the common unimodular
/// case (`|det| = 1`) short-circuited.
pub fn snf_divisors_i64(rows: &[Vec<i64>]) -> Vec<u64> {
    let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
    snf_divisors(&m).iter().map(|x| x.to_u64().expect("divisor fits u64")).collect()
}

/// Determinant of a small square integer matrix by fraction-free elimination.
pub fn det_i64(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
