//! Eutaxy: `G⁻¹ = Σ λ_x xxᵗ` over the minimal vectors, with exact certificates.

use num_traits::{One, Signed, Zero};

use crate::face::{FaceDescription, LinearFace};
use crate::lattice::{min_vectors, GramMatrix};
use crate::ldlt::is_positive_definite;
use crate::lp::{maximize, LpResult};
use crate::matrix::{packed_len, Matrix, SymMatrix};
use crate::num::Rational;
use crate::{Error, IntVector, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EutaxyClass {
    None,
    Weak,
    Eutactic,
    Strong,
}

impl std::fmt::Display for EutaxyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EutaxyClass::None => "not weakly eutactic",
            EutaxyClass::Weak => "weakly eutactic",
            EutaxyClass::Eutactic => "eutactic",
            EutaxyClass::Strong => "strongly eutactic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct EutaxyResult {
    pub class: EutaxyClass,
    /// One coefficient per minimal pair, when some relation exists.
    pub coefficients: Option<Vec<(IntVector, Rational)>>,
}

impl EutaxyResult {
    /// Whether `Σ λ_x xxᵗ` equals `G⁻¹` exactly.
    pub fn verify(&self, g: &GramMatrix) -> bool {
        let Some(coef) = &self.coefficients else { return self.class == EutaxyClass::None };
        let n = g.dim();
        let mut sum = vec![Rational::zero(); packed_len(n)];
        for (x, l) in coef {
            for (s, v) in sum.iter_mut().zip(SymMatrix::outer_packed(x)) {
                *s += &(l * &v);
            }
        }
        let ok_sign = match self.class {
            EutaxyClass::Strong => coef.windows(2).all(|w| w[0].1 == w[1].1) && coef.iter().all(|c| c.1.is_positive()),
            EutaxyClass::Eutactic => coef.iter().all(|c| c.1.is_positive()),
            _ => true,
        };
        ok_sign && inverse_packed(g.sym()).map(|inv| inv == sum).unwrap_or(false)
    }
}

fn inverse_packed(g: &SymMatrix) -> Option<Vec<Rational>> {
    let inv = g.to_full().inverse()?;
    Some(SymMatrix::from_full(&inv)?.packed().to_vec())
}

/// Decides weak eutaxy by a linear solve, strong eutaxy with equal coefficients, and eutaxy by
/// maximizing the least coefficient over the solution space.
pub fn eutaxy_class(g: &GramMatrix) -> Result<EutaxyResult> {
    let n = g.dim();
    let hs = g.min_vectors().halfset;
    let rank = Matrix::from_rows(hs.iter().map(|x| x.iter().map(|&a| Rational::from_int(a)).collect()).collect()).rank();
    if rank < n {
        return Err(Error::Unsupported("minimal vectors do not span".into()));
    }
    let target = inverse_packed(g.sym()).ok_or(Error::NotPositiveDefinite)?;
    let cols: Vec<Vec<Rational>> = hs.iter().map(|x| SymMatrix::outer_packed(x)).collect();
    let m = target.len();
    let s = hs.len();
    let with = |lambda: Vec<Rational>| hs.iter().cloned().zip(lambda).collect::<Vec<_>>();

    // all equal
    let sum: Vec<Rational> = (0..m).map(|k| cols.iter().fold(Rational::zero(), |a, c| a + &c[k])).collect();
    if let Some(k) = sum.iter().position(|v| !v.is_zero()) {
        let c = &target[k] / &sum[k];
        if c.is_positive() && sum.iter().zip(&target).all(|(a, t)| &(a * &c) == t) {
            return Ok(EutaxyResult { class: EutaxyClass::Strong, coefficients: Some(with(vec![c; s])) });
        }
    }

    let a = Matrix::from_fn(m, s, |i, j| cols[j][i].clone());
    let Some(weak) = a.solve(&target) else {
        return Ok(EutaxyResult { class: EutaxyClass::None, coefficients: None });
    };

    // max t subject to Aλ = G⁻¹, λ_x ≥ t; variables (λ, t)
    let mut obj = vec![Rational::zero(); s + 1];
    obj[s] = Rational::one();
    let mut cons: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for i in 0..m {
        let mut row: Vec<Rational> = (0..s).map(|j| cols[j][i].clone()).collect();
        row.push(Rational::zero());
        let neg: Vec<Rational> = row.iter().map(|v| -v.clone()).collect();
        cons.push((row, target[i].clone()));
        cons.push((neg, -target[i].clone()));
    }
    for j in 0..s {
        let mut row = vec![Rational::zero(); s + 1];
        row[j] = Rational::one();
        row[s] = -Rational::one();
        cons.push((row, Rational::zero()));
    }
    match maximize(&obj, &cons) {
        LpResult::Optimal { point, .. } if point[s].is_positive() => {
            Ok(EutaxyResult { class: EutaxyClass::Eutactic, coefficients: Some(with(point[..s].to_vec())) })
        }
        LpResult::Optimal { .. } => Ok(EutaxyResult { class: EutaxyClass::Weak, coefficients: Some(with(weak)) }),
        _ => Err(Error::Consistency("eutaxy LP has no optimum".into())),
    }
}

/// Continued-fraction approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Rational {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.saturating_mul(h1).saturating_add(h0), ai.saturating_mul(k1).saturating_add(k0));
        if k2 > max_den || k2 <= 0 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-12 || (h1 as f64 / k1 as f64 - x).abs() < 1e-13 * x.abs().max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return Rational::from_int(x.round() as i64);
    }
    Rational::new(h1, k1)
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn to_f64(g: &SymMatrix) -> Vec<Vec<f64>> {
    let n = g.dim();
    (0..n).map(|i| (0..n).map(|j| g.get(i, j).to_f64()).collect()).collect()
}

fn inverse_f64(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        cols.push(solve_f64(a.to_vec(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

fn trace_prod(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[i][j] * b[j][i]).sum::<f64>()).sum()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Whether `g` lies in the class (`S(g)` equals `minimal`, same minimum) and `G⁻¹` is in the span
/// of the `xxᵗ`.
fn is_weakly_eutactic_in_class(g: &SymMatrix, min: &Rational, minimal: &[IntVector]) -> bool {
    if !is_positive_definite(g) {
        return false;
    }
    let mv = min_vectors(g);
    if &mv.min != min || mv.halfset != minimal {
        return false;
    }
    let Some(target) = inverse_packed(g) else { return false };
    let m = target.len();
    let cols: Vec<Vec<Rational>> = minimal.iter().map(|x| SymMatrix::outer_packed(x)).collect();
    Matrix::from_fn(m, cols.len(), |i, j| cols[j][i].clone()).solve(&target).is_some()
}

/// The weakly eutactic matrix of the face's minimal class, found as the maximizer of `det` on
/// the affine hull (Newton in floating point), rounded to nearby rationals and then verified
/// exactly. Returns `None` if no verified point is found.
pub fn weakly_eutactic_point(face: &FaceDescription) -> Option<GramMatrix> {
    let g0 = face.barycenter.sym().clone();
    let mv = min_vectors(&g0);
    let minimal = mv.halfset.clone();
    if is_weakly_eutactic_in_class(&g0, &mv.min, &minimal) {
        return Some(face.barycenter.clone());
    }
    let lin = LinearFace::new(g0.dim(), &minimal);
    let k = lin.dim();
    let dirs: Vec<Vec<Vec<f64>>> = lin.basis.iter().map(to_f64).collect();
    let base = to_f64(&g0);
    let point = |c: &[f64]| -> Vec<Vec<f64>> {
        let mut g = base.clone();
        for (d, t) in dirs.iter().zip(c) {
            for (row, drow) in g.iter_mut().zip(d) {
                for (x, y) in row.iter_mut().zip(drow) {
                    *x += t * y;
                }
            }
        }
        g
    };
    let mut c = vec![0.0; k];
    for _ in 0..100 {
        let g = point(&c);
        let inv = inverse_f64(&g)?;
        let grad: Vec<f64> = dirs.iter().map(|d| trace_prod(&inv, d)).collect();
        if grad.iter().all(|v| v.abs() < 1e-13) {
            break;
        }
        let prods: Vec<Vec<Vec<f64>>> = dirs.iter().map(|d| mat_mul(&inv, d)).collect();
        let hess: Vec<Vec<f64>> = (0..k).map(|a| (0..k).map(|b| trace_prod(&prods[a], &prods[b])).collect()).collect();
        let step = solve_f64(hess, grad)?;
        // damped step keeping positive definiteness
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = c.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            let h = point(&trial);
            if cholesky_ok(&h) {
                c = trial;
                break;
            }
            t /= 2.0;
            if t < 1e-12 {
                return None;
            }
        }
    }
    for max_den in [10i64, 100, 1000, 10_000, 100_000, 1_000_000] {
        let cr: Vec<Rational> = c.iter().map(|&x| rationalize(x, max_den)).collect();
        let g = g0.add(&lin.direction(&cr));
        if is_weakly_eutactic_in_class(&g, &mv.min, &minimal) {
            return GramMatrix::new(g).ok();
        }
    }
    None
}

fn cholesky_ok(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return false;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    true
}
