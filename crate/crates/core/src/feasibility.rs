//! Realizability of a code: the cutting-plane loop over the Ryshkov polyhedron
//! restricted to `T_C = {G : G[ē⁽ⁱ⁾] = 1}`.
//!
//! Gram matrices are parametrized in the frame of the `e_i`: `G_e` has unit diagonal and
//! free off-diagonal entries (or the entries allowed by a symmetry group).
//! A lattice vector with coordinates `v` in the basis `B` has `e`-coordinates `u = Bᵗv`,
//! and `G_B[v] = G_e[u]`.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::codes::{code_automorphisms, Code, CodeGroup, SignedPerm};
use crate::lattice::{canonical, min_vectors, GramMatrix};
use crate::ldlt::{ldlt, Definiteness};
use crate::lp::{InequalityLp, LpResult};
use crate::matrix::{abs_max, Matrix, SymMatrix};
use crate::normal_form::hnf_basis;
use crate::num::Rational;
use crate::{Error, IntMatrix, IntVector, RatMatrix, Result};

/// A code together with the lattice `Λ = ⟨ℤⁿ, a⁽ⁱ⁾/d_i⟩` in HNF coordinates.
#[derive(Debug, Clone)]
pub struct CodeGeometry {
    pub code: Code,
    /// Basis of `Λ` as rows, in `e`-coordinates.
    pub basis: RatMatrix,
    /// Coordinates of `e_i` in the basis.
    pub ebar: Vec<IntVector>,
}

pub fn build_geometry(code: &Code) -> Result<CodeGeometry> {
    let n = code.n();
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    rows.extend(code.glue_vectors());
    let basis = hnf_basis(&Matrix::from_rows(rows))?;
    let inv = basis.inverse().ok_or(Error::RankDeficient)?;
    let ebar = (0..n)
        .map(|i| {
            inv.row(i)
                .iter()
                .map(|x| x.to_i64_exact().ok_or_else(|| Error::Consistency("non-integral e-coordinates".into())))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CodeGeometry { code: code.clone(), basis, ebar })
}

impl CodeGeometry {
    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// `[Λ : ℤⁿ]`.
    pub fn index(&self) -> i64 {
        self.code.order()
    }

    /// `e`-coordinates `Bᵗv` of a lattice vector.
    pub fn to_e(&self, v: &[i64]) -> Vec<Rational> {
        let n = self.n();
        (0..n)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .fold(Rational::zero(), |acc, (k, &x)| acc + self.basis[(k, j)].mul_i64(x))
            })
            .collect()
    }

    /// `G_B = B G_e Bᵗ`.
    pub fn gram_b(&self, g_e: &SymMatrix) -> SymMatrix {
        g_e.congruence(&self.basis.transpose())
    }

    /// `G_e` from `G_B`: entries `G_B(ē⁽ⁱ⁾, ē⁽ʲ⁾)`.
    pub fn gram_e(&self, g_b: &SymMatrix) -> SymMatrix {
        let n = self.n();
        let mut g = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                g.set(i, j, g_b.bilinear(&self.ebar[i], &self.ebar[j]));
            }
        }
        g
    }

    /// Matrix with the `ē⁽ⁱ⁾` as rows.
    pub fn ebar_matrix(&self) -> IntMatrix {
        Matrix::from_rows(self.ebar.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect())
    }

    /// Whether `G_B` realizes the code: `G_B[ē⁽ⁱ⁾] = 1` and `min G_B = 1`.
    pub fn realizes(&self, g_b: &SymMatrix) -> bool {
        if self.ebar.iter().any(|e| !g_b.evaluate(e).is_one()) {
            return false;
        }
        if !crate::ldlt::is_positive_definite(g_b) {
            return false;
        }
        min_vectors(g_b).min.is_one()
    }
}

/// `V₀ = {ē⁽ⁱ⁾} ∪ {ē⁽ⁱ⁾ ± ē⁽ʲ⁾ : i < j}`, canonical signs.
pub fn initial_vector_set(geom: &CodeGeometry) -> Vec<IntVector> {
    let n = geom.n();
    let mut out: Vec<IntVector> = geom.ebar.iter().map(|e| canonical(e)).collect();
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let v: Vec<i64> = geom.ebar[i].iter().zip(&geom.ebar[j]).map(|(a, b)| a + s * b).collect();
                out.push(canonical(&v));
            }
        }
    }
    out
}

/// Affine space `G_e = I + Σ y_k D_k` with `D_k` of zero diagonal, stored sparsely as
/// `(i, j, value)` with `i < j`.
#[derive(Debug, Clone)]
pub struct FaceSpace {
    n: usize,
    dirs: Vec<Vec<(usize, usize, Rational)>>,
}

impl FaceSpace {
    /// All of `T_C`.
    pub fn full(n: usize) -> Self {
        let dirs = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![(i, j, Rational::one())])).collect();
        FaceSpace { n, dirs }
    }

    /// `T_C ∩ T_G` for a signed-permutation group on the coordinates.
    pub fn invariant(n: usize, gens: &[SignedPerm]) -> Self {
        let dirs = invariant_subspace(n, gens)
            .into_iter()
            .filter(|m| (0..n).all(|i| m.get(i, i).is_zero()))
            .map(|m| {
                let mut v = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if !m.get(i, j).is_zero() {
                            v.push((i, j, m.get(i, j).clone()));
                        }
                    }
                }
                v
            })
            .collect();
        FaceSpace { n, dirs }
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn gram_e(&self, y: &[Rational]) -> SymMatrix {
        let mut g = SymMatrix::identity(self.n);
        for (yk, dk) in y.iter().zip(&self.dirs) {
            if yk.is_zero() {
                continue;
            }
            for (i, j, v) in dk {
                let cur = g.get(*i, *j).clone();
                g.set(*i, *j, cur + yk * v);
            }
        }
        g
    }

    /// Coefficients and right-hand side of `G_e[u] ≥ 1` in the parameters.
    pub fn row(&self, u: &[Rational]) -> (Vec<Rational>, Rational) {
        let coef = self
            .dirs
            .iter()
            .map(|dk| {
                dk.iter().fold(Rational::zero(), |acc, (i, j, v)| {
                    if u[*i].is_zero() || u[*j].is_zero() {
                        acc
                    } else {
                        acc + (v * &u[*i] * &u[*j]).mul_i64(2)
                    }
                })
            })
            .collect();
        let norm = u.iter().fold(Rational::zero(), |acc, x| acc + x * x);
        (coef, Rational::one() - norm)
    }

    /// Linear part `Σ y_k D_k` as a symmetric matrix.
    pub fn direction(&self, y: &[Rational]) -> SymMatrix {
        self.gram_e(y).sub(&SymMatrix::identity(self.n))
    }
}

/// Basis of `{G ∈ 𝒮ⁿ : G_{σ(t)σ(s)} = ε_t ε_s G_{ts}}` for the given generators.
///
/// Each basis element is supported on one orbit of index pairs; orbits on which the
/// signs are inconsistent contribute nothing.
pub fn invariant_subspace(n: usize, gens: &[SignedPerm]) -> Vec<SymMatrix> {
    let key = |a: usize, b: usize| if a <= b { (a, b) } else { (b, a) };
    let mut seen = vec![vec![false; n]; n];
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if seen[a][b] {
                continue;
            }
            let mut val: Vec<Vec<i64>> = vec![vec![0; n]; n];
            let mut ok = true;
            let mut queue = VecDeque::new();
            val[a][b] = 1;
            seen[a][b] = true;
            queue.push_back((a, b));
            while let Some((t, s)) = queue.pop_front() {
                for (sigma, eps) in gens {
                    let (p, q) = key(sigma[t], sigma[s]);
                    let v = eps[t] * eps[s] * val[t][s];
                    if val[p][q] == 0 {
                        val[p][q] = v;
                        seen[p][q] = true;
                        queue.push_back((p, q));
                    } else if val[p][q] != v {
                        ok = false;
                    }
                }
            }
            if ok {
                let mut m = SymMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        if val[i][j] != 0 {
                            m.set(i, j, Rational::from_int(val[i][j]));
                        }
                    }
                }
                out.push(m);
            }
        }
    }
    out
}

/// Signed permutations of the `e_i` preserving the code; they preserve the face.
pub fn face_group(geom: &CodeGeometry) -> CodeGroup {
    code_automorphisms(&geom.code)
}

/// The face automorphisms as unimodular matrices acting on basis coordinates: `U v` is the
/// image of the lattice vector `v`, so `U ē⁽ⁱ⁾ = ±ē⁽ʲ⁾`.
pub fn face_automorphisms(geom: &CodeGeometry) -> Result<Vec<IntMatrix>> {
    let group = face_group(geom);
    group.generators.iter().map(|g| signed_perm_matrix(geom, g)).collect()
}

/// Basis-coordinate matrix `Ēᵗ P Bᵗ` of a signed permutation `u ↦ Pu`, `(Pu)_t = ε_t u_{σ(t)}`.
pub fn signed_perm_matrix(geom: &CodeGeometry, g: &SignedPerm) -> Result<IntMatrix> {
    let n = geom.n();
    let (sigma, eps) = g;
    let bt = geom.basis.transpose();
    // P Bᵗ
    let pbt = Matrix::from_fn(n, n, |t, k| bt[(sigma[t], k)].mul_i64(eps[t]));
    let et = Matrix::from_fn(n, n, |r, t| Rational::from_int(geom.ebar[t][r]));
    let u = et.mul(&pbt);
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let x = &u[(r, k)];
            if !x.is_integer() {
                return Err(Error::Consistency("face automorphism is not integral".into()));
            }
            row.push(x.floor());
        }
        rows.push(row);
    }
    Ok(Matrix::from_rows(rows))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Inconclusive { reason: String },
}

#[derive(Debug, Clone)]
pub struct FeasibilityOptions {
    pub symmetrize: bool,
    /// Largest absolute coordinate allowed for an added vector.
    pub coord_cap: i64,
    pub max_iterations: usize,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions { symmetrize: false, coord_cap: 1000, max_iterations: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    /// Witness in the basis `B` (minimum 1).
    pub witness: Option<GramMatrix>,
    /// Final vector set `V` (basis coordinates).
    pub vectors: Vec<IntVector>,
    pub iterations: usize,
    pub lp_pivots: usize,
    pub space_dim: usize,
    /// Order of the symmetry group when symmetrizing.
    pub group_order: Option<u128>,
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Parameter space used by a run.
pub fn face_space(geom: &CodeGeometry, symmetrize: bool) -> (FaceSpace, Option<u128>) {
    if symmetrize {
        let g = face_group(geom);
        (FaceSpace::invariant(geom.n(), &g.generators), Some(g.order))
    } else {
        (FaceSpace::full(geom.n()), None)
    }
}

fn objective(geom: &CodeGeometry, space: &FaceSpace) -> Vec<Rational> {
    // Tr G_B = Σ_k G_e[B_k]
    let n = geom.n();
    let mut c = vec![Rational::zero(); space.dim()];
    for k in 0..n {
        let (coef, _) = space.row(geom.basis.row(k));
        for (ci, x) in c.iter_mut().zip(coef) {
            *ci += x;
        }
    }
    c
}

/// The cutting-plane loop: maximize `Tr G_B` over `P(V) ∩ T_C`; add indefiniteness
/// witnesses or the minimal vectors of the optimum until it has minimum 1 or `P(V) = ∅`.
pub fn feasibility(code: &Code, opts: &FeasibilityOptions) -> Result<FeasibilityOutcome> {
    let geom = build_geometry(code)?;
    feasibility_in(&geom, opts)
}

pub fn feasibility_in(geom: &CodeGeometry, opts: &FeasibilityOptions) -> Result<FeasibilityOutcome> {
    let (space, group_order) = face_space(geom, opts.symmetrize);
    let mut lp = InequalityLp::new(objective(geom, &space));
    let mut vectors: Vec<IntVector> = Vec::new();
    let mut seen: HashSet<IntVector> = HashSet::new();
    let mut add = |v: IntVector, lp: &mut InequalityLp<Rational>, vectors: &mut Vec<IntVector>| -> bool {
        let v = canonical(&v);
        if !seen.insert(v.clone()) {
            return false;
        }
        let (a, b) = space.row(&geom.to_e(&v));
        lp.add_constraint(a, b);
        vectors.push(v);
        true
    };
    for v in initial_vector_set(geom) {
        add(v, &mut lp, &mut vectors);
    }
    let outcome = |status, witness, vectors, it, lp: &InequalityLp<Rational>| FeasibilityOutcome {
        status,
        witness,
        vectors,
        iterations: it,
        lp_pivots: lp.pivots(),
        space_dim: space.dim(),
        group_order,
    };
    for it in 1..=opts.max_iterations {
        let y = match lp.solve() {
            LpResult::Infeasible => return Ok(outcome(FeasibilityStatus::Infeasible, None, vectors, it, &lp)),
            LpResult::Unbounded => return Err(Error::Consistency("unbounded trace on P(V0)".into())),
            LpResult::Optimal { point, .. } => point,
        };
        let g_e = space.gram_e(&y);
        let g_b = geom.gram_b(&g_e);
        let fac = ldlt(&g_b);
        let new: Vec<IntVector> = if fac.status != Definiteness::Posdef {
            match segment_cut(geom, &g_e, &g_b) {
                Some(cut) => cut,
                None => vec![fac.witness.ok_or_else(|| Error::Consistency("missing LDL witness".into()))?],
            }
        } else {
            let mv = min_vectors(&g_b);
            if mv.min >= Rational::one() {
                let witness = GramMatrix::new(g_b)?;
                return Ok(outcome(FeasibilityStatus::Feasible, Some(witness), vectors, it, &lp));
            }
            mv.halfset
        };
        if let Some(v) = new.iter().find(|v| abs_max(v) > opts.coord_cap) {
            let reason = format!("coordinate cap {} exceeded by {:?}", opts.coord_cap, v);
            return Ok(outcome(FeasibilityStatus::Inconclusive { reason }, None, vectors, it, &lp));
        }
        let mut added = 0;
        for v in new {
            if add(v, &mut lp, &mut vectors) {
                added += 1;
            }
        }
        if added == 0 {
            return Err(Error::Consistency("cutting plane loop made no progress".into()));
        }
    }
    let reason = format!("iteration ceiling {} reached", opts.max_iterations);
    Ok(outcome(FeasibilityStatus::Inconclusive { reason }, None, vectors, opts.max_iterations, &lp))
}

/// Short vectors cutting off an indefinite `G`: bisect on the segment from `G_e = I`
/// toward `G` for the last positive definite point and take its minimal vectors `v`
/// with `G[v] < 1`.
fn segment_cut(geom: &CodeGeometry, g_e: &SymMatrix, g_b: &SymMatrix) -> Option<Vec<IntVector>> {
    let id = SymMatrix::identity(geom.n());
    let diff = g_e.sub(&id);
    let one = Rational::one();
    let (mut lo, mut hi) = (Rational::zero(), one.clone());
    for _ in 0..64 {
        let mid = (lo.clone() + &hi) / Rational::from_int(2);
        let h_b = geom.gram_b(&id.add_scaled(&mid, &diff));
        if crate::ldlt::is_positive_definite(&h_b) {
            let cut: Vec<IntVector> =
                min_vectors(&h_b).halfset.into_iter().filter(|v| g_b.evaluate(v) < one).collect();
            if !cut.is_empty() {
                return Some(cut);
            }
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// Re-solves `max Tr G_B` over `P(V) ∩ T_C` (or `∩ T_G`) from scratch and reports whether it is empty.
pub fn verify_infeasible(geom: &CodeGeometry, vectors: &[IntVector], symmetrize: bool) -> bool {
    let (space, _) = face_space(geom, symmetrize);
    let mut lp = InequalityLp::new(objective(geom, &space));
    for v in vectors {
        let (a, b) = space.row(&geom.to_e(v));
        lp.add_constraint(a, b);
    }
    matches!(lp.solve(), LpResult::Infeasible)
}

/// Whether every entry is at most `1/2` in absolute value off the diagonal (the `V₀` box).
pub fn in_initial_box(g_e: &SymMatrix) -> bool {
    let half = Rational::new(1, 2);
    let n = g_e.dim();
    (0..n).all(|i| (i + 1..n).all(|j| g_e.get(i, j).abs() <= half))
}
