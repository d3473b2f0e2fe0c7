//! The face `F_C` of a realizable code: minimal-class invariants from a relative-interior
//! point, extreme rays at a vertex, neighboring vertices, and full traversal.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::feasibility::{CodeGeometry, FaceSpace};
use crate::lattice::{min_vectors, perfection_rank_of, GramMatrix};
use crate::ldlt::is_positive_definite;
use crate::lp::{InequalityLp, LpResult};
use crate::matrix::{packed_len, row_echelon_rank, SymMatrix};
use crate::num::Rational;
use crate::{Error, IntVector, Result};

/// Invariants `(s, r, s′)` of the minimal class whose cone is the relative interior of `F_C`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassInvariants {
    pub s: usize,
    pub r: usize,
    pub s_prime: usize,
    pub face_dim: usize,
    /// A point of the relative interior, in the basis `B`.
    #[serde(skip)]
    pub interior: GramMatrix,
    /// Minimal vectors (half set) common to the whole face.
    #[serde(skip)]
    pub minimal: Vec<IntVector>,
}

/// Minimal vectors of a point of `F_C` whose tangent direction is nonzero and nonnegative on them.
fn tangent_lp(geom: &CodeGeometry, halfset: &[IntVector]) -> Result<(Vec<bool>, SymMatrix)> {
    let n = geom.n();
    let full = FaceSpace::full(n);
    let m = full.dim();
    let is_e: Vec<bool> = halfset.iter().map(|x| geom.ebar.iter().any(|e| e == x || neg_eq(e, x))).collect();
    let others: Vec<usize> = (0..halfset.len()).filter(|&i| !is_e[i]).collect();
    let q = others.len();
    let mut c = vec![Rational::zero(); m + q];
    for t in c.iter_mut().skip(m) {
        *t = Rational::one();
    }
    let mut lp = InequalityLp::new(c);
    for (k, &i) in others.iter().enumerate() {
        let (coef, _) = full.row(&geom.to_e(&halfset[i]));
        let mut a = coef;
        a.resize(m + q, Rational::zero());
        a[m + k] = -Rational::one();
        lp.add_constraint(a, Rational::zero());
        let mut cap = vec![Rational::zero(); m + q];
        cap[m + k] = -Rational::one();
        lp.add_constraint(cap, -Rational::one());
        let mut nonneg = vec![Rational::zero(); m + q];
        nonneg[m + k] = Rational::one();
        lp.add_constraint(nonneg, Rational::zero());
    }
    let LpResult::Optimal { point, .. } = lp.solve() else {
        return Err(Error::Consistency("tangent cone LP not solvable".into()));
    };
    let mut loose = vec![false; halfset.len()];
    for (k, &i) in others.iter().enumerate() {
        let t = &point[m + k];
        if t.is_one() {
            loose[i] = true;
        } else if !t.is_zero() {
            return Err(Error::Consistency("fractional tangent slack".into()));
        }
    }
    Ok((loose, full.direction(&point[..m])))
}

fn neg_eq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == -y)
}

/// Invariants of the class of `F_C`, computed at a relative-interior point reached from
/// `start` (any point of `F_C`, in the basis `B`).
pub fn class_invariants(geom: &CodeGeometry, start: &GramMatrix) -> Result<ClassInvariants> {
    let n = geom.n();
    let s0 = min_vectors(start.sym());
    if !s0.min.is_one() {
        return Err(Error::Consistency("start point does not have minimum 1".into()));
    }
    let (loose, dir) = tangent_lp(geom, &s0.halfset)?;
    let minimal: Vec<IntVector> =
        s0.halfset.iter().zip(&loose).filter(|(_, &l)| !l).map(|(x, _)| x.clone()).collect();
    let g0_e = geom.gram_e(start.sym());
    let mut interior = start.sym().clone();
    if loose.iter().any(|&l| l) {
        let mut eps = Rational::one();
        let mut found = false;
        for _ in 0..200 {
            let g_b = geom.gram_b(&g0_e.add_scaled(&eps, &dir));
            if is_positive_definite(&g_b) {
                let mv = min_vectors(&g_b);
                if mv.min.is_one() && mv.halfset == minimal {
                    interior = g_b;
                    found = true;
                    break;
                }
            }
            eps = eps / Rational::from_int(2);
        }
        if !found {
            return Err(Error::Consistency("no relative-interior step found".into()));
        }
    }
    let r = perfection_rank_of(&minimal);
    let g_e = geom.gram_e(&interior);
    let s_prime = min_vectors(&g_e).s();
    Ok(ClassInvariants {
        s: minimal.len(),
        r,
        s_prime,
        face_dim: packed_len(n) - r,
        interior: GramMatrix::new(interior)?,
        minimal,
    })
}

/// Symmetric directions `D` (basis `B`) with `D[x] = 0` on a fixed set of vectors.
#[derive(Debug, Clone)]
pub struct LinearFace {
    pub fixed: Vec<IntVector>,
    pub basis: Vec<SymMatrix>,
}

impl LinearFace {
    pub fn new(n: usize, fixed: &[IntVector]) -> Self {
        let rows: Vec<Vec<Rational>> = fixed.iter().map(|x| evaluation_row(x)).collect();
        let basis = if rows.is_empty() {
            (0..packed_len(n))
                .map(|k| {
                    let mut d = vec![Rational::zero(); packed_len(n)];
                    d[k] = Rational::one();
                    SymMatrix::from_packed(n, d)
                })
                .collect()
        } else {
            crate::matrix::Matrix::from_rows(rows).nullspace().into_iter().map(|v| SymMatrix::from_packed(n, v)).collect()
        };
        LinearFace { fixed: fixed.to_vec(), basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(D_k[y])_k`.
    pub fn row(&self, y: &[i64]) -> Vec<Rational> {
        self.basis.iter().map(|d| d.evaluate(y)).collect()
    }

    pub fn direction(&self, c: &[Rational]) -> SymMatrix {
        let n = self.basis.first().map_or(0, |d| d.dim());
        self.basis.iter().zip(c).fold(SymMatrix::zeros(n), |acc, (d, t)| acc.add_scaled(t, d))
    }

    fn is_fixed(&self, x: &[i64]) -> bool {
        self.fixed.iter().any(|e| e == x || neg_eq(e, x))
    }
}

/// Coefficients of `G[x]` in the packed upper triangle.
fn evaluation_row(x: &[i64]) -> Vec<Rational> {
    let n = x.len();
    let mut row = Vec::with_capacity(packed_len(n));
    for i in 0..n {
        for j in i..n {
            let c = x[i] * x[j] * if i == j { 1 } else { 2 };
            row.push(Rational::from_int(c));
        }
    }
    row
}

/// Cone `{D : D[x] = 0 on the fixed vectors, D[x] ≥ 0 for the other x ∈ S(G)}` at a vertex,
/// by its extreme rays.
#[derive(Debug, Clone)]
pub struct RayCone {
    pub apex: GramMatrix,
    pub tight: Vec<IntVector>,
    /// Extreme rays as `D_B`, primitive integral.
    pub rays: Vec<SymMatrix>,
}

/// Extreme rays of the tangent cone of `F_C` at `vertex`.
pub fn extreme_rays(vertex: &GramMatrix, geom: &CodeGeometry) -> Result<RayCone> {
    extreme_rays_in(vertex, &LinearFace::new(geom.n(), &geom.ebar))
}

/// Extreme rays by double description in the linear space of the face; fails if the cone has
/// a lineality space (the point is not a vertex).
pub fn extreme_rays_in(vertex: &GramMatrix, face: &LinearFace) -> Result<RayCone> {
    let m = face.dim();
    let mv = min_vectors(vertex.sym());
    let rows: Vec<Vec<Rational>> = mv.halfset.iter().filter(|x| !face.is_fixed(x)).map(|x| face.row(x)).collect();
    if m == 0 {
        return Ok(RayCone { apex: vertex.clone(), tight: mv.halfset, rays: Vec::new() });
    }
    if rows.is_empty() || row_echelon_rank(rows.clone()) < m {
        return Err(Error::Consistency("tangent cone has a lineality space; not a vertex".into()));
    }
    let rays = cone_extreme_rays(&rows, m);
    Ok(RayCone { apex: vertex.clone(), tight: mv.halfset, rays: rays.iter().map(|y| face.direction(y).primitive()).collect() })
}

/// Extreme rays of the pointed cone `{y ∈ ℚᵐ : a·y ≥ 0 for every row a}`.
///
/// Double description: start with `±` unit vectors (the whole space), intersect with one
/// half-space at a time, and keep only adjacent pairs through the combinatorial test.
pub fn cone_extreme_rays(rows: &[Vec<Rational>], m: usize) -> Vec<Vec<Rational>> {
    // lineality basis shrinks while rows are added; rays are kept with their zero sets
    let mut lin: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut rays: Vec<(Vec<Rational>, BTreeSet<usize>)> = Vec::new();
    let dot = |a: &[Rational], y: &[Rational]| a.iter().zip(y).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
    for (k, a) in rows.iter().enumerate() {
        // a lineality direction not orthogonal to `a` turns into a ray
        if let Some(pos) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lin.remove(pos);
            let al = dot(a, &l);
            if al.is_negative() {
                l = l.iter().map(|x| -x.clone()).collect();
            }
            let al = al.abs();
            lin = lin
                .into_iter()
                .map(|v| {
                    let av = dot(a, &v);
                    v.iter().zip(&l).map(|(x, y)| x - &(av.clone() / &al * y)).collect()
                })
                .collect();
            rays = rays
                .into_iter()
                .map(|(r, z)| {
                    let ar = dot(a, &r);
                    let r: Vec<Rational> = r.iter().zip(&l).map(|(x, y)| x - &(ar.clone() / &al * y)).collect();
                    let mut z = z;
                    z.insert(k);
                    (r, z)
                })
                .collect();
            let zl: BTreeSet<usize> = (0..k).filter(|&j| dot(&rows[j], &l).is_zero()).collect();
            rays.push((l, zl));
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let zero: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_zero()).collect();
        let mut next: Vec<(Vec<Rational>, BTreeSet<usize>)> = Vec::new();
        for &i in pos.iter().chain(&zero) {
            let mut z = rays[i].1.clone();
            if vals[i].is_zero() {
                z.insert(k);
            }
            next.push((rays[i].0.clone(), z));
        }
        let rank_needed = (m - lin.len()).saturating_sub(2);
        for &i in &pos {
            for &j in &neg {
                let common: BTreeSet<usize> = rays[i].1.intersection(&rays[j].1).copied().collect();
                if common.len() < rank_needed {
                    continue;
                }
                // adjacency: no other ray's zero set contains the common zero set
                let adjacent = (0..rays.len())
                    .filter(|&t| t != i && t != j)
                    .all(|t| !common.is_subset(&rays[t].1));
                if !adjacent {
                    continue;
                }
                let (ri, vi) = (&rays[i].0, &vals[i]);
                let (rj, vj) = (&rays[j].0, &vals[j]);
                let r: Vec<Rational> = ri.iter().zip(rj).map(|(x, y)| x * &(-vj.clone()) + y * vi).collect();
                let mut z = common;
                z.insert(k);
                next.push((r, z));
            }
        }
        rays = next;
    }
    debug_assert!(lin.is_empty());
    rays.into_iter().map(|(r, _)| primitive_rat(&r)).collect()
}

fn primitive_rat(v: &[Rational]) -> Vec<Rational> {
    match crate::matrix::primitive_int_vector(v) {
        Some(w) => w.into_iter().map(Rational::from_int).collect(),
        None => v.to_vec(),
    }
}

/// Step from `G` along `R` to the next vertex: the largest `ρ` with `min(G + ρR) = min(G)`,
/// found by doubling a trial step and then shrinking it to the exact crossing.
pub fn neighbor_vertex(g: &GramMatrix, r: &SymMatrix) -> Result<(Rational, GramMatrix)> {
    let m = g.minimum();
    let s0 = g.min_vectors().halfset;
    if s0.iter().any(|x| r.evaluate(x).is_negative()) {
        return Err(Error::Consistency("direction leaves the face".into()));
    }
    if s0.iter().all(|x| r.evaluate(x).is_zero()) && r.is_zero() {
        return Err(Error::Consistency("zero direction".into()));
    }
    // phase 1: find γ with min(G + γR) < m or some new minimal vector
    let mut gamma = Rational::one();
    let mut steps = 0;
    loop {
        let h = g.sym().add_scaled(&gamma, r);
        if !is_positive_definite(&h) {
            break;
        }
        let mv = min_vectors(&h);
        if mv.min < m || mv.halfset.iter().any(|x| !s0.contains(x)) {
            break;
        }
        gamma = gamma * Rational::from_int(2);
        steps += 1;
        if steps > 200 {
            return Err(Error::Consistency("ray escapes the bounded face".into()));
        }
    }
    // phase 2: shrink to the exact crossing
    let mut u = gamma;
    for _ in 0..1000 {
        let h = g.sym().add_scaled(&u, r);
        let candidate = if is_positive_definite(&h) {
            let mv = min_vectors(&h);
            if mv.min >= m {
                return Ok((u, GramMatrix::new(h)?));
            }
            mv.halfset
        } else {
            let w = crate::ldlt::ldlt(&h).witness.ok_or_else(|| Error::Consistency("missing witness".into()))?;
            vec![w]
        };
        // u ← min over offending x with R[x] < 0 of (m − G[x]) / R[x]
        let mut best: Option<Rational> = None;
        for x in candidate {
            let rx = r.evaluate(&x);
            if !rx.is_negative() {
                continue;
            }
            let t = (m.clone() - g.evaluate(&x)) / rx;
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
        let next = best.ok_or_else(|| Error::Consistency("no decreasing vector at crossing".into()))?;
        if next >= u {
            return Err(Error::Consistency("neighbor step did not shrink".into()));
        }
        u = next;
    }
    Err(Error::Consistency("neighbor search did not converge".into()))
}

/// Vertices, edges, barycenter and invariants of a bounded face.
#[derive(Debug, Clone)]
pub struct FaceDescription {
    pub vertices: Vec<GramMatrix>,
    pub edges: Vec<(usize, usize)>,
    pub dim: usize,
    pub barycenter: GramMatrix,
    pub s: usize,
    pub r: usize,
    /// Kissing half of the frame lattice, for faces of a code.
    pub s_prime: Option<usize>,
    /// Traversal stopped at the vertex budget.
    pub partial: bool,
}

/// Moves a point of the face to a vertex by repeatedly stepping along a direction that keeps
/// the current minimal vectors tight.
fn to_vertex_in(face: &LinearFace, start: &GramMatrix) -> Result<GramMatrix> {
    let m = face.dim();
    let mut g = start.clone();
    for _ in 0..=m {
        let mv = min_vectors(g.sym());
        let rows: Vec<Vec<Rational>> = mv.halfset.iter().map(|x| face.row(x)).collect();
        let ns = crate::matrix::Matrix::from_rows(if rows.is_empty() { vec![vec![Rational::zero(); m]] } else { rows })
            .nullspace();
        let Some(y) = ns.first() else { return Ok(g) };
        let d = face.direction(y);
        // one direction or its negative runs into a new constraint
        let (_, h) = match neighbor_vertex(&g, &d) {
            Ok(v) => v,
            Err(_) => neighbor_vertex(&g, &d.scale(&-Rational::one()))?,
        };
        g = h;
    }
    Err(Error::Consistency("vertex descent did not terminate".into()))
}

/// A vertex of `F_C` reached from a point of it.
pub fn to_vertex(geom: &CodeGeometry, start: &GramMatrix) -> Result<GramMatrix> {
    to_vertex_in(&LinearFace::new(geom.n(), &geom.ebar), start)
}

/// Graph search over the vertices of `F_C` starting from `seed`.
pub fn traverse_face(geom: &CodeGeometry, seed: &GramMatrix, budget: usize) -> Result<FaceDescription> {
    let mut f = traverse_in(&LinearFace::new(geom.n(), &geom.ebar), seed, budget)?;
    f.s_prime = Some(min_vectors(&geom.gram_e(f.barycenter.sym())).s());
    Ok(f)
}

/// The closed face of the minimal class of `g` (all `G` with `G[x] = min` on `S(g)` and
/// minimum `min`), traversed from `g`.
pub fn class_face(g: &GramMatrix, budget: usize) -> Result<FaceDescription> {
    let mv = g.min_vectors();
    let face = LinearFace::new(g.dim(), &mv.halfset);
    traverse_in(&face, g, budget)
}

/// Graph search over vertices; rays at every vertex give neighbors. Stops after `budget`
/// vertices and flags the result partial.
pub fn traverse_in(face: &LinearFace, seed: &GramMatrix, budget: usize) -> Result<FaceDescription> {
    let n = seed.dim();
    let v0 = to_vertex_in(face, seed)?;
    let mut index: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    let mut vertices: Vec<GramMatrix> = Vec::new();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    index.insert(v0.sym().packed().to_vec(), 0);
    vertices.push(v0);
    let mut partial = false;
    let mut next = 0;
    while next < vertices.len() {
        let g = vertices[next].clone();
        let cone = extreme_rays_in(&g, face)?;
        for ray in &cone.rays {
            let (_, h) = neighbor_vertex(&g, ray)?;
            let key = h.sym().packed().to_vec();
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    if vertices.len() >= budget {
                        partial = true;
                        continue;
                    }
                    let j = vertices.len();
                    index.insert(key, j);
                    vertices.push(h);
                    j
                }
            };
            edges.insert((next.min(j), next.max(j)));
        }
        next += 1;
    }
    let k = Rational::from_int(vertices.len() as i64);
    let mut sum = SymMatrix::zeros(n);
    for v in &vertices {
        sum = sum.add(v.sym());
    }
    let barycenter = GramMatrix::new(sum.scale(&k.recip()))?;
    let dim = face_dimension(&vertices);
    let bmv = barycenter.min_vectors();
    let r = perfection_rank_of(&bmv.halfset);
    Ok(FaceDescription { s: bmv.s(), r, s_prime: None, dim, barycenter, vertices, edges: edges.into_iter().collect(), partial })
}

/// Rank of the differences `v_i − v_0`.
pub fn face_dimension(vertices: &[GramMatrix]) -> usize {
    let Some(first) = vertices.first() else { return 0 };
    let rows: Vec<Vec<Rational>> = vertices[1..].iter().map(|v| v.sym().sub(first.sym()).packed().to_vec()).collect();
    if rows.is_empty() {
        0
    } else {
        row_echelon_rank(rows)
    }
}

/// JSON dump of a traversed face.
pub fn face_json(face: &FaceDescription) -> serde_json::Value {
    let mat = |g: &GramMatrix| {
        let n = g.dim();
        (0..n).map(|i| (0..n).map(|j| g.sym().get(i, j).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    serde_json::json!({
        "vertices": face.vertices.iter().map(mat).collect::<Vec<_>>(),
        "edges": face.edges,
        "barycenter": mat(&face.barycenter),
        "dim": face.dim,
        "invariants": {"s": face.s, "r": face.r, "s_prime": face.s_prime},
        "partial": face.partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::Code;
    use crate::feasibility::{build_geometry, feasibility, FeasibilityOptions};

    fn invariants(word: Vec<i64>, d: i64) -> (usize, usize, usize) {
        let code = Code::cyclic(word, d).unwrap();
        let out = feasibility(&code, &FeasibilityOptions::default()).unwrap();
        assert!(out.is_feasible(), "{code}");
        let geom = build_geometry(&code).unwrap();
        let c = class_invariants(&geom, out.witness.as_ref().unwrap()).unwrap();
        (c.s, c.r, c.s_prime)
    }

    #[test]
    fn d4_class() {
        assert_eq!(invariants(vec![1, 1, 1, 1], 2), (12, 10, 4));
    }

    #[test]
    fn cone_of_orthant() {
        let rows = vec![
            vec![Rational::one(), Rational::zero()],
            vec![Rational::zero(), Rational::one()],
            vec![Rational::one(), Rational::one()],
        ];
        let mut rays = cone_extreme_rays(&rows, 2);
        rays.sort();
        assert_eq!(rays.len(), 2);
        let rows3: Vec<Vec<Rational>> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1]]
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        assert_eq!(cone_extreme_rays(&rows3, 3).len(), 4);
    }
}
