//! Lattices given by Gram matrices: enumeration of short vectors, minimum, perfection rank.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::ldlt::{is_positive_definite, ldlt_generic};
use crate::matrix::{packed_len, EchelonBasis, Matrix, SymMatrix};
use crate::num::Rational;
use crate::{Error, RatMatrix, Result};

/// Positive definite Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    g: SymMatrix,
}

impl std::fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(&self.g, f)
    }
}

/// Minimal vectors up to sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinVecSet {
    pub min: Rational,
    /// Sorted, one representative per pair `±x` with first nonzero coordinate positive.
    pub halfset: Vec<Vec<i64>>,
}

impl MinVecSet {
    pub fn s(&self) -> usize {
        self.halfset.len()
    }
}

impl GramMatrix {
    pub fn new(g: SymMatrix) -> Result<Self> {
        if !is_positive_definite(&g) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(GramMatrix { g })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let g = SymMatrix::from_int_rows(rows).ok_or_else(|| Error::Dimension("matrix is not symmetric".into()))?;
        Self::new(g)
    }

    /// Skips the definiteness check; callers guarantee it.
    pub(crate) fn new_unchecked(g: SymMatrix) -> Self {
        GramMatrix { g }
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.g
    }

    pub fn into_sym(self) -> SymMatrix {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn det(&self) -> Rational {
        self.g.det()
    }

    pub fn evaluate(&self, x: &[i64]) -> Rational {
        self.g.evaluate(x)
    }

    pub fn scale(&self, c: &Rational) -> Result<GramMatrix> {
        GramMatrix::new(self.g.scale(c))
    }

    pub fn shortest_vectors(&self, bound: &Rational) -> Vec<(Vec<i64>, Rational)> {
        shortest_vectors(&self.g, bound)
    }

    pub fn min_vectors(&self) -> MinVecSet {
        min_vectors(&self.g)
    }

    pub fn minimum(&self) -> Rational {
        self.min_vectors().min
    }

    pub fn kissing_half(&self) -> usize {
        self.min_vectors().s()
    }

    pub fn perfection_rank(&self) -> usize {
        perfection_rank_of(&self.min_vectors().halfset)
    }

    /// `γⁿ = minⁿ / det`.
    pub fn hermite_power(&self) -> Rational {
        self.minimum().pow(self.dim() as u32) / self.det()
    }

    pub fn dual(&self) -> GramMatrix {
        let inv = self.g.to_full().inverse().expect("positive definite");
        GramMatrix::new_unchecked(SymMatrix::from_full(&inv).expect("symmetric"))
    }

    pub fn direct_sum(&self, o: &GramMatrix) -> GramMatrix {
        let (a, b) = (self.dim(), o.dim());
        let mut g = SymMatrix::zeros(a + b);
        for i in 0..a {
            for j in i..a {
                g.set(i, j, self.g.get(i, j).clone());
            }
        }
        for i in 0..b {
            for j in i..b {
                g.set(a + i, a + j, o.g.get(i, j).clone());
            }
        }
        GramMatrix::new_unchecked(g)
    }

    /// Gram of the sublattice spanned by the given rows (coordinates in this lattice's basis).
    pub fn sublattice_gram(&self, rows: &RatMatrix) -> Result<GramMatrix> {
        if rows.cols() != self.dim() {
            return Err(Error::Dimension("basis width".into()));
        }
        if rows.rank() < rows.rows() {
            return Err(Error::RankDeficient);
        }
        let g = self.g.congruence(&rows.transpose());
        Ok(GramMatrix::new_unchecked(g))
    }

    /// `Uᵗ G U` for an integer matrix `U`.
    pub fn transform(&self, u: &Matrix<i64>) -> GramMatrix {
        GramMatrix::new_unchecked(self.g.congruence_int(u))
    }
}

/// Rank of `{xxᵗ}` inside the symmetric matrices.
pub fn perfection_rank_of(vectors: &[Vec<i64>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let mut eb = EchelonBasis::new(packed_len(first.len()));
    for x in vectors {
        eb.insert(&SymMatrix::outer_packed(x));
        if eb.rank() == eb.dim() {
            break;
        }
    }
    eb.rank()
}

/// Fincke–Pohst enumeration state for a positive definite form in reversed coordinates,
/// so that the outermost level is the first coordinate.
struct Enumerator {
    n: usize,
    /// `lt[k][j]` for `j > k`: coefficient of `y_j` in the center of level `k`.
    lt: Vec<Vec<Rational>>,
    d: Vec<Rational>,
}

impl Enumerator {
    fn new(g: &SymMatrix) -> Self {
        let n = g.dim();
        let rev = Matrix::from_fn(n, n, |i, j| g.get(n - 1 - i, n - 1 - j).clone());
        let f = ldlt_generic(&rev);
        assert!(f.perm.iter().enumerate().all(|(i, &p)| i == p), "positive definite input expected");
        let lt = (0..n).map(|k| (0..n).map(|j| if j > k { f.l[(j, k)].clone() } else { Rational::zero() }).collect()).collect();
        Enumerator { n, lt, d: f.d }
    }

    /// Visits every canonical nonzero `y` with `Q[y] ≤ bound`; `visit` may lower the bound.
    fn run(&self, bound: Rational, visit: &mut dyn FnMut(&[i64], &Rational) -> Option<Rational>) {
        let n = self.n;
        let mut y = vec![0i64; n];
        let mut bound = bound;
        self.level(n - 1, &mut y, Rational::zero(), true, &mut bound, visit);
    }

    fn level(
        &self,
        k: usize,
        y: &mut [i64],
        partial: Rational,
        outer_zero: bool,
        bound: &mut Rational,
        visit: &mut dyn FnMut(&[i64], &Rational) -> Option<Rational>,
    ) {
        let mut c = Rational::zero();
        if !outer_zero {
            for j in k + 1..self.n {
                if y[j] != 0 {
                    c += self.lt[k][j].mul_i64(y[j]);
                }
            }
        }
        let dk = &self.d[k];
        let center = -&c;
        let up = center.ceil().to_i64().expect("coordinate fits i64");
        let down = center.floor().to_i64().expect("coordinate fits i64");
        let mut try_value = |v: i64, y: &mut [i64], bound: &mut Rational| -> bool {
            let t = &Rational::from_int(v) + &c;
            let val = &partial + &(&(&t * &t) * dk);
            if val > *bound {
                return false;
            }
            y[k] = v;
            if k == 0 {
                if !(outer_zero && v == 0) {
                    if let Some(nb) = visit(y, &val) {
                        *bound = nb;
                    }
                }
            } else {
                self.level(k - 1, y, val, outer_zero && v == 0, bound, visit);
            }
            y[k] = 0;
            true
        };
        if outer_zero {
            // symmetric range; keep the nonnegative half
            let mut v = 0;
            while try_value(v, y, bound) {
                v += 1;
            }
            return;
        }
        let mut v = up;
        while try_value(v, y, bound) {
            v += 1;
        }
        let mut v = down;
        if down == up {
            v -= 1;
        }
        while try_value(v, y, bound) {
            v -= 1;
        }
    }
}

fn unreverse(y: &[i64]) -> Vec<i64> {
    y.iter().rev().copied().collect()
}

/// All pairs `±x` with `0 < G[x] ≤ bound`, first nonzero coordinate positive,
/// sorted by norm and then lexicographically.
pub fn shortest_vectors(g: &SymMatrix, bound: &Rational) -> Vec<(Vec<i64>, Rational)> {
    let e = Enumerator::new(g);
    let mut out = Vec::new();
    e.run(bound.clone(), &mut |y, v| {
        out.push((unreverse(y), v.clone()));
        None
    });
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Minimum and minimal vectors.
pub fn min_vectors(g: &SymMatrix) -> MinVecSet {
    let n = g.dim();
    let start = (0..n).map(|i| g.get(i, i).clone()).min().expect("nonempty");
    min_vectors_below(g, &start).expect("diagonal bound always attained")
}

/// Minimal vectors among those of norm `≤ bound`; `None` if there are none.
pub fn min_vectors_below(g: &SymMatrix, bound: &Rational) -> Option<MinVecSet> {
    let e = Enumerator::new(g);
    let mut best: Option<Rational> = None;
    let mut found: Vec<Vec<i64>> = Vec::new();
    e.run(bound.clone(), &mut |y, v| {
        match &best {
            Some(b) if v > b => None,
            Some(b) if v == b => {
                found.push(unreverse(y));
                None
            }
            _ => {
                best = Some(v.clone());
                found.clear();
                found.push(unreverse(y));
                Some(v.clone())
            }
        }
    });
    let min = best?;
    found.sort();
    Some(MinVecSet { min, halfset: found })
}

/// Largest `γ_nⁿ` upper bound used for index bounds (exact for `n ≤ 8` and `n = 24`).
pub fn hermite_power_bound(n: usize) -> Result<Rational> {
    let v = match n {
        1 => Rational::one(),
        2 => Rational::new(4, 3),
        3 => Rational::from_int(2),
        4 => Rational::from_int(4),
        5 => Rational::from_int(8),
        6 => Rational::new(64, 3),
        7 => Rational::from_int(64),
        8 => Rational::from_int(256),
        9 => Rational::new(3021, 100).pow(2),
        10 => Rational::new(5944, 100).pow(2),
        24 => Rational::from_int(4).pow(24),
        _ => return Err(Error::Unsupported(format!("no Hermite constant bound stored for n = {n}"))),
    };
    Ok(v)
}

/// `⌊γ_n^{n/2}⌋`, the largest possible index of a sublattice spanned by minimal vectors.
pub fn max_index_bound(n: usize) -> Result<u64> {
    let v = hermite_power_bound(n)?;
    // floor(sqrt(p/q)) = floor(sqrt(floor(p/q))) for the integer part
    let q = v.floor();
    let r: BigInt = num_integer::Roots::sqrt(&q);
    Ok(r.to_u64().expect("fits"))
}

/// Exact Gram matrix `B Bᵗ` of a lattice with basis rows `B` (rational coordinates in an
/// orthonormal frame).
pub fn gram_of_basis(b: &RatMatrix) -> SymMatrix {
    SymMatrix::from_full(&b.mul(&b.transpose())).expect("symmetric")
}

/// Checks that the leading sign convention holds.
pub fn is_canonical(x: &[i64]) -> bool {
    x.iter().find(|&&v| v != 0).is_some_and(|v| *v > 0)
}

/// Canonical representative of `±x`.
pub fn canonical(x: &[i64]) -> Vec<i64> {
    if is_canonical(x) {
        x.to_vec()
    } else {
        x.iter().map(|v| -v).collect()
    }
}

/// Whether `G` has `n` linearly independent minimal vectors.
pub fn is_well_rounded(set: &MinVecSet, n: usize) -> bool {
    let rows: Vec<Vec<Rational>> = set.halfset.iter().map(|x| crate::matrix::rat_vec(x)).collect();
    !rows.is_empty() && Matrix::from_rows(rows).rank() == n
}
