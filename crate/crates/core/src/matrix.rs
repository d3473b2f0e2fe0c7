//! Dense matrices over a field, symmetric matrices, and elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Signed, Zero};

use crate::num::{Field, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self[(i, j)])).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T: Field> Matrix<T> {
    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = T::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        row_echelon_rank(self.row_vecs())
    }

    /// Basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `M x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return T::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone() / piv.clone();
                    for j in c..n {
                        m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    }
                }
            }
        }
        det
    }
}

/// Rank of a list of row vectors by Gaussian elimination.
pub fn row_echelon_rank<T: Field>(mut rows: Vec<Vec<T>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let piv = rows[rank][c].clone();
        for i in rank + 1..rows.len() {
            if !rows[i][c].is_zero() {
                let f = rows[i][c].clone() / piv.clone();
                for j in c..cols {
                    let t = f.clone() * rows[rank][j].clone();
                    rows[i][j] = rows[i][j].clone() - t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Incrementally maintained echelon basis; used for rank tests and independence checks.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    dim: usize,
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Field> EchelonBasis<T> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &mut [T]) {
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for j in *p..self.dim {
                    if !r[j].is_zero() {
                        v[j] = v[j].clone() - f.clone() * r[j].clone();
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = T::one() / w[p].clone();
        for x in w.iter_mut().skip(p) {
            *x = x.clone() * inv.clone();
        }
        let pos = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(pos, (p, w));
        true
    }
}

/// Symmetric matrix stored as its packed upper triangle (row-major).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.to_full(), f)
    }
}

#[inline]
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        SymMatrix { n, data: vec![Rational::zero(); packed_len(n)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_packed(n: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), packed_len(n));
        SymMatrix { n, data }
    }

    /// Reads the upper triangle; `None` if the matrix is not square or not symmetric.
    pub fn from_full(m: &Matrix<Rational>) -> Option<Self> {
        let n = m.rows();
        if n == 0 || m.cols() != n {
            return None;
        }
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                if m[(i, j)] != m[(j, i)] {
                    return None;
                }
                s.set(i, j, m[(i, j)].clone());
            }
        }
        Some(s)
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let m = Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect(),
        );
        Self::from_full(&m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.n - i + 1) / 2 + (j - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn packed(&self) -> &[Rational] {
        &self.data
    }

    pub fn to_full(&self) -> Matrix<Rational> {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    /// `xᵗ G x`.
    pub fn evaluate(&self, x: &[i64]) -> Rational {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        let mut acc = Rational::zero();
        let mut k = 0;
        for i in 0..self.n {
            let xi = x[i];
            if xi == 0 {
                k += self.n - i;
                continue;
            }
            let mut row = self.data[k].mul_i64(xi);
            k += 1;
            for &xj in &x[i + 1..] {
                if xj != 0 {
                    row += self.data[k].mul_i64(2 * xj);
                }
                k += 1;
            }
            acc += row.mul_i64(xi);
        }
        acc
    }

    /// `xᵗ G y`.
    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..self.n {
                if y[j] != 0 {
                    row += self.get(i, j).mul_i64(y[j]);
                }
            }
            acc += row.mul_i64(x[i]);
        }
        acc
    }

    /// `xᵗ G x` for a rational vector.
    pub fn evaluate_rat(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if !x[j].is_zero() && !self.get(i, j).is_zero() {
                    acc += self.get(i, j) * &x[i] * &x[j];
                }
            }
        }
        acc
    }

    /// Coefficients `p` with `⟨G, xxᵗ⟩ = Σ_k packed(G)_k p_k`.
    pub fn projection(x: &[i64]) -> Vec<i64> {
        let n = x.len();
        let mut p = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            p.push(x[i] * x[i]);
            for j in i + 1..n {
                p.push(2 * x[i] * x[j]);
            }
        }
        p
    }

    /// Same as [`SymMatrix::projection`] for a rational vector.
    pub fn projection_rat(x: &[Rational]) -> Vec<Rational> {
        let n = x.len();
        let mut p = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            p.push(&x[i] * &x[i]);
            for j in i + 1..n {
                p.push((&x[i] * &x[j]).mul_i64(2));
            }
        }
        p
    }

    /// Packed coordinates of the rank-one matrix `xxᵗ` (no factor 2 off the diagonal).
    pub fn outer_packed(x: &[i64]) -> Vec<Rational> {
        let n = x.len();
        let mut p = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in i..n {
                p.push(Rational::from_int(x[i] * x[j]));
            }
        }
        p
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// `⟨A, B⟩ = Tr(AB)`.
    pub fn inner(&self, o: &SymMatrix) -> Rational {
        assert_eq!(self.n, o.n);
        let mut acc = Rational::zero();
        for i in 0..self.n {
            for j in i..self.n {
                let t = self.get(i, j) * o.get(i, j);
                acc += if i == j { t } else { t.mul_i64(2) };
            }
        }
        acc
    }

    pub fn add(&self, o: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, o.n);
        SymMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, o.n);
        SymMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// `G + c·D`.
    pub fn add_scaled(&self, c: &Rational, d: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, d.n);
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&d.data)
                .map(|(a, b)| if b.is_zero() { a.clone() } else { a + c * b })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `Mᵗ G M` for a rational `n × m` matrix `M`.
    pub fn congruence(&self, m: &Matrix<Rational>) -> SymMatrix {
        assert_eq!(m.rows(), self.n);
        let gm = self.to_full().mul(m);
        let out = m.transpose().mul(&gm);
        SymMatrix::from_full(&out).expect("congruence is symmetric")
    }

    /// `Uᵗ G U` for an integer matrix given as rows.
    pub fn congruence_int(&self, u: &Matrix<i64>) -> SymMatrix {
        self.congruence(&u.map(|&x| Rational::from_int(x)))
    }

    /// Least common denominator of the entries.
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.data.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(&x.denom()))
    }

    /// Scales to a primitive integral matrix with the same sign.
    pub fn primitive(&self) -> SymMatrix {
        use num_integer::Integer;
        let l = Rational::from_bigint(self.denominator_lcm());
        let scaled: Vec<Rational> = self.data.iter().map(|x| x * &l).collect();
        let g = scaled.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(&x.numer()));
        if g.is_zero() {
            return self.clone();
        }
        let g = Rational::from_bigint(g);
        SymMatrix { n: self.n, data: scaled.iter().map(|x| x / &g).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn det(&self) -> Rational {
        self.to_full().det()
    }
}

/// Integer matrix with machine-word entries.
pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix<i64> {
    Matrix::from_rows(rows.to_vec())
}

pub fn rat_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_int(x)).collect()
}

/// Clears denominators and removes the content, keeping the sign; `None` on `i64` overflow.
pub fn primitive_int_vector(v: &[Rational]) -> Option<Vec<i64>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
    let nums: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = nums.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Some(vec![0; v.len()]);
    }
    nums.iter().map(|x| (x / &g).to_i64()).collect()
}

pub fn abs_max(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

impl<T: Field> Matrix<T> {
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for x in &self.data {
            if x.abs() > m {
                m = x.abs();
            }
        }
        m
    }
}
