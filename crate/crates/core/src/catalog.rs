//! Named lattices, stored at the smallest minimum making them integral.

use crate::lattice::{gram_of_basis, GramMatrix};
use crate::matrix::{Matrix, SymMatrix};
use crate::normal_form::hnf_basis;
use crate::num::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub gram: GramMatrix,
    /// Stored invariants: half kissing number, perfection rank, determinant.
    pub s: usize,
    pub perfection_rank: usize,
    pub det: Rational,
}

impl CatalogEntry {
    /// Recomputes the stored invariants; returns an error naming the first mismatch.
    pub fn verify(&self) -> Result<()> {
        let mv = self.gram.min_vectors();
        let perf = crate::lattice::perfection_rank_of(&mv.halfset);
        let det = self.gram.det();
        if mv.s() != self.s || perf != self.perfection_rank || det != self.det {
            return Err(Error::Consistency(format!(
                "{}: stored (s, r, det) = ({}, {}, {}), computed ({}, {}, {})",
                self.name,
                self.s,
                self.perfection_rank,
                self.det,
                mv.s(),
                perf,
                det
            )));
        }
        Ok(())
    }
}

fn rows_of(v: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    v.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect()
}

/// `A_n` with minimum 2.
pub fn a_n(n: usize) -> GramMatrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
        .collect();
    GramMatrix::from_int_rows(&rows).expect("A_n")
}

/// `D_n` (`n ≥ 2`) with minimum 2, basis `e_i − e_{i+1}`, `e_{n−1} + e_n`.
pub fn d_n(n: usize) -> GramMatrix {
    assert!(n >= 2);
    let mut b: Vec<Vec<i64>> = (0..n - 1)
        .map(|i| (0..n).map(|j| if j == i { 1 } else if j == i + 1 { -1 } else { 0 }).collect())
        .collect();
    b.push((0..n).map(|j| if j + 2 >= n { 1 } else { 0 }).collect());
    GramMatrix::new(gram_of_basis(&Matrix::from_rows(rows_of(&b)))).expect("D_n")
}

/// `D_n⁺ = ⟨D_n, (½,…,½)⟩` for even `n`, minimum `min(2, n/4)`; `E₈ = D₈⁺`.
pub fn d_n_plus(n: usize) -> GramMatrix {
    assert!(n % 2 == 0);
    let mut gens: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut v = vec![Rational::from_int(0); n];
            v[i] = Rational::from_int(1);
            v[(i + 1) % n] = Rational::from_int(1);
            v
        })
        .collect();
    gens.push((0..n).map(|j| Rational::from_int(if j == 0 { 2 } else { 0 })).collect());
    gens.push(vec![Rational::new(1, 2); n]);
    let b = hnf_basis(&Matrix::from_rows(gens)).expect("full rank");
    GramMatrix::new(gram_of_basis(&b)).expect("D_n+")
}

pub fn e8() -> GramMatrix {
    d_n_plus(8)
}

/// `Λ₉ = ⟨D₉, (½⁸, 0)⟩` scaled to minimum 4.
pub fn lambda9() -> GramMatrix {
    let n = 9;
    let mut gens: Vec<Vec<Rational>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = vec![Rational::from_int(0); n];
            v[i] = Rational::from_int(1);
            v[j] = Rational::from_int(1);
            gens.push(v);
            let mut w = vec![Rational::from_int(0); n];
            w[i] = Rational::from_int(1);
            w[j] = Rational::from_int(-1);
            gens.push(w);
        }
    }
    let mut glue = vec![Rational::new(1, 2); n];
    glue[n - 1] = Rational::from_int(0);
    gens.push(glue);
    let b = hnf_basis(&Matrix::from_rows(gens)).expect("full rank");
    let g = gram_of_basis(&b).scale(&Rational::from_int(2));
    GramMatrix::new(g).expect("Lambda9")
}

pub fn l87_rows() -> Vec<Vec<i64>> {
    vec![
        vec![4, 2, -2, 2, -2, 0, 2, -2, 2],
        vec![2, 4, -1, 0, -2, 2, 0, 0, 2],
        vec![-2, -1, 4, -2, 2, -1, -1, 1, -2],
        vec![2, 0, -2, 4, 0, 0, 2, -1, 2],
        vec![-2, -2, 2, 0, 4, -2, 0, 1, -2],
        vec![0, 2, -1, 0, -2, 4, 0, 1, 2],
        vec![2, 0, -1, 2, 0, 0, 4, -2, 0],
        vec![-2, 0, 1, -1, 1, 1, -2, 4, 0],
        vec![2, 2, -2, 2, -2, 2, 0, 0, 4],
    ]
}

pub fn l87() -> GramMatrix {
    GramMatrix::from_int_rows(&l87_rows()).expect("L87")
}

/// Symmetric 0/±1 matrix with the given 1-indexed upper entries.
pub fn elementary(n: usize, entries: &[(usize, usize, i64)]) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for &(i, j, v) in entries {
        m.set(i - 1, j - 1, Rational::from_int(v));
    }
    m
}

/// The three perturbation directions of the face of `L₈₇`: `R`, `R′`, `R″`.
pub fn l87_perturbations() -> [SymMatrix; 3] {
    [
        elementary(9, &[(3, 2, 1), (3, 6, 1), (3, 7, 1)]),
        elementary(9, &[(8, 4, 1), (8, 5, 1), (8, 6, -1)]),
        elementary(9, &[(3, 8, 1)]),
    ]
}

pub fn l99() -> GramMatrix {
    let r2 = &l87_perturbations()[2];
    GramMatrix::new(l87().sym().add(r2)).expect("L99")
}

pub fn l81() -> GramMatrix {
    GramMatrix::from_int_rows(&[
        vec![4, 1, 1, 1, 2, 2, 2, 0, 2],
        vec![1, 4, 0, 0, 0, 0, 0, 0, 1],
        vec![1, 0, 4, 0, 0, 0, 0, 0, -1],
        vec![1, 0, 0, 4, 0, 0, 0, 0, 2],
        vec![2, 0, 0, 0, 4, 0, 0, 0, 2],
        vec![2, 0, 0, 0, 0, 4, 0, 0, 0],
        vec![2, 0, 0, 0, 0, 0, 4, 0, 1],
        vec![0, 0, 0, 0, 0, 0, 0, 4, 2],
        vec![2, 1, -1, 2, 2, 0, 1, 2, 4],
    ])
    .expect("L81")
}

/// The ternary lattices with quotient `3²` and `s = 27, 50, 15`, in that order.
pub fn ternary(which: usize) -> GramMatrix {
    let rows: Vec<Vec<i64>> = match which {
        0 => vec![
            vec![94, 47, 47, 47, 47, 47, 0, 0, 47],
            vec![47, 90, 18, 5, 5, 5, -5, -5, 0],
            vec![47, 18, 90, 5, 5, 5, -5, -5, 0],
            vec![47, 5, 5, 90, 18, 18, 5, 5, 47],
            vec![47, 5, 5, 18, 90, 18, 5, 5, 47],
            vec![47, 5, 5, 18, 18, 90, 5, 5, 47],
            vec![0, -5, -5, 5, 5, 5, 90, 18, 47],
            vec![0, -5, -5, 5, 5, 5, 18, 90, 47],
            vec![47, 0, 0, 47, 47, 47, 47, 47, 94],
        ],
        1 => vec![
            vec![18, 9, 9, 9, 9, 9, -3, -3, 0],
            vec![9, 18, 3, 3, 0, 0, -2, -2, -3],
            vec![9, 3, 18, 3, 0, 0, -2, -2, -3],
            vec![9, 3, 3, 18, 0, 0, -3, -3, -9],
            vec![9, 0, 0, 0, 18, 9, 0, 0, 9],
            vec![9, 0, 0, 0, 9, 18, 0, 0, 9],
            vec![-3, -2, -2, -3, 0, 0, 18, 3, 9],
            vec![-3, -2, -2, -3, 0, 0, 3, 18, 9],
            vec![0, -3, -3, -9, 9, 9, 9, 9, 18],
        ],
        2 => vec![
            vec![120, 60, 60, 60, 60, 60, 0, 0, 0],
            vec![60, 108, 9, 9, 9, 9, 0, 0, 0],
            vec![60, 9, 108, 36, 9, 9, 0, 0, 42],
            vec![60, 9, 36, 108, 9, 9, 0, 0, 42],
            vec![60, 9, 9, 9, 108, 36, 0, 0, -42],
            vec![60, 9, 9, 9, 36, 108, 0, 0, -42],
            vec![0, 0, 0, 0, 0, 0, 108, 27, 54],
            vec![0, 0, 0, 0, 0, 0, 27, 108, 54],
            vec![0, 0, 42, 42, -42, -42, 54, 54, 110],
        ],
        _ => panic!("only three ternary lattices"),
    };
    GramMatrix::from_int_rows(&rows).expect("ternary")
}

pub fn integers(n: usize) -> GramMatrix {
    GramMatrix::new(SymMatrix::identity(n)).expect("Z^n")
}

fn entry(name: &str, gram: GramMatrix, s: usize, perfection_rank: usize, det: Rational) -> CatalogEntry {
    CatalogEntry { name: name.to_string(), gram, s, perfection_rank, det }
}

/// Built-in catalog with documented invariants.
pub fn builtin() -> Vec<CatalogEntry> {
    let r = Rational::from_int;
    vec![
        entry("A4", a_n(4), 10, 10, r(5)),
        entry("D4", d_n(4), 12, 10, r(4)),
        entry("D5", d_n(5), 20, 15, r(4)),
        entry("D6", d_n(6), 30, 21, r(4)),
        entry("E8", e8(), 120, 36, r(1)),
        entry("Lambda9", lambda9(), 136, 45, r(512)),
        entry("L87", l87(), 87, 42, l87().det()),
        entry("L99", l99(), 99, 45, l99().det()),
        entry("L81", l81(), 81, 45, l81().det()),
        entry("T27", ternary(0), 27, ternary(0).perfection_rank(), ternary(0).det()),
        entry("T50", ternary(1), 50, ternary(1).perfection_rank(), ternary(1).det()),
        entry("T15", ternary(2), 15, ternary(2).perfection_rank(), ternary(2).det()),
    ]
}

pub fn by_name(name: &str) -> Option<GramMatrix> {
    match name {
        "L87" => Some(l87()),
        "L99" => Some(l99()),
        "L81" => Some(l81()),
        "E8" => Some(e8()),
        "Lambda9" => Some(lambda9()),
        "T27" => Some(ternary(0)),
        "T50" => Some(ternary(1)),
        "T15" => Some(ternary(2)),
        _ => {
            let (kind, n) = name.split_at(1);
            let n: usize = n.parse().ok()?;
            match kind {
                "A" if n >= 1 => Some(a_n(n)),
                "D" if n >= 2 => Some(d_n(n)),
                "Z" if n >= 1 => Some(integers(n)),
                _ => None,
            }
        }
    }
}

/// Loads every `*.gram` file in a directory as a catalog entry named after the file stem;
/// invariants are taken from the data.
pub fn load_dir(dir: &std::path::Path) -> Result<Vec<(String, GramMatrix)>> {
    let mut out = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for p in paths {
        if p.extension().and_then(|e| e.to_str()) == Some("gram") {
            let text = std::fs::read_to_string(&p)?;
            let g = crate::io::parse_gram(&text)?;
            let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string();
            out.push((name, GramMatrix::new(g)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_lattices() {
        let e = e8();
        assert_eq!(e.minimum(), Rational::from_int(2));
        assert_eq!(e.kissing_half(), 120);
        assert_eq!(e.det(), Rational::from_int(1));
        assert_eq!(e.hermite_power(), Rational::from_int(256));
        assert_eq!(e.perfection_rank(), 36);
    }

    #[test]
    fn e8_plus_a1() {
        let a1 = GramMatrix::from_int_rows(&[vec![2]]).unwrap();
        let s = e8().direct_sum(&a1);
        assert_eq!(s.hermite_power(), Rational::from_int(256));
    }
}

#[cfg(test)]
mod catalog_checks {
    use super::*;

    #[test]
    fn builtin_invariants_reproduce() {
        for e in builtin() {
            e.verify().unwrap();
        }
        assert_eq!(l87().minimum(), Rational::from_int(4));
        assert_eq!(l99().minimum(), Rational::from_int(4));
        assert_eq!(lambda9().minimum(), Rational::from_int(4));
        assert_eq!(ternary(2).kissing_half(), 15);
    }
}
