//! Reference rows and property checkers shared by the acceptance and property targets.
#![allow(dead_code)]

use mincodes::codes::{
    find_code_isomorphism, generate_cyclic_candidates, watson_identity_check, Code, CyclicType,
};
use mincodes::eutaxy::eutaxy_class;
use mincodes::feasibility::{feasibility, FeasibilityOptions, FeasibilityStatus};
use mincodes::ldlt::{ldlt, Definiteness};
use mincodes::lp::{maximize, LpResult};
use mincodes::normal_form::{det_i64, snf_divisors_i64};
use mincodes::{GramMatrix, Matrix, Rational, SymMatrix};
use num_traits::Zero;
use rand::Rng;

pub fn word(s: &str) -> Vec<i64> {
    s.split(',').map(|x| x.trim().parse().unwrap()).collect()
}

/// A code from generator strings and moduli.
pub fn code(gens: &[&str], moduli: &[i64]) -> Code {
    let g: Vec<Vec<i64>> = gens.iter().map(|s| word(s)).collect();
    Code::new(g[0].len(), moduli.to_vec(), g).unwrap()
}

/// Expected rows: generators, moduli, `(s, r, s′)`.
pub struct Row {
    pub gens: Vec<&'static str>,
    pub moduli: Vec<i64>,
    pub srs: (usize, usize, usize),
}

impl Row {
    pub fn code(&self) -> Code {
        code(&self.gens, &self.moduli)
    }
}

fn rows(moduli: &[i64], prefix: &[&'static str], data: &[(&[&'static str], (usize, usize, usize))]) -> Vec<Row> {
    data.iter()
        .map(|(g, srs)| {
            let mut gens = prefix.to_vec();
            gens.extend_from_slice(g);
            Row { gens, moduli: moduli.to_vec(), srs: *srs }
        })
        .collect()
}

pub fn klein_four() -> Vec<Row> {
    rows(&[2, 2], &[], &[
        (&["1,1,1,1,0,0,0,0,0", "0,0,0,0,1,1,1,1,1"], (17, 15, 9)),
        (&["1,1,1,1,0,0,0,0,0", "0,0,0,1,1,1,1,1,1"], (17, 15, 9)),
        (&["1,1,1,1,0,0,0,0,0", "0,0,1,1,1,1,1,1,1"], (17, 15, 9)),
        (&["1,1,1,1,1,0,0,0,0", "0,0,0,0,1,1,1,1,1"], (9, 9, 9)),
        (&["1,1,1,1,1,0,0,0,0", "0,0,0,1,1,1,1,1,1"], (9, 9, 9)),
        (&["1,1,1,1,1,1,0,0,0", "0,0,0,1,1,1,1,1,1"], (9, 9, 9)),
    ])
}

pub fn binary_dim3() -> Vec<Row> {
    rows(&[2, 2, 2], &["1,1,1,1,0,0,0,0,0"], &[
        (&["0,0,1,1,1,1,0,0,0", "0,0,0,0,0,1,1,1,1"], (41, 30, 9)),
        (&["0,0,1,1,1,1,0,0,0", "0,0,0,0,1,1,1,1,1"], (33, 24, 9)),
        (&["0,0,1,1,1,1,0,0,0", "0,0,0,1,0,1,1,1,1"], (33, 24, 9)),
        (&["0,0,1,1,1,1,0,0,0", "0,1,0,1,0,1,1,1,1"], (33, 24, 9)),
        (&["0,0,0,1,1,1,1,0,0", "0,0,1,0,0,0,1,1,1"], (33, 27, 9)),
        (&["0,0,0,1,1,1,1,0,0", "0,0,1,0,0,1,1,1,1"], (25, 21, 9)),
        (&["0,0,1,1,1,1,1,0,0", "0,0,0,0,0,1,1,1,1"], (25, 21, 9)),
        (&["0,0,1,1,1,1,1,0,0", "0,1,0,1,0,0,1,1,1"], (17, 15, 9)),
    ])
}

pub fn binary_dim4() -> Vec<Row> {
    rows(&[2, 2, 2, 2], &["1,1,1,1,0,0,0,0,0", "0,0,1,1,1,1,0,0,0"], &[
        (&["0,1,0,1,0,1,1,0,0", "1,1,0,0,0,0,0,1,1"], (89, 43, 9)),
        (&["0,1,0,1,0,1,1,0,0", "1,1,0,0,0,0,1,1,1"], (65, 30, 9)),
        (&["0,0,0,0,1,1,1,1,0", "0,1,0,1,0,1,0,1,1"], (57, 37, 9)),
        (&["0,0,0,1,0,1,1,1,0", "1,0,1,0,0,0,0,1,1"], (81, 45, 9)),
    ])
}

pub fn ternary_dim2() -> Vec<Row> {
    rows(&[3, 3], &["1,1,1,1,1,1,0,0,0"], &[
        (&["0,0,0,1,1,1,1,1,1"], (27, 23, 9)),
        (&["1,1,2,0,0,0,1,1,1"], (50, 37, 10)),
        (&["1,1,0,0,2,2,1,1,1"], (15, 14, 9)),
    ])
}

pub fn four_two() -> Vec<Row> {
    rows(&[4, 2], &[], &[
        (&["1,1,1,1,2,2,2,0,0", "0,0,0,0,0,1,1,1,1"], (41, 30, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,0,1,0,1,1,1,1"], (33, 27, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,1,1,1,1"], (33, 27, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,0,1,0,0,1,1,1"], (33, 27, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,0,1,1,1"], (25, 21, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,0,0,1,1"], (41, 30, 9)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,0,0,1,1,1,1"], (17, 15, 9)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,0,1,1,1,1,1"], (23, 22, 9)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,1,1,1,1,1,1"], (56, 37, 12)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,0,1,0,1,1,1"], (17, 15, 9)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,1,1,0,1,1,1"], (9, 9, 9)),
        (&["1,1,1,1,1,2,2,0,0", "0,0,0,1,1,0,0,1,1"], (24, 21, 9)),
        (&["1,1,1,1,1,1,2,0,0", "0,0,0,0,1,1,0,1,1"], (46, 34, 9)),
        (&["1,1,1,1,1,1,2,0,0", "0,0,0,1,1,1,0,1,1"], (23, 21, 9)),
        (&["1,1,1,1,1,1,2,0,0", "0,0,0,0,0,1,1,1,1"], (35, 28, 9)),
        (&["1,1,1,1,1,1,2,0,0", "0,0,0,0,1,1,1,1,1"], (42, 34, 10)),
        (&["1,1,1,1,1,1,2,0,0", "0,0,0,1,1,1,1,1,1"], (23, 21, 9)),
        (&["1,1,1,1,2,2,2,2,0", "0,0,1,1,0,0,0,1,1"], (33, 24, 9)),
        (&["1,1,1,1,1,2,2,2,0", "0,0,1,1,0,0,0,1,1"], (17, 15, 9)),
        (&["1,1,1,1,1,1,2,2,0", "0,0,0,0,1,1,0,1,1"], (17, 15, 9)),
        (&["1,1,1,1,1,1,2,2,0", "0,0,0,1,1,1,0,1,1"], (9, 9, 9)),
        (&["1,1,1,1,1,1,2,2,0", "0,0,0,1,1,1,0,0,1"], (38, 29, 9)),
        (&["1,1,1,1,1,1,1,2,0", "0,0,0,0,1,1,1,0,1"], (37, 32, 9)),
        (&["1,1,1,1,1,1,1,2,0", "0,0,0,0,0,1,1,1,1"], (41, 35, 9)),
        (&["1,1,1,1,1,1,1,2,0", "0,0,0,0,1,1,1,1,1"], (9, 9, 9)),
        (&["1,1,1,1,1,1,1,1,0", "0,0,0,0,1,1,1,1,1"], (32, 29, 9)),
    ])
}

pub fn four_two_two() -> Vec<Row> {
    rows(&[4, 2, 2], &[], &[
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,0,1,1,0", "0,0,1,1,0,1,0,0,1"], (89, 43, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,0,1,1,0", "0,1,0,1,0,1,0,0,1"], (81, 45, 9)),
        (&["1,1,1,1,2,2,2,0,0", "0,0,1,1,0,0,1,1,0", "0,1,0,1,0,0,1,0,1"], (89, 43, 9)),
        (&["1,1,1,1,1,2,2,0,0", "1,1,0,0,0,1,0,1,0", "0,0,0,0,0,1,1,1,1"], (136, 45, 12)),
    ])
}

/// The `s′` column listed with these rows is not reproduced (see the README); only `(s, r)` is compared.
pub fn six_two() -> Vec<Row> {
    rows(&[6, 2], &[], &[
        (&["0,1,1,1,1,2,2,2,3", "1,0,0,0,1,0,0,1,1"], (136, 45, 37)),
        (&["0,1,1,1,1,2,2,2,3", "1,0,0,1,1,0,0,1,0"], (136, 45, 46)),
        (&["0,1,1,1,1,2,2,3,3", "1,0,0,1,1,0,1,0,1"], (99, 45, 33)),
        (&["0,1,1,1,1,2,2,3,3", "1,0,0,1,1,1,1,0,1"], (99, 45, 33)),
        (&["0,1,1,1,1,2,2,3,3", "1,0,0,1,1,0,0,0,1"], (87, 42, 23)),
        (&["0,1,1,2,2,2,2,3,3", "1,0,1,0,0,0,1,0,1"], (72, 35, 22)),
        (&["0,1,1,1,2,2,2,2,3", "1,0,0,1,0,0,0,1,1"], (64, 40, 33)),
        (&["0,1,1,1,2,2,2,2,3", "1,0,1,1,0,0,0,1,0"], (64, 40, 33)),
        (&["0,1,1,1,2,2,2,3,3", "1,0,0,1,0,0,1,0,1"], (41, 34, 23)),
    ])
}

pub fn four_four() -> Vec<Row> {
    rows(&[4, 4], &[], &[(&["1,1,1,1,2,2,2,0,0", "0,1,-1,2,2,0,1,2,1"], (81, 45, 9))])
}

/// Codes for which only the class of `Λ₉` is admissible.
pub fn universality_codes() -> Vec<(&'static str, Code)> {
    let cyc = |d: i64, m: &[usize]| {
        let t = CyclicType::new(d, m.to_vec()).unwrap();
        Code::from_type(&t, 9).unwrap()
    };
    vec![
        ("7", cyc(7, &[6, 1, 2])),
        ("8", cyc(8, &[4, 3, 2, 0])),
        ("9", cyc(9, &[4, 1, 2, 2])),
        ("10", cyc(10, &[2, 4, 2, 0, 1])),
        ("12", cyc(12, &[2, 1, 2, 2, 1, 1])),
        ("6x2", code(&["0,1,1,1,1,2,2,2,3", "1,0,0,0,1,0,0,1,1"], &[6, 2])),
        ("4x2^2", code(&["1,1,1,1,1,2,2,0,0", "1,1,0,0,0,1,0,1,0", "1,1,0,0,0,0,1,0,1"], &[4, 2, 2])),
    ]
}

/// Cyclic rows of dimension 9: `(d, canonical type, (s, r, s′))`.
pub fn cyclic_rows() -> Vec<(i64, CyclicType, (usize, usize, usize))> {
    let text = include_str!("../data/cyclic_n9.txt");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let d: i64 = f[0].parse().unwrap();
            let t = CyclicType::from_word(&word(f[1]), d).unwrap().unit_orbit();
            (d, t, (f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap()))
        })
        .collect()
}

/// Closed-form existence and `(s, r)` for cyclic types of order `d ≤ 6` and full support `n ≤ 9`.
/// Types of order 5 are normalized with `m₁ ≥ m₂`.
pub fn closed_form(n: usize, d: i64, m: &[usize]) -> Option<(usize, usize)> {
    let nn = n;
    match d {
        2 => (n >= 4).then_some(if n == 4 { (12, 10) } else { (n, n) }),
        3 => (n >= 6).then_some(if n == 6 { (12, 11) } else { (n, n) }),
        4 => {
            let (m1, m2) = (m[0], m[1]);
            if m1 < 4 || n < 7 || (m1, m2) == (7, 0) {
                return None;
            }
            Some(match (m1, m2) {
                (4, 3) => (23, 19),
                (6, 1) => (21, 19),
                (8, 0) => (16, 15),
                (4, _) => (n + 8, n + 6),
                _ => (n, n),
            })
        }
        5 => {
            let (m1, m2) = (m[0].max(m[1]), m[0].min(m[1]));
            let exists = (n == 8 && (4..=6).contains(&m1)) || (n == 9 && (5..=8).contains(&m1));
            if !exists {
                return None;
            }
            Some(if [(4, 4), (6, 2), (8, 1), (10, 0)].contains(&(m1, m2)) { (2 * nn, 2 * nn - 1) } else { (n, n) })
        }
        6 => {
            let (m1, m2, m3) = (m[0], m[1], m[2]);
            let generic = |n: usize| {
                if m1 + m2 == 6 {
                    (n + 6, n + 5)
                } else if m1 + m3 == 4 {
                    (n + 8, n + 6)
                } else {
                    (n, n)
                }
            };
            match n {
                8 => match (m1, m2, m3) {
                    (3, 4, 1) => Some((31, 26)),
                    (4, 3, 1) => Some((27, 25)),
                    (5, 2, 1) => Some((120, 36)),
                    (2, 4, 2) => Some((28, 22)),
                    (4, 2, 2) => Some((36, 28)),
                    // the sixth set; its values follow the generic rule
                    (3, 3, 2) => Some(generic(8)),
                    _ => None,
                },
                9 if m1 + m2 >= 6 && m1 + m3 >= 4 => Some(match (m1, m2, m3) {
                    (4, 5, 0) | (1, 5, 3) | (5, 1, 3) => (23, 20),
                    (6, 3, 0) => (18, 17),
                    (7, 1, 1) => (27, 25),
                    _ => generic(9),
                }),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Compares found rows against expected rows up to code equivalence.
///
/// Returns the number of distinct classes among the expected rows, or a description of the
/// first mismatch.
pub fn match_rows(found: &[(Code, (usize, usize, usize))], expected: &[Row], check_sprime: bool) -> Result<usize, String> {
    let key = |t: (usize, usize, usize)| if check_sprime { t } else { (t.0, t.1, 0) };
    let mut hit = vec![false; found.len()];
    for row in expected {
        let c = row.code();
        let idx: Vec<usize> = (0..found.len()).filter(|&i| find_code_isomorphism(&c, &found[i].0).is_some()).collect();
        match idx.as_slice() {
            [i] => {
                if key(found[*i].1) != key(row.srs) {
                    return Err(format!("{c}: found {:?}, expected {:?}", found[*i].1, row.srs));
                }
                hit[*i] = true;
            }
            [] => return Err(format!("{c} not among the classified codes")),
            _ => return Err(format!("{c} matches several classified codes")),
        }
    }
    if let Some(i) = hit.iter().position(|h| !h) {
        return Err(format!("classified code {} is not listed", found[i].0));
    }
    Ok(hit.len())
}

pub fn random_rational<R: Rng>(rng: &mut R, span: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-span..=span), rng.gen_range(1..=den))
}

/// Watson's identity on a random positive definite Gram matrix `BᵗB + I`.
pub fn check_watson_identity<R: Rng>(rng: &mut R) -> Result<(), String> {
    let n = rng.gen_range(2..=6);
    let b = Matrix::from_rows((0..n).map(|_| (0..n).map(|_| random_rational(rng, 5, 4)).collect()).collect());
    let g = SymMatrix::from_full(&b.transpose().mul(&b)).unwrap().add(&SymMatrix::identity(n));
    let d = rng.gen_range(2..=13);
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-d..=d)).collect();
    let (lhs, rhs) = watson_identity_check(&g, &a, d);
    (lhs == rhs).then_some(()).ok_or_else(|| format!("a = {a:?}, d = {d}: {lhs} != {rhs}"))
}

/// `LDLᵀ` reconstructs the permuted matrix; non-definite inputs come with a nonpositive witness.
pub fn check_ldlt(g: &SymMatrix) -> Result<(), String> {
    let f = ldlt(g);
    let n = g.dim();
    if f.complete {
        let mut dl = f.l.clone();
        for i in 0..n {
            for j in 0..n {
                dl[(i, j)] = &f.l[(i, j)] * &f.d[j];
            }
        }
        let back = dl.mul(&f.l.transpose());
        let full = g.to_full();
        for i in 0..n {
            for j in 0..n {
                if back[(i, j)] != full[(f.perm[i], f.perm[j])] {
                    return Err("LDLᵀ does not reconstruct the input".into());
                }
            }
        }
    }
    if f.status != Definiteness::Posdef {
        let w = f.witness.ok_or("missing witness")?;
        if w.iter().all(|&x| x == 0) || g.evaluate(&w) > Rational::zero() {
            return Err(format!("bad witness {w:?}"));
        }
    }
    Ok(())
}

/// Smith divisors form a divisibility chain whose product is `|det|`.
pub fn check_snf(rows: &[Vec<i64>]) -> Result<(), String> {
    let d = snf_divisors_i64(rows);
    if d.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(format!("{d:?} is not a divisibility chain"));
    }
    let det = det_i64(rows).unsigned_abs();
    if det != 0 && (d.len() != rows.len() || d.iter().map(|&x| x as u128).product::<u128>() != det) {
        return Err(format!("{d:?} does not multiply to {det}"));
    }
    Ok(())
}

/// The reported optimum is feasible, attains the value, has a full-rank tight set, and beats
/// every point of a coarse grid.
pub fn check_lp<R: Rng>(rng: &mut R) -> Result<(), String> {
    let m = rng.gen_range(3..8);
    let r = |x: i64| Rational::from_int(x);
    let mut cons: Vec<(Vec<Rational>, Rational)> =
        (0..m).map(|_| ((0..3).map(|_| r(rng.gen_range(-4..=4))).collect(), r(rng.gen_range(-4..=1)))).collect();
    for i in 0..3 {
        let mut e = vec![r(0); 3];
        e[i] = r(1);
        cons.push((e.clone(), r(-5)));
        e[i] = r(-1);
        cons.push((e, r(-5)));
    }
    let c: Vec<Rational> = (0..3).map(|_| r(rng.gen_range(-3..=3))).collect();
    let dot = |x: &[Rational], y: &[Rational]| x.iter().zip(y).map(|(p, q)| p * q).sum::<Rational>();
    let feasible = |p: &[Rational]| cons.iter().all(|(a, b)| dot(a, p) >= *b);
    match maximize(&c, &cons) {
        LpResult::Optimal { point, value } => {
            if !feasible(&point) || dot(&c, &point) != value {
                return Err("optimum infeasible or value mismatch".into());
            }
            let tight: Vec<Vec<Rational>> = cons.iter().filter(|(a, b)| dot(a, &point) == *b).map(|(a, _)| a.clone()).collect();
            if Matrix::from_rows(tight).rank() != 3 {
                return Err("optimum is not a vertex".into());
            }
            for x in -5..=5 {
                for y in -5..=5 {
                    for z in -5..=5 {
                        let p = [r(x), r(y), r(z)];
                        if feasible(&p) && dot(&c, &p) > value {
                            return Err(format!("grid point {x},{y},{z} beats the optimum"));
                        }
                    }
                }
            }
            Ok(())
        }
        LpResult::Infeasible => {
            for x in -5..=5 {
                for y in -5..=5 {
                    for z in -5..=5 {
                        if feasible(&[r(x), r(y), r(z)]) {
                            return Err("reported infeasible but a grid point is feasible".into());
                        }
                    }
                }
            }
            Ok(())
        }
        LpResult::Unbounded => Err("box-bounded program reported unbounded".into()),
    }
}

/// The eutaxy certificate reconstructs `G⁻¹` with coefficients of the claimed sign pattern.
pub fn check_eutaxy(g: &GramMatrix) -> Result<(), String> {
    let r = eutaxy_class(g).map_err(|e| e.to_string())?;
    r.verify(g).then_some(()).ok_or_else(|| format!("certificate for class {:?} does not verify", r.class))
}

/// Feasibility bits with and without symmetrization, for every Watson-admissible cyclic type
/// with `n ≤ max_n` and `d ≤ max_d`. Returns the number of codes compared.
pub fn check_symmetrize_agreement(max_n: usize, max_d: i64) -> Result<usize, String> {
    let mut count = 0;
    for n in 4..=max_n {
        for d in 2..=max_d {
            for t in generate_cyclic_candidates(n, d) {
                let c = Code::from_type(&t, n).unwrap();
                let plain = feasibility(&c, &FeasibilityOptions::default()).map_err(|e| e.to_string())?;
                let sym = feasibility(&c, &FeasibilityOptions { symmetrize: true, ..Default::default() })
                    .map_err(|e| e.to_string())?;
                let done = |s: &FeasibilityStatus| !matches!(s, FeasibilityStatus::Inconclusive { .. });
                if done(&plain.status) && done(&sym.status) && plain.status != sym.status {
                    return Err(format!("{t} at n = {n}: {:?} vs {:?}", plain.status, sym.status));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}
