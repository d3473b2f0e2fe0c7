//! Codes over ℤ/dℤ, cyclic types, Watson's criterion, and code equivalence.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::matrix::SymMatrix;
use crate::num::Rational;
use crate::{Error, Result};

/// Abelian group type by its nontrivial invariant factors, largest first (`4·2` is `[4, 2]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct QuotientType(pub Vec<u64>);

impl QuotientType {
    pub fn trivial() -> Self {
        QuotientType(Vec::new())
    }

    /// Normalizes arbitrary cyclic factors to invariant factors.
    pub fn from_factors(factors: &[u64]) -> Self {
        // invariant factors through prime-power decomposition
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &f in factors {
            let mut x = f;
            let mut p = 2;
            while x > 1 {
                if x % p == 0 {
                    let mut q = 1;
                    while x % p == 0 {
                        x /= p;
                        q *= p;
                    }
                    by_prime.entry(p).or_default().push(q);
                }
                p += 1;
            }
        }
        let len = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
        let mut inv = vec![1u64; len];
        for v in by_prime.values_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in v.iter().enumerate() {
                inv[i] *= q;
            }
        }
        QuotientType(inv)
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.0.len() == 1
    }

    /// Parses `1`, `12`, `6.2`, `6x2`, `6·2`, `4^2`, `2^3`, `4x2^2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(QuotientType::trivial());
        }
        let mut factors = Vec::new();
        for part in s.split(['x', '.', '·', '*']) {
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b, e),
                None => (part, "1"),
            };
            let b: u64 = base.trim().parse().map_err(|_| Error::Parse(format!("bad group type `{s}`")))?;
            let e: u32 = exp.trim().parse().map_err(|_| Error::Parse(format!("bad group type `{s}`")))?;
            if b < 2 || e == 0 {
                return Err(Error::Parse(format!("bad group type `{s}`")));
            }
            factors.extend(std::iter::repeat_n(b, e as usize));
        }
        let q = QuotientType::from_factors(&factors);
        if q.0 != factors {
            return Err(Error::Parse(format!("`{s}` is not written with invariant factors")));
        }
        Ok(q)
    }
}

impl fmt::Display for QuotientType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(self.0[i].to_string());
            } else {
                parts.push(format!("{}^{}", self.0[i], j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join("x"))
    }
}

/// Sorting key matching the usual table order: by order, then factors.
impl QuotientType {
    pub fn sort_key(&self) -> (u64, Vec<u64>) {
        (self.order(), self.0.clone())
    }
}

/// Residue class reduced to `{0,…,⌊d/2⌋}` up to sign.
#[inline]
pub fn abs_residue(x: i64, d: i64) -> i64 {
    let r = x.rem_euclid(d);
    r.min(d - r)
}

/// Multiplicities `(m₁, …, m_{⌊d/2⌋})` of the residues `±i` of a word of order `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct CyclicType {
    pub d: i64,
    pub m: Vec<usize>,
}

impl CyclicType {
    pub fn new(d: i64, m: Vec<usize>) -> Result<Self> {
        if d < 2 || m.len() != (d / 2) as usize {
            return Err(Error::InvalidCode(format!("type needs {} multiplicities for d = {d}", d / 2)));
        }
        let t = CyclicType { d, m };
        if !t.gcd_ok() {
            return Err(Error::InvalidCode(format!("residues of {t} do not generate Z/{d}")));
        }
        Ok(t)
    }

    /// Type of a word (zeros ignored); `None` if it does not have order `d`.
    pub fn from_word(word: &[i64], d: i64) -> Option<Self> {
        let mut m = vec![0usize; (d / 2) as usize];
        for &x in word {
            let r = abs_residue(x, d);
            if r != 0 {
                m[(r - 1) as usize] += 1;
            }
        }
        let t = CyclicType { d, m };
        t.gcd_ok().then_some(t)
    }

    fn gcd_ok(&self) -> bool {
        let g = self
            .m
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(self.d, |g, (i, _)| g.gcd(&(i as i64 + 1)));
        g == 1 && self.n() > 0
    }

    pub fn n(&self) -> usize {
        self.m.iter().sum()
    }

    /// Residues sorted nondecreasing.
    pub fn word(&self) -> Vec<i64> {
        let mut w = Vec::with_capacity(self.n());
        for (i, &c) in self.m.iter().enumerate() {
            w.extend(std::iter::repeat_n(i as i64 + 1, c));
        }
        w
    }

    /// `u·t` for a unit `u`.
    pub fn scaled(&self, u: i64) -> CyclicType {
        let w: Vec<i64> = self.word().iter().map(|&x| x * u).collect();
        CyclicType::from_word(&w, self.d).expect("units preserve order")
    }

    /// Lexicographically smallest type in the orbit of `(ℤ/dℤ)ˣ/{±1}`.
    pub fn unit_orbit(&self) -> CyclicType {
        units(self.d).into_iter().map(|u| self.scaled(u)).min().expect("1 is a unit")
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.unit_orbit()
    }

    /// Watson's criterion for every nonzero multiple of the word.
    pub fn watson_ok(&self) -> bool {
        watson_word_ok(&self.word(), self.d)
    }

    /// Number of residues equal to `±i`.
    pub fn count(&self, i: usize) -> usize {
        self.m[i - 1]
    }
}

impl fmt::Display for CyclicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.m.iter().map(|c| c.to_string()).collect();
        write!(f, "({})_{}", parts.join(","), self.d)
    }
}

/// Units of `ℤ/dℤ` up to sign, as representatives in `1..=d/2`.
pub fn units(d: i64) -> Vec<i64> {
    (1..=d / 2).filter(|u| u.gcd(&d) == 1).collect()
}

/// Watson's criterion for the element `word/d` and all of its nonzero multiples, each
/// written over its own denominator with residues in `[−d′/2, d′/2]`: `Σ|a_i| ≥ 2d′`.
pub fn watson_word_ok(word: &[i64], d: i64) -> bool {
    for k in 1..d {
        let w: Vec<i64> = word.iter().map(|&x| abs_residue(k * x, d)).collect();
        let g = w.iter().fold(d, |g, &x| g.gcd(&x));
        if g == d {
            continue;
        }
        let dd = d / g;
        let s: i64 = w.iter().map(|x| x / g).sum();
        if s < 2 * dd {
            return false;
        }
    }
    true
}

/// Both sides of `((Σ|a_i|) − 2d) N(f) = Σ |a_i| (N(f − sgn(a_i) e_i) − N(e_i))`
/// for `f = Σ a_i e_i / d` in the lattice with Gram `e_gram` on `e_1,…,e_n`.
pub fn watson_identity_check(e_gram: &SymMatrix, a: &[i64], d: i64) -> (Rational, Rational) {
    let n = e_gram.dim();
    assert_eq!(a.len(), n);
    let dd = Rational::from_int(d);
    let f: Vec<Rational> = a.iter().map(|&x| Rational::from_int(x) / &dd).collect();
    let nf = e_gram.evaluate_rat(&f);
    let sum_abs: i64 = a.iter().map(|x| x.abs()).sum();
    let lhs = Rational::from_int(sum_abs - 2 * d) * &nf;
    let mut rhs = Rational::zero();
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        let mut g = f.clone();
        g[i] -= Rational::from_int(a[i].signum());
        let diff = e_gram.evaluate_rat(&g) - e_gram.get(i, i);
        rhs += diff.mul_i64(a[i].abs());
    }
    (lhs, rhs)
}

/// Watson filter on a type (all multiples; see [`watson_word_ok`]).
pub fn watson_filter(t: &CyclicType) -> bool {
    t.watson_ok()
}

/// Compositions of `n` into `parts` nonnegative parts.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, n, &mut cur, &mut out);
    out
}

/// Canonical cyclic types of length `n` and order `d` passing the gcd condition and Watson's
/// criterion, sorted.
pub fn generate_cyclic_candidates(n: usize, d: i64) -> Vec<CyclicType> {
    let mut out: Vec<CyclicType> = compositions(n, (d / 2) as usize)
        .into_iter()
        .filter_map(|m| CyclicType::new(d, m).ok())
        .filter(|t| t.is_canonical() && t.watson_ok())
        .collect();
    out.sort();
    out
}

/// Compositions that pass the gcd condition, before Watson filtering, up to the unit action.
pub fn count_cyclic_before_watson(n: usize, d: i64) -> usize {
    compositions(n, (d / 2) as usize)
        .into_iter()
        .filter_map(|m| CyclicType::new(d, m).ok())
        .filter(|t| t.is_canonical())
        .count()
}

/// Code of length `n` generated by `k` words with moduli `d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Code {
    n: usize,
    moduli: Vec<i64>,
    gens: Vec<Vec<i64>>,
}

impl Code {
    /// Reduces residues; requires the generators to be independent of the stated orders.
    pub fn new(n: usize, moduli: Vec<i64>, gens: Vec<Vec<i64>>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidCode("at least one generator is required".into()));
        }
        if moduli.len() != gens.len() {
            return Err(Error::InvalidCode("one modulus per generator".into()));
        }
        if n == 0 {
            return Err(Error::InvalidCode("length must be positive".into()));
        }
        let mut red = Vec::new();
        for (g, &d) in gens.iter().zip(&moduli) {
            if d < 2 {
                return Err(Error::InvalidCode(format!("modulus {d} < 2")));
            }
            if g.len() != n {
                return Err(Error::InvalidCode(format!("generator of length {} in a code of length {n}", g.len())));
            }
            red.push(g.iter().map(|x| x.rem_euclid(d)).collect::<Vec<_>>());
        }
        let code = Code { n, moduli, gens: red };
        let expected: i64 = code.moduli.iter().product();
        if code.elements().len() as i64 != expected {
            return Err(Error::InvalidCode(format!(
                "generators are not independent of orders {:?}",
                code.moduli
            )));
        }
        Ok(code)
    }

    pub fn cyclic(word: Vec<i64>, d: i64) -> Result<Self> {
        let n = word.len();
        Code::new(n, vec![d], vec![word])
    }

    /// The code of a cyclic type padded with zeros to length `n`, residues nondecreasing
    /// followed by zeros.
    pub fn from_type(t: &CyclicType, n: usize) -> Result<Self> {
        let mut w = t.word();
        if w.len() > n {
            return Err(Error::InvalidCode("type longer than code".into()));
        }
        w.resize(n, 0);
        Code::cyclic(w, t.d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.gens
    }

    /// Exponent bound `N = lcm(d_k)`.
    pub fn modulus_lcm(&self) -> i64 {
        self.moduli.iter().fold(1, |a, b| a.lcm(b))
    }

    pub fn order(&self) -> i64 {
        self.moduli.iter().product()
    }

    pub fn quotient_type(&self) -> QuotientType {
        QuotientType::from_factors(&self.moduli.iter().map(|&d| d as u64).collect::<Vec<_>>())
    }

    /// All words, as residues mod `N = lcm(d_k)`, sorted.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let big = self.modulus_lcm();
        let mut out: Vec<Vec<i64>> = vec![vec![0; self.n]];
        for (g, &d) in self.gens.iter().zip(&self.moduli) {
            let scale = big / d;
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for w in &out {
                for c in 0..d {
                    next.push(w.iter().zip(g).map(|(x, y)| (x + c * scale * y).rem_euclid(big)).collect());
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }

    /// Glue vectors `a/d` (rows of rationals).
    pub fn glue_vectors(&self) -> Vec<Vec<Rational>> {
        self.gens
            .iter()
            .zip(&self.moduli)
            .map(|(g, &d)| g.iter().map(|&x| Rational::new(x, d)).collect())
            .collect()
    }

    /// Coordinates in which some word is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.gens.iter().any(|g| g[i] != 0)).collect()
    }

    /// No coordinate where all words vanish.
    pub fn is_nontrivially_extending(&self) -> bool {
        self.support().len() == self.n
    }

    /// Restriction to the support.
    pub fn restrict_to_support(&self) -> Result<Code> {
        let sup = self.support();
        let gens = self.gens.iter().map(|g| sup.iter().map(|&i| g[i]).collect()).collect();
        Code::new(sup.len(), self.moduli.clone(), gens)
    }

    /// Pads with zero coordinates to length `n`.
    pub fn pad(&self, n: usize) -> Result<Code> {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.resize(n, 0);
                g
            })
            .collect();
        Code::new(n, self.moduli.clone(), gens)
    }

    /// Binary code (all moduli 2).
    pub fn is_binary(&self) -> bool {
        self.moduli.iter().all(|&d| d == 2)
    }

    /// Display of the generators, e.g. `(1,1,2,0)_4 (0,1,1,1)_2`.
    pub fn generators_string(&self) -> String {
        self.gens
            .iter()
            .zip(&self.moduli)
            .map(|(g, d)| {
                let parts: Vec<String> = g.iter().map(|x| x.to_string()).collect();
                format!("({})_{}", parts.join(","), d)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.generators_string())
    }
}

/// Parses the code text format: `n d1 [d2 …]`, then one line of `n` residues per generator.
pub fn parse_code(text: &str) -> Result<Code> {
    let lines = crate::io::content_lines(text);
    let (head, rows) = lines.split_first().ok_or_else(|| Error::Parse("empty code file".into()))?;
    let nums = |v: &[&str]| -> Result<Vec<i64>> {
        v.iter().map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer `{t}`")))).collect()
    };
    let head = nums(head)?;
    if head.len() < 2 {
        return Err(Error::Parse("header must be `n d1 [d2 ...]`".into()));
    }
    let n = usize::try_from(head[0]).map_err(|_| Error::Parse("negative length".into()))?;
    let moduli = head[1..].to_vec();
    if rows.len() != moduli.len() {
        return Err(Error::Parse(format!("expected {} generator lines, found {}", moduli.len(), rows.len())));
    }
    let gens = rows.iter().map(|r| nums(r)).collect::<Result<Vec<_>>>()?;
    Code::new(n, moduli, gens)
}

pub fn write_code(c: &Code) -> String {
    let mut s = format!("{}", c.n());
    for d in c.moduli() {
        s.push_str(&format!(" {d}"));
    }
    s.push('\n');
    for g in c.generators() {
        let parts: Vec<String> = g.iter().map(|x| x.to_string()).collect();
        s.push_str(&parts.join(" "));
        s.push('\n');
    }
    s
}

/// Number of weight-4 words of a binary code.
pub fn weight4_words(c: &Code) -> Result<usize> {
    Ok(binary_words(c)?.iter().filter(|w| w.iter().filter(|&&x| x != 0).count() == 4).count())
}

fn binary_words(c: &Code) -> Result<Vec<Vec<i64>>> {
    if !c.is_binary() {
        return Err(Error::InvalidCode("binary code expected".into()));
    }
    let words = c.elements();
    if words.iter().any(|w| {
        let wt = w.iter().filter(|&&x| x != 0).count();
        wt > 0 && wt < 4
    }) {
        return Err(Error::InvalidCode("word of weight below 4".into()));
    }
    Ok(words)
}

/// Pairs `{i, j}` not covered by any weight-4 word.
pub fn uncovered_pairs(c: &Code) -> Result<usize> {
    let words = binary_words(c)?;
    let n = c.n();
    let mut covered = vec![vec![false; n]; n];
    for w in words.iter().filter(|w| w.iter().filter(|&&x| x != 0).count() == 4) {
        let sup: Vec<usize> = (0..n).filter(|&i| w[i] != 0).collect();
        for &i in &sup {
            for &j in &sup {
                covered[i][j] = true;
            }
        }
    }
    Ok((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !covered[i][j]).count())
}

pub fn is_complete(c: &Code) -> Result<bool> {
    Ok(uncovered_pairs(c)? == 0)
}

/// `(s, r) = (n + 8 w₄, n(n+1)/2 − t)` for the lattice spanned by `ℤⁿ` and `C/2`.
pub fn predicted_invariants(c: &Code) -> Result<(usize, usize)> {
    let n = c.n();
    Ok((n + 8 * weight4_words(c)?, n * (n + 1) / 2 - uncovered_pairs(c)?))
}

/// Word lists, coordinate invariants, and an isomorphism search between codes.
struct CodeData {
    n: usize,
    big: i64,
    words: Vec<Vec<i64>>,
    col_inv: Vec<Vec<i64>>,
}

impl CodeData {
    fn new(c: &Code) -> Self {
        let big = c.modulus_lcm();
        let words = c.elements();
        let col_inv = (0..c.n())
            .map(|i| {
                let mut v: Vec<i64> = words.iter().map(|w| abs_residue(w[i], big)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        CodeData { n: c.n(), big, words, col_inv }
    }
}

/// Invariant of a code under signed permutations, used for bucketing.
pub fn code_invariant(c: &Code) -> Vec<u64> {
    let data = CodeData::new(c);
    let mut inv: Vec<u64> = vec![c.n() as u64, data.big as u64];
    inv.extend(c.quotient_type().0.iter().copied());
    let mut cols: Vec<&Vec<i64>> = data.col_inv.iter().collect();
    cols.sort();
    for col in cols {
        inv.push(u64::MAX);
        inv.extend(col.iter().map(|&x| x as u64));
    }
    let mut word_types: Vec<Vec<i64>> = data
        .words
        .iter()
        .map(|w| {
            let mut v: Vec<i64> = w.iter().map(|&x| abs_residue(x, data.big)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    word_types.sort();
    for w in word_types {
        inv.push(u64::MAX - 1);
        inv.extend(w.iter().map(|&x| x as u64));
    }
    inv
}

/// Signed permutation `(σ, ε)`: coordinate `σ[t]` of a word of `A`, times `ε[t]`, becomes
/// coordinate `t` of a word of `B`.
pub type SignedPerm = (Vec<usize>, Vec<i64>);

pub fn find_code_isomorphism(a: &Code, b: &Code) -> Option<SignedPerm> {
    if a.n() != b.n() || a.quotient_type() != b.quotient_type() {
        return None;
    }
    let da = CodeData::new(a);
    let db = CodeData::new(b);
    if da.big != db.big {
        return None;
    }
    let mut ia: Vec<&Vec<i64>> = da.col_inv.iter().collect();
    let mut ib: Vec<&Vec<i64>> = db.col_inv.iter().collect();
    ia.sort();
    ib.sort();
    if ia != ib {
        return None;
    }
    extend_map(&da, &db, &[])
}

/// Searches for a signed permutation from `A` to `B` extending `prefix`, given as
/// `(t, σ(t), ε_t)` triples.
fn extend_map(da: &CodeData, db: &CodeData, prefix: &[(usize, usize, i64)]) -> Option<SignedPerm> {
    let n = db.n;
    let mut sigma = vec![usize::MAX; n];
    let mut eps = vec![1i64; n];
    let mut used = vec![false; da.n];
    let mut keys_a = vec![0u128; da.words.len()];
    let mut keys_b = vec![0u128; db.words.len()];
    let big = da.big as u128;
    for &(t, i, e) in prefix {
        if used[i] || da.col_inv[i] != db.col_inv[t] {
            return None;
        }
        used[i] = true;
        sigma[t] = i;
        eps[t] = e;
        for (k, w) in keys_a.iter_mut().zip(&da.words) {
            *k = *k * big + (e * w[i]).rem_euclid(da.big) as u128;
        }
        for (k, w) in keys_b.iter_mut().zip(&db.words) {
            *k = *k * big + w[t] as u128;
        }
    }
    let mut sa = keys_a.clone();
    let mut sb = keys_b.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    // remaining coordinates of B, most distinctive invariant first
    let mut counts: HashMap<&Vec<i64>, usize> = HashMap::new();
    for c in &db.col_inv {
        *counts.entry(c).or_default() += 1;
    }
    let fixed: Vec<usize> = prefix.iter().map(|p| p.0).collect();
    let mut order: Vec<usize> = (0..n).filter(|t| !fixed.contains(t)).collect();
    order.sort_by_key(|&t| (counts[&db.col_inv[t]], t));
    let mut full = fixed;
    full.extend(order);
    if search(da, db, &full, prefix.len(), &mut sigma, &mut eps, &mut used, &keys_a, &keys_b) {
        Some((sigma, eps))
    } else {
        None
    }
}

/// Generators and order of the group of signed permutations preserving a code.
///
/// The generators are coset representatives along the stabilizer chain of the
/// coordinates `0, 1, …, n−1` (with sign `+1`), so they generate the whole group.
#[derive(Debug, Clone)]
pub struct CodeGroup {
    pub generators: Vec<SignedPerm>,
    pub order: u128,
}

pub fn code_automorphisms(c: &Code) -> CodeGroup {
    let d = CodeData::new(c);
    let n = c.n();
    let mut gens = Vec::new();
    let mut order: u128 = 1;
    let mut prefix: Vec<(usize, usize, i64)> = Vec::new();
    for t in 0..n {
        let mut orbit = 0u128;
        for i in t..n {
            for e in [1i64, -1] {
                let mut p = prefix.clone();
                p.push((t, i, e));
                if let Some(g) = extend_map(&d, &d, &p) {
                    orbit += 1;
                    let is_identity = g.0.iter().enumerate().all(|(a, &b)| a == b) && g.1.iter().all(|&x| x == 1);
                    if !is_identity {
                        gens.push(g);
                    }
                }
            }
        }
        order *= orbit;
        prefix.push((t, t, 1));
    }
    CodeGroup { generators: gens, order }
}

#[allow(clippy::too_many_arguments)]
fn search(
    da: &CodeData,
    db: &CodeData,
    order: &[usize],
    depth: usize,
    sigma: &mut [usize],
    eps: &mut [i64],
    used: &mut [bool],
    keys_a: &[u128],
    keys_b: &[u128],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let t = order[depth];
    let big = da.big as u128;
    let nb: Vec<u128> = keys_b.iter().zip(&db.words).map(|(k, w)| k * big + w[t] as u128).collect();
    let mut sb = nb.clone();
    sb.sort_unstable();
    for i in 0..da.n {
        if used[i] || da.col_inv[i] != db.col_inv[t] {
            continue;
        }
        let symmetric = da.words.iter().all(|w| (2 * w[i]) % da.big == 0);
        for &e in if symmetric { &[1i64][..] } else { &[1i64, -1][..] } {
            let na: Vec<u128> =
                keys_a.iter().zip(&da.words).map(|(k, w)| k * big + (e * w[i]).rem_euclid(da.big) as u128).collect();
            let mut sa = na.clone();
            sa.sort_unstable();
            if sa != sb {
                continue;
            }
            sigma[t] = i;
            eps[t] = e;
            used[i] = true;
            if search(da, db, order, depth + 1, sigma, eps, used, &na, &nb) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}

pub fn code_equivalence(a: &Code, b: &Code) -> bool {
    find_code_isomorphism(a, b).is_some()
}

/// Partitions codes into equivalence classes; returns indices of one representative per
/// class (the first occurrence) and the class of every input.
pub fn equivalence_classes(codes: &[Code]) -> (Vec<usize>, Vec<usize>) {
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0; codes.len()];
    for (i, c) in codes.iter().enumerate() {
        let key = code_invariant(c);
        let bucket = buckets.entry(key).or_default();
        let found = bucket.iter().copied().find(|&r| code_equivalence(&codes[reps[r]], c));
        match found {
            Some(r) => class[i] = r,
            None => {
                bucket.push(reps.len());
                class[i] = reps.len();
                reps.push(i);
            }
        }
    }
    (reps, class)
}

/// Applies a signed permutation found by [`find_code_isomorphism`] to the words of `a`.
pub fn apply_signed_perm(words: &[Vec<i64>], p: &SignedPerm, modulus: i64) -> Vec<Vec<i64>> {
    let (sigma, eps) = p;
    words
        .iter()
        .map(|w| (0..sigma.len()).map(|t| (eps[t] * w[sigma[t]]).rem_euclid(modulus)).collect())
        .collect()
}

/// Largest multiplicity used by the `4·2^k` refinement: components `±1` of words of order 4.
pub fn m1_of_order4(c: &Code) -> usize {
    let data = CodeData::new(c);
    if data.big % 4 != 0 {
        return 0;
    }
    let q = data.big / 4;
    data.words
        .iter()
        .filter(|w| w.iter().any(|&x| x % q == 0 && (x / q) % 2 == 1))
        .map(|w| w.iter().filter(|&&x| x % q == 0 && abs_residue(x / q, 4) == 1).count())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ct(d: i64, m: &[usize]) -> CyclicType {
        CyclicType::new(d, m.to_vec()).unwrap()
    }

    #[test]
    fn quotient_types() {
        assert_eq!(QuotientType::from_factors(&[2, 3]), QuotientType(vec![6]));
        assert_eq!(QuotientType::from_factors(&[4, 2, 2]).to_string(), "4x2^2");
        assert_eq!(QuotientType::parse("6.2").unwrap(), QuotientType(vec![6, 2]));
        assert_eq!(QuotientType::parse("2^4").unwrap(), QuotientType(vec![2, 2, 2, 2]));
        assert_eq!(QuotientType::parse("1").unwrap(), QuotientType::trivial());
        assert!(QuotientType::parse("2x6").is_err());
        assert!(QuotientType::parse("3x2").is_err());
    }

    #[test]
    fn watson_filter_examples() {
        assert!(!watson_filter(&ct(3, &[5])));
        assert!(watson_filter(&ct(2, &[4])));
        assert!(!watson_filter(&ct(5, &[7, 1])));
        assert!(watson_filter(&ct(5, &[1, 7])) == watson_filter(&ct(5, &[7, 1])));
    }

    #[test]
    fn unit_orbits() {
        assert_eq!(ct(5, &[4, 4]).unit_orbit(), ct(5, &[4, 4]));
        assert_eq!(ct(5, &[8, 1]).unit_orbit(), ct(5, &[1, 8]));
        let t = ct(7, &[6, 1, 2]);
        let images: Vec<CyclicType> = units(7).into_iter().map(|u| t.scaled(u)).collect();
        assert_eq!(images.len(), 3);
        assert_eq!(t.unit_orbit(), images.iter().min().unwrap().clone());
    }

    #[test]
    fn cyclic_candidates_dimension_nine() {
        assert_eq!(generate_cyclic_candidates(9, 2), vec![ct(2, &[9])]);
        assert_eq!(generate_cyclic_candidates(9, 3), vec![ct(3, &[9])]);
        assert_eq!(generate_cyclic_candidates(9, 5).len(), 4);
    }

    #[test]
    fn watson_identity_on_identity_gram() {
        for (n, d) in [(4usize, 2i64), (9, 3), (7, 5)] {
            let a = vec![1i64; n];
            let (lhs, rhs) = watson_identity_check(&SymMatrix::identity(n), &a, d);
            let expect = Rational::new((n as i64 - 2 * d) * n as i64, d * d);
            assert_eq!(lhs, expect);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn codes_and_equivalence() {
        let c = Code::cyclic(vec![1, 1, 1, 1], 2).unwrap();
        assert_eq!(c.elements().len(), 2);
        assert!(Code::new(4, vec![2, 2], vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1]]).is_err());
        assert!(Code::cyclic(vec![0, 0, 0], 2).is_err());
        let a = Code::cyclic(vec![1, 2, 3, 1, 0], 7).unwrap();
        let b = Code::cyclic(vec![0, 6, 1, 4, 5], 7).unwrap();
        assert!(code_equivalence(&a, &b));
        // different weight systems
        let t1 = Code::new(9, vec![2, 2], vec![vec![1, 1, 1, 1, 0, 0, 0, 0, 0], vec![0, 0, 0, 0, 1, 1, 1, 1, 1]]).unwrap();
        let t4 = Code::new(9, vec![2, 2], vec![vec![1, 1, 1, 1, 1, 0, 0, 0, 0], vec![0, 0, 0, 0, 1, 1, 1, 1, 1]]).unwrap();
        assert!(!code_equivalence(&t1, &t4));
        // basis change
        let t1b = Code::new(9, vec![2, 2], vec![vec![1, 1, 1, 1, 1, 1, 1, 1, 1], vec![0, 0, 0, 0, 1, 1, 1, 1, 1]]).unwrap();
        assert!(code_equivalence(&t1, &t1b));
    }

    #[test]
    fn binary_formulas() {
        let h8 = Code::new(
            8,
            vec![2; 4],
            vec![
                vec![1, 1, 1, 1, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 1, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 1, 1, 1],
                vec![0, 1, 0, 1, 0, 1, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(weight4_words(&h8).unwrap(), 14);
        assert_eq!(uncovered_pairs(&h8).unwrap(), 0);
        assert!(is_complete(&h8).unwrap());
        assert_eq!(predicted_invariants(&h8).unwrap(), (120, 36));
        let c = Code::cyclic(vec![1, 1, 1, 1, 0, 0, 0, 0, 0], 2).unwrap();
        assert_eq!(predicted_invariants(&c).unwrap().0, 17);
        // chained (2m, m-1, 4) code for m = 4
        let chain: Vec<Vec<i64>> = (0..3).map(|k| (0..8).map(|i| i64::from(i / 2 == k || i / 2 == k + 1)).collect()).collect();
        let cc = Code::new(8, vec![2; 3], chain).unwrap();
        assert!(is_complete(&cc).unwrap());
        assert!(weight4_words(&Code::cyclic(vec![1, 1, 1, 0], 2).unwrap()).is_err());
    }

    #[test]
    fn automorphism_group_orders() {
        // (1,1,1,1)_2: all permutations and sign changes
        let c = Code::cyclic(vec![1, 1, 1, 1], 2).unwrap();
        assert_eq!(code_automorphisms(&c).order, 24 * 16);
        // (1,1,1,1,1)_3 : S_5 times the global sign
        let c = Code::cyclic(vec![1; 5], 3).unwrap();
        assert_eq!(code_automorphisms(&c).order, 240);
        let c = Code::cyclic(vec![1, 1, 2, 2, 2], 5).unwrap();
        assert_eq!(code_automorphisms(&c).order, 2 * 2 * 6);
        let h8 = Code::new(
            8,
            vec![2; 4],
            vec![
                vec![1, 1, 1, 1, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 1, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 1, 1, 1],
                vec![0, 1, 0, 1, 0, 1, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(code_automorphisms(&h8).order, 1344 * 256);
    }

    #[test]
    fn code_text_format() {
        let c = parse_code("# 4.2 code\n5 4 2\n1 1 2 -1 0\n0 1 1 1 1\n").unwrap();
        assert_eq!(c.generators()[0], vec![1, 1, 2, 3, 0]);
        assert_eq!(parse_code(&write_code(&c)).unwrap(), c);
        assert!(parse_code("3 2\n1 1\n").is_err());
    }

    proptest! {
        #[test]
        fn watson_identity_random(entries in proptest::collection::vec(-20i64..21, 10), diag in proptest::collection::vec(1i64..30, 4), den in 1i64..7, a in proptest::collection::vec(-6i64..7, 4), d in 2i64..13) {
            let mut g = SymMatrix::zeros(4);
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    let v = if i == j { Rational::new(diag[i] * 40, 1) } else { Rational::new(entries[k], den) };
                    g.set(i, j, v);
                    k += 1;
                }
            }
            let (lhs, rhs) = watson_identity_check(&g, &a, d);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn unit_orbit_idempotent(m in proptest::collection::vec(0usize..4, 4)) {
            if let Ok(t) = CyclicType::new(9, m) {
                let c = t.unit_orbit();
                prop_assert_eq!(c.unit_orbit(), c.clone());
                prop_assert!(c <= t);
            }
        }

        #[test]
        fn equivalence_under_signed_permutations(word in proptest::collection::vec(0i64..6, 6), perm_seed in 0usize..720, signs in proptest::collection::vec(proptest::bool::ANY, 6)) {
            prop_assume!(word.iter().any(|&x| x % 2 == 1) && word.iter().any(|&x| x % 3 != 0));
            let a = Code::cyclic(word.clone(), 6).unwrap();
            let mut idx: Vec<usize> = (0..6).collect();
            let mut s = perm_seed;
            for i in (1..6).rev() {
                idx.swap(i, s % (i + 1));
                s /= i + 1;
            }
            let w2: Vec<i64> = (0..6).map(|t| if signs[t] { -word[idx[t]] } else { word[idx[t]] }).collect();
            let b = Code::cyclic(w2, 6).unwrap();
            prop_assert!(code_equivalence(&a, &b));
            prop_assert!(code_equivalence(&b, &a));
        }
    }
}
