//! Index systems: quotient types of sublattices spanned by `n` independent minimal vectors,
//! by exhaustive subsets or by orderly generation of orbit representatives.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::codes::QuotientType;
use crate::isometry::{apply, automorphisms};
use crate::lattice::{canonical, GramMatrix};
use crate::normal_form::{det_i64, snf_divisors_i64};
use crate::{Error, Result};

const P: u64 = (1 << 61) - 1;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

#[inline]
fn to_mod(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

/// Row echelon form over `𝔽_p` with `p = 2⁶¹ − 1`. Minors of the vectors we feed it are
/// bounded (Hadamard) far below `p`, so ranks agree with ranks over `ℚ`.
#[derive(Clone)]
struct ModEchelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    fn new() -> Self {
        ModEchelon { rows: Vec::new() }
    }

    fn reduce(&self, x: &[i64]) -> Vec<u64> {
        let mut v: Vec<u64> = x.iter().map(|&a| to_mod(a)).collect();
        for (piv, r) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (a, b) in v.iter_mut().zip(r) {
                    *a = (*a + P - mulmod(c, *b)) % P;
                }
            }
        }
        v
    }

    fn is_independent(&self, x: &[i64]) -> bool {
        self.reduce(x).iter().any(|&a| a != 0)
    }

    fn insert(&mut self, x: &[i64]) -> bool {
        let v = self.reduce(x);
        let Some(piv) = v.iter().position(|&a| a != 0) else { return false };
        let inv = powmod(v[piv], P - 2);
        let v: Vec<u64> = v.iter().map(|&a| mulmod(a, inv)).collect();
        for (_, r) in self.rows.iter_mut() {
            let c = r[piv];
            if c != 0 {
                for (a, b) in r.iter_mut().zip(&v) {
                    *a = (*a + P - mulmod(c, *b)) % P;
                }
            }
        }
        self.rows.push((piv, v));
        true
    }
}

fn check_hadamard(halfset: &[Vec<i64>], n: usize) -> Result<()> {
    let m = halfset.iter().map(|x| x.iter().map(|&a| (a as f64) * (a as f64)).sum::<f64>().sqrt()).fold(1.0, f64::max);
    if m.powi(n as i32) >= 2f64.powi(60) {
        return Err(Error::Unsupported("coordinates of minimal vectors too large for modular rank tests".into()));
    }
    Ok(())
}

/// Quotient type of `Λ/⟨vectors⟩`, or `None` when the `n` vectors are dependent.
pub fn quotient_type_of_vectors(vectors: &[Vec<i64>]) -> Option<QuotientType> {
    let det = det_i64(vectors);
    if det == 0 {
        return None;
    }
    if det.abs() == 1 {
        return Some(QuotientType::trivial());
    }
    let divs: Vec<u64> = snf_divisors_i64(vectors).into_iter().filter(|&d| d > 1).collect();
    Some(QuotientType::from_factors(&divs))
}

/// Quotient type for a subset of halfset indices.
pub fn quotient_type_of_subset(halfset: &[Vec<i64>], subset: &[usize]) -> Option<QuotientType> {
    let n = halfset.first()?.len();
    if subset.len() != n {
        return None;
    }
    let rows: Vec<Vec<i64>> = subset.iter().map(|&i| halfset[i].clone()).collect();
    quotient_type_of_vectors(&rows)
}

/// Permutation action of `Aut(Λ)` on the pairs `±x` of minimal vectors.
#[derive(Debug, Clone)]
pub struct HalfSetAction {
    pub halfset: Vec<Vec<i64>>,
    /// Generators in image notation: `g[i]` is the image of point `i`.
    pub generators: Vec<Vec<u32>>,
    pub order: u128,
}

impl HalfSetAction {
    /// Builds the action from the automorphism group; the order is counted by closure
    /// and fails beyond `limit`.
    pub fn from_lattice(g: &GramMatrix, limit: usize) -> Result<Self> {
        let halfset = g.min_vectors().halfset;
        let aut = automorphisms(g)?;
        let index: HashMap<&[i64], u32> = halfset.iter().enumerate().map(|(i, x)| (x.as_slice(), i as u32)).collect();
        let mut gens: Vec<Vec<u32>> = Vec::new();
        for u in &aut.generators {
            let p: Vec<u32> = halfset
                .iter()
                .map(|x| {
                    let y = canonical(&apply(u, x));
                    index.get(y.as_slice()).copied().ok_or_else(|| Error::Consistency("automorphism does not preserve minimal vectors".into()))
                })
                .collect::<Result<_>>()?;
            if p.iter().enumerate().any(|(i, &j)| i as u32 != j) && !gens.contains(&p) {
                gens.push(p);
            }
        }
        Self::new(halfset, gens, limit)
    }

    pub fn new(halfset: Vec<Vec<i64>>, generators: Vec<Vec<u32>>, limit: usize) -> Result<Self> {
        let mut a = HalfSetAction { halfset, generators, order: 0 };
        a.order = a.elements(limit)?.len() as u128;
        Ok(a)
    }

    pub fn degree(&self) -> usize {
        self.halfset.len()
    }

    /// Checks that each generator is a bijection preserving `|x·y|` under the Gram matrix.
    pub fn verify(&self, g: &GramMatrix) -> Result<()> {
        let s = self.degree();
        let ip: Vec<Vec<crate::Rational>> =
            self.halfset.iter().map(|x| self.halfset.iter().map(|y| g.sym().bilinear(x, y).abs()).collect()).collect();
        for p in &self.generators {
            let mut seen = vec![false; s];
            if p.len() != s {
                return Err(Error::Consistency("generator has wrong degree".into()));
            }
            for &j in p {
                if j as usize >= s || std::mem::replace(&mut seen[j as usize], true) {
                    return Err(Error::Consistency("generator is not a permutation".into()));
                }
            }
            for i in 0..s {
                for j in i..s {
                    if ip[i][j] != ip[p[i] as usize][p[j] as usize] {
                        return Err(Error::Consistency("generator does not preserve inner products".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// All group elements, identity first, in breadth-first order from the generators.
    pub fn elements(&self, limit: usize) -> Result<Vec<Vec<u32>>> {
        let s = self.degree();
        let id: Vec<u32> = (0..s as u32).collect();
        let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for gen in &self.generators {
                let h: Vec<u32> = out[i].iter().map(|&x| gen[x as usize]).collect();
                if seen.insert(h.clone()) {
                    if out.len() >= limit {
                        return Err(Error::Budget(format!("group order exceeds {limit}")));
                    }
                    out.push(h);
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// Same group acting on relabeled points: point `i` becomes `relabel[i]`.
    pub fn conjugate(&self, relabel: &[u32]) -> HalfSetAction {
        let s = self.degree();
        let mut inv = vec![0u32; s];
        for (i, &j) in relabel.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        let mut halfset = vec![Vec::new(); s];
        for (i, x) in self.halfset.iter().enumerate() {
            halfset[relabel[i] as usize] = x.clone();
        }
        let generators = self
            .generators
            .iter()
            .map(|g| (0..s).map(|j| relabel[g[inv[j] as usize] as usize]).collect())
            .collect();
        HalfSetAction { halfset, generators, order: self.order }
    }

    /// One permutation per line in image notation (0-based).
    pub fn write_group(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            let line: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_group(text: &str, halfset: Vec<Vec<i64>>, limit: usize) -> Result<Self> {
        let gens = crate::io::content_lines(text)
            .into_iter()
            .map(|l| l.iter().map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad point `{t}`")))).collect())
            .collect::<Result<Vec<Vec<u32>>>>()?;
        if gens.iter().any(|g| g.len() != halfset.len()) {
            return Err(Error::Parse("permutation length differs from the number of minimal pairs".into()));
        }
        Self::new(halfset, gens, limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    /// Raw number of `n`-subsets.
    Subsets,
    /// Number of orbits under the half-set group.
    Orbits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSystem {
    pub kind: CountKind,
    pub counts: BTreeMap<QuotientType, u64>,
    /// Sum of orbit lengths per type (orderly mode, when requested).
    pub orbit_weighted: Option<BTreeMap<QuotientType, u128>>,
}

impl IndexSystem {
    pub fn types(&self) -> Vec<QuotientType> {
        let mut t: Vec<QuotientType> = self.counts.keys().cloned().collect();
        t.sort_by_key(|q| q.sort_key());
        t
    }

    pub fn count(&self, q: &QuotientType) -> u64 {
        self.counts.get(q).copied().unwrap_or(0)
    }

    /// Rows `(type, count)` in table order.
    pub fn rows(&self) -> Vec<(QuotientType, u64)> {
        self.types().into_iter().map(|q| (q.clone(), self.count(&q))).collect()
    }

    pub fn maximal_index(&self) -> u64 {
        self.counts.keys().map(|q| q.order()).max().unwrap_or(0)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

/// All `n`-subsets of the half-set of minimal vectors; fails if `C(s, n) > budget`.
pub fn index_system_bruteforce(g: &GramMatrix, budget: u128) -> Result<IndexSystem> {
    let halfset = g.min_vectors().halfset;
    index_system_bruteforce_on(&halfset, g.dim(), budget)
}

pub fn index_system_bruteforce_on(halfset: &[Vec<i64>], n: usize, budget: u128) -> Result<IndexSystem> {
    let total = binomial(halfset.len(), n);
    if total > budget {
        return Err(Error::Budget(format!("{total} subsets exceed the budget of {budget}")));
    }
    check_hadamard(halfset, n)?;
    let s = halfset.len();
    // split on the first element so the work parallelizes
    let parts: Vec<BTreeMap<QuotientType, u64>> = (0..s)
        .into_par_iter()
        .map(|first| {
            let mut counts = BTreeMap::new();
            let mut ech = ModEchelon::new();
            ech.insert(&halfset[first]);
            let mut chosen = vec![first];
            brute_rec(halfset, n, &mut chosen, &ech, &mut counts);
            counts
        })
        .collect();
    let mut counts = BTreeMap::new();
    for p in parts {
        for (q, c) in p {
            *counts.entry(q).or_insert(0) += c;
        }
    }
    Ok(IndexSystem { kind: CountKind::Subsets, counts, orbit_weighted: None })
}

fn brute_rec(halfset: &[Vec<i64>], n: usize, chosen: &mut Vec<usize>, ech: &ModEchelon, counts: &mut BTreeMap<QuotientType, u64>) {
    if chosen.len() == n {
        let q = quotient_type_of_subset(halfset, chosen).expect("independent by construction");
        *counts.entry(q).or_insert(0) += 1;
        return;
    }
    let last = *chosen.last().expect("nonempty");
    let need = n - chosen.len();
    for t in last + 1..=halfset.len().saturating_sub(need) {
        if !ech.is_independent(&halfset[t]) {
            continue;
        }
        let mut e = ech.clone();
        e.insert(&halfset[t]);
        chosen.push(t);
        brute_rec(halfset, n, chosen, &e, counts);
        chosen.pop();
    }
}

#[derive(Debug, Clone)]
pub struct OrderlyOptions {
    /// Largest group order for which orbits are enumerated.
    pub group_limit: usize,
    /// Also accumulate orbit lengths per type.
    pub orbit_sizes: bool,
    /// Write each level `I_k` as a sorted block file here.
    pub dump_dir: Option<PathBuf>,
}

impl Default for OrderlyOptions {
    fn default() -> Self {
        OrderlyOptions { group_limit: 200_000, orbit_sizes: false, dump_dir: None }
    }
}

/// Group elements flattened with fast lookups by the image of a point.
struct GroupTable {
    s: usize,
    elems: Vec<u8>,
    /// `by_image[x * s + p]`: elements sending `x` to `p`.
    by_image: Vec<Vec<u32>>,
    orbit_min: Vec<u8>,
}

impl GroupTable {
    fn new(elements: &[Vec<u32>], s: usize) -> Self {
        let mut elems = Vec::with_capacity(elements.len() * s);
        let mut by_image = vec![Vec::new(); s * s];
        let mut orbit_min: Vec<u8> = (0..s as u8).collect();
        for (k, e) in elements.iter().enumerate() {
            for (x, &p) in e.iter().enumerate() {
                elems.push(p as u8);
                by_image[x * s + p as usize].push(k as u32);
                orbit_min[x] = orbit_min[x].min(p as u8);
            }
        }
        GroupTable { s, elems, by_image, orbit_min }
    }

    #[inline]
    fn image_mask(&self, k: u32, set: &[u8]) -> u128 {
        let e = &self.elems[k as usize * self.s..(k as usize + 1) * self.s];
        set.iter().fold(0u128, |m, &x| m | 1u128 << e[x as usize])
    }

    /// Whether the sorted set is lexicographically least in its orbit. Comparing sorted sets
    /// of equal size reduces to the lowest bit where their masks differ.
    fn is_minimal(&self, set: &[u8]) -> bool {
        let x1 = set[0];
        if set.iter().any(|&y| self.orbit_min[y as usize] < x1) {
            return false;
        }
        let mask = set.iter().fold(0u128, |m, &x| m | 1u128 << x);
        for &y in set {
            if self.orbit_min[y as usize] != x1 {
                continue;
            }
            for &k in &self.by_image[y as usize * self.s + x1 as usize] {
                let img = self.image_mask(k, set);
                let diff = img ^ mask;
                if diff != 0 && img >> diff.trailing_zeros() & 1 == 1 {
                    return false;
                }
            }
        }
        true
    }

    fn stabilizer_order(&self, set: &[u8]) -> usize {
        let mask = set.iter().fold(0u128, |m, &x| m | 1u128 << x);
        let n = self.elems.len() / self.s;
        (0..n as u32).filter(|&k| self.image_mask(k, set) == mask).count()
    }
}

/// Digest identifying the lattice in block-file headers.
pub fn lattice_hash(g: &GramMatrix) -> String {
    let h = Sha256::digest(crate::io::write_gram(g.sym()).as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Header line then one sorted tuple per line.
pub fn write_block(path: &Path, hash: &str, k: usize, tuples: &[u8]) -> Result<()> {
    use std::io::Write;
    let count = if k == 0 { 0 } else { tuples.len() / k };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# lattice {hash} k {k} count {count}")?;
    for t in tuples.chunks(k.max(1)) {
        let line: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads a block file back as `(hash, k, tuples)`.
pub fn read_block(path: &Path) -> Result<(String, usize, Vec<Vec<u8>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    let bad = || Error::Parse("bad block header".into());
    if head.len() != 7 || head[0] != "#" || head[1] != "lattice" || head[3] != "k" || head[5] != "count" {
        return Err(bad());
    }
    let k: usize = head[4].parse().map_err(|_| bad())?;
    let count: usize = head[6].parse().map_err(|_| bad())?;
    let tuples: Vec<Vec<u8>> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("bad index `{t}`")))).collect())
        .collect::<Result<_>>()?;
    if tuples.len() != count || tuples.iter().any(|t| t.len() != k) {
        return Err(Error::Parse("block size does not match header".into()));
    }
    Ok((head[2].to_string(), k, tuples))
}

/// Orbit representatives of independent `n`-subsets, built level by level from lexicographically
/// least representatives; counts are numbers of orbits per quotient type.
pub fn index_system_orderly(g: &GramMatrix, action: &HalfSetAction, opts: &OrderlyOptions) -> Result<IndexSystem> {
    let n = g.dim();
    let s = action.degree();
    if s > 128 {
        return Err(Error::Unsupported("more than 128 minimal pairs".into()));
    }
    if g.min_vectors().halfset != action.halfset {
        // a relabeled action is fine as long as it covers the same pairs
        let mut a = action.halfset.clone();
        a.sort();
        if a != g.min_vectors().halfset {
            return Err(Error::Consistency("action does not act on the minimal vectors of this lattice".into()));
        }
    }
    check_hadamard(&action.halfset, n)?;
    let elements = action.elements(opts.group_limit)?;
    let table = GroupTable::new(&elements, s);
    let hash = lattice_hash(g);
    let hs = &action.halfset;

    let mut level: Vec<u8> = (0..s as u8).filter(|&x| table.orbit_min[x as usize] == x).collect();
    let mut k = 1;
    dump(opts, &hash, k, &level)?;
    while k < n {
        let next: Vec<Vec<u8>> = level
            .par_chunks(k * 4096)
            .map(|block| {
                let mut out = Vec::new();
                let mut set = vec![0u8; k + 1];
                for rep in block.chunks(k) {
                    let mut ech = ModEchelon::new();
                    for &x in rep {
                        ech.insert(&hs[x as usize]);
                    }
                    set[..k].copy_from_slice(rep);
                    for t in rep[k - 1] + 1..s as u8 {
                        if !ech.is_independent(&hs[t as usize]) {
                            continue;
                        }
                        set[k] = t;
                        if table.is_minimal(&set) {
                            out.extend_from_slice(&set);
                        }
                    }
                }
                out
            })
            .collect();
        level = next.concat();
        k += 1;
        dump(opts, &hash, k, &level)?;
    }
    let order = elements.len() as u128;
    let per: Vec<(QuotientType, u128)> = level
        .par_chunks(n)
        .map(|rep| {
            let rows: Vec<Vec<i64>> = rep.iter().map(|&x| hs[x as usize].clone()).collect();
            let q = quotient_type_of_vectors(&rows).expect("independent by construction");
            let size = if opts.orbit_sizes { order / table.stabilizer_order(rep) as u128 } else { 0 };
            (q, size)
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut weighted = BTreeMap::new();
    for (q, size) in per {
        *counts.entry(q.clone()).or_insert(0u64) += 1;
        *weighted.entry(q).or_insert(0u128) += size;
    }
    Ok(IndexSystem { kind: CountKind::Orbits, counts, orbit_weighted: opts.orbit_sizes.then_some(weighted) })
}

fn dump(opts: &OrderlyOptions, hash: &str, k: usize, level: &[u8]) -> Result<()> {
    if let Some(dir) = &opts.dump_dir {
        std::fs::create_dir_all(dir)?;
        write_block(&dir.join(format!("I{k}.txt")), hash, k, level)?;
    }
    Ok(())
}
