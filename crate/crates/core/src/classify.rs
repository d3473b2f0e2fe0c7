//! Classification drivers: cyclic types of a given order, and non-cyclic quotient types
//! built by extending feasible codes of a smaller type by one more generator.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_integer::Integer;
use rayon::prelude::*;

use crate::codes::{
    count_cyclic_before_watson, equivalence_classes, generate_cyclic_candidates, Code, CyclicType, QuotientType,
};
use crate::face::{class_invariants, ClassInvariants};
use crate::feasibility::{build_geometry, feasibility_in, FeasibilityOptions, FeasibilityStatus};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    pub feasibility: FeasibilityOptions,
}

/// One classified code with its status and, when feasible, the invariants of the class of `F_C`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassRow {
    pub d_structure: QuotientType,
    pub code: Code,
    #[serde(flatten)]
    pub status: FeasibilityStatus,
    pub invariants: Option<ClassInvariants>,
}

impl ClassRow {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.status, FeasibilityStatus::Inconclusive { .. })
    }

    /// `(s, r, s′)` if feasible.
    pub fn srs(&self) -> Option<(usize, usize, usize)> {
        self.invariants.as_ref().map(|c| (c.s, c.r, c.s_prime))
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct ClassifyStats {
    /// Candidates before Watson's criterion (cyclic) or before the subcode prefilter.
    pub candidates_before_filter: usize,
    pub candidates_after_filter: usize,
    /// Classes up to equivalence among the filtered candidates.
    pub classes: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Classification {
    pub n: usize,
    pub d_structure: QuotientType,
    pub stats: ClassifyStats,
    pub rows: Vec<ClassRow>,
}

impl Classification {
    pub fn feasible(&self) -> impl Iterator<Item = &ClassRow> {
        self.rows.iter().filter(|r| r.is_feasible())
    }

    pub fn has_inconclusive(&self) -> bool {
        self.rows.iter().any(|r| r.is_inconclusive())
    }
}

/// Feasibility of one code and, when feasible, the invariants of its class.
pub fn evaluate(code: &Code, d_structure: &QuotientType, opts: &ClassifyOptions) -> Result<ClassRow> {
    let geom = build_geometry(code)?;
    let out = feasibility_in(&geom, &opts.feasibility)?;
    let invariants = match &out.witness {
        Some(w) => Some(class_invariants(&geom, w)?),
        None => None,
    };
    Ok(ClassRow { d_structure: d_structure.clone(), code: code.clone(), status: out.status, invariants })
}

/// Cyclic codes of order `d` and full support `n`, one row per Watson-admissible type.
pub fn classify_cyclic(n: usize, d: i64, opts: &ClassifyOptions) -> Result<Classification> {
    let types = generate_cyclic_candidates(n, d);
    let q = QuotientType::from_factors(&[d as u64]);
    let rows = types
        .par_iter()
        .map(|t| evaluate(&Code::from_type(t, n)?, &q, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification {
        n,
        d_structure: q,
        stats: ClassifyStats {
            candidates_before_filter: count_cyclic_before_watson(n, d),
            candidates_after_filter: types.len(),
            classes: types.len(),
        },
        rows,
    })
}

/// Remembers which cyclic types are realizable, each on its own support.
///
/// A word `a/m` of a realizable code spans with the `e_i` of its support a section that
/// realizes its cyclic type, so every element of a candidate code must pass this test.
pub struct CyclicOracle {
    opts: FeasibilityOptions,
    cache: Mutex<HashMap<CyclicType, bool>>,
}

impl CyclicOracle {
    pub fn new(opts: FeasibilityOptions) -> Self {
        CyclicOracle { opts, cache: Mutex::new(HashMap::new()) }
    }

    /// Inconclusive runs count as realizable so that nothing is pruned on a guess.
    pub fn type_ok(&self, t: &CyclicType) -> Result<bool> {
        let t = t.unit_orbit();
        if let Some(&ok) = self.cache.lock().expect("cache lock").get(&t) {
            return Ok(ok);
        }
        let ok = t.watson_ok() && {
            let geom = build_geometry(&Code::from_type(&t, t.n())?)?;
            feasibility_in(&geom, &self.opts)?.status != FeasibilityStatus::Infeasible
        };
        self.cache.lock().expect("cache lock").insert(t, ok);
        Ok(ok)
    }

    /// Tests the cyclic type of the element `word/big` (residues mod `big`).
    pub fn element_ok(&self, word: &[i64], big: i64) -> Result<bool> {
        let g = word.iter().fold(big, |g, &x| g.gcd(&x));
        if g == big {
            return Ok(true);
        }
        let w: Vec<i64> = word.iter().map(|x| x / g).collect();
        let t = CyclicType::from_word(&w, big / g).ok_or_else(|| Error::Consistency("element order".into()))?;
        self.type_ok(&t)
    }

    pub fn code_ok(&self, code: &Code) -> Result<bool> {
        let big = code.modulus_lcm();
        for w in code.elements() {
            if !self.element_ok(&w, big)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Realizable canonical types of order `d` with support at most `n`.
    pub fn feasible_types(&self, n: usize, d: i64) -> Result<Vec<CyclicType>> {
        let mut all = Vec::new();
        for len in 1..=n {
            all.extend(generate_cyclic_candidates(len, d));
        }
        let ok = all.par_iter().map(|t| self.type_ok(t)).collect::<Result<Vec<bool>>>()?;
        Ok(all.into_iter().zip(ok).filter(|(_, k)| *k).map(|(t, _)| t).collect())
    }
}

/// Equivalence classes of feasible codes of one type and length, trivially extending ones included.
#[derive(Debug, Clone)]
struct Level {
    rows: Vec<ClassRow>,
    stats: ClassifyStats,
}

/// Classifier for all types at a fixed length, sharing the cyclic oracle and smaller levels.
pub struct Classifier {
    pub n: usize,
    opts: ClassifyOptions,
    pub oracle: CyclicOracle,
    levels: Mutex<BTreeMap<Vec<u64>, Level>>,
}

impl Classifier {
    pub fn new(n: usize, opts: ClassifyOptions) -> Self {
        let oracle = CyclicOracle::new(opts.feasibility.clone());
        Classifier { n, opts, oracle, levels: Mutex::new(BTreeMap::new()) }
    }

    fn level(&self, factors: &[u64]) -> Result<Level> {
        if let Some(l) = self.levels.lock().expect("levels lock").get(factors) {
            return Ok(l.clone());
        }
        let l = if factors.len() == 1 { self.cyclic_level(factors[0])? } else { self.extension_level(factors)? };
        self.levels.lock().expect("levels lock").insert(factors.to_vec(), l.clone());
        Ok(l)
    }

    fn cyclic_level(&self, d: u64) -> Result<Level> {
        let d = d as i64;
        let types = self.oracle.feasible_types(self.n, d)?;
        let q = QuotientType::from_factors(&[d as u64]);
        let rows = types
            .par_iter()
            .map(|t| evaluate(&Code::from_type(t, self.n)?, &q, &self.opts))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<ClassRow> = rows.into_iter().filter(|r| !matches!(r.status, FeasibilityStatus::Infeasible)).collect();
        let stats = ClassifyStats { candidates_before_filter: types.len(), candidates_after_filter: types.len(), classes: rows.len() };
        Ok(Level { rows, stats })
    }

    /// Every code of type `d₁·…·d_k` is `A ⊕ ⟨b⟩` with `A` of type `d₁·…·d_{k−1}`, and `A`
    /// is realizable whenever the whole code is; so extending one representative per class
    /// of `A` by all words `b` of order `d_k` is exhaustive.
    fn extension_level(&self, factors: &[u64]) -> Result<Level> {
        let (&dk, head) = factors.split_last().expect("nonempty");
        let base = self.level(head)?;
        let n = self.n;
        let dk = dk as i64;
        let total = (dk as u64).pow(n as u32);
        let mut moduli: Vec<i64> = head.iter().map(|&d| d as i64).collect();
        moduli.push(dk);
        let per_base = base
            .rows
            .par_iter()
            .map(|row| -> Result<(usize, Vec<Code>)> {
                let mut tried = 0usize;
                let mut kept = Vec::new();
                for idx in 1..total {
                    let b = digits(idx, dk, n);
                    // b alone must already be a realizable element
                    if !self.oracle.element_ok(&b, dk)? {
                        continue;
                    }
                    let mut gens = row.code.generators().to_vec();
                    gens.push(b);
                    let Ok(code) = Code::new(n, moduli.clone(), gens) else { continue };
                    tried += 1;
                    if self.oracle.code_ok(&code)? {
                        kept.push(code);
                    }
                }
                Ok((tried, kept))
            })
            .collect::<Result<Vec<_>>>()?;
        let before: usize = per_base.iter().map(|p| p.0).sum();
        let candidates: Vec<Code> = per_base.into_iter().flat_map(|p| p.1).collect();
        let after = candidates.len();
        let (reps, _) = equivalence_classes(&candidates);
        let q = QuotientType::from_factors(factors);
        let rows = reps
            .par_iter()
            .map(|&i| evaluate(&candidates[i], &q, &self.opts))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<ClassRow> = rows.into_iter().filter(|r| !matches!(r.status, FeasibilityStatus::Infeasible)).collect();
        let stats = ClassifyStats { candidates_before_filter: before, candidates_after_filter: after, classes: reps.len() };
        Ok(Level { rows, stats })
    }

    /// Classes of realizable codes of type `q` that extend nontrivially (no zero coordinate),
    /// sorted by generators. Inconclusive codes are kept and flagged.
    pub fn classify(&self, q: &QuotientType) -> Result<Classification> {
        if q.is_trivial() {
            return Err(Error::Unsupported("the trivial group has no codes".into()));
        }
        let level = self.level(&q.0)?;
        let mut rows: Vec<ClassRow> = level.rows.into_iter().filter(|r| r.code.is_nontrivially_extending()).collect();
        rows.sort_by(|a, b| a.code.cmp(&b.code));
        Ok(Classification { n: self.n, d_structure: q.clone(), stats: level.stats, rows })
    }
}

/// Base-`d` digits of `idx`, least significant first.
fn digits(mut idx: u64, d: i64, n: usize) -> Vec<i64> {
    let mut out = vec![0; n];
    for x in out.iter_mut() {
        *x = (idx % d as u64) as i64;
        idx /= d as u64;
    }
    out
}

/// Nontrivially extending realizable codes of type `q` and length `n`, up to equivalence.
pub fn classify_noncyclic(n: usize, q: &QuotientType, opts: &ClassifyOptions) -> Result<Classification> {
    Classifier::new(n, opts.clone()).classify(q)
}

/// Candidate codes of type `d₁·d₂` in the normalization used for hand enumeration: `a` runs
/// over realizable cyclic types written nondecreasingly after the zeros, `b_i` over residues
/// (with both signs unless `a_i ∈ {0, d₁/2}` leaves the sign free), nondecreasing within
/// blocks of equal `a_i`; each combination must consist of realizable elements.
pub fn generate_noncyclic_candidates(n: usize, d1: i64, d2: i64, oracle: &CyclicOracle) -> Result<Vec<Code>> {
    if d1 % d2 != 0 {
        return Err(Error::Unsupported(format!("{d1}·{d2} is not written with invariant factors")));
    }
    let mut out = Vec::new();
    for t in oracle.feasible_types(n, d1)? {
        let mut a = vec![0; n - t.n()];
        a.extend(t.word());
        let free_sign = |x: i64| x == 0 || 2 * x == d1;
        let ranges: Vec<Vec<i64>> = a
            .iter()
            .map(|&x| if free_sign(x) { (0..=d2 / 2).collect() } else { (0..d2).collect() })
            .collect();
        let mut b = vec![0; n];
        let mut found = Vec::new();
        blocks_rec(&a, &ranges, 0, &mut b, &mut found);
        let codes: Vec<Code> = found
            .into_par_iter()
            .filter_map(|b| Code::new(n, vec![d1, d2], vec![a.clone(), b]).ok())
            .collect();
        let ok = codes.par_iter().map(|c| oracle.code_ok(c)).collect::<Result<Vec<bool>>>()?;
        out.extend(codes.into_iter().zip(ok).filter(|(_, k)| *k).map(|(c, _)| c));
    }
    Ok(out)
}

fn blocks_rec(a: &[i64], ranges: &[Vec<i64>], i: usize, b: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if i == a.len() {
        out.push(b.clone());
        return;
    }
    let lower = if i > 0 && a[i - 1] == a[i] { Some(b[i - 1]) } else { None };
    for &v in &ranges[i] {
        if lower.is_some_and(|l| v < l) {
            continue;
        }
        b[i] = v;
        blocks_rec(a, ranges, i + 1, b, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuotientType {
        QuotientType::parse(s).unwrap()
    }

    #[test]
    fn cyclic_dimension_six() {
        let opts = ClassifyOptions::default();
        let c3 = classify_cyclic(6, 3, &opts).unwrap();
        assert_eq!(c3.feasible().count(), 1);
        let c4 = classify_cyclic(6, 4, &opts).unwrap();
        assert_eq!(c4.feasible().count(), 0);
        let c2 = classify_cyclic(6, 2, &opts).unwrap();
        assert_eq!(c2.feasible().count(), 1);
    }

    #[test]
    fn klein_four_in_dimension_six() {
        // the unique code: two weight-4 words meeting in two coordinates
        let c = classify_noncyclic(6, &q("2^2"), &ClassifyOptions::default()).unwrap();
        assert_eq!(c.rows.len(), 1);
        assert!(c.rows[0].is_feasible());
        assert_eq!(c.rows[0].srs().unwrap().0, 6 + 8 * 3);
    }

    #[test]
    fn simplex_code_gives_e7() {
        let cl = Classifier::new(7, ClassifyOptions::default());
        let c = cl.classify(&q("2^3")).unwrap();
        assert_eq!(c.rows.len(), 1);
        assert_eq!(c.rows[0].srs().unwrap(), (63, 28, 7));
    }

    #[test]
    fn digit_expansion() {
        assert_eq!(digits(5, 2, 4), vec![1, 0, 1, 0]);
        assert_eq!(digits(7, 3, 3), vec![1, 2, 0]);
    }
}
