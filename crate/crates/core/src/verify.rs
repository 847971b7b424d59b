//! Exhaustive verification of pattern destruction.
//!
//! A permutation `π` of `Z_n` destroys the pattern `s ↦ t` when no triple
//! `(a, b, c)`, not all equal, has `a + c - 2b ≡ s` and
//! `π(a) + π(c) - 2π(b) ≡ t (mod n)`. Every check here enumerates the pairs
//! `(a, b)` and derives `c = 2b - a + s`, so one pattern costs `Θ(n²)`.
//!
//! The outer loop over `a` runs on the rayon pool. Verdicts, counts and
//! counterexamples do not depend on the thread count: a failing check always
//! reports the lexicographically smallest `(a, b)` (ties on the same pair are
//! broken by the order of the input offsets).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{centered, Offset, Perm};

/// A forbidden transition `s ↦ t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub s: Offset,
    pub t: Offset,
}

impl Pattern {
    pub const fn new(s: i64, t: i64) -> Pattern {
        Pattern { s: Offset(s), t: Offset(t) }
    }

    /// The same pattern with both offsets replaced by their centered
    /// representatives modulo `n`.
    pub fn centered(self, n: usize) -> Pattern {
        Pattern { s: self.s.centered(n), t: self.t.centered(n) }
    }

    /// Lemma-style transport through the inverse: `π` destroys `s ↦ t`
    /// iff `π⁻¹` destroys `t ↦ s`.
    pub fn swapped(self) -> Pattern {
        Pattern { s: self.t, t: self.s }
    }

    pub fn is_zero(self) -> bool {
        self.s.0 == 0 && self.t.0 == 0
    }
}

/// Serialized as the `s:t` string.
impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.s, self.t)
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(src: &str) -> Result<Pattern> {
        let (s, t) = src
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("pattern {src:?} is not of the form s:t")))?;
        let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| Error::Parse(format!("pattern {src:?}: {e}")));
        Ok(Pattern::new(parse(s)?, parse(t)?))
    }
}

/// An ordered set of patterns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PatternSet(BTreeSet<Pattern>);

impl PatternSet {
    pub fn new() -> PatternSet {
        PatternSet::default()
    }

    /// All `s' ↦ t'` with `|s'| ≤ s` and `|t'| ≤ t`.
    pub fn almost(s: u64, t: u64) -> PatternSet {
        let (s, t) = (s as i64, t as i64);
        (-s..=s).flat_map(|a| (-t..=t).map(move |b| Pattern::new(a, b))).collect()
    }

    pub fn insert(&mut self, p: Pattern) -> bool {
        self.0.insert(p)
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.0.contains(p)
    }

    /// Whether some member is congruent to `p` modulo `n` in both offsets.
    pub fn contains_mod(&self, p: Pattern, n: usize) -> bool {
        let p = p.centered(n);
        self.0.iter().any(|q| q.centered(n) == p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical form modulo `n` (patterns that coincide mod `n` merge).
    pub fn centered(&self, n: usize) -> PatternSet {
        self.0.iter().map(|p| p.centered(n)).collect()
    }
}

impl FromIterator<Pattern> for PatternSet {
    fn from_iter<I: IntoIterator<Item = Pattern>>(iter: I) -> Self {
        PatternSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PatternSet {
    type Item = &'a Pattern;
    type IntoIter = std::collections::btree_set::Iter<'a, Pattern>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PatternSet {
    type Err = Error;

    /// Parses `"0:0,1:1,-1:2"`.
    fn from_str(src: &str) -> Result<PatternSet> {
        src.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// A triple realizing a pattern: `a + c - 2b ≡ eta1` and
/// `π(a) + π(c) - 2π(b) ≡ eta2`, offsets centered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub eta1: i64,
    pub eta2: i64,
}

/// A permutation, the patterns claimed for it, and the brute-force verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub perm: Perm,
    pub claims: PatternSet,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
}

#[derive(Serialize, Deserialize)]
struct CertificateDoc {
    n: usize,
    perm: Vec<u32>,
    patterns: Vec<[i64; 2]>,
    verdict: Verdict,
    counterexample: Option<Counterexample>,
}

impl Certificate {
    /// Whether the counterexample (if any) really satisfies the pattern
    /// conditions. Always true for passing certificates.
    pub fn counterexample_holds(&self) -> bool {
        let Some(cx) = self.counterexample else {
            return self.verdict.passed();
        };
        let n = self.perm.modulus();
        let (a, b, c) = (cx.a as usize, cx.b as usize, cx.c as usize);
        if a >= n || b >= n || c >= n || (a == b && b == c) {
            return false;
        }
        let p = &self.perm;
        let lhs = (a + c + 2 * (n - b)) % n;
        let rhs = (p.apply(a) + p.apply(c) + 2 * (n - p.apply(b))) % n;
        lhs as u64 == Offset(cx.eta1).reduce(n)
            && rhs as u64 == Offset(cx.eta2).reduce(n)
            && self.claims.contains_mod(Pattern::new(cx.eta1, cx.eta2), n)
    }

    /// Re-runs the brute-force check and compares with the stored verdict.
    pub fn recheck(&self) -> bool {
        let again = check_patterns(&self.perm, &self.claims);
        again.verdict == self.verdict && again.counterexample == self.counterexample
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.doc()).expect("certificate serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.doc()).expect("certificate serializes")
    }

    fn doc(&self) -> CertificateDoc {
        CertificateDoc {
            n: self.perm.modulus(),
            perm: self.perm.images().to_vec(),
            patterns: self.claims.iter().map(|p| [p.s.0, p.t.0]).collect(),
            verdict: self.verdict,
            counterexample: self.counterexample,
        }
    }

    pub fn from_json(src: &str) -> Result<Certificate> {
        let doc: CertificateDoc = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let perm = Perm::new(doc.perm)?;
        if perm.modulus() != doc.n {
            return Err(Error::ModulusMismatch { expected: doc.n, actual: perm.modulus(), component: None });
        }
        Ok(Certificate {
            perm,
            claims: doc.patterns.iter().map(|&[s, t]| Pattern::new(s, t)).collect(),
            verdict: doc.verdict,
            counterexample: doc.counterexample,
        })
    }
}

/// Output offsets forbidden for each input offset, flattened into masks.
struct PatternTable {
    /// `(s mod n, centered s, mask over t mod n)`; the mask is indexed by residue.
    rows: Vec<(usize, i64, Vec<bool>)>,
}

impl PatternTable {
    fn new(patterns: &PatternSet, n: usize) -> PatternTable {
        let mut rows: Vec<(usize, i64, Vec<bool>)> = Vec::new();
        for p in patterns.iter() {
            let s = p.s.reduce(n) as usize;
            let t = p.t.reduce(n) as usize;
            match rows.iter_mut().find(|r| r.0 == s) {
                Some(row) => row.2[t] = true,
                None => {
                    let mut mask = vec![false; n];
                    mask[t] = true;
                    rows.push((s, centered(s as u64, n), mask));
                }
            }
        }
        rows.sort_by_key(|r| r.1);
        PatternTable { rows }
    }

    /// First realizing triple with first element `a`, scanning `b` upward.
    #[inline]
    fn first_for(&self, p: &[u32], a: usize) -> Option<Counterexample> {
        let n = p.len();
        let pa = p[a] as usize;
        for b in 0..n {
            let pb2 = 2 * (n - p[b] as usize);
            // c = 2b - a + s  (mod n)
            let base = (2 * b + n - a) % n;
            for (s, s_c, mask) in &self.rows {
                let c = (base + s) % n;
                if a == b && b == c {
                    continue;
                }
                let d = (pa + p[c] as usize + pb2) % n;
                if mask[d] {
                    return Some(Counterexample {
                        a: a as u64,
                        b: b as u64,
                        c: c as u64,
                        eta1: *s_c,
                        eta2: centered(d as u64, n),
                    });
                }
            }
        }
        None
    }

    #[inline]
    fn count_for(&self, p: &[u32], a: usize) -> u64 {
        let n = p.len();
        let pa = p[a] as usize;
        let mut count = 0;
        for b in 0..n {
            let pb2 = 2 * (n - p[b] as usize);
            let base = (2 * b + n - a) % n;
            for (s, _, mask) in &self.rows {
                let c = (base + s) % n;
                if a == b && b == c {
                    continue;
                }
                if mask[(pa + p[c] as usize + pb2) % n] {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Brute-force check of every pattern in `patterns` at once.
pub fn check_patterns(perm: &Perm, patterns: &PatternSet) -> Certificate {
    let n = perm.modulus();
    let table = PatternTable::new(patterns, n);
    let images = perm.images();
    let counterexample = (0..n).into_par_iter().with_min_len(8).find_map_first(|a| table.first_for(images, a));
    Certificate {
        perm: perm.clone(),
        claims: patterns.clone(),
        verdict: if counterexample.is_some() { Verdict::Fail } else { Verdict::Pass },
        counterexample,
    }
}

pub fn check_pattern(perm: &Perm, pattern: Pattern) -> Certificate {
    check_patterns(perm, &std::iter::once(pattern).collect())
}

/// Whether `perm` destroys `(s, t)`-almost APs, i.e. every pattern
/// `s' ↦ t'` with `|s'| ≤ s`, `|t'| ≤ t`.
///
/// Requires `2s < n` and `2t < n` so the offsets are distinct residues.
pub fn check_almost(perm: &Perm, s: u64, t: u64) -> Result<Certificate> {
    let n = perm.modulus() as u64;
    if 2 * s >= n || 2 * t >= n {
        return Err(Error::precondition(format!("(s, t) = ({s}, {t}) needs 2s < n and 2t < n, n = {n}")));
    }
    Ok(check_patterns(perm, &PatternSet::almost(s, t)))
}

/// Number of triples `(a, b, c)`, not all equal, realizing `pattern`.
pub fn count_survivors(perm: &Perm, pattern: Pattern) -> u64 {
    count_patterns(perm, &std::iter::once(pattern).collect())
}

/// Sum of the survivor counts over every pattern of the set.
pub fn count_patterns(perm: &Perm, patterns: &PatternSet) -> u64 {
    let n = perm.modulus();
    let table = PatternTable::new(patterns, n);
    let images = perm.images();
    (0..n).into_par_iter().with_min_len(8).map(|a| table.count_for(images, a)).sum()
}

/// Monte Carlo summary of the number of non-trivial APs a uniformly random
/// permutation fails to destroy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorStats {
    pub n: usize,
    pub trials: u64,
    pub mean: f64,
    /// Population variance (divides by `trials`).
    pub variance: f64,
    pub seed: u64,
}

/// Samples `trials` permutations of `Z_n` and summarizes their `0 ↦ 0`
/// survivor counts.
///
/// Sampling is reproducible across platforms: a ChaCha8 stream seeded with
/// `seed` (`ChaCha8Rng::seed_from_u64`) drives the Fisher–Yates shuffle of
/// `rand::seq::SliceRandom::shuffle`, starting each trial from the identity.
pub fn survivor_stats(n: usize, trials: u64, seed: u64) -> Result<SurvivorStats> {
    if trials == 0 {
        return Err(Error::precondition("trials must be at least 1"));
    }
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images: Vec<u32> = (0..n as u32).collect();
    let zero = Pattern::new(0, 0);
    let mut counts = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        images.iter_mut().enumerate().for_each(|(i, v)| *v = i as u32);
        images.shuffle(&mut rng);
        counts.push(count_survivors(&Perm::from_vec_unchecked(images.clone()), zero) as f64);
    }
    let mean = counts.iter().sum::<f64>() / trials as f64;
    let variance = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / trials as f64;
    Ok(SurvivorStats { n, trials, mean, variance, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[i64]) -> Perm {
        Perm::from_ints(v).unwrap()
    }

    /// Direct enumeration over all `n³` triples.
    fn naive_count(p: &Perm, pat: Pattern) -> u64 {
        let n = p.modulus() as i64;
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a == b && b == c {
                        continue;
                    }
                    let (pa, pb, pc) =
                        (p.apply(a as usize) as i64, p.apply(b as usize) as i64, p.apply(c as usize) as i64);
                    if (a + c - 2 * b - pat.s.0).rem_euclid(n) == 0 && (pa + pc - 2 * pb - pat.t.0).rem_euclid(n) == 0 {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn table_rows_destroy_claimed_patterns() {
        let row9 = perm(&[0, 1, 8, 3, 2, 6, 4, 7, 5]);
        assert!(check_pattern(&row9, Pattern::new(0, 0)).verdict.passed());
        let row11 = perm(&[0, 1, 8, 10, 6, 9, 5, 7, 3, 2, 4]);
        assert!(check_pattern(&row11, Pattern::new(0, -2)).verdict.passed());
    }

    #[test]
    fn identity_fails_with_smallest_counterexample() {
        let cert = check_pattern(&Perm::identity(5), Pattern::new(0, 0));
        assert_eq!(cert.verdict, Verdict::Fail);
        // (0, 0, 0) is trivial; the first non-trivial pair is (a, b) = (0, 1).
        assert_eq!(cert.counterexample, Some(Counterexample { a: 0, b: 1, c: 2, eta1: 0, eta2: 0 }));
        assert!(cert.counterexample_holds());
    }

    #[test]
    fn survivor_counts() {
        // n² - n for odd n: every pair a ≠ b gives a surviving triple.
        assert_eq!(count_survivors(&Perm::identity(5), Pattern::new(0, 0)), 20);
        assert_eq!(naive_count(&Perm::identity(5), Pattern::new(0, 0)), 20);
        assert_eq!(count_survivors(&perm(&[0, 1, 8, 3, 2, 6, 4, 7, 5]), Pattern::new(0, 0)), 0);
        assert_eq!(count_survivors(&Perm::identity(1), Pattern::new(0, 0)), 0);
    }

    #[test]
    fn counts_match_cubic_enumeration() {
        let perms = [
            perm(&[0, 1, 8, 3, 2, 6, 4, 7, 5]),
            perm(&[3, 0, 2, 1]),
            perm(&[1, 0]),
            perm(&[5, 2, 7, 0, 1, 3, 6, 4]),
            Perm::identity(6),
        ];
        for p in &perms {
            for s in -3..=3 {
                for t in -3..=3 {
                    let pat = Pattern::new(s, t);
                    assert_eq!(count_survivors(p, pat), naive_count(p, pat), "{p:?} {pat}");
                    assert_eq!(check_pattern(p, pat).verdict.passed(), naive_count(p, pat) == 0);
                }
            }
        }
    }

    #[test]
    fn a_equals_c_triples_are_nontrivial() {
        // On Z_2, (0, 1, 0) has a + c - 2b ≡ 0 and every permutation maps it
        // to an AP as well.
        for p in [Perm::identity(2), perm(&[1, 0])] {
            let cert = check_pattern(&p, Pattern::new(0, 0));
            assert_eq!(cert.verdict, Verdict::Fail);
            assert_eq!(cert.counterexample.map(|c| (c.a, c.b, c.c)), Some((0, 1, 0)));
        }
    }

    #[test]
    fn almost_examples() {
        let row9 = perm(&[0, 1, 8, 3, 2, 6, 4, 7, 5]);
        assert!(check_almost(&row9, 0, 0).unwrap().verdict.passed());
        let row23 = perm(&[0, 1, 4, 3, 21, 22, 2, 11, 12, 7, 8, 5, 10, 9, 6, 19, 16, 15, 20, 17, 18, 13, 14]);
        assert!(check_almost(&row23, 0, 1).unwrap().verdict.passed());
        assert!(check_almost(&row9, 5, 0).is_err());
        assert!(check_almost(&row9, 4, 4).is_ok());
    }

    #[test]
    fn certificate_json_layout() {
        let cert = check_pattern(&Perm::identity(3), Pattern::new(0, 0));
        assert_eq!(
            cert.to_json(),
            r#"{"n":3,"perm":[0,1,2],"patterns":[[0,0]],"verdict":"fail","counterexample":{"a":0,"b":1,"c":2,"eta1":0,"eta2":0}}"#
        );
        assert_eq!(Certificate::from_json(&cert.to_json()).unwrap(), cert);
        let pass = check_pattern(&perm(&[0, 1, 8, 3, 2, 6, 4, 7, 5]), Pattern::new(0, 2));
        assert!(pass.to_json().ends_with(r#""verdict":"pass","counterexample":null}"#));
        assert!(pass.recheck());
    }

    #[test]
    fn pattern_syntax() {
        let set: PatternSet = "0:0, 1:1,-1:2".parse().unwrap();
        assert_eq!(set.len(), 3);
        assert!(set.contains(&Pattern::new(-1, 2)));
        assert_eq!(set.to_string(), "-1:2,0:0,1:1");
        assert!("1;2".parse::<PatternSet>().is_err());
        assert!("a:2".parse::<PatternSet>().is_err());
    }

    #[test]
    fn survivor_stats_basics() {
        let one = survivor_stats(1, 5, 3).unwrap();
        assert_eq!(one.mean, 0.0);
        assert_eq!(one.variance, 0.0);
        assert_eq!(survivor_stats(100, 2, 7).unwrap(), survivor_stats(100, 2, 7).unwrap());
        assert!(survivor_stats(10, 0, 1).is_err());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = perm(&[5, 2, 7, 0, 1, 3, 6, 4]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (check_patterns(&p, &PatternSet::almost(2, 2)), count_patterns(&p, &PatternSet::almost(2, 2)))
            })
        };
        assert_eq!(run(1), run(4));
    }
}
