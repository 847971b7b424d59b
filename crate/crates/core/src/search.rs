//! Backtracking search for permutations of `Z_n` that destroy a pattern set.
//!
//! Positions are assigned in the order `0, 1, 2, …`. Before position `x` is
//! filled, every triple whose indices are all `≤ x` and which contains `x`
//! forbids the values of `π(x)` that would realize a pattern; the remaining
//! unused values are tried in priority order. A leaf is therefore a
//! permutation with no violated pattern, and it is re-verified by brute force
//! before being returned.
//!
//! With `normalize`, `π(0) = 0` is fixed. Composing with a translation of the
//! output changes no verdict and acts freely on permutations, so exhaustive
//! counts scale back by exactly `n`.
//!
//! With more than one thread the tree is split on the values of `π(0)` and
//! `π(1)`. Each subtree gets an equal share of the node budget and subtrees
//! are ranked in sequential order, so the verdict and the witness do not
//! depend on scheduling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{Perm, MAX_MODULUS};
use crate::verify::{check_patterns, Certificate, Pattern, PatternSet};

/// Largest `n` accepted by [`exhaust_count`].
pub const EXHAUSTIVE_CEILING: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    #[default]
    FirstFound,
    ExhaustiveCount,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub patterns: PatternSet,
    pub normalize: bool,
    pub node_limit: Option<u64>,
    /// `1` searches sequentially; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    /// Shuffles the value priority; `None` tries values in increasing order.
    pub seed: Option<u64>,
    pub mode: SearchMode,
}

impl SearchConfig {
    pub fn new(patterns: PatternSet) -> SearchConfig {
        SearchConfig {
            patterns,
            normalize: true,
            node_limit: None,
            threads: Some(1),
            seed: None,
            mode: SearchMode::FirstFound,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.node_limit == Some(0) {
            return Err(Error::precondition("node limit must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::precondition("thread count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchVerdict {
    Found(Certificate),
    /// The whole tree was explored without a witness.
    Exhausted,
    /// The node budget ran out first.
    LimitReached,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub verdict: SearchVerdict,
    /// Permutations destroying every pattern; only in exhaustive-count mode
    /// and only when the tree was exhausted.
    pub count: Option<u64>,
    pub nodes: u64,
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Perm> {
        match &self.verdict {
            SearchVerdict::Found(cert) => Some(&cert.perm),
            _ => None,
        }
    }
}

/// For every distinct `s mod n`, the forbidden `t mod n` values.
fn pattern_rows(patterns: &PatternSet, n: usize) -> Vec<(usize, Vec<usize>)> {
    let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
    for p in patterns.iter() {
        let (s, t) = (p.s.reduce(n) as usize, p.t.reduce(n) as usize);
        match rows.iter_mut().find(|(rs, _)| *rs == s) {
            Some((_, ts)) if !ts.contains(&t) => ts.push(t),
            Some(_) => {}
            None => rows.push((s, vec![t])),
        }
    }
    rows
}

enum Step {
    Continue,
    Stop,
}

struct Tree<'a> {
    n: usize,
    rows: &'a [(usize, Vec<usize>)],
    order: &'a [usize],
    images: Vec<usize>,
    used: Vec<bool>,
    forbidden: Vec<u64>,
    stamp: u64,
    nodes: u64,
    budget: u64,
    limited: bool,
}

impl<'a> Tree<'a> {
    fn new(n: usize, rows: &'a [(usize, Vec<usize>)], order: &'a [usize], budget: u64) -> Tree<'a> {
        Tree {
            n,
            rows,
            order,
            images: Vec::with_capacity(n),
            used: vec![false; n],
            forbidden: vec![0; n],
            stamp: 0,
            nodes: 0,
            budget,
            limited: false,
        }
    }

    /// Marks every `v` with `coef·v ≡ rhs (mod n)`.
    fn forbid(&mut self, coef: i64, rhs: i64) {
        let n = self.n as i64;
        let (coef, rhs) = if coef < 0 { (-coef, -rhs) } else { (coef, rhs) };
        let rhs = rhs.rem_euclid(n);
        match coef {
            1 => self.forbidden[rhs as usize] = self.stamp,
            2 if n % 2 == 1 => self.forbidden[(rhs * ((n + 1) / 2) % n) as usize] = self.stamp,
            2 if rhs % 2 == 0 => {
                self.forbidden[(rhs / 2) as usize] = self.stamp;
                self.forbidden[(rhs / 2 + n / 2) as usize] = self.stamp;
            }
            _ => {}
        }
    }

    fn mark_triple(&mut self, x: usize, a: usize, b: usize, c: usize, t: usize) {
        let coef = (a == x) as i64 + (c == x) as i64 - 2 * (b == x) as i64;
        let value = |i: usize| if i == x { 0 } else { self.images[i] as i64 };
        let rest = value(a) + value(c) - 2 * value(b);
        self.forbid(coef, t as i64 - rest);
    }

    /// Unused values for position `x = images.len()` that complete no pattern.
    fn candidates(&mut self) -> Vec<usize> {
        let n = self.n;
        let x = self.images.len();
        self.stamp += 1;
        let rows = self.rows;
        for (s, ts) in rows {
            for u in 0..=x {
                // x in the outer slot: (x, u, c) with x + c - 2u ≡ s
                let c = (s + 2 * u + n - x % n + n) % n;
                if c <= x && !(u == x && c == x) {
                    for &t in ts {
                        self.mark_triple(x, x, u, c, t);
                    }
                }
                // x in the middle: (u, x, c) with u + c - 2x ≡ s
                let c = (s + 2 * x + n - u) % n;
                if c <= x && !(u == x && c == x) {
                    for &t in ts {
                        self.mark_triple(x, u, x, c, t);
                    }
                }
            }
        }
        self.order.iter().copied().filter(|&v| !self.used[v] && self.forbidden[v] != self.stamp).collect()
    }

    fn push(&mut self, v: usize) {
        self.used[v] = true;
        self.images.push(v);
    }

    fn pop(&mut self) {
        if let Some(v) = self.images.pop() {
            self.used[v] = false;
        }
    }

    /// Depth-first over the subtree below the current prefix; `leaf` decides
    /// whether to keep going after each complete permutation.
    fn explore(&mut self, leaf: &mut dyn FnMut(&[usize]) -> Step) -> Step {
        if self.images.len() == self.n {
            return leaf(&self.images);
        }
        for v in self.candidates() {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.limited = true;
                return Step::Stop;
            }
            self.push(v);
            let step = self.explore(leaf);
            self.pop();
            if let Step::Stop = step {
                return Step::Stop;
            }
        }
        Step::Continue
    }

    /// Applies a prefix if every entry is admissible.
    fn seed_prefix(&mut self, prefix: &[usize]) -> bool {
        for &v in prefix {
            if !self.candidates().contains(&v) {
                return false;
            }
            self.push(v);
        }
        true
    }
}

struct Job {
    prefix: Vec<usize>,
    budget: u64,
}

struct JobResult {
    witness: Option<Vec<usize>>,
    count: u64,
    nodes: u64,
    limited: bool,
}

fn run_job(n: usize, rows: &[(usize, Vec<usize>)], order: &[usize], job: &Job, count_all: bool) -> JobResult {
    let mut tree = Tree::new(n, rows, order, job.budget);
    if !tree.seed_prefix(&job.prefix) {
        return JobResult { witness: None, count: 0, nodes: 0, limited: false };
    }
    let mut witness = None;
    let mut count = 0u64;
    tree.explore(&mut |images| {
        count += 1;
        if count_all {
            Step::Continue
        } else {
            witness = Some(images.to_vec());
            Step::Stop
        }
    });
    JobResult { witness, count, nodes: tree.nodes, limited: tree.limited }
}

fn value_order(n: usize, seed: Option<u64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

/// Prefixes `(π(0), π(1))` in sequential exploration order.
fn split_prefixes(n: usize, normalize: bool, order: &[usize]) -> Vec<Vec<usize>> {
    let firsts: Vec<usize> = if normalize { vec![0] } else { order.to_vec() };
    if n < 2 {
        return firsts.into_iter().map(|v| vec![v]).collect();
    }
    firsts.into_iter().flat_map(|a| order.iter().filter(move |&&b| b != a).map(move |&b| vec![a, b])).collect()
}

pub fn search_perm(n: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    if n > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(n as u64));
    }
    let count_all = config.mode == SearchMode::ExhaustiveCount;
    let rows = pattern_rows(&config.patterns, n);
    let order = value_order(n, config.seed);
    let budget = config.node_limit.unwrap_or(u64::MAX);

    let results: Vec<JobResult> = if config.threads == Some(1) {
        let prefix = if config.normalize { vec![0] } else { Vec::new() };
        vec![run_job(n, &rows, &order, &Job { prefix, budget }, count_all)]
    } else {
        let prefixes = split_prefixes(n, config.normalize, &order);
        let share = (budget / prefixes.len() as u64).max(1);
        let jobs: Vec<Job> = prefixes.into_iter().map(|prefix| Job { prefix, budget: share }).collect();
        let work = || -> Vec<JobResult> {
            if count_all {
                jobs.par_iter().map(|job| run_job(n, &rows, &order, job, true)).collect()
            } else {
                // stop at the first subtree, in sequential order, that either
                // yields a witness or runs out of budget
                let hit = jobs.par_iter().enumerate().find_map_first(|(i, job)| {
                    let r = run_job(n, &rows, &order, job, false);
                    (r.witness.is_some() || r.limited).then_some((i, r))
                });
                match hit {
                    Some((_, r)) => vec![r],
                    None => Vec::new(),
                }
            }
        };
        match config.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::precondition(format!("cannot start {k} threads: {e}")))?
                .install(work),
            None => work(),
        }
    };

    let nodes = results.iter().map(|r| r.nodes).sum();
    let limited = results.iter().any(|r| r.limited);
    if count_all {
        let count: u64 = results.iter().map(|r| r.count).sum();
        let scale = if config.normalize { n as u64 } else { 1 };
        return Ok(if limited {
            SearchOutcome { verdict: SearchVerdict::LimitReached, count: None, nodes }
        } else {
            SearchOutcome { verdict: SearchVerdict::Exhausted, count: Some(count * scale), nodes }
        });
    }
    if let Some(images) = results.into_iter().find_map(|r| r.witness) {
        let perm = Perm::new(images.into_iter().map(|v| v as u32).collect())?;
        let cert = check_patterns(&perm, &config.patterns);
        if let Some(cx) = &cert.counterexample {
            return Err(Error::ClaimFailed { label: "search witness".into(), pattern: Pattern::new(cx.eta1, cx.eta2) });
        }
        return Ok(SearchOutcome { verdict: SearchVerdict::Found(cert), count: None, nodes });
    }
    let verdict = if limited { SearchVerdict::LimitReached } else { SearchVerdict::Exhausted };
    Ok(SearchOutcome { verdict, count: None, nodes })
}

/// Number of permutations of `Z_n` destroying every pattern, by exhaustion
/// with `π(0) = 0` fixed and the result multiplied by `n`.
pub fn exhaust_count(n: usize, patterns: &PatternSet) -> Result<u64> {
    if n > EXHAUSTIVE_CEILING {
        return Err(Error::precondition(format!("exhaustive count is limited to n ≤ {EXHAUSTIVE_CEILING}, got {n}")));
    }
    let mut config = SearchConfig::new(patterns.clone());
    config.mode = SearchMode::ExhaustiveCount;
    config.threads = None;
    let outcome = search_perm(n, &config)?;
    outcome.count.ok_or_else(|| Error::precondition("exhaustive count did not complete"))
}
