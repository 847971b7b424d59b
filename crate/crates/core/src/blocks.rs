//! Block layouts of `{0, …, n-1}` and the block-rearrangement builder.
//!
//! Cutting the circle `Z_n` into `m` consecutive blocks turns an AP mod `n`
//! into a near-AP of block indices mod `m`. With the floor layout
//! `β(x) = ⌊mx/n⌋` the block offset `β(a) + β(c) - 2β(b)` always lies in
//! `{0, ±1}`; with blocks of sizes `k` or `k+1` in any order and `k ≥ m` it
//! lies in `{0, ±1, ±2}`. [`check_claim`] verifies either statement
//! exhaustively for a concrete layout.
//!
//! [`build_destroyer`] reorders the blocks of the floor layout by a
//! `(1, 2)`-almost AP-destroying master on `Z_m` and scrambles each block
//! with an integer-AP destroyer.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intseq::{int_ap_destroyer, IntPerm};
use crate::perm::{centered, Perm};
use crate::verify::check_almost;

/// A partition of `{0, …, n-1}` into `m` consecutive non-empty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    n: usize,
    /// `starts[j]` is the first element of block `j`; `starts[m] = n`.
    starts: Vec<usize>,
    floor: bool,
}

impl BlockLayout {
    /// The layout `β(x) = ⌊mx/n⌋`.
    pub fn floor(n: usize, m: usize) -> Result<BlockLayout> {
        if m == 0 || m > n {
            return Err(Error::precondition(format!("block count {m} must lie in [1, n = {n}]")));
        }
        // block j = {x : ⌊mx/n⌋ = j} starts at ⌈jn/m⌉
        let starts = (0..=m).map(|j| (j as u128 * n as u128).div_ceil(m as u128) as usize).collect();
        Ok(BlockLayout { n, starts, floor: true })
    }

    /// Consecutive blocks with the given sizes, in order.
    pub fn from_sizes(sizes: &[usize]) -> Result<BlockLayout> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::precondition("block sizes must be positive"));
        }
        let mut starts = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        starts.push(0);
        for &s in sizes {
            acc += s;
            starts.push(acc);
        }
        Ok(BlockLayout { n: acc, starts, floor: false })
    }

    /// `m` blocks of size `⌊n/m⌋`, except the blocks listed in `big`, which
    /// get one extra element. `big` must name exactly `n mod m` blocks.
    pub fn with_big_blocks(n: usize, m: usize, big: &[usize]) -> Result<BlockLayout> {
        if m == 0 || m > n {
            return Err(Error::precondition(format!("block count {m} must lie in [1, n = {n}]")));
        }
        let (k, l) = (n / m, n % m);
        let mut sizes = vec![k; m];
        for &j in big {
            if j >= m || sizes[j] != k {
                return Err(Error::precondition(format!("bad big-block index {j}")));
            }
            sizes[j] = k + 1;
        }
        if big.len() != l {
            return Err(Error::precondition(format!("expected {l} big blocks, got {}", big.len())));
        }
        BlockLayout::from_sizes(&sizes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.starts.len() - 1
    }

    /// `⌊n/m⌋`.
    pub fn k(&self) -> usize {
        self.n / self.m()
    }

    /// `n - k·m`, the number of blocks of size `k + 1` in a balanced layout.
    pub fn l(&self) -> usize {
        self.n % self.m()
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn size(&self, j: usize) -> usize {
        self.starts[j + 1] - self.starts[j]
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.m()).map(|j| self.size(j)).collect()
    }

    /// Index of the block containing `x`.
    #[inline]
    pub fn beta(&self, x: usize) -> usize {
        if self.floor {
            (x as u128 * self.m() as u128 / self.n as u128) as usize
        } else {
            self.starts.partition_point(|&s| s <= x) - 1
        }
    }

    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        self.starts[j]..self.starts[j + 1]
    }
}

pub fn block_layout(n: usize, m: usize) -> Result<BlockLayout> {
    BlockLayout::floor(n, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    /// Offsets in `{0, ±1, ±2}`; requires `k ≥ m`, any size assignment.
    One,
    /// Offsets in `{0, ±1}` for the floor layout.
    Two,
}

impl Claim {
    pub fn bound(self) -> i64 {
        match self {
            Claim::One => 2,
            Claim::Two => 1,
        }
    }
}

/// An AP mod `n` whose block offset falls outside the claimed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// Centered `β(a) + β(c) - 2β(b) mod m`.
    pub offset: i64,
}

/// Checks a claim for the floor layout of `(n, m)`.
pub fn check_claims(n: usize, m: usize, claim: Claim) -> Result<Option<ClaimViolation>> {
    let layout = BlockLayout::floor(n, m)?;
    if claim == Claim::One && layout.k() < m {
        return Err(Error::precondition(format!("claim 1 needs k >= m, got k = {} < m = {m}", layout.k())));
    }
    Ok(check_claim(&layout, claim.bound()))
}

/// Exhaustively checks that every AP `(a, b, c)` mod `n` has block offset
/// within `[-bound, bound]` mod `m`, returning a violation if one exists.
///
/// Works block pair by block pair: for `a ∈ A`, `b ∈ B` the values `2b - a`
/// form a contiguous integer range whenever `|A| ≥ 2`, so only the blocks
/// meeting that range need inspecting. Size-one `A` blocks are enumerated.
pub fn check_claim(layout: &BlockLayout, bound: i64) -> Option<ClaimViolation> {
    let n = layout.n();
    let m = layout.m();
    let offset = |i: usize, j: usize, h: usize| centered(((i + h + 2 * (m - j)) % m) as u64, m);
    let bad = |i, j, h| offset(i, j, h).abs() > bound;
    for i in 0..m {
        let a_range = layout.block(i);
        for j in 0..m {
            let b_range = layout.block(j);
            let hit = if a_range.len() == 1 {
                let a = a_range.start;
                b_range.clone().map(|b| layout.beta((2 * b + n - a) % n)).find(|&h| bad(i, j, h))
            } else {
                let lo = 2 * b_range.start as i64 - (a_range.end as i64 - 1);
                let hi = 2 * (b_range.end as i64 - 1) - a_range.start as i64;
                blocks_meeting(layout, lo, hi).find(|&h| bad(i, j, h))
            };
            if let Some(h) = hit {
                return Some(concrete_violation(layout, i, j, h));
            }
        }
    }
    None
}

/// Blocks containing some residue of the integer range `[lo, hi]` mod `n`.
fn blocks_meeting(layout: &BlockLayout, lo: i64, hi: i64) -> impl Iterator<Item = usize> + '_ {
    let n = layout.n() as i64;
    let m = layout.m();
    let len = hi - lo + 1;
    let (first, count) = if len >= n {
        (0, m)
    } else {
        let start = lo.rem_euclid(n) as usize;
        let end = (lo + len - 1).rem_euclid(n) as usize;
        let (bs, be) = (layout.beta(start), layout.beta(end));
        // walk forward from bs to be, wrapping; a range that wraps back into
        // its own first block covers everything
        let count = if start + (len as usize) > n as usize && be >= bs { m } else { (be + m - bs) % m + 1 };
        (bs, count)
    };
    (0..count).map(move |d| (first + d) % m)
}

fn concrete_violation(layout: &BlockLayout, i: usize, j: usize, h: usize) -> ClaimViolation {
    let n = layout.n();
    let m = layout.m();
    for a in layout.block(i) {
        for b in layout.block(j) {
            let c = (2 * b + n - a) % n;
            if layout.beta(c) == h {
                let offset = centered(((i + h + 2 * (m - j)) % m) as u64, m);
                return ClaimViolation { a, b, c, offset };
            }
        }
    }
    unreachable!("block {h} was reported as reachable from blocks {i}, {j}")
}

/// The two inequalities behind the worst case of claim 1,
/// `(k+1)(2i-2) < 2k(i+1) - 2` and `2(k+1)(i+1) - 2 < k(2i+3)`, for every
/// `0 ≤ i < m/2`.
pub fn claim_one_inequalities(k: u64, m: u64) -> bool {
    let k = k as i128;
    (0..m as i128)
        .take_while(|&i| 2 * i < m as i128)
        .all(|i| (k + 1) * (2 * i - 2) < 2 * k * (i + 1) - 2 && 2 * (k + 1) * (i + 1) - 2 < k * (2 * i + 3))
}

/// Integer-AP destroyers for every block size of `layout`, indexed by size.
pub(crate) fn destroyers_for(sizes: impl IntoIterator<Item = usize>) -> Result<Vec<Option<Arc<IntPerm>>>> {
    let mut by_size: Vec<Option<Arc<IntPerm>>> = Vec::new();
    for s in sizes {
        if by_size.len() <= s {
            by_size.resize(s + 1, None);
        }
        if by_size[s].is_none() {
            by_size[s] = Some(int_ap_destroyer(s)?);
        }
    }
    Ok(by_size)
}

/// The block rearrangement without checking the master: floor layout, block
/// `i` moved (with its contents) to slot `master(i)`, slots laid end to end,
/// then each block scrambled by an integer-AP destroyer of its size.
///
/// Always a bijection. It destroys APs when `n ≥ m²` and `master` destroys
/// `(1, 2)`-almost APs; [`build_destroyer`] enforces both.
pub fn block_rearrangement(n: usize, master: &Perm) -> Result<Perm> {
    let m = master.modulus();
    let layout = BlockLayout::floor(n, m)?;
    let inverse = master.inverse();
    let mut slot_start = vec![0usize; m];
    let mut acc = 0;
    for (slot, start) in slot_start.iter_mut().enumerate() {
        *start = acc;
        acc += layout.size(inverse.apply(slot));
    }
    let taus = destroyers_for(layout.sizes())?;
    let mut images = vec![0u32; n];
    images.par_iter_mut().enumerate().with_min_len(1 << 12).for_each(|(x, out)| {
        let i = layout.beta(x);
        let o = x - layout.starts()[i];
        let tau = taus[layout.size(i)].as_ref().expect("destroyer for every size");
        *out = (slot_start[master.apply(i)] + tau.apply(o)) as u32;
    });
    Ok(Perm::from_vec_unchecked(images))
}

/// An AP-destroying permutation of `Z_n` from a `(1, 2)`-almost
/// AP-destroying master on `Z_m`, for any `n ≥ m²`.
pub fn build_destroyer(n: usize, master: &Perm) -> Result<Perm> {
    let m = master.modulus();
    if (n as u128) < (m as u128) * (m as u128) {
        return Err(Error::precondition(format!("n = {n} is below m² = {}", m * m)));
    }
    let cert = check_almost(master, 1, 2)
        .map_err(|e| Error::precondition(format!("master cannot be (1, 2)-almost AP-destroying: {e}")))?;
    if let Some(cx) = cert.counterexample {
        return Err(Error::precondition(format!(
            "master does not destroy (1, 2)-almost APs: ({}, {}, {}) realizes {}:{}",
            cx.a, cx.b, cx.c, cx.eta1, cx.eta2
        )));
    }
    block_rearrangement(n, master)
}
