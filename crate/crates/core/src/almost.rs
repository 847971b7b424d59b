//! Machinery for `(t, t)`-almost AP-destroying permutations.
//!
//! * [`product_perm`]: `χ(rx + y) = r·χ_m(x) + χ_r(y)` on `Z_{rm}`.
//! * [`restrict_at_fixed_point`]: drop a fixed point `N-1` to get a
//!   permutation of `Z_{N-1}`; a `(2, 2)`-almost destroyer restricts to a
//!   `(1, 1)`-almost destroyer.
//! * [`coprime_ap_terms`]: pairwise coprime terms of an arithmetic progression.
//! * [`build_almost`]: the four-stage rearrangement of `Z_n` driven by a
//!   `(4t+7, 4t+7)`-almost AP-destroying master on `Z_M`.
//!
//! The stages, for blocks `B_0, …, B_{M-1}` of the floor layout grouped into
//! superblocks of `t+1` or `t+2` blocks:
//!
//! 1. inside each superblock of `q` blocks, deal the numbers round-robin so
//!    that every block holds an AP of difference `q`, biggest blocks first;
//! 2. move block `j` with its contents to slot `master(j)`;
//! 3. scramble every block with an integer-AP destroyer of its length;
//! 4. inside each superblock of slots, interleave again: the elements of the
//!    slot with rank `r` go to positions `r, r+q, r+2q, …` of the superblock.
//!
//! [`StageTrace`] records the block of every number after each stage.

use std::ops::Range;

use num_bigint::BigUint;
use serde::Serialize;

use crate::blocks::{destroyers_for, BlockLayout};
use crate::error::{Error, Result};
use crate::perm::{centered, gcd, Perm, MAX_MODULUS};
use crate::verify::check_almost;

/// `χ(rx + y) = r·χ_m(x) + χ_r(y)` for `0 ≤ x < m`, `0 ≤ y < r`.
///
/// If both factors destroy `0 ↦ 0`, so does the product.
pub fn product_perm(chi_m: &Perm, chi_r: &Perm) -> Result<Perm> {
    let (m, r) = (chi_m.modulus(), chi_r.modulus());
    if m <= 2 {
        return Err(Error::precondition(format!("outer factor modulus must exceed 2, got {m}")));
    }
    let n = m.checked_mul(r).filter(|&n| n <= MAX_MODULUS).ok_or(Error::ModulusTooLarge((m * r) as u64))?;
    let mut images = Vec::with_capacity(n);
    for x in 0..m {
        let hi = r * chi_m.apply(x);
        images.extend(chi_r.images().iter().map(|&y| (hi + y as usize) as u32));
    }
    Ok(Perm::from_vec_unchecked(images))
}

/// Restriction of `p` to `{0, …, N-2}`, which requires `p(N-1) = N-1`.
pub fn restrict_at_fixed_point(p: &Perm) -> Result<Perm> {
    let n = p.modulus();
    if n < 2 {
        return Err(Error::precondition("need a modulus of at least 2 to restrict"));
    }
    if p.apply(n - 1) != n - 1 {
        return Err(Error::precondition(format!("{} is not a fixed point (maps to {})", n - 1, p.apply(n - 1))));
    }
    Ok(Perm::from_vec_unchecked(p.images()[..n - 1].to_vec()))
}

/// The first `count` terms of `first, first + diff, …` that are pairwise
/// coprime, chosen greedily by smallest index.
pub fn coprime_ap_terms(first: u64, diff: u64, count: usize) -> Result<Vec<u64>> {
    if first < 2 {
        return Err(Error::precondition(format!("first term must be at least 2, got {first}")));
    }
    if diff == 0 || gcd(first, diff) != 1 {
        return Err(Error::precondition(format!(
            "first term {first} and difference {diff} must be coprime (gcd {})",
            gcd(first, diff)
        )));
    }
    let mut terms: Vec<u64> = Vec::with_capacity(count);
    let mut term = first;
    while terms.len() < count {
        if terms.iter().all(|&a| gcd(a, term) == 1) {
            terms.push(term);
        }
        if terms.len() < count {
            term = term
                .checked_add(diff)
                .ok_or_else(|| Error::Overflow(format!("progression term beyond u64 after {} terms", terms.len())))?;
        }
    }
    Ok(terms)
}

/// `[r₀]²`, the size beyond which the four-stage construction applies,
/// where `r₀` is the modulus of the `(4t+7, 4t+7)`-almost master.
pub fn almost_threshold(master_modulus: &BigUint) -> BigUint {
    master_modulus * master_modulus
}

/// The master tolerance the four-stage construction needs for target `t`.
pub const fn master_tolerance(t: u64) -> u64 {
    4 * t + 7
}

/// Consecutive groups of `t+1` or `t+2` blocks covering `0..M`, the bigger
/// groups last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperblockPlan {
    pub blocks: usize,
    pub t: usize,
    pub groups: Vec<Range<usize>>,
}

impl SuperblockPlan {
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len()).collect()
    }
}

pub fn superblock_partition(blocks: usize, t: usize) -> Result<SuperblockPlan> {
    if blocks < t + 1 {
        return Err(Error::precondition(format!("{blocks} blocks cannot form superblocks of {}", t + 1)));
    }
    let count = blocks / (t + 1);
    let enlarged = blocks - count * (t + 1);
    if enlarged > count {
        return Err(Error::precondition(format!(
            "{blocks} blocks leave {enlarged} extra blocks for only {count} superblocks"
        )));
    }
    let mut groups = Vec::with_capacity(count);
    let mut at = 0;
    for g in 0..count {
        let size = if g >= count - enlarged { t + 2 } else { t + 1 };
        groups.push(at..at + size);
        at += size;
    }
    Ok(SuperblockPlan { blocks, t, groups })
}

/// Indices of `group` reordered by size descending, stable on ties.
fn size_rank_order(group: Range<usize>, size: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut order: Vec<usize> = group.collect();
    order.sort_by_key(|&j| std::cmp::Reverse(size(j)));
    order
}

/// The block of every number after each stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageTrace {
    /// Block of the floor layout containing `x`.
    pub beta1: Vec<u32>,
    /// Block holding `x` after the stage-1 dealing.
    pub beta2: Vec<u32>,
    /// Slot holding `x` after the block move: `master(beta2)`.
    pub beta3: Vec<u32>,
    /// Slot whose position range contains the final location of `x`.
    pub beta4: Vec<u32>,
}

/// First element where a [`StageTrace`] bound fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceViolation {
    DealingDrift { x: usize },
    MasterMismatch { x: usize },
    InterleaveDrift { x: usize },
}

impl StageTrace {
    /// Checks `|β₂ - β₁| ≤ t+1`, `β₃ = master(β₂)` and `|β₄ - β₃| ≤ t+1`
    /// for every element.
    pub fn check(&self, master: &Perm, t: usize) -> Option<TraceViolation> {
        let bound = t as i64 + 1;
        for x in 0..self.beta1.len() {
            let (b1, b2, b3, b4) =
                (self.beta1[x] as i64, self.beta2[x] as i64, self.beta3[x] as i64, self.beta4[x] as i64);
            if (b2 - b1).abs() > bound {
                return Some(TraceViolation::DealingDrift { x });
            }
            if master.apply(b2 as usize) as i64 != b3 {
                return Some(TraceViolation::MasterMismatch { x });
            }
            if (b4 - b3).abs() > bound {
                return Some(TraceViolation::InterleaveDrift { x });
            }
        }
        None
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Checks the structural preconditions and returns the floor layout and
/// superblock plan.
fn structure(n: usize, t: usize, master: &Perm) -> Result<(BlockLayout, SuperblockPlan)> {
    let m = master.modulus();
    if n < m {
        return Err(Error::precondition(format!("n = {n} is below the master modulus {m}")));
    }
    if n > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(n as u64));
    }
    let plan = superblock_partition(m, t)?;
    Ok((BlockLayout::floor(n, m)?, plan))
}

/// The four-stage rearrangement with only structural checks: the superblock
/// plan must exist and `n ≥ M`. The result is always a bijection; the
/// `(t, t)` guarantee needs the preconditions of [`build_almost`].
pub fn build_almost_structural(n: usize, t: usize, master: &Perm) -> Result<(Perm, StageTrace)> {
    let (layout, plan) = structure(n, t, master)?;
    let m = master.modulus();
    let sizes1 = layout.sizes();

    let mut beta1 = vec![0u32; n];
    for j in 0..m {
        beta1[layout.block(j)].fill(j as u32);
    }

    // stage 1
    let mut beta2 = vec![0u32; n];
    let mut offset = vec![0u32; n];
    for group in &plan.groups {
        let q = group.len();
        let order = size_rank_order(group.clone(), |j| sizes1[j]);
        let span = layout.starts()[group.start]..layout.starts()[group.end];
        let (mut r, mut o) = (0, 0u32);
        for x in span {
            beta2[x] = order[r] as u32;
            offset[x] = o;
            r += 1;
            if r == q {
                r = 0;
                o += 1;
            }
        }
    }

    // stage 2
    let beta3: Vec<u32> = beta2.iter().map(|&b| master.apply(b as usize) as u32).collect();
    let inverse = master.inverse();
    let slot_sizes: Vec<usize> = (0..m).map(|i| sizes1[inverse.apply(i)]).collect();
    let slots = BlockLayout::from_sizes(&slot_sizes)?;

    // stage 3
    let taus = destroyers_for(slot_sizes.iter().copied())?;
    for x in 0..n {
        let tau = taus[sizes1[beta2[x] as usize]].as_ref().expect("destroyer for every size");
        offset[x] = tau.apply(offset[x] as usize) as u32;
    }

    // stage 4
    let mut base = vec![0usize; m];
    let mut stride = vec![0usize; m];
    for group in &plan.groups {
        let q = group.len();
        let q0 = slots.starts()[group.start];
        for (rank, slot) in size_rank_order(group.clone(), |i| slot_sizes[i]).into_iter().enumerate() {
            base[slot] = q0 + rank;
            stride[slot] = q;
        }
    }
    let mut slot_of_position = vec![0u32; n];
    for i in 0..m {
        slot_of_position[slots.block(i)].fill(i as u32);
    }
    let mut images = vec![0u32; n];
    let mut beta4 = vec![0u32; n];
    for x in 0..n {
        let slot = beta3[x] as usize;
        let pos = base[slot] + stride[slot] * offset[x] as usize;
        images[x] = pos as u32;
        beta4[x] = slot_of_position[pos];
    }
    let perm =
        Perm::new(images).map_err(|e| Error::precondition(format!("stages did not produce a bijection: {e}")))?;
    Ok((perm, StageTrace { beta1, beta2, beta3, beta4 }))
}

/// A `(t, t)`-almost AP-destroying permutation of `Z_n` from a
/// `(4t+7, 4t+7)`-almost AP-destroying master on `Z_M`.
///
/// Requires `n ≥ M²`, `⌊n/M⌋ > t` and `M ≥ (t+2)²`; the master is verified
/// by brute force.
pub fn build_almost(n: usize, t: usize, master: &Perm) -> Result<(Perm, StageTrace)> {
    let m = master.modulus();
    if (n as u128) < (m as u128).pow(2) {
        return Err(Error::precondition(format!("n = {n} is below M² = {}", m as u128 * m as u128)));
    }
    if n / m <= t {
        return Err(Error::precondition(format!("blocks of size {} are not larger than t = {t}", n / m)));
    }
    if m < (t + 2) * (t + 2) {
        return Err(Error::precondition(format!("M = {m} is below (t+2)² = {}", (t + 2) * (t + 2))));
    }
    let tol = master_tolerance(t as u64);
    let cert = check_almost(master, tol, tol)
        .map_err(|e| Error::precondition(format!("master cannot be ({tol}, {tol})-almost AP-destroying: {e}")))?;
    if let Some(cx) = cert.counterexample {
        return Err(Error::precondition(format!(
            "master does not destroy ({tol}, {tol})-almost APs: ({}, {}, {}) realizes {}:{}",
            cx.a, cx.b, cx.c, cx.eta1, cx.eta2
        )));
    }
    build_almost_structural(n, t, master)
}

/// Tallies of the correctness argument, evaluated on every triple
/// `(a, b, c)`, not all equal, with `a + c - 2b ≡ η`, `|η| ≤ t`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChainAudit {
    /// Triples whose three numbers share a block after stage 1.
    pub same_block: u64,
    /// Same-block triples whose final offset is not a non-zero multiple of
    /// the size of the destination superblock, or falls inside `[-t, t]`
    /// mod `n`.
    pub same_block_failures: u64,
    /// Triples spread over several blocks after stage 1.
    pub spread: u64,
    /// Spread triples whose `β₁` offset leaves `[-3, 3]`.
    pub beta1_outside_3: u64,
    /// Spread triples whose `β₂` offset leaves `[-(4t+7), 4t+7]`.
    pub beta2_outside_tol: u64,
    /// Spread triples whose `β₃` offset lands inside `[-(4t+7), 4t+7]`,
    /// i.e. the master failed to destroy the pattern.
    pub beta3_inside_tol: u64,
    /// Among spread triples whose `β₃` offset is outside the tolerance,
    /// those whose `β₄` offset still lands in `[-3, 3]`.
    pub beta4_inside_3: u64,
    /// Triples whose final offset lands in `[-t, t]` mod `n`.
    pub final_failures: u64,
}

/// Evaluates every step of the correctness argument on every qualifying
/// triple. Cost `Θ((2t+1)·n²)`.
pub fn audit_chain(perm: &Perm, trace: &StageTrace, t: usize, m: usize) -> ChainAudit {
    let n = perm.modulus();
    let tol = master_tolerance(t as u64) as i64;
    let ti = t as i64;
    let off_m = |v: &[u32], a: usize, b: usize, c: usize| {
        centered(((v[a] as usize + v[c] as usize + 2 * (m - v[b] as usize)) % m) as u64, m)
    };
    let p = perm.images();
    let mut group_size = vec![t + 1; m];
    if let Ok(plan) = superblock_partition(m, t) {
        for g in &plan.groups {
            group_size[g.clone()].fill(g.len());
        }
    }
    let mut audit = ChainAudit::default();
    for a in 0..n {
        for b in 0..n {
            for eta in -ti..=ti {
                let c = (2 * b as i64 - a as i64 + eta).rem_euclid(n as i64) as usize;
                if a == b && b == c {
                    continue;
                }
                let out = (p[a] as i64 + p[c] as i64 - 2 * p[b] as i64).rem_euclid(n as i64);
                let out_c = centered(out as u64, n);
                if out_c.abs() <= ti {
                    audit.final_failures += 1;
                }
                let b2 = &trace.beta2;
                if b2[a] == b2[b] && b2[b] == b2[c] {
                    audit.same_block += 1;
                    let q = group_size[trace.beta3[a] as usize];
                    let raw = p[a] as i64 + p[c] as i64 - 2 * p[b] as i64;
                    if raw == 0 || raw % q as i64 != 0 || out_c.abs() <= ti {
                        audit.same_block_failures += 1;
                    }
                    continue;
                }
                audit.spread += 1;
                if off_m(&trace.beta1, a, b, c).abs() > 3 {
                    audit.beta1_outside_3 += 1;
                }
                if off_m(b2, a, b, c).abs() > tol {
                    audit.beta2_outside_tol += 1;
                }
                if off_m(&trace.beta3, a, b, c).abs() <= tol {
                    audit.beta3_inside_tol += 1;
                } else if off_m(&trace.beta4, a, b, c).abs() <= 3 {
                    audit.beta4_inside_3 += 1;
                }
            }
        }
    }
    audit
}
