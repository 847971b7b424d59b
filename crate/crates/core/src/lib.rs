//! Permutations of `Z_n` that destroy arithmetic progressions.
//!
//! A permutation `π` destroys the pattern `s ↦ t` when no triple `(a, b, c)`,
//! not all equal, has `a + c - 2b ≡ s` and `π(a) + π(c) - 2π(b) ≡ t`. It is
//! `(s, t)`-almost AP-destroying when it destroys every `s' ↦ t'` with
//! `|s'| ≤ s`, `|t'| ≤ t`.
//!
//! The crate builds such permutations (quadratic residues, Chinese remainder
//! composition, block rearrangement, products), searches for small ones, and
//! checks every claim by brute force, returning [`Certificate`]s.

pub mod almost;
pub mod blocks;
pub mod catalog;
pub mod crt;
pub mod error;
pub mod format;
pub mod intseq;
pub mod perm;
pub mod prime;
pub mod search;
pub mod transform;
pub mod verify;

pub use almost::{StageTrace, SuperblockPlan};
pub use blocks::BlockLayout;
pub use crt::{Component, CoverageReport, CrtBasis};
pub use error::{Error, Result};
pub use format::{parse_perm, render_perm, PermFormat};
pub use intseq::IntPerm;
pub use perm::{mod_inv, Offset, Perm, Residue, MAX_MODULUS};
pub use prime::XiWitness;
pub use search::{SearchConfig, SearchMode, SearchOutcome, SearchVerdict};
pub use verify::{Certificate, Counterexample, Pattern, PatternSet, SurvivorStats, Verdict};
