//! Inputs shared by the benchmarks.

use apd::catalog::table_entries;
use apd::prime::prime_destroyer;
use apd::Perm;

/// Table permutations with their moduli.
pub fn table_perms() -> Vec<Perm> {
    table_entries().into_iter().map(|e| e.perm).collect()
}

/// The quadratic construction for `p`.
pub fn prime_perm(p: u64) -> Perm {
    prime_destroyer(p).expect("p ≡ 3 (mod 8) prime").perm
}

/// `x ↦ 2x + 1` on an odd modulus: cheap, deterministic, and far from the identity.
pub fn affine_perm(n: usize) -> Perm {
    assert!(n % 2 == 1, "affine fixture needs an odd modulus");
    Perm::from_fn(n, |x| (2 * x + 1) % n).expect("2 is a unit mod odd n")
}
