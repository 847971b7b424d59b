//! Chinese-remainder composition of component permutations.
//!
//! Given permutations `π_i` of `Z_{n_i}` for pairwise coprime `n_i`, the
//! master permutation of `Z_N`, `N = ∏ n_i`, acts componentwise:
//! `π₀(x) mod n_i = π_i(x mod n_i)`. Because
//! `π₀(a) + π₀(c) - 2π₀(b) ≡ π_i(a_i) + π_i(c_i) - 2π_i(b_i) (mod n_i)`,
//! `π₀` destroys `(S, T)`-almost APs as soon as the components satisfy the
//! conditions of [`check_coverage`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{gcd, mod_inv, Perm, Residue, MAX_MODULUS};
use crate::verify::{check_pattern, Pattern, PatternSet};

/// Pairwise coprime moduli together with the idempotents of the CRT
/// isomorphism `Z_N → ∏ Z_{n_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtBasis {
    moduli: Vec<u64>,
    product: u64,
    /// `e_i ≡ 1 (mod n_i)`, `e_i ≡ 0 (mod n_j)` for `j ≠ i`.
    idempotents: Vec<u64>,
}

impl CrtBasis {
    pub fn new(moduli: &[u64]) -> Result<CrtBasis> {
        if moduli.is_empty() {
            return Err(Error::InvalidBasis("no moduli".into()));
        }
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidBasis(format!("modulus {m} is below 2")));
        }
        for (i, &a) in moduli.iter().enumerate() {
            for &b in &moduli[i + 1..] {
                let g = gcd(a, b);
                if g != 1 {
                    return Err(Error::InvalidBasis(format!("{a} and {b} share the factor {g}")));
                }
            }
        }
        let product = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::Overflow("product of moduli exceeds 64 bits".into()))?;
        let idempotents = moduli
            .iter()
            .map(|&m| {
                let cofactor = product / m;
                let inv = mod_inv((cofactor % m) as i64, m).expect("coprime by construction");
                (cofactor as u128 * inv as u128 % product as u128) as u64
            })
            .collect();
        Ok(CrtBasis { moduli: moduli.to_vec(), product, idempotents })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn product(&self) -> u64 {
        self.product
    }

    /// `x ↦ (x mod n_1, …, x mod n_k)`.
    pub fn split(&self, x: Residue) -> Vec<Residue> {
        debug_assert!(x < self.product);
        self.moduli.iter().map(|&m| x % m).collect()
    }

    /// The unique `x ∈ [0, N)` with `x ≡ r_i (mod n_i)`.
    pub fn combine(&self, residues: &[Residue]) -> Result<Residue> {
        if residues.len() != self.moduli.len() {
            return Err(Error::precondition(format!(
                "expected {} residues, got {}",
                self.moduli.len(),
                residues.len()
            )));
        }
        let n = self.product as u128;
        let mut acc = 0u128;
        for ((&r, &m), &e) in residues.iter().zip(&self.moduli).zip(&self.idempotents) {
            if r >= m {
                return Err(Error::precondition(format!("residue {r} out of range for modulus {m}")));
            }
            acc = (acc + r as u128 * e as u128) % n;
        }
        Ok(acc as Residue)
    }
}

/// `σ⁻¹ ∘ (π_1, …, π_k) ∘ σ` on `Z_N`.
pub fn compose_perms(components: &[Perm], basis: &CrtBasis) -> Result<Perm> {
    if components.len() != basis.moduli.len() {
        return Err(Error::precondition(format!(
            "{} components for a basis of {} moduli",
            components.len(),
            basis.moduli.len()
        )));
    }
    for (i, (p, &m)) in components.iter().zip(&basis.moduli).enumerate() {
        if p.modulus() as u64 != m {
            return Err(Error::ModulusMismatch { expected: m as usize, actual: p.modulus(), component: Some(i) });
        }
    }
    let n = basis.product;
    if n as usize > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(n));
    }
    // n ≤ 2^32, so every product r·e < n² fits in a u64.
    let images: Vec<u32> = (0..n as usize)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(|x| {
            let x = x as u64;
            let mut acc = 0u64;
            for ((p, &m), &e) in components.iter().zip(&basis.moduli).zip(&basis.idempotents) {
                let r = p.apply((x % m) as usize) as u64;
                acc = (acc + r * e % n) % n;
            }
            acc as u32
        })
        .collect();
    Ok(Perm::from_vec_unchecked(images))
}

/// A component permutation together with the patterns it is claimed to destroy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub label: String,
    pub perm: Perm,
    pub claims: PatternSet,
}

impl Component {
    pub fn new(label: impl Into<String>, perm: Perm, claims: PatternSet) -> Component {
        Component { label: label.into(), perm, claims }
    }

    /// Brute-force checks every claim.
    pub fn verify(&self) -> Result<()> {
        for &pattern in self.claims.iter() {
            if !check_pattern(&self.perm, pattern).verdict.passed() {
                return Err(Error::ClaimFailed { label: self.label.clone(), pattern });
            }
        }
        Ok(())
    }

    /// Component whose claims are exactly the patterns with `|s| ≤ s_max`,
    /// `|t| ≤ t_max` that `perm` destroys, found by brute force.
    pub fn discover(label: impl Into<String>, perm: Perm, s_max: u64, t_max: u64) -> Component {
        let n = perm.modulus();
        let claims = PatternSet::almost(s_max, t_max)
            .centered(n)
            .iter()
            .copied()
            .filter(|&p| check_pattern(&perm, p).verdict.passed())
            .collect();
        Component::new(label, perm, claims)
    }
}

/// Outcome of [`check_coverage`]. The check passes when every list is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub s: u64,
    pub t: u64,
    /// Components that do not claim `0 ↦ 0`.
    pub missing_zero: Vec<usize>,
    /// Components whose modulus is not above `2·max(S, T)`.
    pub small_moduli: Vec<usize>,
    /// Component pairs with non-coprime moduli.
    pub shared_factors: Vec<(usize, usize)>,
    /// Non-zero patterns in range that no component claims, in `(s, t)` order.
    pub uncovered: Vec<Pattern>,
}

impl CoverageReport {
    pub fn passed(&self) -> bool {
        self.missing_zero.is_empty()
            && self.small_moduli.is_empty()
            && self.shared_factors.is_empty()
            && self.uncovered.is_empty()
    }

    /// Description of the first problem found, if any.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(i) = self.missing_zero.first() {
            return Some(format!("component {i} does not claim 0:0"));
        }
        if let Some(i) = self.small_moduli.first() {
            return Some(format!("component {i} has modulus at most 2*max(S,T)"));
        }
        if let Some((i, j)) = self.shared_factors.first() {
            return Some(format!("components {i} and {j} have non-coprime moduli"));
        }
        self.uncovered.first().map(|p| format!("pattern {p} is not covered"))
    }
}

/// Checks the conditions under which the CRT composite of `components`
/// destroys `(S, T)`-almost APs:
///
/// * every component destroys `0 ↦ 0`;
/// * every non-zero `(s, t)` with `|s| ≤ S`, `|t| ≤ T` is claimed by some component;
/// * every modulus exceeds `2·max(S, T)`, so small offsets stay distinct in
///   each factor and a non-zero multiple of a modulus is never `≡ t`;
/// * the moduli are pairwise coprime.
///
/// Claims are taken at face value; use [`Component::verify`] to certify them.
pub fn check_coverage(components: &[Component], s: u64, t: u64) -> CoverageReport {
    let bound = 2 * s.max(t);
    let mut report = CoverageReport { s, t, ..Default::default() };
    for (i, c) in components.iter().enumerate() {
        let n = c.perm.modulus();
        if !c.claims.contains_mod(Pattern::new(0, 0), n) {
            report.missing_zero.push(i);
        }
        if n as u64 <= bound {
            report.small_moduli.push(i);
        }
        for (j, d) in components.iter().enumerate().skip(i + 1) {
            if gcd(n as u64, d.perm.modulus() as u64) != 1 {
                report.shared_factors.push((i, j));
            }
        }
    }
    let (s, t) = (s as i64, t as i64);
    for ps in -s..=s {
        for pt in -t..=t {
            let p = Pattern::new(ps, pt);
            if p.is_zero() {
                continue;
            }
            if !components.iter().any(|c| c.claims.contains_mod(p, c.perm.modulus())) {
                report.uncovered.push(p);
            }
        }
    }
    report
}
