//! Pattern-transport maps.
//!
//! If `π` destroys `s₀ ↦ t₀` and `s, t` are units mod `n`, then
//! `x ↦ t·π(s⁻¹x)` destroys `s·s₀ ↦ t·t₀`; and `π⁻¹` destroys `t₀ ↦ s₀`
//! (see [`crate::perm::Perm::inverse`]). Translating outputs changes no
//! verdict at all.
//!
//! In debug builds the scaling maps re-verify the transport on small moduli.

use crate::error::Result;
use crate::perm::{mod_inv, Perm, Residue};
#[cfg(debug_assertions)]
use crate::verify::{check_pattern, Pattern};

#[cfg(debug_assertions)]
const DEBUG_CHECK_LIMIT: usize = 64;

/// `x ↦ t·π(x)`. Sends a destroyed `0 ↦ 1` to a destroyed `0 ↦ t`.
pub fn scale_output(p: &Perm, t: i64) -> Result<Perm> {
    scale_both(p, 1, t)
}

/// `x ↦ t·π(s⁻¹·x)`. Sends a destroyed `1 ↦ 1` to a destroyed `s ↦ t`.
pub fn scale_both(p: &Perm, s: i64, t: i64) -> Result<Perm> {
    let n = p.modulus() as u64;
    let s_inv = mod_inv(s, n)?;
    mod_inv(t, n)?;
    let t = t.rem_euclid(n as i64) as u64;
    let q = Perm::from_vec_unchecked(
        (0..n)
            .map(|x| {
                ((t as u128 * p.apply((s_inv as u128 * x as u128 % n as u128) as usize) as u128) % n as u128) as u32
            })
            .collect(),
    );
    #[cfg(debug_assertions)]
    if p.modulus() <= DEBUG_CHECK_LIMIT {
        for s0 in -2..=2 {
            for t0 in -2..=2 {
                let hyp = Pattern::new(s0, t0);
                if check_pattern(p, hyp).verdict.passed() {
                    let image = Pattern::new(s * s0, t as i64 * t0);
                    debug_assert!(check_pattern(&q, image).verdict.passed(), "transport {hyp} -> {image} broke");
                }
            }
        }
    }
    Ok(q)
}

/// `x ↦ π(x) + (q - π(q))`, the output translation that makes `q` a fixed point.
pub fn fix_point_translate(p: &Perm, q: Residue) -> Perm {
    let n = p.modulus() as u64;
    let q = q % n;
    let shift = (q + n - p.apply(q as usize) as u64) % n;
    Perm::from_vec_unchecked(p.images().iter().map(|&y| ((y as u64 + shift) % n) as u32).collect())
}

/// `x ↦ π(x + u) + v`. Both translations preserve every pattern verdict.
pub fn translate(p: &Perm, u: i64, v: i64) -> Perm {
    let n = p.modulus() as i64;
    let (u, v) = (u.rem_euclid(n) as usize, v.rem_euclid(n) as usize);
    let n = n as usize;
    Perm::from_vec_unchecked((0..n).map(|x| ((p.apply((x + u) % n) + v) % n) as u32).collect())
}
