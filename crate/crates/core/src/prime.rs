//! AP-destroying permutations of `Z_p` for primes `p ≡ 3 (mod 8)`:
//! `f(x) = x²` for even `x`, `f(x) = ξx²` for odd `x` (reading `x` in
//! `{0, …, p-1}`), where `ξ` and `ξ - 1` are both quadratic non-residues.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Perm, MAX_MODULUS};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve prime bases are exact for
/// all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

fn residue(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    Ok(legendre_unchecked(residue(a, p), p))
}

fn legendre_unchecked(a: u64, p: u64) -> i8 {
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// `ξ` with `ξ` and `ξ - 1` both non-residues mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XiWitness {
    pub p: u64,
    pub xi: u64,
}

/// The smallest `ξ ∈ [2, p-1]` with `(ξ/p) = ((ξ-1)/p) = -1`.
pub fn find_xi(p: u64) -> Result<XiWitness> {
    require_odd_prime(p)?;
    if p <= 3 {
        return Err(Error::precondition(format!("p must exceed 3, got {p}")));
    }
    (2..p)
        .find(|&xi| legendre_unchecked(xi, p) == -1 && legendre_unchecked(xi - 1, p) == -1)
        .map(|xi| XiWitness { p, xi })
        .ok_or_else(|| Error::precondition(format!("no witness below {p}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeConstruction {
    pub witness: XiWitness,
    pub perm: Perm,
}

/// The quadratic construction for a prime `p > 3`, `p ≡ 3 (mod 8)`.
pub fn prime_destroyer(p: u64) -> Result<PrimeConstruction> {
    require_odd_prime(p)?;
    if p <= 3 || p % 8 != 3 {
        return Err(Error::precondition(format!("need a prime p > 3 with p ≡ 3 (mod 8), got {p} ≡ {} (mod 8)", p % 8)));
    }
    if p > MAX_MODULUS as u64 {
        return Err(Error::ModulusTooLarge(p));
    }
    let witness = find_xi(p)?;
    let images = (0..p)
        .map(|x| {
            let sq = mul_mod(x, x, p);
            (if x % 2 == 0 { sq } else { mul_mod(witness.xi, sq, p) }) as u32
        })
        .collect();
    let perm =
        Perm::new(images).map_err(|e| Error::precondition(format!("quadratic map is not a bijection mod {p}: {e}")))?;
    Ok(PrimeConstruction { witness, perm })
}

/// Whether `ax² + bxy + cy² ≡ 0 (mod p)` has a solution `(x, y) ≠ (0, 0)`,
/// decided as `(b² - 4ac / p) ≠ -1`.
///
/// `a` and `c` must be units mod `p`; `b` may vanish.
pub fn form_solvable(a: i64, b: i64, c: i64, p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    for (name, v) in [("a", a), ("c", c)] {
        if residue(v, p) == 0 {
            return Err(Error::precondition(format!("coefficient {name} = {v} is divisible by {p}")));
        }
    }
    let (a, b, c) = (residue(a, p), residue(b, p), residue(c, p));
    let disc = (mul_mod(b, b, p) + p - mul_mod(4 % p, mul_mod(a, c, p), p)) % p;
    Ok(legendre_unchecked(disc, p) != -1)
}

/// The quantities the correctness argument needs to be non-residues or
/// non-zero, evaluated for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminantReport {
    pub p: u64,
    pub xi: u64,
    /// Legendre symbols of `-1/(2(ξ-1))`, `1/(ξ-1)`, `ξ/(2(ξ-1))`, `-ξ/(ξ-1)`.
    pub quotients: [i8; 4],
    /// `ξ - 1`, `2ξ - 1`, `ξ - 2` all non-zero mod `p`.
    pub coefficients_nonzero: bool,
    /// [`form_solvable`] on the four mixed-parity forms; all should be false.
    pub forms_solvable: [bool; 4],
    /// `(-1/p)` and `(2/p)`.
    pub minus_one_and_two: [i8; 2],
}

impl DiscriminantReport {
    pub fn holds(&self) -> bool {
        self.quotients.iter().all(|&q| q == -1)
            && self.coefficients_nonzero
            && self.forms_solvable.iter().all(|&s| !s)
            && self.minus_one_and_two == [-1, -1]
    }
}

fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn discriminant_report(p: u64) -> Result<DiscriminantReport> {
    let witness = find_xi(p)?;
    let xi = witness.xi;
    let xm1 = (xi + p - 1) % p;
    let inv = |v: u64| inverse_mod_prime(v % p, p);
    let neg = |v: u64| (p - v % p) % p;
    let quotient_values = [neg(inv(2 * xm1)), inv(xm1), mul_mod(xi, inv(2 * xm1), p), neg(mul_mod(xi, inv(xm1), p))];
    let quotients = quotient_values.map(|q| legendre_unchecked(q, p));
    let (xi_i, xm1_i) = (xi as i64, xm1 as i64);
    let coefficients_nonzero = [xm1_i, 2 * xi_i - 1, xi_i - 2].iter().all(|&v| residue(v, p) != 0);
    let forms = [
        (xm1_i, 4 * xm1_i, 2 * (2 * xi_i - 1)),
        (xm1_i, 2 * xm1_i, xi_i - 2),
        (xm1_i, 4 * xm1_i, 2 * (xi_i - 2)),
        (xm1_i, 2 * xm1_i, 2 * xi_i - 1),
    ];
    let mut forms_solvable = [true; 4];
    for (slot, &(a, b, c)) in forms_solvable.iter_mut().zip(&forms) {
        *slot = form_solvable(a, b, c, p)?;
    }
    Ok(DiscriminantReport {
        p,
        xi,
        quotients,
        coefficients_nonzero,
        forms_solvable,
        minus_one_and_two: [legendre_unchecked(p - 1, p), legendre_unchecked(2, p)],
    })
}

/// Primes `p ≡ 3 (mod 8)` with `3 < p ≤ bound`.
pub fn construction_primes(bound: u64) -> Vec<u64> {
    (11..=bound).step_by(8).filter(|&p| is_prime(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_pattern, Pattern};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn squares(p: u64) -> Vec<bool> {
        let mut sq = vec![false; p as usize];
        for x in 1..p {
            sq[(x * x % p) as usize] = true;
        }
        sq
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "{n}");
        }
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, 11).unwrap(), -1);
        assert_eq!(legendre(1, 11).unwrap(), 1);
        assert_eq!(legendre(0, 11).unwrap(), 0);
        assert_eq!(legendre(-1, 11).unwrap(), -1);
        assert!(legendre(3, 9).is_err());
        assert!(legendre(3, 2).is_err());
        for p in [3, 5, 7, 11, 13, 101] {
            let sq = squares(p);
            for a in -50..50i64 {
                let r = a.rem_euclid(p as i64) as usize;
                let want = if r == 0 {
                    0
                } else if sq[r] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a, p).unwrap(), want);
            }
        }
    }

    #[test]
    fn xi_examples() {
        assert_eq!(find_xi(11).unwrap().xi, 7);
        for p in [5, 7, 13, 19, 23, 101] {
            let sq = squares(p);
            let want = (2..p).find(|&x| !sq[x as usize] && !sq[x as usize - 1]).unwrap();
            assert_eq!(find_xi(p).unwrap().xi, want, "p={p}");
        }
        assert!(find_xi(3).is_err());
    }

    #[test]
    fn construction_examples() {
        let c = prime_destroyer(11).unwrap();
        assert_eq!(c.witness.xi, 7);
        assert_eq!(c.perm.images(), &[0, 7, 4, 8, 5, 10, 3, 2, 9, 6, 1]);
        assert!(check_pattern(&c.perm, Pattern::new(0, 0)).verdict.passed());
        assert!(check_pattern(&prime_destroyer(19).unwrap().perm, Pattern::new(0, 0)).verdict.passed());
        assert!(prime_destroyer(13).is_err());
        assert!(prime_destroyer(3).is_err());
        assert!(prime_destroyer(27).is_err());
    }

    #[test]
    fn direct_ap_condition() {
        // f(x) + f(x+2y) ≡ 2f(x+y) forces y ≡ 0
        for p in construction_primes(200) {
            let f = prime_destroyer(p).unwrap().perm;
            for x in 0..p {
                for y in 1..p {
                    let (a, b, c) = (x, (x + y) % p, (x + 2 * y) % p);
                    let lhs = (f.apply(a as usize) + f.apply(c as usize)) as u64 % p;
                    assert_ne!(lhs, 2 * f.apply(b as usize) as u64 % p, "p={p} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn form_examples() {
        assert!(form_solvable(1, 0, -1, 7).unwrap());
        assert!(!form_solvable(1, 1, 1, 5).unwrap());
        assert!(form_solvable(7, 1, 1, 7).is_err());
        assert!(form_solvable(1, 1, 14, 7).is_err());
        assert!(form_solvable(1, 1, 1, 9).is_err());
    }

    #[test]
    fn form_matches_enumeration() {
        let primes: Vec<u64> = (3..=101).filter(|&p| is_prime(p)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..300 {
            let p = primes[rng.gen_range(0..primes.len())];
            let pick = |rng: &mut ChaCha8Rng| loop {
                let v = rng.gen_range(-500..500i64);
                if v.rem_euclid(p as i64) != 0 {
                    break v;
                }
            };
            let (a, b, c) = (pick(&mut rng), rng.gen_range(-500..500i64), pick(&mut rng));
            let pi = p as i64;
            let brute = (0..pi)
                .any(|x| (0..pi).any(|y| (x, y) != (0, 0) && (a * x * x + b * x * y + c * y * y).rem_euclid(pi) == 0));
            assert_eq!(form_solvable(a, b, c, p).unwrap(), brute, "({a},{b},{c}) mod {p}");
        }
    }

    #[test]
    fn discriminants_hold() {
        for p in construction_primes(500) {
            let report = discriminant_report(p).unwrap();
            assert!(report.holds(), "{report:?}");
        }
    }

    #[test]
    fn prime_list() {
        assert_eq!(construction_primes(100), vec![11, 19, 43, 59, 67, 83]);
        assert_eq!(construction_primes(2003).len(), 77);
    }
}
