//! Modular arithmetic helpers and the [`Perm`] value type shared by every
//! construction in the crate.
//!
//! A permutation of `Z_n` is stored as its image sequence: entry `x` is
//! `π(x)`. Images are stored as `u32`, which bounds the modulus at
//! [`MAX_MODULUS`]. Every construction that can be verified by brute force
//! lives far below that bound; the only quantities that do not fit in a word
//! are the threshold constants in [`crate::catalog`], which use big integers.

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus a [`Perm`] can carry.
pub const MAX_MODULUS: usize = u32::MAX as usize;

/// An element of `Z_n`, always in `[0, n)`. The modulus is supplied by context.
pub type Residue = u64;

/// A signed offset such as the `s` and `t` of a pattern.
///
/// Offsets are compared modulo `n` through their centered representative in
/// `(-n/2, n/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Offset(pub i64);

impl Offset {
    /// The residue of this offset in `[0, n)`.
    pub fn reduce(self, n: usize) -> Residue {
        self.0.rem_euclid(n as i64) as Residue
    }

    /// Canonical representative in `(-n/2, n/2]`.
    pub fn centered(self, n: usize) -> Offset {
        Offset(centered(self.reduce(n), n))
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps a residue `r ∈ [0, n)` to its representative in `(-n/2, n/2]`.
#[inline]
pub fn centered(r: u64, n: usize) -> i64 {
    if 2 * r > n as u64 {
        r as i64 - n as i64
    } else {
        r as i64
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `x` modulo `n`, via the extended Euclidean algorithm.
pub fn mod_inv(x: i64, n: u64) -> Result<Residue> {
    if n == 0 {
        return Err(Error::precondition("modulus must be positive"));
    }
    let a = x.rem_euclid(n as i64) as i128;
    let (mut old_r, mut r) = (a, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    // old_r = gcd(a, n)
    if old_r != 1 && n != 1 {
        return Err(Error::NotCoprime { value: x, modulus: n, gcd: old_r as u64 });
    }
    Ok(old_s.rem_euclid(n as i128) as Residue)
}

/// A bijection of `Z_n = {0, …, n-1}` given by its image sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    /// Validates `images` as a bijection of `{0, …, len-1}`.
    pub fn new(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        if n > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(n as u64));
        }
        let mut seen = vec![false; n];
        for (index, &v) in images.iter().enumerate() {
            let v = v as usize;
            if v >= n {
                return Err(Error::ImageOutOfRange { index, value: v as i64, modulus: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::DuplicateImage { index, value: v as u64 });
            }
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from arbitrary integers, rejecting anything that
    /// is not a bijection of `{0, …, len-1}`.
    pub fn from_ints(values: &[i64]) -> Result<Perm> {
        let n = values.len();
        let mut images = Vec::with_capacity(n);
        for (index, &v) in values.iter().enumerate() {
            if v < 0 || v as u64 >= n as u64 {
                return Err(Error::ImageOutOfRange { index, value: v, modulus: n });
            }
            images.push(v as u32);
        }
        Perm::new(images)
    }

    pub(crate) fn from_vec_unchecked(images: Vec<u32>) -> Perm {
        debug_assert!(Perm::new(images.clone()).is_ok());
        Perm { images }
    }

    /// Builds `x ↦ f(x)` and checks that it is a bijection.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> usize) -> Result<Perm> {
        if n > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(n as u64));
        }
        Perm::new((0..n).map(f).map(|v| v.min(u32::MAX as usize) as u32).collect())
    }

    pub fn identity(n: usize) -> Perm {
        assert!((1..=MAX_MODULUS).contains(&n), "modulus out of range");
        Perm { images: (0..n as u32).collect() }
    }

    pub fn modulus(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Perm { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch { expected: self.modulus(), actual: other.modulus(), component: None });
        }
        Ok(Perm { images: other.images.iter().map(|&y| self.images[y as usize]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y as usize)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm(n={}, {:?})", self.modulus(), self.images)
    }
}

impl TryFrom<Vec<u32>> for Perm {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Perm> {
        Perm::new(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_perm_examples() {
        let p = Perm::from_ints(&[0, 1, 8, 3, 2, 6, 4, 7, 5]).unwrap();
        assert_eq!(p.modulus(), 9);
        assert!(Perm::from_ints(&[0]).unwrap().is_identity());
        assert_eq!(Perm::from_ints(&[0, 0, 1]), Err(Error::DuplicateImage { index: 1, value: 0 }));
        assert_eq!(Perm::from_ints(&[0, 3, 1]), Err(Error::ImageOutOfRange { index: 1, value: 3, modulus: 3 }));
        assert_eq!(Perm::from_ints(&[-1, 0]), Err(Error::ImageOutOfRange { index: 0, value: -1, modulus: 2 }));
        assert_eq!(Perm::from_ints(&[]), Err(Error::EmptyPermutation));
        assert!(Perm::from_ints(&[0, 0, 1]).unwrap_err().to_string().contains("duplicate image 0"));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Perm::identity(5).inverse(), Perm::identity(5));
        let p = Perm::from_ints(&[0, 2, 1]).unwrap();
        assert_eq!(p.inverse(), p);
        let row19 = Perm::from_ints(&[0, 2, 14, 4, 10, 17, 9, 13, 18, 3, 6, 15, 8, 12, 5, 1, 7, 11, 16]).unwrap();
        assert!(row19.inverse().compose(&row19).unwrap().is_identity());
        assert!(row19.compose(&row19.inverse()).unwrap().is_identity());
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(3, 7), Ok(5));
        for n in 1..50 {
            assert_eq!(mod_inv(1, n), Ok(if n == 1 { 0 } else { 1 }));
        }
        assert_eq!(mod_inv(2, 25), Ok(13));
        assert_eq!(mod_inv(-1, 7), Ok(6));
        assert_eq!(mod_inv(6, 9), Err(Error::NotCoprime { value: 6, modulus: 9, gcd: 3 }));
    }

    #[test]
    fn mod_inv_exhaustive_to_500() {
        for n in 2..=500u64 {
            for x in 1..n {
                match mod_inv(x as i64, n) {
                    Ok(y) => assert_eq!(x * y % n, 1, "x={x} n={n}"),
                    Err(Error::NotCoprime { gcd: g, .. }) => {
                        assert_eq!(g, gcd(x, n));
                        assert!(g > 1);
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn centered_representatives() {
        assert_eq!(Offset(-2).centered(9), Offset(-2));
        assert_eq!(Offset(7).centered(9), Offset(-2));
        assert_eq!(Offset(5).centered(10), Offset(5));
        assert_eq!(Offset(-5).centered(10), Offset(5));
        assert_eq!(Offset(6).centered(10), Offset(-4));
        for n in 1..40usize {
            for v in -100..100 {
                let c = Offset(v).centered(n);
                assert_eq!(c.centered(n), c);
                assert!(2 * c.0 > -(n as i64) && 2 * c.0 <= n as i64);
                assert_eq!(c.reduce(n), Offset(v).reduce(n));
            }
        }
    }
}
