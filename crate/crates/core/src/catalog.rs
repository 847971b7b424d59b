//! Embedded reference data: fifteen small permutations found by computer
//! search, each with the patterns it destroys, and the components derived
//! from them for the CRT masters.
//!
//! Nothing here is trusted. [`table_entries`] is cheap and unchecked, but
//! [`derived_components`] brute-force verifies every claim before returning.

use num_bigint::BigUint;

use crate::crt::{compose_perms, Component, CrtBasis};
use crate::error::Result;
use crate::perm::Perm;
use crate::transform::{scale_both, scale_output};
use crate::verify::{Pattern, PatternSet};

struct Row {
    images: &'static [u32],
    claims: &'static [(i64, i64)],
}

const ROWS: [Row; 15] = [
    Row { images: &[0, 1, 8, 3, 2, 6, 4, 7, 5], claims: &[(0, 2), (-1, -2)] },
    Row { images: &[0, 1, 8, 10, 6, 9, 5, 7, 3, 2, 4], claims: &[(0, -2), (-1, 2)] },
    Row { images: &[0, 2, 5, 3, 15, 12, 1, 14, 10, 8, 11, 13, 4, 7, 6, 9], claims: &[(1, 1), (-1, -1)] },
    Row { images: &[0, 1, 3, 9, 11, 7, 4, 8, 15, 12, 16, 10, 14, 5, 2, 13, 6], claims: &[(-1, 1), (1, -1)] },
    Row { images: &[0, 2, 14, 4, 10, 17, 9, 13, 18, 3, 6, 15, 8, 12, 5, 1, 7, 11, 16], claims: &[(1, 1), (-1, 1)] },
    Row {
        images: &[0, 1, 4, 3, 21, 22, 2, 11, 12, 7, 8, 5, 10, 9, 6, 19, 16, 15, 20, 17, 18, 13, 14],
        claims: &[(0, 1), (1, 0), (0, -1), (-1, 0)],
    },
    Row {
        images: &[0, 2, 5, 1, 3, 9, 13, 20, 10, 15, 23, 4, 21, 17, 24, 7, 22, 18, 12, 16, 19, 8, 14, 6, 11],
        claims: &[(1, 1), (-1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 24, 16, 14, 20, 18, 25, 23, 27, 26, 28, 17, 15, 21, 11, 19, 22,
        ],
        claims: &[(1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 11, 14, 20, 27, 23, 25, 24, 26, 29, 28, 30, 16, 18, 17, 19, 22,
            21, 15,
        ],
        claims: &[(1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 11, 14, 18, 15, 17, 21, 24, 22, 32, 31, 35, 30, 33, 19, 34, 36,
            23, 20, 27, 25, 29, 26, 28, 16,
        ],
        claims: &[(1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 11, 14, 18, 15, 17, 21, 23, 22, 25, 29, 35, 38, 36, 31, 34, 40,
            19, 37, 39, 16, 27, 26, 28, 32, 24, 33, 30, 20,
        ],
        claims: &[(1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 11, 14, 18, 15, 17, 21, 23, 22, 19, 26, 35, 41, 36, 39, 34, 16,
            33, 40, 38, 37, 27, 24, 20, 28, 42, 25, 31, 29, 32, 30,
        ],
        claims: &[(1, 1)],
    },
    Row {
        images: &[
            0, 2, 1, 3, 6, 5, 7, 4, 13, 12, 8, 10, 9, 11, 14, 18, 15, 17, 21, 23, 22, 19, 26, 20, 31, 16, 29, 39, 41,
            44, 37, 43, 24, 45, 38, 28, 46, 25, 33, 27, 34, 30, 40, 42, 36, 32, 35,
        ],
        claims: &[(1, 1)],
    },
    Row { images: &[0, 1, 4, 2, 7, 6, 12, 9, 11, 8, 3, 5, 10], claims: &[(0, 1)] },
    Row {
        images: &[
            0, 1, 4, 2, 3, 6, 7, 12, 5, 8, 9, 15, 11, 13, 10, 16, 14, 21, 20, 22, 28, 17, 25, 18, 19, 23, 24, 35, 38,
            40, 37, 43, 44, 48, 45, 41, 42, 31, 47, 46, 26, 32, 36, 27, 30, 29, 39, 34, 33,
        ],
        claims: &[(0, 1)],
    },
];

/// Moduli of the fifteen table rows, in row order.
pub const TABLE_MODULI: [u64; 15] = [9, 11, 16, 17, 19, 23, 25, 29, 31, 37, 41, 43, 47, 13, 49];

/// Moduli of the six components of the `(1, 2)`-almost master.
pub const PART_ONE_MODULI: [u64; 6] = [9, 11, 16, 17, 19, 23];

/// One row of the reference table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    /// 1-based row number.
    pub index: usize,
    pub modulus: usize,
    pub perm: Perm,
    /// Claimed patterns, always including `0 ↦ 0`.
    pub claims: PatternSet,
}

impl TableEntry {
    pub fn component(&self) -> Component {
        Component::new(format!("row {}", self.index), self.perm.clone(), self.claims.clone())
    }
}

pub fn table_entries() -> Vec<TableEntry> {
    ROWS.iter()
        .enumerate()
        .map(|(i, row)| {
            let perm = Perm::new(row.images.to_vec()).expect("table rows are permutations");
            let mut claims: PatternSet = row.claims.iter().map(|&(s, t)| Pattern::new(s, t)).collect();
            claims.insert(Pattern::new(0, 0));
            TableEntry { index: i + 1, modulus: perm.modulus(), perm, claims }
        })
        .collect()
}

/// Row `index` (1-based).
pub fn table_entry(index: usize) -> Option<TableEntry> {
    table_entries().into_iter().nth(index.checked_sub(1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// Six components covering every non-zero `(s, t) ∈ [-1, 1] × [-2, 2]`.
    One,
    /// Nine further components covering `s ∈ {±2}`, `t ∈ [-2, 2]`.
    Two,
}

fn claims(list: &[(i64, i64)]) -> PatternSet {
    list.iter().map(|&(s, t)| Pattern::new(s, t)).collect()
}

/// The verified components for one part of the construction.
///
/// Part one is rows 1–4 and 6 as given, plus `x ↦ 2·π⁻¹(x)` for row 5.
/// Part two transports rows 7–15 onto the `s = ±2` patterns: the `1 ↦ 1`
/// rows through `x ↦ t·π(s⁻¹x)`, the `0 ↦ 1` rows through the inverse
/// (giving `1 ↦ 0`) followed by the same scaling.
pub fn derived_components(part: Part) -> Result<Vec<Component>> {
    let rows = table_entries();
    let row = |i: usize| &rows[i - 1];
    let components = match part {
        Part::One => vec![
            row(1).component(),
            row(2).component(),
            row(3).component(),
            row(4).component(),
            Component::new(
                "2 * inverse(row 5)",
                scale_output(&row(5).perm.inverse(), 2)?,
                claims(&[(0, 0), (1, 2), (1, -2)]),
            ),
            row(6).component(),
        ],
        Part::Two => {
            // (row, s, t): row destroys 1 ↦ 1 (and row 7 also -1 ↦ 1)
            let scaled = [(7, 2, 1), (8, 2, -1), (9, 2, 2), (10, 2, -2), (11, -2, -1), (12, -2, 2), (13, -2, -2)];
            let mut out = Vec::with_capacity(9);
            for (i, s, t) in scaled {
                let mut c = vec![(0, 0), (s, t)];
                if i == 7 {
                    c.push((-s, t));
                }
                out.push(Component::new(
                    format!("scale(row {i}, {s}, {t})"),
                    scale_both(&row(i).perm, s, t)?,
                    claims(&c),
                ));
            }
            for (i, s) in [(14, 2), (15, -2)] {
                out.push(Component::new(
                    format!("scale(inverse(row {i}), {s}, 1)"),
                    scale_both(&row(i).perm.inverse(), s, 1)?,
                    claims(&[(0, 0), (s, 0)]),
                ));
            }
            out
        }
    };
    for c in &components {
        c.verify()?;
    }
    Ok(components)
}

/// The `(1, 2)`-almost AP-destroying master on `Z_11767536`, composed from
/// the part-one components.
pub fn part_one_master() -> Result<Perm> {
    let comps = derived_components(Part::One)?;
    let perms: Vec<Perm> = comps.into_iter().map(|c| c.perm).collect();
    compose_perms(&perms, &CrtBasis::new(&PART_ONE_MODULI)?)
}

/// Thresholds of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constants {
    /// `9·11·16·17·19·23`, the modulus of the part-one master.
    pub master_modulus: u64,
    /// Square of `master_modulus`: every `n` at least this large admits an
    /// AP-destroying permutation through the block construction.
    pub threshold: BigUint,
    /// Product of all fifteen table moduli, the modulus of the `(2, 2)` master.
    pub almost_master_modulus: BigUint,
}

pub fn constants() -> Constants {
    let master_modulus: u64 = PART_ONE_MODULI.iter().product();
    let big = BigUint::from(master_modulus);
    Constants {
        master_modulus,
        threshold: &big * &big,
        almost_master_modulus: TABLE_MODULI.iter().map(|&m| BigUint::from(m)).product(),
    }
}
