//! The 24-row tetrahedron permutation table: every way to re-read one piped
//! as a tetrahedron on a different spanning corner, with partner diagonals
//! swapped in where needed.

use std::collections::BTreeSet;

use crate::exactnum::exact_sqrt_u128;
use crate::geometry::EdgeSextuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TetraFamily {
    pub origin: EdgeSextuple,
    /// Distinct rows whose six entries are all integers, sorted.
    pub members: BTreeSet<EdgeSextuple>,
    /// Rows dropped because a substituted diagonal was irrational or zero.
    pub irrational_rows: usize,
}

impl TetraFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn canonical(&self) -> EdgeSextuple {
        *self.members.first().expect("origin row is always a member")
    }
}

/// Partner diagonal `√(2(x²+y²) − z²)` when it is a positive integer.
pub fn partner_diagonal(x: u64, y: u64, z: u64) -> Option<u64> {
    let sum = 2 * (x as u128 * x as u128 + y as u128 * y as u128);
    let zz = z as u128 * z as u128;
    if zz >= sum {
        return None;
    }
    exact_sqrt_u128(sum - zz).map(|r| r as u64)
}

// Slot indices into [a, b, c, d, e, f, B̂, D̂, F̂].
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const E: usize = 4;
const F: usize = 5;
const BH: usize = 6;
const DH: usize = 7;
const FH: usize = 8;

// Each block of four is one ordering of the basis; within a block every row
// flips one basis vector, which swaps exactly two diagonals for partners.
const ROWS: [[usize; 6]; 24] = [
    [A, B, C, D, E, F],
    [A, B, C, DH, E, FH],
    [A, BH, C, D, E, FH],
    [A, BH, C, DH, E, F],
    [A, D, E, B, C, F],
    [A, D, E, BH, C, FH],
    [A, DH, E, B, C, FH],
    [A, DH, E, BH, C, F],
    [C, B, A, F, E, D],
    [C, B, A, FH, E, DH],
    [C, BH, A, F, E, DH],
    [C, BH, A, FH, E, D],
    [C, F, E, B, A, D],
    [C, F, E, BH, A, DH],
    [C, FH, E, B, A, DH],
    [C, FH, E, BH, A, D],
    [E, D, A, F, C, B],
    [E, D, A, FH, C, BH],
    [E, DH, A, F, C, BH],
    [E, DH, A, FH, C, B],
    [E, F, C, D, A, B],
    [E, F, C, DH, A, BH],
    [E, FH, C, D, A, BH],
    [E, FH, C, DH, A, B],
];

fn rows(s: &EdgeSextuple) -> impl Iterator<Item = Option<[u64; 6]>> {
    let [a, b, c, d, e, f] = s.to_array();
    let slots = [
        Some(a),
        Some(b),
        Some(c),
        Some(d),
        Some(e),
        Some(f),
        partner_diagonal(a, c, b),
        partner_diagonal(a, e, d),
        partner_diagonal(c, e, f),
    ];
    ROWS.into_iter().map(move |row| {
        let mut out = [0u64; 6];
        for (o, &k) in out.iter_mut().zip(row.iter()) {
            *o = slots[k]?;
        }
        Some(out)
    })
}

pub fn tetra_family(s: &EdgeSextuple) -> TetraFamily {
    let mut members = BTreeSet::new();
    let mut irrational_rows = 0;
    for row in rows(s) {
        match row {
            Some(r) => {
                members.insert(EdgeSextuple::from_array_unchecked(r));
            }
            None => irrational_rows += 1,
        }
    }
    TetraFamily { origin: *s, members, irrational_rows }
}

/// Lexicographically least family member. Allocation free.
pub fn canonical_form(s: &EdgeSextuple) -> EdgeSextuple {
    let best = rows(s).flatten().min().expect("identity row is always present");
    EdgeSextuple::from_array_unchecked(best)
}
