//! Integer parallelograms and triangles: the second diagonal, Heron areas,
//! the six-way rationality split and the bounded enumerations over them.
//!
//! A parallelogram here is two integer sides `a, b` plus one integer
//! diagonal `d1`; the partner diagonal and the area are what get tested.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{exact_sqrt_u128, is_perfect_square_u128, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("no parallelogram with sides {a}, {b} and diagonal {d1}: need |a-b| < d1 < a+b")]
    InvalidParallelogram { a: u64, b: u64, d1: u64 },
    #[error("sides ({0}, {1}, {2}) violate the triangle inequality")]
    InvalidTriangle(u64, u64, u64),
}

/// Which of {second diagonal, area} come out rational. Cases 1 and 4 have
/// no rational diagonal at all and never arise from integer input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParallelogramCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
}

impl ParallelogramCase {
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        use ParallelogramCase::*;
        [Case1, Case2, Case3, Case4, Case5, Case6].get(n.checked_sub(1)? as usize).copied()
    }

    pub fn both_diagonals(self) -> bool {
        matches!(self, ParallelogramCase::Case3 | ParallelogramCase::Case6)
    }

    pub fn rational_area(self) -> bool {
        matches!(self, ParallelogramCase::Case4 | ParallelogramCase::Case5 | ParallelogramCase::Case6)
    }
}

impl fmt::Display for ParallelogramCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case{}", self.number())
    }
}

impl Serialize for ParallelogramCase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for ParallelogramCase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        ParallelogramCase::from_number(n).ok_or_else(|| serde::de::Error::custom(format!("no case {n}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelogramSpec {
    pub side_a: u64,
    pub side_b: u64,
    pub diag1: u64,
    pub diag2_squared: Rational,
    pub area_squared: Rational,
}

impl ParallelogramSpec {
    pub fn new(a: u64, b: u64, d1: u64) -> Result<Self, PolygonError> {
        Ok(ParallelogramSpec {
            side_a: a,
            side_b: b,
            diag1: d1,
            diag2_squared: second_diagonal_squared(a, b, d1)?,
            area_squared: heron_area_squared(a, b, d1)? * Rational::from_integer(BigInt::from(4)),
        })
    }

    pub fn case(&self) -> ParallelogramCase {
        case_from_flags(
            crate::exactnum::is_rational_square(&self.diag2_squared),
            crate::exactnum::is_rational_square(&self.area_squared),
        )
    }
}

fn parallelogram_ok(a: u64, b: u64, d1: u64) -> bool {
    a > 0 && b > 0 && a.abs_diff(b) < d1 && (d1 as u128) < a as u128 + b as u128
}

fn sq(x: u64) -> u128 {
    x as u128 * x as u128
}

/// `2(a²+b²) − d1²`.
pub fn second_diagonal_squared(a: u64, b: u64, d1: u64) -> Result<Rational, PolygonError> {
    if !parallelogram_ok(a, b, d1) {
        return Err(PolygonError::InvalidParallelogram { a, b, d1 });
    }
    Ok(Rational::from_integer(BigInt::from(2 * (sq(a) + sq(b)) - sq(d1))))
}

/// `(x+y+z)(−x+y+z)(x−y+z)(x+y−z)`, i.e. 16 × area². Caller checks the
/// non-strict triangle inequality. Fits in u128 for sides below 2^30.
fn heron_product(x: u64, y: u64, z: u64) -> u128 {
    let (x, y, z) = (x as u128, y as u128, z as u128);
    (x + y + z) * (y + z - x) * (x + z - y) * (x + y - z)
}

fn heron_product_big(x: u64, y: u64, z: u64) -> BigInt {
    let (x, y, z) = (BigInt::from(x), BigInt::from(y), BigInt::from(z));
    (&x + &y + &z) * (&y + &z - &x) * (&x + &z - &y) * (&x + &y - &z)
}

pub fn heron_area_squared(x: u64, y: u64, z: u64) -> Result<Rational, PolygonError> {
    let (xx, yy, zz) = (x as u128, y as u128, z as u128);
    if xx > yy + zz || yy > xx + zz || zz > xx + yy {
        return Err(PolygonError::InvalidTriangle(x, y, z));
    }
    Ok(Rational::new(heron_product_big(x, y, z), BigInt::from(16)))
}

fn case_from_flags(second_diag: bool, area: bool) -> ParallelogramCase {
    match (second_diag, area) {
        (false, false) => ParallelogramCase::Case2,
        (true, false) => ParallelogramCase::Case3,
        (false, true) => ParallelogramCase::Case5,
        (true, true) => ParallelogramCase::Case6,
    }
}

const SMALL_SIDE: u64 = 1 << 30;

pub fn classify_parallelogram(a: u64, b: u64, d1: u64) -> Result<ParallelogramCase, PolygonError> {
    if a < SMALL_SIDE && b < SMALL_SIDE && d1 < SMALL_SIDE {
        if !parallelogram_ok(a, b, d1) {
            return Err(PolygonError::InvalidParallelogram { a, b, d1 });
        }
        let d2 = is_perfect_square_u128(2 * (sq(a) + sq(b)) - sq(d1));
        // parallelogram area² = 4·P/16 = P/4, rational iff P is a square
        let area = is_perfect_square_u128(heron_product(a, b, d1));
        return Ok(case_from_flags(d2, area));
    }
    Ok(ParallelogramSpec::new(a, b, d1)?.case())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelogramStats {
    pub total: u64,
    pub case2: u64,
    pub case3: u64,
    pub case5: u64,
    pub case6: u64,
    /// case 6 whose triangle (a, b, d1) has a right angle
    pub case6_right: u64,
    pub case6_scalene: u64,
}

impl Add for ParallelogramStats {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        ParallelogramStats {
            total: self.total + o.total,
            case2: self.case2 + o.case2,
            case3: self.case3 + o.case3,
            case5: self.case5 + o.case5,
            case6: self.case6 + o.case6,
            case6_right: self.case6_right + o.case6_right,
            case6_scalene: self.case6_scalene + o.case6_scalene,
        }
    }
}

/// Figures from the published short run, kept for side-by-side display.
pub const REFERENCE_STATS: ParallelogramStats = ParallelogramStats {
    total: 746_344,
    case2: 737_628,
    case3: 6_683,
    case5: 1_827,
    case6: 206,
    case6_right: 63,
    case6_scalene: 143,
};

fn is_right(a: u64, b: u64, c: u64) -> bool {
    let mut s = [sq(a), sq(b), sq(c)];
    s.sort_unstable();
    s[0] + s[1] == s[2]
}

fn stats_for_a(a: u64) -> ParallelogramStats {
    let mut st = ParallelogramStats::default();
    for b in 1..a {
        for c in (a - b + 1)..(a + b) {
            st.total += 1;
            match classify_parallelogram(a, b, c).expect("loop stays inside the valid range") {
                ParallelogramCase::Case2 => st.case2 += 1,
                ParallelogramCase::Case3 => st.case3 += 1,
                ParallelogramCase::Case5 => st.case5 += 1,
                ParallelogramCase::Case6 => {
                    st.case6 += 1;
                    if is_right(a, b, c) {
                        st.case6_right += 1;
                    } else {
                        st.case6_scalene += 1;
                    }
                }
                other => unreachable!("{other} from integer input"),
            }
        }
    }
    st
}

/// Tally over `0 < a ≤ max_a`, `0 < b < a`, `a−b < c < a+b`.
pub fn enumerate_parallelogram_stats(max_a: u64) -> ParallelogramStats {
    (1..=max_a).into_par_iter().map(stats_for_a).reduce(ParallelogramStats::default, Add::add)
}

/// One row of a parallelogram listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParallelogramEntry {
    pub a: u64,
    pub b: u64,
    pub d1: u64,
    pub d2: Option<u64>,
    /// Parallelogram area (twice the triangle area), when rational.
    pub area: Option<u64>,
    pub case: ParallelogramCase,
}

impl ParallelogramEntry {
    pub fn new(a: u64, b: u64, d1: u64) -> Result<Self, PolygonError> {
        let case = classify_parallelogram(a, b, d1)?;
        let d2 =
            if case.both_diagonals() { exact_sqrt_u128(2 * (sq(a) + sq(b)) - sq(d1)).map(|r| r as u64) } else { None };
        let area =
            if case.rational_area() { exact_sqrt_u128(heron_product(a, b, d1)).map(|r| (r / 2) as u64) } else { None };
        Ok(ParallelogramEntry { a, b, d1, d2, area, case })
    }

    pub const CSV_HEADER: &'static str = "a,b,d1,d2_or_blank,area_or_blank,case";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!("{},{},{},{},{},{}", self.a, self.b, self.d1, opt(self.d2), opt(self.area), self.case.number())
    }
}

/// Listing kind for [`smallest_parallelograms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Listing {
    /// both diagonals integer (cases 3 and 6)
    BothDiagonals,
    /// both diagonals and the area integer (case 6)
    AllRational,
}

impl Listing {
    pub fn from_case(case: u8) -> Option<Self> {
        match case {
            3 => Some(Listing::BothDiagonals),
            6 => Some(Listing::AllRational),
            _ => None,
        }
    }

    fn admits(self, case: ParallelogramCase) -> bool {
        match self {
            Listing::BothDiagonals => case.both_diagonals(),
            Listing::AllRational => case == ParallelogramCase::Case6,
        }
    }
}

/// Every normalized (`a ≤ b`, `d1 ≤ d2`) entry with both sides `≤ side_bound`,
/// sorted by `(a, b, d1)`.
pub fn smallest_parallelograms(listing: Listing, side_bound: u64) -> Vec<ParallelogramEntry> {
    let mut out: Vec<ParallelogramEntry> = (1..=side_bound)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a..=side_bound).flat_map(move |b| {
                (b - a + 1..a + b).filter_map(move |d1| {
                    let e = ParallelogramEntry::new(a, b, d1).ok()?;
                    (listing.admits(e.case) && e.d2.is_some_and(|d2| d1 <= d2)).then_some(e)
                })
            })
        })
        .collect();
    out.sort_unstable();
    out
}

/// Entries of the all-rational listing whose short side does not exceed the
/// last short side of either first-`n` listing.
pub fn common_parallelograms(n: usize, side_bound: u64) -> Vec<ParallelogramEntry> {
    let three = smallest_parallelograms(Listing::BothDiagonals, side_bound);
    let six = smallest_parallelograms(Listing::AllRational, side_bound);
    let last = |v: &[ParallelogramEntry]| v[..n.min(v.len())].last().map_or(0, |e| e.a);
    let cutoff = last(&three).min(last(&six));
    six.into_iter().filter(|e| e.a <= cutoff).collect()
}
