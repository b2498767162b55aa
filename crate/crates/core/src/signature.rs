//! The rationality signature of a piped: 26 yes/no checks plus the ternary
//! volume flag, and its reduction to per-group counts.
//!
//! Slot order within each group is this crate's convention:
//!
//! | group      | slots |
//! |------------|-------|
//! | edges      | `a, c, e` |
//! | skew       | triangles 146, 147, 167, 467 |
//! | face diag  | `b, b̂, d, d̂, f, f̂` with `x̂` the partner diagonal |
//! | body diag  | `u+v+w, −u+v+w, u−v+w, u+v−w` |
//! | face area  | `u×v, u×w, v×w` |
//! | body area  | B1278, B1368, B1458, B2367, B2457, B3456 |

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exactnum::{is_perfect_square_u128, is_rational_square, Rational};
use crate::geometry::{
    coeff_sub, gram_from_edges, vertex, volume_squared, Coeffs, EdgeSextuple, GeometryError, GramMatrix, SKEW_TRIANGLES,
};

pub const FACE_DIAGONALS: [Coeffs; 6] = [[1, -1, 0], [1, 1, 0], [1, 0, -1], [1, 0, 1], [0, 1, -1], [0, 1, 1]];
pub const BODY_DIAGONALS: [Coeffs; 4] = [[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]];
pub const FACE_AREAS: [(Coeffs, Coeffs); 3] = [([1, 0, 0], [0, 1, 0]), ([1, 0, 0], [0, 0, 1]), ([0, 1, 0], [0, 0, 1])];
pub const BODY_AREAS: [(Coeffs, Coeffs); 6] = [
    ([1, 0, 0], [0, 1, 1]),
    ([0, 1, 0], [1, 0, 1]),
    ([0, 0, 1], [1, 1, 0]),
    ([-1, 1, 0], [0, 0, 1]),
    ([0, 1, 0], [-1, 0, 1]),
    ([1, 0, 0], [0, -1, 1]),
];

/// Volume check: zero (flat), irrational, or rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VolumeFlag {
    Zero,
    Irrational,
    Rational,
}

impl VolumeFlag {
    pub fn as_i8(self) -> i8 {
        match self {
            VolumeFlag::Zero => -1,
            VolumeFlag::Irrational => 0,
            VolumeFlag::Rational => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(VolumeFlag::Zero),
            0 => Some(VolumeFlag::Irrational),
            1 => Some(VolumeFlag::Rational),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            VolumeFlag::Zero => '-',
            VolumeFlag::Irrational => '0',
            VolumeFlag::Rational => '1',
        }
    }

    pub fn of(vol_sq: &Rational) -> Self {
        if vol_sq.is_zero() {
            VolumeFlag::Zero
        } else if is_rational_square(vol_sq) {
            VolumeFlag::Rational
        } else {
            VolumeFlag::Irrational
        }
    }
}

impl Serialize for VolumeFlag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for VolumeFlag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        VolumeFlag::from_i8(v).ok_or_else(|| serde::de::Error::custom(format!("volume flag {v} not in -1..=1")))
    }
}

/// Exact squared values of every checked component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentValues {
    pub edges: [Rational; 3],
    /// squared triangle areas
    pub skew: [Rational; 4],
    pub face_diag: [Rational; 6],
    pub body_diag: [Rational; 4],
    pub face_area: [Rational; 3],
    pub body_area: [Rational; 6],
    pub volume: Rational,
}

impl ComponentValues {
    pub fn of(g: &GramMatrix) -> Result<Self, GeometryError> {
        let len = |c: Coeffs| Rational::new(g.bilinear_twice(c, c), BigInt::from(2));
        let area = |(x, y): (Coeffs, Coeffs)| Rational::new(g.area_twice_sq(x, y), BigInt::from(4));
        let skew = SKEW_TRIANGLES.map(|[p, q, r]| {
            let (p, q, r) = (vertex(p), vertex(q), vertex(r));
            Rational::new(g.area_twice_sq(coeff_sub(q, p), coeff_sub(r, p)), BigInt::from(16))
        });
        Ok(ComponentValues {
            edges: [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(len),
            skew,
            face_diag: FACE_DIAGONALS.map(len),
            body_diag: BODY_DIAGONALS.map(len),
            face_area: FACE_AREAS.map(area),
            body_area: BODY_AREAS.map(area),
            volume: volume_squared(g)?,
        })
    }

    pub fn signature(&self) -> ComponentSignature {
        let flags = |xs: &[Rational]| -> Vec<bool> { xs.iter().map(is_rational_square).collect() };
        ComponentSignature {
            edges: flags(&self.edges).try_into().unwrap(),
            skew: flags(&self.skew).try_into().unwrap(),
            face_diag: flags(&self.face_diag).try_into().unwrap(),
            body_diag: flags(&self.body_diag).try_into().unwrap(),
            face_area: flags(&self.face_area).try_into().unwrap(),
            body_area: flags(&self.body_area).try_into().unwrap(),
            volume: VolumeFlag::of(&self.volume),
        }
    }

    /// Every squared value except the edges, sorted; a family invariant.
    pub fn sorted_multiset(&self) -> Vec<Rational> {
        let mut all: Vec<Rational> = self
            .skew
            .iter()
            .chain(&self.face_diag)
            .chain(&self.body_diag)
            .chain(&self.face_area)
            .chain(&self.body_area)
            .chain(&self.edges)
            .cloned()
            .collect();
        all.push(self.volume.clone());
        all.sort();
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentSignature {
    pub edges: [bool; 3],
    pub skew: [bool; 4],
    pub face_diag: [bool; 6],
    pub body_diag: [bool; 4],
    pub face_area: [bool; 3],
    pub body_area: [bool; 6],
    pub volume: VolumeFlag,
}

/// Number of characters in the serialized signature.
pub const SIGNATURE_LEN: usize = 27;

impl ComponentSignature {
    fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.edges
            .iter()
            .chain(&self.skew)
            .chain(&self.face_diag)
            .chain(&self.body_diag)
            .chain(&self.face_area)
            .chain(&self.body_area)
            .copied()
    }

    pub fn all_rational_except_volume(&self) -> bool {
        self.bits().all(|b| b)
    }
}

/// 26 `'0'/'1'` characters in slot order, then the volume character
/// (`'-'` zero, `'0'` irrational, `'1'` rational).
impl fmt::Display for ComponentSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).chain([self.volume.as_char()]).collect();
        f.write_str(&s)
    }
}

impl FromStr for ComponentSignature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != SIGNATURE_LEN {
            return Err(format!("signature must have {SIGNATURE_LEN} characters, got {}", chars.len()));
        }
        let mut bits = Vec::with_capacity(26);
        for &ch in &chars[..26] {
            bits.push(match ch {
                '0' => false,
                '1' => true,
                other => return Err(format!("bad signature character {other:?}")),
            });
        }
        let volume = match chars[26] {
            '-' => VolumeFlag::Zero,
            '0' => VolumeFlag::Irrational,
            '1' => VolumeFlag::Rational,
            other => return Err(format!("bad volume character {other:?}")),
        };
        Ok(ComponentSignature {
            edges: bits[0..3].try_into().unwrap(),
            skew: bits[3..7].try_into().unwrap(),
            face_diag: bits[7..13].try_into().unwrap(),
            body_diag: bits[13..17].try_into().unwrap(),
            face_area: bits[17..20].try_into().unwrap(),
            body_area: bits[20..26].try_into().unwrap(),
            volume,
        })
    }
}

/// Per-group counts of rational checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CategoryKey {
    pub skew: u8,
    pub face_diag: u8,
    pub body_diag: u8,
    pub face_area: u8,
    pub body_area: u8,
    pub volume: VolumeFlag,
}

impl CategoryKey {
    pub fn to_array(&self) -> [i8; 6] {
        [
            self.skew as i8,
            self.face_diag as i8,
            self.body_diag as i8,
            self.face_area as i8,
            self.body_area as i8,
            self.volume.as_i8(),
        ]
    }

    pub fn from_array(v: [i8; 6]) -> Option<Self> {
        let count = |x: i8, max: i8| (0..=max).contains(&x).then_some(x as u8);
        Some(CategoryKey {
            skew: count(v[0], 4)?,
            face_diag: count(v[1], 6)?,
            body_diag: count(v[2], 4)?,
            face_area: count(v[3], 3)?,
            body_area: count(v[4], 6)?,
            volume: VolumeFlag::from_i8(v[5])?,
        })
    }
}

impl fmt::Display for CategoryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e, v] = self.to_array();
        write!(f, "{a}/{b}/{c}/{d}/{e}/{v}")
    }
}

impl Serialize for CategoryKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CategoryKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[i8; 6]>::deserialize(d)?;
        CategoryKey::from_array(v).ok_or_else(|| serde::de::Error::custom(format!("category {v:?} out of range")))
    }
}

pub fn compute_signature(s: &EdgeSextuple) -> Result<ComponentSignature, GeometryError> {
    let g = gram_from_edges(s)?;
    Ok(ComponentValues::of(&g)?.signature())
}

pub fn category_of(sig: &ComponentSignature) -> CategoryKey {
    let count = |xs: &[bool]| xs.iter().filter(|&&b| b).count() as u8;
    CategoryKey {
        skew: count(&sig.skew),
        face_diag: count(&sig.face_diag),
        body_diag: count(&sig.body_diag),
        face_area: count(&sig.face_area),
        body_area: count(&sig.body_area),
        volume: sig.volume,
    }
}

/// All six face diagonals and all four body diagonals rational.
pub fn is_perfect(sig: &ComponentSignature) -> bool {
    sig.face_diag.iter().all(|&b| b) && sig.body_diag.iter().all(|&b| b)
}

/// Largest edge accepted by [`analyze_small`]; keeps every intermediate in i128.
pub const SMALL_EDGE_LIMIT: u64 = 1 << 16;

/// Signature, surface-angle signs and `8·det G`, computed in fixed width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallAnalysis {
    pub signature: ComponentSignature,
    pub signs: [i8; 3],
    pub det_twice: i128,
}

/// Fixed-width twin of [`compute_signature`] for edges below
/// [`SMALL_EDGE_LIMIT`]. Works on `H = 2G`, which is integral: a squared
/// length `n/2` is a rational square iff `2n` is a square, a squared area
/// `N/4` iff `N` is, and `det G = det H / 8` iff `2 det H` is. `None` when
/// an edge is too large or the edges admit no real tetrahedron.
pub fn analyze_small(s: &EdgeSextuple) -> Option<SmallAnalysis> {
    let e = s.to_array();
    if e.iter().any(|&x| x >= SMALL_EDGE_LIMIT) {
        return None;
    }
    let [a, b, c, d, ee, f] = e.map(|x| x as i128 * x as i128);
    let h = [[2 * a, a + c - b, a + ee - d], [a + c - b, 2 * c, c + ee - f], [a + ee - d, c + ee - f, 2 * ee]];
    let bil = |x: Coeffs, y: Coeffs| -> i128 {
        let mut acc = 0i128;
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] as i128 * h[i][j] * y[j] as i128;
            }
        }
        acc
    };
    let sq_flag = |n: i128| n >= 0 && is_perfect_square_u128(n as u128);
    let len = |x: Coeffs| sq_flag(2 * bil(x, x));
    let area = |x: Coeffs, y: Coeffs| sq_flag(bil(x, x) * bil(y, y) - bil(x, y) * bil(x, y));
    let det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
        + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    if det < 0 {
        return None;
    }
    let volume = if det == 0 {
        VolumeFlag::Zero
    } else if sq_flag(2 * det) {
        VolumeFlag::Rational
    } else {
        VolumeFlag::Irrational
    };
    let skew = SKEW_TRIANGLES.map(|[p, q, r]| {
        let (p, q, r) = (vertex(p), vertex(q), vertex(r));
        area(coeff_sub(q, p), coeff_sub(r, p))
    });
    let signature = ComponentSignature {
        edges: [true; 3],
        skew,
        face_diag: FACE_DIAGONALS.map(len),
        body_diag: BODY_DIAGONALS.map(len),
        face_area: FACE_AREAS.map(|(x, y)| area(x, y)),
        body_area: BODY_AREAS.map(|(x, y)| area(x, y)),
        volume,
    };
    let signs = [h[0][1].signum() as i8, h[0][2].signum() as i8, h[1][2].signum() as i8];
    Some(SmallAnalysis { signature, signs, det_twice: det })
}
