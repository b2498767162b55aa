//! Tetrahedron edges to exact Gram form, and every length, area and volume
//! of the spanned parallelepiped.
//!
//! Convention: basis vectors `u, v, w` have lengths `a, c, e`. Edge `b`
//! closes the `(u, v)` face, `d` closes `(u, w)` and `f` closes `(v, w)`,
//! so `b = |u − v|`, `d = |u − w|`, `f = |v − w|`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;

/// Integer coefficients of `u, v, w`.
pub type Coeffs = [i64; 3];

/// Piped vertex `v1..v8` as coefficients of `(u, v, w)`; index 0 is `v1`.
pub const VERTEX_COEFFS: [Coeffs; 8] =
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]];

/// F1234, F5678, F1256, F3478, F1357, F2468 (1-based vertex labels).
pub const FACE_PARALLELOGRAMS: [[usize; 4]; 6] =
    [[1, 2, 3, 4], [5, 6, 7, 8], [1, 2, 5, 6], [3, 4, 7, 8], [1, 3, 5, 7], [2, 4, 6, 8]];

/// B1278, B1368, B1458, B2367, B2457, B3456.
pub const BODY_PARALLELOGRAMS: [[usize; 4]; 6] =
    [[1, 2, 7, 8], [1, 3, 6, 8], [1, 4, 5, 8], [2, 3, 6, 7], [2, 4, 5, 7], [3, 4, 5, 6]];

/// The four checked skew triangles and their congruent partners.
pub const SKEW_TRIANGLES: [[usize; 3]; 4] = [[1, 4, 6], [1, 4, 7], [1, 6, 7], [4, 6, 7]];
pub const SKEW_PARTNERS: [[usize; 3]; 4] = [[8, 5, 3], [8, 5, 2], [8, 3, 2], [5, 3, 2]];

pub fn vertex(label: usize) -> Coeffs {
    VERTEX_COEFFS[label - 1]
}

pub fn coeff_sub(p: Coeffs, q: Coeffs) -> Coeffs {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    /// sides `a, c`, closing edge `b`
    Uv,
    /// sides `a, e`, closing edge `d`
    Uw,
    /// sides `c, e`, closing edge `f`
    Vw,
}

impl Face {
    pub const ALL: [Face; 3] = [Face::Uv, Face::Uw, Face::Vw];

    /// `(side, side, closing edge)` of this face.
    pub fn sides(self, s: &EdgeSextuple) -> (u64, u64, u64) {
        match self {
            Face::Uv => (s.a, s.c, s.b),
            Face::Uw => (s.a, s.e, s.d),
            Face::Vw => (s.c, s.e, s.f),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Face::Uv => "(a,c,b)",
            Face::Uw => "(a,e,d)",
            Face::Vw => "(c,e,f)",
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("edge lengths must be positive integers")]
    NonPositiveEdge,
    #[error("invalid tetrahedron: face {face} = ({}, {}, {}) violates the triangle inequality", .sides.0, .sides.1, .sides.2)]
    InvalidTetrahedron { face: Face, sides: (u64, u64, u64) },
    #[error("negative Gram determinant {0}")]
    NegativeVolume(String),
    #[error("embedding disagrees with Gram distances (relative error {0:e})")]
    EmbeddingMismatch(f64),
}

/// Six positive integer tetrahedron edges `(a, b, c, d, e, f)`.
///
/// Ordering is lexicographic on `(a, b, c, d, e, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSextuple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub e: u64,
    pub f: u64,
}

impl EdgeSextuple {
    pub fn new(a: u64, b: u64, c: u64, d: u64, e: u64, f: u64) -> Result<Self, GeometryError> {
        let s = EdgeSextuple { a, b, c, d, e, f };
        s.validate()?;
        Ok(s)
    }

    pub fn from_array(edges: [u64; 6]) -> Result<Self, GeometryError> {
        let [a, b, c, d, e, f] = edges;
        Self::new(a, b, c, d, e, f)
    }

    pub(crate) fn from_array_unchecked(edges: [u64; 6]) -> Self {
        let [a, b, c, d, e, f] = edges;
        EdgeSextuple { a, b, c, d, e, f }
    }

    pub fn to_array(&self) -> [u64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    /// Positivity plus the non-strict triangle inequality on all three faces.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.to_array().contains(&0) {
            return Err(GeometryError::NonPositiveEdge);
        }
        for face in Face::ALL {
            let (x, y, z) = face.sides(self);
            if !triangle_ok(x, y, z) {
                return Err(GeometryError::InvalidTetrahedron { face, sides: (x, y, z) });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: u64) -> Self {
        EdgeSextuple::from_array_unchecked(self.to_array().map(|x| x * k))
    }
}

impl fmt::Display for EdgeSextuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{},{})", self.a, self.b, self.c, self.d, self.e, self.f)
    }
}

/// Non-strict triangle inequality, overflow free.
pub fn triangle_ok(x: u64, y: u64, z: u64) -> bool {
    let (x, y, z) = (x as u128, y as u128, z as u128);
    x <= y + z && y <= x + z && z <= x + y
}

/// Exact dot products of the basis vectors.
///
/// The public entries are the rational Gram entries; internally the doubled
/// matrix `2G` is kept in integers, which is what the hot paths evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    pub guu: Rational,
    pub gvv: Rational,
    pub gww: Rational,
    pub guv: Rational,
    pub guw: Rational,
    pub gvw: Rational,
    twice: [[BigInt; 3]; 3],
}

impl GramMatrix {
    /// Builds the Gram matrix from the doubled integer matrix `2G`
    /// given as `(2guu, 2gvv, 2gww, 2guv, 2guw, 2gvw)`.
    fn from_twice(tuu: BigInt, tvv: BigInt, tww: BigInt, tuv: BigInt, tuw: BigInt, tvw: BigInt) -> Self {
        let half = |x: &BigInt| Rational::new(x.clone(), BigInt::from(2));
        GramMatrix {
            guu: half(&tuu),
            gvv: half(&tvv),
            gww: half(&tww),
            guv: half(&tuv),
            guw: half(&tuw),
            gvw: half(&tvw),
            twice: [[tuu, tuv.clone(), tuw.clone()], [tuv, tvv, tvw.clone()], [tuw, tvw, tww]],
        }
    }

    /// `xᵀ(2G)y`, i.e. twice the dot product of the two combinations.
    pub(crate) fn bilinear_twice(&self, x: Coeffs, y: Coeffs) -> BigInt {
        let mut acc = BigInt::zero();
        for (xi, h_row) in x.iter().zip(&self.twice) {
            if *xi == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for (yj, h) in y.iter().zip(h_row) {
                if *yj != 0 {
                    row += h * *yj;
                }
            }
            acc += row * *xi;
        }
        acc
    }

    /// `4(|x|²|y|² − (x·y)²)`: four times the squared parallelogram area.
    pub(crate) fn area_twice_sq(&self, x: Coeffs, y: Coeffs) -> BigInt {
        let xx = self.bilinear_twice(x, x);
        let yy = self.bilinear_twice(y, y);
        let xy = self.bilinear_twice(x, y);
        xx * yy - &xy * &xy
    }

    /// `det(2G) = 8 det G`.
    pub(crate) fn det_twice(&self) -> BigInt {
        let m = &self.twice;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn entries(&self) -> [[Rational; 3]; 3] {
        [
            [self.guu.clone(), self.guv.clone(), self.guw.clone()],
            [self.guv.clone(), self.gvv.clone(), self.gvw.clone()],
            [self.guw.clone(), self.gvw.clone(), self.gww.clone()],
        ]
    }
}

pub fn gram_from_edges(s: &EdgeSextuple) -> Result<GramMatrix, GeometryError> {
    s.validate()?;
    let sq = |x: u64| BigInt::from(x) * BigInt::from(x);
    let (a2, b2, c2, d2, e2, f2) = (sq(s.a), sq(s.b), sq(s.c), sq(s.d), sq(s.e), sq(s.f));
    let tuv = &a2 + &c2 - &b2;
    let tuw = &a2 + &e2 - &d2;
    let tvw = &c2 + &e2 - &f2;
    Ok(GramMatrix::from_twice(a2 * 2, c2 * 2, e2 * 2, tuv, tuw, tvw))
}

/// `|i·u + j·v + k·w|²`.
pub fn squared_length(g: &GramMatrix, coeffs: Coeffs) -> Rational {
    Rational::new(g.bilinear_twice(coeffs, coeffs), BigInt::from(2))
}

/// Squared area of the parallelogram spanned by the combinations `x` and `y`.
/// The triangle on the same two edges has a quarter of this.
pub fn squared_parallelogram_area(g: &GramMatrix, x: Coeffs, y: Coeffs) -> Rational {
    Rational::new(g.area_twice_sq(x, y), BigInt::from(4))
}

/// `det G`, the squared piped volume; zero exactly for flat configurations.
pub fn volume_squared(g: &GramMatrix) -> Result<Rational, GeometryError> {
    let d = g.det_twice();
    if d.is_negative() {
        return Err(GeometryError::NegativeVolume(d.to_string()));
    }
    Ok(Rational::new(d, BigInt::from(8)))
}

/// Floating-point vertices of the tetrahedron: `v1` at the origin, `v2` on
/// the x axis, `v3` in the xy plane with `y ≥ 0`, `v4` with `z ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateEmbedding {
    pub tetra: [[f64; 3]; 4],
}

pub const EMBEDDING_TOLERANCE: f64 = 1e-9;

impl CoordinateEmbedding {
    pub fn basis(&self) -> [[f64; 3]; 3] {
        [self.tetra[1], self.tetra[2], self.tetra[3]]
    }

    /// All 8 piped vertices in `VERTEX_COEFFS` order.
    pub fn piped_vertices(&self) -> [[f64; 3]; 8] {
        let basis = self.basis();
        VERTEX_COEFFS.map(|c| {
            let mut p = [0.0; 3];
            for (k, coeff) in c.iter().enumerate() {
                for (axis, p_axis) in p.iter_mut().enumerate() {
                    *p_axis += *coeff as f64 * basis[k][axis];
                }
            }
            p
        })
    }

    /// Worst relative error over the 28 vertex pairs against exact Gram distances.
    pub fn max_relative_error(&self, g: &GramMatrix) -> f64 {
        let pts = self.piped_vertices();
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                let exact = to_f64(&squared_length(g, coeff_sub(VERTEX_COEFFS[j], VERTEX_COEFFS[i])));
                let emb: f64 = (0..3).map(|k| (pts[j][k] - pts[i][k]).powi(2)).sum();
                // nonzero exact squared lengths are at least 1/2
                worst = worst.max((emb - exact).abs() / exact.max(0.5));
            }
        }
        worst
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Places the tetrahedron in R³, taking the `+z` root.
pub fn embed_coordinates(s: &EdgeSextuple) -> Result<CoordinateEmbedding, GeometryError> {
    let g = gram_from_edges(s)?;
    let a = s.a as f64;
    let x3 = to_f64(&g.guv) / a;
    let x4 = to_f64(&g.guw) / a;
    // squared area of the (u, v) face parallelogram, and of the whole piped
    let face_sq = squared_parallelogram_area(&g, [1, 0, 0], [0, 1, 0]);
    let vol_sq = volume_squared(&g)?;
    let (y3, y4, z4) = if face_sq.is_zero() {
        // v3 on the x axis: place v4 in the xy plane
        let y4 = (to_f64(&g.gww) - x4 * x4).max(0.0).sqrt();
        (0.0, y4, 0.0)
    } else {
        let face = to_f64(&face_sq).sqrt();
        let y3 = face / a;
        // y4·s3 = gvw − guv·guw/a²
        let num = &g.gvw * &g.guu - &g.guv * &g.guw;
        let y4 = to_f64(&num) / (a * face);
        let z4 = to_f64(&(vol_sq / face_sq)).sqrt();
        (y3, y4, z4)
    };
    let emb = CoordinateEmbedding { tetra: [[0.0; 3], [a, 0.0, 0.0], [x3, y3, 0.0], [x4, y4, z4]] };
    let err = emb.max_relative_error(&g);
    if err.is_nan() || err > EMBEDDING_TOLERANCE {
        return Err(GeometryError::EmbeddingMismatch(err));
    }
    Ok(emb)
}
