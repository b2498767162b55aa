//! Five-class scheme by the signs of the three surface-angle cosines at the
//! spanning vertex, and the vertex-group enumeration that justifies it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::geometry::GramMatrix;

/// Signs of `(guv, guw, gvw)`, each in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(pub [i8; 3]);

impl SignVector {
    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&s| s == 0).count()
    }

    pub fn negatives(&self) -> usize {
        self.0.iter().filter(|&&s| s < 0).count()
    }

    /// All 27 sign triples in lexicographic order.
    pub fn all() -> impl Iterator<Item = SignVector> {
        (0..27).map(|i| SignVector([(i / 9) as i8 - 1, ((i / 3) % 3) as i8 - 1, (i % 3) as i8 - 1]))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PipedClass {
    #[serde(rename = "acute")]
    AcuteTriclinic,
    #[serde(rename = "obtuse")]
    ObtuseTriclinic,
    #[serde(rename = "1-ortho")]
    MonoOrthoBiclinic,
    #[serde(rename = "2-ortho")]
    BiOrthoMonoclinic,
    #[serde(rename = "rectangular")]
    Rectangular,
}

impl PipedClass {
    pub const ALL: [PipedClass; 5] = [
        PipedClass::AcuteTriclinic,
        PipedClass::ObtuseTriclinic,
        PipedClass::MonoOrthoBiclinic,
        PipedClass::BiOrthoMonoclinic,
        PipedClass::Rectangular,
    ];

    /// Short serialized name.
    pub fn as_str(self) -> &'static str {
        match self {
            PipedClass::AcuteTriclinic => "acute",
            PipedClass::ObtuseTriclinic => "obtuse",
            PipedClass::MonoOrthoBiclinic => "1-ortho",
            PipedClass::BiOrthoMonoclinic => "2-ortho",
            PipedClass::Rectangular => "rectangular",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            PipedClass::AcuteTriclinic => "acute triclinic",
            PipedClass::ObtuseTriclinic => "obtuse triclinic",
            PipedClass::MonoOrthoBiclinic => "1-ortho biclinic",
            PipedClass::BiOrthoMonoclinic => "2-ortho monoclinic",
            PipedClass::Rectangular => "rectangular",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PipedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PipedClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "acute" => Ok(PipedClass::AcuteTriclinic),
            "obtuse" => Ok(PipedClass::ObtuseTriclinic),
            "1-ortho" => Ok(PipedClass::MonoOrthoBiclinic),
            "2-ortho" => Ok(PipedClass::BiOrthoMonoclinic),
            "rectangular" => Ok(PipedClass::Rectangular),
            other => Err(format!("unknown class {other:?}")),
        }
    }
}

pub fn sign_vector(g: &GramMatrix) -> SignVector {
    let sign = |q: &crate::exactnum::Rational| -> i8 {
        if q.is_positive() {
            1
        } else if q.is_negative() {
            -1
        } else {
            0
        }
    };
    SignVector([sign(&g.guv), sign(&g.guw), sign(&g.gvw)])
}

/// Closed form: count right angles, and split the triclinic case by the
/// parity of the obtuse angles.
pub fn classify(sv: SignVector) -> PipedClass {
    match sv.zeros() {
        3 => PipedClass::Rectangular,
        2 => PipedClass::BiOrthoMonoclinic,
        1 => PipedClass::MonoOrthoBiclinic,
        _ if sv.negatives().is_multiple_of(2) => PipedClass::AcuteTriclinic,
        _ => PipedClass::ObtuseTriclinic,
    }
}

/// Sorted sign triples seen at the eight vertices.
pub type VertexGroup = BTreeSet<[i8; 3]>;

/// For each vertex `v1..v8`, its three surface angles as `(angle at v1, supplement?)`.
/// Angle 0 is `v2 v1 v3` (u, v), 1 is `v2 v1 v5` (u, w), 2 is `v3 v1 v5` (v, w).
const VERTEX_ANGLES: [[(usize, bool); 3]; 8] = [
    [(0, false), (1, false), (2, false)],
    [(0, true), (1, true), (2, false)],
    [(0, true), (2, true), (1, false)],
    [(0, false), (2, true), (1, true)],
    [(1, true), (2, true), (0, false)],
    [(1, false), (2, true), (0, true)],
    [(2, false), (1, true), (0, true)],
    [(2, false), (1, false), (0, false)],
];

pub fn vertex_groups(sv: SignVector) -> VertexGroup {
    VERTEX_ANGLES
        .iter()
        .map(|angles| {
            let mut t = angles.map(|(k, supplement)| if supplement { -sv.0[k] } else { sv.0[k] });
            t.sort_unstable();
            t
        })
        .collect()
}

/// The 27 sign triples and the vertex group each one generates.
pub fn enumerate_appendix_a() -> BTreeMap<SignVector, VertexGroup> {
    SignVector::all().map(|sv| (sv, vertex_groups(sv))).collect()
}

/// The five distinct groups with the class their members receive.
pub fn class_groups() -> BTreeMap<VertexGroup, BTreeSet<PipedClass>> {
    let mut out: BTreeMap<VertexGroup, BTreeSet<PipedClass>> = BTreeMap::new();
    for (sv, group) in enumerate_appendix_a() {
        out.entry(group).or_default().insert(classify(sv));
    }
    out
}
