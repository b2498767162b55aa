//! Integer parameterizations: Heron triangles from `(m, n, p, q)` and
//! parallelograms with two rational diagonals from `(k, m, n, p, q)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{int, Rational};
use crate::polygon::{heron_area_squared, ParallelogramSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("parameters give a zero or degenerate value: {0:?}")]
    Degenerate(Vec<i128>),
    #[error("values {0:?} violate the triangle inequality")]
    NotATriangle([u64; 3]),
    #[error("sides ({a}, {b}) with diagonals ({c}, {d}) form no parallelogram")]
    NotAParallelogram { a: u64, b: u64, c: u64, d: u64 },
    #[error("generated value {0} does not fit in 64 bits")]
    Overflow(i128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeronParams {
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub q: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WyssParams {
    pub k: i64,
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub q: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeronTriangle {
    pub sides: [u64; 3],
    pub area_squared: Rational,
}

/// Raw side values, signs and all.
pub fn heron_raw(hp: HeronParams) -> [i128; 3] {
    let (m, n, p, q) = (hp.m as i128, hp.n as i128, hp.p as i128, hp.q as i128);
    [m * n * (p * p + q * q), p * q * (m * m + n * n), p * q * (n * n - m * m) + m * n * (q * q - p * p)]
}

/// `|mnpq(mq+np)(nq−mp)|`, the area that actually matches Heron's formula.
pub fn heron_area_law(hp: HeronParams) -> i128 {
    let (m, n, p, q) = (hp.m as i128, hp.n as i128, hp.p as i128, hp.q as i128);
    (m * n * p * q * (m * q + n * p) * (n * q - m * p)).abs()
}

/// The printed area expression, four times [`heron_area_law`].
pub fn heron_area_printed(hp: HeronParams) -> i128 {
    4 * heron_area_law(hp)
}

fn to_u64(x: i128) -> Result<u64, ParamError> {
    u64::try_from(x).map_err(|_| ParamError::Overflow(x))
}

/// Sides from the parameters, with the area recomputed by Heron's formula.
/// Nonpositive sides and flat triangles are out of domain.
pub fn heron_triangle(hp: HeronParams) -> Result<HeronTriangle, ParamError> {
    let raw = heron_raw(hp);
    if raw.iter().any(|&x| x <= 0) {
        return Err(ParamError::Degenerate(raw.to_vec()));
    }
    let sides = [to_u64(raw[0])?, to_u64(raw[1])?, to_u64(raw[2])?];
    let [a, b, c] = sides.map(|x| x as u128);
    if a >= b + c || b >= a + c || c >= a + b {
        return Err(ParamError::NotATriangle(sides));
    }
    let area_squared = heron_area_squared(sides[0], sides[1], sides[2]).expect("strict inequality checked");
    Ok(HeronTriangle { sides, area_squared })
}

/// Raw `(a, b, c, d)`: sides then diagonals.
pub fn wyss_raw(wp: WyssParams) -> [i128; 4] {
    let (k, m, n, p, q) = (wp.k as i128, wp.m as i128, wp.n as i128, wp.p as i128, wp.q as i128);
    [k * (n * q - m * p), k * (m * q + n * p), k * (p * (m - n) + q * (m + n)), k * (p * (n + m) + q * (n - m))]
}

/// The generated parallelogram with `diag1 = c`. Values are taken in
/// absolute value; zeros and impossible shapes are rejected.
pub fn wyss_parallelogram(wp: WyssParams) -> Result<ParallelogramSpec, ParamError> {
    let raw = wyss_raw(wp);
    if raw.contains(&0) {
        return Err(ParamError::Degenerate(raw.to_vec()));
    }
    let [a, b, c, d] = [to_u64(raw[0].abs())?, to_u64(raw[1].abs())?, to_u64(raw[2].abs())?, to_u64(raw[3].abs())?];
    let lo = a.abs_diff(b);
    let hi = a as u128 + b as u128;
    if c.min(d) <= lo || c.max(d) as u128 >= hi {
        return Err(ParamError::NotAParallelogram { a, b, c, d });
    }
    let spec = ParallelogramSpec::new(a, b, c).map_err(|_| ParamError::NotAParallelogram { a, b, c, d })?;
    debug_assert_eq!(spec.diag2_squared, int(d as u128 * d as u128));
    Ok(spec)
}
