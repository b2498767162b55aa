//! Fixture tables of published example pipeds and parallelograms, and the
//! regression check that runs every row through the analyzer.
//!
//! Blank cells mean "no expectation". The two fixture files ship inside the
//! crate; [`load_fixtures`] also accepts any file in the same format.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;
use thiserror::Error;

use crate::classify::{classify, sign_vector, PipedClass};
use crate::exactnum::sqrt_rational;
use crate::geometry::{gram_from_edges, volume_squared, EdgeSextuple};
use crate::signature::{category_of, is_perfect, CategoryKey, ComponentValues};

pub const PIPEDS_CSV: &str = include_str!("../fixtures/pipeds.csv");
pub const PARALLELOGRAMS_CSV: &str = include_str!("../fixtures/parallelograms.csv");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("reading fixtures: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureRow {
    pub line: u64,
    pub source: String,
    pub edges: [u64; 6],
    pub class: Option<PipedClass>,
    pub counts: Option<CategoryKey>,
    /// Exact volume, when the source states one.
    pub volume: Option<BigInt>,
    pub perfect: Option<bool>,
    /// Whether the edges bound a tetrahedron of positive volume. Blank
    /// means yes.
    pub solid: Option<bool>,
}

impl FixtureRow {
    /// Rows with no signature expectation, checked for solidity only.
    pub fn validity_only(&self) -> bool {
        self.class.is_none() && self.counts.is_none() && self.volume.is_none() && self.perfect.is_none()
    }
}

#[derive(Debug, Deserialize)]
struct RawPiped {
    source: String,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    e: u64,
    f: u64,
    class: Option<String>,
    skew: Option<i8>,
    face: Option<i8>,
    body: Option<i8>,
    farea: Option<i8>,
    barea: Option<i8>,
    vol: Option<i8>,
    volume: Option<String>,
    perfect: Option<bool>,
    #[serde(default)]
    solid: Option<bool>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes())
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(e: csv::Error) -> CorpusError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    CorpusError::Parse { line, msg: e.to_string() }
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>, CorpusError> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        let raw: RawPiped =
            rec.deserialize(Some(&headers)).map_err(|e| CorpusError::Parse { line, msg: e.to_string() })?;
        let err = |msg: String| CorpusError::Parse { line, msg };
        let class = match raw.class.as_deref() {
            None | Some("") => None,
            Some(name) => Some(name.parse::<PipedClass>().map_err(err)?),
        };
        let groups = [raw.skew, raw.face, raw.body, raw.farea, raw.barea, raw.vol];
        let counts = match groups {
            [None, None, None, None, None, None] => None,
            [Some(s), Some(f), Some(b), Some(fa), Some(ba), Some(v)] => Some(
                CategoryKey::from_array([s, f, b, fa, ba, v])
                    .ok_or_else(|| err(format!("group counts {groups:?} out of range")))?,
            ),
            _ => return Err(err("group counts must be all present or all blank".into())),
        };
        let volume = match raw.volume.as_deref() {
            None | Some("") => None,
            Some(v) => Some(v.parse::<BigInt>().map_err(|e| err(format!("volume {v:?}: {e}")))?),
        };
        out.push(FixtureRow {
            line,
            source: raw.source,
            edges: [raw.a, raw.b, raw.c, raw.d, raw.e, raw.f],
            class,
            counts,
            volume,
            perfect: raw.perfect,
            solid: raw.solid,
        });
    }
    Ok(out)
}

pub fn load_fixtures(path: impl AsRef<Path>) -> Result<Vec<FixtureRow>, CorpusError> {
    parse_fixtures(&std::fs::read_to_string(path)?)
}

/// The shipped piped fixtures.
pub fn builtin_fixtures() -> Vec<FixtureRow> {
    parse_fixtures(PIPEDS_CSV).expect("shipped fixture file parses")
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ParallelogramFixture {
    #[serde(skip)]
    pub line: u64,
    pub source: String,
    pub a: u64,
    pub b: u64,
    pub d1: u64,
    pub d2: u64,
}

pub fn parse_parallelogram_fixtures(text: &str) -> Result<Vec<ParallelogramFixture>, CorpusError> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        let mut row: ParallelogramFixture =
            rec.deserialize(Some(&headers)).map_err(|e| CorpusError::Parse { line, msg: e.to_string() })?;
        row.line = line;
        out.push(row);
    }
    Ok(out)
}

pub fn builtin_parallelograms() -> Vec<ParallelogramFixture> {
    parse_parallelogram_fixtures(PARALLELOGRAMS_CSV).expect("shipped fixture file parses")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowResult {
    pub line: u64,
    pub source: String,
    pub edges: [u64; 6],
    /// Empty when the row passed.
    pub failures: Vec<String>,
}

impl RowResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for RowResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.edges;
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} line {} {} ({},{},{},{},{},{})",
            self.line, self.source, e[0], e[1], e[2], e[3], e[4], e[5]
        )?;
        if !self.passed() {
            write!(f, ": {}", self.failures.join("; "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusReport {
    pub rows: Vec<RowResult>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(RowResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RowResult> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

fn check_row(row: &FixtureRow) -> Vec<String> {
    let mut fails = Vec::new();
    let s = match EdgeSextuple::from_array(row.edges) {
        Ok(s) => s,
        Err(e) => return vec![e.to_string()],
    };
    let g = match gram_from_edges(&s) {
        Ok(g) => g,
        Err(e) => return vec![e.to_string()],
    };
    let want_solid = row.solid.unwrap_or(true);
    let vol2 = match volume_squared(&g) {
        Ok(v) => v,
        Err(_) if !want_solid => return fails,
        Err(e) => return vec![e.to_string()],
    };
    if !want_solid {
        return vec![format!("edges bound a real tetrahedron (volume squared {vol2}), expected none")];
    }
    if row.validity_only() {
        if vol2 == num_traits::Zero::zero() {
            fails.push("flat tetrahedron".into());
        }
        return fails;
    }
    let values = ComponentValues::of(&g).expect("volume already checked");
    let sig = values.signature();
    if let Some(want) = row.class {
        let got = classify(sign_vector(&g));
        if got != want {
            fails.push(format!("class {got}, expected {want}"));
        }
    }
    if let Some(want) = row.counts {
        let got = category_of(&sig);
        if got != want {
            fails.push(format!("group counts {got}, expected {want}"));
        }
    }
    if let Some(want) = row.perfect {
        let got = is_perfect(&sig);
        if got != want {
            fails.push(format!("perfect {got}, expected {want}"));
        }
    }
    if let Some(want) = &row.volume {
        match sqrt_rational(&vol2) {
            Ok(Some(v)) if v.is_integer() && v.numer() == want => {}
            Ok(Some(v)) => fails.push(format!("volume {v}, expected {want}")),
            _ => fails.push(format!("volume irrational (squared {vol2}), expected {want}")),
        }
    }
    fails
}

/// Runs every row through the analyzer and compares each stated expectation.
pub fn verify_corpus(rows: &[FixtureRow]) -> CorpusReport {
    CorpusReport {
        rows: rows
            .iter()
            .map(|row| RowResult {
                line: row.line,
                source: row.source.clone(),
                edges: row.edges,
                failures: check_row(row),
            })
            .collect(),
    }
}
