//! Bounded survey: glue three integer parallelograms with matching sides
//! into tetrahedra, reduce each to its family's canonical form, and tally
//! signatures.
//!
//! Work is cut by the smallest basis length `A`. Every family's canonical
//! form starts with `A`, since the basis multiset is a family invariant, so
//! chunks of consecutive `A` values never share a family and can be
//! deduplicated and written independently, in order.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify, sign_vector, PipedClass, SignVector};
use crate::exactnum::{exact_sqrt_u128, to_decimal_string, Rational};
use crate::family::canonical_form;
use crate::geometry::{gram_from_edges, volume_squared, EdgeSextuple};
use crate::signature::{analyze_small, category_of, is_perfect, CategoryKey, ComponentValues, VolumeFlag};

pub use crate::corpus::{verify_corpus, CorpusReport};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: PathBuf, msg: String },
    #[error("invalid search config: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SearchError + '_ {
    move |source| SearchError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchFilter {
    pub class: Option<PipedClass>,
    pub perfect_only: bool,
    pub rational_volume_only: bool,
}

impl SearchFilter {
    pub fn admits(&self, rec: &SearchRecord) -> bool {
        self.class.is_none_or(|c| c == rec.class)
            && (!self.perfect_only || rec.perfect())
            && (!self.rational_volume_only || rec.vol_flag == VolumeFlag::Rational)
    }

    fn fingerprint(&self) -> String {
        format!(
            "class={},perfect={},ratvol={}",
            self.class.map(|c| c.as_str()).unwrap_or("any"),
            self.perfect_only as u8,
            self.rational_volume_only as u8
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Largest basis length considered.
    pub max_basis: u64,
    pub filter: SearchFilter,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Smallest-basis values processed per chunk; also the checkpoint cadence.
    pub checkpoint_interval: u64,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    /// Accept parallelograms whose diagonal equals `|x−y|` or `x+y`.
    pub allow_flat_faces: bool,
    /// Continue from `checkpoint_path` instead of starting over.
    pub resume: bool,
    /// Stop after this many chunks, leaving a checkpoint behind.
    #[serde(skip)]
    pub max_chunks: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_basis: 30,
            filter: SearchFilter::default(),
            workers: 0,
            checkpoint_interval: 8,
            checkpoint_path: None,
            output_path: None,
            allow_flat_faces: false,
            resume: false,
            max_chunks: None,
        }
    }
}

impl SearchConfig {
    pub fn new(max_basis: u64) -> Self {
        SearchConfig { max_basis, ..Default::default() }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.checkpoint_interval == 0 {
            return Err(SearchError::Config("checkpoint interval must be positive".into()));
        }
        if self.max_basis >= crate::signature::SMALL_EDGE_LIMIT / 2 {
            return Err(SearchError::Config(format!("max basis {} is beyond the supported range", self.max_basis)));
        }
        if self.resume && self.checkpoint_path.is_none() {
            return Err(SearchError::Config("resume needs a checkpoint path".into()));
        }
        Ok(())
    }

    fn fingerprint(&self) -> String {
        format!("{},flat={}", self.filter.fingerprint(), self.allow_flat_faces as u8)
    }
}

/// One canonical family representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub edges: [u64; 6],
    pub class: PipedClass,
    pub sig: String,
    pub vol_flag: VolumeFlag,
    /// Squared volume as a decimal string.
    pub vol2: String,
    pub category: CategoryKey,
}

impl SearchRecord {
    pub fn perfect(&self) -> bool {
        self.category.face_diag == 6 && self.category.body_diag == 4
    }

    pub fn sextuple(&self) -> EdgeSextuple {
        EdgeSextuple::from_array_unchecked(self.edges)
    }
}

/// Full analysis of one sextuple; `None` when the edges bound no real
/// tetrahedron (negative Gram determinant) or violate a face inequality.
pub fn analyze_record(s: &EdgeSextuple) -> Option<SearchRecord> {
    if let Some(small) = analyze_small(s) {
        return Some(SearchRecord {
            edges: s.to_array(),
            class: classify(SignVector(small.signs)),
            sig: small.signature.to_string(),
            vol_flag: small.signature.volume,
            vol2: to_decimal_string(&Rational::new(BigInt::from(small.det_twice), BigInt::from(8))),
            category: category_of(&small.signature),
        });
    }
    let g = gram_from_edges(s).ok()?;
    let vol2 = volume_squared(&g).ok()?;
    let sig = ComponentValues::of(&g).ok()?.signature();
    debug_assert_eq!(is_perfect(&sig), sig.face_diag.iter().all(|&b| b) && sig.body_diag.iter().all(|&b| b));
    Some(SearchRecord {
        edges: s.to_array(),
        class: classify(sign_vector(&g)),
        sig: sig.to_string(),
        vol_flag: sig.volume,
        vol2: to_decimal_string(&vol2),
        category: category_of(&sig),
    })
}

/// Gram determinant check in fixed width; valid for edges below 2^16.
fn is_realizable(s: &EdgeSextuple) -> bool {
    let [a, b, c, d, e, f] = s.to_array().map(|x| x as i128 * x as i128);
    let (p, q, r) = (a + c - b, a + e - d, c + e - f);
    let det = 8 * a * c * e + 2 * p * q * r - 2 * a * r * r - 2 * c * q * q - 2 * e * p * p;
    det >= 0
}

/// Whether all four body diagonals are integers. Face diagonals of an
/// assembled sextuple are integers by construction, so this decides
/// perfection without the full signature.
fn body_diagonals_integral(s: &EdgeSextuple) -> bool {
    let [a, b, c, d, e, f] = s.to_array().map(|x| x as i128 * x as i128);
    let (p, q, r) = (a + c - b, a + e - d, c + e - f);
    let base = a + c + e;
    [base + p + q + r, base - p - q + r, base - p + q - r, base + p - q - r]
        .iter()
        .all(|&n| n >= 0 && exact_sqrt_u128(n as u128).is_some())
}

/// Integer diagonals `z` of a parallelogram with sides `x, y` whose partner
/// `√(2(x²+y²) − z²)` is also a positive integer.
pub fn integer_diagonals(x: u64, y: u64, allow_flat: bool) -> Vec<u64> {
    let (lo, hi) = if allow_flat { (x.abs_diff(y).max(1), x + y) } else { (x.abs_diff(y) + 1, x + y - 1) };
    let sum = 2 * (x as u128 * x as u128 + y as u128 * y as u128);
    (lo..=hi)
        .filter(|&z| {
            let zz = z as u128 * z as u128;
            zz < sum && exact_sqrt_u128(sum - zz).is_some()
        })
        .collect()
}

struct DiagonalTable {
    max: u64,
    /// indexed by `x * (max + 1) + y` for `x ≤ y`
    lists: Vec<Vec<u64>>,
}

impl DiagonalTable {
    fn new(max: u64, allow_flat: bool) -> Self {
        let n = (max + 1) as usize;
        let lists = (0..n * n)
            .into_par_iter()
            .map(|i| {
                let (x, y) = ((i / n) as u64, (i % n) as u64);
                if x == 0 || x > y {
                    Vec::new()
                } else {
                    integer_diagonals(x, y, allow_flat)
                }
            })
            .collect();
        DiagonalTable { max, lists }
    }

    fn get(&self, x: u64, y: u64) -> &[u64] {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        &self.lists[(x * (self.max + 1) + y) as usize]
    }
}

/// Raw sextuples `(A, b, B, d, C, f)` for the basis pair `(A, B)` and every
/// `C ≥ B`. Unrealizable combinations are included; they drop out later.
fn pair_combinations<'a>(table: &'a DiagonalTable, a: u64, b: u64) -> impl Iterator<Item = EdgeSextuple> + 'a {
    let ab = table.get(a, b);
    (b..=table.max).flat_map(move |c| {
        let ac = table.get(a, c);
        let bc = table.get(b, c);
        ab.iter().flat_map(move |&x| {
            ac.iter()
                .flat_map(move |&y| bc.iter().map(move |&z| EdgeSextuple::from_array_unchecked([a, x, b, y, c, z])))
        })
    })
}

/// Every assembled sextuple with sorted basis lengths `A ≤ B ≤ C ≤ max_basis`,
/// before canonicalization. Only combinations that bound a real
/// tetrahedron (flat ones included) are yielded.
pub fn assemble_tetrahedrons(cfg: &SearchConfig) -> impl Iterator<Item = EdgeSextuple> {
    let table = DiagonalTable::new(cfg.max_basis, cfg.allow_flat_faces);
    let max = cfg.max_basis;
    (1..=max)
        .flat_map(move |a| (a..=max).map(move |b| (a, b)))
        .flat_map(move |(a, b)| pair_combinations(&table, a, b).collect::<Vec<_>>())
        .filter(is_realizable)
}

/// Canonical forms of all families whose smallest basis lies in `a_lo..=a_hi`, sorted.
fn chunk_families(table: &DiagonalTable, a_lo: u64, a_hi: u64) -> Vec<EdgeSextuple> {
    let max = table.max;
    let pairs: Vec<(u64, u64)> = (a_lo..=a_hi).flat_map(|a| (a..=max).map(move |b| (a, b))).collect();
    let mut forms: Vec<EdgeSextuple> = pairs
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            let mut v: Vec<EdgeSextuple> = pair_combinations(table, a, b).map(|s| canonical_form(&s)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    forms.par_sort_unstable();
    forms.dedup();
    forms
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyTally {
    /// Realizable families examined, before filtering.
    pub families: u64,
    /// Records emitted after filtering.
    pub records: u64,
    pub degenerate: u64,
    pub classes: BTreeMap<PipedClass, u64>,
    #[serde(with = "category_list")]
    pub categories: BTreeMap<CategoryKey, u64>,
}

mod category_list {
    use super::*;

    pub fn serialize<S: serde::Serializer>(m: &BTreeMap<CategoryKey, u64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<CategoryKey, u64>, D::Error> {
        Ok(Vec::<(CategoryKey, u64)>::deserialize(d)?.into_iter().collect())
    }
}

impl SurveyTally {
    fn add(&mut self, rec: &SearchRecord) {
        self.records += 1;
        if rec.vol_flag == VolumeFlag::Zero {
            self.degenerate += 1;
        }
        *self.classes.entry(rec.class).or_default() += 1;
        *self.categories.entry(rec.category).or_default() += 1;
    }

    pub fn class_count(&self, c: PipedClass) -> u64 {
        self.classes.get(&c).copied().unwrap_or(0)
    }

    pub const HISTOGRAM_HEADER: &'static str = "skew,face,body,farea,barea,vol,count";

    /// Category histogram as CSV, one row per key in key order.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from(Self::HISTOGRAM_HEADER);
        out.push('\n');
        for (k, n) in &self.categories {
            let [a, b, c, d, e, v] = k.to_array();
            out.push_str(&format!("{a},{b},{c},{d},{e},{v},{n}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyOutcome {
    pub tally: SurveyTally,
    /// Kept in memory only when no output path is configured.
    pub records: Vec<SearchRecord>,
    /// False when the run stopped early at `max_chunks`.
    pub completed: bool,
}

const CHECKPOINT_MAGIC: &str = "pipedlab-survey-checkpoint v1";

#[derive(Debug, Clone, PartialEq, Eq)]
struct Checkpoint {
    max_basis: u64,
    next_a: u64,
    bytes: u64,
    fingerprint: String,
    tally: SurveyTally,
}

impl Checkpoint {
    fn render(&self) -> String {
        format!(
            "{CHECKPOINT_MAGIC} max_basis={} next_a={} bytes={} filter={}\n{}\n",
            self.max_basis,
            self.next_a,
            self.bytes,
            self.fingerprint,
            serde_json::to_string(&self.tally).expect("tally serializes")
        )
    }

    fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let head = lines.next().ok_or("empty file")?;
        let rest = head.strip_prefix(CHECKPOINT_MAGIC).ok_or("not a survey checkpoint")?;
        let mut fields = BTreeMap::new();
        for part in rest.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("bad token {part:?}"))?;
            fields.insert(k, v);
        }
        let num = |k: &str| -> Result<u64, String> {
            fields.get(k).ok_or_else(|| format!("missing {k}"))?.parse().map_err(|e| format!("{k}: {e}"))
        };
        let tally =
            serde_json::from_str(lines.next().ok_or("missing tally line")?).map_err(|e| format!("tally: {e}"))?;
        Ok(Checkpoint {
            max_basis: num("max_basis")?,
            next_a: num("next_a")?,
            bytes: num("bytes")?,
            fingerprint: fields.get("filter").ok_or("missing filter")?.to_string(),
            tally,
        })
    }

    /// Write to a sibling temp file and rename, so a crash leaves either the
    /// old or the new checkpoint.
    fn store(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(self.render().as_bytes()).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }
}

fn load_checkpoint(cfg: &SearchConfig, path: &Path) -> Result<Checkpoint, SearchError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let cp = Checkpoint::parse(&text).map_err(|msg| SearchError::Checkpoint { path: path.to_path_buf(), msg })?;
    let mismatch = |msg: String| SearchError::Checkpoint { path: path.to_path_buf(), msg };
    if cp.max_basis != cfg.max_basis {
        return Err(mismatch(format!("written for max basis {}, not {}", cp.max_basis, cfg.max_basis)));
    }
    if cp.fingerprint != cfg.fingerprint() {
        return Err(mismatch(format!("written with filter {}, not {}", cp.fingerprint, cfg.fingerprint())));
    }
    Ok(cp)
}

fn open_output(path: &Path, keep_bytes: Option<u64>) -> Result<BufWriter<File>, SearchError> {
    let file = match keep_bytes {
        Some(n) => {
            let f = OpenOptions::new().write(true).open(path).map_err(io_err(path))?;
            let len = f.metadata().map_err(io_err(path))?.len();
            if len < n {
                return Err(SearchError::Checkpoint {
                    path: path.to_path_buf(),
                    msg: format!("record file has {len} bytes, checkpoint expects {n}"),
                });
            }
            // drop anything written after the last durable checkpoint
            f.set_len(n).map_err(io_err(path))?;
            let mut f = f;
            std::io::Seek::seek(&mut f, std::io::SeekFrom::End(0)).map_err(io_err(path))?;
            f
        }
        None => File::create(path).map_err(io_err(path))?,
    };
    Ok(BufWriter::new(file))
}

/// Runs the survey. Records go to `output_path` as JSON lines in canonical
/// order, or are returned in memory when no path is set.
pub fn run_survey(cfg: &SearchConfig) -> Result<SurveyOutcome, SearchError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.workers > 0 {
        builder = builder.num_threads(cfg.workers);
    }
    let pool = builder.build().map_err(|e| SearchError::Config(e.to_string()))?;
    pool.install(|| survey_in_pool(cfg))
}

fn survey_in_pool(cfg: &SearchConfig) -> Result<SurveyOutcome, SearchError> {
    let (mut next_a, mut tally, mut bytes) = (1u64, SurveyTally::default(), 0u64);
    if cfg.resume {
        let path = cfg.checkpoint_path.as_deref().expect("validated");
        let cp = load_checkpoint(cfg, path)?;
        (next_a, tally, bytes) = (cp.next_a, cp.tally, cp.bytes);
    }
    let mut writer = match &cfg.output_path {
        Some(p) => Some(open_output(p, cfg.resume.then_some(bytes))?),
        None => None,
    };
    let mut records = Vec::new();
    let table = DiagonalTable::new(cfg.max_basis, cfg.allow_flat_faces);
    let mut chunks = 0usize;

    while next_a <= cfg.max_basis {
        if cfg.max_chunks.is_some_and(|m| chunks >= m) {
            return Ok(SurveyOutcome { tally, records, completed: false });
        }
        let hi = (next_a + cfg.checkpoint_interval - 1).min(cfg.max_basis);
        let forms = chunk_families(&table, next_a, hi);
        let analyzed: Vec<Option<SearchRecord>> = forms
            .par_iter()
            .filter(|s| is_realizable(s))
            .map(|s| (!cfg.filter.perfect_only || body_diagonals_integral(s)).then(|| analyze_record(s)).flatten())
            .collect();
        tally.families += analyzed.len() as u64;
        for rec in analyzed.into_iter().flatten().filter(|r| cfg.filter.admits(r)) {
            tally.add(&rec);
            match writer.as_mut() {
                Some(w) => {
                    let line = serde_json::to_string(&rec).expect("record serializes");
                    let path = cfg.output_path.as_deref().unwrap();
                    writeln!(w, "{line}").map_err(io_err(path))?;
                    bytes += line.len() as u64 + 1;
                }
                None => records.push(rec),
            }
        }
        next_a = hi + 1;
        chunks += 1;
        if let Some(w) = writer.as_mut() {
            let path = cfg.output_path.as_deref().unwrap();
            w.flush().map_err(io_err(path))?;
            w.get_ref().sync_data().map_err(io_err(path))?;
        }
        if let Some(cp_path) = &cfg.checkpoint_path {
            Checkpoint {
                max_basis: cfg.max_basis,
                next_a,
                bytes,
                fingerprint: cfg.fingerprint(),
                tally: tally.clone(),
            }
            .store(cp_path)?;
        }
    }
    Ok(SurveyOutcome { tally, records, completed: true })
}

/// Reads a JSON-lines record file back.
pub fn read_records(path: &Path) -> Result<Vec<SearchRecord>, SearchError> {
    let f = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let rec = serde_json::from_str(&line)
            .map_err(|e| SearchError::Checkpoint { path: path.to_path_buf(), msg: format!("line {}: {e}", i + 1) })?;
        out.push(rec);
    }
    Ok(out)
}
