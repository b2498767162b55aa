//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Oracles here are written independently of the library: Cayley–Menger
//! determinants by fraction-free elimination, parallelograms by direct
//! integer search, Heron products straight from the sides.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pipedlab::classify::{class_groups, enumerate_appendix_a, vertex_groups};
use pipedlab::corpus::{builtin_fixtures, builtin_parallelograms};
use pipedlab::geometry::{embed_coordinates, squared_length, to_f64, volume_squared, VERTEX_COEFFS};
use pipedlab::param::{
    heron_area_law, heron_area_printed, heron_raw, heron_triangle, wyss_raw, HeronParams, WyssParams,
};
use pipedlab::polygon::{common_parallelograms, smallest_parallelograms, Listing};
use pipedlab::search::{run_survey, verify_corpus, SearchConfig};
use pipedlab::signature::analyze_small;
use pipedlab::{
    canonical_form, category_of, classify, compute_signature, gram_from_edges, is_perfect, sign_vector, tetra_family,
    EdgeSextuple, PipedClass, SignVector, VolumeFlag,
};

/// Criteria that cannot be met as stated. Each one must still fail here, so
/// the list cannot go stale silently.
const KNOWN_UNATTAINABLE: &[u32] = &[6];

const EMBED_REL_TOL: f64 = 1e-9;

type Check = Result<String, String>;

/// Number, name, check and runtime budget.
type Criterion = (u32, &'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if let false = $cond {
            return Err(format!($($msg)*));
        }
    };
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pipedlab"))
}

fn sext(e: [u64; 6]) -> EdgeSextuple {
    EdgeSextuple::from_array(e).expect("valid sextuple")
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

fn bareiss_det<const N: usize>(mut m: [[i128; N]; N]) -> i128 {
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..N - 1 {
        if m[k][k] == 0 {
            match (k + 1..N).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..N {
            for j in k + 1..N {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[N - 1][N - 1]
}

/// 288·(tetrahedron volume)² = 8·(piped volume)².
fn cayley_menger(s: [u64; 6]) -> i128 {
    let [a, b, c, d, e, f] = s.map(|x| x as i128 * x as i128);
    bareiss_det([[0, 1, 1, 1, 1], [1, 0, a, c, e], [1, a, 0, b, d], [1, c, b, 0, f], [1, e, d, f, 0]])
}

fn criterion_1() -> Check {
    let rows = builtin_fixtures();
    let report = verify_corpus(&rows);
    if let Some(bad) = report.failures().next() {
        return Err(bad.to_string());
    }
    // stated volumes, as a multiset
    let expected: &[(&str, usize)] = &[
        ("1235520", 1),
        ("18144", 1),
        ("20160", 2),
        ("30240", 1),
        ("28224", 1),
        ("8781696", 4),
        ("24710400", 1),
        ("3991680", 1),
        ("21385728", 2),
        ("8078400", 1),
        ("46569600", 1),
        ("29272320", 1),
        ("302132160", 1),
        ("16632000", 1),
    ];
    let mut have: BTreeMap<String, usize> = BTreeMap::new();
    for r in &rows {
        if let Some(v) = &r.volume {
            *have.entry(v.to_string()).or_default() += 1;
        }
    }
    for (v, n) in expected {
        ensure!(have.get(*v).copied().unwrap_or(0) >= *n, "volume {v} appears fewer than {n} times");
    }
    // independent volume oracle
    let mut non_solid = 0;
    for r in &rows {
        let cm = cayley_menger(r.edges);
        if r.solid == Some(false) {
            non_solid += 1;
            ensure!(cm < 0, "line {}: expected a negative Cayley–Menger determinant, got {cm}", r.line);
        } else if let Some(v) = &r.volume {
            let v: i128 = v.to_string().parse().unwrap();
            ensure!(cm == 8 * v * v, "line {}: Cayley–Menger {cm} disagrees with volume {v}", r.line);
        } else {
            ensure!(cm >= 0, "line {}: negative Cayley–Menger determinant", r.line);
        }
    }
    Ok(format!("{} rows verified, {non_solid} non-solid rows confirmed by Cayley–Menger", rows.len()))
}

fn criterion_2() -> Check {
    let rows = [
        ([103, 101, 106, 266, 271, 255], PipedClass::AcuteTriclinic),
        ([335, 444, 365, 595, 630, 385], PipedClass::AcuteTriclinic),
        ([340, 493, 357, 852, 952, 875], PipedClass::MonoOrthoBiclinic),
        ([342, 463, 595, 661, 739, 774], PipedClass::AcuteTriclinic),
        ([375, 285, 540, 448, 647, 653], PipedClass::AcuteTriclinic),
        ([422, 431, 579, 577, 925, 776], PipedClass::AcuteTriclinic),
    ];
    for (e, class) in rows {
        let s = sext(e);
        let sig = compute_signature(&s).map_err(|x| x.to_string())?;
        let key = category_of(&sig);
        ensure!(is_perfect(&sig) && key.face_diag == 6 && key.body_diag == 4, "{s} not perfect: {key}");
        let got = classify(sign_vector(&gram_from_edges(&s).unwrap()));
        ensure!(got == class, "{s} classified {got}, expected {class}");
    }
    Ok("6 of 6 perfect, classes match".into())
}

fn criterion_3() -> Check {
    // union groups in the order the 27 sign triples are listed, (-1,-1,-1) first
    let obt = vec![[-1, -1, -1], [-1, 1, 1]];
    let acu = vec![[-1, -1, 1], [1, 1, 1]];
    let bi = vec![[-1, -1, 0], [-1, 0, 1], [0, 1, 1]];
    let mono = vec![[-1, 0, 0], [0, 0, 1]];
    let rect = vec![[0, 0, 0]];
    let table: Vec<&Vec<[i8; 3]>> = vec![
        &obt, &bi, &acu, &bi, &mono, &bi, &acu, &bi, &obt, //
        &bi, &mono, &bi, &mono, &rect, &mono, &bi, &mono, &bi, //
        &acu, &bi, &obt, &bi, &mono, &bi, &obt, &bi, &acu,
    ];
    let mut k = 0;
    for i in -1..=1i8 {
        for j in -1..=1i8 {
            for l in -1..=1i8 {
                let sv = SignVector([i, j, l]);
                let group: Vec<[i8; 3]> = vertex_groups(sv).into_iter().collect();
                ensure!(&group == table[k], "#{} {sv}: group {group:?}, table {:?}", k + 1, table[k]);
                k += 1;
            }
        }
    }
    let all = enumerate_appendix_a();
    ensure!(all.len() == 27, "{} sign triples", all.len());
    let groups = class_groups();
    ensure!(groups.len() == 5, "{} distinct groups", groups.len());
    let named = [
        (rect, PipedClass::Rectangular),
        (mono, PipedClass::BiOrthoMonoclinic),
        (bi, PipedClass::MonoOrthoBiclinic),
        (obt, PipedClass::ObtuseTriclinic),
        (acu, PipedClass::AcuteTriclinic),
    ];
    for (g, class) in named {
        let g: BTreeSet<[i8; 3]> = g.into_iter().collect();
        let classes = groups.get(&g).ok_or_else(|| format!("group {g:?} missing"))?;
        ensure!(classes.len() == 1 && classes.contains(&class), "group {g:?} carries {classes:?}");
    }
    for (sv, g) in &all {
        ensure!(groups[g].contains(&classify(*sv)), "{sv} disagrees with its group");
    }
    Ok("27 triples, 5 groups, closed form agrees".into())
}

fn criterion_4() -> Check {
    let s = sext([120, 218, 182, 241, 209, 27]);
    let sig = compute_signature(&s).map_err(|e| e.to_string())?;
    ensure!(sig.all_rational_except_volume(), "signature {sig}");
    ensure!(sig.volume == VolumeFlag::Zero, "volume flag {:?}", sig.volume);
    let class = classify(sign_vector(&gram_from_edges(&s).unwrap()));
    ensure!(class == PipedClass::BiOrthoMonoclinic, "class {class}");
    Ok(format!("signature {sig}, class {class}"))
}

/// Normalized (a ≤ b, d1 ≤ d2) integer parallelograms with sides ≤ bound;
/// the flag says whether the area is integral too.
fn parallelogram_oracle(bound: i128) -> Vec<([u64; 4], bool)> {
    let mut out = Vec::new();
    for a in 1..=bound {
        for b in a..=bound {
            for d1 in (b - a + 1)..(a + b) {
                let Some(d2) = isqrt(2 * (a * a + b * b) - d1 * d1) else { continue };
                if d1 > d2 {
                    continue;
                }
                // 16·(triangle area)²
                let p = (a + b + d1) * (-a + b + d1) * (a - b + d1) * (a + b - d1);
                out.push(([a, b, d1, d2].map(|x| x as u64), isqrt(p).is_some()));
            }
        }
    }
    out
}

fn criterion_5() -> Check {
    // library and oracle must agree exactly inside the cross-validation box;
    // the published rows reach further, so membership uses a wider one
    const BOUND: u64 = 25;
    const WIDE: u64 = 60;
    let key = |e: &pipedlab::polygon::ParallelogramEntry| [e.a, e.b, e.d1, e.d2.unwrap_or(0)];
    let split = |bound: u64| -> (Vec<[u64; 4]>, Vec<[u64; 4]>) {
        let oracle = parallelogram_oracle(bound as i128);
        (oracle.iter().map(|(e, _)| *e).collect(), oracle.iter().filter(|(_, area)| *area).map(|(e, _)| *e).collect())
    };
    let (oracle3, oracle6) = split(BOUND);
    let lib3: Vec<[u64; 4]> = smallest_parallelograms(Listing::BothDiagonals, BOUND).iter().map(key).collect();
    let lib6: Vec<[u64; 4]> = smallest_parallelograms(Listing::AllRational, BOUND).iter().map(key).collect();
    ensure!(lib3 == oracle3, "both-diagonal listing differs from the oracle");
    ensure!(lib6 == oracle6, "all-rational listing differs from the oracle");

    let (wide3, wide6) = split(WIDE);
    let lib_wide3: Vec<[u64; 4]> = smallest_parallelograms(Listing::BothDiagonals, WIDE).iter().map(key).collect();
    let lib_wide6: Vec<[u64; 4]> = smallest_parallelograms(Listing::AllRational, WIDE).iter().map(key).collect();
    ensure!(lib_wide3 == wide3 && lib_wide6 == wide6, "listings differ from the oracle at sides ≤ {WIDE}");

    let fixtures = builtin_parallelograms();
    let by = |src: &str| -> Vec<[u64; 4]> {
        fixtures.iter().filter(|f| f.source == src).map(|f| [f.a, f.b, f.d1, f.d2]).collect()
    };
    let (t3, t6, common) = (by("both-diagonals-first-10"), by("all-rational-first-10"), by("in-common"));
    ensure!(
        t3.len() == 10 && t6.len() == 10 && common.len() == 5,
        "fixture sizes {} {} {}",
        t3.len(),
        t6.len(),
        common.len()
    );
    for row in &t3 {
        ensure!(lib_wide3.contains(row), "{row:?} missing from the both-diagonal listing");
    }
    for row in &t6 {
        ensure!(lib_wide6.contains(row), "{row:?} missing from the all-rational listing");
    }
    let lib_common: BTreeSet<[u64; 4]> = common_parallelograms(10, BOUND).iter().map(key).collect();
    let cut = oracle3[9][0].min(oracle6[9][0]);
    let oracle_common: BTreeSet<[u64; 4]> = oracle6.iter().filter(|e| e[0] <= cut).copied().collect();
    let fixture_common: BTreeSet<[u64; 4]> = common.into_iter().collect();
    ensure!(lib_common == fixture_common, "common table {lib_common:?}");
    ensure!(oracle_common == fixture_common, "oracle common table {oracle_common:?}");
    Ok(format!(
        "{} and {} entries within sides ≤ {BOUND}, 20 listed rows found, 5 in common",
        oracle3.len(),
        oracle6.len()
    ))
}

fn stats_column(out: &str, label: &str) -> Result<(u64, u64), String> {
    let line = out
        .lines()
        .find(|l| l.starts_with(label) && l[label.len()..].starts_with(char::is_whitespace))
        .ok_or_else(|| format!("no {label:?} row"))?;
    let nums: Vec<u64> = line[label.len()..].split_whitespace().map(|x| x.parse().unwrap()).collect();
    ensure!(nums.len() == 2, "{label:?} row lacks the reference column: {line:?}");
    Ok((nums[0], nums[1]))
}

fn criterion_6() -> Check {
    let t = Instant::now();
    let out = bin().args(["stats", "--max-a", "100"]).output().map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure!(out.status.success(), "stats exited {:?}", out.status);
    ensure!(elapsed < Duration::from_secs(60), "stats took {elapsed:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let (c2, r2) = stats_column(&text, "case 2")?;
    let (c3, r3) = stats_column(&text, "case 3")?;
    let (c5, r5) = stats_column(&text, "case 5")?;
    let (c6, r6) = stats_column(&text, "case 6")?;
    let (right, rr) = stats_column(&text, "case 6 right")?;
    let (scalene, rs) = stats_column(&text, "case 6 scalene")?;
    ensure!((r2, r3, r5, r6, rr, rs) == (737_628, 6_683, 1_827, 206, 63, 143), "reference column altered");
    ensure!(c2 > 10 * c3 && c3 > c5 && c5 > c6, "ordering broken: {c2} {c3} {c5} {c6}");
    let summary = format!("cases {c2}/{c3}/{c5}/{c6}, split {right}/{scalene} against {rr}/{rs}");
    ensure!(scalene > right, "case-6 split has right {right} ≥ scalene {scalene} ({summary})");
    Ok(summary)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let wp = WyssParams {
            k: rng.gen_range(-20..=20),
            m: rng.gen_range(-50..=50),
            n: rng.gen_range(-50..=50),
            p: rng.gen_range(-50..=50),
            q: rng.gen_range(-50..=50),
        };
        let [a, b, c, d] = wyss_raw(wp);
        ensure!(2 * (a * a + b * b) == c * c + d * d, "{wp:?} breaks the parallelogram law");
    }
    let mut accepted = 0;
    while accepted < 10_000 {
        let hp = HeronParams {
            m: rng.gen_range(1..=30),
            n: rng.gen_range(1..=30),
            p: rng.gen_range(1..=30),
            q: rng.gen_range(1..=30),
        };
        let Ok(t) = heron_triangle(hp) else { continue };
        accepted += 1;
        let [a, b, c] = heron_raw(hp);
        let product = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
        let law = heron_area_law(hp);
        ensure!(isqrt(product).is_some(), "{hp:?}: Heron product {product} is not a square");
        ensure!(product == 16 * law * law, "{hp:?}: product {product} against area {law}");
        ensure!(t.area_squared == pipedlab::Rational::from_integer((law * law).into()), "{hp:?}: library area");
    }
    let hp = HeronParams { m: 1, n: 2, p: 1, q: 3 };
    ensure!(
        heron_area_printed(hp) == 600 && heron_area_law(hp) == 150,
        "(1,2,1,3) gives {} / {}",
        heron_area_printed(hp),
        heron_area_law(hp)
    );
    Ok("10000 Wyss and 10000 Heron tuples; (1,2,1,3) printed 600 vs Heron 150".into())
}

fn criterion_8() -> Check {
    let rect = tetra_family(&sext([44, 125, 117, 244, 240, 267]));
    ensure!(rect.len() == 6, "rectangular family has {} members", rect.len());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let survey = run_survey(&SearchConfig::new(48)).map_err(|e| e.to_string())?.records;
    let mut origins: Vec<EdgeSextuple> = (0..500).map(|_| survey[rng.gen_range(0..survey.len())].sextuple()).collect();
    while origins.len() < 1000 {
        let e: [u64; 6] = std::array::from_fn(|_| rng.gen_range(1..=60));
        if let Ok(s) = EdgeSextuple::from_array(e) {
            if cayley_menger(e) > 0 {
                origins.push(s);
            }
        }
    }
    let mut largest = 0;
    for s in &origins {
        let fam = tetra_family(s);
        ensure!(fam.len() <= 24 && fam.members.contains(s), "{s}: {} members", fam.len());
        largest = largest.max(fam.len());
        let g = gram_from_edges(s).unwrap();
        let (class, key, vol) =
            (classify(sign_vector(&g)), category_of(&compute_signature(s).unwrap()), volume_squared(&g).unwrap());
        for m in &fam.members {
            let gm = gram_from_edges(m).map_err(|e| format!("{m}: {e}"))?;
            ensure!(classify(sign_vector(&gm)) == class, "{m} class differs from {s}");
            ensure!(category_of(&compute_signature(m).unwrap()) == key, "{m} category differs from {s}");
            ensure!(volume_squared(&gm).unwrap() == vol, "{m} volume differs from {s}");
        }
    }
    Ok(format!("1000 families, largest {largest}"))
}

fn criterion_9() -> Check {
    let t = Instant::now();
    let out = run_survey(&SearchConfig::new(72)).map_err(|e| e.to_string())?;
    let want = canonical_form(&sext([17, 32, 41, 61, 72, 43]));
    let rec = out.records.iter().find(|r| r.sextuple() == want).ok_or("rational-volume sample not found at 72")?;
    ensure!(rec.vol2 == (18144u64 * 18144).to_string(), "volume² {}", rec.vol2);
    ensure!(rec.class == PipedClass::AcuteTriclinic, "class {}", rec.class);
    let mut cfg = SearchConfig::new(271);
    cfg.filter.perfect_only = true;
    cfg.checkpoint_interval = 32;
    let perfect = run_survey(&cfg).map_err(|e| e.to_string())?;
    let sr = canonical_form(&sext([103, 101, 106, 266, 271, 255]));
    ensure!(perfect.records.iter().any(|r| r.sextuple() == sr), "perfect family missing at 271");
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    Ok(format!("{} families at 72; {} perfect at 271", out.tally.records, perfect.tally.records))
}

fn criterion_10() -> Check {
    let mut n = 0;
    for row in builtin_fixtures() {
        if row.solid == Some(false) {
            continue;
        }
        let s = sext(row.edges);
        let g = gram_from_edges(&s).unwrap();
        let verts = embed_coordinates(&s).map_err(|e| format!("line {}: {e}", row.line))?.piped_vertices();
        for i in 0..8 {
            for j in i + 1..8 {
                let diff: [i64; 3] = std::array::from_fn(|k| VERTEX_COEFFS[j][k] - VERTEX_COEFFS[i][k]);
                let exact = to_f64(&squared_length(&g, diff));
                let got: f64 = (0..3).map(|k| (verts[j][k] - verts[i][k]).powi(2)).sum();
                let err = if exact == 0.0 { got.abs() } else { (got - exact).abs() / exact };
                ensure!(err <= EMBED_REL_TOL, "line {} pair v{}v{}: {got} vs {exact}", row.line, i + 1, j + 1);
            }
        }
        n += 1;
    }
    Ok(format!("{n} rows, 28 pairs each"))
}

fn criterion_11() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("t{threads}.jsonl"));
        let st = bin()
            .env("PIPEDLAB_THREADS", threads)
            .args(["search", "--max-basis", "80", "--chunk", "9", "--out"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(st.status.success(), "search exited {:?}", st.status);
        files.push(fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(!files[0].is_empty(), "empty record file");
    ensure!(files[0] == files[1], "record files differ between 1 and 4 threads");
    Ok(format!("{} bytes identical", files[0].len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        (1, "corpus regression", criterion_1, Duration::from_secs(5)),
        (2, "perfect pipeds", criterion_2, Duration::from_secs(1)),
        (3, "vertex-group classes", criterion_3, Duration::from_secs(1)),
        (4, "degenerate near-superperfect", criterion_4, Duration::from_secs(1)),
        (5, "parallelogram tables", criterion_5, Duration::from_secs(10)),
        (6, "statistics calibration", criterion_6, Duration::from_secs(60)),
        (7, "parameterizations", criterion_7, Duration::from_secs(10)),
        (8, "family behavior", criterion_8, Duration::from_secs(30)),
        (9, "search rediscovery", criterion_9, Duration::from_secs(600)),
        (10, "embedding consistency", criterion_10, Duration::from_secs(5)),
        (11, "determinism", criterion_11, Duration::from_secs(600)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check, budget) in criteria {
        let t = Instant::now();
        let mut result = check();
        let elapsed = t.elapsed();
        if result.is_ok() && elapsed > budget {
            result = Err(format!("over budget: {elapsed:.2?} > {budget:?}"));
        }
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let note = if known { " [documented deviation]" } else { "" };
        // straight to the handle so the line shows even when output is captured
        let line = format!("criterion {id:>2} {status} {name} ({elapsed:.2?}): {detail}{note}\n");
        let _ = std::io::stderr().write_all(line.as_bytes());
        if result.is_ok() == known {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}

#[test]
fn analyze_small_agrees_with_cayley_menger_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let e: [u64; 6] = std::array::from_fn(|_| rng.gen_range(1..=40));
        let Ok(s) = EdgeSextuple::from_array(e) else { continue };
        assert_eq!(analyze_small(&s).is_some(), cayley_menger(e) >= 0, "{s}");
    }
}
