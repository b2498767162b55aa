use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pipedlab::corpus::{builtin_fixtures, load_fixtures};
use pipedlab::exactnum::to_decimal_string;
use pipedlab::family::{canonical_form, tetra_family};
use pipedlab::geometry::{embed_coordinates, gram_from_edges, volume_squared};
use pipedlab::param::{
    heron_area_law, heron_area_printed, heron_triangle, wyss_parallelogram, HeronParams, WyssParams,
};
use pipedlab::polygon::{
    common_parallelograms, enumerate_parallelogram_stats, smallest_parallelograms, Listing, ParallelogramEntry,
    ParallelogramStats, REFERENCE_STATS,
};
use pipedlab::search::{analyze_record, run_survey, verify_corpus, SearchConfig, SearchRecord};
use pipedlab::{classify, sign_vector, EdgeSextuple, PipedClass};

macro_rules! out {
    ($o:expr, $($t:tt)*) => {{
        let _ = writeln!($o, $($t)*);
    }};
}

macro_rules! outraw {
    ($o:expr, $($t:tt)*) => {{
        let _ = write!($o, $($t)*);
    }};
}

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "pipedlab", version, about = "Explore integer parallelepipeds and the rationality of their parts")]
struct Cli {
    #[command(flatten)]
    fmt: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Default)]
struct Format {
    /// Machine-readable JSON output
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output where a table makes sense
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Args)]
struct Edges {
    /// Edge lengths a b c d e f (basis lengths a, c, e)
    #[arg(num_args = 6, required = true, value_name = "EDGE")]
    edges: Vec<u64>,
}

impl Edges {
    fn sextuple(&self) -> Result<EdgeSextuple, Failure> {
        let e: [u64; 6] = self.edges.as_slice().try_into().expect("clap enforces six values");
        EdgeSextuple::from_array(e).map_err(Failure::domain)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Class, rationality signature, group counts and volume of one piped
    Analyze(Edges),
    /// Class from the signs of the basis dot products
    Classify(Edges),
    /// All integer members of the tetrahedron family
    Family(Edges),
    /// Floating-point coordinates of the piped vertices
    Embed(Edges),
    /// Heron triangle from parameters m n p q
    #[command(name = "param-heron", allow_negative_numbers = true)]
    ParamHeron { m: i64, n: i64, p: i64, q: i64 },
    /// Parallelogram with two integer diagonals from parameters k m n p q
    #[command(name = "param-wyss", allow_negative_numbers = true)]
    ParamWyss { k: i64, m: i64, n: i64, p: i64, q: i64 },
    /// Smallest integer parallelograms of a given kind
    Parallelograms {
        /// 3: both diagonals integer; 6: diagonals and area integer
        #[arg(long, default_value_t = 3, value_parser = clap::builder::PossibleValuesParser::new(["3", "6"]).map(|s| s.parse::<u8>().expect("listed values parse")))]
        case: u8,
        /// Largest side considered
        #[arg(long, default_value_t = 60)]
        bound: u64,
        /// Print at most this many rows
        #[arg(long)]
        limit: Option<usize>,
        /// List the all-rational entries that fall within both first-N listings
        #[arg(long, conflicts_with = "case")]
        common: bool,
    },
    /// Case tally of integer parallelograms with long side up to max-a
    Stats {
        #[arg(long, default_value_t = 100)]
        max_a: u64,
    },
    /// Bounded survey of pipeds with six integer face diagonals
    Search(SearchArgs),
    /// Check the example corpus against computed values
    Verify {
        /// Fixture CSV; the shipped corpus when omitted
        fixtures: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// TOML file with search settings; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_basis: Option<u64>,
    /// Keep only perfect pipeds
    #[arg(long)]
    perfect: bool,
    /// Keep only rational-volume pipeds
    #[arg(long)]
    rational_volume: bool,
    /// Keep only one class (acute, obtuse, 1-ortho, 2-ortho, rectangular)
    #[arg(long, value_name = "NAME")]
    class: Option<PipedClass>,
    /// Record file (JSON lines); records go to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Smallest-basis values per checkpointed chunk
    #[arg(long)]
    chunk: Option<u64>,
    /// Also accept faces whose diagonal makes them flat
    #[arg(long)]
    flat_faces: bool,
    /// Stop after this many chunks; continue later with --resume
    #[arg(long, requires = "checkpoint")]
    max_chunks: Option<usize>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn domain(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_DOMAIN, msg: e.to_string() }
    }

    fn usage(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_USAGE, msg: e.to_string() }
    }
}

fn threads_from_env() -> Result<usize, Failure> {
    match std::env::var("PIPEDLAB_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("PIPEDLAB_THREADS must be a count, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn print_json<T: Serialize>(o: &mut String, v: &T) {
    out!(o, "{}", serde_json::to_string_pretty(v).expect("output serializes"));
}

#[derive(Serialize)]
struct AnalyzeOutput {
    #[serde(flatten)]
    record: SearchRecord,
    perfect: bool,
    long_class: &'static str,
    family_size: usize,
    canonical: [u64; 6],
}

fn analyze(o: &mut String, edges: &Edges, fmt: Format) -> Result<(), Failure> {
    let s = edges.sextuple()?;
    // surfaces the face or determinant error with its own message
    volume_squared(&gram_from_edges(&s).map_err(Failure::domain)?).map_err(Failure::domain)?;
    let record = analyze_record(&s).expect("validated input analyzes");
    let out = AnalyzeOutput {
        perfect: record.perfect(),
        long_class: record.class.long_name(),
        family_size: tetra_family(&s).len(),
        canonical: canonical_form(&s).to_array(),
        record,
    };
    if fmt.json {
        print_json(o, &out);
        return Ok(());
    }
    let r = &out.record;
    let c = r.category;
    out!(o, "edges       {s}");
    out!(o, "class       {} ({})", r.class, out.long_class);
    out!(o, "signature   {}", r.sig);
    out!(o, "skew        {}/4", c.skew);
    out!(o, "face diag   {}/6", c.face_diag);
    out!(o, "body diag   {}/4", c.body_diag);
    out!(o, "face area   {}/3", c.face_area);
    out!(o, "body area   {}/6", c.body_area);
    out!(o, "volume²     {} (flag {})", r.vol2, c.volume.as_i8());
    out!(o, "perfect     {}", out.perfect);
    out!(
        o,
        "family      {} members, canonical {}",
        out.family_size,
        EdgeSextuple::from_array(out.canonical).map_err(Failure::domain)?
    );
    Ok(())
}

fn classify_cmd(o: &mut String, edges: &Edges, fmt: Format) -> Result<(), Failure> {
    let s = edges.sextuple()?;
    let g = gram_from_edges(&s).map_err(Failure::domain)?;
    volume_squared(&g).map_err(Failure::domain)?;
    let sv = sign_vector(&g);
    let class = classify(sv);
    if fmt.json {
        print_json(o, &serde_json::json!({ "edges": s.to_array(), "signs": sv.0, "class": class }));
    } else {
        out!(o, "{class}\t{sv}");
    }
    Ok(())
}

fn family_cmd(o: &mut String, edges: &Edges, fmt: Format) -> Result<(), Failure> {
    let s = edges.sextuple()?;
    let fam = tetra_family(&s);
    let members: Vec<[u64; 6]> = fam.members.iter().map(EdgeSextuple::to_array).collect();
    if fmt.json {
        print_json(
            o,
            &serde_json::json!({
                "origin": s.to_array(),
                "canonical": fam.canonical().to_array(),
                "members": members,
                "irrational_rows": fam.irrational_rows,
            }),
        );
    } else if fmt.csv {
        out!(o, "a,b,c,d,e,f");
        for m in &members {
            out!(o, "{}", m.map(|x| x.to_string()).join(","));
        }
    } else {
        out!(o, "{} members, {} rows dropped, canonical {}", fam.len(), fam.irrational_rows, fam.canonical());
        for m in &fam.members {
            out!(o, "  {m}");
        }
    }
    Ok(())
}

fn embed_cmd(o: &mut String, edges: &Edges, fmt: Format) -> Result<(), Failure> {
    let s = edges.sextuple()?;
    let emb = embed_coordinates(&s).map_err(Failure::domain)?;
    let g = gram_from_edges(&s).map_err(Failure::domain)?;
    let verts = emb.piped_vertices();
    let err = emb.max_relative_error(&g);
    if fmt.json {
        print_json(o, &serde_json::json!({ "vertices": verts, "max_relative_error": err }));
    } else if fmt.csv {
        out!(o, "vertex,x,y,z");
        for (i, v) in verts.iter().enumerate() {
            out!(o, "v{},{},{},{}", i + 1, v[0], v[1], v[2]);
        }
    } else {
        for (i, v) in verts.iter().enumerate() {
            out!(o, "v{}  {:>14.9} {:>14.9} {:>14.9}", i + 1, v[0], v[1], v[2]);
        }
        out!(o, "max relative error {err:.3e}");
    }
    Ok(())
}

fn heron_cmd(o: &mut String, hp: HeronParams, fmt: Format) -> Result<(), Failure> {
    let t = heron_triangle(hp).map_err(Failure::domain)?;
    let law = heron_area_law(hp);
    let printed = heron_area_printed(hp);
    if fmt.json {
        print_json(
            o,
            &serde_json::json!({
                "params": hp,
                "sides": t.sides,
                "area": law.to_string(),
                "printed_area": printed.to_string(),
                "heron_area_squared": to_decimal_string(&t.area_squared),
            }),
        );
    } else {
        let [a, b, c] = t.sides;
        out!(o, "sides  {a} {b} {c}");
        out!(o, "area   {law} (area² by Heron {})", to_decimal_string(&t.area_squared));
        out!(o, "printed formula gives {printed}");
    }
    Ok(())
}

fn wyss_cmd(o: &mut String, wp: WyssParams, fmt: Format) -> Result<(), Failure> {
    let p = wyss_parallelogram(wp).map_err(Failure::domain)?;
    let entry = ParallelogramEntry::new(p.side_a, p.side_b, p.diag1).map_err(Failure::domain)?;
    if fmt.json {
        print_json(o, &serde_json::json!({ "params": wp, "parallelogram": entry }));
    } else if fmt.csv {
        out!(o, "{}\n{}", ParallelogramEntry::CSV_HEADER, entry.csv_row());
    } else {
        let opt = |x: Option<u64>| x.map_or_else(|| "irrational".to_string(), |v| v.to_string());
        out!(o, "sides {} {}  diagonals {} {}", entry.a, entry.b, entry.d1, opt(entry.d2));
        out!(o, "area  {}  case {}", opt(entry.area), entry.case.number());
    }
    Ok(())
}

fn print_entries(o: &mut String, entries: &[ParallelogramEntry], fmt: Format) {
    if fmt.json {
        print_json(o, &entries);
        return;
    }
    if fmt.csv {
        out!(o, "{}", ParallelogramEntry::CSV_HEADER);
        for e in entries {
            out!(o, "{}", e.csv_row());
        }
        return;
    }
    out!(o, "{:>6} {:>6} {:>6} {:>6} {:>8} case", "a", "b", "d1", "d2", "area");
    let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    for e in entries {
        out!(o, "{:>6} {:>6} {:>6} {:>6} {:>8} {}", e.a, e.b, e.d1, opt(e.d2), opt(e.area), e.case.number());
    }
}

fn stats_table(st: &ParallelogramStats, max_a: u64) -> String {
    let rows = [
        ("total", st.total, REFERENCE_STATS.total),
        ("case 2", st.case2, REFERENCE_STATS.case2),
        ("case 3", st.case3, REFERENCE_STATS.case3),
        ("case 5", st.case5, REFERENCE_STATS.case5),
        ("case 6", st.case6, REFERENCE_STATS.case6),
        ("case 6 right", st.case6_right, REFERENCE_STATS.case6_right),
        ("case 6 scalene", st.case6_scalene, REFERENCE_STATS.case6_scalene),
    ];
    let with_ref = max_a == 100;
    let mut out = String::new();
    if with_ref {
        writeln!(out, "{:<16}{:>10}{:>12}", "", "computed", "reference").unwrap();
    }
    for (name, ours, theirs) in rows {
        if with_ref {
            writeln!(out, "{name:<16}{ours:>10}{theirs:>12}").unwrap();
        } else {
            writeln!(out, "{name:<16}{ours:>10}").unwrap();
        }
    }
    out
}

fn stats_cmd(o: &mut String, max_a: u64, fmt: Format) -> Result<(), Failure> {
    let st = enumerate_parallelogram_stats(max_a);
    if fmt.json {
        let reference = (max_a == 100).then_some(REFERENCE_STATS);
        print_json(o, &serde_json::json!({ "max_a": max_a, "computed": st, "reference": reference }));
    } else if fmt.csv {
        out!(o, "max_a,total,case2,case3,case5,case6,case6_right,case6_scalene");
        let row = |s: &ParallelogramStats| {
            format!("{},{},{},{},{},{},{}", s.total, s.case2, s.case3, s.case5, s.case6, s.case6_right, s.case6_scalene)
        };
        out!(o, "{max_a},{}", row(&st));
    } else {
        outraw!(o, "{}", stats_table(&st, max_a));
    }
    Ok(())
}

fn search_config(args: &SearchArgs, workers: usize) -> Result<SearchConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        None => SearchConfig::default(),
    };
    if cfg.workers == 0 {
        cfg.workers = workers;
    }
    if let Some(m) = args.max_basis {
        cfg.max_basis = m;
    }
    cfg.filter.perfect_only |= args.perfect;
    cfg.filter.rational_volume_only |= args.rational_volume;
    if args.class.is_some() {
        cfg.filter.class = args.class;
    }
    if args.out.is_some() {
        cfg.output_path = args.out.clone();
    }
    if args.checkpoint.is_some() {
        cfg.checkpoint_path = args.checkpoint.clone();
    }
    if let Some(c) = args.chunk {
        cfg.checkpoint_interval = c;
    }
    cfg.resume |= args.resume;
    cfg.allow_flat_faces |= args.flat_faces;
    cfg.max_chunks = args.max_chunks;
    Ok(cfg)
}

fn search_cmd(o: &mut String, args: &SearchArgs, fmt: Format) -> Result<(), Failure> {
    let cfg = search_config(args, threads_from_env()?)?;
    let out = run_survey(&cfg).map_err(|e| match e {
        pipedlab::search::SearchError::Config(_) => Failure::usage(e),
        _ => Failure::domain(e),
    })?;
    let tally = &out.tally;
    if !out.completed {
        eprintln!("stopped early; resume with --resume");
    }
    if fmt.csv {
        outraw!(o, "{}", tally.histogram_csv());
    } else if fmt.json {
        print_json(o, tally);
    } else {
        for r in &out.records {
            out!(o, "{}", serde_json::to_string(r).expect("record serializes"));
        }
        eprintln!("{} families, {} records, {} degenerate", tally.families, tally.records, tally.degenerate);
        for c in PipedClass::ALL {
            eprintln!("  {:<12}{}", c.as_str(), tally.class_count(c));
        }
    }
    Ok(())
}

fn verify_cmd(o: &mut String, path: Option<&PathBuf>, fmt: Format) -> Result<(), Failure> {
    let rows = match path {
        Some(p) => load_fixtures(p).map_err(Failure::usage)?,
        None => builtin_fixtures(),
    };
    let report = verify_corpus(&rows);
    if fmt.json {
        let rows: Vec<_> = report
            .rows
            .iter()
            .map(
                |r| serde_json::json!({ "line": r.line, "source": r.source, "edges": r.edges, "failures": r.failures }),
            )
            .collect();
        print_json(o, &serde_json::json!({ "passed": report.passed(), "rows": rows }));
    } else {
        for r in &report.rows {
            out!(o, "{r}");
        }
        let failed = report.failures().count();
        out!(o, "{} rows, {} failed", report.rows.len(), failed);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, msg: "corpus verification failed".into() })
    }
}

fn run(o: &mut String, cli: Cli) -> Result<(), Failure> {
    let fmt = cli.fmt;
    match &cli.command {
        Command::Analyze(e) => analyze(o, e, fmt),
        Command::Classify(e) => classify_cmd(o, e, fmt),
        Command::Family(e) => family_cmd(o, e, fmt),
        Command::Embed(e) => embed_cmd(o, e, fmt),
        &Command::ParamHeron { m, n, p, q } => heron_cmd(o, HeronParams { m, n, p, q }, fmt),
        &Command::ParamWyss { k, m, n, p, q } => wyss_cmd(o, WyssParams { k, m, n, p, q }, fmt),
        &Command::Parallelograms { case, bound, limit, common } => {
            let mut entries = if common {
                common_parallelograms(limit.unwrap_or(10), bound)
            } else {
                smallest_parallelograms(Listing::from_case(case).expect("clap restricts the case"), bound)
            };
            if !common {
                if let Some(n) = limit {
                    entries.truncate(n);
                }
            }
            print_entries(o, &entries, fmt);
            Ok(())
        }
        &Command::Stats { max_a } => {
            let threads = threads_from_env()?;
            if threads > 0 {
                // ignore failure: the pool may already exist
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            stats_cmd(o, max_a, fmt)
        }
        Command::Search(args) => search_cmd(o, args, fmt),
        Command::Verify { fixtures } => verify_cmd(o, fixtures.as_ref(), fmt),
    }
}

fn flush(o: &str) {
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(o.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut o = String::new();
    let res = run(&mut o, cli);
    flush(&o);
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
