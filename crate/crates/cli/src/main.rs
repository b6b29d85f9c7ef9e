//! `planar-oracle`: generate planar graphs, build and query failure distance
//! oracles, verify them against Dijkstra, benchmark, and replay dynamic
//! update scripts.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use planar_fto::decomposition::{DEFAULT_BASE, DEFAULT_LEAF_SIZE};
use planar_fto::dynamic::script::{parse_script, run_script};
use planar_fto::dynamic::DynamicOracle;
use planar_fto::failure::FailureOracle;
use planar_fto::format::{self, OracleFile};
use planar_fto::frdijkstra::Strategy;
use planar_fto::graph::distance_avoiding;
use planar_fto::graph::generate::{grid, random_triangulation, WeightMode};
use planar_fto::graph::pgr::{load_graph, save_graph};
use planar_fto::tradeoff::TradeoffOracle;
use planar_fto::workload::{failure_queries, failure_query};
use planar_fto::{par, DistanceValue, EmbeddedPlanarGraph, Error, VertexId};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "planar-oracle",
    version,
    about = "Exact distance oracles for planar graphs with failed vertices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in .pgr format.
    Gen(GenArgs),
    /// Build an oracle file from a .pgr graph.
    Build(BuildArgs),
    /// Answer "u v x1 x2 ..." lines, one distance per line.
    Query(QueryArgs),
    /// Compare sampled oracle answers with Dijkstra on the graph minus the failures.
    Verify(VerifyArgs),
    /// Sweep grid sizes and parameters and write a report.
    Bench(BenchArgs),
    /// Replay an update script against the dynamic oracle.
    Dyn(DynArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Grid dimensions, e.g. 16x16.
    #[arg(
        long,
        value_name = "RxC",
        conflicts_with = "triangulation",
        required_unless_present = "triangulation"
    )]
    grid: Option<String>,
    /// Random triangulation on N vertices.
    #[arg(long, value_name = "N")]
    triangulation: Option<usize>,
    /// Give every arc weight 1.
    #[arg(long, conflicts_with = "max_weight")]
    unit: bool,
    /// Draw arc weights uniformly from 1..=W.
    #[arg(long, value_name = "W", default_value_t = 100)]
    max_weight: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Failure,
    Tradeoff,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Naive,
    Monge,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::Monge => Strategy::Monge,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct BuildArgs {
    /// Input graph (.pgr).
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Failure)]
    mode: Mode,
    /// r-division size (tradeoff mode); must be one of the marked sizes.
    #[arg(long)]
    r: Option<usize>,
    /// Failure capacity (tradeoff mode).
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_LEAF_SIZE)]
    leaf_size: usize,
    #[arg(long, default_value_t = DEFAULT_BASE)]
    base: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Oracle file.
    oracle: PathBuf,
    /// Query lines; standard input if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Naive)]
    strategy: StrategyArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Oracle file.
    oracle: PathBuf,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    max_failures: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Naive)]
    strategy: StrategyArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid side lengths to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64])]
    sides: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Failure)]
    mode: Mode,
    /// r values to sweep (tradeoff mode); unmarked values are skipped.
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    /// Failure counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    k: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_LEAF_SIZE)]
    leaf_size: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Naive)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DynArgs {
    /// Initial graph (.pgr).
    graph: PathBuf,
    /// Update script.
    script: PathBuf,
    #[arg(long, default_value_t = 64)]
    r: usize,
    /// CSV output; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One configuration of a bench sweep.
#[derive(Clone, Debug, Serialize)]
struct BenchRecord {
    n: usize,
    r: Option<usize>,
    k: usize,
    build_ms: f64,
    bytes_on_disk: usize,
    mean_query_us: f64,
    p95_query_us: f64,
    union_vertex_count_mean: f64,
    verified: bool,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    records: Vec<BenchRecord>,
}

enum Failure {
    Mismatch(String),
    Usage(String),
    Io(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => EXIT_MISMATCH,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Input(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Mismatch(m) | Failure::Usage(m) | Failure::Io(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            Error::StrategyUnavailable => Failure::Usage(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io_err(path, e))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn flush(mut w: Box<dyn Write>) -> CliResult {
    w.flush().map_err(|e| Failure::Io(e.to_string()))
}

fn read_graph(path: &Path) -> CliResult<EmbeddedPlanarGraph> {
    load_graph(open(path)?).map_err(|e| match e {
        Error::Io(e) => io_err(path, e),
        e => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn read_oracle(path: &Path) -> CliResult<OracleFile> {
    format::read_from(open(path)?).map_err(|e| match e {
        Error::Io(e) => io_err(path, e),
        e => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn check_strategy(s: StrategyArg) -> CliResult<Strategy> {
    let s = Strategy::from(s);
    if s.available() {
        Ok(s)
    } else {
        Err(Error::StrategyUnavailable.into())
    }
}

fn show(d: DistanceValue) -> String {
    match d {
        DistanceValue::Finite(x) => x.to_string(),
        DistanceValue::Unreachable => "UNREACHABLE".to_string(),
    }
}

fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::Usage(format!("--grid expects RxC, got {s:?}"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?))
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let mode = if a.unit {
        WeightMode::Unit
    } else {
        WeightMode::SeededRandom {
            max_weight: a.max_weight,
            seed: a.seed,
        }
    };
    let g = match (&a.grid, a.triangulation) {
        (Some(dims), _) => {
            let (r, c) = parse_dims(dims)?;
            grid(r, c, mode)?
        }
        (None, Some(n)) => random_triangulation(n, mode, a.seed)?,
        (None, None) => {
            return Err(Failure::Usage(
                "one of --grid or --triangulation is required".into(),
            ))
        }
    };
    let mut w = output(a.out.as_deref())?;
    save_graph(&g, &mut w)?;
    flush(w)
}

fn build_tradeoff(
    g: EmbeddedPlanarGraph,
    r: Option<usize>,
    k: usize,
    leaf: usize,
    base: usize,
) -> CliResult<TradeoffOracle> {
    let r = r.ok_or_else(|| Failure::Usage("--mode tradeoff requires --r".into()))?;
    match TradeoffOracle::build_with(g.clone(), r, k, leaf, base) {
        Err(Error::UnmarkedR(_)) => {
            let marked = planar_fto::decomposition::r_sequence(g.vertex_count(), leaf, base);
            Err(Failure::Input(format!(
                "r = {r} is not a marked r-division size; choose one of {marked:?}"
            )))
        }
        other => Ok(other?),
    }
}

fn cmd_build(a: BuildArgs) -> CliResult {
    let g = read_graph(&a.graph)?;
    let bytes = match a.mode {
        Mode::Failure => {
            format::failure_to_bytes(&FailureOracle::build_with(g, a.leaf_size, a.base)?)
        }
        Mode::Tradeoff => {
            format::tradeoff_to_bytes(&build_tradeoff(g, a.r, a.k, a.leaf_size, a.base)?)
        }
    };
    let f = File::create(&a.out).map_err(|e| io_err(&a.out, e))?;
    format::write_to(BufWriter::new(f), &bytes)?;
    Ok(())
}

fn answer(
    o: &OracleFile,
    u: VertexId,
    v: VertexId,
    x: &[VertexId],
    s: Strategy,
) -> planar_fto::Result<DistanceValue> {
    match o {
        OracleFile::Failure(f) => Ok(f.query_with(u, v, x, s)?.distance),
        OracleFile::Tradeoff(t) => Ok(t.query_with(u, v, x, s)?.distance),
    }
}

fn cmd_query(a: QueryArgs) -> CliResult {
    let strategy = check_strategy(a.strategy)?;
    let oracle = read_oracle(&a.oracle)?;
    let input: Box<dyn BufRead> = match &a.input {
        Some(p) => Box::new(open(p)?),
        None => Box::new(BufReader::new(io::stdin().lock())),
    };
    let mut out = output(None)?;
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Failure::Io(e.to_string()))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |m: String| Failure::Input(format!("line {}: {m}", i + 1));
        let ids: Vec<VertexId> = body
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| bad(format!("not a vertex id: {t:?}")))
            })
            .collect::<CliResult<_>>()?;
        if ids.len() < 2 {
            return Err(bad("expected u v [x1 x2 ...]".into()));
        }
        let d =
            answer(&oracle, ids[0], ids[1], &ids[2..], strategy).map_err(|e| bad(e.to_string()))?;
        writeln!(out, "{}", show(d)).map_err(|e| Failure::Io(e.to_string()))?;
    }
    flush(out)
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let strategy = check_strategy(a.strategy)?;
    let oracle = read_oracle(&a.oracle)?;
    let g = oracle.failure().graph().clone();
    let max_failures = match &oracle {
        OracleFile::Tradeoff(t) if a.max_failures > t.k() => {
            return Err(Failure::Usage(format!(
                "--max-failures {} exceeds the oracle capacity {}",
                a.max_failures,
                t.k()
            )));
        }
        _ => a.max_failures,
    };
    if g.vertex_count() < 2 {
        return Err(Failure::Input("graph has fewer than two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut mismatches = 0;
    for q in failure_queries(&mut rng, g.vertex_count(), a.samples, max_failures) {
        let got = answer(&oracle, q.u, q.v, &q.failed, strategy)?;
        let want = distance_avoiding(&g, q.u, q.v, &q.failed)?;
        if got != want {
            mismatches += 1;
            eprintln!(
                "mismatch: {} {} {:?}: oracle {} brute force {}",
                q.u,
                q.v,
                q.failed,
                show(got),
                show(want)
            );
        }
    }
    if mismatches > 0 {
        return Err(Failure::Mismatch(format!(
            "{mismatches} of {} samples disagree",
            a.samples
        )));
    }
    println!("ok: {} samples agree", a.samples);
    Ok(())
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let i = ((sorted.len() as f64 - 1.0) * p).round() as usize;
    sorted[i]
}

fn bench_one(
    g: &EmbeddedPlanarGraph,
    mode: Mode,
    r: Option<usize>,
    k: usize,
    a: &BenchArgs,
    strategy: Strategy,
) -> CliResult<BenchRecord> {
    let n = g.vertex_count();
    let start = Instant::now();
    let oracle = match mode {
        Mode::Failure => OracleFile::Failure(FailureOracle::build_with(
            g.clone(),
            a.leaf_size,
            DEFAULT_BASE,
        )?),
        Mode::Tradeoff => {
            OracleFile::Tradeoff(build_tradeoff(g.clone(), r, k, a.leaf_size, DEFAULT_BASE)?)
        }
    };
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let bytes_on_disk = match &oracle {
        OracleFile::Failure(f) => format::failure_to_bytes(f).len(),
        OracleFile::Tradeoff(t) => format::tradeoff_to_bytes(t).len(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ n as u64);
    let mut times = Vec::with_capacity(a.samples);
    let mut union_total = 0usize;
    let mut verified = true;
    for _ in 0..a.samples {
        let q = failure_query(&mut rng, n, k);
        let start = Instant::now();
        let (d, union) = match &oracle {
            OracleFile::Failure(f) => {
                let o = f.query_with(q.u, q.v, &q.failed, strategy)?;
                (o.distance, o.stats.union_vertices)
            }
            OracleFile::Tradeoff(t) => {
                let o = t.query_with(q.u, q.v, &q.failed, strategy)?;
                (o.distance, o.stats.union_vertices)
            }
        };
        times.push(start.elapsed().as_secs_f64() * 1e6);
        union_total += union;
        verified &= d == distance_avoiding(g, q.u, q.v, &q.failed)?;
    }
    let samples = a.samples.max(1) as f64;
    let mean_query_us = times.iter().sum::<f64>() / samples;
    times.sort_by(f64::total_cmp);
    Ok(BenchRecord {
        n,
        r,
        k,
        build_ms,
        bytes_on_disk,
        mean_query_us,
        p95_query_us: percentile(&times, 0.95),
        union_vertex_count_mean: union_total as f64 / samples,
        verified,
    })
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    let strategy = check_strategy(a.strategy)?;
    if a.mode == Mode::Tradeoff && a.r.is_empty() {
        return Err(Failure::Usage("--mode tradeoff requires --r".into()));
    }
    let mut records = Vec::new();
    for &side in &a.sides {
        let g = grid(
            side,
            side,
            WeightMode::SeededRandom {
                max_weight: 100,
                seed: a.seed,
            },
        )?;
        let n = g.vertex_count();
        for &k in &a.k {
            match a.mode {
                Mode::Failure => records.push(bench_one(&g, a.mode, None, k, &a, strategy)?),
                Mode::Tradeoff => {
                    let marked =
                        planar_fto::decomposition::r_sequence(n, a.leaf_size, DEFAULT_BASE);
                    for &r in &a.r {
                        if !marked.contains(&r) || k > n / r {
                            eprintln!("skipping n={n} r={r} k={k}: r not marked or k > n/r");
                            continue;
                        }
                        records.push(bench_one(&g, a.mode, Some(r), k, &a, strategy)?);
                    }
                }
            }
        }
    }
    let all_verified = records.iter().all(|r| r.verified);
    let mut out = output(a.out.as_deref())?;
    match a.format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in &records {
                w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.flush().map_err(|e| Failure::Io(e.to_string()))?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &BenchReport { records })
                .map_err(|e| Failure::Io(e.to_string()))?;
            writeln!(out).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    flush(out)?;
    if all_verified {
        Ok(())
    } else {
        Err(Failure::Mismatch(
            "some sampled queries disagree with brute force".into(),
        ))
    }
}

fn cmd_dyn(a: DynArgs) -> CliResult {
    let g = read_graph(&a.graph)?;
    let mut text = String::new();
    open(&a.script)?
        .read_to_string(&mut text)
        .map_err(|e| io_err(&a.script, e))?;
    let lines = parse_script(&text)?;
    let mut o = DynamicOracle::new(&g, a.r)?;
    let answers = run_script(&mut o, &lines)?;
    let mut out = output(a.out.as_deref())?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["line", "u", "v", "distance"])
            .map_err(|e| Failure::Io(e.to_string()))?;
        for ans in &answers {
            w.write_record([
                ans.line.to_string(),
                ans.u.to_string(),
                ans.v.to_string(),
                show(ans.distance),
            ])
            .map_err(|e| Failure::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Failure::Io(e.to_string()))?;
    }
    flush(out)
}

fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var("PLANAR_ORACLE_THREADS") else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(t) if t > 0 => {
            par::init_global(t);
            Ok(())
        }
        _ => Err(Failure::Usage(format!(
            "PLANAR_ORACLE_THREADS must be a positive integer, got {raw:?}"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Dyn(a) => cmd_dyn(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("planar-oracle: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
