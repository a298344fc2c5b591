use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use ulam_core::cache;
use ulam_core::gaps::{default_grid, gap_report, GapError};
use ulam_core::growth::periodic::EstimateError;
use ulam_core::growth::search::SearchError;
use ulam_core::signal::{nyquist_points, residue_histogram, scan, SignalError};
use ulam_core::steps::{LemmaReport, Verdict};
use ulam_core::{
    best_bound, check_eggleton, classify_steps, generate_fast, generate_oracle, growth_check, majorant,
    periodic_lower_bound, verify_lemmas, GenerationConfig, SearchOptions, SequenceError, StepKind, Target,
};

use crate::io::{cache_dir, create_parent, io_failure, load, output_path, report_sink, sink, write_json};
use crate::{BoundArgs, CacheFormat, Failure, GapsArgs, GenArgs, Outcome, ReportFormat, SignalArgs, StepsArgs, VerifyArgs};

fn csv_failure(err: csv::Error) -> Failure {
    io_failure(err)
}

fn generation_failure(err: SequenceError) -> Failure {
    match err {
        SequenceError::InvalidConfig(_) => Failure::Usage(err.to_string()),
        _ => Failure::Resource(err.to_string()),
    }
}

fn default_cache_name(args: &GenArgs) -> PathBuf {
    let target = match (args.count, args.limit) {
        (Some(n), _) => format!("n{n}"),
        (None, Some(v)) => format!("max{v}"),
        (None, None) => unreachable!("clap requires --count or --limit"),
    };
    let ext = match args.format {
        CacheFormat::Binary => "bin",
        CacheFormat::Text => "txt",
    };
    let name = PathBuf::from(format!("ulam-{}-{}-{target}.{ext}", args.first, args.second));
    cache_dir().map_or(name.clone(), |dir| dir.join(name))
}

#[derive(Serialize)]
struct GenSummary<'a> {
    path: &'a Path,
    first: u64,
    second: u64,
    count: usize,
    last: u64,
}

pub fn gen(args: GenArgs) -> Outcome {
    let target = match (args.count, args.limit) {
        (Some(n), _) => Target::Count(n),
        (None, Some(v)) => Target::Limit(v),
        (None, None) => unreachable!("clap requires --count or --limit"),
    };
    let config = GenerationConfig {
        first: args.first,
        second: args.second,
        target,
    };
    let seq = generate_fast(config).map_err(generation_failure)?;
    if args.check {
        let oracle = generate_oracle(config).map_err(generation_failure)?;
        if let Some(i) = seq.terms().iter().zip(oracle.terms()).position(|(a, b)| a != b) {
            return Err(Failure::Verification(format!("fast and literal generators differ at term {}", i + 1)));
        }
        if seq.len() != oracle.len() {
            return Err(Failure::Verification("fast and literal generators differ in length".into()));
        }
    }

    let path = match &args.out {
        Some(p) => output_path(p),
        None => default_cache_name(&args),
    };
    create_parent(&path)?;
    let written = match args.format {
        CacheFormat::Binary => cache::save(&seq, &path),
        CacheFormat::Text => std::fs::File::create(&path)
            .map_err(cache::CacheError::from)
            .and_then(|f| cache::write_text(&seq, std::io::BufWriter::new(f)).map_err(Into::into)),
    };
    written.map_err(|e| Failure::Resource(format!("{}: {e}", path.display())))?;

    let summary = GenSummary {
        path: &path,
        first: args.first,
        second: args.second,
        count: seq.len(),
        last: seq.last(),
    };
    write_json(&mut *sink(None)?, &summary)
}

#[derive(Serialize)]
struct StepRow {
    n: usize,
    a_n: u64,
    a_next: u64,
    kind: &'static str,
    pair_i: Option<usize>,
    pair_j: Option<usize>,
}

#[derive(Serialize)]
struct StepsJson {
    first_index: usize,
    tally: ulam_core::steps::StepTally,
    steps: Vec<StepRow>,
}

pub fn steps(args: StepsArgs) -> Outcome {
    let seq = load(&args.input)?;
    let trace = classify_steps(&seq).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows: Vec<StepRow> = trace
        .iter()
        .map(|(n, kind)| {
            let pair = match kind {
                StepKind::Other { pair } => *pair,
                _ => None,
            };
            StepRow {
                n,
                a_n: seq.term(n),
                a_next: seq.term(n + 1),
                kind: kind.label(),
                pair_i: pair.map(|p| p.0),
                pair_j: pair.map(|p| p.1),
            }
        })
        .collect();
    let tally = trace.tally();
    let mut out = report_sink(args.out.as_deref())?;
    match args.format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in &rows {
                w.serialize(row).map_err(csv_failure)?;
            }
            w.flush().map_err(io_failure)?;
            eprintln!(
                "steps {}..{}: eggleton={} type1={} type2={} other={}",
                trace.first_index,
                seq.len() - 1,
                tally.eggleton,
                tally.type1,
                tally.type2,
                tally.other
            );
        }
        ReportFormat::Json => write_json(
            &mut *out,
            &StepsJson {
                first_index: trace.first_index,
                tally,
                steps: rows,
            },
        )?,
    }
    out.flush().map_err(io_failure)
}

#[derive(Serialize)]
struct MajorantSummary {
    dominated: bool,
    error: Option<String>,
    /// Leading `b_n` that fit in 64 bits.
    exact_terms: usize,
    log2_last: Option<f64>,
}

#[derive(Serialize)]
struct GrowthSummary {
    base: f64,
    checked: usize,
    violations: usize,
    first_violation: Option<usize>,
}

#[derive(Serialize)]
struct VerifyReport {
    terms: usize,
    lemmas: LemmaReport,
    eggleton: Verdict,
    majorant: MajorantSummary,
    growth: Vec<GrowthSummary>,
    passed: bool,
}

/// Bases checked by `verify`.
const GROWTH_BASES: [f64; 2] = [1.454, 1.466];

pub fn verify(args: VerifyArgs) -> Outcome {
    let seq = load(&args.input)?;
    let cfg = seq.config();
    let fresh = generate_fast(GenerationConfig::count(seq.len()).with_seeds(cfg.first, cfg.second))
        .map_err(generation_failure)?;
    if let Some(i) = fresh.terms().iter().zip(seq.terms()).position(|(a, b)| a != b) {
        return Err(Failure::Resource(format!(
            "{}: term {} is {} but Ulam({}, {}) has {}; the cache is damaged",
            args.input.display(),
            i + 1,
            seq.terms()[i],
            cfg.first,
            cfg.second,
            fresh.terms()[i]
        )));
    }

    let lemmas = verify_lemmas(&seq).map_err(|e| Failure::Usage(e.to_string()))?;
    let eggleton = check_eggleton(&seq);
    let trace = classify_steps(&seq).map_err(|e| Failure::Usage(e.to_string()))?;
    let majorant = match majorant(&trace, &seq) {
        Ok(b) => {
            let undominated = b.first_undominated(&seq);
            MajorantSummary {
                dominated: undominated.is_none(),
                error: undominated.map(|n| format!("a_{n} > b_{n}")),
                exact_terms: b.exact_prefix().len(),
                log2_last: Some(b.log2(b.len())),
            }
        }
        Err(e) => MajorantSummary {
            dominated: false,
            error: Some(e.to_string()),
            exact_terms: 0,
            log2_last: None,
        },
    };
    let growth: Vec<GrowthSummary> = GROWTH_BASES
        .iter()
        .map(|&base| {
            let v = growth_check(&seq, base, 1);
            GrowthSummary {
                base,
                checked: v.checked,
                violations: v.violations.len(),
                first_violation: v.first_violation(),
            }
        })
        .collect();
    let passed = lemmas.passed() && eggleton.passed() && majorant.dominated && growth.iter().all(|g| g.violations == 0);

    let report = VerifyReport {
        terms: seq.len(),
        lemmas,
        eggleton,
        majorant,
        growth,
        passed,
    };
    write_json(&mut *sink(None)?, &report)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification("one or more checks failed".into()))
    }
}

fn search_failure(err: SearchError) -> Failure {
    match err {
        SearchError::Length(..) | SearchError::Threads(_) => Failure::Usage(err.to_string()),
        _ => Failure::Resource(err.to_string()),
    }
}

pub fn bound(args: BoundArgs) -> Outcome {
    if args.threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let options = SearchOptions::new(args.length, args.norm)
        .threads(args.threads)
        .prune(args.prune);
    let result = best_bound(options).map_err(search_failure)?;
    let mut out = sink(None)?;
    write_json(&mut *out, &result)?;
    if let Some(p) = args.lower_period {
        let lower = periodic_lower_bound(p).map_err(|e| match e {
            EstimateError::Search(s) => search_failure(s),
            other => Failure::Resource(other.to_string()),
        })?;
        write_json(&mut *out, &lower)?;
    }
    out.flush().map_err(io_failure)
}

#[derive(Serialize)]
struct GapRow {
    n: usize,
    delta: f64,
    c_log_n_over_n: f64,
    verdict: bool,
    #[serde(rename = "X")]
    x: u64,
    candidate_sums: u64,
    #[serde(rename = "analytic_X_bound")]
    analytic_x_bound: f64,
}

#[derive(Serialize)]
struct TailRow {
    n: usize,
    ell: u64,
    count: usize,
    bound: u64,
}

pub fn gaps(args: GapsArgs) -> Outcome {
    let seq = load(&args.input)?;
    let grid = if args.grid.is_empty() {
        default_grid(seq.len())
    } else {
        args.grid.clone()
    };
    if grid.is_empty() {
        return Err(Failure::Usage(format!("no grid point fits a sequence of {} terms", seq.len())));
    }
    let reports = gap_report(&seq, &grid, args.c).map_err(|e: GapError| Failure::Usage(e.to_string()))?;

    let mut out = report_sink(args.out.as_deref())?;
    match args.format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in &reports {
                w.serialize(GapRow {
                    n: r.n,
                    delta: r.delta,
                    c_log_n_over_n: r.rhs,
                    verdict: r.verdict,
                    x: r.blocking_pairs,
                    candidate_sums: r.candidate_sums,
                    analytic_x_bound: r.analytic_blocking_bound,
                })
                .map_err(csv_failure)?;
            }
            w.flush().map_err(io_failure)?;
        }
        ReportFormat::Json => write_json(&mut *out, &reports)?,
    }
    out.flush().map_err(io_failure)?;

    if let Some(path) = &args.tails {
        let mut w = csv::Writer::from_writer(report_sink(Some(path))?);
        for r in &reports {
            for t in &r.tail_counts {
                w.serialize(TailRow {
                    n: r.n,
                    ell: t.ell,
                    count: t.count,
                    bound: t.bound,
                })
                .map_err(csv_failure)?;
            }
        }
        w.flush().map_err(io_failure)?;
    }

    let misses: Vec<String> = reports.iter().filter(|r| !r.verdict).map(|r| r.n.to_string()).collect();
    if !misses.is_empty() {
        eprintln!("delta > {} ln(n)/n at n = {}", args.c, misses.join(", "));
    }
    match reports.iter().find(|r| !r.tails_hold) {
        Some(r) => Err(Failure::Verification(format!("tail count exceeds ell + 1 at n = {}", r.n))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ScanRow {
    alpha: f64,
    #[serde(rename = "S")]
    s: f64,
}

#[derive(Serialize)]
struct Peak {
    alpha_star: f64,
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Serialize)]
struct BinRow {
    bin_low: f64,
    bin_high: f64,
    count: u64,
}

/// Terms used by `signal` when `--n` is absent.
const DEFAULT_SIGNAL_TERMS: usize = 10_000;

fn signal_failure(err: SignalError) -> Failure {
    match err {
        SignalError::TooLarge(_) => Failure::Resource(err.to_string()),
        _ => Failure::Usage(err.to_string()),
    }
}

pub fn signal(args: SignalArgs) -> Outcome {
    let full = load(&args.input)?;
    let n = args.n.unwrap_or(full.len().min(DEFAULT_SIGNAL_TERMS));
    if n < 2 || n > full.len() {
        return Err(Failure::Usage(format!("--n must lie in [2, {}]", full.len())));
    }
    if args.bins == 0 {
        return Err(Failure::Usage("--bins must be at least 1".into()));
    }
    let seq = full.prefix(n).map_err(|e| Failure::Usage(e.to_string()))?;
    let points = args
        .grid_points
        .unwrap_or_else(|| nyquist_points(seq.last(), args.alpha_min, args.alpha_max));
    let result = scan(&seq, args.alpha_min, args.alpha_max, points).map_err(signal_failure)?;
    if result.coarse {
        eprintln!(
            "warning: grid spacing {} is wider than 1/(4 a_N) = {}; the peak may be missed",
            result.spacing,
            ulam_core::signal::nyquist_spacing(seq.last())
        );
    }
    let histogram = residue_histogram(&seq, result.alpha_star, args.bins).map_err(signal_failure)?;

    let dir = args.out_dir.clone().or_else(cache_dir).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Resource(format!("{}: {e}", dir.display())))?;

    let mut w = csv::Writer::from_writer(sink(Some(&dir.join("signal_scan.csv")))?);
    for (alpha, s) in result.grid() {
        w.serialize(ScanRow { alpha, s }).map_err(csv_failure)?;
    }
    w.flush().map_err(io_failure)?;

    let mut w = csv::Writer::from_writer(sink(Some(&dir.join("signal_histogram.csv")))?);
    for (i, &count) in histogram.counts.iter().enumerate() {
        let (bin_low, bin_high) = histogram.bin_edges(i);
        w.serialize(BinRow { bin_low, bin_high, count }).map_err(csv_failure)?;
    }
    w.flush().map_err(io_failure)?;

    let peak = Peak {
        alpha_star: result.alpha_star,
        s: result.s_star,
        n: result.n,
    };
    let mut f = sink(Some(&dir.join("signal_peak.json")))?;
    write_json(&mut *f, &peak)?;
    f.flush().map_err(io_failure)?;
    let mut out = sink(None)?;
    write_json(&mut *out, &peak)?;
    out.flush().map_err(io_failure)
}
