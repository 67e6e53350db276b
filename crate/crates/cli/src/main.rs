//! Batch front end for the exact verification toolkit: builds and checks
//! sphere covers, constructs and searches subset-lattice colorings, runs
//! seeded replication experiments, and computes interpolation constants.
//!
//! Exit codes: 0 = success/verified, 1 = a mathematical check failed,
//! 2 = input or limit error. Identical invocations (same flags and seed)
//! produce byte-identical structured reports; `--threads` bounds the worker
//! pool without affecting any result. Rationals cross the interface only as
//! `p/q` strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use bu_lab_core::caps::Caps;
use bu_lab_core::covers::{build_closed_cover, build_mixed_cover, cover_report, CoverReport};
use bu_lab_core::gamma::{
    check_gamma_realizable, find_independent_pattern, gamma_interpolation, GammaError,
    PatternMatrix,
};
use bu_lab_core::kneser::{
    max_chain_colors, search_min_chain_colors, sharp_kneser_coloring, verify_kneser,
    KneserColoring, SearchVerdict, MAX_COLORING_N,
};
use bu_lab_core::learning::{
    chain_distribution, powerset_class, projection_class, replication_experiment, sample_size_for,
    ConceptClass, ExampleDistribution, ReplicationConfig, ReplicationReport,
};
use bu_lab_core::ratio::{format_ratio, parse_ratio, ratio, Ratio};
use bu_lab_core::simplicial::t_threshold;
use bu_lab_core::subsets::parse_chain;

#[derive(Parser)]
#[command(
    name = "bu-lab",
    version,
    about = "Exact sphere-cover, lattice-coloring, and replication experiments"
)]
struct Cli {
    /// Seed for every randomized step; identical seeds reproduce reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Report format; structured output is stable byte-for-byte.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Bound the worker-thread pool (default: all cores). Never affects
    /// results, only wall time.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a sphere cover, then verify coverage, overlap, and freeness.
    Cover {
        /// Which family to build.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Sphere dimension d.
        #[arg(long)]
        dim: usize,
    },
    /// Subset-lattice colorings under the disjointness constraint.
    Kneser {
        #[command(subcommand)]
        sub: KneserCmd,
    },
    /// Draw-and-learn replication experiment over a finite concept class.
    Learn {
        /// Concept class spec: `projection:m` or `powerset:m`.
        #[arg(long)]
        class: String,
        /// Distribution spec: `chain:{…};(…)`, `pointmass:{x,y}`, or
        /// `file:<path>`.
        #[arg(long)]
        dist: String,
        /// Loss tolerance as `p/q` in (0,1).
        #[arg(long)]
        e: String,
        /// Failure probability as `p/q` in (0,1).
        #[arg(long)]
        delta: String,
        /// Number of independent draw-and-learn rounds.
        #[arg(long)]
        trials: u32,
    },
    /// Interpolation constant of a ±1 pattern, with realizability check.
    Gamma {
        /// Read an explicit matrix from a JSON file `{"rows":[[1,-1],…]}`.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["class", "d"])]
        file: Option<PathBuf>,
        /// Extract the pattern greedily from this class instead.
        #[arg(long, requires = "d")]
        class: Option<String>,
        /// Pattern size for class mode.
        #[arg(long, requires = "class")]
        d: Option<usize>,
        /// Random distributions probed by the realizability check.
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Constant to check against (default: the computed one).
        #[arg(long, value_name = "P/Q")]
        gamma_prime: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Closed,
    Mixed,
}

#[derive(Subcommand)]
enum KneserCmd {
    /// Emit the min-element construction and its worst maximal chain.
    Sharp {
        /// Ground set size.
        #[arg(long)]
        n: u32,
    },
    /// Check a coloring file for validity and its worst chain.
    Verify {
        /// JSON file `{"n":3,"colors":{"1":1,"1,2":0,…}}`.
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
    },
    /// Exhaustively search for a coloring with at most k chain colors.
    Search {
        /// Ground set size (capped; see BU_LAB_CAPS).
        #[arg(long)]
        n: u32,
        /// Largest allowed number of distinct colors per maximal chain.
        #[arg(long)]
        k: u32,
        /// Node budget before the search gives up.
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
}

/// A failure that ends the run without a report: 2 for input and limit
/// errors, 1 for failed checks that have no report to carry them.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

/// A finished run: the structured document, its text rendering, and the
/// exit code implied by the checks.
struct Outcome {
    doc: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("error: the thread pool is already initialized");
            return ExitCode::from(2);
        }
    }
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &caps) {
        Ok(outcome) => {
            if let Err(f) = emit(&cli, &outcome, started) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli, caps: &Caps) -> Result<Outcome, Failure> {
    match &cli.command {
        Cmd::Cover { kind, dim } => cmd_cover(*kind, *dim, caps),
        Cmd::Kneser { sub } => match sub {
            KneserCmd::Sharp { n } => cmd_kneser_sharp(*n),
            KneserCmd::Verify { file } => cmd_kneser_verify(file),
            KneserCmd::Search { n, k, budget } => cmd_kneser_search(*n, *k, *budget, caps),
        },
        Cmd::Learn {
            class,
            dist,
            e,
            delta,
            trials,
        } => cmd_learn(class, dist, e, delta, *trials, cli.seed, caps),
        Cmd::Gamma {
            file,
            class,
            d,
            trials,
            gamma_prime,
        } => cmd_gamma(
            file.as_deref(),
            class.as_deref(),
            *d,
            *trials,
            gamma_prime.as_deref(),
            cli.seed,
            caps,
        ),
    }
}

fn emit(cli: &Cli, outcome: &Outcome, started: Instant) -> Result<(), Failure> {
    let body = match cli.format {
        Format::Structured => {
            let mut s =
                serde_json::to_string_pretty(&outcome.doc).expect("report documents serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            format!(
                "{}wall_time_ms: {}\n",
                outcome.text,
                started.elapsed().as_millis()
            )
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

// ---------- cover ----------

fn cmd_cover(kind: KindArg, dim: usize, caps: &Caps) -> Result<Outcome, Failure> {
    let cover = match kind {
        KindArg::Closed => build_closed_cover(dim, caps),
        KindArg::Mixed => build_mixed_cover(dim, caps),
    }
    .map_err(|e| Failure::input(e.to_string()))?;
    let report = cover_report(&cover).map_err(|e| Failure::input(e.to_string()))?;

    let t = t_threshold(dim);
    let expected = match kind {
        KindArg::Closed => t,
        KindArg::Mixed => t.div_ceil(2),
    };
    let mut failed: Vec<&str> = Vec::new();
    if !report.cover {
        failed.push("cover");
    }
    if report.overlap_degree != expected {
        failed.push("overlap_degree");
    }
    if !report.antipodal_free {
        failed.push("antipodal_free");
    }

    let text = cover_text(&report, expected, &failed);
    let doc = json!({
        "command": "cover",
        "report": serde_json::to_value(&report).expect("report serializes"),
        "checks": {
            "expected_overlap": expected,
            "cover": report.cover,
            "overlap_ok": report.overlap_degree == expected,
            "antipodal_free": report.antipodal_free,
        },
        "failed_checks": failed,
    });
    let code = if failed.is_empty() { 0 } else { 1 };
    Ok(Outcome { doc, text, code })
}

fn cover_text(r: &CoverReport, expected: u32, failed: &[&str]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command: cover");
    let _ = writeln!(s, "kind: {}", r.kind);
    let _ = writeln!(s, "d: {}", r.d);
    let _ = writeln!(s, "set_count: {}", r.set_count);
    let _ = writeln!(s, "simplex_counts: {:?}", r.simplex_counts);
    let _ = writeln!(s, "cover: {}", r.cover);
    let _ = writeln!(
        s,
        "overlap_degree: {} (expected {expected})",
        r.overlap_degree
    );
    let _ = writeln!(s, "witness: {}", r.witness);
    let _ = writeln!(s, "antipodal_free: {}", r.antipodal_free);
    let _ = writeln!(s, "{}", check_summary(failed));
    s
}

fn check_summary(failed: &[&str]) -> String {
    if failed.is_empty() {
        "checks: all passed".to_string()
    } else {
        format!("checks: FAILED {}", failed.join(", "))
    }
}

// ---------- kneser ----------

fn cmd_kneser_sharp(n: u32) -> Result<Outcome, Failure> {
    if !(1..=MAX_COLORING_N).contains(&n) {
        return Err(Failure::input(format!(
            "n must lie in 1..={MAX_COLORING_N}, got {n}"
        )));
    }
    let coloring = sharp_kneser_coloring(n);
    let (max, witness) = max_chain_colors(&coloring);
    let colors = coloring.to_map();

    let mut text = String::new();
    let _ = writeln!(text, "command: kneser sharp");
    let _ = writeln!(text, "n: {n}");
    let _ = writeln!(text, "colors_used: {}", coloring.colors_used());
    let _ = writeln!(text, "max_chain_colors: {max}");
    let _ = writeln!(text, "witness_chain: {witness}");
    let _ = writeln!(text, "colors:");
    for (set, color) in &colors {
        let _ = writeln!(text, "  {{{set}}}: {color}");
    }

    let doc = json!({
        "command": "kneser-sharp",
        "n": n,
        "colors_used": coloring.colors_used(),
        "max_chain_colors": max,
        "witness_chain": witness.to_string(),
        "colors": colors,
    });
    Ok(Outcome { doc, text, code: 0 })
}

#[derive(Deserialize)]
struct ColoringFile {
    n: u32,
    colors: BTreeMap<String, u32>,
}

fn cmd_kneser_verify(path: &Path) -> Result<Outcome, Failure> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let file: ColoringFile = serde_json::from_str(&raw)
        .map_err(|e| Failure::input(format!("cannot parse {}: {e}", path.display())))?;
    let coloring = KneserColoring::from_map(file.n, &file.colors)
        .map_err(|e| Failure::input(e.to_string()))?;

    let verdict = verify_kneser(&coloring);
    let (max, witness) = max_chain_colors(&coloring);
    let violation = verdict.as_ref().err().map(|v| {
        json!({
            "color": v.color,
            "sets": v.sets.iter().map(|s| s.key()).collect::<Vec<_>>(),
        })
    });

    let mut text = String::new();
    let _ = writeln!(text, "command: kneser verify");
    let _ = writeln!(text, "n: {}", file.n);
    let _ = writeln!(text, "valid: {}", verdict.is_ok());
    if let Err(v) = &verdict {
        let sets: Vec<String> = v.sets.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(
            text,
            "violation: sets {} share color {}",
            sets.join(" "),
            v.color
        );
    }
    let _ = writeln!(text, "colors_used: {}", coloring.colors_used());
    let _ = writeln!(text, "max_chain_colors: {max}");
    let _ = writeln!(text, "witness_chain: {witness}");

    let doc = json!({
        "command": "kneser-verify",
        "n": file.n,
        "valid": verdict.is_ok(),
        "violation": violation,
        "colors_used": coloring.colors_used(),
        "max_chain_colors": max,
        "witness_chain": witness.to_string(),
    });
    let code = if verdict.is_ok() { 0 } else { 1 };
    Ok(Outcome { doc, text, code })
}

fn cmd_kneser_search(n: u32, k: u32, budget: u64, caps: &Caps) -> Result<Outcome, Failure> {
    let outcome =
        search_min_chain_colors(n, k, budget, caps).map_err(|e| Failure::input(e.to_string()))?;
    let (verdict, coloring, code) = match &outcome.verdict {
        SearchVerdict::Feasible(c) => ("feasible", Some(c.to_map()), 0),
        SearchVerdict::Infeasible => ("infeasible", None, 0),
        // No definitive answer within the node budget: a limit, not a result.
        SearchVerdict::BudgetExceeded => ("budget-exceeded", None, 2),
    };

    let mut text = String::new();
    let _ = writeln!(text, "command: kneser search");
    let _ = writeln!(text, "n: {n}");
    let _ = writeln!(text, "k: {k}");
    let _ = writeln!(text, "budget: {budget}");
    let _ = writeln!(text, "nodes: {}", outcome.nodes);
    let _ = writeln!(text, "verdict: {verdict}");
    if let Some(map) = &coloring {
        let _ = writeln!(text, "coloring:");
        for (set, color) in map {
            let _ = writeln!(text, "  {{{set}}}: {color}");
        }
    }

    let doc = json!({
        "command": "kneser-search",
        "n": n,
        "k": k,
        "budget": budget,
        "nodes": outcome.nodes,
        "verdict": verdict,
        "coloring": coloring,
    });
    Ok(Outcome { doc, text, code })
}

// ---------- learn ----------

fn parse_class(spec: &str, caps: &Caps) -> Result<(ConceptClass, u32), Failure> {
    let (family, m) = spec
        .split_once(':')
        .ok_or_else(|| Failure::input(format!("class spec {spec:?}: expected family:m")))?;
    let m: u32 = m
        .parse()
        .map_err(|_| Failure::input(format!("class spec {spec:?}: m must be an integer")))?;
    let class = match family {
        "projection" => projection_class(m, caps),
        "powerset" => powerset_class(m, caps),
        other => {
            return Err(Failure::input(format!(
                "unknown class family {other:?}: expected projection or powerset"
            )))
        }
    }
    .map_err(|e| Failure::input(e.to_string()))?;
    Ok((class, m))
}

#[derive(Deserialize)]
struct DistFile {
    domain_size: usize,
    atoms: Vec<(usize, bool, String)>,
}

/// Parse a distribution spec against a class: `chain:{…};(…)` lives on the
/// cube domain of the class parameter `m`, `pointmass:{x,y}` names a domain
/// point literally (y is 0, 1, or both-labels), and `file:<path>` reads
/// explicit atoms `{"domain_size":N,"atoms":[[x,y,"p/q"],…]}`.
fn parse_dist(
    spec: &str,
    class: &ConceptClass,
    m: u32,
    caps: &Caps,
) -> Result<ExampleDistribution, Failure> {
    let bad = |what: &str| Failure::input(format!("distribution spec {spec:?}: {what}"));
    if let Some(rest) = spec.strip_prefix("chain:") {
        let (chain_part, weight_part) = rest
            .split_once(';')
            .ok_or_else(|| bad("expected chain:{…};(…)"))?;
        let chain_inner = chain_part
            .strip_prefix('{')
            .and_then(|p| p.strip_suffix('}'))
            .ok_or_else(|| bad("chain must be wrapped in braces"))?;
        let chain = parse_chain(chain_inner).map_err(|e| bad(&e.to_string()))?;
        let weight_inner = weight_part
            .strip_prefix('(')
            .and_then(|p| p.strip_suffix(')'))
            .ok_or_else(|| bad("weights must be wrapped in parentheses"))?;
        let weights = weight_inner
            .split(',')
            .map(parse_ratio)
            .collect::<Result<Vec<Ratio>, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        let cd = chain_distribution(m, chain, weights, caps)
            .map_err(|e| Failure::input(e.to_string()))?;
        return Ok(cd.distribution());
    }
    if let Some(rest) = spec.strip_prefix("pointmass:") {
        let inner = rest
            .strip_prefix('{')
            .and_then(|p| p.strip_suffix('}'))
            .ok_or_else(|| bad("expected pointmass:{x,y}"))?;
        let (x, y) = inner
            .split_once(',')
            .ok_or_else(|| bad("expected pointmass:{x,y}"))?;
        let idx = class
            .domain()
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| bad(&format!("unknown domain point {x:?}")))?;
        let dist = match y {
            "0" => ExampleDistribution::point_mass(class.domain_size(), idx, false),
            "1" => ExampleDistribution::point_mass(class.domain_size(), idx, true),
            "both-labels" => ExampleDistribution::new(
                class.domain_size(),
                vec![((idx, false), ratio(1, 2)), ((idx, true), ratio(1, 2))],
            )
            .expect("two half masses form a distribution"),
            other => {
                return Err(bad(&format!(
                    "label {other:?}: expected 0, 1, or both-labels"
                )))
            }
        };
        return Ok(dist);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let raw = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {path}: {e}")))?;
        let file: DistFile = serde_json::from_str(&raw)
            .map_err(|e| Failure::input(format!("cannot parse {path}: {e}")))?;
        let atoms = file
            .atoms
            .into_iter()
            .map(|(x, y, p)| {
                parse_ratio(&p)
                    .map(|p| ((x, y), p))
                    .map_err(|e| bad(&e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return ExampleDistribution::new(file.domain_size, atoms)
            .map_err(|e| Failure::input(e.to_string()));
    }
    Err(bad("expected chain:, pointmass:, or file:"))
}

fn cmd_learn(
    class_spec: &str,
    dist_spec: &str,
    e: &str,
    delta: &str,
    trials: u32,
    seed: u64,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    let (class, m) = parse_class(class_spec, caps)?;
    let e = parse_ratio(e).map_err(|err| Failure::input(format!("e: {err}")))?;
    let delta = parse_ratio(delta).map_err(|err| Failure::input(format!("delta: {err}")))?;
    let dist = parse_dist(dist_spec, &class, m, caps)?;
    let m_dom = class.domain_size() as u64;
    let n = sample_size_for(&e, &delta, m_dom).map_err(|err| Failure::input(err.to_string()))?;
    let cfg = ReplicationConfig {
        e: e.clone(),
        delta,
        n,
        trials,
        seed,
    };
    let report = replication_experiment(&class, &dist, dist_spec, &cfg)
        .map_err(|err| Failure::input(err.to_string()))?;

    // The verified claims: the high-probability list stays within
    // 1+⌊m/2⌋ hypotheses, and everything listed has population loss within
    // (2M+4)·e of perfect.
    let list_bound = 1 + report.m as usize / 2;
    let loss_bound = ratio(2 * m_dom as i64 + 4, 1) * &e;
    let list_ok = report.list_size <= list_bound;
    let losses_ok = report.list.iter().all(|label| {
        parse_ratio(&report.losses[label]).expect("reported losses parse") <= loss_bound
    });
    let mut failed: Vec<&str> = Vec::new();
    if !list_ok {
        failed.push("list_size");
    }
    if !losses_ok {
        failed.push("losses");
    }

    let text = learn_text(&report, list_bound, &loss_bound, &failed);
    let doc = json!({
        "command": "learn",
        "report": serde_json::to_value(&report).expect("report serializes"),
        "checks": {
            "list_size_bound": list_bound,
            "list_size_ok": list_ok,
            "loss_bound": format_ratio(&loss_bound),
            "losses_ok": losses_ok,
        },
        "failed_checks": failed,
    });
    let code = if failed.is_empty() { 0 } else { 1 };
    Ok(Outcome { doc, text, code })
}

fn learn_text(
    r: &ReplicationReport,
    list_bound: usize,
    loss_bound: &Ratio,
    failed: &[&str],
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command: learn");
    let _ = writeln!(s, "class: {} ({} hypotheses)", r.class, r.m);
    let _ = writeln!(s, "dist: {}", r.dist);
    let _ = writeln!(
        s,
        "e: {}  delta: {}  n: {}  trials: {}  seed: {}",
        r.e, r.delta, r.n, r.trials, r.seed
    );
    let _ = writeln!(s, "frequencies:");
    for (label, count) in &r.frequencies {
        let _ = writeln!(s, "  {label}: {count} (loss {})", r.losses[label]);
    }
    let _ = writeln!(
        s,
        "list ({} of bound {list_bound}): {}",
        r.list_size,
        r.list.join(" ")
    );
    let _ = writeln!(s, "max_frequency: {}", r.max_frequency);
    let _ = writeln!(s, "fallback_trials: {}", r.fallback_trials);
    let _ = writeln!(s, "loss_bound: {}", format_ratio(loss_bound));
    let _ = writeln!(s, "{}", check_summary(failed));
    s
}

// ---------- gamma ----------

#[derive(Deserialize)]
struct MatrixFile {
    rows: Vec<Vec<i8>>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_gamma(
    file: Option<&Path>,
    class_spec: Option<&str>,
    d: Option<usize>,
    trials: u32,
    gamma_prime: Option<&str>,
    seed: u64,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    let (source, pattern, hyps, points) = match (file, class_spec) {
        (Some(path), None) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            let file: MatrixFile = serde_json::from_str(&raw)
                .map_err(|e| Failure::input(format!("cannot parse {}: {e}", path.display())))?;
            let pattern = PatternMatrix::new(file.rows).map_err(|e| match e {
                GammaError::Singular => Failure::check(e.to_string()),
                other => Failure::input(other.to_string()),
            })?;
            (format!("file:{}", path.display()), pattern, None, None)
        }
        (None, Some(spec)) => {
            let (class, _) = parse_class(spec, caps)?;
            let r = d.expect("clap enforces --d with --class");
            let (hyps, points, pattern) = find_independent_pattern(&class, r).ok_or_else(|| {
                Failure::check(format!(
                    "no independent pattern of size {r} exists in {spec}"
                ))
            })?;
            (spec.to_string(), pattern, Some(hyps), Some(points))
        }
        _ => return Err(Failure::input("pass exactly one of --file or --class")),
    };

    let g = gamma_interpolation(&pattern).map_err(|e| match e {
        GammaError::Singular => Failure::check(e.to_string()),
        other => Failure::input(other.to_string()),
    })?;
    let gamma_prime = match gamma_prime {
        Some(s) => parse_ratio(s).map_err(|e| Failure::input(format!("gamma-prime: {e}")))?,
        None => g.gamma.clone(),
    };
    let check = check_gamma_realizable(&pattern, &gamma_prime, trials, seed);
    let violation = check.as_ref().err().map(|v| {
        json!({
            "labels": v.labels,
            "q": v.q.iter().map(format_ratio).collect::<Vec<_>>(),
            "max_corr": format_ratio(&v.max_corr),
        })
    });

    let mut text = String::new();
    let _ = writeln!(text, "command: gamma");
    let _ = writeln!(text, "source: {source}");
    let _ = writeln!(text, "size: {}", pattern.size());
    for row in pattern.rows() {
        let _ = writeln!(text, "  {row:?}");
    }
    if let (Some(h), Some(p)) = (&hyps, &points) {
        let _ = writeln!(text, "hypotheses: {h:?}");
        let _ = writeln!(text, "points: {p:?}");
    }
    let _ = writeln!(text, "gamma: {}", format_ratio(&g.gamma));
    let _ = writeln!(text, "argmin_labels: {:?}", g.argmin_labels);
    let alpha: Vec<String> = g.alpha.iter().map(format_ratio).collect();
    let _ = writeln!(text, "alpha: [{}]", alpha.join(", "));
    let _ = writeln!(
        text,
        "check at {} (trials={trials}, seed={seed}): {}",
        format_ratio(&gamma_prime),
        if check.is_ok() { "pass" } else { "violation" }
    );
    if let Err(v) = &check {
        let q: Vec<String> = v.q.iter().map(format_ratio).collect();
        let _ = writeln!(
            text,
            "violation: labels {:?}, q [{}], best correlation {}",
            v.labels,
            q.join(", "),
            format_ratio(&v.max_corr)
        );
    }

    let doc = json!({
        "command": "gamma",
        "source": source,
        "d": pattern.size(),
        "rows": pattern.rows(),
        "hypotheses": hyps,
        "points": points,
        "gamma": format_ratio(&g.gamma),
        "argmin_labels": g.argmin_labels,
        "alpha": alpha_strings(&g.alpha),
        "gamma_prime": format_ratio(&gamma_prime),
        "trials": trials,
        "seed": seed,
        "check": if check.is_ok() { "pass" } else { "violation" },
        "violation": violation,
    });
    let code = if check.is_ok() { 0 } else { 1 };
    Ok(Outcome { doc, text, code })
}

fn alpha_strings(alpha: &[Ratio]) -> Vec<String> {
    alpha.iter().map(format_ratio).collect()
}
