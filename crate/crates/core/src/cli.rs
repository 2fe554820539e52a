//! The `laglab` command line.
//!
//! Exit codes: 0 ok, 1 other errors, 2 parse error, 3 degenerate solve,
//! 4 enumeration budget exceeded, 5 property failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::binom::binom;
use crate::bounds::{principal_domain, smooth_bound, SmoothBound};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{build_colex, Hypergraph};
use crate::io::{parse_hypergraph, to_json_string, HypergraphFile};
use crate::oracle::{brute_lambda, default_n_cap, local_search, SweepRecord, DEFAULT_BUDGET};
use crate::random::{random_hypergraph, random_weighting, rng};
use crate::solver::{ascent_step, solve_lagrangian, SolverConfig};
use crate::weighting::{gradient, is_legal, weight_poly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_PROPERTY: i32 = 5;

/// Slack for inequalities between two solver outputs.
const LAMBDA_SLACK: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(name = "laglab", version, about = "Lagrangians of uniform hypergraphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "LAGLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (sweep defaults to all cores, other commands to 1).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Dirichlet restarts per solve.
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Convergence tolerance of the solver.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Vertex budget for sweeps (default: smallest t with C(t,r) >= m, plus 2).
    #[arg(long, global = true)]
    pub n_cap: Option<u32>,
    /// Maximum number of graphs enumerated per sweep cell.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Output file (lambda, colex, bound) or directory (sweep, verify-lemmas).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Lagrangian of a hypergraph file and print its certificate.
    Lambda { file: PathBuf },
    /// Write the colex hypergraph C_{r,m}.
    Colex {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u64,
    },
    /// Exhaustive lambda_r(m) for a range of m, as JSON lines plus a CSV summary.
    Sweep {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m_min: u64,
        #[arg(long)]
        m_max: u64,
    },
    /// Closed-form predictions and bounds for lambda_r(m).
    Bound {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u64,
    },
    /// Randomized checks of the Lagrangian inequalities.
    VerifyLemmas {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Corrupts one check so the failure path can be exercised.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub rng_seed: u64,
    pub started_at: String,
    pub finished_at: String,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    fn start(command: &str, global: &GlobalArgs, extra: &[(&str, Value)]) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("restarts".into(), json!(global.restarts));
        parameters.insert("max_iters".into(), json!(global.max_iters));
        parameters.insert("tol".into(), json!(global.tol));
        for (k, v) in extra {
            parameters.insert((*k).into(), v.clone());
        }
        RunManifest {
            command: command.into(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            rng_seed: global.seed,
            started_at: now(),
            finished_at: String::new(),
        }
    }

    fn finish(mut self) -> Self {
        self.finished_at = now();
        self
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::DegenerateStart => EXIT_DEGENERATE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_OTHER,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("laglab: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    let default_jobs = match cli.command {
        Command::Sweep { .. } => std::thread::available_parallelism().map_or(1, |n| n.get()),
        _ => 1,
    };
    // fails only if a pool already exists, which is harmless
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(g.jobs.unwrap_or(default_jobs).max(1))
        .build_global();
    match &cli.command {
        Command::Lambda { file } => cmd_lambda(g, file),
        Command::Colex { r, m } => cmd_colex(g, *r, *m),
        Command::Sweep { r, m_min, m_max } => cmd_sweep(g, *r, *m_min, *m_max),
        Command::Bound { r, m } => cmd_bound(g, *r, *m),
        Command::VerifyLemmas { trials, inject_fault } => cmd_verify_lemmas(g, *trials, *inject_fault),
    }
}

fn solver_config(g: &GlobalArgs) -> Result<SolverConfig> {
    let cfg = SolverConfig {
        restarts: g.restarts,
        max_iters: g.max_iters,
        conv_tol: g.tol,
        rng_seed: g.seed,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    manifest: &'a RunManifest,
}

fn cmd_lambda(g: &GlobalArgs, file: &Path) -> Result<i32> {
    let manifest = RunManifest::start("lambda", g, &[("file", json!(file.display().to_string()))]);
    let text = fs::read_to_string(file)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", file.display()))))?;
    let graph = parse_hypergraph(&text)?;
    let cert = solve_lagrangian(&graph, &solver_config(g)?)?;
    let manifest = manifest.finish();
    emit(g.out.as_deref(), &to_json_string(&WithManifest { body: &cert, manifest: &manifest })?)?;
    Ok(EXIT_OK)
}

fn cmd_colex(g: &GlobalArgs, r: u32, m: u64) -> Result<i32> {
    if r < 2 || m == 0 {
        return Err(invalid("colex needs r >= 2 and m >= 1"));
    }
    let manifest = RunManifest::start("colex", g, &[("r", json!(r)), ("m", json!(m))]);
    let graph = build_colex(r, m)?;
    let manifest = manifest.finish();
    emit(g.out.as_deref(), &to_json_string(&HypergraphFile::new(&graph, Some(&manifest)))?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BoundReport {
    r: u32,
    m: u64,
    /// `None` in the gaps between principal-domain intervals.
    principal_domain: Option<DomainInterval>,
    predicted: Option<f64>,
    smooth_bound: SmoothBound,
    is_critical: bool,
    is_principal_case: bool,
}

#[derive(Serialize)]
struct DomainInterval {
    t: u32,
    lo: u128,
    hi: u128,
}

fn cmd_bound(g: &GlobalArgs, r: u32, m: u64) -> Result<i32> {
    let manifest = RunManifest::start("bound", g, &[("r", json!(r)), ("m", json!(m))]);
    let info = principal_domain(r, m)?;
    let interval = match info.t {
        Some(t) => {
            let (t64, r64) = (t as u64, r as u64);
            Some(DomainInterval {
                t,
                lo: binom(t64 - 1, r64)?,
                hi: binom(t64, r64)? - binom(t64 - 2, r64 - 2)?,
            })
        }
        None => None,
    };
    let report = BoundReport {
        r,
        m,
        principal_domain: interval,
        predicted: info.predicted_lambda,
        smooth_bound: smooth_bound(r, m)?,
        is_critical: info.is_critical,
        is_principal_case: info.is_principal_case,
    };
    let manifest = manifest.finish();
    emit(g.out.as_deref(), &to_json_string(&WithManifest { body: &report, manifest: &manifest })?)?;
    Ok(EXIT_OK)
}

fn csv_float(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.16e}"))
}

fn csv_flag(v: Option<bool>) -> String {
    v.map_or(String::new(), |b| b.to_string())
}

fn cmd_sweep(g: &GlobalArgs, r: u32, m_min: u64, m_max: u64) -> Result<i32> {
    if r < 2 || m_min == 0 || m_min > m_max {
        return Err(invalid("sweep needs r >= 2 and 1 <= m-min <= m-max"));
    }
    let Some(dir) = g.out.as_deref() else {
        return Err(invalid("sweep needs --out DIR"));
    };
    let mut manifest = RunManifest::start(
        "sweep",
        g,
        &[
            ("r", json!(r)),
            ("m_min", json!(m_min)),
            ("m_max", json!(m_max)),
            ("n_cap", json!(g.n_cap)),
            ("budget", json!(g.budget)),
        ],
    );
    let cfg = solver_config(g)?;
    let mut records = Vec::new();
    let mut budget_hit = false;
    for m in m_min..=m_max {
        let n_cap = match g.n_cap {
            Some(n) => n,
            None => default_n_cap(r, m)?,
        };
        let record = match brute_lambda(r, m, n_cap, &cfg, g.budget) {
            Ok(rec) => rec,
            Err(e @ Error::BudgetExceeded { .. }) => {
                log::warn!("r={r} m={m}: {e}; falling back to local search");
                budget_hit = true;
                local_search(r, m, n_cap, &cfg)?
            }
            Err(e) => return Err(e),
        };
        log::info!(
            "r={r} m={m} n_cap={n_cap}: lambda {:.17e} ({} graphs)",
            record.lambda_r,
            record.graphs_examined
        );
        records.push(record);
    }
    manifest = manifest.finish();

    fs::create_dir_all(dir)?;
    let stem = format!("sweep_r{r}_m{m_min}-{m_max}");
    let mut lines = String::new();
    for rec in &records {
        lines.push_str(&to_json_string(&WithManifest { body: rec, manifest: &manifest })?);
        lines.push('\n');
    }
    fs::write(dir.join(format!("{stem}.jsonl")), lines)?;
    write_summary(&dir.join(format!("{stem}.csv")), &records, &manifest)?;
    Ok(if budget_hit { EXIT_BUDGET } else { EXIT_OK })
}

fn write_summary(path: &Path, records: &[SweepRecord], manifest: &RunManifest) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "# manifest: {}", to_json_string(manifest)?)?;
    let mut w = csv::Writer::from_writer(file);
    let to_io = |e: csv::Error| Error::Io(e.into());
    w.write_record([
        "r", "m", "t", "predicted", "lambda_r", "exhaustive", "conjecture_ok", "x_sorted_ok",
        "x1_bound_ok", "xk_bounds_ok", "covers_pairs", "support_equals_t",
        "lemma2iii_max_violation",
    ])
    .map_err(to_io)?;
    for rec in records {
        let a = &rec.audit;
        w.write_record([
            rec.r.to_string(),
            rec.m.to_string(),
            rec.t.map_or(String::new(), |t| t.to_string()),
            csv_float(rec.predicted),
            csv_float(Some(rec.lambda_r)),
            rec.exhaustive.to_string(),
            rec.conjecture_ok.to_string(),
            a.x_sorted_ok.to_string(),
            csv_flag(a.x1_bound_ok),
            csv_flag(a.xk_bounds_ok),
            a.covers_pairs.to_string(),
            csv_flag(a.support_equals_t),
            csv_float(Some(a.lemma2iii_max_violation)),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// A failing instance, written so that it can be fed back to `laglab lambda`.
struct Counterexample {
    graph: Hypergraph,
    weighting: Option<Vec<f64>>,
    detail: String,
}

type Check = Result<Option<Counterexample>>;

struct Suite {
    name: &'static str,
    trial: fn(&mut rand_chacha::ChaCha8Rng, &SolverConfig, bool) -> Check,
}

const SUITES: &[Suite] = &[
    Suite { name: "euler_identity", trial: euler_trial },
    Suite { name: "edge_monotonicity", trial: edge_trial },
    Suite { name: "vertex_deletion", trial: deletion_trial },
    Suite { name: "link_bound", trial: link_trial },
    Suite { name: "gluing", trial: glue_trial },
    Suite { name: "compression", trial: compression_trial },
    Suite { name: "ascent_step", trial: ascent_trial },
];

fn instance<R: Rng>(rng: &mut R, r_range: std::ops::RangeInclusive<u32>, p_max: f64) -> Hypergraph {
    let r = rng.random_range(r_range);
    let n = rng.random_range(r + 1..=7);
    let p = rng.random_range(0.1..p_max);
    random_hypergraph(rng, r, n, p)
}

fn fail(graph: &Hypergraph, weighting: Option<Vec<f64>>, detail: String) -> Check {
    Ok(Some(Counterexample { graph: graph.clone(), weighting, detail }))
}

fn euler_trial(rng: &mut rand_chacha::ChaCha8Rng, _: &SolverConfig, fault: bool) -> Check {
    let g = instance(rng, 2..=4, 0.8);
    let x = random_weighting(rng, g.n() as usize);
    let w = weight_poly(&g, &x)?;
    let mut lhs: f64 = gradient(&g, &x)?.iter().zip(&x).map(|(d, xi)| d * xi).sum();
    if fault {
        lhs += 1e-3;
    }
    let rhs = g.r() as f64 * w;
    if (lhs - rhs).abs() > 1e-12 * rhs.max(1.0) {
        return fail(&g, Some(x), format!("sum x_i d_i w = {lhs:e}, r w = {rhs:e}"));
    }
    Ok(None)
}

fn edge_trial(rng: &mut rand_chacha::ChaCha8Rng, cfg: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 2..=4, 0.7);
    let non_edges = g.non_edges();
    if non_edges.is_empty() {
        return Ok(None);
    }
    let f = non_edges[rng.random_range(0..non_edges.len())].clone();
    let bigger = Hypergraph::new(g.r(), g.n(), g.edges().cloned().chain([f]))?;
    let (a, b) = (solve_lagrangian(&g, cfg)?.lambda, solve_lagrangian(&bigger, cfg)?.lambda);
    if b < a - LAMBDA_SLACK {
        return fail(&g, None, format!("adding an edge lowered lambda from {a:e} to {b:e}"));
    }
    Ok(None)
}

fn deletion_trial(rng: &mut rand_chacha::ChaCha8Rng, cfg: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 2..=4, 0.5);
    let pairs = g.uncovered_pairs();
    if pairs.is_empty() {
        return Ok(None);
    }
    let (i, j) = pairs[rng.random_range(0..pairs.len())];
    let whole = solve_lagrangian(&g, cfg)?.lambda;
    let without_i = solve_lagrangian(&g.delete_vertex(i)?, cfg)?.lambda;
    let without_j = solve_lagrangian(&g.delete_vertex(j)?, cfg)?.lambda;
    if whole > without_i.max(without_j) + LAMBDA_SLACK {
        return fail(
            &g,
            None,
            format!("uncovered pair ({i},{j}): lambda {whole:e} > max({without_i:e}, {without_j:e})"),
        );
    }
    Ok(None)
}

fn link_trial(rng: &mut rand_chacha::ChaCha8Rng, cfg: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 2..=4, 0.8);
    let x = random_weighting(rng, g.n() as usize);
    let i = rng.random_range(1..=g.n());
    let link = g.link(&[i])?;
    let lhs = weight_poly(&link, &x)?;
    let rhs = (1.0 - x[i as usize - 1]).powi(g.r() as i32 - 1) * solve_lagrangian(&link, cfg)?.lambda;
    if lhs > rhs + LAMBDA_SLACK {
        return fail(&g, Some(x), format!("vertex {i}: w(G_i, x) = {lhs:e} > {rhs:e}"));
    }
    Ok(None)
}

fn glue_trial(rng: &mut rand_chacha::ChaCha8Rng, cfg: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 3..=4, 0.6);
    let pairs = g.uncovered_pairs();
    if pairs.is_empty() || g.m() == 0 {
        return Ok(None);
    }
    let (i, j) = pairs[rng.random_range(0..pairs.len())];
    let glued = g.glue(i, j)?;
    let (a, b) = (solve_lagrangian(&g, cfg)?.lambda, solve_lagrangian(&glued, cfg)?.lambda);
    if a > b + LAMBDA_SLACK || glued.m() > g.m() {
        return fail(
            &g,
            None,
            format!("glue({i},{j}): lambda {a:e} -> {b:e}, edges {} -> {}", g.m(), glued.m()),
        );
    }
    Ok(None)
}

fn compression_trial(rng: &mut rand_chacha::ChaCha8Rng, cfg: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 2..=4, 0.7);
    let i = rng.random_range(1..g.n());
    let j = rng.random_range(i + 1..=g.n());
    let shifted = g.compress(i, j)?;
    let (a, b) = (solve_lagrangian(&g, cfg)?.lambda, solve_lagrangian(&shifted, cfg)?.lambda);
    if b < a - LAMBDA_SLACK || shifted.m() != g.m() {
        return fail(&g, None, format!("compress({i},{j}): lambda {a:e} -> {b:e}"));
    }
    Ok(None)
}

fn ascent_trial(rng: &mut rand_chacha::ChaCha8Rng, _: &SolverConfig, _: bool) -> Check {
    let g = instance(rng, 2..=4, 0.8);
    let x = random_weighting(rng, g.n() as usize);
    let before = weight_poly(&g, &x)?;
    if before <= 0.0 {
        return Ok(None);
    }
    let y = ascent_step(&g, &x)?;
    let after = weight_poly(&g, &y)?;
    if !is_legal(&y) || after < before - 1e-12 {
        return fail(&g, Some(x), format!("ascent step moved w from {before:e} to {after:e}"));
    }
    Ok(None)
}

#[derive(Serialize)]
struct SuiteResult {
    name: &'static str,
    trials: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<String>,
}

#[derive(Serialize)]
struct CounterexampleFile<'a> {
    r: u32,
    n: u32,
    edges: Vec<&'a [u32]>,
    weighting: Option<&'a [f64]>,
    suite: &'a str,
    detail: &'a str,
    manifest: &'a RunManifest,
}

fn cmd_verify_lemmas(g: &GlobalArgs, trials: usize, inject_fault: bool) -> Result<i32> {
    if trials == 0 {
        return Err(invalid("verify-lemmas needs --trials >= 1"));
    }
    let mut params = vec![("trials", json!(trials))];
    if inject_fault {
        params.push(("inject_fault", json!(true)));
    }
    let manifest = RunManifest::start("verify-lemmas", g, &params);
    let cfg = solver_config(g)?;
    let mut outcomes = Vec::new();
    for (k, suite) in SUITES.iter().enumerate() {
        let mut stream = rng(g.seed, k as u64);
        let mut found = None;
        let mut run = 0;
        while run < trials && found.is_none() {
            found = (suite.trial)(&mut stream, &cfg, inject_fault)?;
            run += 1;
        }
        outcomes.push((suite.name, run, found));
    }
    let manifest = manifest.finish();

    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut results = Vec::new();
    let mut failed = false;
    for (name, run, found) in outcomes {
        let (failure, counterexample) = match found {
            None => (None, None),
            Some(c) => {
                failed = true;
                fs::create_dir_all(&dir)?;
                let path = dir.join(format!("counterexample_{name}.json"));
                let file = CounterexampleFile {
                    r: c.graph.r(),
                    n: c.graph.n(),
                    edges: c.graph.edges().map(|e| e.vertices()).collect(),
                    weighting: c.weighting.as_deref(),
                    suite: name,
                    detail: &c.detail,
                    manifest: &manifest,
                };
                fs::write(&path, format!("{}\n", to_json_string(&file)?))?;
                eprintln!("laglab: {name} failed: {} (dumped to {})", c.detail, path.display());
                (Some(c.detail), Some(path.display().to_string()))
            }
        };
        results.push(SuiteResult { name, trials: run, passed: failure.is_none(), failure, counterexample });
    }
    let report = json!({ "suites": results, "manifest": manifest });
    let text = to_json_string(&report)?;
    match &g.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("verify_lemmas.json"), format!("{text}\n"))?;
        }
        None => emit(None, &text)?,
    }
    Ok(if failed { EXIT_PROPERTY } else { EXIT_OK })
}

