//! Command-line harness: runs solvers over seed lists, writes CSV traces and
//! a JSON report, and checks runs against the worst-case envelopes.
//!
//! Exit codes: 0 when every run converged inside its envelopes, 1 when some
//! run did not, 2 for invalid input (bad flags, unknown problem, missing
//! files), 3 when a solver failed hard.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::iteration_envelope;
use crate::config::SolverConfig;
use crate::driver::{run_with, Algorithm, IterationRecord, RunReport};
use crate::error::Error;
use crate::problems;

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_RUN: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "solsearch", version, about = "Second-order line-search solvers and complexity envelope checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Solve a suite problem for one or more seeds.
    Run(RunArgs),
    /// Compare the runs in a report against their worst-case bounds.
    Envelope(EnvelopeArgs),
    /// List the suite problems.
    ListProblems,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub problem: String,
    /// exact, exact-local or inexact
    #[arg(long, default_value = "exact")]
    pub algo: String,
    #[arg(long = "eps-g")]
    pub eps_g: Option<f64>,
    #[arg(long = "eps-H")]
    pub eps_h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Hessian norm bound for the inexact method (defaults to the declared one)
    #[arg(long = "hess-bound")]
    pub hess_bound: Option<f64>,
    /// Comma-separated seeds; an empty list runs nothing
    #[arg(long, default_value = "0")]
    pub seed: String,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    #[arg(long = "max-ls-steps")]
    pub max_ls_steps: Option<usize>,
    /// Keep iterating past a Newton-step certificate until the eigenvalue test passes
    #[arg(long)]
    pub strict_second_order: bool,
    /// Check each Lanczos estimate against a dense eigensolver
    #[arg(long)]
    pub audit_lanczos: bool,
    /// Flat `key = value` file with SolverConfig field names; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "SOLSEARCH_OUT", default_value = "solsearch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// Directory written by `run`
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// Overrides read from a configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub eps_g: Option<f64>,
    pub eps_h: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub delta: Option<f64>,
    pub hess_bound: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_ls_steps: Option<usize>,
    pub rng_seed: Option<u64>,
    pub strict_second_order: Option<bool>,
    pub audit_lanczos: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn apply(&self, cfg: &mut SolverConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(
            eps_g,
            eps_h,
            theta,
            eta,
            zeta,
            delta,
            max_iters,
            max_ls_steps,
            rng_seed,
            strict_second_order,
            audit_lanczos
        );
        if self.hess_bound.is_some() {
            cfg.hess_bound = self.hess_bound;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub trace: String,
    pub report: RunReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub problem: String,
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    pub runs: Vec<SeedRun>,
}

/// Column names of a trace file, in order.
pub const TRACE_COLUMNS: [&str; 21] = [
    "k",
    "phase",
    "x_norm",
    "f",
    "g_norm",
    "step_kind",
    "r",
    "lambda",
    "curvature",
    "j_k",
    "alpha",
    "decrease",
    "d_norm",
    "g_next_norm",
    "n_f",
    "n_grad",
    "n_hv",
    "n_hess",
    "lanczos_iters",
    "cg_iters",
    "fallback",
];

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed{seed}.csv")
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }
}

fn classify(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::UnknownProblem(_) | Error::MissingDenseHessian => EXIT_INVALID,
        _ => EXIT_SOLVER,
    }
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|e| format!("bad seed {t:?}: {e}")))
        .collect()
}

/// Base configuration: the problem's documented tolerances, then the
/// config file, then flags.
pub fn resolve_config(args: &RunArgs, base: SolverConfig) -> Result<SolverConfig, String> {
    let mut cfg = base;
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        ConfigFile::parse(&text)?.apply(&mut cfg);
    }
    macro_rules! flag {
        ($($f:ident),*) => { $(if let Some(v) = args.$f { cfg.$f = v; })* };
    }
    flag!(eps_g, eps_h, theta, eta, zeta, delta, max_iters, max_ls_steps);
    if args.hess_bound.is_some() {
        cfg.hess_bound = args.hess_bound;
    }
    cfg.strict_second_order |= args.strict_second_order;
    cfg.audit_lanczos |= args.audit_lanczos;
    Ok(cfg)
}

fn write_trace(path: &Path, rows: &[IterationRecord]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(TRACE_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let algo: Algorithm = args.algo.parse().map_err(|e: Error| Failure::invalid(e.to_string()))?;
    let problem = problems::by_id(&args.problem).map_err(|e| Failure { code: classify(&e), message: e.to_string() })?;
    let cfg = resolve_config(args, problem.config.clone()).map_err(Failure::invalid)?;
    let seeds = parse_seeds(&args.seed).map_err(Failure::invalid)?;
    let check = match algo {
        Algorithm::Inexact => cfg.validate_inexact(),
        _ => cfg.validate(),
    };
    check.map_err(|e| Failure::invalid(e.to_string()))?;
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::invalid(format!("cannot create {}: {e}", args.out.display())))?;

    let results: Vec<Result<SeedRun, Failure>> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = SolverConfig { rng_seed: seed, ..cfg.clone() };
            let mut rows = Vec::new();
            let report = run_with(problem.objective(), &problem.x0, &cfg, algo, &mut |r| rows.push(r.clone()))
                .map_err(|e| Failure { code: classify(&e), message: format!("seed {seed}: {e}") })?;
            let trace = trace_file_name(seed);
            write_trace(&args.out.join(&trace), &rows)
                .map_err(|e| Failure { code: EXIT_SOLVER, message: format!("writing {trace}: {e}") })?;
            Ok(SeedRun { seed, trace, report })
        })
        .collect();
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let file = ReportFile {
        schema_version: SCHEMA_VERSION,
        problem: problem.id.to_string(),
        algorithm: algo,
        config: cfg,
        runs,
    };
    let json = serde_json::to_string_pretty(&file).expect("report serializes");
    fs::write(args.out.join(REPORT_FILE), json + "\n")
        .map_err(|e| Failure { code: EXIT_SOLVER, message: format!("writing report: {e}") })?;

    let mut all_ok = true;
    for r in &file.runs {
        let env_ok = r.report.envelope.as_ref().is_none_or(|e| e.passed());
        let ok = r.report.status.is_converged() && env_ok;
        all_ok &= ok;
        let _ = writeln!(
            out,
            "seed {:>6}  status {:<17} iterations {:>6}  f {:.6e}  |g| {:.3e}  envelopes {}",
            r.seed,
            format!("{:?}", r.report.status),
            r.report.iterations,
            r.report.f_final,
            r.report.g_norm_final,
            if r.report.envelope.is_none() {
                "n/a"
            } else if env_ok {
                "ok"
            } else {
                "VIOLATED"
            }
        );
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED_RUN })
}

fn ratio(obs: f64, bound: f64) -> String {
    if bound > 0.0 {
        format!("{:.3e}", obs / bound)
    } else {
        "inf".into()
    }
}

fn cmd_envelope(args: &EnvelopeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let path = args.input.join(REPORT_FILE);
    let text =
        fs::read_to_string(&path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: ReportFile = serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("bad report: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Failure::invalid(format!("unsupported schema version {}", file.schema_version)));
    }
    for r in &file.runs {
        if !args.input.join(&r.trace).is_file() {
            return Err(Failure::invalid(format!("missing trace {}", r.trace)));
        }
    }

    let w = |out: &mut dyn Write, s: String| {
        let _ = writeln!(out, "{s}");
    };
    w(out, format!("problem {}  algorithm {}", file.problem, file.algorithm));
    w(
        out,
        format!(
            "{:>8} {:>10} {:>12} {:>10} {:>12} {:>10} {:>12} {:>10}  ok",
            "seed", "iters", "iter_bound", "ratio", "f_or_ops", "bound", "ratio", "neg_log"
        ),
    );
    let mut all_ok = true;
    for r in &file.runs {
        let Some(env) = &r.report.envelope else {
            w(out, format!("{:>8} {:>10} {:>12}", r.seed, r.report.iterations, "n/a"));
            continue;
        };
        let (obs, bound) = match file.algorithm {
            Algorithm::Inexact => (env.grad_hv_ops as f64, env.envelope.ops_bound),
            _ => (env.f_evals as f64, env.envelope.k_eval),
        };
        let ok = env.passed() && r.report.status.is_converged();
        all_ok &= ok;
        w(
            out,
            format!(
                "{:>8} {:>10} {:>12.4e} {:>10} {:>12} {:>10.4e} {:>12} {:>10}  {}",
                r.seed,
                env.iterations,
                env.iteration_bound,
                ratio(env.iterations as f64, env.iteration_bound),
                obs,
                bound,
                ratio(obs, bound),
                env.envelope.negative_eval_factor,
                if ok { "yes" } else { "NO" }
            ),
        );
    }

    if !file.runs.is_empty() {
        let problem = problems::by_id(&file.problem).map_err(|e| Failure::invalid(e.to_string()))?;
        if let Some(c) = problem.constants() {
            let f0 = problem.objective().value(&problem.x0);
            w(out, String::new());
            w(out, "tolerance scaling with eps_g = eps, eps_H = sqrt(eps)".into());
            w(
                out,
                format!(
                    "{:>8} {:>12} {:>12} {:>12} {:>12} {:>14}",
                    "eps", "max_term", "eps^-1.5", "K_iter", "K_hat", "ops_bound"
                ),
            );
            for eps in [1e-1, 1e-2, 1e-3] {
                let cfg = SolverConfig { eps_g: eps, eps_h: f64::sqrt(eps), ..file.config.clone() };
                let env = iteration_envelope(&c, &cfg, f0, problem.x0.len());
                w(
                    out,
                    format!(
                        "{:>8.0e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>14.4e}",
                        eps,
                        env.max_term,
                        f64::powf(eps, -1.5),
                        env.k_iter,
                        env.k_hat,
                        env.ops_bound
                    ),
                );
            }
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED_RUN })
}

fn cmd_list(out: &mut dyn Write) -> Result<i32, Failure> {
    for id in problems::IDS {
        let p = problems::by_id(id).map_err(|e| Failure { code: EXIT_SOLVER, message: e.to_string() })?;
        let kinds: Vec<&str> = p.branch_coverage.iter().map(|k| k.name()).collect();
        let _ = writeln!(out, "{:<24} n={:<3} {}  [{}]", p.id, p.x0.len(), p.description, kinds.join(", "));
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command, writing normal output to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Envelope(a) => cmd_envelope(a, out),
        Command::ListProblems => cmd_list(out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Parse
/// failures exit with [`EXIT_INVALID`]; help and version requests with 0.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_INVALID
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}
