//! The `queens-lab` command line.
//!
//! By default a subcommand prints its payload as one line of JSON (or CSV
//! with `--format csv` where tables make sense). `--envelope` wraps it in a
//! [`CommandResult`]. Exit codes: 0 ok, 1 domain error or failed check,
//! 2 usage error. Nothing depends on the wall clock unless `--timing` is
//! given, so identical arguments give byte-identical output.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::board::{validate_classical, validate_toroidal, QueensConfig};
use crate::bounds::{
    abc_profile, classical_alpha, classical_bound_log, concentric_lower_bound, concentric_sum, queen_d_sum,
    torus_bound_log, AlphaMethod, DMatrix,
};
use crate::construction::{base_config, BaseParams};
use crate::counting::{count, enumerate_solutions, oracle_count_with, Mode};
use crate::error::{Error, Result};
use crate::flips::{apply_flips, enumerate_flips, greedy_disjoint_flips, lower_bound_log_count};
use crate::hypergraph::{count_perfect_matchings, entropy_bound_log, stats, Family};
use crate::limits::Limits;
use crate::verify::{run_verification_suite, Level};

#[derive(Debug, Parser)]
#[command(
    name = "queens-lab",
    version,
    about = "Exact n-queens counting, flip constructions and entropy bounds"
)]
pub struct Cli {
    /// Worker threads for counting and matching searches (results do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: Option<u64>,

    /// Wrap the payload in a command envelope with status and echoed parameters.
    #[arg(long, global = true)]
    envelope: bool,

    /// Report wall time on stderr (and in the envelope).
    #[arg(long, global = true)]
    timing: bool,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Classical,
    Toroidal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Toroidal => Mode::Toroidal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Torus,
    Transversal,
    Sudoku,
    Steiner,
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the base configuration for n = 4^k + 1.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Count or list the flips of the base configuration.
    Flips {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, conflicts_with = "count")]
        list: bool,
        #[arg(long)]
        count: bool,
    },
    /// Apply t greedily chosen disjoint flips to the base configuration.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Number of flips; defaults to floor(n / 16).
        #[arg(long)]
        t: Option<usize>,
        /// Shuffle the candidate order with this seed; without it the order is canonical.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count classical or toroidal solutions exactly.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value = "classical")]
        mode: ModeArg,
        /// Use the brute-force permutation oracle instead of backtracking.
        #[arg(long)]
        oracle: bool,
    },
    /// Check a config (from --in or stdin) for classical or toroidal validity.
    Validate {
        #[arg(long, value_enum, default_value = "toroidal")]
        mode: ModeArg,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Build a hypergraph family and report statistics, matchings or the entropy bound.
    Hg(HgArgs),
    /// Constants, ring matrices, row profiles and bound logs.
    Bounds(BoundsArgs),
    /// Run the self-check suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
    },
}

#[derive(Debug, Args)]
struct HgArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Family parameters as a JSON object, e.g. '{"n":5}' or '{"n":7,"q":3,"r":2}'.
    #[arg(long, default_value = "{}")]
    params: String,
    #[arg(long)]
    stats: bool,
    #[arg(long = "count-pm")]
    count_pm: bool,
    #[arg(long)]
    bound: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("action").required(true).args([
    "alpha", "torus_log", "classical_log", "dmatrix", "profile", "check_lemmas", "flip_lower_bound",
])))]
struct BoundsArgs {
    #[arg(long)]
    alpha: bool,
    #[arg(long = "torus-log", value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    torus_log: Option<u64>,
    #[arg(long = "classical-log", value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    classical_log: Option<u64>,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    dmatrix: Option<u64>,
    /// Row profiles of the config read from --in or stdin.
    #[arg(long)]
    profile: bool,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Check the profile identity and ring inequality on every classical solution of size --n.
    #[arg(long = "check-lemmas", requires = "n")]
    check_lemmas: bool,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Log of the greedy flip-collection lower bound for n = 4^k + 1.
    #[arg(long = "flip-lower-bound", value_name = "N")]
    flip_lower_bound: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub params: Value,
    pub status: Status,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// What the process should print and return.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Option<CommandResult>,
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

/// Command output before formatting: JSON payload, or preformatted text.
enum Rendered {
    Json(Value),
    Text(Value, String),
}

struct Failure {
    payload: Value,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            payload: Value::Null,
            error,
        }
    }
}

const DMATRIX_CAP: usize = 4096;

type CmdResult = std::result::Result<Rendered, Failure>;

pub fn dispatch<I, T>(args: I, stdin: &mut (dyn Read + Send)) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Outcome {
                result: None,
                stdout,
                stderr,
                exit_code: code,
            };
        }
    };
    let limits = match Limits::from_env() {
        Ok(l) => l,
        Err(e) => {
            return Outcome {
                result: None,
                stdout: String::new(),
                stderr: format!("{e}\n"),
                exit_code: 2,
            };
        }
    };
    let (name, params) = describe(&cli.command);
    let start = Instant::now();
    let mut run = || run_command(&cli.command, &limits, stdin);
    let outcome = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t as usize).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}")).into()),
        },
        None => run(),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let (status, payload, text, error) = match outcome {
        Ok(Rendered::Json(v)) => {
            let text = serde_json::to_string(&v).expect("payload serializes");
            (Status::Ok, v, text, None)
        }
        Ok(Rendered::Text(v, text)) => (Status::Ok, v, text, None),
        Err(f) => {
            let text = if f.payload.is_null() {
                String::new()
            } else {
                f.payload.to_string()
            };
            let info = ErrorInfo {
                code: f.error.code().to_string(),
                message: f.error.to_string(),
            };
            (Status::Error, f.payload, text, Some(info))
        }
    };
    let result = CommandResult {
        command: name.to_string(),
        params,
        status,
        payload,
        error: error.clone(),
        elapsed_ms: cli.timing.then_some(elapsed_ms),
    };
    let mut stdout = if cli.envelope {
        serde_json::to_string(&result).expect("envelope serializes")
    } else {
        text
    };
    if !stdout.is_empty() && !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    let mut stderr = String::new();
    if let Some(e) = &error {
        stderr.push_str(&json!({ "status": "error", "code": e.code, "message": e.message }).to_string());
        stderr.push('\n');
    }
    if cli.timing {
        stderr.push_str(&format!("elapsed: {elapsed_ms:.3} ms\n"));
    }
    if let Some(path) = &cli.out {
        if let Err(e) = fs::write(path, &stdout) {
            stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
            return Outcome {
                result: Some(result),
                stdout: String::new(),
                stderr,
                exit_code: 1,
            };
        }
        stdout.clear();
    }
    let exit_code = if status == Status::Ok { 0 } else { 1 };
    Outcome {
        result: Some(result),
        stdout,
        stderr,
        exit_code,
    }
}

fn describe(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Construct { k } => ("construct", json!({ "k": k })),
        Command::Flips { k, list, count } => ("flips", json!({ "k": k, "list": list, "count": count })),
        Command::Generate { k, t, seed } => ("generate", json!({ "k": k, "t": t, "seed": seed })),
        Command::Count { n, mode, oracle } => ("count", json!({ "n": n, "mode": Mode::from(*mode), "oracle": oracle })),
        Command::Validate { mode, input } => (
            "validate",
            json!({ "mode": Mode::from(*mode), "in": input.as_ref().map(|p| p.display().to_string()) }),
        ),
        Command::Hg(a) => (
            "hg",
            json!({
                "family": format!("{:?}", a.family).to_lowercase(),
                "params": a.params,
                "stats": a.stats,
                "count_pm": a.count_pm,
                "bound": a.bound,
            }),
        ),
        Command::Bounds(a) => (
            "bounds",
            json!({
                "alpha": a.alpha,
                "torus_log": a.torus_log,
                "classical_log": a.classical_log,
                "dmatrix": a.dmatrix,
                "profile": a.profile,
                "check_lemmas": a.check_lemmas,
                "n": a.n,
                "flip_lower_bound": a.flip_lower_bound,
            }),
        ),
        Command::Verify { level } => ("verify", json!({ "level": format!("{level:?}").to_lowercase() })),
    }
}

fn read_config(input: &Option<PathBuf>, stdin: &mut (dyn Read + Send)) -> Result<QueensConfig> {
    let text = match input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidArgument(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    QueensConfig::from_json(text.trim())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

fn run_command(cmd: &Command, limits: &Limits, stdin: &mut (dyn Read + Send)) -> CmdResult {
    match cmd {
        Command::Construct { k } => {
            let params = BaseParams::with_limits(*k, limits)?;
            Ok(Rendered::Json(to_json(&base_config(&params)?)))
        }
        Command::Flips { k, list, count: _ } => {
            let params = BaseParams::with_limits(*k, limits)?;
            let flips = enumerate_flips(&params)?;
            let mut payload = json!({ "k": k, "n": params.n, "count": flips.len() });
            if *list {
                payload["flips"] = flips
                    .iter()
                    .map(|f| json!({ "canonical_id": f.canonical_id(), "removed": f.removed(), "added": f.added() }))
                    .collect();
            }
            Ok(Rendered::Json(payload))
        }
        Command::Generate { k, t, seed } => {
            let params = BaseParams::with_limits(*k, limits)?;
            let t = t.unwrap_or(params.n / 16);
            let fs = greedy_disjoint_flips(&params, t, *seed)?;
            let config = apply_flips(&base_config(&params)?, &fs)?;
            Ok(Rendered::Json(json!({
                "k": k,
                "n": params.n,
                "t": t,
                "seed": seed,
                "config": config,
                "flips": fs.canonical_ids(),
            })))
        }
        Command::Count { n, mode, oracle } => {
            let n = usize::try_from(*n).map_err(|_| Error::InvalidArgument("n too large".into()))?;
            let mode = Mode::from(*mode);
            let result = if *oracle {
                let validator = match mode {
                    Mode::Classical => validate_classical,
                    Mode::Toroidal => validate_toroidal,
                };
                oracle_count_with(n, mode, limits, &|c| validator(c).is_valid)?
            } else {
                count(n, mode, limits)?
            };
            let mut payload = to_json(&result);
            payload["method"] = json!(if *oracle { "oracle" } else { "backtracking" });
            Ok(Rendered::Json(payload))
        }
        Command::Validate { mode, input } => {
            let config = read_config(input, stdin)?;
            let report = match Mode::from(*mode) {
                Mode::Classical => validate_classical(&config),
                Mode::Toroidal => validate_toroidal(&config),
            };
            Ok(Rendered::Json(to_json(&report)))
        }
        Command::Hg(args) => run_hg(args, limits),
        Command::Bounds(args) => run_bounds(args, limits, stdin),
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = run_verification_suite(level, limits);
            let payload = to_json(&report);
            if report.passed {
                Ok(Rendered::Json(payload))
            } else {
                let failed: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.clone())
                    .collect();
                Err(Failure {
                    payload,
                    error: Error::InvalidArgument(format!("verification failed: {}", failed.join("; "))),
                })
            }
        }
    }
}

fn run_hg(args: &HgArgs, limits: &Limits) -> CmdResult {
    let mut params: Value =
        serde_json::from_str(&args.params).map_err(|e| Error::InvalidArgument(format!("--params is not JSON: {e}")))?;
    let Some(obj) = params.as_object_mut() else {
        return Err(Error::InvalidArgument("--params must be a JSON object".into()).into());
    };
    obj.insert("family".into(), json!(format!("{:?}", args.family).to_lowercase()));
    let family: Family =
        serde_json::from_value(params).map_err(|e| Error::InvalidArgument(format!("bad family parameters: {e}")))?;
    let h = family.build(limits)?;
    if !(args.stats || args.count_pm || args.bound) {
        let v: Value = serde_json::from_str(&h.to_exchange_json()).expect("exchange JSON parses");
        return Ok(Rendered::Json(v));
    }
    let s = stats(&h);
    let mut payload = json!({ "family": family });
    if args.stats {
        payload["stats"] = to_json(&s);
    }
    let pm = if args.count_pm {
        let m = count_perfect_matchings(&h, limits)?;
        payload["perfect_matchings"] = to_json(&m);
        Some(m.count)
    } else {
        None
    };
    if args.bound {
        let b = entropy_bound_log(&s)?;
        payload["bound"] = to_json(&b);
        if let Some(c) = pm {
            // Reported, not asserted: the bound only holds up to a 1 + o(1) factor.
            payload["log_count"] = if c > 0 { json!((c as f64).ln()) } else { Value::Null };
            payload["log_ratio"] = if c > 0 && b.log_bound != 0.0 {
                json!((c as f64).ln() / b.log_bound)
            } else {
                Value::Null
            };
        }
    }
    Ok(Rendered::Json(payload))
}

fn run_bounds(args: &BoundsArgs, limits: &Limits, stdin: &mut (dyn Read + Send)) -> CmdResult {
    let as_usize = |v: u64| usize::try_from(v).map_err(|_| Error::InvalidArgument("value too large".into()));
    if args.alpha {
        let closed = classical_alpha(AlphaMethod::ClosedForm)?;
        let quad = classical_alpha(AlphaMethod::Quadrature)?;
        return Ok(Rendered::Json(json!({
            "closed_form": closed,
            "quadrature": quad,
            "difference": (closed - quad).abs(),
        })));
    }
    if let Some(n) = args.torus_log {
        return Ok(Rendered::Json(
            json!({ "n": n, "log_bound": torus_bound_log(as_usize(n)?) }),
        ));
    }
    if let Some(n) = args.classical_log {
        return Ok(Rendered::Json(
            json!({ "n": n, "log_bound": classical_bound_log(as_usize(n)?) }),
        ));
    }
    if let Some(n) = args.flip_lower_bound {
        return Ok(Rendered::Json(
            json!({ "n": n, "log_lower_bound": lower_bound_log_count(as_usize(n)?)? }),
        ));
    }
    if let Some(n) = args.dmatrix {
        let n = as_usize(n)?;
        // The matrix is closed-form, so it gets a size cap of its own rather than the search cap.
        if n > DMATRIX_CAP {
            return Err(Error::SizeLimit {
                what: "n",
                value: n as u64,
                cap: DMATRIX_CAP as u64,
            }
            .into());
        }
        let m = DMatrix::new(n)?;
        return Ok(match args.format {
            Format::Csv => Rendered::Text(to_json(&m), m.to_csv()),
            Format::Json => Rendered::Json(to_json(&m)),
        });
    }
    if args.profile {
        let config = read_config(&args.input, stdin)?;
        let profile = abc_profile(&config)?;
        return Ok(match args.format {
            Format::Csv => {
                let mut text = String::from("row,a,b,c\n");
                for p in &profile {
                    text.push_str(&format!("{},{},{},{}\n", p.row, p.a, p.b, p.c));
                }
                Rendered::Text(to_json(&profile), text)
            }
            Format::Json => Rendered::Json(to_json(&profile)),
        });
    }
    // --check-lemmas --n N
    let n = as_usize(args.n.expect("clap enforces --n"))?;
    let sols = enumerate_solutions(n, Mode::Classical, None, limits)?;
    let bound = concentric_lower_bound(n);
    let mut violations = Vec::new();
    for c in &sols {
        let profile = abc_profile(c)?;
        let lhs = concentric_sum(c)?;
        let rhs = queen_d_sum(c);
        let rows_ok = profile.iter().all(|p| p.a + p.b + p.c == n - 1);
        if lhs != rhs || (lhs as f64) < bound || !rows_ok {
            violations.push(json!({ "config": c, "sum": lhs, "d_sum": rhs, "rows_ok": rows_ok }));
        }
    }
    let payload = json!({
        "n": n,
        "solutions": sols.len(),
        "lower_bound": bound,
        "violations": violations,
    });
    if violations.is_empty() {
        Ok(Rendered::Json(payload))
    } else {
        Err(Failure {
            payload,
            error: Error::Internal(format!("{} solutions violate the lemmas", violations.len())),
        })
    }
}
