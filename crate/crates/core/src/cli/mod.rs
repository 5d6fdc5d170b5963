//! The `ruinlab` command line.
//!
//! ```text
//! ruinlab estimate --model M.json --tilt T.json --u 0,5,10 --K 100000 --seed 1
//! ruinlab table table1 --K 100000 --seed 42
//! ruinlab check --model M.json [--tilt T.json]
//! ```
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 tilt not
//! admissible, 4 step cap exceeded.

pub mod tables;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::engine::{
    estimate_psi, estimate_psi_finite, estimate_psi_threshold, EstimateReport, SimConfig,
    DEFAULT_MAX_STEPS,
};
use crate::error::Error;
use crate::lundberg;
use crate::tilting::{
    check_admissible, hazard_r_max, Admissibility, ModelConfig, RiskModel, Tilt, TiltConfig,
    TiltingPair,
};

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_STEP_CAP: i32 = 4;

/// Worker cap read from the environment.
pub const THREADS_ENV: &str = "RUINLAB_THREADS";

pub const CSV_COLUMNS: [&str; 10] = [
    "u",
    "estimate",
    "std_error",
    "rse",
    "are",
    "ess",
    "max_norm_weight",
    "K",
    "seed",
    "runtime_seconds",
];

#[derive(Debug, Parser)]
#[command(
    name = "ruinlab",
    version,
    about = "Importance-sampling ruin probabilities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate ψ(u) over a grid of initial reserves.
    Estimate(EstimateArgs),
    /// Rerun one of the built-in benchmark tables.
    Table(TableArgs),
    /// Print analytic diagnostics of a model and optionally a tilt.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub tilt: PathBuf,
    /// Comma-separated ascending list of initial reserves.
    #[arg(long = "u", allow_hyphen_values = true)]
    pub u: String,
    #[arg(long = "K", visible_alias = "k")]
    pub k: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run an inadmissible tilt anyway (finite-time mode only).
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// table1 … table5.
    pub name: String,
    #[arg(long = "K", visible_alias = "k")]
    pub k: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub tilt: Option<PathBuf>,
    /// Reserves at which to print exact ruin probabilities.
    #[arg(long = "u", allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Also print `quantity,value` lines.
    #[arg(long)]
    pub csv: bool,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn inadmissible(adm: &Admissibility, tilt: &Tilt) -> Self {
        Self {
            code: EXIT_INADMISSIBLE,
            message: format!(
                "tilt {tilt} is not admissible: c*E_Q[W] = {} > E_Q[X] = {}",
                fmt_num(adm.lhs),
                fmt_num(adm.rhs)
            ),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StepCapExceeded { .. } => EXIT_STEP_CAP,
            Error::NonFiniteMoment(_) => EXIT_INADMISSIBLE,
            _ => EXIT_CONFIG,
        };
        let message = match e {
            Error::NetProfitViolated { lhs, rhs } => format!(
                "net profit condition fails: c*E[W] = {} <= E[X] = {}",
                fmt_num(lhs),
                fmt_num(rhs)
            ),
            other => other.to_string(),
        };
        Self { code, message }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Scientific notation that parses back to the same `f64` and shows at
/// least six significant digits.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let shortest = format!("{x:e}");
    let mantissa = shortest.split('e').next().unwrap_or("");
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    if digits >= 6 {
        shortest
    } else {
        format!("{x:.5e}")
    }
}

/// Parses `"0,1,2.5"` into an ascending list of nonnegative reserves.
pub fn parse_u_grid(text: &str) -> CliResult<Vec<f64>> {
    let mut grid = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let u: f64 = part
            .parse()
            .map_err(|_| Failure::config(format!("invalid reserve {part:?}")))?;
        if !(u.is_finite() && u >= 0.0) {
            return Err(Failure::config(format!(
                "reserves must be finite and >= 0, got {u}"
            )));
        }
        grid.push(u);
    }
    if grid.is_empty() {
        return Err(Failure::config("the u grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Failure::config("the u grid must be ascending"));
    }
    Ok(grid)
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("cannot parse {what} {}: {e}", path.display())))
}

fn load_model(path: &Path) -> CliResult<RiskModel> {
    let cfg: ModelConfig = read_json(path, "model config")?;
    Ok(cfg.build()?)
}

fn load_pair(path: &Path, model: &RiskModel) -> CliResult<TiltingPair> {
    let cfg: TiltConfig = read_json(path, "tilt config")?;
    Ok(cfg.build(model)?)
}

fn csv_row(prefix: Option<&str>, r: &EstimateReport, runtime: bool) -> String {
    let mut fields: Vec<String> = prefix.map(|p| vec![p.to_string()]).unwrap_or_default();
    fields.extend([
        fmt_num(r.u),
        fmt_num(r.estimate),
        fmt_num(r.std_error),
        fmt_num(r.rse),
        r.are.map(fmt_num).unwrap_or_default(),
        fmt_num(r.ess),
        fmt_num(r.max_norm_weight),
        r.k.to_string(),
        r.seed.to_string(),
        if runtime {
            fmt_num(r.runtime_seconds)
        } else {
            String::new()
        },
    ]);
    fields.join(",")
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_IO,
        message: format!("write failed: {e}"),
    };
    match out {
        Some(path) => fs::write(path, text).map_err(io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            stdout.flush().map_err(io)
        }
    }
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let grid = parse_u_grid(&args.u)?;
    let model = load_model(&args.model)?;
    let pair = load_pair(&args.tilt, &model)?;
    if args.horizon.is_some() && args.threshold.is_some() {
        return Err(Failure::config(
            "--horizon and --threshold cannot be combined",
        ));
    }
    let adm = check_admissible(&pair)?;
    eprintln!(
        "tilt {}: c*E_Q[W] = {}, E_Q[X] = {}",
        pair.tilt(),
        fmt_num(adm.lhs),
        fmt_num(adm.rhs)
    );
    if !adm.in_c_p {
        let finite_ok = args.horizon.is_some() && (args.force || pair.is_identity());
        if !finite_ok {
            if args.force {
                eprintln!("--force only applies to finite-time runs (--horizon)");
            }
            return Err(Failure::inadmissible(&adm, &pair.tilt()));
        }
    }
    let mut text = CSV_COLUMNS.join(",");
    text.push('\n');
    for &u in &grid {
        let mut cfg = SimConfig::new(u, args.k, args.seed).with_max_steps(args.max_steps);
        cfg.horizon = args.horizon;
        cfg.threshold = args.threshold;
        cfg.validate()?;
        let report = match (cfg.horizon, cfg.threshold) {
            (Some(_), _) => estimate_psi_finite(&pair, &cfg)?,
            (None, Some(b)) => {
                let r = estimate_psi_threshold(&pair, &cfg)?;
                match lundberg::exact_psi(&model, u - b) {
                    Some(psi) => r.with_exact(psi),
                    None => r,
                }
            }
            (None, None) => {
                let r = estimate_psi(&pair, &cfg)?;
                match lundberg::exact_psi(&model, u) {
                    Some(psi) => r.with_exact(psi),
                    None => r,
                }
            }
        };
        if report.exceeds_one {
            eprintln!(
                "warning: estimate {} at u = {u} exceeds one",
                fmt_num(report.estimate)
            );
        }
        text.push_str(&csv_row(None, &report, true));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

fn cmd_table(args: &TableArgs) -> CliResult<()> {
    let spec = tables::table_spec(&args.name)?;
    if args.k == 0 {
        return Err(Failure::config("K must be at least 1"));
    }
    let mut text = String::new();
    let _ = writeln!(text, "# {}: {}", spec.name, spec.description);
    for case in &spec.cases {
        let _ = writeln!(
            text,
            "# {}: claim {}, wait {}, premium {}, tilt {}",
            case.label,
            case.model.claim(),
            case.model.wait(),
            fmt_num(case.model.premium()),
            case.pair.tilt()
        );
    }
    let _ = writeln!(text, "config,{}", CSV_COLUMNS.join(","));
    let rows = tables::run_table(&spec, args.k, args.seed)?;
    let mut total = 0.0;
    for row in &rows {
        total += row.report.runtime_seconds;
        text.push_str(&csv_row(Some(&row.label), &row.report, false));
        text.push('\n');
    }
    eprintln!("{}: {} rows in {:.3} s", spec.name, rows.len(), total);
    emit(args.out.as_deref(), &text)
}

fn cmd_check(args: &CheckArgs) -> CliResult<()> {
    let cfg: ModelConfig = read_json(&args.model, "model config")?;
    let mut lines: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| lines.push((k.to_string(), v));
    push("claim", cfg.claim.to_string());
    push("wait", cfg.wait.to_string());
    push("E[X]", fmt_num(cfg.claim.mean()));
    push("E[W]", fmt_num(cfg.wait.mean()));
    let model = match cfg.build() {
        Ok(m) => m,
        Err(Error::NetProfitViolated { lhs, rhs }) => {
            push(
                "NPC",
                format!(
                    "violated (c*E[W] = {} <= E[X] = {})",
                    fmt_num(lhs),
                    fmt_num(rhs)
                ),
            );
            print_check(&lines, args.csv);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    push("c", fmt_num(model.premium()));
    push("loading", fmt_num(model.loading()));
    push(
        "NPC",
        format!(
            "holds (c*E[W] = {} > E[X] = {})",
            fmt_num(model.premium() * model.wait_mean()),
            fmt_num(model.claim_mean())
        ),
    );
    let describe = |e: Error| match e {
        Error::MgfUnavailable(_) => "unavailable (no mgf)".to_string(),
        Error::SecondMomentInfinite(_) => "unavailable (infinite second moment)".to_string(),
        Error::UnsupportedCombination(_) => {
            "unavailable (interarrival times not exponential)".to_string()
        }
        Error::NotFound(m) => format!("not found ({m})"),
        other => format!("unavailable ({other})"),
    };
    push(
        "rho",
        lundberg::lundberg_root(&model)
            .map(fmt_num)
            .unwrap_or_else(describe),
    );
    match lundberg::memm_point(&model) {
        Ok(p) => {
            push("r_memm", fmt_num(p.r));
            if let Some(c) = p.premium {
                push("c_memm", fmt_num(c));
            }
        }
        Err(e) => push("r_memm", describe(e)),
    }
    push(
        "xi_hat",
        lundberg::xi_hat(&model)
            .map(fmt_num)
            .unwrap_or_else(describe),
    );
    if let Ok(c) = lundberg::mmm_premium(&model) {
        push("c_mmm", fmt_num(c));
    }
    if let Some(text) = &args.u {
        for u in parse_u_grid(text)? {
            let v = lundberg::exact_psi(&model, u)
                .map(fmt_num)
                .unwrap_or_else(|| "unavailable".into());
            push(&format!("psi({})", fmt_num(u)), v);
        }
    } else if let Some(psi) = lundberg::exact_psi(&model, 0.0) {
        push("psi(0)", fmt_num(psi));
    }
    if let Some(path) = &args.tilt {
        let pair = load_pair(path, &model)?;
        let tilt = pair.tilt();
        push("tilt", tilt.to_string());
        if let Tilt::HazardTwist { theta, .. } = tilt {
            push(
                "r_M(theta)",
                hazard_r_max(&model, theta)
                    .map(fmt_num)
                    .unwrap_or_else(describe),
            );
        }
        push("Q_X", pair.tilted_claim_law().to_string());
        push("Q_W", pair.tilted_wait_law().to_string());
        match check_admissible(&pair) {
            Ok(adm) => {
                let verdict = if adm.in_c_p {
                    "in C_P".to_string()
                } else if pair.is_identity() {
                    "not in C_P (NPC holds)".to_string()
                } else {
                    "not in C_P".to_string()
                };
                push("C_P", verdict);
                push("c*E_Q[W]", fmt_num(adm.lhs));
                push("E_Q[X]", fmt_num(adm.rhs));
            }
            Err(e) => push("C_P", format!("not in C_P ({e})")),
        }
    }
    print_check(&lines, args.csv);
    Ok(())
}

fn print_check(lines: &[(String, String)], csv: bool) {
    for (k, v) in lines {
        println!("{k}: {v}");
    }
    if csv {
        println!("quantity,value");
        for (k, v) in lines {
            let v = if v.contains(',') {
                format!("\"{v}\"")
            } else {
                v.clone()
            };
            println!("{k},{v}");
        }
    }
}

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let run = || match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Table(a) => cmd_table(a),
        Command::Check(a) => cmd_check(a),
    };
    match thread_count()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::config(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.5, 2.0 / 3.0, 1e-11, 123456.0, 3.027e-5, 0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap();
            assert!(
                mantissa.chars().filter(char::is_ascii_digit).count() >= 6,
                "{s}"
            );
            assert!(s.contains('e'));
        }
    }

    #[test]
    fn u_grid_parsing() {
        assert_eq!(parse_u_grid("0, 1,2.5").unwrap(), vec![0.0, 1.0, 2.5]);
        assert_eq!(parse_u_grid("").unwrap_err().code, EXIT_CONFIG);
        assert_eq!(parse_u_grid("2,1").unwrap_err().code, EXIT_CONFIG);
        assert_eq!(parse_u_grid("-1").unwrap_err().code, EXIT_CONFIG);
        assert_eq!(parse_u_grid("x").unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn error_exit_codes() {
        let f: Failure = Error::StepCapExceeded {
            index: 3,
            max_steps: 10,
        }
        .into();
        assert_eq!(f.code, EXIT_STEP_CAP);
        let f: Failure = Error::NetProfitViolated { lhs: 1.0, rhs: 2.0 }.into();
        assert_eq!(f.code, EXIT_CONFIG);
        assert!(f.message.contains("1.00000e0"));
    }

    #[test]
    fn unknown_subcommand_is_config_error() {
        assert_eq!(run(["ruinlab", "frobnicate"]), EXIT_CONFIG);
        assert_eq!(
            run(["ruinlab", "table", "table9", "--K", "10", "--seed", "1"]),
            EXIT_CONFIG
        );
    }
}
