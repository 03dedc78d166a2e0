use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hm_cli::parse_expression;
use hm_core::haar::{estimate_moment, DEFAULT_SEED};
use hm_core::moments::{timed, MomentOptions, DEFAULT_GUARD};
use hm_core::verify::{abs_square_catalog, balanced_specs, oracle_agreement, path_agreement, VerifyReport};
use hm_core::weingarten::weingarten_table;
use hm_core::{convergence_scan, exact_moment, predict, Error, SingularPolicy};

/// Exact Weingarten calculus and trace-word moments of Haar unitaries.
#[derive(Parser)]
#[command(name = "hm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct ExactArgs {
    /// Refuse enumerations with more permutation tuples than this.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
    /// Use the group inverse of Φ when some generator occurs more than N times.
    #[arg(long)]
    pseudo_inverse: bool,
}

impl ExactArgs {
    fn options(&self) -> MomentOptions {
        let policy = if self.pseudo_inverse {
            SingularPolicy::PseudoInverse
        } else {
            SingularPolicy::Reject
        };
        MomentOptions::default().with_guard(self.guard).with_singular(policy)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Weingarten function W^N on the conjugacy classes of S_n.
    WgTable {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        dim: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact Haar moment of a trace expression.
    Moment {
        #[arg(long = "N")]
        dim: u64,
        #[command(flatten)]
        exact: ExactArgs,
        expr: String,
    },
    /// Large-N limit of a trace expression.
    Asymptotic { expr: String },
    /// Exact moments over several N against the large-N limit.
    Scan {
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        dims: Vec<u64>,
        #[command(flatten)]
        exact: ExactArgs,
        expr: String,
    },
    /// Monte Carlo estimate of a trace expression.
    Mc {
        #[arg(long = "N")]
        dim: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        expr: String,
    },
    /// Cross-check the exact engine against the entry oracle and the
    /// mirror-pairing path.
    Verify {
        /// Letter budget for both catalogues (default 5 for the oracle, 8
        /// for path agreement).
        #[arg(long)]
        max_letters: Option<usize>,
        /// Dimensions for both checks (default 2,3 and 3,5).
        #[arg(long = "N-list", value_delimiter = ',')]
        dims: Option<Vec<u64>>,
    },
}

enum Failure {
    Refused(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } | Error::Singular { .. } => Failure::Refused(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn wg_table(n: usize, dim: u64, format: Format) -> Result<Output, Failure> {
    let table = weingarten_table(n, dim)?;
    match format {
        Format::Json => Ok(Output::Json(table.to_json())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Usage(e.to_string());
            w.write_record(["cycle_type", "num", "den"]).map_err(io)?;
            for (ct, v) in table.classes().iter().zip(table.values()) {
                w.write_record([ct.to_string(), v.numer().to_string(), v.denom().to_string()])
                    .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Output::Text(String::from_utf8_lossy(&bytes).into_owned()))
        }
    }
}

fn verify(max_letters: Option<usize>, dims: Option<Vec<u64>>) -> Result<Output, Failure> {
    let oracle_letters = max_letters.unwrap_or(5);
    let path_letters = max_letters.unwrap_or(8);
    let oracle_dims = dims.clone().unwrap_or_else(|| vec![2, 3]);
    let path_dims = dims.unwrap_or_else(|| vec![3, 5]);
    if oracle_dims.contains(&0) {
        return Err(Failure::Usage("N must be at least 1".into()));
    }
    let mut report = VerifyReport::default();
    oracle_agreement(&balanced_specs(2, oracle_letters), &oracle_dims, &mut report);
    path_agreement(&abs_square_catalog(2, path_letters), &path_dims, &mut report);
    let mut value = serde_json::to_value(&report).map_err(|e| Failure::Usage(e.to_string()))?;
    value["ok"] = report.ok().into();
    if report.ok() {
        Ok(Output::Json(value))
    } else {
        println!("{value}");
        Err(Failure::Refused(format!("{} verification failures", report.failures.len())))
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    Ok(match command {
        Command::WgTable { n, dim, format } => return wg_table(n, dim, format),
        Command::Moment { dim, exact, expr } => {
            let e = parse_expression(&expr)?;
            let (result, ms) = timed(|| exact_moment(&e.spec, dim, &exact.options()));
            Output::Json(result?.to_json(&e.render(), ms))
        }
        Command::Asymptotic { expr } => {
            let e = parse_expression(&expr)?;
            let p = predict(&e.spec);
            Output::Json(json!({
                "spec": e.render(),
                "predicted": p.value_json(),
                "balanced": p.balanced,
            }))
        }
        Command::Scan { dims, exact, expr } => {
            let e = parse_expression(&expr)?;
            if dims.contains(&0) {
                return Err(Failure::Usage("N must be at least 1".into()));
            }
            let report = convergence_scan(&e.spec, &dims, &exact.options());
            let failed = report.rows.iter().find_map(|r| r.error.clone());
            let value = report.to_json(&e.render());
            match failed {
                Some(msg) => {
                    println!("{value}");
                    return Err(Failure::Refused(msg));
                }
                None => Output::Json(value),
            }
        }
        Command::Mc { dim, samples, seed, expr } => {
            let e = parse_expression(&expr)?;
            let est = estimate_moment(&e.spec, dim, samples, seed)?;
            let mut value = est.to_json();
            value["spec"] = e.render().into();
            value["N"] = dim.into();
            Output::Json(value)
        }
        Command::Verify { max_letters, dims } => return verify(max_letters, dims),
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("HM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli.command));
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(Output::Json(v)) => {
            let _ = writeln!(stdout, "{v}");
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            let _ = write!(stdout, "{t}");
            ExitCode::SUCCESS
        }
        Err(Failure::Refused(msg)) => {
            eprintln!("hm: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("hm: {msg}");
            ExitCode::from(2)
        }
    }
}
