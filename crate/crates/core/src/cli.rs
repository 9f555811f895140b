//! Command-line front end. [`run`] returns the process exit code: 0 when every
//! check passes, 1 when one fails, 2 for usage and I/O errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::pencil::{generate, InvariantPencil};
use crate::report::{is_check_id, run_checks, CheckConfig, CheckReport, CHECK_IDS};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "CLIFFNET_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "cliffnet", version, about = "Exact checks for σ-invariant nets of quadrics and their Clifford algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance that passes the genericity scans.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Run the full suite on an instance, or a single check by id.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Instance file, or a check id followed by an optional instance file.
    target: String,
    instance: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "101,103,107")]
    primes: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long = "max-degree", default_value_t = 6)]
    max_degree: u32,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn configure_workers() {
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // A pool may already exist when running inside tests; that is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_instance(path: &Path) -> Result<InvariantPencil, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    InvariantPencil::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_gen(seed: u64, bound: i64, out: &Path) -> i32 {
    let pencil = match generate(seed, bound) {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    if let Err(e) = std::fs::write(out, pencil.to_json_string()) {
        return usage_error(format!("{}: {e}", out.display()));
    }
    println!("{}", pencil.digest());
    0
}

fn emit(report: &CheckReport, args: &CheckArgs) -> i32 {
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return usage_error(format!("{}: {e}", path.display()));
        }
    }
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.render());
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn cmd_check(args: &CheckArgs) -> i32 {
    if args.primes.is_empty() || args.primes.iter().any(|&p| p < 5 || !crate::exactalg::fp::is_prime(p)) {
        return usage_error("--primes must list primes ≥ 5");
    }
    if args.points == 0 {
        return usage_error("--points must be positive");
    }
    if args.max_degree > 8 {
        return usage_error("--max-degree is capped at 8");
    }
    let cfg = CheckConfig { primes: args.primes.clone(), points: args.points, max_degree: args.max_degree };
    let (ids, instance): (Vec<&str>, Option<&Path>) = if is_check_id(&args.target) {
        (vec![args.target.as_str()], args.instance.as_deref())
    } else if args.instance.is_some() {
        return usage_error(format!("unknown check id `{}`", args.target));
    } else {
        (CHECK_IDS.to_vec(), Some(Path::new(&args.target)))
    };
    let pencil = match instance.map(load_instance).transpose() {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    match run_checks(&ids, pencil.as_ref(), &cfg) {
        Ok(report) => emit(&report, args),
        Err(e) => usage_error(e),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_workers();
    match &cli.command {
        Command::Gen { seed, bound, out } => cmd_gen(*seed, *bound, out),
        Command::Check(args) => cmd_check(args),
    }
}
