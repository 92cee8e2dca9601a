//! `ehrhart`: exact h*-polynomials, Ehrhart polynomials and sign-pattern
//! witnesses from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 search exhaustion,
//! 64 usage error, 65 precondition error.

mod bench;
mod commands;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehrhart_core::signpattern::Pattern;
use num_bigint::BigInt;

#[derive(Debug, Parser)]
#[command(name = "ehrhart", version, about = "Exact Ehrhart theory for lattice simplex families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// h*-polynomial of Δ(0,q)
    Hstar(HstarArgs),
    /// Characteristic polynomials L1, L2 or a closed-form special family
    Family(FamilyArgs),
    /// Eulerian polynomial A_d(x)
    Eulerian(EulerianArgs),
    /// The Eulerian simplex S_d(m)
    Sdm(SdmArgs),
    /// Ehrhart polynomial and sign vector of a simplex or product expression
    Ehrhart(EhrhartArgs),
    /// Construct a polytope with prescribed middle Ehrhart coefficient signs
    SignConstruct(SignArgs),
    /// Compare lattice-point counts with the closed-form Ehrhart polynomial
    Verify(VerifyArgs),
    /// Time the fast h* algorithm against the naive sum
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SimplexArgs {
    /// q_1, …, q_{d−1} as a comma-separated list
    #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
    q: Option<IntList>,
    #[arg(long, value_parser = parse_int, allow_hyphen_values = true)]
    n: Option<BigInt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Fast,
    Naive,
}

#[derive(Debug, Args)]
struct HstarArgs {
    #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
    q: IntList,
    #[arg(long, value_parser = parse_int, allow_hyphen_values = true)]
    n: BigInt,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    ROdd,
    REven,
    ExtendedReeve,
    AllMinusOnes,
    Pow2,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[command(flatten)]
    simplex: SimplexArgs,
    /// Also evaluate h* = m·x·L1 + L2 of the simplex with n scaled by m
    #[arg(long, value_parser = parse_int)]
    m: Option<BigInt>,
    /// Closed-form family instead of --q/--n
    #[arg(long, value_enum, conflicts_with_all = ["q", "n"])]
    kind: Option<FamilyKind>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EulerianMethod {
    Descent,
    Recurrence,
}

#[derive(Debug, Args)]
struct EulerianArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = EulerianMethod::Recurrence)]
    method: EulerianMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SdmWhat {
    Vertices,
    Hstar,
    Ehrhart,
}

#[derive(Debug, Args)]
struct SdmArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_int)]
    m: BigInt,
    #[arg(long, value_enum, default_value_t = SdmWhat::Hstar)]
    what: SdmWhat,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EhrhartArgs {
    #[command(flatten)]
    simplex: SimplexArgs,
    /// PolytopeExpr JSON, inline or `@path`
    #[arg(long, conflicts_with_all = ["q", "n"])]
    expr: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SignArgs {
    /// Signs of c_{d−2}, …, c_1, e.g. "+-+--"
    #[arg(long, value_parser = parse_pattern, allow_hyphen_values = true, required_unless_present = "all")]
    pattern: Option<Pattern>,
    /// Sweep every pattern of this length instead
    #[arg(long, conflicts_with = "pattern")]
    all: Option<usize>,
    /// Worker threads for --all
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 64)]
    max_base: u64,
    /// Largest exponent e of a searched parameter 2^e
    #[arg(long, default_value_t = 8192)]
    max_param_bits: u32,
    /// Abort when an intermediate coefficient exceeds this many bits
    #[arg(long, default_value_t = 4_000_000)]
    max_coeff_bits: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    simplex: SimplexArgs,
    /// PolytopeExpr JSON, inline or `@path`
    #[arg(long, conflicts_with_all = ["q", "n"])]
    expr: Option<String>,
    /// Largest dilation checked (default: dimension + 1)
    #[arg(long)]
    tmax: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Bound on Σ|q_i| over all d coordinates
    #[arg(long, default_value_t = 100)]
    sum_q: u64,
    #[arg(long, value_parser = parse_int, default_value = "10000")]
    n: BigInt,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Simplex dimension
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest n·d for which the naive sum is also timed
    #[arg(long, default_value_t = 50_000_000)]
    naive_limit: u64,
    /// Per-trial CSV instead of the summary
    #[arg(long)]
    csv: bool,
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    BigInt::from_str(s.trim()).map_err(|_| format!("`{s}` is not a decimal integer"))
}

/// A comma-separated integer list.
#[derive(Debug, Clone)]
struct IntList(Vec<BigInt>);

fn parse_int_list(s: &str) -> Result<IntList, String> {
    s.split(',').filter(|part| !part.trim().is_empty()).map(parse_int).collect::<Result<_, _>>().map(IntList)
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    Pattern::from_str(s).map_err(|e| e.to_string())
}

/// Failure classes, each with its exit code.
#[derive(Debug)]
pub enum CliError {
    Mismatch(String),
    Exhausted(String),
    Usage(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Exhausted(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Precondition(_) => 65,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Mismatch(m) | CliError::Exhausted(m) | CliError::Usage(m) | CliError::Precondition(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Hstar(a) => commands::hstar(a),
        Command::Family(a) => commands::family(a),
        Command::Eulerian(a) => commands::eulerian(a),
        Command::Sdm(a) => commands::sdm(a),
        Command::Ehrhart(a) => commands::ehrhart(a),
        Command::SignConstruct(a) => commands::sign_construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
