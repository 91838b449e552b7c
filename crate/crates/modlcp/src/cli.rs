//! Command-line front end: solve one problem, sweep the benchmark grids,
//! print convergence certificates, or cross-check against the enumeration
//! oracle. Emits CSV (RFC-4180 via the csv crate) or Markdown pipe tables.
//!
//! Exit codes: 0 success/converged, 1 usage or I/O error, 2 numerical
//! failure or non-convergence.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::convergence::{self, Theorem1Case, Theorem2Case};
use crate::lcp::LcpProblem;
use crate::linalg::{read_matrix_market, read_vector, DiagonalMatrix};
use crate::problems::{example1, example2, random_hplus};
use crate::solvers::{
    solve, MethodId, RatmmsParams, SplittingSpec, Status, StoppingRule,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser)]
#[command(
    name = "modlcp",
    about = "Modulus-based matrix splitting solvers for linear complementarity problems",
    version
)]
struct Cli {
    /// Optional key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single LCP and report IT / CPU / RES.
    Solve(SolveArgs),
    /// Run a benchmark grid (table1..table6 or an explicit grid).
    Bench(BenchArgs),
    /// Print the convergence certificate for one configuration.
    Certify(CertifyArgs),
    /// Compare the iterative solver against the enumeration oracle.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Example1,
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gmms,
    Tmms,
    Gtmms,
    Atmms,
    Ratmms,
}

impl MethodArg {
    fn id(self) -> MethodId {
        match self {
            MethodArg::Gmms => MethodId::Gmms,
            MethodArg::Tmms => MethodId::Tmms,
            MethodArg::Gtmms => MethodId::Gtmms,
            MethodArg::Atmms => MethodId::Atmms,
            MethodArg::Ratmms => MethodId::Ratmms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Benchmark family (mutually exclusive with --matrix/--q).
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Block size; the system dimension is m^2.
    #[arg(long)]
    m: Option<usize>,
    /// Diagonal shift of the benchmark family.
    #[arg(long)]
    mu: Option<f64>,
    /// Matrix Market coordinate file for A.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Vector file for q (one real per line).
    #[arg(long)]
    q: Option<PathBuf>,
    /// Optional known solution vector for verification.
    #[arg(long)]
    zstar: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Scalar k with Omega1 = k*I (default 0.8 for example1, 1.0 otherwise).
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// AOR secondary parameter (default: equal to alpha, the SOR case).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Omega3 as a fraction of D_A (0 disables the relaxation term).
    #[arg(long)]
    omega3: Option<f64>,
    #[arg(long)]
    res_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Predefined grid: table1 .. table6.
    #[arg(long)]
    table: Option<String>,
    /// Restrict the grid to these block sizes (repeatable).
    #[arg(long = "m")]
    m_filter: Vec<usize>,
    /// Explicit grid: family plus repeatable --mu/--method/--alpha/--theta.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long = "mu")]
    mu_list: Vec<f64>,
    #[arg(long = "method", value_enum)]
    method_list: Vec<MethodArg>,
    #[arg(long = "alpha")]
    alpha_list: Vec<f64>,
    #[arg(long = "theta")]
    theta_list: Vec<f64>,
    /// Omega3 fractions of D_A for the explicit grid (repeatable).
    #[arg(long = "omega3")]
    omega3_list: Vec<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Dimension of the random instances (2..=20).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// First seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of consecutive seeds to test.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    params: ParamArgs,
}

/// Entry point used by main; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version through this path with code 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.cmd {
        Command::Solve(a) => cmd_solve(a, &config),
        Command::Bench(a) => cmd_bench(a, &config),
        Command::Certify(a) => cmd_certify(a, &config),
        Command::OracleCompare(a) => cmd_oracle_compare(a, &config),
    };
    match result {
        Ok(code) => code,
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CmdError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            EXIT_NUMERICAL
        }
    }
}

enum CmdError {
    Usage(String),
    Numerical(String),
}

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

type Config = HashMap<String, String>;

fn load_config(path: Option<&std::path::Path>) -> Result<Config, String> {
    let mut map = HashMap::new();
    let Some(path) = path else { return Ok(map) };
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config {}:{}: expected key=value",
                path.display(),
                lineno + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn cfg_parse<V: std::str::FromStr>(config: &Config, key: &str) -> Result<Option<V>, CmdError> {
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("config key {key}: cannot parse {raw:?}"))),
    }
}

/// Command-line value wins; otherwise the config file; otherwise the default.
fn resolve<V: std::str::FromStr>(
    flag: Option<V>,
    config: &Config,
    key: &str,
) -> Result<Option<V>, CmdError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg_parse(config, key),
    }
}

struct ResolvedProblem {
    problem: LcpProblem,
    family: Option<FamilyArg>,
}

fn resolve_problem(args: &ProblemArgs, config: &Config) -> Result<ResolvedProblem, CmdError> {
    let family = match args.family {
        f @ Some(_) => f,
        None => match config.get("family").map(String::as_str) {
            Some(s) => Some(
                FamilyArg::from_str(s, true)
                    .map_err(|_| usage(format!("config key family: unknown {s:?}")))?,
            ),
            None => None,
        },
    };
    let matrix = args
        .matrix
        .clone()
        .or_else(|| config.get("matrix").map(PathBuf::from));
    let q_path = args
        .q
        .clone()
        .or_else(|| config.get("q").map(PathBuf::from));
    if family.is_some() && (matrix.is_some() || q_path.is_some()) {
        return Err(usage("--family and --matrix/--q are mutually exclusive"));
    }
    if let Some(family) = family {
        let m = resolve(args.m, config, "m")?.ok_or_else(|| usage("--m is required"))?;
        let mu = resolve(args.mu, config, "mu")?.ok_or_else(|| usage("--mu is required"))?;
        if m == 0 {
            return Err(usage("--m must be at least 1"));
        }
        if !(mu >= 0.0) {
            return Err(usage("--mu must be nonnegative"));
        }
        let problem = match family {
            FamilyArg::Example1 => example1(m, mu),
            FamilyArg::Example2 => example2(m, mu),
        }
        .map_err(|e| usage(format!("problem generation failed: {e}")))?;
        return Ok(ResolvedProblem {
            problem,
            family: Some(family),
        });
    }
    let (Some(matrix), Some(q_path)) = (matrix, q_path) else {
        return Err(usage(
            "specify either --family with --m/--mu, or both --matrix and --q",
        ));
    };
    let a = read_matrix_market(&matrix)
        .map_err(|e| usage(format!("cannot read {}: {e}", matrix.display())))?;
    let q = read_vector(&q_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", q_path.display())))?;
    let zstar_path = args
        .zstar
        .clone()
        .or_else(|| config.get("zstar").map(PathBuf::from));
    let problem = match zstar_path {
        Some(p) => {
            let z = read_vector(&p)
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            LcpProblem::with_known_solution(a, q, z)
        }
        None => LcpProblem::new(a, q),
    }
    .map_err(|e| usage(format!("invalid problem: {e}")))?;
    Ok(ResolvedProblem {
        problem,
        family: None,
    })
}

struct ResolvedParams {
    method: MethodId,
    params: RatmmsParams,
    stop: StoppingRule,
    alpha: f64,
    theta: f64,
    omega3_frac: f64,
    k: f64,
}

fn default_k(family: Option<FamilyArg>) -> f64 {
    match family {
        Some(FamilyArg::Example1) => 0.8,
        Some(FamilyArg::Example2) => 1.0,
        None => 1.0,
    }
}

fn build_params(
    p: &LcpProblem,
    family: Option<FamilyArg>,
    method: MethodId,
    k: f64,
    alpha: f64,
    beta: f64,
    theta: f64,
    omega3_frac: f64,
) -> Result<RatmmsParams, CmdError> {
    let _ = family;
    let n = p.dim();
    let d = p.matrix().diagonal_entries();
    if d.iter().any(|&v| v <= 0.0) {
        return Err(CmdError::Numerical(
            "matrix has a nonpositive diagonal entry; the default parameter \
             matrices Omega2 = D/(2 alpha), Omega3 = f*D require a positive diagonal"
                .into(),
        ));
    }
    if !(k > 0.0) {
        return Err(usage("--k must be positive"));
    }
    if alpha == 0.0 {
        return Err(usage("--alpha must be nonzero"));
    }
    if !(omega3_frac >= 0.0) {
        return Err(usage("--omega3 must be nonnegative"));
    }
    if theta < 0.0 {
        return Err(usage("--theta must be nonnegative"));
    }
    let omega2 = DiagonalMatrix::positive(d.iter().map(|v| v / (2.0 * alpha)).collect())
        .map_err(|e| usage(format!("invalid Omega2: {e}")))?;
    let omega3 = DiagonalMatrix::nonnegative(d.iter().map(|v| v * omega3_frac).collect())
        .map_err(|e| usage(format!("invalid Omega3: {e}")))?;
    let _ = method;
    Ok(RatmmsParams {
        omega1: DiagonalMatrix::scalar(n, k),
        omega2,
        omega3,
        theta,
        splitting: SplittingSpec::Aor { alpha, beta },
    })
}

fn resolve_params(
    args: &ParamArgs,
    config: &Config,
    p: &LcpProblem,
    family: Option<FamilyArg>,
) -> Result<ResolvedParams, CmdError> {
    let method = match args.method {
        Some(m) => m,
        None => match config.get("method").map(String::as_str) {
            Some(s) => MethodArg::from_str(s, true)
                .map_err(|_| usage(format!("config key method: unknown {s:?}")))?,
            None => MethodArg::Ratmms,
        },
    }
    .id();
    let k = resolve(args.k, config, "k")?.unwrap_or_else(|| default_k(family));
    let alpha = resolve(args.alpha, config, "alpha")?.unwrap_or(1.0);
    let beta = resolve(args.beta, config, "beta")?.unwrap_or(alpha);
    let theta = resolve(args.theta, config, "theta")?.unwrap_or(1.7);
    let omega3_frac = resolve(args.omega3, config, "omega3")?.unwrap_or(0.5);
    let res_tol = resolve(args.res_tol, config, "res-tol")?.unwrap_or(1e-5);
    let max_iter = resolve(args.max_iter, config, "max-iter")?.unwrap_or(500);
    let params = build_params(p, family, method, k, alpha, beta, theta, omega3_frac)?;
    Ok(ResolvedParams {
        method,
        params,
        stop: StoppingRule {
            res_tol,
            max_iter,
            divergence_cap: 1e12,
        },
        alpha,
        theta,
        omega3_frac,
        k,
    })
}

fn resolve_format(args: &OutputArgs, config: &Config) -> Result<FormatArg, CmdError> {
    match args.format {
        Some(f) => Ok(f),
        None => match config.get("format").map(String::as_str) {
            Some(s) => FormatArg::from_str(s, true)
                .map_err(|_| usage(format!("config key format: unknown {s:?}"))),
            None => Ok(FormatArg::Markdown),
        },
    }
}

/// A finished table: header plus rows of display strings.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Markdown => {
                let mut s = String::new();
                let _ = writeln!(s, "| {} |", self.header.join(" | "));
                let _ = writeln!(
                    s,
                    "|{}|",
                    self.header.iter().map(|_| " --- ").collect::<Vec<_>>().join("|")
                );
                for row in &self.rows {
                    let _ = writeln!(s, "| {} |", row.join(" | "));
                }
                s
            }
            FormatArg::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush"))
                    .expect("csv output is utf-8")
            }
        }
    }
}

fn emit(table: &Table, args: &OutputArgs, config: &Config) -> Result<(), CmdError> {
    let format = resolve_format(args, config)?;
    let text = table.render(format);
    let out = args
        .out
        .clone()
        .or_else(|| config.get("out").map(PathBuf::from));
    match out {
        Some(path) => fs::write(&path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_res(res: f64) -> String {
    // {:.2e} prints single-digit exponents; pad to two for table alignment
    let s = format!("{res:.2e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ("-", d),
                None => ("+", exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn cmd_solve(args: SolveArgs, config: &Config) -> Result<i32, CmdError> {
    let rp = resolve_problem(&args.problem, config)?;
    let rpar = resolve_params(&args.params, config, &rp.problem, rp.family)?;
    let report = solve(&rp.problem, rpar.method, &rpar.params, &rpar.stop)
        .map_err(|e| CmdError::Numerical(format!("solver failed: {e}")))?;
    let converged = report.status == Status::Converged;
    let (it, res) = if converged {
        (
            report.iterations.to_string(),
            fmt_res(report.final_residual()),
        )
    } else {
        ("-".to_string(), "-".to_string())
    };
    let mut header = vec![
        "method".to_string(),
        "IT".to_string(),
        "CPU".to_string(),
        "RES".to_string(),
        "status".to_string(),
    ];
    let mut row = vec![
        rpar.method.name().to_string(),
        it,
        format!("{:.4}", report.wall_seconds),
        res,
        format!("{:?}", report.status),
    ];
    if let Some(zstar) = rp.problem.known_solution() {
        let err = report
            .z
            .iter()
            .zip(zstar)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        header.push("solution_error".to_string());
        row.push(fmt_res(err));
    }
    let table = Table {
        header,
        rows: vec![row],
    };
    emit(&table, &args.output, config)?;
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(if converged { EXIT_OK } else { EXIT_NUMERICAL })
}

#[derive(Clone)]
struct GridCell {
    family: FamilyArg,
    m: usize,
    mu: f64,
    method: MethodId,
    k: f64,
    alpha: f64,
    theta: f64,
    omega3_frac: f64,
}

fn table_grid(id: &str, m_filter: &[usize]) -> Result<Vec<GridCell>, CmdError> {
    let keep_m = |m: usize| m_filter.is_empty() || m_filter.contains(&m);
    let mut cells = Vec::new();
    match id {
        // theta sweeps at m = 200, mu = 2, alpha = 1 over Omega3 fractions
        "table1" | "table4" => {
            let (family, k, thetas): (_, _, &[f64]) = if id == "table1" {
                (
                    FamilyArg::Example1,
                    0.8,
                    &[0.9, 1.1, 1.3, 1.5, 1.6, 1.7, 1.8],
                )
            } else {
                (
                    FamilyArg::Example2,
                    1.0,
                    &[1.1, 1.3, 1.5, 1.7, 1.9, 2.1, 2.3],
                )
            };
            if !keep_m(200) {
                return Ok(cells);
            }
            for &omega3_frac in &[0.0, 0.25, 0.5, 1.0] {
                for &theta in thetas {
                    cells.push(GridCell {
                        family,
                        m: 200,
                        mu: 2.0,
                        method: MethodId::Ratmms,
                        k,
                        alpha: 1.0,
                        theta,
                        omega3_frac,
                    });
                }
            }
        }
        // method comparison across mu and m
        "table2" | "table5" => {
            let (family, k, theta, methods): (_, _, _, &[MethodId]) = if id == "table2" {
                (
                    FamilyArg::Example1,
                    0.8,
                    1.7,
                    &[
                        MethodId::Gmms,
                        MethodId::Gtmms,
                        MethodId::Atmms,
                        MethodId::Ratmms,
                    ],
                )
            } else {
                (
                    FamilyArg::Example2,
                    1.0,
                    1.9,
                    &[MethodId::Gmms, MethodId::Gtmms, MethodId::Ratmms],
                )
            };
            for &mu in &[1.5, 2.5, 4.0] {
                for &method in methods {
                    for &m in &[30usize, 60, 100, 150, 200] {
                        if keep_m(m) {
                            cells.push(GridCell {
                                family,
                                m,
                                mu,
                                method,
                                k,
                                alpha: 1.0,
                                theta,
                                omega3_frac: 0.5,
                            });
                        }
                    }
                }
            }
        }
        // alpha sweeps at mu = 2, theta = 1.7
        "table3" | "table6" => {
            let (family, k, alphas): (_, _, &[f64]) = if id == "table3" {
                (FamilyArg::Example1, 0.8, &[0.6, 0.9, 1.1, 1.3, 1.5])
            } else {
                (FamilyArg::Example2, 1.0, &[0.6, 0.9, 1.2, 1.4, 1.5])
            };
            for &m in &[60usize, 150] {
                if !keep_m(m) {
                    continue;
                }
                for &method in &[MethodId::Gmms, MethodId::Gtmms, MethodId::Ratmms] {
                    for &alpha in alphas {
                        cells.push(GridCell {
                            family,
                            m,
                            mu: 2.0,
                            method,
                            k,
                            alpha,
                            theta: 1.7,
                            omega3_frac: 0.5,
                        });
                    }
                }
            }
        }
        other => return Err(usage(format!("unknown table id {other:?}"))),
    }
    Ok(cells)
}

struct CellResult {
    it: Option<usize>,
    res: Option<f64>,
    cpu: f64,

}

fn run_cell(cell: &GridCell) -> Result<CellResult, CmdError> {
    let p = match cell.family {
        FamilyArg::Example1 => example1(cell.m, cell.mu),
        FamilyArg::Example2 => example2(cell.m, cell.mu),
    }
    .map_err(|e| CmdError::Numerical(format!("problem generation failed: {e}")))?;
    let params = build_params(
        &p,
        Some(cell.family),
        cell.method,
        cell.k,
        cell.alpha,
        cell.alpha,
        cell.theta,
        cell.omega3_frac,
    )?;
    let report = solve(&p, cell.method, &params, &StoppingRule::default())
        .map_err(|e| CmdError::Numerical(format!("solver failed: {e}")))?;
    let converged = report.status == Status::Converged;
    Ok(CellResult {
        it: converged.then_some(report.iterations),
        res: converged.then(|| report.final_residual()),
        cpu: report.wall_seconds,
    })
}

fn cmd_bench(args: BenchArgs, config: &Config) -> Result<i32, CmdError> {
    let table_id = args
        .table
        .clone()
        .or_else(|| config.get("table").cloned());
    let cells = match &table_id {
        Some(id) => table_grid(id, &args.m_filter)?,
        None => {
            // explicit grid: cross-product of the repeatable flags
            let Some(family) = args.family else {
                return Err(usage("bench needs --table or an explicit --family grid"));
            };
            let k = args.k.unwrap_or_else(|| default_k(Some(family)));
            let ms: Vec<usize> = if args.m_filter.is_empty() {
                vec![]
            } else {
                args.m_filter.clone()
            };
            let alphas = if args.alpha_list.is_empty() {
                vec![1.0]
            } else {
                args.alpha_list.clone()
            };
            let thetas = if args.theta_list.is_empty() {
                vec![1.7]
            } else {
                args.theta_list.clone()
            };
            let omega3s = if args.omega3_list.is_empty() {
                vec![0.5]
            } else {
                args.omega3_list.clone()
            };
            let mut cells = Vec::new();
            for &mu in &args.mu_list {
                for &m in &ms {
                    for method in &args.method_list {
                        for &alpha in &alphas {
                            for &theta in &thetas {
                                for &omega3_frac in &omega3s {
                                    cells.push(GridCell {
                                        family,
                                        m,
                                        mu,
                                        method: method.id(),
                                        k,
                                        alpha,
                                        theta,
                                        omega3_frac,
                                    });
                                }
                            }
                        }
                    }
                }
            }
            cells
        }
    };

    // independent cells run concurrently; rows come back in grid order
    let mut results: Vec<Option<Result<CellResult, CmdError>>> =
        (0..cells.len()).map(|_| None).collect();
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(cells.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results_mutex = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= cells.len() {
                    break;
                }
                let r = run_cell(&cells[i]);
                results_mutex.lock().unwrap()[i] = Some(r);
            });
        }
    });

    let header: Vec<String> = [
        "family", "m", "mu", "method", "alpha", "theta", "omega3", "IT", "CPU", "RES",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::with_capacity(cells.len());
    for (cell, result) in cells.iter().zip(results.into_iter()) {
        let r = result.expect("every cell is executed")?;
        rows.push(vec![
            match cell.family {
                FamilyArg::Example1 => "example1".to_string(),
                FamilyArg::Example2 => "example2".to_string(),
            },
            cell.m.to_string(),
            format!("{}", cell.mu),
            cell.method.name().to_string(),
            format!("{}", cell.alpha),
            format!("{}", cell.theta),
            format!("{}", cell.omega3_frac),
            r.it.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            format!("{:.4}", r.cpu),
            r.res.map(fmt_res).unwrap_or_else(|| "-".into()),
        ]);
    }
    let table = Table { header, rows };
    emit(&table, &args.output, config)?;
    Ok(EXIT_OK)
}

fn cmd_certify(args: CertifyArgs, config: &Config) -> Result<i32, CmdError> {
    let rp = resolve_problem(&args.problem, config)?;
    let rpar = resolve_params(&args.params, config, &rp.problem, rp.family)?;
    let cert = convergence::certify(rp.problem.matrix(), &rpar.params)
        .map_err(|e| CmdError::Numerical(format!("certificate failed: {e}")))?;
    println!("method              : {}", rpar.method.name());
    println!(
        "parameters          : k={} alpha={} theta={} omega3={}*D_A",
        rpar.k, rpar.alpha, rpar.theta, rpar.omega3_frac
    );
    println!("rho(Jacobi)         : {:.6}", cert.rho_jacobi);
    println!(
        "rho(bound matrix)   : {:.6}  (bracket [{:.6}, {:.6}])",
        cert.rho_tilde_l, cert.rho_bracket.0, cert.rho_bracket.1
    );
    println!("bound < 1           : {}", cert.bound_holds);
    println!(
        "scaled condition    : {}",
        match cert.theorem1_case {
            Theorem1Case::None => "none",
            Theorem1Case::CaseI => "case i (0 < theta <= 1)",
            Theorem1Case::CaseII => "case ii (theta > 1, below delta threshold)",
        }
    );
    println!(
        "AOR parameter region: {}",
        match cert.theorem2_case {
            Theorem2Case::None => "none".to_string(),
            c => format!("sub-case {}", c.label()),
        }
    );
    println!(
        "H-compatible        : splitting1={} splitting2={}",
        cert.h_compatible.0, cert.h_compatible.1
    );
    for note in &cert.notes {
        println!("note                : {note}");
    }
    Ok(EXIT_OK)
}

fn cmd_oracle_compare(args: OracleArgs, config: &Config) -> Result<i32, CmdError> {
    let file_mode = args.problem.matrix.is_some() || config.contains_key("matrix");
    let instances: Vec<(String, LcpProblem)> = if file_mode {
        let rp = resolve_problem(&args.problem, config)?;
        vec![("file".to_string(), rp.problem)]
    } else {
        if !(2..=20).contains(&args.n) {
            return Err(usage("--n must be in 2..=20 (oracle enumeration limit)"));
        }
        (args.seed..args.seed + args.count.max(1))
            .map(|seed| {
                random_hplus(args.n, seed)
                    .map(|p| (format!("seed {seed}"), p))
                    .map_err(|e| CmdError::Numerical(format!("instance generation failed: {e}")))
            })
            .collect::<Result<_, _>>()?
    };

    let mut all_pass = true;
    for (label, p) in &instances {
        let family = None;
        let mut rpar = resolve_params(&args.params, config, p, family)?;
        // tighten the solver so the comparison is limited by the oracle
        rpar.stop.res_tol = rpar.stop.res_tol.min(1e-10);
        rpar.stop.max_iter = rpar.stop.max_iter.max(5000);
        let report = solve(p, rpar.method, &rpar.params, &rpar.stop)
            .map_err(|e| CmdError::Numerical(format!("solver failed ({label}): {e}")))?;
        let oracle = crate::lcp::solve_enumeration(p)
            .map_err(|e| CmdError::Numerical(format!("oracle failed ({label}): {e}")))?;
        let diff = report
            .z
            .iter()
            .zip(&oracle.z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let pass = report.status == Status::Converged && diff <= 1e-6;
        all_pass &= pass;
        println!(
            "{label}: n={} method={} IT={} max|z_solver - z_oracle|={:.3e} {}",
            p.dim(),
            rpar.method.name(),
            report.iterations,
            diff,
            if pass { "ok" } else { "MISMATCH" }
        );
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_NUMERICAL })
}
