//! Command-line driver: argument parsing, the worker pool, and CSV/JSON
//! output of result tables.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::arith::{gcd, hasse_bound, is_prime, validate_field_size, validate_window};
use crate::census::{census_with_limit, iota, model_count_check, DEFAULT_MAX_P};
use crate::characters::{avg_max_char_sum, gauss_sum, gauss_twist_residual, CharacterHandle, CharacterMode};
use crate::error::Error;
use crate::experiments::{
    mirror_window_average, sato_tate_compare, window_average, ClassCounts, FormulaCounts,
    WindowSpec,
};
use crate::lfunctions::{avg_abs_l, l_star_and_full, l_truncated, LMethod, DEFAULT_TRUNCATION};
use crate::quadforms::psi_derived;
use crate::sieve::{garaev_check, sieve_envelopes, sieve_lhs, SieveInstance};

#[derive(Debug, Parser)]
#[command(name = "isoclass", version, about = "Isomorphism classes of elliptic curves by Frobenius trace")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    PaperLiteral,
    FieldDisc,
}

impl From<Mode> for CharacterMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PaperLiteral => CharacterMode::PaperLiteral,
            Mode::FieldDisc => CharacterMode::FieldDisc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Census,
    Formula,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Class counts I(t) for every trace by enumerating curves over F_p.
    Census {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_P)]
        max_p: u64,
    },
    /// Window averages of iota(t) over R < t <= 2R.
    Theorem {
        #[arg(long, alias = "q")]
        p: u64,
        #[arg(long, required = true, value_delimiter = ',')]
        r: Vec<u64>,
        /// Also report the window -2R <= t < -R.
        #[arg(long)]
        mirror: bool,
        /// Class counts from the census (primes) or class numbers (prime powers).
        #[arg(long, value_enum)]
        source: Option<Source>,
    },
    /// Sato-Tate window masses against mu(alpha, beta).
    Satotate {
        #[arg(long)]
        p: u64,
        #[arg(long, requires = "beta", allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha", allow_negative_numbers = true)]
        beta: Option<f64>,
    },
    /// Averages of max |S_t(N)| over N ~ L and t ~ R.
    Charsum {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, value_enum, default_value_t = Mode::PaperLiteral)]
        mode: Mode,
    },
    /// L(1, chi) by the class number formula and by a truncated series.
    Lfunc {
        #[arg(long)]
        q: u64,
        #[arg(long, conflicts_with = "r", required_unless_present = "r", allow_negative_numbers = true)]
        t: Option<i64>,
        #[arg(long)]
        r: Option<u64>,
        /// Truncation length of the Dirichlet series.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        n: u64,
    },
    /// Large-sieve sum for random coefficients against three envelopes.
    Sieve {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: usize,
    },
    /// Quadratic Gauss sums tau_r and the twist residual.
    Gauss {
        #[arg(long, value_delimiter = ',', conflicts_with = "r_max", required_unless_present = "r_max")]
        r: Vec<u64>,
        /// Every r in 2..=R_MAX.
        #[arg(long)]
        r_max: Option<u64>,
    },
    /// Second moment of the restricted multiple divisor function.
    Divisor {
        #[arg(long, required = true, value_delimiter = ',')]
        nu: Vec<u32>,
        #[arg(long, required = true, value_delimiter = ',')]
        m: Vec<u64>,
    },
    /// The weight psi(f_t) for every ordinary trace.
    Psi {
        #[arg(long)]
        q: u64,
        /// Restrict to R < t <= 2R.
        #[arg(long)]
        r: Option<u64>,
    },
}

#[derive(Debug, Clone)]
enum Cell {
    Int(i128),
    Float(f64),
    Ratio(u64, u64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) => format_sig(*x, 12),
            Cell::Ratio(n, d) => format!("{n}/{d}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(v) => json!(v),
                Err(_) => json!(v.to_string()),
            },
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Ratio(n, d) => json!(format!("{n}/{d}")),
            Cell::Bool(b) => json!(b),
        }
    }
}

fn int(v: impl Into<i128>) -> Cell {
    Cell::Int(v.into())
}

fn ratio(r: Ratio<u64>) -> Cell {
    Cell::Ratio(*r.numer(), *r.denom())
}

/// `%.{digits}g`-style formatting.
fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One command's output: parameters, column names and rows.
struct Table {
    command: &'static str,
    params: Map<String, Value>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    summary: String,
}

impl Table {
    fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Table {
            command,
            params: Map::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: String::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# command: {}", self.command).unwrap();
        for (k, v) in &self.params {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "params": Value::Object(self.params.clone()),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code: 0 success, 2 bad arguments, 3 domain error, 4 I/O.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            eprintln!("{summary}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            3
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            4
        }
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads as usize)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot build worker pool: {e}")))?;
    let mut table = pool.install(|| build_table(&cli.command, cli.common.seed))?;
    if let Some(seed) = cli.common.seed {
        table.params.entry("seed").or_insert(json!(seed));
    }
    let text = match cli.common.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(format!("{}: {}", table.command, table.summary))
}

fn build_table(command: &Command, seed: Option<u64>) -> Result<Table, Failure> {
    match command {
        Command::Census { p, max_p } => census_table(*p, *max_p),
        Command::Theorem { p, r, mirror, source } => theorem_table(*p, r, *mirror, *source),
        Command::Satotate { p, alpha, beta } => satotate_table(*p, alpha.zip(*beta)),
        Command::Charsum { q, r, l, mode } => charsum_table(*q, *r, *l, (*mode).into()),
        Command::Lfunc { q, t, r, n } => lfunc_table(*q, *t, *r, *n),
        Command::Sieve { q, r, n } => sieve_table(*q, *r, *n, seed.unwrap_or(0)),
        Command::Gauss { r, r_max } => gauss_table(r, *r_max, seed.unwrap_or(0)),
        Command::Divisor { nu, m } => divisor_table(nu, m),
        Command::Psi { q, r } => psi_table(*q, *r),
    }
}

fn census_table(p: u64, max_p: u64) -> Result<Table, Failure> {
    let census = census_with_limit(p, max_p)?;
    let mut table = Table::new("census", &["t", "I", "iota"]);
    table.param("p", p);
    table.param("classes", census.total);
    let models = model_count_check(&census);
    table.param("model_count", models.to_string());
    table.param("aut_weighted_total", census.aut_weighted_total().to_string());
    for t in census.traces() {
        table.push(vec![int(t), int(census.count(t)), Cell::Float(iota(&census, t))]);
    }
    table.summary = format!(
        "p = {p}, {} classes over {} traces, model count {models}",
        census.total,
        census.counts.len()
    );
    Ok(table)
}

fn theorem_table(q: u64, rs: &[u64], mirror: bool, source: Option<Source>) -> Result<Table, Failure> {
    let windows: Vec<WindowSpec> = rs.iter().map(|&r| WindowSpec::new(q, r)).collect::<Result<_, _>>()?;
    if let Some(w) = windows.iter().find(|w| w.r < 2) {
        return Err(Error::InvalidWindow {
            q,
            r: w.r,
            reason: "R >= 2 needed for log R > 0",
        }
        .into());
    }
    let source = source.unwrap_or(if is_prime(q) { Source::Census } else { Source::Formula });
    let counts: Box<dyn ClassCounts> = match source {
        Source::Census => Box::new(census_with_limit(q, DEFAULT_MAX_P)?),
        Source::Formula => Box::new(FormulaCounts::new(q)?),
    };
    let mut table = Table::new(
        "theorem",
        &["q", "R", "count", "sum_iota", "avg_iota", "envelope", "ratio"],
    );
    table.param("q", q);
    table.param("R", rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","));
    table.param("mirror", mirror);
    table.param("source", match source {
        Source::Census => "census",
        Source::Formula => "formula",
    });
    let mut worst = 0.0f64;
    for w in &windows {
        let mut results = vec![(w.r as i128, window_average(w, counts.as_ref())?)];
        if mirror {
            results.push((-(w.r as i128), mirror_window_average(w, counts.as_ref())?));
        }
        for (r, a) in results {
            worst = worst.max(a.ratio);
            table.push(vec![
                int(q),
                int(r),
                int(a.count),
                Cell::Float(a.sum_iota),
                Cell::Float(a.avg_iota),
                Cell::Float(a.envelope),
                Cell::Float(a.ratio),
            ]);
        }
    }
    table.summary = format!("q = {q}, {} windows, max ratio {}", table.rows.len(), format_sig(worst, 6));
    Ok(table)
}

fn satotate_table(p: u64, window: Option<(f64, f64)>) -> Result<Table, Failure> {
    let windows = match window {
        Some(w) => vec![w],
        None => vec![(-1.0, -0.5), (-0.5, 0.0), (0.0, 0.5), (0.5, 1.0), (-1.0, 1.0)],
    };
    for &(a, b) in &windows {
        if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) || a >= b {
            return Err(Error::Invalid(format!("need -1 <= alpha < beta <= 1 (alpha = {a}, beta = {b})")).into());
        }
    }
    let census = census_with_limit(p, DEFAULT_MAX_P)?;
    let mut table = Table::new("satotate", &["q", "alpha", "beta", "statistic", "mu", "c", "ratio"]);
    table.param("p", p);
    let mut worst = 0.0f64;
    for (a, b) in windows {
        let row = sato_tate_compare(&census, a, b)?;
        worst = worst.max((row.ratio - 1.0).abs());
        table.push(vec![
            int(p),
            Cell::Float(a),
            Cell::Float(b),
            Cell::Float(row.statistic),
            Cell::Float(row.mu),
            Cell::Float(row.c),
            Cell::Float(row.ratio),
        ]);
    }
    table.summary = format!("p = {p}, max relative deviation from c mu {}", format_sig(worst, 6));
    Ok(table)
}

fn charsum_table(q: u64, r: u64, l: u64, mode: CharacterMode) -> Result<Table, Failure> {
    let avg = avg_max_char_sum(q, r, l, mode)?;
    let mut table = Table::new("charsum", &["q", "R", "L", "avg_max", "envelope", "ratio"]);
    table.param("q", q);
    table.param("R", r);
    table.param("L", l);
    table.param("mode", serde_json::to_value(mode).expect("serializable"));
    table.param("sum_max", avg.sum_max);
    table.param("l_condition", avg.l_condition);
    let (env, ratio) = match avg.envelope {
        Some(e) => (Cell::Float(e), Cell::Float(avg.average / e)),
        None => (Cell::Empty, Cell::Empty),
    };
    table.push(vec![int(q), int(r), int(l), Cell::Float(avg.average), env, ratio]);
    table.summary = format!("q = {q}, R = {r}, L = {l}, average max {}", format_sig(avg.average, 6));
    Ok(table)
}

fn lfunc_table(q: u64, t: Option<i64>, r: Option<u64>, n: u64) -> Result<Table, Failure> {
    let (p, _) = validate_field_size(q)?;
    if n == 0 {
        return Err(Error::Invalid("truncation N must be positive".into()).into());
    }
    let traces: Vec<i64> = match (t, r) {
        (Some(t), _) => vec![t],
        (None, Some(r)) => {
            validate_window(q, r)?;
            (r as i64 + 1..=2 * r as i64)
                .filter(|t| t.unsigned_abs() % p != 0)
                .collect()
        }
        (None, None) => return Err(Failure::Usage("need --t or --r".into())),
    };
    let rows: Vec<Vec<Cell>> = traces
        .par_iter()
        .map(|&t| {
            let rec = l_star_and_full(q, t)?;
            let h = CharacterHandle::new(q, t, CharacterMode::FieldDisc)?;
            let trunc = l_truncated(&h, n)?;
            Ok(vec![
                int(q),
                int(t),
                int(rec.f),
                int(rec.d_star),
                Cell::Float(rec.l_star),
                Cell::Float(rec.euler_product),
                Cell::Float(rec.l_full),
                Cell::Float(trunc),
                Cell::Float((trunc - rec.l_full).abs()),
            ])
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new(
        "lfunc",
        &["q", "t", "f", "Dstar", "L_star", "euler", "L_full", "L_trunc", "residual"],
    );
    table.param("q", q);
    match (t, r) {
        (Some(t), _) => table.param("t", t),
        (_, Some(r)) => table.param("R", r),
        _ => {}
    }
    table.param("N", n);
    if let (None, Some(r)) = (t, r) {
        // windows holding a multiple of p have no average
        if let Ok(avg) = avg_abs_l(q, r, LMethod::ClassNumberFormula) {
            table.param("sum_abs_L", avg.sum);
            table.param("avg_abs_L", avg.average);
            table.param("avg_envelope", avg.envelope);
            table.param("avg_ratio", avg.ratio);
        }
    }
    let worst = rows
        .iter()
        .map(|row| match row[8] {
            Cell::Float(x) => x,
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    table.rows = rows;
    table.summary = format!(
        "q = {q}, {} traces, max truncation residual {}",
        table.rows.len(),
        format_sig(worst, 6)
    );
    Ok(table)
}

fn sieve_table(q: u64, r: u64, n: usize, seed: u64) -> Result<Table, Failure> {
    let inst = SieveInstance::random(q, r, n, seed)?;
    let lhs = sieve_lhs(&inst)?;
    let env = sieve_envelopes(q, r, n);
    let z = inst.z();
    let mut table = Table::new(
        "sieve",
        &["q", "R", "N", "seed", "lhs", "env_paper", "env_classical", "env_conjecture"],
    );
    table.param("q", q);
    table.param("R", r);
    table.param("N", n);
    table.param("seed", seed);
    table.param("Z", z);
    table.push(vec![
        int(q),
        int(r),
        int(n as u64),
        int(seed),
        Cell::Float(lhs),
        Cell::Float(env.paper * z),
        Cell::Float(env.classical * z),
        Cell::Float(env.conjecture * z),
    ]);
    table.summary = format!(
        "q = {q}, R = {r}, N = {n}, lhs / (Z env_paper) = {}",
        format_sig(lhs / (z * env.paper), 6)
    );
    Ok(table)
}

/// Number of sampled `v` per modulus in the twist residual.
const GAUSS_SAMPLES: usize = 8;

fn gauss_table(rs: &[u64], r_max: Option<u64>, seed: u64) -> Result<Table, Failure> {
    let moduli: Vec<u64> = match r_max {
        Some(m) => (2..=m).collect(),
        None => rs.to_vec(),
    };
    if let Some(&bad) = moduli.iter().find(|&&r| r == 0 || r > 100_000) {
        return Err(Error::OutOfRange {
            name: "r",
            value: bad as i128,
            min: 1,
            max: 100_000,
        }
        .into());
    }
    let rows: Vec<Vec<Cell>> = moduli
        .par_iter()
        .map(|&r| {
            let tau: Complex64 = gauss_sum(r);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ r.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut residual = gauss_twist_residual(1, r)?;
            for _ in 0..GAUSS_SAMPLES {
                let v = loop {
                    let v = rng.gen_range(1..=r);
                    if gcd(v, r) == 1 {
                        break v as i64;
                    }
                };
                residual = residual.max(gauss_twist_residual(v, r)?);
            }
            Ok(vec![
                int(r),
                Cell::Float(tau.norm()),
                Cell::Float((r as f64).sqrt()),
                Cell::Float(residual),
            ])
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new("gauss", &["r", "abs_tau", "sqrt_r", "residual"]);
    match r_max {
        Some(m) => table.param("r_max", m),
        None => table.param("r", rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")),
    }
    table.param("seed", seed);
    table.param("samples_per_r", GAUSS_SAMPLES);
    table.rows = rows;
    table.summary = format!("{} moduli", table.rows.len());
    Ok(table)
}

fn divisor_table(nus: &[u32], ms: &[u64]) -> Result<Table, Failure> {
    let mut table = Table::new("divisor", &["nu", "M", "lhs", "rhs", "ok"]);
    table.param("nu", nus.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    table.param("M", ms.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    let mut passed = 0;
    for &nu in nus {
        for &m in ms {
            let c = garaev_check(nu, m)?;
            passed += c.ok as usize;
            table.push(vec![
                int(nu),
                int(m),
                Cell::Int(c.lhs as i128),
                Cell::Float(c.rhs),
                Cell::Bool(c.ok),
            ]);
        }
    }
    table.summary = format!("{passed} of {} instances within the bound", table.rows.len());
    Ok(table)
}

fn psi_table(q: u64, r: Option<u64>) -> Result<Table, Failure> {
    let (p, _) = validate_field_size(q)?;
    let traces: Vec<i64> = match r {
        Some(r) => {
            validate_window(q, r)?;
            (r as i64 + 1..=2 * r as i64).collect()
        }
        None => (1..=hasse_bound(q)).collect(),
    };
    let rows: Vec<Vec<Cell>> = traces
        .par_iter()
        .filter(|&&t| t.unsigned_abs() % p != 0 && (t as i128).pow(2) < 4 * q as i128)
        .map(|&t| {
            let psi = psi_derived(q, t)?;
            let split = crate::arith::conductor_split(t * t - 4 * q as i64)?;
            let env = (split.f as f64 + 2.0).ln().ln().powi(2);
            let value = *psi.numer() as f64 / *psi.denom() as f64;
            Ok(vec![
                int(q),
                int(t),
                int(split.f),
                ratio(psi),
                Cell::Float(env),
                Cell::Float(value / env),
            ])
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new("psi", &["q", "t", "f", "psi", "loglog_env", "ratio"]);
    table.param("q", q);
    if let Some(r) = r {
        table.param("R", r);
    }
    let worst = rows
        .iter()
        .map(|row| match row[5] {
            Cell::Float(x) => x,
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    table.rows = rows;
    table.summary = format!(
        "q = {q}, {} ordinary traces, max psi / (log log (f+2))^2 = {}",
        table.rows.len(),
        format_sig(worst, 6)
    );
    Ok(table)
}
