use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use rfkn_core::criteria::{
    check_auto, check_caseall, check_cota, check_direct, check_n7_instance, check_sieve, check_tu, SieveChoice,
};
use rfkn_core::cyclopoly::factor_xn1;
use rfkn_core::elemprops::{FieldContext, EXHAUSTIVE_BOUND};
use rfkn_core::gfield::make_tower;
use rfkn_core::numth::{factorizer, prime_power};
use rfkn_core::repro::{self, ReproResult};
use rfkn_core::witness::{self, Strategy, WitnessRecord, DEFAULT_BUDGET};
use rfkn_core::{CriterionReport, Error, ProblemInstance, Verdict};

const EXIT_INCONCLUSIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Existence criteria, certificates and witness search for r-primitive
/// k-normal elements of F_{q^n} over F_q.
#[derive(Parser)]
#[command(name = "rfkn", version)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run existence criteria on an instance.
    Check(CheckArgs),
    /// Factor an integer (bundled table, then trial division and Pollard rho).
    FactorInt {
        /// Decimal integer, `a^b` or `a^b-c`.
        #[arg(value_parser = parse_uint)]
        n: BigUint,
    },
    /// Factor x^n - 1 over F_q into monic irreducibles.
    FactorXn1 {
        #[arg(long, value_parser = parse_uint)]
        q: BigUint,
        #[arg(long)]
        n: usize,
        /// Selects the model of F_q when q is not prime.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a certified r-primitive k-normal element.
    Search(SearchArgs),
    /// Count pairs (a, b), a m-free, b g-free, a^r = f∘b, by enumeration.
    CountPairs(CountArgs),
    /// Recompute the threshold table.
    Table1,
    /// Recompute the single-window proof constants and the n = 7 constants.
    Constants,
    /// Replay the characteristic-11 classification.
    Corollary11,
    /// Re-check a witness record written by `search`.
    VerifyWitness { file: PathBuf },
}

#[derive(Args)]
struct InstanceArgs {
    /// Field size; decimal or `p^s`.
    #[arg(long, value_parser = parse_uint)]
    q: BigUint,
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_uint)]
    r: BigUint,
    #[arg(long)]
    k: usize,
}

impl InstanceArgs {
    fn instance(&self) -> Result<ProblemInstance, Error> {
        ProblemInstance::new(&self.q, self.n, &self.r, self.k)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Sieve,
    Caseall,
    Tu,
    Cota,
    N7,
    Auto,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Window exponent (tu, cota).
    #[arg(long)]
    t: Option<String>,
    /// Second window width (tu).
    #[arg(long)]
    u: Option<String>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("strategy").args(["exhaustive", "random", "pair"])))]
struct SearchArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Enumerate every element.
    #[arg(long)]
    exhaustive: bool,
    /// Random powers of a primitive element, tested for k-normality (default).
    #[arg(long)]
    random: bool,
    /// Random f∘β for normal β, tested for r-primitivity.
    #[arg(long)]
    pair: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Also write the witness record to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_parser = parse_uint)]
    q: BigUint,
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_uint, default_value = "1")]
    r: BigUint,
    /// Coefficients of f over F_q, constant term first, comma separated.
    #[arg(long, default_value = "1")]
    f: String,
    /// Defaults to q^n - 1.
    #[arg(long, value_parser = parse_uint)]
    m: Option<BigUint>,
    /// Coefficients of g; defaults to x^n - 1.
    #[arg(long)]
    g: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(String, serde_json::Value, u8), Failure>;

fn parse_uint(s: &str) -> Result<BigUint, String> {
    let bad = || format!("expected a non-negative integer, `a^b` or `a^b-c`, got `{s}`");
    if let Some((head, c)) = s.rsplit_once('-') {
        let head = parse_uint(head)?;
        let c: BigUint = c.trim().parse().map_err(|_| bad())?;
        return if c > head { Err(bad()) } else { Ok(head - c) };
    }
    match s.split_once('^') {
        Some((a, b)) => {
            let a: BigUint = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            Ok(a.pow(b))
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|c| c.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("bad coefficient list `{s}`"))))
        .collect()
}

fn poly_string(c: &[u64]) -> String {
    let mut out = String::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        match (i, a) {
            (0, _) => write!(out, "{a}").unwrap(),
            (_, 1) => {}
            _ => write!(out, "{a}*").unwrap(),
        }
        match i {
            0 => {}
            1 => out.push('x'),
            _ => write!(out, "x^{i}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn report_line(r: &CriterionReport) -> String {
    let crit = to_json(&r.criterion);
    let verdict = to_json(&r.verdict);
    let mut line = format!("{:<8} {:<26}", crit.as_str().unwrap_or("?"), verdict.as_str().unwrap_or("?"));
    if r.verdict == Verdict::NotApplicable {
        if let Some(reason) = r.details.get("reason").and_then(|v| v.as_str()) {
            write!(line, " {reason}").unwrap();
        }
    } else {
        write!(line, " lhs={} rhs={}", r.lhs, r.rhs).unwrap();
        if let Some(t) = r.details.get("t") {
            write!(line, " t={t}").unwrap();
        }
        if let Some(u) = r.details.get("u") {
            write!(line, " u={u}").unwrap();
        }
    }
    line
}

fn check(a: &CheckArgs) -> Outcome {
    let inst = a.inst.instance()?;
    let need = |v: &Option<String>, name: &str| {
        v.clone().ok_or_else(|| Failure::Usage(format!("--{name} is required for this method")))
    };
    let reports = match a.method {
        Method::Direct => vec![check_direct(&inst)?],
        Method::Sieve => vec![check_sieve(&inst, &SieveChoice::Auto)?],
        Method::Caseall => vec![check_caseall(&inst)?],
        Method::Tu => vec![check_tu(&inst, &need(&a.t, "t")?, &need(&a.u, "u")?)?],
        Method::Cota => vec![check_cota(&inst, &need(&a.t, "t")?)?],
        Method::N7 => vec![check_n7_instance(&inst)?],
        Method::Auto => check_auto(&inst)?,
    };
    let exists = reports.iter().any(|r| r.verdict == Verdict::Exists);
    let mut text = format!(
        "q={} n={} r={} k={} f {}\n",
        inst.q,
        inst.n,
        inst.r,
        inst.k,
        inst.f.f.as_deref().map(poly_string).unwrap_or_else(|| format!("exponents {:?}", inst.f.exponents))
    );
    for r in &reports {
        text.push_str(&report_line(r));
        text.push('\n');
    }
    text.push_str(if exists { "result: EXISTS" } else { "result: no criterion succeeded" });
    let out = json!({
        "instance": { "q": inst.q.to_string(), "n": inst.n, "r": inst.r.to_string(), "k": inst.k, "f": inst.f },
        "reports": reports,
        "exists": exists,
    });
    Ok((text, out, if exists { 0 } else { EXIT_INCONCLUSIVE }))
}

fn factor_int(n: &BigUint) -> Outcome {
    let f = factorizer::global().factorize(n);
    let complete = f.is_complete();
    let mut text = f.to_string();
    if !complete {
        text.push_str("\n(cofactor not fully factored)");
    }
    Ok((text, to_json(&f), if complete { 0 } else { EXIT_INCONCLUSIVE }))
}

fn factor_xn1_cmd(q: &BigUint, n: usize, seed: u64) -> Outcome {
    let (p, s) = prime_power(q)?;
    let tower = make_tower(p, s as usize, 1, seed)?;
    let base = tower.base();
    let fact = factor_xn1(base, n)?;
    let mut text = String::new();
    if s > 1 {
        writeln!(text, "F_q = F_{p}[z]/({}), coefficients packed base {p}", poly_string(base.modulus())).unwrap();
    }
    write!(text, "x^{n} - 1 over F_{q}: {} irreducible factors", fact.len()).unwrap();
    for xf in &fact.factors {
        let poly = xf.poly.as_deref().map(poly_string).unwrap_or_default();
        write!(text, "\n  ({poly})^{}  degree {}", xf.multiplicity, xf.degree).unwrap();
    }
    let out = json!({ "base_modulus": base.modulus(), "factorization": fact });
    Ok((text, out, 0))
}

fn search(a: &SearchArgs) -> Outcome {
    let inst = a.inst.instance()?;
    let strategy = if a.exhaustive {
        Strategy::Exhaustive
    } else if a.pair {
        Strategy::RandomPair
    } else {
        Strategy::RandomDirect
    };
    let rec = match witness::search_witness(&inst, strategy, a.seed, a.budget) {
        Ok(rec) => rec,
        Err(Error::NotFound { budget }) => {
            let text = format!("no witness found within {budget} candidates");
            return Ok((text, json!({ "found": false, "budget": budget }), EXIT_INCONCLUSIVE));
        }
        Err(e) => return Err(e.into()),
    };
    let body = serde_json::to_string_pretty(&rec).expect("serializable");
    if let Some(path) = &a.out {
        std::fs::write(path, &body).map_err(|e| Error::Io(e.to_string()))?;
    }
    let text = format!(
        "witness found after {} candidates (strategy {}, seed {})\norder {}, gcd degree {}\nelement {:?}",
        rec.candidates_tested,
        to_json(&rec.strategy).as_str().unwrap_or("?"),
        rec.seed,
        rec.certificate.order,
        rec.certificate.gcd_degree,
        rec.element
    );
    Ok((text, to_json(&rec), 0))
}

fn count_pairs(a: &CountArgs) -> Outcome {
    let (p, s) = prime_power(&a.q)?;
    let tower = make_tower(p, s as usize, a.n, a.seed)?;
    let ctx = FieldContext::new(tower)?;
    let f = parse_coeffs(&a.f)?;
    let m = a.m.clone().unwrap_or_else(|| ctx.group_order());
    let g = match &a.g {
        Some(g) => parse_coeffs(g)?,
        None => ctx.fact_x.xn1()?,
    };
    let count = ctx.count_pairs(&a.r, &f, &m, &g, EXHAUSTIVE_BOUND)?;
    let text = format!("N_{{{},{}}}({m}, {}) = {count}", a.r, poly_string(&f), poly_string(&g));
    let out = json!({
        "q": a.q.to_string(), "n": a.n, "r": a.r.to_string(), "f": f, "m": m.to_string(), "g": g,
        "count": count.to_string(),
    });
    Ok((text, out, 0))
}

fn repro_outcome(res: ReproResult) -> Outcome {
    let mut text = format!("{}\n", res.suite);
    for row in &res.rows {
        writeln!(
            text,
            "{} {:<22} computed {:<14} published {:<14}{}",
            if row.matches { "ok  " } else { "DIFF" },
            row.id,
            row.computed,
            row.published,
            row.relative_deviation.as_deref().map(|d| format!(" dev {d}")).unwrap_or_default()
        )
        .unwrap();
    }
    text.push_str(if res.all_match { "all rows match" } else { "some rows differ" });
    let code = if res.all_match { 0 } else { EXIT_INCONCLUSIVE };
    Ok((text, to_json(&res), code))
}

fn constants() -> Outcome {
    let w = repro::reproduce_window_constants()?;
    let c = repro::reproduce_n7_constants()?;
    let (t1, j1, e1) = repro_outcome(w)?;
    let (t2, j2, e2) = repro_outcome(c)?;
    Ok((format!("{t1}\n\n{t2}"), json!([j1, j2]), e1.max(e2)))
}

fn verify(path: &PathBuf) -> Outcome {
    let body = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rec: WitnessRecord = serde_json::from_str(&body).map_err(|e| Error::Parse(e.to_string()))?;
    witness::verify_witness(&rec)?;
    let text = format!(
        "valid: element of order {} with gcd degree {} in F_{}^{}",
        rec.certificate.order, rec.certificate.gcd_degree, rec.instance.q, rec.instance.n
    );
    Ok((text, json!({ "valid": true, "instance": rec.instance }), 0))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::FactorInt { n } => factor_int(n),
        Command::FactorXn1 { q, n, seed } => factor_xn1_cmd(q, *n, *seed),
        Command::Search(a) => search(a),
        Command::CountPairs(a) => count_pairs(a),
        Command::Table1 => repro_outcome(repro::reproduce_table1()?),
        Command::Constants => constants(),
        Command::Corollary11 => repro_outcome(repro::reproduce_corollary11()?),
        Command::VerifyWitness { file } => verify(file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(&cli) {
        Ok((text, value, code)) => {
            let body = if cli.json { serde_json::to_string_pretty(&value).expect("serializable") } else { text };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", <Cli as clap::CommandFactory>::command().render_usage());
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
