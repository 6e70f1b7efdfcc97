use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ucycle::complex::{ChainComplex, ManifoldSpec};
use ucycle::linalg::AbelianGroupType;
use ucycle::ring::CoeffRing;
use ucycle::specfile::SpecFile;
use ucycle::umodule::{
    e2_page_with, homology_with, operator_label, HomologyOptions, ModuleInvariants, Part, PresentedUModule, Variable,
};
use ucycle::verify::{run_named, CheckParams, CheckReport, CHECK_NAMES};
use ucycle::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_STABILITY: u8 = 3;

/// Exact U-module computations on the cup-homology model.
#[derive(Parser, Debug)]
#[command(name = "ucycle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of a spec file as a module over T and U.
    Homology(HomologyArgs),
    /// Run a named check.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Total,
    All,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = ParityArg::All)]
    parity: ParityArg,
    /// Also print the d1-homology in each Morse degree.
    #[arg(long)]
    e2: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of lemma-torus, theorem1, annihilation, theorem2, pfh-translate.
    check: String,
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long)]
    b1: Option<usize>,
    #[arg(long, default_value = "Z")]
    ring: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long)]
    exponent: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    i_max: i64,
    #[arg(long, default_value_t = 24)]
    k_max: i64,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<i64>,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TruncationInstability(_) | Error::Internal(_) => EXIT_STABILITY,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("UCYCLE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let r = match cli.command {
        Command::Homology(a) => cmd_homology(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_spec(path: &PathBuf) -> Result<(ManifoldSpec, Option<u32>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let f = SpecFile::parse(&text)?;
    Ok((f.to_spec()?, f.truncation_power))
}

#[derive(Serialize)]
struct PartReport {
    part: String,
    operator: String,
    truncation_power: u32,
    #[serde(flatten)]
    invariants: ModuleInvariants,
    /// Smallest `j` with `(T^N - 1)^j = 0`.
    t_nilpotency: Option<u32>,
    generators: usize,
}

fn part_report(label: &str, m: &PresentedUModule) -> PartReport {
    let limit = m.b1() as u32 + 2;
    PartReport {
        part: label.into(),
        operator: operator_label(m),
        truncation_power: m.power(),
        invariants: m.invariants(limit),
        t_nilpotency: m.nilpotency(Variable::T, limit),
        generators: m.rank(),
    }
}

/// Group type written over the coefficient ring.
fn describe(ring: CoeffRing, g: &AbelianGroupType) -> String {
    match ring {
        CoeffRing::Rationals => match g.free_rank {
            0 => "0".into(),
            r => format!("Q^{r}"),
        },
        CoeffRing::IntegersMod(p) if ring.is_field() => match g.torsion_invariants.len() {
            0 => "0".into(),
            r => format!("(Z/{p})^{r}"),
        },
        _ => g.to_string(),
    }
}

fn cmd_homology(a: &HomologyArgs) -> Result<u8, Failure> {
    let (spec, power) = load_spec(&a.spec)?;
    let cx = ChainComplex::build(&spec)?;
    let opts = HomologyOptions { power, check_stability: true };
    let parts: Vec<(&str, Part)> = match a.parity {
        ParityArg::Even => vec![("even", Part::Even)],
        ParityArg::Odd => vec![("odd", Part::Odd)],
        ParityArg::Total => vec![("total", Part::Total)],
        ParityArg::All => vec![("even", Part::Even), ("odd", Part::Odd), ("total", Part::Total)],
    };
    let mut reports = Vec::new();
    for (label, part) in parts {
        let m = homology_with(&cx, part, opts)?;
        reports.push(part_report(label, &m));
    }
    let e2 = if a.e2 {
        let pages = e2_page_with(&cx, opts)?;
        Some(pages.iter().enumerate().map(|(d, m)| part_report(&format!("degree {d}"), m)).collect::<Vec<_>>())
    } else {
        None
    };
    if a.json {
        let mut out = json!({ "spec": SpecFile::from(&spec), "N": spec.n_value(), "homology": reports });
        if let Some(e2) = e2 {
            out["e2"] = serde_json::to_value(e2).expect("reports serialize");
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("reports serialize"));
        return Ok(0);
    }
    println!("b1 = {}, xi = {:?}, N = {}, ring {}", spec.b1, spec.xi, spec.n_value(), spec.ring);
    let table = |title: &str, rows: &[PartReport]| {
        println!("{title}");
        println!("  {:<10} {:<28} {:<8} {:<8} (T^N-1)^j images", "part", "group", "T-nil", "U-nil");
        for r in rows {
            let images: Vec<String> = r.invariants.filtration_images.iter().map(|g| describe(spec.ring, g)).collect();
            let nil = |x: Option<u32>| x.map_or("-".to_string(), |j| j.to_string());
            println!(
                "  {:<10} {:<28} {:<8} {:<8} {}",
                r.part,
                describe(spec.ring, &r.invariants.group),
                nil(r.t_nilpotency),
                nil(r.invariants.u_nilpotency),
                images.join(", ")
            );
        }
    };
    table("homology", &reports);
    if let Some(e2) = &e2 {
        table("d1-homology by Morse degree", e2);
    }
    if let Some(r) = reports.first() {
        println!("U acts as {}; truncation power {}", r.operator, r.truncation_power);
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    if !CHECK_NAMES.contains(&a.check.as_str()) {
        return Err(Failure::Usage(format!("unknown check `{}`; expected one of {}", a.check, CHECK_NAMES.join(", "))));
    }
    let spec = match &a.spec {
        Some(p) => Some(load_spec(p)?.0),
        None => None,
    };
    let params = CheckParams {
        spec,
        b1: a.b1,
        n: a.n,
        m: a.m,
        ring: a.ring.parse()?,
        trials: a.trials,
        exponent: a.exponent,
        seed: a.seed,
        i_max: a.i_max,
        k_max: a.k_max,
        d: a.d,
        g: a.g,
    };
    let report = run_named(&a.check, &params)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        print_report(&report);
    }
    Ok(if report.passed() { 0 } else { EXIT_FAIL })
}

fn show(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn print_report(r: &CheckReport) {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    println!("{} [{verdict}] {}", r.check_name, r.parameters);
    for d in &r.details {
        println!("  {}: {}", d.label, show(&d.value));
    }
    if let Some(w) = &r.witness {
        println!("  witness: {}: {}", w.label, show(&w.value));
    }
}
