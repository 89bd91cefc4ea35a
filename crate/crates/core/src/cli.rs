//! The `lfoc` command line: thin wrappers over the library, human-readable by
//! default and JSON with `--json`.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructor::{normalize as ctor_normalize, DEFAULT_CONV_FUEL};
use crate::corpus::{self, CorpusError};
use crate::forcing::{countdown_run, parse_condition, ConditionError, CountdownVerdict, ForcingStructure, MalError, MalFormula, Translator};
use crate::lambda::{derive_cbn, derive_cbv, encode_cbn, encode_cbv, infer_type, parse_lambda, LambdaError, SimpleType};
use crate::quantity::MonoidName;
use crate::reduce::{normalize, Outcome};
use crate::selftest;
use crate::term::{free_vars, parse_command, parse_term_or_command, Command, ParseError, Parsed, Term};
use crate::typing::{certify, check, CertReport, CertifyError, CheckError, DerivationFile, FileError, Mode};

#[derive(Debug, Parser)]
#[command(name = "lfoc", version, about = "Run, type and certify L_foc programs")]
pub struct Cli {
    /// Maximum number of machine steps.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub fuel: u64,
    /// Quantitative monoid for weights (default: nat in MAL, soft in SAL, trivial in PA).
    #[arg(long, global = true)]
    pub monoid: Option<MonoidName>,
    /// Typing mode (default: the derivation file's, else mal).
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Parse a term or command and print its canonical form.
    Parse { file: PathBuf },
    /// Reduce a command (a term is cut against a daimon) and print the trace.
    Run { file: PathBuf },
    /// Check a derivation file and print its conclusion.
    Check { file: PathBuf },
    /// Check, weigh and run a derivation; with --all, every corpus entry in a directory.
    Certify {
        #[arg(required_unless_present = "all")]
        file: Option<PathBuf>,
        #[arg(long, value_name = "DIR", conflicts_with = "file")]
        all: Option<PathBuf>,
    },
    /// Translate a λ-term by call-by-name or call-by-value.
    Encode {
        strategy: Strategy,
        file: PathBuf,
        /// Simple type to check against, e.g. "(a -> b) -> a -> b".
        #[arg(long = "type", value_name = "TYPE")]
        ty: Option<String>,
        /// Also print the typing derivation of the translation.
        #[arg(long)]
        derive: bool,
    },
    /// Run the countdown machine on a command with an integer counter.
    Countdown { file: PathBuf, counter: u64 },
    /// Print A*, p ⊩ A and its normal form.
    Force {
        formula: String,
        condition: String,
        #[arg(long, value_enum, default_value_t = Structure::Integer)]
        structure: Structure,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
        /// Run only this criterion (1–10).
        #[arg(long)]
        only: Option<u8>,
    },
    /// Write the built-in corpus to a directory.
    ExportCorpus { dir: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Cbn,
    Cbv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    Integer,
    Trivial,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}:{source}")]
    Lambda { path: String, source: LambdaError },
    #[error("{path}: {source}")]
    File { path: String, source: FileError },
    #[error("{path}: {source}")]
    Check { path: String, source: CheckError },
    #[error("{path}: {source}")]
    Certify { path: String, source: CertifyError },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("formula: {0}")]
    Formula(#[from] MalError),
    #[error("condition: {0}")]
    Condition(#[from] ConditionError),
    #[error("{0}")]
    Usage(String),
}

/// What a subcommand decided: exit code 0 or 1.
type Verdict = bool;

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, &mut io::stdout()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Executes `cli`, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn io::Write) -> Result<Verdict, CliError> {
    let report = match &cli.command {
        Cmd::Parse { file } => cmd_parse(file)?,
        Cmd::Run { file } => cmd_run(file, cli.fuel)?,
        Cmd::Check { file } => cmd_check(file, cli.mode)?,
        Cmd::Certify { file: Some(file), .. } => cmd_certify(file, cli)?,
        Cmd::Certify { all: Some(dir), .. } => cmd_certify_all(dir, cli)?,
        Cmd::Certify { .. } => return Err(CliError::Usage("certify needs a file or --all DIR".into())),
        Cmd::Encode { strategy, file, ty, derive } => cmd_encode(*strategy, file, ty.as_deref(), *derive)?,
        Cmd::Countdown { file, counter } => cmd_countdown(file, *counter, cli.fuel)?,
        Cmd::Force { formula, condition, structure } => cmd_force(formula, condition, *structure)?,
        Cmd::Selftest { seed, only } => cmd_selftest(*seed, *only)?,
        Cmd::ExportCorpus { dir } => {
            let entries = corpus::all();
            corpus::export(&entries, dir)?;
            Report::ok(format!("wrote {} entries to {}", entries.len(), dir.display()), json!({"entries": entries.len()}))
        }
    };
    let text = if cli.json {
        serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
    } else {
        report.text
    };
    writeln!(out, "{}", text.trim_end()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(report.verdict)
}

struct Report {
    text: String,
    json: Value,
    verdict: Verdict,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, verdict: true }
    }
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

/// Reads a file, or standard input for `-`.
fn read(path: &Path) -> Result<String, CliError> {
    let io_err = |source| CliError::Io { path: show(path), source };
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn parse_file(path: &Path) -> Result<Parsed, CliError> {
    parse_term_or_command(&read(path)?).map_err(|source| CliError::Parse { path: show(path), source })
}

fn closed_command(parsed: Parsed) -> Command {
    match parsed {
        Parsed::Command(c) => c,
        Parsed::Term(t) => {
            let dai = Term::Daimon(t.polarity().flip());
            Command::new(t, dai).expect("daimon of the opposite polarity")
        }
    }
}

fn cmd_parse(path: &Path) -> Result<Report, CliError> {
    let parsed = parse_file(path)?;
    let (what, canonical, size, fv, polarity) = match &parsed {
        Parsed::Term(t) => ("term", t.canonical().to_string(), t.size(), free_vars(t), Some(t.polarity())),
        Parsed::Command(c) => ("command", c.canonical().to_string(), c.size(), free_vars(c), None),
    };
    let fv: Vec<String> = fv.iter().map(|v| v.to_string()).collect();
    let mut text = format!("{what}: {canonical}\nsize: {size}\nfree: {}\n", fv.join(" "));
    if let Some(p) = polarity {
        text.push_str(&format!("polarity: {}\n", p.sigil()));
    }
    Ok(Report::ok(
        text,
        json!({"kind": what, "canonical": canonical, "size": size, "free": fv,
               "polarity": polarity.map(|p| p.sigil().to_string())}),
    ))
}

fn cmd_run(path: &Path, fuel: u64) -> Result<Report, CliError> {
    let c = closed_command(parse_file(path)?);
    let trace = normalize(&c, fuel);
    let summary = trace.summary();
    Ok(Report {
        text: trace.to_text(),
        json: json!({"start": c.to_string(), "last": trace.last().to_string(), "summary": summary}),
        verdict: trace.outcome != Outcome::FuelExhausted,
    })
}

fn load_derivation(path: &Path) -> Result<DerivationFile, CliError> {
    DerivationFile::parse(&read(path)?).map_err(|source| CliError::File { path: show(path), source })
}

fn cmd_check(path: &Path, mode: Option<Mode>) -> Result<Report, CliError> {
    let file = load_derivation(path)?;
    let mode = mode.or(file.mode).unwrap_or(Mode::Mal);
    let j = check(&file.root, mode).map_err(|source| CliError::Check { path: show(path), source })?;
    Ok(Report::ok(
        format!("{j}\nmode: {mode}\ndepth: {}\n", file.root.depth()),
        json!({"judgment": j.to_string(), "mode": mode, "depth": file.root.depth(), "tally": file.root.tally()}),
    ))
}

fn default_monoid(mode: Mode) -> MonoidName {
    match mode {
        Mode::Mal => MonoidName::Nat,
        Mode::Sal => MonoidName::Soft,
        Mode::Pa => MonoidName::Trivial,
    }
}

fn cert_text(r: &CertReport) -> String {
    let tally: Vec<String> = r.tally.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    let mut s = format!(
        "judgment: {}\ncommand: {}\nmode: {}  monoid: {}\nrules: {}  depth: {}\nweight: {}  norm: {}\n|c|: {}\nsteps: mu={} beta={} bang={}  outcome: {}\n",
        r.judgment, r.command, r.mode, r.monoid, tally.join(" "), r.depth, r.weight, r.norm, r.size,
        r.steps.mu, r.steps.beta, r.steps.bang, r.outcome,
    );
    let time = r.time.map_or("undefined".to_string(), |t| t.to_string());
    s.push_str(&format!("time: {time}  bound respected: {}\n", r.bound_respected));
    if let Some(l) = r.linear_bound_respected {
        s.push_str(&format!("linear bound respected: {l}\n"));
    }
    s.push_str(if r.passed() { "verdict: PASS\n" } else { "verdict: FAIL\n" });
    s
}

fn certify_file(file: &DerivationFile, path: &Path, cli: &Cli) -> Result<CertReport, CliError> {
    let mode = cli.mode.or(file.mode).unwrap_or(Mode::Mal);
    let monoid = cli.monoid.unwrap_or_else(|| default_monoid(mode));
    certify(&file.root, mode, monoid, cli.fuel).map_err(|source| CliError::Certify { path: show(path), source })
}

fn cmd_certify(path: &Path, cli: &Cli) -> Result<Report, CliError> {
    let file = load_derivation(path)?;
    let r = certify_file(&file, path, cli)?;
    Ok(Report {
        text: cert_text(&r),
        json: json!(r),
        verdict: r.passed(),
    })
}

fn cmd_certify_all(dir: &Path, cli: &Cli) -> Result<Report, CliError> {
    let entries = corpus::load(dir)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failures = 0;
    for e in &entries {
        let path = dir.join(&e.name).join("deriv.json");
        let term_ok = match &e.term_matches {
            Ok(b) => *b,
            Err(err) => return Err(CliError::Usage(err.to_string())),
        };
        let r = certify_file(&e.file, &path, cli)?;
        let ok = r.passed() && term_ok;
        failures += usize::from(!ok);
        let time = r.time.map_or("-".to_string(), |t| t.to_string());
        text.push_str(&format!(
            "{:<28} {} mode={} monoid={} time={time} norm={} |c|={}{}\n",
            e.name,
            if ok { "PASS" } else { "FAIL" },
            r.mode,
            r.monoid,
            r.norm,
            r.size,
            if term_ok { "" } else { " (term.lfoc does not match the derivation)" },
        ));
        rows.push(json!({"name": e.name, "passed": ok, "term_matches": term_ok, "report": r}));
    }
    text.push_str(&format!("{} entries, {} passed, {failures} failed\n", entries.len(), entries.len() - failures));
    Ok(Report {
        text,
        json: json!({"entries": rows, "failed": failures}),
        verdict: failures == 0 && !entries.is_empty(),
    })
}

fn cmd_encode(strategy: Strategy, path: &Path, ty: Option<&str>, derive: bool) -> Result<Report, CliError> {
    let lerr = |source| CliError::Lambda { path: show(path), source };
    let t = parse_lambda(&read(path)?).map_err(lerr)?;
    let ty: Option<SimpleType> = ty
        .map(|s| s.parse().map_err(|e: LambdaError| CliError::Usage(format!("--type: {e}"))))
        .transpose()?;
    let encoded = match strategy {
        Strategy::Cbn => encode_cbn(&t),
        Strategy::Cbv => encode_cbv(&t),
    };
    let mut text = format!("{encoded}\n");
    let mut j = json!({"source": t.to_string(), "term": encoded.to_string()});
    if ty.is_some() || derive {
        let typing = infer_type(&t, ty.as_ref()).map_err(lerr)?;
        let formula = match strategy {
            Strategy::Cbn => typing.ty.cbn_formula(),
            Strategy::Cbv => typing.ty.cbv_formula(),
        };
        text.push_str(&format!("type: {}\nformula: {formula}\n", typing.ty));
        j["type"] = json!(typing.ty.to_string());
        j["formula"] = json!(formula.to_string());
    }
    if derive {
        let mut d = match strategy {
            Strategy::Cbn => derive_cbn(&t, ty.as_ref()),
            Strategy::Cbv => derive_cbv(&t, ty.as_ref()),
        }
        .map_err(lerr)?;
        d.annotate(Mode::Mal).map_err(|source| CliError::Check { path: show(path), source })?;
        let file = DerivationFile::new(d, Some(Mode::Mal)).to_json();
        text.push_str(&file);
        text.push('\n');
        j["derivation"] = serde_json::from_str(&file).expect("derivation files are JSON");
    }
    Ok(Report::ok(text, j))
}

fn cmd_countdown(path: &Path, counter: u64, fuel: u64) -> Result<Report, CliError> {
    let src = read(path)?;
    let c = parse_command(&src).map_err(|source| CliError::Parse { path: show(path), source })?;
    let run = countdown_run(&c, counter, fuel);
    let verdict = run.verdict;
    let text = format!("{}{}\n", run.to_text(), verdict_name(verdict));
    Ok(Report {
        text,
        json: json!({
            "verdict": verdict,
            "counts": run.counts,
            "counter": run.last().counter_value(),
            "last": run.last().to_string(),
        }),
        verdict: verdict == CountdownVerdict::Normalizes,
    })
}

fn verdict_name(v: CountdownVerdict) -> &'static str {
    match v {
        CountdownVerdict::Normalizes => "Normalizes",
        CountdownVerdict::Diverges => "Diverges",
        CountdownVerdict::FuelOut => "FuelOut",
    }
}

fn cmd_force(formula: &str, condition: &str, structure: Structure) -> Result<Report, CliError> {
    let fs = match structure {
        Structure::Integer => ForcingStructure::integer(),
        Structure::Trivial => ForcingStructure::trivial(),
    };
    let a = MalFormula::parse(formula)?;
    let p = parse_condition(&fs, condition)?;
    let mut tr = Translator::new(&fs).avoiding(p.free_vars());
    let star = tr.translate(&a);
    let forced = tr.force(&p, &a);
    let nf = ctor_normalize(&forced, DEFAULT_CONV_FUEL).map_err(|e| CliError::Usage(e.to_string()))?;
    let kind = forced.kind().map_err(|e| CliError::Usage(e.to_string()))?;
    let polarity = a.polarity().sigil();
    Ok(Report::ok(
        format!("A:      {a} ({polarity})\nA*:     {star}\np ⊩ A:  {forced}\nnormal: {nf}\nkind:   {kind}\n"),
        json!({"formula": a.to_string(), "translation": star.to_string(), "forcing": forced.to_string(),
               "normal": nf.to_string(), "kind": kind.to_string(), "structure": fs.name}),
    ))
}

fn cmd_selftest(seed: u64, only: Option<u8>) -> Result<Report, CliError> {
    let results = match only {
        Some(id) => vec![selftest::run(id, seed).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?],
        None => selftest::run_all(seed),
    };
    let passed = results.iter().filter(|r| r.passed).count();
    let mut text = String::new();
    for r in &results {
        text.push_str(&format!("{r} [{} ms]\n", r.elapsed.as_millis()));
    }
    text.push_str(&format!("{passed}/{} passed\n", results.len()));
    Ok(Report {
        text,
        json: json!({"results": results, "passed": passed, "total": results.len()}),
        verdict: passed == results.len(),
    })
}
