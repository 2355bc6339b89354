//! `f2sumset`: check, certify, construct and sweep small-sumset pairs in `F_2^n`.
//!
//! Exit codes: 0 success or confirmed, 2 hypotheses vacuous (see
//! `--vacuous-exit`), 3 violation, 1 usage, parse or certificate errors.

mod input;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use f2sumset::constructions::{self, ConstructionOutput, Predicted};
use f2sumset::search::{self, Mode, SweepConfig, SweepTheorem};
use f2sumset::structure::{self, Certificate, ElementaryKind, ElementaryWitness, Rejection};
use f2sumset::theorems::{self, Outcome, Theorem};
use f2sumset::{group, Element, SetF2};

use input::{collect_pairs, parse_element, parse_literal, read_source, PairInput};
use output::{opt, Format, Records, Status};

const RANK_ENV: &str = "F2SUMSET_MAX_RANK";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}: {source}")]
    Literal {
        origin: String,
        source: f2sumset::Error,
    },
    #[error(transparent)]
    Core(#[from] f2sumset::Error),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Rejected(#[from] Rejection),
}

#[derive(Debug, Parser)]
#[command(
    name = "f2sumset",
    version,
    about = "Small sumsets in elementary abelian 2-groups"
)]
struct Cli {
    /// Output as JSON lines or an aligned table.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit code when every record is confirmed or vacuous and at least one is vacuous.
    #[arg(long, global = true, default_value_t = 2)]
    vacuous_exit: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a theorem's hypotheses and conclusion on pairs.
    Check(CheckArgs),
    /// Build the structure certificate of pairs with |A+B| < |A|+|B|.
    Certify(CertifyArgs),
    /// Verify a certificate file against a pair.
    CheckCert(CheckCertArgs),
    /// Build an example family and its predicted sizes.
    Construct(ConstructArgs),
    /// Sweep pairs exhaustively, by affine orbit, or by seeded sampling.
    Sweep(SweepArgs),
    /// Report the elementary type and root certificate class of pairs.
    Classify(PairArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    /// First set, e.g. "n=3; {0,1,2,4}".
    #[arg(long = "A")]
    a: Option<String>,
    /// Second set.
    #[arg(long = "B")]
    b: Option<String>,
    /// File of "A | B" lines, or - for stdin.
    #[arg(long)]
    pairs: Option<PathBuf>,
}

impl PairArgs {
    fn collect(&self) -> Result<Vec<PairInput>, CliError> {
        collect_pairs(self.a.as_deref(), self.b.as_deref(), self.pairs.as_deref())
    }

    /// Pairs that must all carry a second set.
    fn collect_full(&self) -> Result<Vec<(SetF2, SetF2)>, CliError> {
        self.collect()?
            .into_iter()
            .map(|p| match p.b {
                Some(b) => Ok((p.a, b)),
                None => Err(CliError::Usage("missing B".into())),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremArg {
    Main,
    Asym,
    Hp,
    Kneser,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Main => Theorem::Main,
            TheoremArg::Asym => Theorem::Asymmetric,
            TheoremArg::Hp => Theorem::Hp,
            TheoremArg::Kneser => Theorem::Kneser,
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    #[command(flatten)]
    pair: PairArgs,
    /// Index exponent for asym.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Write the certificate of a single pair to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckCertArgs {
    #[arg(long = "A")]
    a: String,
    #[arg(long = "B")]
    b: String,
    /// Certificate JSON file, or - for stdin.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Noncoset,
    Tight,
    Necessity,
    Elementary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    #[value(name = "III")]
    Iii,
    #[value(name = "IV")]
    Iv,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// tight: index exponent.
    #[arg(long)]
    k: Option<u32>,
    /// noncoset, tight: rank of F.
    #[arg(long)]
    rank_f: Option<u32>,
    /// noncoset: proper subset of F in F's coordinates (default {0}).
    #[arg(long)]
    f0: Option<String>,
    /// noncoset: translate of A and of the complement.
    #[arg(long, value_parser = parse_element)]
    shift: Option<Element>,
    /// tight, elementary: translate of A.
    #[arg(long, value_parser = parse_element)]
    g1: Option<Element>,
    /// tight, elementary: translate of B.
    #[arg(long, value_parser = parse_element)]
    g2: Option<Element>,
    /// necessity: 1 (span of B deficient) or 2 (span of A deficient).
    #[arg(long)]
    variant: Option<u32>,
    /// necessity: ambient rank.
    #[arg(long)]
    n: Option<u32>,
    /// elementary: type III or IV.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// elementary: the part H1, as a set literal over G = H.
    #[arg(long)]
    h1: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepTheoremArg {
    Main,
    Hp,
    Asym,
    Kneser,
    Lev,
}

impl From<SweepTheoremArg> for SweepTheorem {
    fn from(t: SweepTheoremArg) -> Self {
        match t {
            SweepTheoremArg::Main => SweepTheorem::Main,
            SweepTheoremArg::Hp => SweepTheorem::Hp,
            SweepTheoremArg::Asym => SweepTheorem::Asym,
            SweepTheoremArg::Kneser => SweepTheorem::Kneser,
            SweepTheoremArg::Lev => SweepTheorem::Lev,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Orbit,
    Random,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Orbit => Mode::Orbit,
            ModeArg::Random => Mode::Random,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    theorem: SweepTheoremArg,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: Option<u32>,
    /// Default: exhaustive up to rank 3, orbit at rank 4, random above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Number of random samples.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full report here; stdout then gets a summary record.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = apply_rank_override() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(records) => {
            print!("{}", records.render(cli.format));
            ExitCode::from(match records.status {
                Status::Ok => 0,
                Status::Vacuous => cli.vacuous_exit,
                Status::Violation => 3,
            })
        }
        Err(Failure { records, error }) => {
            if let Some(records) = records {
                print!("{}", records.render(cli.format));
            }
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}

fn apply_rank_override() -> Result<(), CliError> {
    match std::env::var(RANK_ENV) {
        Ok(v) => {
            let rank = v
                .trim()
                .parse::<u32>()
                .map_err(|e| CliError::Usage(format!("{RANK_ENV}={v:?}: {e}")))?;
            group::set_max_rank(rank);
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Usage(format!("{RANK_ENV}: {e}"))),
    }
}

/// An error, possibly after some records were produced.
struct Failure {
    records: Option<Box<Records>>,
    error: CliError,
}

impl From<CliError> for Failure {
    fn from(error: CliError) -> Self {
        Failure {
            records: None,
            error,
        }
    }
}

fn run(cli: &Cli) -> Result<Records, Failure> {
    match &cli.command {
        Command::Check(args) => Ok(check(args)?),
        Command::Certify(args) => Ok(certify(args)?),
        Command::CheckCert(args) => check_cert(args),
        Command::Construct(args) => Ok(construct(args)?),
        Command::Sweep(args) => Ok(sweep(args, cli.threads)?),
        Command::Classify(args) => Ok(classify(args)?),
    }
}

fn check(args: &CheckArgs) -> Result<Records, CliError> {
    let theorem = Theorem::from(args.theorem);
    let mut records = Records::new(&[
        "theorem",
        "|A|",
        "|B|",
        "|A+B|",
        "outcome",
        "span_index",
        "mu",
        "strict",
        "boundary",
    ]);
    for p in args.pair.collect()? {
        let b = match (&p.b, theorem) {
            (Some(b), _) => b.clone(),
            (None, Theorem::Hp) => p.a.clone(),
            (None, _) => return Err(CliError::Usage(format!("{theorem} needs --B"))),
        };
        let v = theorems::check(theorem, &p.a, &b, args.k)?;
        let status = match v.outcome {
            Outcome::Confirmed => Status::Ok,
            Outcome::Vacuous => Status::Vacuous,
            Outcome::Violation => Status::Violation,
        };
        let row = vec![
            v.theorem.to_string(),
            v.size_a.to_string(),
            v.size_b.to_string(),
            v.sumset_size.to_string(),
            format!("{:?}", v.outcome).to_lowercase(),
            opt(v.complement_span_index),
            v.mu_value.to_string(),
            v.strict_containment.to_string(),
            v.boundary.to_string(),
        ];
        records.push(&v, row, status)?;
    }
    Ok(records)
}

#[derive(Serialize)]
struct CertifyRecord {
    a: SetF2,
    b: SetF2,
    small_sumset: bool,
    kemperman_condition: bool,
    class: Option<String>,
    depth: Option<usize>,
    verified: Option<bool>,
    certificate: Option<Certificate>,
    failure_reason: Option<String>,
}

fn certify(args: &CertifyArgs) -> Result<Records, CliError> {
    let pairs = args.pair.collect_full()?;
    if args.out.is_some() && pairs.len() != 1 {
        return Err(CliError::Usage("--out needs exactly one pair".into()));
    }
    let mut records = Records::new(&[
        "|A|",
        "|B|",
        "small",
        "kemperman",
        "class",
        "depth",
        "verified",
    ]);
    for (a, b) in pairs {
        let outcome = structure::certify(&a, &b)?;
        let cert = outcome.certificate;
        let verified = cert
            .as_ref()
            .map(|c| structure::verify_certificate(&a, &b, c));
        let status = if !outcome.small_sumset {
            Status::Vacuous
        } else if verified == Some(true) {
            Status::Ok
        } else {
            Status::Violation
        };
        if let (Some(path), Some(c)) = (&args.out, &cert) {
            write_file(path, &c.to_json())?;
        }
        let record = CertifyRecord {
            small_sumset: outcome.small_sumset,
            kemperman_condition: outcome.kemperman_condition,
            class: cert.as_ref().map(Certificate::class_name),
            depth: cert.as_ref().map(Certificate::depth),
            verified,
            failure_reason: outcome.failure_reason,
            certificate: cert,
            a,
            b,
        };
        let row = vec![
            record.a.len().to_string(),
            record.b.len().to_string(),
            record.small_sumset.to_string(),
            record.kemperman_condition.to_string(),
            opt(record.class.clone()),
            opt(record.depth),
            opt(record.verified),
        ];
        records.push(&record, row, status)?;
    }
    Ok(records)
}

#[derive(Serialize)]
struct CheckCertRecord {
    valid: bool,
    class: String,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejection: Option<RejectionRecord>,
}

#[derive(Serialize)]
struct RejectionRecord {
    depth: usize,
    node: &'static str,
    clause: String,
}

fn check_cert(args: &CheckCertArgs) -> Result<Records, Failure> {
    let a = parse_literal("--A", &args.a)?;
    let b = parse_literal("--B", &args.b)?;
    let text = read_source(&args.cert)?;
    let cert = Certificate::from_json(text.trim()).map_err(|source| CliError::Literal {
        origin: args.cert.display().to_string(),
        source,
    })?;
    let verdict = structure::check_certificate(&a, &b, &cert);
    let record = CheckCertRecord {
        valid: verdict.is_ok(),
        class: cert.class_name(),
        depth: cert.depth(),
        rejection: verdict.as_ref().err().map(|r| RejectionRecord {
            depth: r.depth,
            node: r.node,
            clause: r.clause.clone(),
        }),
    };
    let mut records = Records::new(&["valid", "class", "depth", "clause"]);
    let row = vec![
        record.valid.to_string(),
        record.class.clone(),
        record.depth.to_string(),
        opt(record.rejection.as_ref().map(|r| r.clause.clone())),
    ];
    records.push(&record, row, Status::Ok)?;
    match verdict {
        Ok(()) => Ok(records),
        Err(rejection) => Err(Failure {
            records: Some(Box::new(records)),
            error: rejection.into(),
        }),
    }
}

#[derive(Serialize)]
struct ConstructRecord<'a> {
    #[serde(flatten)]
    output: &'a ConstructionOutput,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatch: Option<&'static str>,
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--family {family} needs --{flag}")))
}

fn construct(args: &ConstructArgs) -> Result<Records, CliError> {
    let zero = Element::ZERO;
    let out = match args.family {
        Family::Noncoset => {
            let rank_f = args.rank_f.unwrap_or(1);
            let f0 = match &args.f0 {
                Some(src) => parse_literal("--f0", src)?,
                None => parse_literal("--f0", &format!("n={rank_f}; {{0}}"))?,
            };
            constructions::build_noncoset_complement(rank_f, &f0, args.shift.unwrap_or(zero))?
        }
        Family::Tight => constructions::build_tight_extremal(
            require(args.k, "k", "tight")?,
            args.rank_f.unwrap_or(0),
            args.g1.unwrap_or(zero),
            args.g2.unwrap_or(zero),
        )?,
        Family::Necessity => constructions::build_span_necessity(
            require(args.variant, "variant", "necessity")?,
            require(args.n, "n", "necessity")?,
        )?,
        Family::Elementary => {
            let kind = match require(args.kind, "kind", "elementary")? {
                KindArg::Iii => ElementaryKind::III,
                KindArg::Iv => ElementaryKind::IV,
            };
            let h1 = parse_literal("--h1", &require(args.h1.clone(), "h1", "elementary")?)?;
            constructions::build_elementary(
                kind,
                &h1,
                args.g1.unwrap_or(zero),
                args.g2.unwrap_or(zero),
            )?
        }
    };
    let mismatch = out.verify().err();
    let Predicted {
        size_a,
        size_b,
        size_sumset,
        complement_span_index,
        complement_is_coset,
        ..
    } = out.predicted;
    let row = vec![
        out.family.to_string(),
        size_a.to_string(),
        size_b.to_string(),
        size_sumset.to_string(),
        opt(complement_span_index),
        complement_is_coset.to_string(),
        mismatch.is_none().to_string(),
    ];
    let mut records = Records::new(&[
        "family",
        "|A|",
        "|B|",
        "|A+B|",
        "span_index",
        "coset",
        "verified",
    ]);
    let status = if mismatch.is_none() {
        Status::Ok
    } else {
        Status::Violation
    };
    let record = ConstructRecord {
        output: &out,
        verified: mismatch.is_none(),
        mismatch,
    };
    records.push(&record, row, status)?;
    Ok(records)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    schema_version: u32,
    theorem: &'a str,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    mode: &'a str,
    scanned: u64,
    hypotheses_hold: u64,
    confirmed: u64,
    violations: u64,
    min_span_index: Option<u64>,
    wall_seconds: f64,
    out: String,
}

fn sweep(args: &SweepArgs, threads: Option<usize>) -> Result<Records, CliError> {
    let base = SweepConfig::new(args.theorem.into(), args.n);
    let cfg = SweepConfig {
        k: args.k,
        mode: args.mode.map_or(base.mode, Mode::from),
        budget: args.budget.unwrap_or(base.budget),
        seed: args.seed,
        threads,
        ..base
    };
    let report = search::run_sweep(&cfg)?;
    let t = report.effective();
    let status = if t.violations > 0 {
        Status::Violation
    } else if t.hypotheses_hold == 0 {
        Status::Vacuous
    } else {
        Status::Ok
    };
    let row = vec![
        report.theorem.clone(),
        report.n.to_string(),
        report.mode.clone(),
        t.scanned.to_string(),
        t.hypotheses_hold.to_string(),
        t.confirmed.to_string(),
        t.violations.to_string(),
        opt(t.min_span_index),
        format!("{:.2}", report.timing.wall_seconds),
    ];
    let mut records = Records::new(&[
        "theorem",
        "n",
        "mode",
        "scanned",
        "hypotheses",
        "confirmed",
        "violations",
        "min_index",
        "seconds",
    ]);
    match &args.out {
        Some(path) => {
            write_file(path, &report.to_json())?;
            let summary = SweepSummary {
                schema_version: report.schema_version,
                theorem: &report.theorem,
                n: report.n,
                k: report.k,
                mode: &report.mode,
                scanned: t.scanned,
                hypotheses_hold: t.hypotheses_hold,
                confirmed: t.confirmed,
                violations: t.violations,
                min_span_index: t.min_span_index,
                wall_seconds: report.timing.wall_seconds,
                out: path.display().to_string(),
            };
            records.push(&summary, row, status)?;
        }
        None => records.push(&report, row, status)?,
    }
    Ok(records)
}

#[derive(Serialize)]
struct ClassifyRecord {
    a: SetF2,
    b: SetF2,
    sumset_size: usize,
    small_sumset: bool,
    kemperman_condition: bool,
    elementary: Option<ElementaryWitness>,
    class: Option<String>,
}

fn classify(args: &PairArgs) -> Result<Records, CliError> {
    let mut records = Records::new(&[
        "|A|",
        "|B|",
        "|A+B|",
        "small",
        "kemperman",
        "elementary",
        "class",
    ]);
    for (a, b) in args.collect_full()? {
        let sumset_size = group::sumset(&a, &b)?.len();
        let elementary = structure::classify_elementary(&a, &b)?;
        let outcome = structure::certify(&a, &b)?;
        let record = ClassifyRecord {
            sumset_size,
            small_sumset: outcome.small_sumset,
            kemperman_condition: outcome.kemperman_condition,
            class: outcome.certificate.as_ref().map(Certificate::class_name),
            elementary,
            a,
            b,
        };
        let row = vec![
            record.a.len().to_string(),
            record.b.len().to_string(),
            sumset_size.to_string(),
            record.small_sumset.to_string(),
            record.kemperman_condition.to_string(),
            opt(record
                .elementary
                .as_ref()
                .map(|w| format!("{:?}", w.kind()))),
            opt(record.class.clone()),
        ];
        records.push(&record, row, Status::Ok)?;
    }
    Ok(records)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, format!("{contents}\n"))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
