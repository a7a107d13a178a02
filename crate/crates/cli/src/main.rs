//! `unipotent`: label enumeration, closure queries and the adapted-class
//! harness for unipotent classes of Sp_{2n}(2) and O_{2n}(2).
//!
//! Size conventions differ between commands. `--nn` is the dimension `2n` of
//! the symplectic space (label commands). `--n` and `--cycles` describe a
//! cycle type of total `n`, whose labels then live in dimension `2n`: a cycle
//! of length `p` corresponds to a Jordan block of size `2p`.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use unipotent_core::class_labels::{closure_leq, enumerate_cycle_types, hasse_diagram, phi_of_elliptic};
use unipotent_core::flags::{basis_names, build_flag_pair, FlagPairSummary};
use unipotent_core::gf2::FormedSpace;
use unipotent_core::harness::{adapted_classes, verify, Execution, ReportCache, VerificationReport};
use unipotent_core::{enumerate_sp_labels, CycleType, Error, FormKind, SpLabel};

#[derive(Parser, Debug)]
#[command(
    name = "unipotent",
    version,
    about = "Unipotent classes of Sp_2n(2) and O_2n(2) adapted to elliptic Weyl classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the labels (c, ε) of unipotent classes in Sp_nn(2).
    Labels {
        #[command(flatten)]
        size: LabelSize,
        #[command(flatten)]
        out: Output,
    },
    /// Closure order. With --lower/--upper answers one query, otherwise prints every relation.
    Closure {
        #[command(flatten)]
        size: LabelSize,
        /// Label as JSON, e.g. '{"jordan":[2,2],"eps":{"2":0}}'.
        #[arg(long, requires = "upper")]
        lower: Option<String>,
        #[arg(long, requires = "lower")]
        upper: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Hasse diagram of the closure order.
    Hasse {
        #[command(flatten)]
        size: LabelSize,
        #[command(flatten)]
        out: Output,
    },
    /// The label Φ(C) of an elliptic class.
    Phi {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        out: Output,
    },
    /// The flag pair in relative position given by the cycle type.
    Flags {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        out: Output,
    },
    /// Labels of unipotent classes met by the coset of the flag pair.
    Adapted {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        run: RunOptions,
        #[command(flatten)]
        out: Output,
    },
    /// Check minimality of Φ(C). Without --cycles, checks every cycle type of --n.
    Verify {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        run: RunOptions,
        #[command(flatten)]
        out: Output,
    },
    /// Gram matrix and quadratic form of the standard space of dimension 2n.
    DescribeSpace {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "sp")]
        form: Form,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct LabelSize {
    /// Dimension 2n of the symplectic space.
    #[arg(long)]
    nn: u32,
}

#[derive(Args, Debug)]
struct Target {
    /// Cycle lengths, comma separated, in any order; they sum to n.
    #[arg(long)]
    cycles: Option<String>,
    /// Total n; used when --cycles is absent.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum, default_value = "sp")]
    form: Form,
}

#[derive(Args, Debug)]
struct RunOptions {
    /// Directory for persisted reports.
    #[arg(long = "cache", env = "UNIPOTENT_CACHE_DIR")]
    cache: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long, env = "UNIPOTENT_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Sp,
    So,
}

impl From<Form> for FormKind {
    fn from(f: Form) -> Self {
        match f {
            Form::Sp => FormKind::Symplectic,
            Form::So => FormKind::Orthogonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

enum Failure {
    Usage(String),
    Runtime(String),
    /// A verification ran and did not hold; the report has already been printed.
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::NotUnipotent | Error::NotIsometry | Error::FlagSearchExhausted(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// A closed stdout (e.g. piping into `head`) ends the command quietly.
fn stdout_closed(e: io::Error) -> Outcome {
    if e.kind() == io::ErrorKind::BrokenPipe {
        Ok(())
    } else {
        Err(e.into())
    }
}

macro_rules! out {
    ($($arg:tt)*) => {
        if let Err(e) = writeln!(io::stdout().lock(), $($arg)*) {
            return stdout_closed(e);
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_nn(nn: u32) -> Outcome {
    if nn < 2 || nn % 2 == 1 {
        return Err(Failure::Usage(format!("--nn must be even and at least 2, got {nn}")));
    }
    Ok(())
}

fn check_n(n: u32, form: FormKind) -> Outcome {
    if n < 2 {
        return Err(Failure::Usage(format!("n must be at least 2, got {n}")));
    }
    if n > 32 {
        return Err(Error::TooLarge(2 * n as usize).into());
    }
    if enumerate_cycle_types(n, form).is_empty() {
        return Err(Failure::Usage(format!("no cycle types of total {n} for {form}")));
    }
    Ok(())
}

fn only(format: Format, allowed: &[Format]) -> Outcome {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--format {format:?} is not supported here").to_lowercase()))
    }
}

/// The cycle types selected by `target`: the given one, or all of total `n`.
fn cycle_types(target: &Target, single: bool) -> std::result::Result<Vec<CycleType>, Failure> {
    let form = FormKind::from(target.form);
    match (&target.cycles, target.n) {
        (Some(text), n) => {
            let ct = CycleType::parse(text)?;
            if let Some(n) = n {
                if n != ct.n() {
                    return Err(Failure::Usage(format!("--n {n} disagrees with cycles summing to {}", ct.n())));
                }
            }
            check_n(ct.n(), form)?;
            ct.check_for(form)?;
            Ok(vec![ct])
        }
        (None, Some(n)) if !single => {
            check_n(n, form)?;
            Ok(enumerate_cycle_types(n, form))
        }
        _ => Err(Failure::Usage("--cycles is required".into())),
    }
}

fn execution(run: &RunOptions) -> Execution {
    match run.threads {
        Some(t) => Execution::with_threads(t as usize),
        None => Execution::Parallel,
    }
}

fn print_json(value: &impl serde::Serialize) -> Outcome {
    let mut out = io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from).and_then(|()| writeln!(out));
    written.or_else(stdout_closed)
}

fn parse_label(text: &str, nn: u32) -> std::result::Result<SpLabel, Failure> {
    let label: SpLabel =
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("malformed label {text:?}: {e}")))?;
    if label.total() != nn {
        return Err(Failure::Usage(format!("label {label} has total {}, expected {nn}", label.total())));
    }
    Ok(label)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Labels { size, out } => {
            check_nn(size.nn)?;
            only(out.format, &[Format::Json, Format::Text])?;
            let labels = enumerate_sp_labels(size.nn);
            match out.format {
                Format::Json => print_json(&labels),
                _ => {
                    for l in &labels {
                        out!("{l}");
                    }
                    Ok(())
                }
            }
        }
        Command::Closure { size, lower, upper, out } => {
            check_nn(size.nn)?;
            only(out.format, &[Format::Json, Format::Text])?;
            if let (Some(lower), Some(upper)) = (lower, upper) {
                let (a, b) = (parse_label(&lower, size.nn)?, parse_label(&upper, size.nn)?);
                let leq = closure_leq(&a, &b)?;
                return match out.format {
                    Format::Json => print_json(&json!({ "lower": a, "upper": b, "leq": leq })),
                    _ => {
                        out!("{a} {} {b}", if leq { "≤" } else { "≰" });
                        Ok(())
                    }
                };
            }
            let labels = enumerate_sp_labels(size.nn);
            let mut pairs = Vec::new();
            for a in &labels {
                for b in &labels {
                    if a != b && closure_leq(a, b)? {
                        pairs.push((a, b));
                    }
                }
            }
            match out.format {
                Format::Json => print_json(&json!({
                    "labels": labels,
                    "relations": pairs.iter().map(|(a, b)| json!({"lower": a, "upper": b})).collect::<Vec<_>>(),
                })),
                _ => {
                    for (a, b) in pairs {
                        out!("{a} ≤ {b}");
                    }
                    Ok(())
                }
            }
        }
        Command::Hasse { size, out } => {
            check_nn(size.nn)?;
            let diagram = hasse_diagram(&enumerate_sp_labels(size.nn))?;
            match out.format {
                Format::Json => print_json(&diagram),
                Format::Dot => {
                    if let Err(e) = io::stdout().lock().write_all(diagram.to_dot().as_bytes()) {
                        return stdout_closed(e);
                    }
                    Ok(())
                }
                Format::Text => {
                    for (a, b) in diagram.covers() {
                        out!("{a} ⋖ {b}");
                    }
                    Ok(())
                }
            }
        }
        Command::Phi { target, out } => {
            only(out.format, &[Format::Json, Format::Text])?;
            let ct = cycle_types(&target, true)?.remove(0);
            let phi = phi_of_elliptic(&ct);
            match out.format {
                Format::Json => print_json(&json!({ "cycle_type": ct, "phi": phi })),
                _ => {
                    out!("{phi}");
                    Ok(())
                }
            }
        }
        Command::Flags { target, out } => {
            only(out.format, &[Format::Json])?;
            let form = FormKind::from(target.form);
            let ct = cycle_types(&target, true)?.remove(0);
            let pair = build_flag_pair(&ct, form.has_quadratic_form())?;
            print_json(&FlagPairSummary::new(&pair))
        }
        Command::Adapted { target, run, out } => {
            only(out.format, &[Format::Json, Format::Text])?;
            let form = FormKind::from(target.form);
            let ct = cycle_types(&target, true)?.remove(0);
            let report = adapted_classes(&ct, form, execution(&run))?;
            match out.format {
                Format::Json => print_json(&report),
                _ => {
                    out!("{form} [{ct}] coset {} unipotent {}", report.coset_size, report.unipotent_count);
                    out!("phi {}", report.phi_label);
                    for l in &report.adapted_labels {
                        out!("  {l}");
                    }
                    Ok(())
                }
            }
        }
        Command::Verify { target, run, out } => {
            only(out.format, &[Format::Json, Format::Text])?;
            let form = FormKind::from(target.form);
            let exec = execution(&run);
            let cache = run.cache.as_ref().map(ReportCache::new);
            let mut reports: Vec<VerificationReport> = Vec::new();
            for ct in cycle_types(&target, false)? {
                let report = match &cache {
                    Some(c) => c.get_or_verify(&ct, form, exec)?,
                    None => verify(&ct, form, exec)?,
                };
                reports.push(report);
            }
            match out.format {
                Format::Json if reports.len() == 1 => print_json(&reports[0])?,
                Format::Json => print_json(&reports)?,
                _ => {
                    for r in &reports {
                        let status = if r.verdicts.all_hold() { "holds" } else { "FAILS" };
                        out!("{form} [{}] {status}: phi {}", r.report.cycle_type, r.report.phi_label);
                    }
                }
            }
            let failed: Vec<_> = reports.iter().filter(|r| !r.verdicts.all_hold()).collect();
            if failed.is_empty() {
                return Ok(());
            }
            for r in failed {
                eprintln!("verification failed for {form} [{}]: {:?}", r.report.cycle_type, r.verdicts);
            }
            Err(Failure::Verification)
        }
        Command::DescribeSpace { n, form, out } => {
            only(out.format, &[Format::Json])?;
            let form = FormKind::from(form);
            if n == 0 || n > 32 {
                return Err(Failure::Usage(format!("--n must be between 1 and 32, got {n}")));
            }
            let space = FormedSpace::standard(n as usize, form.has_quadratic_form());
            print_json(&json!({
                "form": form,
                "n": n,
                "basis": basis_names(n as usize),
                "space": space,
            }))
        }
    }
}
