use std::io::{self, IsTerminal, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use euler_lab::{
    census_with_bound, classify, enumerate_streaming, find_euler_witness, solovay_strassen,
    verify_characterization, BlockProgress, CarmichaelKind, Error, LiarCountMode, LiarRecord,
    SweepOptions, DEFAULT_CENSUS_BOUND,
};
use serde::Serialize;

const SCHEMA_VERSION: &str = "1";
const CENSUS_BOUND_VAR: &str = "EULER_LAB_CENSUS_BOUND";

#[derive(Parser)]
#[command(name = "euler-lab", version, about = "Euler liars, Carmichael numbers and the Solovay-Strassen test")]
struct Cli {
    /// Fill in `elapsed_ms` (makes output non-reproducible).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive liar census for an odd composite.
    Census { n: u64 },
    /// Prime / composite / Carmichael / special Carmichael verdict.
    Classify { n: u64 },
    /// List Carmichael or special Carmichael numbers up to a limit.
    Enumerate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        limit: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check "half the units are liars iff special Carmichael" over a range.
    Verify {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t = Mode::Monier)]
        mode: Mode,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// First gcd or Euler witness for an odd composite.
    Witness { n: u64 },
    /// Seeded Solovay-Strassen test.
    Sstest {
        n: u64,
        #[arg(long, default_value_t = 20)]
        rounds: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Carmichael,
    SpecialCarmichael,
}

impl From<Kind> for CarmichaelKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Carmichael => CarmichaelKind::Carmichael,
            Kind::SpecialCarmichael => CarmichaelKind::SpecialCarmichael,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    BruteForce,
    Monier,
}

impl From<Mode> for LiarCountMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::BruteForce => LiarCountMode::BruteForce,
            Mode::Monier => LiarCountMode::Monier,
        }
    }
}

#[derive(Serialize)]
struct Envelope<T> {
    schema_version: &'static str,
    command: &'static str,
    result: T,
    elapsed_ms: Option<u64>,
}

#[derive(Serialize)]
struct EnumerateResult {
    kind: CarmichaelKind,
    limit: u64,
    count: u64,
    numbers: Vec<u64>,
}

#[derive(Serialize)]
struct VerifyResult {
    from: u64,
    to: u64,
    mode: LiarCountMode,
    checked: u64,
    violations: Vec<LiarRecord>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(msg) => Failure::Usage(msg),
            other => Failure::Domain(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("write failed: {e}"))
    }
}

struct Ctx {
    timings: bool,
    started: Instant,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &'static str, result: T) -> Result<(), Failure> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            result,
            elapsed_ms: self.timings.then(|| self.started.elapsed().as_millis() as u64),
        };
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, &envelope)
            .map_err(|e| Failure::Domain(format!("serialization failed: {e}")))?;
        writeln!(out)?;
        Ok(())
    }
}

fn census_bound() -> Result<u64, Failure> {
    match std::env::var(CENSUS_BOUND_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{CENSUS_BOUND_VAR} must be a decimal integer"))),
        Err(_) => Ok(DEFAULT_CENSUS_BOUND),
    }
}

fn sweep_options(workers: Option<usize>) -> Result<SweepOptions, Failure> {
    let mut opts = SweepOptions::default();
    if let Some(w) = workers {
        opts.workers = w;
    }
    opts.census_bound = census_bound()?;
    Ok(opts)
}

fn progress_reporter(label: &'static str) -> impl FnMut(BlockProgress) {
    let tty = io::stderr().is_terminal();
    move |p: BlockProgress| {
        if tty && (p.blocks_done.is_multiple_of(50) || p.blocks_done == p.blocks_total) {
            eprint!("\r{label}: block {}/{}", p.blocks_done, p.blocks_total);
            if p.blocks_done == p.blocks_total {
                eprintln!();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Ctx {
        timings: cli.timings,
        started: Instant::now(),
    };
    match cli.command {
        Command::Census { n } => ctx.emit("census", census_with_bound(n, census_bound()?)?),
        Command::Classify { n } => ctx.emit("classify", classify(n)?),
        Command::Witness { n } => ctx.emit("witness", find_euler_witness(n)?),
        Command::Sstest { n, rounds, seed } => {
            ctx.emit("sstest", solovay_strassen(n, rounds, seed)?)
        }
        Command::Enumerate {
            kind,
            limit,
            format,
            workers,
        } => {
            let opts = sweep_options(workers)?;
            let mut progress = progress_reporter("enumerate");
            match format {
                Format::Json => {
                    let mut numbers = Vec::new();
                    let count = enumerate_streaming(kind.into(), limit, &opts, &mut progress, &mut |n| {
                        numbers.push(n)
                    })?;
                    ctx.emit(
                        "enumerate",
                        EnumerateResult {
                            kind: kind.into(),
                            limit,
                            count,
                            numbers,
                        },
                    )
                }
                Format::Csv => {
                    let mut out = io::BufWriter::new(io::stdout().lock());
                    writeln!(out, "n")?;
                    let mut write_err = None;
                    let count = enumerate_streaming(kind.into(), limit, &opts, &mut progress, &mut |n| {
                        if write_err.is_none() {
                            if let Err(e) = writeln!(out, "{n}") {
                                write_err = Some(e);
                            }
                        }
                    })?;
                    if let Some(e) = write_err {
                        return Err(e.into());
                    }
                    out.flush()?;
                    eprintln!("enumerate: {count} numbers up to {limit}");
                    Ok(())
                }
            }
        }
        Command::Verify {
            from,
            to,
            mode,
            workers,
        } => {
            let opts = sweep_options(workers)?;
            let report =
                verify_characterization(from, to, mode.into(), &opts, &mut progress_reporter("verify"))?;
            if ctx.timings {
                eprintln!("verify: {} odd composites in {:?}", report.checked, report.elapsed);
            }
            ctx.emit(
                "verify",
                VerifyResult {
                    from: report.lo,
                    to: report.hi,
                    mode: report.mode,
                    checked: report.checked,
                    violations: report.violations,
                },
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
