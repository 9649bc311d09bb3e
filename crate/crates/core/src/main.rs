use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pogame::error::Error;
use pogame::quantum_opt::SeesawConfig;
use pogame::report::{
    render, resolve_family, run_pipeline, BoundsSummary, CertifySummary, Check, Format, OptimizeSummary,
    PipelineOptions, SelftestSummary,
};

#[derive(Parser)]
#[command(name = "pogame", version, about = "Bounds, optimization, self-testing and randomness certification for the parity-oblivious game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local and parity-constrained bounds with witnesses.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// See-saw search for the quantum value and its SOS certificate.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Self-testing relations and SWAP-isometry extraction (n = 3 or 5).
    Selftest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        /// Mix weight of |00> into the maximally entangled state.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// POVM certification and local randomness.
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        /// Weight of the penalty term in the shifted expression.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Full pipeline report.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Number of inputs (odd, at least 3).
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Search {
    #[arg(long, env = "POGAME_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Registered optimizer (seesaw, seesaw-free).
    #[arg(long, default_value = "seesaw")]
    optimizer: String,
}

#[derive(Args)]
struct FamilyArgs {
    /// Observable family (trine, halves, quartets); defaults by n.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated (nu, beta) pairs for the family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

impl Search {
    fn config(&self, parity: bool) -> SeesawConfig {
        SeesawConfig {
            seed: self.seed,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            parity,
        }
    }
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInputCount(_)
            | Error::InputsOutOfRange { .. }
            | Error::InvalidParams(_)
            | Error::UnknownStrategy { .. }
            | Error::Parse(_)
    )
}

fn emit(common: &Common, body: String) -> Result<(), Error> {
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Vec<Check>, Error> {
    match cli.command {
        Command::Bounds { common } => {
            let s = BoundsSummary::compute(common.n)?;
            let f = common.format.map_or(Format::Text, Format::from);
            emit(&common, render(&s, f, BoundsSummary::text)?)?;
            Ok(s.checks())
        }
        Command::Optimize { common, search } => {
            let s = OptimizeSummary::compute(common.n, &search.optimizer, &search.config(true))?;
            let f = common.format.map_or(Format::Text, Format::from);
            emit(&common, render(&s, f, OptimizeSummary::text)?)?;
            Ok(s.checks())
        }
        Command::Selftest { common, family, perturb } => {
            if common.n != 3 && common.n != 5 {
                return Err(Error::InputsOutOfRange { n: common.n, min: 3, max: 5 });
            }
            let fam = resolve_family(common.n, family.family.as_deref(), &family.params)?;
            let s = SelftestSummary::compute(&fam, perturb)?;
            let f = common.format.map_or(Format::Text, Format::from);
            emit(&common, render(&s, f, SelftestSummary::text)?)?;
            Ok(s.checks())
        }
        Command::Certify { common, family, alpha, tol } => {
            let fam = resolve_family(common.n, family.family.as_deref(), &family.params)?;
            let s = CertifySummary::compute(&fam, alpha, tol)?;
            let f = common.format.map_or(Format::Text, Format::from);
            emit(&common, render(&s, f, CertifySummary::text)?)?;
            Ok(s.checks())
        }
        Command::Report { common, family, search, alpha } => {
            let opts = PipelineOptions {
                n: common.n,
                family: family.family,
                params: family.params,
                optimizer: search.optimizer.clone(),
                seesaw: search.config(true),
                alpha,
            };
            let r = run_pipeline(&opts)?;
            let f = common.format.map_or(Format::Json, Format::from);
            emit(&common, render(&r, f, |r| r.text())?)?;
            Ok(r.checks)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(checks) => {
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed checks: {}", failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if usage_error(&e) { 2 } else { 1 })
        }
    }
}
