use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gapsum_core::characters::CharacterGroup;
use gapsum_core::fourier::{l1_bound, FourierProfile};
use gapsum_core::harness::{
    counterexample_demo, extremal_search, render_report, run_sweep, CharacterSelection,
    ModulusFilter,
};
use gapsum_core::sums::{character_sum_over_gap, multilinear_character_sum, poly_exp_sum_over_gap};
use gapsum_core::verify::{run_criterion, CRITERIA};
use gapsum_core::{Error, Gap, PolynomialModQ, ReportFormat, SumKind, SweepConfig};

#[derive(Parser)]
#[command(
    name = "gapsum",
    version,
    about = "Character and exponential sums over generalized arithmetic progressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate sums over many moduli, characters and GAPs and write a report.
    Sweep(SweepArgs),
    /// Search for the largest character sum over proper GAPs of rank r mod q.
    Search {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: usize,
        /// Maximum number of (GAP, character) evaluations.
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Evaluate both sides of the multiset counterexample identity.
    DemoCounterexample {
        #[arg(long)]
        q: u64,
        /// Side length H, between 1 and q/2.
        #[arg(long = "h")]
        h: u64,
    },
    /// Run the acceptance checks (all of them unless some are named).
    Verify {
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
    /// l1 norm of the Fourier transform of a GAP.
    L1norm {
        /// GAP as JSON, e.g. {"q":5,"s":1,"base":[0],"generators":[[1]],"lengths":[3]}
        #[arg(long)]
        gap: String,
    },
    /// One character sum (or polynomial exponential sum) over a GAP.
    Charsum {
        #[arg(long)]
        gap: String,
        /// Character exponents on the unit-group generators, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "polynomial")]
        exponents: Option<Vec<u64>>,
        /// Polynomial coefficients c0,c1,...,cd for an exponential sum.
        #[arg(long, value_delimiter = ',')]
        polynomial: Option<Vec<u64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Character,
    Polynomial,
    Multilinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    q_min: Option<u64>,
    #[arg(long)]
    q_max: Option<u64>,
    /// Restrict to prime moduli.
    #[arg(long)]
    primes: bool,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    #[arg(long)]
    exhaustive_cutoff: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Sample this many primitive characters per modulus instead of all.
    #[arg(long)]
    sample_characters: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl SweepArgs {
    fn into_config(self) -> Result<SweepConfig, Error> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                SweepConfig::from_json(&text)?
            }
            None => SweepConfig::new(
                SumKind::Character,
                self.q_min.ok_or_else(|| missing("--q-min"))?,
                self.q_max.ok_or_else(|| missing("--q-max"))?,
            ),
        };
        if let Some(k) = self.kind {
            config.kind = match k {
                KindArg::Character => SumKind::Character,
                KindArg::Polynomial => SumKind::Polynomial,
                KindArg::Multilinear => SumKind::Multilinear,
            };
        }
        if let Some(v) = self.q_min {
            config.q_min = v;
        }
        if let Some(v) = self.q_max {
            config.q_max = v;
        }
        if self.primes {
            config.filter = ModulusFilter::Primes;
        }
        if let Some(v) = self.s {
            config.s = v;
        }
        if let Some(v) = self.ranks {
            config.ranks = v;
        }
        if let Some(v) = self.exhaustive_cutoff {
            config.exhaustive_cutoff = v;
        }
        if let Some(v) = self.samples {
            config.samples = v;
        }
        if let Some(n) = self.sample_characters {
            config.characters = CharacterSelection::Sample(n);
        }
        if let Some(v) = self.degrees {
            config.degrees = v;
        }
        if self.seed.is_some() {
            config.seed = self.seed;
        }
        if self.output.is_some() {
            config.output = self.output;
        }
        if let Some(f) = self.format {
            config.format = Some(match f {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Jsonl => ReportFormat::JsonLines,
            });
        }
        config.validate()?;
        Ok(config)
    }
}

fn missing(flag: &str) -> Error {
    Error::InvalidArgument(format!("{flag} is required without --config"))
}

fn parse_gap(text: &str) -> Result<Gap, Error> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("--gap: {e}")))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("values serialize")
}

fn run(command: Command) -> Result<ExitCode, Error> {
    let mut out = std::io::stdout().lock();
    let stdout_err = |e: std::io::Error| Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match command {
        Command::Sweep(args) => {
            let config = args.into_config()?;
            let rows = run_sweep(&config)?;
            if config.output.is_none() {
                out.write_all(render_report(&rows, config.report_format())?.as_bytes())
                    .map_err(stdout_err)?;
            } else {
                eprintln!("{} rows written", rows.len());
            }
        }
        Command::Search { q, r, budget, seed } => {
            let result = extremal_search(q, r, budget, seed)?;
            writeln!(out, "{}", json(&result)).map_err(stdout_err)?;
        }
        Command::DemoCounterexample { q, h } => {
            let report = counterexample_demo(q, h)?;
            writeln!(out, "{}", json(&report)).map_err(stdout_err)?;
        }
        Command::Verify { criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                criteria
            };
            let mut failed = false;
            for id in ids {
                let outcome = run_criterion(id)?;
                writeln!(out, "{outcome}").map_err(stdout_err)?;
                failed |= outcome.asserted && !outcome.passed;
            }
            if failed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::L1norm { gap } => {
            let g = parse_gap(&gap)?;
            let profile = FourierProfile::new(&g)?;
            let bound = match l1_bound(&g) {
                Ok(b) => Some(b),
                Err(Error::Precondition(_)) => None,
                Err(e) => return Err(e),
            };
            let value = serde_json::json!({
                "gap": g,
                "l1": profile.l1,
                "linf": profile.linf,
                "l1_bound": bound,
                "ratio": bound.map(|b| profile.l1 / b),
            });
            writeln!(out, "{}", json(&value)).map_err(stdout_err)?;
        }
        Command::Charsum {
            gap,
            exponents,
            polynomial,
        } => {
            let g = parse_gap(&gap)?;
            let report = match (exponents, polynomial) {
                (_, Some(coeffs)) => {
                    poly_exp_sum_over_gap(&PolynomialModQ::new(g.q(), coeffs)?, &g)?
                }
                (Some(e), None) => {
                    let chi = CharacterGroup::for_modulus(g.q())?.character(e)?;
                    if g.dimension() == 1 {
                        character_sum_over_gap(&chi, &g)?
                    } else {
                        multilinear_character_sum(&chi, &g)?
                    }
                }
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "pass --exponents or --polynomial".into(),
                    ))
                }
            };
            writeln!(out, "{}", json(&report)).map_err(stdout_err)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) => 2,
        Error::Resource { .. } => 3,
        Error::Io { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gapsum: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
