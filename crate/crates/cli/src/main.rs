use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use partialcp::compatdomain::Predicate;
use partialcp::search::SearchConfig;
use partialcp_cli::{
    check, domain, parse_ray, parse_times, reduce, run_case, write_file, CaseName, CaseOptions, CliError, CliResult,
    DomainOptions, ReduceOptions, Report,
};

/// Audits of quantum dynamical maps: complete positivity, assignment maps
/// and compatibility domains.
#[derive(Parser, Debug)]
#[command(name = "partialcp", version)]
struct Cli {
    /// Numerical tolerance for all verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized searches and probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the machine-readable JSON report here (a directory for `reduce`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Audit a superoperator or assignment-map file.
    Check {
        file: PathBuf,
        /// Pure-state samples for the positivity search.
        #[arg(long, default_value_t = partialcp::channels::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Reproduce one of the reference examples.
    PaperCase {
        #[arg(value_enum)]
        name: CaseName,
        /// Correlation strength for `correlated`.
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        c: f64,
        /// Sample times for `inconsistent`, as t0:t1:steps.
        #[arg(long, default_value = "0:2:21")]
        times: String,
        #[arg(long, default_value_t = partialcp::channels::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Build reduced dynamical maps from an assignment and a generator.
    Reduce {
        assignment: PathBuf,
        generator: PathBuf,
        /// Times as t0:t1:steps or a single value.
        #[arg(long, default_value = "0")]
        times: String,
    },
    /// Map the compatibility domain of an assignment or reduced map.
    Domain {
        assignment: PathBuf,
        /// Generator file; the predicate then refers to the reduced map.
        #[arg(long)]
        generator: Option<PathBuf>,
        /// Time at which the reduced map is taken.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        time: f64,
        #[arg(long, value_enum, default_value_t = PredicateArg::Phi)]
        predicate: PredicateArg,
        /// Landscape points per shell.
        #[arg(long)]
        resolution: Option<usize>,
        /// Extra ray direction x,y,z for boundary radii (repeatable).
        #[arg(long = "ray", allow_negative_numbers = true)]
        rays: Vec<String>,
        /// Convexity trials.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Write landscape samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PredicateArg {
    Phi,
    Lambda,
}

fn run(cli: Cli) -> CliResult<Report> {
    if !partialcp::matcore::set_tol(cli.tol) {
        return Err(CliError::Usage(format!("--tol must be positive and finite, got {}", cli.tol)));
    }
    let report = match cli.command {
        Command::Check { file, budget } => check(&file, SearchConfig::with_budget(budget, cli.seed))?,
        Command::PaperCase { name, c, times, budget } => {
            let opts = CaseOptions { c, seed: cli.seed, budget, times: parse_times(&times)? };
            let result = run_case(name, &opts)?;
            Report::new(result.text(), &result, !result.pass)
        }
        Command::Reduce { assignment, generator, times } => {
            let opts = ReduceOptions { times: parse_times(&times)?, out_dir: cli.out.clone(), seed: cli.seed };
            return reduce(&assignment, &generator, &opts);
        }
        Command::Domain { assignment, generator, time, predicate, resolution, rays, trials, csv } => {
            let opts = DomainOptions {
                generator: generator.map(|g| (g, time)),
                predicate: match predicate {
                    PredicateArg::Phi => Predicate::PhiPositive,
                    PredicateArg::Lambda => Predicate::LambdaPositive,
                },
                resolution,
                rays: rays.iter().map(|r| parse_ray(r)).collect::<CliResult<_>>()?,
                trials,
                csv,
                seed: cli.seed,
            };
            domain(&assignment, &opts)?
        }
    };
    if let Some(path) = &cli.out {
        write_file(path, &serde_json::to_string_pretty(&report.json).expect("JSON value"))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.text);
            if report.negative {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
