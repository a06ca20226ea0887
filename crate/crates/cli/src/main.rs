use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mechcheck::harness::Verdict;
use mechcheck::scenario::{self, verdict_word, Overrides, ScenarioError};
use mechcheck::utility::sample::{random_parallel_profile, random_quasi_linear_profile, rng_from_seed};
use mechcheck::witness::{run_impossibility_sweep, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "mechcheck", version, about = "Run and check mechanisms with payments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for sampled checks; overrides the file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance for every check; overrides the file.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Trials for sampled checks; overrides the file.
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the mechanism of a scenario (or manifest) and print the outcome.
    Run { file: PathBuf },
    /// Run the checks listed in a scenario (or manifest).
    Check { file: PathBuf },
    /// Run an impossibility sweep described by a config file.
    Witness {
        config: PathBuf,
        /// Directory receiving refutation reports and refuting profiles.
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Print a random type profile.
    Sample {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        alternatives: usize,
        /// Largest willingness to pay.
        #[arg(long, default_value_t = 5.0)]
        range: f64,
        /// Strictly parallel types.
        #[arg(long, conflicts_with = "quasi_linear")]
        strict: bool,
        /// Quasi-linear types on a dyadic grid.
        #[arg(long)]
        quasi_linear: bool,
        /// Write the profile here instead of stdout.
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
}

/// Bad input or usage: exit 2 like an inconclusive run.
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Verdict> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            bail!("--tol must be a finite non-negative number");
        }
    }
    match &cli.command {
        Command::Run { file } => cmd_run(cli, file),
        Command::Check { file } => cmd_check(cli, file),
        Command::Witness { config, emit_profile } => cmd_witness(cli, config, emit_profile.as_deref()),
        Command::Sample {
            agents,
            alternatives,
            range,
            strict,
            quasi_linear,
            emit_profile,
        } => cmd_sample(cli, *agents, *alternatives, *range, *strict, *quasi_linear, emit_profile.as_deref()),
    }
}

fn load(file: &Path) -> Result<Vec<(String, scenario::Scenario)>> {
    scenario::load(file).map_err(|e: ScenarioError| anyhow::anyhow!(e))
}

/// A lone report prints as an object, several as an array.
macro_rules! print_json {
    ($items:expr) => {{
        let text = match $items.as_slice() {
            [one] => serde_json::to_string_pretty(one)?,
            many => serde_json::to_string_pretty(many)?,
        };
        println!("{text}");
    }};
}

fn cmd_run(cli: &Cli, file: &Path) -> Result<Verdict> {
    let runs = load(file)?
        .iter()
        .map(|(name, s)| s.run(name))
        .collect::<Result<Vec<_>, _>>()?;
    match cli.format {
        Format::Machine => print_json!(runs),
        Format::Human => {
            for r in &runs {
                print!("{}", r.human());
            }
        }
    }
    Ok(Verdict::Pass)
}

fn cmd_check(cli: &Cli, file: &Path) -> Result<Verdict> {
    let ov = Overrides {
        seed: cli.seed,
        tol: cli.tol,
        trials: cli.trials,
    };
    let reports = load(file)?
        .iter()
        .map(|(name, s)| s.check(name, ov))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass);
    match cli.format {
        Format::Machine => print_json!(reports),
        Format::Human => {
            for r in &reports {
                print!("{}", r.human());
            }
            if reports.len() > 1 {
                println!("overall: {}", verdict_word(verdict));
            }
        }
    }
    Ok(verdict)
}

fn cmd_witness(cli: &Cli, config: &Path, emit: Option<&Path>) -> Result<Verdict> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    if text.trim().is_empty() {
        bail!("{}: empty witness config; write {{}} for the default sweep", config.display());
    }
    let mut cfg: SweepConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(t) = cli.trials {
        cfg.onto_trials = t;
    }
    let out = run_impossibility_sweep(&cfg)?;
    if let Some(dir) = emit {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (j, r) in out.reports.iter().enumerate() {
            fs::write(dir.join(format!("refutation-{j:03}.json")), r.to_json() + "\n")?;
            for (k, p) in r.profiles.iter().enumerate() {
                let body = serde_json::to_string_pretty(p)? + "\n";
                fs::write(dir.join(format!("refutation-{j:03}-profile-{k}.json")), body)?;
            }
        }
    }
    match cli.format {
        Format::Machine => println!("{}", out.summary.to_json()),
        Format::Human => print!("{}", out.summary.human()),
    }
    Ok(out.summary.verdict())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    cli: &Cli,
    n: usize,
    m: usize,
    range: f64,
    strict: bool,
    quasi_linear: bool,
    emit: Option<&Path>,
) -> Result<Verdict> {
    if n == 0 || m == 0 {
        bail!("need at least one agent and one alternative");
    }
    if !(range.is_finite() && range > 0.0) {
        bail!("--range must be positive");
    }
    let mut rng = rng_from_seed(cli.seed.unwrap_or(0));
    let profile = if quasi_linear {
        random_quasi_linear_profile(&mut rng, n, m)
    } else {
        random_parallel_profile(&mut rng, n, m, range, strict)
    };
    let body = serde_json::to_string_pretty(&profile)? + "\n";
    match emit {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(Verdict::Pass)
}
