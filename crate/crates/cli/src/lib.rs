//! Command-line front end: seeded simulations, closed-form bounds, exact
//! prefix probabilities, SVG plots of summary CSVs, and the acceptance
//! verification suite.
//!
//! Exit codes: 0 on success, 1 on runtime or criterion failure, 2 on usage
//! errors. All randomness flows from `--seed`; there is no wall-clock
//! seeding anywhere.

pub mod svg;
pub mod verify;

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use patricia_lab::bitstreams::{parse_bits, sample_string_with, DistributionSpec};
use patricia_lab::bounds;
use patricia_lab::experiments::{
    run_grid, write_summary_csv, write_trials_csv, ExperimentConfig,
};

/// Environment variable capping the simulation worker count.
pub const THREADS_ENV: &str = "PATRICIA_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "patricia-lab",
    version,
    about = "PATRICIA tree height experiments over random binary string models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded Monte Carlo sweep and write trials.csv / summary.csv.
    Simulate(SimulateArgs),
    /// Evaluate one of the closed-form bounds.
    Bounds(BoundsArgs),
    /// Exact (and optionally Monte Carlo) probability of a string prefix.
    PrefixProb(PrefixProbArgs),
    /// Run the acceptance verification suite.
    Verify(VerifyArgs),
    /// Render two summary CSV columns as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// JSON config file; inline flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Distribution spec as JSON, e.g. '{"law":"mu_n","N":1000}'.
    #[arg(long)]
    dist: Option<String>,
    /// Comma-separated strictly ascending tree sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Trials per grid point (default 1).
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed. Required here or in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Scan guard per string.
    #[arg(long)]
    max_depth: Option<u64>,
    /// Skip the per-trial CSV.
    #[arg(long)]
    summary_only: bool,
    /// Record wall-clock elapsed_ms per trial. Off by default so that equal
    /// invocations produce byte-identical CSVs.
    #[arg(long)]
    timings: bool,
    /// Worker cap; overrides the PATRICIA_LAB_THREADS environment variable.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for the CSVs.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(subcommand)]
    which: BoundsCommand,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// 2^k * exp(-eps*n/2): some k-bit prefix class crowds above 2*eps*n.
    Chernoff {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: f64,
    },
    /// exp(-n/(2*alpha)): binomial level count falls below half its mean.
    Okamoto {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
    },
    /// exp(-t^2/(2n)): height drops t below its expectation.
    Devroye {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: f64,
    },
    /// n - n^2/(2N^2): expected distinct first-one indices under mu_N.
    DistinctFloor {
        #[arg(long)]
        n: u64,
        #[arg(long = "big-n")]
        big_n: u64,
    },
    /// n / alpha: proven expected-height floor for the mixture law.
    HeightFloor {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Args, Debug)]
struct PrefixProbArgs {
    /// Distribution spec as JSON.
    #[arg(long)]
    dist: String,
    /// Bit string such as 00101.
    #[arg(long)]
    prefix: String,
    /// Also estimate the probability from this many sampled strings.
    #[arg(long)]
    mc_samples: Option<u64>,
    /// Seed for the Monte Carlo estimate; required with --mc-samples.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only these criterion numbers (comma separated, 1..=11).
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u32>>,
    /// Base seed for the suite.
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// summary.csv produced by simulate.
    #[arg(long)]
    summary: PathBuf,
    /// Column for the x axis, e.g. n.
    #[arg(long)]
    x: String,
    /// Column for the y axis, e.g. h_over_log2n.
    #[arg(long)]
    y: String,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

/// Parses and dispatches; returns the process exit code.
pub fn run_cli(args: &[String]) -> u8 {
    let mut argv = vec!["patricia-lab".to_string()];
    argv.extend_from_slice(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Simulate(args) => exit_code(simulate(args)),
        Command::Bounds(args) => exit_code(bounds_cmd(args)),
        Command::PrefixProb(args) => exit_code(prefix_prob(args)),
        Command::Plot(args) => exit_code(plot(args)),
        Command::Verify(args) => match verify_cmd(args) {
            Ok(all_passed) => {
                if all_passed {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                1
            }
        },
    }
}

/// Marker for errors that should exit with the usage code.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn exit_code(result: Result<()>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                2
            } else {
                1
            }
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dist: Option<DistributionSpec>,
    n_grid: Option<Vec<u64>>,
    trials: Option<u64>,
    seed: Option<u64>,
    max_depth: Option<u64>,
    emit_per_trial: Option<bool>,
}

fn merged_config(args: &SimulateArgs) -> Result<ExperimentConfig> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let spec = match (&args.dist, file.dist) {
        (Some(json), _) => DistributionSpec::from_json(json).map_err(|e| usage(e.to_string()))?,
        (None, Some(spec)) => spec,
        (None, None) => return Err(usage("--dist is required (flag or config file)")),
    };
    let n_grid = args
        .n
        .clone()
        .or(file.n_grid)
        .ok_or_else(|| usage("--n is required (flag or config file)"))?;
    let seed = args
        .seed
        .or(file.seed)
        .ok_or_else(|| usage("--seed is required; runs are never wall-clock seeded"))?;
    let config = ExperimentConfig {
        spec,
        n_grid,
        trials: args.trials.or(file.trials).unwrap_or(1),
        seed,
        max_depth: args
            .max_depth
            .or(file.max_depth)
            .unwrap_or(patricia_lab::DEFAULT_MAX_DEPTH),
        emit_per_trial: if args.summary_only {
            false
        } else {
            file.emit_per_trial.unwrap_or(true)
        },
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn thread_cap(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&v| v > 0)
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let config = merged_config(&args)?;
    let (records, summary) = match thread_cap(args.threads) {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building worker pool")?
            .install(|| run_grid(&config)),
        None => run_grid(&config),
    }?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    if config.emit_per_trial {
        let path = args.out.join("trials.csv");
        let file = fs::File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        write_trials_csv(file, &config, &records, args.timings)?;
        println!("wrote {}", path.display());
    }
    let path = args.out.join("summary.csv");
    let file =
        fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_summary_csv(file, &config, &summary)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn bounds_cmd(args: BoundsArgs) -> Result<()> {
    let value = match args.which {
        BoundsCommand::Chernoff { n, k, eps } => bounds::chernoff_crowding_bound(n, k, eps)?,
        BoundsCommand::Okamoto { n, alpha } => {
            if !bounds::okamoto_regime_ok(alpha) {
                eprintln!("warning: alpha = {alpha} is below the bound's regime (alpha >= 8)");
            }
            bounds::okamoto_bound(n, alpha)?
        }
        BoundsCommand::Devroye { n, t } => bounds::devroye_tail(n, t)?,
        BoundsCommand::DistinctFloor { n, big_n } => bounds::distinct_lower_bound(n, big_n)?,
        BoundsCommand::HeightFloor { n, alpha } => bounds::mixture_height_floor(n, alpha)?,
    };
    println!("{value}");
    Ok(())
}

fn prefix_prob(args: PrefixProbArgs) -> Result<()> {
    let spec = DistributionSpec::from_json(&args.dist).map_err(|e| usage(e.to_string()))?;
    let prefix = parse_bits(&args.prefix).map_err(|e| usage(e.to_string()))?;
    if prefix.is_empty() {
        return Err(usage("--prefix must be nonempty"));
    }
    let exact = spec.prefix_probability(&prefix)?;
    println!("{exact}");
    if let Some(samples) = args.mc_samples {
        if samples == 0 {
            return Err(usage("--mc-samples must be positive"));
        }
        let seed = args
            .seed
            .ok_or_else(|| usage("--seed is required with --mc-samples"))?;
        let mut hits = 0u64;
        for i in 0..samples {
            let key = patricia_lab::bitstreams::mix_key(seed, &[i]);
            let mut s = sample_string_with(&spec, key, 0, patricia_lab::DEFAULT_MAX_DEPTH)?;
            let mut matches = true;
            for (idx, &bit) in prefix.iter().enumerate() {
                if s.bit_at(idx as u64 + 1)? != bit {
                    matches = false;
                    break;
                }
            }
            if matches {
                hits += 1;
            }
        }
        println!("mc {}", hits as f64 / samples as f64);
    }
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let rendered = svg::emit_svg(&args.summary, &args.x, &args.y)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(&args.out, rendered)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn verify_cmd(args: VerifyArgs) -> Result<bool> {
    if let Some(ids) = &args.only {
        for &id in ids {
            if !(1..=verify::CRITERIA_COUNT).contains(&id) {
                bail!(anyhow!("unknown criterion {id}; valid range is 1..=11"));
            }
        }
    }
    let exe = std::env::current_exe().context("locating this binary for the round-trip check")?;
    let outcomes = verify::run(args.only.as_deref(), args.seed, &exe);
    let mut all = true;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2} {:<32} {status}  {}", o.id, o.name, o.detail);
        all &= o.passed;
    }
    Ok(all)
}
