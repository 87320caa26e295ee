//! `lrtc`: tensor completion benchmark CLI.
//!
//! Masks are reproducible across platforms: a ChaCha20 stream seeded with
//! the `--seed` value drives a partial Fisher-Yates shuffle of the linear
//! indices. Every option can also be set through an `LRTC_*` environment
//! variable (e.g. `LRTC_SEED`); precedence is CLI flag > environment >
//! config file > built-in default.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use lrtc_core::csc::{train_dictionary, CscParams, TrainConfig};
use lrtc_core::mask::{generate_mask, generate_mask_per_pixel};
use lrtc_core::metrics::report;
use lrtc_core::Method;
use lrtc_harness::config::Overrides;
use lrtc_harness::experiment::{metrics_row, run_experiment, sweep, ExperimentSpec, METRICS_HEADER};
use lrtc_harness::io::{load_gray, load_input};

#[derive(Parser)]
#[command(name = "lrtc", about = "Low-rank tensor completion benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complete a tensor with missing entries and report metrics.
    Complete(CompleteArgs),
    /// Learn a convolutional dictionary from a directory of images.
    TrainDict(TrainDictArgs),
    /// Generate a seeded observation mask as a 0/1 TNS1 tensor.
    Mask(MaskArgs),
    /// Compute metrics between a recovered tensor and the ground truth.
    Eval(EvalArgs),
    /// Run a method x ratio x seed grid and aggregate one CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CompleteArgs {
    /// Ground-truth input (.png or .tns)
    #[arg(long, env = "LRTC_INPUT")]
    input: PathBuf,
    /// csc1 | csc2 | halrtc | tnn
    #[arg(long, env = "LRTC_METHOD", value_parser = parse_method)]
    method: Method,
    #[arg(long, env = "LRTC_MISSING_RATIO")]
    missing_ratio: f64,
    #[arg(long, env = "LRTC_SEED", default_value_t = 0)]
    seed: u64,
    /// Dictionary file (required for csc1/csc2)
    #[arg(long, env = "LRTC_DICT")]
    dict: Option<PathBuf>,
    /// TOML file of configuration overrides
    #[arg(long, env = "LRTC_CONFIG")]
    config: Option<PathBuf>,
    /// Recovered tensor destination (.png or .tns)
    #[arg(long, env = "LRTC_OUT")]
    out: Option<PathBuf>,
    /// Metrics CSV destination
    #[arg(long, env = "LRTC_METRICS")]
    metrics: Option<PathBuf>,
    /// Per-iteration trace CSV destination
    #[arg(long, env = "LRTC_TRACE")]
    trace: Option<PathBuf>,
    #[command(flatten)]
    overrides: OverrideFlags,
}

/// CLI-level overrides; these win over the config file.
#[derive(Args, Default)]
struct OverrideFlags {
    #[arg(long, env = "LRTC_MAX_OUTER_ITERS")]
    max_outer_iters: Option<usize>,
    #[arg(long, env = "LRTC_OUTER_TOL")]
    outer_tol: Option<f64>,
    #[arg(long, env = "LRTC_BETA2")]
    beta2: Option<f64>,
    #[arg(long, env = "LRTC_LAMBDA")]
    lambda: Option<f64>,
    #[arg(long, env = "LRTC_INNER_ITERS")]
    inner_iters: Option<usize>,
    /// Erase whole pixels (all bands jointly) instead of single entries
    #[arg(long, env = "LRTC_PER_PIXEL_MASK")]
    per_pixel_mask: bool,
    /// Peak value for PSNR/SSIM (1.0 for unit scale, 255 for 8-bit)
    #[arg(long, env = "LRTC_PEAK")]
    peak: Option<f64>,
}

impl OverrideFlags {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            max_outer_iters: self.max_outer_iters,
            outer_tol: self.outer_tol,
            beta2: self.beta2,
            lambda: self.lambda,
            inner_iters: self.inner_iters,
            per_pixel_mask: self.per_pixel_mask.then_some(true),
            peak: self.peak,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct TrainDictArgs {
    /// Directory of training images (.png grayscale or single-slice .tns)
    #[arg(long, env = "LRTC_INPUTS")]
    inputs: PathBuf,
    /// Number of filters
    #[arg(long, env = "LRTC_FILTERS", default_value_t = 32)]
    filters: usize,
    /// Filter support (pixels per side)
    #[arg(long, env = "LRTC_SIZE", default_value_t = 16)]
    size: usize,
    #[arg(long, env = "LRTC_SEED", default_value_t = 0)]
    seed: u64,
    /// Alternating rounds
    #[arg(long, env = "LRTC_ROUNDS", default_value_t = 10)]
    rounds: usize,
    /// Sparsity weight during training
    #[arg(long, env = "LRTC_LAMBDA", default_value_t = 10.0)]
    lambda: f64,
    /// Inner solver sweeps per coding call
    #[arg(long, env = "LRTC_INNER_ITERS", default_value_t = 50)]
    inner_iters: usize,
    #[arg(long, env = "LRTC_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct MaskArgs {
    /// Dimensions as N1xN2xN3
    #[arg(long, env = "LRTC_DIMS")]
    dims: String,
    #[arg(long, env = "LRTC_MISSING_RATIO")]
    missing_ratio: f64,
    #[arg(long, env = "LRTC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "LRTC_PER_PIXEL_MASK")]
    per_pixel_mask: bool,
    #[arg(long, env = "LRTC_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, env = "LRTC_RECOVERED")]
    recovered: PathBuf,
    #[arg(long, env = "LRTC_TRUTH")]
    truth: PathBuf,
    #[arg(long, env = "LRTC_METRICS")]
    metrics: Option<PathBuf>,
    #[arg(long, env = "LRTC_PEAK", default_value_t = 1.0)]
    peak: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Input files; every method/ratio/seed combination runs on each
    #[arg(long, env = "LRTC_INPUTS", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated method list
    #[arg(long, env = "LRTC_METHODS", value_delimiter = ',', required = true, value_parser = parse_method)]
    methods: Vec<Method>,
    /// Comma-separated missing ratios
    #[arg(long, env = "LRTC_RATIOS", value_delimiter = ',', required = true)]
    ratios: Vec<f64>,
    /// Comma-separated seeds
    #[arg(long, env = "LRTC_SEEDS", value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, env = "LRTC_DICT")]
    dict: Option<PathBuf>,
    #[arg(long, env = "LRTC_CONFIG")]
    config: Option<PathBuf>,
    /// Aggregated CSV destination
    #[arg(long, env = "LRTC_OUT")]
    out: PathBuf,
    #[command(flatten)]
    overrides: OverrideFlags,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Complete(args) => cmd_complete(args),
        Command::TrainDict(args) => cmd_train_dict(args),
        Command::Mask(args) => cmd_mask(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn layered_overrides(config: Option<&PathBuf>, flags: &OverrideFlags) -> Result<Overrides> {
    let file = match config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    Ok(file.merged_under(flags.to_overrides()))
}

fn cmd_complete(args: CompleteArgs) -> Result<()> {
    let spec = ExperimentSpec {
        input: args.input,
        method: args.method,
        missing_ratio: args.missing_ratio,
        seed: args.seed,
        dictionary: args.dict,
        overrides: layered_overrides(args.config.as_ref(), &args.overrides)?,
        out: args.out,
        metrics: args.metrics,
        trace: args.trace,
    };
    let outcome = run_experiment(&spec)?;
    println!("{METRICS_HEADER}");
    println!("{}", metrics_row(&spec, &outcome));
    Ok(())
}

fn cmd_train_dict(args: TrainDictArgs) -> Result<()> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.inputs)
        .with_context(|| format!("reading {}", args.inputs.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("png" | "tns" | "tns1")
            )
        })
        .collect();
    paths.sort();
    ensure!(!paths.is_empty(), "no training images in {}", args.inputs.display());
    let images = paths
        .iter()
        .map(|p| load_gray(p))
        .collect::<Result<Vec<_>>>()?;
    eprintln!("training on {} images", images.len());
    let cfg = TrainConfig {
        filter_count: args.filters,
        support: args.size,
        outer_iters: args.rounds,
        seed: args.seed,
        csc: CscParams {
            lambda: args.lambda,
            rho: 100.0 * args.lambda + 1.0,
            inner_iters: args.inner_iters,
            input_scale: 255.0,
            ..CscParams::default()
        },
        ..TrainConfig::default()
    };
    let result = train_dictionary(&images, &cfg)?;
    eprintln!(
        "objective {:.4} -> {:.4} over {} rounds",
        result.objective.first().unwrap(),
        result.objective.last().unwrap(),
        result.rounds
    );
    result.dictionary.save(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_mask(args: MaskArgs) -> Result<()> {
    let dims = parse_dims(&args.dims)?;
    let mask = if args.per_pixel_mask {
        generate_mask_per_pixel(dims, args.missing_ratio, args.seed)?
    } else {
        generate_mask(dims, args.missing_ratio, args.seed)?
    };
    lrtc_core::io::write_tensor(&args.out, &mask.to_tensor())?;
    println!(
        "wrote {} ({} of {} entries observed)",
        args.out.display(),
        mask.observed_count(),
        dims.0 * dims.1 * dims.2
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let recovered = load_input(&args.recovered)?;
    let truth = load_input(&args.truth)?;
    let rep = report(&recovered, &truth, args.peak)?;
    let line = format!(
        "psnr,ssim,re\n{},{},{}",
        lrtc_harness::experiment::fmt(rep.psnr_mean),
        lrtc_harness::experiment::fmt(rep.ssim_mean),
        lrtc_harness::experiment::fmt(rep.re)
    );
    if let Some(path) = &args.metrics {
        std::fs::write(path, format!("{line}\n"))?;
    }
    println!("{line}");
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let overrides = layered_overrides(args.config.as_ref(), &args.overrides)?;
    let mut specs = Vec::new();
    for input in &args.inputs {
        for &method in &args.methods {
            for &ratio in &args.ratios {
                for &seed in &args.seeds {
                    specs.push(ExperimentSpec {
                        input: input.clone(),
                        method,
                        missing_ratio: ratio,
                        seed,
                        dictionary: method.uses_csc().then(|| {
                            args.dict.clone().unwrap_or_default()
                        }),
                        overrides: overrides.clone(),
                        out: None,
                        metrics: None,
                        trace: None,
                    });
                }
            }
        }
    }
    sweep(&specs, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.parse::<usize>().context("dims must be N1xN2xN3"))
        .collect::<Result<_>>()?;
    ensure!(parts.len() == 3, "dims must have exactly three components");
    Ok((parts[0], parts[1], parts[2]))
}
