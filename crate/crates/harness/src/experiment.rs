//! Experiment execution: mask generation, completion, consistency checks,
//! and CSV report emission.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};

use lrtc_core::lrtc::{complete, CompletionResult, Observation};
use lrtc_core::mask::{generate_mask, generate_mask_per_pixel};
use lrtc_core::metrics::report;
use lrtc_core::{ConvDictionary, Method, MetricReport};

use crate::config::{default_config, provenance_header, Overrides};
use crate::io::{load_input, save_output};

/// One completion run: its input, method, sampling protocol, configuration
/// overrides, and output destinations.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub input: PathBuf,
    pub method: Method,
    pub missing_ratio: f64,
    pub seed: u64,
    pub dictionary: Option<PathBuf>,
    pub overrides: Overrides,
    pub out: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            (0.0..1.0).contains(&self.missing_ratio),
            "missing ratio {} outside [0, 1)",
            self.missing_ratio
        );
        ensure!(
            self.input.exists(),
            "input {} does not exist",
            self.input.display()
        );
        if let Some(d) = &self.dictionary {
            ensure!(d.exists(), "dictionary {} does not exist", d.display());
        }
        if self.method.uses_csc() {
            ensure!(
                self.dictionary.is_some(),
                "method {} requires --dict",
                self.method.as_str()
            );
        }
        Ok(())
    }
}

/// Metrics plus run bookkeeping for the CSV row.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: MetricReport,
    pub iters: usize,
    pub seconds: f64,
}

pub const METRICS_HEADER: &str = "method,mr,seed,psnr,ssim,re,iters,seconds";
pub const TRACE_HEADER: &str = "iter,re,psnr,residual,seconds";

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let truth = load_input(&spec.input)?;
    let mut cfg = default_config(spec.method);
    if let Some(path) = &spec.dictionary {
        cfg.dictionary =
            Some(ConvDictionary::load(path).context("loading dictionary")?);
    }
    spec.overrides.apply(&mut cfg)?;

    let mask = if spec.overrides.per_pixel_mask() {
        generate_mask_per_pixel(truth.dims(), spec.missing_ratio, spec.seed)?
    } else {
        generate_mask(truth.dims(), spec.missing_ratio, spec.seed)?
    };
    let obs = Observation::new(truth.clone(), mask)?;

    let start = Instant::now();
    let result = complete(&obs, &cfg, Some(&truth))?;
    let seconds = start.elapsed().as_secs_f64();

    check_omega_consistency(&result, &obs)?;

    if let Some(out) = &spec.out {
        save_output(&result.recovered, out)?;
    }
    let peak = spec.overrides.peak();
    let rep = report(&result.recovered, &truth, peak)?;
    let outcome = ExperimentOutcome {
        report: rep,
        iters: result.iters(),
        seconds,
    };
    if let Some(path) = &spec.metrics {
        let mut f = File::create(path)
            .with_context(|| format!("creating {}", path.display()))?;
        writeln!(f, "{METRICS_HEADER}")?;
        writeln!(f, "{}", metrics_row(spec, &outcome))?;
    }
    if let Some(path) = &spec.trace {
        write_trace(path, &result, &cfg, peak, spec.overrides.per_pixel_mask())?;
    }
    Ok(outcome)
}

/// The recovered tensor must equal the input exactly on the observed set;
/// a violation indicates an algorithm bug and aborts before any write.
fn check_omega_consistency(result: &CompletionResult, obs: &Observation) -> Result<()> {
    let rec = result.recovered.data();
    let truth = obs.data().data();
    for (idx, &observed) in obs.mask().data().iter().enumerate() {
        if observed && rec[idx] != truth[idx] {
            bail!(
                "omega-consistency violation at linear index {idx}: {} != {}",
                rec[idx],
                truth[idx]
            );
        }
    }
    Ok(())
}

pub fn metrics_row(spec: &ExperimentSpec, outcome: &ExperimentOutcome) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.3}",
        spec.method.as_str(),
        spec.missing_ratio,
        spec.seed,
        fmt(outcome.report.psnr_mean),
        fmt(outcome.report.ssim_mean),
        fmt(outcome.report.re),
        outcome.iters,
        outcome.seconds
    )
}

fn write_trace(
    path: &Path,
    result: &CompletionResult,
    cfg: &lrtc_core::LrtcConfig,
    peak: f64,
    per_pixel: bool,
) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write!(f, "{}", provenance_header(cfg, peak, per_pixel))?;
    writeln!(f, "{TRACE_HEADER}")?;
    for row in &result.trace {
        writeln!(
            f,
            "{},{},{},{},{:.6}",
            row.iter,
            row.re.map_or_else(|| "nan".into(), fmt),
            row.psnr.map_or_else(|| "nan".into(), fmt),
            fmt(row.residual),
            row.seconds
        )?;
    }
    Ok(())
}

/// Serialize a metric value; infinities become the string `inf`.
pub fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

/// Run every spec, appending one row per spec to the aggregated CSV.
/// Failures are recorded as rows with `nan` metrics and the run continues.
pub fn sweep(specs: &[ExperimentSpec], out: &Path) -> Result<()> {
    let mut f = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    writeln!(f, "{METRICS_HEADER}")?;
    for spec in specs {
        match run_experiment(spec) {
            Ok(outcome) => writeln!(f, "{}", metrics_row(spec, &outcome))?,
            Err(e) => {
                eprintln!(
                    "sweep: {} on {} failed: {e:#}",
                    spec.method.as_str(),
                    spec.input.display()
                );
                writeln!(
                    f,
                    "{},{},{},nan,nan,nan,0,0.000",
                    spec.method.as_str(),
                    spec.missing_ratio,
                    spec.seed
                )?;
            }
        }
    }
    Ok(())
}
