//! Configuration overrides with CLI > config file > built-in defaults
//! precedence.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use lrtc_core::{LrtcConfig, Method};
use lrtc_core::prox::SnnWeights;

/// Optional overrides of the completion configuration; unset fields keep
/// the value from the next-lower precedence level.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub alpha: Option<[f64; 3]>,
    pub beta1: Option<[f64; 3]>,
    pub beta2: Option<f64>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub tau_g: Option<f64>,
    pub inner_iters: Option<usize>,
    pub inner_tol: Option<f64>,
    pub input_scale: Option<f64>,
    pub lambda_lp: Option<f64>,
    pub max_outer_iters: Option<usize>,
    pub outer_tol: Option<f64>,
    pub snn_all_modes: Option<bool>,
    /// Erase whole (i, j) pixels across all bands instead of single entries.
    pub per_pixel_mask: Option<bool>,
    /// Peak value used by PSNR/SSIM.
    pub peak: Option<f64>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `higher` win.
    pub fn merged_under(self, higher: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                Overrides { $($f: higher.$f.or(self.$f)),* }
            };
        }
        pick!(
            alpha, beta1, beta2, lambda, rho, tau_g, inner_iters, inner_tol, input_scale,
            lambda_lp, max_outer_iters, outer_tol, snn_all_modes, per_pixel_mask, peak
        )
    }

    pub fn apply(&self, cfg: &mut LrtcConfig) -> Result<()> {
        if let Some(a) = self.alpha {
            cfg.alpha = SnnWeights::new(a)?;
        }
        if let Some(b) = self.beta1 {
            cfg.beta1 = b;
        }
        if let Some(v) = self.beta2 {
            cfg.beta2 = v;
        }
        if let Some(v) = self.lambda {
            cfg.csc.lambda = v;
        }
        if let Some(v) = self.rho {
            cfg.csc.rho = v;
        }
        if let Some(v) = self.tau_g {
            cfg.csc.tau_g = v;
        }
        if let Some(v) = self.inner_iters {
            cfg.csc.inner_iters = v;
        }
        if let Some(v) = self.inner_tol {
            cfg.csc.tol = v;
        }
        if let Some(v) = self.input_scale {
            cfg.csc.input_scale = v;
        }
        if let Some(v) = self.lambda_lp {
            cfg.lambda_lp = v;
        }
        if let Some(v) = self.max_outer_iters {
            cfg.max_outer_iters = v;
        }
        if let Some(v) = self.outer_tol {
            cfg.outer_tol = v;
        }
        if let Some(v) = self.snn_all_modes {
            cfg.snn_all_modes = v;
        }
        Ok(())
    }

    pub fn per_pixel_mask(&self) -> bool {
        self.per_pixel_mask.unwrap_or(false)
    }

    pub fn peak(&self) -> f64 {
        self.peak.unwrap_or(1.0)
    }
}

/// Built-in defaults for a method. Completion inputs are stored in [0, 1],
/// so the denoiser rescales slices to the 8-bit range its sparsity weights
/// were calibrated for.
pub fn default_config(method: Method) -> LrtcConfig {
    let mut cfg = LrtcConfig::for_method(method);
    cfg.csc.input_scale = 255.0;
    cfg
}

/// Echo the effective configuration as `# key = value` comment lines for
/// the trace CSV header.
pub fn provenance_header(cfg: &LrtcConfig, peak: f64, per_pixel: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# method = {}", cfg.method.as_str());
    let _ = writeln!(
        s,
        "# alpha = {:?}",
        [cfg.alpha.alpha(1), cfg.alpha.alpha(2), cfg.alpha.alpha(3)]
    );
    let _ = writeln!(s, "# beta1 = {:?}", cfg.beta1);
    let _ = writeln!(s, "# beta2 = {}", cfg.beta2);
    let _ = writeln!(s, "# lambda = {}", cfg.csc.lambda);
    let _ = writeln!(s, "# rho = {}", cfg.csc.rho);
    let _ = writeln!(s, "# tau_g = {}", cfg.csc.tau_g);
    let _ = writeln!(s, "# inner_iters = {}", cfg.csc.inner_iters);
    let _ = writeln!(s, "# inner_tol = {}", cfg.csc.tol);
    let _ = writeln!(s, "# input_scale = {}", cfg.csc.input_scale);
    let _ = writeln!(s, "# lambda_lp = {}", cfg.lambda_lp);
    let _ = writeln!(s, "# max_outer_iters = {}", cfg.max_outer_iters);
    let _ = writeln!(s, "# outer_tol = {}", cfg.outer_tol);
    let _ = writeln!(s, "# snn_all_modes = {}", cfg.snn_all_modes);
    let _ = writeln!(s, "# per_pixel_mask = {per_pixel}");
    let _ = writeln!(s, "# peak = {peak}");
    s
}
