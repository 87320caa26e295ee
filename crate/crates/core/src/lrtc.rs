//! Outer ADMM completion algorithms: the SNN-prior method (with its
//! plug-in denoiser), the TNN-prior method, and their denoiser-free
//! degenerations.

use std::time::Instant;

use ndarray::Array2;

use crate::csc::{ConvDictionary, CscDenoiser, CscParams, DEFAULT_LAMBDA_LP};
use crate::error::{CoreError, Result};
use crate::mask::ObservationMask;
use crate::metrics::{psnr, relative_error};
use crate::prox::{svt_fourier_slices, svt_matrix, SnnWeights};
use crate::tensor::Tensor3;

/// Completion algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// SNN prior with the CSC denoiser plug-in.
    Csc1,
    /// TNN prior with the CSC denoiser plug-in.
    Csc2,
    /// SNN prior only (the denoiser-free degeneration of `Csc1`).
    Halrtc,
    /// TNN prior only (the denoiser-free degeneration of `Csc2`).
    LrtcTnn,
}

impl Method {
    pub fn uses_csc(self) -> bool {
        matches!(self, Method::Csc1 | Method::Csc2)
    }

    pub fn uses_snn(self) -> bool {
        matches!(self, Method::Csc1 | Method::Halrtc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Csc1 => "csc1",
            Method::Csc2 => "csc2",
            Method::Halrtc => "halrtc",
            Method::LrtcTnn => "lrtc_tnn",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csc1" => Ok(Method::Csc1),
            "csc2" => Ok(Method::Csc2),
            "halrtc" => Ok(Method::Halrtc),
            "lrtc_tnn" | "tnn" => Ok(Method::LrtcTnn),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown method '{other}'"
            ))),
        }
    }
}

/// The observed tensor and its observation set.
#[derive(Debug, Clone)]
pub struct Observation {
    data: Tensor3,
    mask: ObservationMask,
}

impl Observation {
    pub fn new(data: Tensor3, mask: ObservationMask) -> Result<Self> {
        if data.dims() != mask.dims() {
            return Err(CoreError::ShapeMismatch(format!(
                "data dims {:?} vs mask dims {:?}",
                data.dims(),
                mask.dims()
            )));
        }
        if mask.observed_count() == 0 {
            return Err(CoreError::EmptyMask);
        }
        Ok(Observation { data, mask })
    }

    pub fn data(&self) -> &Tensor3 {
        &self.data
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }
}

/// Outer-loop configuration. `dictionary` must be present exactly when the
/// method uses the CSC denoiser.
#[derive(Debug, Clone)]
pub struct LrtcConfig {
    pub method: Method,
    /// Mode weights of the SNN prior (SNN methods only).
    pub alpha: SnnWeights,
    /// Per-mode penalty of the F-subproblem; TNN methods use `beta1[0]`.
    pub beta1: [f64; 3],
    /// Penalty coupling the denoiser variable (CSC methods only).
    pub beta2: f64,
    pub csc: CscParams,
    /// Low-pass split strength of the denoiser.
    pub lambda_lp: f64,
    pub dictionary: Option<ConvDictionary>,
    pub max_outer_iters: usize,
    /// Relative-change stopping threshold.
    pub outer_tol: f64,
    /// Sum the SNN terms over all three modes (default). When false only
    /// the first two modes enter, the other index range the formulation
    /// admits.
    pub snn_all_modes: bool,
}

impl LrtcConfig {
    pub fn for_method(method: Method) -> Self {
        LrtcConfig {
            method,
            alpha: SnnWeights::uniform(),
            beta1: [0.1; 3],
            beta2: 0.1,
            csc: CscParams::default(),
            lambda_lp: DEFAULT_LAMBDA_LP,
            dictionary: None,
            max_outer_iters: 200,
            outer_tol: 1e-5,
            snn_all_modes: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta1.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(CoreError::InvalidParameter(
                "beta1 entries must be positive".into(),
            ));
        }
        if self.method.uses_csc() {
            if !(self.beta2 > 0.0 && self.beta2.is_finite()) {
                return Err(CoreError::InvalidParameter(
                    "beta2 must be positive".into(),
                ));
            }
            if self.dictionary.is_none() {
                return Err(CoreError::Config(format!(
                    "method {} requires a dictionary",
                    self.method.as_str()
                )));
            }
            self.csc.validate()?;
            if !(self.lambda_lp >= 0.0 && self.lambda_lp.is_finite()) {
                return Err(CoreError::InvalidParameter(
                    "lambda_lp must be finite and nonnegative".into(),
                ));
            }
        } else if self.dictionary.is_some() {
            return Err(CoreError::Config(format!(
                "method {} does not take a dictionary",
                self.method.as_str()
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(CoreError::InvalidParameter(
                "max_outer_iters must be at least 1".into(),
            ));
        }
        if !(self.outer_tol > 0.0 && self.outer_tol.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "outer_tol must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Modes entering the SNN sum (1-based).
    pub fn snn_modes(&self) -> &'static [usize] {
        if self.snn_all_modes {
            &[1, 2, 3]
        } else {
            &[1, 2]
        }
    }
}

/// One outer-iteration record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// Relative error vs. ground truth, when provided.
    pub re: Option<f64>,
    /// Mean PSNR vs. ground truth, when provided.
    pub psnr: Option<f64>,
    /// Relative change of the iterate.
    pub residual: f64,
    /// Wall time of this iteration in seconds.
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub recovered: Tensor3,
    pub trace: Vec<TraceRow>,
}

impl CompletionResult {
    pub fn iters(&self) -> usize {
        self.trace.len()
    }
}

/// Observed entries copied, unobserved entries filled with the mean of the
/// observed entries.
pub fn init_estimate(obs: &Observation) -> Result<Tensor3> {
    let mask = obs.mask();
    let count = mask.observed_count();
    if count == 0 {
        return Err(CoreError::EmptyMask);
    }
    let data = obs.data().data();
    let mean = data
        .iter()
        .zip(mask.data())
        .filter_map(|(&v, &m)| m.then_some(v))
        .sum::<f64>()
        / count as f64;
    let filled: Vec<f64> = data
        .iter()
        .zip(mask.data())
        .map(|(&v, &m)| if m { v } else { mean })
        .collect();
    Tensor3::from_vec(obs.data().dims(), filled)
}

/// `F_k = svt(unfold(x,k) - omega1[k]/beta1[k], alpha_k/beta1[k])` for each
/// mode in the SNN sum.
pub fn f_update_snn(
    x: &Tensor3,
    omega1: &[Array2<f64>],
    cfg: &LrtcConfig,
) -> Result<Vec<Array2<f64>>> {
    cfg.snn_modes()
        .iter()
        .map(|&mode| {
            let k = mode - 1;
            let beta = cfg.beta1[k];
            let arg = x.unfold(mode)? - &omega1[k].mapv(|v| v / beta);
            Ok(svt_matrix(&arg, cfg.alpha.alpha(mode) / beta))
        })
        .collect()
}

/// `F = svt_fourier_slices(x - omega1/beta1, 1/beta1)`.
pub fn f_update_tnn(x: &Tensor3, omega1: &Tensor3, beta1: f64) -> Result<Tensor3> {
    svt_fourier_slices(&x.axpy(-1.0 / beta1, omega1), 1.0 / beta1)
}

/// X-update of the SNN method. `z` carries the denoiser variable and its
/// multiplier; `None` drops the beta2 term (the degenerate method).
pub fn x_update_i(
    fk: &[Array2<f64>],
    omega1: &[Array2<f64>],
    z: Option<(&Tensor3, &Tensor3)>,
    obs: &Observation,
    cfg: &LrtcConfig,
) -> Result<Tensor3> {
    let dims = obs.data().dims();
    let modes = cfg.snn_modes();
    let mut num = Tensor3::zeros(dims);
    let mut den = 0.0;
    for (idx, &mode) in modes.iter().enumerate() {
        let k = mode - 1;
        let beta = cfg.beta1[k];
        let folded = Tensor3::fold(&(&fk[idx] * beta + &omega1[k]), mode, dims)?;
        num = num.add(&folded);
        den += beta;
    }
    if let Some((z, omega2)) = z {
        num = num.add(&z.scale(cfg.beta2)).add(omega2);
        den += cfg.beta2;
    }
    let mut x = num.scale(1.0 / den);
    apply_barrier(&mut x, obs);
    Ok(x)
}

/// X-update of the TNN method; `z = None` drops the beta2 term.
pub fn x_update_ii(
    f: &Tensor3,
    omega1: &Tensor3,
    z: Option<(&Tensor3, &Tensor3)>,
    obs: &Observation,
    beta1: f64,
    beta2: f64,
) -> Result<Tensor3> {
    let (mut num, den) = match z {
        Some((z, omega2)) => (
            f.scale(beta1).add(&z.scale(beta2)).add(omega1).add(omega2),
            beta1 + beta2,
        ),
        None => (f.scale(beta1).add(omega1), beta1),
    };
    num = num.scale(1.0 / den);
    apply_barrier(&mut num, obs);
    Ok(num)
}

/// `omega + beta * (a - b)`.
pub fn multiplier_update(omega: &Tensor3, beta: f64, a: &Tensor3, b: &Tensor3) -> Tensor3 {
    omega.add(&a.sub(b).scale(beta))
}

/// Matrix (unfolded-space) form of [`multiplier_update`].
pub fn multiplier_update_matrix(
    omega: &Array2<f64>,
    beta: f64,
    a: &Array2<f64>,
    b: &Array2<f64>,
) -> Array2<f64> {
    omega + &((a - b).mapv(|v| v * beta))
}

/// Overwrite the observed entries of `x` with the observed data.
fn apply_barrier(x: &mut Tensor3, obs: &Observation) {
    let data = obs.data().data();
    let mask = obs.mask().data();
    for (idx, v) in x.data_mut().iter_mut().enumerate() {
        if mask[idx] {
            *v = data[idx];
        }
    }
}

/// Run the outer ADMM loop for the configured method. When ground truth is
/// provided, RE and PSNR are recorded each iteration.
pub fn complete(
    obs: &Observation,
    cfg: &LrtcConfig,
    ground_truth: Option<&Tensor3>,
) -> Result<CompletionResult> {
    cfg.validate()?;
    if let Some(gt) = ground_truth {
        if gt.dims() != obs.data().dims() {
            return Err(CoreError::ShapeMismatch(
                "ground truth dims differ from observation".into(),
            ));
        }
    }
    let denoiser = match &cfg.dictionary {
        Some(d) => Some(CscDenoiser::new(d.clone(), cfg.csc.clone(), cfg.lambda_lp)?),
        None => None,
    };
    let dims = obs.data().dims();
    let mut x = init_estimate(obs)?;
    // multipliers for both priors; only the active one is touched
    let mut omega1_snn: [Array2<f64>; 3] = [
        Array2::zeros(x.unfold(1)?.dim()),
        Array2::zeros(x.unfold(2)?.dim()),
        Array2::zeros(x.unfold(3)?.dim()),
    ];
    let mut omega1_tnn = Tensor3::zeros(dims);
    let mut omega2 = Tensor3::zeros(dims);
    let mut trace = Vec::new();

    for iter in 1..=cfg.max_outer_iters {
        let t0 = Instant::now();
        let prev = x.clone();

        let z = match &denoiser {
            // cold-start the inner solver each outer iteration: the denoiser
            // input moves enough between iterations that reusing the previous
            // maps biases the solve and measurably hurts recovery quality
            Some(den) => Some(den.denoise(&x.axpy(-1.0 / cfg.beta2, &omega2))?),
            None => None,
        };

        if cfg.method.uses_snn() {
            let fk = f_update_snn(&x, &omega1_snn, cfg)?;
            x = x_update_i(
                &fk,
                &omega1_snn,
                z.as_ref().map(|z| (z, &omega2)),
                obs,
                cfg,
            )?;
            for (idx, &mode) in cfg.snn_modes().iter().enumerate() {
                let k = mode - 1;
                omega1_snn[k] = multiplier_update_matrix(
                    &omega1_snn[k],
                    cfg.beta1[k],
                    &fk[idx],
                    &x.unfold(mode)?,
                );
            }
        } else {
            let beta1 = cfg.beta1[0];
            let f = f_update_tnn(&x, &omega1_tnn, beta1)?;
            x = x_update_ii(
                &f,
                &omega1_tnn,
                z.as_ref().map(|z| (z, &omega2)),
                obs,
                beta1,
                cfg.beta2,
            )?;
            omega1_tnn = multiplier_update(&omega1_tnn, beta1, &f, &x);
        }
        if let Some(z) = &z {
            omega2 = multiplier_update(&omega2, cfg.beta2, z, &x);
        }

        if !x.is_finite() {
            return Err(CoreError::Diverged(format!(
                "non-finite iterate at outer iteration {iter}"
            )));
        }

        let prev_norm = prev.frobenius_norm();
        let residual = if prev_norm == 0.0 {
            x.frobenius_norm()
        } else {
            x.sub(&prev).frobenius_norm() / prev_norm
        };
        let (re, psnr_mean) = match ground_truth {
            Some(gt) => (
                Some(relative_error(&x, gt)?),
                Some(psnr(&x, gt, 1.0)?.0),
            ),
            None => (None, None),
        };
        trace.push(TraceRow {
            iter,
            re,
            psnr: psnr_mean,
            residual,
            seconds: t0.elapsed().as_secs_f64(),
        });
        if residual < cfg.outer_tol {
            break;
        }
    }

    Ok(CompletionResult {
        recovered: x,
        trace,
    })
}
