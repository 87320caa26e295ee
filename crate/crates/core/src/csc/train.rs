//! Dictionary learning by alternating minimization: sparse-code the
//! high-frequency parts of the training images with the current filters,
//! then refit the filters per frequency by ridge-regularized least squares,
//! crop to the stated support, and renormalize.

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::csc::dictionary::{ConvDictionary, GradientFilters};
use crate::csc::solver::{
    cbpdn_gr_solve_stateful, lowpass_split, CbpdnState, DictFreq, FeatureMapStack,
};
use crate::csc::CscParams;
use crate::error::{CoreError, Result};
use crate::fft::{fft2_real, ifft2_real};

/// Ridge added to the per-frequency normal equations of the filter update.
const RIDGE: f64 = 1e-8;

/// Relative slack allowed when checking that a round did not increase the
/// training objective. The filter update projects onto the support/norm
/// constraint, so tiny increases from the projection are tolerated.
const OBJECTIVE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Number of filters to learn.
    pub filter_count: usize,
    /// Square filter support (pixels per side).
    pub support: usize,
    /// Maximum alternating rounds.
    pub outer_iters: usize,
    /// Low-pass strength applied to training images before coding.
    pub lambda_lp: f64,
    /// Seed for the deterministic filter initialization.
    pub seed: u64,
    /// Inner sparse-coding parameters used during training.
    pub csc: CscParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            filter_count: 32,
            support: 16,
            outer_iters: 20,
            lambda_lp: super::DEFAULT_LAMBDA_LP,
            seed: 0,
            csc: CscParams::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_count == 0 {
            return Err(CoreError::InvalidParameter(
                "filter_count must be at least 1".into(),
            ));
        }
        if self.support == 0 {
            return Err(CoreError::InvalidParameter(
                "support must be at least 1".into(),
            ));
        }
        if !(self.lambda_lp >= 0.0 && self.lambda_lp.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "lambda_lp must be finite and nonnegative".into(),
            ));
        }
        self.csc.validate()
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub dictionary: ConvDictionary,
    /// Training objective after initialization and after each accepted
    /// round; nonincreasing by construction.
    pub objective: Vec<f64>,
    /// Rounds actually accepted.
    pub rounds: usize,
}

/// Learn a convolutional dictionary from grayscale training images. All
/// images must share their dimensions and each side must be at least the
/// filter support.
pub fn train_dictionary(images: &[Array2<f64>], cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if images.is_empty() {
        return Err(CoreError::InvalidParameter(
            "training set must be nonempty".into(),
        ));
    }
    let dims = images[0].dim();
    if images.iter().any(|x| x.dim() != dims) {
        return Err(CoreError::ShapeMismatch(
            "training images must share dimensions".into(),
        ));
    }
    if dims.0 < cfg.support || dims.1 < cfg.support {
        return Err(CoreError::ShapeMismatch(format!(
            "training images {}x{} smaller than filter support {}",
            dims.0, dims.1, cfg.support
        )));
    }
    if images
        .iter()
        .any(|x| x.iter().any(|v| !v.is_finite()))
    {
        return Err(CoreError::NonFinite("training images".into()));
    }

    // code only the detail component, scaled like the denoiser input
    let highs: Vec<Array2<f64>> = images
        .iter()
        .map(|x| {
            let scaled = x.mapv(|v| v * cfg.csc.input_scale);
            lowpass_split(&scaled, cfg.lambda_lp).1
        })
        .collect();
    let grad_w = GradientFilters::freq_weights(dims.0, dims.1);

    // Warm-start the coder across rounds: the maps change slowly once the
    // filters settle, and continuing from the previous iterate keeps the
    // alternating sequence descending where a cold restart would not.
    let mut states: Vec<CbpdnState> = highs
        .iter()
        .map(|_| CbpdnState::zeros(cfg.filter_count, dims))
        .collect();

    let mut dict = random_init(cfg);
    let mut maps = code_all(&dict, &highs, cfg, &mut states)?;
    let mut obj = objective(&dict, &highs, &maps, &grad_w, cfg)?;
    let mut trace = vec![obj];
    let mut rounds = 0;

    for _ in 0..cfg.outer_iters {
        let candidate = filter_update(&maps, &highs, cfg)?;
        let cand_maps = code_all(&candidate, &highs, cfg, &mut states)?;
        let cand_obj = objective(&candidate, &highs, &cand_maps, &grad_w, cfg)?;
        if cand_obj > obj * (1.0 + OBJECTIVE_SLACK) + OBJECTIVE_SLACK {
            // the projection step broke descent; keep the last good
            // dictionary rather than accept a worse one
            break;
        }
        dict = candidate;
        maps = cand_maps;
        obj = cand_obj;
        trace.push(obj);
        rounds += 1;
    }

    Ok(TrainResult {
        dictionary: dict,
        objective: trace,
        rounds,
    })
}

fn random_init(cfg: &TrainConfig) -> ConvDictionary {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let r = cfg.support;
    let filters = (0..cfg.filter_count)
        .map(|_| {
            let f = Array2::from_shape_fn((r, r), |_| gaussian(&mut rng));
            let norm = f.mapv(|v| v * v).sum().sqrt();
            f.mapv(|v| v / norm)
        })
        .collect();
    ConvDictionary::new(filters).expect("random init is unit-normalized")
}

/// Box-Muller standard normal from a seeded uniform source.
fn gaussian(rng: &mut ChaCha20Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn code_all(
    dict: &ConvDictionary,
    highs: &[Array2<f64>],
    cfg: &TrainConfig,
    states: &mut [CbpdnState],
) -> Result<Vec<FeatureMapStack>> {
    let df = DictFreq::new(dict, highs[0].dim())?;
    highs
        .iter()
        .zip(states.iter_mut())
        .map(|(x, st)| Ok(cbpdn_gr_solve_stateful(&df, x, &cfg.csc, st)?.maps))
        .collect()
}

/// Per-frequency ridge least squares over all training images, then crop to
/// the filter support and renormalize.
fn filter_update(
    maps: &[FeatureMapStack],
    highs: &[Array2<f64>],
    cfg: &TrainConfig,
) -> Result<ConvDictionary> {
    let (n1, n2) = highs[0].dim();
    let k = cfg.filter_count;

    let m_hats: Vec<Vec<Array2<Complex64>>> = maps
        .iter()
        .map(|stack| stack.maps().iter().map(fft2_real).collect())
        .collect();
    let x_hats: Vec<Array2<Complex64>> = highs.iter().map(fft2_real).collect();

    let mut d_hat = vec![Array2::<Complex64>::zeros((n1, n2)); k];
    let mut a = Array2::<Complex64>::zeros((k, k));
    let mut b = Array1::<Complex64>::zeros(k);
    for u in 0..n1 {
        for v in 0..n2 {
            a.fill(Complex64::new(0.0, 0.0));
            b.fill(Complex64::new(0.0, 0.0));
            for (s, x_hat) in x_hats.iter().enumerate() {
                for i in 0..k {
                    let mi = m_hats[s][i][(u, v)].conj();
                    b[i] += mi * x_hat[(u, v)];
                    for j in 0..k {
                        a[(i, j)] += mi * m_hats[s][j][(u, v)];
                    }
                }
            }
            for i in 0..k {
                a[(i, i)] += Complex64::new(RIDGE, 0.0);
            }
            let sol = a
                .solve(&b)
                .map_err(|e| CoreError::Dictionary(format!("filter update solve failed: {e}")))?;
            for i in 0..k {
                d_hat[i][(u, v)] = sol[i];
            }
        }
    }

    let r = cfg.support;
    let filters: Vec<Array2<f64>> = d_hat
        .iter()
        .map(|spec| {
            let full = ifft2_real(spec);
            let cropped = Array2::from_shape_fn((r, r), |(i, j)| full[(i, j)]);
            let norm = cropped.mapv(|w| w * w).sum().sqrt();
            if norm < 1e-12 {
                // degenerate filter: replace with a unit impulse
                let mut f = Array2::zeros((r, r));
                f[(0, 0)] = 1.0;
                f
            } else {
                cropped.mapv(|w| w / norm)
            }
        })
        .collect();
    ConvDictionary::new(filters)
}

/// Training objective: data fidelity + sparsity + gradient penalty summed
/// over the training set, with the maps held at the coded values.
fn objective(
    dict: &ConvDictionary,
    highs: &[Array2<f64>],
    maps: &[FeatureMapStack],
    grad_w: &Array2<f64>,
    cfg: &TrainConfig,
) -> Result<f64> {
    let (n1, n2) = highs[0].dim();
    let nf = (n1 * n2) as f64;
    let df = DictFreq::new(dict, (n1, n2))?;
    let mut total = 0.0;
    for (stack, x) in maps.iter().zip(highs) {
        let x_hat = fft2_real(x);
        let mut resid = x_hat.mapv(|v| -v);
        for (i, m) in stack.maps().iter().enumerate() {
            let m_hat = fft2_real(m);
            for ((r, dh), mh) in resid.iter_mut().zip(df_spec(&df, i)).zip(m_hat.iter()) {
                *r += dh * mh;
            }
            total += 0.5 * cfg.csc.tau_g
                * grad_w
                    .iter()
                    .zip(m_hat.iter())
                    .map(|(w, c)| w * c.norm_sqr())
                    .sum::<f64>()
                / nf;
            total += cfg.csc.lambda * m.mapv(f64::abs).sum();
        }
        total += 0.5 * resid.iter().map(|c| c.norm_sqr()).sum::<f64>() / nf;
    }
    Ok(total)
}

fn df_spec<'a>(df: &'a DictFreq, i: usize) -> impl Iterator<Item = &'a Complex64> {
    df.spectrum(i).iter()
}
