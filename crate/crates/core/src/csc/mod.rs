//! Convolutional sparse coding: dictionary type, gradient-regularized CBPDN
//! solver, slice-wise denoiser, and dictionary learning.

pub mod dictionary;
pub mod solver;
pub mod train;

pub use dictionary::{ConvDictionary, GradientFilters};
pub use solver::{
    cbpdn_gr_solve, lowpass_split, reconstruct, CbpdnResult, CbpdnState, DictFreq,
    FeatureMapStack,
};
pub use train::{train_dictionary, TrainConfig, TrainResult};

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::tensor::Tensor3;

/// Low-pass strength used when separating the slice into coarse and detail
/// components before sparse coding.
pub const DEFAULT_LAMBDA_LP: f64 = 5.0;

/// Parameters of the gradient-regularized CBPDN inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct CscParams {
    /// Sparsity weight on the coefficient maps.
    pub lambda: f64,
    /// ADMM penalty of the inner solver.
    pub rho: f64,
    /// Gradient-regularization weight on the maps.
    pub tau_g: f64,
    /// Maximum inner ADMM sweeps per denoising call.
    pub inner_iters: usize,
    /// Relative primal-residual stopping tolerance.
    pub tol: f64,
    /// Input is multiplied by this factor before coding and divided after;
    /// lets sparsity weights calibrated for 8-bit intensities be used on
    /// unit-scaled data.
    pub input_scale: f64,
}

impl Default for CscParams {
    fn default() -> Self {
        let lambda = 10.0;
        CscParams {
            lambda,
            rho: 100.0 * lambda + 1.0,
            tau_g: 0.06,
            inner_iters: 50,
            tol: 1e-4,
            input_scale: 1.0,
        }
    }
}

impl CscParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.lambda >= 0.0, "lambda must be nonnegative"),
            (self.rho > 0.0, "rho must be positive"),
            (self.tau_g >= 0.0, "tau_g must be nonnegative"),
            (self.inner_iters >= 1, "inner_iters must be at least 1"),
            (self.tol > 0.0, "tol must be positive"),
            (self.input_scale > 0.0, "input_scale must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(CoreError::InvalidParameter(msg.into()));
            }
        }
        for (v, name) in [
            (self.lambda, "lambda"),
            (self.rho, "rho"),
            (self.tau_g, "tau_g"),
            (self.tol, "tol"),
            (self.input_scale, "input_scale"),
        ] {
            if !v.is_finite() {
                return Err(CoreError::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// CSC denoiser configuration: the dictionary plus solver parameters and the
/// low-pass split strength.
#[derive(Debug, Clone)]
pub struct CscDenoiser {
    dictionary: ConvDictionary,
    params: CscParams,
    lambda_lp: f64,
}

impl CscDenoiser {
    pub fn new(dictionary: ConvDictionary, params: CscParams, lambda_lp: f64) -> Result<Self> {
        params.validate()?;
        if !(lambda_lp >= 0.0 && lambda_lp.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "lambda_lp must be finite and nonnegative".into(),
            ));
        }
        Ok(CscDenoiser {
            dictionary,
            params,
            lambda_lp,
        })
    }

    pub fn dictionary(&self) -> &ConvDictionary {
        &self.dictionary
    }

    pub fn params(&self) -> &CscParams {
        &self.params
    }

    /// Denoise a single slice: scale, low/high split, sparse-code the detail
    /// part, recombine, unscale.
    pub fn denoise_slice(&self, slice: &Array2<f64>) -> Result<Array2<f64>> {
        let scaled = slice.mapv(|v| v * self.params.input_scale);
        let (low, high) = lowpass_split(&scaled, self.lambda_lp);
        let df = DictFreq::new(&self.dictionary, slice.dim())?;
        let sol = solver::cbpdn_gr_solve_freq(&df, &high, &self.params)?;
        let coded = solver::reconstruct_freq(&df, &sol.maps)?;
        Ok((&low + &coded).mapv(|v| v / self.params.input_scale))
    }

    /// Denoise each frontal slice of the tensor independently.
    pub fn denoise(&self, t: &Tensor3) -> Result<Tensor3> {
        let mut states = self.fresh_states(t.dims());
        self.denoise_stateful(t, &mut states)
    }

    /// Cold-start solver states, one per frontal slice, for
    /// [`CscDenoiser::denoise_stateful`].
    pub fn fresh_states(&self, dims: (usize, usize, usize)) -> Vec<CbpdnState> {
        let (n1, n2, n3) = dims;
        vec![CbpdnState::zeros(self.dictionary.filter_count(), (n1, n2)); n3]
    }

    /// Denoise while warm-starting each slice's inner solver from — and
    /// writing back to — `states`. Repeated calls on slowly changing inputs
    /// (the outer-ADMM iterates) then spread one long solve over many cheap
    /// ones.
    pub fn denoise_stateful(
        &self,
        t: &Tensor3,
        states: &mut [CbpdnState],
    ) -> Result<Tensor3> {
        let (n1, n2, n3) = t.dims();
        if states.len() != n3 {
            return Err(CoreError::ShapeMismatch(format!(
                "{} solver states for {} slices",
                states.len(),
                n3
            )));
        }
        let df = DictFreq::new(&self.dictionary, (n1, n2))?;
        let mut out = Tensor3::zeros((n1, n2, n3));
        for (k, state) in states.iter_mut().enumerate() {
            let slice = t.frontal_slice(k);
            let scaled = slice.mapv(|v| v * self.params.input_scale);
            let (low, high) = lowpass_split(&scaled, self.lambda_lp);
            let sol = solver::cbpdn_gr_solve_stateful(&df, &high, &self.params, state)?;
            let coded = solver::reconstruct_freq(&df, &sol.maps)?;
            let denoised = (&low + &coded).mapv(|v| v / self.params.input_scale);
            out.set_frontal_slice(k, &denoised);
        }
        Ok(out)
    }
}
