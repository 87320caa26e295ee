//! Convolutional dictionaries: small square filters with unit Frobenius
//! norm, stored on disk as TNS1 tensors of dims (r, r, K).

use std::path::Path;

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::io;
use crate::tensor::Tensor3;

/// Loader renormalizes filters whose norm deviates by more than this.
const NORM_STRICT_TOL: f64 = 1e-6;
/// Beyond this deviation the file is rejected outright.
const NORM_RENORM_TOL: f64 = 1e-3;

/// Ordered set of K unit-norm filters sharing an r x r support.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvDictionary {
    support: usize,
    filters: Vec<Array2<f64>>,
}

impl ConvDictionary {
    /// Filters must already be unit-norm within 1e-6; the solver never
    /// renormalizes.
    pub fn new(filters: Vec<Array2<f64>>) -> Result<Self> {
        if filters.is_empty() {
            return Err(CoreError::Dictionary("need at least one filter".into()));
        }
        let support = filters[0].nrows();
        if support == 0 {
            return Err(CoreError::Dictionary("filter support must be >= 1".into()));
        }
        for (i, f) in filters.iter().enumerate() {
            if f.dim() != (support, support) {
                return Err(CoreError::Dictionary(format!(
                    "filter {i} is {:?}, expected {support}x{support}",
                    f.dim()
                )));
            }
            let norm = f.mapv(|v| v * v).sum().sqrt();
            if (norm - 1.0).abs() > NORM_STRICT_TOL {
                return Err(CoreError::Dictionary(format!(
                    "filter {i} has norm {norm}, expected 1 within {NORM_STRICT_TOL}"
                )));
            }
        }
        Ok(ConvDictionary { support, filters })
    }

    /// Single delta filter: exact identity under convolution. Useful in
    /// tests and as the trivial dictionary.
    pub fn delta(support: usize) -> Self {
        let mut f = Array2::zeros((support, support));
        f[(0, 0)] = 1.0;
        ConvDictionary {
            support,
            filters: vec![f],
        }
    }

    pub fn filter_count(&self) -> usize {
        self.filters.len()
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn filters(&self) -> &[Array2<f64>] {
        &self.filters
    }

    pub fn to_tensor(&self) -> Tensor3 {
        let r = self.support;
        let k = self.filters.len();
        let mut t = Tensor3::zeros((r, r, k));
        for (idx, f) in self.filters.iter().enumerate() {
            t.set_frontal_slice(idx, f);
        }
        t
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_tensor(path, &self.to_tensor())
    }

    /// Load from a TNS1 file of dims (r, r, K). Norm deviations up to 1e-3
    /// are renormalized with a warning; larger ones (and zero filters) are
    /// errors.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let t = io::read_tensor(path)?;
        let (r1, r2, k) = t.dims();
        if r1 != r2 {
            return Err(CoreError::Dictionary(format!(
                "{}: filters must be square, got {r1}x{r2}",
                path.display()
            )));
        }
        let mut filters = Vec::with_capacity(k);
        for idx in 0..k {
            let mut f = t.frontal_slice(idx);
            let norm = f.mapv(|v| v * v).sum().sqrt();
            if norm == 0.0 {
                return Err(CoreError::Dictionary(format!(
                    "{}: filter {idx} is identically zero",
                    path.display()
                )));
            }
            let dev = (norm - 1.0).abs();
            if dev > NORM_RENORM_TOL {
                return Err(CoreError::Dictionary(format!(
                    "{}: filter {idx} norm {norm} deviates beyond {NORM_RENORM_TOL}",
                    path.display()
                )));
            }
            if dev > NORM_STRICT_TOL {
                eprintln!(
                    "warning: {}: filter {idx} norm {norm:.8} renormalized to 1",
                    path.display()
                );
                f.mapv_inplace(|v| v / norm);
            }
            filters.push(f);
        }
        ConvDictionary::new(filters)
    }
}

/// Row/column forward-difference kernels with circular boundary; both sum
/// to zero.
#[derive(Debug, Clone)]
pub struct GradientFilters {
    pub g0: Array2<f64>,
    pub g1: Array2<f64>,
}

impl Default for GradientFilters {
    fn default() -> Self {
        let mut g0 = Array2::zeros((2, 1));
        g0[(0, 0)] = -1.0;
        g0[(1, 0)] = 1.0;
        let mut g1 = Array2::zeros((1, 2));
        g1[(0, 0)] = -1.0;
        g1[(0, 1)] = 1.0;
        GradientFilters { g0, g1 }
    }
}

impl GradientFilters {
    /// `|g0_hat|^2 + |g1_hat|^2` on an n1 x n2 frequency grid, in closed
    /// form: `2 - 2cos` per axis.
    pub fn freq_weights(n1: usize, n2: usize) -> Array2<f64> {
        Array2::from_shape_fn((n1, n2), |(u, v)| {
            let wu = 2.0 - 2.0 * (2.0 * std::f64::consts::PI * u as f64 / n1 as f64).cos();
            let wv = 2.0 - 2.0 * (2.0 * std::f64::consts::PI * v as f64 / n2 as f64).cos();
            wu + wv
        })
    }
}
