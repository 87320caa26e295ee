//! Proximal operators: matrix singular value thresholding, its Fourier-slice
//! variant (the tensor-nuclear-norm prox), elementwise soft thresholding, and
//! the SNN/TNN value functions.

use ndarray::Array2;
use ndarray_linalg::{JobSvd, SVDDC, SVD};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::tensor::{fft_mode3, ifft_mode3, ComplexTensor3, Tensor3};

/// Per-mode weights of the sum-of-nuclear-norms; normalized to sum 1 at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnnWeights {
    alpha: [f64; 3],
}

impl SnnWeights {
    pub fn new(alpha: [f64; 3]) -> Result<Self> {
        if alpha.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(CoreError::InvalidParameter(
                "SNN weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = alpha.iter().sum();
        if sum <= 0.0 {
            return Err(CoreError::InvalidParameter(
                "SNN weights must not all be zero".into(),
            ));
        }
        Ok(SnnWeights {
            alpha: [alpha[0] / sum, alpha[1] / sum, alpha[2] / sum],
        })
    }

    pub fn uniform() -> Self {
        SnnWeights {
            alpha: [1.0 / 3.0; 3],
        }
    }

    /// Weight of mode `k` (1-based).
    pub fn alpha(&self, mode: usize) -> f64 {
        self.alpha[mode - 1]
    }
}

impl Default for SnnWeights {
    fn default() -> Self {
        SnnWeights::uniform()
    }
}

/// Singular value thresholding: the prox of `tau * ||.||_*` at `m`.
pub fn svt_matrix(m: &Array2<f64>, tau: f64) -> Array2<f64> {
    assert!(tau >= 0.0, "threshold must be nonnegative");
    if tau == 0.0 {
        return m.clone();
    }
    // Thin SVD: a full one would materialize an n×n factor for the wide
    // mode-3 unfoldings (n in the tens of thousands).
    let (u, s, vt) = m.svddc(JobSvd::Some).expect("LAPACK SVD cannot fail");
    let u = u.expect("U requested");
    let vt = vt.expect("VT requested");
    shrink_reconstruct(&u, &s.to_vec(), &vt, tau)
}

fn shrink_reconstruct(
    u: &Array2<f64>,
    s: &[f64],
    vt: &Array2<f64>,
    tau: f64,
) -> Array2<f64> {
    let mut out = Array2::zeros((u.nrows(), vt.ncols()));
    for (l, &sigma) in s.iter().enumerate() {
        let shrunk = (sigma - tau).max(0.0);
        if shrunk == 0.0 {
            break; // singular values are nonincreasing
        }
        let ul = u.column(l);
        let vl = vt.row(l);
        for i in 0..out.nrows() {
            let c = shrunk * ul[i];
            for j in 0..out.ncols() {
                out[(i, j)] += c * vl[j];
            }
        }
    }
    out
}

/// Complex-matrix SVT, used on Fourier slices.
pub fn svt_matrix_complex(m: &Array2<Complex64>, tau: f64) -> Array2<Complex64> {
    assert!(tau >= 0.0, "threshold must be nonnegative");
    if tau == 0.0 {
        return m.clone();
    }
    let (u, s, vt) = m.svddc(JobSvd::Some).expect("LAPACK SVD cannot fail");
    let u = u.expect("U requested");
    let vt = vt.expect("VT requested");
    let mut out = Array2::<Complex64>::zeros((m.nrows(), m.ncols()));
    for (l, &sigma) in s.iter().enumerate() {
        let shrunk = (sigma - tau).max(0.0);
        if shrunk == 0.0 {
            break;
        }
        let ul = u.column(l);
        let vl = vt.row(l);
        for i in 0..out.nrows() {
            let c = ul[i] * shrunk;
            for j in 0..out.ncols() {
                out[(i, j)] += c * vl[j];
            }
        }
    }
    out
}

/// The TNN prox: SVT applied to every frontal Fourier slice. Exploits
/// conjugate symmetry by computing only the lower half of the spectrum.
pub fn svt_fourier_slices(x: &Tensor3, tau: f64) -> Result<Tensor3> {
    assert!(tau >= 0.0, "threshold must be nonnegative");
    let (n1, n2, n3) = x.dims();
    let xf = fft_mode3(x);
    let mut yf = ComplexTensor3::zeros((n1, n2, n3));
    let half = n3 / 2 + 1;
    for k in 0..half {
        let shrunk = svt_matrix_complex(&xf.frontal_slice(k), tau);
        yf.set_frontal_slice(k, &shrunk);
        if k > 0 && k != n3 - k {
            yf.set_frontal_slice(n3 - k, &shrunk.mapv(|c| c.conj()));
        }
    }
    ifft_mode3(&yf)
}

/// Elementwise `sign(v) * max(|v| - theta, 0)`.
#[inline]
pub fn soft_threshold_scalar(v: f64, theta: f64) -> f64 {
    v.signum() * (v.abs() - theta).max(0.0)
}

pub fn soft_threshold(x: &Tensor3, theta: f64) -> Tensor3 {
    assert!(theta >= 0.0, "threshold must be nonnegative");
    x.map(|v| soft_threshold_scalar(v, theta))
}

pub fn soft_threshold_matrix(m: &Array2<f64>, theta: f64) -> Array2<f64> {
    assert!(theta >= 0.0, "threshold must be nonnegative");
    m.mapv(|v| soft_threshold_scalar(v, theta))
}

/// Weighted sum of nuclear norms of the mode unfoldings.
pub fn snn_value(x: &Tensor3, w: &SnnWeights) -> f64 {
    (1..=3)
        .map(|mode| {
            let m = x.unfold(mode).expect("valid mode");
            w.alpha(mode) * nuclear_norm(&m)
        })
        .sum()
}

/// Sum of nuclear norms of all frontal Fourier slices.
pub fn tnn_value(x: &Tensor3) -> f64 {
    let (_, _, n3) = x.dims();
    let xf = fft_mode3(x);
    let half = n3 / 2 + 1;
    let mut total = 0.0;
    for k in 0..half {
        let (_, s, _) = xf.frontal_slice(k).svd(false, false).expect("SVD");
        let weight = if k > 0 && k != n3 - k { 2.0 } else { 1.0 };
        total += weight * s.sum();
    }
    total
}

pub fn nuclear_norm(m: &Array2<f64>) -> f64 {
    let (_, s, _) = m.svd(false, false).expect("LAPACK SVD cannot fail");
    s.sum()
}
