//! Thin wrappers around rustfft with a thread-local plan cache, plus 2-D
//! transforms over `ndarray` matrices.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

/// One-dimensional FFT plan for the given length; `inverse` selects the
/// backward (unscaled) transform.
pub fn fft1d_cache(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

fn fft2_inplace(m: &mut Array2<Complex64>, inverse: bool) {
    let (rows, cols) = m.dim();
    let row_fft = fft1d_cache(cols, inverse);
    let col_fft = fft1d_cache(rows, inverse);
    let mut buf = vec![Complex64::new(0.0, 0.0); cols.max(rows)];
    for mut row in m.rows_mut() {
        buf[..cols].copy_from_slice(row.as_slice().expect("row-major layout"));
        row_fft.process(&mut buf[..cols]);
        for (dst, src) in row.iter_mut().zip(&buf[..cols]) {
            *dst = *src;
        }
    }
    for mut col in m.columns_mut() {
        for (dst, src) in buf[..rows].iter_mut().zip(col.iter()) {
            *dst = *src;
        }
        col_fft.process(&mut buf[..rows]);
        for (dst, src) in col.iter_mut().zip(&buf[..rows]) {
            *dst = *src;
        }
    }
}

/// Unnormalized 2-D forward DFT of a real matrix.
pub fn fft2_real(m: &Array2<f64>) -> Array2<Complex64> {
    let mut c = m.mapv(|v| Complex64::new(v, 0.0));
    fft2_inplace(&mut c, false);
    c
}

/// Unnormalized 2-D forward DFT of a complex matrix.
pub fn fft2(m: &Array2<Complex64>) -> Array2<Complex64> {
    let mut c = m.clone();
    fft2_inplace(&mut c, false);
    c
}

/// 1/(rows*cols)-scaled 2-D inverse DFT.
pub fn ifft2(m: &Array2<Complex64>) -> Array2<Complex64> {
    let mut c = m.clone();
    fft2_inplace(&mut c, true);
    let scale = 1.0 / (c.nrows() * c.ncols()) as f64;
    c.mapv_inplace(|v| v * scale);
    c
}

/// Inverse 2-D DFT keeping only the real part. The caller is responsible for
/// the spectrum being (numerically) Hermitian.
pub fn ifft2_real(m: &Array2<Complex64>) -> Array2<f64> {
    ifft2(m).mapv(|v| v.re)
}
