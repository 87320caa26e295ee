//! Evaluation metrics: band-averaged PSNR and SSIM, and relative Frobenius
//! error. SSIM uses the canonical 11x11 Gaussian window, sigma 1.5,
//! K1 = 0.01, K2 = 0.03.

use ndarray::Array2;

use crate::error::{CoreError, Result};
use crate::tensor::Tensor3;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone)]
pub struct BandMetrics {
    pub band: usize,
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone)]
pub struct MetricReport {
    pub psnr_mean: f64,
    pub ssim_mean: f64,
    pub re: f64,
    pub per_band: Vec<BandMetrics>,
}

fn check_dims(x: &Tensor3, t: &Tensor3) -> Result<()> {
    if x.dims() != t.dims() {
        return Err(CoreError::ShapeMismatch(format!(
            "metrics: {:?} vs {:?}",
            x.dims(),
            t.dims()
        )));
    }
    Ok(())
}

/// Per-band PSNR (dB) and the band average. Identical bands report +inf.
pub fn psnr(x: &Tensor3, t: &Tensor3, peak: f64) -> Result<(f64, Vec<f64>)> {
    check_dims(x, t)?;
    if peak <= 0.0 {
        return Err(CoreError::InvalidParameter("peak must be positive".into()));
    }
    let (n1, n2, n3) = x.dims();
    let band_size = (n1 * n2) as f64;
    let mut per_band = Vec::with_capacity(n3);
    for k in 0..n3 {
        let mut se = 0.0;
        for j in 0..n2 {
            for i in 0..n1 {
                let d = x.get(i, j, k) - t.get(i, j, k);
                se += d * d;
            }
        }
        let mse = se / band_size;
        per_band.push(if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (peak * peak / mse).log10()
        });
    }
    let mean = per_band.iter().sum::<f64>() / n3 as f64;
    Ok((mean, per_band))
}

fn gaussian_window() -> Array2<f64> {
    let n = SSIM_WINDOW;
    let c = (n as f64 - 1.0) / 2.0;
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let di = i as f64 - c;
            let dj = j as f64 - c;
            w[(i, j)] = (-(di * di + dj * dj) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        }
    }
    let sum = w.sum();
    w.mapv_inplace(|v| v / sum);
    w
}

fn ssim_slice(x: &Array2<f64>, t: &Array2<f64>, peak: f64, w: &Array2<f64>) -> f64 {
    let (n1, n2) = x.dim();
    let n = SSIM_WINDOW;
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let mut total = 0.0;
    let mut count = 0usize;
    // valid windows only: no padding at the borders
    for r in 0..=(n1 - n) {
        for c in 0..=(n2 - n) {
            let (mut mx, mut mt) = (0.0, 0.0);
            let (mut xx, mut tt, mut xt) = (0.0, 0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    let wv = w[(a, b)];
                    let xv = x[(r + a, c + b)];
                    let tv = t[(r + a, c + b)];
                    mx += wv * xv;
                    mt += wv * tv;
                    xx += wv * xv * xv;
                    tt += wv * tv * tv;
                    xt += wv * xv * tv;
                }
            }
            let vx = xx - mx * mx;
            let vt = tt - mt * mt;
            let cov = xt - mx * mt;
            let s = ((2.0 * mx * mt + c1) * (2.0 * cov + c2))
                / ((mx * mx + mt * mt + c1) * (vx + vt + c2));
            total += s;
            count += 1;
        }
    }
    total / count as f64
}

/// Per-band mean SSIM and the band average.
pub fn ssim(x: &Tensor3, t: &Tensor3, peak: f64) -> Result<(f64, Vec<f64>)> {
    check_dims(x, t)?;
    if peak <= 0.0 {
        return Err(CoreError::InvalidParameter("peak must be positive".into()));
    }
    let (n1, n2, n3) = x.dims();
    if n1 < SSIM_WINDOW || n2 < SSIM_WINDOW {
        return Err(CoreError::ShapeMismatch(format!(
            "slice {n1}x{n2} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )));
    }
    let w = gaussian_window();
    let mut per_band = Vec::with_capacity(n3);
    for k in 0..n3 {
        per_band.push(ssim_slice(&x.frontal_slice(k), &t.frontal_slice(k), peak, &w));
    }
    let mean = per_band.iter().sum::<f64>() / n3 as f64;
    Ok((mean, per_band))
}

/// `||x - t||_F / ||t||_F`. Errors on identically-zero `t`.
pub fn relative_error(x: &Tensor3, t: &Tensor3) -> Result<f64> {
    check_dims(x, t)?;
    let tn = t.frobenius_norm();
    if tn == 0.0 {
        return Err(CoreError::InvalidParameter(
            "relative error undefined for zero reference".into(),
        ));
    }
    Ok(x.sub(t).frobenius_norm() / tn)
}

/// Full report: band-averaged PSNR/SSIM plus relative error.
pub fn report(x: &Tensor3, t: &Tensor3, peak: f64) -> Result<MetricReport> {
    let (psnr_mean, psnr_bands) = psnr(x, t, peak)?;
    let (ssim_mean, ssim_bands) = ssim(x, t, peak)?;
    let re = relative_error(x, t)?;
    let per_band = psnr_bands
        .into_iter()
        .zip(ssim_bands)
        .enumerate()
        .map(|(band, (p, s))| BandMetrics {
            band,
            psnr: p,
            ssim: s,
        })
        .collect();
    Ok(MetricReport {
        psnr_mean,
        ssim_mean,
        re,
        per_band,
    })
}
