//! Diagnostic: PSNR of denoise(input) against a reference, e.g. to measure
//! whether the denoiser improves a degraded completion iterate.
//! Usage: denoise_probe <input> <reference> <dict> [lambda] [inner] [lambda_lp]

use std::path::Path;

use lrtc_core::csc::CscDenoiser;
use lrtc_core::metrics::psnr;
use lrtc_core::{ConvDictionary, CscParams};
use lrtc_harness::io::load_input;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let input = load_input(Path::new(&args[1])).unwrap();
    let reference = load_input(Path::new(&args[2])).unwrap();
    let dict = ConvDictionary::load(&args[3]).unwrap();
    let lambda: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let inner: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(50);
    let lambda_lp: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(5.0);

    let params = CscParams {
        lambda,
        rho: 100.0 * lambda + 1.0,
        inner_iters: inner,
        input_scale: 255.0,
        ..CscParams::default()
    };
    let den = CscDenoiser::new(dict, params, lambda_lp).unwrap();
    let (before, _) = psnr(&input, &reference, 1.0).unwrap();
    let out = den.denoise(&input).unwrap();
    let (after, _) = psnr(&out, &reference, 1.0).unwrap();
    println!(
        "input PSNR {before:.3} dB -> denoised PSNR {after:.3} dB (lambda {lambda}, inner {inner}, lambda_lp {lambda_lp})"
    );
}
