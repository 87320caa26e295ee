//! Input/output plumbing: TNS1 tensors natively, 8-bit PNG images mapped to
//! and from [0, 1].

use std::path::Path;

use anyhow::{bail, Context, Result};
use image::ImageReader;
use ndarray::Array2;

use lrtc_core::tensor::Tensor3;
use lrtc_core::{io as tns, ObservationMask};

/// Load a tensor: `.tns`/`.tns1` files natively, `.png` as H×W×3 RGB
/// scaled to [0, 1].
pub fn load_input(path: &Path) -> Result<Tensor3> {
    match extension(path)? {
        "tns" | "tns1" => {
            tns::read_tensor(path).with_context(|| format!("reading {}", path.display()))
        }
        "png" => {
            let img = ImageReader::open(path)
                .with_context(|| format!("opening {}", path.display()))?
                .decode()
                .with_context(|| format!("decoding {}", path.display()))?
                .to_rgb8();
            let (w, h) = img.dimensions();
            Tensor3::from_fn((h as usize, w as usize, 3), |i, j, k| {
                f64::from(img.get_pixel(j as u32, i as u32)[k]) / 255.0
            })
            .context("building tensor from image")
        }
        other => bail!("unsupported input format '.{other}' (expected .tns, .tns1 or .png)"),
    }
}

/// Load a grayscale slice for dictionary training: PNG via 8-bit luma, or a
/// single-slice TNS1 tensor.
pub fn load_gray(path: &Path) -> Result<Array2<f64>> {
    match extension(path)? {
        "tns" | "tns1" => {
            let t = tns::read_tensor(path)?;
            let (n1, n2, n3) = t.dims();
            if n3 != 1 {
                bail!(
                    "{}: training tensors must have a single slice, found {n3}",
                    path.display()
                );
            }
            Ok(Array2::from_shape_fn((n1, n2), |(i, j)| t.get(i, j, 0)))
        }
        "png" => {
            let img = ImageReader::open(path)?
                .decode()
                .with_context(|| format!("decoding {}", path.display()))?
                .to_luma8();
            let (w, h) = img.dimensions();
            Ok(Array2::from_shape_fn((h as usize, w as usize), |(i, j)| {
                f64::from(img.get_pixel(j as u32, i as u32)[0]) / 255.0
            }))
        }
        other => bail!("unsupported training format '.{other}'"),
    }
}

/// Save a tensor: `.tns`/`.tns1` natively; `.png` quantizes [0, 1] to 8-bit
/// with round-half-to-even and requires 3 slices (RGB) or 1 (grayscale).
pub fn save_output(t: &Tensor3, path: &Path) -> Result<()> {
    match extension(path)? {
        "tns" | "tns1" => {
            tns::write_tensor(path, t).with_context(|| format!("writing {}", path.display()))
        }
        "png" => {
            let (n1, n2, n3) = t.dims();
            let quant = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round_ties_even() as u8;
            match n3 {
                3 => {
                    let img = image::RgbImage::from_fn(n2 as u32, n1 as u32, |x, y| {
                        let (i, j) = (y as usize, x as usize);
                        image::Rgb([
                            quant(t.get(i, j, 0)),
                            quant(t.get(i, j, 1)),
                            quant(t.get(i, j, 2)),
                        ])
                    });
                    img.save(path)
                        .with_context(|| format!("writing {}", path.display()))
                }
                1 => {
                    let img = image::GrayImage::from_fn(n2 as u32, n1 as u32, |x, y| {
                        image::Luma([quant(t.get(y as usize, x as usize, 0))])
                    });
                    img.save(path)
                        .with_context(|| format!("writing {}", path.display()))
                }
                _ => bail!("PNG output requires 1 or 3 slices, tensor has {n3}"),
            }
        }
        other => bail!("unsupported output format '.{other}'"),
    }
}

/// Load a mask stored as a 0.0/1.0 TNS1 tensor.
pub fn load_mask(path: &Path) -> Result<ObservationMask> {
    let t = tns::read_tensor(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ObservationMask::from_tensor(&t)?)
}

fn extension(path: &Path) -> Result<&str> {
    path.extension()
        .and_then(|e| e.to_str())
        .with_context(|| format!("{}: missing file extension", path.display()))
}
