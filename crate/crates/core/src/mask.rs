//! Boolean observation masks over the index set of a tensor.

use crate::error::{CoreError, Result};
use crate::tensor::Tensor3;

/// Marks the observed entries of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMask {
    dims: (usize, usize, usize),
    data: Vec<bool>,
}

impl ObservationMask {
    pub fn new(dims: (usize, usize, usize), data: Vec<bool>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if data.len() != n1 * n2 * n3 {
            return Err(CoreError::ShapeMismatch(format!(
                "mask length {} does not match dims {:?}",
                data.len(),
                dims
            )));
        }
        Ok(ObservationMask { dims, data })
    }

    pub fn all_observed(dims: (usize, usize, usize)) -> Self {
        let (n1, n2, n3) = dims;
        ObservationMask {
            dims,
            data: vec![true; n1 * n2 * n3],
        }
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.data[i + self.dims.0 * (j + self.dims.1 * k)]
    }

    /// Linear-index access in the canonical layout.
    #[inline]
    pub fn get_linear(&self, idx: usize) -> bool {
        self.data[idx]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn observed_count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// 0.0/1.0 encoding for TNS1 files.
    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3::from_vec(
            self.dims,
            self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
        .expect("0/1 data is finite")
    }

    /// Inverse of [`ObservationMask::to_tensor`]; entries must be exactly
    /// 0.0 or 1.0.
    pub fn from_tensor(t: &Tensor3) -> Result<Self> {
        let data = t
            .data()
            .iter()
            .map(|&v| {
                if v == 1.0 {
                    Ok(true)
                } else if v == 0.0 {
                    Ok(false)
                } else {
                    Err(CoreError::Format(format!(
                        "mask entry {v} is neither 0.0 nor 1.0"
                    )))
                }
            })
            .collect::<Result<Vec<bool>>>()?;
        ObservationMask::new(t.dims(), data)
    }
}

/// Seeded random mask with exactly `round((1 - missing_ratio) * n)` entries
/// observed, drawn uniformly without replacement.
///
/// The algorithm is pinned for cross-platform reproducibility: a ChaCha20
/// stream seeded with the given `u64`, driving a partial Fisher-Yates
/// shuffle of the linear index range in the canonical layout; the first
/// `observed` shuffled positions are the observed set.
pub fn generate_mask(
    dims: (usize, usize, usize),
    missing_ratio: f64,
    seed: u64,
) -> Result<ObservationMask> {
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    if !(0.0..=1.0).contains(&missing_ratio) {
        return Err(CoreError::InvalidParameter(format!(
            "missing_ratio {missing_ratio} outside [0, 1]"
        )));
    }
    let (n1, n2, n3) = dims;
    let n = n1 * n2 * n3;
    if n == 0 {
        return Err(CoreError::ShapeMismatch("mask over empty tensor".into()));
    }
    let observed = ((1.0 - missing_ratio) * n as f64).round() as usize;
    if observed == 0 {
        return Err(CoreError::EmptyMask);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut data = vec![false; n];
    for t in 0..observed.min(n - 1) {
        let j = rng.gen_range(t..n);
        indices.swap(t, j);
        data[indices[t]] = true;
    }
    if observed == n {
        data[indices[n - 1]] = true;
    }
    Ok(ObservationMask::new(dims, data)?)
}

/// Pixel-erasure variant: positions `(i, j)` are drawn over the first two
/// modes and erased jointly across all bands, so a missing pixel is missing
/// in every band. Exactly `round((1 - missing_ratio) * n1 * n2)` pixels are
/// observed.
pub fn generate_mask_per_pixel(
    dims: (usize, usize, usize),
    missing_ratio: f64,
    seed: u64,
) -> Result<ObservationMask> {
    let (n1, n2, n3) = dims;
    let plane = generate_mask((n1, n2, 1), missing_ratio, seed)?;
    let mut data = Vec::with_capacity(n1 * n2 * n3);
    for _ in 0..n3 {
        data.extend_from_slice(plane.data());
    }
    ObservationMask::new(dims, data)
}
