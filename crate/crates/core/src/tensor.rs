//! Dense 3-way tensors and the algebra built on them: mode unfolding/folding,
//! mode-3 FFT, the t-product, and the block-circulant operators used as test
//! oracles.
//!
//! Layout is fixed: mode-1 index varies fastest, then mode-2, then mode-3, so
//! `unfold(_, 1)` is a plain reshape and the mode-3 tubes sit at stride
//! `n1 * n2`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::fft::fft1d_cache;

/// Relative imaginary magnitude tolerated when a spectrum is brought back to
/// the real domain. Anything above this signals broken conjugate symmetry.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Dense real 3-way tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        let (n1, n2, n3) = dims;
        Tensor3 {
            dims,
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    /// Build from data in the canonical layout (mode-1 fastest).
    pub fn from_vec(dims: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if data.len() != n1 * n2 * n3 {
            return Err(CoreError::ShapeMismatch(format!(
                "data length {} does not match dims {}x{}x{}",
                data.len(),
                n1,
                n2,
                n3
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite("tensor constructor".into()));
        }
        Ok(Tensor3 { dims, data })
    }

    pub fn from_fn(
        dims: (usize, usize, usize),
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let (n1, n2, n3) = dims;
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3::from_vec(dims, data)
    }

    /// Identity tensor: first frontal slice is `I`, the rest are zero.
    pub fn identity(n: usize, n3: usize) -> Self {
        let mut t = Tensor3::zeros((n, n, n3));
        for i in 0..n {
            let idx = t.idx(i, i, 0);
            t.data[idx] = 1.0;
        }
        t
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Tensor3 {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        self.zip(other, |a, b| a - b)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &Tensor3) -> Tensor3 {
        self.zip(other, |x, y| x + a * y)
    }

    fn zip(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Tensor3 {
        assert_eq!(self.dims, other.dims, "tensor dims must match");
        Tensor3 {
            dims: self.dims,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Copy of the k-th frontal slice as an `n1 x n2` matrix.
    pub fn frontal_slice(&self, k: usize) -> Array2<f64> {
        let (n1, n2, _) = self.dims;
        Array2::from_shape_fn((n1, n2), |(i, j)| self.get(i, j, k))
    }

    pub fn set_frontal_slice(&mut self, k: usize, slice: &Array2<f64>) {
        let (n1, n2, _) = self.dims;
        assert_eq!(slice.dim(), (n1, n2), "slice dims must match");
        for j in 0..n2 {
            for i in 0..n1 {
                self.set(i, j, k, slice[(i, j)]);
            }
        }
    }

    /// Mode-k matricization. Columns are ordered with the lower remaining
    /// mode index varying fastest.
    pub fn unfold(&self, mode: usize) -> Result<Array2<f64>> {
        let (n1, n2, n3) = self.dims;
        match mode {
            1 => {
                let mut m = Array2::zeros((n1, n2 * n3));
                for k in 0..n3 {
                    for j in 0..n2 {
                        for i in 0..n1 {
                            m[(i, j + n2 * k)] = self.get(i, j, k);
                        }
                    }
                }
                Ok(m)
            }
            2 => {
                let mut m = Array2::zeros((n2, n1 * n3));
                for k in 0..n3 {
                    for j in 0..n2 {
                        for i in 0..n1 {
                            m[(j, i + n1 * k)] = self.get(i, j, k);
                        }
                    }
                }
                Ok(m)
            }
            3 => {
                let mut m = Array2::zeros((n3, n1 * n2));
                for k in 0..n3 {
                    for j in 0..n2 {
                        for i in 0..n1 {
                            m[(k, i + n1 * j)] = self.get(i, j, k);
                        }
                    }
                }
                Ok(m)
            }
            _ => Err(CoreError::InvalidMode(mode)),
        }
    }

    /// Exact inverse of [`Tensor3::unfold`].
    pub fn fold(m: &Array2<f64>, mode: usize, dims: (usize, usize, usize)) -> Result<Tensor3> {
        let (n1, n2, n3) = dims;
        let expected = match mode {
            1 => (n1, n2 * n3),
            2 => (n2, n1 * n3),
            3 => (n3, n1 * n2),
            _ => return Err(CoreError::InvalidMode(mode)),
        };
        if m.dim() != expected {
            return Err(CoreError::ShapeMismatch(format!(
                "fold mode {}: matrix is {:?}, expected {:?}",
                mode,
                m.dim(),
                expected
            )));
        }
        let mut t = Tensor3::zeros(dims);
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    let v = match mode {
                        1 => m[(i, j + n2 * k)],
                        2 => m[(j, i + n1 * k)],
                        _ => m[(k, i + n1 * j)],
                    };
                    t.set(i, j, k, v);
                }
            }
        }
        Ok(t)
    }
}

/// Dense complex 3-way tensor, used for mode-3 spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor3 {
    dims: (usize, usize, usize),
    data: Vec<Complex64>,
}

impl ComplexTensor3 {
    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        let (n1, n2, n3) = dims;
        ComplexTensor3 {
            dims,
            data: vec![Complex64::new(0.0, 0.0); n1 * n2 * n3],
        }
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frontal_slice(&self, k: usize) -> Array2<Complex64> {
        let (n1, n2, _) = self.dims;
        Array2::from_shape_fn((n1, n2), |(i, j)| self.get(i, j, k))
    }

    pub fn set_frontal_slice(&mut self, k: usize, slice: &Array2<Complex64>) {
        let (n1, n2, _) = self.dims;
        assert_eq!(slice.dim(), (n1, n2), "slice dims must match");
        for j in 0..n2 {
            for i in 0..n1 {
                self.set(i, j, k, slice[(i, j)]);
            }
        }
    }
}

/// Unnormalized forward DFT along every mode-3 tube.
pub fn fft_mode3(x: &Tensor3) -> ComplexTensor3 {
    let (n1, n2, n3) = x.dims();
    let fft = fft1d_cache(n3, false);
    let mut out = ComplexTensor3::zeros((n1, n2, n3));
    let mut tube = vec![Complex64::new(0.0, 0.0); n3];
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, t) in tube.iter_mut().enumerate() {
                *t = Complex64::new(x.get(i, j, k), 0.0);
            }
            fft.process(&mut tube);
            for (k, t) in tube.iter().enumerate() {
                out.set(i, j, k, *t);
            }
        }
    }
    out
}

/// Inverse of [`fft_mode3`]: 1/n3-scaled inverse DFT per tube. Errors if the
/// result carries imaginary residue above [`IMAG_RESIDUE_TOL`] relative
/// magnitude.
pub fn ifft_mode3(y: &ComplexTensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = y.dims();
    let ifft = fft1d_cache(n3, true);
    let scale = 1.0 / n3 as f64;
    let mut out = Tensor3::zeros((n1, n2, n3));
    let mut tube = vec![Complex64::new(0.0, 0.0); n3];
    let mut max_im: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, t) in tube.iter_mut().enumerate() {
                *t = y.get(i, j, k);
            }
            ifft.process(&mut tube);
            for (k, t) in tube.iter().enumerate() {
                let v = *t * scale;
                max_im = max_im.max(v.im.abs());
                max_re = max_re.max(v.re.abs());
                out.set(i, j, k, v.re);
            }
        }
    }
    let residue = max_im / max_re.max(1.0);
    if residue > IMAG_RESIDUE_TOL {
        return Err(CoreError::ImaginaryResidue {
            residue,
            tol: IMAG_RESIDUE_TOL,
            context: "ifft_mode3".into(),
        });
    }
    Ok(out)
}

/// t-product computed slice-wise in the Fourier domain.
pub fn t_product(x: &Tensor3, y: &Tensor3) -> Result<Tensor3> {
    let (n1, n2x, n3x) = x.dims();
    let (n2y, n4, n3y) = y.dims();
    if n2x != n2y || n3x != n3y {
        return Err(CoreError::ShapeMismatch(format!(
            "t_product: {:?} * {:?}",
            x.dims(),
            y.dims()
        )));
    }
    let xf = fft_mode3(x);
    let yf = fft_mode3(y);
    let mut zf = ComplexTensor3::zeros((n1, n4, n3x));
    // Conjugate symmetry: only the first ceil((n3+1)/2) products are computed.
    let half = n3x / 2 + 1;
    for k in 0..half {
        let prod = xf.frontal_slice(k).dot(&yf.frontal_slice(k));
        zf.set_frontal_slice(k, &prod);
        if k > 0 && k != n3x - k {
            let mirror = prod.mapv(|c| c.conj());
            zf.set_frontal_slice(n3x - k, &mirror);
        }
    }
    ifft_mode3(&zf)
}

/// Tensor conjugate transpose under the t-product: transpose each frontal
/// slice and reverse the order of slices 2..n3.
pub fn t_transpose(x: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = x.dims();
    Tensor3::from_fn((n2, n1, n3), |i, j, k| {
        let ks = if k == 0 { 0 } else { n3 - k };
        x.get(j, i, ks)
    })
    .expect("transpose of a finite tensor is finite")
}

/// Block-circulant matrix of `x`. O(n3^2) memory; a test oracle, not a
/// hot-path operation.
pub fn bcirc(x: &Tensor3) -> Array2<f64> {
    let (n1, n2, n3) = x.dims();
    let mut m = Array2::zeros((n1 * n3, n2 * n3));
    for bc in 0..n3 {
        for br in 0..n3 {
            // block (br, bc) holds frontal slice (br - bc) mod n3
            let k = (br + n3 - bc) % n3;
            for j in 0..n2 {
                for i in 0..n1 {
                    m[(br * n1 + i, bc * n2 + j)] = x.get(i, j, k);
                }
            }
        }
    }
    m
}

/// Frontal slices stacked vertically. Test oracle companion to [`bcirc`].
pub fn bvec(x: &Tensor3) -> Array2<f64> {
    let (n1, n2, n3) = x.dims();
    let mut m = Array2::zeros((n1 * n3, n2));
    for k in 0..n3 {
        for j in 0..n2 {
            for i in 0..n1 {
                m[(k * n1 + i, j)] = x.get(i, j, k);
            }
        }
    }
    m
}

/// Inverse of [`bvec`].
pub fn bvfold(m: &Array2<f64>, dims: (usize, usize, usize)) -> Result<Tensor3> {
    let (n1, n2, n3) = dims;
    if m.dim() != (n1 * n3, n2) {
        return Err(CoreError::ShapeMismatch(format!(
            "bvfold: matrix is {:?}, expected {:?}",
            m.dim(),
            (n1 * n3, n2)
        )));
    }
    Tensor3::from_fn(dims, |i, j, k| m[(k * n1 + i, j)])
}
