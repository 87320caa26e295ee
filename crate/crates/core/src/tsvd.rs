//! Tensor SVD under the t-product: per-Fourier-slice matrix SVDs with
//! conjugate-symmetry mirroring for the upper half of the spectrum.

use ndarray::Array2;
use ndarray_linalg::SVD;
use num_complex::Complex64;

use crate::error::Result;
use crate::tensor::{fft_mode3, ifft_mode3, t_product, t_transpose, ComplexTensor3, Tensor3};

/// Factors of a t-SVD: `x = u * s * v^T` (t-product), `s` f-diagonal,
/// `u` and `v` orthogonal under the t-product.
#[derive(Debug, Clone)]
pub struct TSvdFactors {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
}

impl TSvdFactors {
    pub fn reconstruct(&self) -> Result<Tensor3> {
        t_product(&self.u, &t_product(&self.s, &t_transpose(&self.v))?)
    }
}

/// t-SVD via a series of matrix SVDs in the Fourier domain. Only slices
/// `k = 0..=n3/2` are decomposed; the rest follow by conjugate symmetry.
pub fn t_svd(x: &Tensor3) -> Result<TSvdFactors> {
    let (n1, n2, n3) = x.dims();
    let xf = fft_mode3(x);
    let mut uf = ComplexTensor3::zeros((n1, n1, n3));
    let mut sf = ComplexTensor3::zeros((n1, n2, n3));
    let mut vf = ComplexTensor3::zeros((n2, n2, n3));
    let half = n3 / 2 + 1;
    for k in 0..half {
        let slice = xf.frontal_slice(k);
        let (u, s, vt) = slice.svd(true, true).expect("LAPACK SVD cannot fail");
        let u = u.expect("full U requested");
        let vt = vt.expect("full VT requested");
        let mut s_mat = Array2::<Complex64>::zeros((n1, n2));
        for (i, &sv) in s.iter().enumerate() {
            s_mat[(i, i)] = Complex64::new(sv, 0.0);
        }
        // V = (VT)^H
        let v = vt.t().mapv(|c| c.conj());
        uf.set_frontal_slice(k, &u);
        sf.set_frontal_slice(k, &s_mat);
        vf.set_frontal_slice(k, &v);
        if k > 0 && k != n3 - k {
            uf.set_frontal_slice(n3 - k, &u.mapv(|c| c.conj()));
            sf.set_frontal_slice(n3 - k, &s_mat);
            vf.set_frontal_slice(n3 - k, &v.mapv(|c| c.conj()));
        }
    }
    Ok(TSvdFactors {
        u: ifft_mode3(&uf)?,
        s: ifft_mode3(&sf)?,
        v: ifft_mode3(&vf)?,
    })
}

/// Tubal rank: number of tubes of `s` with norm above `tol`. Derived
/// diagnostic; `s` must come from [`t_svd`].
pub fn tubal_rank(s: &Tensor3, tol: f64) -> usize {
    let (n1, n2, n3) = s.dims();
    (0..n1.min(n2))
        .filter(|&i| {
            let tube_norm: f64 = (0..n3).map(|k| s.get(i, i, k).powi(2)).sum::<f64>().sqrt();
            tube_norm > tol
        })
        .count()
}
