//! Gradient-regularized CBPDN solved by inner ADMM. The coefficient-map
//! update is a per-frequency rank-one-plus-diagonal system solved with the
//! Sherman-Morrison identity; the auxiliary update is soft thresholding.

use ndarray::Array2;
use num_complex::Complex64;

use crate::csc::dictionary::{ConvDictionary, GradientFilters};
use crate::csc::CscParams;
use crate::error::{CoreError, Result};
use crate::fft::{fft2_real, ifft2_real};
use crate::prox::soft_threshold_matrix;

/// K coefficient maps, each the full spatial size of the coded slice.
#[derive(Debug, Clone)]
pub struct FeatureMapStack {
    dims: (usize, usize),
    maps: Vec<Array2<f64>>,
}

impl FeatureMapStack {
    pub fn new(maps: Vec<Array2<f64>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(CoreError::ShapeMismatch("empty feature map stack".into()));
        }
        let dims = maps[0].dim();
        if maps.iter().any(|m| m.dim() != dims) {
            return Err(CoreError::ShapeMismatch(
                "feature maps must share spatial dims".into(),
            ));
        }
        Ok(FeatureMapStack { dims, maps })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn maps(&self) -> &[Array2<f64>] {
        &self.maps
    }

    pub fn l1_norm(&self) -> f64 {
        self.maps.iter().map(|m| m.mapv(f64::abs).sum()).sum()
    }
}

/// Output of [`cbpdn_gr_solve`]: the sparse iterate plus per-sweep records.
#[derive(Debug, Clone)]
pub struct CbpdnResult {
    pub maps: FeatureMapStack,
    /// Augmented-Lagrangian objective after each full ADMM sweep.
    pub objective: Vec<f64>,
    /// Relative primal residual after each sweep.
    pub primal_residual: Vec<f64>,
    pub iters: usize,
}

/// Warm-startable CBPDN iterate: the sparse maps and the scaled multiplier.
/// Passing the state of a previous solve of a slowly changing input lets a
/// small per-call iteration budget act like one long solve.
#[derive(Debug, Clone)]
pub struct CbpdnState {
    b: Vec<Array2<f64>>,
    c: Vec<Array2<f64>>,
}

impl CbpdnState {
    /// Zero (cold-start) state for `k` maps of the given spatial dims.
    pub fn zeros(k: usize, dims: (usize, usize)) -> Self {
        CbpdnState {
            b: vec![Array2::zeros(dims); k],
            c: vec![Array2::zeros(dims); k],
        }
    }
}

/// Dictionary spectra padded to a fixed slice size, shared across slices
/// and inner iterations.
pub struct DictFreq {
    dims: (usize, usize),
    /// `d_hat[i]` is the spectrum of filter i zero-padded to the slice size.
    d_hat: Vec<Array2<Complex64>>,
    /// `sum_i |d_hat[i]|^2` per frequency.
    dd: Array2<f64>,
}

impl DictFreq {
    pub fn new(d: &ConvDictionary, dims: (usize, usize)) -> Result<Self> {
        let (n1, n2) = dims;
        let r = d.support();
        if r > n1 || r > n2 {
            return Err(CoreError::ShapeMismatch(format!(
                "filter support {r} exceeds slice dims {n1}x{n2}"
            )));
        }
        let mut d_hat = Vec::with_capacity(d.filter_count());
        let mut dd = Array2::zeros((n1, n2));
        for f in d.filters() {
            let mut padded = Array2::zeros((n1, n2));
            for i in 0..r {
                for j in 0..r {
                    padded[(i, j)] = f[(i, j)];
                }
            }
            let spec = fft2_real(&padded);
            for (acc, v) in dd.iter_mut().zip(spec.iter()) {
                *acc += v.norm_sqr();
            }
            d_hat.push(spec);
        }
        Ok(DictFreq { dims, d_hat, dd })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn filter_count(&self) -> usize {
        self.d_hat.len()
    }

    /// Padded spectrum of filter `i`.
    pub fn spectrum(&self, i: usize) -> &Array2<Complex64> {
        &self.d_hat[i]
    }
}

/// `sum_i d_i * m_i` with circular convolution, computed in the Fourier
/// domain.
pub fn reconstruct(d: &ConvDictionary, m: &FeatureMapStack) -> Result<Array2<f64>> {
    let df = DictFreq::new(d, m.dims())?;
    reconstruct_freq(&df, m)
}

pub fn reconstruct_freq(df: &DictFreq, m: &FeatureMapStack) -> Result<Array2<f64>> {
    if df.d_hat.len() != m.maps().len() {
        return Err(CoreError::ShapeMismatch(format!(
            "{} filters vs {} maps",
            df.d_hat.len(),
            m.maps().len()
        )));
    }
    if df.dims != m.dims() {
        return Err(CoreError::ShapeMismatch(format!(
            "dictionary planned for {:?}, maps are {:?}",
            df.dims,
            m.dims()
        )));
    }
    let (n1, n2) = df.dims;
    let mut acc = Array2::<Complex64>::zeros((n1, n2));
    for (spec, map) in df.d_hat.iter().zip(m.maps()) {
        let m_hat = fft2_real(map);
        for ((a, s), v) in acc.iter_mut().zip(spec.iter()).zip(m_hat.iter()) {
            *a += s * v;
        }
    }
    Ok(ifft2_real(&acc))
}

/// Tikhonov low/high-frequency split: `low` solves
/// `min 1/2||L - s||^2 + lambda_lp/2 (||g0*L||^2 + ||g1*L||^2)` in closed
/// form in the Fourier domain; `high = s - low`.
pub fn lowpass_split(slice: &Array2<f64>, lambda_lp: f64) -> (Array2<f64>, Array2<f64>) {
    assert!(lambda_lp >= 0.0, "lambda_lp must be nonnegative");
    if lambda_lp == 0.0 {
        return (slice.clone(), Array2::zeros(slice.dim()));
    }
    let (n1, n2) = slice.dim();
    let w = GradientFilters::freq_weights(n1, n2);
    let mut spec = fft2_real(slice);
    for (s, &wv) in spec.iter_mut().zip(w.iter()) {
        *s /= 1.0 + lambda_lp * wv;
    }
    let low = ifft2_real(&spec);
    let high = slice - &low;
    (low, high)
}

/// Inner ADMM for the gradient-regularized CBPDN problem on one slice.
/// Returns the sparse auxiliary iterate.
pub fn cbpdn_gr_solve(
    d: &ConvDictionary,
    input: &Array2<f64>,
    p: &CscParams,
) -> Result<CbpdnResult> {
    let df = DictFreq::new(d, input.dim())?;
    cbpdn_gr_solve_freq(&df, input, p)
}

pub fn cbpdn_gr_solve_freq(
    df: &DictFreq,
    input: &Array2<f64>,
    p: &CscParams,
) -> Result<CbpdnResult> {
    let mut state = CbpdnState::zeros(df.filter_count(), df.dims);
    cbpdn_gr_solve_stateful(df, input, p, &mut state)
}

/// Like [`cbpdn_gr_solve_freq`] but starting from — and writing back — the
/// given iterate.
pub fn cbpdn_gr_solve_stateful(
    df: &DictFreq,
    input: &Array2<f64>,
    p: &CscParams,
    state: &mut CbpdnState,
) -> Result<CbpdnResult> {
    p.validate()?;
    if input.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFinite("cbpdn input".into()));
    }
    if input.dim() != df.dims {
        return Err(CoreError::ShapeMismatch(format!(
            "input {:?} vs planned {:?}",
            input.dim(),
            df.dims
        )));
    }
    let (n1, n2) = df.dims;
    let nf = n1 * n2;
    let k = df.d_hat.len();
    if state.b.len() != k || state.b[0].dim() != (n1, n2) {
        return Err(CoreError::ShapeMismatch(format!(
            "warm-start state has {} maps of {:?}, expected {} of {:?}",
            state.b.len(),
            state.b[0].dim(),
            k,
            (n1, n2)
        )));
    }

    let input_hat = fft2_real(input);
    // data-term correlation D^H * input_hat, fixed across iterations
    let dh_input: Vec<Array2<Complex64>> = df
        .d_hat
        .iter()
        .map(|spec| {
            Array2::from_shape_fn((n1, n2), |idx| spec[idx].conj() * input_hat[idx])
        })
        .collect();

    // diagonal part a(f) = rho + tau * (|g0_hat|^2 + |g1_hat|^2)
    let grad_w = GradientFilters::freq_weights(n1, n2);
    let a = grad_w.mapv(|w| p.rho + p.tau_g * w);

    let b = &mut state.b;
    let c = &mut state.c;
    let mut m: Vec<Array2<f64>> = vec![Array2::zeros((n1, n2)); k];
    let mut rhs: Vec<Array2<Complex64>> = vec![Array2::zeros((n1, n2)); k];

    let theta = p.lambda / p.rho;
    let mut objective = Vec::new();
    let mut residuals = Vec::new();
    let mut iters = 0;

    for _ in 0..p.inner_iters {
        iters += 1;
        // rhs_i = D^H input + rho (B_i - C_i)^, and s = sum_i d_i rhs_i
        let mut s = Array2::<Complex64>::zeros((n1, n2));
        for i in 0..k {
            let bc = &b[i] - &c[i];
            let bc_hat = fft2_real(&bc);
            let r = rhs[i].as_slice_mut().expect("standard layout");
            let dhi = dh_input[i].as_slice().expect("standard layout");
            let bch = bc_hat.as_slice().expect("standard layout");
            let dh = df.d_hat[i].as_slice().expect("standard layout");
            let ss = s.as_slice_mut().expect("standard layout");
            for idx in 0..nf {
                let v = dhi[idx] + bch[idx] * p.rho;
                r[idx] = v;
                ss[idx] += dh[idx] * v;
            }
        }
        // Sherman-Morrison: (a I + d d^H)^{-1} rhs. The reconstruction
        // spectrum and gradient energy are accumulated here so the
        // objective costs no extra transforms.
        let mut m_hat = Array2::<Complex64>::zeros((n1, n2));
        let mut resid_hat = vec![Complex64::new(0.0, 0.0); nf];
        let mut grad_acc = 0.0;
        {
            let aa = a.as_slice().expect("standard layout");
            let ddv = df.dd.as_slice().expect("standard layout");
            let ss = s.as_slice().expect("standard layout");
            let gw = grad_w.as_slice().expect("standard layout");
            for i in 0..k {
                let mh = m_hat.as_slice_mut().expect("standard layout");
                let ri = rhs[i].as_slice().expect("standard layout");
                let dh = df.d_hat[i].as_slice().expect("standard layout");
                for idx in 0..nf {
                    let af = aa[idx];
                    let denom = af * (af + ddv[idx]);
                    let v = ri[idx] / af - dh[idx].conj() * ss[idx] / denom;
                    mh[idx] = v;
                    resid_hat[idx] += dh[idx] * v;
                    grad_acc += gw[idx] * v.norm_sqr();
                }
                m[i] = ifft2_real(&m_hat);
            }
        }
        // B-update (soft threshold) and multiplier step
        let mut prim_sq = 0.0;
        let mut m_sq = 0.0;
        let mut b_sq = 0.0;
        for i in 0..k {
            b[i] = soft_threshold_matrix(&(&m[i] + &c[i]), theta);
            let diff = &m[i] - &b[i];
            c[i] += &diff;
            prim_sq += diff.mapv(|v| v * v).sum();
            m_sq += m[i].mapv(|v| v * v).sum();
            b_sq += b[i].mapv(|v| v * v).sum();
        }
        let denom = m_sq.max(b_sq).sqrt();
        let residual = if denom == 0.0 {
            0.0
        } else {
            prim_sq.sqrt() / denom
        };
        residuals.push(residual);
        objective.push(augmented_lagrangian(
            &input_hat, &resid_hat, grad_acc, &m, &b, &c, p,
        ));
        if residual < p.tol {
            break;
        }
    }

    Ok(CbpdnResult {
        maps: FeatureMapStack::new(b.clone())?,
        objective,
        primal_residual: residuals,
        iters,
    })
}

fn augmented_lagrangian(
    input_hat: &Array2<Complex64>,
    resid_hat: &[Complex64],
    grad_acc: f64,
    m: &[Array2<f64>],
    b: &[Array2<f64>],
    c: &[Array2<f64>],
    p: &CscParams,
) -> f64 {
    let nf = resid_hat.len() as f64;
    // data and gradient terms via Parseval, from the spectra accumulated
    // during the coefficient update
    let data: f64 = input_hat
        .iter()
        .zip(resid_hat)
        .map(|(inp, r)| (r - inp).norm_sqr())
        .sum();
    let data = 0.5 * data / nf;
    let grad = 0.5 * p.tau_g * grad_acc / nf;
    let l1: f64 = b.iter().map(|x| x.mapv(f64::abs).sum()).sum();
    let mut inner = 0.0;
    let mut penalty = 0.0;
    for i in 0..m.len() {
        let diff = &m[i] - &b[i];
        // Theta = rho * (C - (M - B)) since C was already advanced this sweep
        let theta_i = (&c[i] - &diff).mapv(|v| v * p.rho);
        inner += (&theta_i * &diff).sum();
        penalty += diff.mapv(|v| v * v).sum();
    }
    data + p.lambda * l1 + inner + 0.5 * p.rho * penalty + grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use ndarray_linalg::Solve;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn random_slice(n1: usize, n2: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n1, n2), |_| rng.gen_range(-1.0..1.0))
    }

    fn random_dictionary(k: usize, r: usize, seed: u64) -> ConvDictionary {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let filters = (0..k)
            .map(|_| {
                let f = Array2::from_shape_fn((r, r), |_| rng.gen_range(-1.0..1.0));
                let norm: f64 = f.mapv(|v| v * v).sum();
                let norm = norm.sqrt();
                f.mapv(|v| v / norm)
            })
            .collect();
        ConvDictionary::new(filters).unwrap()
    }

    #[test]
    fn lowpass_split_partitions_exactly() {
        let s = random_slice(16, 16, 1);
        for lambda in [0.0, 0.5, 5.0, 50.0] {
            let (low, high) = lowpass_split(&s, lambda);
            let err = (&(&low + &high) - &s).mapv(f64::abs).sum();
            assert!(err < 1e-12, "partition error {err} at lambda {lambda}");
        }
        let (low, high) = lowpass_split(&s, 0.0);
        assert_eq!(low, s);
        assert_eq!(high.sum(), 0.0);
    }

    #[test]
    fn lowpass_split_constant_slice_has_no_high_part() {
        let s = Array2::from_elem((12, 12), 3.7);
        let (_, high) = lowpass_split(&s, 5.0);
        assert!(high.mapv(f64::abs).sum() < 1e-10);
    }

    #[test]
    fn lowpass_split_matches_dense_tikhonov_solve() {
        // dense oracle: (I + lambda (G0^T G0 + G1^T G1)) l = s over vectorized pixels
        let (n1, n2) = (16, 16);
        let n = n1 * n2;
        let s = random_slice(n1, n2, 3);
        let lambda = 5.0;
        let mut a = Array2::<f64>::eye(n);
        let idx = |i: usize, j: usize| i * n2 + j;
        for i in 0..n1 {
            for j in 0..n2 {
                // rows of G0: l[(i+1) mod n1][j] - l[i][j]; of G1 along columns
                for (p, q) in [(idx((i + 1) % n1, j), idx(i, j)), (idx(i, (j + 1) % n2), idx(i, j))]
                {
                    a[(p, p)] += lambda;
                    a[(q, q)] += lambda;
                    a[(p, q)] -= lambda;
                    a[(q, p)] -= lambda;
                }
            }
        }
        let rhs = ndarray::Array1::from_shape_fn(n, |t| s[(t / n2, t % n2)]);
        let sol = a.solve(&rhs).unwrap();
        let (low, _) = lowpass_split(&s, lambda);
        for i in 0..n1 {
            for j in 0..n2 {
                assert!((low[(i, j)] - sol[idx(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lowpass_energy_decreases_with_lambda() {
        let s = random_slice(16, 16, 4);
        let g_energy = |m: &Array2<f64>| {
            let (n1, n2) = m.dim();
            let mut e = 0.0;
            for i in 0..n1 {
                for j in 0..n2 {
                    e += (m[((i + 1) % n1, j)] - m[(i, j)]).powi(2);
                }
            }
            e
        };
        let mut prev = f64::INFINITY;
        for lambda in [0.1, 1.0, 10.0, 100.0] {
            let (low, _) = lowpass_split(&s, lambda);
            let e = g_energy(&low);
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn reconstruct_zero_and_delta() {
        let d = random_dictionary(3, 4, 5);
        let zero = FeatureMapStack::new(vec![Array2::zeros((10, 10)); 3]).unwrap();
        assert_eq!(reconstruct(&d, &zero).unwrap().sum(), 0.0);

        let delta = ConvDictionary::delta(3);
        let m = random_slice(10, 10, 6);
        let stack = FeatureMapStack::new(vec![m.clone()]).unwrap();
        let out = reconstruct(&delta, &stack).unwrap();
        assert!((&out - &m).mapv(f64::abs).sum() < 1e-10);
    }

    #[test]
    fn reconstruct_matches_spatial_circular_convolution() {
        let d = random_dictionary(2, 3, 7);
        let maps: Vec<_> = (0..2).map(|i| random_slice(8, 9, 20 + i)).collect();
        let stack = FeatureMapStack::new(maps.clone()).unwrap();
        let out = reconstruct(&d, &stack).unwrap();

        let (n1, n2) = (8, 9);
        let mut oracle = Array2::<f64>::zeros((n1, n2));
        for (f, m) in d.filters().iter().zip(&maps) {
            for i in 0..n1 {
                for j in 0..n2 {
                    for a in 0..3 {
                        for b in 0..3 {
                            let src = ((i + n1 - a) % n1, (j + n2 - b) % n2);
                            oracle[(i, j)] += f[(a, b)] * m[src];
                        }
                    }
                }
            }
        }
        assert!((&out - &oracle).mapv(f64::abs).sum() < 1e-10);
    }

    #[test]
    fn reconstruct_is_linear_in_maps() {
        let d = random_dictionary(3, 3, 9);
        let m1: Vec<_> = (0..3).map(|i| random_slice(8, 8, 30 + i)).collect();
        let m2: Vec<_> = (0..3).map(|i| random_slice(8, 8, 40 + i)).collect();
        let a = 2.5;
        let combo: Vec<_> = m1
            .iter()
            .zip(&m2)
            .map(|(x, y)| x.mapv(|v| a * v) + y)
            .collect();
        let lhs = reconstruct(&d, &FeatureMapStack::new(combo).unwrap()).unwrap();
        let r1 = reconstruct(&d, &FeatureMapStack::new(m1).unwrap()).unwrap();
        let r2 = reconstruct(&d, &FeatureMapStack::new(m2).unwrap()).unwrap();
        let rhs = r1.mapv(|v| a * v) + &r2;
        assert!((&lhs - &rhs).mapv(f64::abs).sum() < 1e-12);
    }

    #[test]
    fn delta_dictionary_converges_to_soft_threshold() {
        let d = ConvDictionary::delta(1);
        let input = random_slice(12, 12, 11);
        let p = CscParams {
            lambda: 0.3,
            rho: 1.0,
            tau_g: 0.0,
            inner_iters: 200,
            tol: 1e-12,
            input_scale: 1.0,
        };
        let sol = cbpdn_gr_solve(&d, &input, &p).unwrap();
        let oracle = soft_threshold_matrix(&input, p.lambda);
        let err = (&sol.maps.maps()[0] - &oracle).mapv(f64::abs).sum();
        assert!(err < 1e-6, "delta oracle error {err}");
    }

    #[test]
    fn huge_lambda_gives_zero_maps() {
        let d = random_dictionary(3, 4, 13);
        let input = random_slice(16, 16, 14);
        let p = CscParams {
            lambda: 1e6,
            rho: 1.0,
            tau_g: 0.0,
            inner_iters: 50,
            tol: 1e-10,
            input_scale: 1.0,
        };
        let sol = cbpdn_gr_solve(&d, &input, &p).unwrap();
        assert_eq!(sol.maps.l1_norm(), 0.0);
    }

    #[test]
    fn filter_larger_than_slice_rejected() {
        let d = random_dictionary(1, 8, 15);
        let input = random_slice(4, 4, 16);
        assert!(cbpdn_gr_solve(&d, &input, &CscParams::default()).is_err());
    }

    #[test]
    fn sherman_morrison_matches_dense_solve_per_frequency() {
        // residual check of the M-update linear system at every frequency
        let k = 3;
        let d = random_dictionary(k, 4, 17);
        let input = random_slice(16, 16, 18);
        let p = CscParams {
            lambda: 0.1,
            rho: 0.7,
            tau_g: 0.06,
            inner_iters: 1,
            tol: 1e-12,
            input_scale: 1.0,
        };
        // one sweep from zero state: rhs is exactly D^H input_hat
        let df = DictFreq::new(&d, input.dim()).unwrap();
        let sol = cbpdn_gr_solve_freq(&df, &input, &p).unwrap();
        // recover M from the sweep: with B=C=0 the B-update gives
        // B = soft(M, lambda/rho), so rebuild M via the same path instead:
        let input_hat = fft2_real(&input);
        let w = GradientFilters::freq_weights(16, 16);
        let mut max_rel = 0.0f64;
        for u in 0..16 {
            for v in 0..16 {
                let dvec: Vec<Complex64> = df.d_hat.iter().map(|s| s[(u, v)]).collect();
                let af = p.rho + p.tau_g * w[(u, v)];
                let rhs: Vec<Complex64> =
                    dvec.iter().map(|dh| dh.conj() * input_hat[(u, v)]).collect();
                // dense K x K solve of (a I + conj(d) d^T) x = rhs
                let mut a = Array2::<Complex64>::zeros((k, k));
                for i in 0..k {
                    for j in 0..k {
                        a[(i, j)] = dvec[i].conj() * dvec[j];
                    }
                    a[(i, i)] += Complex64::new(af, 0.0);
                }
                let rhs_v = ndarray::Array1::from_vec(rhs.clone());
                let dense = a.solve(&rhs_v).unwrap();
                // Sherman-Morrison path
                let dd: f64 = dvec.iter().map(|c| c.norm_sqr()).sum();
                let s: Complex64 = dvec.iter().zip(&rhs).map(|(dh, r)| dh * r).sum();
                for i in 0..k {
                    let sm = rhs[i] / af - dvec[i].conj() * s / (af * (af + dd));
                    let rel = (sm - dense[i]).norm() / dense[i].norm().max(1e-300);
                    max_rel = max_rel.max(rel);
                }
            }
        }
        assert!(max_rel < 1e-10, "Sherman-Morrison residual {max_rel}");
        assert!(sol.iters >= 1);
    }

    #[test]
    fn primal_residual_converges_on_well_conditioned_input() {
        let d = random_dictionary(4, 4, 19);
        let input = random_slice(16, 16, 23);
        let p = CscParams {
            lambda: 0.05,
            rho: 1.0,
            tau_g: 0.01,
            inner_iters: 300,
            tol: 1e-6,
            input_scale: 1.0,
        };
        let sol = cbpdn_gr_solve(&d, &input, &p).unwrap();
        assert!(
            *sol.primal_residual.last().unwrap() < 1e-6,
            "final residual {}",
            sol.primal_residual.last().unwrap()
        );
    }
}
