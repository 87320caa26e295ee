//! Low-rank tensor completion with a convolutional sparse coding prior.
//!
//! The crate provides the third-order tensor algebra (unfoldings, the
//! t-product and t-SVD), proximal operators, quality metrics, mask and
//! tensor I/O, a CSC denoiser with dictionary learning, and the outer ADMM
//! completion algorithms.

pub mod csc;
pub mod error;
pub mod fft;
pub mod io;
pub mod lrtc;
pub mod mask;
pub mod metrics;
pub mod prox;
pub mod tensor;
pub mod tsvd;

pub use csc::{CscDenoiser, CscParams, ConvDictionary, TrainConfig, TrainResult};
pub use error::{CoreError, Result};
pub use lrtc::{CompletionResult, LrtcConfig, Method, Observation, TraceRow};
pub use mask::ObservationMask;
pub use metrics::MetricReport;
pub use tensor::{ComplexTensor3, Tensor3};
