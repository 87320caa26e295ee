//! Experiment infrastructure for the completion toolkit: file I/O, seeded
//! mask generation, configuration layering, and CSV reporting.

pub mod config;
pub mod experiment;
pub mod io;

pub use config::{default_config, Overrides};
pub use experiment::{run_experiment, sweep, ExperimentOutcome, ExperimentSpec};
pub use lrtc_core::mask::{generate_mask, generate_mask_per_pixel};
