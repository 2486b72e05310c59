//! RF power-spectrum UAV classification with post-hoc attribution and a
//! continuous-authentication session engine.
//!
//! Pipeline: segment pairs ([`rf_ingest`]) → stitched spectra
//! ([`spectral`]) → optional PCA ([`pca`]) → feed-forward classifier
//! ([`mlp`], [`training`]) → explanations ([`explain`]) and periodic
//! re-verification ([`zta`]).

pub mod error;
pub mod explain;
pub mod mlp;
pub mod pca;
pub mod rf_ingest;
pub mod seed;
pub mod spectral;
pub mod training;
pub mod zta;

pub use error::{Error, Result};
pub use mlp::{MlpModel, Prediction, Predictor};
pub use pca::PcaModel;
pub use rf_ingest::{ClassLabel, LabeledSpectrumSet, RFSegment, ReceiverHalf, SegmentPair};
pub use training::{evaluate_cv, train, EvalReport, TrainConfig};
