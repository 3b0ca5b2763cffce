//! Comparison lab for a hybrid quantum-classical classifier ("QBM") and a
//! classical restricted Boltzmann machine baseline ("CBM") on PCA-reduced
//! binary image data.
//!
//! The crate covers the full pipeline: IDX ingestion, PCA to four features,
//! an exact state-vector circuit simulator with parameter-shift gradients,
//! the two models, gradient-saliency and exact-Shapley attribution with
//! entropy summaries, and an exact t-SNE of the quantum latent space.
//!
//! All numeric code is generic over [`scalar::Real`] (`f32` or `f64`);
//! concrete `f64` aliases live at the crate root.

// Index loops mirror the matrix math; negated comparisons are NaN guards.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod cbm;
pub mod error;
pub mod fingerprint;
pub mod ingest;
pub mod linalg;
pub mod matrix;
pub mod pca;
pub mod qbm;
pub mod qgrad;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod synth;
pub mod tsne;
pub mod xai;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Real;

/// Concrete `f64` instantiations used by the CLI and most tests.
pub type StateVector64 = qsim::StateVector<f64>;
pub type CircuitParams64 = qsim::CircuitParams<f64>;
pub type ExpectationVector64 = qsim::ExpectationVector<f64>;
pub type PcaModel64 = pca::PcaModel<f64>;
pub type ReducedDataset64 = pca::ReducedDataset<f64>;
pub type BinaryDataset64 = pca::BinaryDataset<f64>;
pub type RawDataset64 = ingest::RawDataset<f64>;
pub type QbmModel64 = qbm::QbmModel<f64>;
pub type QbmConfig64 = qbm::QbmConfig<f64>;
pub type TrainReport64 = qbm::TrainReport<f64>;
pub type RbmParams64 = cbm::RbmParams<f64>;
pub type RbmReadout64 = cbm::RbmReadout<f64>;
pub type CbmConfig64 = cbm::CbmConfig<f64>;
pub type AttributionReport64 = xai::AttributionReport<f64>;
pub type TsneConfig64 = tsne::TsneConfig<f64>;
pub type Embedding2D64 = tsne::Embedding2D<f64>;
