//! Detection of machinery noise in seismograms.
//!
//! The pipeline turns a [`TimeSeries`](timeseries::TimeSeries) into a
//! Hamming-windowed PSD [`Spectrogram`](spectrogram::Spectrogram), slices a
//! frequency band out of every time bin, normalises and scales the resulting
//! patterns, and classifies them with a kernel SVM trained by SMO. Runs of
//! positive bins become UTC activity intervals.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

// `!(x > 0)`-style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod detect;
pub mod error;
pub mod features;
pub mod fft;
pub mod modelselect;
pub mod scalar;
pub mod sparse;
pub mod spectrogram;
pub mod svm;
pub mod synthgen;
pub mod time;
pub mod timeseries;

pub use error::{Error, Result};
pub use features::{BandSelect, Label};
pub use scalar::Scalar;
pub use time::UtcTime;

pub type TimeSeriesF64 = timeseries::TimeSeries<f64>;
pub type TimeSeriesF32 = timeseries::TimeSeries<f32>;
pub type SpectrogramF64 = spectrogram::Spectrogram<f64>;
pub type SpectrogramF32 = spectrogram::Spectrogram<f32>;
pub type FeatureMatrixF64 = features::FeatureMatrix<f64>;
pub type FeatureMatrixF32 = features::FeatureMatrix<f32>;
pub type ScaleRangeF64 = features::ScaleRange<f64>;
pub type ScaleRangeF32 = features::ScaleRange<f32>;
pub type KernelSpecF64 = svm::KernelSpec<f64>;
pub type KernelSpecF32 = svm::KernelSpec<f32>;
pub type TrainConfigF64 = svm::TrainConfig<f64>;
pub type TrainConfigF32 = svm::TrainConfig<f32>;
pub type SvmModelF64 = svm::SvmModel<f64>;
pub type SvmModelF32 = svm::SvmModel<f32>;
