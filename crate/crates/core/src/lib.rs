//! Transforms arbitrary image noise toward a target Gaussian distribution so a
//! single fixed-level Gaussian denoiser can remove it.
//!
//! The library is organized around one idea: the distribution of a noise
//! residual can be reshaped by interval-based histogram matching (globally,
//! per block, or on Fourier coefficients), while pixel-shuffle downsampling
//! and intrapatch channel permutation break the spatial and channel
//! correlations that distribution matching alone cannot touch. A
//! transform/denoise cycle then refines the noise estimate over a few
//! iterations.
//!
//! All numeric code is generic over the sample type via [`Scalar`]
//! (`f32` or `f64`); the [`Image`] alias at the crate root fixes the
//! double-precision default used by the pipeline and the CLI.

pub mod config;
pub mod denoise;
pub mod error;
mod fourier;
pub mod histmatch;
pub mod image_buf;
pub mod io;
pub mod metrics;
pub mod noise;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod shuffle;
pub mod smoothing;
pub mod texture;

pub use error::{Error, Result};
pub use image_buf::{merge_channels, split_channels, ImageBuf, NoiseField};
pub use rng::RngState;
pub use scalar::Scalar;

/// Default double-precision raster; this is what the pipeline and CLI use.
pub type Image = ImageBuf<f64>;
/// Single-precision raster for memory-constrained callers.
pub type Image32 = ImageBuf<f32>;
