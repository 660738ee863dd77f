//! Planar floating-point rasters.
//!
//! One buffer type carries both images (nominal range `[0,1]`, values outside
//! are permitted until export) and signed noise residuals; [`NoiseField`] is
//! an alias documenting the latter use. Samples are stored plane-major
//! (channel, then row, then column), matching the raw float container layout.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Planar raster of `channels` × `height` × `width` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuf<T> {
    data: Vec<T>,
    height: usize,
    width: usize,
    channels: usize,
}

/// Signed residual raster with the same shape contract as the image it pairs
/// with (holds noise estimates, transformed noise, textures, level maps).
pub type NoiseField<T> = ImageBuf<T>;

impl<T: Scalar> ImageBuf<T> {
    /// All-zero raster. `channels` must be 1 or 3 and both dims non-zero.
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self::filled(height, width, channels, T::zero())
    }

    /// Constant-valued raster.
    pub fn filled(height: usize, width: usize, channels: usize, value: T) -> Self {
        assert!(height > 0 && width > 0, "zero-sized image");
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        ImageBuf {
            data: vec![value; height * width * channels],
            height,
            width,
            channels,
        }
    }

    /// Wraps an existing plane-major sample vector.
    pub fn from_vec(data: Vec<T>, height: usize, width: usize, channels: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParam("zero-sized image".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParam(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "buffer has {} samples, shape {}x{}x{} needs {}",
                data.len(),
                height,
                width,
                channels,
                height * width * channels
            )));
        }
        Ok(ImageBuf {
            data,
            height,
            width,
            channels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Samples per plane.
    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    /// Total sample count.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn plane(&self, channel: usize) -> &[T] {
        let n = self.plane_len();
        &self.data[channel * n..(channel + 1) * n]
    }

    pub fn plane_mut(&mut self, channel: usize) -> &mut [T] {
        let n = self.plane_len();
        &mut self.data[channel * n..(channel + 1) * n]
    }

    #[inline]
    pub fn idx(&self, channel: usize, row: usize, col: usize) -> usize {
        (channel * self.height + row) * self.width + col
    }

    #[inline]
    pub fn get(&self, channel: usize, row: usize, col: usize) -> T {
        self.data[self.idx(channel, row, col)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, row: usize, col: usize, value: T) {
        let i = self.idx(channel, row, col);
        self.data[i] = value;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.height == other.height
            && self.width == other.width
            && self.channels == other.channels
    }

    /// Shape check that reports both shapes on failure.
    pub fn require_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{what}: {}x{}x{} vs {}x{}x{}",
                self.height, self.width, self.channels, other.height, other.width, other.channels
            )))
        }
    }

    /// New raster of the same shape filled with `value`.
    pub fn like(&self, value: T) -> Self {
        ImageBuf {
            data: vec![value; self.data.len()],
            height: self.height,
            width: self.width,
            channels: self.channels,
        }
    }

    /// Elementwise map.
    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        ImageBuf {
            data: self.data.iter().map(|&v| f(v)).collect(),
            height: self.height,
            width: self.width,
            channels: self.channels,
        }
    }

    /// Elementwise combination of two same-shape rasters.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.require_same_shape(other, "zip_map")?;
        Ok(ImageBuf {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
            height: self.height,
            width: self.width,
            channels: self.channels,
        })
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    /// Arithmetic mean over all samples.
    pub fn mean(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v.as_f64()).sum();
        sum / self.data.len() as f64
    }

    /// Sample standard deviation over all samples (population form).
    pub fn std(&self) -> f64 {
        let mean = self.mean();
        let var: f64 = self
            .data
            .iter()
            .map(|v| {
                let d = v.as_f64() - mean;
                d * d
            })
            .sum::<f64>()
            / self.data.len() as f64;
        var.sqrt()
    }

    /// True when every sample is finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Splits a raster into single-channel planes, R,G,B order for color input.
pub fn split_channels<T: Scalar>(img: &ImageBuf<T>) -> Vec<ImageBuf<T>> {
    (0..img.channels())
        .map(|c| {
            ImageBuf::from_vec(img.plane(c).to_vec(), img.height(), img.width(), 1)
                .expect("plane has the right length")
        })
        .collect()
}

/// Reassembles channel planes split by [`split_channels`].
pub fn merge_channels<T: Scalar>(planes: &[ImageBuf<T>]) -> Result<ImageBuf<T>> {
    if planes.is_empty() {
        return Err(Error::InvalidParam("no planes to merge".into()));
    }
    let (h, w) = (planes[0].height(), planes[0].width());
    for p in planes {
        if p.channels() != 1 {
            return Err(Error::InvalidParam("merge expects single-channel planes".into()));
        }
        if p.height() != h || p.width() != w {
            return Err(Error::ShapeMismatch("merge planes differ in size".into()));
        }
    }
    let mut data = Vec::with_capacity(h * w * planes.len());
    for p in planes {
        data.extend_from_slice(p.data());
    }
    ImageBuf::from_vec(data, h, w, planes.len())
}
