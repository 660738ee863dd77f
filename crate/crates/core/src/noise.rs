//! Deterministic synthetic noise generators for the benchmark harness and
//! property tests.
//!
//! Level semantics per kind: Gaussian-family kinds (`gaussian`, `speckle`,
//! `circular_pattern`, `stripe`, `grid`, `channel_replicated_gaussian`) take
//! an 8-bit-scale sigma (`level/255` in image units); `uniform` takes the
//! half-range directly in image units; density kinds (`salt_pepper`,
//! `impulse`, `bernoulli`) take a fraction in (0,1); `poisson` takes the
//! event rate lambda.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::image_buf::ImageBuf;
use crate::rng::RngState;
use crate::scalar::Scalar;

/// Synthetic noise family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Gaussian,
    Uniform,
    SaltPepper,
    Impulse,
    Bernoulli,
    Poisson,
    Speckle,
    CircularPattern,
    Stripe,
    Grid,
    ChannelReplicatedGaussian,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 11] = [
        NoiseKind::Gaussian,
        NoiseKind::Uniform,
        NoiseKind::SaltPepper,
        NoiseKind::Impulse,
        NoiseKind::Bernoulli,
        NoiseKind::Poisson,
        NoiseKind::Speckle,
        NoiseKind::CircularPattern,
        NoiseKind::Stripe,
        NoiseKind::Grid,
        NoiseKind::ChannelReplicatedGaussian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Uniform => "uniform",
            NoiseKind::SaltPepper => "salt_pepper",
            NoiseKind::Impulse => "impulse",
            NoiseKind::Bernoulli => "bernoulli",
            NoiseKind::Poisson => "poisson",
            NoiseKind::Speckle => "speckle",
            NoiseKind::CircularPattern => "circular_pattern",
            NoiseKind::Stripe => "stripe",
            NoiseKind::Grid => "grid",
            NoiseKind::ChannelReplicatedGaussian => "channel_replicated_gaussian",
        }
    }

    /// True for the density-parameterized kinds (level must be in (0,1)).
    pub fn is_density(&self) -> bool {
        matches!(
            self,
            NoiseKind::SaltPepper | NoiseKind::Impulse | NoiseKind::Bernoulli
        )
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown noise kind `{s}`")))
    }
}

/// A noise recipe: kind, scalar level, RNG state.
#[derive(Clone, Copy, Debug)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub rng: RngState,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, level: f64, rng: RngState) -> Self {
        NoiseSpec { kind, level, rng }
    }

    fn validate(&self) -> Result<()> {
        if !(self.level > 0.0) {
            return Err(Error::InvalidParam(format!(
                "noise level must be > 0, got {}",
                self.level
            )));
        }
        if self.kind.is_density() && self.level >= 1.0 {
            return Err(Error::InvalidParam(format!(
                "{} density must be in (0,1), got {}",
                self.kind, self.level
            )));
        }
        Ok(())
    }
}

/// Arithmetic mean over all samples (the brightness used by strategy
/// selection).
pub fn mean_brightness<T: Scalar>(img: &ImageBuf<T>) -> f64 {
    img.mean()
}

/// Applies the noise described by `spec` to a clean image in `[0,1]`.
/// Values may leave `[0,1]`; clamping happens only at export.
pub fn apply_noise<T: Scalar>(clean: &ImageBuf<T>, spec: &NoiseSpec) -> Result<ImageBuf<T>> {
    spec.validate()?;
    let mut rng = spec.rng.rng();
    let out = match spec.kind {
        NoiseKind::Gaussian => {
            let normal = Normal::new(0.0, spec.level / 255.0).unwrap();
            clean.map(|v| v + T::from_f64_c(normal.sample(&mut rng)))
        }
        NoiseKind::Uniform => {
            let x = spec.level;
            clean.map(|v| v + T::from_f64_c(rng.random_range(-x..=x)))
        }
        NoiseKind::SaltPepper => {
            // Whole pixels, all channels together.
            let mut out = clean.clone();
            let n_pixels = clean.plane_len();
            let k = (spec.level * n_pixels as f64).round() as usize;
            for i in rand::seq::index::sample(&mut rng, n_pixels, k) {
                let v = if rng.random::<f64>() < 0.5 {
                    T::zero()
                } else {
                    T::one()
                };
                for c in 0..out.channels() {
                    out.plane_mut(c)[i] = v;
                }
            }
            out
        }
        NoiseKind::Impulse => {
            let mut out = clean.clone();
            let n = clean.len();
            let k = (spec.level * n as f64).round() as usize;
            for i in rand::seq::index::sample(&mut rng, n, k) {
                out.data_mut()[i] = T::from_f64_c(rng.random::<f64>());
            }
            out
        }
        NoiseKind::Bernoulli => {
            let mut out = clean.clone();
            let n = clean.len();
            let k = (spec.level * n as f64).round() as usize;
            for i in rand::seq::index::sample(&mut rng, n, k) {
                out.data_mut()[i] = T::zero();
            }
            out
        }
        NoiseKind::Poisson => {
            let lambda = spec.level;
            clean.map(|v| {
                let mean = v.as_f64().max(0.0) * lambda;
                if mean > 0.0 {
                    let k = Poisson::new(mean).unwrap().sample(&mut rng);
                    T::from_f64_c(k / lambda)
                } else {
                    T::zero()
                }
            })
        }
        NoiseKind::Speckle => {
            let normal = Normal::new(0.0, spec.level / 255.0).unwrap();
            clean.map(|v| v + v * T::from_f64_c(normal.sample(&mut rng)))
        }
        NoiseKind::CircularPattern => {
            let sigma = spec.level / 255.0;
            let mut out = clean.clone();
            for c in 0..clean.channels() {
                let field = ring_correlated_field(clean.height(), clean.width(), sigma, &mut rng);
                let plane = out.plane_mut(c);
                for (p, f) in plane.iter_mut().zip(field.iter()) {
                    *p = *p + T::from_f64_c(*f);
                }
            }
            out
        }
        NoiseKind::Stripe => {
            let amp = spec.level / 255.0;
            let mut out = clean.clone();
            for c in 0..clean.channels() {
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                add_stripe(&mut out, c, stripe_angle(c), amp, phase);
            }
            out
        }
        NoiseKind::Grid => {
            let amp = spec.level / 255.0;
            let mut out = clean.clone();
            for c in 0..clean.channels() {
                let phase_a = rng.random_range(0.0..std::f64::consts::TAU);
                let phase_b = rng.random_range(0.0..std::f64::consts::TAU);
                add_stripe(&mut out, c, stripe_angle(c), amp, phase_a);
                add_stripe(&mut out, c, stripe_angle(c) + 90f64.to_radians(), amp, phase_b);
            }
            out
        }
        NoiseKind::ChannelReplicatedGaussian => {
            if clean.channels() != 3 {
                return Err(Error::InvalidParam(
                    "channel_replicated_gaussian needs a 3-channel image".into(),
                ));
            }
            let normal = Normal::new(0.0, spec.level / 255.0).unwrap();
            let shared: Vec<f64> = (0..clean.plane_len())
                .map(|_| normal.sample(&mut rng))
                .collect();
            let mut out = clean.clone();
            for c in 0..3 {
                let plane = out.plane_mut(c);
                for (p, n) in plane.iter_mut().zip(shared.iter()) {
                    *p = *p + T::from_f64_c(*n);
                }
            }
            out
        }
    };
    Ok(out)
}

/// Stripe angles per channel: 0, 30, 60 degrees for R,G,B.
fn stripe_angle(channel: usize) -> f64 {
    (30.0 * (channel % 3) as f64).to_radians()
}

/// Sinusoid with period 8 px along the direction `angle`.
fn add_stripe<T: Scalar>(img: &mut ImageBuf<T>, channel: usize, angle: f64, amp: f64, phase: f64) {
    const PERIOD: f64 = 8.0;
    let (h, w) = (img.height(), img.width());
    let (sin_a, cos_a) = angle.sin_cos();
    let plane = img.plane_mut(channel);
    for r in 0..h {
        for c in 0..w {
            let t = (cos_a * c as f64 + sin_a * r as f64) * std::f64::consts::TAU / PERIOD + phase;
            plane[r * w + c] = plane[r * w + c] + T::from_f64_c(amp * t.sin());
        }
    }
}

/// i.i.d. Gaussian field convolved with a unit-l2 ring kernel (radius 4,
/// thickness 1) under periodic boundary, rescaled so the sample std equals
/// `sigma`. The ring autocorrelation is what the frequency-domain matching
/// and pixel-shuffle stages are built to break.
fn ring_correlated_field(h: usize, w: usize, sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    const RADIUS: f64 = 4.0;
    let normal = Normal::new(0.0, sigma).unwrap();
    let white: Vec<f64> = (0..h * w).map(|_| normal.sample(rng)).collect();

    let mut offsets = Vec::new();
    let r_i = RADIUS.ceil() as i64;
    for dy in -r_i..=r_i {
        for dx in -r_i..=r_i {
            let d = ((dy * dy + dx * dx) as f64).sqrt();
            if (d - RADIUS).abs() <= 0.5 {
                offsets.push((dy, dx));
            }
        }
    }
    let norm = 1.0 / (offsets.len() as f64).sqrt();

    let mut field = vec![0.0f64; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for &(dy, dx) in &offsets {
                let rr = (r as i64 + dy).rem_euclid(h as i64) as usize;
                let cc = (c as i64 + dx).rem_euclid(w as i64) as usize;
                acc += white[rr * w + cc];
            }
            field[r * w + c] = acc * norm;
        }
    }

    let mean = field.iter().sum::<f64>() / field.len() as f64;
    let var = field.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / field.len() as f64;
    if var > 0.0 {
        let gain = sigma / var.sqrt();
        for v in &mut field {
            *v = (*v - mean) * gain;
        }
    }
    field
}
