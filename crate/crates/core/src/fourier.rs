//! 2-D discrete Fourier transform helpers shared by frequency-domain
//! histogram matching and the spectral-flatness metric.
//!
//! Forward transform is unnormalized; the inverse carries the 1/(h*w)
//! factor, so `ifft2(fft2(x)) == x` up to rounding.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Scalar;

/// Row-major 2-D FFT of a real plane.
pub(crate) fn fft2<T: Scalar>(plane: &[T], h: usize, w: usize) -> Vec<Complex<T>> {
    debug_assert_eq!(plane.len(), h * w);
    let mut buf: Vec<Complex<T>> = plane.iter().map(|&v| Complex::new(v, T::zero())).collect();
    transform2(&mut buf, h, w, false);
    buf
}

/// Row-major inverse 2-D FFT, normalized by 1/(h*w).
pub(crate) fn ifft2<T: Scalar>(freq: &[Complex<T>], h: usize, w: usize) -> Vec<Complex<T>> {
    debug_assert_eq!(freq.len(), h * w);
    let mut buf = freq.to_vec();
    transform2(&mut buf, h, w, true);
    let scale = T::one() / T::from_f64_c((h * w) as f64);
    for v in &mut buf {
        *v = *v * scale;
    }
    buf
}

fn transform2<T: Scalar>(buf: &mut [Complex<T>], h: usize, w: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };

    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }

    let mut column = vec![Complex::new(T::zero(), T::zero()); h];
    for c in 0..w {
        for r in 0..h {
            column[r] = buf[r * w + c];
        }
        col_fft.process(&mut column);
        for r in 0..h {
            buf[r * w + c] = column[r];
        }
    }
}
