//! Thin wrappers over rustfft with the conventions used on the circle grid.
//!
//! Samples live at `theta_k = 2 pi k / N`. The Fourier coefficient at frequency
//! `n` is `c_n = (1/N) sum_k f_k e^{-i n theta_k}` and frequencies are read in
//! the symmetric window `-N/2 <= n < N/2`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{NlftError, Result};

pub fn check_grid(size: usize) -> Result<()> {
    if size >= 2 && size.is_power_of_two() {
        Ok(())
    } else {
        Err(NlftError::InvalidGrid(size))
    }
}

/// Grid samples to Fourier coefficients (normalized by `1/N`), in FFT order.
pub fn analysis(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Fourier coefficients in FFT order to grid samples.
pub fn synthesis(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Signed frequency of FFT bin `k` on a grid of size `n`.
#[inline]
pub fn frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT bin holding frequency `freq` on a grid of size `n`.
#[inline]
pub fn bin(freq: i64, n: usize) -> usize {
    freq.rem_euclid(n as i64) as usize
}

/// `e^{2 pi i k / n}` for `k in 0..n`, computed from the angle directly.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analysis_inverts_synthesis() {
        let c: Vec<Complex64> = (0..16).map(|k| Complex64::new(k as f64, -(k as f64) / 3.0)).collect();
        let back = analysis(&synthesis(&c));
        for (x, y) in c.iter().zip(&back) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn frequency_window() {
        assert_eq!(frequency(0, 8), 0);
        assert_eq!(frequency(3, 8), 3);
        assert_eq!(frequency(4, 8), -4);
        assert_eq!(frequency(7, 8), -1);
        assert_eq!(bin(-1, 8), 7);
        assert_eq!(bin(9, 8), 1);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(check_grid(0).is_err());
        assert!(check_grid(1).is_err());
        assert!(check_grid(12).is_err());
        assert!(check_grid(4096).is_ok());
    }
}
