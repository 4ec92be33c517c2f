//! Laurent polynomials with dense complex coefficients, and their samples on
//! uniform grids of the unit circle.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlftError, Result};
use crate::fft;

/// Coefficients at or below this magnitude are treated as exact zeros when
/// trimming. Only true zeros reach it, so degree bookkeeping stays honest.
pub const TRIM_THRESHOLD: f64 = 1e-300;

/// `sum_{n=lo}^{hi} c_n z^n` with `c_lo` and `c_hi` nonzero.
///
/// The zero polynomial is the unique value with empty coefficients and `lo = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c z^k`.
    pub fn monomial(c: Complex64, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    /// Builds from `(power, coefficient)` pairs; repeated powers accumulate.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::new(lo, coeffs)
    }

    fn trim(&mut self) {
        let first = self.coeffs.iter().position(|c| c.norm() > TRIM_THRESHOLD);
        match first {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(start) => {
                let end = self.coeffs.iter().rposition(|c| c.norm() > TRIM_THRESHOLD).unwrap();
                self.coeffs.truncate(end + 1);
                self.coeffs.drain(..start);
                self.lo += start as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest power with a nonzero coefficient (0 for the zero polynomial).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest power with a nonzero coefficient (`lo - 1` for the zero polynomial).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let idx = n - self.lo;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `max(|lo|, |hi|) + 1`; zero for the zero polynomial.
    ///
    /// A grid of size `g >= 2 * bandwidth` holds every power in its symmetric
    /// frequency window, so samples determine the coefficients.
    pub fn bandwidth(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as usize + 1
        }
    }

    /// Smallest power of two that is at least `4 * bandwidth` (and at least 4).
    pub fn default_grid(&self) -> usize {
        (4 * self.bandwidth()).max(4).next_power_of_two()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `p(z) = conj(p(1/conj(z)))`: coefficient at `n` becomes `conj(c_{-n})`.
    pub fn star(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        LaurentPoly { lo: -self.hi(), coeffs }
    }

    /// `z^k p`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self + alpha z^k other`, in one pass.
    pub fn add_scaled_shifted(&self, alpha: Complex64, k: i64, other: &LaurentPoly) -> Self {
        if other.is_zero() || alpha == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(alpha).shift(k);
        }
        let olo = other.lo + k;
        let ohi = other.hi() + k;
        let lo = self.lo.min(olo);
        let hi = self.hi().max(ohi);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        let s_off = (self.lo - lo) as usize;
        coeffs[s_off..s_off + self.coeffs.len()].copy_from_slice(&self.coeffs);
        let o_off = (olo - lo) as usize;
        for (dst, c) in coeffs[o_off..o_off + other.coeffs.len()].iter_mut().zip(&other.coeffs) {
            *dst += alpha * c;
        }
        Self::new(lo, coeffs)
    }

    /// Horner evaluation at a nonzero point (any point if `lo >= 0`).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo as i32)
    }

    /// Exact samples `p(e^{i theta_k})` on a grid of `size` points.
    ///
    /// Powers are folded modulo `size`, so the samples are exact for any
    /// size; use [`LaurentPoly::eval_grid`] when the samples must also
    /// determine the coefficients.
    pub fn sample_on_grid(&self, size: usize) -> Result<CircleGrid> {
        fft::check_grid(size)?;
        let mut bins = vec![Complex64::new(0.0, 0.0); size];
        for (i, c) in self.coeffs.iter().enumerate() {
            bins[fft::bin(self.lo + i as i64, size)] += c;
        }
        Ok(CircleGrid { values: fft::synthesis(&bins) })
    }

    /// Alias-free grid samples. Fails unless `size >= 2 * bandwidth`.
    pub fn eval_grid(&self, size: usize) -> Result<CircleGrid> {
        fft::check_grid(size)?;
        if size < 2 * self.bandwidth() {
            return Err(NlftError::Alias { grid: size, bandwidth: self.bandwidth() });
        }
        self.sample_on_grid(size)
    }

    /// Coefficients in `lo..=hi` read back from alias-free grid samples.
    pub fn from_grid_window(grid: &CircleGrid, lo: i64, hi: i64) -> Result<Self> {
        let n = grid.size();
        let half = (n / 2) as i64;
        if lo < -half || hi >= half {
            return Err(NlftError::Alias { grid: n, bandwidth: lo.unsigned_abs().max(hi.unsigned_abs()) as usize + 1 });
        }
        let c = fft::analysis(&grid.values);
        let coeffs = (lo..=hi).map(|k| c[fft::bin(k, n)]).collect();
        Ok(Self::new(lo, coeffs))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled_shifted(Complex64::new(1.0, 0.0), 0, rhs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled_shifted(Complex64::new(-1.0, 0.0), 0, rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    /// Direct convolution.
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (dst, b) in coeffs[i..].iter_mut().zip(&rhs.coeffs) {
                *dst += a * b;
            }
        }
        LaurentPoly::new(self.lo + rhs.lo, coeffs)
    }
}

/// Complex samples on `theta_k = 2 pi k / size`, `size` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    values: Vec<Complex64>,
}

impl CircleGrid {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        fft::check_grid(values.len())?;
        Ok(CircleGrid { values })
    }

    pub fn constant(size: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![c; size])
    }

    /// Samples `f(theta_k)`.
    pub fn from_fn(size: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        fft::check_grid(size)?;
        Ok(CircleGrid { values: (0..size).map(|k| f(theta(k, size))).collect() })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn theta(&self, k: usize) -> f64 {
        theta(k, self.size())
    }

    /// `e^{i theta_k}`.
    pub fn point(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(k))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CircleGrid {
        CircleGrid { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two grids of equal size.
    pub fn zip_with(&self, other: &CircleGrid, f: impl Fn(Complex64, Complex64) -> Complex64) -> CircleGrid {
        assert_eq!(self.size(), other.size(), "grid sizes differ");
        CircleGrid {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm distance to another grid of equal size.
    pub fn max_abs_diff(&self, other: &CircleGrid) -> f64 {
        assert_eq!(self.size(), other.size(), "grid sizes differ");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Fourier coefficients, FFT order, normalized by `1/size`.
    pub fn fourier_coeffs(&self) -> Vec<Complex64> {
        fft::analysis(&self.values)
    }
}

#[inline]
pub fn theta(k: usize, size: usize) -> f64 {
    TAU * k as f64 / size as f64
}
