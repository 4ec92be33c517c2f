//! Petals `q^(j)` with `b(q^(j)) = b_j`.
//!
//! The bumps are not analytic, so their petals are two-sided. They are
//! obtained from the half-line inverse applied to `z^M b_j`, whose negative
//! Fourier tail beyond `-M` is negligible, and shifted back by `M`.
//! All petals of a family are modulations of the first one:
//! `q^(j)_n = q^(0)_n e^{-i n phi_j}` rotates the transform by `phi_j`.

use num_complex::Complex64;
use serde::Serialize;

use super::bumps::BumpFamily;
use crate::error::Result;
use crate::exec::Execution;
use crate::fft;
use crate::inverse::inverse_halfline;
use crate::laurent::CircleGrid;
use crate::nlft::{ComplexSequence, GridNlft};

/// Allowed two-sided `l1` tail of the Fourier coefficients of `b_0` beyond `M`.
pub const HALF_LINE_TAIL: f64 = 1e-5;

const MAX_TAIL_GRID: usize = 1 << 22;

/// Smallest `K` with `sum_{|n| > K} |c_n| <= tol`, for coefficients in FFT
/// order. `None` if even the Nyquist bin exceeds `tol`.
pub fn tail_cutoff(coeffs: &[Complex64], tol: f64) -> Option<usize> {
    let n = coeffs.len();
    if n < 2 {
        return Some(0);
    }
    let half = n / 2;
    let mut tail = coeffs[half].norm();
    if tail > tol {
        return None;
    }
    for k in (1..half).rev() {
        let next = tail + coeffs[k].norm() + coeffs[n - k].norm();
        if next > tol {
            return Some(k);
        }
        tail = next;
    }
    Some(0)
}

/// Shift `M` making `z^M b_0` effectively analytic.
pub fn half_line_shift(fam: &BumpFamily) -> Result<usize> {
    if fam.delta() == 0.0 {
        return Ok(0);
    }
    let mut size = (1024 * fam.nu()).next_power_of_two();
    loop {
        let c = fam.sample(0, size)?.fourier_coeffs();
        if let Some(k) = tail_cutoff(&c, HALF_LINE_TAIL) {
            if k < size / 4 || size >= MAX_TAIL_GRID {
                return Ok(k.max(1));
            }
        }
        if size >= MAX_TAIL_GRID {
            return Ok(size / 2);
        }
        size *= 2;
    }
}

/// Grid used to invert `z^M b_j` for `2M` coefficients.
pub fn inversion_grid(fam: &BumpFamily, shift: usize) -> usize {
    (64 * fam.nu()).max(8 * shift).next_power_of_two()
}

/// `q^(j)` by direct inversion of `z^M b_j`, supported on `[1 - M, M]`.
pub fn petal_coeffs(fam: &BumpFamily, j: usize) -> Result<ComplexSequence> {
    let m = half_line_shift(fam)?;
    petal_with_shift(fam, j, m)
}

fn petal_with_shift(fam: &BumpFamily, j: usize, m: usize) -> Result<ComplexSequence> {
    if fam.delta() == 0.0 {
        return Ok(ComplexSequence::zero());
    }
    let size = inversion_grid(fam, m);
    let b = fam.sample(j, size)?;
    let roots = fft::roots_of_unity(size);
    let shifted = CircleGrid::new(
        b.values().iter().enumerate().map(|(k, v)| v * roots[(k * m) % size]).collect(),
    )?;
    Ok(inverse_halfline(&shifted, 2 * m)?.shifted(-(m as i64)))
}

/// The first petal and the data needed to produce the others.
#[derive(Debug, Clone)]
pub struct PetalFamily {
    pub base: ComplexSequence,
    pub shift: usize,
    pub inversion_grid: usize,
    nu: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PetalStats {
    pub shift: usize,
    pub inversion_grid: usize,
    pub l1: f64,
    pub l2_sq: f64,
    /// `||q||^2 / (delta^2 / nu)`.
    pub l2_ratio: f64,
    /// `sup |b(q^(0)) - b_0|` on the family grid.
    pub residual: f64,
}

impl PetalFamily {
    pub fn new(fam: &BumpFamily) -> Result<Self> {
        let shift = half_line_shift(fam)?;
        let base = petal_with_shift(fam, 0, shift)?;
        Ok(PetalFamily { base, shift, inversion_grid: inversion_grid(fam, shift), nu: fam.nu() })
    }

    /// `q^(j)` as a modulation of `q^(0)`.
    pub fn petal(&self, j: usize) -> ComplexSequence {
        self.base.modulated(self.omega(j))
    }

    /// `e^{-i phi_j}`.
    pub fn omega(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, -std::f64::consts::TAU * j as f64 / self.nu as f64)
    }

    pub fn stats(&self, fam: &BumpFamily, exec: Execution) -> Result<PetalStats> {
        let residual = if self.base.is_zero() {
            0.0
        } else {
            let (_, b) = GridNlft::new(fam.size())?.sample(&self.base, exec);
            b.max_abs_diff(&fam.grid(0))
        };
        let l2_sq = self.base.l2_norm_sq();
        let scale = fam.delta() * fam.delta() / fam.nu() as f64;
        Ok(PetalStats {
            shift: self.shift,
            inversion_grid: self.inversion_grid,
            l1: self.base.l1_norm(),
            l2_sq,
            l2_ratio: if scale > 0.0 { l2_sq / scale } else { 0.0 },
            residual,
        })
    }
}

/// Smallest `T` with `sum_{|n| > T} |q_n| <= tol`.
pub fn truncation_for(q: &ComplexSequence, tol: f64) -> i64 {
    let Some((lo, hi)) = q.support() else {
        return 0;
    };
    let reach = lo.abs().max(hi.abs());
    let mut tail = 0.0;
    for t in (0..reach).rev() {
        // entries at |n| = t + 1
        let outer = q.get(t + 1).norm() + q.get(-(t + 1)).norm();
        if tail + outer > tol {
            return t + 1;
        }
        tail += outer;
    }
    0
}
