//! Fourier analysis on the circle grid: the conjugate function, the argument
//! of the outer function `a^(*)`, and the nonlinear Plancherel check.
//!
//! The argument of `a^(*)` is always the branch given by the conjugate
//! function of `log |a^(*)| = log(1 + |b|^2) / 2`. That branch vanishes at the
//! origin, has zero mean on the circle and is continuous, unlike a pointwise
//! principal value.

use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{NlftError, Result};
use crate::fft;
use crate::laurent::{theta, CircleGrid, LaurentPoly};
use crate::nlft::{forward, ComplexSequence};

/// Real samples on `theta_k = 2 pi k / size`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGridFunction {
    values: Vec<f64>,
}

impl RealGridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        fft::check_grid(values.len())?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(NlftError::Domain(format!("non-finite sample at index {k}")));
        }
        Ok(RealGridFunction { values })
    }

    pub fn zeros(size: usize) -> Result<Self> {
        Self::new(vec![0.0; size])
    }

    pub fn from_fn(size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        fft::check_grid(size)?;
        Self::new((0..size).map(|k| f(theta(k, size))).collect())
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn theta(&self, k: usize) -> f64 {
        theta(k, self.size())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.size() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &RealGridFunction) -> f64 {
        assert_eq!(self.size(), other.size(), "grid sizes differ");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &RealGridFunction) -> RealGridFunction {
        assert_eq!(self.size(), other.size(), "grid sizes differ");
        RealGridFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: f64) -> RealGridFunction {
        RealGridFunction { values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `theta,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.theta(k), v)?;
        }
        Ok(())
    }
}

/// Conjugate function (circle Hilbert transform): Fourier multiplier
/// `-i sign(n)`, with the mean and the Nyquist bin sent to zero.
pub fn conjugate(f: &RealGridFunction) -> RealGridFunction {
    let n = f.size();
    let samples: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut c = fft::analysis(&samples);
    for (k, ck) in c.iter_mut().enumerate() {
        let freq = fft::frequency(k, n);
        *ck = if freq == 0 || k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *ck * Complex64::new(0.0, -(freq.signum() as f64))
        };
    }
    RealGridFunction { values: fft::synthesis(&c).into_iter().map(|v| v.re).collect() }
}

/// `log(1 + |b|^2)` on the grid.
pub fn log_density(b: &CircleGrid) -> RealGridFunction {
    RealGridFunction { values: b.values().iter().map(|v| v.norm_sqr().ln_1p()).collect() }
}

/// Continuous branch of `arg a^(*)` on the circle: half the conjugate function
/// of `log(1 + |b|^2)`.
pub fn arg_outer(b: &CircleGrid) -> RealGridFunction {
    conjugate(&log_density(b)).scale(0.5)
}

/// Boundary samples of the outer function with `|a^(*)|^2 = 1 + |b|^2`.
pub fn outer_boundary(b: &CircleGrid) -> CircleGrid {
    let log_mod = log_density(b).scale(0.5);
    let arg = conjugate(&log_mod);
    let values = log_mod.values.iter().zip(&arg.values).map(|(&u, &v)| Complex64::new(u, v).exp()).collect();
    CircleGrid::new(values).expect("size already checked")
}

/// Finest effective grid `plancherel_residual` refines to.
pub const PLANCHEREL_MAX_GRID: usize = 1 << 26;

/// Mean of `log(1 + |b|^2)` over the rotated grid `e^{i(2 pi k / n + t)}`.
fn rotated_log_mean(b: &LaurentPoly, n: usize, t: f64, fft: &dyn rustfft::Fft<f64>) -> f64 {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in b.coeffs().iter().enumerate() {
        let m = b.lo() + i as i64;
        buf[fft::bin(m, n)] += c * Complex64::from_polar(1.0, m as f64 * t);
    }
    fft.process(&mut buf);
    buf.iter().map(|v| v.norm_sqr().ln_1p()).sum::<f64>() / n as f64
}

/// `|-sum log(1 - |F_n|^2) - mean log(1 + |b|^2)|`, starting from a grid of
/// `size` points.
///
/// `b` is a polynomial, so samples on finer grids are exact. The trapezoid
/// mean is refined by doubling until two successive means agree to `1e-12`
/// or the effective grid reaches `PLANCHEREL_MAX_GRID`; zeros of `a^(*)`
/// close to the circle make the fixed-grid rule converge slowly. A grid of
/// `size * 2^m` points is `2^m` rotated copies of the base grid, so memory
/// stays at `size`.
pub fn plancherel_residual(f: &ComplexSequence, size: usize) -> Result<f64> {
    fft::check_grid(size)?;
    let b = forward(f)?.b;
    let plan = FftPlanner::new().plan_fft_inverse(size);
    let step = std::f64::consts::TAU / size as f64;
    let mut mean = rotated_log_mean(&b, size, 0.0, plan.as_ref());
    let mut copies = 1usize;
    while size * copies < PLANCHEREL_MAX_GRID {
        // odd rotations of the doubled grid
        let fresh: f64 = (0..copies)
            .map(|j| rotated_log_mean(&b, size, step * (2 * j + 1) as f64 / (2 * copies) as f64, plan.as_ref()))
            .sum::<f64>()
            / copies as f64;
        let next = 0.5 * (mean + fresh);
        copies *= 2;
        let settled = (next - mean).abs() <= 1e-12;
        mean = next;
        if settled {
            break;
        }
    }
    Ok((f.log_energy() - mean).abs())
}

/// Plain trapezoid residual on exactly `size` points.
pub fn plancherel_residual_fixed(f: &ComplexSequence, size: usize) -> Result<f64> {
    let p = forward(f)?;
    let b = p.b.sample_on_grid(size)?;
    Ok((f.log_energy() - log_density(&b).mean()).abs())
}

/// Outer function `exp( (1/2) int (xi+z)/(xi-z) log(1+|b(xi)|^2) dm(xi) )` at
/// points of the open disc, by the trapezoid rule on the grid of `b`.
pub fn outer_eval(b: &CircleGrid, points: &[Complex64]) -> Result<Vec<Complex64>> {
    if let Some(z) = points.iter().find(|z| z.norm() >= 1.0) {
        return Err(NlftError::Domain(format!("point {z} is not inside the unit disc")));
    }
    let density = log_density(b);
    let n = b.size() as f64;
    Ok(points
        .iter()
        .map(|&z| {
            let integral: Complex64 = density
                .values
                .iter()
                .enumerate()
                .map(|(k, &u)| {
                    let xi = b.point(k);
                    (xi + z) / (xi - z) * u
                })
                .sum::<Complex64>()
                / n;
            (integral * 0.5).exp()
        })
        .collect())
}
