//! Inverse transform for sequences supported on `n >= 1`, by the Schur
//! algorithm.
//!
//! For such `F` the ratio `r = b / a^(*)` vanishes at the origin and
//! `f = -r / z` is a Schur function whose Schur parameters are
//! `gamma_{n-1} = -F_n`.

use num_complex::Complex64;

use crate::error::{NlftError, Result};
use crate::fft;
use crate::harmonic::outer_boundary;
use crate::laurent::CircleGrid;
use crate::nlft::{forward, ComplexSequence};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where the Taylor data of a Schur function came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Grid,
    Taylor,
}

/// Schur function held as a quotient `num / den` of truncated power series.
///
/// A Schur step is a linear fractional map, so keeping the quotient makes it
/// a linear update of both series instead of a series division.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurFunction {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    source: Source,
}

impl SchurFunction {
    pub fn from_taylor(taylor: Vec<Complex64>) -> Self {
        let mut den = vec![ZERO; taylor.len()];
        if let Some(d) = den.first_mut() {
            *d = Complex64::new(1.0, 0.0);
        }
        SchurFunction { num: taylor, den, source: Source::Taylor }
    }

    /// First `len` Taylor coefficients of the function sampled on `grid`.
    ///
    /// Samples must lie in the closed disc up to `1e-8`.
    pub fn from_grid(grid: &CircleGrid, len: usize) -> Result<Self> {
        if len > grid.size() / 4 {
            return Err(NlftError::Alias { grid: grid.size(), bandwidth: len });
        }
        let sup = grid.max_abs();
        if sup > 1.0 + 1e-8 {
            return Err(NlftError::Domain(format!("sup |f| = {sup} exceeds 1 on the grid")));
        }
        let coeffs = grid.fourier_coeffs();
        let mut f = Self::from_taylor(coeffs[..len].to_vec());
        f.source = Source::Grid;
        Ok(f)
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Number of Taylor coefficients still carried.
    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn value_at_zero(&self) -> Complex64 {
        match (self.num.first(), self.den.first()) {
            (Some(n), Some(d)) => n / d,
            _ => ZERO,
        }
    }

    /// Taylor coefficients of `num / den`.
    pub fn taylor(&self) -> Vec<Complex64> {
        let m = self.num.len();
        let mut out = vec![ZERO; m];
        if m == 0 {
            return out;
        }
        let d0 = self.den[0];
        for k in 0..m {
            let mut acc = self.num[k];
            for j in 1..=k {
                acc -= self.den[j] * out[k - j];
            }
            out[k] = acc / d0;
        }
        out
    }

    /// `gamma = f(0)` and `f_next = (f - gamma) / (z (1 - conj(gamma) f))`,
    /// one Taylor coefficient shorter.
    pub fn step(&self) -> Result<(Complex64, SchurFunction)> {
        if self.is_empty() {
            return Err(NlftError::Domain("no Taylor coefficients left".into()));
        }
        let gamma = self.value_at_zero();
        if gamma.norm() >= 1.0 {
            return Err(NlftError::Extremal(gamma.norm()));
        }
        let m = self.num.len();
        let gc = gamma.conj();
        let mut num: Vec<Complex64> = (1..m).map(|k| self.num[k] - gamma * self.den[k]).collect();
        let mut den: Vec<Complex64> = (0..m - 1).map(|k| self.den[k] - gc * self.num[k]).collect();
        if let Some(&d0) = den.first() {
            let s = 1.0 / d0.norm();
            num.iter_mut().for_each(|c| *c *= s);
            den.iter_mut().for_each(|c| *c *= s);
        }
        Ok((gamma, SchurFunction { num, den, source: self.source }))
    }
}

/// Free-standing form of [`SchurFunction::step`].
pub fn schur_step(f: &SchurFunction) -> Result<(Complex64, SchurFunction)> {
    f.step()
}

/// First `count` Schur parameters of `f`.
pub fn schur_parameters(f: &SchurFunction, count: usize) -> Result<Vec<Complex64>> {
    let mut f = f.clone();
    let mut gammas = Vec::with_capacity(count);
    for _ in 0..count {
        let (g, next) = f.step()?;
        gammas.push(g);
        f = next;
    }
    Ok(gammas)
}

/// Schur function `-b / (z a^(*))` of half-line data `b`, with `a^(*)` the
/// outer function of modulus `(1 + |b|^2)^{1/2}`.
pub fn schur_from_b(b: &CircleGrid, len: usize) -> Result<SchurFunction> {
    let a_star = outer_boundary(b);
    let size = b.size();
    let f = CircleGrid::new((0..size).map(|k| -b.values()[k] / (a_star.values()[k] * b.point(k))).collect())?;
    SchurFunction::from_grid(&f, len)
}

/// `F_1 .. F_{n_max}` with `b(F) = b` on the grid, assuming `F` lives on `n >= 1`.
pub fn inverse_halfline(b: &CircleGrid, n_max: usize) -> Result<ComplexSequence> {
    fft::check_grid(b.size())?;
    if n_max > b.size() / 4 {
        return Err(NlftError::Alias { grid: b.size(), bandwidth: n_max });
    }
    let f = schur_from_b(b, n_max)?;
    let gammas = schur_parameters(&f, n_max)?;
    ComplexSequence::new(1, gammas.into_iter().map(|g| -g).collect())
}

/// Sup error of `inverse_halfline(b(F))` against `F` for `F` on `n >= 1`.
pub fn roundtrip_error(f: &ComplexSequence, size: usize) -> Result<f64> {
    let Some((lo, hi)) = f.support() else {
        return Ok(0.0);
    };
    if lo < 1 {
        return Err(NlftError::Domain(format!("support starts at {lo}, expected n >= 1")));
    }
    let n_max = ((hi + 8) as usize).min(size / 4);
    let b = forward(f)?.b.sample_on_grid(size)?;
    let g = inverse_halfline(&b, n_max)?;
    Ok((1..=n_max.max(hi as usize) as i64).map(|n| (f.get(n) - g.get(n)).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn step_examples() {
        let (g, next) = schur_step(&SchurFunction::from_taylor(vec![ZERO; 4])).unwrap();
        assert_eq!(g, ZERO);
        assert!(next.taylor().iter().all(|v| v.norm() == 0.0));

        let (g, next) = schur_step(&SchurFunction::from_taylor(vec![c(0.4), ZERO, ZERO])).unwrap();
        assert_eq!(g, c(0.4));
        assert!(next.taylor().iter().all(|v| v.norm() < 1e-16));

        let (g, next) = schur_step(&SchurFunction::from_taylor(vec![ZERO, c(0.5), ZERO])).unwrap();
        assert_eq!(g, ZERO);
        let t = next.taylor();
        assert!((t[0] - c(0.5)).norm() < 1e-16 && t[1].norm() < 1e-16);
    }

    #[test]
    fn extremal_input_is_rejected() {
        let f = SchurFunction::from_taylor(vec![c(1.0), ZERO]);
        assert!(matches!(f.step(), Err(NlftError::Extremal(_))));
    }

    #[test]
    fn step_matches_series_algebra() {
        // f = (0.3 + 0.2 z) / (1 - 0.1 z): compare against explicit series arithmetic
        let m = 12;
        let mut taylor = vec![ZERO; m];
        taylor[0] = c(0.3);
        for k in 1..m {
            taylor[k] = c(0.3 * 0.1f64.powi(k as i32) + 0.2 * 0.1f64.powi(k as i32 - 1));
        }
        let f = SchurFunction::from_taylor(taylor.clone());
        let (g, next) = f.step().unwrap();
        assert!((g - c(0.3)).norm() < 1e-16);
        // (f - g) / z and 1 - g f, then divide
        let numer: Vec<Complex64> = taylor[1..].to_vec();
        let mut denom: Vec<Complex64> = taylor[..m - 1].iter().map(|t| -g * t).collect();
        denom[0] += c(1.0);
        let mut expect = vec![ZERO; m - 1];
        for k in 0..m - 1 {
            let mut acc = numer[k];
            for j in 1..=k {
                acc -= denom[j] * expect[k - j];
            }
            expect[k] = acc / denom[0];
        }
        for (a, b) in next.taylor().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_data_inverts_to_zero() {
        let b = CircleGrid::constant(64, ZERO).unwrap();
        let f = inverse_halfline(&b, 16).unwrap();
        assert_eq!(f.max_abs(), 0.0);
        assert_eq!(roundtrip_error(&ComplexSequence::zero(), 64).unwrap(), 0.0);
    }

    #[test]
    fn single_site_round_trip() {
        let f = ComplexSequence::single(1, c(0.3)).unwrap();
        let b = forward(&f).unwrap().b.sample_on_grid(256).unwrap();
        let g = inverse_halfline(&b, 16).unwrap();
        assert!((g.get(1) - c(0.3)).norm() <= 1e-8);
        assert!((2..=16).all(|n| g.get(n).norm() <= 1e-8));
    }

    #[test]
    fn two_site_round_trip() {
        let f = ComplexSequence::new(1, vec![c(0.25), c(0.25)]).unwrap();
        assert!(roundtrip_error(&f, 1024).unwrap() <= 1e-7);
    }

    #[test]
    fn complex_entries_keep_their_phase() {
        let f = ComplexSequence::new(1, vec![Complex64::new(0.1, 0.2), Complex64::new(-0.15, 0.05)]).unwrap();
        assert!(roundtrip_error(&f, 1024).unwrap() <= 1e-10);
    }

    #[test]
    fn round_trip_on_eight_sites() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let raw: Vec<Complex64> =
                (0..8).map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.3))).collect();
            let l1: f64 = raw.iter().map(|v| v.norm()).sum();
            let f = ComplexSequence::new(1, raw.iter().map(|v| v * (0.5 / l1)).collect()).unwrap();
            assert!(roundtrip_error(&f, 4096).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn error_does_not_grow_with_the_grid() {
        let f = ComplexSequence::new(1, vec![c(0.3), Complex64::new(0.0, -0.2), c(0.1), c(0.05)]).unwrap();
        let errs: Vec<f64> = [128, 512, 2048].iter().map(|&g| roundtrip_error(&f, g).unwrap()).collect();
        assert!(errs[1] <= errs[0] + 1e-13 && errs[2] <= errs[1] + 1e-13, "{errs:?}");
    }

    #[test]
    fn rejects_bad_requests() {
        let b = CircleGrid::constant(64, ZERO).unwrap();
        assert!(matches!(inverse_halfline(&b, 17), Err(NlftError::Alias { .. })));
        let f = ComplexSequence::single(0, c(0.3)).unwrap();
        assert!(roundtrip_error(&f, 64).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn intermediate_parameters_stay_in_the_disc(
            v in prop::collection::vec((0.0..0.6f64, 0.0..std::f64::consts::TAU), 1..10)
        ) {
            let f = ComplexSequence::new(1, v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect()).unwrap();
            let b = forward(&f).unwrap().b.sample_on_grid(1024).unwrap();
            let s = schur_from_b(&b, 32).unwrap();
            let gammas = schur_parameters(&s, 32).unwrap();
            prop_assert!(gammas.iter().all(|g| g.norm() < 1.0));
            for (k, g) in gammas.iter().enumerate() {
                prop_assert!((*g + f.get(k as i64 + 1)).norm() < 1e-8);
            }
        }
    }
}
