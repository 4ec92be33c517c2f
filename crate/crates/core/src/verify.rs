//! Seeded sweeps over the identities of the transform.
//!
//! Every sweep draws its inputs from a ChaCha stream seeded by the caller, so
//! a report is reproduced exactly by rerunning with the same seed.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NlftError, Result};
use crate::harmonic::{arg_outer, plancherel_residual, plancherel_residual_fixed};
use crate::inverse::roundtrip_error;
use crate::nlft::{concat_disjoint, forward, ratio, su11_residual, ComplexSequence};
use crate::opuc::{connection_residual, ortho_series_partials, wall_ratio_residual, VerblunskyCoeffs};

/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    /// Largest measured value.
    pub worst: f64,
    pub tolerance: f64,
    /// Samples that exceeded their bound.
    pub failures: usize,
    pub passed: bool,
    pub note: String,
}

impl Check {
    fn new(name: &str, samples: usize, worst: f64, tolerance: f64, failures: usize, note: impl Into<String>) -> Self {
        Check { name: name.into(), samples, worst, tolerance, failures, passed: failures == 0, note: note.into() }
    }

    fn against(name: &str, values: &[f64], tolerance: f64, note: impl Into<String>) -> Self {
        let worst = values.iter().cloned().fold(0.0, f64::max);
        let failures = values.iter().filter(|&&v| !(v <= tolerance)).count();
        Check::new(name, values.len(), worst, tolerance, failures, note)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub const SUITES: [&str; 5] = ["identities", "nlft", "inverse", "opuc", "hilbert"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polar(rng: &mut ChaCha8Rng, max_abs: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max_abs), rng.gen_range(0.0..TAU))
}

/// Length uniform in `1..=max_len`, `|F_n|` uniform in `[0, max_abs)`,
/// uniform phase, offset uniform in `[-max_len, max_len]`.
pub fn random_sequence(rng: &mut ChaCha8Rng, max_len: usize, max_abs: f64) -> ComplexSequence {
    let len = rng.gen_range(1..=max_len);
    let offset = rng.gen_range(-(max_len as i64)..=max_len as i64);
    let entries = (0..len).map(|_| polar(rng, max_abs)).collect();
    ComplexSequence::new(offset, entries).expect("moduli below one")
}

/// Supported in `[1, hi]` with `||F||_1` uniform in `(0, l1]`.
pub fn random_halfline(rng: &mut ChaCha8Rng, hi: usize, l1: f64) -> ComplexSequence {
    let entries: Vec<Complex64> = (0..hi).map(|_| polar(rng, 1.0)).collect();
    let norm: f64 = entries.iter().map(|c| c.norm()).sum();
    let target = rng.gen_range(0.0..l1) + f64::EPSILON;
    let scale = target / norm.max(f64::MIN_POSITIVE);
    ComplexSequence::new(1, entries.into_iter().map(|c| c * scale).collect()).expect("l1 below one")
}

pub fn random_gamma(rng: &mut ChaCha8Rng, len: usize, max_abs: f64) -> VerblunskyCoeffs {
    VerblunskyCoeffs::new((0..len).map(|_| polar(rng, max_abs)).collect()).expect("moduli below one")
}

/// `|a* a - b* b - 1|` coefficientwise, absolute and relative to
/// `sum |a_k|^2`. Rounding the coefficients of `a` alone already costs
/// about `eps sum |a_k|^2`, so only the relative form is a fixed bound.
pub fn su11_sweep(seed: u64, count: usize, max_len: usize, max_abs: f64) -> Result<(Check, Check)> {
    let mut r = rng(seed);
    let mut abs = Vec::with_capacity(count);
    let mut rel = Vec::with_capacity(count);
    for _ in 0..count {
        let p = forward(&random_sequence(&mut r, max_len, max_abs))?;
        let res = su11_residual(&p);
        let scale: f64 = p.a.coeffs().iter().map(|c| c.norm_sqr()).sum();
        abs.push(res);
        rel.push(res / scale);
    }
    Ok((
        Check::against("su11", &abs, 1e-9, format!("len <= {max_len}, |F| < {max_abs}")),
        Check::against("su11_relative", &rel, 1e-12, "residual / sum |a_k|^2"),
    ))
}

pub fn plancherel_sweep(seed: u64, count: usize, max_len: usize, max_abs: f64, grid: usize) -> Result<Check> {
    let mut r = rng(seed);
    let mut values = Vec::with_capacity(count);
    let mut fixed_worst = 0.0f64;
    let mut fixed_over = 0;
    for _ in 0..count {
        let f = random_sequence(&mut r, max_len, max_abs);
        let fixed = plancherel_residual_fixed(&f, grid)?;
        fixed_worst = fixed_worst.max(fixed);
        if !(fixed <= 1e-8) {
            fixed_over += 1;
        }
        values.push(plancherel_residual(&f, grid)?);
    }
    Ok(Check::against(
        "plancherel",
        &values,
        1e-8,
        format!("grid {grid} refined to agreement; plain trapezoid at {grid}: worst {fixed_worst:.3e}, {fixed_over} of {count} over 1e-8"),
    ))
}

/// `log(4/3)` for the single site `F_0 = 1/2`.
pub fn plancherel_single_site() -> Result<Check> {
    let f = ComplexSequence::single(0, Complex64::new(0.5, 0.0))?;
    let exact = (4.0f64 / 3.0).ln();
    let p = forward(&f)?;
    let b = p.b.sample_on_grid(64)?;
    let mean = crate::harmonic::log_density(&b).mean();
    let err = (f.log_energy() - exact).abs().max((mean - exact).abs());
    Ok(Check::against("plancherel_single_site", &[err], 1e-14, "log(4/3)"))
}

/// Predicted pair against the forward transform of the sum, and the
/// samplewise ratio stability bound.
pub fn concat_sweep(seed: u64, count: usize, grid: usize) -> Result<(Check, Check)> {
    let mut r = rng(seed);
    let mut coeff = Vec::with_capacity(count);
    let mut stability = Vec::with_capacity(count);
    for _ in 0..count {
        let f = random_sequence(&mut r, 12, 0.6);
        let g = random_sequence(&mut r, 12, 0.6);
        let (_, f_hi) = f.support().unwrap_or((0, 0));
        let (g_lo, _) = g.support().unwrap_or((0, 0));
        let shift = f_hi - g_lo + r.gen_range(1..8);
        let p = concat_disjoint(&f, &g, shift)?;
        let q = forward(&f.add(&g.shifted(shift))?)?;
        coeff.push((&p.a - &q.a).max_abs_coeff().max((&p.b - &q.b).max_abs_coeff()));

        let r_sum = q.ratio_on_grid(grid)?;
        let r_f = ratio(&f, grid)?;
        let r_g = ratio(&g, grid)?;
        let worst = (0..grid)
            .map(|k| {
                let rg = r_g.values()[k].norm();
                (r_sum.values()[k] - r_f.values()[k]).norm() / (rg / (1.0 - rg))
            })
            .fold(0.0, f64::max);
        stability.push(worst);
    }
    Ok((
        Check::against("concat", &coeff, 1e-10, "len <= 12, |F| < 0.6"),
        Check::against("concat_ratio_stability", &stability, 1.0 + 1e-12, "gap / (|r(G)| / (1 - |r(G)|))"),
    ))
}

/// Bitwise comparison of coefficients after integer reindexing.
pub fn shift_sweep(seed: u64, count: usize) -> Result<Check> {
    let mut r = rng(seed);
    let mut mismatches = 0;
    for _ in 0..count {
        let f = random_sequence(&mut r, 32, 0.9);
        let m = r.gen_range(-1000i64..=1000);
        let p = forward(&f)?;
        let q = forward(&f.shifted(m))?;
        if q.a != p.a || q.b != p.b.shift(m) {
            mismatches += 1;
        }
    }
    Ok(Check::new("shift_covariance", count, mismatches as f64, 0.0, mismatches, "exact equality"))
}

pub fn inverse_sweep(seed: u64, count: usize, grid: usize) -> Result<Check> {
    let mut r = rng(seed);
    let values = (0..count)
        .map(|_| roundtrip_error(&random_halfline(&mut r, 16, 0.5), grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(Check::against("inverse_roundtrip", &values, 1e-6, format!("supp in [1, 16], l1 <= 0.5, grid {grid}")))
}

pub fn opuc_sweep(seed: u64, count: usize, grid: usize) -> Result<(Check, Check, Check)> {
    let mut r = rng(seed);
    let mut conn = Vec::with_capacity(count);
    let mut wall = Vec::with_capacity(count);
    let mut series = Vec::with_capacity(count);
    for _ in 0..count {
        let n = r.gen_range(1..=32usize);
        let g = random_gamma(&mut r, n + 1, 0.5);
        conn.push(connection_residual(&g, n, grid)?);
        wall.push(wall_ratio_residual(&g, n - 1, grid)?);
        series.push(ortho_series_partials(&g, n, grid)?);
    }
    let note = format!("n <= 32, |gamma| < 0.5, grid {grid}");
    Ok((
        Check::against("opuc_connection", &conn, 1e-9, note.clone()),
        Check::against("opuc_wall", &wall, 1e-9, note.clone()),
        Check::against("opuc_series", &series, 1e-10, note),
    ))
}

/// Unwrapped phase along the grid, starting from the principal value.
pub fn unwrap_phase(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0.0;
    for (k, v) in values.iter().enumerate() {
        let mut x = v.arg();
        if k > 0 {
            x += TAU * ((prev - x) / TAU).round();
        }
        out.push(x);
        prev = x;
    }
    out
}

/// Pointwise unwrapped `arg a^(*)` against the harmonic-conjugate branch,
/// up to one global multiple of `2 pi`.
pub fn hilbert_gap(f: &ComplexSequence, grid: usize) -> Result<f64> {
    let p = forward(f)?;
    let a_star = p.a_star().sample_on_grid(grid)?;
    let b = p.b.sample_on_grid(grid)?;
    let unwrapped = unwrap_phase(a_star.values());
    let hilbert = arg_outer(&b);
    let turns = ((hilbert.values()[0] - unwrapped[0]) / TAU).round();
    let shift = TAU * turns;
    let gap = unwrapped.iter().zip(hilbert.values()).map(|(u, h)| (u + shift - h).abs()).fold(0.0, f64::max);
    if !gap.is_finite() {
        return Err(NlftError::Domain("non-finite argument".into()));
    }
    debug_assert!(gap < PI);
    Ok(gap)
}

pub fn hilbert_sweep(seed: u64, count: usize, grid: usize) -> Result<Check> {
    let mut r = rng(seed);
    let values = (0..count)
        .map(|_| hilbert_gap(&random_sequence(&mut r, 16, 0.5), grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(Check::against("hilbert_branch", &values, 1e-6, format!("len <= 16, |F| < 0.5, grid {grid}")))
}

/// Runs a named suite. `identities` runs every sweep at its default size.
pub fn run_suite(suite: &str, seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let all = suite == "identities";
    if all || suite == "nlft" {
        let (abs, rel) = su11_sweep(seed, 200, 32, 0.9)?;
        checks.push(abs);
        checks.push(rel);
        checks.push(plancherel_sweep(seed, 200, 32, 0.9, 8192)?);
        checks.push(plancherel_single_site()?);
        let (c, s) = concat_sweep(seed, 100, 512)?;
        checks.push(c);
        checks.push(s);
        checks.push(shift_sweep(seed, 100)?);
    }
    if all || suite == "inverse" {
        checks.push(inverse_sweep(seed, 50, 4096)?);
    }
    if all || suite == "opuc" {
        let (c, w, s) = opuc_sweep(seed, 50, 4096)?;
        checks.extend([c, w, s]);
    }
    if all || suite == "hilbert" {
        checks.push(hilbert_sweep(seed, 20, 8192)?);
    }
    if checks.is_empty() {
        return Err(NlftError::Domain(format!("unknown suite {suite:?}; expected one of {SUITES:?}")));
    }
    // the absolute su11 bound is informational; see `su11_sweep`
    let passed = checks.iter().filter(|c| c.name != "su11").all(|c| c.passed);
    Ok(SuiteReport { suite: suite.into(), seed, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_are_seeded() {
        let a = su11_sweep(3, 20, 16, 0.9).unwrap();
        let b = su11_sweep(3, 20, 16, 0.9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0.worst, su11_sweep(4, 20, 16, 0.9).unwrap().0.worst);
    }

    #[test]
    fn halfline_sequences_respect_their_l1_budget() {
        let mut r = rng(1);
        for _ in 0..50 {
            let f = random_halfline(&mut r, 16, 0.5);
            assert!(f.l1_norm() <= 0.5 + 1e-12);
            let (lo, hi) = f.support().unwrap();
            assert!(lo >= 1 && hi <= 16);
        }
    }

    #[test]
    fn unwrap_follows_a_winding_phase() {
        let v: Vec<Complex64> = (0..64).map(|k| Complex64::from_polar(1.0, 3.0 * TAU * k as f64 / 64.0)).collect();
        let u = unwrap_phase(&v);
        for (k, x) in u.iter().enumerate() {
            assert!((x - 3.0 * TAU * k as f64 / 64.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hilbert_gap_examples() {
        assert_eq!(hilbert_gap(&ComplexSequence::zero(), 64).unwrap(), 0.0);
        let f = ComplexSequence::new(0, vec![Complex64::new(0.5, 0.0); 2]).unwrap();
        assert!(hilbert_gap(&f, 2048).unwrap() < 1e-8);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 0).is_err());
    }

    #[test]
    fn small_suites_pass() {
        let r = run_suite("inverse", 7).unwrap();
        assert!(r.passed, "{r:?}");
        let r = run_suite("hilbert", 7).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
