use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::DaisyParams;
use crate::error::{NlftError, Result};
use crate::exec::Execution;
use crate::fft;
use crate::harmonic::{conjugate, RealGridFunction};
use crate::laurent::{theta, CircleGrid};

/// Smooth bump on `(0, 2 pi)` with peak value 1 at `pi`.
pub fn rho(x: f64) -> f64 {
    if x <= 0.0 || x >= TAU {
        0.0
    } else {
        (1.0 / (PI * PI) - 1.0 / (x * (TAU - x))).exp()
    }
}

/// The bumps `b_j(e^{i phi}) = delta rho(nu (phi - phi_j))`, `phi_j = 2 pi j / nu`.
///
/// Samples are produced on demand; nothing of size `nu * size` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFamily {
    nu: usize,
    delta: f64,
    size: usize,
}

impl BumpFamily {
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.nu as f64
    }

    /// `b_j(e^{i theta})`.
    pub fn value(&self, j: usize, theta: f64) -> f64 {
        let d = (theta - self.phi(j)).rem_euclid(TAU);
        self.delta * rho(self.nu as f64 * d)
    }

    /// Index of the arc `Delta_j` containing `theta`.
    pub fn arc(&self, theta: f64) -> usize {
        let j = (theta.rem_euclid(TAU) * self.nu as f64 / TAU).floor() as usize;
        j.min(self.nu - 1)
    }

    /// Arc of grid point `k`, exact when `nu` divides the grid size.
    pub fn arc_of_point(&self, k: usize, size: usize) -> usize {
        if size % self.nu == 0 {
            k / (size / self.nu)
        } else {
            self.arc(theta(k, size))
        }
    }

    /// `b_j` on a grid of `size` points.
    pub fn sample(&self, j: usize, size: usize) -> Result<CircleGrid> {
        CircleGrid::from_fn(size, |t| Complex64::new(self.value(j, t), 0.0))
    }

    /// `b_j` on the family grid.
    pub fn grid(&self, j: usize) -> CircleGrid {
        self.sample(j, self.size).expect("family grid is valid")
    }

    /// `(1/2) sum_{s <= j} log(1 + |b_s|^2)`, i.e. `log |A_j|`, on a grid.
    pub fn log_modulus(&self, j: usize, size: usize) -> Result<RealGridFunction> {
        fft::check_grid(size)?;
        let values = (0..size)
            .map(|k| {
                let t = theta(k, size);
                let s = self.arc(t);
                if s <= j {
                    0.5 * self.value(s, t).powi(2).ln_1p()
                } else {
                    0.0
                }
            })
            .collect();
        RealGridFunction::new(values)
    }
}

/// Bump family of `p` on a grid of `size` points, with disjointness verified.
pub fn make_bumps(p: &DaisyParams, size: usize) -> Result<BumpFamily> {
    p.validate()?;
    fft::check_grid(size)?;
    let required = 64 * p.nu;
    if size < required {
        return Err(NlftError::GridTooCoarse { grid: size, nu: p.nu, required });
    }
    let fam = BumpFamily { nu: p.nu, delta: p.delta, size };
    // a bump can only reach into its own arc, so checking the neighbours
    // of each sample's arc covers every pair
    for k in 0..size {
        let t = theta(k, size);
        let j = fam.arc(t);
        for s in [(j + p.nu - 1) % p.nu, (j + 1) % p.nu] {
            if s != j && fam.value(s, t) != 0.0 && fam.value(j, t) != 0.0 {
                return Err(NlftError::Domain(format!("bumps {j} and {s} overlap at theta = {t}")));
            }
        }
    }
    Ok(fam)
}

/// `arg A_j` for `A_j = a_0^(*) ... a_j^(*)`: half the conjugate function of
/// the summed log densities.
pub fn arg_product_profile(fam: &BumpFamily, j_max: usize) -> RealGridFunction {
    conjugate(&fam.log_modulus(j_max, fam.size).expect("family grid is valid"))
}

/// `A_j` on a grid: `exp(U + i conj(U))` with `U = log |A_j|`.
pub fn product_outer(fam: &BumpFamily, j: usize, size: usize) -> Result<CircleGrid> {
    let u = fam.log_modulus(j, size)?;
    let v = conjugate(&u);
    CircleGrid::new(u.values().iter().zip(v.values()).map(|(&a, &b)| Complex64::new(a, b).exp()).collect())
}

/// Largest `(|A_j| - 1) / delta^2` over the grid.
pub fn product_ceiling(fam: &BumpFamily, j: usize) -> f64 {
    if fam.delta == 0.0 {
        return 0.0;
    }
    let u = fam.log_modulus(j, fam.size).expect("family grid is valid");
    let peak = u.values().iter().cloned().fold(0.0, f64::max);
    (peak.exp() - 1.0) / (fam.delta * fam.delta)
}

/// Grid points of the arc `Delta_j`.
pub fn arc_points(fam: &BumpFamily, j: usize, size: usize) -> impl Iterator<Item = usize> + '_ {
    (0..size).filter(move |&k| fam.arc_of_point(k, size) == j % fam.nu)
}

/// Range of `j` over which the growth bound is claimed: `[nu/10, 9 nu/10]`.
pub fn growth_range(nu: usize) -> std::ops::RangeInclusive<usize> {
    nu.div_ceil(10)..=(9 * nu / 10)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub nu: usize,
    pub j: usize,
    /// `min_{phi in Delta_{j+1}} |arg A_j(e^{i phi})|`.
    pub min_arc_arg: f64,
}

/// One row per `j` in the growth range.
pub fn growth_rows(fam: &BumpFamily, exec: Execution) -> Vec<GrowthRow> {
    let range: Vec<usize> = growth_range(fam.nu).collect();
    exec.map(range.len(), |i| {
        let j = range[i];
        let prof = arg_product_profile(fam, j);
        let min_arc_arg = arc_points(fam, j + 1, fam.size)
            .map(|k| prof.values()[k].abs())
            .fold(f64::INFINITY, f64::min);
        GrowthRow { nu: fam.nu, j, min_arc_arg }
    })
}

/// `m(nu) = min_j min_{Delta_{j+1}} |arg A_j|` over the growth range.
pub fn min_growth(rows: &[GrowthRow]) -> f64 {
    rows.iter().map(|r| r.min_arc_arg).fold(f64::INFINITY, f64::min)
}

/// Growth measurements over several `nu` at fixed `delta`, with the fit
/// `m(nu) = delta^2 (C1 log nu - C2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    pub delta: f64,
    pub size: usize,
    pub rows: Vec<GrowthRow>,
    /// `(nu, m(nu))`.
    pub minima: Vec<(usize, f64)>,
    /// Least-squares slope of `m` against `log nu`.
    pub slope: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn growth_table(delta: f64, nus: &[usize], size: usize, exec: Execution) -> Result<GrowthTable> {
    let mut rows = Vec::new();
    let mut minima = Vec::new();
    for &nu in nus {
        let p = DaisyParams::new(nu, delta, 0.1)?;
        let fam = make_bumps(&p, size)?;
        let r = growth_rows(&fam, exec);
        minima.push((nu, min_growth(&r)));
        rows.extend(r);
    }
    let (slope, intercept) = least_squares(&minima.iter().map(|&(nu, m)| ((nu as f64).ln(), m)).collect::<Vec<_>>());
    let d2 = delta * delta;
    let (c1, c2) = if d2 > 0.0 { (slope / d2, -intercept / d2) } else { (0.0, 0.0) };
    Ok(GrowthTable { delta, size, rows, minima, slope, c1, c2 })
}

/// `(slope, intercept)` of the least-squares line through `points`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, points.first().map_or(0.0, |p| p.1));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
