use num_complex::Complex64;
use serde::Serialize;

use super::bumps::{growth_rows, make_bumps, min_growth, product_ceiling, product_outer, GrowthRow};
use super::petal::{truncation_for, PetalFamily, PetalStats};
use super::{DaisyParams, Schedule};
use crate::error::{NlftError, Result};
use crate::exec::Execution;
use crate::fft;
use crate::laurent::CircleGrid;
use crate::nlft::{ComplexSequence, GridNlft};

/// `sup |b(F^(j))| <= B_CONST (delta + eps)`.
pub const B_CONST: f64 = 3.0;
/// `sup_t sup |r(F^{<=t})| <= R_CONST (delta + eps)`.
pub const R_CONST: f64 = 3.0;
/// `||F||^2 <= L2_CONST delta^2`.
pub const L2_CONST: f64 = 4.0;
pub const MAX_RETRIES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DaisyReport {
    pub nu: usize,
    pub delta: f64,
    pub eps: f64,
    pub grid: usize,
    pub petal: Option<PetalStats>,
    /// `T_j`: petal `j` keeps its entries with `|n| <= T_j`.
    pub truncations: Vec<i64>,
    /// Index at which the centre of petal `j` is placed.
    pub translations: Vec<i64>,
    pub retries: usize,
    pub support: Option<(i64, i64)>,
    /// `max_j sup |a^(*)(F^(j)) - A_j|`.
    pub max_a_err: f64,
    pub max_b: f64,
    pub b_bound: f64,
    pub max_prefix_r: f64,
    pub r_bound: f64,
    pub l2_sq: f64,
    /// `||F||^2 / delta^2`.
    pub l2_const: f64,
    /// `max_j (sup |A_j| - 1) / delta^2`.
    pub ceiling_const: f64,
    /// `m(nu)` on the certification grid.
    pub min_growth: f64,
    pub growth: Vec<GrowthRow>,
}

impl DaisyReport {
    /// Largest `|n|` in the support.
    pub fn ell(&self) -> i64 {
        self.support.map_or(0, |(lo, hi)| lo.abs().max(hi.abs()))
    }
}

/// A certified daisy with the final samples of its transform.
#[derive(Debug, Clone)]
pub struct Daisy {
    pub seq: ComplexSequence,
    pub report: DaisyReport,
    pub a_star: CircleGrid,
    pub b: CircleGrid,
}

struct Check {
    a_err: Vec<f64>,
    b_max: Vec<f64>,
    prefix_r: f64,
    a_star: CircleGrid,
    b: CircleGrid,
}

struct PointCheck {
    next: usize,
    a_err: Vec<f64>,
    b_abs: Vec<f64>,
    r_max: f64,
    last: (Complex64, Complex64),
}

/// One pass over the sequence that compares `a^(*)(F^(j))` with `A_j` at
/// every cut and tracks `|r|` over all prefixes.
fn check(seq: &ComplexSequence, cuts: &[i64], targets: &[CircleGrid], size: usize, exec: Execution) -> Result<Check> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let nlft = GridNlft::new(size)?;
    let record = |st: &mut PointCheck, k: usize, a: Complex64, b: Complex64| {
        let j = st.next;
        st.a_err[j] = (a - targets[j].values()[k]).norm();
        st.b_abs[j] = b.norm();
        st.next += 1;
    };
    let mut points = nlft.scan_points(
        seq,
        exec,
        |_| PointCheck {
            next: 0,
            a_err: vec![0.0; cuts.len()],
            b_abs: vec![0.0; cuts.len()],
            r_max: 0.0,
            last: (one, zero),
        },
        |st, k, step| {
            while st.next < cuts.len() && step.n > cuts[st.next] {
                record(st, k, step.a_star_prev, step.b_prev);
            }
            st.r_max = st.r_max.max(step.b.norm_sqr() / step.a_star.norm_sqr());
            st.last = (step.a_star, step.b);
        },
    );
    for (k, st) in points.iter_mut().enumerate() {
        while st.next < cuts.len() {
            let (a, b) = st.last;
            record(st, k, a, b);
        }
    }
    let mut a_err = vec![0.0f64; cuts.len()];
    let mut b_max = vec![0.0f64; cuts.len()];
    let mut prefix_r = 0.0f64;
    for st in &points {
        for j in 0..cuts.len() {
            a_err[j] = a_err[j].max(st.a_err[j]);
            b_max[j] = b_max[j].max(st.b_abs[j]);
        }
        prefix_r = prefix_r.max(st.r_max.sqrt());
    }
    let a_star = CircleGrid::new(points.iter().map(|p| p.last.0).collect())?;
    let b = CircleGrid::new(points.iter().map(|p| p.last.1).collect())?;
    Ok(Check { a_err, b_max, prefix_r, a_star, b })
}

/// Petals truncated to `[-T_j, T_j]` and packed left to right without gaps.
fn pack(petals: &PetalFamily, t: &[i64]) -> Result<(ComplexSequence, Vec<i64>, Vec<i64>)> {
    let mut centres = Vec::with_capacity(t.len());
    let mut c = 0i64;
    for (j, &tj) in t.iter().enumerate() {
        if j > 0 {
            c += t[j - 1] + tj + 1;
        }
        centres.push(c);
    }
    let lo = -t[0];
    let hi = centres[t.len() - 1] + t[t.len() - 1];
    let mut entries = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (j, &tj) in t.iter().enumerate() {
        let q = petals.petal(j).window(-tj, tj);
        for (n, v) in q.nonzero() {
            entries[(n + centres[j] - lo) as usize] = v;
        }
    }
    let cuts = centres.iter().zip(t).map(|(c, t)| c + t).collect();
    Ok((ComplexSequence::new(lo, entries)?.trimmed(), centres, cuts))
}

/// Builds and certifies a `(nu, delta, eps)`-daisy on a grid of `size` points.
///
/// Petal `j` keeps the entries with `|n| <= T_j`, where `T_j` is the smallest
/// truncation whose dropped `l1` mass is at most `eps / nu`. Petals are
/// placed consecutively. If a bound fails at some `j`, `T_j` is doubled and
/// the daisy rebuilt, at most [`MAX_RETRIES`] times.
pub fn assemble_daisy(p: &DaisyParams, size: usize, exec: Execution) -> Result<Daisy> {
    let fam = make_bumps(p, size)?;
    let growth = growth_rows(&fam, exec);
    let mut report = DaisyReport {
        nu: p.nu,
        delta: p.delta,
        eps: p.eps,
        grid: size,
        petal: None,
        truncations: Vec::new(),
        translations: Vec::new(),
        retries: 0,
        support: None,
        max_a_err: 0.0,
        max_b: 0.0,
        b_bound: B_CONST * (p.delta + p.eps),
        max_prefix_r: 0.0,
        r_bound: R_CONST * (p.delta + p.eps),
        l2_sq: 0.0,
        l2_const: 0.0,
        ceiling_const: product_ceiling(&fam, p.nu - 1),
        min_growth: min_growth(&growth),
        growth,
    };
    if p.delta == 0.0 {
        let one = CircleGrid::constant(size, Complex64::new(1.0, 0.0))?;
        let zero = CircleGrid::constant(size, Complex64::new(0.0, 0.0))?;
        return Ok(Daisy { seq: ComplexSequence::zero(), report, a_star: one, b: zero });
    }

    let petals = PetalFamily::new(&fam)?;
    report.petal = Some(petals.stats(&fam, exec)?);
    let reach = petals.shift as i64;
    let t0 = truncation_for(&petals.base, p.eps / p.nu as f64).clamp(1, reach);
    let mut t = vec![t0; p.nu];
    let targets: Vec<CircleGrid> = exec
        .map(p.nu, |j| product_outer(&fam, j, size))
        .into_iter()
        .collect::<Result<_>>()?;

    for attempt in 0..=MAX_RETRIES {
        let (seq, centres, cuts) = pack(&petals, &t)?;
        let c = check(&seq, &cuts, &targets, size, exec)?;
        let l2_sq = seq.l2_norm_sq();
        let bad_j = (0..p.nu).find(|&j| c.a_err[j] > p.eps || c.b_max[j] > report.b_bound);
        let global_ok = c.prefix_r <= report.r_bound && l2_sq <= L2_CONST * p.delta * p.delta;

        report.truncations = t.clone();
        report.translations = centres;
        report.retries = attempt;
        report.support = seq.support();
        report.max_a_err = c.a_err.iter().cloned().fold(0.0, f64::max);
        report.max_b = c.b_max.iter().cloned().fold(0.0, f64::max);
        report.max_prefix_r = c.prefix_r;
        report.l2_sq = l2_sq;
        report.l2_const = l2_sq / (p.delta * p.delta);

        if bad_j.is_none() && global_ok {
            return Ok(Daisy { seq, report, a_star: c.a_star, b: c.b });
        }
        let reason = match bad_j {
            Some(j) => format!(
                "sup |a - A_j| = {:.3e} (eps {}), sup |b| = {:.3e} (bound {:.3e})",
                c.a_err[j], p.eps, c.b_max[j], report.b_bound
            ),
            None => format!(
                "prefix |r| = {:.3e} (bound {:.3e}), ||F||^2 / delta^2 = {:.3e} (bound {L2_CONST})",
                c.prefix_r, report.r_bound, report.l2_const
            ),
        };
        let stuck = match bad_j {
            Some(j) => t[j] >= reach,
            None => t.iter().all(|&tj| tj >= reach),
        };
        if attempt == MAX_RETRIES || stuck {
            return Err(NlftError::DaisyCertification { petal: bad_j.unwrap_or(p.nu), reason });
        }
        match bad_j {
            Some(j) => t[j] = (2 * t[j]).min(reach),
            None => t.iter_mut().for_each(|tj| *tj = (2 * *tj).min(reach)),
        }
    }
    unreachable!("loop returns on its last attempt")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HReport {
    pub n_star: usize,
    pub levels: Vec<DaisyReport>,
    pub rotated: Vec<bool>,
    /// `L_n`; level `n` is translated by `L_n` (first level) or `3 L_n`.
    pub l: Vec<i64>,
    pub shifts: Vec<i64>,
    pub support: Option<(i64, i64)>,
    pub l2_sq: f64,
    pub sum_delta_sq: f64,
    /// `sup |r(H^(n+1)) - r(H^(n))|` per consecutive pair, from the
    /// pointwise product of the transfer matrices of `H^(n)` and `D^(n+1)`.
    pub cauchy_gaps: Vec<f64>,
    /// `sup |r(D^(n+1))| / (1 - |r(D^(n+1))|)` per consecutive pair.
    pub cauchy_bounds: Vec<f64>,
    /// Pointwise `gap <= bound` held for every pair.
    pub cauchy_ok: bool,
}

#[derive(Debug, Clone)]
pub struct HConstruction {
    pub seq: ComplexSequence,
    pub report: HReport,
    /// Samples of `a^(*)(H)` and `b(H)`.
    pub a_star: CircleGrid,
    pub b: CircleGrid,
}

fn rotate_half(g: &CircleGrid) -> CircleGrid {
    let n = g.size();
    CircleGrid::new((0..n).map(|k| g.values()[(k + n / 2) % n]).collect()).expect("same size")
}

/// Stacks the daisies of a schedule into `H`, supported on `n >= 1`.
///
/// `H^(0) = D^(0)` translated by `L_0 > l_0`, and
/// `H^(n) = H^(n-1) + D^(n)` translated by `3 L_n` with
/// `L_n = max(2 L_{n-1} + 1, l_n + 1)`, `l_n` the reach of `D^(n)`.
pub fn assemble_h(s: &Schedule, size: usize, exec: Execution) -> Result<HConstruction> {
    s.validate()?;
    let mut levels = Vec::new();
    let mut rotated = Vec::new();
    let mut l: Vec<i64> = Vec::new();
    let mut shifts = Vec::new();
    let mut h = ComplexSequence::zero();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut h_a = CircleGrid::constant(size, one)?;
    let mut h_b = CircleGrid::constant(size, zero)?;
    let mut cauchy_gaps = Vec::new();
    let mut cauchy_bounds = Vec::new();
    let mut cauchy_ok = true;
    let roots = fft::roots_of_unity(size);
    for (i, p) in s.levels.iter().enumerate() {
        let d = assemble_daisy(p, size, exec)?;
        let rot = s.rotated(i);
        let (seq, a_star, b) = if rot {
            (d.seq.modulated(Complex64::new(-1.0, 0.0)), rotate_half(&d.a_star), rotate_half(&d.b))
        } else {
            (d.seq.clone(), d.a_star.clone(), d.b.clone())
        };
        let ell = d.report.ell();
        let li = match l.last() {
            None => ell + 1,
            Some(&prev) => (2 * prev + 1).max(ell + 1),
        };
        let shift = if i == 0 { li } else { 3 * li };
        let placed = seq.shifted(shift);
        if let (Some((_, h_hi)), Some((p_lo, _))) = (h.support(), placed.support()) {
            if h_hi >= p_lo {
                return Err(NlftError::SupportOverlap { first_end: h_hi, second_start: p_lo });
            }
        }
        h = h.add(&placed)?;

        // transfer product of H^(i-1) followed by the shifted daisy, pointwise
        let mut next_a = Vec::with_capacity(size);
        let mut next_b = Vec::with_capacity(size);
        let mut gap = 0.0f64;
        let mut bound = 0.0f64;
        for k in 0..size {
            let (fa, fb) = (h_a.values()[k], h_b.values()[k]);
            let ga = a_star.values()[k];
            let gb = b.values()[k] * roots[(k * shift.rem_euclid(size as i64) as usize) % size];
            let na = fa * ga + fb.conj() * gb;
            let nb = gb * fa.conj() + fb * ga;
            if i > 0 {
                let g = (nb / na - fb / fa).norm();
                let rd = (gb / ga).norm();
                let bk = rd / (1.0 - rd);
                gap = gap.max(g);
                bound = bound.max(bk);
                if g > bk + 1e-12 {
                    cauchy_ok = false;
                }
            }
            next_a.push(na);
            next_b.push(nb);
        }
        if i > 0 {
            cauchy_gaps.push(gap);
            cauchy_bounds.push(bound);
        }
        h_a = CircleGrid::new(next_a)?;
        h_b = CircleGrid::new(next_b)?;
        l.push(li);
        shifts.push(shift);
        rotated.push(rot);
        levels.push(d.report);
    }

    let report = HReport {
        n_star: s.n_star,
        support: h.support(),
        l2_sq: h.l2_norm_sq(),
        sum_delta_sq: s.levels.iter().map(|p| p.delta * p.delta).sum(),
        levels,
        rotated,
        l,
        shifts,
        cauchy_gaps,
        cauchy_bounds,
        cauchy_ok,
    };
    Ok(HConstruction { seq: h, report, a_star: h_a, b: h_b })
}

/// `F = mu chi_{n=0} + H`.
pub fn finalize_f(h: &ComplexSequence, mu: f64) -> Result<ComplexSequence> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(NlftError::Domain(format!("mu = {mu} must lie in (0, 1)")));
    }
    if let Some((lo, _)) = h.support() {
        if lo < 1 {
            return Err(NlftError::Domain(format!("H starts at {lo}, expected n >= 1")));
        }
    }
    h.add(&ComplexSequence::single(0, Complex64::new(mu, 0.0))?)
}

/// Sup over the grid and the given cuts of
/// `|a^(*)(F^{<=n}) - a^(*)(H^{<=n}) (1 + mu r(H^{<=n})) / sqrt(1 - mu^2)|`.
pub fn factor_residual(h: &ComplexSequence, mu: f64, cuts: &[i64], size: usize, exec: Execution) -> Result<f64> {
    let f = finalize_f(h, mu)?;
    let nlft = GridNlft::new(size)?;
    let hs = nlft.checkpoints(h, cuts, exec);
    let fs = nlft.checkpoints(&f, cuts, exec);
    let c = 1.0 / (1.0 - mu * mu).sqrt();
    let mut worst = 0.0f64;
    for ((ha, hb), (fa, _)) in hs.iter().zip(&fs) {
        for k in 0..size {
            let a = ha.values()[k];
            let r = hb.values()[k] / a;
            let predicted = a * (c + r * mu * c);
            worst = worst.max((fa.values()[k] - predicted).norm());
        }
    }
    Ok(worst)
}
