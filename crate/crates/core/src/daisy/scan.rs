//! Oscillation of the prefix transforms `F^{<=n}` at every grid point.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::laurent::theta;
use crate::nlft::{ComplexSequence, GridNlft};

/// Max minus min over all prefixes, the empty one included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationTable {
    pub theta: Vec<f64>,
    pub arg_osc: Vec<f64>,
    /// `max(osc Re a, osc Im a)`.
    pub a_osc: Vec<f64>,
    /// `max(osc Re b, osc Im b)`.
    pub b_osc: Vec<f64>,
    pub a_re_osc: Vec<f64>,
    pub a_im_osc: Vec<f64>,
    pub b_re_osc: Vec<f64>,
    pub b_im_osc: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub grid: usize,
    pub sites: usize,
    pub min_arg_osc: f64,
    pub max_arg_osc: f64,
    /// Steps checked against `|r_n - r_{n-1}| <= |F_n| / (1 - |F_n|)`, and
    /// prefixes against the summed bound from the empty prefix.
    pub var_checks: u64,
    pub var_violations: u64,
    pub var_worst_ratio: f64,
    /// Steps with `max_{k >= n} |F_k| <= 1/2` checked against
    /// `|arg a*_n - arg a*_{n-1}| <= 4 |F_n|`.
    pub argu_checks: u64,
    pub argu_violations: u64,
    pub argu_worst_ratio: f64,
}

#[derive(Default)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn at(x: f64) -> Self {
        Range { lo: x, hi: x }
    }
    fn push(&mut self, x: f64) {
        self.lo = self.lo.min(x);
        self.hi = self.hi.max(x);
    }
    fn osc(&self) -> f64 {
        self.hi - self.lo
    }
}

struct PointState {
    arg: f64,
    r: Complex64,
    arg_r: Range,
    a_re: Range,
    a_im: Range,
    b_re: Range,
    b_im: Range,
    var_sum: f64,
    var_checks: u64,
    var_violations: u64,
    var_worst: f64,
    argu_checks: u64,
    argu_violations: u64,
    argu_worst: f64,
}

const SLACK: f64 = 1e-12;

/// Tracks `arg a^(*)` (continuous branch), `a` and `b` over all prefixes.
///
/// The branch of `arg a^(*)` is the cumulative sum of principal arguments of
/// `a^(*)_n / a^(*)_{n-1}`; every such ratio has positive real part, so the
/// sum agrees with the harmonic-conjugate branch of every prefix.
pub fn divergence_scan(f: &ComplexSequence, size: usize, exec: Execution) -> Result<(OscillationTable, ScanSummary)> {
    let nlft = GridNlft::new(size)?;
    // per site: |F_n|, its squared step bound, and whether max_{k >= n} |F_k| <= 1/2
    let abs: Vec<f64> = f.nonzero().map(|(_, v)| v.norm()).collect();
    let step_bound_sq: Vec<f64> = abs.iter().map(|a| (a / (1.0 - a)).powi(2)).collect();
    let step_bound: Vec<f64> = abs.iter().map(|a| a / (1.0 - a)).collect();
    let mut small_tail = vec![false; abs.len()];
    let mut m = 0.0f64;
    for i in (0..abs.len()).rev() {
        m = m.max(abs[i]);
        small_tail[i] = m <= 0.5;
    }

    let states = nlft.scan_points(
        f,
        exec,
        |_| PointState {
            arg: 0.0,
            r: Complex64::new(0.0, 0.0),
            arg_r: Range::at(0.0),
            a_re: Range::at(1.0),
            a_im: Range::at(0.0),
            b_re: Range::at(0.0),
            b_im: Range::at(0.0),
            var_sum: 0.0,
            var_checks: 0,
            var_violations: 0,
            var_worst: 0.0,
            argu_checks: 0,
            argu_violations: 0,
            argu_worst: 0.0,
        },
        |st, _, step| {
            let i = step.index;
            let step_arg = (step.a_star * step.a_star_prev.conj()).arg();
            st.arg += step_arg;
            st.arg_r.push(st.arg);
            // a = conj(a^(*)) on the circle
            st.a_re.push(step.a_star.re);
            st.a_im.push(-step.a_star.im);
            st.b_re.push(step.b.re);
            st.b_im.push(step.b.im);

            // squared ratios; roots are taken once per point at the end
            let r = step.b / step.a_star;
            let gap_sq = (r - st.r).norm_sqr();
            st.r = r;
            st.var_sum += step_bound[i];
            st.var_checks += 2;
            let bound_sq = step_bound_sq[i];
            if bound_sq > 0.0 {
                st.var_worst = st.var_worst.max(gap_sq / bound_sq);
            }
            if gap_sq > bound_sq * (1.0 + 1e-12) + SLACK * SLACK {
                st.var_violations += 1;
            }
            let total_sq = st.var_sum * st.var_sum;
            let r_sq = r.norm_sqr();
            if total_sq > 0.0 {
                st.var_worst = st.var_worst.max(r_sq / total_sq);
            }
            if r_sq > total_sq * (1.0 + 1e-12) + SLACK * SLACK {
                st.var_violations += 1;
            }

            if small_tail[i] {
                st.argu_checks += 1;
                let bound = 4.0 * abs[i];
                if bound > 0.0 {
                    st.argu_worst = st.argu_worst.max(step_arg.abs() / bound);
                }
                if step_arg.abs() > bound + SLACK {
                    st.argu_violations += 1;
                }
            }
        },
    );

    let collect = |g: &dyn Fn(&PointState) -> f64| states.iter().map(g).collect::<Vec<f64>>();
    let a_re_osc = collect(&|s| s.a_re.osc());
    let a_im_osc = collect(&|s| s.a_im.osc());
    let b_re_osc = collect(&|s| s.b_re.osc());
    let b_im_osc = collect(&|s| s.b_im.osc());
    let table = OscillationTable {
        theta: (0..size).map(|k| theta(k, size)).collect(),
        arg_osc: collect(&|s| s.arg_r.osc()),
        a_osc: a_re_osc.iter().zip(&a_im_osc).map(|(x, y)| x.max(*y)).collect(),
        b_osc: b_re_osc.iter().zip(&b_im_osc).map(|(x, y)| x.max(*y)).collect(),
        a_re_osc,
        a_im_osc,
        b_re_osc,
        b_im_osc,
    };
    let summary = ScanSummary {
        grid: size,
        sites: abs.len(),
        min_arg_osc: table.arg_osc.iter().cloned().fold(f64::INFINITY, f64::min),
        max_arg_osc: table.arg_osc.iter().cloned().fold(0.0, f64::max),
        var_checks: states.iter().map(|s| s.var_checks).sum(),
        var_violations: states.iter().map(|s| s.var_violations).sum(),
        var_worst_ratio: states.iter().map(|s| s.var_worst).fold(0.0, f64::max).sqrt(),
        argu_checks: states.iter().map(|s| s.argu_checks).sum(),
        argu_violations: states.iter().map(|s| s.argu_violations).sum(),
        argu_worst_ratio: states.iter().map(|s| s.argu_worst).fold(0.0, f64::max),
    };
    Ok((table, summary))
}

impl OscillationTable {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Smallest arg oscillation over points with `theta` in `[lo, hi]`.
    pub fn min_arg_osc_on(&self, lo: f64, hi: f64) -> f64 {
        self.theta
            .iter()
            .zip(&self.arg_osc)
            .filter(|(t, _)| (lo..=hi).contains(*t))
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,arg_osc,a_osc,b_osc")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.theta[k], self.arg_osc[k], self.a_osc[k], self.b_osc[k]
            )?;
        }
        Ok(())
    }
}
