//! The transfer recursion evaluated pointwise on a circle grid.
//!
//! On the circle `a = conj(a^(*))` and `b^(*) = conj(b)`, so one site updates
//! the sample pair `(a^(*), b)` as
//!
//! ```text
//! a^(*) <- (a^(*) + F_n z^n conj(b))     / sqrt(1 - |F_n|^2)
//! b     <- (b     + F_n z^n conj(a^(*))) / sqrt(1 - |F_n|^2)
//! ```
//!
//! The samples are exact for any grid size (no aliasing), and the cost is
//! linear in the support length, which keeps long daisy sequences tractable.

use num_complex::Complex64;

use super::ComplexSequence;
use crate::error::Result;
use crate::exec::Execution;
use crate::fft;
use crate::laurent::CircleGrid;

/// One site of the recursion at one grid point.
#[derive(Debug, Clone, Copy)]
pub struct ScanStep {
    /// Site index.
    pub n: i64,
    /// Position of the site among the nonzero sites.
    pub index: usize,
    pub f: Complex64,
    /// `a^(*)` and `b` before the site.
    pub a_star_prev: Complex64,
    pub b_prev: Complex64,
    /// `a^(*)` and `b` after the site.
    pub a_star: Complex64,
    pub b: Complex64,
}

#[derive(Debug, Clone)]
pub struct GridNlft {
    roots: Vec<Complex64>,
}

const POINTS_PER_TASK: usize = 64;

impl GridNlft {
    pub fn new(size: usize) -> Result<Self> {
        fft::check_grid(size)?;
        Ok(GridNlft { roots: fft::roots_of_unity(size) })
    }

    pub fn size(&self) -> usize {
        self.roots.len()
    }

    /// `z_k^n` with `z_k = e^{2 pi i k / size}`, exact index arithmetic.
    #[inline]
    pub fn z_pow(&self, k: usize, n: i64) -> Complex64 {
        let g = self.roots.len() as i64;
        self.roots[((k as i64 % g) * n.rem_euclid(g)).rem_euclid(g) as usize]
    }

    /// Runs the recursion at every grid point, handing each site to `visit`.
    ///
    /// `init(k)` creates per-point state; points are processed independently
    /// (in parallel under [`Execution::Parallel`]) and results come back in
    /// grid order.
    pub fn scan_points<T, I, V>(&self, seq: &ComplexSequence, exec: Execution, init: I, visit: V) -> Vec<T>
    where
        T: Send,
        I: Fn(usize) -> T + Sync + Send,
        V: Fn(&mut T, usize, &ScanStep) + Sync + Send,
    {
        let size = self.size();
        let g = size as i64;
        let sites: Vec<(i64, usize, Complex64, f64)> = seq
            .nonzero()
            .map(|(n, f)| (n, n.rem_euclid(g) as usize, f, 1.0 / (1.0 - f.norm_sqr()).sqrt()))
            .collect();
        let mask = size - 1;
        let tasks = size.div_ceil(POINTS_PER_TASK);
        let chunks: Vec<Vec<T>> = exec.map(tasks, |t| {
            let lo = t * POINTS_PER_TASK;
            let hi = (lo + POINTS_PER_TASK).min(size);
            (lo..hi)
                .map(|k| {
                    let mut state = init(k);
                    let mut a_star = Complex64::new(1.0, 0.0);
                    let mut b = Complex64::new(0.0, 0.0);
                    for (index, &(n, residue, f, s)) in sites.iter().enumerate() {
                        let w = f * self.roots[k.wrapping_mul(residue) & mask];
                        let na = (a_star + w * b.conj()) * s;
                        let nb = (b + w * a_star.conj()) * s;
                        let step = ScanStep { n, index, f, a_star_prev: a_star, b_prev: b, a_star: na, b: nb };
                        visit(&mut state, k, &step);
                        a_star = na;
                        b = nb;
                    }
                    state
                })
                .collect()
        });
        chunks.into_iter().flatten().collect()
    }

    /// Samples of `(a^(*), b)` for the whole sequence.
    pub fn sample(&self, seq: &ComplexSequence, exec: Execution) -> (CircleGrid, CircleGrid) {
        let mut snaps = self.checkpoints(seq, &[i64::MAX], exec);
        snaps.pop().unwrap()
    }

    /// Samples of `(a^(*), b)` of `F^{<=cut}` for each cut (nondecreasing).
    pub fn checkpoints(&self, seq: &ComplexSequence, cuts: &[i64], exec: Execution) -> Vec<(CircleGrid, CircleGrid)> {
        debug_assert!(cuts.windows(2).all(|w| w[0] <= w[1]));
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let per_point = self.scan_points(
            seq,
            exec,
            |_| vec![(one, zero); cuts.len()],
            |snaps, _, step| {
                // every cut at or above this site sees its output
                let first = cuts.partition_point(|&c| c < step.n);
                for s in &mut snaps[first..] {
                    *s = (step.a_star, step.b);
                }
            },
        );
        (0..cuts.len())
            .map(|i| {
                let a: Vec<Complex64> = per_point.iter().map(|p| p[i].0).collect();
                let b: Vec<Complex64> = per_point.iter().map(|p| p[i].1).collect();
                (CircleGrid::new(a).unwrap(), CircleGrid::new(b).unwrap())
            })
            .collect()
    }
}
