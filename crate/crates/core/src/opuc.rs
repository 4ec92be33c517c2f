//! Orthogonal polynomials on the unit circle and their link to the
//! transform.
//!
//! A measure with Verblunsky coefficients `gamma_j` corresponds to the
//! half-line sequence `F_n = -gamma_{n-1}`, `n >= 1`. Under this
//! correspondence
//!
//! ```text
//! phi_n^*   = b(F^{<=n}) + a^(*)(F^{<=n})
//! r(F^{<=n+1}) = -z A_n / B_n
//! ```
//!
//! where `A_n / B_n` are the Wall polynomials, built with
//!
//! ```text
//! A_0 = gamma_0,  B_0 = 1
//! A_{k+1} = A_k + gamma_{k+1} z B_k^*
//! B_{k+1} = B_k + gamma_{k+1} z A_k^*
//! ```
//!
//! and `P^*(z) = z^k conj(P(1/conj(z)))` for a polynomial of degree `k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlftError, Result};
use crate::exec::Execution;
use crate::harmonic::RealGridFunction;
use crate::laurent::{CircleGrid, LaurentPoly};
use crate::nlft::{ComplexSequence, GridNlft};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerblunskyCoeffs {
    gamma: Vec<Complex64>,
}

impl VerblunskyCoeffs {
    pub fn new(gamma: Vec<Complex64>) -> Result<Self> {
        if let Some((j, g)) = gamma.iter().enumerate().find(|(_, g)| !(g.norm() < 1.0)) {
            return Err(NlftError::Domain(format!("|gamma_{j}| = {} is not < 1", g.norm())));
        }
        Ok(VerblunskyCoeffs { gamma })
    }

    pub fn gamma(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `F_n = -gamma_{n-1}` for `n >= 1`.
    pub fn to_sequence(&self) -> ComplexSequence {
        ComplexSequence::new(1, self.gamma.iter().map(|g| -g).collect()).expect("coefficients are in the disc")
    }

    /// Inverse of [`Self::to_sequence`]; entries below `n = 1` are rejected.
    pub fn from_sequence(f: &ComplexSequence) -> Result<Self> {
        match f.support() {
            None => Ok(VerblunskyCoeffs { gamma: Vec::new() }),
            Some((lo, _)) if lo < 1 => Err(NlftError::Domain(format!("support starts at {lo}, expected n >= 1"))),
            Some((_, hi)) => Self::new((1..=hi).map(|n| -f.get(n)).collect()),
        }
    }

    /// Coefficients of the measure with all `gamma` negated.
    pub fn twin(&self) -> Self {
        VerblunskyCoeffs { gamma: self.gamma.iter().map(|g| -g).collect() }
    }

    pub fn sum_sq(&self) -> f64 {
        self.gamma.iter().map(|g| g.norm_sqr()).sum()
    }

    /// `nu_k = prod_{j<k} (1 - |gamma_j|^2)^{1/2}` for `k = 0..=len`.
    pub fn nus(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.gamma.len() + 1);
        let mut nu = 1.0;
        out.push(nu);
        for g in &self.gamma {
            nu *= (1.0 - g.norm_sqr()).sqrt();
            out.push(nu);
        }
        out
    }

    /// Coefficients `gamma_j nu_j` of the orthogonal series.
    pub fn series_coeffs(&self) -> Vec<Complex64> {
        self.gamma.iter().zip(self.nus()).map(|(g, nu)| g * nu).collect()
    }
}

/// Orthonormal `phi_n` and `phi_n^*` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpucState {
    pub phi: CircleGrid,
    pub phi_star: CircleGrid,
    pub nu: f64,
    pub n: usize,
}

impl OpucState {
    pub fn initial(size: usize) -> Result<Self> {
        Ok(OpucState {
            phi: CircleGrid::constant(size, ONE)?,
            phi_star: CircleGrid::constant(size, ONE)?,
            nu: 1.0,
            n: 0,
        })
    }
}

/// One step of the Szego recursion.
pub fn szego_step(state: &OpucState, gamma: Complex64) -> Result<OpucState> {
    if !(gamma.norm() < 1.0) {
        return Err(NlftError::Domain(format!("|gamma| = {} is not < 1", gamma.norm())));
    }
    let rho = (1.0 - gamma.norm_sqr()).sqrt();
    let s = 1.0 / rho;
    let size = state.phi.size();
    let mut phi = Vec::with_capacity(size);
    let mut phi_star = Vec::with_capacity(size);
    for k in 0..size {
        let z = state.phi.point(k);
        let p = state.phi.values()[k];
        let q = state.phi_star.values()[k];
        phi.push((z * p - gamma.conj() * q) * s);
        phi_star.push((-gamma * z * p + q) * s);
    }
    Ok(OpucState { phi: CircleGrid::new(phi)?, phi_star: CircleGrid::new(phi_star)?, nu: state.nu * rho, n: state.n + 1 })
}

/// States `0..=n`.
pub fn szego_states(gamma: &VerblunskyCoeffs, n: usize, size: usize) -> Result<Vec<OpucState>> {
    check_degree(gamma, n)?;
    let mut states = vec![OpucState::initial(size)?];
    for j in 0..n {
        let next = szego_step(states.last().unwrap(), gamma.gamma[j])?;
        states.push(next);
    }
    Ok(states)
}

fn check_degree(gamma: &VerblunskyCoeffs, n: usize) -> Result<()> {
    if n > gamma.len() {
        return Err(NlftError::Domain(format!("degree {n} needs {n} coefficients, have {}", gamma.len())));
    }
    Ok(())
}

/// Sup gap between `phi_n^*` from the Szego recursion and `b + a^(*)` of
/// `F^{<=n}`, maximized with the same gap for the twin measure
/// (`phi_n^*` of the twin against `a^(*) - b`).
pub fn connection_residual(gamma: &VerblunskyCoeffs, n: usize, size: usize) -> Result<f64> {
    check_degree(gamma, n)?;
    let phi = szego_states(gamma, n, size)?.pop().unwrap().phi_star;
    let twin = szego_states(&gamma.twin(), n, size)?.pop().unwrap().phi_star;
    let seq = gamma.to_sequence().truncate_upto(n as i64);
    let (a_star, b) = GridNlft::new(size)?.sample(&seq, Execution::default());
    let plus = a_star.zip_with(&b, |a, b| a + b);
    let minus = a_star.zip_with(&b, |a, b| a - b);
    Ok(phi.max_abs_diff(&plus).max(twin.max_abs_diff(&minus)))
}

/// Wall polynomials `(A_n, B_n)` as coefficient polynomials in `z`.
pub fn wall_polynomials(gamma: &VerblunskyCoeffs, n: usize) -> Result<(LaurentPoly, LaurentPoly)> {
    if n >= gamma.len() {
        return Err(NlftError::Domain(format!("A_{n} needs {} coefficients, have {}", n + 1, gamma.len())));
    }
    let mut a = LaurentPoly::constant(gamma.gamma[0]);
    let mut b = LaurentPoly::one();
    for k in 0..n {
        let g = gamma.gamma[k + 1];
        // degree-k reversal: z^k * star
        let a_rev = a.star().shift(k as i64);
        let b_rev = b.star().shift(k as i64);
        let na = a.add_scaled_shifted(g, 1, &b_rev);
        let nb = b.add_scaled_shifted(g, 1, &a_rev);
        a = na;
        b = nb;
    }
    Ok((a, b))
}

/// Sup gap between `r(F^{<=n+1})` and `-z A_n / B_n` on the grid.
pub fn wall_ratio_residual(gamma: &VerblunskyCoeffs, n: usize, size: usize) -> Result<f64> {
    let (a, b) = wall_polynomials(gamma, n)?;
    let a = a.sample_on_grid(size)?;
    let b = b.sample_on_grid(size)?;
    let seq = gamma.to_sequence().truncate_upto(n as i64 + 1);
    let (a_star, bb) = GridNlft::new(size)?.sample(&seq, Execution::default());
    let r = bb.zip_with(&a_star, |x, y| x / y);
    let mut worst: f64 = 0.0;
    for k in 0..size {
        let wall = -r.point(k) * a.values()[k] / b.values()[k];
        worst = worst.max((wall - r.values()[k]).norm());
    }
    Ok(worst)
}

/// Density `(1 - |f|^2) / |1 - z f|^2` of the measure with Schur function `f`.
pub fn weight_from_schur(f: &CircleGrid) -> Result<RealGridFunction> {
    let sup = f.max_abs();
    if !(sup < 1.0) {
        return Err(NlftError::Degenerate(sup));
    }
    let values = (0..f.size())
        .map(|k| {
            let v = f.values()[k];
            (1.0 - v.norm_sqr()) / (ONE - f.point(k) * v).norm_sqr()
        })
        .collect();
    RealGridFunction::new(values)
}

/// Schur function `-r(F) / z` of a sequence supported on `n >= 1`.
pub fn schur_grid(f: &ComplexSequence, size: usize) -> Result<CircleGrid> {
    if let Some((lo, _)) = f.support() {
        if lo < 1 {
            return Err(NlftError::Domain(format!("support starts at {lo}, expected n >= 1")));
        }
    }
    let (a_star, b) = GridNlft::new(size)?.sample(f, Execution::default());
    let r = b.zip_with(&a_star, |x, y| x / y);
    CircleGrid::new((0..size).map(|k| -r.values()[k] / r.point(k)).collect())
}

/// Sup over the grid of `|nu_n phi_n^* - (1 - z sum_{j<n} gamma_j nu_j phi_j)|`.
pub fn ortho_series_partials(gamma: &VerblunskyCoeffs, n: usize, size: usize) -> Result<f64> {
    let states = szego_states(gamma, n, size)?;
    let alpha = gamma.series_coeffs();
    let mut sum = vec![ZERO; size];
    for (j, st) in states.iter().take(n).enumerate() {
        for (s, p) in sum.iter_mut().zip(st.phi.values()) {
            *s += alpha[j] * p;
        }
    }
    let last = &states[n];
    let mut worst: f64 = 0.0;
    for k in 0..size {
        let lhs = last.phi_star.values()[k] * last.nu;
        let rhs = ONE - last.phi.point(k) * sum[k];
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
