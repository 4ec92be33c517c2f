//! The daisy construction: bumps `b_j` on consecutive arcs, their petals
//! `q^(j)`, and the packed sequence whose `a^(*)` follows the products
//! `A_j = a_0^(*) ... a_j^(*)`. The argument of `A_j` grows like
//! `delta^2 log nu` on the arc just after the covered ones.
//!
//! Several daisies aimed at alternating semicircles are then stacked into a
//! sequence `H` supported on `n >= 1`, and `F = mu chi_0 + H`.

mod assemble;
mod bumps;
mod petal;
mod scan;

pub use assemble::{
    assemble_daisy, assemble_h, factor_residual, finalize_f, Daisy, DaisyReport, HConstruction, HReport,
    B_CONST, L2_CONST, MAX_RETRIES, R_CONST,
};
pub use bumps::{
    arc_points, arg_product_profile, growth_range, growth_rows, growth_table, least_squares, make_bumps, min_growth,
    product_ceiling, product_outer, rho, BumpFamily, GrowthRow, GrowthTable,
};
pub use petal::{
    half_line_shift, inversion_grid, petal_coeffs, tail_cutoff, truncation_for, PetalFamily, PetalStats,
    HALF_LINE_TAIL,
};
pub use scan::{divergence_scan, OscillationTable, ScanSummary};

use serde::{Deserialize, Serialize};

use crate::error::{NlftError, Result};

/// Parameters of one `(nu, delta, eps)`-daisy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaisyParams {
    pub nu: usize,
    pub delta: f64,
    pub eps: f64,
}

impl DaisyParams {
    pub fn new(nu: usize, delta: f64, eps: f64) -> Result<Self> {
        let p = DaisyParams { nu, delta, eps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 8 || self.nu % 4 != 0 {
            return Err(NlftError::Domain(format!("nu = {} must be a multiple of 4 and at least 8", self.nu)));
        }
        if !(0.0..=0.5).contains(&self.delta) {
            return Err(NlftError::Domain(format!("delta = {} must lie in [0, 0.5]", self.delta)));
        }
        if !(self.eps > 0.0 && self.eps <= 0.2) {
            return Err(NlftError::Domain(format!("eps = {} must lie in (0, 0.2]", self.eps)));
        }
        if self.delta * self.delta * (self.nu as f64).ln() > 1.0 {
            return Err(NlftError::Domain(format!(
                "delta^2 log nu = {} exceeds 1",
                self.delta * self.delta * (self.nu as f64).ln()
            )));
        }
        Ok(())
    }
}

/// Levels of `H` with the final mass `mu` at `n = 0`.
///
/// Level `i` has index `n = n_star + i`; even indices aim at the left
/// semicircle, odd ones at the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub levels: Vec<DaisyParams>,
    pub mu: f64,
    pub n_star: usize,
}

impl Schedule {
    /// `nu_n = 16 * 4^n`, `delta_n = 0.3 * 2^-n`, `eps_n = 0.1 * 2^-n`.
    pub fn desk(levels: usize, n_star: usize, mu: f64) -> Result<Self> {
        let levels = (0..levels)
            .map(|n| {
                let s = 0.5f64.powi(n as i32);
                DaisyParams::new(16 * 4usize.pow(n as u32), 0.3 * s, 0.1 * s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Schedule { levels, mu, n_star })
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(NlftError::Domain("schedule has no levels".into()));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(NlftError::Domain(format!("mu = {} must lie in (0, 1)", self.mu)));
        }
        self.levels.iter().try_for_each(DaisyParams::validate)
    }

    /// Whether level `i` is turned by `pi` to aim at the right semicircle.
    pub fn rotated(&self, i: usize) -> bool {
        (self.n_star + i) % 2 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(DaisyParams::new(16, 0.3, 0.1).is_ok());
        assert!(DaisyParams::new(8, 0.0, 0.1).is_ok());
        assert!(DaisyParams::new(6, 0.3, 0.1).is_err());
        assert!(DaisyParams::new(18, 0.3, 0.1).is_err());
        assert!(DaisyParams::new(16, 0.6, 0.1).is_err());
        assert!(DaisyParams::new(16, 0.3, 0.0).is_err());
        assert!(DaisyParams::new(16, 0.3, 0.3).is_err());
    }

    #[test]
    fn desk_schedule() {
        let s = Schedule::desk(3, 0, 0.5).unwrap();
        assert_eq!(s.levels.iter().map(|p| p.nu).collect::<Vec<_>>(), vec![16, 64, 256]);
        assert!((s.levels[2].delta - 0.075).abs() < 1e-15);
        assert!((s.levels[1].eps - 0.05).abs() < 1e-15);
        assert!(!s.rotated(0) && s.rotated(1));
        assert!(Schedule { mu: 1.0, ..s }.validate().is_err());
    }
}
