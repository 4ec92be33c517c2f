use num_complex::Complex64;

use crate::error::{NlftError, Result};

/// A finitely supported sequence `F: Z -> D` (every `|F_n| < 1`).
///
/// Entries are stored densely from `offset`; indices outside the stored
/// window are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    offset: i64,
    entries: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(offset: i64, entries: Vec<Complex64>) -> Result<Self> {
        for (i, f) in entries.iter().enumerate() {
            if !(f.re.is_finite() && f.im.is_finite()) || f.norm() >= 1.0 {
                return Err(NlftError::Domain(format!(
                    "|F_{}| = {} is not < 1",
                    offset + i as i64,
                    f.norm()
                )));
            }
        }
        Ok(ComplexSequence { offset, entries })
    }

    pub fn zero() -> Self {
        ComplexSequence { offset: 0, entries: Vec::new() }
    }

    /// `value` at index `n`, zero elsewhere.
    pub fn single(n: i64, value: Complex64) -> Result<Self> {
        Self::new(n, vec![value])
    }

    /// Builds from `(index, value)` pairs.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Result<Self> {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Ok(Self::zero());
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut entries = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(n, v) in terms {
            entries[(n - lo) as usize] += v;
        }
        Self::new(lo, entries)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// One past the last stored index.
    pub fn end(&self) -> i64 {
        self.offset + self.entries.len() as i64
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let i = n - self.offset;
        if i < 0 || i >= self.entries.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.entries[i as usize]
        }
    }

    /// `(first, last)` indices with nonzero entries, `None` for the zero sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.entries.iter().position(|f| *f != Complex64::new(0.0, 0.0))?;
        let last = self.entries.iter().rposition(|f| *f != Complex64::new(0.0, 0.0)).unwrap();
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_none()
    }

    /// Nonzero entries in increasing index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != Complex64::new(0.0, 0.0))
            .map(move |(i, f)| (self.offset + i as i64, *f))
    }

    /// Same sequence with the stored window cut down to its support.
    pub fn trimmed(&self) -> Self {
        match self.support() {
            None => Self::zero(),
            Some((lo, hi)) => ComplexSequence {
                offset: lo,
                entries: self.entries[(lo - self.offset) as usize..=(hi - self.offset) as usize].to_vec(),
            },
        }
    }

    fn restrict(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.offset);
        let hi = hi.min(self.end() - 1);
        if lo > hi {
            return Self::zero();
        }
        ComplexSequence {
            offset: lo,
            entries: self.entries[(lo - self.offset) as usize..=(hi - self.offset) as usize].to_vec(),
        }
    }

    /// `F^<N>`: entries with `|n| <= N`.
    pub fn truncate_sym(&self, n: i64) -> Self {
        self.restrict(-n, n)
    }

    /// `F^{<=M}`: entries with `n <= M`.
    pub fn truncate_upto(&self, m: i64) -> Self {
        self.restrict(i64::MIN, m)
    }

    /// Entries with `lo <= n <= hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        self.restrict(lo, hi)
    }

    /// `F_{->M}`: `(F_{->M})_n = F_{n-M}`.
    pub fn shifted(&self, m: i64) -> Self {
        ComplexSequence { offset: self.offset + m, entries: self.entries.clone() }
    }

    /// `n -> F_n omega^n` for unimodular `omega`; rotates the transform by `omega`.
    pub fn modulated(&self, omega: Complex64) -> Self {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, f)| f * unit_power(omega, self.offset + i as i64))
            .collect();
        ComplexSequence { offset: self.offset, entries }
    }

    /// Entrywise sum. Fails if a summed entry leaves the disc.
    pub fn add(&self, other: &ComplexSequence) -> Result<Self> {
        if other.entries.is_empty() {
            return Ok(self.clone());
        }
        if self.entries.is_empty() {
            return Ok(other.clone());
        }
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let entries = (lo..hi).map(|n| self.get(n) + other.get(n)).collect();
        Self::new(lo, entries)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|f| f.norm()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.entries.iter().map(|f| f.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|f| f.norm()).fold(0.0, f64::max)
    }

    /// `-sum log(1 - |F_n|^2)`.
    pub fn log_energy(&self) -> f64 {
        self.entries.iter().map(|f| -(-f.norm_sqr()).ln_1p()).sum()
    }
}

/// `omega^n` for unimodular `omega`, via the angle so large `n` do not drift.
pub(crate) fn unit_power(omega: Complex64, n: i64) -> Complex64 {
    let arg = omega.arg();
    let turns = (arg / std::f64::consts::TAU) * n as f64;
    Complex64::from_polar(1.0, std::f64::consts::TAU * turns.fract())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_points_outside_the_disc() {
        assert!(ComplexSequence::new(0, vec![c(0.5), c(1.0)]).is_err());
        assert!(ComplexSequence::new(0, vec![Complex64::new(0.8, 0.7)]).is_err());
        assert!(ComplexSequence::new(0, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexSequence::new(0, vec![c(0.999)]).is_ok());
    }

    #[test]
    fn truncations_and_shift() {
        let f = ComplexSequence::new(-3, (0..7).map(|k| c(0.1 * k as f64)).collect()).unwrap();
        assert_eq!(f.support(), Some((-2, 3)));
        let t = f.truncate_sym(1);
        assert_eq!(t.offset(), -1);
        assert_eq!(t.entries().len(), 3);
        assert_eq!(t.get(1), c(0.4));
        let u = f.truncate_upto(0);
        assert_eq!(u.support(), Some((-2, 0)));
        assert_eq!(f.truncate_upto(-10), ComplexSequence::zero());
        let s = f.shifted(5);
        assert_eq!(s.get(5 + 2), f.get(2));
        assert_eq!(s.support(), Some((3, 8)));
    }

    #[test]
    fn add_checks_the_disc() {
        let f = ComplexSequence::single(0, c(0.6)).unwrap();
        let g = ComplexSequence::single(0, c(0.5)).unwrap();
        assert!(f.add(&g).is_err());
        let h = f.add(&g.shifted(3)).unwrap();
        assert_eq!(h.support(), Some((0, 3)));
    }

    #[test]
    fn modulation_uses_absolute_index() {
        let omega = Complex64::from_polar(1.0, 0.3);
        let f = ComplexSequence::new(-2, vec![c(0.1), c(0.2), c(0.3)]).unwrap();
        let g = f.modulated(omega);
        for n in -2..=0 {
            let expect = f.get(n) * omega.powi(n as i32);
            assert!((g.get(n) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_power_is_stable_for_large_exponents() {
        let omega = Complex64::from_polar(1.0, std::f64::consts::TAU / 64.0);
        assert!((unit_power(omega, 64 * 1_000_003 + 16) - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        assert!((unit_power(omega, -16) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }
}
