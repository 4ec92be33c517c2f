//! Forward SU(1,1) nonlinear Fourier transform for finitely supported
//! sequences on the integers.
//!
//! Each site contributes the renormalized transfer matrix
//!
//! ```text
//!            1           [ 1            conj(F_n) z^{-n} ]
//! M_n = ------------     [                               ]
//!       sqrt(1-|F_n|^2)  [ F_n z^n      1                ]
//! ```
//!
//! and the product is accumulated with later sites on the left,
//! `X = M_last ... M_first`, giving `X = [[a, b^(*)], [b, a^(*)]]`.

mod grid;
mod sequence;

pub use grid::{GridNlft, ScanStep};
pub use sequence::ComplexSequence;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlftError, Result};
use crate::laurent::{CircleGrid, LaurentPoly};

/// `(a, b)` of a finitely supported sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlftPair {
    pub a: LaurentPoly,
    pub b: LaurentPoly,
}

impl NlftPair {
    pub fn identity() -> Self {
        NlftPair { a: LaurentPoly::one(), b: LaurentPoly::zero() }
    }

    pub fn a_star(&self) -> LaurentPoly {
        self.a.star()
    }

    pub fn b_star(&self) -> LaurentPoly {
        self.b.star()
    }

    /// Samples of `b / a^(*)` on a grid of `size` points.
    pub fn ratio_on_grid(&self, size: usize) -> Result<CircleGrid> {
        let b = self.b.sample_on_grid(size)?;
        let a_star = self.a_star().sample_on_grid(size)?;
        Ok(b.zip_with(&a_star, |b, a| b / a))
    }
}

/// All four entries of the transfer product, accumulated independently.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferProduct {
    pub a: LaurentPoly,
    pub b_star: LaurentPoly,
    pub b: LaurentPoly,
    pub a_star: LaurentPoly,
}

impl TransferProduct {
    pub fn identity() -> Self {
        TransferProduct {
            a: LaurentPoly::one(),
            b_star: LaurentPoly::zero(),
            b: LaurentPoly::zero(),
            a_star: LaurentPoly::one(),
        }
    }

    /// Left-multiplies by the transfer matrix of site `n`.
    pub fn push(&mut self, n: i64, f: Complex64) {
        let scale = Complex64::new(1.0 / (1.0 - f.norm_sqr()).sqrt(), 0.0);
        let fc = f.conj();
        let a = self.a.add_scaled_shifted(fc, -n, &self.b).scale(scale);
        let b_star = self.b_star.add_scaled_shifted(fc, -n, &self.a_star).scale(scale);
        let b = self.b.add_scaled_shifted(f, n, &self.a).scale(scale);
        let a_star = self.a_star.add_scaled_shifted(f, n, &self.b_star).scale(scale);
        *self = TransferProduct { a, b_star, b, a_star };
    }

    pub fn pair(&self) -> NlftPair {
        NlftPair { a: self.a.clone(), b: self.b.clone() }
    }
}

/// Full transfer product over the support of `f`, in increasing `n`.
pub fn transfer_product(f: &ComplexSequence) -> TransferProduct {
    let mut x = TransferProduct::identity();
    for (n, v) in f.nonzero() {
        x.push(n, v);
    }
    x
}

/// `(a, b)` of `f`.
///
/// The sequence type already guarantees `|F_n| < 1`; this validates again so
/// entries assembled elsewhere cannot slip through.
pub fn forward(f: &ComplexSequence) -> Result<NlftPair> {
    if let Some((n, v)) = f.nonzero().find(|(_, v)| v.norm() >= 1.0) {
        return Err(NlftError::Domain(format!("|F_{n}| = {} is not < 1", v.norm())));
    }
    Ok(transfer_product(f).pair())
}

/// Samples of `r = b / a^(*)` on a grid of `size` points.
pub fn ratio(f: &ComplexSequence, size: usize) -> Result<CircleGrid> {
    forward(f)?.ratio_on_grid(size)
}

/// Transform of `F + G_{->N}` assembled from the transforms of `F` and `G`:
///
/// ```text
/// a^(*) = a^(*)(F) a^(*)(G) + z^N b^(*)(F) b(G)
/// b     = z^N b(G) a(F)     + b(F) a^(*)(G)
/// ```
///
/// Requires every index of `F` to lie strictly below every index of `G_{->N}`.
pub fn concat_disjoint(f: &ComplexSequence, g: &ComplexSequence, shift: i64) -> Result<NlftPair> {
    if let (Some((_, f_hi)), Some((g_lo, _))) = (f.support(), g.support()) {
        if f_hi >= g_lo + shift {
            return Err(NlftError::SupportOverlap { first_end: f_hi, second_start: g_lo + shift });
        }
    }
    let pf = forward(f)?;
    let pg = forward(g)?;
    let one = Complex64::new(1.0, 0.0);
    let a_star = (&pf.a_star() * &pg.a_star()).add_scaled_shifted(one, shift, &(&pf.b_star() * &pg.b));
    let b = (&pf.b * &pg.a_star()).add_scaled_shifted(one, shift, &(&pg.b * &pf.a));
    Ok(NlftPair { a: a_star.star(), b })
}

/// Largest coefficient of `a^(*) a - b^(*) b - 1`.
pub fn su11_residual(p: &NlftPair) -> f64 {
    let lhs = &(&p.a_star() * &p.a) - &(&p.b_star() * &p.b);
    (&lhs - &LaurentPoly::one()).max_abs_coeff()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn seq_strategy(max_len: usize, max_abs: f64) -> impl Strategy<Value = ComplexSequence> {
        (-8i64..8, prop::collection::vec((0.0..max_abs, 0.0..std::f64::consts::TAU), 0..max_len)).prop_map(
            |(off, v)| ComplexSequence::new(off, v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect()).unwrap(),
        )
    }

    #[test]
    fn empty_product_is_identity() {
        let p = forward(&ComplexSequence::zero()).unwrap();
        assert_eq!(p, NlftPair::identity());
        assert_eq!(su11_residual(&p), 0.0);
    }

    #[test]
    fn single_site() {
        let p = forward(&ComplexSequence::single(0, c(0.5)).unwrap()).unwrap();
        assert_eq!(p.a.lo(), 0);
        assert_eq!(p.a.hi(), 0);
        assert!((p.a.coeff(0) - c(2.0 / 3f64.sqrt())).norm() < 1e-15);
        assert!((p.b.coeff(0) - c(1.0 / 3f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn two_sites() {
        let f = ComplexSequence::new(0, vec![c(0.5), c(0.5)]).unwrap();
        let p = forward(&f).unwrap();
        // a = (4/3)(1 + z^{-1}/4), b = (2/3)(1 + z)
        assert_eq!((p.a.lo(), p.a.hi()), (-1, 0));
        assert!((p.a.coeff(0) - c(4.0 / 3.0)).norm() < 1e-15);
        assert!((p.a.coeff(-1) - c(1.0 / 3.0)).norm() < 1e-15);
        assert_eq!((p.b.lo(), p.b.hi()), (0, 1));
        assert!((p.b.coeff(0) - c(2.0 / 3.0)).norm() < 1e-15);
        assert!((p.b.coeff(1) - c(2.0 / 3.0)).norm() < 1e-15);
        assert!(su11_residual(&p) <= 1e-12);
    }

    #[test]
    fn four_entries_are_consistent() {
        let f = ComplexSequence::new(-2, vec![Complex64::new(0.3, 0.2), c(-0.4), Complex64::new(0.0, 0.5)]).unwrap();
        let x = transfer_product(&f);
        assert!((&x.a_star - &x.a.star()).max_abs_coeff() < 1e-15);
        assert!((&x.b_star - &x.b.star()).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let r = ratio(&ComplexSequence::zero(), 16).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let r = ratio(&ComplexSequence::single(0, c(0.5)).unwrap(), 16).unwrap();
        assert!(r.values().iter().all(|v| (v - c(0.5)).norm() < 1e-15));
    }

    #[test]
    fn ratio_below_one_for_small_l1() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let len = rng.gen_range(1..24);
            let mut v: Vec<Complex64> =
                (0..len).map(|_| Complex64::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..6.3))).collect();
            let l1: f64 = v.iter().map(|x| x.norm()).sum();
            v.iter_mut().for_each(|x| *x *= 0.5 / l1);
            let f = ComplexSequence::new(rng.gen_range(-10..10), v).unwrap();
            assert!(ratio(&f, 4096).unwrap().max_abs() < 1.0);
        }
    }

    #[test]
    fn concat_shifted_g_after_zero() {
        let g = ComplexSequence::new(-1, vec![c(0.2), Complex64::new(0.1, -0.3)]).unwrap();
        let p = concat_disjoint(&ComplexSequence::zero(), &g, 5).unwrap();
        let q = forward(&g).unwrap();
        assert!((&p.a - &q.a).max_abs_coeff() < 1e-15);
        assert!((&p.b - &q.b.shift(5)).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn concat_two_single_sites() {
        let f = ComplexSequence::single(0, c(0.5)).unwrap();
        let g = ComplexSequence::single(0, c(0.5)).unwrap();
        let p = concat_disjoint(&f, &g, 3).unwrap();
        let q = forward(&ComplexSequence::from_terms(&[(0, c(0.5)), (3, c(0.5))]).unwrap()).unwrap();
        assert!((&p.a - &q.a).max_abs_coeff() < 1e-15);
        assert!((&p.b - &q.b).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn concat_rejects_overlap() {
        let f = ComplexSequence::new(0, vec![c(0.1); 4]).unwrap();
        let g = ComplexSequence::new(-2, vec![c(0.1); 3]).unwrap();
        assert!(matches!(concat_disjoint(&f, &g, 5), Err(NlftError::SupportOverlap { .. })));
        assert!(concat_disjoint(&f, &g, 6).is_ok());
    }

    /// Unrenormalized recursion `X_n = Omega_n diag(z, 1) X_{n-1}` starting
    /// from `diag(z^{start}, 1)`; returns the determinant at `n = end`.
    fn unrenormalized_det(f: &ComplexSequence, start: i64, end: i64) -> LaurentPoly {
        let one = c(1.0);
        let mut x = [
            [LaurentPoly::monomial(one, start - 1), LaurentPoly::zero()],
            [LaurentPoly::zero(), LaurentPoly::one()],
        ];
        for n in start..=end {
            let v = f.get(n);
            let s = c(1.0 / (1.0 - v.norm_sqr()).sqrt());
            // diag(z, 1) X
            let top = [x[0][0].shift(1), x[0][1].shift(1)];
            let bot = [x[1][0].clone(), x[1][1].clone()];
            let nx = [
                [top[0].add_scaled_shifted(v.conj(), 0, &bot[0]).scale(s), top[1].add_scaled_shifted(v.conj(), 0, &bot[1]).scale(s)],
                [bot[0].add_scaled_shifted(v, 0, &top[0]).scale(s), bot[1].add_scaled_shifted(v, 0, &top[1]).scale(s)],
            ];
            x = nx;
        }
        &(&x[0][0] * &x[1][1]) - &(&x[0][1] * &x[1][0])
    }

    #[test]
    fn unrenormalized_determinant_is_z_to_the_n() {
        let f = ComplexSequence::new(-2, vec![Complex64::new(0.3, 0.1), c(-0.6), Complex64::new(0.0, 0.4), c(0.2)]).unwrap();
        for end in -2..=3 {
            let det = unrenormalized_det(&f, -3, end);
            let expect = LaurentPoly::monomial(c(1.0), end);
            assert!((&det - &expect).max_abs_coeff() < 1e-13, "n = {end}");
        }
    }

    #[test]
    fn renormalization_matches_unrenormalized_product() {
        // X_n = diag(z^n, 1) X~_n, so the bottom row of X_n is the bottom row of X~_n
        let f = ComplexSequence::new(0, vec![c(0.3), Complex64::new(0.0, -0.2), c(0.45)]).unwrap();
        let x = transfer_product(&f);
        // columns of X_{-1} = diag(z^{-1}, 1)
        let mut raw = [LaurentPoly::monomial(c(1.0), -1), LaurentPoly::zero()];
        let mut raw2 = [LaurentPoly::zero(), LaurentPoly::one()];
        for n in 0..3 {
            let v = f.get(n);
            let s = c(1.0 / (1.0 - v.norm_sqr()).sqrt());
            let top = [raw[0].shift(1), raw2[0].shift(1)];
            raw = [top[0].add_scaled_shifted(v.conj(), 0, &raw[1]).scale(s), raw[1].add_scaled_shifted(v, 0, &top[0]).scale(s)];
            raw2 = [top[1].add_scaled_shifted(v.conj(), 0, &raw2[1]).scale(s), raw2[1].add_scaled_shifted(v, 0, &top[1]).scale(s)];
        }
        assert!((&raw[1] - &x.b).max_abs_coeff() < 1e-14);
        assert!((&raw2[1] - &x.a_star).max_abs_coeff() < 1e-14);
        assert!((&raw[0] - &x.a.shift(2)).max_abs_coeff() < 1e-14);
    }

    proptest! {
        #[test]
        fn su11_identity_holds(f in seq_strategy(20, 0.9)) {
            let p = forward(&f).unwrap();
            // rounding the coefficients alone costs about eps * |a|^2
            let scale: f64 = p.a.coeffs().iter().map(|c| c.norm_sqr()).sum();
            prop_assert!(su11_residual(&p) <= 1e-9 + 1e-12 * scale);
        }

        #[test]
        fn su11_identity_holds_at_moderate_size(f in seq_strategy(32, 0.5)) {
            let p = forward(&f).unwrap();
            prop_assert!(su11_residual(&p) <= 1e-9);
        }

        #[test]
        fn shift_covariance_is_exact(f in seq_strategy(12, 0.9), m in -20i64..20) {
            let p = forward(&f).unwrap();
            let q = forward(&f.shifted(m)).unwrap();
            prop_assert_eq!(&q.a, &p.a);
            prop_assert_eq!(&q.b, &p.b.shift(m));
        }

        #[test]
        fn a_star_dominates_on_circle(f in seq_strategy(12, 0.9)) {
            let p = forward(&f).unwrap();
            let g = p.a_star().sample_on_grid(256).unwrap();
            prop_assert!(g.values().iter().all(|v| v.norm() >= 1.0 - 1e-12));
        }

        #[test]
        fn concat_matches_forward_of_sum(f in seq_strategy(10, 0.6), g in seq_strategy(10, 0.6), gap in 1i64..6) {
            let shift = match (f.support(), g.support()) {
                (Some((_, fh)), Some((gl, _))) => fh - gl + gap,
                _ => gap,
            };
            let p = concat_disjoint(&f, &g, shift).unwrap();
            let q = forward(&f.add(&g.shifted(shift)).unwrap()).unwrap();
            prop_assert!((&p.a - &q.a).max_abs_coeff() <= 1e-10);
            prop_assert!((&p.b - &q.b).max_abs_coeff() <= 1e-10);

            let r_sum = q.ratio_on_grid(512).unwrap();
            let r_f = ratio(&f, 512).unwrap();
            let r_g = ratio(&g, 512).unwrap();
            for k in 0..512 {
                let rg = r_g.values()[k].norm();
                prop_assert!((r_sum.values()[k] - r_f.values()[k]).norm() <= rg / (1.0 - rg) + 1e-12);
            }
        }
    }
}
