use num_complex::Complex64;
use proptest::prelude::*;

use nlft_core::harmonic::{arg_outer, plancherel_residual};
use nlft_core::inverse::inverse_halfline;
use nlft_core::nlft::{forward, ComplexSequence, GridNlft};
use nlft_core::opuc::{connection_residual, schur_grid, weight_from_schur, VerblunskyCoeffs};
use nlft_core::verify::unwrap_phase;
use nlft_core::Execution;

fn halfline(max_len: usize, max_abs: f64) -> impl Strategy<Value = ComplexSequence> {
    prop::collection::vec((0.0..max_abs, 0.0..std::f64::consts::TAU), 1..=max_len).prop_map(|v| {
        ComplexSequence::new(1, v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_then_inverse(f in halfline(12, 0.3)) {
        let b = forward(&f).unwrap().b.sample_on_grid(1024).unwrap();
        let g = inverse_halfline(&b, 12).unwrap();
        for n in 1..=12 {
            prop_assert!((f.get(n) - g.get(n)).norm() < 1e-9);
        }
    }

    #[test]
    fn grid_and_laurent_transforms_agree(f in halfline(24, 0.9)) {
        let p = forward(&f).unwrap();
        let (a, b) = GridNlft::new(256).unwrap().sample(&f, Execution::default());
        let scale = p.a.coeffs().iter().map(|c| c.norm()).sum::<f64>();
        prop_assert!(a.max_abs_diff(&p.a_star().sample_on_grid(256).unwrap()) <= 1e-13 * scale);
        prop_assert!(b.max_abs_diff(&p.b.sample_on_grid(256).unwrap()) <= 1e-13 * scale);
    }

    #[test]
    fn sequences_are_verblunsky_coefficients(f in halfline(16, 0.6)) {
        let g = VerblunskyCoeffs::from_sequence(&f).unwrap();
        prop_assert!(connection_residual(&g, g.len(), 512).unwrap() < 1e-10);
        prop_assert!(plancherel_residual(&f, 1024).unwrap() < 1e-10);
    }

    #[test]
    fn weight_is_positive_with_unit_mass(f in halfline(8, 0.4)) {
        let w = weight_from_schur(&schur_grid(&f, 16384).unwrap()).unwrap();
        prop_assert!(w.values().iter().all(|&v| v > 0.0));
        prop_assert!((w.mean() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn argument_branch_end_to_end() {
    let f = ComplexSequence::new(-3, vec![Complex64::new(0.4, 0.2), Complex64::new(-0.3, 0.1), Complex64::new(0.2, -0.4)]).unwrap();
    let p = forward(&f).unwrap();
    let a = p.a_star().sample_on_grid(8192).unwrap();
    let u = unwrap_phase(a.values());
    let h = arg_outer(&p.b.sample_on_grid(8192).unwrap());
    let turns = ((h.values()[0] - u[0]) / std::f64::consts::TAU).round();
    for k in 0..8192 {
        assert!((u[k] + turns * std::f64::consts::TAU - h.values()[k]).abs() < 1e-6);
    }
}
