use proptest::prelude::*;
use safecov_core::fat_basis::FourierBasis;
use safecov_core::simulation::{profile_disturbance, DisturbanceProfile};

fn rms_residual(basis: &FourierBasis, profile: DisturbanceProfile) -> f64 {
    let samples: Vec<(f64, f64)> = (0..3001)
        .map(|k| {
            let t = 30.0 * k as f64 / 3000.0;
            (t, profile_disturbance(profile, t, 30.0, 1.0).unwrap().x)
        })
        .collect();
    let w = basis.fit(&samples);
    let sq: f64 = samples.iter().map(|&(t, y)| (basis.reconstruct(&w, t) - y).powi(2)).sum();
    (sq / samples.len() as f64).sqrt()
}

#[test]
fn residual_shrinks_with_more_harmonics() {
    for profile in [DisturbanceProfile::Piecewise, DisturbanceProfile::PiecewiseConstantPlateau] {
        let errs: Vec<f64> = (1..=5)
            .map(|l| rms_residual(&FourierBasis::new(l, 30.0).unwrap(), profile))
            .collect();
        for pair in errs.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{errs:?}");
        }
        assert!(errs[4] < errs[0]);
    }
}

#[test]
fn zero_profile_fits_to_zero() {
    let b = FourierBasis::new(5, 30.0).unwrap();
    assert!(rms_residual(&b, DisturbanceProfile::None) == 0.0);
}

proptest! {
    #[test]
    fn basis_is_periodic_and_bounded(l in 1usize..8, period in 0.5..100.0f64, t in -200.0..200.0f64) {
        let b = FourierBasis::new(l, period).unwrap();
        let v = b.eval(t);
        let w = b.eval(t + period);
        prop_assert_eq!(v.len(), 2 * l + 1);
        prop_assert_eq!(v[0], 1.0);
        for (x, y) in v.iter().zip(&w) {
            prop_assert!((x - y).abs() < 1e-9);
            prop_assert!(x.abs() <= 1.0);
        }
        for k in 1..=l {
            let (c, s) = (v[2 * k - 1], v[2 * k]);
            prop_assert!((c * c + s * s - 1.0).abs() < 1e-12);
        }
    }
}
