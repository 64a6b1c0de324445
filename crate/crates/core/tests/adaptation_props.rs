use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safecov_core::adaptation::{
    convex_bound, d_update_rhs, proj, select_gains, theta_update_rhs, AdaptationParams, AdaptiveState,
};
use safecov_core::safety_filter::hbar_diagnostic;
use safecov_core::Vec2;

fn random_vec(rng: &mut ChaCha8Rng, radius: f64) -> Vec2 {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Vec2::new(r * phi.cos(), r * phi.sin())
}

#[test]
fn projection_never_points_away_from_admissible_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let x_bar = rng.gen_range(0.05..25.0);
        let eta = rng.gen_range(0.01..1.0);
        let x_star = random_vec(&mut rng, x_bar);
        assert!(convex_bound(x_star, x_bar, eta) <= 0.0);
        let x = random_vec(&mut rng, 1.5 * (x_bar + eta));
        let y = random_vec(&mut rng, 100.0);
        let lhs = (x - x_star).dot(proj(x, y, x_bar, eta) - y);
        assert!(lhs <= 1e-12, "{lhs}");

        let s_star = rng.gen_range(-x_bar..=x_bar);
        let s = rng.gen_range(-1.5 * (x_bar + eta)..1.5 * (x_bar + eta));
        let v = rng.gen_range(-100.0..100.0);
        assert!((s - s_star) * (proj(s, v, x_bar, eta) - v) <= 1e-12);
    }
}

#[test]
fn projected_rate_keeps_outer_ball_invariant() {
    // On the sphere l = 1 the projected rate has no outward component.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let x_bar = rng.gen_range(0.1..25.0);
        let eta = rng.gen_range(0.01..1.0);
        let dir = random_vec(&mut rng, 1.0);
        if dir.norm() < 1e-6 {
            continue;
        }
        let x = dir / dir.norm() * (x_bar + eta);
        let y = random_vec(&mut rng, 50.0);
        let outward = proj(x, y, x_bar, eta).dot(x);
        assert!(outward <= 1e-9 * y.norm() * x.norm(), "{outward}");
    }
}

fn params(n: usize) -> AdaptationParams {
    AdaptationParams {
        alpha: 0.1,
        nu: 0.1,
        mu: 2.0,
        d_bar: vec![20.0; n],
        margin: 0.99,
    }
}

#[test]
fn estimates_stay_bounded_under_arbitrary_excitation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 11;
    let gains = select_gains(0.0525, 0.0, &vec![Vec2::ZERO; n], &params(n)).unwrap();
    let mut est = AdaptiveState::zeros(n);
    for _ in 0..20_000 {
        let grad = random_vec(&mut rng, 5.0);
        let u = random_vec(&mut rng, 1000.0);
        let psi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let th = theta_update_rhs(&est, grad, u, &gains);
        let dr = d_update_rhs(&est, grad, &psi, &gains);
        est.integrate(th, &dr, 0.005, &gains);
        assert!(est.theta_hat.abs() <= 0.5);
        assert!(est.max_d_norm() <= 20.1);
        assert!(est.effectiveness(0.1) >= 0.05);
        assert!(est.within_bounds(&gains));
    }
}

#[test]
fn initial_certificate_is_nonnegative_for_worst_case_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2_000 {
        let n = rng.gen_range(1..12);
        let h0 = rng.gen_range(1e-4..5.0);
        let p = params(n);
        let gains = select_gains(h0, 0.0, &vec![Vec2::ZERO; n], &p).unwrap();
        let theta_err = 0.5 * (1.0 - p.alpha) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let d_err: Vec<Vec2> = (0..n)
            .map(|_| {
                let v = random_vec(&mut rng, 1.0);
                v / v.norm().max(1e-12) * 20.0
            })
            .collect();
        let hbar = hbar_diagnostic(h0, theta_err, &d_err, &gains);
        assert!(hbar >= 0.0, "{hbar}");
    }
}
