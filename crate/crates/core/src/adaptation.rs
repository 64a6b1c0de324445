//! Projection-based update laws for the actuator-fault estimate `θ̂` and the
//! disturbance weights `d̂_j`, plus the admissible gain selection that makes
//! the safety certificate non-negative at start-up.

use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::vector::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdaptationError {
    #[error("initial barrier value {0} is not positive; agents start unsafe")]
    UnsafeStart(f64),
    #[error("initial fault estimate {0} exceeds 1/2 in magnitude")]
    FaultEstimateOutOfRange(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("expected {expected} disturbance weights, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Parameter vectors the projection operator acts on.
pub trait Estimate: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn inner(self, other: Self) -> f64;
    fn magnitude(self) -> f64;
}

impl Estimate for f64 {
    #[inline]
    fn inner(self, other: f64) -> f64 {
        self * other
    }
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Estimate for Vec2 {
    #[inline]
    fn inner(self, other: Vec2) -> f64 {
        self.dot(other)
    }
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Convex bounding function `l(x) = (xᵀx − x̄²) / (2ηx̄ + η²)`.
///
/// `l(x) <= 0` on the ball of radius `x̄`, and `l(x) = 1` on the sphere of
/// radius `x̄ + η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingSet {
    pub x_bar: f64,
    pub eta: f64,
}

impl BoundingSet {
    pub fn new(x_bar: f64, eta: f64) -> Self {
        Self { x_bar, eta }
    }

    #[inline]
    fn denom(&self) -> f64 {
        2.0 * self.eta * self.x_bar + self.eta * self.eta
    }

    /// Radius of the `l <= 1` ball.
    pub fn outer_radius(&self) -> f64 {
        self.x_bar + self.eta
    }

    #[inline]
    pub fn value<X: Estimate>(&self, x: X) -> f64 {
        convex_bound(x, self.x_bar, self.eta)
    }

    #[inline]
    pub fn gradient<X: Estimate>(&self, x: X) -> X {
        x * (2.0 / self.denom())
    }

    #[inline]
    pub fn project<X: Estimate>(&self, x: X, y: X) -> X {
        proj(x, y, self.x_bar, self.eta)
    }

    /// Radially rescales `x` back onto the `l <= 1` ball if it has left it.
    pub fn confine<X: Estimate>(&self, x: X) -> X {
        let radius = self.outer_radius();
        let mut out = x;
        let mut norm = out.magnitude();
        while norm > radius {
            out = out * (radius / norm * (1.0 - f64::EPSILON));
            norm = out.magnitude();
        }
        out
    }

    pub fn contains<X: Estimate>(&self, x: X) -> bool {
        x.magnitude() <= self.outer_radius()
    }
}

pub fn convex_bound<X: Estimate>(x: X, x_bar: f64, eta: f64) -> f64 {
    (x.inner(x) - x_bar * x_bar) / (2.0 * eta * x_bar + eta * eta)
}

/// Projection operator: passes `y` through unless `x` is outside the inner
/// ball and `y` points outward, in which case the outward component is
/// scaled down by `l(x)`.
pub fn proj<X: Estimate>(x: X, y: X, x_bar: f64, eta: f64) -> X {
    let set = BoundingSet::new(x_bar, eta);
    let l = set.value(x);
    let grad = set.gradient(x);
    let along = y.inner(grad);
    if l > 0.0 && along > 0.0 {
        y - grad * (l * along / grad.inner(grad))
    } else {
        y
    }
}

/// Per-agent estimates: fault offset `θ̂` and disturbance weights `d̂_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveState {
    pub theta_hat: f64,
    pub d_hat: Vec<Vec2>,
}

impl AdaptiveState {
    pub fn zeros(basis_len: usize) -> Self {
        Self {
            theta_hat: 0.0,
            d_hat: vec![Vec2::ZERO; basis_len],
        }
    }

    pub fn max_d_norm(&self) -> f64 {
        self.d_hat.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// Explicit Euler step followed by re-projection onto the `l <= 1` balls.
    pub fn integrate(&mut self, theta_rate: f64, d_rates: &[Vec2], dt: f64, gains: &AdaptationGains) {
        self.theta_hat = gains
            .theta_set()
            .confine(self.theta_hat + theta_rate * dt);
        for (j, (d, rate)) in self.d_hat.iter_mut().zip(d_rates).enumerate() {
            *d = gains.d_set(j).confine(*d + *rate * dt);
        }
    }

    /// `|θ̂| <= θ̄ + α/2` and `‖d̂_j‖ <= d̄_j + ν` for all `j`.
    pub fn within_bounds(&self, gains: &AdaptationGains) -> bool {
        gains.theta_set().contains(self.theta_hat)
            && self
                .d_hat
                .iter()
                .enumerate()
                .all(|(j, &d)| gains.d_set(j).contains(d))
    }

    /// Effective actuator coefficient estimate `θ̂ + (1 + α)/2`.
    pub fn effectiveness(&self, alpha: f64) -> f64 {
        self.theta_hat + 0.5 * (1.0 + alpha)
    }
}

/// Scenario-level adaptation constants shared by every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationParams {
    pub alpha: f64,
    pub nu: f64,
    pub mu: f64,
    /// Bound `d̄_j` on each true disturbance weight.
    pub d_bar: Vec<f64>,
    /// Fraction of the admissible gain bound actually used.
    pub margin: f64,
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<(), AdaptationError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(AdaptationError::InvalidAlpha(self.alpha));
        }
        let positive = |name: &'static str, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(AdaptationError::NonPositive { name, value })
            }
        };
        positive("nu", self.nu)?;
        positive("mu", self.mu)?;
        positive("gain margin", self.margin)?;
        if self.margin > 1.0 {
            return Err(AdaptationError::NonPositive {
                name: "1 - gain margin",
                value: 1.0 - self.margin,
            });
        }
        for &d in &self.d_bar {
            positive("d_bar", d)?;
        }
        Ok(())
    }
}

/// Per-agent adaptation gains and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationGains {
    pub k: f64,
    pub q: Vec<f64>,
    pub mu: f64,
    pub alpha: f64,
    pub nu: f64,
    pub d_bar: Vec<f64>,
    /// `(1 − α)/2`
    pub theta_bar: f64,
}

impl AdaptationGains {
    pub fn theta_set(&self) -> BoundingSet {
        BoundingSet::new(self.theta_bar, 0.5 * self.alpha)
    }

    pub fn d_set(&self, j: usize) -> BoundingSet {
        BoundingSet::new(self.d_bar[j], self.nu)
    }

    /// `K θ̄² + Σ_j Q_j d̄_j²`, the worst-case estimation-error budget.
    pub fn error_budget(&self) -> f64 {
        self.k * self.theta_bar * self.theta_bar
            + self
                .q
                .iter()
                .zip(&self.d_bar)
                .map(|(q, d)| q * d * d)
                .sum::<f64>()
    }
}

/// Projected rate of the fault estimate.
pub fn theta_update_rhs(state: &AdaptiveState, grad_h_p: Vec2, u: Vec2, gains: &AdaptationGains) -> f64 {
    let raw = -grad_h_p.dot(u) / (2.0 * gains.k) - 0.5 * gains.mu * state.theta_hat;
    gains.theta_set().project(state.theta_hat, raw)
}

/// Projected rates of the disturbance weights, one per basis function.
pub fn d_update_rhs(state: &AdaptiveState, grad_h_p: Vec2, psi: &[f64], gains: &AdaptationGains) -> Vec<Vec2> {
    state
        .d_hat
        .iter()
        .zip(psi)
        .enumerate()
        .map(|(j, (&d, &psi_j))| {
            let raw = grad_h_p * (-psi_j / (2.0 * gains.q[j])) - d * (0.5 * gains.mu);
            gains.d_set(j).project(d, raw)
        })
        .collect()
}

/// Largest admissible `K` and `Q_j` for the given start-up barrier value and
/// initial estimates, scaled by `params.margin`.
pub fn select_gains(
    h0: f64,
    theta_hat0: f64,
    d_hat0: &[Vec2],
    params: &AdaptationParams,
) -> Result<AdaptationGains, AdaptationError> {
    params.validate()?;
    if !(h0 > 0.0) {
        return Err(AdaptationError::UnsafeStart(h0));
    }
    if !(theta_hat0.abs() <= 0.5) {
        return Err(AdaptationError::FaultEstimateOutOfRange(theta_hat0));
    }
    if d_hat0.len() != params.d_bar.len() {
        return Err(AdaptationError::LengthMismatch {
            expected: params.d_bar.len(),
            got: d_hat0.len(),
        });
    }
    let theta_bar = 0.5 * (1.0 - params.alpha);
    let n = params.d_bar.len() as f64;
    let k = params.margin * h0 / (2.0 * (theta_hat0.abs() + theta_bar).powi(2));
    let q = d_hat0
        .iter()
        .zip(&params.d_bar)
        .map(|(d0, &bar)| params.margin * h0 / (2.0 * n * (d0.norm() + bar).powi(2)))
        .collect();
    Ok(AdaptationGains {
        k,
        q,
        mu: params.mu,
        alpha: params.alpha,
        nu: params.nu,
        d_bar: params.d_bar.clone(),
        theta_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_params(n: usize) -> AdaptationParams {
        AdaptationParams {
            alpha: 0.1,
            nu: 0.1,
            mu: 2.0,
            d_bar: vec![20.0; n],
            margin: 0.99,
        }
    }

    fn simple_gains() -> AdaptationGains {
        AdaptationGains {
            k: 1.0,
            q: vec![1.0],
            mu: 2.0,
            alpha: 0.1,
            nu: 0.1,
            d_bar: vec![20.0],
            theta_bar: 0.45,
        }
    }

    #[test]
    fn convex_bound_values() {
        assert!(convex_bound(Vec2::new(3.0, 4.0), 5.0, 0.3).abs() < 1e-15);
        let l = convex_bound(0.5, 0.45, 0.05);
        assert!((l - 1.0).abs() < 1e-12, "{l}");
        let l0 = convex_bound(0.0, 0.45, 0.05);
        assert!((l0 + 0.2025 / 0.0475).abs() < 1e-12);
    }

    #[test]
    fn proj_cases() {
        // Interior: untouched.
        assert_eq!(proj(0.1, 7.0, 0.45, 0.05), 7.0);
        // On the outer sphere, outward radial rate is removed completely.
        assert!(proj(0.5, 0.5, 0.45, 0.05).abs() < 1e-12);
        let x = Vec2::new(0.3, 0.4); // ‖x‖ = 0.5
        let y = proj(x, x * 2.0, 0.45, 0.05);
        assert!(y.norm() < 1e-12, "{y}");
        // Outside the inner ball but pointing inward: untouched.
        assert_eq!(proj(0.48, -1.0, 0.45, 0.05), -1.0);
        // Tangential part survives.
        let t = proj(x, Vec2::new(-0.4, 0.3), 0.45, 0.05);
        assert_eq!(t, Vec2::new(-0.4, 0.3));
        assert_eq!(proj(x, Vec2::ZERO, 0.45, 0.05), Vec2::ZERO);
    }

    #[test]
    fn theta_rates() {
        let g = simple_gains();
        let s = AdaptiveState::zeros(1);
        assert_eq!(theta_update_rhs(&s, Vec2::ZERO, Vec2::new(3.0, 1.0), &g), 0.0);
        let r = theta_update_rhs(&s, Vec2::new(-2.0, 0.0), Vec2::new(1.0, 0.0), &g);
        assert!((r - 1.0).abs() < 1e-15);
        let on_bound = AdaptiveState {
            theta_hat: 0.5,
            d_hat: vec![Vec2::ZERO],
        };
        let r = theta_update_rhs(&on_bound, Vec2::new(-20.0, 0.0), Vec2::new(1.0, 0.0), &g);
        assert!(r.abs() < 1e-12, "{r}");
    }

    #[test]
    fn d_rates() {
        let g = simple_gains();
        let s = AdaptiveState::zeros(1);
        assert_eq!(d_update_rhs(&s, Vec2::ZERO, &[1.0], &g), vec![Vec2::ZERO]);
        assert_eq!(d_update_rhs(&s, Vec2::new(3.0, 3.0), &[0.0], &g), vec![Vec2::ZERO]);
        let r = d_update_rhs(&s, Vec2::new(-2.0, 0.0), &[1.0], &g);
        assert!(r[0].distance(Vec2::new(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn gains_from_admissible_bounds() {
        let g = select_gains(0.75, 0.0, &[Vec2::ZERO; 11], &paper_params(11)).unwrap();
        assert!((g.k - 0.99 * 0.75 / (2.0 * 0.2025)).abs() < 1e-12);
        assert!((g.k / 0.99 - 1.851_851_851_851_851_6).abs() < 1e-12);
        for q in &g.q {
            assert!((q / 0.99 - 8.522_727_272_727_273e-5).abs() < 1e-17);
        }
        assert!((g.theta_bar - 0.45).abs() < 1e-15);
        // The worst-case error budget stays below h0.
        assert!(g.error_budget() < 0.75);
    }

    #[test]
    fn gain_selection_errors() {
        let p = paper_params(3);
        let z = [Vec2::ZERO; 3];
        assert_eq!(select_gains(0.0, 0.0, &z, &p), Err(AdaptationError::UnsafeStart(0.0)));
        assert_eq!(
            select_gains(1.0, 0.6, &z, &p),
            Err(AdaptationError::FaultEstimateOutOfRange(0.6))
        );
        assert!(matches!(
            select_gains(1.0, 0.0, &z[..2], &p),
            Err(AdaptationError::LengthMismatch { .. })
        ));
        let mut bad = p.clone();
        bad.alpha = 1.0;
        assert!(matches!(select_gains(1.0, 0.0, &z, &bad), Err(AdaptationError::InvalidAlpha(_))));
    }

    #[test]
    fn confine_is_exact() {
        let set = BoundingSet::new(0.45, 0.05);
        assert!(set.confine(0.7_f64).abs() <= 0.5);
        assert!(set.confine(-3.0_f64).abs() <= 0.5);
        let dset = BoundingSet::new(20.0, 0.1);
        for k in 0..1000 {
            let a = k as f64 * 0.0123;
            let v = dset.confine(Vec2::new(a.cos(), a.sin()) * 37.0);
            assert!(v.norm() <= 20.1);
        }
    }
}
