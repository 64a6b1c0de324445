//! Pairwise barrier, uncertainty-robust barrier constraint, its closed-form
//! quadratic program, and the estimation-error-discounted certificate.

use thiserror::Error;

use crate::adaptation::{AdaptationGains, AdaptiveState};
use crate::vector::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SafetyError {
    #[error("agent coincides with neighbour {neighbor}; barrier gradient vanishes")]
    Collision { neighbor: usize },
    #[error("safety radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("barrier QP is infeasible (a = 0, b = {b})")]
    Infeasible { b: f64 },
}

/// Barrier `h = ‖p − z‖² − (2 r_safe)²` against one neighbour, with its
/// gradients and the robustness margin `ζ = ‖∂h/∂p‖ E + ‖∂h/∂z‖ V_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierEvaluation {
    pub h: f64,
    pub grad_p: Vec2,
    pub grad_z: Vec2,
    pub neighbor_id: usize,
    pub zeta: f64,
}

/// Constraint `a · u + b >= 0` on the control input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConstraint {
    pub a: Vec2,
    pub b: f64,
}

impl LinearConstraint {
    pub fn slack(&self, u: Vec2) -> f64 {
        self.a.dot(u) + self.b
    }
}

pub fn barrier(
    p: Vec2,
    z: Vec2,
    neighbor_id: usize,
    r_safe: f64,
    approx_error_bound: f64,
    neighbor_speed_bound: f64,
) -> Result<BarrierEvaluation, SafetyError> {
    if !(r_safe > 0.0) {
        return Err(SafetyError::InvalidRadius(r_safe));
    }
    let diff = p - z;
    if diff == Vec2::ZERO {
        return Err(SafetyError::Collision { neighbor: neighbor_id });
    }
    let grad_p = diff * 2.0;
    let grad_z = -grad_p;
    let d_safe = 2.0 * r_safe;
    Ok(BarrierEvaluation {
        h: diff.norm_squared() - d_safe * d_safe,
        grad_p,
        grad_z,
        neighbor_id,
        zeta: grad_p.norm() * approx_error_bound + grad_z.norm() * neighbor_speed_bound,
    })
}

/// Barrier constraint with the current estimates:
/// `a = (θ̂ + (1+α)/2) ∂h/∂p`,
/// `b = ∂h/∂pᵀ Σ_j d̂_j ψ_j − ζ + (μ/2)(h − K θ̄² − Σ_j Q_j d̄_j²)`.
pub fn assemble_constraint(
    be: &BarrierEvaluation,
    est: &AdaptiveState,
    gains: &AdaptationGains,
    psi: &[f64],
    alpha: f64,
) -> LinearConstraint {
    let a = be.grad_p * est.effectiveness(alpha);
    let d_est = est
        .d_hat
        .iter()
        .zip(psi)
        .fold(Vec2::ZERO, |acc, (&d, &p)| acc + d * p);
    let b = be.grad_p.dot(d_est) - be.zeta + 0.5 * gains.mu * (be.h - gains.error_budget());
    LinearConstraint { a, b }
}

/// Minimiser of `‖u − u_nom‖²` subject to `a · u + b >= 0`.
pub fn solve_cbf_qp(u_nom: Vec2, c: &LinearConstraint) -> Result<Vec2, SafetyError> {
    let slack = c.slack(u_nom);
    if slack >= 0.0 {
        return Ok(u_nom);
    }
    let a2 = c.a.norm_squared();
    if a2 == 0.0 {
        return Err(SafetyError::Infeasible { b: c.b });
    }
    let mut u = u_nom - c.a * (slack / a2);
    // Round-off can leave the projection a few ulps on the wrong side.
    let residual = c.slack(u);
    if residual < 0.0 {
        u -= c.a * (residual / a2);
    }
    Ok(u)
}

/// Certificate `h − K θ̃² − Σ_j Q_j ‖d̃_j‖²` for estimation errors θ̃, d̃_j.
pub fn hbar_diagnostic(h: f64, theta_err: f64, d_err: &[Vec2], gains: &AdaptationGains) -> f64 {
    h - gains.k * theta_err * theta_err
        - d_err
            .iter()
            .zip(&gains.q)
            .map(|(d, q)| q * d.norm_squared())
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(n: usize) -> AdaptationGains {
        AdaptationGains {
            k: 1.8,
            q: vec![0.01; n],
            mu: 2.0,
            alpha: 0.1,
            nu: 0.1,
            d_bar: vec![20.0; n],
            theta_bar: 0.45,
        }
    }

    #[test]
    fn barrier_values() {
        let be = barrier(Vec2::ZERO, Vec2::new(1.0, 0.0), 3, 0.25, 0.0, 0.0).unwrap();
        assert_eq!(be.h, 0.75);
        assert_eq!(be.grad_p, Vec2::new(-2.0, 0.0));
        assert_eq!(be.grad_z, -be.grad_p);
        assert_eq!(be.neighbor_id, 3);
        let edge = barrier(Vec2::ZERO, Vec2::new(0.5, 0.0), 0, 0.25, 0.0, 0.0).unwrap();
        assert_eq!(edge.h, 0.0);
        let z = barrier(Vec2::ZERO, Vec2::new(0.6, 0.8), 0, 0.25, 0.2, 10.0).unwrap();
        assert!((z.zeta - 20.4).abs() < 1e-12);
    }

    #[test]
    fn barrier_errors() {
        assert_eq!(
            barrier(Vec2::ZERO, Vec2::ZERO, 4, 0.25, 0.2, 10.0),
            Err(SafetyError::Collision { neighbor: 4 })
        );
        assert!(barrier(Vec2::ZERO, Vec2::new(1.0, 0.0), 0, 0.0, 0.2, 10.0).is_err());
    }

    #[test]
    fn constraint_coefficients() {
        let g = gains(1);
        let be = barrier(Vec2::ZERO, Vec2::new(1.0, 0.0), 1, 0.25, 0.0, 0.0).unwrap();
        let est = AdaptiveState::zeros(1);
        let c = assemble_constraint(&be, &est, &g, &[1.0], 0.1);
        assert!(c.a.distance(Vec2::new(-1.1, 0.0)) < 1e-15);

        // Margin term exactly cancelled: b = −ζ.
        let mut tight = be;
        tight.h = g.error_budget();
        tight.zeta = 3.0;
        let c = assemble_constraint(&tight, &est, &g, &[1.0], 0.1);
        assert!((c.b + 3.0).abs() < 1e-12);

        // h = 0.75 with budget 0.70 and ζ = 0: b = (μ/2)(0.05).
        let mut g2 = gains(2);
        g2.k = 0.5 / (0.45 * 0.45);
        g2.q = vec![0.1 / 400.0; 2];
        assert!((g2.error_budget() - 0.70).abs() < 1e-12);
        let c = assemble_constraint(&be, &AdaptiveState::zeros(2), &g2, &[1.0, 0.0], 0.1);
        assert!((c.b - 0.05).abs() < 1e-12, "{}", c.b);
    }

    #[test]
    fn constraint_uses_disturbance_estimate() {
        let g = gains(2);
        let be = barrier(Vec2::ZERO, Vec2::new(1.0, 0.0), 1, 0.25, 0.0, 0.0).unwrap();
        let est = AdaptiveState {
            theta_hat: 0.0,
            d_hat: vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 5.0)],
        };
        let c = assemble_constraint(&be, &est, &g, &[0.5, 1.0], 0.1);
        let base = assemble_constraint(&be, &AdaptiveState::zeros(2), &g, &[0.5, 1.0], 0.1);
        assert!((c.b - base.b - (-2.0 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn qp_cases() {
        let c = LinearConstraint {
            a: Vec2::new(1.0, 0.0),
            b: 0.0,
        };
        assert_eq!(solve_cbf_qp(Vec2::new(1.0, 0.0), &c).unwrap(), Vec2::new(1.0, 0.0));
        assert_eq!(solve_cbf_qp(Vec2::new(-1.0, 0.0), &c).unwrap(), Vec2::ZERO);
        let c = LinearConstraint {
            a: Vec2::new(0.0, 1.0),
            b: -1.0,
        };
        assert_eq!(solve_cbf_qp(Vec2::ZERO, &c).unwrap(), Vec2::new(0.0, 1.0));
    }

    #[test]
    fn qp_infeasible() {
        let c = LinearConstraint { a: Vec2::ZERO, b: -1.0 };
        assert_eq!(solve_cbf_qp(Vec2::ZERO, &c), Err(SafetyError::Infeasible { b: -1.0 }));
        let ok = LinearConstraint { a: Vec2::ZERO, b: 1.0 };
        assert_eq!(solve_cbf_qp(Vec2::new(2.0, 3.0), &ok).unwrap(), Vec2::new(2.0, 3.0));
    }

    #[test]
    fn certificate() {
        let g = gains(3);
        assert_eq!(hbar_diagnostic(0.75, 0.0, &[Vec2::ZERO; 3], &g), 0.75);
        let v = hbar_diagnostic(0.75, 0.05, &[Vec2::ZERO; 3], &g);
        assert!((v - 0.7455).abs() < 1e-12);
    }
}
