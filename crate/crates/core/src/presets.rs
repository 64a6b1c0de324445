//! Built-in scenarios.

use crate::density::DensitySpec;
use crate::geometry::DomainPolygon;
use crate::simulation::{ControllerMode, DisturbanceProfile, ScenarioConfig};
use crate::vector::Vec2;

/// Default start: a 3×3 lattice with 0.55 m spacing in the lower-left of the
/// domain, upper-right corner removed.
pub fn lower_left_lattice() -> Vec<Vec2> {
    let coords = [0.25, 0.8, 1.35];
    let mut out = Vec::with_capacity(8);
    for &y in &coords {
        for &x in &coords {
            if !(x == 1.35 && y == 1.35) {
                out.push(Vec2::new(x, y));
            }
        }
    }
    out
}

/// Eight agents, Gaussian density centred at (1.75, 1.75) on the square
/// `[0, 2.5]²`, half-effective actuators and the piecewise disturbance.
pub fn paper_sec4(mode: ControllerMode) -> ScenarioConfig {
    let positions = lower_left_lattice();
    let n = positions.len();
    ScenarioConfig {
        name: "paper_sec4".into(),
        mode,
        horizon: 30.0,
        dt: 0.005,
        harmonics: 5,
        r_safe: 0.25,
        theta_true: vec![0.5; n],
        alpha: 0.1,
        nu: 0.1,
        mu: 2.0,
        approx_error_bound: 0.2,
        neighbor_speed_bound: 10.0,
        d_bar: 20.0,
        d_max: 1.0,
        disturbance: DisturbanceProfile::Piecewise,
        density: DensitySpec::Gaussian {
            mean: Vec2::new(1.75, 1.75),
            sigma: Vec2::new(0.3, 0.3),
        },
        domain: DomainPolygon::rectangle(0.0, 0.0, 2.5, 2.5).expect("square domain"),
        initial_positions: positions,
        k_p: 1.0,
        seed: None,
        sensing_range: None,
        quadrature_resolution: 4,
        gain_margin: 0.99,
    }
}
