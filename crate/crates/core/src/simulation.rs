//! Fixed-step simulation of faulty, disturbed single-integrator agents under
//! a centroid-seeking coverage law, optionally filtered by the adaptive
//! barrier constraint.
//!
//! Every step is synchronous: all agents read the same snapshot of positions
//! and estimates, and the new state is committed only after every agent's
//! input and adaptation rates have been computed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adaptation::{
    d_update_rhs, select_gains, theta_update_rhs, AdaptationError, AdaptationGains, AdaptationParams,
    AdaptiveState,
};
use crate::density::{cell_integrals, Density, DensityError, DensityField, DensitySpec};
use crate::fat_basis::{BasisError, FourierBasis};
use crate::geometry::{check_distinct, restricted_cell, DomainPolygon, GeometryError};
use crate::safety_filter::{assemble_constraint, barrier, hbar_diagnostic, solve_cbf_qp, SafetyError};
use crate::vector::Vec2;

/// Number of samples used to fit the reference disturbance weights.
pub const REFERENCE_FIT_SAMPLES: usize = 3001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    Nominal,
    Cbf,
}

impl ControllerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ControllerMode::Nominal => "nominal",
            ControllerMode::Cbf => "cbf",
        }
    }
}

impl std::str::FromStr for ControllerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nominal" => Ok(ControllerMode::Nominal),
            "cbf" => Ok(ControllerMode::Cbf),
            other => Err(format!("unknown mode `{other}` (expected nominal or cbf)")),
        }
    }
}

/// Time profile of the additive disturbance, identical on both axes and for
/// every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceProfile {
    /// Five-branch piecewise-linear profile scaled by `d_max`.
    Piecewise,
    /// Same profile with the second branch held at the constant `d_max`.
    PiecewiseConstantPlateau,
    None,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("time {t} lies outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("minimum pairwise distance needs at least two agents, got {0}")]
    TooFewAgents(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("domain: {0}")]
    Domain(#[from] GeometryError),
    #[error("density: {0}")]
    Density(#[from] DensityError),
    #[error("basis: {0}")]
    Basis(#[from] BasisError),
    #[error("adaptation: {0}")]
    Adaptation(#[from] AdaptationError),
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: ControllerMode,
    /// Horizon `T` (s); also the Fourier basis period.
    pub horizon: f64,
    pub dt: f64,
    /// Harmonic pairs `L`; the basis has `2L + 1` entries.
    pub harmonics: usize,
    pub r_safe: f64,
    /// True actuator effectiveness per agent, in `[alpha, 1]`.
    pub theta_true: Vec<f64>,
    pub alpha: f64,
    pub nu: f64,
    pub mu: f64,
    /// Bound `E` on the basis approximation residual.
    pub approx_error_bound: f64,
    /// Bound `V_z` on neighbour speed.
    pub neighbor_speed_bound: f64,
    /// Bound `d̄` on every true disturbance weight.
    pub d_bar: f64,
    pub d_max: f64,
    pub disturbance: DisturbanceProfile,
    pub density: DensitySpec,
    pub domain: DomainPolygon,
    pub initial_positions: Vec<Vec2>,
    pub k_p: f64,
    pub seed: Option<u64>,
    pub sensing_range: Option<f64>,
    pub quadrature_resolution: usize,
    pub gain_margin: f64,
}

impl ScenarioConfig {
    pub fn agent_count(&self) -> usize {
        self.initial_positions.len()
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn basis(&self) -> Result<FourierBasis, BasisError> {
        FourierBasis::new(self.harmonics, self.horizon)
    }

    pub fn adaptation_params(&self) -> AdaptationParams {
        AdaptationParams {
            alpha: self.alpha,
            nu: self.nu,
            mu: self.mu,
            d_bar: vec![self.d_bar; 2 * self.harmonics + 1],
            margin: self.gain_margin,
        }
    }

    /// Checks every invariant a run relies on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        let non_negative = |field: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be non-negative and finite, got {v}")))
            }
        };
        positive("horizon", self.horizon)?;
        positive("dt", self.dt)?;
        if self.dt > self.horizon {
            return Err(invalid("dt", "must not exceed the horizon"));
        }
        let ratio = self.horizon / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return Err(invalid("dt", format!("horizon {} is not a whole number of steps", self.horizon)));
        }
        positive("r_safe", self.r_safe)?;
        positive("k_p", self.k_p)?;
        non_negative("approx_error_bound", self.approx_error_bound)?;
        non_negative("neighbor_speed_bound", self.neighbor_speed_bound)?;
        non_negative("d_max", self.d_max)?;
        positive("d_bar", self.d_bar)?;
        if let Some(r) = self.sensing_range {
            positive("sensing_range", r)?;
        }
        if self.quadrature_resolution == 0 {
            return Err(invalid("quadrature_resolution", "must be at least 1"));
        }
        self.basis()?;
        self.density.build()?;
        self.adaptation_params().validate()?;

        let n = self.agent_count();
        if n == 0 {
            return Err(invalid("initial_positions", "at least one agent is required"));
        }
        if self.theta_true.len() != n {
            return Err(invalid(
                "theta_true",
                format!("{} values for {} agents", self.theta_true.len(), n),
            ));
        }
        for (i, &theta) in self.theta_true.iter().enumerate() {
            if !(theta >= self.alpha && theta <= 1.0) {
                return Err(invalid(
                    format!("theta_true[{i}]"),
                    format!(
                        "{theta} is outside [alpha, 1] = [{}, 1]; an actuator with zero effectiveness is uncontrollable",
                        self.alpha
                    ),
                ));
            }
        }
        for (i, &p) in self.initial_positions.iter().enumerate() {
            if !p.is_finite() || !self.domain.contains(p, 0.0) {
                return Err(invalid(format!("initial_positions[{i}]"), format!("{p} lies outside the domain")));
            }
        }
        check_distinct(&self.initial_positions)?;
        if self.mode == ControllerMode::Cbf {
            let d_safe = 2.0 * self.r_safe;
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist = self.initial_positions[i].distance(self.initial_positions[j]);
                    if dist <= d_safe {
                        return Err(invalid(
                            "initial_positions",
                            format!(
                                "agents {i} and {j} start {dist} m apart, within the safety distance {d_safe} m (h(0) <= 0)"
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Places `n` agents uniformly at random in the domain with pairwise
/// separation above `min_separation`, by rejection sampling.
pub fn random_placement(domain: &DomainPolygon, n: usize, min_separation: f64, seed: u64) -> Option<Vec<Vec2>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounding_box();
    let mut out: Vec<Vec2> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 100_000 * n.max(1) {
            return None;
        }
        let q = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if domain.contains(q, 0.0) && out.iter().all(|p| p.distance(q) > min_separation) {
            out.push(q);
        }
    }
    Some(out)
}

/// Disturbance `d(t)`; both components are equal.
pub fn disturbance(t: f64, horizon: f64, d_max: f64) -> Result<Vec2, SimError> {
    profile_disturbance(DisturbanceProfile::Piecewise, t, horizon, d_max)
}

pub fn profile_disturbance(profile: DisturbanceProfile, t: f64, horizon: f64, d_max: f64) -> Result<Vec2, SimError> {
    if !(0.0..=horizon).contains(&t) {
        return Err(SimError::TimeOutOfRange { t, horizon });
    }
    let big_t = horizon;
    let v = match profile {
        DisturbanceProfile::None => 0.0,
        DisturbanceProfile::Piecewise | DisturbanceProfile::PiecewiseConstantPlateau => {
            if t < big_t / 6.0 {
                0.5 * d_max * t
            } else if t < big_t / 3.0 {
                match profile {
                    DisturbanceProfile::Piecewise => d_max * t,
                    _ => d_max,
                }
            } else if t < 2.0 * big_t / 3.0 {
                0.5 * d_max * (0.5 * big_t - t)
            } else if t < 5.0 * big_t / 6.0 {
                -d_max
            } else {
                0.5 * d_max * (t - big_t)
            }
        }
    };
    Ok(Vec2::new(v, v))
}

/// Centroid-seeking coverage law `û = −k_p (p − c)`.
pub fn nominal_controller(p: Vec2, centroid: Vec2, k_p: f64) -> Vec2 {
    (p - centroid) * (-k_p)
}

/// One explicit Euler step of `ṗ = θ u + d`.
pub fn apply_dynamics(p: Vec2, u_applied: Vec2, theta_true: f64, d: Vec2, dt: f64) -> Vec2 {
    p + (u_applied * theta_true + d) * dt
}

pub fn min_pairwise_distance(positions: &[Vec2]) -> Result<f64, SimError> {
    if positions.len() < 2 {
        return Err(SimError::TooFewAgents(positions.len()));
    }
    let mut best = f64::INFINITY;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            best = best.min(positions[i].distance(positions[j]));
        }
    }
    Ok(best)
}

/// Index and distance of the nearest other agent, optionally within `range`.
pub fn nearest_neighbor(positions: &[Vec2], i: usize, range: Option<f64>) -> Option<(usize, f64)> {
    let p = positions[i];
    positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, q)| (j, p.distance(*q)))
        .filter(|&(_, d)| range.is_none_or(|r| d <= r))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

/// Per-agent slice of a [`StepRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRecord {
    pub position: Vec2,
    pub u_nom: Vec2,
    pub u: Vec2,
    /// Barrier against the current nearest neighbour, if any.
    pub h: Option<f64>,
    /// Certificate value; only tracked in cbf mode.
    pub hbar: Option<f64>,
    pub theta_hat: f64,
    pub d_hat_max_norm: f64,
    pub neighbor: Option<usize>,
    pub cell_mass: f64,
    pub centroid: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub agents: Vec<AgentRecord>,
    /// NaN for a single agent.
    pub min_distance: f64,
    pub cost: f64,
}

impl StepRecord {
    pub fn positions(&self) -> Vec<Vec2> {
        self.agents.iter().map(|a| a.position).collect()
    }
}

/// Run-level counters that do not fit in a per-step row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunEvents {
    /// Steps on which some agent's nearest neighbour changed.
    pub neighbor_switches: usize,
    /// Agent-steps on which the filter modified the nominal input.
    pub filter_active: usize,
    /// Agent-steps on which the neighbour's realised speed exceeded `V_z`.
    pub speed_bound_exceeded: usize,
    /// Agent-steps on which an agent's Voronoi cell was empty.
    pub empty_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub mode: ControllerMode,
    pub records: Vec<StepRecord>,
    /// Gains per agent (cbf mode with at least two agents).
    pub gains: Vec<Option<AdaptationGains>>,
    /// Least-squares disturbance weights used as the certificate reference.
    pub reference_weights: Vec<f64>,
    pub events: RunEvents,
}

impl RunTrace {
    pub fn min_distance(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.min_distance)
            .filter(|d| !d.is_nan())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn first_violation(&self, safe_distance: f64) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.min_distance < safe_distance)
            .map(|r| r.t)
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.records.last().map(|r| r.cost)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunFault {
    #[error("invalid scenario: {0}")]
    Config(#[from] ConfigError),
    #[error("tessellation: {0}")]
    Geometry(#[from] GeometryError),
    #[error("quadrature: {0}")]
    Density(#[from] DensityError),
    #[error("safety filter: {0}")]
    Safety(#[from] SafetyError),
    #[error("non-finite state")]
    NonFinite,
    #[error("estimate left its bounding set")]
    EstimateOutOfBounds,
}

/// A run that stopped early, with the trace recorded so far.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("run aborted at step {step} (t = {t}){}: {fault}", agent.map(|a| format!(", agent {a}")).unwrap_or_default())]
pub struct RunAbort {
    pub step: usize,
    pub t: f64,
    pub agent: Option<usize>,
    pub fault: RunFault,
    pub partial: Box<RunTrace>,
}

/// Cell geometry and density integrals of one tessellation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub cells: Vec<Vec<Vec2>>,
    pub masses: Vec<f64>,
    /// Density centroid, or the nearest domain point for an empty cell.
    pub centroids: Vec<Vec2>,
    pub cost: f64,
}

/// Tessellates the domain and integrates every cell. Generators outside the
/// domain are allowed; an empty cell gets zero mass and the closest domain
/// point as its target.
pub fn coverage<D: Density>(
    domain: &DomainPolygon,
    positions: &[Vec2],
    density: &D,
    resolution: usize,
) -> Result<Coverage, RunFault> {
    check_distinct(positions)?;
    let n = positions.len();
    let mut out = Coverage {
        cells: Vec::with_capacity(n),
        masses: Vec::with_capacity(n),
        centroids: Vec::with_capacity(n),
        cost: 0.0,
    };
    for (i, &p) in positions.iter().enumerate() {
        let cell = restricted_cell(domain, positions, i);
        if cell.is_empty() {
            out.masses.push(0.0);
            out.centroids.push(domain.closest_point(p));
        } else {
            let ints = cell_integrals(&cell, density, resolution, p)?;
            out.masses.push(ints.mass);
            out.centroids.push(ints.first_moment / ints.mass);
            out.cost += ints.polar_moment;
        }
        out.cells.push(cell);
    }
    Ok(out)
}

struct Lane {
    estimate: AdaptiveState,
    gains: Option<AdaptationGains>,
    neighbor: Option<usize>,
}

/// Runs the scenario to its horizon; one record per step at `t = k dt`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunTrace, Box<RunAbort>> {
    let empty = |mode| RunTrace {
        mode,
        records: Vec::new(),
        gains: Vec::new(),
        reference_weights: Vec::new(),
        events: RunEvents::default(),
    };
    let abort0 = |fault: RunFault| {
        Box::new(RunAbort {
            step: 0,
            t: 0.0,
            agent: None,
            fault,
            partial: Box::new(empty(config.mode)),
        })
    };
    config.validate().map_err(|e| abort0(e.into()))?;
    let basis = config.basis().map_err(|e| abort0(ConfigError::from(e).into()))?;
    let density: DensityField = config
        .density
        .build()
        .map_err(|e| abort0(ConfigError::from(e).into()))?;
    let n = config.agent_count();
    let cbf = config.mode == ControllerMode::Cbf;
    let params = config.adaptation_params();
    let steps = config.steps();

    let reference_weights = reference_weights(config, &basis);
    let theta_star: Vec<f64> = config
        .theta_true
        .iter()
        .map(|th| th - 0.5 * (1.0 + config.alpha))
        .collect();

    let mut positions = config.initial_positions.clone();
    let mut velocities = vec![Vec2::ZERO; n];
    let mut lanes: Vec<Lane> = Vec::with_capacity(n);
    for i in 0..n {
        let estimate = AdaptiveState::zeros(basis.len());
        let gains = if cbf && n >= 2 {
            let (j, _) = nearest_neighbor(&positions, i, None).expect("n >= 2");
            let be = barrier(
                positions[i],
                positions[j],
                j,
                config.r_safe,
                config.approx_error_bound,
                config.neighbor_speed_bound,
            )
            .map_err(|e| abort0(e.into()))?;
            Some(
                select_gains(be.h, estimate.theta_hat, &estimate.d_hat, &params)
                    .map_err(|e| abort0(ConfigError::from(e).into()))?,
            )
        } else {
            None
        };
        lanes.push(Lane {
            estimate,
            gains,
            neighbor: None,
        });
    }

    let mut trace = RunTrace {
        mode: config.mode,
        records: Vec::with_capacity(steps),
        gains: lanes.iter().map(|l| l.gains.clone()).collect(),
        reference_weights: reference_weights.clone(),
        events: RunEvents::default(),
    };
    let mut psi = vec![0.0; basis.len()];
    let d_ref: Vec<Vec2> = reference_weights.iter().map(|&w| Vec2::new(w, w)).collect();

    for step in 0..steps {
        let t = step as f64 * config.dt;
        let fail = |agent: Option<usize>, fault: RunFault, trace: RunTrace| {
            Box::new(RunAbort {
                step,
                t,
                agent,
                fault,
                partial: Box::new(trace),
            })
        };
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(fail(Some(i), RunFault::NonFinite, trace));
        }

        let cov = match coverage(&config.domain, &positions, &density, config.quadrature_resolution) {
            Ok(c) => c,
            Err(fault) => {
                let agent = match &fault {
                    RunFault::Geometry(GeometryError::CoincidentGenerators { first, .. }) => Some(*first),
                    _ => None,
                };
                return Err(fail(agent, fault, trace));
            }
        };
        basis.eval_into(t, &mut psi);

        let mut agents = Vec::with_capacity(n);
        let mut rates: Vec<Option<(f64, Vec<Vec2>)>> = Vec::with_capacity(n);
        let mut switched = false;
        for i in 0..n {
            let p = positions[i];
            let u_nom = nominal_controller(p, cov.centroids[i], config.k_p);
            if cov.cells[i].is_empty() {
                trace.events.empty_cells += 1;
            }
            let lane = &lanes[i];
            let neighbor = if n >= 2 {
                nearest_neighbor(&positions, i, config.sensing_range)
            } else {
                None
            };
            if step > 0 && neighbor.map(|x| x.0) != lane.neighbor {
                switched = true;
            }
            let mut u = u_nom;
            let mut h = None;
            let mut hbar = None;
            let mut rate = None;
            if let Some((j, _)) = neighbor {
                let be = match barrier(
                    p,
                    positions[j],
                    j,
                    config.r_safe,
                    config.approx_error_bound,
                    config.neighbor_speed_bound,
                ) {
                    Ok(be) => be,
                    Err(e) => return Err(fail(Some(i), e.into(), trace)),
                };
                h = Some(be.h);
                if step > 0 && velocities[j].norm() > config.neighbor_speed_bound {
                    trace.events.speed_bound_exceeded += 1;
                }
                if let (true, Some(gains)) = (cbf, lane.gains.as_ref()) {
                    let est = &lane.estimate;
                    let d_err: Vec<Vec2> = d_ref.iter().zip(&est.d_hat).map(|(&d, &e)| d - e).collect();
                    hbar = Some(hbar_diagnostic(be.h, theta_star[i] - est.theta_hat, &d_err, gains));
                    let constraint = assemble_constraint(&be, est, gains, &psi, config.alpha);
                    u = match solve_cbf_qp(u_nom, &constraint) {
                        Ok(u) => u,
                        Err(e) => return Err(fail(Some(i), e.into(), trace)),
                    };
                    if u != u_nom {
                        trace.events.filter_active += 1;
                    }
                    rate = Some((
                        theta_update_rhs(est, be.grad_p, u, gains),
                        d_update_rhs(est, be.grad_p, &psi, gains),
                    ));
                }
            }
            agents.push(AgentRecord {
                position: p,
                u_nom,
                u,
                h,
                hbar,
                theta_hat: lane.estimate.theta_hat,
                d_hat_max_norm: lane.estimate.max_d_norm(),
                neighbor: neighbor.map(|x| x.0),
                cell_mass: cov.masses[i],
                centroid: cov.centroids[i],
            });
            rates.push(rate);
        }
        if switched {
            trace.events.neighbor_switches += 1;
        }

        let d_t = match profile_disturbance(config.disturbance, t, config.horizon, config.d_max) {
            Ok(d) => d,
            Err(_) => unreachable!("t = k dt stays within the horizon"),
        };
        // Commit: positions, realised velocities and estimates together.
        for i in 0..n {
            let u = agents[i].u;
            let next = apply_dynamics(positions[i], u, config.theta_true[i], d_t, config.dt);
            velocities[i] = (next - positions[i]) / config.dt;
            positions[i] = next;
            let lane = &mut lanes[i];
            lane.neighbor = agents[i].neighbor;
            if let (Some((theta_rate, d_rates)), Some(gains)) = (rates[i].take(), lane.gains.as_ref()) {
                lane.estimate.integrate(theta_rate, &d_rates, config.dt, gains);
                if !lane.estimate.within_bounds(gains) {
                    return Err(fail(Some(i), RunFault::EstimateOutOfBounds, trace));
                }
            }
        }

        let min_distance = if n >= 2 {
            let snapshot: Vec<Vec2> = agents.iter().map(|a| a.position).collect();
            min_pairwise_distance(&snapshot).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        trace.records.push(StepRecord {
            t,
            agents,
            min_distance,
            cost: cov.cost,
        });
    }
    Ok(trace)
}

/// Least-squares weights of the scenario's disturbance profile on the basis.
pub fn reference_weights(config: &ScenarioConfig, basis: &FourierBasis) -> Vec<f64> {
    let samples: Vec<(f64, f64)> = (0..REFERENCE_FIT_SAMPLES)
        .map(|k| {
            let t = config.horizon * k as f64 / (REFERENCE_FIT_SAMPLES - 1) as f64;
            let d = profile_disturbance(config.disturbance, t.min(config.horizon), config.horizon, config.d_max)
                .map(|d| d.x)
                .unwrap_or(0.0);
            (t, d)
        })
        .collect();
    basis.fit(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disturbance_branches() {
        assert_eq!(disturbance(0.0, 30.0, 1.0).unwrap(), Vec2::ZERO);
        assert_eq!(disturbance(20.0, 30.0, 1.0).unwrap(), Vec2::new(-1.0, -1.0));
        assert_eq!(disturbance(30.0, 30.0, 1.0).unwrap(), Vec2::ZERO);
        assert_eq!(disturbance(6.0, 30.0, 1.0).unwrap(), Vec2::new(6.0, 6.0));
        assert_eq!(disturbance(12.0, 30.0, 1.0).unwrap(), Vec2::new(1.5, 1.5));
        assert!(matches!(
            disturbance(30.5, 30.0, 1.0),
            Err(SimError::TimeOutOfRange { .. })
        ));
        assert!(disturbance(-0.1, 30.0, 1.0).is_err());
        assert_eq!(
            profile_disturbance(DisturbanceProfile::PiecewiseConstantPlateau, 6.0, 30.0, 1.0).unwrap(),
            Vec2::new(1.0, 1.0)
        );
        assert_eq!(
            profile_disturbance(DisturbanceProfile::None, 6.0, 30.0, 1.0).unwrap(),
            Vec2::ZERO
        );
    }

    #[test]
    fn nominal_law() {
        assert_eq!(nominal_controller(Vec2::new(0.3, 0.2), Vec2::new(0.3, 0.2), 1.0), Vec2::ZERO);
        assert_eq!(nominal_controller(Vec2::new(1.0, 0.0), Vec2::ZERO, 1.0), Vec2::new(-1.0, 0.0));
    }

    #[test]
    fn dynamics_step() {
        let p = Vec2::new(0.4, 0.7);
        assert_eq!(apply_dynamics(p, Vec2::ZERO, 0.5, Vec2::ZERO, 0.01), p);
        let q = apply_dynamics(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, Vec2::ZERO, 0.01);
        assert_eq!(q, Vec2::new(0.01, 0.0));
        // θ u + d vanishes for θ = 1/2, u = (2, 0), d = (−1, 0).
        assert_eq!(apply_dynamics(p, Vec2::new(2.0, 0.0), 0.5, Vec2::new(-1.0, 0.0), 0.3), p);
    }

    #[test]
    fn pairwise_distances() {
        assert_eq!(min_pairwise_distance(&[Vec2::ZERO, Vec2::new(3.0, 4.0)]).unwrap(), 5.0);
        assert_eq!(
            min_pairwise_distance(&[Vec2::ZERO, Vec2::new(1.0, 1.0), Vec2::ZERO]).unwrap(),
            0.0
        );
        assert_eq!(min_pairwise_distance(&[Vec2::ZERO]), Err(SimError::TooFewAgents(1)));
        let r = 0.7;
        let ring: Vec<Vec2> = (0..8)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 4.0;
                Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let expect = 2.0 * r * (std::f64::consts::PI / 8.0).sin();
        assert!((min_pairwise_distance(&ring).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn nearest_neighbor_respects_range() {
        let pts = [Vec2::ZERO, Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.0)];
        assert_eq!(nearest_neighbor(&pts, 0, None), Some((2, 1.0)));
        assert_eq!(nearest_neighbor(&pts, 1, Some(1.5)), None);
    }

    #[test]
    fn placement_is_seeded() {
        let dom = DomainPolygon::rectangle(0.0, 0.0, 2.5, 2.5).unwrap();
        let a = random_placement(&dom, 8, 0.6, 7).unwrap();
        let b = random_placement(&dom, 8, 0.6, 7).unwrap();
        assert_eq!(a, b);
        assert!(min_pairwise_distance(&a).unwrap() > 0.6);
        assert!(random_placement(&dom, 100, 2.0, 1).is_none());
    }
}
