use safecov_core::density::DensitySpec;
use safecov_core::presets::paper_sec4;
use safecov_core::simulation::{run_scenario, ConfigError, ControllerMode, DisturbanceProfile, ScenarioConfig};
use safecov_core::Vec2;

fn quiet(mode: ControllerMode, positions: Vec<Vec2>) -> ScenarioConfig {
    let mut c = paper_sec4(mode);
    c.name = "quiet".into();
    c.theta_true = vec![1.0; positions.len()];
    c.initial_positions = positions;
    c.disturbance = DisturbanceProfile::None;
    c.density = DensitySpec::Uniform { value: 1.0 };
    c
}

fn max_offset(r: &safecov_core::simulation::StepRecord) -> f64 {
    r.agents
        .iter()
        .map(|a| a.position.distance(a.centroid))
        .fold(0.0, f64::max)
}

#[test]
fn single_agent_modes_coincide() {
    let mut nominal = paper_sec4(ControllerMode::Nominal);
    nominal.initial_positions = vec![Vec2::new(0.4, 0.7)];
    nominal.theta_true = vec![0.5];
    nominal.horizon = 5.0;
    let mut cbf = nominal.clone();
    cbf.mode = ControllerMode::Cbf;
    let a = run_scenario(&nominal).unwrap();
    let b = run_scenario(&cbf).unwrap();
    assert_eq!(a.records.len(), 1000);
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.positions(), y.positions());
        assert!(y.agents[0].h.is_none());
    }
}

#[test]
fn single_agent_reaches_domain_centroid() {
    let mut c = quiet(ControllerMode::Nominal, vec![Vec2::new(0.2, 2.1)]);
    c.horizon = 10.0;
    let trace = run_scenario(&c).unwrap();
    let last = trace.records.last().unwrap();
    assert!(last.agents[0].position.distance(Vec2::new(1.25, 1.25)) < 1e-3);
}

#[test]
fn head_on_pair_stays_apart_only_with_filter() {
    let mut c = quiet(
        ControllerMode::Nominal,
        vec![Vec2::new(0.6, 1.25), Vec2::new(1.9, 1.25)],
    );
    c.density = DensitySpec::Gaussian {
        mean: Vec2::new(1.25, 1.25),
        sigma: Vec2::new(0.1, 0.1),
    };
    c.k_p = 5.0;
    c.horizon = 10.0;
    let nominal = run_scenario(&c).unwrap();
    assert!(nominal.min_distance() < 0.5);
    c.mode = ControllerMode::Cbf;
    let cbf = run_scenario(&c).unwrap();
    assert!(cbf.min_distance() >= 0.5 * (1.0 - 5e-3));
}

#[test]
fn uniform_coverage_descends_and_settles() {
    let ps = vec![
        Vec2::new(0.25, 0.25),
        Vec2::new(0.8, 0.25),
        Vec2::new(0.25, 0.8),
        Vec2::new(0.8, 0.8),
    ];
    let mut c = quiet(ControllerMode::Nominal, ps);
    c.horizon = 20.0;
    let trace = run_scenario(&c).unwrap();
    for w in trace.records.windows(2) {
        assert!(w[1].cost <= w[0].cost + 1e-6, "H rose at t = {}", w[1].t);
    }
    assert!(max_offset(trace.records.last().unwrap()) < 1e-3);
}

#[test]
fn halving_dt_changes_coverage_path_by_order_dt() {
    let ps = vec![Vec2::new(0.3, 0.4), Vec2::new(0.9, 0.2), Vec2::new(1.6, 0.5)];
    let mut c = quiet(ControllerMode::Nominal, ps);
    c.horizon = 5.0;
    let coarse = run_scenario(&c).unwrap();
    c.dt /= 2.0;
    let fine = run_scenario(&c).unwrap();
    let a = coarse.records.last().unwrap().positions();
    let b = fine.records.last().unwrap().positions();
    let gap = a.iter().zip(&b).map(|(p, q)| p.distance(*q)).fold(0.0, f64::max);
    assert!(gap < 0.01, "{gap}");
}

#[test]
fn repeated_runs_are_identical() {
    let mut c = paper_sec4(ControllerMode::Cbf);
    c.horizon = 1.0;
    let a = run_scenario(&c).unwrap();
    let b = run_scenario(&c).unwrap();
    assert_eq!(a, b);
}

#[test]
fn estimates_respect_bounds_on_paper_scenario() {
    let mut c = paper_sec4(ControllerMode::Cbf);
    c.horizon = 3.0;
    let trace = run_scenario(&c).unwrap();
    for r in &trace.records {
        for a in &r.agents {
            assert!(a.theta_hat.abs() <= 0.5);
            assert!(a.d_hat_max_norm <= 20.1);
            assert!(a.theta_hat + 0.55 >= 0.05);
        }
    }
}

#[test]
fn initial_certificate_is_nonnegative() {
    let mut c = paper_sec4(ControllerMode::Cbf);
    c.horizon = 0.005;
    let trace = run_scenario(&c).unwrap();
    for a in &trace.records[0].agents {
        assert!(a.hbar.unwrap() >= 0.0);
    }
}

#[test]
fn rejects_uncontrollable_and_overlapping_starts() {
    let mut c = paper_sec4(ControllerMode::Cbf);
    c.theta_true[2] = 0.0;
    let err = c.validate().unwrap_err();
    assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "theta_true[2]"));
    assert!(err.to_string().contains("uncontrollable"));

    let mut c = paper_sec4(ControllerMode::Cbf);
    c.initial_positions[1] = Vec2::new(0.6, 0.25);
    assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "initial_positions"));
    c.mode = ControllerMode::Nominal;
    assert!(c.validate().is_ok());
}
