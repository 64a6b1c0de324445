//! Scenario files: versioned TOML with one section per concern.
//!
//! ```toml
//! schema = 1
//!
//! [scenario]
//! name = "paper_sec4"
//! mode = "cbf"            # or "nominal"
//! horizon = 30.0
//! dt = 0.005
//!
//! [agents]
//! theta_true = 0.5        # one value for all agents, or a list
//! positions = [[0.25, 0.25], [0.8, 0.25]]
//! # placement = { count = 8, min_separation = 0.6, seed = 7 }
//! k_p = 1.0
//! # sensing_range = 1.0
//!
//! [safety]
//! r_safe = 0.25
//! mu = 2.0
//! approx_error_bound = 0.2
//! neighbor_speed_bound = 10.0
//!
//! [adaptation]
//! alpha = 0.1
//! nu = 0.1
//! d_bar = 20.0
//! harmonics = 5
//! gain_margin = 0.99
//!
//! [disturbance]
//! profile = "piecewise"   # "piecewise_constant_plateau", "none"
//! d_max = 1.0
//!
//! [density]
//! kind = "gaussian"
//! mean = [1.75, 1.75]
//! sigma = [0.3, 0.3]
//!
//! [domain]
//! vertices = [[0.0, 0.0], [2.5, 0.0], [2.5, 2.5], [0.0, 2.5]]
//!
//! [numerics]
//! quadrature_resolution = 4
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use safecov_core::adaptation::AdaptationError;
use safecov_core::density::DensitySpec;
use safecov_core::geometry::DomainPolygon;
use safecov_core::simulation::{random_placement, ConfigError, ControllerMode, DisturbanceProfile, ScenarioConfig};
use safecov_core::Vec2;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}{}: {field}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Invalid {
        path: PathBuf,
        line: Option<usize>,
        field: String,
        message: String,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema: i64,
    scenario: RawScenario,
    agents: RawAgents,
    safety: RawSafety,
    adaptation: RawAdaptation,
    disturbance: RawDisturbance,
    density: DensitySpec,
    domain: RawDomain,
    #[serde(default)]
    numerics: RawNumerics,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    mode: ControllerMode,
    horizon: f64,
    dt: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlacement {
    count: usize,
    min_separation: f64,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgents {
    theta_true: OneOrMany,
    positions: Option<Vec<Vec2>>,
    placement: Option<RawPlacement>,
    k_p: f64,
    sensing_range: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSafety {
    r_safe: f64,
    mu: f64,
    approx_error_bound: f64,
    neighbor_speed_bound: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdaptation {
    alpha: f64,
    nu: f64,
    d_bar: f64,
    harmonics: usize,
    #[serde(default = "default_margin")]
    gain_margin: f64,
}

fn default_margin() -> f64 {
    0.99
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisturbance {
    profile: DisturbanceProfile,
    d_max: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    vertices: Vec<Vec2>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    quadrature_resolution: usize,
}

impl Default for RawNumerics {
    fn default() -> Self {
        Self { quadrature_resolution: 4 }
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Parses and validates scenario text; `path` is only used in messages.
pub fn parse_config(text: &str, path: &Path) -> Result<ScenarioConfig, LoadError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let invalid = |section: &str, key: &str, message: String| LoadError::Invalid {
        path: path.to_path_buf(),
        line: locate(text, section, key),
        field: if section.is_empty() { key.to_string() } else { format!("{section}.{key}") },
        message,
    };
    if raw.schema != SCHEMA_VERSION {
        return Err(invalid(
            "",
            "schema",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", raw.schema),
        ));
    }
    let domain = DomainPolygon::new(raw.domain.vertices).map_err(|e| invalid("domain", "vertices", e.to_string()))?;

    let (positions, seed) = match (raw.agents.positions, raw.agents.placement) {
        (Some(p), None) => (p, None),
        (None, Some(pl)) => {
            if !(pl.min_separation >= 0.0) {
                return Err(invalid(
                    "agents",
                    "placement",
                    format!("min_separation must be non-negative, got {}", pl.min_separation),
                ));
            }
            let p = random_placement(&domain, pl.count, pl.min_separation, pl.seed).ok_or_else(|| {
                invalid(
                    "agents",
                    "placement",
                    format!(
                        "could not place {} agents {} m apart in the domain",
                        pl.count, pl.min_separation
                    ),
                )
            })?;
            (p, Some(pl.seed))
        }
        (Some(_), Some(_)) => {
            return Err(invalid("agents", "placement", "give either positions or placement, not both".into()))
        }
        (None, None) => return Err(invalid("agents", "positions", "missing positions (or placement)".into())),
    };
    let theta_true = match raw.agents.theta_true {
        OneOrMany::One(v) => vec![v; positions.len()],
        OneOrMany::Many(v) => v,
    };

    let config = ScenarioConfig {
        name: raw.scenario.name,
        mode: raw.scenario.mode,
        horizon: raw.scenario.horizon,
        dt: raw.scenario.dt,
        harmonics: raw.adaptation.harmonics,
        r_safe: raw.safety.r_safe,
        theta_true,
        alpha: raw.adaptation.alpha,
        nu: raw.adaptation.nu,
        mu: raw.safety.mu,
        approx_error_bound: raw.safety.approx_error_bound,
        neighbor_speed_bound: raw.safety.neighbor_speed_bound,
        d_bar: raw.adaptation.d_bar,
        d_max: raw.disturbance.d_max,
        disturbance: raw.disturbance.profile,
        density: raw.density,
        domain,
        initial_positions: positions,
        k_p: raw.agents.k_p,
        seed,
        sensing_range: raw.agents.sensing_range,
        quadrature_resolution: raw.numerics.quadrature_resolution,
        gain_margin: raw.adaptation.gain_margin,
    };
    check(&config, text, path)?;
    Ok(config)
}

/// Validates `config` and maps failures back to the section and line that set
/// the offending value.
pub fn check(config: &ScenarioConfig, text: &str, path: &Path) -> Result<(), LoadError> {
    let err = match config.validate() {
        Ok(()) => return Ok(()),
        Err(e) => e,
    };
    let (section, key, message) = match &err {
        ConfigError::Invalid { field, message } => {
            let base = field.split('[').next().unwrap_or(field);
            let (section, key) = field_location(base);
            let key = if field.contains('[') { field.replacen(base, key, 1) } else { key.to_string() };
            (section, key, message.clone())
        }
        ConfigError::Domain(e) => ("agents", "positions".to_string(), e.to_string()),
        ConfigError::Density(e) => ("density", "kind".to_string(), e.to_string()),
        ConfigError::Basis(e) => ("adaptation", "harmonics".to_string(), e.to_string()),
        ConfigError::Adaptation(e) => {
            let key = match e {
                AdaptationError::InvalidAlpha(_) => "alpha",
                AdaptationError::NonPositive { name: "nu", .. } => "nu",
                AdaptationError::NonPositive { name: "mu", .. } => "mu",
                AdaptationError::NonPositive { name: "d_bar", .. } => "d_bar",
                _ => "gain_margin",
            };
            let section = if key == "mu" { "safety" } else { "adaptation" };
            (section, key.to_string(), e.to_string())
        }
    };
    let bare = key.split('[').next().unwrap_or(&key).to_string();
    Err(LoadError::Invalid {
        path: path.to_path_buf(),
        line: locate(text, section, &bare).or_else(|| {
            if bare == "positions" {
                locate(text, section, "placement")
            } else {
                None
            }
        }),
        field: format!("{section}.{key}"),
        message,
    })
}

fn field_location(field: &str) -> (&'static str, &'static str) {
    match field {
        "name" => ("scenario", "name"),
        "horizon" => ("scenario", "horizon"),
        "dt" => ("scenario", "dt"),
        "theta_true" => ("agents", "theta_true"),
        "initial_positions" => ("agents", "positions"),
        "k_p" => ("agents", "k_p"),
        "sensing_range" => ("agents", "sensing_range"),
        "r_safe" => ("safety", "r_safe"),
        "mu" => ("safety", "mu"),
        "approx_error_bound" => ("safety", "approx_error_bound"),
        "neighbor_speed_bound" => ("safety", "neighbor_speed_bound"),
        "alpha" => ("adaptation", "alpha"),
        "nu" => ("adaptation", "nu"),
        "d_bar" => ("adaptation", "d_bar"),
        "harmonics" => ("adaptation", "harmonics"),
        "gain_margin" => ("adaptation", "gain_margin"),
        "d_max" => ("disturbance", "d_max"),
        "quadrature_resolution" => ("numerics", "quadrature_resolution"),
        _ => ("scenario", "name"),
    }
}

/// 1-based line of `key = ...` inside `[section]` (top level when empty).
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current == section {
            if let Some(rest) = trimmed.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

/// SHA-256 over a canonical serialization of every config field.
pub fn checksum(config: &ScenarioConfig) -> String {
    let canonical = canonical_form(config);
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Deterministic text form of the config: one `field = value` line per field,
/// floats in shortest round-trip notation.
pub fn canonical_form(config: &ScenarioConfig) -> String {
    let vecs = |v: &[Vec2]| {
        v.iter()
            .map(|p| format!("[{:?}, {:?}]", p.x, p.y))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let floats = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let density = match config.density {
        DensitySpec::Gaussian { mean, sigma } => format!("gaussian [{:?}, {:?}] [{:?}, {:?}]", mean.x, mean.y, sigma.x, sigma.y),
        DensitySpec::Uniform { value } => format!("uniform {value:?}"),
    };
    let disturbance = match config.disturbance {
        DisturbanceProfile::Piecewise => "piecewise",
        DisturbanceProfile::PiecewiseConstantPlateau => "piecewise_constant_plateau",
        DisturbanceProfile::None => "none",
    };
    let opt = |o: Option<String>| o.unwrap_or_else(|| "none".into());
    [
        format!("name = {:?}", config.name),
        format!("mode = {}", config.mode.as_str()),
        format!("horizon = {:?}", config.horizon),
        format!("dt = {:?}", config.dt),
        format!("harmonics = {}", config.harmonics),
        format!("r_safe = {:?}", config.r_safe),
        format!("theta_true = [{}]", floats(&config.theta_true)),
        format!("alpha = {:?}", config.alpha),
        format!("nu = {:?}", config.nu),
        format!("mu = {:?}", config.mu),
        format!("approx_error_bound = {:?}", config.approx_error_bound),
        format!("neighbor_speed_bound = {:?}", config.neighbor_speed_bound),
        format!("d_bar = {:?}", config.d_bar),
        format!("d_max = {:?}", config.d_max),
        format!("disturbance = {disturbance}"),
        format!("density = {density}"),
        format!("domain = [{}]", vecs(config.domain.vertices())),
        format!("initial_positions = [{}]", vecs(&config.initial_positions)),
        format!("k_p = {:?}", config.k_p),
        format!("seed = {}", opt(config.seed.map(|s| s.to_string()))),
        format!("sensing_range = {}", opt(config.sensing_range.map(|r| format!("{r:?}")))),
        format!("quadrature_resolution = {}", config.quadrature_resolution),
        format!("gain_margin = {:?}", config.gain_margin),
    ]
    .join("\n")
        + "\n"
}
