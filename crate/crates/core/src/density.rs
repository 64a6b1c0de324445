//! Importance densities and density-weighted integrals over convex cells.
//!
//! Cells are fan-triangulated from their area centroid; each triangle is
//! split into `resolution²` congruent sub-triangles and integrated with the
//! six-point degree-4 symmetric rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{area_centroid, polygon_area};
use crate::vector::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("density sigma must be positive and finite, got ({0}, {1})")]
    InvalidSigma(f64, f64),
    #[error("uniform density must be positive and finite, got {0}")]
    InvalidValue(f64),
    #[error("cell is empty or degenerate")]
    EmptyCell,
    #[error("quadrature resolution must be at least 1")]
    ZeroResolution,
    #[error("{cells} cells for {positions} positions")]
    LengthMismatch { cells: usize, positions: usize },
}

/// A strictly positive, bounded importance weight over the plane.
pub trait Density {
    fn eval(&self, q: Vec2) -> f64;
}

impl<D: Density + ?Sized> Density for &D {
    fn eval(&self, q: Vec2) -> f64 {
        (**self).eval(q)
    }
}

/// Axis-aligned bivariate normal density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDensity {
    mean: Vec2,
    sigma: Vec2,
    peak: f64,
}

impl GaussianDensity {
    pub fn new(mean: Vec2, sigma: Vec2) -> Result<Self, DensityError> {
        let ok = |s: f64| s > 0.0 && s.is_finite();
        if !ok(sigma.x) || !ok(sigma.y) {
            return Err(DensityError::InvalidSigma(sigma.x, sigma.y));
        }
        Ok(Self {
            mean,
            sigma,
            peak: 1.0 / (2.0 * PI * sigma.x * sigma.y),
        })
    }

    pub fn mean(&self) -> Vec2 {
        self.mean
    }

    pub fn sigma(&self) -> Vec2 {
        self.sigma
    }
}

impl Density for GaussianDensity {
    #[inline]
    fn eval(&self, q: Vec2) -> f64 {
        let dx = (q.x - self.mean.x) / self.sigma.x;
        let dy = (q.y - self.mean.y) / self.sigma.y;
        self.peak * (-0.5 * (dx * dx + dy * dy)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDensity {
    value: f64,
}

impl UniformDensity {
    pub fn new(value: f64) -> Result<Self, DensityError> {
        if value > 0.0 && value.is_finite() {
            Ok(Self { value })
        } else {
            Err(DensityError::InvalidValue(value))
        }
    }
}

impl Density for UniformDensity {
    #[inline]
    fn eval(&self, _q: Vec2) -> f64 {
        self.value
    }
}

/// Serializable density selection used by scenario configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Gaussian { mean: Vec2, sigma: Vec2 },
    Uniform { value: f64 },
}

impl DensitySpec {
    pub fn build(&self) -> Result<DensityField, DensityError> {
        Ok(match *self {
            DensitySpec::Gaussian { mean, sigma } => DensityField::Gaussian(GaussianDensity::new(mean, sigma)?),
            DensitySpec::Uniform { value } => DensityField::Uniform(UniformDensity::new(value)?),
        })
    }
}

/// Validated counterpart of [`DensitySpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityField {
    Gaussian(GaussianDensity),
    Uniform(UniformDensity),
}

impl Density for DensityField {
    #[inline]
    fn eval(&self, q: Vec2) -> f64 {
        match self {
            DensityField::Gaussian(g) => g.eval(q),
            DensityField::Uniform(u) => u.eval(q),
        }
    }
}

/// One agent's cell with its density mass and center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub polygon: Vec<Vec2>,
    pub mass: f64,
    pub centroid: Vec2,
}

/// Density integrals over one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellIntegrals {
    /// ∫ φ dq
    pub mass: f64,
    /// ∫ φ q dq
    pub first_moment: Vec2,
    /// ∫ ‖q − p‖² φ dq for the reference point supplied.
    pub polar_moment: f64,
}

// Six-point degree-4 rule on the reference triangle (barycentric a, a, 1-2a).
const RULE: [(f64, f64); 2] = [
    (0.445_948_490_915_965, 0.223_381_589_678_011),
    (0.091_576_213_509_771, 0.109_951_743_655_322),
];

fn integrate_triangle<D: Density>(a: Vec2, b: Vec2, c: Vec2, density: &D, about: Vec2, acc: &mut CellIntegrals) {
    let area = 0.5 * (b - a).cross(c - a).abs();
    if area == 0.0 {
        return;
    }
    for &(s, w) in &RULE {
        let r = 1.0 - 2.0 * s;
        for (l0, l1, l2) in [(s, s, r), (s, r, s), (r, s, s)] {
            let q = a * l0 + b * l1 + c * l2;
            let f = density.eval(q) * w * area;
            acc.mass += f;
            acc.first_moment += q * f;
            acc.polar_moment += (q - about).norm_squared() * f;
        }
    }
}

fn integrate_refined<D: Density>(
    a: Vec2,
    b: Vec2,
    c: Vec2,
    k: usize,
    density: &D,
    about: Vec2,
    acc: &mut CellIntegrals,
) {
    let kf = k as f64;
    let node = |i: usize, j: usize| a + (b - a) * (i as f64 / kf) + (c - a) * (j as f64 / kf);
    for i in 0..k {
        for j in 0..(k - i) {
            integrate_triangle(node(i, j), node(i + 1, j), node(i, j + 1), density, about, acc);
            if i + j + 2 <= k {
                integrate_triangle(node(i + 1, j), node(i + 1, j + 1), node(i, j + 1), density, about, acc);
            }
        }
    }
}

/// Mass, first moment and polar moment about `about` over a convex cell.
pub fn cell_integrals<D: Density>(
    cell: &[Vec2],
    density: &D,
    resolution: usize,
    about: Vec2,
) -> Result<CellIntegrals, DensityError> {
    if resolution == 0 {
        return Err(DensityError::ZeroResolution);
    }
    if cell.len() < 3 || polygon_area(cell) <= 0.0 {
        return Err(DensityError::EmptyCell);
    }
    let center = area_centroid(cell);
    let mut acc = CellIntegrals {
        mass: 0.0,
        first_moment: Vec2::ZERO,
        polar_moment: 0.0,
    };
    let n = cell.len();
    for i in 0..n {
        integrate_refined(center, cell[i], cell[(i + 1) % n], resolution, density, about, &mut acc);
    }
    Ok(acc)
}

/// Density mass `m_i` and centroid `c_i` of a cell.
pub fn cell_mass_centroid<D: Density>(
    cell: &[Vec2],
    density: &D,
    resolution: usize,
) -> Result<CellSummary, DensityError> {
    let ints = cell_integrals(cell, density, resolution, Vec2::ZERO)?;
    if ints.mass <= 0.0 {
        return Err(DensityError::EmptyCell);
    }
    Ok(CellSummary {
        polygon: cell.to_vec(),
        mass: ints.mass,
        centroid: ints.first_moment / ints.mass,
    })
}

/// Locational cost Σᵢ ∫_{Vᵢ} ‖q − pᵢ‖² φ(q) dq. Empty cells contribute nothing.
pub fn locational_cost<D: Density>(
    cells: &[Vec<Vec2>],
    positions: &[Vec2],
    density: &D,
    resolution: usize,
) -> Result<f64, DensityError> {
    if cells.len() != positions.len() {
        return Err(DensityError::LengthMismatch {
            cells: cells.len(),
            positions: positions.len(),
        });
    }
    let mut total = 0.0;
    for (cell, &p) in cells.iter().zip(positions) {
        if cell.len() < 3 {
            continue;
        }
        total += cell_integrals(cell, density, resolution, p)?.polar_moment;
    }
    Ok(total)
}
