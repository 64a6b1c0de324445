//! Safe adaptive multi-agent coverage control.
//!
//! Agents with unknown actuator effectiveness and a shared time-varying
//! disturbance move toward the density centroids of their Voronoi cells.
//! A per-agent barrier filter, driven by projection-based estimates of the
//! fault and of the disturbance's Fourier weights, keeps every agent's safety
//! disk clear of its nearest neighbour.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptation;
pub mod density;
pub mod fat_basis;
pub mod geometry;
pub mod presets;
pub mod safety_filter;
pub mod simulation;
pub mod vector;

pub use vector::Vec2;
