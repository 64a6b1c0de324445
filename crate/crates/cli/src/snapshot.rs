//! Static SVG snapshots of a single step.

use std::fmt::Write as _;
use std::path::Path;

use safecov_core::density::DensitySpec;
use safecov_core::geometry::{restricted_cell, DomainPolygon};
use safecov_core::simulation::{RunTrace, StepRecord};
use safecov_core::Vec2;

use crate::trace::{sig9, write_atomic};

pub const DEFAULT_SNAPSHOT_TIMES: [f64; 4] = [0.0, 1.0, 10.0, 30.0];

const PX_PER_M: f64 = 200.0;
const MARGIN_M: f64 = 0.1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("run has no recorded steps")]
    EmptyRun,
    #[error("snapshot time {t} is outside [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Record closest to time `t`.
pub fn record_at(trace: &RunTrace, t: f64, dt: f64, horizon: f64) -> Result<&StepRecord, SnapshotError> {
    if trace.records.is_empty() {
        return Err(SnapshotError::EmptyRun);
    }
    if !(t >= 0.0 && t <= horizon + 1e-9) {
        return Err(SnapshotError::OutOfRange { t, horizon });
    }
    let k = ((t / dt).round() as usize).min(trace.records.len() - 1);
    Ok(&trace.records[k])
}

struct Frame {
    min: Vec2,
    max: Vec2,
}

impl Frame {
    fn map(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.min.x) * PX_PER_M, (self.max.y - p.y) * PX_PER_M)
    }

    fn points(&self, poly: &[Vec2]) -> String {
        poly.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{},{}", sig9(x), sig9(y))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Renders the domain, every agent's Voronoi cell, agent centres, safety
/// circles of radius `r_safe` and density iso-ellipses at 1, 2 and 3 sigma.
pub fn render_snapshot(
    record: &StepRecord,
    domain: &DomainPolygon,
    density: &DensitySpec,
    r_safe: f64,
    t_label: &str,
) -> String {
    let positions = record.positions();
    let (mut min, mut max) = domain.bounding_box();
    for p in &positions {
        min = Vec2::new(min.x.min(p.x - r_safe), min.y.min(p.y - r_safe));
        max = Vec2::new(max.x.max(p.x + r_safe), max.y.max(p.y + r_safe));
    }
    let pad = Vec2::new(MARGIN_M, MARGIN_M);
    let frame = Frame {
        min: min - pad,
        max: max + pad,
    };
    let width = (frame.max.x - frame.min.x) * PX_PER_M;
    let height = (frame.max.y - frame.min.y) * PX_PER_M;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = sig9(width),
        h = sig9(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let DensitySpec::Gaussian { mean, sigma } = density {
        let (cx, cy) = frame.map(*mean);
        for k in [1.0, 2.0, 3.0] {
            let _ = writeln!(
                s,
                r##"<ellipse class="iso" cx="{}" cy="{}" rx="{}" ry="{}" fill="none" stroke="#7a9cc6" stroke-dasharray="4 3"/>"##,
                sig9(cx),
                sig9(cy),
                sig9(k * sigma.x * PX_PER_M),
                sig9(k * sigma.y * PX_PER_M)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<polygon class="domain" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        frame.points(domain.vertices())
    );
    for i in 0..positions.len() {
        let cell = restricted_cell(domain, &positions, i);
        let _ = writeln!(
            s,
            r#"<polygon class="cell" points="{}" fill="none" stroke="gray" stroke-width="1"/>"#,
            frame.points(&cell)
        );
    }
    for p in &positions {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            s,
            r#"<circle class="safety" cx="{}" cy="{}" r="{}" fill="none" stroke="red" stroke-width="1.5"/>"#,
            sig9(x),
            sig9(y),
            sig9(r_safe * PX_PER_M)
        );
    }
    for p in &positions {
        let (x, y) = frame.map(*p);
        let _ = writeln!(s, r#"<circle class="agent" cx="{}" cy="{}" r="3" fill="black"/>"#, sig9(x), sig9(y));
    }
    let _ = writeln!(s, r#"<text x="8" y="18" font-family="monospace" font-size="14">{t_label}</text>"#);
    s.push_str("</svg>\n");
    s
}

pub fn emit_snapshot(
    record: &StepRecord,
    domain: &DomainPolygon,
    density: &DensitySpec,
    r_safe: f64,
    path: &Path,
    t_label: &str,
) -> Result<(), SnapshotError> {
    let svg = render_snapshot(record, domain, density, r_safe, t_label);
    write_atomic(path, svg.as_bytes()).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })
}
