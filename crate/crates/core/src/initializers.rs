//! Starting configurations: circles, torus knots and knots read from
//! coordinate files.
//!
//! Knot files are plain text with one vertex per line (three numbers
//! separated by whitespace). Lines starting with `#` are comments, except
//! that `# name=<id>` and `# cmin=<n>` set the knot's metadata. The closing
//! edge is implicit.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{parameter, Error, Result};
use crate::geometry::{PolygonalKnot, Vec3, MIN_VERTICES};

/// Parameters of a torus knot `T(p, q)` sampled as a polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusKnotSpec {
    pub p: u32,
    pub q: u32,
    pub beads: usize,
    pub major_radius: f64,
    pub minor_radius: f64,
}

impl TorusKnotSpec {
    /// Torus proportions 2:1 and `beads` samples.
    pub fn new(p: u32, q: u32, beads: usize) -> Self {
        Self {
            p,
            q,
            beads,
            major_radius: 2.0,
            minor_radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.q < 2 {
            return Err(parameter(format!(
                "p and q must be >= 2, got ({}, {})",
                self.p, self.q
            )));
        }
        if gcd(self.p, self.q) != 1 {
            return Err(parameter(format!(
                "p={} and q={} are not co-prime",
                self.p, self.q
            )));
        }
        let min_beads = 5 * self.p.max(self.q) as usize;
        if self.beads < min_beads {
            return Err(parameter(format!(
                "T({},{}) needs at least {min_beads} beads, got {}",
                self.p, self.q, self.beads
            )));
        }
        if !(self.minor_radius > 0.0 && self.major_radius > self.minor_radius) {
            return Err(parameter(format!(
                "need major_radius > minor_radius > 0, got {} and {}",
                self.major_radius, self.minor_radius
            )));
        }
        Ok(())
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Regular polygon with `beads` vertices inscribed in a circle in the z = 0 plane.
pub fn make_circle(beads: usize, radius: f64) -> Result<PolygonalKnot> {
    make_ellipse(beads, radius, radius)
}

/// Ellipse with semi-axes `a` (along x) and `b` (along y), sampled at equal
/// parameter steps.
pub fn make_ellipse(beads: usize, a: f64, b: f64) -> Result<PolygonalKnot> {
    if beads < MIN_VERTICES {
        return Err(parameter(format!(
            "need at least {MIN_VERTICES} beads, got {beads}"
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(parameter("radii must be positive"));
    }
    let vertices = (0..beads)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / beads as f64;
            Vec3::new(a * t.cos(), b * t.sin(), 0.0)
        })
        .collect();
    Ok(PolygonalKnot::new(vertices)?.with_cmin(0).with_name("0_1"))
}

/// Torus knot sampled at equal parameter steps `t_k = 2 pi k / beads` of
/// `((R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt)`.
pub fn make_torus_knot(spec: &TorusKnotSpec) -> Result<PolygonalKnot> {
    spec.validate()?;
    let (p, q) = (spec.p as f64, spec.q as f64);
    let (big, small) = (spec.major_radius, spec.minor_radius);
    let vertices: Vec<Vec3> = (0..spec.beads)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / spec.beads as f64;
            let rho = big + small * (q * t).cos();
            Vec3::new(
                rho * (p * t).cos(),
                rho * (p * t).sin(),
                small * (q * t).sin(),
            )
        })
        .collect();
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i] - vertices[(i + n - 1) % n];
        let b = vertices[(i + 1) % n] - vertices[i];
        if a.dot(&b) <= 0.0 {
            return Err(parameter(format!(
                "turning angle at bead {i} reaches pi/2; increase beads"
            )));
        }
    }
    let cmin = (spec.p.min(spec.q) - 1) * spec.p.max(spec.q);
    Ok(PolygonalKnot::new(vertices)?
        .with_name(format!("T{}_{}", spec.p, spec.q))
        .with_cmin(cmin))
}

/// Parses the knot file format from a string.
pub fn parse_knot(text: &str) -> Result<PolygonalKnot> {
    let mut vertices = Vec::new();
    let mut name = None;
    let mut cmin = None;
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("name=") {
                name = Some(value.trim().to_string());
            } else if let Some(value) = comment.strip_prefix("cmin=") {
                let parsed = value.trim().parse::<u32>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad cmin '{}': {e}", value.trim()),
                })?;
                cmin = Some(parsed);
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 coordinates, found {}", fields.len()),
            });
        }
        let mut xyz = [0.0; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad number '{field}': {e}"),
            })?;
        }
        vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut knot = PolygonalKnot::new(vertices)?;
    if let Some(name) = name {
        knot = knot.with_name(name);
    }
    if let Some(cmin) = cmin {
        knot = knot.with_cmin(cmin);
    }
    Ok(knot)
}

/// Serializes a knot with 17 significant digits per coordinate.
pub fn format_knot(knot: &PolygonalKnot) -> String {
    let mut out = String::new();
    if let Some(name) = knot.name() {
        let _ = writeln!(out, "# name={name}");
    }
    if let Some(cmin) = knot.cmin() {
        let _ = writeln!(out, "# cmin={cmin}");
    }
    for v in knot.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    out
}

pub fn load_knot(path: impl AsRef<Path>) -> Result<PolygonalKnot> {
    let text = std::fs::read_to_string(path)?;
    parse_knot(&text)
}

pub fn save_knot(knot: &PolygonalKnot, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_knot(knot))?;
    Ok(())
}
