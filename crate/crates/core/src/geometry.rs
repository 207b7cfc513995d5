//! Measurements on closed polygonal space curves.
//!
//! A [`PolygonalKnot`] is an ordered ring of vertices; the edge from the last
//! vertex back to the first is implicit. Thickness follows the two-term
//! discrete definition: the smaller of the minimal local circumradius and
//! half the minimal distance between vertices that are more than `skip`
//! steps apart along the chain.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector3};

use crate::error::{parameter, Error, Result};

pub type Vec3 = Vector3<f64>;

/// Minimum number of vertices a knot may have.
pub const MIN_VERTICES: usize = 5;

/// A closed polygon in 3-space representing a knot axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalKnot {
    vertices: Vec<Vec3>,
    name: Option<String>,
    cmin: Option<u32>,
}

impl PolygonalKnot {
    /// Builds a knot, checking vertex count, finiteness and that no edge has
    /// zero length.
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        validate_vertices(&vertices)?;
        Ok(Self {
            vertices,
            name: None,
            cmin: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_cmin(mut self, cmin: u32) -> Self {
        self.cmin = Some(cmin);
        self
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec3> {
        self.vertices
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn cmin(&self) -> Option<u32> {
        self.cmin
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Replaces the vertex ring, keeping name and crossing number.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        validate_vertices(&vertices)?;
        Ok(Self {
            vertices,
            name: self.name.clone(),
            cmin: self.cmin,
        })
    }

    pub fn centroid(&self) -> Vec3 {
        centroid(&self.vertices)
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(parameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        self.with_vertices(self.vertices.iter().map(|v| v * factor).collect())
    }

    /// Reflection through the plane z = 0.
    pub fn mirrored(&self) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vec3::new(v.x, v.y, -v.z))
            .collect();
        Self {
            vertices,
            name: self.name.clone(),
            cmin: self.cmin,
        }
    }

    /// Rigid motion: rotation about the origin followed by a translation.
    pub fn transformed(&self, rotation: &Rotation3<f64>, translation: &Vec3) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| rotation * v + translation)
            .collect();
        Self {
            vertices,
            name: self.name.clone(),
            cmin: self.cmin,
        }
    }
}

fn validate_vertices(vertices: &[Vec3]) -> Result<()> {
    let n = vertices.len();
    if n < MIN_VERTICES {
        return Err(Error::InvalidKnot(format!(
            "need at least {MIN_VERTICES} vertices, got {n}"
        )));
    }
    if let Some(i) = vertices
        .iter()
        .position(|v| !v.iter().all(|c| c.is_finite()))
    {
        return Err(Error::InvalidKnot(format!("vertex {i} is not finite")));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if vertices[i] == vertices[j] {
            return Err(Error::InvalidKnot(format!("vertices {i} and {j} coincide")));
        }
    }
    Ok(())
}

/// Ropelength bookkeeping for a measured knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeGeometry {
    pub thickness: f64,
    pub length: f64,
    pub ropelength: f64,
}

pub(crate) fn centroid(vertices: &[Vec3]) -> Vec3 {
    vertices.iter().sum::<Vec3>() / vertices.len() as f64
}

/// Separation of two indices along a closed chain of `n` vertices.
#[inline]
pub(crate) fn cyclic_separation(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

pub(crate) fn polygon_length(vertices: &[Vec3]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| (vertices[(i + 1) % n] - vertices[i]).norm())
        .sum()
}

pub(crate) fn edge_lengths(vertices: &[Vec3]) -> Vec<f64> {
    let n = vertices.len();
    (0..n)
        .map(|i| (vertices[(i + 1) % n] - vertices[i]).norm())
        .collect()
}

/// Circumradius of the triangle (a, b, c); `+inf` when the points are collinear.
#[inline]
pub(crate) fn circumradius(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let cross = ab.cross(&ac).norm();
    if cross == 0.0 {
        return f64::INFINITY;
    }
    ab.norm() * (c - b).norm() * ac.norm() / (2.0 * cross)
}

#[inline]
pub(crate) fn vertex_radius(vertices: &[Vec3], i: usize) -> f64 {
    let n = vertices.len();
    circumradius(
        &vertices[(i + n - 1) % n],
        &vertices[i],
        &vertices[(i + 1) % n],
    )
}

pub(crate) fn min_local_radius(vertices: &[Vec3]) -> f64 {
    (0..vertices.len())
        .map(|i| vertex_radius(vertices, i))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn check_skip(n: usize, skip: usize) -> Result<()> {
    if skip < 2 || 2 * skip >= n {
        return Err(parameter(format!(
            "skip must satisfy 2 <= skip < N/2, got skip={skip} with N={n}"
        )));
    }
    Ok(())
}

/// Brute-force minimum distance over vertex pairs separated by more than
/// `skip` along the chain. Returns `+inf` when no such pair exists.
pub(crate) fn min_distant_pair(vertices: &[Vec3], skip: usize) -> f64 {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + skip + 1)..n {
            if n - (j - i) <= skip {
                break;
            }
            let d = (vertices[j] - vertices[i]).norm_squared();
            if d < best {
                best = d;
            }
        }
    }
    best.sqrt()
}

/// Total polygon length including the closing edge.
pub fn total_length(knot: &PolygonalKnot) -> f64 {
    polygon_length(&knot.vertices)
}

pub fn mean_edge_length(knot: &PolygonalKnot) -> f64 {
    total_length(knot) / knot.len() as f64
}

/// Circumradius of vertices (i-1, i, i+1), indices taken cyclically.
/// Collinear triples give `+inf`.
pub fn local_radius(knot: &PolygonalKnot, i: usize) -> f64 {
    vertex_radius(&knot.vertices, i % knot.len())
}

/// Minimum distance between vertices more than `skip` steps apart.
pub fn doubly_critical_distance(knot: &PolygonalKnot, skip: usize) -> Result<f64> {
    check_skip(knot.len(), skip)?;
    Ok(min_distant_pair(&knot.vertices, skip))
}

/// Discrete thickness: `min(min_i local_radius(i), doubly_critical_distance / 2)`.
pub fn thickness(knot: &PolygonalKnot, skip: usize) -> Result<f64> {
    let contact = doubly_critical_distance(knot, skip)?;
    Ok(min_local_radius(&knot.vertices).min(0.5 * contact))
}

pub fn ropelength(knot: &PolygonalKnot, skip: usize) -> Result<TubeGeometry> {
    let thickness = thickness(knot, skip)?;
    let length = total_length(knot);
    Ok(TubeGeometry {
        thickness,
        length,
        ropelength: length / thickness,
    })
}

/// Exclusion window for contact checks at a given rope radius:
/// `ceil(pi * R / mean_edge)`, clamped into the valid range `[2, N/2)`.
pub fn default_skip(knot: &PolygonalKnot, rope_radius: f64) -> usize {
    skip_for(knot.len(), mean_edge_length(knot), rope_radius)
}

pub(crate) fn skip_for(n: usize, mean_edge: f64, rope_radius: f64) -> usize {
    let upper = (n - 1) / 2;
    let raw = (PI * rope_radius / mean_edge).ceil();
    let raw = if raw.is_finite() && raw > 0.0 {
        raw as usize
    } else {
        upper
    };
    raw.clamp(2, upper.max(2))
}

/// Thickness measured with the skip window implied by the knot's own minimal
/// local radius. Convenient for knots whose rope radius is not known.
pub fn ropelength_auto(knot: &PolygonalKnot) -> Result<TubeGeometry> {
    let radius = min_local_radius(&knot.vertices);
    let radius = if radius.is_finite() {
        radius
    } else {
        mean_edge_length(knot)
    };
    ropelength(knot, default_skip(knot, radius))
}

/// Signed solid-angle contribution of two non-adjacent segments to the writhe,
/// already divided by 2*pi (each unordered pair counted once).
fn segment_pair_writhe(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> Result<f64> {
    let r13 = p3 - p1;
    let r14 = p4 - p1;
    let r23 = p3 - p2;
    let r24 = p4 - p2;
    let faces = [
        r13.cross(&r14),
        r14.cross(&r24),
        r24.cross(&r23),
        r23.cross(&r13),
    ];
    let scale = (r13.norm_squared() + r24.norm_squared()).max(f64::MIN_POSITIVE);
    let orientation = (p4 - p3).cross(&(p2 - p1)).dot(&r13);
    let coplanar = orientation.abs() <= 1e-14 * scale * scale.sqrt();
    if coplanar
        || faces
            .iter()
            .any(|f| f.norm_squared() <= 1e-28 * scale * scale)
    {
        // Coplanar configuration; contributes nothing unless the segments touch.
        if segment_distance(p1, p2, p3, p4) <= 1e-12 * scale.sqrt() {
            return Err(Error::Degenerate("non-adjacent segments intersect".into()));
        }
        return Ok(0.0);
    }
    let n: Vec<Vec3> = faces.iter().map(|f| f.normalize()).collect();
    let omega = (n[0].dot(&n[1]).clamp(-1.0, 1.0)).asin()
        + (n[1].dot(&n[2]).clamp(-1.0, 1.0)).asin()
        + (n[2].dot(&n[3]).clamp(-1.0, 1.0)).asin()
        + (n[3].dot(&n[0]).clamp(-1.0, 1.0)).asin();
    Ok(omega.copysign(orientation) / (2.0 * PI))
}

/// Closest distance between segments [p1,p2] and [p3,p4].
pub(crate) fn segment_distance(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> f64 {
    let d1 = p2 - p1;
    let d2 = p4 - p3;
    let r = p1 - p3;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((p1 + d1 * s) - (p3 + d2 * t)).norm()
}

/// Writhe of the closed polygon, summed exactly over non-adjacent segment
/// pairs using the solid angle they subtend.
pub fn writhe(knot: &PolygonalKnot) -> Result<f64> {
    let v = &knot.vertices;
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        let (p1, p2) = (&v[i], &v[(i + 1) % n]);
        // Segment i is adjacent to i-1 and i+1; for i == 0 the last segment
        // is adjacent too.
        let last = if i == 0 { n - 1 } else { n };
        for j in (i + 2)..last {
            total += segment_pair_writhe(p1, p2, &v[j], &v[(j + 1) % n])?;
        }
    }
    Ok(total)
}
