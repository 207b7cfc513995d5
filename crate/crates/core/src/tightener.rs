//! Shrink-on-no-overlaps tightening of polygonal knots at fixed rope radius.
//!
//! Each iteration equalizes edges, bounds the local curvature, optionally
//! pulls vertices toward their local curvature centres, and then removes
//! overlaps between distant vertices. Only when the overlap pass finds
//! nothing to fix is the whole knot scaled down about its centroid. The
//! loop stops when the ropelength has not improved for `stall_window`
//! iterations, or at `max_iterations`.

use std::fmt;

use crate::error::{parameter, Error, Result};
use crate::geometry::{
    self, centroid, check_skip, circumradius, edge_lengths, min_distant_pair, min_local_radius,
    polygon_length, segment_distance, skip_for, vertex_radius, PolygonalKnot, Vec3,
};
use crate::grid::SpatialGrid;

pub const DEFAULT_OVERLAP_TOLERANCE: f64 = 1e-4;

/// Parameters of a tightening run.
#[derive(Debug, Clone, PartialEq)]
pub struct TightenConfig {
    pub rope_radius: f64,
    /// Uniform scale applied after an overlap-free iteration.
    pub shrink_factor: f64,
    /// Relative slack on contact distances and curvature radii.
    pub overlap_tolerance: f64,
    pub max_iterations: usize,
    /// Iterations without relative ropelength improvement above
    /// `overlap_tolerance` before the run is declared stalled.
    pub stall_window: usize,
    pub ee_sweeps: usize,
    pub ro_sweeps: usize,
    /// Fixed exclusion window; `None` recomputes `ceil(pi R / mean edge)`
    /// every iteration.
    pub skip: Option<usize>,
    pub reposition_enabled: bool,
    pub reposition_strength: f64,
    /// Keep every n-th iteration in the report history.
    pub history_stride: usize,
}

impl Default for TightenConfig {
    fn default() -> Self {
        Self {
            rope_radius: 1.0,
            shrink_factor: 0.9995,
            overlap_tolerance: DEFAULT_OVERLAP_TOLERANCE,
            max_iterations: 200_000,
            stall_window: 2_000,
            ee_sweeps: 1,
            ro_sweeps: 4,
            skip: None,
            reposition_enabled: true,
            reposition_strength: 0.3,
            history_stride: 100,
        }
    }
}

impl TightenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rope_radius.is_finite() && self.rope_radius > 0.0) {
            return Err(parameter("rope_radius must be positive"));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(parameter("shrink_factor must lie in (0, 1)"));
        }
        if !(self.overlap_tolerance >= 0.0 && self.overlap_tolerance < 0.01) {
            return Err(parameter("overlap_tolerance must lie in [0, 0.01)"));
        }
        if self.max_iterations == 0 || self.stall_window == 0 {
            return Err(parameter(
                "max_iterations and stall_window must be positive",
            ));
        }
        if self.ro_sweeps == 0 {
            return Err(parameter("ro_sweeps must be positive"));
        }
        if self.history_stride == 0 {
            return Err(parameter("history_stride must be positive"));
        }
        if self.reposition_enabled
            && !(self.reposition_strength > 0.0 && self.reposition_strength <= 1.0)
        {
            return Err(parameter("reposition_strength must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Sets one field from its textual `key=value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| parameter(format!("invalid value '{value}' for {key}")))
        }
        match key {
            "rope_radius" => self.rope_radius = num(key, value)?,
            "shrink_factor" => self.shrink_factor = num(key, value)?,
            "overlap_tolerance" => self.overlap_tolerance = num(key, value)?,
            "max_iterations" => self.max_iterations = num(key, value)?,
            "stall_window" => self.stall_window = num(key, value)?,
            "ee_sweeps" => self.ee_sweeps = num(key, value)?,
            "ro_sweeps" => self.ro_sweeps = num(key, value)?,
            "skip" => {
                self.skip = match value {
                    "auto" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "reposition_enabled" => self.reposition_enabled = num(key, value)?,
            "reposition_strength" => self.reposition_strength = num(key, value)?,
            "history_stride" => self.history_stride = num(key, value)?,
            other => return Err(parameter(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses flat `key=value` text on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: index + 1,
                    message: "expected key=value".into(),
                });
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stalled,
    MaxIterations,
    ParameterError,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Stalled => "stalled",
            StopReason::MaxIterations => "max_iterations",
            StopReason::ParameterError => "parameter_error",
        })
    }
}

/// One retained row of the tightening history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub length: f64,
    pub thickness: f64,
    pub ropelength: f64,
    pub violations: usize,
    /// Whether the knot was shrunk at the end of this iteration.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightenReport {
    pub iterations_run: usize,
    pub final_ropelength: f64,
    pub final_writhe: f64,
    pub ropelength_history: Vec<HistoryRow>,
    pub overlap_events: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl TightenReport {
    /// CSV with one row per retained iteration.
    pub fn history_csv(&self) -> String {
        use crate::spectrum::fmt_sig;
        let mut out = String::from("iter,length,thickness,ropelength,violations\n");
        for row in &self.ropelength_history {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.iteration,
                fmt_sig(row.length),
                fmt_sig(row.thickness),
                fmt_sig(row.ropelength),
                row.violations
            ));
        }
        out
    }

    pub fn summary_line(&self) -> String {
        use crate::spectrum::fmt_sig;
        format!(
            "# iterations={} ropelength={} writhe={} overlap_events={} converged={} stop_reason={}",
            self.iterations_run,
            fmt_sig(self.final_ropelength),
            fmt_sig(self.final_writhe),
            self.overlap_events,
            self.converged,
            self.stop_reason
        )
    }
}

// ---------------------------------------------------------------------------
// Sweeps on raw vertex rings

/// Slides every vertex along the chord of its neighbours onto their
/// perpendicular bisector plane, which makes its two edges equal. The new
/// common length lies between the two old ones.
fn balance_sweep(v: &mut [Vec3]) {
    let n = v.len();
    for i in 0..n {
        let a = v[(i + n - 1) % n];
        let b = v[(i + 1) % n];
        let chord = b - a;
        let c2 = chord.norm_squared();
        if c2 == 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        let t = (mid - v[i]).dot(&chord) / c2;
        v[i] += chord * t;
    }
}

/// Lifts the middle vertex of a too-tight triple toward the chord of its
/// neighbours until the triple's circumradius equals `radius`. Returns the
/// number of vertices moved.
fn curvature_sweep(v: &mut [Vec3], radius: f64) -> usize {
    let n = v.len();
    let mut moved = 0;
    for i in 0..n {
        if vertex_radius(v, i) >= radius {
            continue;
        }
        if let Some(p) = flatten_to_radius(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n], radius) {
            v[i] = p;
            moved += 1;
        }
    }
    moved
}

/// Position for `mid` on the minor arc of radius `radius` through `a` and `b`,
/// keeping its coordinate along the chord and moving only across it.
fn flatten_to_radius(a: &Vec3, mid: &Vec3, b: &Vec3, radius: f64) -> Option<Vec3> {
    let chord = b - a;
    let c = chord.norm();
    if c == 0.0 || c >= 2.0 * radius {
        return None;
    }
    let u = chord / c;
    let centre = 0.5 * (a + b);
    let w = mid - centre;
    let x = w.dot(&u);
    let across = w - u * x;
    let y = across.norm();
    if y == 0.0 {
        return None;
    }
    let normal = across / y;
    let half = 0.5 * c;
    // Keep the vertex strictly between its neighbours along the chord.
    let x = x.clamp(-0.5 * half, 0.5 * half);
    let depth = (radius * radius - half * half).sqrt();
    let height = (radius * radius - x * x).sqrt() - depth;
    Some(centre + u * x + normal * height)
}

/// Pushes every distant pair closer than `2R(1 - tol)` apart, symmetrically
/// along its connecting line, to exactly `2R`. Returns the number of pairs
/// corrected.
fn overlap_sweep(
    v: &mut [Vec3],
    radius: f64,
    tolerance: f64,
    skip: usize,
    grid: &mut SpatialGrid,
) -> Result<usize> {
    let contact = 2.0 * radius;
    let threshold = contact * (1.0 - tolerance);
    grid.rebuild(v, contact);
    let pairs = grid.close_pairs(v, threshold, skip);
    let mut corrected = 0;
    for (i, j, _) in pairs {
        let delta = v[j] - v[i];
        let d = delta.norm();
        if d >= threshold {
            continue;
        }
        if d == 0.0 {
            return Err(Error::Degenerate(format!("vertices {i} and {j} coincide")));
        }
        let mid = 0.5 * (v[i] + v[j]);
        let dir = delta / d;
        v[i] = mid - dir * radius;
        v[j] = mid + dir * radius;
        corrected += 1;
    }
    Ok(corrected)
}

/// Moves each vertex whose triple is looser than `R` toward the circumcentre
/// of the triple by `strength` times its distance from the neighbour chord.
/// A move is kept only if neither neighbouring triple drops below `R` and,
/// when `contacts` is given, the vertex does not move closer to a distant
/// vertex already within `2R`.
fn reposition_sweep(
    v: &mut [Vec3],
    radius: f64,
    strength: f64,
    contacts: Option<(&SpatialGrid, usize)>,
) -> usize {
    // Moves are computed from the positions at the start of the sweep and
    // applied together, so the result does not depend on the start vertex.
    let old = v.to_vec();
    let n = old.len();
    let mut moved = 0;
    for i in 0..n {
        let a = old[(i + n - 1) % n];
        let b = old[(i + 1) % n];
        let p = old[i];
        let rho = circumradius(&a, &p, &b);
        if !rho.is_finite() || rho <= radius {
            continue;
        }
        let chord = b - a;
        let c2 = chord.norm_squared();
        let rel = p - a;
        let sagitta_vec = rel - chord * (rel.dot(&chord) / c2);
        let sagitta = sagitta_vec.norm();
        if sagitta == 0.0 {
            continue;
        }
        let toward_centre = -sagitta_vec / sagitta;
        let candidate = p + toward_centre * (strength * sagitta);
        let before = circumradius(&old[(i + n - 2) % n], &a, &candidate);
        let after = circumradius(&candidate, &b, &old[(i + 2) % n]);
        if before < radius || after < radius {
            continue;
        }
        if let Some((grid, skip)) = contacts {
            let contact = 2.0 * radius;
            let nearest = grid.nearest_distant(&old, i, &p, skip).min(contact);
            if grid.nearest_distant(&old, i, &candidate, skip) < nearest {
                continue;
            }
        }
        v[i] = candidate;
        moved += 1;
    }
    moved
}

fn scale_about_centroid(v: &mut [Vec3], factor: f64) {
    let c = centroid(v);
    for p in v.iter_mut() {
        *p = c + (*p - c) * factor;
    }
}

/// Thickness of a ring at a rope radius scale: the grid finds every pair
/// closer than `2R`; otherwise fall back to the full scan.
fn ring_thickness(v: &[Vec3], radius: f64, skip: usize, grid: &mut SpatialGrid) -> f64 {
    let contact = 2.0 * radius;
    grid.rebuild(v, contact);
    let near = grid.close_pairs(v, contact, skip);
    let dmin = if near.is_empty() {
        min_distant_pair(v, skip)
    } else {
        near.iter().map(|p| p.2).fold(f64::INFINITY, f64::min)
    };
    min_local_radius(v).min(0.5 * dmin)
}

// ---------------------------------------------------------------------------
// Public single-procedure operations

/// One edge-equalization sweep. `target_length` is the reference the edge
/// deviation is measured against; the sweep never increases
/// `max_i |edge_i - target_length|`.
pub fn equalize_edges(knot: &PolygonalKnot, target_length: f64) -> Result<PolygonalKnot> {
    if !(target_length.is_finite() && target_length > 0.0) {
        return Err(parameter("target_length must be positive"));
    }
    let mut v = knot.vertices().to_vec();
    balance_sweep(&mut v);
    knot.with_vertices(v)
}

/// Largest `|edge_i - target|` over the ring.
pub fn edge_deviation(knot: &PolygonalKnot, target: f64) -> f64 {
    edge_lengths(knot.vertices())
        .into_iter()
        .map(|l| (l - target).abs())
        .fold(0.0, f64::max)
}

/// One curvature-control sweep at the given rope radius.
pub fn control_curvature(knot: &PolygonalKnot, rope_radius: f64) -> Result<PolygonalKnot> {
    if !(rope_radius > 0.0) {
        return Err(parameter("rope_radius must be positive"));
    }
    let mut v = knot.vertices().to_vec();
    curvature_sweep(&mut v, rope_radius);
    knot.with_vertices(v)
}

/// One overlap-removal sweep with the default tolerance. Returns the new
/// knot and the number of pairs corrected.
pub fn remove_overlaps(
    knot: &PolygonalKnot,
    rope_radius: f64,
    skip: usize,
) -> Result<(PolygonalKnot, usize)> {
    remove_overlaps_with_tolerance(knot, rope_radius, skip, DEFAULT_OVERLAP_TOLERANCE)
}

pub fn remove_overlaps_with_tolerance(
    knot: &PolygonalKnot,
    rope_radius: f64,
    skip: usize,
    tolerance: f64,
) -> Result<(PolygonalKnot, usize)> {
    check_skip(knot.len(), skip)?;
    if !(rope_radius > 0.0) {
        return Err(parameter("rope_radius must be positive"));
    }
    let mut v = knot.vertices().to_vec();
    let mut grid = SpatialGrid::default();
    let count = overlap_sweep(&mut v, rope_radius, tolerance, skip, &mut grid)?;
    Ok((knot.with_vertices(v)?, count))
}

/// One sweep pulling vertices toward their local curvature centres without
/// letting any neighbouring triple fall below `rope_radius`.
pub fn reposition_to_curvature_centers(
    knot: &PolygonalKnot,
    rope_radius: f64,
    strength: f64,
) -> Result<PolygonalKnot> {
    if !(strength > 0.0 && strength <= 1.0) {
        return Err(parameter("strength must lie in (0, 1]"));
    }
    if !(rope_radius > 0.0) {
        return Err(parameter("rope_radius must be positive"));
    }
    let mut v = knot.vertices().to_vec();
    reposition_sweep(&mut v, rope_radius, strength, None);
    knot.with_vertices(v)
}

// ---------------------------------------------------------------------------
// The tightening loop

fn check_embedded(v: &[Vec3]) -> Result<()> {
    let n = v.len();
    let scale = polygon_length(v) / n as f64;
    for i in 0..n {
        let last = if i == 0 { n - 1 } else { n };
        for j in (i + 2)..last {
            let d = segment_distance(&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]);
            if d <= 1e-9 * scale {
                return Err(Error::Precondition(format!(
                    "segments {i} and {j} intersect"
                )));
            }
        }
    }
    Ok(())
}

/// Final-state checks: near-equilateral, no close distant pair, no tight triple.
fn satisfies_final_state(
    v: &[Vec3],
    radius: f64,
    tolerance: f64,
    skip: usize,
    grid: &mut SpatialGrid,
) -> bool {
    let edges = edge_lengths(v);
    let mean = edges.iter().sum::<f64>() / edges.len() as f64;
    if edges.iter().any(|l| (l - mean).abs() > 1e-3 * mean) {
        return false;
    }
    let floor = radius * (1.0 - 2.0 * tolerance);
    if min_local_radius(v) < floor {
        return false;
    }
    grid.rebuild(v, 2.0 * radius);
    grid.close_pairs(v, 2.0 * floor, skip).is_empty()
}

struct Run<'a> {
    config: &'a TightenConfig,
    v: Vec<Vec3>,
    grid: SpatialGrid,
}

impl Run<'_> {
    fn skip(&self) -> Result<usize> {
        let n = self.v.len();
        match self.config.skip {
            Some(s) => {
                check_skip(n, s)?;
                Ok(s)
            }
            None => Ok(skip_for(
                n,
                polygon_length(&self.v) / n as f64,
                self.config.rope_radius,
            )),
        }
    }

    /// Uniformly rescales the ring so its thickness equals the rope radius.
    fn normalize(&mut self) -> Result<()> {
        let radius = self.config.rope_radius;
        for _ in 0..50 {
            let skip = self.skip()?;
            let t = ring_thickness(&self.v, radius, skip, &mut self.grid);
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Precondition(
                    "starting knot has zero thickness".into(),
                ));
            }
            let ratio = radius / t;
            if (ratio - 1.0).abs() < 1e-12 {
                return Ok(());
            }
            for p in self.v.iter_mut() {
                *p *= ratio;
            }
        }
        Ok(())
    }

    /// Correction sweeps: equalize, curvature, reposition, overlaps. Returns
    /// the count from the last overlap sweep.
    fn correct(&mut self, ee_sweeps: usize, reposition: bool) -> Result<usize> {
        let cfg = self.config;
        for _ in 0..ee_sweeps {
            balance_sweep(&mut self.v);
        }
        curvature_sweep(&mut self.v, cfg.rope_radius);
        if reposition {
            let skip = self.skip()?;
            self.grid.rebuild(&self.v, 2.0 * cfg.rope_radius);
            reposition_sweep(
                &mut self.v,
                cfg.rope_radius,
                cfg.reposition_strength,
                Some((&self.grid, skip)),
            );
        }
        // RO pushes bend corners; re-flatten between sweeps so a clean pass
        // means both constraints hold.
        let floor = cfg.rope_radius * (1.0 - cfg.overlap_tolerance);
        let mut violations = 0;
        for sweep in 0..cfg.ro_sweeps {
            if sweep > 0 {
                curvature_sweep(&mut self.v, cfg.rope_radius);
            }
            let skip = self.skip()?;
            violations = overlap_sweep(
                &mut self.v,
                cfg.rope_radius,
                cfg.overlap_tolerance,
                skip,
                &mut self.grid,
            )?;
            if violations == 0 && min_local_radius(&self.v) >= floor {
                break;
            }
        }
        Ok(violations)
    }

    /// Settles the final state without shrinking; widens the knot slightly if
    /// the corrections cannot reach a clean state.
    fn polish(&mut self) -> Result<()> {
        let cfg = self.config;
        for _ in 0..200 {
            for _ in 0..500 {
                self.correct(cfg.ee_sweeps.max(1), false)?;
                let skip = self.skip()?;
                if satisfies_final_state(
                    &self.v,
                    cfg.rope_radius,
                    cfg.overlap_tolerance,
                    skip,
                    &mut self.grid,
                ) {
                    return Ok(());
                }
            }
            scale_about_centroid(&mut self.v, 1.0 / cfg.shrink_factor);
        }
        Ok(())
    }
}

/// Tightens `knot` at the configured rope radius.
pub fn tighten(
    knot: &PolygonalKnot,
    config: &TightenConfig,
) -> Result<(PolygonalKnot, TightenReport)> {
    config.validate()?;
    check_embedded(knot.vertices())?;
    let mut run = Run {
        config,
        v: knot.vertices().to_vec(),
        grid: SpatialGrid::default(),
    };
    run.normalize()?;

    let mut history = Vec::new();
    let mut overlap_events = 0;
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut stop_reason = StopReason::MaxIterations;
    let mut iterations_run = 0;

    for iteration in 0..config.max_iterations {
        iterations_run = iteration + 1;
        let violations = run.correct(config.ee_sweeps, config.reposition_enabled)?;
        overlap_events += violations;

        let skip = run.skip()?;
        let length = polygon_length(&run.v);
        let thickness = ring_thickness(&run.v, config.rope_radius, skip, &mut run.grid);
        let ropelength = length / thickness;
        let accepted = violations == 0;

        let row = HistoryRow {
            iteration,
            length,
            thickness,
            ropelength,
            violations,
            accepted,
        };
        if iteration % config.history_stride == 0 {
            history.push(row);
        }

        if ropelength < best * (1.0 - config.overlap_tolerance) {
            best = ropelength;
            since_best = 0;
        } else {
            since_best += 1;
        }
        // The first iteration only establishes the baseline.
        if iteration == 0 {
            since_best = 1;
        }
        if since_best >= config.stall_window {
            stop_reason = StopReason::Stalled;
            if history.last().map(|r| r.iteration) != Some(iteration) {
                history.push(row);
            }
            break;
        }
        if accepted {
            scale_about_centroid(&mut run.v, config.shrink_factor);
        }
    }

    run.polish()?;
    let final_knot = knot.with_vertices(run.v)?;
    let skip = match config.skip {
        Some(s) => s,
        None => geometry::default_skip(&final_knot, config.rope_radius),
    };
    let geo = geometry::ropelength(&final_knot, skip)?;
    let final_writhe = geometry::writhe(&final_knot)?;
    let report = TightenReport {
        iterations_run,
        final_ropelength: geo.ropelength,
        final_writhe,
        ropelength_history: history,
        overlap_events,
        converged: stop_reason == StopReason::Stalled,
        stop_reason,
    };
    Ok((final_knot, report))
}
