//! Uniform spatial hash over knot vertices for near-pair queries.

use std::collections::HashMap;

use crate::geometry::{cyclic_separation, Vec3};

type CellKey = (i64, i64, i64);

/// Buckets vertex indices into cubic cells of a fixed edge length.
///
/// Pair queries return index pairs `(i, j)` with `i < j`, sorted, so callers
/// can apply corrections in a deterministic order regardless of hash layout.
#[derive(Debug, Default)]
pub struct SpatialGrid {
    cell: f64,
    cells: HashMap<CellKey, Vec<usize>>,
}

impl SpatialGrid {
    pub fn new(cell: f64) -> Self {
        Self {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: &Vec3) -> CellKey {
        let inv = 1.0 / self.cell;
        (
            (p.x * inv).floor() as i64,
            (p.y * inv).floor() as i64,
            (p.z * inv).floor() as i64,
        )
    }

    /// Rebuilds the buckets for `points` with the given cell size.
    pub fn rebuild(&mut self, points: &[Vec3], cell: f64) {
        self.cell = cell;
        for bucket in self.cells.values_mut() {
            bucket.clear();
        }
        for (i, p) in points.iter().enumerate() {
            let key = self.key(p);
            self.cells.entry(key).or_default().push(i);
        }
        self.cells.retain(|_, bucket| !bucket.is_empty());
    }

    /// All pairs closer than `radius` (which must not exceed the cell size)
    /// whose cyclic index separation exceeds `skip`. Each entry carries the
    /// pair's current distance.
    pub fn close_pairs(
        &self,
        points: &[Vec3],
        radius: f64,
        skip: usize,
    ) -> Vec<(usize, usize, f64)> {
        debug_assert!(radius <= self.cell * (1.0 + 1e-12));
        let n = points.len();
        let r2 = radius * radius;
        let mut pairs = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let (cx, cy, cz) = self.key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(bucket) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        for &j in bucket {
                            if j <= i || cyclic_separation(i, j, n) <= skip {
                                continue;
                            }
                            let d2 = (points[j] - p).norm_squared();
                            if d2 < r2 {
                                pairs.push((i, j, d2.sqrt()));
                            }
                        }
                    }
                }
            }
        }
        pairs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        pairs
    }

    /// Distance from `q` to the nearest bucketed vertex whose cyclic
    /// separation from `index` exceeds `skip`, looking only one cell out.
    /// Returns infinity when nothing is that close.
    pub fn nearest_distant(&self, points: &[Vec3], index: usize, q: &Vec3, skip: usize) -> f64 {
        let n = points.len();
        let (cx, cy, cz) = self.key(q);
        let mut best = f64::INFINITY;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    for &j in bucket {
                        if cyclic_separation(index, j, n) > skip {
                            best = best.min((points[j] - q).norm_squared());
                        }
                    }
                }
            }
        }
        best.sqrt()
    }
}
