use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;
use tightknot::energy::{
    constrained_energy, constrained_energy_standard, energy_from_ropelength,
    length_from_ropelength, radius_from_ropelength, Signature,
};
use tightknot::fieldverify::{min_jacobian, FluxTubeConfig};
use tightknot::geometry::{self, doubly_critical_distance, local_radius, thickness, writhe};
use tightknot::initializers::{make_torus_knot, TorusKnotSpec};
use tightknot::spectrum::{family_average, spectrum_csv, spectrum_rows, KnotRecord};
use tightknot::tightener::{edge_deviation, equalize_edges};
use tightknot::{PolygonalKnot, Vec3};

fn torus_knot() -> impl Strategy<Value = PolygonalKnot> {
    (
        prop::sample::select(vec![(2u32, 3u32), (3, 2), (2, 5), (3, 4)]),
        60usize..160,
        1.6f64..3.0,
    )
        .prop_map(|((p, q), beads, major)| {
            let spec = TorusKnotSpec {
                major_radius: major,
                ..TorusKnotSpec::new(p, q, beads)
            };
            make_torus_knot(&spec).unwrap()
        })
}

fn rigid_motion() -> impl Strategy<Value = (Rotation3<f64>, Vec3)> {
    (
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        0.0f64..PI,
        (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0),
    )
        .prop_filter("axis must be non-zero", |((x, y, z), _, _)| {
            x * x + y * y + z * z > 1e-3
        })
        .prop_map(|((x, y, z), angle, (tx, ty, tz))| {
            let axis = Unit::new_normalize(Vec3::new(x, y, z));
            (
                Rotation3::from_axis_angle(&axis, angle),
                Vec3::new(tx, ty, tz),
            )
        })
}

/// Star-shaped polygon in the xy-plane with the given radii.
fn planar_polygon(radii: &[f64]) -> PolygonalKnot {
    let n = radii.len();
    let v = radii
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Vec3::new(r * t.cos(), r * t.sin(), 0.0)
        })
        .collect();
    PolygonalKnot::new(v).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ropelength_and_writhe_survive_rigid_motion_and_scale(
        knot in torus_knot(),
        (rot, shift) in rigid_motion(),
        scale in prop::sample::select(vec![0.1, 1.0, 7.0]),
    ) {
        let moved = knot.transformed(&rot, &shift).scaled(scale).unwrap();
        let a = geometry::ropelength_auto(&knot).unwrap().ropelength;
        let b = geometry::ropelength_auto(&moved).unwrap().ropelength;
        prop_assert!(rel(a, b) < 1e-10, "{a} vs {b}");
        let wa = writhe(&knot).unwrap();
        let wb = writhe(&moved).unwrap();
        prop_assert!((wa - wb).abs() < 1e-10, "{wa} vs {wb}");
    }

    #[test]
    fn mirror_negates_writhe(knot in torus_knot(), (rot, shift) in rigid_motion()) {
        let knot = knot.transformed(&rot, &shift);
        let w = writhe(&knot).unwrap();
        let m = writhe(&knot.mirrored()).unwrap();
        prop_assert!((w + m).abs() <= 1e-12 * w.abs().max(1.0), "{w} vs {m}");
    }

    #[test]
    fn thickness_is_bounded_by_both_terms(knot in torus_knot(), skip in 2usize..20) {
        let t = thickness(&knot, skip).unwrap();
        let d = doubly_critical_distance(&knot, skip).unwrap();
        prop_assert!(t <= 0.5 * d);
        for i in 0..knot.len() {
            prop_assert!(t <= local_radius(&knot, i));
        }
    }

    #[test]
    fn planar_polygons_have_zero_writhe(
        radii in prop::collection::vec(0.5f64..2.0, 5..60),
        (rot, shift) in rigid_motion(),
    ) {
        let knot = planar_polygon(&radii).transformed(&rot, &shift);
        prop_assert!(writhe(&knot).unwrap().abs() < 1e-10);
    }

    #[test]
    fn edge_balancing_never_increases_deviation(
        radii in prop::collection::vec(0.8f64..1.2, 8..40),
        lift in prop::collection::vec(-0.2f64..0.2, 40),
        target in 0.05f64..2.0,
    ) {
        let n = radii.len();
        let v: Vec<Vec3> = radii
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Vec3::new(r * t.cos(), r * t.sin(), lift[k])
            })
            .collect();
        let mut knot = PolygonalKnot::new(v).unwrap();
        let mut dev = edge_deviation(&knot, target);
        for _ in 0..10 {
            knot = equalize_edges(&knot, target).unwrap();
            let next = edge_deviation(&knot, target);
            prop_assert!(next <= dev * (1.0 + 1e-12) + 1e-15, "{next} > {dev}");
            dev = next;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn energy_is_even_in_framing(rl in 2.0 * PI..200.0, h in -20.0f64..20.0) {
        prop_assert_eq!(energy_from_ropelength(rl, h).unwrap(), energy_from_ropelength(rl, -h).unwrap());
    }

    #[test]
    fn framing_offset_is_exact(rl in 2.0 * PI..200.0, h in -20.0f64..20.0) {
        prop_assume!(h.abs() > 1e-6);
        let offset = energy_from_ropelength(rl, h).unwrap() - energy_from_ropelength(rl, 0.0).unwrap();
        let exact = PI.powf(4.0 / 3.0) * h * h * rl.powf(-2.0 / 3.0);
        // Subtracting M*(0) costs a few ulps of M*(h) on top of the relative budget.
        let floor = 4.0 * f64::EPSILON * energy_from_ropelength(rl, h).unwrap();
        prop_assert!((offset - exact).abs() <= 1e-12 * exact + floor);
        prop_assert!(offset > 0.0);
    }

    #[test]
    fn gamma_two_reduces_to_standard_form(
        length in 0.1f64..100.0,
        volume in 0.01f64..100.0,
        flux in -5.0f64..5.0,
        h in -10.0f64..10.0,
    ) {
        let sig = Signature { volume, flux, framing: h, gamma: 2.0 };
        let general = constrained_energy(&sig, length).unwrap();
        let standard = constrained_energy_standard(length, volume, flux, h).unwrap();
        prop_assert!((general - standard).abs() <= 1e-14 * standard.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn ropelength_chain_identity(rl in 6.0f64..60.0, h in -8.0f64..8.0, volume in 0.1f64..10.0) {
        let direct = energy_from_ropelength(rl, h).unwrap();
        let l = length_from_ropelength(rl, 1.0).unwrap();
        let chain = constrained_energy_standard(l, 1.0, 1.0, h).unwrap();
        prop_assert!(rel(direct, chain) < 1e-12);
        // R and L are consistent at any volume: L / R = rl and pi R^2 L = V.
        let r = radius_from_ropelength(rl, volume).unwrap();
        let lv = length_from_ropelength(rl, volume).unwrap();
        prop_assert!(rel(lv / r, rl) < 1e-13);
        prop_assert!(rel(PI * r * r * lv, volume) < 1e-13);
    }

    #[test]
    fn family_mean_lies_between_members(rls in prop::collection::vec((3u32..8, 2.0 * PI..120.0), 1..30)) {
        let records: Vec<KnotRecord> =
            rls.iter().enumerate().map(|(k, (c, rl))| KnotRecord::new(format!("k{k}"), *c, *rl)).collect();
        for fam in family_average(&records).unwrap() {
            let members: Vec<f64> = records.iter().filter(|r| r.cmin == fam.cmin).map(|r| r.ropelength).collect();
            let lo = members.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = members.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo * (1.0 - 1e-15) <= fam.mean_ropelength && fam.mean_ropelength <= hi * (1.0 + 1e-15));
            prop_assert!(fam.min_energy <= fam.mean_energy * (1.0 + 1e-15));
            prop_assert!(fam.mean_energy <= fam.max_energy * (1.0 + 1e-15));
        }
    }

    #[test]
    fn spectrum_rows_are_even_and_reproducible(
        rls in prop::collection::vec((3u32..8, 2.0 * PI..120.0), 1..12),
        hmax in 0.5f64..6.0,
    ) {
        let records: Vec<KnotRecord> =
            rls.iter().enumerate().map(|(k, (c, rl))| KnotRecord::new(format!("k{k:02}"), *c, *rl)).collect();
        let grid: Vec<f64> = (-4..=4).map(|k| k as f64 * hmax / 4.0).collect();
        let table = spectrum_rows(&records, &grid).unwrap();
        for row in &table.rows {
            let mirror = table
                .rows
                .iter()
                .find(|r| r.label == row.label && r.framing == -row.framing)
                .unwrap();
            prop_assert_eq!(row.m_star, mirror.m_star);
        }
        let again = spectrum_rows(&records, &grid).unwrap();
        prop_assert_eq!(spectrum_csv(&table).unwrap(), spectrum_csv(&again).unwrap());
    }

    #[test]
    fn jacobian_positive_for_valid_tubes(a in 0.01f64..0.5, frac in 0.0f64..0.99, n in 8usize..24) {
        let cfg = FluxTubeConfig { tube_radius: a, axis_curvature: frac / a, ..FluxTubeConfig::default() }.with_grid(n);
        prop_assert!(min_jacobian(&cfg).unwrap() > 0.0);
    }
}

#[test]
fn minimum_over_framing_is_at_zero() {
    for rl in [6.3, 20.0, 47.2, 90.0] {
        let base = energy_from_ropelength(rl, 0.0).unwrap();
        for k in 1..=160 {
            let h = k as f64 * 0.05;
            assert!(energy_from_ropelength(rl, h).unwrap() > base);
            assert!(energy_from_ropelength(rl, -h).unwrap() > base);
        }
    }
}
