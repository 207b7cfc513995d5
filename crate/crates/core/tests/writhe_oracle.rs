//! Discrete writhe of sampled torus knots against the Gauss double integral
//! of the smooth curve, evaluated by a periodic midpoint rule.

use std::f64::consts::PI;

use tightknot::geometry::writhe;
use tightknot::initializers::{make_torus_knot, TorusKnotSpec};

type P3 = [f64; 3];

fn torus_point(p: f64, q: f64, t: f64) -> (P3, P3) {
    let (big, small) = (2.0, 1.0);
    let rho = big + small * (q * t).cos();
    let drho = -small * q * (q * t).sin();
    let pos = [
        rho * (p * t).cos(),
        rho * (p * t).sin(),
        small * (q * t).sin(),
    ];
    let vel = [
        drho * (p * t).cos() - rho * p * (p * t).sin(),
        drho * (p * t).sin() + rho * p * (p * t).cos(),
        small * q * (q * t).cos(),
    ];
    (pos, vel)
}

/// `1/(4 pi) int int (x'(s) x x'(t)) . (x(s) - x(t)) / |x(s) - x(t)|^3 ds dt`.
/// The integrand extends smoothly across the diagonal, where it is set to 0.
fn gauss_writhe(p: f64, q: f64, m: usize) -> f64 {
    let h = 2.0 * PI / m as f64;
    let samples: Vec<(P3, P3)> = (0..m)
        .map(|k| torus_point(p, q, (k as f64 + 0.5) * h))
        .collect();
    let mut total = 0.0;
    for i in 0..m {
        let (xi, vi) = samples[i];
        for j in (i + 1)..m {
            let (xj, vj) = samples[j];
            let d = [xi[0] - xj[0], xi[1] - xj[1], xi[2] - xj[2]];
            let c = [
                vi[1] * vj[2] - vi[2] * vj[1],
                vi[2] * vj[0] - vi[0] * vj[2],
                vi[0] * vj[1] - vi[1] * vj[0],
            ];
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            total += (c[0] * d[0] + c[1] * d[1] + c[2] * d[2]) / (r2 * r2.sqrt());
        }
    }
    2.0 * total * h * h / (4.0 * PI)
}

#[test]
fn trefoil_writhe_matches_smooth_quadrature() {
    let smooth = gauss_writhe(2.0, 3.0, 1600);
    let finer = gauss_writhe(2.0, 3.0, 2400);
    assert!(
        (smooth - finer).abs() < 1e-6,
        "oracle not converged: {smooth} vs {finer}"
    );

    let w200 = writhe(&make_torus_knot(&TorusKnotSpec::new(2, 3, 200)).unwrap()).unwrap();
    let w400 = writhe(&make_torus_knot(&TorusKnotSpec::new(2, 3, 400)).unwrap()).unwrap();
    assert!(
        (w400 - finer).abs() < 1e-3,
        "discrete {w400} vs smooth {finer}"
    );
    // Polygonal error is second order in the bead spacing.
    let ratio = (w200 - finer).abs() / (w400 - finer).abs();
    assert!((3.5..4.5).contains(&ratio), "refinement ratio {ratio}");
}

#[test]
fn swapped_torus_knot_matches_its_own_quadrature() {
    let smooth = gauss_writhe(3.0, 2.0, 2400);
    let w = writhe(&make_torus_knot(&TorusKnotSpec::new(3, 2, 400)).unwrap()).unwrap();
    assert!((w - smooth).abs() < 1e-3, "discrete {w} vs smooth {smooth}");
}
