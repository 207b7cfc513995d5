//! Quadrature checks of the average flux-tube field.
//!
//! The tube of radius `a` surrounds an axis of constant curvature `c` in the
//! orthogonal coordinates `(r, theta_R, s)` with volume element `r k`,
//! `k = 1 - c r cos(theta)`. The fluctuating part of the field is zero, so
//!
//! ```text
//! B_theta = Phi_P'(r) / L            B_s = Phi_T'(r) / (2 pi r)
//! A_theta = Phi_T(r) / (2 pi r)      A_s = (Phi_P(a) - Phi_P(r)) / L
//! ```
//!
//! with `Phi_T = (r/a)^gamma Phi` and `Phi_P = h Phi_T`.
//!
//! All three axes use cell-centred midpoint nodes. The radial axis is
//! integrated in the variable `t` with `r = a (t - sin(2 pi t) / (2 pi))`,
//! which clusters nodes at both ends of `[0, a]`; the power-law integrands
//! then converge at fourth order instead of being limited by the `r = 0`
//! endpoint.

use std::f64::consts::PI;

use crate::energy::{constrained_energy, Signature};
use crate::error::{domain, Error, Result};
use crate::geometry::Vec3;

/// Tube and flux parameters for the quadrature checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxTubeConfig {
    pub tube_radius: f64,
    pub axis_curvature: f64,
    pub axis_length: f64,
    pub gamma: f64,
    pub framing: f64,
    pub flux: f64,
    /// Nodes along `(r, theta, s)`.
    pub grid: (usize, usize, usize),
}

impl Default for FluxTubeConfig {
    /// Straight unit-volume tube of radius 0.1.
    fn default() -> Self {
        Self {
            tube_radius: 0.1,
            axis_curvature: 0.0,
            axis_length: 1.0 / (PI * 0.01),
            gamma: 2.0,
            framing: 0.0,
            flux: 1.0,
            grid: (64, 64, 64),
        }
    }
}

impl FluxTubeConfig {
    pub fn validate(&self) -> Result<()> {
        let a = self.tube_radius;
        if !(a.is_finite() && a > 0.0) {
            return Err(domain(format!("tube radius must be positive, got {a}")));
        }
        if !(self.axis_length.is_finite() && self.axis_length > 0.0) {
            return Err(domain(format!(
                "axis length must be positive, got {}",
                self.axis_length
            )));
        }
        if !(self.axis_curvature.is_finite() && self.axis_curvature >= 0.0) {
            return Err(domain(format!(
                "curvature must be non-negative, got {}",
                self.axis_curvature
            )));
        }
        if a * self.axis_curvature >= 1.0 {
            return Err(Error::Regularity(format!(
                "tube radius {a} reaches the curvature radius {}",
                1.0 / self.axis_curvature
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(domain(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !self.flux.is_finite() || !self.framing.is_finite() {
            return Err(domain("flux and framing must be finite"));
        }
        let (nr, nt, ns) = self.grid;
        if nr < 8 || nt < 8 || ns < 8 {
            return Err(domain(format!(
                "grid sizes must be >= 8, got ({nr}, {nt}, {ns})"
            )));
        }
        Ok(())
    }

    pub fn with_grid(self, n: usize) -> Self {
        Self {
            grid: (n, n, n),
            ..self
        }
    }

    pub fn volume(&self) -> f64 {
        PI * self.tube_radius * self.tube_radius * self.axis_length
    }

    pub fn signature(&self) -> Signature {
        Signature {
            volume: self.volume(),
            flux: self.flux,
            framing: self.framing,
            gamma: self.gamma,
        }
    }
}

/// Field and potential components at one point. Radial components vanish.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub b_theta: f64,
    pub b_s: f64,
    pub a_theta: f64,
    pub a_s: f64,
}

/// `(Phi_T, Phi_P, Phi_T', Phi_P')` at radius `r`.
pub fn flux_profiles(r: f64, cfg: &FluxTubeConfig) -> Result<(f64, f64, f64, f64)> {
    let a = cfg.tube_radius;
    if !(0.0..=a).contains(&r) {
        return Err(domain(format!("radius {r} outside [0, {a}]")));
    }
    let g = cfg.gamma;
    let x = r / a;
    let phi_t = x.powf(g) * cfg.flux;
    let d_phi_t = g * x.powf(g - 1.0) * cfg.flux / a;
    Ok((phi_t, cfg.framing * phi_t, d_phi_t, cfg.framing * d_phi_t))
}

/// Average field at `(r, theta)`; the axis has no torsion so `theta_R = theta`.
pub fn average_field(r: f64, theta: f64, cfg: &FluxTubeConfig) -> Result<FieldSample> {
    if r <= 0.0 {
        return Err(domain(format!("field needs r > 0, got {r}")));
    }
    let (_, _, d_phi_t, d_phi_p) = flux_profiles(r, cfg)?;
    let k = 1.0 - cfg.axis_curvature * r * theta.cos();
    if k <= 0.0 {
        return Err(Error::Regularity(format!("k = {k} at r = {r}")));
    }
    Ok(FieldSample {
        b_theta: d_phi_p / cfg.axis_length,
        b_s: d_phi_t / (2.0 * PI * r),
        ..FieldSample::default()
    })
}

/// Vector potential at radius `r`, zero at the wall in the `s` component.
pub fn vector_potential(r: f64, cfg: &FluxTubeConfig) -> Result<FieldSample> {
    let (phi_t, phi_p, _, _) = flux_profiles(r, cfg)?;
    let wall_p = cfg.framing * cfg.flux;
    let a_theta = if r == 0.0 {
        0.0
    } else {
        phi_t / (2.0 * PI * r)
    };
    Ok(FieldSample {
        a_theta,
        a_s: (wall_p - phi_p) / cfg.axis_length,
        ..FieldSample::default()
    })
}

/// Radial nodes and weights covering `[0, a]`.
fn radial_rule(n: usize, a: f64) -> Vec<(f64, f64)> {
    let dt = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            let w = 2.0 * PI * t;
            let r = a * (t - w.sin() / (2.0 * PI));
            (r.min(a), a * (1.0 - w.cos()) * dt)
        })
        .collect()
}

fn angle_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * PI * (j as f64 + 0.5) / n as f64)
        .collect()
}

/// Pairwise summation; fixed order keeps results bit-stable.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Integrates `density(sample, r)` times `r k` over the product grid.
fn tube_integral(cfg: &FluxTubeConfig, density: impl Fn(&FieldSample) -> f64) -> Result<f64> {
    cfg.validate()?;
    let (nr, nt, ns) = cfg.grid;
    let thetas = angle_nodes(nt);
    let dtheta = 2.0 * PI / nt as f64;
    let ds = cfg.axis_length / ns as f64;
    let mut shells = Vec::with_capacity(nr);
    let mut cells = vec![0.0; nt * ns];
    for (r, wr) in radial_rule(nr, cfg.tube_radius) {
        let pot = vector_potential(r, cfg)?;
        for (j, &theta) in thetas.iter().enumerate() {
            let b = average_field(r, theta, cfg)?;
            let sample = FieldSample {
                a_theta: pot.a_theta,
                a_s: pot.a_s,
                ..b
            };
            let k = 1.0 - cfg.axis_curvature * r * theta.cos();
            let value = density(&sample) * r * k * wr * dtheta * ds;
            // Fields do not vary along s; each s-cell still gets its own node.
            cells[j * ns..(j + 1) * ns].fill(value);
        }
        shells.push(pairwise_sum(&cells));
    }
    Ok(pairwise_sum(&shells))
}

/// `1/2 int (B_theta^2 + B_s^2) r k dr dtheta ds`.
pub fn energy_quadrature(cfg: &FluxTubeConfig) -> Result<f64> {
    tube_integral(cfg, |f| 0.5 * (f.b_theta * f.b_theta + f.b_s * f.b_s))
}

/// `int (A_theta B_theta + A_s B_s) r k dr dtheta ds`.
pub fn helicity_quadrature(cfg: &FluxTubeConfig) -> Result<f64> {
    tube_integral(cfg, |f| f.a_theta * f.b_theta + f.a_s * f.b_s)
}

/// Reduced helicity `2 int_0^a Phi_T Phi_P' dr` on the same radial nodes.
pub fn helicity_reduced(cfg: &FluxTubeConfig) -> Result<f64> {
    cfg.validate()?;
    let mut terms = Vec::with_capacity(cfg.grid.0);
    for (r, wr) in radial_rule(cfg.grid.0, cfg.tube_radius) {
        let (phi_t, _, _, d_phi_p) = flux_profiles(r, cfg)?;
        terms.push(2.0 * phi_t * d_phi_p * wr);
    }
    Ok(pairwise_sum(&terms))
}

/// Smallest Jacobian `r k` over all quadrature nodes.
pub fn min_jacobian(cfg: &FluxTubeConfig) -> Result<f64> {
    cfg.validate()?;
    let thetas = angle_nodes(cfg.grid.1);
    let mut min = f64::INFINITY;
    for (r, _) in radial_rule(cfg.grid.0, cfg.tube_radius) {
        for &theta in &thetas {
            min = min.min(r * (1.0 - cfg.axis_curvature * r * theta.cos()));
        }
    }
    Ok(min)
}

/// One line of the verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRow {
    pub quantity: &'static str,
    pub config: FluxTubeConfig,
    pub value: f64,
    pub closed_form: f64,
    pub rel_error: f64,
    /// Error at half the grid divided by the error at the full grid; `None`
    /// when the closed form is zero or the error is already at rounding level.
    pub convergence_ratio: Option<f64>,
}

/// Relative errors below this are treated as rounding noise.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

fn rel_error(value: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        value.abs()
    } else {
        ((value - exact) / exact).abs()
    }
}

fn verification_row(
    quantity: &'static str,
    cfg: &FluxTubeConfig,
    exact: f64,
    integrate: fn(&FluxTubeConfig) -> Result<f64>,
) -> Result<VerificationRow> {
    let value = integrate(cfg)?;
    let (nr, nt, ns) = cfg.grid;
    let coarse = FluxTubeConfig {
        grid: ((nr / 2).max(8), (nt / 2).max(8), (ns / 2).max(8)),
        ..*cfg
    };
    let fine_err = (value - exact).abs();
    let convergence_ratio = if exact == 0.0 || fine_err <= ROUNDOFF_FLOOR * exact.abs() {
        None
    } else {
        Some((integrate(&coarse)? - exact).abs() / fine_err)
    };
    Ok(VerificationRow {
        quantity,
        config: *cfg,
        value,
        closed_form: exact,
        rel_error: rel_error(value, exact),
        convergence_ratio,
    })
}

/// Energy quadrature against the closed-form constrained energy.
pub fn verify_energy(cfg: &FluxTubeConfig) -> Result<VerificationRow> {
    let exact = constrained_energy(&cfg.signature(), cfg.axis_length)?;
    verification_row("energy", cfg, exact, energy_quadrature)
}

/// Helicity quadrature against `h Phi^2`.
pub fn verify_helicity(cfg: &FluxTubeConfig) -> Result<VerificationRow> {
    let exact = cfg.framing * cfg.flux * cfg.flux;
    verification_row("helicity", cfg, exact, helicity_quadrature)
}

/// Energy and helicity rows for `gamma` in {3/2, 2, 3}, `h` in {0, 1, 3} and
/// curvature in {0, 0.2, 0.5} on an `n`-node grid.
pub fn standard_suite(n: usize) -> Result<Vec<VerificationRow>> {
    let mut rows = Vec::new();
    for gamma in [1.5, 2.0, 3.0] {
        for framing in [0.0, 1.0, 3.0] {
            for curvature in [0.0, 0.2, 0.5] {
                let cfg = FluxTubeConfig {
                    gamma,
                    framing,
                    axis_curvature: curvature,
                    ..FluxTubeConfig::default()
                }
                .with_grid(n);
                rows.push(verify_energy(&cfg)?);
                rows.push(verify_helicity(&cfg)?);
            }
        }
    }
    Ok(rows)
}

/// Geometry of the Mercier coordinates at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDiagnostics {
    /// Polar angle `theta = theta_R - int_0^s tau`.
    pub theta: f64,
    /// Tangent vectors `dX/dr`, `dX/dtheta_R`, `dX/ds`.
    pub tangents: [Vec3; 3],
    /// Dot products of the tangent pairs (r, theta_R), (r, s), (theta_R, s).
    pub dots: [f64; 3],
    pub scale_factors: [f64; 3],
    pub jacobian: f64,
}

/// Torsion of a synthetic axis of constant curvature.
pub trait TorsionProfile {
    fn torsion(&self, s: f64) -> f64;
    /// `int_0^s tau`.
    fn integral(&self, s: f64) -> f64;
}

/// `tau(s) = tau0`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantTorsion(pub f64);

impl TorsionProfile for ConstantTorsion {
    fn torsion(&self, _s: f64) -> f64 {
        self.0
    }

    fn integral(&self, s: f64) -> f64 {
        self.0 * s
    }
}

/// `tau(s) = mean + amplitude sin(2 pi s / period)`.
#[derive(Debug, Clone, Copy)]
pub struct SinusoidalTorsion {
    pub mean: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl TorsionProfile for SinusoidalTorsion {
    fn torsion(&self, s: f64) -> f64 {
        self.mean + self.amplitude * (2.0 * PI * s / self.period).sin()
    }

    fn integral(&self, s: f64) -> f64 {
        let w = 2.0 * PI / self.period;
        self.mean * s + self.amplitude * (1.0 - (w * s).cos()) / w
    }
}

/// Frenet frame `(T, N, B)` at arclength `s` of the helix with curvature `c`
/// and torsion `tau`.
pub fn helix_frame(c: f64, tau: f64, s: f64) -> [Vec3; 3] {
    let w = (c * c + tau * tau).sqrt();
    if w == 0.0 {
        return [Vec3::z(), Vec3::x(), Vec3::y()];
    }
    let (sin, cos) = (w * s).sin_cos();
    let t = Vec3::new(-c / w * sin, c / w * cos, tau / w);
    let n = Vec3::new(-cos, -sin, 0.0);
    let b = Vec3::new(tau / w * sin, -tau / w * cos, c / w);
    [t, n, b]
}

/// Point of the tube around the helix with curvature `c` and torsion `tau`.
pub fn helix_tube_point(c: f64, tau: f64, r: f64, theta_r: f64, s: f64) -> Vec3 {
    let w2 = c * c + tau * tau;
    let axis = if w2 == 0.0 {
        Vec3::new(0.0, 0.0, s)
    } else {
        let w = w2.sqrt();
        let rho = c / w2;
        Vec3::new(rho * (w * s).cos(), rho * (w * s).sin(), tau / w * s)
    };
    let [_, n, b] = helix_frame(c, tau, s);
    let theta = theta_r - tau * s;
    axis + r * (theta.cos() * n + theta.sin() * b)
}

/// Coordinate tangents, metric and Jacobian at `(r, theta_R, s)` on an axis
/// of constant curvature `c` and torsion profile `torsion`.
///
/// The frame at `s` is the osculating helix frame; tangents are assembled
/// from the Frenet derivatives `T' = cN`, `N' = -cT + tau B`, `B' = -tau N`.
pub fn metric_check(
    c: f64,
    torsion: &impl TorsionProfile,
    r: f64,
    theta_r: f64,
    s: f64,
) -> Result<MetricDiagnostics> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(domain(format!("curvature must be non-negative, got {c}")));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("radius must be non-negative, got {r}")));
    }
    if c * r >= 1.0 {
        return Err(Error::Regularity(format!(
            "r = {r} reaches the curvature radius"
        )));
    }
    let tau = torsion.torsion(s);
    let theta = theta_r - torsion.integral(s);
    let [t, n, b] = helix_frame(c, tau, s);
    let dn = -c * t + tau * b;
    let db = -tau * n;
    let (sin, cos) = theta.sin_cos();
    let e_r = cos * n + sin * b;
    let e_theta = r * (-sin * n + cos * b);
    // d(theta)/ds = -tau.
    let e_s = t + r * (cos * dn + sin * db) - tau * e_theta;
    let jacobian = e_r.cross(&e_theta).dot(&e_s);
    Ok(MetricDiagnostics {
        theta,
        tangents: [e_r, e_theta, e_s],
        dots: [e_r.dot(&e_theta), e_r.dot(&e_s), e_theta.dot(&e_s)],
        scale_factors: [e_r.norm(), e_theta.norm(), e_s.norm()],
        jacobian,
    })
}
