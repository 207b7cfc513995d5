//! Closed-form constrained minimum magnetic energy of knotted flux tubes.
//!
//! A flux tube carries a signature: volume `V` and axial flux `Phi`, plus the
//! framing `h` (linking of field lines with the axis) and the exponent
//! `gamma` of the toroidal flux profile `Phi_T(r) = (r/a)^gamma Phi`. With the
//! tube cross-section held circular and the axis length independent of
//! framing, the minimum energy at axis length `L` is
//!
//! ```text
//! M* = ( gamma^2 L^2 / (8 (gamma - 1) V) + gamma pi h^2 / (2 L) ) Phi^2
//! ```
//!
//! which for `gamma = 2` becomes `(L^2 / (2V) + pi h^2 / L) Phi^2`. Energies
//! include the factor 1/2 of `M = 1/2 int |B|^2`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Conserved magnetic data of a flux tube together with its framing and
/// flux-profile exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signature {
    pub volume: f64,
    pub flux: f64,
    pub framing: f64,
    pub gamma: f64,
}

impl Default for Signature {
    fn default() -> Self {
        Self {
            volume: 1.0,
            flux: 1.0,
            framing: 0.0,
            gamma: 2.0,
        }
    }
}

impl Signature {
    pub fn with_framing(self, framing: f64) -> Self {
        Self { framing, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.volume.is_finite() && self.volume > 0.0) {
            return Err(domain(format!(
                "volume must be positive, got {}",
                self.volume
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(domain(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !self.flux.is_finite() || !self.framing.is_finite() {
            return Err(domain("flux and framing must be finite"));
        }
        Ok(())
    }
}

/// Per-knot energy summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRecord {
    pub name: String,
    pub cmin: u32,
    pub ropelength: f64,
    pub framing: f64,
    pub m_star: f64,
    pub m_of_h: f64,
}

impl EnergyRecord {
    /// Energy at unit volume and flux for a knot of the given ropelength.
    pub fn from_ropelength(
        name: impl Into<String>,
        cmin: u32,
        ropelength: f64,
        framing: f64,
    ) -> Result<Self> {
        let m_star = energy_from_ropelength(ropelength, framing)?;
        Ok(Self {
            name: name.into(),
            cmin,
            ropelength,
            framing,
            m_star,
            m_of_h: m_of_h(m_star, 1.0, 1.0)?,
        })
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive, got {x}")))
    }
}

/// Constrained minimum energy for axis length `length` and general `gamma`.
pub fn constrained_energy(sig: &Signature, length: f64) -> Result<f64> {
    sig.validate()?;
    check_positive("length", length)?;
    let g = sig.gamma;
    let h = sig.framing;
    let twist_free = g * g * length * length / (8.0 * (g - 1.0) * sig.volume);
    let twist = g * PI * h * h / (2.0 * length);
    Ok((twist_free + twist) * sig.flux * sig.flux)
}

/// The `gamma = 2` form `(L^2 / (2V) + pi h^2 / L) Phi^2`.
pub fn constrained_energy_standard(
    length: f64,
    volume: f64,
    flux: f64,
    framing: f64,
) -> Result<f64> {
    check_positive("length", length)?;
    check_positive("volume", volume)?;
    Ok((length * length / (2.0 * volume) + PI * framing * framing / length) * flux * flux)
}

/// Tube radius of a tight knot with ropelength `rl` and volume `V`:
/// `R = (V / (pi rl))^(1/3)`.
pub fn radius_from_ropelength(rl: f64, volume: f64) -> Result<f64> {
    check_positive("ropelength", rl)?;
    check_positive("volume", volume)?;
    Ok((volume / (PI * rl)).cbrt())
}

/// Axis length of a tight knot with ropelength `rl` and volume `V`:
/// `L = (V rl^2 / pi)^(1/3)`.
pub fn length_from_ropelength(rl: f64, volume: f64) -> Result<f64> {
    check_positive("ropelength", rl)?;
    check_positive("volume", volume)?;
    Ok((volume * rl * rl / PI).cbrt())
}

/// Standard-tube energy at unit volume and flux as a function of ropelength
/// and framing: `rl^(4/3) / (2 pi^(2/3)) + pi^(4/3) h^2 / rl^(2/3)`.
pub fn energy_from_ropelength(rl: f64, framing: f64) -> Result<f64> {
    check_positive("ropelength", rl)?;
    let rl13 = rl.cbrt();
    let pi13 = PI.cbrt();
    Ok(rl13.powi(4) / (2.0 * pi13 * pi13) + pi13.powi(4) * framing * framing / (rl13 * rl13))
}

/// Crossing-number bound `(2/pi)^(1/3) Phi^2 V^(-1/3) cmin`.
pub fn topological_bound(cmin: i64, volume: f64, flux: f64) -> Result<f64> {
    if cmin < 0 {
        return Err(domain(format!(
            "crossing number must be non-negative, got {cmin}"
        )));
    }
    check_positive("volume", volume)?;
    Ok((2.0 / PI).cbrt() * flux * flux / volume.cbrt() * cmin as f64)
}

/// Magnetic helicity `H = h Phi^2` of a framed tube.
pub fn helicity_closed_form(framing: f64, flux: f64) -> f64 {
    framing * flux * flux
}

/// Dimensionless energy `m = M* V^(1/3) / Phi^2`.
pub fn m_of_h(m_star: f64, volume: f64, flux: f64) -> Result<f64> {
    if flux == 0.0 {
        return Err(domain("flux must be non-zero"));
    }
    check_positive("volume", volume)?;
    Ok(m_star * volume.cbrt() / (flux * flux))
}
