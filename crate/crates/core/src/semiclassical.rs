//! Dimensional wave packets and the semiclassicality criterion.
//!
//! A packet of initial width `sigma_x` moving with momentum `p_x` spreads as
//! `sigma_x(t)^2 = sigma_x^2 + hbar^2 t^2 / (4 m^2 sigma_x^2)`. Its motion is
//! semiclassical when that spreading is small against the distance travelled,
//! `hbar^2 t^2 / (4 m^2 sigma_x^2) << (p_x t / m)^2`, equivalently
//! `lambda << 4 pi sigma_x` with `lambda = 2 pi hbar / p_x`.
//!
//! `lambda` is the de Broglie wavelength of the particle. It is sometimes
//! called the Compton wavelength in this context, but the formula used is the
//! de Broglie one.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, ensure_positive, Result};
use crate::families::{CsFamily, CsLabel, Family};
use crate::units::UnitSystem;

/// Ratios at or below this are classified semiclassical.
pub const SEMICLASSICAL_MAX_RATIO: f64 = 0.1;
/// Ratios above this are classified quantum.
pub const QUANTUM_MIN_RATIO: f64 = 10.0;

/// A coherent state in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalPacket {
    x0: f64,
    p_x: f64,
    sigma_x: f64,
    units: UnitSystem,
}

impl DimensionalPacket {
    pub fn new(x0: f64, p_x: f64, sigma_x: f64, units: UnitSystem) -> Result<Self> {
        Ok(Self {
            x0: ensure_finite(x0, "x0")?,
            p_x: ensure_finite(p_x, "p_x")?,
            sigma_x: ensure_positive(sigma_x, "sigma_x")?,
            units,
        })
    }

    /// Packet with `p_x = m v`.
    pub fn with_velocity(x0: f64, velocity: f64, sigma_x: f64, units: UnitSystem) -> Result<Self> {
        let v = ensure_finite(velocity, "velocity")?;
        Self::new(x0, units.mass() * v, sigma_x, units)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    /// Group velocity `p_x / m`.
    pub fn velocity(&self) -> f64 {
        self.p_x / self.units.mass()
    }

    /// Mean position `x0 + p_x t / m`.
    pub fn center(&self, t: f64) -> f64 {
        self.x0 + self.velocity() * t
    }

    /// `hbar t / (2 m sigma_x)`, the spreading contribution to `sigma_x(t)`.
    fn spread(&self, t: f64) -> f64 {
        self.units.hbar() * t / (2.0 * self.units.mass() * self.sigma_x)
    }

    pub fn sigma_x_of_t(&self, t: f64) -> f64 {
        self.sigma_x.hypot(self.spread(t))
    }

    /// Wavefunction `Psi(x, t)` in m^(-1/2) and density `rho(x, t)` in 1/m.
    pub fn eval(&self, x: f64, t: f64) -> (Complex64, f64) {
        let hbar = self.units.hbar();
        let m = self.units.mass();
        let s = self.sigma_x;
        let d = x - self.center(t);
        let phase = (self.p_x * x - self.p_x * self.p_x * t / (2.0 * m)) / hbar;
        let width = Complex64::new(s * s, hbar * t / (2.0 * m));
        let prefactor = Complex64::new(s, self.spread(t)) * (2.0 * PI).sqrt();
        let psi = (Complex64::new(0.0, phase) - d * d / (4.0 * width)).exp() / prefactor.sqrt();

        let var = s * s + self.spread(t).powi(2);
        let rho = (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt();
        (psi, rho)
    }

    /// The same state in dimensionless variables of `self.units()`.
    pub fn to_dimensionless(&self) -> Result<(CsFamily, CsLabel)> {
        let l = self.units.length();
        let family = CsFamily::new(self.sigma_x / l)?;
        let label = family.label_from_initial(self.x0 / l, self.p_x / self.units.momentum_scale());
        Ok((family, label))
    }

    /// Spreading-to-travel ratio `[hbar^2 t^2 / (4 m^2 sigma_x^2)] / (p_x t / m)^2`.
    /// Independent of `t` and equal to `(hbar / (2 p_x sigma_x))^2`.
    pub fn spreading_to_travel_ratio(&self, t: f64) -> f64 {
        let travel = self.velocity() * t;
        self.spread(t).powi(2) / (travel * travel)
    }

    pub fn classify(&self) -> SemiclassicalityReport {
        let bound = 4.0 * PI * self.sigma_x;
        if self.p_x == 0.0 {
            return SemiclassicalityReport {
                wavelength: f64::INFINITY,
                bound,
                ratio: f64::INFINITY,
                verdict: Verdict::Quantum,
            };
        }
        let wavelength = 2.0 * PI * self.units.hbar() / self.p_x.abs();
        let ratio = wavelength / bound;
        SemiclassicalityReport {
            wavelength,
            bound,
            ratio,
            verdict: Verdict::from_ratio(ratio),
        }
    }
}

/// Outcome of comparing the de Broglie wavelength with `4 pi sigma_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Semiclassical,
    Marginal,
    Quantum,
}

impl Verdict {
    pub fn from_ratio(ratio: f64) -> Self {
        if ratio <= SEMICLASSICAL_MAX_RATIO {
            Verdict::Semiclassical
        } else if ratio <= QUANTUM_MIN_RATIO {
            Verdict::Marginal
        } else {
            Verdict::Quantum
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Semiclassical => "semiclassical",
            Verdict::Marginal => "marginal",
            Verdict::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalityReport {
    /// `2 pi hbar / |p_x|` in metres; infinite at rest.
    pub wavelength: f64,
    /// `4 pi sigma_x` in metres.
    pub bound: f64,
    /// `wavelength / bound`; infinite at rest.
    pub ratio: f64,
    pub verdict: Verdict,
}
