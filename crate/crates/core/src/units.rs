//! Conversion between SI variables `(x, t, p_x, Psi)` and the dimensionless
//! variables `(q, tau, p, psi)` used throughout the crate.
//!
//! With a length scale `l`, mass `m` and reduced Planck constant `hbar`:
//! `q = x / l`, `tau = hbar t / (m l^2)`, `p = l p_x / hbar` and
//! `psi(q, tau) = sqrt(l) Psi(x, t)`, so that `|Psi|^2 dx = |psi|^2 dq`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, ensure_positive, Result};

/// Electron rest mass in kilograms.
pub const ELECTRON_MASS_KG: f64 = 9.10938e-31;
/// Reduced Planck constant in joule-seconds.
pub const HBAR_JS: f64 = 1.05457e-34;

/// Physical scales `(m, hbar, l)` defining the dimensionless reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    mass: f64,
    hbar: f64,
    length: f64,
}

/// A point `(x, t, p_x)` in SI units: metres, seconds, kg m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPoint {
    pub x: f64,
    pub t: f64,
    pub p_x: f64,
}

/// A point `(q, tau, p)` in dimensionless variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPoint {
    pub q: f64,
    pub tau: f64,
    pub p: f64,
}

impl UnitSystem {
    pub fn new(mass_kg: f64, hbar_js: f64, length_m: f64) -> Result<Self> {
        Ok(Self {
            mass: ensure_positive(mass_kg, "mass")?,
            hbar: ensure_positive(hbar_js, "hbar")?,
            length: ensure_positive(length_m, "length scale")?,
        })
    }

    /// Electron mass and the default `hbar` with the given length scale.
    pub fn electron(length_m: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS_KG, HBAR_JS, length_m)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Seconds per unit of `tau`, i.e. `m l^2 / hbar`.
    pub fn time_scale(&self) -> f64 {
        self.mass * self.length * self.length / self.hbar
    }

    /// Momentum per unit of `p`, i.e. `hbar / l`.
    pub fn momentum_scale(&self) -> f64 {
        self.hbar / self.length
    }

    pub fn to_dimensionless(&self, point: PhysicalPoint) -> Result<DimensionlessPoint> {
        ensure_finite(point.x, "x")?;
        ensure_finite(point.t, "t")?;
        ensure_finite(point.p_x, "p_x")?;
        Ok(DimensionlessPoint {
            q: point.x / self.length,
            tau: point.t / self.time_scale(),
            p: point.p_x / self.momentum_scale(),
        })
    }

    pub fn to_dimensional(&self, point: DimensionlessPoint) -> Result<PhysicalPoint> {
        ensure_finite(point.q, "q")?;
        ensure_finite(point.tau, "tau")?;
        ensure_finite(point.p, "p")?;
        Ok(PhysicalPoint {
            x: point.q * self.length,
            t: point.tau * self.time_scale(),
            p_x: point.p * self.momentum_scale(),
        })
    }

    /// `Psi = psi / sqrt(l)`, in m^(-1/2).
    pub fn wavefunction_to_dimensional(&self, psi: Complex64) -> Complex64 {
        psi / self.length.sqrt()
    }

    /// `psi = sqrt(l) Psi`.
    pub fn wavefunction_to_dimensionless(&self, psi: Complex64) -> Complex64 {
        psi * self.length.sqrt()
    }

    /// Probability density per metre from a density per unit `q`.
    pub fn density_to_dimensional(&self, rho: f64) -> f64 {
        rho / self.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn electron_1e7() -> UnitSystem {
        UnitSystem::new(9.109e-31, 1.0546e-34, 1e-7).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let u = electron_1e7();
        let d = u
            .to_dimensionless(PhysicalPoint {
                x: 0.0,
                t: 0.0,
                p_x: 0.0,
            })
            .unwrap();
        assert_eq!(
            d,
            DimensionlessPoint {
                q: 0.0,
                tau: 0.0,
                p: 0.0
            }
        );
    }

    #[test]
    fn length_scale_maps_to_unit_q() {
        let u = electron_1e7();
        let d = u
            .to_dimensionless(PhysicalPoint {
                x: 1e-7,
                t: 0.0,
                p_x: 0.0,
            })
            .unwrap();
        assert_eq!(d.q, 1.0);
        let back = u
            .to_dimensional(DimensionlessPoint {
                q: 1.0,
                tau: 0.0,
                p: 0.0,
            })
            .unwrap();
        assert_eq!(back.x, 1e-7);
    }

    #[test]
    fn time_scale_matches_direct_arithmetic() {
        let u = electron_1e7();
        let t = 8.638e-11;
        let tau = u
            .to_dimensionless(PhysicalPoint {
                x: 0.0,
                t,
                p_x: 0.0,
            })
            .unwrap()
            .tau;
        let direct = 1.0546e-34 * t / (9.109e-31 * 1e-14);
        assert_relative_eq!(tau, direct, max_relative = 1e-14);
        assert!((tau - 1.0).abs() < 1e-3);
    }

    #[test]
    fn momentum_scale_for_p_two() {
        let u = UnitSystem::electron(1e-7).unwrap();
        let p_x = u
            .to_dimensional(DimensionlessPoint {
                q: 0.0,
                tau: 0.0,
                p: 2.0,
            })
            .unwrap()
            .p_x;
        assert_relative_eq!(p_x, 2.0 * HBAR_JS / 1e-7, max_relative = 1e-15);
        assert!((p_x - 2.109e-27).abs() < 1e-30);
    }

    #[test]
    fn round_trip() {
        let u = electron_1e7();
        let d = DimensionlessPoint {
            q: 1.3,
            tau: 0.7,
            p: -2.1,
        };
        let back = u.to_dimensionless(u.to_dimensional(d).unwrap()).unwrap();
        assert_relative_eq!(back.q, d.q, max_relative = 1e-14);
        assert_relative_eq!(back.tau, d.tau, max_relative = 1e-14);
        assert_relative_eq!(back.p, d.p, max_relative = 1e-14);
    }

    #[test]
    fn rejects_invalid_scales_and_inputs() {
        assert!(UnitSystem::new(0.0, 1.0, 1.0).is_err());
        assert!(UnitSystem::new(1.0, -1.0, 1.0).is_err());
        assert!(UnitSystem::new(1.0, 1.0, f64::INFINITY).is_err());
        let u = electron_1e7();
        assert!(u
            .to_dimensionless(PhysicalPoint {
                x: f64::NAN,
                t: 0.0,
                p_x: 0.0
            })
            .is_err());
        assert!(u
            .to_dimensional(DimensionlessPoint {
                q: 0.0,
                tau: f64::INFINITY,
                p: 0.0
            })
            .is_err());
    }
}
