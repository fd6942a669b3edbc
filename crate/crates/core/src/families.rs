//! Families of coherent states built from the linear integral of motion
//! `A(tau) = c1 q + i g(tau) p` with `g(tau) = c2 + i c1 tau`.
//!
//! A family is fixed by the complex pair `(c1, c2)` subject to
//! `2 Re(c1* c2) = 1`, which normalises `[A, A^dagger] = 1`. The constant
//! shift of `A` is fixed to zero.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Allowed deviation of `2 Re(c1* c2)` from one.
pub const DELTA_TOLERANCE: f64 = 1e-12;

/// Common interface of [`GeneralizedFamily`] and [`CsFamily`].
///
/// Provided methods implement the general formulas; [`CsFamily`] overrides
/// some of them with its real-parameter specialisations.
pub trait Family {
    fn c1(&self) -> Complex64;
    fn c2(&self) -> Complex64;

    /// `2 Re(c1* c2)`; equals one for every valid family.
    fn delta(&self) -> f64 {
        2.0 * (self.c1().conj() * self.c2()).re
    }

    /// `g(tau) = c2 + i c1 tau`.
    fn g(&self, tau: f64) -> Complex64 {
        self.c2() + Complex64::i() * self.c1() * tau
    }

    /// Logarithm of `g(tau)` continued along real `tau` from `ln c2`.
    ///
    /// `g` moves on a straight line that misses the origin, so the phase
    /// swept from `tau = 0` stays inside `(-pi, pi)` and equals the principal
    /// argument of `g(tau) / c2`.
    fn ln_g(&self, tau: f64) -> Complex64 {
        let c2 = self.c2();
        let g = self.g(tau);
        Complex64::new(g.norm().ln(), c2.arg() + (g / c2).arg())
    }

    /// Quantum number `z = c1 q0 + i c2 p` of the state whose mean
    /// trajectory starts at `q0` with momentum `p`.
    fn label_from_initial(&self, q0: f64, p: f64) -> CsLabel {
        CsLabel {
            z: self.c1() * q0 + Complex64::i() * self.c2() * p,
        }
    }

    /// Inverse of [`Family::label_from_initial`]:
    /// `q0 = 2 Re(c2* z)`, `p = 2 Im(c1* z)`.
    fn initial_from_label(&self, label: &CsLabel) -> (f64, f64) {
        let z = label.z;
        (
            2.0 * (self.c2().conj() * z).re,
            2.0 * (self.c1().conj() * z).im,
        )
    }

    /// Heisenberg product `sigma_q(tau) sigma_p`.
    fn heisenberg_product(&self, tau: f64) -> f64 {
        let (c1, c2) = (self.c1(), self.c2());
        let (a1, a2) = (c1.norm(), c2.norm());
        let shear = a1 * a2 * (c2.arg() - c1.arg()).sin() + a1 * a1 * tau;
        (0.25 + shear * shear).sqrt()
    }
}

/// A family of generalized (squeezed) coherent states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedFamily {
    c1: Complex64,
    c2: Complex64,
}

impl GeneralizedFamily {
    /// Validates `2 Re(c1* c2) = 1` within [`DELTA_TOLERANCE`].
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        for v in [c1.re, c1.im, c2.re, c2.im] {
            ensure_finite(v, "family coefficient")?;
        }
        if c1 == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroCoefficient { which: "c1" });
        }
        if c2 == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroCoefficient { which: "c2" });
        }
        let family = Self { c1, c2 };
        let delta = family.delta();
        if (delta - 1.0).abs() > DELTA_TOLERANCE {
            return Err(Error::Constraint { delta });
        }
        Ok(family)
    }

    /// Phase `mu1` of `c1`.
    pub fn mu1(&self) -> f64 {
        self.c1.arg()
    }

    /// Phase `mu2` of `c2`.
    pub fn mu2(&self) -> f64 {
        self.c2.arg()
    }

    /// Multiplies both coefficients by `exp(i mu)`. The constraint is
    /// unchanged and the states change only by a global phase.
    pub fn rotated(&self, mu: f64) -> Self {
        let phase = Complex64::from_polar(1.0, mu);
        Self {
            c1: self.c1 * phase,
            c2: self.c2 * phase,
        }
    }
}

impl Family for GeneralizedFamily {
    fn c1(&self) -> Complex64 {
        self.c1
    }

    fn c2(&self) -> Complex64 {
        self.c2
    }
}

/// The coherent states proper: `mu1 = mu2 = 0`, `c2 = sigma_q`,
/// `c1 = 1 / (2 sigma_q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsFamily {
    sigma_q: f64,
}

impl CsFamily {
    pub fn new(sigma_q: f64) -> Result<Self> {
        Ok(Self {
            sigma_q: ensure_positive(sigma_q, "sigma_q")?,
        })
    }

    /// Initial coordinate standard deviation.
    pub fn sigma_q(&self) -> f64 {
        self.sigma_q
    }

    /// Momentum standard deviation `1 / (2 sigma_q)`, constant in time.
    pub fn sigma_p(&self) -> f64 {
        0.5 / self.sigma_q
    }

    /// Coordinate standard deviation at time `tau`.
    pub fn sigma_q_at(&self, tau: f64) -> f64 {
        let s = self.sigma_q;
        (s * s + tau * tau / (4.0 * s * s)).sqrt()
    }

    /// The same family as a [`GeneralizedFamily`].
    pub fn generalized(&self) -> GeneralizedFamily {
        GeneralizedFamily {
            c1: self.c1(),
            c2: self.c2(),
        }
    }
}

impl Family for CsFamily {
    fn c1(&self) -> Complex64 {
        Complex64::new(0.5 / self.sigma_q, 0.0)
    }

    fn c2(&self) -> Complex64 {
        Complex64::new(self.sigma_q, 0.0)
    }

    fn g(&self, tau: f64) -> Complex64 {
        Complex64::new(self.sigma_q, tau / (2.0 * self.sigma_q))
    }

    fn ln_g(&self, tau: f64) -> Complex64 {
        // Re g > 0, so the principal branch is continuous in tau.
        self.g(tau).ln()
    }

    fn label_from_initial(&self, q0: f64, p: f64) -> CsLabel {
        CsLabel {
            z: Complex64::new(q0 / (2.0 * self.sigma_q), self.sigma_q * p),
        }
    }

    fn initial_from_label(&self, label: &CsLabel) -> (f64, f64) {
        (2.0 * self.sigma_q * label.z.re, label.z.im / self.sigma_q)
    }

    fn heisenberg_product(&self, tau: f64) -> f64 {
        let s2 = self.sigma_q * self.sigma_q;
        0.5 * (1.0 + tau * tau / (4.0 * s2 * s2)).sqrt()
    }
}

/// Complex quantum number `z` labelling a state within a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsLabel {
    z: Complex64,
}

impl CsLabel {
    pub fn new(z: Complex64) -> Result<Self> {
        ensure_finite(z.re, "Re z")?;
        ensure_finite(z.im, "Im z")?;
        Ok(Self { z })
    }

    /// The vacuum label `z = 0`.
    pub fn vacuum() -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }
}
