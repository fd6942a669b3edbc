//! Smeared check of the resolution of identity
//! `(1/pi) \int d^2z |z, tau><z, tau| = 1`.
//!
//! Applied to a Gaussian test function `f`, the identity says
//! `F(q) = (1/pi) \int d^2z <q|z,tau> \int dq' <z,tau|q'> f(q') = f(q)`.
//! The `z` integral runs over a disk in polar coordinates: Gauss-Legendre in
//! the radius, the periodic trapezoid rule in the angle. The inner `q'`
//! integral uses the trapezoid rule on a window around the test function.

use std::f64::consts::PI;

use freecs_core::analytic::eval_generalized_cs;
use freecs_core::{Complex64, CsLabel, Family};

use super::{OracleError, Result};

/// Largest boundary envelope accepted for the disk truncation.
pub const ENVELOPE_TOLERANCE: f64 = 1e-12;
/// Radius search stops here.
pub const MAX_RADIUS: f64 = 64.0;
const INNER_HALF_WIDTHS: f64 = 12.0;

/// Gaussian `exp(-(q - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
}

impl TestFunction {
    pub fn eval(&self, q: f64) -> f64 {
        let d = (q - self.center) / self.width;
        (-0.5 * d * d).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessSettings {
    /// Disk radius; `None` selects [`default_radius`].
    pub radius: Option<f64>,
    pub n_radial: usize,
    /// Angular nodes; `None` means `2 * n_radial`.
    pub n_angular: Option<usize>,
}

impl Default for CompletenessSettings {
    fn default() -> Self {
        Self {
            radius: None,
            n_radial: 64,
            n_angular: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessReport {
    /// `F(q)`.
    pub value: Complex64,
    /// `f(q)`.
    pub target: f64,
    /// `|F(q) - f(q)|`.
    pub deviation: f64,
    pub radius: f64,
    /// Largest integrand magnitude found on the boundary circle.
    pub boundary_envelope: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Integrand<'a, F: Family + ?Sized> {
    family: &'a F,
    tau: f64,
    q: f64,
    inner: Vec<(f64, f64)>,
}

impl<'a, F: Family + ?Sized> Integrand<'a, F> {
    fn new(family: &'a F, tau: f64, q: f64, test: TestFunction, radius: f64) -> Self {
        // Fastest oscillation of <z|q'> over the disk: carrier momentum plus
        // Gaussian chirp across the window, plus the test function's own
        // bandwidth.
        let c1 = family.c1().norm();
        let chirp = (family.c1() / family.g(tau)).norm();
        let reach = 2.0 * (family.c2().norm() + c1 * tau.abs()) * radius;
        let k_max = 2.0 * c1 * radius
            + chirp * (INNER_HALF_WIDTHS * test.width + test.center.abs() + reach)
            + 9.0 / test.width;
        let h = 2.0 * PI / k_max;
        let half = INNER_HALF_WIDTHS * test.width;
        let n = (2.0 * half / h).ceil() as usize + 1;
        let step = 2.0 * half / (n - 1) as f64;
        let inner = (0..n)
            .map(|j| {
                let x = test.center - half + j as f64 * step;
                let w = if j == 0 || j + 1 == n {
                    0.5 * step
                } else {
                    step
                };
                (x, w * test.eval(x))
            })
            .collect();
        Self {
            family,
            tau,
            q,
            inner,
        }
    }

    /// `<q|z,tau> <z,tau|f> / pi`.
    fn at(&self, z: Complex64) -> Complex64 {
        let label = CsLabel::new(z).expect("quadrature nodes are finite");
        let projection: Complex64 = self
            .inner
            .iter()
            .map(|&(x, wf)| wf * eval_generalized_cs(x, self.tau, &label, self.family).conj())
            .sum();
        eval_generalized_cs(self.q, self.tau, &label, self.family) * projection / PI
    }

    fn boundary_envelope(&self, radius: f64, n_angular: usize) -> f64 {
        (0..n_angular)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / n_angular as f64;
                self.at(Complex64::from_polar(radius, theta)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Smallest radius, starting from `8 + |z0|` and growing in unit steps, at
/// which the integrand envelope on the boundary falls below
/// [`ENVELOPE_TOLERANCE`]. `z0` is the label of a packet at rest at the test
/// function's center.
pub fn default_radius<F: Family + ?Sized>(
    q: f64,
    tau: f64,
    family: &F,
    test: TestFunction,
    n_angular: usize,
) -> Result<f64> {
    let z0 = family.label_from_initial(test.center, 0.0).z();
    let mut radius = 8.0 + z0.norm();
    while radius <= MAX_RADIUS {
        let integrand = Integrand::new(family, tau, q, test, radius);
        if integrand.boundary_envelope(radius, n_angular) < ENVELOPE_TOLERANCE {
            return Ok(radius);
        }
        radius += 1.0;
    }
    Err(OracleError::InvalidInput(
        "no radius up to 64 bounds the completeness integrand",
    ))
}

/// Evaluates `|F(q) - f(q)|` for the smeared completeness relation.
pub fn completeness_check<F: Family + ?Sized>(
    q: f64,
    tau: f64,
    family: &F,
    test: TestFunction,
    settings: CompletenessSettings,
) -> Result<CompletenessReport> {
    if !(test.width > 0.0 && test.width.is_finite() && test.center.is_finite()) {
        return Err(OracleError::InvalidInput(
            "test function needs finite center and positive width",
        ));
    }
    if !(q.is_finite() && tau.is_finite()) {
        return Err(OracleError::InvalidInput("q and tau must be finite"));
    }
    if settings.n_radial < 2 {
        return Err(OracleError::InvalidInput("need at least two radial nodes"));
    }
    let n_angular = settings.n_angular.unwrap_or(2 * settings.n_radial);
    if n_angular < 4 {
        return Err(OracleError::InvalidInput(
            "need at least four angular nodes",
        ));
    }
    let radius = match settings.radius {
        Some(r) if r > 0.0 && r.is_finite() => r,
        Some(_) => return Err(OracleError::InvalidInput("radius must be positive")),
        None => default_radius(q, tau, family, test, n_angular)?,
    };

    let integrand = Integrand::new(family, tau, q, test, radius);
    let envelope = integrand.boundary_envelope(radius, n_angular);
    if envelope > ENVELOPE_TOLERANCE {
        return Err(OracleError::TruncationRadius { radius, envelope });
    }

    let (nodes, weights) = gauss_legendre(settings.n_radial);
    let dtheta = 2.0 * PI / n_angular as f64;
    let mut value = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let r = 0.5 * radius * (x + 1.0);
        let wr = 0.5 * radius * w * r * dtheta;
        for j in 0..n_angular {
            let z = Complex64::from_polar(r, j as f64 * dtheta);
            value += wr * integrand.at(z);
        }
    }
    let target = test.eval(q);
    Ok(CompletenessReport {
        value,
        target,
        deviation: (value - target).norm(),
        radius,
        boundary_envelope: envelope,
        n_radial: settings.n_radial,
        n_angular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use freecs_core::CsFamily;
    use std::f64::consts::FRAC_1_SQRT_2;

    const UNIT: TestFunction = TestFunction {
        center: 0.0,
        width: 1.0,
    };

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((quad - 2.0 / 15.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn identity_at_tau_zero() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let settings = CompletenessSettings {
            radius: Some(8.0),
            ..Default::default()
        };
        let r = completeness_check(0.0, 0.0, &f, UNIT, settings).unwrap();
        assert!(r.deviation < 1e-6, "{r:?}");
    }

    #[test]
    fn identity_at_tau_two_with_default_radius() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let r = completeness_check(0.0, 2.0, &f, UNIT, CompletenessSettings::default()).unwrap();
        assert!(r.deviation < 1e-6, "{r:?}");
        assert!(r.radius > 8.0);
    }

    #[test]
    fn radius_eight_is_too_small_at_tau_two() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let settings = CompletenessSettings {
            radius: Some(8.0),
            ..Default::default()
        };
        let err = completeness_check(0.0, 2.0, &f, UNIT, settings).unwrap_err();
        assert!(matches!(err, OracleError::TruncationRadius { .. }));
    }

    #[test]
    fn small_radius_flagged() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let settings = CompletenessSettings {
            radius: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            completeness_check(0.0, 0.0, &f, UNIT, settings),
            Err(OracleError::TruncationRadius { .. })
        ));
    }

    #[test]
    fn deviation_shrinks_with_order() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let devs: Vec<f64> = [12, 20, 32]
            .iter()
            .map(|&n| {
                let settings = CompletenessSettings {
                    radius: Some(8.0),
                    n_radial: n,
                    n_angular: None,
                };
                completeness_check(0.3, 0.0, &f, UNIT, settings)
                    .unwrap()
                    .deviation
            })
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }
}
