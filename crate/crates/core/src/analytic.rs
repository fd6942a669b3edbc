//! Closed-form wavefunctions, densities, moments and overlaps.
//!
//! All quantities are dimensionless. The generalized state with label `z` in
//! family `(c1, c2)` is
//!
//! ```text
//! psi(q, tau) = (sqrt(2 pi) g)^(-1/2) exp{ i (p q - p^2 tau / 2)
//!               - (c1 / g) (q - q0 - p tau)^2 / 2 }
//! ```
//!
//! with `g = g(tau)` and `(q0, p)` recovered from `z`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Inherent on hosted targets; needed for f64 math under no_std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::families::{CsFamily, CsLabel, Family};
use crate::grid::Grid;

/// `(2 pi)^(-1/4)`.
fn norm_constant() -> f64 {
    (2.0 * PI).powf(-0.25)
}

/// Default highest Fock level accepted by [`FockBasis`].
pub const DEFAULT_N_MAX: usize = 128;

/// First and second moments of a state at a fixed `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    /// Symmetrised covariance `<(dq dp + dp dq)> / 2`.
    pub sigma_qp: f64,
}

impl Moments {
    /// `sigma_q^2 sigma_p^2 - sigma_qp^2`.
    pub fn rs_product(&self) -> f64 {
        let a = self.sigma_q * self.sigma_p;
        a.mul_add(a, -self.sigma_qp * self.sigma_qp)
    }

    pub fn heisenberg_product(&self) -> f64 {
        self.sigma_q * self.sigma_p
    }

    /// Largest absolute difference between corresponding fields.
    pub fn max_abs_diff(&self, other: &Moments) -> f64 {
        [
            self.mean_q - other.mean_q,
            self.mean_p - other.mean_p,
            self.sigma_q - other.sigma_q,
            self.sigma_p - other.sigma_p,
            self.sigma_qp - other.sigma_qp,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Generalized coherent state `<q | z, tau>` in any family.
pub fn eval_generalized_cs<F: Family + ?Sized>(
    q: f64,
    tau: f64,
    label: &CsLabel,
    family: &F,
) -> Complex64 {
    let (q0, p) = family.initial_from_label(label);
    let g = family.g(tau);
    let d = q - (q0 + p * tau);
    let exponent = Complex64::new(0.0, p * q - 0.5 * p * p * tau)
        - family.c1() / g * (0.5 * d * d)
        - 0.5 * family.ln_g(tau);
    norm_constant() * exponent.exp()
}

/// Coherent state of a [`CsFamily`], written directly in `sigma_q`.
pub fn eval_cs(q: f64, tau: f64, label: &CsLabel, family: &CsFamily) -> Complex64 {
    let s = family.sigma_q();
    let z = label.z();
    let (q0, p) = (2.0 * s * z.re, z.im / s);
    let d = q - (q0 + p * tau);
    let width = Complex64::new(s * s, 0.5 * tau);
    let g = Complex64::new(s, tau / (2.0 * s));
    let exponent = Complex64::new(0.0, p * q - 0.5 * p * p * tau) - d * d / (4.0 * width);
    exponent.exp() / (g * (2.0 * PI).sqrt()).sqrt()
}

/// Probability density `|psi(q, tau)|^2` from its Gaussian closed form.
pub fn density<F: Family + ?Sized>(q: f64, tau: f64, label: &CsLabel, family: &F) -> f64 {
    let (q0, p) = family.initial_from_label(label);
    let sigma2 = family.g(tau).norm_sqr();
    let d = q - (q0 + p * tau);
    (-0.5 * d * d / sigma2).exp() / (2.0 * PI * sigma2).sqrt()
}

/// Analytic moments at time `tau`.
pub fn moments<F: Family + ?Sized>(tau: f64, label: &CsLabel, family: &F) -> Moments {
    let (q0, p) = family.initial_from_label(label);
    let c1 = family.c1();
    let g = family.g(tau);
    // i (1/2 - g f*) with f = c1; real for every valid family.
    let covariance = Complex64::i() * (0.5 - g * c1.conj());
    Moments {
        mean_q: q0 + p * tau,
        mean_p: p,
        sigma_q: g.norm(),
        sigma_p: c1.norm(),
        sigma_qp: covariance.re,
    }
}

/// Robertson-Schrödinger product `sigma_q^2 sigma_p^2 - sigma_qp^2`.
/// Independent of the label.
pub fn rs_product<F: Family + ?Sized>(tau: f64, family: &F) -> f64 {
    moments(tau, &CsLabel::vacuum(), family).rs_product()
}

/// Heisenberg product `sigma_q(tau) sigma_p`.
pub fn heisenberg_product<F: Family + ?Sized>(tau: f64, family: &F) -> f64 {
    family.heisenberg_product(tau)
}

/// `<z1, tau | z2, tau>` for states built by displacing the vacuum.
pub fn overlap(z1: &CsLabel, z2: &CsLabel) -> Complex64 {
    let (a, b) = (z1.z(), z2.z());
    (a.conj() * b - 0.5 * (a.norm_sqr() + b.norm_sqr())).exp()
}

/// Constant phase `e^{i theta}` such that
/// `e^{i theta} eval_generalized_cs(.., label, ..)` equals the displaced
/// vacuum `D(z) |0, tau>`. It depends on `z` and the family but not on `q`
/// or `tau`; for a [`CsFamily`] it is `exp(-i Re z Im z)`.
pub fn glauber_phase<F: Family + ?Sized>(label: &CsLabel, family: &F) -> Complex64 {
    let z = label.z();
    let (c1, c2) = (family.c1(), family.c2());
    let (q0, _) = family.initial_from_label(label);
    let displaced = -z * z * c2.conj() / (2.0 * c2) - 0.5 * z.norm_sqr();
    let closed = -c1 * q0 * q0 / (2.0 * c2);
    Complex64::from_polar(1.0, (displaced - closed).im)
}

/// [`eval_generalized_cs`] in the displaced-vacuum phase convention, the one
/// in which [`overlap`] holds exactly.
pub fn eval_glauber_cs<F: Family + ?Sized>(
    q: f64,
    tau: f64,
    label: &CsLabel,
    family: &F,
) -> Complex64 {
    glauber_phase(label, family) * eval_generalized_cs(q, tau, label, family)
}

/// Plane wave `(2 pi)^(-1/2) exp[i (p q - p^2 tau / 2)]`.
pub fn plane_wave(q: f64, tau: f64, p: f64) -> Complex64 {
    Complex64::from_polar((2.0 * PI).sqrt().recip(), p * q - 0.5 * p * p * tau)
}

/// Number-like states `|n, tau> = (A^dagger)^n / sqrt(n!) |0, tau>` of one
/// family at one time.
///
/// `<q | n, tau> = P_n(q) <q | 0, tau>`. The polynomials obey
/// `sqrt(n + 1) P_{n+1} = (q / g) P_n - g* P_n'` and, because
/// `A (P_n psi_0) = g P_n' psi_0 = sqrt(n) P_{n-1} psi_0`, the values also
/// follow the three-term recurrence
/// `sqrt(n + 1) P_{n+1} = (q / g) P_n - (g* / g) sqrt(n) P_{n-1}`,
/// which is what [`FockBasis::values`] evaluates.
#[derive(Debug, Clone, Copy)]
pub struct FockBasis<'a, F: Family + ?Sized> {
    family: &'a F,
    tau: f64,
    n_max: usize,
}

impl<'a, F: Family + ?Sized> FockBasis<'a, F> {
    pub fn new(family: &'a F, tau: f64) -> Self {
        Self {
            family,
            tau,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::Capacity {
                requested: n,
                max: self.n_max,
            });
        }
        Ok(())
    }

    /// Vacuum `<q | 0, tau>`.
    pub fn vacuum(&self, q: f64) -> Complex64 {
        let exponent = -self.family.c1() / self.family.g(self.tau) * (0.5 * q * q)
            - 0.5 * self.family.ln_g(self.tau);
        norm_constant() * exponent.exp()
    }

    /// `<q | k, tau>` for `k = 0..=n`.
    pub fn values(&self, n: usize, q: f64) -> Result<Vec<Complex64>> {
        self.check(n)?;
        let g = self.family.g(self.tau);
        let ratio = g.conj() / g;
        let mut poly = Vec::with_capacity(n + 1);
        poly.push(Complex64::new(1.0, 0.0));
        if n >= 1 {
            poly.push(q / g);
        }
        for k in 1..n {
            let kf = k as f64;
            let next = (q / g * poly[k] - ratio * kf.sqrt() * poly[k - 1]) / (kf + 1.0).sqrt();
            poly.push(next);
        }
        let psi0 = self.vacuum(q);
        Ok(poly.into_iter().map(|p| p * psi0).collect())
    }

    /// `<q | n, tau>`.
    pub fn state(&self, n: usize, q: f64) -> Result<Complex64> {
        Ok(self.values(n, q)?[n])
    }

    /// Coefficients of `P_n` in powers of `q`, from the derivative recurrence.
    pub fn polynomial(&self, n: usize) -> Result<FockPolynomial> {
        self.check(n)?;
        let g = self.family.g(self.tau);
        let gc = g.conj();
        let mut coeffs = alloc::vec![Complex64::new(1.0, 0.0)];
        for k in 0..n {
            let norm = ((k + 1) as f64).sqrt();
            let mut next = alloc::vec![Complex64::new(0.0, 0.0); k + 2];
            for (j, &a) in coeffs.iter().enumerate() {
                next[j + 1] += a / g;
                if j >= 1 {
                    next[j - 1] -= gc * (j as f64) * a;
                }
            }
            for c in &mut next {
                *c /= norm;
            }
            coeffs = next;
        }
        Ok(FockPolynomial { coeffs })
    }
}

/// `<q | n, tau>` with the default level cap.
pub fn fock_state<F: Family + ?Sized>(n: usize, q: f64, tau: f64, family: &F) -> Result<Complex64> {
    FockBasis::new(family, tau).state(n, q)
}

/// Complex polynomial `sum_k a_k q^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockPolynomial {
    coeffs: Vec<Complex64>,
}

impl FockPolynomial {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * q + c)
    }
}

/// Partial Glauber sum `e^{-|z|^2/2} sum_{n <= n_trunc} z^n / sqrt(n!) <q | n, tau>`.
///
/// The neglected tail is bounded by roughly
/// `e^{-|z|^2/2} |z|^(N+1) / sqrt((N+1)!)` times the size of the basis
/// functions; see [`glauber_tail_bound`].
pub fn glauber_sum<F: Family + ?Sized>(
    label: &CsLabel,
    q: f64,
    tau: f64,
    family: &F,
    n_trunc: usize,
) -> Result<Complex64> {
    glauber_sum_in(&FockBasis::new(family, tau), label, q, n_trunc)
}

/// [`glauber_sum`] over an explicitly configured basis.
pub fn glauber_sum_in<F: Family + ?Sized>(
    basis: &FockBasis<'_, F>,
    label: &CsLabel,
    q: f64,
    n_trunc: usize,
) -> Result<Complex64> {
    let z = label.z();
    let states = basis.values(n_trunc, q)?;
    let mut weight = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, state) in states.into_iter().enumerate() {
        if n > 0 {
            weight = weight * z / (n as f64).sqrt();
        }
        sum += weight * state;
    }
    Ok(sum)
}

/// `e^{-|z|^2/2} |z|^(N+1) / sqrt((N+1)!)`, the first omitted coefficient.
pub fn glauber_tail_bound(label: &CsLabel, n_trunc: usize) -> f64 {
    let r = label.z().norm();
    let mut c = (-0.5 * r * r).exp();
    for k in 1..=n_trunc + 1 {
        c *= r / (k as f64).sqrt();
    }
    c
}

/// Samples of a wavefunction on a uniform grid at fixed `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid,
    tau: f64,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: Grid, tau: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !tau.is_finite() {
            return Err(Error::NonFinite { what: "tau" });
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite {
                what: "field value",
            });
        }
        Ok(Self { grid, tau, values })
    }

    /// Samples `f(q)` at every grid point, in index order.
    pub fn sample(grid: Grid, tau: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, tau, values)
    }

    /// The closed-form state `label` of `family` at time `tau`.
    pub fn coherent_state<F: Family + ?Sized>(
        grid: Grid,
        tau: f64,
        label: &CsLabel,
        family: &F,
    ) -> Result<Self> {
        Self::sample(grid, tau, |q| eval_generalized_cs(q, tau, label, family))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `(q, psi)` pairs in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.grid.points().zip(self.values.iter().copied())
    }

    pub fn densities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Grid quadrature of `|psi|^2`.
    pub fn norm(&self) -> f64 {
        self.grid
            .integrate(&self.densities())
            .expect("field length matches its grid")
    }
}
