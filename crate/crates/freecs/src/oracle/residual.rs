//! Finite-difference residual of the free Schrödinger equation
//! `i d/dtau psi + (1/2) d^2/dq^2 psi = 0`.

use freecs_core::{Complex64, Grid};

use super::{OracleError, Result};

/// Residuals below this are accepted whatever their step-halving behaviour.
pub const COARSE_FLOOR: f64 = 1e-6;
/// Drop factor under stencil halving that marks a spatially unresolved field.
pub const COARSE_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ResidualReport {
    /// `max_q |r(q)|`.
    pub max_abs_residual: f64,
    /// `max |r| / max |D2 psi / 2|`.
    pub rel_residual: f64,
    /// Relative residual with the spatial stencil halved.
    pub refined_rel_residual: f64,
    /// Spatial stencil step.
    pub h: f64,
    pub dt: f64,
}

/// `(max |r|, max |D2 psi / 2|)` on the grid points for explicit steps.
///
/// `r = i [psi(tau + dt) - psi(tau - dt)] / (2 dt) + D2 psi / 2`, with `D2`
/// the five-point fourth-order second difference of step `h`.
pub fn residual_at<F>(psi: F, grid: &Grid, tau: f64, dt: f64, h: f64) -> (f64, f64)
where
    F: Fn(f64, f64) -> Complex64,
{
    let mut max_r = 0.0f64;
    let mut max_kinetic = 0.0f64;
    for q in grid.points() {
        let d2 = (-psi(q - 2.0 * h, tau) + 16.0 * psi(q - h, tau) - 30.0 * psi(q, tau)
            + 16.0 * psi(q + h, tau)
            - psi(q + 2.0 * h, tau))
            / (12.0 * h * h);
        let dtau = (psi(q, tau + dt) - psi(q, tau - dt)) / (2.0 * dt);
        let kinetic = 0.5 * d2;
        max_r = max_r.max((Complex64::i() * dtau + kinetic).norm());
        max_kinetic = max_kinetic.max(kinetic.norm());
    }
    (max_r, max_kinetic)
}

fn relative(max_r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        max_r / scale
    } else {
        max_r
    }
}

/// Residual of `psi` on `grid` at time `tau`, using the grid spacing as the
/// spatial step and `dt` for the time difference.
///
/// Fails with [`OracleError::GridTooCoarse`] when the relative residual is
/// above [`COARSE_FLOOR`] and shrinks more than [`COARSE_RATIO`] times when
/// the spatial stencil is halved, i.e. when spatial discretisation error
/// dominates the measurement.
pub fn schrodinger_residual<F>(psi: F, grid: &Grid, tau: f64, dt: f64) -> Result<ResidualReport>
where
    F: Fn(f64, f64) -> Complex64,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OracleError::InvalidInput("dt must be positive and finite"));
    }
    if !tau.is_finite() {
        return Err(OracleError::InvalidInput("tau must be finite"));
    }
    let h = grid.spacing();
    let (max_r, scale) = residual_at(&psi, grid, tau, dt, h);
    let (fine_r, fine_scale) = residual_at(&psi, grid, tau, dt, 0.5 * h);
    let rel = relative(max_r, scale);
    let fine_rel = relative(fine_r, fine_scale);
    if rel > COARSE_FLOOR && rel > COARSE_RATIO * fine_rel {
        return Err(OracleError::GridTooCoarse {
            rel_residual: rel,
            ratio: rel / fine_rel,
        });
    }
    Ok(ResidualReport {
        max_abs_residual: max_r,
        rel_residual: rel,
        refined_rel_residual: fine_rel,
        h,
        dt,
    })
}

/// Observed orders of the residual in `dt` and in `h`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceOrders {
    pub dt_steps: Vec<f64>,
    pub dt_residuals: Vec<f64>,
    pub dt_order: f64,
    pub h_steps: Vec<f64>,
    pub h_residuals: Vec<f64>,
    pub h_order: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Measures the residual orders over three step-halvings each.
///
/// The `dt` series starts at `dt0` with a spatial step `h0 / 16`; the `h`
/// series starts at `h0` with `dt = 1e-3 h0^2`, so that in each series the
/// other error source is negligible. For a state with largest relevant
/// wavenumber `k`, `h0 = 0.5 / k` and `dt0 = 0.5 / k^2` are in the
/// asymptotic regime.
pub fn convergence_orders<F>(psi: F, grid: &Grid, tau: f64, dt0: f64, h0: f64) -> ConvergenceOrders
where
    F: Fn(f64, f64) -> Complex64,
{
    let halvings = |x0: f64| -> Vec<f64> { (0..4).map(|i| x0 / f64::from(1 << i)).collect() };
    let dt_steps = halvings(dt0);
    let h_steps = halvings(h0);
    let dt_residuals: Vec<f64> = dt_steps
        .iter()
        .map(|&dt| residual_at(&psi, grid, tau, dt, h0 / 16.0).0)
        .collect();
    let fixed_dt = 1e-3 * h0 * h0;
    let h_residuals: Vec<f64> = h_steps
        .iter()
        .map(|&h| residual_at(&psi, grid, tau, fixed_dt, h).0)
        .collect();
    ConvergenceOrders {
        dt_order: log_slope(&dt_steps, &dt_residuals),
        h_order: log_slope(&h_steps, &h_residuals),
        dt_steps,
        dt_residuals,
        h_steps,
        h_residuals,
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // literal example values
mod tests {
    use super::*;
    use crate::oracle::residual_grid;
    use freecs_core::analytic::{eval_cs, plane_wave};
    use freecs_core::{CsFamily, CsLabel, Family};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn moving_cs_has_small_residual() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let label = CsLabel::new(Complex64::new(0.0, 1.41421)).unwrap();
        let report = schrodinger_residual(
            |q, t| eval_cs(q, t, &label, &f),
            &residual_grid(),
            0.5,
            1e-4,
        )
        .unwrap();
        assert!(report.rel_residual < 1e-6, "{report:?}");
    }

    #[test]
    fn plane_wave_residual() {
        let grid = Grid::periodic(-20.0, 20.0, 8192).unwrap();
        let report = schrodinger_residual(|q, t| plane_wave(q, t, 2.0), &grid, 0.5, 1e-4).unwrap();
        assert!(report.rel_residual < 1e-8, "{report:?}");
    }

    #[test]
    fn static_gaussian_is_not_a_solution() {
        let report = schrodinger_residual(
            |q, _| Complex64::new((-0.5 * q * q).exp(), 0.0),
            &residual_grid(),
            0.0,
            1e-4,
        )
        .unwrap();
        assert!(report.rel_residual > 0.5, "{report:?}");
    }

    #[test]
    fn unresolved_oscillation_is_flagged() {
        let grid = Grid::periodic(-5.0, 5.0, 64).unwrap();
        let err =
            schrodinger_residual(|q, t| plane_wave(q, t, 12.0), &grid, 0.0, 1e-5).unwrap_err();
        assert!(matches!(err, OracleError::GridTooCoarse { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(
            schrodinger_residual(|q, t| plane_wave(q, t, 1.0), &residual_grid(), 0.0, 0.0).is_err()
        );
    }

    #[test]
    fn orders_are_two_and_four() {
        let f = CsFamily::new(0.9).unwrap();
        let label = f.label_from_initial(0.5, 1.5);
        let grid = Grid::periodic(-12.0, 12.0, 256).unwrap();
        let k = 1.5 + 3.0 / f.sigma_q_at(0.7);
        let orders = convergence_orders(
            |q, t| eval_cs(q, t, &label, &f),
            &grid,
            0.7,
            0.5 / (k * k),
            0.5 / k,
        );
        assert!((orders.dt_order - 2.0).abs() < 0.2, "{orders:?}");
        assert!((orders.h_order - 4.0).abs() < 0.2, "{orders:?}");
    }
}
