use std::f64::consts::PI;

use freecs_core::analytic::WaveField;
use freecs_core::{Complex64, Grid, GridKind};
use rustfft::FftPlanner;

use super::{check_boundary, OracleError, Result};

/// Angular wavenumbers in FFT output order: `2 pi j / (n h)` for
/// `j = 0, 1, .., n/2 - 1, -n/2, .., -1`.
pub fn wavenumbers(grid: &Grid) -> Vec<f64> {
    let n = grid.len();
    let period = n as f64 * grid.spacing();
    (0..n)
        .map(|i| {
            let j = if i < n.div_ceil(2) {
                i as i64
            } else {
                i as i64 - n as i64
            };
            2.0 * PI * j as f64 / period
        })
        .collect()
}

/// Applies `e^{-i k^2 dtau / 2}` mode by mode.
fn apply_free_propagator(grid: &Grid, values: &mut [Complex64], dtau: f64) {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(values);
    for (v, k) in values.iter_mut().zip(wavenumbers(grid)) {
        *v *= Complex64::from_polar(1.0 / n as f64, -0.5 * k * k * dtau);
    }
    planner.plan_fft_inverse(n).process(values);
}

/// Evolves a field under the free Hamiltonian `p^2 / 2` from its own `tau`
/// to `tau1` by exact phase multiplication in Fourier space.
///
/// The grid must be periodic with a power-of-two length and the field must
/// vanish near both edges, before and after the evolution.
pub fn propagate_spectral(field: &WaveField, tau1: f64) -> Result<WaveField> {
    let grid = *field.grid();
    if grid.kind() != GridKind::Periodic || !grid.len().is_power_of_two() {
        return Err(OracleError::SpectralGrid);
    }
    if !tau1.is_finite() {
        return Err(OracleError::InvalidInput("target tau must be finite"));
    }
    check_boundary(field.values())?;
    let dtau = tau1 - field.tau();
    if dtau == 0.0 {
        return Ok(field.clone());
    }
    let mut values = field.values().to_vec();
    apply_free_propagator(&grid, &mut values, dtau);
    check_boundary(&values)?;
    Ok(WaveField::new(grid, tau1, values)?)
}

/// `d psi / dq` by Fourier differentiation. The field is treated as one
/// period of length `n h`, so it must vanish near the edges.
pub fn spectral_derivative(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let k = wavenumbers(grid);
    for (i, v) in buf.iter_mut().enumerate() {
        // The unpaired Nyquist mode has no defined derivative.
        let kk = if n.is_multiple_of(2) && i == n / 2 {
            0.0
        } else {
            k[i]
        };
        *v *= Complex64::new(0.0, kk / n as f64);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}
