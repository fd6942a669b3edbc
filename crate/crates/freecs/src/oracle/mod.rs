//! Independent numerical checks of the closed-form states.

mod completeness;
mod quadrature;
mod residual;
mod spectral;

pub use completeness::{
    completeness_check, default_radius, CompletenessReport, CompletenessSettings, TestFunction,
};
pub use quadrature::{fock_gram, overlap_quadrature, quadrature_moments, quadrature_norm};
pub use residual::{
    convergence_orders, residual_at, schrodinger_residual, ConvergenceOrders, ResidualReport,
};
pub use spectral::{propagate_spectral, spectral_derivative, wavenumbers};

use freecs_core::{Complex64, Grid};
use thiserror::Error;

/// Largest `|psi|` tolerated in the edge bands of a grid.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Reference grid for propagation and moment checks: `[-40, 40]`, 4096 points.
pub fn reference_grid() -> Grid {
    Grid::periodic(-40.0, 40.0, 4096).expect("static grid is valid")
}

/// Grid used for finite-difference residuals: `[-20, 20]`, 2048 points.
pub fn residual_grid() -> Grid {
    Grid::periodic(-20.0, 20.0, 2048).expect("static grid is valid")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Core(#[from] freecs_core::Error),
    #[error("|psi| reaches {edge:e} at the grid edge (limit {limit:e}); wrap-around or truncation likely")]
    BoundaryMass { edge: f64, limit: f64 },
    #[error("spectral propagation needs a periodic grid with a power-of-two number of points")]
    SpectralGrid,
    #[error("grid too coarse: relative residual {rel_residual:e} drops {ratio:.1}x when the stencil is halved")]
    GridTooCoarse { rel_residual: f64, ratio: f64 },
    #[error("radius {radius} too small: integrand envelope {envelope:e} on the boundary circle")]
    TruncationRadius { radius: f64, envelope: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Width of each edge band checked by [`check_boundary`].
fn edge_band(n: usize) -> usize {
    (n / 64).max(1)
}

/// Fails when the field is not negligible near either end of its grid.
pub fn check_boundary(values: &[Complex64]) -> Result<()> {
    let band = edge_band(values.len()).min(values.len());
    let edge = values[..band]
        .iter()
        .chain(&values[values.len() - band..])
        .fold(0.0f64, |m, v| m.max(v.norm()));
    if edge > BOUNDARY_TOLERANCE {
        return Err(OracleError::BoundaryMass {
            edge,
            limit: BOUNDARY_TOLERANCE,
        });
    }
    Ok(())
}

/// Discrete L2 distance `sqrt(sum_j w_j |a_j - b_j|^2)`.
pub fn l2_distance(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| grid.weight(i) * (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
