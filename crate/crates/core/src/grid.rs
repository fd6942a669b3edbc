//! Uniform one-dimensional grids.

use crate::error::{ensure_finite, Error, Result};

/// How the sample points cover `[q_min, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Both endpoints are samples; spacing is `(q_max - q_min) / (n - 1)`.
    Closed,
    /// `q_max` is identified with `q_min`; spacing is `(q_max - q_min) / n`.
    /// This is the layout required by the spectral routines.
    Periodic,
}

/// Smallest number of points accepted for a periodic grid.
pub const MIN_PERIODIC_POINTS: usize = 16;

/// A uniform grid on `[q_min, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    q_min: f64,
    q_max: f64,
    n_points: usize,
    kind: GridKind,
}

impl Grid {
    /// Grid whose first and last samples are `q_min` and `q_max`.
    pub fn closed(q_min: f64, q_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid("need at least two points"));
        }
        Self::checked(q_min, q_max, n_points, GridKind::Closed)
    }

    /// Periodic grid with `n_points` samples starting at `q_min`.
    pub fn periodic(q_min: f64, q_max: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_PERIODIC_POINTS {
            return Err(Error::InvalidGrid("periodic grids need at least 16 points"));
        }
        Self::checked(q_min, q_max, n_points, GridKind::Periodic)
    }

    fn checked(q_min: f64, q_max: f64, n_points: usize, kind: GridKind) -> Result<Self> {
        ensure_finite(q_min, "q_min")?;
        ensure_finite(q_max, "q_max")?;
        if q_max <= q_min {
            return Err(Error::InvalidGrid("q_max must exceed q_min"));
        }
        Ok(Self {
            q_min,
            q_max,
            n_points,
            kind,
        })
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Length of the interval `q_max - q_min`.
    pub fn extent(&self) -> f64 {
        self.q_max - self.q_min
    }

    /// Distance between neighbouring samples.
    pub fn spacing(&self) -> f64 {
        match self.kind {
            GridKind::Closed => self.extent() / (self.n_points - 1) as f64,
            GridKind::Periodic => self.extent() / self.n_points as f64,
        }
    }

    /// The `i`-th sample point.
    pub fn point(&self, i: usize) -> f64 {
        if self.kind == GridKind::Closed && i + 1 == self.n_points {
            return self.q_max;
        }
        self.q_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Quadrature weight of sample `i`: trapezoid on closed grids, uniform
    /// on periodic ones.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.kind {
            GridKind::Closed if i == 0 || i + 1 == self.n_points => 0.5 * h,
            _ => h,
        }
    }

    /// Integrates sampled values, summing in index order.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.n_points {
            return Err(Error::LengthMismatch {
                expected: self.n_points,
                got: samples.len(),
            });
        }
        Ok(samples
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum())
    }

    /// Index of the sample nearest to `q`, clamped to the grid.
    pub fn nearest_index(&self, q: f64) -> usize {
        let raw = ((q - self.q_min) / self.spacing() + 0.5).max(0.0) as usize;
        raw.min(self.n_points - 1)
    }
}
