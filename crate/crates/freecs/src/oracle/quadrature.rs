use freecs_core::analytic::{eval_glauber_cs, FockBasis, Moments, WaveField};
use freecs_core::{Complex64, CsLabel, Family, Grid};

use super::{check_boundary, spectral_derivative, Result};

/// `sum_j w_j |psi_j|^2`.
pub fn quadrature_norm(field: &WaveField) -> Result<f64> {
    check_boundary(field.values())?;
    Ok(field.norm())
}

/// Moments of a sampled field. Position moments by direct quadrature,
/// momentum moments through the spectral derivative `p psi = -i psi'`.
/// Every expectation is divided by the discrete norm.
pub fn quadrature_moments(field: &WaveField) -> Result<Moments> {
    check_boundary(field.values())?;
    let grid = field.grid();
    let psi = field.values();
    let p_psi: Vec<Complex64> = spectral_derivative(grid, psi)
        .into_iter()
        .map(|d| -Complex64::i() * d)
        .collect();
    let weights: Vec<f64> = (0..grid.len()).map(|i| grid.weight(i)).collect();
    let points: Vec<f64> = grid.points().collect();

    let norm = field.norm();
    let expect = |f: &dyn Fn(usize) -> f64| -> f64 {
        (0..psi.len()).map(|i| weights[i] * f(i)).sum::<f64>() / norm
    };
    let mean_q = expect(&|i| points[i] * psi[i].norm_sqr());
    let var_q = expect(&|i| (points[i] - mean_q).powi(2) * psi[i].norm_sqr());
    let mean_p = expect(&|i| (psi[i].conj() * p_psi[i]).re);
    let var_p = expect(&|i| (p_psi[i] - mean_p * psi[i]).norm_sqr());
    let sigma_qp =
        expect(&|i| (psi[i].conj() * (points[i] - mean_q) * (p_psi[i] - mean_p * psi[i])).re);

    Ok(Moments {
        mean_q,
        mean_p,
        sigma_q: var_q.sqrt(),
        sigma_p: var_p.sqrt(),
        sigma_qp,
    })
}

/// `<z1, tau | z2, tau>` by quadrature of the displaced-vacuum states.
pub fn overlap_quadrature<F: Family + ?Sized>(
    z1: &CsLabel,
    z2: &CsLabel,
    tau: f64,
    family: &F,
    grid: &Grid,
) -> Result<Complex64> {
    let a: Vec<Complex64> = grid
        .points()
        .map(|q| eval_glauber_cs(q, tau, z1, family))
        .collect();
    let b: Vec<Complex64> = grid
        .points()
        .map(|q| eval_glauber_cs(q, tau, z2, family))
        .collect();
    check_boundary(&a)?;
    check_boundary(&b)?;
    Ok(a.iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (x, y))| grid.weight(i) * x.conj() * y)
        .sum())
}

/// Gram matrix `G[m][n] = <m, tau | n, tau>` for `m, n <= n_max` by quadrature.
pub fn fock_gram<F: Family + ?Sized>(
    family: &F,
    tau: f64,
    n_max: usize,
    grid: &Grid,
) -> Result<Vec<Vec<Complex64>>> {
    let basis = FockBasis::new(family, tau);
    let samples: Vec<Vec<Complex64>> = grid
        .points()
        .map(|q| basis.values(n_max, q))
        .collect::<std::result::Result<_, _>>()?;
    for n in 0..=n_max {
        let column: Vec<Complex64> = samples.iter().map(|s| s[n]).collect();
        check_boundary(&column)?;
    }
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n_max + 1]; n_max + 1];
    for (i, s) in samples.iter().enumerate() {
        let w = grid.weight(i);
        for m in 0..=n_max {
            for n in 0..=n_max {
                gram[m][n] += w * s[m].conj() * s[n];
            }
        }
    }
    Ok(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{reference_grid, OracleError};
    use freecs_core::analytic::{moments, overlap};
    use freecs_core::{CsFamily, GeneralizedFamily};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn cs_field_is_normalised() {
        let f = CsFamily::new(1.3).unwrap();
        let label = f.label_from_initial(2.0, -1.0);
        let field = WaveField::coherent_state(reference_grid(), 1.5, &label, &f).unwrap();
        assert!((quadrature_norm(&field).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moving_packet_moments() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let label = f.label_from_initial(0.0, 2.0);
        let field = WaveField::coherent_state(reference_grid(), 1.0, &label, &f).unwrap();
        let m = quadrature_moments(&field).unwrap();
        assert!((m.mean_q - 2.0).abs() < 1e-8);
        assert!((m.sigma_q - 1.0).abs() < 1e-8);
        assert!((m.sigma_qp - 1.0 / (4.0 * 0.5)).abs() < 1e-8);
        assert!(m.max_abs_diff(&moments(1.0, &label, &f)) < 1e-8);
    }

    #[test]
    fn squeezed_moments() {
        let c1 = Complex64::new(0.3, 0.5);
        let fam = GeneralizedFamily::new(c1, Complex64::new(0.5, -0.4) / c1.conj()).unwrap();
        let label = fam.label_from_initial(-1.0, 0.7);
        for tau in [-1.0, 0.0, 2.0] {
            let field = WaveField::coherent_state(reference_grid(), tau, &label, &fam).unwrap();
            let m = quadrature_moments(&field).unwrap();
            assert!(
                m.max_abs_diff(&moments(tau, &label, &fam)) < 1e-8,
                "tau = {tau}"
            );
        }
    }

    #[test]
    fn overlap_examples() {
        let f = CsFamily::new(FRAC_1_SQRT_2).unwrap();
        let grid = reference_grid();
        let z = CsLabel::new(Complex64::new(0.4, -0.9)).unwrap();
        assert!((overlap_quadrature(&z, &z, 0.7, &f, &grid).unwrap() - 1.0).norm() < 1e-10);

        let w = CsLabel::new(Complex64::new(0.0, SQRT_2)).unwrap();
        for tau in [0.0, 1.0] {
            let o = overlap_quadrature(&CsLabel::vacuum(), &w, tau, &f, &grid).unwrap();
            assert!((o - (-1.0f64).exp()).norm() < 1e-8);
        }

        let expected = overlap(&z, &w);
        for s in [0.3, 1.0, 3.0] {
            let fam = CsFamily::new(s).unwrap();
            let o = overlap_quadrature(&z, &w, 0.5, &fam, &grid).unwrap();
            assert!((o - expected).norm() < 1e-8, "sigma = {s}");
        }
    }

    #[test]
    fn fock_states_are_orthonormal() {
        let c1 = Complex64::new(0.6, 0.2);
        let fam = GeneralizedFamily::new(c1, Complex64::new(0.5, 0.3) / c1.conj()).unwrap();
        let gram = fock_gram(&fam, 0.8, 6, &reference_grid()).unwrap();
        for (m, row) in gram.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                assert!((v - target).norm() < 1e-8, "<{m}|{n}> = {v}");
            }
        }
    }

    #[test]
    fn boundary_violation_detected() {
        let f = CsFamily::new(1.0).unwrap();
        let grid = Grid::periodic(-4.0, 4.0, 128).unwrap();
        let field = WaveField::coherent_state(grid, 0.0, &CsLabel::vacuum(), &f).unwrap();
        assert!(matches!(
            quadrature_norm(&field),
            Err(OracleError::BoundaryMass { .. })
        ));
        assert!(matches!(
            quadrature_moments(&field),
            Err(OracleError::BoundaryMass { .. })
        ));
    }
}
