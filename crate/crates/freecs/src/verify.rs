//! The verification suite run by `freecs verify`.
//!
//! Each check compares a closed-form claim with an oracle, or with its exact
//! value, and reports the worst discrepancy found. Randomised checks draw
//! from a ChaCha8 stream seeded by the run seed, one stream per check, so a
//! check gives the same numbers whether it runs alone or in the full suite.

use std::f64::consts::PI;

use clap::ValueEnum;
use freecs_core::analytic::{
    eval_generalized_cs, eval_glauber_cs, glauber_sum, heisenberg_product, moments, overlap,
    rs_product, WaveField,
};
use freecs_core::{Complex64, CsFamily, CsLabel, GeneralizedFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{FamilySpec, GridSpec, RunConfig};
use crate::format::json_float;
use crate::oracle::{
    completeness_check, fock_gram, l2_distance, overlap_quadrature, propagate_spectral,
    quadrature_moments, quadrature_norm, schrodinger_residual, CompletenessSettings, TestFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Check {
    Normalization,
    RsSaturation,
    HeisenbergTau0,
    HeisenbergSqueezed,
    Residual,
    Propagate,
    Moments,
    Overlap,
    Completeness,
    Glauber,
    FockOrthonormality,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Normalization,
        Check::RsSaturation,
        Check::HeisenbergTau0,
        Check::HeisenbergSqueezed,
        Check::Residual,
        Check::Propagate,
        Check::Moments,
        Check::Overlap,
        Check::Completeness,
        Check::Glauber,
        Check::FockOrthonormality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Normalization => "normalization",
            Check::RsSaturation => "rs_saturation",
            Check::HeisenbergTau0 => "heisenberg_tau0",
            Check::HeisenbergSqueezed => "heisenberg_squeezed",
            Check::Residual => "residual",
            Check::Propagate => "propagate",
            Check::Moments => "moments",
            Check::Overlap => "overlap",
            Check::Completeness => "completeness",
            Check::Glauber => "glauber",
            Check::FockOrthonormality => "fock_orthonormality",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

/// How a check's value is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value <= tolerance`.
    Upper,
    /// `value > tolerance`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    #[serde(serialize_with = "json_float")]
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    fn judge(check: Check, value: f64, tolerance: f64, bound: Bound) -> Self {
        let passed = match bound {
            Bound::Upper => value <= tolerance,
            Bound::Lower => value > tolerance,
        };
        Self {
            name: check.name(),
            value,
            tolerance,
            bound,
            passed,
            error: None,
        }
    }

    fn failed(check: Check, tolerance: f64, bound: Bound, error: String) -> Self {
        Self {
            name: check.name(),
            value: f64::NAN,
            tolerance,
            bound,
            passed: false,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    /// Start and end of the propagation check.
    pub tau0: f64,
    pub tau1: f64,
    /// Periodic grid for spectral and quadrature checks.
    pub reference_grid: GridSpec,
    /// Periodic grid for the finite-difference residual.
    pub residual_grid: GridSpec,
    pub dt: f64,
    /// Random samples per randomised check.
    pub samples: usize,
    pub completeness: CompletenessSettings,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            tau0: 0.0,
            tau1: 1.0,
            reference_grid: GridSpec {
                min: -40.0,
                max: 40.0,
                count: 4096,
            },
            residual_grid: GridSpec {
                min: -20.0,
                max: 20.0,
                count: 2048,
            },
            dt: 1e-4,
            samples: 100,
            completeness: CompletenessSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub family: FamilySpec,
    pub z: [f64; 2],
    pub tau: Vec<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub fn run(config: &RunConfig, settings: &VerifySettings, selected: &[Check]) -> VerifyReport {
    let mut checks: Vec<Check> = if selected.is_empty() {
        Check::ALL.to_vec()
    } else {
        selected.to_vec()
    };
    checks.sort();
    checks.dedup();
    let results: Vec<CheckResult> = checks
        .into_iter()
        .map(|c| run_check(c, config, settings))
        .collect();
    let z = config.label.z();
    VerifyReport {
        seed: config.seed,
        family: config.family.spec(),
        z: [z.re, z.im],
        tau: config.taus.clone(),
        passed: results.iter().all(|r| r.passed),
        checks: results,
    }
}

fn rng_for(check: Check, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check.stream());
    rng
}

/// CS families with `sigma_q` in `[0.25, 4]`.
pub fn random_cs_family(rng: &mut impl Rng) -> CsFamily {
    CsFamily::new(rng.random_range(0.25..=4.0)).expect("positive width")
}

/// Generalized families `c2 = (1/2 + i s) / conj(c1)` with `|c1|` in
/// `[0.25, 2]`, any phase, and `s` in `[-2, 2]`; `mu2 - mu1 = atan(2 s)`.
pub fn random_generalized_family(rng: &mut impl Rng, shear: f64) -> GeneralizedFamily {
    let c1 = Complex64::from_polar(rng.random_range(0.25..=2.0), rng.random_range(-PI..PI));
    GeneralizedFamily::new(c1, Complex64::new(0.5, shear) / c1.conj())
        .expect("delta = 1 by construction")
}

/// Uniform in the disk `|z| <= radius`.
pub fn random_label(rng: &mut impl Rng, radius: f64) -> CsLabel {
    let r = radius * rng.random::<f64>().sqrt();
    CsLabel::new(Complex64::from_polar(r, rng.random_range(-PI..PI))).expect("finite")
}

fn max(mut it: impl Iterator<Item = Result<f64, String>>) -> Result<f64, String> {
    it.try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn run_check(check: Check, cfg: &RunConfig, s: &VerifySettings) -> CheckResult {
    let mut rng = rng_for(check, cfg.seed);
    let fam = &cfg.family;
    let label = &cfg.label;
    let outcome: Result<f64, String> = (|| -> Result<f64, String> {
        let err = |e: &dyn std::fmt::Display| e.to_string();
        let reference = s.reference_grid.periodic().map_err(|e| err(&e))?;
        let field =
            |tau: f64| WaveField::coherent_state(reference, tau, label, fam).map_err(|e| err(&e));
        Ok(match check {
            Check::Normalization => max(cfg.taus.iter().map(|&t| {
                let norm = quadrature_norm(&field(t)?).map_err(|e| err(&e))?;
                Ok((norm - 1.0).abs())
            }))?,
            Check::RsSaturation => {
                let mut worst = cfg
                    .taus
                    .iter()
                    .map(|&t| (rs_product(t, fam) - 0.25).abs())
                    .fold(0.0, f64::max);
                for i in 0..s.samples {
                    let tau = rng.random_range(-5.0..=5.0);
                    let dev = if i % 2 == 0 {
                        rs_product(tau, &random_cs_family(&mut rng))
                    } else {
                        let shear = rng.random_range(-2.0..=2.0);
                        rs_product(tau, &random_generalized_family(&mut rng, shear))
                    };
                    worst = worst.max((dev - 0.25).abs());
                }
                worst
            }
            Check::HeisenbergTau0 => {
                let mut worst = 0.0f64;
                if let crate::config::AnyFamily::Cs(f) = fam {
                    worst = (heisenberg_product(0.0, f) - 0.5).abs();
                }
                for _ in 0..s.samples {
                    let f = random_cs_family(&mut rng);
                    worst = worst.max((heisenberg_product(0.0, &f) - 0.5).abs());
                }
                worst
            }
            Check::HeisenbergSqueezed => {
                let mut least = f64::INFINITY;
                for _ in 0..s.samples {
                    let magnitude = rng.random_range(0.1..=2.0);
                    let shear = if rng.random::<bool>() {
                        magnitude
                    } else {
                        -magnitude
                    };
                    let f = random_generalized_family(&mut rng, shear);
                    least = least.min(heisenberg_product(0.0, &f) - 0.5);
                }
                least
            }
            Check::Residual => {
                let grid = s.residual_grid.periodic().map_err(|e| err(&e))?;
                let psi = |q: f64, tau: f64| eval_generalized_cs(q, tau, label, fam);
                max(cfg.taus.iter().map(|&t| {
                    schrodinger_residual(psi, &grid, t, s.dt)
                        .map(|r| r.rel_residual)
                        .map_err(|e| err(&e))
                }))?
            }
            Check::Propagate => {
                let start = field(s.tau0)?;
                let evolved = propagate_spectral(&start, s.tau1).map_err(|e| err(&e))?;
                let exact = field(s.tau1)?;
                l2_distance(&reference, evolved.values(), exact.values())
            }
            Check::Moments => max(cfg.taus.iter().map(|&t| {
                let quad = quadrature_moments(&field(t)?).map_err(|e| err(&e))?;
                Ok(quad.max_abs_diff(&moments(t, label, fam)))
            }))?,
            Check::Overlap => {
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let (z1, z2) = (random_label(&mut rng, 2.0), random_label(&mut rng, 2.0));
                    let exact = overlap(&z1, &z2);
                    for tau in [0.0, 1.0] {
                        let quad = overlap_quadrature(&z1, &z2, tau, fam, &reference)
                            .map_err(|e| err(&e))?;
                        worst = worst.max((quad - exact).norm());
                    }
                }
                worst
            }
            Check::Completeness => {
                let test = TestFunction {
                    center: 0.0,
                    width: 1.0,
                };
                max(cfg.taus.iter().map(|&t| {
                    completeness_check(0.0, t, fam, test, s.completeness)
                        .map(|r| r.deviation)
                        .map_err(|e| err(&e))
                }))?
            }
            Check::Glauber => {
                let mut labels: Vec<CsLabel> =
                    (0..4).map(|_| random_label(&mut rng, 2.0)).collect();
                if label.z().norm() <= 2.0 {
                    labels.insert(0, *label);
                }
                let mut worst = 0.0f64;
                for &t in &cfg.taus {
                    for l in &labels {
                        for q in reference.points() {
                            let sum =
                                glauber_sum(l, q, t, fam, GLAUBER_TERMS).map_err(|e| err(&e))?;
                            worst = worst.max((sum - eval_glauber_cs(q, t, l, fam)).norm());
                        }
                    }
                }
                worst
            }
            Check::FockOrthonormality => max(cfg.taus.iter().map(|&t| {
                let gram = fock_gram(fam, t, FOCK_LEVELS, &reference).map_err(|e| err(&e))?;
                Ok(gram
                    .iter()
                    .enumerate()
                    .flat_map(|(m, row)| {
                        row.iter()
                            .enumerate()
                            .map(move |(n, v)| (v - if m == n { 1.0 } else { 0.0 }).norm())
                    })
                    .fold(0.0, f64::max))
            }))?,
        })
    })();
    let (tolerance, bound) = tolerance(check);
    match outcome {
        Ok(value) => CheckResult::judge(check, value, tolerance, bound),
        Err(e) => CheckResult::failed(check, tolerance, bound, e),
    }
}

pub const GLAUBER_TERMS: usize = 40;
pub const FOCK_LEVELS: usize = 6;

/// Tolerance and direction of every check.
pub fn tolerance(check: Check) -> (f64, Bound) {
    match check {
        Check::Normalization => (1e-10, Bound::Upper),
        Check::RsSaturation => (1e-12, Bound::Upper),
        Check::HeisenbergTau0 => (1e-14, Bound::Upper),
        Check::HeisenbergSqueezed => (0.0, Bound::Lower),
        Check::Residual => (1e-6, Bound::Upper),
        Check::Propagate => (1e-8, Bound::Upper),
        Check::Moments => (1e-8, Bound::Upper),
        Check::Overlap => (1e-8, Bound::Upper),
        Check::Completeness => (1e-6, Bound::Upper),
        Check::Glauber => (1e-8, Bound::Upper),
        Check::FockOrthonormality => (1e-8, Bound::Upper),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FileConfig;

    fn default_config() -> RunConfig {
        FileConfig::default().resolve().unwrap()
    }

    #[test]
    fn names_are_snake_case() {
        assert_eq!(Check::RsSaturation.name(), "rs_saturation");
        assert_eq!(Check::HeisenbergTau0.name(), "heisenberg_tau0");
        assert_eq!(Check::FockOrthonormality.name(), "fock_orthonormality");
    }

    #[test]
    fn cheap_checks_pass_on_default_config() {
        let selected = [
            Check::RsSaturation,
            Check::HeisenbergTau0,
            Check::HeisenbergSqueezed,
            Check::Propagate,
            Check::Normalization,
        ];
        let report = run(&default_config(), &VerifySettings::default(), &selected);
        assert_eq!(report.checks.len(), selected.len());
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.passed);
    }

    #[test]
    fn subset_matches_full_stream() {
        let cfg = default_config();
        let s = VerifySettings::default();
        let alone = run(&cfg, &s, &[Check::Overlap]);
        let pair = run(&cfg, &s, &[Check::RsSaturation, Check::Overlap]);
        assert_eq!(alone.checks[0], pair.checks[1]);
    }

    #[test]
    fn errors_become_failures() {
        let s = VerifySettings {
            reference_grid: GridSpec {
                min: -2.0,
                max: 2.0,
                count: 64,
            },
            ..Default::default()
        };
        let report = run(&default_config(), &s, &[Check::Normalization]);
        let c = &report.checks[0];
        assert!(!c.passed);
        assert!(c.value.is_nan());
        assert!(c.error.as_deref().unwrap().contains("edge"));
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["checks"][0]["value"], "nan");
    }
}
