//! Run configuration: a JSON file overlaid by command-line flags.
//!
//! ```json
//! {
//!   "family": {"sigma_q": 0.7071067811865476},
//!   "q0": 0.0, "p": 2.0,
//!   "grid": "-8:8:1601",
//!   "tau": [0.0, 1.0],
//!   "units": {"mass_kg": 9.10938e-31, "hbar_Js": 1.05457e-34, "length_m": 1e-9},
//!   "out": "packet.csv"
//! }
//! ```
//!
//! The family may instead be given raw as `{"c1": [re, im], "c2": [re, im]}`
//! and the label as `"z": [re, im]`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use freecs_core::units::{UnitSystem, ELECTRON_MASS_KG, HBAR_JS};
use freecs_core::{Complex64, CsFamily, CsLabel, Family, GeneralizedFamily, Grid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `|z - z(q0, p)|` accepted when a config gives both label forms.
pub const LABEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid {what} '{input}': {reason}")]
    Syntax {
        what: &'static str,
        input: String,
        reason: &'static str,
    },
    #[error("z = {z} disagrees with (q0, p) = ({q0}, {p}), which give z = {implied}")]
    InconsistentLabel {
        z: Complex64,
        q0: f64,
        p: f64,
        implied: Complex64,
    },
    #[error("{0}")]
    Missing(&'static str),
    #[error(transparent)]
    Core(#[from] freecs_core::Error),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// Family as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Cs { sigma_q: f64 },
    Raw { c1: [f64; 2], c2: [f64; 2] },
}

impl FamilySpec {
    pub fn build(&self) -> Result<AnyFamily> {
        Ok(match *self {
            FamilySpec::Cs { sigma_q } => AnyFamily::Cs(CsFamily::new(sigma_q)?),
            FamilySpec::Raw { c1, c2 } => AnyFamily::Generalized(GeneralizedFamily::new(
                Complex64::new(c1[0], c1[1]),
                Complex64::new(c2[0], c2[1]),
            )?),
        })
    }
}

/// Either kind of family behind one type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyFamily {
    Cs(CsFamily),
    Generalized(GeneralizedFamily),
}

impl AnyFamily {
    pub fn spec(&self) -> FamilySpec {
        match self {
            AnyFamily::Cs(f) => FamilySpec::Cs {
                sigma_q: f.sigma_q(),
            },
            AnyFamily::Generalized(f) => FamilySpec::Raw {
                c1: [f.c1().re, f.c1().im],
                c2: [f.c2().re, f.c2().im],
            },
        }
    }

    fn inner(&self) -> &dyn Family {
        match self {
            AnyFamily::Cs(f) => f,
            AnyFamily::Generalized(f) => f,
        }
    }
}

// Delegates every method so the CS overrides stay in effect.
impl Family for AnyFamily {
    fn c1(&self) -> Complex64 {
        self.inner().c1()
    }
    fn c2(&self) -> Complex64 {
        self.inner().c2()
    }
    fn delta(&self) -> f64 {
        self.inner().delta()
    }
    fn g(&self, tau: f64) -> Complex64 {
        self.inner().g(tau)
    }
    fn ln_g(&self, tau: f64) -> Complex64 {
        self.inner().ln_g(tau)
    }
    fn label_from_initial(&self, q0: f64, p: f64) -> CsLabel {
        self.inner().label_from_initial(q0, p)
    }
    fn initial_from_label(&self, label: &CsLabel) -> (f64, f64) {
        self.inner().initial_from_label(label)
    }
    fn heisenberg_product(&self, tau: f64) -> f64 {
        self.inner().heisenberg_product(tau)
    }
}

/// Label fields; either form, or both if they agree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl LabelSpec {
    pub fn is_empty(&self) -> bool {
        self.z.is_none() && self.q0.is_none() && self.p.is_none()
    }

    /// Missing `q0` or `p` default to zero; an empty spec is the vacuum.
    pub fn resolve(&self, family: &dyn Family) -> Result<CsLabel> {
        let from_initial = (self.q0.is_some() || self.p.is_some()).then(|| {
            let (q0, p) = (self.q0.unwrap_or(0.0), self.p.unwrap_or(0.0));
            (q0, p, family.label_from_initial(q0, p).z())
        });
        let z = match (self.z, from_initial) {
            (Some([re, im]), Some((q0, p, implied))) => {
                let z = Complex64::new(re, im);
                if (z - implied).norm() > LABEL_TOLERANCE {
                    return Err(ConfigError::InconsistentLabel { z, q0, p, implied });
                }
                z
            }
            (Some([re, im]), None) => Complex64::new(re, im),
            (None, Some((_, _, implied))) => implied,
            (None, None) => Complex64::new(0.0, 0.0),
        };
        Ok(CsLabel::new(z)?)
    }
}

/// `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    /// Closed grid including both endpoints, used for output.
    pub fn closed(&self) -> Result<Grid> {
        Ok(Grid::closed(self.min, self.max, self.count)?)
    }

    /// Periodic grid, used by the spectral and quadrature oracles.
    pub fn periodic(&self) -> Result<Grid> {
        Ok(Grid::periodic(self.min, self.max, self.count)?)
    }
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason| ConfigError::Syntax {
            what: "grid",
            input: s.to_owned(),
            reason,
        };
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(bad("expected min:max:count"));
        };
        let min: f64 = min.trim().parse().map_err(|_| bad("min is not a number"))?;
        let max: f64 = max.trim().parse().map_err(|_| bad("max is not a number"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| bad("count is not a positive integer"))?;
        Ok(GridSpec { min, max, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Comma-separated list of finite numbers.
pub fn parse_list(what: &'static str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::Syntax {
                    what,
                    input: s.to_owned(),
                    reason: "expected comma-separated finite numbers",
                })
        })
        .collect()
}

/// `re,im`.
pub fn parse_complex(what: &'static str, s: &str) -> Result<[f64; 2]> {
    match parse_list(what, s)?[..] {
        [re, im] => Ok([re, im]),
        _ => Err(ConfigError::Syntax {
            what,
            input: s.to_owned(),
            reason: "expected re,im",
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSpec {
    #[serde(default = "default_mass")]
    pub mass_kg: f64,
    #[serde(rename = "hbar_Js", default = "default_hbar")]
    pub hbar_js: f64,
    #[serde(default)]
    pub length_m: Option<f64>,
}

fn default_mass() -> f64 {
    ELECTRON_MASS_KG
}

fn default_hbar() -> f64 {
    HBAR_JS
}

impl Default for UnitsSpec {
    fn default() -> Self {
        Self {
            mass_kg: ELECTRON_MASS_KG,
            hbar_js: HBAR_JS,
            length_m: None,
        }
    }
}

impl UnitsSpec {
    /// The length scale has no default.
    pub fn build(&self) -> Result<UnitSystem> {
        let length = self.length_m.ok_or(ConfigError::Missing(
            "dimensional output needs units.length_m (or --length-m)",
        ))?;
        Ok(UnitSystem::new(self.mass_kg, self.hbar_js, length)?)
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub tau: Option<Vec<f64>>,
    #[serde(default)]
    pub units: Option<UnitsSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    /// Applies flag values on top of this file. A label given by flags
    /// replaces the file's label as a whole.
    pub fn overlay(mut self, flags: FileConfig) -> Self {
        if flags.family.is_some() {
            self.family = flags.family;
        }
        if !flags.label().is_empty() {
            (self.z, self.q0, self.p) = (flags.z, flags.q0, flags.p);
        }
        if flags.grid.is_some() {
            self.grid = flags.grid;
        }
        if flags.tau.is_some() {
            self.tau = flags.tau;
        }
        if let Some(u) = flags.units {
            self.units = Some(u);
        }
        if flags.out.is_some() {
            self.out = flags.out;
        }
        if flags.seed.is_some() {
            self.seed = flags.seed;
        }
        self
    }

    pub fn label(&self) -> LabelSpec {
        LabelSpec {
            z: self.z,
            q0: self.q0,
            p: self.p,
        }
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let family = self
            .family
            .unwrap_or(FamilySpec::Cs {
                sigma_q: std::f64::consts::FRAC_1_SQRT_2,
            })
            .build()?;
        let label = self.label().resolve(&family)?;
        let grid = self.grid.unwrap_or(DEFAULT_GRID);
        let taus = self.tau.unwrap_or_else(|| DEFAULT_TAUS.to_vec());
        if taus.is_empty() || taus.iter().any(|t| !t.is_finite()) {
            return Err(ConfigError::Missing("tau list must hold finite values"));
        }
        Ok(RunConfig {
            family,
            label,
            grid,
            taus,
            units: self.units.unwrap_or_default(),
            out: self.out,
            seed: self.seed.unwrap_or(0),
        })
    }
}

pub const DEFAULT_GRID: GridSpec = GridSpec {
    min: -8.0,
    max: 8.0,
    count: 1601,
};
pub const DEFAULT_TAUS: [f64; 2] = [0.0, 1.0];

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: AnyFamily,
    pub label: CsLabel,
    pub grid: GridSpec,
    pub taus: Vec<f64>,
    pub units: UnitsSpec,
    pub out: Option<PathBuf>,
    pub seed: u64,
}
