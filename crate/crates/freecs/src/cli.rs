//! `freecs` subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use freecs_core::analytic::{heisenberg_product, moments, rs_product, WaveField};
use freecs_core::semiclassical::DimensionalPacket;
use freecs_core::units::UnitSystem;
use serde::Serialize;
use thiserror::Error;

use crate::config::{
    parse_complex, parse_list, ConfigError, FamilySpec, FileConfig, GridSpec, RunConfig, UnitsSpec,
};
use crate::format::{
    json_float, write_field, write_json, write_long, write_long_dimensional, write_moments,
    FieldMeta, GridMeta, MomentsRow, TauMeta,
};
use crate::oracle::{completeness_check, quadrature_moments, CompletenessSettings, TestFunction};
use crate::verify::{self, Check, VerifySettings};

#[derive(Debug, Parser)]
#[command(
    name = "freecs",
    version,
    about = "Free-particle coherent states: fields, moments, checks"
)]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for the randomised checks of `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wavefunction and density on a grid, one block per tau.
    Field(FieldArgs),
    /// Analytic moments and uncertainty products per tau.
    Moments(MomentsArgs),
    /// Run the verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Semiclassicality of a packet given in SI units.
    Classify(ClassifyArgs),
    /// Smeared completeness check per tau.
    Completeness(CompletenessArgs),
}

/// Family, label, grid, times and units. Unset flags fall back to the config
/// file, then to the defaults (`sigma_q = 2^-1/2`, `z = 0`, grid
/// `-8:8:1601`, `tau = 0,1`).
#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    #[arg(long, conflicts_with_all = ["c1", "c2"])]
    pub sigma_q: Option<f64>,
    /// Raw family coefficient `re,im`; must satisfy 2 Re(c1* c2) = 1.
    #[arg(long, allow_hyphen_values = true, requires = "c2")]
    pub c1: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "c1")]
    pub c2: Option<String>,
    /// Complex label `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// `min:max:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long)]
    pub mass_kg: Option<f64>,
    #[arg(long = "hbar-js")]
    pub hbar_js: Option<f64>,
    #[arg(long)]
    pub length_m: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// One `q,re,im,density` file per tau instead of a long table.
    #[arg(long, conflicts_with = "dimensional")]
    pub per_tau: bool,
    /// Write `t,x,re,im,density` in SI units (needs a length scale).
    #[arg(long)]
    pub dimensional: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Append quadrature moments on the reference grid.
    #[arg(long)]
    pub with_oracle: bool,
    /// Periodic grid for the quadrature columns.
    #[arg(long, allow_hyphen_values = true, default_value = "-40:40:4096")]
    pub ref_grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Checks to run (all if omitted).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub check: Vec<Check>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub tau0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub tau1: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-40:40:4096")]
    pub ref_grid: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-20:20:2048")]
    pub residual_grid: String,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Particle mass (default: config, then the electron mass).
    #[arg(long)]
    pub mass_kg: Option<f64>,
    #[arg(long = "hbar-js")]
    pub hbar_js: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub velocity_ms: f64,
    #[arg(long)]
    pub sigma_x_m: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CompletenessArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Point at which the identity is evaluated.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub at: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub test_center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub test_width: f64,
    /// Disk radius (default: smallest with a negligible boundary envelope).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub n_radial: usize,
    #[arg(long)]
    pub n_angular: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Failure(_) => 3,
        }
    }
}

fn io_error(path: Option<&Path>, e: io::Error) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(format!("stdout: {e}")),
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs one parsed invocation, writing results to `--out` or `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let globals = FileConfig {
        out: cli.out.clone(),
        seed: cli.seed,
        ..Default::default()
    };
    match cli.command {
        Command::Field(args) => field(resolve(file, globals, &args.state)?, &args, stdout),
        Command::Moments(args) => moments_cmd(resolve(file, globals, &args.state)?, &args, stdout),
        Command::Verify(args) => verify_cmd(resolve(file, globals, &args.state)?, &args, stdout),
        Command::Classify(args) => classify(file.overlay(globals), &args, stdout),
        Command::Completeness(args) => {
            completeness(resolve(file, globals, &args.state)?, &args, stdout)
        }
    }
}

fn resolve(file: FileConfig, globals: FileConfig, state: &StateArgs) -> CliResult<RunConfig> {
    let units = merge_units(file.units, state.mass_kg, state.hbar_js, state.length_m);
    let family = match (state.sigma_q, &state.c1, &state.c2) {
        (Some(sigma_q), _, _) => Some(FamilySpec::Cs { sigma_q }),
        (None, Some(c1), Some(c2)) => Some(FamilySpec::Raw {
            c1: parse_complex("c1", c1)?,
            c2: parse_complex("c2", c2)?,
        }),
        _ => None,
    };
    let flags = FileConfig {
        family,
        z: state
            .z
            .as_deref()
            .map(|z| parse_complex("z", z))
            .transpose()?,
        q0: state.q0,
        p: state.p,
        grid: state.grid.as_deref().map(str::parse).transpose()?,
        tau: state
            .tau
            .as_deref()
            .map(|t| parse_list("tau", t))
            .transpose()?,
        units,
        ..globals
    };
    Ok(file.overlay(flags).resolve()?)
}

fn merge_units(
    file: Option<UnitsSpec>,
    mass_kg: Option<f64>,
    hbar_js: Option<f64>,
    length_m: Option<f64>,
) -> Option<UnitsSpec> {
    if mass_kg.is_none() && hbar_js.is_none() && length_m.is_none() {
        return file;
    }
    let mut u = file.unwrap_or_default();
    u.mass_kg = mass_kg.unwrap_or(u.mass_kg);
    u.hbar_js = hbar_js.unwrap_or(u.hbar_js);
    u.length_m = length_m.or(u.length_m);
    Some(u)
}

/// Buffered writer on `path`, or on `stdout` when there is none.
fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_error(Some(p), e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_error(Some(p), e))
        }
        None => body(stdout)
            .and_then(|_| stdout.flush())
            .map_err(|e| io_error(None, e)),
    }
}

fn with_suffix(path: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{extension}"))
}

fn field(cfg: RunConfig, args: &FieldArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let grid = cfg.grid.closed()?;
    let fields: Vec<WaveField> = cfg
        .taus
        .iter()
        .map(|&t| WaveField::coherent_state(grid, t, &cfg.label, &cfg.family))
        .collect::<Result<_, _>>()
        .map_err(ConfigError::from)?;
    let meta = |tau| {
        FieldMeta::new(
            tau,
            cfg.family.spec(),
            &cfg.label,
            GridMeta::new(cfg.grid, &grid),
        )
    };

    if args.per_tau {
        let out = cfg.out.as_deref().ok_or(ConfigError::Missing(
            "--per-tau needs --out to name the files",
        ))?;
        for (k, f) in fields.iter().enumerate() {
            let csv = with_suffix(out, &format!("_{k}"), "csv");
            with_output(Some(&csv), stdout, |w| write_field(w, f))?;
            let json = with_suffix(out, &format!("_{k}"), "json");
            with_output(Some(&json), stdout, |w| {
                write_json(w, &meta(TauMeta::One(f.tau())))
            })?;
        }
        return Ok(());
    }

    if args.dimensional {
        let units = cfg.units.build()?;
        with_output(cfg.out.as_deref(), stdout, |w| {
            write_long_dimensional(w, &fields, &units)
        })?;
    } else {
        with_output(cfg.out.as_deref(), stdout, |w| write_long(w, &fields))?;
    }
    if let Some(out) = cfg.out.as_deref() {
        let json = with_suffix(out, "", "json");
        with_output(Some(&json), stdout, |w| {
            write_json(w, &meta(TauMeta::Many(cfg.taus.clone())))
        })?;
    }
    Ok(())
}

fn moments_cmd(cfg: RunConfig, args: &MomentsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let reference = args.ref_grid.parse::<GridSpec>()?.periodic()?;
    let rows = cfg
        .taus
        .iter()
        .map(|&t| {
            let oracle = if args.with_oracle {
                let field = WaveField::coherent_state(reference, t, &cfg.label, &cfg.family)
                    .map_err(ConfigError::from)?;
                Some(quadrature_moments(&field).map_err(|e| CliError::Failure(e.to_string()))?)
            } else {
                None
            };
            Ok(MomentsRow {
                tau: t,
                analytic: moments(t, &cfg.label, &cfg.family),
                rs_product: rs_product(t, &cfg.family),
                heisenberg: heisenberg_product(t, &cfg.family),
                oracle,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    with_output(cfg.out.as_deref(), stdout, |w| {
        write_moments(w, &rows, args.with_oracle)
    })
}

fn verify_cmd(cfg: RunConfig, args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let settings = VerifySettings {
        tau0: args.tau0,
        tau1: args.tau1,
        reference_grid: args.ref_grid.parse()?,
        residual_grid: args.residual_grid.parse()?,
        dt: args.dt,
        ..Default::default()
    };
    let report = verify::run(&cfg, &settings, &args.check);
    with_output(cfg.out.as_deref(), stdout, |w| write_json(w, &report))?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(CliError::Failure(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

#[derive(Debug, Serialize)]
struct ClassifyOutput {
    mass_kg: f64,
    #[serde(rename = "hbar_Js")]
    hbar_js: f64,
    velocity_ms: f64,
    sigma_x_m: f64,
    p_x: f64,
    wavelength_m: ReportFloat,
    bound_m: f64,
    ratio: ReportFloat,
    verdict: &'static str,
}

#[derive(Debug, Serialize)]
#[serde(transparent)]
struct ReportFloat(#[serde(serialize_with = "json_float")] f64);

fn classify(file: FileConfig, args: &ClassifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let base = file.units.unwrap_or_default();
    let mass = args.mass_kg.unwrap_or(base.mass_kg);
    let hbar = args.hbar_js.unwrap_or(base.hbar_js);
    // The length scale does not enter the classification.
    let units = UnitSystem::new(mass, hbar, args.sigma_x_m).map_err(ConfigError::from)?;
    let packet = DimensionalPacket::with_velocity(0.0, args.velocity_ms, args.sigma_x_m, units)
        .map_err(ConfigError::from)?;
    let report = packet.classify();
    let output = ClassifyOutput {
        mass_kg: mass,
        hbar_js: hbar,
        velocity_ms: args.velocity_ms,
        sigma_x_m: args.sigma_x_m,
        p_x: packet.p_x(),
        wavelength_m: ReportFloat(report.wavelength),
        bound_m: report.bound,
        ratio: ReportFloat(report.ratio),
        verdict: report.verdict.as_str(),
    };
    with_output(file.out.as_deref(), stdout, |w| write_json(w, &output))
}

#[derive(Debug, Serialize)]
struct CompletenessRow {
    tau: f64,
    value: [f64; 2],
    target: f64,
    deviation: f64,
    radius: f64,
    boundary_envelope: f64,
    n_radial: usize,
    n_angular: usize,
    passed: bool,
}

/// Deviation accepted by the `completeness` subcommand.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-6;

fn completeness(cfg: RunConfig, args: &CompletenessArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let test = TestFunction {
        center: args.test_center,
        width: args.test_width,
    };
    let settings = CompletenessSettings {
        radius: args.radius,
        n_radial: args.n_radial,
        n_angular: args.n_angular,
    };
    let rows = cfg
        .taus
        .iter()
        .map(|&tau| {
            let r = completeness_check(args.at, tau, &cfg.family, test, settings)
                .map_err(|e| CliError::Failure(format!("tau = {tau}: {e}")))?;
            Ok(CompletenessRow {
                tau,
                value: [r.value.re, r.value.im],
                target: r.target,
                deviation: r.deviation,
                radius: r.radius,
                boundary_envelope: r.boundary_envelope,
                n_radial: r.n_radial,
                n_angular: r.n_angular,
                passed: r.deviation < COMPLETENESS_TOLERANCE,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    with_output(cfg.out.as_deref(), stdout, |w| write_json(w, &rows))?;
    if rows.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "completeness deviation exceeds {COMPLETENESS_TOLERANCE:e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("freecs").chain(args.iter().copied())).unwrap()
    }

    fn run_capture(args: &[&str]) -> (CliResult<()>, String) {
        let mut buf = Vec::new();
        let r = run(parse(args), &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_values_parse() {
        let cli = parse(&[
            "field",
            "--grid",
            "-8:8:1601",
            "--tau",
            "-1,1",
            "--q0",
            "-2",
            "--z",
            "-1,-1",
        ]);
        let Command::Field(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.state.grid.as_deref(), Some("-8:8:1601"));
        assert_eq!(args.state.tau.as_deref(), Some("-1,1"));
        assert_eq!(args.state.q0, Some(-2.0));
    }

    #[test]
    fn sigma_conflicts_with_raw() {
        let r = Cli::try_parse_from([
            "freecs",
            "field",
            "--sigma-q",
            "1",
            "--c1",
            "1,0",
            "--c2",
            "0.5,0",
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn moving_packet_peaks() {
        let (r, out) = run_capture(&[
            "field",
            "--sigma-q",
            "0.70710678",
            "--q0",
            "0",
            "--p",
            "2",
            "--tau",
            "0,1",
            "--grid",
            "-8:8:1601",
        ]);
        r.unwrap();
        let mut peaks = [(0.0, 0.0); 2];
        for line in out.lines().skip(1) {
            let c: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let k = if c[0] == 0.0 { 0 } else { 1 };
            if c[4] > peaks[k].1 {
                peaks[k] = (c[1], c[4]);
            }
        }
        assert!(
            peaks[0].0.abs() < 1e-12 && (peaks[0].1 - 0.56419).abs() < 1e-3,
            "{peaks:?}"
        );
        assert!(
            (peaks[1].0 - 2.0).abs() < 1e-12 && (peaks[1].1 - 0.39894).abs() < 1e-3,
            "{peaks:?}"
        );
    }

    #[test]
    fn moments_columns() {
        let (r, out) = run_capture(&["moments", "--tau", "0,0.5,1,1.5,2"]);
        r.unwrap();
        let rows: Vec<Vec<f64>> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert!((r[6] - 0.25).abs() < 1e-12);
        }
        assert!((rows[0][7] - 0.5).abs() < 1e-15);
        assert!((rows[2][3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corrupted_family_is_config_error() {
        let (r, _) = run_capture(&["verify", "--c1", "1,0", "--c2", "1,0"]);
        assert_eq!(r.unwrap_err().exit_code(), 1);
    }

    #[test]
    fn cyclotron_is_marginal() {
        let (r, out) = run_capture(&["classify", "--velocity-ms", "1e3", "--sigma-x-m", "5e-8"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "marginal");
        assert!((v["ratio"].as_f64().unwrap() - 1.16).abs() < 0.01);
    }

    #[test]
    fn particle_at_rest_reports_infinite_ratio() {
        let (r, out) = run_capture(&["classify", "--velocity-ms", "0", "--sigma-x-m", "1e-9"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ratio"], "inf");
        assert_eq!(v["verdict"], "quantum");
    }

    #[test]
    fn dimensional_needs_length() {
        let (r, _) = run_capture(&["field", "--dimensional", "--tau", "0"]);
        assert_eq!(r.unwrap_err().exit_code(), 1);
        let (r, out) = run_capture(&[
            "field",
            "--dimensional",
            "--tau",
            "0",
            "--length-m",
            "1e-9",
            "--grid",
            "-1:1:3",
        ]);
        r.unwrap();
        assert!(out.starts_with("t,x,re,im,density\n0,-1.0000000000000001e-09,"));
    }
}
