//! CSV and JSON writers with fixed, locale-independent float formatting.

use std::io::{self, Write};

use freecs_core::analytic::{Moments, WaveField};
use freecs_core::units::UnitSystem;
use freecs_core::{CsLabel, Grid};
use serde::Serialize;

use crate::config::{FamilySpec, GridSpec};

/// Formats like C's `%.17g`: 17 significant digits, the shorter of fixed and
/// exponent notation, trailing zeros removed. Round-trips every `f64`.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, v);
        strip_zeros(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(out: &mut (impl Write + ?Sized), values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&v| fmt_g17(v)).collect();
    writeln!(out, "{}", cells.join(","))
}

pub const FIELD_HEADER: &str = "q,re,im,density";
pub const LONG_FIELD_HEADER: &str = "tau,q,re,im,density";
pub const DIMENSIONAL_HEADER: &str = "t,x,re,im,density";

/// `q,re,im,density` rows.
pub fn write_field(out: &mut (impl Write + ?Sized), field: &WaveField) -> io::Result<()> {
    writeln!(out, "{FIELD_HEADER}")?;
    for (q, psi) in field.iter() {
        row(out, &[q, psi.re, psi.im, psi.norm_sqr()])?;
    }
    Ok(())
}

/// One table for all fields, `tau` first, fields in the given order.
pub fn write_long(out: &mut (impl Write + ?Sized), fields: &[WaveField]) -> io::Result<()> {
    writeln!(out, "{LONG_FIELD_HEADER}")?;
    for field in fields {
        for (q, psi) in field.iter() {
            row(out, &[field.tau(), q, psi.re, psi.im, psi.norm_sqr()])?;
        }
    }
    Ok(())
}

/// Long format in SI units: `t` in seconds, `x` in metres, `psi` in m^-1/2.
pub fn write_long_dimensional(
    out: &mut (impl Write + ?Sized),
    fields: &[WaveField],
    units: &UnitSystem,
) -> io::Result<()> {
    writeln!(out, "{DIMENSIONAL_HEADER}")?;
    for field in fields {
        let t = field.tau() * units.time_scale();
        for (q, psi) in field.iter() {
            let psi = units.wavefunction_to_dimensional(psi);
            row(
                out,
                &[t, q * units.length(), psi.re, psi.im, psi.norm_sqr()],
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TauMeta {
    One(f64),
    Many(Vec<f64>),
}

/// Sidecar metadata `{tau, family, z, grid}` written next to a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMeta {
    pub tau: TauMeta,
    pub family: FamilySpec,
    pub z: [f64; 2],
    pub grid: GridMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    pub spec: GridSpec,
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
    pub spacing: f64,
}

impl GridMeta {
    pub fn new(spec: GridSpec, grid: &Grid) -> Self {
        Self {
            spec,
            q_min: grid.q_min(),
            q_max: grid.q_max(),
            n_points: grid.len(),
            spacing: grid.spacing(),
        }
    }
}

impl FieldMeta {
    pub fn new(tau: TauMeta, family: FamilySpec, label: &CsLabel, grid: GridMeta) -> Self {
        Self {
            tau,
            family,
            z: [label.z().re, label.z().im],
            grid,
        }
    }
}

pub const MOMENTS_HEADER: &str = "tau,mean_q,mean_p,sigma_q,sigma_p,sigma_qp,rs_product,heisenberg";
pub const ORACLE_COLUMNS: &str =
    "quad_mean_q,quad_mean_p,quad_sigma_q,quad_sigma_p,quad_sigma_qp,max_abs_diff";

/// One moments row; `oracle` adds the quadrature values and the largest
/// discrepancy.
pub struct MomentsRow {
    pub tau: f64,
    pub analytic: Moments,
    pub rs_product: f64,
    pub heisenberg: f64,
    pub oracle: Option<Moments>,
}

pub fn write_moments(
    out: &mut (impl Write + ?Sized),
    rows: &[MomentsRow],
    with_oracle: bool,
) -> io::Result<()> {
    if with_oracle {
        writeln!(out, "{MOMENTS_HEADER},{ORACLE_COLUMNS}")?;
    } else {
        writeln!(out, "{MOMENTS_HEADER}")?;
    }
    for r in rows {
        let m = &r.analytic;
        let mut values = vec![
            r.tau,
            m.mean_q,
            m.mean_p,
            m.sigma_q,
            m.sigma_p,
            m.sigma_qp,
            r.rs_product,
            r.heisenberg,
        ];
        if with_oracle {
            let o = r.oracle.as_ref().expect("oracle moments requested");
            values.extend([
                o.mean_q,
                o.mean_p,
                o.sigma_q,
                o.sigma_p,
                o.sigma_qp,
                m.max_abs_diff(o),
            ]);
        }
        row(out, &values)?;
    }
    Ok(())
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`,
/// which plain JSON numbers cannot carry.
pub fn json_float<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_g17(*v))
    }
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(out: &mut (impl Write + ?Sized), value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
