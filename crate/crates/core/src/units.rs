//! Quantities with optional unit suffixes (`100mm`, `10Nm`, `14deg`,
//! `144mm2`). Bare numbers are SI, except angles, which are degrees.

use nalgebra::Vector3;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    Torque,
    Angle,
    Area,
}

impl Quantity {
    /// Accepted suffixes and their factor to SI (degrees for angles).
    /// Longer suffixes come first so `mm2` is not read as `m2`.
    fn suffixes(self) -> &'static [(&'static str, f64)] {
        match self {
            Quantity::Length => &[("mm", 1e-3), ("cm", 1e-2), ("m", 1.0)],
            Quantity::Torque => &[("N·mm", 1e-3), ("Nmm", 1e-3), ("N·m", 1.0), ("Nm", 1.0)],
            Quantity::Angle => &[
                ("deg", 1.0),
                ("rad", 180.0 / std::f64::consts::PI),
                ("°", 1.0),
            ],
            Quantity::Area => &[
                ("mm²", 1e-6),
                ("mm2", 1e-6),
                ("cm²", 1e-4),
                ("cm2", 1e-4),
                ("m²", 1.0),
                ("m2", 1.0),
            ],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Quantity::Length => "length",
            Quantity::Torque => "torque",
            Quantity::Angle => "angle",
            Quantity::Area => "area",
        }
    }
}

/// Parses `text` as `kind`, converting to SI (or degrees).
pub fn parse_quantity(text: &str, kind: Quantity) -> Result<f64> {
    let text = text.trim();
    let (number, factor) = kind
        .suffixes()
        .iter()
        .find_map(|&(suffix, factor)| text.strip_suffix(suffix).map(|n| (n.trim_end(), factor)))
        .unwrap_or((text, 1.0));
    let value: f64 = number
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {} '{text}'", kind.name())))?;
    let value = value * factor;
    if !value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{} '{text}' is not finite",
            kind.name()
        )));
    }
    Ok(value)
}

/// Comma-separated point, each component a length with optional unit.
pub fn parse_point(text: &str) -> Result<Vector3<f64>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "expected 3 comma-separated components, got '{text}'"
        )));
    }
    let mut v = Vector3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = parse_quantity(p, Quantity::Length)?;
    }
    Ok(v)
}

/// `lo:hi` (same interval on all axes) or `xlo:xhi,ylo:yhi,zlo:zhi`.
pub fn parse_box(text: &str) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let interval = |s: &str| -> Result<(f64, f64)> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("interval '{s}' must be written lo:hi")))?;
        Ok((
            parse_quantity(lo, Quantity::Length)?,
            parse_quantity(hi, Quantity::Length)?,
        ))
    };
    let parts: Vec<&str> = text.split(',').collect();
    let intervals = match parts.len() {
        1 => {
            let i = interval(parts[0])?;
            [i, i, i]
        }
        3 => [
            interval(parts[0])?,
            interval(parts[1])?,
            interval(parts[2])?,
        ],
        _ => {
            return Err(Error::InvalidInput(format!(
                "box '{text}' needs 1 or 3 intervals"
            )))
        }
    };
    Ok((
        Vector3::from_fn(|i, _| intervals[i].0),
        Vector3::from_fn(|i, _| intervals[i].1),
    ))
}
