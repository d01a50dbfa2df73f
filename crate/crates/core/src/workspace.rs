//! Grid sampling of a Cartesian box with per-pose kinetostatic, singularity
//! and statics records, plus summary extremes and CSV export.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{map_indices, CartesianBox, Execution, Grid};
use crate::kinematics::{inverse_kinematics, velocity_jacobian, JacobianPair};
use crate::kinetostatics::{amplification_factors, singular_values};
use crate::magnitude::Magnitude;
use crate::mechanism::{OrthoglideGeometry, ToolPose};
use crate::singularity::{classify_configuration, parallelogram_angles};
use crate::statics::{bar_force, bar_stress, ParallelogramLoad};

/// Header of the workspace CSV, in column order.
pub const CSV_HEADER: [&str; 19] = [
    "px",
    "py",
    "pz",
    "reachable",
    "rho1",
    "rho2",
    "rho3",
    "kappa",
    "v_min",
    "v_max",
    "alpha1",
    "alpha2",
    "alpha3",
    "Fb1",
    "Fb2",
    "Fb3",
    "serial_flag",
    "parallel_flag",
    "pgram_flag",
];

/// Slack (degrees) when comparing the observed distortion with `alpha_max`.
pub const ALPHA_FEASIBILITY_TOL_DEG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleAnalysis {
    pub rho: Vector3<f64>,
    pub kappa: Magnitude,
    pub v_min: Magnitude,
    pub v_max: Magnitude,
    pub alpha_deg: [f64; 3],
    pub bar_force: [Magnitude; 3],
    pub serial: bool,
    pub parallel: bool,
    pub parallelogram: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkspaceSample {
    pub position: Vector3<f64>,
    /// `None` for unreachable poses.
    pub analysis: Option<SampleAnalysis>,
}

impl WorkspaceSample {
    pub fn reachable(&self) -> bool {
        self.analysis.is_some()
    }
}

fn ascending_extremes(m: &Matrix3<f64>) -> (Magnitude, Magnitude) {
    let sv = singular_values(m);
    (Magnitude::Finite(sv[2]), Magnitude::from_f64(sv[0]))
}

/// Analyzes one pose. Unreachable poses yield a record without analysis.
pub fn sample_pose(
    geom: &OrthoglideGeometry,
    position: Vector3<f64>,
    load_c: f64,
) -> WorkspaceSample {
    let pose = ToolPose::from(position);
    let analysis = analyze_pose(geom, &pose, load_c).ok();
    WorkspaceSample { position, analysis }
}

fn analyze_pose(geom: &OrthoglideGeometry, pose: &ToolPose, load_c: f64) -> Result<SampleAnalysis> {
    let joints = inverse_kinematics(geom, pose)?;
    let report = classify_configuration(geom, pose)?;
    let alpha_deg = parallelogram_angles(geom, pose)?;

    let serial = !report.serial_legs.is_empty();
    let (v_min, v_max) = if !serial {
        let bars = crate::kinematics::bar_directions_at(geom, pose, &joints);
        let rows: [Vector3<f64>; 3] =
            std::array::from_fn(|i| bars[i] / bars[i].dot(&geom.rail_axes[i]));
        let jac = JacobianPair::from_inverse(Matrix3::from_rows(&rows.map(|r| r.transpose())));
        let v = amplification_factors(&jac).velocity;
        (v[0], v[2])
    } else {
        match velocity_jacobian(geom, pose)? {
            Some(j) => ascending_extremes(&j),
            None => (Magnitude::Finite(0.0), Magnitude::Infinite),
        }
    };

    let bar_force = alpha_deg.map(|alpha| {
        let load = ParallelogramLoad {
            couple: load_c,
            alpha_deg: alpha,
            width: geom.parallelogram_width,
            section: geom.bar_section,
        };
        bar_force(&load).map_or(Magnitude::Infinite, |r| Magnitude::Finite(r.bar_force))
    });

    Ok(SampleAnalysis {
        rho: joints.rho,
        kappa: report.kappa,
        v_min,
        v_max,
        alpha_deg,
        bar_force,
        serial,
        parallel: report.parallel_singular,
        parallelogram: !report.parallelogram_singular_legs.is_empty(),
    })
}

/// `n³` samples in lexicographic grid order (x slowest), with couple
/// `load_c` (N·m) applied to each parallelogram independently.
pub fn sample_box(
    geom: &OrthoglideGeometry,
    bounds: &CartesianBox,
    n: usize,
    load_c: f64,
) -> Result<Vec<WorkspaceSample>> {
    sample_box_with(geom, bounds, n, load_c, Execution::default())
}

pub fn sample_box_sequential(
    geom: &OrthoglideGeometry,
    bounds: &CartesianBox,
    n: usize,
    load_c: f64,
) -> Result<Vec<WorkspaceSample>> {
    sample_box_with(geom, bounds, n, load_c, Execution::Sequential)
}

pub fn sample_box_with(
    geom: &OrthoglideGeometry,
    bounds: &CartesianBox,
    n: usize,
    load_c: f64,
    exec: Execution,
) -> Result<Vec<WorkspaceSample>> {
    if !(load_c.is_finite() && load_c >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "couple must be non-negative, got {load_c}"
        )));
    }
    let grid = Grid::new(*bounds, n)?;
    Ok(map_indices(grid.len(), exec, |idx| {
        sample_pose(geom, grid.point(idx), load_c)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkspaceSummary {
    pub samples: usize,
    pub reachable: usize,
    pub reachable_fraction: f64,
    pub kappa_max: Magnitude,
    pub v_amp_min: Magnitude,
    pub v_amp_max: Magnitude,
    pub alpha_max_observed_deg: f64,
    pub bar_force_max: Magnitude,
    pub sigma_max: Magnitude,
    /// `alpha_max_observed_deg` does not exceed the geometry's `alpha_max`.
    pub alpha_feasible: bool,
}

/// Extremes over the reachable samples.
pub fn summarize(
    geom: &OrthoglideGeometry,
    samples: &[WorkspaceSample],
) -> Result<WorkspaceSummary> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples to summarize".into()));
    }
    let reachable: Vec<&SampleAnalysis> =
        samples.iter().filter_map(|s| s.analysis.as_ref()).collect();
    let Some(first) = reachable.first() else {
        return Err(Error::EmptyWorkspace);
    };
    let mut kappa_max = first.kappa;
    let mut v_amp_min = first.v_min;
    let mut v_amp_max = first.v_max;
    let mut alpha_max = 0.0_f64;
    let mut force_max = Magnitude::Finite(0.0);
    for a in &reachable {
        kappa_max = kappa_max.max(a.kappa);
        v_amp_min = v_amp_min.min(a.v_min);
        v_amp_max = v_amp_max.max(a.v_max);
        alpha_max = a.alpha_deg.iter().fold(alpha_max, |m, &x| m.max(x));
        force_max = a.bar_force.iter().fold(force_max, |m, &f| m.max(f));
    }
    let sigma_max = match force_max {
        Magnitude::Finite(f) => Magnitude::Finite(bar_stress(f, geom.bar_section)?),
        Magnitude::Infinite => Magnitude::Infinite,
    };
    Ok(WorkspaceSummary {
        samples: samples.len(),
        reachable: reachable.len(),
        reachable_fraction: reachable.len() as f64 / samples.len() as f64,
        kappa_max,
        v_amp_min,
        v_amp_max,
        alpha_max_observed_deg: alpha_max,
        bar_force_max: force_max,
        sigma_max,
        alpha_feasible: alpha_max <= geom.alpha_max_deg + ALPHA_FEASIBILITY_TOL_DEG,
    })
}

/// Formats `x` with 9 significant digits, trimming trailing zeros.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_mag(m: Magnitude) -> String {
    match m {
        Magnitude::Finite(v) => format_sig9(v),
        Magnitude::Infinite => "inf".into(),
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

/// One CSV row per sample, header first.
pub fn write_csv<W: Write>(samples: &[WorkspaceSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for s in samples {
        let mut row: Vec<String> = s.position.iter().map(|&v| format_sig9(v)).collect();
        match &s.analysis {
            None => {
                row.push(flag(false));
                row.extend(std::iter::repeat_n(String::new(), CSV_HEADER.len() - 4));
            }
            Some(a) => {
                row.push(flag(true));
                row.extend(a.rho.iter().map(|&v| format_sig9(v)));
                row.push(fmt_mag(a.kappa));
                row.push(fmt_mag(a.v_min));
                row.push(fmt_mag(a.v_max));
                row.extend(a.alpha_deg.iter().map(|&v| format_sig9(v)));
                row.extend(a.bar_force.iter().map(|&f| fmt_mag(f)));
                row.push(flag(a.serial));
                row.push(flag(a.parallel));
                row.push(flag(a.parallelogram));
            }
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
