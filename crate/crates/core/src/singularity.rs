//! Configuration classification: serial, parallel and parallelogram
//! singularities, leg-variant degeneracies, constraint singularities, and the
//! biglide fixture.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{map_indices, CartesianBox, Execution, Grid};
use crate::kinematics::{
    bar_directions_at, bar_matrix_min_singular, biglide_vertical_amplification, inverse_kinematics,
    JacobianPair,
};
use crate::kinetostatics::conditioning_index;
use crate::magnitude::Magnitude;
use crate::mechanism::{
    leg_frames, BiglideGeometry, LegFrame, LegVariant, OrthoglideGeometry, ToolPose,
};
use crate::screw::{couple_space_rank, leg_wrench_system, WrenchSystem};

pub const SERIAL_THRESHOLD: f64 = 1e-9;
pub const PARALLEL_THRESHOLD: f64 = 1e-9;
/// Distance from 90° (degrees) at which a parallelogram counts as folded.
pub const PARALLELOGRAM_THRESHOLD_DEG: f64 = 1e-9;
/// `|W_i · T_i| > 1 - RPM_THRESHOLD` means bar and rail are collinear.
pub const RPM_THRESHOLD: f64 = 1e-9;
/// Angular tolerance (degrees) for the biglide limit configurations.
pub const BIGLIDE_TOL_DEG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VariantLabel {
    #[serde(rename = "ANTIPARALLELOGRAM")]
    Antiparallelogram,
    #[serde(rename = "RPM_IO_II")]
    RpmIoIi,
    #[serde(rename = "NONE")]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantFinding {
    pub label: VariantLabel,
    /// 1-based leg number.
    pub leg: usize,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub serial_legs: Vec<usize>,
    pub parallel_singular: bool,
    pub parallelogram_singular_legs: Vec<usize>,
    /// Empty when the leg architecture shows no degeneracy.
    pub variant_findings: Vec<VariantFinding>,
    pub kappa: Magnitude,
}

impl SingularityReport {
    pub fn is_regular(&self) -> bool {
        self.serial_legs.is_empty()
            && !self.parallel_singular
            && self.parallelogram_singular_legs.is_empty()
            && self.variant_findings.is_empty()
    }

    /// Label summarizing the variant findings; `NONE` when there are none.
    pub fn variant_label(&self) -> VariantLabel {
        self.variant_findings
            .first()
            .map_or(VariantLabel::None, |f| f.label)
    }

    pub fn has_label(&self, label: VariantLabel) -> bool {
        self.variant_findings.iter().any(|f| f.label == label)
    }
}

/// Distortion of a parallelogram: the angle between the bar direction and
/// the normal to the coupler axis, measured in the parallelogram plane.
/// 0° for the rectangle, 90° when the bars fold onto the coupler.
pub fn frame_parallelogram_angle(frame: &LegFrame) -> f64 {
    let along = frame.bar.dot(&frame.transverse).abs();
    let across = frame.bar.cross(&frame.transverse).norm();
    along.atan2(across).to_degrees()
}

/// [`frame_parallelogram_angle`] for leg `leg` (1-based) at `pose`.
pub fn parallelogram_angle(geom: &OrthoglideGeometry, pose: &ToolPose, leg: usize) -> Result<f64> {
    if !(1..=3).contains(&leg) {
        return Err(Error::InvalidInput(format!(
            "leg must be 1, 2 or 3, got {leg}"
        )));
    }
    Ok(parallelogram_angles(geom, pose)?[leg - 1])
}

pub fn parallelogram_angles(geom: &OrthoglideGeometry, pose: &ToolPose) -> Result<[f64; 3]> {
    let joints = inverse_kinematics(geom, pose)?;
    let frames = leg_frames(geom, pose, &joints)?;
    Ok(frames.map(|f| frame_parallelogram_angle(&f)))
}

fn variant_findings(
    variant: LegVariant,
    frames: &[LegFrame; 3],
    folded: &[usize],
) -> Vec<VariantFinding> {
    match variant {
        LegVariant::V1Star => folded
            .iter()
            .map(|&leg| VariantFinding {
                label: VariantLabel::Antiparallelogram,
                leg,
                description:
                    "bars fold onto the coupler; passive rotation about the parallelogram normal"
                        .into(),
            })
            .collect(),
        LegVariant::V2Intermediate => (0..3)
            .filter(|&i| frames[i].bar.dot(&frames[i].rail).abs() > 1.0 - RPM_THRESHOLD)
            .map(|i| VariantFinding {
                label: VariantLabel::RpmIoIi,
                leg: i + 1,
                description: "bar collinear with rail: redundant passive rotation about the rail, \
                              impossible output and impossible input"
                    .into(),
            })
            .collect(),
        LegVariant::V3Orthoglide => Vec::new(),
    }
}

/// Full singularity picture at a reachable pose.
pub fn classify_configuration(
    geom: &OrthoglideGeometry,
    pose: &ToolPose,
) -> Result<SingularityReport> {
    let joints = inverse_kinematics(geom, pose)?;
    let frames = leg_frames(geom, pose, &joints)?;
    let bars = bar_directions_at(geom, pose, &joints);

    let serial_legs: Vec<usize> = (0..3)
        .filter(|&i| bars[i].dot(&geom.rail_axes[i]).abs() < SERIAL_THRESHOLD)
        .map(|i| i + 1)
        .collect();
    let parallel_singular = bar_matrix_min_singular(&bars) < PARALLEL_THRESHOLD;
    let parallelogram_singular_legs: Vec<usize> = (0..3)
        .filter(|&i| (90.0 - frame_parallelogram_angle(&frames[i])) < PARALLELOGRAM_THRESHOLD_DEG)
        .map(|i| i + 1)
        .collect();
    let variant_findings =
        variant_findings(geom.leg_variant, &frames, &parallelogram_singular_legs);

    let kappa = if parallel_singular || !serial_legs.is_empty() {
        Magnitude::Infinite
    } else {
        let rows: [Vector3<f64>; 3] =
            std::array::from_fn(|i| bars[i] / bars[i].dot(&geom.rail_axes[i]));
        let inverse = nalgebra::Matrix3::from_rows(&rows.map(|r| r.transpose()));
        conditioning_index(&JacobianPair::from_inverse(inverse))
    };

    Ok(SingularityReport {
        serial_legs,
        parallel_singular,
        parallelogram_singular_legs,
        variant_findings,
        kappa,
    })
}

/// Wrench systems of the three legs; legs with a degenerate frame contribute
/// nothing.
pub fn leg_wrench_systems(frames: &[LegFrame; 3]) -> Vec<WrenchSystem> {
    frames
        .iter()
        .filter_map(|f| leg_wrench_system(f).ok())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintFinding {
    pub position: Vector3<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintScan {
    /// Poses where the legs' couples span less than 3 dimensions, in grid order.
    pub findings: Vec<ConstraintFinding>,
    /// Number of reachable poses examined.
    pub samples_scanned: usize,
}

impl ConstraintScan {
    pub fn warning(&self) -> Option<&'static str> {
        (self.samples_scanned == 0).then_some("no reachable samples in the scanned box")
    }
}

/// Scans a grid for constraint singularities (couple-space rank below 3).
pub fn constraint_singularity_scan(
    geom: &OrthoglideGeometry,
    bounds: &CartesianBox,
    n: usize,
) -> Result<ConstraintScan> {
    constraint_singularity_scan_with(geom, bounds, n, Execution::default())
}

pub fn constraint_singularity_scan_with(
    geom: &OrthoglideGeometry,
    bounds: &CartesianBox,
    n: usize,
    exec: Execution,
) -> Result<ConstraintScan> {
    let grid = Grid::new(*bounds, n)?;
    let ranks = map_indices(grid.len(), exec, |idx| {
        let pose = ToolPose::from(grid.point(idx));
        let joints = inverse_kinematics(geom, &pose).ok()?;
        let frames = leg_frames(geom, &pose, &joints).ok()?;
        Some((
            pose.position,
            couple_space_rank(&leg_wrench_systems(&frames)),
        ))
    });
    let samples_scanned = ranks.iter().flatten().count();
    let findings = ranks
        .into_iter()
        .flatten()
        .filter(|&(_, rank)| rank < 3)
        .map(|(position, rank)| ConstraintFinding { position, rank })
        .collect();
    Ok(ConstraintScan {
        findings,
        samples_scanned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BiglideClass {
    #[serde(rename = "REGULAR")]
    Regular,
    #[serde(rename = "SERIAL")]
    Serial,
    #[serde(rename = "PARALLEL")]
    Parallel,
}

/// Symmetric biglide with struts at `theta_deg` from the rail.
///
/// Struts perpendicular to the rail lose all vertical velocity (serial);
/// struts along the rail have unbounded vertical amplification (parallel).
pub fn biglide_classify(_geom: &BiglideGeometry, theta_deg: f64) -> Result<BiglideClass> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::InvalidInput(format!(
            "theta must lie in [0, 90] deg, got {theta_deg}"
        )));
    }
    Ok(if (theta_deg - 90.0).abs() < BIGLIDE_TOL_DEG {
        BiglideClass::Serial
    } else if theta_deg < BIGLIDE_TOL_DEG {
        BiglideClass::Parallel
    } else {
        BiglideClass::Regular
    })
}

/// Vertical amplification paired with the classification.
pub fn biglide_report(geom: &BiglideGeometry, theta_deg: f64) -> Result<(BiglideClass, Magnitude)> {
    let class = biglide_classify(geom, theta_deg)?;
    Ok((class, biglide_vertical_amplification(theta_deg)))
}
