//! Geometric description of the Orthoglide and of the planar biglide fixture.
//!
//! The platform is reduced to the tool point `P`. Leg `i` slides along the
//! rail axis `e_i` to the foot point `rho_i * e_i` and a bar of length `L`
//! joins the foot point to `P`, so every pose satisfies
//! `|P - rho_i e_i| = L`. With rails along the global axes the isotropic
//! configuration is `P = 0`, `rho = (L, L, L)`.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on unit norms and rail orthogonality.
pub const AXIS_TOL: f64 = 1e-9;

/// Relative tolerance on the leg length constraint accepted by [`leg_frames`].
pub const LEG_CONSTRAINT_RTOL: f64 = 1e-6;

/// Leg architectures considered during the design of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegVariant {
    /// Original star-leg arrangement: at the isotropic pose the bars fold
    /// onto the coupler and the parallelogram degenerates.
    #[serde(rename = "V1_STAR")]
    V1Star,
    /// Rearranged joints: parallelogram is fine but the leg can spin about
    /// its rail when the bar is collinear with it.
    #[serde(rename = "V2_INTERMEDIATE")]
    V2Intermediate,
    /// Final Orthoglide legs.
    #[serde(rename = "V3_ORTHOGLIDE")]
    V3Orthoglide,
}

impl LegVariant {
    pub fn label(&self) -> &'static str {
        match self {
            LegVariant::V1Star => "V1_STAR",
            LegVariant::V2Intermediate => "V2_INTERMEDIATE",
            LegVariant::V3Orthoglide => "V3_ORTHOGLIDE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointLimit {
    pub lo: f64,
    pub hi: f64,
}

impl JointLimit {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoglideGeometry {
    /// Bar length `L` (m).
    pub bar_length: f64,
    /// Actuated rail directions `e_1, e_2, e_3`.
    pub rail_axes: [Vector3<f64>; 3],
    /// Distance between the two bars of a parallelogram (m).
    pub parallelogram_width: f64,
    /// Cross-section of one bar (m²).
    pub bar_section: f64,
    pub leg_variant: LegVariant,
    pub joint_limits: [JointLimit; 3],
    /// Largest acceptable parallelogram distortion (degrees).
    pub alpha_max_deg: f64,
    /// Replaces the variant's transverse axes. Used to build deliberately
    /// degenerate fixtures; never set by config loading.
    pub transverse_override: Option<[Vector3<f64>; 3]>,
}

impl Default for OrthoglideGeometry {
    fn default() -> Self {
        default_orthoglide()
    }
}

/// Reference machine: `L = 1 m`, rails along x/y/z, `d = 100 mm`,
/// `S = 144 mm²`, final leg design, `alpha_max = 14°`, joints in `[0, 2L]`.
pub fn default_orthoglide() -> OrthoglideGeometry {
    let l = 1.0;
    OrthoglideGeometry {
        bar_length: l,
        rail_axes: [Vector3::x(), Vector3::y(), Vector3::z()],
        parallelogram_width: 0.1,
        bar_section: 1.44e-4,
        leg_variant: LegVariant::V3Orthoglide,
        joint_limits: [JointLimit {
            lo: 0.0,
            hi: 2.0 * l,
        }; 3],
        alpha_max_deg: 14.0,
        transverse_override: None,
    }
}

impl OrthoglideGeometry {
    pub fn with_variant(mut self, variant: LegVariant) -> Self {
        self.leg_variant = variant;
        self
    }

    pub fn with_transverse_axes(mut self, axes: [Vector3<f64>; 3]) -> Self {
        self.transverse_override = Some(axes);
        self
    }

    /// Transverse (coupler) axis `U_i` of each parallelogram.
    ///
    /// V1 puts the coupler along its own rail; V2 and V3 use the next rail
    /// (`U_1 = e_2, U_2 = e_3, U_3 = e_1`) so the three parallelogram planes
    /// are mutually orthogonal.
    pub fn transverse_axes(&self) -> [Vector3<f64>; 3] {
        if let Some(axes) = self.transverse_override {
            return axes;
        }
        let e = &self.rail_axes;
        match self.leg_variant {
            LegVariant::V1Star => [e[0], e[1], e[2]],
            LegVariant::V2Intermediate | LegVariant::V3Orthoglide => [e[1], e[2], e[0]],
        }
    }

    pub fn isotropic_pose(&self) -> ToolPose {
        ToolPose::origin()
    }

    pub fn isotropic_joints(&self) -> JointVector {
        JointVector::new(Vector3::repeat(self.bar_length))
    }

    /// Checks every geometric invariant.
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive(self.bar_length, "bar length")?;
        positive(self.parallelogram_width, "parallelogram width")?;
        positive(self.bar_section, "bar section")?;
        if !(self.alpha_max_deg > 0.0 && self.alpha_max_deg < 90.0) {
            return Err(Error::Config(format!(
                "alpha_max must lie in (0, 90) deg, got {}",
                self.alpha_max_deg
            )));
        }
        for (i, a) in self.rail_axes.iter().enumerate() {
            if (a.norm() - 1.0).abs() > AXIS_TOL {
                return Err(Error::Config(format!(
                    "rail axis {} is not unit length",
                    i + 1
                )));
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if self.rail_axes[i].dot(&self.rail_axes[j]).abs() > AXIS_TOL {
                    return Err(Error::Config(format!(
                        "rail axes {} and {} are not orthogonal",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (i, lim) in self.joint_limits.iter().enumerate() {
            if !(lim.lo.is_finite() && lim.hi.is_finite() && lim.lo < lim.hi) {
                return Err(Error::Config(format!(
                    "joint limit {} must satisfy lo < hi",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Parses a JSON geometry file body. Missing keys keep their default.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: GeometryConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.into_geometry()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// On-disk geometry description.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryConfig {
    bar_length_m: Option<f64>,
    parallelogram_width_m: Option<f64>,
    bar_section_m2: Option<f64>,
    leg_variant: Option<LegVariant>,
    alpha_max_deg: Option<f64>,
    joint_limits_m: Option<Vec<[f64; 2]>>,
}

impl GeometryConfig {
    fn into_geometry(self) -> Result<OrthoglideGeometry> {
        let mut g = default_orthoglide();
        if let Some(l) = self.bar_length_m {
            g.bar_length = l;
            g.joint_limits = [JointLimit {
                lo: 0.0,
                hi: 2.0 * l,
            }; 3];
        }
        if let Some(d) = self.parallelogram_width_m {
            g.parallelogram_width = d;
        }
        if let Some(s) = self.bar_section_m2 {
            g.bar_section = s;
        }
        if let Some(v) = self.leg_variant {
            g.leg_variant = v;
        }
        if let Some(a) = self.alpha_max_deg {
            g.alpha_max_deg = a;
        }
        if let Some(limits) = self.joint_limits_m {
            if limits.len() != 3 {
                return Err(Error::Config(format!(
                    "joint_limits_m needs 3 [lo, hi] pairs, got {}",
                    limits.len()
                )));
            }
            for (dst, [lo, hi]) in g.joint_limits.iter_mut().zip(limits) {
                *dst = JointLimit { lo, hi };
            }
        }
        g.validate()?;
        Ok(g)
    }
}

/// Position of the tool point `P` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToolPose {
    pub position: Vector3<f64>,
}

impl ToolPose {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self {
            position: Vector3::new(x, y, z),
        }
    }

    pub fn origin() -> Self {
        Self {
            position: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite())
    }
}

impl From<Vector3<f64>> for ToolPose {
    fn from(position: Vector3<f64>) -> Self {
        Self { position }
    }
}

/// Actuated prismatic coordinates `rho` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointVector {
    pub rho: Vector3<f64>,
}

impl JointVector {
    pub fn new(rho: Vector3<f64>) -> Self {
        Self { rho }
    }

    /// 1-based indices of joints outside their limits.
    pub fn limit_violations(&self, geom: &OrthoglideGeometry) -> Vec<usize> {
        (0..3)
            .filter(|&i| !geom.joint_limits[i].contains(self.rho[i]))
            .map(|i| i + 1)
            .collect()
    }
}

/// Per-leg direction set at one pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegFrame {
    /// Rail axis `T_i`.
    pub rail: Vector3<f64>,
    /// Parallelogram transverse axis `U_i`.
    pub transverse: Vector3<f64>,
    /// Bar direction `W_i`, from the foot point toward `P`.
    pub bar: Vector3<f64>,
    /// Normal `S_i` to the parallelogram plane spanned by `W_i` and `U_i`.
    pub plane_normal: Vector3<f64>,
    /// Bar attachment point `B_i` on the coupler (m).
    pub attachment: Vector3<f64>,
}

fn any_perpendicular(v: &Vector3<f64>) -> Vector3<f64> {
    let i = v.iamin();
    let mut other = Vector3::zeros();
    other[i] = 1.0;
    v.cross(&other).normalize()
}

/// Builds the three leg frames for a pose/joint pair that satisfies the leg
/// constraints.
///
/// When `W_i` and `U_i` are parallel (folded parallelogram) the plane normal
/// falls back to `T_i × U_i`, and to an arbitrary perpendicular of `U_i` if
/// that is also degenerate.
pub fn leg_frames(
    geom: &OrthoglideGeometry,
    pose: &ToolPose,
    joints: &JointVector,
) -> Result<[LegFrame; 3]> {
    let l = geom.bar_length;
    let transverse = geom.transverse_axes();
    let mut frames = [LegFrame {
        rail: Vector3::zeros(),
        transverse: Vector3::zeros(),
        bar: Vector3::zeros(),
        plane_normal: Vector3::zeros(),
        attachment: Vector3::zeros(),
    }; 3];
    for i in 0..3 {
        let e = geom.rail_axes[i];
        let leg = pose.position - e * joints.rho[i];
        let residual = leg.norm() - l;
        if !residual.is_finite() || residual.abs() > LEG_CONSTRAINT_RTOL * l {
            return Err(Error::InconsistentConfiguration {
                leg: i + 1,
                residual,
            });
        }
        let w = leg / l;
        let u = transverse[i];
        let n = w.cross(&u);
        let s = if n.norm() > 1e-12 {
            n.normalize()
        } else {
            let alt = e.cross(&u);
            if alt.norm() > 1e-12 {
                alt.normalize()
            } else {
                any_perpendicular(&u)
            }
        };
        frames[i] = LegFrame {
            rail: e,
            transverse: u,
            bar: w,
            plane_normal: s,
            attachment: pose.position + u * (geom.parallelogram_width / 2.0),
        };
    }
    Ok(frames)
}

/// Planar 2-PRR mechanism: two sliders on one rail joined to the tool by
/// struts of length `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiglideGeometry {
    pub strut_length: f64,
    pub rail_axis: Vector3<f64>,
}

impl BiglideGeometry {
    pub fn new(strut_length: f64) -> Result<Self> {
        if !(strut_length.is_finite() && strut_length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "strut length must be positive, got {strut_length}"
            )));
        }
        Ok(Self {
            strut_length,
            rail_axis: Vector3::x(),
        })
    }
}

impl Default for BiglideGeometry {
    fn default() -> Self {
        Self {
            strut_length: 1.0,
            rail_axis: Vector3::x(),
        }
    }
}
