//! Spatial force/motion elements and the couple-span test for pure translation.
//!
//! Screws are written as `(angular; linear)` with axes through the tool point.
//! Only the couple subspace is ever rank-tested, so the reference point does
//! not change any result here.

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::mechanism::LegFrame;

/// Tolerance on axis unit norm.
pub const UNIT_TOL: f64 = 1e-9;

/// Relative singular-value cutoff used by [`couple_space_rank`].
pub const RANK_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screw {
    /// Torque (N·m) or angular velocity (rad/s).
    pub angular: Vector3<f64>,
    /// Force (N) or linear velocity (m/s).
    pub linear: Vector3<f64>,
}

impl Screw {
    pub fn new(angular: Vector3<f64>, linear: Vector3<f64>) -> Self {
        Self { angular, linear }
    }

    pub fn is_pure_couple(&self) -> bool {
        self.linear == Vector3::zeros() && self.angular != Vector3::zeros()
    }

    /// Both parts are zero.
    pub fn is_degenerate(&self) -> bool {
        self.linear == Vector3::zeros() && self.angular == Vector3::zeros()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.angular * k, self.linear * k)
    }
}

/// Couples and forces a leg can transmit passively.
#[derive(Debug, Clone, PartialEq)]
pub struct WrenchSystem {
    pub wrenches: Vec<Screw>,
}

impl WrenchSystem {
    pub fn new(wrenches: Vec<Screw>) -> Result<Self> {
        if wrenches.is_empty() {
            return Err(Error::InvalidInput(
                "wrench system must not be empty".into(),
            ));
        }
        Ok(Self { wrenches })
    }

    /// Angular parts of the pure couples in this system.
    pub fn couple_axes(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.wrenches
            .iter()
            .filter(|w| w.linear == Vector3::zeros())
            .map(|w| w.angular)
    }
}

fn check_unit(v: &Vector3<f64>, what: &str) -> Result<()> {
    if !v.iter().all(|c| c.is_finite()) || (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} must be a unit vector, got norm {}",
            v.norm()
        )));
    }
    Ok(())
}

/// A couple of `magnitude` N·m about `axis`. A zero magnitude gives a
/// degenerate screw.
pub fn pure_couple(axis: Vector3<f64>, magnitude: f64) -> Result<Screw> {
    check_unit(&axis, "couple axis")?;
    if !magnitude.is_finite() {
        return Err(Error::InvalidInput(
            "couple magnitude must be finite".into(),
        ));
    }
    Ok(Screw::new(axis * magnitude, Vector3::zeros()))
}

/// Two unit couples for one leg: about the rail axis `T`, and about the
/// normal of the plane spanned by `T` and the transverse axis `U`.
pub fn leg_wrench_system(frame: &LegFrame) -> Result<WrenchSystem> {
    check_unit(&frame.rail, "rail axis")?;
    check_unit(&frame.transverse, "transverse axis")?;
    let normal = frame.rail.cross(&frame.transverse);
    let n = normal.norm();
    if n < UNIT_TOL {
        return Err(Error::DegenerateFrame);
    }
    WrenchSystem::new(vec![
        pure_couple(frame.rail, 1.0)?,
        pure_couple(normal / n, 1.0)?,
    ])
}

/// Dimension of the span of every couple in `systems` (0..=3).
pub fn couple_space_rank(systems: &[WrenchSystem]) -> usize {
    let rows: Vec<Vector3<f64>> = systems.iter().flat_map(|s| s.couple_axes()).collect();
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    let sv = m.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > smax * RANK_RTOL).count()
}

/// True when the union of the legs' couples constrains every rotation.
pub fn is_pure_translational(systems: &[WrenchSystem]) -> bool {
    couple_space_rank(systems) == 3
}
