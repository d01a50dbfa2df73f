//! Bar forces in a parallelogram loaded by a couple normal to its plane.
//!
//! With bars `d` apart, distorted by `alpha` from the rectangle, moment
//! balance of the coupler gives `2 (F_b cos α)(d / 2) = C`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Distortion angles at or beyond `90° - ALPHA_SINGULAR_TOL_DEG` are singular.
pub const ALPHA_SINGULAR_TOL_DEG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelogramLoad {
    /// Couple about the plane normal (N·m).
    pub couple: f64,
    /// Distortion angle (degrees).
    pub alpha_deg: f64,
    /// Bar separation (m).
    pub width: f64,
    /// Bar cross-section (m²).
    pub section: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticsResult {
    /// Tension/compression in each bar (N).
    pub bar_force: f64,
    /// Tensile stress (Pa).
    pub stress: f64,
    pub balanced: bool,
}

pub fn static_balance_check(alpha_deg: f64) -> bool {
    alpha_deg < 90.0 - ALPHA_SINGULAR_TOL_DEG
}

pub fn bar_stress(force: f64, section: f64) -> Result<f64> {
    if !(section.is_finite() && section > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bar section must be positive, got {section}"
        )));
    }
    Ok(force / section)
}

pub fn bar_force(load: &ParallelogramLoad) -> Result<StaticsResult> {
    let ParallelogramLoad {
        couple,
        alpha_deg,
        width,
        section,
    } = *load;
    if !(couple.is_finite() && couple >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "couple must be non-negative, got {couple}"
        )));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidInput(format!(
            "parallelogram width must be positive, got {width}"
        )));
    }
    if !(alpha_deg.is_finite() && alpha_deg >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in [0, 90) deg, got {alpha_deg}"
        )));
    }
    if !static_balance_check(alpha_deg) {
        return Err(Error::ParallelogramSingularity { alpha_deg });
    }
    let force = couple / (width * alpha_deg.to_radians().cos());
    let stress = bar_stress(force, section)?;
    Ok(StaticsResult {
        bar_force: force,
        stress,
        balanced: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn load(couple: f64, alpha_deg: f64) -> ParallelogramLoad {
        ParallelogramLoad {
            couple,
            alpha_deg,
            width: 0.1,
            section: 1.44e-4,
        }
    }

    #[test]
    fn reference_machine_force() {
        let r = bar_force(&load(10.0, 14.0)).unwrap();
        assert!((r.bar_force - 103.0).abs() < 0.5, "{}", r.bar_force);
        assert!((r.stress - 0.715e6).abs() < 0.02e6, "{}", r.stress);
        assert!(r.balanced);
    }

    #[test]
    fn exact_angles() {
        assert_relative_eq!(
            bar_force(&load(10.0, 0.0)).unwrap().bar_force,
            100.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            bar_force(&load(10.0, 60.0)).unwrap().bar_force,
            200.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn stress_examples() {
        assert_eq!(bar_stress(0.0, 1.44e-4).unwrap(), 0.0);
        assert_relative_eq!(
            bar_stress(144.0, 1.44e-4).unwrap(),
            1.0e6,
            max_relative = 1e-15
        );
        assert!((bar_stress(103.0, 1.44e-4).unwrap() - 0.715e6).abs() < 1e3);
        assert!(bar_stress(1.0, 0.0).is_err());
        assert!(bar_stress(1.0, -1.0).is_err());
    }

    #[test]
    fn balance_boundary() {
        assert!(static_balance_check(14.0));
        assert!(!static_balance_check(90.0));
        assert!(!static_balance_check(89.9999999999));
        assert!(static_balance_check(89.9999999));
    }

    #[test]
    fn singular_and_invalid_loads() {
        assert!(matches!(
            bar_force(&load(10.0, 90.0)),
            Err(Error::ParallelogramSingularity { .. })
        ));
        assert!(matches!(
            bar_force(&load(-1.0, 10.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            bar_force(&load(1.0, -10.0)),
            Err(Error::InvalidInput(_))
        ));
        let mut l = load(1.0, 10.0);
        l.width = 0.0;
        assert!(bar_force(&l).is_err());
        l.width = 0.1;
        l.section = 0.0;
        assert!(bar_force(&l).is_err());
    }
}
