//! Position kinematics and the analytic inverse Jacobian.
//!
//! Leg `i` obeys `|P - rho_i e_i|² = L²`. Solving for `rho_i` gives two
//! roots; only the `+` root (foot point beyond the projection of `P` on the
//! rail) is used, since it contains the isotropic configuration.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::magnitude::Magnitude;
use crate::mechanism::{BiglideGeometry, JointVector, OrthoglideGeometry, ToolPose};

/// Serial singularity guard on `|W_i · e_i|`.
pub const SERIAL_EPS: f64 = 1e-12;
/// Parallel singularity guard on the smallest singular value of the stacked `W_i`.
pub const PARALLEL_EPS: f64 = 1e-12;
/// Newton residual tolerance, relative to `L²`.
pub const FK_TOL: f64 = 1e-12;
pub const FK_MAX_ITER: usize = 50;
/// Negative IK discriminants down to `-REACH_TOL * L²` count as zero.
pub const REACH_TOL: f64 = 1e-12;

/// Inverse Jacobian (`rho_dot = J_inv p_dot`) and, when it exists, its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub inverse: Matrix3<f64>,
    /// `J` in `p_dot = J rho_dot`; `None` when `J_inv` is singular.
    pub forward: Option<Matrix3<f64>>,
}

impl JacobianPair {
    pub fn from_inverse(inverse: Matrix3<f64>) -> Self {
        let forward = inverse
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()));
        Self { inverse, forward }
    }
}

/// Joint coordinates placing the tool at `pose`.
///
/// The result is not checked against joint limits; see
/// [`JointVector::limit_violations`].
pub fn inverse_kinematics(geom: &OrthoglideGeometry, pose: &ToolPose) -> Result<JointVector> {
    if !pose.is_finite() {
        return Err(Error::InvalidInput("tool position must be finite".into()));
    }
    let p = pose.position;
    let l2 = geom.bar_length * geom.bar_length;
    let p2 = p.norm_squared();
    let mut rho = Vector3::zeros();
    let mut unreachable = Vec::new();
    for i in 0..3 {
        let along = p.dot(&geom.rail_axes[i]);
        let disc = l2 - p2 + along * along;
        // Round-off on the workspace boundary is clamped to the boundary.
        if disc < -REACH_TOL * l2 || disc.is_nan() {
            unreachable.push(i + 1);
        } else {
            rho[i] = along + disc.max(0.0).sqrt();
        }
    }
    if !unreachable.is_empty() {
        return Err(Error::OutOfWorkspace { legs: unreachable });
    }
    Ok(JointVector::new(rho))
}

/// Unit bar directions `W_i` at a reachable pose.
pub fn bar_directions(geom: &OrthoglideGeometry, pose: &ToolPose) -> Result<[Vector3<f64>; 3]> {
    let joints = inverse_kinematics(geom, pose)?;
    Ok(bar_directions_at(geom, pose, &joints))
}

pub(crate) fn bar_directions_at(
    geom: &OrthoglideGeometry,
    pose: &ToolPose,
    joints: &JointVector,
) -> [Vector3<f64>; 3] {
    let l = geom.bar_length;
    std::array::from_fn(|i| (pose.position - geom.rail_axes[i] * joints.rho[i]) / l)
}

fn stacked(rows: &[Vector3<f64>; 3]) -> Matrix3<f64> {
    Matrix3::from_rows(&[
        rows[0].transpose(),
        rows[1].transpose(),
        rows[2].transpose(),
    ])
}

/// Smallest singular value of the matrix whose rows are the bar directions.
pub fn bar_matrix_min_singular(bars: &[Vector3<f64>; 3]) -> f64 {
    stacked(bars).singular_values().min()
}

/// `J_inv` with rows `W_iᵀ / (W_i · e_i)`. Fails only at serial singularities.
pub fn inverse_jacobian(geom: &OrthoglideGeometry, pose: &ToolPose) -> Result<Matrix3<f64>> {
    let bars = bar_directions(geom, pose)?;
    inverse_jacobian_from_bars(&bars, &geom.rail_axes)
}

fn inverse_jacobian_from_bars(
    bars: &[Vector3<f64>; 3],
    rails: &[Vector3<f64>; 3],
) -> Result<Matrix3<f64>> {
    let denom: [f64; 3] = std::array::from_fn(|i| bars[i].dot(&rails[i]));
    let serial: Vec<usize> = (0..3)
        .filter(|&i| denom[i].abs() < SERIAL_EPS)
        .map(|i| i + 1)
        .collect();
    if !serial.is_empty() {
        return Err(Error::SerialSingularity { legs: serial });
    }
    let rows: [Vector3<f64>; 3] = std::array::from_fn(|i| bars[i] / denom[i]);
    Ok(stacked(&rows))
}

/// Analytic Jacobian pair at a reachable, non-singular pose.
pub fn jacobian_pair(geom: &OrthoglideGeometry, pose: &ToolPose) -> Result<JacobianPair> {
    let bars = bar_directions(geom, pose)?;
    let inverse = inverse_jacobian_from_bars(&bars, &geom.rail_axes)?;
    if bar_matrix_min_singular(&bars) < PARALLEL_EPS {
        return Err(Error::ParallelSingularity);
    }
    let forward = inverse.try_inverse().ok_or(Error::ParallelSingularity)?;
    Ok(JacobianPair {
        inverse,
        forward: Some(forward),
    })
}

/// `J = W⁻¹ D` with `D = diag(W_i · e_i)`. Defined at serial singularities
/// (where `J_inv` is not), `None` when the bar directions are dependent.
pub fn velocity_jacobian(
    geom: &OrthoglideGeometry,
    pose: &ToolPose,
) -> Result<Option<Matrix3<f64>>> {
    let bars = bar_directions(geom, pose)?;
    if bar_matrix_min_singular(&bars) < PARALLEL_EPS {
        return Ok(None);
    }
    let d = Matrix3::from_diagonal(&Vector3::from_fn(|i, _| bars[i].dot(&geom.rail_axes[i])));
    Ok(stacked(&bars).try_inverse().map(|w_inv| w_inv * d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkSolution {
    pub pose: ToolPose,
    /// Newton steps taken.
    pub iterations: usize,
}

/// Tool position for the given joints, by Newton iteration from `guess`.
pub fn forward_kinematics(
    geom: &OrthoglideGeometry,
    joints: &JointVector,
    guess: &ToolPose,
) -> Result<ToolPose> {
    forward_kinematics_traced(geom, joints, guess).map(|s| s.pose)
}

/// [`forward_kinematics`], also reporting the iteration count.
pub fn forward_kinematics_traced(
    geom: &OrthoglideGeometry,
    joints: &JointVector,
    guess: &ToolPose,
) -> Result<FkSolution> {
    if !guess.is_finite() || !joints.rho.iter().all(|r| r.is_finite()) {
        return Err(Error::InvalidInput(
            "joints and guess must be finite".into(),
        ));
    }
    let l = geom.bar_length;
    let l2 = l * l;
    let feet: [Vector3<f64>; 3] = std::array::from_fn(|i| geom.rail_axes[i] * joints.rho[i]);
    let mut p = guess.position;
    for iteration in 0..=FK_MAX_ITER {
        let legs: [Vector3<f64>; 3] = std::array::from_fn(|i| p - feet[i]);
        let residual = Vector3::from_fn(|i, _| legs[i].norm_squared() - l2);
        if !residual.iter().all(|r| r.is_finite()) {
            break;
        }
        if residual.amax() < FK_TOL * l2 {
            let wrong: Vec<usize> = (0..3)
                .filter(|&i| legs[i].dot(&geom.rail_axes[i]) / l > SERIAL_EPS)
                .map(|i| i + 1)
                .collect();
            if !wrong.is_empty() {
                return Err(Error::WrongBranch { legs: wrong });
            }
            return Ok(FkSolution {
                pose: ToolPose::from(p),
                iterations: iteration,
            });
        }
        if iteration == FK_MAX_ITER {
            break;
        }
        let jac = stacked(&legs) * 2.0;
        if jac.singular_values().min() < PARALLEL_EPS * l {
            return Err(Error::SingularIterate { iteration });
        }
        let step = jac
            .lu()
            .solve(&residual)
            .ok_or(Error::SingularIterate { iteration })?;
        p -= step;
    }
    Err(Error::NonConvergence {
        iterations: FK_MAX_ITER,
    })
}

/// Vertical velocity amplification `1 / (2 tan θ)` of the symmetric
/// biglide: `y_dot = (a1_dot - a2_dot) / (2 tan θ)`.
pub fn biglide_vertical_amplification(theta_deg: f64) -> Magnitude {
    let t = theta_deg.to_radians().tan();
    if t == 0.0 {
        Magnitude::Infinite
    } else {
        Magnitude::from_f64(1.0 / (2.0 * t.abs()))
    }
}

/// Jacobian pair of the symmetric biglide with struts at `theta_deg` from
/// the rail, embedded in 3D with an identity out-of-plane axis.
///
/// Sliders move along `+u`; strut `i` has direction `w_i` and inverse
/// Jacobian row `w_iᵀ / (w_i · u)`, the same construction as the
/// Orthoglide legs.
pub fn biglide_jacobian_pair(geom: &BiglideGeometry, theta_deg: f64) -> Result<JacobianPair> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::InvalidInput(format!(
            "theta must lie in [0, 90] deg, got {theta_deg}"
        )));
    }
    let th = theta_deg.to_radians();
    let u = geom.rail_axis;
    let up = Vector3::y();
    let struts = [u * th.cos() + up * th.sin(), -u * th.cos() + up * th.sin()];
    let mut inverse = Matrix3::zeros();
    for (i, w) in struts.iter().enumerate() {
        let denom = w.dot(&u);
        if denom.abs() < SERIAL_EPS {
            return Err(Error::SerialSingularity { legs: vec![1, 2] });
        }
        inverse.set_row(i, &(w / denom).transpose());
    }
    inverse[(2, 2)] = 1.0;
    Ok(JacobianPair::from_inverse(inverse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::default_orthoglide;
    use approx::assert_relative_eq;

    #[test]
    fn ik_isotropic() {
        let g = default_orthoglide();
        let j = inverse_kinematics(&g, &ToolPose::origin()).unwrap();
        assert_eq!(j.rho, Vector3::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn ik_offset_along_x() {
        let g = default_orthoglide();
        let pose = ToolPose::new(0.1, 0.0, 0.0);
        let j = inverse_kinematics(&g, &pose).unwrap();
        assert_relative_eq!(j.rho[0], 1.1, epsilon = 1e-15);
        assert_relative_eq!(j.rho[1], 0.99499, epsilon = 5e-6);
        assert_relative_eq!(j.rho[2], 0.99499, epsilon = 5e-6);
        for i in 0..3 {
            let r = (pose.position - g.rail_axes[i] * j.rho[i]).norm_squared() - 1.0;
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn ik_unreachable() {
        let g = default_orthoglide();
        let err = inverse_kinematics(&g, &ToolPose::new(0.0, 0.0, 1.5)).unwrap_err();
        assert_eq!(err, Error::OutOfWorkspace { legs: vec![1, 2] });
    }

    #[test]
    fn fk_isotropic_from_nearby_guess() {
        let g = default_orthoglide();
        let p =
            forward_kinematics(&g, &g.isotropic_joints(), &ToolPose::new(0.1, 0.1, 0.1)).unwrap();
        assert!(p.position.norm() < 1e-12);
    }

    #[test]
    fn fk_inverts_ik_example() {
        let g = default_orthoglide();
        let rho = inverse_kinematics(&g, &ToolPose::new(0.1, 0.0, 0.0)).unwrap();
        let p = forward_kinematics(&g, &rho, &ToolPose::new(0.12, 0.01, -0.01)).unwrap();
        assert_relative_eq!(p.position, Vector3::new(0.1, 0.0, 0.0), epsilon = 1e-9);
    }

    #[test]
    fn fk_rejects_minus_branch() {
        // rho_1 = 0.3 - 1 puts the leg-1 foot behind P: the rejected root.
        let g = default_orthoglide();
        let s = (1.0f64 - 0.09).sqrt();
        let joints = JointVector::new(Vector3::new(-0.7, s, s));
        let err = forward_kinematics(&g, &joints, &ToolPose::new(0.31, 0.01, 0.0)).unwrap_err();
        assert_eq!(err, Error::WrongBranch { legs: vec![1] });
    }

    #[test]
    fn fk_singular_start() {
        // Guess on the plane through the three foot points makes the Newton matrix singular.
        let g = default_orthoglide();
        let guess = ToolPose::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        let err = forward_kinematics(&g, &g.isotropic_joints(), &guess).unwrap_err();
        assert!(
            matches!(err, Error::SingularIterate { iteration: 0 }),
            "{err:?}"
        );
    }

    #[test]
    fn fk_unreachable_joints_do_not_converge() {
        // Foot points too far apart for bars of length 1.
        let g = default_orthoglide();
        let err = forward_kinematics(
            &g,
            &JointVector::new(Vector3::new(5.0, 5.0, 5.0)),
            &ToolPose::origin(),
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::NonConvergence { .. } | Error::SingularIterate { .. }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn isotropic_jacobian_is_identity() {
        let g = default_orthoglide();
        let jac = jacobian_pair(&g, &ToolPose::origin()).unwrap();
        assert_eq!(jac.inverse, Matrix3::identity());
        assert_eq!(jac.forward.unwrap(), Matrix3::identity());
    }

    #[test]
    fn serial_singular_pose() {
        // P = (0, 1, 0): leg 1 bar is perpendicular to its rail.
        let g = default_orthoglide();
        let err = jacobian_pair(&g, &ToolPose::new(0.0, 1.0, 0.0)).unwrap_err();
        assert_eq!(err, Error::SerialSingularity { legs: vec![1, 3] });
    }

    #[test]
    fn parallel_singular_pose() {
        // On the diagonal P = a(1,1,1), the bar matrix is a·11ᵀ - (s + a)I with
        // s = sqrt(1 - 2a²); it loses rank when s = 2a, i.e. a = 1/√6.
        let g = default_orthoglide();
        let a = 1.0 / 6f64.sqrt();
        let err = jacobian_pair(&g, &ToolPose::new(a, a, a)).unwrap_err();
        assert_eq!(err, Error::ParallelSingularity);
        assert_eq!(
            velocity_jacobian(&g, &ToolPose::new(a, a, a)).unwrap(),
            None
        );
    }

    #[test]
    fn velocity_jacobian_matches_forward() {
        let g = default_orthoglide();
        let pose = ToolPose::new(0.1, -0.2, 0.05);
        let jac = jacobian_pair(&g, &pose).unwrap();
        let j = velocity_jacobian(&g, &pose).unwrap().unwrap();
        assert_relative_eq!(j, jac.forward.unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn biglide_closed_form() {
        let b = BiglideGeometry::default();
        let jac = biglide_jacobian_pair(&b, 45.0).unwrap();
        let j = jac.forward.unwrap();
        // y_dot = (a1_dot - a2_dot) / (2 tan θ)
        assert_relative_eq!(j[(1, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(j[(1, 1)], -0.5, epsilon = 1e-12);
        assert_relative_eq!(j[(0, 0)], 0.5, epsilon = 1e-12);
        assert_eq!(biglide_vertical_amplification(0.0), Magnitude::Infinite);
        assert!(biglide_vertical_amplification(90.0).finite().unwrap() < 1e-15);
        assert!(biglide_jacobian_pair(&b, 0.0).unwrap().forward.is_none());
        assert!(biglide_jacobian_pair(&b, 90.0).is_err());
        assert!(biglide_jacobian_pair(&b, 91.0).is_err());
    }
}
