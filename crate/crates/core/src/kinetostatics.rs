//! Conditioning index, velocity/force amplification and the manipulability
//! ellipsoid of a Jacobian pair.
//!
//! The conditioning index is the 2-norm condition number of `J_inv`
//! (ratio of extreme singular values). Velocity amplification factors are
//! the singular values of `J`, i.e. reciprocals of those of `J_inv`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::JacobianPair;
use crate::magnitude::Magnitude;

/// `sigma_min < KAPPA_SINGULAR_RTOL * sigma_max` is reported as singular.
pub const KAPPA_SINGULAR_RTOL: f64 = 1e-15;

/// Conditioning index above which a pose is flagged as near-singular.
pub const NEAR_SINGULAR_KAPPA: f64 = 1e6;

/// Singular values, descending.
pub fn singular_values(m: &Matrix3<f64>) -> [f64; 3] {
    let sv = m.singular_values();
    let mut out = [sv[0], sv[1], sv[2]];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn is_finite(m: &Matrix3<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub fn conditioning_index(jac: &JacobianPair) -> Magnitude {
    if !is_finite(&jac.inverse) {
        return Magnitude::Infinite;
    }
    let [smax, _, smin] = singular_values(&jac.inverse);
    if smax == 0.0 || smin < KAPPA_SINGULAR_RTOL * smax {
        Magnitude::Infinite
    } else {
        Magnitude::Finite(smax / smin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationFactors {
    /// Singular values of `J`, ascending.
    pub velocity: [Magnitude; 3],
    /// `1 / velocity[i]`, hence descending; zero where velocity is unbounded.
    pub force: [f64; 3],
}

pub fn amplification_factors(jac: &JacobianPair) -> AmplificationFactors {
    if !is_finite(&jac.inverse) {
        return AmplificationFactors {
            velocity: [Magnitude::Infinite; 3],
            force: [0.0; 3],
        };
    }
    let sv = singular_values(&jac.inverse);
    let smax = sv[0];
    let velocity = sv.map(|s| {
        if smax == 0.0 || s < KAPPA_SINGULAR_RTOL * smax {
            Magnitude::Infinite
        } else {
            Magnitude::Finite(1.0 / s)
        }
    });
    let force = velocity.map(|v| match v {
        Magnitude::Finite(v) => 1.0 / v,
        Magnitude::Infinite => 0.0,
    });
    AmplificationFactors { velocity, force }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ellipsoid {
    /// Orthonormal principal axes, in the order of `lengths`.
    pub axes: [Vector3<f64>; 3],
    /// Ascending semi-axis lengths.
    pub lengths: [f64; 3],
}

/// Principal axes and lengths from the eigen-decomposition of `(J Jᵀ)⁻¹`.
pub fn manipulability_ellipsoid(jac: &JacobianPair) -> Result<Ellipsoid> {
    if jac.forward.is_none() || !is_finite(&jac.inverse) {
        return Err(Error::ParallelSingularity);
    }
    // (J Jᵀ)⁻¹ = J_invᵀ J_inv
    let m = jac.inverse.transpose() * jac.inverse;
    let eig = m.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let axes = order.map(|k| eig.eigenvectors.column(k).into_owned());
    let lengths = order.map(|k| eig.eigenvalues[k].max(0.0).sqrt());
    Ok(Ellipsoid { axes, lengths })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinetostaticReport {
    pub kappa: Magnitude,
    pub velocity_factors: [Magnitude; 3],
    pub force_factors: [f64; 3],
    pub ellipsoid_axes: [Vector3<f64>; 3],
    pub ellipsoid_lengths: [f64; 3],
}

impl KinetostaticReport {
    pub fn near_singular(&self) -> bool {
        self.kappa.finite().is_none_or(|k| k > NEAR_SINGULAR_KAPPA)
    }
}

/// All indices at once; fails where the ellipsoid is undefined.
pub fn kinetostatic_report(jac: &JacobianPair) -> Result<KinetostaticReport> {
    let amp = amplification_factors(jac);
    let ell = manipulability_ellipsoid(jac)?;
    Ok(KinetostaticReport {
        kappa: conditioning_index(jac),
        velocity_factors: amp.velocity,
        force_factors: amp.force,
        ellipsoid_axes: ell.axes,
        ellipsoid_lengths: ell.lengths,
    })
}
