#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use orthokin::{OrthoglideGeometry, ToolPose};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform pose in `[-0.3L, 0.3L]³`, well inside the regular workspace.
pub fn random_pose(rng: &mut impl Rng, geom: &OrthoglideGeometry) -> ToolPose {
    let h = 0.3 * geom.bar_length;
    ToolPose::new(
        rng.random_range(-h..h),
        rng.random_range(-h..h),
        rng.random_range(-h..h),
    )
}

pub fn random_unit(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Rotation about a unit axis (Rodrigues), written out by hand.
pub fn rotation(axis: Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = Matrix3::new(
        0.0, -axis.z, axis.y, axis.z, 0.0, -axis.x, -axis.y, axis.x, 0.0,
    );
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Eigenvalues of a symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    for _ in 0..100 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off < 1e-30 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- Gᵀ A G with G the rotation in the (p, q) plane
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    let mut ev = [a[0][0], a[1][1], a[2][2]];
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Singular values (ascending) of `m` via eigenvalues of `mᵀm`.
pub fn singular_values_by_eigen(m: &Matrix3<f64>) -> [f64; 3] {
    let g = m.transpose() * m;
    let arr = [
        [g[(0, 0)], g[(0, 1)], g[(0, 2)]],
        [g[(1, 0)], g[(1, 1)], g[(1, 2)]],
        [g[(2, 0)], g[(2, 1)], g[(2, 2)]],
    ];
    jacobi_eigenvalues(arr).map(|e| e.max(0.0).sqrt())
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Rank of the rows by exhaustive minors: the largest `r` such that some
/// `r × r` minor exceeds `tol` in magnitude.
pub fn rank_by_minors(rows: &[Vector3<f64>], tol: f64) -> usize {
    let n = rows.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let d = rows[i].dot(&rows[j].cross(&rows[k]));
                if d.abs() > tol {
                    return 3;
                }
            }
        }
    }
    let cols = [(0, 1), (0, 2), (1, 2)];
    for i in 0..n {
        for j in (i + 1)..n {
            for &(c0, c1) in &cols {
                if det2([rows[i][c0], rows[i][c1]], [rows[j][c0], rows[j][c1]]).abs() > tol {
                    return 2;
                }
            }
        }
    }
    if rows.iter().any(|r| r.amax() > tol) {
        1
    } else {
        0
    }
}
