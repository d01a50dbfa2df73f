mod common;

use common::{random_pose, random_unit, rank_by_minors, rng, rotation};
use nalgebra::Vector3;
use orthokin::kinematics::inverse_kinematics;
use orthokin::mechanism::leg_frames;
use orthokin::screw::{
    couple_space_rank, is_pure_translational, leg_wrench_system, pure_couple, Screw, WrenchSystem,
};
use orthokin::singularity::leg_wrench_systems;
use orthokin::{default_orthoglide, LegFrame};
use proptest::prelude::*;

fn frame(t: Vector3<f64>, u: Vector3<f64>) -> LegFrame {
    LegFrame {
        rail: t,
        transverse: u,
        bar: -t,
        plane_normal: t.cross(&u).normalize(),
        attachment: Vector3::zeros(),
    }
}

fn couple_rows(systems: &[WrenchSystem]) -> Vec<Vector3<f64>> {
    systems
        .iter()
        .flat_map(|s| s.couple_axes().collect::<Vec<_>>())
        .collect()
}

fn isotropic_systems() -> Vec<WrenchSystem> {
    let g = default_orthoglide();
    let frames = leg_frames(&g, &g.isotropic_pose(), &g.isotropic_joints()).unwrap();
    frames
        .iter()
        .map(|f| leg_wrench_system(f).unwrap())
        .collect()
}

#[test]
fn isotropic_legs_span_all_rotations() {
    let systems = isotropic_systems();
    assert_eq!(couple_space_rank(&systems), 3);
    assert!(is_pure_translational(&systems));
    assert_eq!(rank_by_minors(&couple_rows(&systems), 1e-9), 3);
}

#[test]
fn identical_planes_match_minor_oracle() {
    // Two legs sharing rail and transverse axis: identical parallelogram planes.
    let a = leg_wrench_system(&frame(Vector3::x(), Vector3::y())).unwrap();
    let systems = vec![a.clone(), a];
    let rank = couple_space_rank(&systems);
    assert_eq!(rank, rank_by_minors(&couple_rows(&systems), 1e-9));
    assert_eq!(rank, 2);

    // Same plane, different rails within it.
    let b = leg_wrench_system(&frame(Vector3::y(), Vector3::x())).unwrap();
    let c = leg_wrench_system(&frame(Vector3::x(), Vector3::y())).unwrap();
    let systems = vec![b, c];
    assert_eq!(
        couple_space_rank(&systems),
        rank_by_minors(&couple_rows(&systems), 1e-9)
    );
}

#[test]
fn coinciding_planes_lose_a_rotation() {
    // All three parallelograms share the transverse axis z, with rails in the
    // xy-plane: every couple lies in that plane and spin about z is free.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let systems: Vec<WrenchSystem> = [Vector3::x(), Vector3::y(), Vector3::new(s, s, 0.0)]
        .iter()
        .map(|&t| leg_wrench_system(&frame(t, Vector3::z())).unwrap())
        .collect();
    assert_eq!(rank_by_minors(&couple_rows(&systems), 1e-9), 2);
    assert_eq!(couple_space_rank(&systems), 2);
    assert!(!is_pure_translational(&systems));
}

#[test]
fn final_legs_rank_three_over_workspace() {
    let g = default_orthoglide();
    let mut r = rng(7);
    for _ in 0..1000 {
        let pose = random_pose(&mut r, &g);
        let joints = inverse_kinematics(&g, &pose).unwrap();
        let frames = leg_frames(&g, &pose, &joints).unwrap();
        assert_eq!(couple_space_rank(&leg_wrench_systems(&frames)), 3);
        // U_i is fixed by the design, whatever the pose.
        assert_eq!(frames.map(|f| f.transverse), g.transverse_axes());
    }
}

fn arb_unit() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("not too short", |(x, y, z)| (x * x + y * y + z * z) > 0.01)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z).normalize())
}

fn arb_system() -> impl Strategy<Value = WrenchSystem> {
    prop::collection::vec(arb_unit(), 1..3).prop_map(|axes| {
        WrenchSystem::new(
            axes.into_iter()
                .map(|a| pure_couple(a, 1.0).unwrap())
                .collect(),
        )
        .unwrap()
    })
}

/// Systems whose couples all lie in one plane (rank ≤ 2 by construction).
fn arb_planar_systems() -> impl Strategy<Value = Vec<WrenchSystem>> {
    (
        arb_unit(),
        prop::collection::vec(0.0f64..std::f64::consts::PI, 1..5),
    )
        .prop_map(|(normal, angles)| {
            let helper = if normal.x.abs() < 0.9 {
                Vector3::x()
            } else {
                Vector3::y()
            };
            let a = normal.cross(&helper).normalize();
            let b = normal.cross(&a);
            angles
                .iter()
                .map(|&t| {
                    WrenchSystem::new(vec![pure_couple(a * t.cos() + b * t.sin(), 1.0).unwrap()])
                        .unwrap()
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn rank_agrees_with_minor_oracle(systems in prop::collection::vec(arb_system(), 1..4)) {
        let rows = couple_rows(&systems);
        // Random unit rows are generic: their minors sit far above the tolerance.
        prop_assert_eq!(couple_space_rank(&systems), rank_by_minors(&rows, 1e-9));
    }

    #[test]
    fn planar_couples_never_reach_rank_three(systems in arb_planar_systems()) {
        prop_assert!(couple_space_rank(&systems) <= 2);
    }

    #[test]
    fn rank_invariant_under_permutation_rotation_and_scaling(
        systems in prop::collection::vec(arb_system(), 1..4),
        axis in arb_unit(),
        angle in -3.0f64..3.0,
        scale in prop::sample::select(vec![-5.0, -0.5, 1e-3, 2.0, 1e3]),
    ) {
        let base = couple_space_rank(&systems);
        let mut reversed = systems.clone();
        reversed.reverse();
        prop_assert_eq!(couple_space_rank(&reversed), base);

        let rot = rotation(axis, angle);
        let rotated: Vec<WrenchSystem> = systems.iter().map(|s| WrenchSystem::new(
            s.wrenches.iter().map(|w| Screw::new(rot * w.angular, rot * w.linear)).collect()).unwrap()).collect();
        prop_assert_eq!(couple_space_rank(&rotated), base);

        let scaled: Vec<WrenchSystem> = systems.iter().map(|s| WrenchSystem::new(
            s.wrenches.iter().map(|w| w.scaled(scale)).collect()).unwrap()).collect();
        prop_assert_eq!(couple_space_rank(&scaled), base);
    }
}

#[test]
fn random_legs_rank_matches_oracle() {
    let mut r = rng(11);
    for _ in 0..500 {
        let t = random_unit(&mut r);
        let u = random_unit(&mut r);
        if t.cross(&u).norm() < 0.05 {
            continue;
        }
        let systems = vec![leg_wrench_system(&frame(t, u)).unwrap()];
        assert_eq!(
            couple_space_rank(&systems),
            rank_by_minors(&couple_rows(&systems), 1e-9)
        );
    }
}
