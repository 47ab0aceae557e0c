//! Forward kinematics, centre of mass and the two-link leg solver.
//!
//! Frame convention: the base frame sits at the proximal end of link 0 and is
//! also the frame of the base foot block. With every joint at zero the chain
//! lies straight along +x, +y is the dorsal side and z is the pitch axis.

use nalgebra::{Matrix3, Matrix4, Vector3};
use thiserror::Error;

use crate::model::{DhRow, JointVector, RobotModel, LINKS};

pub type Transform = Matrix4<f64>;

/// Plane in which a joint bends when the robot lies on its belly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointPlane {
    /// Rotation about the pitch axis; bends the chain up and down.
    Vertical,
    /// Rotation about the dorsal axis; bends the chain sideways.
    Lateral,
}

/// Axis assignment of the default robot.
pub const JOINT_PLANES: [JointPlane; LINKS] = [
    JointPlane::Vertical,
    JointPlane::Vertical,
    JointPlane::Lateral,
    JointPlane::Vertical,
    JointPlane::Lateral,
    JointPlane::Vertical,
    JointPlane::Vertical,
];

/// Index of the link that carries the docking mechanism.
pub const CENTER_LINK: usize = 3;

pub fn rot_x(deg: f64) -> Transform {
    let (s, c) = deg.to_radians().sin_cos();
    #[rustfmt::skip]
    let m = Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, c, -s, 0.0,
        0.0, s, c, 0.0,
        0.0, 0.0, 0.0, 1.0,
    );
    m
}

pub fn rot_z(deg: f64) -> Transform {
    let (s, c) = deg.to_radians().sin_cos();
    #[rustfmt::skip]
    let m = Matrix4::new(
        c, -s, 0.0, 0.0,
        s, c, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    );
    m
}

pub fn translation(x: f64, y: f64, z: f64) -> Transform {
    Matrix4::new_translation(&Vector3::new(x, y, z))
}

/// Standard DH link transform with θ = q + theta_offset.
pub fn dh_transform(row: &DhRow, q: f64) -> Transform {
    let (st, ct) = (q + row.theta_offset).to_radians().sin_cos();
    let (sa, ca) = row.alpha.to_radians().sin_cos();
    #[rustfmt::skip]
    let m = Matrix4::new(
        ct, -st * ca, st * sa, row.a * ct,
        st, ct * ca, -ct * sa, row.a * st,
        0.0, sa, ca, row.d,
        0.0, 0.0, 0.0, 1.0,
    );
    m
}

/// Rotation of joint `k`'s axis about the incoming link axis.
///
/// The 90° offset rows alternate in sign so consecutive lateral joints
/// point the same way.
pub fn joint_twist(model: &RobotModel, k: usize) -> f64 {
    let off = model.dh[k].theta_offset;
    if k % 2 == 1 {
        off
    } else {
        -off
    }
}

fn cumulative_twist(model: &RobotModel, k: usize) -> f64 {
    (0..=k).map(|i| joint_twist(model, i)).sum()
}

/// Transform of one link: twist the joint axis, rotate about it, then walk the link.
pub fn link_transform(model: &RobotModel, k: usize, q: f64) -> Transform {
    let row = &model.dh[k];
    rot_x(joint_twist(model, k)) * rot_z(q) * translation(row.a, 0.0, row.d) * rot_x(row.alpha)
}

/// Base frame followed by the frame at the distal end of each link.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    pub frames: [Transform; LINKS + 1],
    twists: [f64; LINKS],
}

impl FrameSet {
    /// Joint position `k` (0 = base, 7 = end effector).
    pub fn origin(&self, k: usize) -> Vector3<f64> {
        self.frames[k].fixed_view::<3, 1>(0, 3).into_owned()
    }

    pub fn end_effector(&self) -> Vector3<f64> {
        self.origin(LINKS)
    }

    /// Orientation of link `k` with x along the link, y dorsal and z the pitch axis.
    pub fn link_frame(&self, k: usize) -> Matrix3<f64> {
        let r = self.frames[k + 1].fixed_view::<3, 3>(0, 0).into_owned();
        let undo = rot_x(-self.twists[k]).fixed_view::<3, 3>(0, 0).into_owned();
        r * undo
    }

    pub fn base_frame(&self) -> Matrix3<f64> {
        self.frames[0].fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn link_midpoint(&self, k: usize) -> Vector3<f64> {
        (self.origin(k) + self.origin(k + 1)) / 2.0
    }
}

pub fn forward_kinematics(model: &RobotModel, q: &JointVector) -> FrameSet {
    let mut frames = [Matrix4::identity(); LINKS + 1];
    let mut twists = [0.0; LINKS];
    for k in 0..LINKS {
        frames[k + 1] = frames[k] * link_transform(model, k, q[k]);
        twists[k] = cumulative_twist(model, k);
    }
    FrameSet { frames, twists }
}

/// Mass-weighted centre of the link midpoints plus the mechanism on the center link.
pub fn com_of_frames(model: &RobotModel, fs: &FrameSet) -> Vector3<f64> {
    let mut sum = Vector3::zeros();
    let mut mass = 0.0;
    for k in 0..LINKS {
        sum += fs.link_midpoint(k) * model.link_masses[k];
        mass += model.link_masses[k];
    }
    sum += fs.link_midpoint(CENTER_LINK) * model.mechanism_mass;
    mass += model.mechanism_mass;
    if mass > 0.0 {
        sum / mass
    } else {
        (0..LINKS).map(|k| fs.link_midpoint(k)).sum::<Vector3<f64>>() / LINKS as f64
    }
}

pub fn center_of_mass(model: &RobotModel, q: &JointVector) -> Vector3<f64> {
    com_of_frames(model, &forward_kinematics(model, q))
}

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("target unreachable: {distance:.6} mm outside the reachable annulus")]
    Unreachable { distance: f64 },
    #[error("leg lengths must be positive")]
    BadLeg,
}

/// Two-link planar leg anchored at the hip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarLeg {
    pub l1: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Knee on the counter-clockwise side of the hip-target line (knee angle ≤ 0).
    KneeUp,
    KneeDown,
}

impl PlanarLeg {
    pub fn new(l1: f64, l2: f64) -> Result<Self, KinematicsError> {
        if l1 > 0.0 && l2 > 0.0 {
            Ok(PlanarLeg { l1, l2 })
        } else {
            Err(KinematicsError::BadLeg)
        }
    }

    /// Foot position for hip and knee angles in degrees.
    pub fn forward(&self, hip: f64, knee: f64) -> [f64; 2] {
        let (h, hk) = (hip.to_radians(), (hip + knee).to_radians());
        [self.l1 * h.cos() + self.l2 * hk.cos(), self.l1 * h.sin() + self.l2 * hk.sin()]
    }
}

pub fn planar_leg_ik(leg: &PlanarLeg, target: [f64; 2], branch: Branch) -> Result<(f64, f64), KinematicsError> {
    let r = target[0].hypot(target[1]);
    let (lo, hi) = ((leg.l1 - leg.l2).abs(), leg.l1 + leg.l2);
    let tol = 1e-9 * hi;
    if r > hi + tol || r < lo - tol {
        let distance = if r > hi { r - hi } else { lo - r };
        return Err(KinematicsError::Unreachable { distance });
    }
    let c = ((r * r - leg.l1 * leg.l1 - leg.l2 * leg.l2) / (2.0 * leg.l1 * leg.l2)).clamp(-1.0, 1.0);
    let mut knee = c.acos();
    if branch == Branch::KneeUp {
        knee = -knee;
    }
    let hip = target[1].atan2(target[0]) - (leg.l2 * knee.sin()).atan2(leg.l1 + leg.l2 * knee.cos());
    let mut hip = hip.to_degrees();
    if hip <= -180.0 {
        hip += 360.0;
    } else if hip > 180.0 {
        hip -= 360.0;
    }
    Ok((hip, knee.to_degrees()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model() -> RobotModel {
        RobotModel::default()
    }

    #[test]
    fn single_row_examples() {
        let m = model();
        let t = dh_transform(&m.dh[0], 0.0);
        assert_relative_eq!(t, translation(112.0, 0.0, 0.0), epsilon = 1e-12);
        let a = dh_transform(&DhRow::new(75.0, 0.0), 90.0);
        let b = dh_transform(&DhRow::new(75.0, 90.0), 0.0);
        assert_relative_eq!(a, b, epsilon = 1e-12);
        assert_relative_eq!(a[(0, 3)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(a[(1, 3)], 75.0, epsilon = 1e-12);
        assert_relative_eq!(a[(0, 1)], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_pose_is_straight() {
        let fs = forward_kinematics(&model(), &[0.0; LINKS]);
        assert_eq!(fs.end_effector(), Vector3::new(599.0, 0.0, 0.0));
        for k in 0..LINKS {
            assert_relative_eq!(fs.link_frame(k), Matrix3::identity(), epsilon = 1e-12);
        }
    }

    #[test]
    fn plane_table_matches_axes() {
        let m = model();
        let fs = forward_kinematics(&m, &[0.0; LINKS]);
        for k in 0..LINKS {
            let axis = fs.frames[k] * rot_x(joint_twist(&m, k));
            let z = Vector3::new(axis[(0, 2)], axis[(1, 2)], axis[(2, 2)]);
            let expect = match JOINT_PLANES[k] {
                JointPlane::Vertical => Vector3::z(),
                JointPlane::Lateral => Vector3::y(),
            };
            assert_relative_eq!(z, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn com_of_straight_uniform_chain() {
        let mut m = model();
        m.link_masses = [1.0; LINKS];
        m.mechanism_mass = 0.0;
        let lengths = m.lengths();
        let c = center_of_mass(&m, &[0.0; LINKS]);
        let mids: f64 = (0..LINKS).map(|k| lengths[..k].iter().sum::<f64>() + lengths[k] / 2.0).sum();
        assert_relative_eq!(c.x, mids / 7.0, epsilon = 1e-9);
        assert_relative_eq!(c.x, 299.5, epsilon = 1e-9);
    }

    #[test]
    fn com_all_on_first_link() {
        let mut m = model();
        m.link_masses = [0.0; LINKS];
        m.link_masses[0] = 5.0;
        m.mechanism_mass = 0.0;
        let q = [10.0, -20.0, 30.0, 0.0, 5.0, 60.0, 1.0];
        let fs = forward_kinematics(&m, &q);
        assert_relative_eq!(com_of_frames(&m, &fs), fs.link_midpoint(0), epsilon = 1e-12);
    }

    #[test]
    fn ik_examples() {
        let leg = PlanarLeg::new(75.0, 112.0).unwrap();
        let (h, k) = planar_leg_ik(&leg, [187.0, 0.0], Branch::KneeUp).unwrap();
        assert_relative_eq!(h, 0.0, epsilon = 1e-9);
        assert_relative_eq!(k, 0.0, epsilon = 1e-9);
        let (h, k) = planar_leg_ik(&leg, [0.0, 187.0], Branch::KneeDown).unwrap();
        assert_relative_eq!(h, 90.0, epsilon = 1e-9);
        assert_relative_eq!(k, 0.0, epsilon = 1e-9);
        match planar_leg_ik(&leg, [300.0, 0.0], Branch::KneeUp) {
            Err(KinematicsError::Unreachable { distance }) => assert_relative_eq!(distance, 113.0, epsilon = 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(planar_leg_ik(&leg, [10.0, 0.0], Branch::KneeUp).is_err());
    }

    #[test]
    fn ik_branches_differ() {
        let leg = PlanarLeg::new(75.0, 112.0).unwrap();
        let t = [100.0, -60.0];
        let up = planar_leg_ik(&leg, t, Branch::KneeUp).unwrap();
        let down = planar_leg_ik(&leg, t, Branch::KneeDown).unwrap();
        assert!(up.1 < 0.0 && down.1 > 0.0);
        for (h, k) in [up, down] {
            let p = leg.forward(h, k);
            assert_relative_eq!(p[0], t[0], epsilon = 1e-6);
            assert_relative_eq!(p[1], t[1], epsilon = 1e-6);
        }
    }
}
