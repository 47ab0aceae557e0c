use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use requbis::bus::{decode, decode_stream, encode, BusFrame, Command, MAX_TICKS};
use requbis::docking::{DockLimits, DockPhase, DockState, RelativePose};
use requbis::gaits::{serpentine_angle, SerpentineParams};
use requbis::kinematics::{forward_kinematics, link_transform, planar_leg_ik, Branch, PlanarLeg};
use requbis::stability::{convex_hull, stability_margin, support_polygon, Point2};
use requbis::trajectory::{Sample, Trajectory};
use requbis::transitions::{interpolate, TransitionScript};
use requbis::{load_model, ConfigurationMode, JointVector, RobotModel, LINKS};

fn point() -> impl Strategy<Value = Point2> {
    [-100.0..100.0f64, -100.0..100.0f64]
}

fn cloud() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec(point(), 3..12)
}

fn pose() -> impl Strategy<Value = JointVector> {
    prop::array::uniform7(-90.0..=90.0f64)
}

fn sorted(mut v: Vec<Point2>) -> Vec<Point2> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn frame() -> impl Strategy<Value = BusFrame> {
    let cmd = prop_oneof![
        Just(Command::Ping),
        (any::<u8>(), any::<u8>()).prop_map(|(address, count)| Command::Read { address, count }),
        (0..=MAX_TICKS).prop_map(|ticks| Command::WritePosition { ticks }),
        (0..=MAX_TICKS, any::<u16>()).prop_map(|(ticks, velocity)| Command::WritePositionVelocity { ticks, velocity }),
    ];
    (0u8..=254, cmd).prop_map(|(id, command)| BusFrame { id, command })
}

#[derive(Debug, Clone)]
enum DockOp {
    Move([f64; 3], f64),
    Deploy,
    Extend(f64),
}

fn dock_op() -> impl Strategy<Value = DockOp> {
    let v = prop_oneof![4 => -8.0..8.0f64, 1 => Just(f64::NAN), 1 => Just(5.0), 1 => Just(-5.0)];
    prop_oneof![
        ([v.clone(), v.clone(), v.clone()], v).prop_map(|(t, y)| DockOp::Move(t, y)),
        Just(DockOp::Deploy),
        prop_oneof![-0.5..1.5f64, Just(0.0), Just(f64::INFINITY)].prop_map(DockOp::Extend),
    ]
}

proptest! {
    #[test]
    fn hull_ignores_point_order(pts in cloud(), seed in any::<u64>()) {
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        for i in 0..n {
            let j = (seed.wrapping_mul(i as u64 + 1).rotate_left(17) % n as u64) as usize;
            shuffled.swap(i, j);
        }
        prop_assert_eq!(sorted(convex_hull(&pts)), sorted(convex_hull(&shuffled)));
    }

    #[test]
    fn margin_is_one_lipschitz(pts in cloud(), p in point(), d in point()) {
        let poly = support_polygon(&[pts]).unwrap();
        let q = [p[0] + d[0] * 0.1, p[1] + d[1] * 0.1];
        let dist = (d[0] * 0.1).hypot(d[1] * 0.1);
        prop_assert!((stability_margin(&poly, p) - stability_margin(&poly, q)).abs() <= dist + 1e-9);
    }

    #[test]
    fn more_contact_never_lowers_margin(pts in cloud(), extra in point(), p in point()) {
        let poly = support_polygon(std::slice::from_ref(&pts)).unwrap();
        let grown = support_polygon(&[pts, vec![extra]]).unwrap();
        prop_assert!(stability_margin(&grown, p) >= stability_margin(&poly, p) - 1e-9);
    }

    #[test]
    fn inside_margin_bounds_an_eroded_disk(pts in cloud(), p in point(), a in 0.0..std::f64::consts::TAU) {
        let poly = support_polygon(&[pts]).unwrap();
        let m = stability_margin(&poly, p);
        prop_assume!(m > 1e-6 && !poly.degenerate);
        // every point within m of p is inside the hull
        let r = m * 0.999;
        let q = [p[0] + r * a.cos(), p[1] + r * a.sin()];
        prop_assert!(stability_margin(&poly, q) >= -1e-9);
    }

    #[test]
    fn margin_invariant_under_rigid_motion(pts in cloud(), p in point(), a in -3.0..3.0f64, t in point()) {
        let (s, c) = a.sin_cos();
        let mv = |v: Point2| [c * v[0] - s * v[1] + t[0], s * v[0] + c * v[1] + t[1]];
        let poly = support_polygon(std::slice::from_ref(&pts)).unwrap();
        let moved = support_polygon(&[pts.into_iter().map(mv).collect()]).unwrap();
        assert_abs_diff_eq!(stability_margin(&poly, p), stability_margin(&moved, mv(p)), epsilon = 1e-7);
    }

    #[test]
    fn fk_frames_chain_and_stay_orthonormal(q in pose()) {
        let m = RobotModel::default();
        let fs = forward_kinematics(&m, &q);
        for k in 0..LINKS {
            let next = fs.frames[k] * link_transform(&m, k, q[k]);
            prop_assert!((next - fs.frames[k + 1]).abs().max() < 1e-9);
            let r = fs.frames[k + 1].fixed_view::<3, 3>(0, 0).into_owned();
            prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).abs().max() < 1e-9);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-9);
            let len = (fs.origin(k + 1) - fs.origin(k)).norm();
            prop_assert!((len - m.dh[k].a).abs() < 1e-9);
        }
    }

    #[test]
    fn leg_ik_round_trips(hip in -170.0..170.0f64, knee in 2.0..178.0f64, up in any::<bool>()) {
        let leg = PlanarLeg::new(75.0, 112.0).unwrap();
        let knee = if up { -knee } else { knee };
        let target = leg.forward(hip, knee);
        let branch = if up { Branch::KneeUp } else { Branch::KneeDown };
        let (h, k) = planar_leg_ik(&leg, target, branch).unwrap();
        let back = leg.forward(h, k);
        prop_assert!((back[0] - target[0]).abs() < 1e-7 && (back[1] - target[1]).abs() < 1e-7);
    }

    #[test]
    fn model_json_round_trips(masses in prop::array::uniform7(1.0..500.0f64), lim in prop::array::uniform7(1.0..150.0f64), mech in 0.0..100.0f64) {
        let mut m = RobotModel::default();
        m.link_masses = masses;
        m.mechanism_mass = mech;
        for k in 0..LINKS {
            m.joint_limits[k] = (-lim[k], lim[k] * 0.5);
        }
        let back = load_model(&m.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn codec_round_trips(f in frame()) {
        let bytes = encode(&f).unwrap();
        let (back, used) = decode(&bytes).unwrap();
        prop_assert_eq!(back, f);
        prop_assert_eq!(used, bytes.len());
    }

    #[test]
    fn decode_is_total(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let _ = decode(&bytes);
        let _ = decode_stream(&bytes);
    }

    #[test]
    fn single_bit_flip_is_detected(f in frame(), pos in any::<prop::sample::Index>(), bit in 0u8..8) {
        let mut bytes = encode(&f).unwrap();
        let i = pos.index(bytes.len());
        bytes[i] ^= 1 << bit;
        prop_assert!(decode(&bytes).map(|(g, _)| g != f).unwrap_or(true));
    }

    #[test]
    fn dock_state_stays_valid(ops in prop::collection::vec(dock_op(), 0..40)) {
        let limits = DockLimits::default();
        let mut s = DockState::default();
        for op in ops {
            let before = s;
            let r = match op {
                DockOp::Move(t, y) => s.set_relative(RelativePose { translation: t, yaw_deg: y }),
                DockOp::Deploy => s.begin_deploy(&limits),
                DockOp::Extend(x) => s.extend(x),
            };
            if r.is_err() {
                prop_assert_eq!(s, before);
            }
            prop_assert!(s.is_valid(&limits), "{:?}", s);
            if s.phase == DockPhase::Engaged {
                prop_assert_eq!(s.relative, RelativePose::default());
            }
        }
    }

    #[test]
    fn interpolation_is_continuous(qs in prop::collection::vec(pose(), 2..6), dts in prop::collection::vec(0.05..2.0f64, 5), u in 0.0..1.0f64) {
        let mut s = TransitionScript::new(ConfigurationMode::Snake, ConfigurationMode::Snake);
        for (i, q) in qs.iter().enumerate() {
            s.push(if i == 0 { 0.0 } else { dts[i - 1] }, vec![*q], vec![]);
        }
        let t = s.duration() * u;
        let h = 1e-6;
        let a = interpolate(&s, t).unwrap();
        let b = interpolate(&s, (t + h).min(s.end())).unwrap();
        // slope is bounded by 180 degrees over the shortest segment
        let bound = 180.0 / 0.05 * h + 1e-9;
        for j in 0..LINKS {
            prop_assert!((a[0][j] - b[0][j]).abs() <= bound);
        }
        for (k, q) in s.keyframes.iter().zip(&qs) {
            prop_assert_eq!(&interpolate(&s, k.t).unwrap()[0], q);
        }
    }

    #[test]
    fn serpentine_planes_and_bound(ax in 0.0..60.0f64, ay in 0.0..60.0f64, wx in 0.1..5.0f64, dx in -2.0..2.0f64, t in 0.0..20.0f64) {
        let p = SerpentineParams { amp_x: ax, amp_y: 0.0, omega_x: wx, delta_x: dx, ..Default::default() };
        for n in [1, 3, 5] {
            prop_assert_eq!(serpentine_angle(&p, n, t).unwrap(), 0.0);
        }
        let p = SerpentineParams { amp_y: ay, ..p };
        for n in 0..LINKS {
            prop_assert!(serpentine_angle(&p, n, t).unwrap().abs() <= ax.max(ay) + 1e-9);
        }
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec(pose(), 1..20)) {
        let mut t = Trajectory::new(50.0);
        for (i, q) in rows.iter().enumerate() {
            t.samples.push(Sample { t: i as f64 / 50.0, q: vec![q.map(|v| (v * 1e6).round() / 1e6)] });
        }
        let back = Trajectory::from_csv(&t.to_csv()).unwrap();
        prop_assert_eq!(back.samples, t.samples);
    }
}
