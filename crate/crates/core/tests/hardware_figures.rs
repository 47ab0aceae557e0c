//! Figures measured on the physical robot.

use requbis::docking::{attempt_dock, DockLimits, DockPhase, DockState, RelativePose};
use requbis::gaits::*;
use requbis::stability::{evaluate_pose, validate_trajectory, Contact, ContactKind};
use requbis::transitions::*;
use requbis::RobotModel;

const MEASURED_STRIDE_MM: f64 = 110.0;

#[test]
fn crawl_stride_near_eleven_cm() {
    let m = RobotModel::default();
    let out = quadruped_crawl_cycle([&m, &m], &CrawlParams::default(), 50.0).unwrap();
    let r = out.report(&[&m, &m]).unwrap();
    assert!(r.is_stable(), "{}", r.summary());
    for c in &out.schedule {
        assert!(c.iter().filter(|c| c.kind == ContactKind::Foot).count() >= 3);
    }
    let d = out.displacement.unwrap();
    let axis = quadruped_long_axis();
    let angle = (d.dot(&axis) / d.norm()).acos().to_degrees();
    assert!(angle < 5.0, "heading off axis by {angle}");
    assert!((d.norm() - MEASURED_STRIDE_MM).abs() <= 0.3 * MEASURED_STRIDE_MM, "stride {}", d.norm());
}

fn first_unstable_lift(m: &RobotModel) -> Option<f64> {
    (0..=45).map(f64::from).find(|&th| {
        let p = BipedParams { lift_angle: th, ..Default::default() };
        !biped_walk_cycle(m, &p, 50.0).unwrap().report(&[m]).unwrap().is_stable()
    })
}

#[test]
fn biped_stable_up_to_twenty_degrees() {
    let m = RobotModel::default();
    let first = first_unstable_lift(&m).unwrap();
    assert!((15.0..=25.0).contains(&first), "first unstable lift {first}");
    assert_eq!(first, 21.0);
    let safe = biped_walk_cycle(&m, &BipedParams::default(), 50.0).unwrap();
    assert_eq!(BipedParams::default().lift_angle, 15.0);
    assert!(safe.report(&[&m]).unwrap().is_stable());
}

#[test]
fn transitions_stay_stable_and_in_limits() {
    let m = RobotModel::default();
    let s = snake_to_biped_script();
    let f2 = &s.keyframes[1].q[0];
    assert_eq!((f2[0], f2[6], f2[3]), (90.0, 90.0, 5.0));
    for s in [snake_to_biped_script(), snakes_to_quadruped_script()] {
        let (t, sch) = s.sample(50.0).unwrap();
        t.check(&m).unwrap();
        let models = vec![&m; t.agents()];
        let r = validate_trajectory(&models, &t, &sch).unwrap();
        assert!(r.is_stable(), "{:?}->{:?}: {}", s.source, s.target, r.summary());
    }
}

#[test]
fn long_stance_has_more_support_area() {
    let m = RobotModel::default();
    let long = stance_area([&m, &m], &QUADRUPED_STANCE).unwrap();
    let cross = stance_area([&m, &m], &CROSS_AXIS_STANCE).unwrap();
    assert!(long > cross, "long {long} cross {cross}");
    let feet = [Contact::foot(0, 0), Contact::foot(0, 1), Contact::foot(1, 0), Contact::foot(1, 1)];
    let margin = |q| evaluate_pose(&[&m, &m], &[q, mirror(&q)], &feet).unwrap().margin;
    assert!(margin(QUADRUPED_STANCE) > margin(CROSS_AXIS_STANCE));
}

#[test]
fn docking_needs_five_mm_alignment() {
    let limits = DockLimits::default();
    for axis in 0..3 {
        for (d, ok) in [(4.99, true), (5.01, false)] {
            let mut t = [0.0; 3];
            t[axis] = d;
            let s = DockState::new(RelativePose { translation: t, yaw_deg: 0.0 });
            let r = attempt_dock(&s, &limits);
            assert_eq!(r.is_ok(), ok);
            if let Ok(e) = r {
                assert_eq!(e.phase, DockPhase::Engaged);
            }
        }
    }
}
