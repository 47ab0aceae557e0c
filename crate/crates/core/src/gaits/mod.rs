//! Joint trajectories for the snake, quadruped and biped gaits.

pub(crate) mod tables;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{default_dh, ConfigurationMode, JointVector, RobotModel, LINKS};
use crate::stability::{evaluate_pose, place_agents, validate_trajectory, Contact, StabilityError, StabilityReport};
use crate::trajectory::{sample_times, Sample, Trajectory};
use crate::transitions::{
    four_feet, mirror, roll_contacts, stand_contacts, TransitionError, TransitionScript, BIPED_STANCE, PATH_ROW,
    QUADRUPED_STANCE,
};
use tables::*;

#[derive(Debug, Error, PartialEq)]
pub enum GaitError {
    #[error("joint index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("gait tables are built for the default link geometry")]
    Geometry,
    #[error("unstable at t = {t:.3} s (margin {margin:.3} mm)")]
    Unstable { t: f64, margin: f64 },
    #[error("joint {joint} outside limits at t = {t:.3} s")]
    Limit { t: f64, joint: usize },
    #[error(transparent)]
    Script(#[from] TransitionError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// θ = acos((2/3) cos φ), in degrees.
pub fn terminal_angle_modifier(phi_deg: f64) -> f64 {
    ((2.0 / 3.0) * phi_deg.to_radians().cos()).acos().to_degrees()
}

/// Modifier relative to its value at φ = 0, odd in φ.
fn modified(phi_deg: f64) -> f64 {
    phi_deg.signum() * (terminal_angle_modifier(phi_deg) - terminal_angle_modifier(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SerpentineParams {
    /// Even (lateral) joints, degrees.
    pub amp_x: f64,
    /// Odd (vertical) joints, degrees.
    pub amp_y: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub phi_plane: f64,
}

impl Default for SerpentineParams {
    fn default() -> Self {
        SerpentineParams { amp_x: 30.0, amp_y: 30.0, omega_x: 2.0, omega_y: 2.0, delta_x: 1.0, delta_y: 1.0, phi_plane: 0.0 }
    }
}

impl SerpentineParams {
    pub fn validate(&self) -> Result<(), GaitError> {
        for (name, a) in [("amp_x", self.amp_x), ("amp_y", self.amp_y)] {
            if !(0.0..=90.0).contains(&a) {
                return Err(GaitError::Params(format!("{name} = {a} outside [0, 90]")));
            }
        }
        let rest = [self.omega_x, self.omega_y, self.delta_x, self.delta_y, self.phi_plane];
        if rest.iter().any(|v| !v.is_finite()) {
            return Err(GaitError::Params("non-finite wave parameter".into()));
        }
        Ok(())
    }

    pub fn rolling(self) -> Self {
        SerpentineParams { delta_x: 0.0, delta_y: 0.0, phi_plane: std::f64::consts::FRAC_PI_2, ..self }
    }
}

/// Command for joint `n` at time `t`. Terminal joints stay at zero; the
/// joints next to them carry the terminal-link modifier.
pub fn serpentine_angle(p: &SerpentineParams, n: usize, t: f64) -> Result<f64, GaitError> {
    if n >= LINKS {
        return Err(GaitError::IndexOutOfRange(n));
    }
    let k = n as f64;
    Ok(match n {
        0 | 6 => 0.0,
        _ if n.is_multiple_of(2) => p.amp_x * (p.omega_x * t + k * p.delta_x).sin(),
        _ => {
            let v = p.amp_y * (p.omega_y * t + k * p.delta_y + p.phi_plane).sin();
            if n == 1 || n == 5 {
                modified(v)
            } else {
                v
            }
        }
    })
}

pub fn serpentine_pose(p: &SerpentineParams, t: f64) -> JointVector {
    std::array::from_fn(|n| serpentine_angle(p, n, t).expect("index in range"))
}

pub fn rolling_gait(p: &SerpentineParams, t: f64) -> JointVector {
    serpentine_pose(&p.rolling(), t)
}

fn sampled(duration: f64, rate: f64, f: impl Fn(f64) -> JointVector) -> Trajectory {
    Trajectory { rate, samples: sample_times(duration, rate).map(|t| Sample { t, q: vec![f(t)] }).collect() }
}

pub fn serpentine_gait(p: &SerpentineParams, duration: f64, rate: f64) -> Trajectory {
    sampled(duration, rate, |t| serpentine_pose(p, t))
}

pub fn rolling_trajectory(p: &SerpentineParams, duration: f64, rate: f64) -> Trajectory {
    sampled(duration, rate, |t| rolling_gait(p, t))
}

/// A sampled gait with the contact set in force at every sample.
#[derive(Debug, Clone)]
pub struct GaitOutput {
    pub mode: ConfigurationMode,
    pub trajectory: Trajectory,
    pub schedule: Vec<Vec<Contact>>,
    /// Net body displacement per cycle in the center-link frame (mm).
    pub displacement: Option<Vector3<f64>>,
}

impl GaitOutput {
    pub fn report(&self, models: &[&RobotModel]) -> Result<StabilityReport, StabilityError> {
        validate_trajectory(models, &self.trajectory, &self.schedule)
    }

    /// Fails on the first joint-limit or stability violation.
    pub fn require_valid(&self, models: &[&RobotModel]) -> Result<StabilityReport, GaitError> {
        for s in &self.trajectory.samples {
            for q in &s.q {
                if let Some(joint) = models[0].first_limit_violation(q) {
                    return Err(GaitError::Limit { t: s.t, joint });
                }
            }
        }
        let r = self.report(models)?;
        if let Some(v) = r.first_violation() {
            return Err(GaitError::Unstable { t: v.t, margin: v.margin });
        }
        Ok(r)
    }
}

fn check_geometry(model: &RobotModel) -> Result<(), GaitError> {
    if model.dh == default_dh() {
        Ok(())
    } else {
        Err(GaitError::Geometry)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    ARear,
    AFront,
    BRear,
    BFront,
}

impl Leg {
    fn agent(self) -> usize {
        matches!(self, Leg::BRear | Leg::BFront) as usize
    }

    fn foot(self) -> usize {
        matches!(self, Leg::AFront | Leg::BFront) as usize
    }
}

/// Knee angle (q1) that lifts a rear foot 20 mm from the stance.
pub const REAR_LIFT_Q1: f64 = -26.5148;
/// Knee and ankle (q5, q6) that lift a front foot 20 mm from the stance.
pub const FRONT_LIFT_Q56: [f64; 2] = [32.2794, -85.798];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrawlParams {
    /// Hip yaw per step from the pre-step angle, degrees.
    pub hip_sweep: f64,
    pub leg_order: [Leg; 4],
    /// Seconds for lift, swing, place and the simultaneous hip return.
    pub phase_durations: [f64; 4],
}

impl Default for CrawlParams {
    fn default() -> Self {
        CrawlParams {
            hip_sweep: 45.0,
            leg_order: [Leg::ARear, Leg::AFront, Leg::BRear, Leg::BFront],
            phase_durations: [0.5, 1.0, 0.5, 1.0],
        }
    }
}

impl CrawlParams {
    pub fn validate(&self) -> Result<(), GaitError> {
        if !(self.hip_sweep >= 0.0 && self.hip_sweep <= 90.0) {
            return Err(GaitError::Params(format!("hip_sweep = {} outside [0, 90]", self.hip_sweep)));
        }
        if self.phase_durations.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(GaitError::Params("phase durations must be positive".into()));
        }
        let mut seen = [false; 4];
        for l in self.leg_order {
            seen[l.agent() * 2 + l.foot()] = true;
        }
        if seen.contains(&false) {
            return Err(GaitError::Params("leg_order must name every leg once".into()));
        }
        Ok(())
    }
}

fn feet(models: &[&RobotModel; 2], q: &[JointVector]) -> [Vector3<f64>; 4] {
    let p = place_agents(models, q);
    [p[0].joint(0), p[0].joint(LINKS), p[1].joint(0), p[1].joint(LINKS)]
}

/// Keyframes of one crawl cycle, poses as [agent A, agent B].
pub fn crawl_script(p: &CrawlParams) -> Result<TransitionScript, GaitError> {
    p.validate()?;
    let [lift, swing, place, shift] = p.phase_durations;
    let mut s = TransitionScript::new(ConfigurationMode::Quadruped, ConfigurationMode::Quadruped);
    // agent B is tracked in A's convention and mirrored when emitted
    let mut legs = [QUADRUPED_STANCE; 2];
    let emit = |l: &[JointVector; 2]| vec![l[0], mirror(&l[1])];
    let without = |leg: Leg| -> Vec<Contact> {
        four_feet().into_iter().filter(|c| !(c.agent == leg.agent() && c.index == leg.foot())).collect()
    };
    s.push(0.0, emit(&legs), without(p.leg_order[0]));
    for (i, &leg) in p.leg_order.iter().enumerate() {
        let contacts = without(leg);
        let q = &mut legs[leg.agent()];
        let before = *q;
        if leg.foot() == 0 {
            q[1] = REAR_LIFT_Q1;
        } else {
            [q[5], q[6]] = FRONT_LIFT_Q56;
        }
        s.push(lift, emit(&legs), contacts.clone());
        let q = &mut legs[leg.agent()];
        if leg.foot() == 0 {
            q[2] -= p.hip_sweep;
        } else {
            q[4] += p.hip_sweep;
        }
        s.push(swing, emit(&legs), contacts);
        let q = &mut legs[leg.agent()];
        for j in [0, 1, 5, 6] {
            q[j] = before[j];
        }
        let next = p.leg_order.get(i + 1).map_or_else(four_feet, |&n| without(n));
        s.push(place, emit(&legs), next);
    }
    s.push(shift, emit(&[QUADRUPED_STANCE; 2]), four_feet());
    Ok(s)
}

/// One crawl cycle from the quadruped stance. The reported displacement
/// assumes the stance feet do not slip during the hip return.
pub fn quadruped_crawl_cycle(models: [&RobotModel; 2], p: &CrawlParams, rate: f64) -> Result<GaitOutput, GaitError> {
    check_geometry(models[0])?;
    check_geometry(models[1])?;
    let script = crawl_script(p)?;
    let (trajectory, schedule) = script.sample(rate)?;
    let n = script.keyframes.len();
    let before = feet(&models, &script.keyframes[n - 2].q);
    let after = feet(&models, &script.keyframes[n - 1].q);
    let d = (0..4).map(|i| before[i] - after[i]).sum::<Vector3<f64>>() / 4.0;
    Ok(GaitOutput { mode: ConfigurationMode::Quadruped, trajectory, schedule, displacement: Some(d) })
}

/// Long body axis of the docked pair in the center-link frame: both agents'
/// bodies run along their center links.
pub fn quadruped_long_axis() -> Vector3<f64> {
    Vector3::x()
}

/// Stance with the hip yaws at zero: every leg stays in its own agent's
/// vertical plane, so the feet sit on two lines one module width apart.
pub const CROSS_AXIS_STANCE: JointVector =
    [QUADRUPED_STANCE[0], QUADRUPED_STANCE[1], 0.0, 0.0, 0.0, QUADRUPED_STANCE[5], QUADRUPED_STANCE[6]];

/// Support polygon area (mm^2) of a four-foot pair stance given agent A's pose.
pub fn stance_area(models: [&RobotModel; 2], q: &JointVector) -> Result<f64, StabilityError> {
    let e = evaluate_pose(&models, &[*q, mirror(q)], &four_feet())?;
    Ok(e.polygon.area())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepDurations {
    pub lift: f64,
    pub advance: f64,
    pub hover: f64,
    pub place: f64,
    /// Per row of the double-support roll paths.
    pub roll_row: f64,
}

impl Default for StepDurations {
    fn default() -> Self {
        StepDurations { lift: 0.5, advance: 0.5, hover: 0.5, place: 0.5, roll_row: PATH_ROW }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BipedParams {
    /// Swing-joint advance, degrees.
    pub lift_angle: f64,
    pub stability_limit: f64,
    pub step_durations: StepDurations,
}

impl Default for BipedParams {
    fn default() -> Self {
        BipedParams { lift_angle: 15.0, stability_limit: 20.0, step_durations: StepDurations::default() }
    }
}

impl BipedParams {
    /// Range checks only; lifts past `stability_limit` are allowed so the
    /// limit itself can be probed.
    pub fn validate(&self) -> Result<(), GaitError> {
        if !(0.0..=90.0).contains(&self.lift_angle) {
            return Err(GaitError::Params(format!("lift_angle = {} outside [0, 90]", self.lift_angle)));
        }
        if !(self.stability_limit > 0.0) {
            return Err(GaitError::Params("stability_limit must be positive".into()));
        }
        let d = self.step_durations;
        if [d.lift, d.advance, d.hover, d.place, d.roll_row].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(GaitError::Params("step durations must be positive".into()));
        }
        Ok(())
    }

    pub fn within_limit(&self) -> bool {
        self.lift_angle < self.stability_limit
    }
}

fn offset(q: &JointVector, joints: [usize; 2], by: [f64; 2]) -> JointVector {
    let mut out = *q;
    out[joints[0]] += by[0];
    out[joints[1]] += by[1];
    out
}

/// From the biped stance back along the flat-foot path and the far roll to
/// the start of the cycle (link 6 vertical on its tip).
pub fn biped_entry(p: &BipedParams) -> TransitionScript {
    let row = p.step_durations.roll_row;
    let mut s = TransitionScript::new(ConfigurationMode::Biped, ConfigurationMode::Biped);
    s.push(0.0, vec![BIPED_STANCE], stand_contacts());
    for q in STAND_PATH.iter().rev().skip(1) {
        s.push(row, vec![*q], stand_contacts());
    }
    push_roll_back(&mut s, &ROLL_FAR, row, row);
    s
}

/// Appends `table` in reverse; `first` is the time to reach its last row.
fn push_roll_back(s: &mut TransitionScript, table: &[JointVector], first: f64, row: f64) {
    let last = table.len() - 1;
    s.push(first, vec![table[last]], roll_contacts(last - 1));
    for i in (0..last).rev() {
        s.push(row, vec![table[i]], roll_contacts(i.saturating_sub(1)));
    }
}

/// One walking cycle starting and ending on the far-roll start pose. Each
/// step: lift, advance the swing joint by `lift_angle`, hover, place, then
/// roll the weight onto the new stance. A zero lift marches in place.
pub fn biped_cycle_script(p: &BipedParams) -> TransitionScript {
    let d = p.step_durations;
    let th = p.lift_angle;
    let (near, right_near, left_near) =
        if th == 0.0 { (&ROLL_FAR, LIFT_RIGHT_FAR, LIFT_LEFT_FAR) } else { (&ROLL_NEAR, LIFT_RIGHT_NEAR, LIFT_LEFT_NEAR) };
    let left = vec![Contact::foot(0, 0)];
    let right = vec![Contact::link(0, 6)];
    let mut s = TransitionScript::new(ConfigurationMode::Biped, ConfigurationMode::Biped);
    let k0 = ROLL_FAR[0];
    s.push(0.0, vec![k0], left.clone());
    let lifted = offset(&k0, [5, 6], LIFT_RIGHT_FAR);
    s.push(d.lift, vec![lifted], left.clone());
    let mut adv = lifted;
    adv[5] += th;
    s.push(d.advance, vec![adv], left.clone());
    s.push(d.hover, vec![offset(&near[0], [5, 6], right_near)], left);
    s.push(d.place, vec![near[0]], roll_contacts(0));
    for (i, q) in near.iter().enumerate().skip(1) {
        s.push(d.roll_row, vec![*q], roll_contacts(i));
    }
    s.keyframes.last_mut().unwrap().contacts = right.clone();
    let end = near[near.len() - 1];
    let lifted = offset(&end, [1, 3], left_near);
    s.push(d.lift, vec![lifted], right.clone());
    let mut adv = lifted;
    adv[1] -= th;
    s.push(d.advance, vec![adv], right.clone());
    s.push(d.hover, vec![offset(&ROLL_FAR[ROLL_FAR.len() - 1], [1, 3], LIFT_LEFT_FAR)], right);
    push_roll_back(&mut s, &ROLL_FAR, d.place, d.roll_row);
    s
}

/// Entry from the stance plus `cycles` walking cycles.
pub fn biped_script(p: &BipedParams, cycles: usize) -> TransitionScript {
    let mut s = biped_entry(p);
    let cycle = biped_cycle_script(p);
    for _ in 0..cycles {
        s.extend(&cycle);
    }
    s
}

pub fn biped_walk_cycle(model: &RobotModel, p: &BipedParams, rate: f64) -> Result<GaitOutput, GaitError> {
    biped_walk(model, p, rate, None)
}

/// Biped walk sampled at `rate`. Without a duration the output covers the
/// entry and one cycle; otherwise enough cycles to fill `duration`.
pub fn biped_walk(model: &RobotModel, p: &BipedParams, rate: f64, duration: Option<f64>) -> Result<GaitOutput, GaitError> {
    check_geometry(model)?;
    p.validate()?;
    let entry = biped_entry(p).duration();
    let period = biped_cycle_script(p).duration();
    let (trajectory, schedule) = match duration {
        None => biped_script(p, 1).sample(rate)?,
        Some(d) => {
            let cycles = ((d - entry) / period).ceil().max(1.0) as usize;
            let s = biped_script(p, cycles);
            let end = s.end();
            s.sample_at(sample_times(d, rate).map(|t| t.min(end)), rate)?
        }
    };
    Ok(GaitOutput { mode: ConfigurationMode::Biped, trajectory, schedule, displacement: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn modifier_values() {
        assert_abs_diff_eq!(terminal_angle_modifier(90.0), 90.0, epsilon = 1e-12);
        assert_abs_diff_eq!(terminal_angle_modifier(0.0), 48.1897, epsilon = 1e-4);
        assert_abs_diff_eq!(terminal_angle_modifier(60.0), 70.5288, epsilon = 1e-4);
        for d in 0..90 {
            assert!(terminal_angle_modifier(d as f64 + 1.0) > terminal_angle_modifier(d as f64));
            assert_eq!(terminal_angle_modifier(d as f64), terminal_angle_modifier(-(d as f64)));
        }
    }

    #[test]
    fn terminals_pinned() {
        let p = SerpentineParams::default();
        for i in 0..100 {
            let q = serpentine_pose(&p, i as f64 * 0.07);
            assert_eq!((q[0], q[6]), (0.0, 0.0));
        }
        assert_eq!(serpentine_angle(&p, 7, 0.0), Err(GaitError::IndexOutOfRange(7)));
    }

    #[test]
    fn even_joints_zero_at_start_without_phase() {
        let p = SerpentineParams { delta_x: 0.0, ..Default::default() };
        let q = serpentine_pose(&p, 0.0);
        assert_eq!([q[0], q[2], q[4], q[6]], [0.0; 4]);
    }

    #[test]
    fn rolling_zero_amplitude() {
        let p = SerpentineParams { amp_x: 0.0, amp_y: 0.0, ..Default::default() };
        assert_eq!(rolling_gait(&p, 1.3), [0.0; 7]);
    }

    #[test]
    fn crawl_order_must_be_permutation() {
        let p = CrawlParams { leg_order: [Leg::ARear; 4], ..Default::default() };
        assert!(matches!(p.validate(), Err(GaitError::Params(_))));
    }

    #[test]
    fn crawl_keeps_three_feet() {
        let m = RobotModel::default();
        let out = quadruped_crawl_cycle([&m, &m], &CrawlParams::default(), 50.0).unwrap();
        assert!(out.schedule.iter().all(|c| c.len() >= 3));
        assert_eq!(out.trajectory.samples[0].q, vec![QUADRUPED_STANCE, mirror(&QUADRUPED_STANCE)]);
    }

    #[test]
    fn biped_cycle_is_closed() {
        let s = biped_cycle_script(&BipedParams::default());
        assert_eq!(s.keyframes.first().unwrap().q, s.keyframes.last().unwrap().q);
        s.validate(&RobotModel::default()).unwrap();
        let e = biped_entry(&BipedParams::default());
        assert_eq!(e.keyframes.last().unwrap().q, s.keyframes[0].q);
    }

    #[test]
    fn other_geometry_rejected() {
        let mut m = RobotModel::default();
        m.dh[0].a = 100.0;
        assert!(matches!(biped_walk_cycle(&m, &BipedParams::default(), 50.0), Err(GaitError::Geometry)));
    }
}
