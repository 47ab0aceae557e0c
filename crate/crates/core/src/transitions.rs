//! Keyframe interpolation and the scripted mode transitions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::docking::{DockPhase, DockState};
use crate::gaits::tables::{ROLL_FAR, STAND_PATH};
use crate::model::{ConfigurationMode, JointVector, RobotModel, LINKS};
use crate::stability::Contact;
use crate::trajectory::{Sample, Trajectory};

pub const SNAKE_POSE: JointVector = [0.0; LINKS];
/// Biped standing pose: both extreme joints at 90, link 6 flat on the ground.
pub const BIPED_STANCE: JointVector = STAND_PATH[STAND_PATH.len() - 1];
/// Agent A of the docked quadruped stance; agent B is [`mirror`]ed.
pub const QUADRUPED_STANCE: JointVector = [38.6822, -38.6822, -45.0, 0.0, -70.0, 19.4844, -77.5181];
pub const DEFAULT_SEGMENT: f64 = 1.0;
/// Time per row when following a precomputed path.
pub const PATH_ROW: f64 = 0.05;
/// Frame-2 pose of the biped transition: extreme joints 90, center 5.
pub const BIPED_FRAME2: JointVector = [90.0, 0.0, 0.0, 5.0, 0.0, 0.0, 90.0];
/// Row of the far roll path where the rise joins it.
const RISE_ROW: usize = 18;
/// First roll row with link 6 flat.
pub(crate) const FLAT_ROW: usize = 45;

/// Rounds keyframe times to 1 ns so long scripts do not accumulate drift.
fn snap(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

/// Agent B's pose for a given agent A pose: yaw joints negated.
pub fn mirror(q: &JointVector) -> JointVector {
    let mut m = *q;
    m[2] = -m[2];
    m[4] = -m[4];
    m
}

#[derive(Debug, Error, PartialEq)]
pub enum TransitionError {
    #[error("script has no keyframes")]
    Empty,
    #[error("keyframe {index}: time not strictly increasing")]
    NotIncreasing { index: usize },
    #[error("keyframe {index}: expected {expected} agents")]
    AgentCount { index: usize, expected: usize },
    #[error("keyframe {index}: joint {joint} of agent {agent} outside limits")]
    Limit { index: usize, agent: usize, joint: usize },
    #[error("t = {t} outside [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("docking state is {0:?}, expected engaged")]
    NotEngaged(DockPhase),
    #[error("bad script: {0}")]
    Parse(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Poses {
    One(JointVector),
    Many(Vec<JointVector>),
}

fn ser_q<S: Serializer>(q: &[JointVector], s: S) -> Result<S::Ok, S::Error> {
    match q {
        [one] => Poses::One(*one).serialize(s),
        many => Poses::Many(many.to_vec()).serialize(s),
    }
}

fn de_q<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<JointVector>, D::Error> {
    Ok(match Poses::deserialize(d)? {
        Poses::One(q) => vec![q],
        Poses::Many(v) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t: f64,
    /// One pose per agent. A single vector is accepted in JSON.
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub q: Vec<JointVector>,
    /// Ground contacts for the segment that starts here.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contacts: Vec<Contact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionScript {
    pub source: ConfigurationMode,
    pub target: ConfigurationMode,
    pub keyframes: Vec<Keyframe>,
}

impl TransitionScript {
    pub fn new(source: ConfigurationMode, target: ConfigurationMode) -> Self {
        TransitionScript { source, target, keyframes: Vec::new() }
    }

    /// Appends a keyframe `dt` after the last one (or at 0).
    pub fn push(&mut self, dt: f64, q: Vec<JointVector>, contacts: Vec<Contact>) {
        let t = self.keyframes.last().map_or(0.0, |k| snap(k.t + dt));
        self.keyframes.push(Keyframe { t, q, contacts });
    }

    /// Appends all keyframes of `other` after the current end.
    pub fn extend(&mut self, other: &TransitionScript) {
        let (Some(first), Some(end)) = (other.keyframes.first(), self.keyframes.last().map(|k| k.t)) else {
            self.keyframes.extend(other.keyframes.iter().cloned());
            return;
        };
        let shift = end - first.t;
        let skip = usize::from(self.keyframes.last().map(|k| &k.q) == Some(&first.q));
        if skip == 1 {
            self.keyframes.last_mut().unwrap().contacts = first.contacts.clone();
        }
        for k in &other.keyframes[skip..] {
            self.keyframes.push(Keyframe { t: snap(k.t + shift + if skip == 1 { 0.0 } else { DEFAULT_SEGMENT }), ..k.clone() });
        }
    }

    pub fn start(&self) -> f64 {
        self.keyframes.first().map_or(0.0, |k| k.t)
    }

    pub fn end(&self) -> f64 {
        self.keyframes.last().map_or(0.0, |k| k.t)
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn agents(&self) -> usize {
        self.keyframes.first().map_or(1, |k| k.q.len())
    }

    pub fn validate(&self, model: &RobotModel) -> Result<(), TransitionError> {
        let first = self.keyframes.first().ok_or(TransitionError::Empty)?;
        let expected = first.q.len();
        for (index, k) in self.keyframes.iter().enumerate() {
            if index > 0 && !(k.t > self.keyframes[index - 1].t) {
                return Err(TransitionError::NotIncreasing { index });
            }
            if k.q.len() != expected || expected == 0 {
                return Err(TransitionError::AgentCount { index, expected });
            }
            for (agent, q) in k.q.iter().enumerate() {
                if let Some(joint) = model.first_limit_violation(q) {
                    return Err(TransitionError::Limit { index, agent, joint });
                }
            }
        }
        Ok(())
    }

    /// Index of the segment containing `t` (the last keyframe for `t = end`).
    fn segment(&self, t: f64) -> usize {
        self.keyframes.partition_point(|k| k.t <= t).saturating_sub(1)
    }

    pub fn contacts_at(&self, t: f64) -> &[Contact] {
        &self.keyframes[self.segment(t)].contacts
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TransitionError> {
        serde_json::from_str(text).map_err(|e| TransitionError::Parse(e.to_string()))
    }

    /// Samples at `rate` Hz from start to end inclusive, with the contact set
    /// in force at each sample.
    pub fn sample(&self, rate: f64) -> Result<(Trajectory, Vec<Vec<Contact>>), TransitionError> {
        let n = (self.duration() * rate).round() as usize;
        let times = (0..=n).map(|i| (self.start() + i as f64 / rate).min(self.end()));
        self.sample_at(times, rate)
    }

    pub fn sample_at(
        &self,
        times: impl IntoIterator<Item = f64>,
        rate: f64,
    ) -> Result<(Trajectory, Vec<Vec<Contact>>), TransitionError> {
        let mut traj = Trajectory::new(rate);
        let mut schedule = Vec::new();
        for t in times {
            if traj.samples.last().is_some_and(|s: &Sample| s.t >= t) {
                continue;
            }
            traj.samples.push(Sample { t, q: interpolate(self, t)? });
            schedule.push(self.contacts_at(t).to_vec());
        }
        Ok((traj, schedule))
    }
}

/// Joint-space linear interpolation between the keyframes around `t`.
pub fn interpolate(script: &TransitionScript, t: f64) -> Result<Vec<JointVector>, TransitionError> {
    let ks = &script.keyframes;
    if ks.is_empty() {
        return Err(TransitionError::Empty);
    }
    let (start, end) = (script.start(), script.end());
    if !(t >= start && t <= end) {
        return Err(TransitionError::OutOfRange { t, start, end });
    }
    let i = script.segment(t);
    let a = &ks[i];
    if a.t == t || i + 1 == ks.len() {
        return Ok(a.q.clone());
    }
    let b = &ks[i + 1];
    let s = (t - a.t) / (b.t - a.t);
    Ok(a.q.iter().zip(&b.q).map(|(x, y)| std::array::from_fn(|j| x[j] + (y[j] - x[j]) * s)).collect())
}

pub fn require_engaged(state: &DockState) -> Result<(), TransitionError> {
    match state.phase {
        DockPhase::Engaged => Ok(()),
        p => Err(TransitionError::NotEngaged(p)),
    }
}

fn left_foot() -> Contact {
    Contact::foot(0, 0)
}

/// Double-support contacts for a roll row: link-6 tip while tilted, the whole
/// strip once flat.
pub(crate) fn roll_contacts(row: usize) -> Vec<Contact> {
    if row >= FLAT_ROW {
        vec![left_foot(), Contact::link(0, 6)]
    } else {
        vec![left_foot(), Contact::joint(0, LINKS)]
    }
}

pub(crate) fn stand_contacts() -> Vec<Contact> {
    vec![left_foot(), Contact::link(0, 6)]
}

/// Straight snake to biped stance. The body folds up on the block edge and the
/// link-6 tip, joins the double-support roll path, lays link 6 flat and then
/// straightens both extreme joints to 90.
pub fn snake_to_biped_script() -> TransitionScript {
    let mut s = TransitionScript::new(ConfigurationMode::Snake, ConfigurationMode::Biped);
    let edges = vec![Contact::joint(0, 0), Contact::joint(0, LINKS)];
    s.push(0.0, vec![SNAKE_POSE], edges.clone());
    s.push(DEFAULT_SEGMENT, vec![BIPED_FRAME2], edges.clone());
    s.push(DEFAULT_SEGMENT, vec![ROLL_FAR[RISE_ROW]], roll_contacts(RISE_ROW));
    for (row, q) in ROLL_FAR.iter().enumerate().skip(RISE_ROW + 1) {
        s.push(PATH_ROW, vec![*q], roll_contacts(row));
    }
    for q in STAND_PATH {
        s.push(PATH_ROW, vec![q], stand_contacts());
    }
    s
}

/// Two docked straight snakes to the quadruped stance: swing the hip yaws
/// while lying, then bring up the rear legs, then the front legs.
pub fn snakes_to_quadruped_script() -> TransitionScript {
    let mut s = TransitionScript::new(ConfigurationMode::Snake, ConfigurationMode::Quadruped);
    let pair = |q: JointVector| vec![q, mirror(&q)];
    let lying: Vec<Contact> = (0..2).flat_map(|a| (0..LINKS).map(move |k| Contact::link(a, k))).collect();
    let mut yawed = SNAKE_POSE;
    yawed[2] = QUADRUPED_STANCE[2];
    yawed[4] = QUADRUPED_STANCE[4];
    let mut rear = yawed;
    rear[0] = QUADRUPED_STANCE[0];
    rear[1] = QUADRUPED_STANCE[1];
    s.push(0.0, pair(SNAKE_POSE), lying);
    s.push(DEFAULT_SEGMENT, pair(yawed), four_feet());
    s.push(DEFAULT_SEGMENT, pair(rear), four_feet());
    s.push(DEFAULT_SEGMENT, pair(QUADRUPED_STANCE), four_feet());
    s
}

pub(crate) fn four_feet() -> Vec<Contact> {
    vec![Contact::foot(0, 0), Contact::foot(0, 1), Contact::foot(1, 0), Contact::foot(1, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> TransitionScript {
        let mut s = TransitionScript::new(ConfigurationMode::Snake, ConfigurationMode::Snake);
        s.push(0.0, vec![[0.0; 7]], vec![]);
        s.push(2.0, vec![[10.0, -4.0, 0.0, 0.0, 0.0, 0.0, 8.0]], vec![]);
        s
    }

    #[test]
    fn endpoints_and_midpoint() {
        let s = two();
        assert_eq!(interpolate(&s, 0.0).unwrap(), vec![[0.0; 7]]);
        assert_eq!(interpolate(&s, 2.0).unwrap(), s.keyframes[1].q);
        assert_eq!(interpolate(&s, 1.0).unwrap(), vec![[5.0, -2.0, 0.0, 0.0, 0.0, 0.0, 4.0]]);
        assert!(matches!(interpolate(&s, 2.1), Err(TransitionError::OutOfRange { .. })));
        assert!(matches!(interpolate(&s, f64::NAN), Err(TransitionError::OutOfRange { .. })));
    }

    #[test]
    fn frame_two() {
        let s = snake_to_biped_script();
        assert_eq!(s.keyframes[0].q[0], SNAKE_POSE);
        let q = interpolate(&s, s.keyframes[1].t).unwrap()[0];
        assert_eq!((q[0], q[6], q[3]), (90.0, 90.0, 5.0));
        assert_eq!(s.keyframes.last().unwrap().q[0], BIPED_STANCE);
        assert_eq!((BIPED_STANCE[0], BIPED_STANCE[6]), (90.0, 90.0));
        s.validate(&RobotModel::default()).unwrap();
    }

    #[test]
    fn quadruped_script_shape() {
        let s = snakes_to_quadruped_script();
        s.validate(&RobotModel::default()).unwrap();
        assert_eq!(s.keyframes.last().unwrap().q, vec![QUADRUPED_STANCE, mirror(&QUADRUPED_STANCE)]);
        assert_eq!(s.duration(), 3.0);
    }

    #[test]
    fn json_round_trip() {
        let s = snake_to_biped_script();
        assert_eq!(TransitionScript::from_json(&s.to_json()).unwrap(), s);
        let user = r#"{"source":"snake","target":"snake","keyframes":[{"t":0,"q":[0,0,0,0,0,0,0]},{"t":1,"q":[[1,0,0,0,0,0,0]]}]}"#;
        let u = TransitionScript::from_json(user).unwrap();
        assert_eq!(u.keyframes[1].q, vec![[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]]);
    }

    #[test]
    fn validation_errors() {
        let m = RobotModel::default();
        let mut s = two();
        s.keyframes[1].t = 0.0;
        assert_eq!(s.validate(&m), Err(TransitionError::NotIncreasing { index: 1 }));
        let mut s = two();
        s.keyframes[1].q[0][3] = 95.0;
        assert_eq!(s.validate(&m), Err(TransitionError::Limit { index: 1, agent: 0, joint: 3 }));
        assert_eq!(TransitionScript::new(ConfigurationMode::Snake, ConfigurationMode::Biped).validate(&m), Err(TransitionError::Empty));
    }

    #[test]
    fn sampling_includes_end() {
        let (t, sch) = two().sample(50.0).unwrap();
        assert_eq!(t.len(), 101);
        assert_eq!(sch.len(), 101);
        assert_eq!(t.samples[100].t, 2.0);
    }

    #[test]
    fn engaged_precondition() {
        assert_eq!(require_engaged(&DockState::default()), Err(TransitionError::NotEngaged(DockPhase::Retracted)));
    }
}
