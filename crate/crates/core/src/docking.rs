//! Magnet and rack docking state machine for two agents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest centre-link offset that still lets the rack engage (mm).
pub const MAX_MISALIGNMENT_MM: f64 = 5.0;
pub const MAX_YAW_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DockPhase {
    Retracted,
    Deploying,
    Engaged,
}

/// Pose of agent B's center link relative to agent A's, after nominal spacing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelativePose {
    pub translation: [f64; 3],
    pub yaw_deg: f64,
}

impl RelativePose {
    pub fn misalignment(&self) -> f64 {
        let [x, y, z] = self.translation;
        (x * x + y * y + z * z).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DockLimits {
    pub max_misalignment_mm: f64,
    pub max_yaw_deg: f64,
}

impl Default for DockLimits {
    fn default() -> Self {
        DockLimits { max_misalignment_mm: MAX_MISALIGNMENT_MM, max_yaw_deg: MAX_YAW_DEG }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DockState {
    pub phase: DockPhase,
    /// Rack travel, 0 = enclosed, 1 = inserted into the partner.
    pub extension: f64,
    pub relative: RelativePose,
}

impl Default for DockState {
    fn default() -> Self {
        DockState { phase: DockPhase::Retracted, extension: 0.0, relative: RelativePose::default() }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DockError {
    #[error("misaligned along {axis}: {magnitude:.3} exceeds {limit:.3}")]
    Misaligned { axis: &'static str, magnitude: f64, limit: f64 },
    #[error("already engaged")]
    AlreadyEngaged,
    #[error("not engaged")]
    NotEngaged,
    #[error("rack is deploying")]
    Busy,
    #[error("rack is not deploying")]
    NotDeploying,
    #[error("invalid extension step {0}")]
    BadStep(f64),
    #[error("relative pose is not finite")]
    NonFinite,
}

const AXES: [&str; 3] = ["x", "y", "z"];

impl DockState {
    pub fn new(relative: RelativePose) -> Self {
        DockState { relative, ..Default::default() }
    }

    /// Structural invariants of the state machine.
    pub fn is_valid(&self, limits: &DockLimits) -> bool {
        let ext_ok = (0.0..=1.0).contains(&self.extension);
        let finite = self.relative.translation.iter().all(|v| v.is_finite()) && self.relative.yaw_deg.is_finite();
        let phase_ok = match self.phase {
            DockPhase::Retracted => self.extension == 0.0,
            DockPhase::Deploying => self.extension < 1.0 && aligned(&self.relative, limits).is_ok(),
            DockPhase::Engaged => {
                self.extension == 1.0 && self.relative.misalignment() == 0.0 && self.relative.yaw_deg == 0.0
            }
        };
        ext_ok && finite && phase_ok
    }

    /// Moves agent B while the rack is enclosed.
    pub fn set_relative(&mut self, relative: RelativePose) -> Result<(), DockError> {
        match self.phase {
            DockPhase::Retracted => {
                if !relative.translation.iter().all(|v| v.is_finite()) || !relative.yaw_deg.is_finite() {
                    return Err(DockError::NonFinite);
                }
                self.relative = relative;
                Ok(())
            }
            DockPhase::Deploying => Err(DockError::Busy),
            DockPhase::Engaged => Err(DockError::AlreadyEngaged),
        }
    }

    /// Starts pushing the rack out; requires alignment.
    pub fn begin_deploy(&mut self, limits: &DockLimits) -> Result<(), DockError> {
        match self.phase {
            DockPhase::Engaged => Err(DockError::AlreadyEngaged),
            DockPhase::Deploying => Err(DockError::Busy),
            DockPhase::Retracted => {
                aligned(&self.relative, limits)?;
                self.phase = DockPhase::Deploying;
                Ok(())
            }
        }
    }

    /// Advances the rack; reaching full travel engages and the magnets snap
    /// the residual offset to zero.
    pub fn extend(&mut self, step: f64) -> Result<(), DockError> {
        if self.phase != DockPhase::Deploying {
            return Err(DockError::NotDeploying);
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(DockError::BadStep(step));
        }
        self.extension = (self.extension + step).min(1.0);
        if self.extension >= 1.0 {
            self.extension = 1.0;
            self.phase = DockPhase::Engaged;
            self.relative = RelativePose::default();
        }
        Ok(())
    }
}

fn aligned(rel: &RelativePose, limits: &DockLimits) -> Result<(), DockError> {
    for (i, &v) in rel.translation.iter().enumerate() {
        if !(v.abs() <= limits.max_misalignment_mm) {
            return Err(DockError::Misaligned { axis: AXES[i], magnitude: v.abs(), limit: limits.max_misalignment_mm });
        }
    }
    let m = rel.misalignment();
    if !(m <= limits.max_misalignment_mm) {
        return Err(DockError::Misaligned { axis: "xyz", magnitude: m, limit: limits.max_misalignment_mm });
    }
    if !(rel.yaw_deg.abs() <= limits.max_yaw_deg) {
        return Err(DockError::Misaligned { axis: "yaw", magnitude: rel.yaw_deg.abs(), limit: limits.max_yaw_deg });
    }
    Ok(())
}

/// Full dock: Retracted → Deploying → Engaged. The input is left untouched on error.
pub fn attempt_dock(state: &DockState, limits: &DockLimits) -> Result<DockState, DockError> {
    let mut s = *state;
    s.begin_deploy(limits)?;
    s.extend(1.0)?;
    Ok(s)
}

/// Retracts the rack. The relative pose stays at the snapped (zero) offset.
pub fn undock(state: &DockState) -> Result<DockState, DockError> {
    if state.phase != DockPhase::Engaged {
        return Err(DockError::NotEngaged);
    }
    Ok(DockState { phase: DockPhase::Retracted, extension: 0.0, relative: state.relative })
}

/// One line of the dock event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DockEvent {
    pub t: f64,
    pub event: String,
    pub misalignment_mm: f64,
    pub yaw_deg: f64,
    pub result: String,
}

impl DockEvent {
    pub fn new(t: f64, event: &str, rel: &RelativePose, result: &str) -> Self {
        DockEvent {
            t,
            event: event.to_string(),
            misalignment_mm: rel.misalignment(),
            yaw_deg: rel.yaw_deg,
            result: result.to_string(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: f64) -> DockState {
        DockState::new(RelativePose { translation: [x, 0.0, 0.0], yaw_deg: 0.0 })
    }

    #[test]
    fn thresholds() {
        let l = DockLimits::default();
        let s = attempt_dock(&at(2.0), &l).unwrap();
        assert_eq!(s.phase, DockPhase::Engaged);
        assert_eq!(s.relative.misalignment(), 0.0);
        assert!(attempt_dock(&at(5.0), &l).is_ok());
        match attempt_dock(&at(6.0), &l) {
            Err(DockError::Misaligned { axis: "x", magnitude, .. }) => assert_eq!(magnitude, 6.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn combined_offset_counts() {
        let l = DockLimits::default();
        let s = DockState::new(RelativePose { translation: [4.0, 4.0, 0.0], yaw_deg: 0.0 });
        assert!(matches!(attempt_dock(&s, &l), Err(DockError::Misaligned { axis: "xyz", .. })));
        let s = DockState::new(RelativePose { translation: [0.0; 3], yaw_deg: 5.5 });
        assert!(matches!(attempt_dock(&s, &l), Err(DockError::Misaligned { axis: "yaw", .. })));
    }

    #[test]
    fn undock_sequence() {
        let l = DockLimits::default();
        let e = attempt_dock(&at(1.0), &l).unwrap();
        assert_eq!(attempt_dock(&e, &l), Err(DockError::AlreadyEngaged));
        let r = undock(&e).unwrap();
        assert_eq!(r.phase, DockPhase::Retracted);
        assert_eq!(undock(&r), Err(DockError::NotEngaged));
        assert_eq!(attempt_dock(&r, &l).unwrap(), e);
    }

    #[test]
    fn staged_deploy() {
        let l = DockLimits::default();
        let mut s = at(3.0);
        s.begin_deploy(&l).unwrap();
        s.extend(0.4).unwrap();
        assert_eq!(s.phase, DockPhase::Deploying);
        assert!(s.is_valid(&l));
        assert_eq!(s.set_relative(RelativePose::default()), Err(DockError::Busy));
        assert_eq!(s.extend(-1.0), Err(DockError::BadStep(-1.0)));
        s.extend(0.7).unwrap();
        assert_eq!(s.phase, DockPhase::Engaged);
        assert!(s.is_valid(&l));
    }

    #[test]
    fn event_line() {
        let e = DockEvent::new(0.0, "dock", &RelativePose { translation: [3.0, 4.0, 0.0], yaw_deg: 1.0 }, "engaged");
        assert_eq!(e.to_json_line(), r#"{"t":0.0,"event":"dock","misalignment_mm":5.0,"yaw_deg":1.0,"result":"engaged"}"#);
    }
}
