//! Robot description: DH rows, limits, masses and foot geometry.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LINKS: usize = 7;

/// Seven joint angles in degrees, indexed from the base.
pub type JointVector = [f64; LINKS];

pub const TERMINAL_LENGTH: f64 = 112.0;
pub const INTERIOR_LENGTH: f64 = 75.0;
pub const MECHANISM_MASS: f64 = 43.0;
/// Share of the agent mass taken by the docking mechanism.
pub const MECHANISM_FRACTION: f64 = 0.0321;
pub const DEFAULT_LIMIT: f64 = 90.0;
/// Square cross-section of a module (mm).
pub const MODULE_WIDTH: f64 = 50.0;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub d: f64,
    pub theta_offset: f64,
    pub a: f64,
    pub alpha: f64,
}

impl DhRow {
    pub const fn new(a: f64, theta_offset: f64) -> Self {
        DhRow { d: 0.0, theta_offset, a, alpha: 0.0 }
    }
}

pub fn default_dh() -> [DhRow; LINKS] {
    [
        DhRow::new(TERMINAL_LENGTH, 0.0),
        DhRow::new(INTERIOR_LENGTH, 0.0),
        DhRow::new(INTERIOR_LENGTH, 90.0),
        DhRow::new(INTERIOR_LENGTH, 90.0),
        DhRow::new(INTERIOR_LENGTH, 90.0),
        DhRow::new(INTERIOR_LENGTH, 90.0),
        DhRow::new(TERMINAL_LENGTH, 0.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigurationMode {
    Snake,
    Biped,
    QuadrupedHalf,
    /// Two docked agents acting as one body.
    Quadruped,
}

/// Sole extent along the foot x axis (direction of travel).
pub const DEFAULT_FOOT_LENGTH: f64 = 12.0;
pub const DEFAULT_FOOT_WIDTH: f64 = 30.0;

/// Sole outline in foot coordinates: first axis along the foot x axis,
/// second along its pitch axis. The sole normal is the foot's -y axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootGeometry {
    pub polygon: Vec<[f64; 2]>,
}

impl FootGeometry {
    pub fn rectangle(length: f64, width: f64) -> Self {
        let (hl, hw) = (length / 2.0, width / 2.0);
        FootGeometry { polygon: vec![[-hl, -hw], [hl, -hw], [hl, hw], [-hl, hw]] }
    }

    /// Signed area, positive when counterclockwise.
    pub fn area(&self) -> f64 {
        let p = &self.polygon;
        let n = p.len();
        (0..n)
            .map(|i| {
                let (a, b) = (p[i], p[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            / 2.0
    }

    fn is_convex(&self) -> bool {
        let p = &self.polygon;
        let n = p.len();
        let sign = self.area().signum();
        (0..n).all(|i| {
            let (a, b, c) = (p[i], p[(i + 1) % n], p[(i + 2) % n]);
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            cross * sign >= 0.0
        })
    }
}

impl Default for FootGeometry {
    fn default() -> Self {
        FootGeometry::rectangle(DEFAULT_FOOT_LENGTH, DEFAULT_FOOT_WIDTH)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub dh: [DhRow; LINKS],
    pub joint_limits: [(f64, f64); LINKS],
    pub link_masses: [f64; LINKS],
    pub mechanism_mass: f64,
    pub foot: FootGeometry,
    pub mode: ConfigurationMode,
}

/// On-disk form. Every key is optional and falls back to the default robot.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dh: Option<Vec<DhRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    joint_limits: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    link_masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    foot_polygon: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mechanism_mass_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<ConfigurationMode>,
}

impl Default for RobotModel {
    fn default() -> Self {
        let dh = default_dh();
        let total_length: f64 = dh.iter().map(|r| r.a).sum();
        let link_total = MECHANISM_MASS / MECHANISM_FRACTION - MECHANISM_MASS;
        RobotModel {
            dh,
            joint_limits: [(-DEFAULT_LIMIT, DEFAULT_LIMIT); LINKS],
            link_masses: dh.map(|r| link_total * r.a / total_length),
            mechanism_mass: MECHANISM_MASS,
            foot: FootGeometry::default(),
            mode: ConfigurationMode::Snake,
        }
    }
}

fn seven<T: Copy>(v: Vec<T>, what: &str) -> Result<[T; LINKS], ModelError> {
    let n = v.len();
    v.try_into()
        .map_err(|_| ModelError::Invalid(format!("expected 7 links, got {n} {what}")))
}

/// Parses a JSON model config; an empty document (or `{}`) gives the default robot.
pub fn load_model(text: &str) -> Result<RobotModel, ModelError> {
    let cfg: ModelConfig = if text.trim().is_empty() {
        ModelConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?
    };
    let mut m = RobotModel::default();
    if let Some(dh) = cfg.dh {
        m.dh = seven(dh, "dh rows")?;
    }
    if let Some(l) = cfg.joint_limits {
        m.joint_limits = seven(l, "joint limits")?.map(|[lo, hi]| (lo, hi));
    }
    if let Some(ms) = cfg.link_masses {
        m.link_masses = seven(ms, "link masses")?;
    }
    if let Some(p) = cfg.foot_polygon {
        m.foot = FootGeometry { polygon: p };
    }
    if let Some(mm) = cfg.mechanism_mass_g {
        m.mechanism_mass = mm;
    }
    if let Some(mode) = cfg.mode {
        m.mode = mode;
    }
    m.validate()?;
    Ok(m)
}

impl RobotModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |s: String| Err(ModelError::Invalid(s));
        for (i, r) in self.dh.iter().enumerate() {
            if !(r.a > 0.0) {
                return bad(format!("link {i}: length a must be positive"));
            }
            if r.d != 0.0 || r.alpha != 0.0 {
                return bad(format!("link {i}: d and alpha must be zero"));
            }
            if r.theta_offset != 0.0 && r.theta_offset != 90.0 {
                return bad(format!("link {i}: theta_offset must be 0 or 90"));
            }
        }
        for (i, &(lo, hi)) in self.joint_limits.iter().enumerate() {
            if !(lo < hi) {
                return bad(format!("joint {i}: limit min must be below max"));
            }
        }
        for (i, &m) in self.link_masses.iter().enumerate() {
            if !(m > 0.0) {
                return bad(format!("link {i}: mass must be positive"));
            }
        }
        if !(self.mechanism_mass >= 0.0) {
            return bad("mechanism mass must be non-negative".into());
        }
        if self.foot.polygon.len() < 3 || self.foot.area().abs() <= 0.0 || !self.foot.is_convex() {
            return bad("foot polygon must be convex with positive area".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let cfg = ModelConfig {
            dh: Some(self.dh.to_vec()),
            joint_limits: Some(self.joint_limits.iter().map(|&(a, b)| [a, b]).collect()),
            link_masses: Some(self.link_masses.to_vec()),
            foot_polygon: Some(self.foot.polygon.clone()),
            mechanism_mass_g: Some(self.mechanism_mass),
            mode: Some(self.mode),
        };
        serde_json::to_string_pretty(&cfg).expect("model serializes")
    }

    pub fn lengths(&self) -> [f64; LINKS] {
        self.dh.map(|r| r.a)
    }

    pub fn within_limits(&self, q: &JointVector) -> bool {
        self.first_limit_violation(q).is_none()
    }

    pub fn first_limit_violation(&self, q: &JointVector) -> Option<usize> {
        let eps = 1e-9;
        (0..LINKS).find(|&i| {
            let (lo, hi) = self.joint_limits[i];
            !(q[i] >= lo - eps && q[i] <= hi + eps)
        })
    }

    pub fn with_mode(mut self, mode: ConfigurationMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Link masses plus the docking mechanism carried by the agent.
pub fn total_mass(model: &RobotModel) -> f64 {
    model.link_masses.iter().sum::<f64>() + model.mechanism_mass
}

/// Terminal to interior length ratio as built.
pub fn terminal_ratio(model: &RobotModel) -> f64 {
    model.dh[0].a / model.dh[1].a
}
