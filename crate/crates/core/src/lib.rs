//! Kinematics, gaits and verification tools for a seven-link reconfigurable
//! snake / biped / quadruped robot.

pub mod bus;
pub mod docking;
pub mod gaits;
pub mod kinematics;
pub mod model;
pub mod stability;
pub mod trajectory;
pub mod transitions;

pub use model::{load_model, ConfigurationMode, DhRow, FootGeometry, JointVector, RobotModel, LINKS};
