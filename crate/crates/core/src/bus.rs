//! Actuator bus frames, trajectory compilation and a PID servo emulator.
//!
//! Wire layout of one frame:
//!
//! ```text
//! FF FF | id | len | instr | payload (len bytes, little endian) | checksum
//! ```
//!
//! `checksum = !(id + len + instr + payload...) & 0xFF`. Ids 0..=253 address
//! one actuator and 254 is broadcast.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{JointVector, LINKS};
use crate::trajectory::{Sample, Trajectory};

pub const HEADER: [u8; 2] = [0xFF, 0xFF];
pub const BROADCAST_ID: u8 = 254;
pub const MAX_TICKS: u16 = 1023;
/// One position tick in degrees.
pub const TICK_DEG: f64 = 180.0 / MAX_TICKS as f64;

pub const INSTR_PING: u8 = 0x01;
pub const INSTR_READ: u8 = 0x02;
pub const INSTR_WRITE_POSITION: u8 = 0x03;
pub const INSTR_WRITE_POSITION_VELOCITY: u8 = 0x04;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ping,
    Read { address: u8, count: u8 },
    WritePosition { ticks: u16 },
    WritePositionVelocity { ticks: u16, velocity: u16 },
}

impl Command {
    pub fn instruction(&self) -> u8 {
        match self {
            Command::Ping => INSTR_PING,
            Command::Read { .. } => INSTR_READ,
            Command::WritePosition { .. } => INSTR_WRITE_POSITION,
            Command::WritePositionVelocity { .. } => INSTR_WRITE_POSITION_VELOCITY,
        }
    }

    pub fn payload(&self) -> Vec<u8> {
        match *self {
            Command::Ping => vec![],
            Command::Read { address, count } => vec![address, count],
            Command::WritePosition { ticks } => ticks.to_le_bytes().to_vec(),
            Command::WritePositionVelocity { ticks, velocity } => {
                let mut v = ticks.to_le_bytes().to_vec();
                v.extend_from_slice(&velocity.to_le_bytes());
                v
            }
        }
    }
}

fn payload_len(instr: u8) -> Option<usize> {
    match instr {
        INSTR_PING => Some(0),
        INSTR_READ => Some(2),
        INSTR_WRITE_POSITION => Some(2),
        INSTR_WRITE_POSITION_VELOCITY => Some(4),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BusFrame {
    pub id: u8,
    pub command: Command,
}

impl BusFrame {
    /// WritePosition frame for an angle in degrees.
    pub fn position(id: u8, deg: f64) -> Result<BusFrame, EncodeError> {
        let ticks = deg_to_ticks(deg).ok_or(EncodeError::AngleOutOfRange(deg))?;
        Ok(BusFrame { id, command: Command::WritePosition { ticks } })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("angle {0} deg outside [-90, 90]")]
    AngleOutOfRange(f64),
    #[error("id {0} is reserved")]
    BadId(u8),
    #[error("position {0} ticks exceeds {MAX_TICKS}")]
    TicksOutOfRange(u16),
}

/// Decoding failures; offsets are byte positions in the input.
#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum DecodeError {
    #[error("bad header at byte {offset}")]
    BadHeader { offset: usize },
    #[error("truncated frame at byte {offset}")]
    Truncated { offset: usize },
    #[error("checksum mismatch at byte {offset}")]
    ChecksumMismatch { offset: usize },
}

impl DecodeError {
    fn shifted(self, by: usize) -> Self {
        match self {
            DecodeError::BadHeader { offset } => DecodeError::BadHeader { offset: offset + by },
            DecodeError::Truncated { offset } => DecodeError::Truncated { offset: offset + by },
            DecodeError::ChecksumMismatch { offset } => DecodeError::ChecksumMismatch { offset: offset + by },
        }
    }
}

pub fn checksum(body: &[u8]) -> u8 {
    !body.iter().fold(0u8, |a, &b| a.wrapping_add(b))
}

pub fn encode(frame: &BusFrame) -> Result<Vec<u8>, EncodeError> {
    if frame.id == 255 {
        return Err(EncodeError::BadId(frame.id));
    }
    match frame.command {
        Command::WritePosition { ticks } | Command::WritePositionVelocity { ticks, .. } if ticks > MAX_TICKS => {
            return Err(EncodeError::TicksOutOfRange(ticks));
        }
        _ => {}
    }
    let payload = frame.command.payload();
    let mut out = HEADER.to_vec();
    out.extend([frame.id, payload.len() as u8, frame.command.instruction()]);
    out.extend(&payload);
    out.push(checksum(&out[2..]));
    Ok(out)
}

/// Decodes one frame from the front of `bytes`, returning it and the bytes used.
///
/// Position fields are returned as sent, even above [`MAX_TICKS`].
pub fn decode(bytes: &[u8]) -> Result<(BusFrame, usize), DecodeError> {
    let byte = |i: usize| bytes.get(i).copied().ok_or(DecodeError::Truncated { offset: i });
    for i in 0..2 {
        if byte(i)? != 0xFF {
            return Err(DecodeError::BadHeader { offset: i });
        }
    }
    let id = byte(2)?;
    if id == 255 {
        return Err(DecodeError::BadHeader { offset: 2 });
    }
    let len = byte(3)? as usize;
    let instr = byte(4)?;
    match payload_len(instr) {
        None => return Err(DecodeError::BadHeader { offset: 4 }),
        Some(n) if n != len => return Err(DecodeError::BadHeader { offset: 3 }),
        _ => {}
    }
    let end = 5 + len;
    if bytes.len() <= end {
        return Err(DecodeError::Truncated { offset: bytes.len() });
    }
    if checksum(&bytes[2..end]) != bytes[end] {
        return Err(DecodeError::ChecksumMismatch { offset: end });
    }
    let p = &bytes[5..end];
    let u16_at = |i: usize| u16::from_le_bytes([p[i], p[i + 1]]);
    let command = match instr {
        INSTR_PING => Command::Ping,
        INSTR_READ => Command::Read { address: p[0], count: p[1] },
        INSTR_WRITE_POSITION => Command::WritePosition { ticks: u16_at(0) },
        _ => Command::WritePositionVelocity { ticks: u16_at(0), velocity: u16_at(2) },
    };
    Ok((BusFrame { id, command }, end + 1))
}

pub fn decode_stream(bytes: &[u8]) -> Result<Vec<BusFrame>, DecodeError> {
    let mut out = Vec::new();
    let mut at = 0;
    while at < bytes.len() {
        let (f, used) = decode(&bytes[at..]).map_err(|e| e.shifted(at))?;
        out.push(f);
        at += used;
    }
    Ok(out)
}

pub fn deg_to_ticks(deg: f64) -> Option<u16> {
    if !(-90.0..=90.0).contains(&deg) {
        return None;
    }
    Some(((deg + 90.0) * MAX_TICKS as f64 / 180.0).round() as u16)
}

pub fn ticks_to_deg(ticks: u16) -> f64 {
    ticks as f64 * TICK_DEG - 90.0
}

/// Speed in ticks per second, saturating at the field width.
pub fn speed_to_ticks(deg_per_s: f64) -> u16 {
    (deg_per_s.abs() * MAX_TICKS as f64 / 180.0).round().min(u16::MAX as f64) as u16
}

/// One line per frame, bytes as space separated upper-case hex.
pub fn hex_dump(bytes: &[u8]) -> Result<String, DecodeError> {
    let mut out = String::new();
    let mut at = 0;
    while at < bytes.len() {
        let (_, used) = decode(&bytes[at..]).map_err(|e| e.shifted(at))?;
        let line: Vec<String> = bytes[at..at + used].iter().map(|b| format!("{b:02X}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
        at += used;
    }
    Ok(out)
}

pub fn parse_hex(text: &str) -> Result<Vec<u8>, String> {
    text.split_whitespace()
        .map(|t| u8::from_str_radix(t, 16).map_err(|e| format!("bad hex byte {t:?}: {e}")))
        .collect()
}

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("need {need} ids, got {got}")]
    IdCount { need: usize, got: usize },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("joint {joint} = {value:.6} deg at t = {t:.6} is outside the encodable range")]
    OutOfRange { t: f64, joint: usize, value: f64 },
    #[error("stream ends mid-sample")]
    Ragged,
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("unexpected frame {0:?}")]
    Unexpected(BusFrame),
}

/// Default mapping: joint `i` of agent `a` has id `7 a + i + 1`.
pub fn default_ids(agents: usize) -> Vec<u8> {
    (0..agents * LINKS).map(|i| i as u8 + 1).collect()
}

/// One WritePositionVelocity frame per joint per sample. The speed field is
/// the backward difference (forward for the first sample).
pub fn compile_trajectory(traj: &Trajectory, ids: &[u8]) -> Result<Vec<u8>, CompileError> {
    let agents = traj.agents();
    if ids.len() != agents * LINKS {
        return Err(CompileError::IdCount { need: agents * LINKS, got: ids.len() });
    }
    let s = &traj.samples;
    let mut out = Vec::new();
    for i in 0..s.len() {
        let (a, b) = match (i.checked_sub(1), s.get(i + 1)) {
            (Some(p), _) => (&s[p], &s[i]),
            (None, Some(n)) => (&s[i], n),
            (None, None) => (&s[i], &s[i]),
        };
        let dt = b.t - a.t;
        for (ag, q) in s[i].q.iter().enumerate() {
            for j in 0..LINKS {
                let value = q[j];
                let ticks = deg_to_ticks(value).ok_or(CompileError::OutOfRange { t: s[i].t, joint: j, value })?;
                let speed = if dt > 0.0 { (b.q[ag][j] - a.q[ag][j]) / dt } else { 0.0 };
                let frame = BusFrame {
                    id: ids[ag * LINKS + j],
                    command: Command::WritePositionVelocity { ticks, velocity: speed_to_ticks(speed) },
                };
                out.extend(encode(&frame)?);
            }
        }
    }
    Ok(out)
}

/// Commanded positions and speeds recovered from a compiled stream.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandStream {
    pub rate: f64,
    /// Per sample, per agent: (position deg, speed deg/s) for each joint.
    pub samples: Vec<Vec<[(f64, f64); LINKS]>>,
}

impl CommandStream {
    pub fn positions(&self) -> Trajectory {
        Trajectory {
            rate: self.rate,
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| Sample { t: i as f64 / self.rate, q: s.iter().map(|a| a.map(|(p, _)| p)).collect() })
                .collect(),
        }
    }
}

pub fn decompile(bytes: &[u8], ids: &[u8], rate: f64) -> Result<CommandStream, CompileError> {
    let frames = decode_stream(bytes)?;
    let per = ids.len();
    if per == 0 || !per.is_multiple_of(LINKS) {
        return Err(CompileError::IdCount { need: LINKS, got: per });
    }
    if frames.len() % per != 0 {
        return Err(CompileError::Ragged);
    }
    let mut samples = Vec::with_capacity(frames.len() / per);
    for chunk in frames.chunks(per) {
        let mut agents = vec![[(0.0, 0.0); LINKS]; per / LINKS];
        for (k, f) in chunk.iter().enumerate() {
            match f.command {
                Command::WritePositionVelocity { ticks, velocity } if f.id == ids[k] && ticks <= MAX_TICKS => {
                    agents[k / LINKS][k % LINKS] = (ticks_to_deg(ticks), velocity as f64 * TICK_DEG);
                }
                _ => return Err(CompileError::Unexpected(*f)),
            }
        }
        samples.push(agents);
    }
    Ok(CommandStream { rate, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorqueClass {
    /// 2.8 Nm actuators.
    High,
    /// 1.2 Nm actuators.
    Low,
}

impl TorqueClass {
    pub fn torque_nm(self) -> f64 {
        match self {
            TorqueClass::High => 2.8,
            TorqueClass::Low => 1.2,
        }
    }

    pub fn max_velocity(self) -> f64 {
        match self {
            TorqueClass::High => 67.0,
            TorqueClass::Low => 114.0,
        }
    }
}

pub const DEFAULT_KP: f64 = 8.0;
pub const DEFAULT_KI: f64 = 0.1;
pub const DEFAULT_KD: f64 = 0.05;
/// Mechanical travel either side of center.
pub const TRAVEL_DEG: f64 = 90.0;
/// Integral contribution is capped at this share of the speed limit.
const INTEGRAL_SHARE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoModel {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub max_velocity: f64,
    pub torque: TorqueClass,
    pub position: f64,
    pub velocity: f64,
    pub integral: f64,
}

impl ServoModel {
    pub fn new(torque: TorqueClass, position: f64) -> Self {
        ServoModel {
            kp: DEFAULT_KP,
            ki: DEFAULT_KI,
            kd: DEFAULT_KD,
            max_velocity: torque.max_velocity(),
            torque,
            position,
            velocity: 0.0,
            integral: 0.0,
        }
    }

    /// PID step with a velocity feed-forward term.
    pub fn step_ff(&self, command: f64, feed_forward: f64, dt: f64) -> ServoModel {
        let mut s = *self;
        let err = command - s.position;
        if err == 0.0 && s.velocity == 0.0 && feed_forward == 0.0 {
            return s;
        }
        let mut integral = s.integral + err * dt;
        if s.ki > 0.0 {
            let cap = INTEGRAL_SHARE * s.max_velocity / s.ki;
            integral = integral.clamp(-cap, cap);
        }
        let raw = feed_forward + s.kp * err + s.ki * integral - s.kd * s.velocity;
        let v = raw.clamp(-s.max_velocity, s.max_velocity);
        // hold the integrator while saturated in the direction of the error
        if v == raw || raw.signum() != err.signum() {
            s.integral = integral;
        }
        s.velocity = v;
        s.position += v * dt;
        // hard stops
        if s.position.abs() > TRAVEL_DEG {
            s.position = s.position.clamp(-TRAVEL_DEG, TRAVEL_DEG);
            s.velocity = 0.0;
        }
        s
    }
}

pub fn servo_step(servo: &ServoModel, command: f64, dt: f64) -> ServoModel {
    servo.step_ff(command, 0.0, dt)
}

/// Internal emulation step.
pub const REPLAY_DT: f64 = 1e-3;

/// Drives one servo per joint through the command stream. Each frame's
/// position is reached along a ramp at the frame's speed, tracked by the PID
/// loop with the ramp speed as feed-forward. The tracked pose is sampled at
/// the end of every command interval.
pub fn replay(stream: &CommandStream, torque: [TorqueClass; LINKS]) -> Trajectory {
    let mut out = Trajectory::new(stream.rate);
    let Some(first) = stream.samples.first() else { return out };
    let mut servos: Vec<[ServoModel; LINKS]> =
        first.iter().map(|a| std::array::from_fn(|j| ServoModel::new(torque[j], a[j].0))).collect();
    let mut setpoints: Vec<JointVector> = first.iter().map(|a| a.map(|(p, _)| p)).collect();
    let period = 1.0 / stream.rate;
    let steps = (period / REPLAY_DT).round().max(1.0) as usize;
    let dt = period / steps as f64;
    for (i, cmd) in stream.samples.iter().enumerate() {
        for _ in 0..steps {
            for (a, agent) in cmd.iter().enumerate() {
                for j in 0..LINKS {
                    let (goal, speed) = agent[j];
                    let sp = &mut setpoints[a][j];
                    let gap = goal - *sp;
                    let ramp = if speed > 0.0 { speed } else { f64::INFINITY };
                    let moved = gap.clamp(-ramp * dt, ramp * dt);
                    *sp += moved;
                    servos[a][j] = servos[a][j].step_ff(*sp, moved / dt, dt);
                }
            }
        }
        out.samples.push(Sample { t: i as f64 * period, q: servos.iter().map(|s| s.map(|v| v.position)).collect() });
    }
    out
}
