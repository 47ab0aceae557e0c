//! Sampled joint trajectories and their CSV form.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{JointVector, RobotModel, LINKS};

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("timestamps not strictly increasing at sample {index}")]
    NotIncreasing { index: usize },
    #[error("joint {joint} of agent {agent} outside limits at t = {t:.6}")]
    Limit { t: f64, agent: usize, joint: usize },
}

/// One instant; `q` holds one pose per agent (two for a docked pair).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: Vec<JointVector>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub rate: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(rate: f64) -> Self {
        Trajectory { rate, samples: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn agents(&self) -> usize {
        self.samples.first().map_or(1, |s| s.q.len())
    }

    pub fn check(&self, model: &RobotModel) -> Result<(), TrajectoryError> {
        for (i, w) in self.samples.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return Err(TrajectoryError::NotIncreasing { index: i + 1 });
            }
        }
        for s in &self.samples {
            for (agent, q) in s.q.iter().enumerate() {
                if let Some(joint) = model.first_limit_violation(q) {
                    return Err(TrajectoryError::Limit { t: s.t, agent, joint });
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let agents = self.agents();
        let mut out = String::from("t");
        for a in 0..agents {
            for j in 0..LINKS {
                let _ = write!(out, ",{}{j}", if a == 0 { "q" } else { "qb" });
            }
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&fmt6(s.t));
            for q in &s.q {
                for v in q {
                    out.push(',');
                    out.push_str(&fmt6(*v));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the CSV written by [`Trajectory::to_csv`]. The rate is inferred
    /// from the first two timestamps.
    pub fn from_csv(text: &str) -> Result<Self, TrajectoryError> {
        let err = |line: usize, msg: &str| TrajectoryError::Csv { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.first() != Some(&"t") || !(cols.len() - 1).is_multiple_of(LINKS) || cols.len() == 1 {
            return Err(err(1, "expected header t,q0..q6"));
        }
        let agents = (cols.len() - 1) / LINKS;
        let mut samples = Vec::new();
        for (i, line) in lines {
            let vals = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(i + 1, &e.to_string()))?;
            if vals.len() != cols.len() {
                return Err(err(i + 1, "wrong column count"));
            }
            let q = (0..agents)
                .map(|a| {
                    let mut jv = [0.0; LINKS];
                    jv.copy_from_slice(&vals[1 + a * LINKS..1 + (a + 1) * LINKS]);
                    jv
                })
                .collect();
            samples.push(Sample { t: vals[0], q });
        }
        let rate = match samples.as_slice() {
            [a, b, ..] if b.t > a.t => 1.0 / (b.t - a.t),
            _ => 0.0,
        };
        Ok(Trajectory { rate, samples })
    }
}

/// Six-decimal rendering without a sign on values that round to zero.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Sample times `i / rate` for `i` in `0..round(duration * rate)`.
pub fn sample_times(duration: f64, rate: f64) -> impl Iterator<Item = f64> {
    let n = (duration * rate).round().max(0.0) as usize;
    (0..n).map(move |i| i as f64 / rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj() -> Trajectory {
        let mut t = Trajectory::new(2.0);
        t.samples.push(Sample { t: 0.0, q: vec![[0.0; 7]] });
        t.samples.push(Sample { t: 0.5, q: vec![[1.25, -2.0, 0.0, 0.0, 0.0, 0.0, 90.0]] });
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = traj();
        let text = t.to_csv();
        assert!(text.starts_with("t,q0,q1,q2,q3,q4,q5,q6\n0.000000,0.000000"));
        assert_eq!(Trajectory::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn pair_header() {
        let mut t = traj();
        for s in &mut t.samples {
            s.q.push([3.0; 7]);
        }
        let text = t.to_csv();
        assert!(text.lines().next().unwrap().ends_with("q6,qb0,qb1,qb2,qb3,qb4,qb5,qb6"));
        assert_eq!(Trajectory::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn negative_zero_prints_plain() {
        let mut t = traj();
        t.samples[0].q[0][3] = -0.0;
        t.samples[0].q[0][4] = -1e-9;
        assert!(!t.to_csv().contains("-0.000000"));
    }

    #[test]
    fn checks() {
        let m = RobotModel::default();
        let mut t = traj();
        assert!(t.check(&m).is_ok());
        t.samples[1].q[0][6] = 90.5;
        assert!(matches!(t.check(&m), Err(TrajectoryError::Limit { joint: 6, .. })));
        t.samples[1].t = 0.0;
        assert_eq!(t.check(&m), Err(TrajectoryError::NotIncreasing { index: 1 }));
    }

    #[test]
    fn bad_csv() {
        assert!(Trajectory::from_csv("").is_err());
        assert!(Trajectory::from_csv("t,a,b\n").is_err());
        assert!(Trajectory::from_csv("t,q0,q1,q2,q3,q4,q5,q6\n0,1,2\n").is_err());
        assert!(Trajectory::from_csv("t,q0,q1,q2,q3,q4,q5,q6\n0,1,2,x,4,5,6,7\n").is_err());
    }

    #[test]
    fn times() {
        assert_eq!(sample_times(10.0, 50.0).count(), 500);
        assert_eq!(sample_times(1.0, 4.0).collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75]);
    }
}
