//! Support polygons, signed stability margins and trajectory validation.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{com_of_frames, forward_kinematics, translation, FrameSet, CENTER_LINK};
use crate::model::{JointVector, RobotModel, LINKS, MODULE_WIDTH};
use crate::trajectory::Trajectory;

/// Margins within this distance of zero count as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Lateral half extent of a link touching the ground.
pub const CONTACT_HALF_WIDTH: f64 = MODULE_WIDTH / 2.0;

const STRIP_SAMPLES: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("no contacts")]
    Empty,
    #[error("contact schedule has {schedule} entries for {samples} samples")]
    ScheduleMismatch { schedule: usize, samples: usize },
    #[error("contact {0:?} refers to a missing agent or index")]
    BadContact(Contact),
}

pub type Point2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPolygon {
    /// Counter-clockwise hull vertices.
    pub vertices: Vec<Point2>,
    /// Set when the hull is a point or a segment.
    pub degenerate: bool,
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by monotone chain; collinear points are dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn support_polygon(patches: &[Vec<Point2>]) -> Result<SupportPolygon, StabilityError> {
    let pts: Vec<Point2> = patches.iter().flatten().copied().collect();
    if pts.is_empty() {
        return Err(StabilityError::Empty);
    }
    let vertices = convex_hull(&pts);
    let degenerate = vertices.len() < 3;
    Ok(SupportPolygon { vertices, degenerate })
}

impl SupportPolygon {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        (0..v.len()).map(|i| cross([0.0, 0.0], v[i], v[(i + 1) % v.len()])).sum::<f64>() / 2.0
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * dx).hypot(p[1] - a[1] - s * dy)
}

/// Signed distance from `p` to the polygon boundary, positive inside.
pub fn stability_margin(poly: &SupportPolygon, p: Point2) -> f64 {
    let v = &poly.vertices;
    match v.len() {
        0 => f64::NEG_INFINITY,
        1 => -(p[0] - v[0][0]).hypot(p[1] - v[0][1]),
        2 => -segment_distance(p, v[0], v[1]),
        n => {
            let dist = (0..n).map(|i| segment_distance(p, v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min);
            let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= 0.0);
            if inside {
                dist
            } else {
                -dist
            }
        }
    }
}

pub fn is_stable(margin: f64) -> bool {
    margin >= -BOUNDARY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    /// Sole patch of foot `index` (0 = base block, 1 = distal end).
    Foot,
    /// Whole link `index` lying on the ground.
    Link,
    /// Edge across joint position `index` (0..=7).
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contact {
    #[serde(default)]
    pub agent: usize,
    pub kind: ContactKind,
    pub index: usize,
}

impl Contact {
    pub const fn foot(agent: usize, index: usize) -> Self {
        Contact { agent, kind: ContactKind::Foot, index }
    }
    pub const fn link(agent: usize, index: usize) -> Self {
        Contact { agent, kind: ContactKind::Link, index }
    }
    pub const fn joint(agent: usize, index: usize) -> Self {
        Contact { agent, kind: ContactKind::Joint, index }
    }
}

/// An agent pose expressed in a shared world frame.
#[derive(Debug, Clone)]
pub struct Posed<'a> {
    pub model: &'a RobotModel,
    pub frames: FrameSet,
    pub world: Matrix4<f64>,
}

impl<'a> Posed<'a> {
    pub fn new(model: &'a RobotModel, q: &JointVector, world: Matrix4<f64>) -> Self {
        Posed { model, frames: forward_kinematics(model, q), world }
    }

    fn rot(&self) -> Matrix3<f64> {
        self.world.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn point(&self, p: Vector3<f64>) -> Vector3<f64> {
        (self.world * p.push(1.0)).xyz()
    }

    pub fn joint(&self, k: usize) -> Vector3<f64> {
        self.point(self.frames.origin(k))
    }

    pub fn com(&self) -> Vector3<f64> {
        self.point(com_of_frames(self.model, &self.frames))
    }

    pub fn mass(&self) -> f64 {
        crate::model::total_mass(self.model)
    }

    /// Position and axes of foot `end` in world coordinates.
    pub fn foot(&self, end: usize) -> (Vector3<f64>, Matrix3<f64>) {
        if end == 0 {
            (self.joint(0), self.rot() * self.frames.base_frame())
        } else {
            (self.joint(LINKS), self.rot() * self.frames.link_frame(LINKS - 1))
        }
    }

    pub fn lateral(&self, k: usize) -> Vector3<f64> {
        self.rot() * self.frames.link_frame(k).column(2)
    }
}

/// Frame of the center link at its proximal joint.
pub fn body_frame(fs: &FrameSet) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&fs.link_frame(CENTER_LINK));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&fs.origin(CENTER_LINK));
    m
}

fn inverse_rigid(m: &Matrix4<f64>) -> Matrix4<f64> {
    let r = m.fixed_view::<3, 3>(0, 0).transpose();
    let t = -(r * m.fixed_view::<3, 1>(0, 3));
    let mut out = Matrix4::identity();
    out.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    out.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
    out
}

/// Places one agent at the base frame, or a docked pair with agent A's center
/// link at the origin and agent B's center link one module width along -z.
pub fn place_agents<'a>(models: &[&'a RobotModel], q: &[JointVector]) -> Vec<Posed<'a>> {
    if q.len() == 1 {
        return vec![Posed::new(models[0], &q[0], Matrix4::identity())];
    }
    q.iter()
        .enumerate()
        .map(|(i, qi)| {
            let model = models[i.min(models.len() - 1)];
            let fs = forward_kinematics(model, qi);
            let shift = translation(0.0, 0.0, -MODULE_WIDTH * i as f64);
            let world = shift * inverse_rigid(&body_frame(&fs));
            Posed { model, frames: fs, world }
        })
        .collect()
}

/// Result of a single quasi-static check.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub polygon: SupportPolygon,
    pub com: Point2,
    pub margin: f64,
    pub normal: Vector3<f64>,
    pub origin: Vector3<f64>,
    /// Largest distance of a contact point from the fitted ground plane.
    pub plane_residual: f64,
    /// Lowest joint position of any agent above the ground plane.
    pub min_height: f64,
}

fn ground_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let a = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (a - n * a.dot(n)).normalize();
    (e1, n.cross(&e1))
}

struct FootPatch {
    at: Vector3<f64>,
    axes: Matrix3<f64>,
}

pub fn evaluate(agents: &[Posed], contacts: &[Contact]) -> Result<Evaluation, StabilityError> {
    if contacts.is_empty() {
        return Err(StabilityError::Empty);
    }
    let mut pts: Vec<Vector3<f64>> = Vec::new();
    let mut feet: Vec<(FootPatch, &RobotModel)> = Vec::new();
    for c in contacts {
        let a = agents.get(c.agent).ok_or(StabilityError::BadContact(*c))?;
        match c.kind {
            ContactKind::Foot if c.index <= 1 => {
                let (at, axes) = a.foot(c.index);
                pts.push(at);
                feet.push((FootPatch { at, axes }, a.model));
            }
            ContactKind::Link if c.index < LINKS => {
                let (p, q) = (a.joint(c.index), a.joint(c.index + 1));
                let lat = a.lateral(c.index) * CONTACT_HALF_WIDTH;
                for i in 0..STRIP_SAMPLES {
                    let m = p + (q - p) * (i as f64 / (STRIP_SAMPLES - 1) as f64);
                    pts.push(m + lat);
                    pts.push(m - lat);
                }
            }
            ContactKind::Joint if c.index <= LINKS => {
                let p = a.joint(c.index);
                let lat = a.lateral(c.index.min(LINKS - 1)) * CONTACT_HALF_WIDTH;
                pts.push(p + lat);
                pts.push(p - lat);
            }
            _ => return Err(StabilityError::BadContact(*c)),
        }
    }
    let total: f64 = agents.iter().map(Posed::mass).sum();
    let com = agents.iter().map(|a| a.com() * a.mass()).sum::<Vector3<f64>>() / total;

    let origin = pts.iter().sum::<Vector3<f64>>() / pts.len() as f64;
    let cov = pts.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - origin;
        acc + d * d.transpose()
    });
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let planar = eig.eigenvalues[order[1]] > 1e-12 * eig.eigenvalues[order[0]].max(1.0);
    let mut normal: Vector3<f64> = if planar {
        eig.eigenvectors.column(order[2]).into_owned()
    } else if let Some((f, _)) = feet.first() {
        f.axes.column(1).into_owned()
    } else {
        let lat = pts.len() >= 2 && (pts[1] - pts[0]).norm() > 0.0;
        let up = agents[0].rot() * Vector3::y();
        if lat {
            let d = (pts[1] - pts[0]).normalize();
            (up - d * d.dot(&up)).normalize()
        } else {
            up
        }
    };
    normal.normalize_mut();
    if (com - origin).dot(&normal) < 0.0 {
        normal = -normal;
    }
    let (e1, e2) = ground_basis(&normal);
    let proj = |p: &Vector3<f64>| -> Point2 {
        let d = p - origin;
        [d.dot(&e1), d.dot(&e2)]
    };
    let mut patches: Vec<Vec<Point2>> = pts.iter().map(|p| vec![proj(p)]).collect();
    for (f, model) in &feet {
        let fx: Vector3<f64> = f.axes.column(0).into_owned();
        let fz: Vector3<f64> = f.axes.column(2).into_owned();
        let mut h = fx - normal * fx.dot(&normal);
        if h.norm() < 1e-3 {
            let s = fz - normal * fz.dot(&normal);
            h = normal.cross(&s);
        }
        let h = h.normalize();
        let s = h.cross(&normal);
        patches.push(model.foot.polygon.iter().map(|[u, v]| proj(&(f.at + h * *u + s * *v))).collect());
    }
    let polygon = support_polygon(&patches)?;
    let c2 = proj(&com);
    let margin = stability_margin(&polygon, c2);
    let plane_residual = pts.iter().map(|p| (p - origin).dot(&normal).abs()).fold(0.0, f64::max);
    let min_height = agents
        .iter()
        .flat_map(|a| (0..=LINKS).map(move |k| a.joint(k)))
        .map(|p| (p - origin).dot(&normal))
        .fold(f64::INFINITY, f64::min);
    Ok(Evaluation { polygon, com: c2, margin, normal, origin, plane_residual, min_height })
}

/// Convenience wrapper: place the agents, then evaluate.
pub fn evaluate_pose(models: &[&RobotModel], q: &[JointVector], contacts: &[Contact]) -> Result<Evaluation, StabilityError> {
    evaluate(&place_agents(models, q), contacts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub t: f64,
    pub polygon: Vec<Point2>,
    pub com_projection: Point2,
    pub margin: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StabilityReport {
    pub records: Vec<StabilityRecord>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.records.iter().all(|r| r.stable)
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.records.iter().map(|r| r.margin).reduce(f64::min)
    }

    pub fn first_violation(&self) -> Option<&StabilityRecord> {
        self.records.iter().find(|r| !r.stable)
    }

    pub fn summary(&self) -> String {
        let min = self.min_margin().map_or("none".to_string(), |m| format!("{m:.3}"));
        let first = self.first_violation().map_or("none".to_string(), |r| format!("{:.6}", r.t));
        format!("samples={} min_margin_mm={min} first_violation_t={first}", self.records.len())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(StabilityReport { records: serde_json::from_str(text)? })
    }
}

/// Checks every sample of `traj` against its scheduled contact set.
pub fn validate_trajectory(
    models: &[&RobotModel],
    traj: &Trajectory,
    schedule: &[Vec<Contact>],
) -> Result<StabilityReport, StabilityError> {
    if schedule.len() != traj.samples.len() {
        return Err(StabilityError::ScheduleMismatch { schedule: schedule.len(), samples: traj.samples.len() });
    }
    let mut records = Vec::with_capacity(traj.samples.len());
    for (s, contacts) in traj.samples.iter().zip(schedule) {
        let e = evaluate_pose(models, &s.q, contacts)?;
        records.push(StabilityRecord {
            t: s.t,
            polygon: e.polygon.vertices,
            com_projection: e.com,
            margin: e.margin,
            stable: is_stable(e.margin),
        });
    }
    Ok(StabilityReport { records })
}
