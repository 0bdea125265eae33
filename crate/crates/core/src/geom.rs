//! Scalar and low-level geometric primitives.
//!
//! Every predicate takes an explicit [`Tolerance`] derived from the instance
//! diameter, so results do not depend on the unit of length. Zero-radius
//! disks are accepted everywhere.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{disk_hull_with, Classification};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at angle `theta`.
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point { x: c, y: s }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Self {
        Point { x: -self.y, y: self.x }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A closed disk with a positive weight.
///
/// Auxiliary disks are the radius-0, weight-1 points injected by the
/// reductions; they never appear in a reported solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub id: usize,
    pub center: Point,
    pub radius: f64,
    pub weight: f64,
    pub is_auxiliary: bool,
}

impl Disk {
    pub fn new(id: usize, x: f64, y: f64, radius: f64, weight: f64) -> Self {
        Disk {
            id,
            center: Point::new(x, y),
            radius,
            weight,
            is_auxiliary: false,
        }
    }

    /// Unit-weight disk, the common case in tests and dispersion.
    pub fn unit(id: usize, x: f64, y: f64, radius: f64) -> Self {
        Disk::new(id, x, y, radius, 1.0)
    }

    pub fn auxiliary(id: usize, at: Point, weight: f64) -> Self {
        Disk {
            id,
            center: at,
            radius: 0.0,
            weight,
            is_auxiliary: true,
        }
    }

    /// Support function: signed offset of the tangent line with outward normal `u`.
    pub fn support(&self, u: Point) -> f64 {
        u.dot(self.center) + self.radius
    }

    pub fn boundary_point(&self, theta: f64) -> Point {
        self.center + Point::unit(theta) * self.radius
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidDisk {
                id: self.id,
                reason: reason.to_string(),
            })
        };
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return bad("center is not finite");
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return bad("radius must be finite and non-negative");
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return bad("weight must be finite and positive");
        }
        Ok(())
    }
}

/// Largest distance between two points of the union of the disks, floored at 1
/// for degenerate inputs so tolerances never collapse to zero.
pub fn instance_diameter(disks: &[Disk]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in disks.iter().enumerate() {
        d = d.max(2.0 * a.radius);
        for b in &disks[i + 1..] {
            d = d.max(a.center.dist(b.center) + a.radius + b.radius);
        }
    }
    if d > 0.0 && d.is_finite() {
        d
    } else {
        1.0
    }
}

/// Tolerances scaled by the instance diameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Predicate tolerance for length comparisons.
    pub pred: f64,
    /// Residual tolerance for tangent-disk solutions.
    pub resid: f64,
    /// Tolerance for comparisons of normal angles, in radians.
    pub angle: f64,
    pub diameter: f64,
}

impl Tolerance {
    pub const DEFAULT_SCALE: f64 = 1e-9;

    pub fn for_disks(disks: &[Disk]) -> Self {
        Self::with_scale(disks, Self::DEFAULT_SCALE)
    }

    pub fn with_scale(disks: &[Disk], scale: f64) -> Self {
        Self::from_diameter(instance_diameter(disks), scale)
    }

    pub fn from_diameter(diameter: f64, scale: f64) -> Self {
        Tolerance {
            pred: scale * diameter,
            resid: 10.0 * scale * diameter,
            angle: scale,
            diameter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disjointness {
    Strict,
    AllowTangent,
}

/// `|center − q| − radius`; negative iff `q` is interior to the disk.
pub fn weighted_distance(d: &Disk, q: Point) -> f64 {
    d.center.dist(q) - d.radius
}

pub fn disks_disjoint(a: &Disk, b: &Disk, mode: Disjointness, tol: &Tolerance) -> bool {
    let gap = a.center.dist(b.center) - a.radius - b.radius;
    match mode {
        Disjointness::Strict => gap > tol.pred,
        Disjointness::AllowTangent => gap >= -tol.pred,
    }
}

/// Same center, weight and id; radius increased by `delta`.
pub fn grow(d: &Disk, delta: f64) -> Disk {
    Disk {
        radius: d.radius + delta,
        ..*d
    }
}

/// Rigid motion taking `a`'s center to the origin and the direction towards
/// `b`'s center onto the positive x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairFrame {
    pub origin: Point,
    cos: f64,
    sin: f64,
}

impl PairFrame {
    pub fn to_frame(&self, q: Point) -> Point {
        let d = q - self.origin;
        Point::new(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y)
    }

    pub fn from_frame(&self, q: Point) -> Point {
        Point::new(self.cos * q.x - self.sin * q.y, self.sin * q.x + self.cos * q.y) + self.origin
    }

    pub fn rotation_angle(&self) -> f64 {
        self.sin.atan2(self.cos)
    }
}

pub fn pair_frame(a: &Disk, b: &Disk, tol: &Tolerance) -> Result<PairFrame> {
    let d = b.center - a.center;
    let len = d.norm();
    if len <= tol.pred {
        return Err(Error::CoincidentCenters(a.id, b.id));
    }
    Ok(PairFrame {
        origin: a.center,
        cos: d.x / len,
        sin: d.y / len,
    })
}

/// Position of `v` along the bisector of `i` and `j`: its height in the pair frame.
pub fn bisector_order_key(i: &Disk, j: &Disk, v: Point, tol: &Tolerance) -> Result<f64> {
    let gap = weighted_distance(i, v) - weighted_distance(j, v);
    if gap.abs() > tol.pred {
        return Err(Error::NotOnBisector(i.id, j.id, gap));
    }
    Ok(pair_frame(i, j, tol)?.to_frame(v).y)
}

/// A directed line; the halfplane to its left is the region it bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectedLine {
    pub origin: Point,
    pub direction: Point,
}

impl DirectedLine {
    /// Outward (right-hand) unit normal.
    pub fn normal(&self) -> Point {
        Point::new(self.direction.y, -self.direction.x)
    }

    /// Signed distance, positive on the right.
    pub fn side(&self, q: Point) -> f64 {
        self.normal().dot(q - self.origin)
    }
}

/// The disk tangent to three disks, or the halfplane standing in for the
/// missing third disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ApolloniusDisk {
    Proper { center: Point, radius: f64 },
    /// Upper halfplane of a pair, bounded by their outer common tangent that
    /// runs from the second disk back to the first.
    UpperHalfplane { line: DirectedLine },
}

impl ApolloniusDisk {
    pub fn upper_halfplane(i: &Disk, j: &Disk) -> Option<Self> {
        let beta = outer_tangent_normal(j, i)?;
        let n = Point::unit(beta);
        let origin = j.center + n * j.radius;
        Some(ApolloniusDisk::UpperHalfplane {
            line: DirectedLine {
                origin,
                direction: Point::new(-n.y, n.x),
            },
        })
    }

    /// Ordering key along the bisector of `(i, j)`; the halfplane sits at +∞.
    pub fn order_key(&self, frame: &PairFrame) -> f64 {
        match self {
            ApolloniusDisk::Proper { center, .. } => frame.to_frame(*center).y,
            ApolloniusDisk::UpperHalfplane { .. } => f64::INFINITY,
        }
    }

    /// Whether `d` stays outside this disk. Tangency within the predicate
    /// tolerance counts as outside: a fourth disk touching the tangent disk of
    /// a triple shares its equidistant point and may sit in the same set. The
    /// halfplane conflicts with nothing by construction.
    pub fn is_disjoint_from(&self, d: &Disk, tol: &Tolerance) -> bool {
        match self {
            ApolloniusDisk::Proper { center, radius } => {
                d.center.dist(*center) - d.radius - radius >= -tol.pred
            }
            ApolloniusDisk::UpperHalfplane { .. } => true,
        }
    }
}

/// Normal angle of the outer common tangent of `a` and `b` that has both disks
/// on its left when traversed from `a` to `b`. In a support-function sweep
/// this is where `b` starts to dominate `a`. `None` if one disk contains the
/// other.
pub fn outer_tangent_normal(a: &Disk, b: &Disk) -> Option<f64> {
    let d = b.center - a.center;
    let len = d.norm();
    if len == 0.0 {
        return None;
    }
    let c = (a.radius - b.radius) / len;
    if c.abs() >= 1.0 {
        return None;
    }
    Some(d.angle() - c.acos())
}

/// Center and radius of the disk externally tangent to three pairwise disjoint
/// disks.
///
/// The squared tangency conditions are differenced to express the center as
/// an affine function of the radius, which leaves a quadratic in the radius.
/// Roots are polished with Newton steps on the unsquared system and accepted
/// only if every residual is within `tol.resid`.
pub fn apollonius_vertex(a: &Disk, b: &Disk, c: &Disk, tol: &Tolerance) -> Result<ApolloniusDisk> {
    let none = || Error::NoSolution(a.id, b.id, c.id);
    let origin = a.center;
    let scale = [
        b.center.dist(origin),
        c.center.dist(origin),
        a.radius,
        b.radius,
        c.radius,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if scale <= 0.0 {
        return Err(none());
    }
    let p2 = (b.center - origin) * (1.0 / scale);
    let p3 = (c.center - origin) * (1.0 / scale);
    let (r1, r2, r3) = (a.radius / scale, b.radius / scale, c.radius / scale);

    let rhs2 = p2.norm_sq() - r2 * r2 + r1 * r1;
    let rhs3 = p3.norm_sq() - r3 * r3 + r1 * r1;
    let det = 2.0 * p2.cross(p3) * 2.0;

    let mut candidates: Vec<(Point, f64)> = Vec::with_capacity(2);
    if det.abs() > 1e-12 {
        // M v = rhs - 2 (r_m - r1) t, solved for t = 0 and the t-coefficient.
        let solve = |u2: f64, u3: f64| {
            Point::new(
                (u2 * 2.0 * p3.y - 2.0 * p2.y * u3) / det,
                (2.0 * p2.x * u3 - u2 * 2.0 * p3.x) / det,
            )
        };
        let v0 = solve(rhs2, rhs3);
        let v1 = solve(-2.0 * (r2 - r1), -2.0 * (r3 - r1));
        let qa = v1.norm_sq() - 1.0;
        let qb = v0.dot(v1) - r1;
        let qc = v0.norm_sq() - r1 * r1;
        for t in quadratic_roots(qa, qb, qc) {
            if t > 0.0 {
                candidates.push((v0 + v1 * t, t));
            }
        }
    } else {
        // Collinear centers: x and t from the two linear equations, then y = ±√.
        let frame_dir = if p2.norm() > 0.0 { p2 * (1.0 / p2.norm()) } else { return Err(none()) };
        let x2 = p2.dot(frame_dir);
        let x3 = p3.dot(frame_dir);
        let (a11, a12, a21, a22) = (2.0 * x2, 2.0 * (r2 - r1), 2.0 * x3, 2.0 * (r3 - r1));
        let d2 = a11 * a22 - a12 * a21;
        if d2.abs() <= 1e-12 {
            return Err(none());
        }
        let x = (rhs2 * a22 - a12 * rhs3) / d2;
        let t = (a11 * rhs3 - rhs2 * a21) / d2;
        let y_sq = (t + r1) * (t + r1) - x * x;
        if t > 0.0 && y_sq >= 0.0 {
            let y = y_sq.sqrt();
            let perp = frame_dir.perp();
            candidates.push((frame_dir * x + perp * y, t));
            if y > 0.0 {
                candidates.push((frame_dir * x - perp * y, t));
            }
        }
    }

    let disks = [a, b, c];
    let mut accepted: Vec<(Point, f64)> = Vec::with_capacity(2);
    for (v, t) in candidates {
        let (v, t) = polish(origin + v * scale, t * scale, &disks);
        if !(t > 0.0 && v.x.is_finite() && v.y.is_finite()) {
            continue;
        }
        let resid = disks
            .iter()
            .map(|d| (weighted_distance(d, v) - t).abs())
            .fold(0.0, f64::max);
        if resid <= tol.resid && !accepted.iter().any(|(w, _)| w.dist(v) <= tol.resid) {
            accepted.push((v, t));
        }
    }
    match accepted.as_slice() {
        [(center, radius)] => Ok(ApolloniusDisk::Proper {
            center: *center,
            radius: *radius,
        }),
        _ => Err(none()),
    }
}

/// Real roots of `a t² + 2 b t + c = 0`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let lin_scale = b.abs().max(c.abs()).max(1e-300);
    if a.abs() <= 1e-14 * lin_scale {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / (2.0 * b)];
    }
    let mut disc = b * b - a * c;
    if disc < 0.0 {
        if disc > -1e-14 * (b * b).max((a * c).abs()) {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let q = -(b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Newton steps on `|v − p_m| − r_m − t = 0`.
fn polish(mut v: Point, mut t: f64, disks: &[&Disk; 3]) -> (Point, f64) {
    for _ in 0..3 {
        let mut jac = [[0.0; 3]; 3];
        let mut f = [0.0; 3];
        for (row, d) in disks.iter().enumerate() {
            let diff = v - d.center;
            let len = diff.norm();
            if len == 0.0 {
                return (v, t);
            }
            jac[row] = [diff.x / len, diff.y / len, -1.0];
            f[row] = len - d.radius - t;
        }
        let Some([dx, dy, dt]) = solve3(jac, f) else {
            return (v, t);
        };
        v = Point::new(v.x - dx, v.y - dy);
        t -= dt;
    }
    (v, t)
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *slot = det3(&mc) / d;
    }
    Some(out)
}

/// True iff each of the three disks contributes exactly one arc to the hull
/// of the triple. The triple is sorted by id first so the answer never
/// depends on argument order.
pub fn triple_strongly_convex(a: &Disk, b: &Disk, c: &Disk, tol: &Tolerance) -> bool {
    let mut t = [*a, *b, *c];
    t.sort_by_key(|d| d.id);
    disk_hull_with(&t, tol).classification == Classification::StronglyConvex
}
