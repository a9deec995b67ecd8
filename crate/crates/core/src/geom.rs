//! Points, quaternions, rotation matrices and the metrics on SE(3).

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::predicate::Feature;
use crate::Error;

/// Tolerance used when checking that a quaternion is unit.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Vec3 = Point3;

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthonormal(self) -> Point3 {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Point3::new(1.0, 0.0, 0.0)
        } else if self.y.abs() <= self.z.abs() {
            Point3::new(0.0, 1.0, 0.0)
        } else {
            Point3::new(0.0, 0.0, 1.0)
        };
        self.cross(a).normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0))
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Point3 {
    fn sub_assign(&mut self, o: Point3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn mul_vec(&self, v: Point3) -> Point3 {
        let m = &self.0;
        Point3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Quaternion `q0 + i q1 + j q2 + k q3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion { q0: 1.0, q1: 0.0, q2: 0.0, q3: 0.0 };

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    /// Rotation by `angle` radians about `axis` (need not be unit).
    pub fn from_axis_angle(axis: Point3, angle: f64) -> Self {
        let a = axis.normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0));
        let (s, c) = (angle / 2.0).sin_cos();
        Quaternion::new(c, a.x * s, a.y * s, a.z * s)
    }

    pub fn dot(self, o: Quaternion) -> f64 {
        self.q0 * o.q0 + self.q1 * o.q1 + self.q2 * o.q2 + self.q3 * o.q3
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    pub fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }

    pub fn normalized(self) -> Result<Quaternion, Error> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!("cannot normalize quaternion {self:?}")));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Hamilton product.
    pub fn mul(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self, o);
        Quaternion::new(
            a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
            a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
            a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
            a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
        )
    }

    pub fn get(self, i: usize) -> f64 {
        match i {
            0 => self.q0,
            1 => self.q1,
            2 => self.q2,
            3 => self.q3,
            _ => panic!("quaternion index {i} out of range"),
        }
    }

    /// Spherical interpolation along the shorter arc (`q` and `-q` identified).
    pub fn slerp(self, o: Quaternion, t: f64) -> Quaternion {
        let mut o = o;
        let mut c = self.dot(o);
        if c < 0.0 {
            o = o.neg();
            c = -c;
        }
        if c > 1.0 - 1e-12 {
            let q = Quaternion::new(
                self.q0 + (o.q0 - self.q0) * t,
                self.q1 + (o.q1 - self.q1) * t,
                self.q2 + (o.q2 - self.q2) * t,
                self.q3 + (o.q3 - self.q3) * t,
            );
            return q.normalized().unwrap_or(self);
        }
        let th = c.min(1.0).acos();
        let s = th.sin();
        let wa = ((1.0 - t) * th).sin() / s;
        let wb = (t * th).sin() / s;
        Quaternion::new(
            wa * self.q0 + wb * o.q0,
            wa * self.q1 + wb * o.q1,
            wa * self.q2 + wb * o.q2,
            wa * self.q3 + wb * o.q3,
        )
    }
}

/// Rotation matrix of `q / |q|`.
pub fn quat_to_matrix(q: Quaternion) -> Result<Mat3, Error> {
    let q = q.normalized()?;
    let (w, x, y, z) = (q.q0, q.q1, q.q2, q.q3);
    Ok(Mat3([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]))
}

/// Geodesic angle between two rotations, in `[0, pi]`.
pub fn dist_so3(p: Quaternion, q: Quaternion) -> Result<f64, Error> {
    if !p.is_unit() || !q.is_unit() {
        return Err(Error::Domain("dist_so3 expects unit quaternions".into()));
    }
    Ok(2.0 * p.dot(q).abs().min(1.0).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub lambda: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { lambda: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub t: Point3,
    pub r: Quaternion,
}

impl Configuration {
    pub fn new(t: Point3, r: Quaternion) -> Self {
        Configuration { t, r }
    }

    pub fn identity_at(t: Point3) -> Self {
        Configuration { t, r: Quaternion::IDENTITY }
    }

    /// Linear translation plus shortest-arc rotation interpolation.
    pub fn interpolate(&self, o: &Configuration, s: f64) -> Configuration {
        Configuration { t: self.t.lerp(o.t, s), r: self.r.slerp(o.r, s) }
    }
}

/// `|a.t - b.t| + lambda * dist_so3(a.r, b.r)` with `lambda = 1`.
pub fn dist_se3(a: &Configuration, b: &Configuration) -> Result<f64, Error> {
    let m = MetricParams::default();
    Ok(a.t.dist(b.t) + m.lambda * dist_so3(a.r, b.r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] inverted");
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Same midpoint, width scaled by `s`.
    pub fn scaled(&self, s: f64) -> Interval {
        let (m, h) = (self.mid(), 0.5 * self.width() * s);
        Interval::new(m - h, m + h)
    }
}

/// Axis-aligned translational cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxT {
    pub center: Point3,
    pub halfwidth: f64,
}

impl BoxT {
    pub fn new(center: Point3, halfwidth: f64) -> Self {
        BoxT { center, halfwidth }
    }

    pub fn width(&self) -> f64 {
        2.0 * self.halfwidth
    }

    /// Circumradius `sqrt(3) * w / 2`.
    pub fn radius(&self) -> f64 {
        3f64.sqrt() * self.halfwidth
    }

    pub fn contains(&self, p: Point3) -> bool {
        (p - self.center).max_abs() <= self.halfwidth
    }

    pub fn lo(&self) -> Point3 {
        self.center - Point3::new(self.halfwidth, self.halfwidth, self.halfwidth)
    }

    pub fn hi(&self) -> Point3 {
        self.center + Point3::new(self.halfwidth, self.halfwidth, self.halfwidth)
    }

    pub fn scaled(&self, s: f64) -> BoxT {
        BoxT::new(self.center, self.halfwidth * s)
    }
}

/// Distance from `p` to the closed segment `[a, b]`, with the closest point.
pub fn point_segment(p: Point3, a: Point3, b: Point3) -> (f64, Point3) {
    let d = b - a;
    let l2 = d.norm2();
    let t = if l2 > 0.0 { ((p - a).dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    let q = a + d * t;
    (p.dist(q), q)
}

/// Closest point of the closed triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_point_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

pub fn point_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> f64 {
    p.dist(closest_point_triangle(p, a, b, c))
}

/// Exact distance from a point to a closed feature.
pub fn sep_point_feature(p: Point3, f: &Feature) -> Result<f64, Error> {
    f.validate()?;
    Ok(match f {
        Feature::Corner(c) => p.dist(*c),
        Feature::Edge(a, b) => point_segment(p, *a, *b).0,
        Feature::Wall { v, .. } => point_triangle(p, v[0], v[1], v[2]),
    })
}
