//! The Delta robot, exact footprints, and the approximate footprint of a
//! configuration box as a finite union of balls, cylinders, frustums and a
//! polytope.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geom::{point_segment, point_triangle, quat_to_matrix, BoxT, Configuration, Point3, Quaternion};
use crate::predicate::Feature;
use crate::sep::{self, Primitive};
use crate::so3::{chart_map_unchecked, ChartRegion, RotBox};
use crate::Error;

/// Triangle robot `A O B`; `O` is the rotation center and sits at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRobot {
    pub a: Point3,
    pub o: Point3,
    pub b: Point3,
}

impl Default for DeltaRobot {
    fn default() -> Self {
        DeltaRobot { a: Point3::new(1.0, 0.0, 0.0), o: Point3::ZERO, b: Point3::new(0.0, 1.0, 0.0) }
    }
}

impl DeltaRobot {
    pub fn new(a: Point3, b: Point3) -> Result<Self, Error> {
        if a.cross(b).norm() <= 1e-12 * a.norm() * b.norm() {
            return Err(Error::Domain("robot triangle is degenerate".into()));
        }
        Ok(DeltaRobot { a, o: Point3::ZERO, b })
    }

    /// The default triangle scaled by `s`.
    pub fn scaled(s: f64) -> Result<Self, Error> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("robot scale must be positive, got {s}")));
        }
        let d = DeltaRobot::default();
        Ok(DeltaRobot { a: d.a * s, o: Point3::ZERO, b: d.b * s })
    }

    /// Largest distance of a robot point from `O`.
    pub fn radius(&self) -> f64 {
        self.a.norm().max(self.b.norm())
    }

    /// Largest distance between two robot points.
    pub fn diameter(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.a.dist(self.b))
    }
}

/// Closed triangle occupied by the robot at `g`.
pub fn exact_footprint(g: &Configuration, robot: &DeltaRobot) -> [Point3; 3] {
    let m = quat_to_matrix(g.r).expect("configuration rotation is unit");
    [g.t + m.mul_vec(robot.a), g.t + m.mul_vec(robot.o), g.t + m.mul_vec(robot.b)]
}

/// Images of the 8 corners of a chart region under the chart map.
pub fn region_corner_rotations(r: &ChartRegion) -> [Quaternion; 8] {
    r.corners().map(|c| chart_map_unchecked(r.embed(c)))
}

pub fn corner_rotations(br: &RotBox) -> Result<[Quaternion; 8], Error> {
    match br {
        RotBox::Full => Err(Error::Domain("corner rotations of FULL are undefined".into())),
        RotBox::Chart(c) => Ok(region_corner_rotations(&c.region())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotFootprintParams {
    pub o_a: Point3,
    pub o_b: Point3,
    pub d: f64,
}

/// Centroids of the corner images of `A` and `B` and their largest spread.
pub fn rot_footprint_params(r: &ChartRegion, robot: &DeltaRobot) -> RotFootprintParams {
    let rots = region_corner_rotations(r);
    let mats = rots.map(|q| quat_to_matrix(q).expect("chart image is nonzero"));
    let pa = mats.map(|m| m.mul_vec(robot.a));
    let pb = mats.map(|m| m.mul_vec(robot.b));
    let o_a = pa.iter().fold(Point3::ZERO, |s, &p| s + p) / 8.0;
    let o_b = pb.iter().fold(Point3::ZERO, |s, &p| s + p) / 8.0;
    let d = pa.iter().map(|p| p.dist(o_a)).chain(pb.iter().map(|p| p.dist(o_b))).fold(0.0, f64::max);
    RotFootprintParams { o_a, o_b, d }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

/// Solid right circular cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub p1: Point3,
    pub p2: Point3,
    pub radius: f64,
}

/// Solid right frustum with radius `r1` at `p1` and `r2` at `p2`; a cone when one radius is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frustum {
    pub p1: Point3,
    pub p2: Point3,
    pub r1: f64,
    pub r2: f64,
}

/// Flat closed disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point3,
    pub normal: Point3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub normal: Point3,
    pub offset: f64,
    /// Counter-clockwise about `normal`.
    pub verts: Vec<Point3>,
}

/// Bounded convex polytope: vertices, faces and supporting half-spaces `n.x <= c`.
/// A flat polytope has a single two-sided face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolytope {
    pub vertices: Vec<Point3>,
    pub faces: Vec<Face>,
    pub halfspaces: Vec<(Point3, f64)>,
    pub edges: Vec<(Point3, Point3)>,
    pub flat: bool,
}

/// Cone from apex `v` over `disc(o, r)` together with the ball that has the
/// disc as a section and is tangent to the cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IceCreamCone {
    pub v: Point3,
    pub o: Point3,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpecialPi1Set {
    Ball(Ball),
    Cylinder(Cylinder),
    Frustum(Frustum),
    Polytope(ConvexPolytope),
}

impl SpecialPi1Set {
    pub fn to_primitive(&self) -> Primitive {
        match self {
            SpecialPi1Set::Ball(b) => Primitive::Ball(*b),
            SpecialPi1Set::Cylinder(c) => Primitive::Cylinder(*c),
            SpecialPi1Set::Frustum(f) => Primitive::Frustum(*f),
            SpecialPi1Set::Polytope(p) => Primitive::Polytope(p.clone()),
        }
    }

    pub fn contains(&self, p: Point3, slack: f64) -> bool {
        self.to_primitive().contains(p, slack)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SpecialPi1Set::Ball(_) => "ball",
            SpecialPi1Set::Cylinder(_) => "cylinder",
            SpecialPi1Set::Frustum(_) => "frustum",
            SpecialPi1Set::Polytope(_) => "polytope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialSigma2Set {
    pub pieces: Vec<SpecialPi1Set>,
}

impl SpecialSigma2Set {
    pub fn contains(&self, p: Point3, slack: f64) -> bool {
        self.pieces.iter().any(|s| s.contains(p, slack))
    }

    /// One record per primitive: type tag followed by its parameters.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let pt = |p: Point3| format!("{} {} {}", p.x, p.y, p.z);
        for piece in &self.pieces {
            let _ = match piece {
                SpecialPi1Set::Ball(b) => writeln!(s, "ball {} {}", pt(b.center), b.radius),
                SpecialPi1Set::Cylinder(c) => writeln!(s, "cylinder {} {} {}", pt(c.p1), pt(c.p2), c.radius),
                SpecialPi1Set::Frustum(f) => writeln!(s, "frustum {} {} {} {}", pt(f.p1), pt(f.p2), f.r1, f.r2),
                SpecialPi1Set::Polytope(p) => {
                    let vs: Vec<String> = p.vertices.iter().map(|&v| pt(v)).collect();
                    writeln!(s, "polytope {} {}", p.vertices.len(), vs.join(" "))
                }
            };
        }
        s
    }
}

/// Hull of two balls as the piece completing `Ball1 ∪ Ball2`; `None` if one ball contains the other.
pub fn hull_piece(c1: Point3, r1: f64, c2: Point3, r2: f64) -> Option<SpecialPi1Set> {
    let l = c1.dist(c2);
    if l <= (r1 - r2).abs() || l <= 1e-15 * (1.0 + r1.max(r2)) {
        return None;
    }
    if r1 == r2 {
        return Some(SpecialPi1Set::Cylinder(Cylinder { p1: c1, p2: c2, radius: r1 }));
    }
    let u = (c2 - c1) / l;
    let s = (r1 - r2) / l;
    let k = (1.0 - s * s).sqrt();
    Some(SpecialPi1Set::Frustum(Frustum { p1: c1 + u * (r1 * s), p2: c2 + u * (r2 * s), r1: r1 * k, r2: r2 * k }))
}

/// Unit normals `n` of the planes `<n, x> = h` supporting all three balls on the same side.
pub fn common_tangent_planes(c: [Point3; 3], r: [f64; 3]) -> Option<[Point3; 2]> {
    let u = c[1] - c[0];
    let v = c[2] - c[0];
    let nrm = u.cross(v);
    let scale = u.norm2().max(v.norm2());
    if nrm.norm() <= 1e-12 * scale {
        return None;
    }
    let n_hat = nrm.normalized()?;
    let (a, b) = (r[0] - r[1], r[0] - r[2]);
    let (uu, uv, vv) = (u.dot(u), u.dot(v), v.dot(v));
    let det = uu * vv - uv * uv;
    let alpha = (a * vv - b * uv) / det;
    let beta = (b * uu - a * uv) / det;
    let n_in = u * alpha + v * beta;
    let g2 = 1.0 - n_in.norm2();
    if g2 < 0.0 {
        return None;
    }
    let g = g2.sqrt();
    Some([n_in + n_hat * g, n_in - n_hat * g])
}

/// Polytope completing the hull of three balls: hull of the six tangency points.
pub fn pyramid_piece(c: [Point3; 3], r: [f64; 3]) -> Option<ConvexPolytope> {
    let ns = common_tangent_planes(c, r)?;
    let mut pts = Vec::with_capacity(6);
    for n in ns {
        for j in 0..3 {
            pts.push(c[j] + n * r[j]);
        }
    }
    ConvexPolytope::from_points(&pts)
}

impl ConvexPolytope {
    /// Convex hull of a small point set (brute force over point triples).
    pub fn from_points(input: &[Point3]) -> Option<ConvexPolytope> {
        let scale = input.iter().map(|p| p.max_abs()).fold(0.0, f64::max).max(1e-300);
        let ext = input.iter().flat_map(|p| input.iter().map(move |q| p.dist(*q))).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(ext);
        let mut pts: Vec<Point3> = Vec::new();
        for &p in input {
            if pts.iter().all(|q| q.dist(p) > tol) {
                pts.push(p);
            }
        }
        if pts.len() < 3 {
            return None;
        }
        // Find a non-degenerate triangle to fix a reference plane.
        let mut best = (0.0, [0, 1, 2]);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    let a = (pts[j] - pts[i]).cross(pts[k] - pts[i]).norm();
                    if a > best.0 {
                        best = (a, [i, j, k]);
                    }
                }
            }
        }
        if best.0 <= tol * ext {
            return None;
        }
        let [i0, j0, k0] = best.1;
        let n0 = (pts[j0] - pts[i0]).cross(pts[k0] - pts[i0]).normalized()?;
        let off_plane = pts.iter().map(|p| (*p - pts[i0]).dot(n0).abs()).fold(0.0, f64::max);
        if off_plane <= tol {
            return Some(Self::flat(&pts, n0));
        }
        let mut faces: Vec<Face> = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    let Some(mut n) = (pts[j] - pts[i]).cross(pts[k] - pts[i]).normalized() else { continue };
                    let mut c = n.dot(pts[i]);
                    let side: Vec<f64> = pts.iter().map(|p| n.dot(*p) - c).collect();
                    let above = side.iter().any(|&s| s > tol);
                    let below = side.iter().any(|&s| s < -tol);
                    if above && below {
                        continue;
                    }
                    if above {
                        n = -n;
                        c = -c;
                    }
                    if faces.iter().any(|f| f.normal.dot(n) > 1.0 - 1e-12 && (f.offset - c).abs() <= tol) {
                        continue;
                    }
                    let on: Vec<Point3> = pts.iter().copied().filter(|p| (n.dot(*p) - c).abs() <= tol).collect();
                    faces.push(Face { normal: n, offset: c, verts: order_ccw(&on, n) });
                }
            }
        }
        let mut vertices: Vec<Point3> = Vec::new();
        let mut edges: Vec<(Point3, Point3)> = Vec::new();
        for f in &faces {
            for (k, &v) in f.verts.iter().enumerate() {
                if !vertices.contains(&v) {
                    vertices.push(v);
                }
                let w = f.verts[(k + 1) % f.verts.len()];
                if !edges.iter().any(|&(a, b)| (a == v && b == w) || (a == w && b == v)) {
                    edges.push((v, w));
                }
            }
        }
        let halfspaces = faces.iter().map(|f| (f.normal, f.offset)).collect();
        Some(ConvexPolytope { vertices, faces, halfspaces, edges, flat: false })
    }

    fn flat(pts: &[Point3], n: Point3) -> ConvexPolytope {
        let poly = order_ccw(&hull_2d(pts, n), n);
        let c = n.dot(poly[0]);
        let mut halfspaces = vec![(n, c), (-n, -c)];
        let mut edges = Vec::new();
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            let out = (b - a).cross(n).normalized().expect("distinct hull vertices");
            halfspaces.push((out, out.dot(a)));
            edges.push((a, b));
        }
        ConvexPolytope {
            vertices: poly.clone(),
            faces: vec![Face { normal: n, offset: c, verts: poly }],
            halfspaces,
            edges,
            flat: true,
        }
    }

    pub fn contains(&self, p: Point3, slack: f64) -> bool {
        self.halfspaces.iter().all(|&(n, c)| n.dot(p) <= c + slack)
    }
}

/// Sort coplanar points counter-clockwise about `n`, keeping only hull vertices.
fn order_ccw(pts: &[Point3], n: Point3) -> Vec<Point3> {
    hull_2d(pts, n)
}

/// 2D convex hull (monotone chain) of points in a plane with normal `n`, CCW about `n`.
fn hull_2d(pts: &[Point3], n: Point3) -> Vec<Point3> {
    let e1 = n.any_orthonormal();
    let e2 = n.cross(e1);
    let mut p: Vec<(f64, f64, Point3)> = pts.iter().map(|&q| (q.dot(e1), q.dot(e2), q)).collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup_by(|a, b| a.2 == b.2);
    if p.len() < 3 {
        return p.into_iter().map(|t| t.2).collect();
    }
    let cross = |o: &(f64, f64, Point3), a: &(f64, f64, Point3), b: &(f64, f64, Point3)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64, Point3)> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<(f64, f64, Point3)> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.into_iter().map(|t| t.2).collect()
}

/// `Fp(B)` over-approximation: seven pieces (degenerate ones dropped).
pub fn approx_footprint(bt: &BoxT, br: &ChartRegion, robot: &DeltaRobot) -> SpecialSigma2Set {
    let prm = rot_footprint_params(br, robot);
    let m = bt.center;
    let r = bt.radius();
    let (ca, cb, rr) = (m + prm.o_a, m + prm.o_b, r + prm.d);
    let mut pieces = vec![
        SpecialPi1Set::Ball(Ball { center: m, radius: r }),
        SpecialPi1Set::Ball(Ball { center: ca, radius: rr }),
        SpecialPi1Set::Ball(Ball { center: cb, radius: rr }),
    ];
    pieces.extend(hull_piece(m, r, ca, rr));
    pieces.extend(hull_piece(m, r, cb, rr));
    pieces.extend(hull_piece(ca, rr, cb, rr));
    if let Some(p) = pyramid_piece([m, ca, cb], [r, rr, rr]) {
        pieces.push(SpecialPi1Set::Polytope(p));
    }
    SpecialSigma2Set { pieces }
}

/// Footprint of `Bt x SO(3)`: every orientation about every center in the cube.
pub fn full_rotation_footprint(bt: &BoxT, robot: &DeltaRobot) -> Ball {
    Ball { center: bt.center, radius: bt.radius() + robot.radius() }
}

/// Hull of an apex and a ball, in the shape the separation queries accept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IccPart {
    Cone(IceCreamCone),
    /// Apex inside the ball.
    Ball(Ball),
    /// Zero-radius ball: the segment from apex to center.
    Segment(Point3, Point3),
}

impl IccPart {
    pub fn hull_of(apex: Point3, center: Point3, radius: f64) -> IccPart {
        let h = apex.dist(center);
        if radius <= 0.0 {
            return IccPart::Segment(apex, center);
        }
        if h <= radius {
            return IccPart::Ball(Ball { center, radius });
        }
        IccPart::Cone(IceCreamCone::from_apex_ball(apex, center, radius))
    }

    pub fn to_primitive(&self) -> Primitive {
        match self {
            IccPart::Cone(c) => Primitive::Icc(*c),
            IccPart::Ball(b) => Primitive::Ball(*b),
            IccPart::Segment(a, b) => Primitive::FatSegment { a: *a, b: *b, radius: 0.0 },
        }
    }
}

impl IceCreamCone {
    /// Parameters whose ball is `Ball(center, radius)`; requires the apex outside the ball.
    pub fn from_apex_ball(apex: Point3, center: Point3, radius: f64) -> IceCreamCone {
        let h = apex.dist(center);
        let k = (h * h - radius * radius).max(0.0).sqrt();
        let o = center + (apex - center) * (radius * radius / (h * h));
        IceCreamCone { v: apex, o, r: radius * k / h }
    }

    pub fn height(&self) -> f64 {
        self.v.dist(self.o)
    }
}

/// The ball of an ice-cream cone: center at distance `(h^2 + r^2)/h` from the
/// apex along the axis, radius `r sqrt(h^2 + r^2) / h`.
pub fn icc_ball(ic: &IceCreamCone) -> Result<Ball, Error> {
    let h = ic.height();
    if !(h > 0.0) {
        return Err(Error::Domain("ice-cream cone with zero height".into()));
    }
    let axis = (ic.o - ic.v) / h;
    let dist = (h * h + ic.r * ic.r) / h;
    Ok(Ball { center: ic.v + axis * dist, radius: ic.r * (h * h + ic.r * ic.r).sqrt() / h })
}

/// Four-part form of the approximate footprint: two ice-cream cones and a
/// fat segment (each to be dilated by the given radius) and the polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub icc_a: IccPart,
    pub icc_b: IccPart,
    pub seg: (Point3, Point3),
    pub seg_radius: f64,
    pub pyr: Option<ConvexPolytope>,
    /// Dilation radius `r(B)` of the ice-cream cones.
    pub r: f64,
    pub center: Point3,
    pub reach: f64,
}

impl Decomposition {
    /// Disjointness of `f` from the approximate footprint via four separation queries.
    pub fn misses(&self, f: &Feature) -> bool {
        // Every piece lies within `seg_radius` of the triangle (m, c_A, c_B), and
        // the apex ball and the fat segment are pieces themselves.
        if feature_point_dist(f, self.center) <= self.r || feature_segment_dist(f, self.seg.0, self.seg.1) <= self.seg_radius {
            return false;
        }
        if let Some(d) = feature_triangle_dist(f, [self.center, self.seg.0, self.seg.1]) {
            if d > self.seg_radius {
                return true;
            }
        }
        let gt = |p: &Primitive, s: f64| sep::sep_gt(p, f, s).unwrap_or(false);
        gt(&self.icc_a.to_primitive(), self.r)
            && gt(&self.icc_b.to_primitive(), self.r)
            && gt(&Primitive::FatSegment { a: self.seg.0, b: self.seg.1, radius: 0.0 }, self.seg_radius)
            && self.pyr.as_ref().map_or(true, |p| sep::sep_polytope_feature_gt(p, f, 0.0).unwrap_or(false))
    }

    pub fn bounding_ball(&self) -> (Point3, f64) {
        (self.center, self.reach)
    }
}

fn feature_point_dist(f: &Feature, p: Point3) -> f64 {
    match f {
        Feature::Corner(c) => c.dist(p),
        Feature::Edge(a, b) => point_segment(p, *a, *b).0,
        Feature::Wall { v, .. } => point_triangle(p, v[0], v[1], v[2]),
    }
}

fn feature_segment_dist(f: &Feature, a: Point3, b: Point3) -> f64 {
    match f {
        Feature::Corner(c) => point_segment(*c, a, b).0,
        Feature::Edge(p, q) => sep::segment_segment(a, b, *p, *q).0,
        Feature::Wall { v, .. } => sep::segment_triangle(a, b, *v),
    }
}

/// Distance from a feature to a triangle; `None` if the triangle is too thin.
fn feature_triangle_dist(f: &Feature, t: [Point3; 3]) -> Option<f64> {
    let n = (t[1] - t[0]).cross(t[2] - t[0]).norm();
    let e = (t[1] - t[0]).norm2().max((t[2] - t[0]).norm2()).max((t[2] - t[1]).norm2());
    if !(n > 1e-6 * e) {
        return None;
    }
    Some(match f {
        Feature::Corner(c) => point_triangle(*c, t[0], t[1], t[2]),
        Feature::Edge(a, b) => sep::segment_triangle(*a, *b, t),
        Feature::Wall { v, .. } => {
            let mut d = f64::INFINITY;
            for k in 0..3 {
                d = d.min(sep::segment_triangle(t[k], t[(k + 1) % 3], *v));
                d = d.min(sep::segment_triangle(v[k], v[(k + 1) % 3], t));
            }
            d
        }
    })
}

pub fn very_special_decomposition(bt: &BoxT, br: &ChartRegion, robot: &DeltaRobot) -> Decomposition {
    let prm = rot_footprint_params(br, robot);
    let m = bt.center;
    let r = bt.radius();
    let (ca, cb) = (m + prm.o_a, m + prm.o_b);
    let rr = r + prm.d;
    Decomposition {
        icc_a: IccPart::hull_of(m, ca, prm.d),
        icc_b: IccPart::hull_of(m, cb, prm.d),
        seg: (ca, cb),
        seg_radius: rr,
        pyr: pyramid_piece([m, ca, cb], [r, rr, rr]),
        r,
        center: m,
        reach: (prm.o_a.norm() + rr).max(prm.o_b.norm() + rr).max(r),
    }
}
