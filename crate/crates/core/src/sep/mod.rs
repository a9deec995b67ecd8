//! Parametric separation queries `Sep(A, f) > s` between the convex pieces
//! of an approximate footprint and obstacle features.
//!
//! Every query is answered by boundary reduction: a feature that is not hit
//! is at distance `min(Sep(A, boundary of f), interior candidates)`, where the
//! interior candidates are the finitely many locally closest pairs with the
//! feature point in the relative interior of `f`.

pub mod roots;

use crate::footprint::{icc_ball, Ball, ConvexPolytope, Cylinder, Disc, Frustum, IceCreamCone, SpecialSigma2Set};
use crate::geom::{point_segment, point_triangle, Point3};
use crate::predicate::Feature;
use crate::Error;

/// Any convex piece the footprint module hands to the separation queries.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Ball(Ball),
    Cylinder(Cylinder),
    /// A cone when one radius is zero.
    Frustum(Frustum),
    Polytope(ConvexPolytope),
    Icc(IceCreamCone),
    /// Segment dilated by `radius` (a bare segment when `radius == 0`).
    FatSegment { a: Point3, b: Point3, radius: f64 },
    Disc(Disc),
}

/// A locally closest pair: `p` on the primitive side, `q` on the line or feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPair {
    pub p: Point3,
    pub q: Point3,
    /// Line parameter of `q`.
    pub t: f64,
    pub dist: f64,
}

impl ClosestPair {
    fn new(p: Point3, q: Point3, t: f64) -> Self {
        ClosestPair { p, q, t, dist: p.dist(q) }
    }
}

const REL_TOL: f64 = 1e-12;

impl Primitive {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        match self {
            Primitive::Ball(b) if !(b.radius >= 0.0) || !b.center.is_finite() => bad("ball with invalid radius"),
            Primitive::Cylinder(c) if !(c.radius >= 0.0) || c.p1.dist(c.p2) == 0.0 => bad("degenerate cylinder axis"),
            Primitive::Frustum(f) if !(f.r1 >= 0.0 && f.r2 >= 0.0) || f.p1.dist(f.p2) == 0.0 => {
                bad("degenerate frustum axis")
            }
            Primitive::Polytope(p) if p.vertices.is_empty() => bad("empty polytope"),
            Primitive::Icc(ic) if !(ic.height() > 0.0) || !(ic.r >= 0.0) => bad("ice-cream cone with zero height"),
            Primitive::FatSegment { radius, .. } if !(*radius >= 0.0) => bad("negative segment radius"),
            Primitive::Disc(d) if d.normal.normalized().is_none() || !(d.radius >= 0.0) => bad("disc without normal"),
            _ => Ok(()),
        }
    }

    /// Membership with an absolute slack.
    pub fn contains(&self, p: Point3, slack: f64) -> bool {
        match self {
            Primitive::Polytope(poly) => poly.contains(p, slack),
            _ => match self.solid() {
                Ok(s) => s.point_dist(p) <= slack,
                Err(_) => false,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Primitive::Ball(_) => "ball",
            Primitive::Cylinder(_) => "cylinder",
            Primitive::Frustum(_) => "frustum",
            Primitive::Polytope(_) => "polytope",
            Primitive::Icc(_) => "icc",
            Primitive::FatSegment { .. } => "fat-segment",
            Primitive::Disc(_) => "disc",
        }
    }

    fn solid(&self) -> Result<Solid<'_>, Error> {
        self.validate()?;
        Ok(match self {
            Primitive::Ball(b) => Solid::Ball(*b),
            Primitive::Cylinder(c) => Solid::Axial(Axial::new(c.p1, c.p2, c.radius, c.radius)),
            Primitive::Frustum(f) => Solid::Axial(Axial::new(f.p1, f.p2, f.r1, f.r2)),
            Primitive::Polytope(p) => Solid::Poly(p),
            Primitive::Icc(ic) => {
                let ball = icc_ball(ic)?;
                Solid::Union(vec![Solid::Ball(ball), Solid::Axial(Axial::new(ic.v, ic.o, 0.0, ic.r))])
            }
            Primitive::FatSegment { a, b, radius } => Solid::Capsule(*a, *b, *radius),
            Primitive::Disc(d) => Solid::Disc(DiscS::new(*d)),
        })
    }
}

/// `Sep(A, f)`, the distance between `A` and the closed feature (0 when they meet).
pub fn sep_value(a: &Primitive, f: &Feature) -> Result<f64, Error> {
    f.validate()?;
    let s = a.solid()?;
    Ok(dist_feature(&s, f, f64::NEG_INFINITY))
}

/// `true` iff `Sep(A, f) > s`.
pub fn sep_gt(a: &Primitive, f: &Feature, s: f64) -> Result<bool, Error> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("separation threshold {s} must be finite and >= 0")));
    }
    boundary_reduce(a, f, s)
}

/// Boundary reduction: intersection test, then `Q_A = Sep(A, boundary f) > s`
/// and `Q_0 = min over interior closest pairs > s`, stopping at the first failure.
pub fn boundary_reduce(a: &Primitive, f: &Feature, s: f64) -> Result<bool, Error> {
    f.validate()?;
    let solid = a.solid()?;
    Ok(dist_feature(&solid, f, s) > s)
}

pub fn sep_disc_feature_gt(d: &Disc, f: &Feature, s: f64) -> Result<bool, Error> {
    sep_gt(&Primitive::Disc(*d), f, s)
}

pub fn sep_icc_feature_gt(ic: &IceCreamCone, f: &Feature, s: f64) -> Result<bool, Error> {
    sep_gt(&Primitive::Icc(*ic), f, s)
}

pub fn sep_cylinder_feature_gt(c: &Cylinder, f: &Feature, s: f64) -> Result<bool, Error> {
    sep_gt(&Primitive::Cylinder(*c), f, s)
}

pub fn sep_frustum_feature_gt(fr: &Frustum, f: &Feature, s: f64) -> Result<bool, Error> {
    sep_gt(&Primitive::Frustum(*fr), f, s)
}

pub fn sep_polytope_feature_gt(p: &ConvexPolytope, f: &Feature, s: f64) -> Result<bool, Error> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("separation threshold {s} must be finite and >= 0")));
    }
    if p.vertices.is_empty() {
        return Err(Error::Domain("empty polytope".into()));
    }
    f.validate()?;
    Ok(dist_feature(&Solid::Poly(p), f, s) > s)
}

/// `true` when `f` misses every piece of the union.
pub fn sigma2_collision(f: &Feature, a: &SpecialSigma2Set) -> Result<bool, Error> {
    for piece in &a.pieces {
        if !sep_gt(&piece.to_primitive(), f, 0.0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance from the solid to a closed feature. Evaluation stops early once
/// a candidate at or below `stop` is seen, since the caller only compares with it.
fn dist_feature(s: &Solid, f: &Feature, stop: f64) -> f64 {
    match f {
        Feature::Corner(p) => s.point_dist(*p),
        Feature::Edge(a, b) => dist_segment(s, *a, *b, stop),
        Feature::Wall { v, .. } => {
            let tri = Tri::new(*v);
            let mut best = f64::INFINITY;
            for k in 0..3 {
                best = best.min(dist_segment(s, v[k], v[(k + 1) % 3], stop));
                if best <= 0.0 {
                    return 0.0;
                }
            }
            if best <= stop {
                return best;
            }
            if s.tri_hits(&tri) {
                return 0.0;
            }
            best.min(s.tri_interior(&tri))
        }
    }
}

fn dist_segment(s: &Solid, a: Point3, b: Point3, stop: f64) -> f64 {
    if s.seg_hits(a, b) {
        return 0.0;
    }
    let e = s.point_dist(a).min(s.point_dist(b));
    if e <= stop {
        return e;
    }
    e.min(s.seg_interior(a, b))
}

/// Closed triangle with unit normal.
#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [Point3; 3],
    n: Point3,
    scale: f64,
}

impl Tri {
    fn new(v: [Point3; 3]) -> Tri {
        let n = (v[1] - v[0]).cross(v[2] - v[0]).normalized().unwrap_or(Point3::new(0.0, 0.0, 1.0));
        let scale = v.iter().map(|p| p.max_abs()).fold(1.0, f64::max);
        Tri { v, n, scale }
    }

    fn dist(&self, p: Point3) -> f64 {
        point_triangle(p, self.v[0], self.v[1], self.v[2])
    }

    fn height(&self, p: Point3) -> f64 {
        (p - self.v[0]).dot(self.n)
    }

    fn project(&self, p: Point3) -> Point3 {
        p - self.n * self.height(p)
    }

    fn tol(&self) -> f64 {
        REL_TOL * self.scale
    }
}

/// Closest points of segments `[p1, q1]` and `[p2, q2]`: `(dist, c1, c2)`.
pub fn segment_segment(p1: Point3, q1: Point3, p2: Point3, q2: Point3) -> (f64, Point3, Point3) {
    let (d1, d2, r) = (q1 - p1, q2 - p2, p1 - p2);
    let (a, e, f) = (d1.norm2(), d2.norm2(), d2.dot(r));
    let eps = 1e-30;
    let (s, t);
    if a <= eps && e <= eps {
        return (p1.dist(p2), p1, p2);
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            } else {
                t = t0;
                s = s0;
            }
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1.dist(c2), c1, c2)
}

/// Whether segment `[a, b]` meets the closed triangle.
fn segment_hits_triangle(a: Point3, b: Point3, t: &Tri) -> bool {
    let (ha, hb) = (t.height(a), t.height(b));
    if ha * hb > 0.0 {
        return false;
    }
    if ha == hb {
        // Coplanar.
        return t.dist(a) <= t.tol()
            || t.dist(b) <= t.tol()
            || (0..3).any(|k| segment_segment(a, b, t.v[k], t.v[(k + 1) % 3]).0 <= t.tol());
    }
    let x = a + (b - a) * (ha / (ha - hb));
    t.dist(x) <= t.tol()
}

/// Exact distance between a segment and a closed triangle.
pub fn segment_triangle(a: Point3, b: Point3, v: [Point3; 3]) -> f64 {
    let t = Tri::new(v);
    if segment_hits_triangle(a, b, &t) {
        return 0.0;
    }
    let mut d = t.dist(a).min(t.dist(b));
    for k in 0..3 {
        d = d.min(segment_segment(a, b, v[k], v[(k + 1) % 3]).0);
    }
    d
}

/// Points of a convex body minimising a linear function.
#[derive(Debug, Clone, Copy)]
enum SupportSet {
    Point(Point3),
    Segment(Point3, Point3),
    Disc { center: Point3, radius: f64 },
}

impl SupportSet {
    fn any_point(&self) -> Point3 {
        match *self {
            SupportSet::Point(p) | SupportSet::Segment(p, _) => p,
            SupportSet::Disc { center, .. } => center,
        }
    }

    /// Whether the orthogonal projection onto the triangle's plane meets the triangle.
    fn projection_meets(&self, t: &Tri) -> bool {
        match *self {
            SupportSet::Point(p) => t.dist(t.project(p)) <= t.tol(),
            SupportSet::Segment(p, q) => segment_triangle(t.project(p), t.project(q), t.v) <= t.tol(),
            SupportSet::Disc { center, radius } => t.dist(t.project(center)) <= radius + t.tol(),
        }
    }
}

/// Minimiser of `<x, n>` over a disc with center `c`, unit axis `u`, radius `r`.
fn rim_min(c: Point3, u: Point3, r: f64, n: Point3) -> (f64, SupportSet) {
    let perp = n - u * n.dot(u);
    let pn = perp.norm();
    if r == 0.0 {
        return (c.dot(n), SupportSet::Point(c));
    }
    if pn <= 1e-12 * n.norm() {
        return (c.dot(n), SupportSet::Disc { center: c, radius: r });
    }
    let p = c - perp * (r / pn);
    (p.dot(n), SupportSet::Point(p))
}

/// Right frustum (cylinder when `r1 == r2`, cone when a radius is 0).
#[derive(Debug, Clone, Copy)]
struct Axial {
    p1: Point3,
    p2: Point3,
    r1: f64,
    r2: f64,
    u: Point3,
    len: f64,
}

impl Axial {
    fn new(p1: Point3, p2: Point3, r1: f64, r2: f64) -> Axial {
        let len = p1.dist(p2);
        Axial { p1, p2, r1, r2, u: (p2 - p1) / len, len }
    }

    fn scale(&self) -> f64 {
        self.len.max(self.r1).max(self.r2).max(self.p1.max_abs())
    }

    fn slope(&self) -> f64 {
        (self.r2 - self.r1) / self.len
    }

    fn is_cylinder(&self) -> bool {
        (self.r2 - self.r1).abs() <= 1e-9 * self.len.max(self.r1).max(self.r2)
    }

    fn point_dist(&self, x: Point3) -> f64 {
        let w = x - self.p1;
        let z = w.dot(self.u);
        let rho = (w - self.u * z).norm();
        if (0.0..=self.len).contains(&z) && rho <= self.r1 + self.slope() * z {
            return 0.0;
        }
        let seg2 = |ax: f64, az: f64, bx: f64, bz: f64| {
            let (dx, dz) = (bx - ax, bz - az);
            let l2 = dx * dx + dz * dz;
            let t = if l2 > 0.0 { (((rho - ax) * dx + (z - az) * dz) / l2).clamp(0.0, 1.0) } else { 0.0 };
            (rho - ax - t * dx).hypot(z - az - t * dz)
        };
        seg2(0.0, 0.0, self.r1, 0.0).min(seg2(self.r1, 0.0, self.r2, self.len)).min(seg2(0.0, self.len, self.r2, self.len))
    }

    fn seg_hits(&self, a: Point3, b: Point3) -> bool {
        let d = b - a;
        let za = (a - self.p1).dot(self.u);
        let dz = d.dot(self.u);
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        if dz.abs() <= 1e-300 {
            if za < 0.0 || za > self.len {
                return false;
            }
        } else {
            let (ta, tb) = ((0.0 - za) / dz, (self.len - za) / dz);
            t0 = t0.max(ta.min(tb));
            t1 = t1.min(ta.max(tb));
            if t0 > t1 {
                return false;
            }
        }
        let k = self.slope();
        let w0 = (a - self.p1) - self.u * za;
        let w1 = d - self.u * dz;
        let (r0, r1) = (self.r1 + k * za, k * dz);
        let qa = w1.norm2() - r1 * r1;
        let qb = 2.0 * (w0.dot(w1) - r0 * r1);
        let qc = w0.norm2() - r0 * r0;
        let f = |t: f64| (qa * t + qb) * t + qc;
        let mut m = f(t0).min(f(t1));
        if qa > 0.0 {
            let tv = -qb / (2.0 * qa);
            if tv > t0 && tv < t1 {
                m = m.min(f(tv));
            }
        }
        m <= 0.0
    }

    fn seg_interior(&self, a: Point3, b: Point3) -> f64 {
        let d = b - a;
        let tol = REL_TOL * self.scale();
        let in_slab = |p: Point3| {
            let z = (p - self.p1).dot(self.u);
            z >= -tol && z <= self.len + tol
        };
        let mut best = f64::INFINITY;
        if self.is_cylinder() {
            let r = self.r1.max(self.r2);
            let za = (a - self.p1).dot(self.u);
            let w0 = (a - self.p1) - self.u * za;
            let w1 = d - self.u * d.dot(self.u);
            let l2 = w1.norm2();
            if l2 > 1e-300 {
                let t = -w0.dot(w1) / l2;
                if t > 0.0 && t < 1.0 && in_slab(a + d * t) {
                    best = best.min(((w0 + w1 * t).norm() - r).max(0.0));
                }
            }
        } else {
            let k = self.slope();
            let apex = self.p1 - self.u * (self.r1 / k);
            let axis = if k > 0.0 { self.u } else { -self.u };
            for cp in cp_cone_line(apex, axis, k.abs(), a, d).pairs {
                if cp.t > 0.0 && cp.t < 1.0 && in_slab(cp.p) {
                    best = best.min(cp.dist);
                }
            }
        }
        for (c, r) in [(self.p1, self.r1), (self.p2, self.r2)] {
            let cap = if r > 0.0 {
                let disc = DiscS::new(Disc { center: c, normal: self.u, radius: r });
                dist_segment(&Solid::Disc(disc), a, b, f64::NEG_INFINITY)
            } else {
                point_segment(c, a, b).0
            };
            best = best.min(cap);
        }
        best
    }

    fn support_min(&self, n: Point3) -> (f64, SupportSet) {
        let (v1, s1) = rim_min(self.p1, self.u, self.r1, n);
        let (v2, s2) = rim_min(self.p2, self.u, self.r2, n);
        if (v1 - v2).abs() <= REL_TOL * self.scale() {
            if let (SupportSet::Point(p), SupportSet::Point(q)) = (s1, s2) {
                return (v1.min(v2), SupportSet::Segment(p, q));
            }
        }
        if v1 <= v2 {
            (v1, s1)
        } else {
            (v2, s2)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct DiscS {
    c: Point3,
    n: Point3,
    r: f64,
}

impl DiscS {
    fn new(d: Disc) -> DiscS {
        DiscS { c: d.center, n: d.normal.normalized().unwrap_or(Point3::new(0.0, 0.0, 1.0)), r: d.radius }
    }

    fn scale(&self) -> f64 {
        self.r.max(self.c.max_abs()).max(1.0)
    }

    fn point_dist(&self, p: Point3) -> f64 {
        let w = p - self.c;
        let h = w.dot(self.n);
        let rho = (w - self.n * h).norm();
        if rho <= self.r {
            h.abs()
        } else {
            (rho - self.r).hypot(h)
        }
    }

    fn seg_hits(&self, a: Point3, b: Point3) -> bool {
        let (ha, hb) = ((a - self.c).dot(self.n), (b - self.c).dot(self.n));
        if ha * hb > 0.0 {
            return false;
        }
        if ha == hb {
            return point_segment(self.c, a, b).0 <= self.r;
        }
        let x = a + (b - a) * (ha / (ha - hb));
        x.dist(self.c) <= self.r
    }

    fn seg_interior(&self, a: Point3, b: Point3) -> f64 {
        let d = b - a;
        let mut best = f64::INFINITY;
        if self.r > 0.0 {
            for cp in cp_circle_line(self.c, self.n, self.r, a, d).unwrap_or_default() {
                if cp.t > 0.0 && cp.t < 1.0 {
                    best = best.min(cp.dist);
                }
            }
        }
        let (ha, hb) = ((a - self.c).dot(self.n), (b - self.c).dot(self.n));
        if (ha - hb).abs() <= REL_TOL * d.norm().max(self.scale()) {
            let (pa, pb) = (a - self.n * ha, b - self.n * hb);
            if point_segment(self.c, pa, pb).0 <= self.r {
                best = best.min(ha.abs().min(hb.abs()));
            }
        }
        best
    }

    fn support_min(&self, n: Point3) -> (f64, SupportSet) {
        rim_min(self.c, self.n, self.r, n)
    }
}

#[derive(Debug, Clone)]
enum Solid<'a> {
    Ball(Ball),
    Capsule(Point3, Point3, f64),
    Axial(Axial),
    Disc(DiscS),
    Poly(&'a ConvexPolytope),
    Union(Vec<Solid<'a>>),
}

impl Solid<'_> {
    fn point_dist(&self, p: Point3) -> f64 {
        match self {
            Solid::Ball(b) => (p.dist(b.center) - b.radius).max(0.0),
            Solid::Capsule(a, b, r) => (point_segment(p, *a, *b).0 - r).max(0.0),
            Solid::Axial(x) => x.point_dist(p),
            Solid::Disc(d) => d.point_dist(p),
            Solid::Poly(poly) => poly_point_dist(poly, p),
            Solid::Union(parts) => parts.iter().map(|s| s.point_dist(p)).fold(f64::INFINITY, f64::min),
        }
    }

    fn seg_hits(&self, a: Point3, b: Point3) -> bool {
        match self {
            Solid::Ball(ball) => point_segment(ball.center, a, b).0 <= ball.radius,
            Solid::Capsule(p, q, r) => segment_segment(*p, *q, a, b).0 <= *r,
            Solid::Axial(x) => x.seg_hits(a, b),
            Solid::Disc(d) => d.seg_hits(a, b),
            Solid::Poly(poly) => poly_seg_hits(poly, a, b),
            Solid::Union(parts) => parts.iter().any(|s| s.seg_hits(a, b)),
        }
    }

    fn seg_interior(&self, a: Point3, b: Point3) -> f64 {
        match self {
            Solid::Ball(ball) => (point_segment(ball.center, a, b).0 - ball.radius).max(0.0),
            Solid::Capsule(p, q, r) => (segment_segment(*p, *q, a, b).0 - r).max(0.0),
            Solid::Axial(x) => x.seg_interior(a, b),
            Solid::Disc(d) => d.seg_interior(a, b),
            Solid::Poly(poly) => {
                poly.edges.iter().map(|&(p, q)| segment_segment(p, q, a, b).0).fold(f64::INFINITY, f64::min)
            }
            Solid::Union(parts) => parts.iter().map(|s| s.seg_interior(a, b)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether the solid meets the triangle, given that no triangle edge does.
    fn tri_hits(&self, t: &Tri) -> bool {
        match self {
            Solid::Ball(b) => t.dist(b.center) <= b.radius,
            Solid::Capsule(p, q, r) => segment_triangle(*p, *q, t.v) <= *r,
            Solid::Axial(x) => convex_tri_hits(|n| x.support_min(n), t),
            Solid::Disc(d) => convex_tri_hits(|n| d.support_min(n), t),
            Solid::Poly(poly) => poly_tri_hits(poly, t),
            Solid::Union(parts) => parts.iter().any(|s| s.tri_hits(t)),
        }
    }

    /// Candidates with the triangle point in the open triangle.
    fn tri_interior(&self, t: &Tri) -> f64 {
        match self {
            Solid::Ball(b) => (t.dist(b.center) - b.radius).max(0.0),
            Solid::Capsule(p, q, r) => (segment_triangle(*p, *q, t.v) - r).max(0.0),
            Solid::Axial(x) => convex_tri_interior(|n| x.support_min(n), t),
            Solid::Disc(d) => convex_tri_interior(|n| d.support_min(n), t),
            Solid::Poly(poly) => poly.vertices.iter().map(|&v| t.dist(v)).fold(f64::INFINITY, f64::min),
            Solid::Union(parts) => parts.iter().map(|s| s.tri_interior(t)).fold(f64::INFINITY, f64::min),
        }
    }
}

/// A convex body crossing the triangle's plane meets the triangle iff any
/// point of the (convex) cross-section does, once the edges are known to miss.
fn convex_tri_hits(support_min: impl Fn(Point3) -> (f64, SupportSet), t: &Tri) -> bool {
    let h0 = t.v[0].dot(t.n);
    let (vmin, smin) = support_min(t.n);
    let (vmax, smax) = support_min(-t.n);
    let (lo, hi) = (vmin - h0, -vmax - h0);
    if lo > 0.0 || hi < 0.0 {
        return false;
    }
    let (pm, pp) = (smin.any_point(), smax.any_point());
    let (hm, hp) = (t.height(pm), t.height(pp));
    let x = if hp - hm > 0.0 { pm + (pp - pm) * (-hm / (hp - hm)) } else { pm };
    t.dist(x) <= t.tol()
}

/// Distance realised between the open triangle and the body's support set
/// towards the triangle's plane, when that support set projects into it.
fn convex_tri_interior(support_min: impl Fn(Point3) -> (f64, SupportSet), t: &Tri) -> f64 {
    let h0 = t.v[0].dot(t.n);
    let (vmin, smin) = support_min(t.n);
    if vmin - h0 > 0.0 && smin.projection_meets(t) {
        return vmin - h0;
    }
    let (vmax, smax) = support_min(-t.n);
    let hi = -vmax - h0;
    if hi < 0.0 && smax.projection_meets(t) {
        return -hi;
    }
    f64::INFINITY
}

fn poly_scale(p: &ConvexPolytope) -> f64 {
    p.vertices.iter().map(|v| v.max_abs()).fold(1.0, f64::max)
}

fn face_point_dist(face: &crate::footprint::Face, p: Point3) -> f64 {
    let h = p.dot(face.normal) - face.offset;
    let q = p - face.normal * h;
    let m = face.verts.len();
    if m >= 3 {
        let inside = (0..m).all(|k| {
            let (a, b) = (face.verts[k], face.verts[(k + 1) % m]);
            (b - a).cross(q - a).dot(face.normal) >= 0.0
        });
        if inside {
            return h.abs();
        }
    }
    (0..m)
        .map(|k| point_segment(p, face.verts[k], face.verts[(k + 1) % m]).0)
        .fold(f64::INFINITY, f64::min)
}

fn poly_point_dist(poly: &ConvexPolytope, p: Point3) -> f64 {
    if !poly.flat && poly.contains(p, 0.0) {
        return 0.0;
    }
    poly.faces.iter().map(|f| face_point_dist(f, p)).fold(f64::INFINITY, f64::min)
}

fn poly_seg_hits(poly: &ConvexPolytope, a: Point3, b: Point3) -> bool {
    if poly.flat {
        let face = &poly.faces[0];
        let (ha, hb) = (a.dot(face.normal) - face.offset, b.dot(face.normal) - face.offset);
        if ha * hb > 0.0 {
            return false;
        }
        let tol = REL_TOL * poly_scale(poly);
        if ha == hb {
            return face_point_dist(face, a) <= tol
                || face_point_dist(face, b) <= tol
                || poly.edges.iter().any(|&(p, q)| segment_segment(p, q, a, b).0 <= tol);
        }
        let x = a + (b - a) * (ha / (ha - hb));
        return face_point_dist(face, x) <= tol;
    }
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for &(n, c) in &poly.halfspaces {
        let (na, nd) = (n.dot(a) - c, n.dot(d));
        if nd == 0.0 {
            if na > 0.0 {
                return false;
            }
        } else {
            let t = -na / nd;
            if nd > 0.0 {
                t1 = t1.min(t);
            } else {
                t0 = t0.max(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Given the triangle edges miss the polytope: some polytope edge crosses the triangle.
fn poly_tri_hits(poly: &ConvexPolytope, t: &Tri) -> bool {
    poly.edges.iter().any(|&(p, q)| segment_hits_triangle(p, q, t))
        || poly.vertices.iter().any(|&v| t.dist(v) <= t.tol())
}

/// Locally closest pairs between the circle `(center, normal, radius)` and
/// the line `point + t * dir`, from the real roots of the quartic
/// `(x^2 + y^2)(P + Z)^2 = P^2` in the circle's canonical frame
/// (`P = x x' + y y'`, `Z = z z'`). When the line is the circle's axis every
/// rim point is equidistant; the single pair at the axis point nearest the
/// circle's plane is returned.
pub fn cp_circle_line(
    center: Point3,
    normal: Point3,
    radius: f64,
    point: Point3,
    dir: Point3,
) -> Result<Vec<ClosestPair>, Error> {
    if !(radius > 0.0) {
        return Err(Error::Domain("circle radius must be positive".into()));
    }
    let n = normal.normalized().ok_or_else(|| Error::Domain("zero circle normal".into()))?;
    if dir.norm() == 0.0 {
        return Err(Error::Domain("zero line direction".into()));
    }
    let e1 = n.any_orthonormal();
    let e2 = n.cross(e1);
    let w = (point - center) / radius;
    let v = dir / radius;
    let (qx, qy, qz) = (w.dot(e1), w.dot(e2), w.dot(n));
    let (dx, dy, dz) = (v.dot(e1), v.dot(e2), v.dot(n));
    let world = |x: f64, y: f64, z: f64| center + (e1 * x + e2 * y + n * z) * radius;

    if (dx * dx + dy * dy).sqrt() <= 1e-14 * (dz.abs()) && (qx * qx + qy * qy).sqrt() <= 1e-14 {
        let t = -qz / dz;
        return Ok(vec![ClosestPair::new(world(1.0, 0.0, 0.0), point + dir * t, t)]);
    }
    let s = [qx * qx + qy * qy, 2.0 * (qx * dx + qy * dy), dx * dx + dy * dy];
    let p = [qx * dx + qy * dy, dx * dx + dy * dy];
    let g = [p[0] + qz * dz, p[1] + dz * dz];
    let g2 = [g[0] * g[0], 2.0 * g[0] * g[1], g[1] * g[1]];
    let mut quartic = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            quartic[i + j] += s[i] * g2[j];
        }
    }
    quartic[0] -= p[0] * p[0];
    quartic[1] -= 2.0 * p[0] * p[1];
    quartic[2] -= p[1] * p[1];

    let mut out = Vec::new();
    for t in roots::real_roots(&quartic) {
        let (x, y, z) = (qx + t * dx, qy + t * dy, qz + t * dz);
        let rho = x.hypot(y);
        let rim = if rho > 1e-15 { world(x / rho, y / rho, 0.0) } else { world(1.0, 0.0, 0.0) };
        let _ = z;
        out.push(ClosestPair::new(rim, point + dir * t, t));
    }
    Ok(out)
}

/// Result of the line/cone closest-pair computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeLine {
    /// `kappa^2 (kappa^2 - a^2 - b^2)` with `kappa = k c`; positive when the
    /// line direction lies inside the cone of directions (the line meets the double cone).
    pub det: f64,
    pub pairs: Vec<ClosestPair>,
}

/// Locally closest pairs between the line `point + t * dir` and the double
/// cone with the given apex, unit axis and slope `k` (`x^2 + y^2 = k^2 z^2`
/// in the canonical frame). Each pair lies in a meridian plane whose ruling
/// is orthogonal to the line, i.e. `a cos(phi) + b sin(phi) = kappa`.
/// A line through the apex or parallel to a meridian plane produces no pair
/// from that plane; callers add endpoint and apex candidates.
pub fn cp_cone_line(apex: Point3, axis: Point3, k: f64, point: Point3, dir: Point3) -> ConeLine {
    let e1 = axis.any_orthonormal();
    let e2 = axis.cross(e1);
    let w = point - apex;
    let q0 = Point3::new(w.dot(e1), w.dot(e2), w.dot(axis));
    let d = Point3::new(dir.dot(e1), dir.dot(e2), dir.dot(axis));
    let kappa = k * d.z;
    let ab2 = d.x * d.x + d.y * d.y;
    let det = kappa * kappa * (kappa * kappa - ab2);
    let mut pairs = Vec::new();
    if det > 0.0 || ab2 == 0.0 {
        return ConeLine { det, pairs };
    }
    let rho = ab2.sqrt();
    let psi = d.y.atan2(d.x);
    let delta = (kappa / rho).clamp(-1.0, 1.0).acos();
    let mut phis = vec![psi + delta];
    if delta > 1e-12 {
        phis.push(psi - delta);
    }
    let world = |p: Point3| apex + e1 * p.x + e2 * p.y + axis * p.z;
    for phi in phis {
        let (c, s) = (phi.cos(), phi.sin());
        let m = Point3::new(-s, c, 0.0);
        let denom = d.dot(m);
        if denom.abs() <= 1e-14 * d.norm() {
            continue;
        }
        let t = -q0.dot(m) / denom;
        let q = q0 + d * t;
        let g = Point3::new(k * c, k * s, 1.0);
        let p = g * (q.dot(g) / g.norm2());
        pairs.push(ClosestPair::new(world(p), point + dir * t, t));
    }
    ConeLine { det, pairs }
}
