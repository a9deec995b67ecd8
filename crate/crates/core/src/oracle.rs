//! Brute-force reference computations used to check the explicit routines.
//!
//! Nothing here is called by the planner. The distance oracle is GJK on
//! support functions, which shares no code with the closed-form separation
//! queries; the sweeps are dense parameter scans with golden-section polish.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::footprint::{exact_footprint, DeltaRobot, SpecialPi1Set, SpecialSigma2Set};
use crate::geom::{quat_to_matrix, BoxT, Configuration, Point3, Quaternion};
use crate::predicate::{Feature, ObstacleSet};
use crate::sep::Primitive;
use crate::so3::{chart_map_unchecked, ChartBox, ChartId, ChartRegion, RotBox};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { samples: 2000, max_iter: 5000, tol: 1e-10 }
    }
}

/// Farthest point of a primitive in direction `d`.
pub fn support(a: &Primitive, d: Point3) -> Point3 {
    let unit = d.normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0));
    // Rim point of a disc; re-projected so a tiny perpendicular part cannot tilt it out of the plane.
    let rim = |c: Point3, axis: Point3, r: f64| {
        let perp = unit - axis * unit.dot(axis);
        let perp = perp - axis * perp.dot(axis);
        if perp.norm() <= 1e-12 {
            return c;
        }
        match perp.normalized() {
            Some(p) => c + p * r,
            None => c,
        }
    };
    let best = |pts: &[Point3]| *pts.iter().max_by(|p, q| p.dot(unit).total_cmp(&q.dot(unit))).expect("nonempty");
    match a {
        Primitive::Ball(b) => b.center + unit * b.radius,
        Primitive::Cylinder(c) => {
            let ax = (c.p2 - c.p1).normalized().expect("axis");
            best(&[rim(c.p1, ax, c.radius), rim(c.p2, ax, c.radius)])
        }
        Primitive::Frustum(f) => {
            let ax = (f.p2 - f.p1).normalized().expect("axis");
            best(&[rim(f.p1, ax, f.r1), rim(f.p2, ax, f.r2)])
        }
        Primitive::Polytope(p) => best(&p.vertices),
        Primitive::Icc(ic) => {
            // Hull of the apex and the ball through the base rim tangent to the cone.
            let h = ic.v.dist(ic.o);
            let ax = (ic.o - ic.v) / h;
            let c = ic.v + ax * ((h * h + ic.r * ic.r) / h);
            let rad = ic.r * (h * h + ic.r * ic.r).sqrt() / h;
            best(&[ic.v, c + unit * rad])
        }
        Primitive::FatSegment { a, b, radius } => best(&[*a, *b]) + unit * *radius,
        Primitive::Disc(dc) => rim(dc.center, dc.normal.normalized().expect("normal"), dc.radius),
    }
}

pub fn feature_points(f: &Feature) -> Vec<Point3> {
    match f {
        Feature::Corner(p) => vec![*p],
        Feature::Edge(a, b) => vec![*a, *b],
        Feature::Wall { v, .. } => v.to_vec(),
    }
}

fn polytope_support(pts: &[Point3], d: Point3) -> Point3 {
    *pts.iter().max_by(|p, q| p.dot(d).total_cmp(&q.dot(d))).expect("nonempty point set")
}

fn seg_closest(a: Point3, b: Point3) -> Point3 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 <= 1e-300 {
        return a;
    }
    a + d * (-a.dot(d) / l2).clamp(0.0, 1.0)
}

/// Closest point of the closed triangle to the origin: the plane projection
/// when it falls inside (by edge orientation), otherwise the best edge point.
fn tri_closest(a: Point3, b: Point3, c: Point3) -> Point3 {
    let n = (b - a).cross(c - a);
    let n2 = n.norm2();
    let edges = || {
        [seg_closest(a, b), seg_closest(b, c), seg_closest(c, a)]
            .into_iter()
            .min_by(|p, q| p.norm2().total_cmp(&q.norm2()))
            .expect("three edges")
    };
    let scale = (b - a).norm2().max((c - a).norm2()).max((c - b).norm2());
    if n2 <= 1e-24 * scale * scale {
        return edges();
    }
    let x = n * (n.dot(a) / n2);
    let inside = [(a, b), (b, c), (c, a)].iter().all(|&(p, q)| n.dot((q - p).cross(x - p)) >= 0.0);
    if inside {
        x
    } else {
        edges()
    }
}

/// Origin strictly inside a non-degenerate tetrahedron.
fn tet_contains_origin(t: &[Point3]) -> bool {
    let vol = |a: Point3, b: Point3, c: Point3, d: Point3| (b - a).dot((c - a).cross(d - a));
    let total = vol(t[0], t[1], t[2], t[3]);
    let scale = t.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    if total.abs() <= 1e-12 * scale.powi(3) {
        return false;
    }
    let o = Point3::ZERO;
    let parts = [vol(o, t[1], t[2], t[3]), vol(t[0], o, t[2], t[3]), vol(t[0], t[1], o, t[3]), vol(t[0], t[1], t[2], o)];
    parts.iter().all(|&v| v * total > 0.0)
}

/// Closest point of `hull(simplex)` to the origin and the smallest face
/// realizing it. A full tetrahedron is returned only when it strictly
/// contains the origin.
fn closest_subsimplex(simplex: &[Point3]) -> (Point3, Vec<Point3>) {
    let n = simplex.len();
    if n == 4 && tet_contains_origin(simplex) {
        return (Point3::ZERO, simplex.to_vec());
    }
    let mut best: Option<(f64, Point3, Vec<Point3>)> = None;
    for mask in 1u32..(1 << n) {
        let sub: Vec<Point3> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| simplex[i]).collect();
        let p = match sub.len() {
            1 => sub[0],
            2 => seg_closest(sub[0], sub[1]),
            3 => tri_closest(sub[0], sub[1], sub[2]),
            _ => continue,
        };
        let d = p.norm();
        let better = match &best {
            None => true,
            Some((bd, _, bs)) => d < *bd * (1.0 - 1e-12) || (d <= *bd * (1.0 + 1e-12) && sub.len() < bs.len()),
        };
        if better {
            best = Some((d, p, sub));
        }
    }
    let (_, p, s) = best.expect("singletons always qualify");
    (p, s)
}

/// Distance between two convex sets given by support functions, as
/// `(upper, lower)` bounds. Errors if the gap does not close within `max_iter`.
pub fn gjk_distance(
    sa: impl Fn(Point3) -> Point3,
    sb: impl Fn(Point3) -> Point3,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64), Error> {
    let d0 = Point3::new(1.0, 0.3, 0.1);
    let mut v = sa(d0) - sb(-d0);
    let mut simplex = vec![v];
    let mut lower = 0.0f64;
    let scale = v.norm().max(1.0);
    for _ in 0..max_iter {
        let vn = v.norm();
        if vn <= 1e-13 * scale {
            return Ok((0.0, 0.0));
        }
        let w = sa(-v) - sb(v);
        lower = lower.max(v.dot(w) / vn);
        if vn - lower <= tol {
            return Ok((vn, lower.max(0.0)));
        }
        if simplex.iter().any(|&p| p.dist(w) <= 1e-15 * scale) {
            return Ok((vn, lower.max(0.0)));
        }
        simplex.push(w);
        let (p, s) = closest_subsimplex(&simplex);
        if s.len() == 4 {
            return Ok((0.0, 0.0));
        }
        if p.norm() >= vn {
            return Ok((vn, lower.max(0.0)));
        }
        v = p;
        simplex = s;
    }
    let vn = v.norm();
    if vn - lower <= 10.0 * tol.max(1e-9) {
        Ok((vn, lower.max(0.0)))
    } else {
        Err(Error::Domain(format!("oracle did not converge: gap {}", vn - lower)))
    }
}

/// `Sep(A, f)` by GJK between the primitive and the feature.
pub fn numeric_sep(a: &Primitive, f: &Feature, cfg: &OracleConfig) -> Result<f64, Error> {
    let pts = feature_points(f);
    let (hi, _) = gjk_distance(|d| support(a, d), |d| polytope_support(&pts, d), cfg.tol, cfg.max_iter)?;
    Ok(hi)
}

/// Exact distance between two point sets' convex hulls (finite GJK).
pub fn hull_distance(p: &[Point3], q: &[Point3]) -> f64 {
    gjk_distance(|d| polytope_support(p, d), |d| polytope_support(q, d), 1e-13, 1000)
        .map(|r| r.0)
        .unwrap_or(0.0)
}

/// Generalized winding number of a closed triangle mesh about `p`
/// (sum of signed solid angles over `4 pi`).
pub fn winding_number(o: &ObstacleSet, p: Point3) -> f64 {
    let mut total = 0.0;
    for t in &o.triangles {
        let a = o.vertices[t[0]] - p;
        let b = o.vertices[t[1]] - p;
        let c = o.vertices[t[2]] - p;
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(b.cross(c));
        let den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Uniform unit quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            return q.scale(1.0 / n);
        }
    }
}

pub fn random_point_in_box<R: Rng>(bt: &BoxT, rng: &mut R) -> Point3 {
    let h = bt.halfwidth;
    bt.center + Point3::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h), rng.gen_range(-h..=h))
}

pub fn random_rotation_in_region<R: Rng>(r: &ChartRegion, rng: &mut R) -> Quaternion {
    let p = [0, 1, 2].map(|m| {
        let iv = r.iv[m];
        if iv.hi > iv.lo {
            rng.gen_range(iv.lo..=iv.hi)
        } else {
            iv.lo
        }
    });
    chart_map_unchecked(r.embed(p))
}

pub fn random_rotation_in<R: Rng>(br: &RotBox, rng: &mut R) -> Quaternion {
    match br {
        RotBox::Full => random_rotation(rng),
        RotBox::Chart(c) => random_rotation_in_region(&c.region(), rng),
    }
}

pub fn random_configuration<R: Rng>(bt: &BoxT, br: &RotBox, rng: &mut R) -> Configuration {
    Configuration::new(random_point_in_box(bt, rng), random_rotation_in(br, rng))
}

/// Distance from the triangle to the obstacle walls near it, capped at `cap`;
/// 0 when it touches a wall or lies inside the solid.
pub fn triangle_clearance(tri: &[Point3; 3], o: &ObstacleSet, cap: f64) -> f64 {
    if o.is_empty() {
        return cap;
    }
    let c = (tri[0] + tri[1] + tri[2]) / 3.0;
    let reach = tri.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
    let mut best = cap;
    for i in o.index.query_ball(c, reach + cap) {
        if let Feature::Wall { v, .. } = &o.features[i] {
            best = best.min(hull_distance(tri, v));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    if winding_number(o, tri[1]).abs() > 0.5 {
        return 0.0;
    }
    best
}

pub fn configuration_clearance(g: &Configuration, robot: &DeltaRobot, o: &ObstacleSet, cap: f64) -> f64 {
    triangle_clearance(&exact_footprint(g, robot), o, cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampledClass {
    Free,
    Stuck,
    Mixed,
    Unknown,
}

/// Classify a box by sampling configurations: a sample is free when its
/// clearance exceeds `margin`, colliding when it touches or is inside the
/// obstacle, and inconclusive otherwise.
pub fn sampled_classify<R: Rng>(
    bt: &BoxT,
    br: &RotBox,
    robot: &DeltaRobot,
    o: &ObstacleSet,
    n: usize,
    margin: f64,
    rng: &mut R,
) -> SampledClass {
    let (mut free, mut hit) = (0usize, 0usize);
    for _ in 0..n {
        let g = random_configuration(bt, br, rng);
        let c = configuration_clearance(&g, robot, o, 2.0 * margin + 1.0);
        if c > margin {
            free += 1;
        } else if c == 0.0 {
            hit += 1;
        }
    }
    match (free > 0, hit > 0) {
        (true, true) => SampledClass::Mixed,
        (true, false) if free == n => SampledClass::Free,
        (false, true) if hit == n => SampledClass::Stuck,
        _ => SampledClass::Unknown,
    }
}

/// All dyadic boxes of the uniform subdivision of every chart at `depth`.
pub fn uniform_boxes(depth: u32) -> Vec<ChartBox> {
    let m = 1u64 << depth;
    let mut out = Vec::new();
    for chart in ChartId::ALL {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    out.push(ChartBox { chart, depth, idx: [i, j, k] });
                }
            }
        }
    }
    out
}

type Box4 = [(f64, f64); 4];

fn box4(b: &ChartBox, negate: bool) -> Box4 {
    let r = b.region();
    let mut out = [(-1.0, -1.0); 4];
    for (m, a) in b.chart.free_axes().into_iter().enumerate() {
        out[a] = (r.iv[m].lo, r.iv[m].hi);
    }
    if negate {
        out = out.map(|(lo, hi)| (-hi, -lo));
    }
    out
}

/// Dimension of the intersection of two axis-parallel boxes in R^4 (`None` if empty).
fn meet_dim(p: &Box4, q: &Box4) -> Option<usize> {
    let mut dim = 0;
    for a in 0..4 {
        let lo = p[a].0.max(q[a].0);
        let hi = p[a].1.min(q[a].1);
        if lo > hi {
            return None;
        }
        if hi > lo {
            dim += 1;
        }
    }
    Some(dim)
}

/// Whether two boxes of the cubic model share a 2-dimensional face under `q ≡ -q`.
pub fn boxes_face_adjacent(x: &ChartBox, y: &ChartBox) -> bool {
    let p = box4(x, false);
    [box4(y, false), box4(y, true)].iter().any(|q| meet_dim(&p, q) == Some(2))
}

/// All unordered face-adjacent pairs (indices into `uniform_boxes(depth)`),
/// by pairwise intersection in R^4.
pub fn exhaustive_adjacency(depth: u32) -> Result<Vec<(usize, usize)>, Error> {
    if depth > 4 {
        return Err(Error::Domain("exhaustive adjacency is limited to depth 4".into()));
    }
    let boxes = uniform_boxes(depth);
    let mut out = Vec::new();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes_face_adjacent(&boxes[i], &boxes[j]) {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Area-weighted random point on the boundary of a special piece.
pub fn sample_piece_surface<R: Rng>(piece: &SpecialPi1Set, rng: &mut R) -> Point3 {
    use std::f64::consts::PI;
    let sphere = |rng: &mut R| loop {
        let v = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    };
    let axial = |p1: Point3, p2: Point3, r1: f64, r2: f64, rng: &mut R| {
        let l = p1.dist(p2);
        let u = (p2 - p1) / l;
        let e1 = u.any_orthonormal();
        let e2 = u.cross(e1);
        let slant = l.hypot(r2 - r1);
        let areas = [PI * r1 * r1, PI * r2 * r2, PI * (r1 + r2) * slant];
        let total: f64 = areas.iter().sum();
        let pick = rng.gen_range(0.0..total);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let dir = e1 * phi.cos() + e2 * phi.sin();
        if pick < areas[0] {
            p1 + dir * (r1 * rng.gen::<f64>().sqrt())
        } else if pick < areas[0] + areas[1] {
            p2 + dir * (r2 * rng.gen::<f64>().sqrt())
        } else {
            // Lateral area density is proportional to the radius at height z.
            let s: f64 = if (r2 - r1).abs() < 1e-15 {
                rng.gen()
            } else {
                let w: f64 = rng.gen();
                let (a, b) = (r1, r2);
                ((a * a + w * (b * b - a * a)).sqrt() - a) / (b - a)
            };
            p1 + u * (s * l) + dir * (r1 + s * (r2 - r1))
        }
    };
    match piece {
        SpecialPi1Set::Ball(b) => b.center + sphere(rng) * b.radius,
        SpecialPi1Set::Cylinder(c) => axial(c.p1, c.p2, c.radius, c.radius, rng),
        SpecialPi1Set::Frustum(f) => axial(f.p1, f.p2, f.r1, f.r2, rng),
        SpecialPi1Set::Polytope(p) => {
            let mut tris = Vec::new();
            for f in &p.faces {
                for k in 1..f.verts.len().saturating_sub(1) {
                    tris.push([f.verts[0], f.verts[k], f.verts[k + 1]]);
                }
            }
            let areas: Vec<f64> = tris.iter().map(|t| (t[1] - t[0]).cross(t[2] - t[0]).norm()).collect();
            let total: f64 = areas.iter().sum();
            let mut pick = rng.gen_range(0.0..total.max(1e-300));
            let mut t = tris[0];
            for (tri, a) in tris.iter().zip(&areas) {
                if pick < *a {
                    t = *tri;
                    break;
                }
                pick -= a;
            }
            let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            t[0] + (t[1] - t[0]) * u + (t[2] - t[0]) * v
        }
    }
}

/// Random points on the boundary of the union: piece-surface samples not
/// strictly inside any other piece.
pub fn sample_union_boundary<R: Rng>(set: &SpecialSigma2Set, n: usize, rng: &mut R) -> Vec<Point3> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 200 * n {
        tries += 1;
        let i = rng.gen_range(0..set.pieces.len());
        let p = sample_piece_surface(&set.pieces[i], rng);
        let buried = set.pieces.iter().enumerate().any(|(j, s)| j != i && s.contains(p, -1e-9));
        if !buried {
            out.push(p);
        }
    }
    out
}

/// Distance from `p` to `Fp(Bt x {r})`: the triangle at rotation `r`
/// swept over the cube `Bt`, as a distance between `p - R tri` and the cube.
pub fn dist_to_swept_triangle(p: Point3, bt: &BoxT, r: Quaternion, robot: &DeltaRobot) -> f64 {
    let m = quat_to_matrix(r).expect("unit rotation");
    let tri = [p - m.mul_vec(robot.a), p - m.mul_vec(robot.o), p - m.mul_vec(robot.b)];
    let (lo, hi) = (bt.lo(), bt.hi());
    let cube: Vec<Point3> = (0..8)
        .map(|k| {
            Point3::new(
                if k & 1 == 1 { hi.x } else { lo.x },
                if k & 2 == 2 { hi.y } else { lo.y },
                if k & 4 == 4 { hi.z } else { lo.z },
            )
        })
        .collect();
    hull_distance(&tri, &cube)
}

/// Smallest distance from `p` to `Fp(Bt x R)` found by random search over
/// rotations of the chart region followed by shrinking local perturbation.
pub fn footprint_search<R: Rng>(
    p: Point3,
    bt: &BoxT,
    region: &ChartRegion,
    robot: &DeltaRobot,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let eval = |c: [f64; 3]| dist_to_swept_triangle(p, bt, chart_map_unchecked(region.embed(c)), robot);
    let mut best_c = region.center();
    let mut best = eval(best_c);
    for _ in 0..samples {
        if best == 0.0 {
            return 0.0;
        }
        let c = [0, 1, 2].map(|m| {
            let iv = region.iv[m];
            if iv.hi > iv.lo {
                rng.gen_range(iv.lo..=iv.hi)
            } else {
                iv.lo
            }
        });
        let d = eval(c);
        if d < best {
            best = d;
            best_c = c;
        }
    }
    let mut step = region.width() / 8.0;
    while step > 1e-12 && best > 0.0 {
        let mut improved = false;
        for _ in 0..40 {
            let c = [0, 1, 2].map(|m| {
                let iv = region.iv[m];
                (best_c[m] + rng.gen_range(-step..=step)).clamp(iv.lo, iv.hi)
            });
            let d = eval(c);
            if d < best {
                best = d;
                best_c = c;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Dense scan of `f` on `[lo, hi]` followed by golden-section refinement of
/// every discrete local minimum. Returns `(t, f(t))` for each local minimum.
pub fn sweep_minima(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(lo + h * i as f64)).collect();
    let mut out = Vec::new();
    for i in 0..=n {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i == n { f64::INFINITY } else { vals[i + 1] };
        if vals[i] <= left && vals[i] < right {
            let (a, b) = (lo + h * (i as f64 - 1.0), lo + h * (i as f64 + 1.0));
            let t = golden(&f, a.max(lo), b.min(hi));
            out.push((t, f(t)));
        }
    }
    out
}

/// Golden-section minimisation on `[a, b]`.
pub fn golden(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Distance from a point to a circle (center, unit normal, radius).
pub fn point_circle_distance(p: Point3, c: Point3, n: Point3, r: f64) -> f64 {
    let w = p - c;
    let h = w.dot(n);
    let rho = (w - n * h).norm();
    (rho - r).hypot(h)
}

/// Distance from a point to the double cone with apex, unit axis and slope `k`.
pub fn point_double_cone_distance(p: Point3, apex: Point3, axis: Point3, k: f64) -> f64 {
    let w = p - apex;
    let z = w.dot(axis);
    let rho = (w - axis * z).norm();
    let g = (1.0 + k * k).sqrt();
    // Rays (k, 1) s and (k, -1) s, s >= 0, in the meridian half-plane.
    let ray = |dz: f64| {
        let s = (rho * k + z * dz) / g;
        if s <= 0.0 {
            rho.hypot(z)
        } else {
            (rho * dz - z * k).abs() / g
        }
    };
    ray(1.0).min(ray(-1.0))
}

/// Whether the line meets the double cone, from the quadratic in `t`.
pub fn line_meets_double_cone(apex: Point3, axis: Point3, k: f64, p0: Point3, d: Point3) -> bool {
    let w = p0 - apex;
    let (wz, dz) = (w.dot(axis), d.dot(axis));
    let (wr, dr) = (w - axis * wz, d - axis * dz);
    let a = dr.norm2() - k * k * dz * dz;
    let b = 2.0 * (wr.dot(dr) - k * k * wz * dz);
    let c = wr.norm2() - k * k * wz * wz;
    if a.abs() <= 1e-14 * (dr.norm2() + k * k * dz * dz) {
        return b != 0.0 || c == 0.0;
    }
    b * b - 4.0 * a * c >= 0.0
}
