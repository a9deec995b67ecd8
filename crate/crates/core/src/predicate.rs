//! Obstacle features, the approximate feature set of a box, and the soft
//! classifier FREE / STUCK / MIXED.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::footprint::{approx_footprint, full_rotation_footprint, very_special_decomposition, DeltaRobot};
use crate::geom::{BoxT, Point3};
use crate::sep::{self, Primitive};
use crate::so3::RotBox;
use crate::Error;

/// Closed boundary element of the obstacle set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Feature {
    Corner(Point3),
    Edge(Point3, Point3),
    Wall { v: [Point3; 3], normal: Point3 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Corner,
    Edge,
    Wall,
}

impl Feature {
    /// Wall with normal from the vertex order (right-hand rule).
    pub fn wall(v: [Point3; 3]) -> Result<Feature, Error> {
        let n = (v[1] - v[0]).cross(v[2] - v[0]);
        let normal = n.normalized().ok_or_else(|| Error::Domain("zero-area wall".into()))?;
        Ok(Feature::Wall { v, normal })
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Feature::Corner(_) => FeatureKind::Corner,
            Feature::Edge(..) => FeatureKind::Edge,
            Feature::Wall { .. } => FeatureKind::Wall,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            Feature::Corner(p) if !p.is_finite() => Err(Error::Domain("non-finite corner".into())),
            Feature::Edge(a, b) if a.dist(*b) == 0.0 => Err(Error::Domain("zero-length edge".into())),
            Feature::Wall { v, .. } => {
                let area2 = (v[1] - v[0]).cross(v[2] - v[0]).norm();
                let scale = (v[1] - v[0]).norm2().max((v[2] - v[0]).norm2());
                if area2 <= 1e-14 * scale || !area2.is_finite() {
                    Err(Error::Domain("zero-area wall".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn points(&self) -> Vec<Point3> {
        match self {
            Feature::Corner(p) => vec![*p],
            Feature::Edge(a, b) => vec![*a, *b],
            Feature::Wall { v, .. } => v.to_vec(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::of_points(&self.points())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Point3,
    pub hi: Point3,
}

impl Aabb {
    pub fn of_points(pts: &[Point3]) -> Aabb {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in pts {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        Aabb { lo, hi }
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb::of_points(&[self.lo, self.hi, o.lo, o.hi])
    }

    pub fn center(&self) -> Point3 {
        (self.lo + self.hi) * 0.5
    }

    /// Squared distance from a point to the box (0 inside).
    pub fn dist2_point(&self, p: Point3) -> f64 {
        let d = |v: f64, lo: f64, hi: f64| if v < lo { lo - v } else if v > hi { v - hi } else { 0.0 };
        let (x, y, z) = (d(p.x, self.lo.x, self.hi.x), d(p.y, self.lo.y, self.hi.y), d(p.z, self.lo.z, self.hi.z));
        x * x + y * y + z * z
    }
}

/// Bounding-volume hierarchy over feature boxes.
#[derive(Debug, Clone, Default)]
pub struct AabbTree {
    nodes: Vec<AabbNode>,
}

#[derive(Debug, Clone)]
struct AabbNode {
    bb: Aabb,
    left: usize,
    right: usize,
    items: Vec<usize>,
}

impl AabbTree {
    pub fn build(boxes: &[Aabb]) -> AabbTree {
        let mut t = AabbTree { nodes: Vec::new() };
        if !boxes.is_empty() {
            let ids: Vec<usize> = (0..boxes.len()).collect();
            t.build_rec(boxes, ids);
        }
        t
    }

    fn build_rec(&mut self, boxes: &[Aabb], mut ids: Vec<usize>) -> usize {
        let bb = ids.iter().skip(1).fold(boxes[ids[0]], |acc, &i| acc.union(&boxes[i]));
        let me = self.nodes.len();
        self.nodes.push(AabbNode { bb, left: 0, right: 0, items: Vec::new() });
        if ids.len() <= 4 {
            self.nodes[me].items = ids;
            return me;
        }
        let ext = bb.hi - bb.lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z { 0 } else if ext.y >= ext.z { 1 } else { 2 };
        ids.sort_by(|&a, &b| boxes[a].center()[axis].total_cmp(&boxes[b].center()[axis]));
        let rest = ids.split_off(ids.len() / 2);
        let l = self.build_rec(boxes, ids);
        let r = self.build_rec(boxes, rest);
        self.nodes[me].left = l;
        self.nodes[me].right = r;
        me
    }

    /// Items whose boxes come within `radius` of `c`.
    pub fn query_ball(&self, c: Point3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        let mut stack = vec![0];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.bb.dist2_point(c) > r2 {
                continue;
            }
            if node.items.is_empty() {
                stack.push(node.left);
                stack.push(node.right);
            } else {
                out.extend(node.items.iter().copied());
            }
        }
        out.sort_unstable();
        out
    }
}

/// Closed triangle meshes bounding the obstacles, with their features.
#[derive(Debug, Clone)]
pub struct ObstacleSet {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
    pub features: Vec<Feature>,
    pub index: AabbTree,
    pub n_corners: usize,
    pub n_edges: usize,
    pub n_walls: usize,
}

/// Triangle mesh input: shared vertex array plus index triples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
}

impl ObstacleSet {
    pub fn empty() -> ObstacleSet {
        build_features(&Mesh::default()).expect("empty mesh is valid")
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn walls(&self) -> impl Iterator<Item = [Point3; 3]> + '_ {
        self.triangles.iter().map(|t| [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]])
    }

    /// All features meeting a ball (bounding-box prefilter, then exact distance).
    pub fn features_near(&self, c: Point3, radius: f64) -> Vec<usize> {
        self.index
            .query_ball(c, radius)
            .into_iter()
            .filter(|&i| crate::geom::sep_point_feature(c, &self.features[i]).map_or(false, |d| d <= radius))
            .collect()
    }

    /// Ray-parity point-in-obstacle test over all walls.
    pub fn contains_point(&self, p: Point3) -> bool {
        if self.is_empty() {
            return false;
        }
        const DIRS: [Point3; 4] = [
            Point3::new(0.5773502691896258, 0.5773502691896258, 0.5773502691896258),
            Point3::new(0.26726124191242440, -0.5345224838248488, 0.8017837257372732),
            Point3::new(-0.7071067811865476, 0.1, 0.7),
            Point3::new(0.31, 0.93, -0.2),
        ];
        'dirs: for d in DIRS {
            let d = d.normalized().expect("nonzero");
            let mut hits = 0usize;
            for w in self.walls() {
                match ray_triangle(p, d, w) {
                    RayHit::Miss => {}
                    RayHit::Hit => hits += 1,
                    RayHit::Ambiguous => continue 'dirs,
                }
            }
            return hits % 2 == 1;
        }
        // Every direction grazed an edge; fall back to the winding number.
        crate::oracle::winding_number(self, p).abs() > 0.5
    }
}

enum RayHit {
    Miss,
    Hit,
    Ambiguous,
}

/// Moller-Trumbore with an explicit near-edge guard.
fn ray_triangle(o: Point3, d: Point3, t: [Point3; 3]) -> RayHit {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let p = d.cross(e2);
    let det = e1.dot(p);
    let scale = e1.norm() * e2.norm();
    if det.abs() <= 1e-12 * scale {
        // Ray parallel to the plane; ambiguous only if it lies in it.
        let n = e1.cross(e2);
        return if (o - t[0]).dot(n).abs() <= 1e-12 * scale * scale.sqrt().max(1.0) { RayHit::Ambiguous } else { RayHit::Miss };
    }
    let inv = 1.0 / det;
    let s = o - t[0];
    let u = s.dot(p) * inv;
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    let tt = e2.dot(q) * inv;
    const EPS: f64 = 1e-10;
    if tt < -EPS || u < -EPS || v < -EPS || u + v > 1.0 + EPS {
        return RayHit::Miss;
    }
    if tt.abs() <= EPS || u.abs() <= EPS || v.abs() <= EPS || (u + v - 1.0).abs() <= EPS {
        return RayHit::Ambiguous;
    }
    RayHit::Hit
}

/// Deduplicated corners, edges and walls of closed, consistently oriented meshes.
pub fn build_features(mesh: &Mesh) -> Result<ObstacleSet, Error> {
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for &i in t {
            if i >= mesh.vertices.len() {
                return Err(Error::Input(format!("triangle {ti} references missing vertex {i}")));
            }
        }
    }
    // Merge coincident vertices so that the index structure reflects geometry.
    let mut canon: HashMap<[u64; 3], usize> = HashMap::new();
    let mut remap = Vec::with_capacity(mesh.vertices.len());
    let mut vertices = Vec::new();
    for v in &mesh.vertices {
        if !v.is_finite() {
            return Err(Error::Input("non-finite vertex".into()));
        }
        let key = [v.x, v.y, v.z].map(|c| if c == 0.0 { 0u64 } else { c.to_bits() });
        let id = *canon.entry(key).or_insert_with(|| {
            vertices.push(*v);
            vertices.len() - 1
        });
        remap.push(id);
    }
    let triangles: Vec<[usize; 3]> = mesh.triangles.iter().map(|t| t.map(|i| remap[i])).collect();

    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut features = Vec::new();
    let mut walls = Vec::new();
    for (ti, t) in triangles.iter().enumerate() {
        let w = Feature::wall([vertices[t[0]], vertices[t[1]], vertices[t[2]]])
            .map_err(|_| Error::Input(format!("triangle {ti} is degenerate")))?;
        walls.push(w);
        for k in 0..3 {
            let e = (t[k], t[(k + 1) % 3]);
            if let Some(prev) = directed.insert(e, ti) {
                return Err(Error::Input(format!(
                    "edge ({}, {}) used twice with the same orientation (triangles {prev} and {ti})",
                    e.0, e.1
                )));
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) {
            return Err(Error::Input(format!(
                "edge ({a}, {b}) between {:?} and {:?} is not shared by exactly two triangles",
                vertices[a], vertices[b]
            )));
        }
        if a < b {
            edges.push((a, b));
        }
    }
    edges.sort_unstable();
    let mut used: Vec<usize> = triangles.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    for &v in &used {
        features.push(Feature::Corner(vertices[v]));
    }
    for &(a, b) in &edges {
        features.push(Feature::Edge(vertices[a], vertices[b]));
    }
    features.extend(walls);
    let boxes: Vec<Aabb> = features.iter().map(Feature::aabb).collect();
    Ok(ObstacleSet {
        n_corners: used.len(),
        n_edges: edges.len(),
        n_walls: triangles.len(),
        index: AabbTree::build(&boxes),
        vertices,
        triangles,
        features,
    })
}

/// Indices into `ObstacleSet::features`.
pub type FeatureSet = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Free,
    Stuck,
    Mixed,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Free => "FREE",
            Classification::Stuck => "STUCK",
            Classification::Mixed => "MIXED",
        }
    }
}

/// Approximate footprint in the form the classifier evaluates.
#[derive(Debug, Clone)]
pub enum BoxFootprint {
    /// Rotational part `FULL`: every orientation, bounded by one ball.
    Full(Primitive),
    /// Chart box: the four-query decomposition.
    Chart(crate::footprint::Decomposition),
}

impl BoxFootprint {
    pub fn new(bt: &BoxT, br: &RotBox, robot: &DeltaRobot) -> Result<BoxFootprint, Error> {
        match br {
            RotBox::Full => Ok(BoxFootprint::Full(Primitive::Ball(full_rotation_footprint(bt, robot)))),
            RotBox::Chart(c) => Ok(BoxFootprint::Chart(very_special_decomposition(bt, &c.region(), robot))),
        }
    }

    /// Ball containing the whole approximate footprint.
    pub fn bounding_ball(&self) -> (Point3, f64) {
        match self {
            BoxFootprint::Full(Primitive::Ball(b)) => (b.center, b.radius),
            BoxFootprint::Full(_) => unreachable!("full footprint is a ball"),
            BoxFootprint::Chart(d) => d.bounding_ball(),
        }
    }

    /// `true` iff the feature misses the approximate footprint.
    pub fn misses(&self, f: &Feature) -> bool {
        match self {
            BoxFootprint::Full(p) => sep::sep_gt(p, f, 0.0).unwrap_or(false),
            BoxFootprint::Chart(d) => d.misses(f),
        }
    }
}

/// Filter the parent's feature set against the approximate footprint of `B`.
pub fn approx_feature_set(
    bt: &BoxT,
    br: &RotBox,
    robot: &DeltaRobot,
    obstacles: &ObstacleSet,
    parent: Option<&[usize]>,
) -> Result<FeatureSet, Error> {
    let fp = BoxFootprint::new(bt, br, robot)?;
    Ok(filter_features(&fp, obstacles, parent))
}

pub fn filter_features(fp: &BoxFootprint, obstacles: &ObstacleSet, parent: Option<&[usize]>) -> FeatureSet {
    let (c, rad) = fp.bounding_ball();
    let candidates: Vec<usize> = match parent {
        Some(p) => p.to_vec(),
        None => obstacles.index.query_ball(c, rad),
    };
    candidates
        .into_iter()
        .filter(|&i| {
            let f = &obstacles.features[i];
            let near = crate::geom::sep_point_feature(c, f).map_or(true, |d| d <= rad);
            near && !fp.misses(f)
        })
        .collect()
}

/// MIXED iff the feature set is nonempty; otherwise the witness point
/// (the box center, a point of the footprint of the center configuration) decides.
pub fn classify(bt: &BoxT, _br: &RotBox, features: &[usize], obstacles: &ObstacleSet) -> Classification {
    if !features.is_empty() {
        return Classification::Mixed;
    }
    if obstacles.contains_point(bt.center) {
        Classification::Stuck
    } else {
        Classification::Free
    }
}

/// Classification via the seven-piece union, used to cross-check the decomposition.
pub fn approx_feature_set_sigma2(
    bt: &BoxT,
    br: &RotBox,
    robot: &DeltaRobot,
    obstacles: &ObstacleSet,
) -> Result<FeatureSet, Error> {
    let set = match br {
        RotBox::Full => return approx_feature_set(bt, br, robot, obstacles, None),
        RotBox::Chart(c) => approx_footprint(bt, &c.region(), robot),
    };
    Ok((0..obstacles.features.len())
        .filter(|&i| !sep::sigma2_collision(&obstacles.features[i], &set).unwrap_or(false))
        .collect())
}
