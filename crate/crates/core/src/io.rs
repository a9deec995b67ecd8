//! Scene and run-configuration files, result serialization and OBJ export.
//!
//! Native scene format (JSON):
//!
//! ```json
//! { "units": "m",
//!   "components": [ { "name": "wall",
//!                     "vertices": [[0,0,0], [1,0,0], ...],
//!                     "triangles": [[0,1,2], ...] } ] }
//! ```
//!
//! Each component is a closed, consistently oriented triangle mesh. OFF files
//! are accepted as a single component.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::footprint::{exact_footprint, very_special_decomposition, DeltaRobot};
use crate::geom::{BoxT, Configuration, Point3, Quaternion};
use crate::planner::{self, PlanResult, Planner, PlannerInput, PlannerOptions, SplitPolicy, Stats, Strategy, Verdict};
use crate::predicate::{build_features, Mesh, ObstacleSet};
use crate::so3::RotBox;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneComponent {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(default = "default_units")]
    pub units: String,
    #[serde(default)]
    pub components: Vec<SceneComponent>,
}

fn default_units() -> String {
    "unit".into()
}

impl SceneFile {
    /// All components merged into one mesh (indices shifted per component).
    pub fn mesh(&self) -> Mesh {
        let mut m = Mesh::default();
        for c in &self.components {
            let base = m.vertices.len();
            m.vertices.extend(c.vertices.iter().map(|v| Point3::new(v[0], v[1], v[2])));
            m.triangles.extend(c.triangles.iter().map(|t| t.map(|i| i + base)));
        }
        m
    }

    /// Validated obstacle set; errors name the offending component.
    pub fn obstacles(&self) -> Result<ObstacleSet, Error> {
        for c in &self.components {
            let m = Mesh {
                vertices: c.vertices.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect(),
                triangles: c.triangles.clone(),
            };
            build_features(&m).map_err(|e| Error::Input(format!("component '{}': {e}", c.name)))?;
        }
        build_features(&self.mesh())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), msg: e.to_string() }
}

/// Parse a JSON scene, or an OFF mesh when the first token is `OFF`.
pub fn parse_scene(text: &str) -> Result<SceneFile, Error> {
    let first = text.split_whitespace().next().unwrap_or("");
    let scene = if first == "OFF" {
        parse_off(text)?
    } else {
        serde_json::from_str(text).map_err(json_error)?
    };
    scene.obstacles()?;
    Ok(scene)
}

/// OFF: header, counts line, vertices, then faces (polygons are fanned).
pub fn parse_off(text: &str) -> Result<SceneFile, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let mut rest = head.strip_prefix("OFF").ok_or(Error::Parse { line: ln, msg: "missing OFF header".into() })?.trim().to_string();
    let mut count_line = ln;
    if rest.is_empty() {
        let (l, s) = lines.next().ok_or(Error::Parse { line: ln + 1, msg: "missing counts".into() })?;
        count_line = l;
        rest = s.to_string();
    }
    let counts = parse_nums::<usize>(&rest, count_line)?;
    if counts.len() < 2 {
        return Err(Error::Parse { line: count_line, msg: "expected vertex and face counts".into() });
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or(Error::Parse { line: count_line, msg: format!("truncated: expected {nv} vertices") })?;
        let v = parse_nums::<f64>(s, l)?;
        if v.len() < 3 {
            return Err(Error::Parse { line: l, msg: "vertex needs three coordinates".into() });
        }
        vertices.push([v[0], v[1], v[2]]);
    }
    let mut triangles = Vec::new();
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or(Error::Parse { line: count_line, msg: format!("truncated: expected {nf} faces") })?;
        let f = parse_nums::<usize>(s, l)?;
        let k = *f.first().ok_or(Error::Parse { line: l, msg: "empty face".into() })?;
        if k < 3 || f.len() < k + 1 {
            return Err(Error::Parse { line: l, msg: format!("face declares {k} vertices") });
        }
        for &i in &f[1..=k] {
            if i >= nv {
                return Err(Error::Parse { line: l, msg: format!("vertex index {i} out of range") });
            }
        }
        for j in 1..k - 1 {
            triangles.push([f[1], f[j + 1], f[j + 2]]);
        }
    }
    Ok(SceneFile { units: default_units(), components: vec![SceneComponent { name: "off".into(), vertices, triangles }] })
}

fn parse_nums<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>, Error> {
    s.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("bad number '{t}'") }))
        .collect()
}

/// A configuration as stored in files: translation plus `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub t: [f64; 3],
    pub q: [f64; 4],
}

impl From<&Configuration> for ConfigJson {
    fn from(c: &Configuration) -> Self {
        ConfigJson { t: c.t.to_array(), q: c.r.to_array() }
    }
}

impl ConfigJson {
    /// Normalizes the quaternion; a warning is returned when it was off by more than 1e-6.
    pub fn to_configuration(&self, name: &str) -> Result<(Configuration, Option<String>), Error> {
        let q = Quaternion::new(self.q[0], self.q[1], self.q[2], self.q[3]);
        let n = q.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Input(format!("{name}: quaternion must be nonzero and finite")));
        }
        let t = Point3::new(self.t[0], self.t[1], self.t[2]);
        if !t.is_finite() {
            return Err(Error::Input(format!("{name}: translation must be finite")));
        }
        let warn = ((n - 1.0).abs() > 1e-6).then(|| format!("{name}: quaternion norm {n} normalized to 1"));
        Ok((Configuration::new(t, q.normalized()?), warn))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub center: [f64; 3],
    pub halfwidth: f64,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: ConfigJson,
    pub beta: ConfigJson,
    pub epsilon: f64,
    pub b0: BoxJson,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub split: SplitPolicy,
    #[serde(default = "default_scale")]
    pub robot_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rot_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_boxes: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, Error> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Planner input and options, plus warnings about normalized quaternions.
    pub fn planner_input(&self, obstacles: ObstacleSet, audit: bool) -> Result<(PlannerInput, PlannerOptions, Vec<String>), Error> {
        let (alpha, wa) = self.alpha.to_configuration("alpha")?;
        let (beta, wb) = self.beta.to_configuration("beta")?;
        let c = self.b0.center;
        let input = PlannerInput {
            alpha,
            beta,
            obstacles,
            b0: BoxT::new(Point3::new(c[0], c[1], c[2]), self.b0.halfwidth),
            epsilon: self.epsilon,
            robot: DeltaRobot::scaled(self.robot_scale)?,
        };
        input.validate()?;
        let opts = PlannerOptions {
            strategy: self.strategy,
            split: self.split,
            audit,
            max_boxes: self.max_boxes,
            max_rot_depth: self.max_rot_depth,
            ..Default::default()
        };
        Ok((input, opts, wa.into_iter().chain(wb).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub l0: f64,
    pub c0: f64,
    pub d0: f64,
    pub sigma: f64,
    pub k: f64,
}

impl Default for ConstantsTable {
    fn default() -> Self {
        ConstantsTable {
            l0: planner::L0,
            c0: planner::C0,
            d0: planner::D0,
            sigma: planner::SIGMA,
            k: planner::resolution_constant(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub verdict: Verdict,
    pub path: Vec<ConfigJson>,
    pub channel_length: usize,
    pub stats: Stats,
    pub constants: ConstantsTable,
}

impl ResultFile {
    pub fn new(r: &PlanResult) -> ResultFile {
        ResultFile {
            verdict: r.verdict,
            path: r.path.iter().map(ConfigJson::from).collect(),
            channel_length: r.channel.len(),
            stats: r.stats.clone(),
            constants: ConstantsTable::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn parse(text: &str) -> Result<ResultFile, Error> {
        serde_json::from_str(text).map_err(json_error)
    }
}

struct Obj {
    out: String,
    nv: usize,
}

impl Obj {
    fn v(&mut self, p: Point3) -> usize {
        let _ = writeln!(self.out, "v {} {} {}", p.x, p.y, p.z);
        self.nv += 1;
        self.nv
    }

    fn group(&mut self, name: &str) {
        let _ = writeln!(self.out, "o {name}");
    }

    fn cube(&mut self, b: &BoxT) {
        let (lo, hi) = (b.lo(), b.hi());
        let base = self.nv + 1;
        for k in 0..8 {
            self.v(Point3::new(
                if k & 1 == 1 { hi.x } else { lo.x },
                if k & 2 == 2 { hi.y } else { lo.y },
                if k & 4 == 4 { hi.z } else { lo.z },
            ));
        }
        for (a, b) in [(0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (1, 3), (4, 6), (5, 7), (0, 4), (1, 5), (2, 6), (3, 7)] {
            let _ = writeln!(self.out, "l {} {}", base + a, base + b);
        }
    }

    fn polyline(&mut self, pts: &[Point3]) {
        let ids: Vec<String> = pts.iter().map(|&p| self.v(p).to_string()).collect();
        if ids.len() >= 2 {
            let _ = writeln!(self.out, "l {}", ids.join(" "));
        }
    }
}

/// OBJ text: leaf-box wireframes, the channel polyline (alpha, box centers,
/// beta), the canonical path, the swept exact footprints along it, and the
/// polytope piece of each channel box's approximate footprint.
pub fn export_geometry(result: &PlanResult, tree: &Planner) -> String {
    let mut o = Obj { out: String::from("# subdivision export\n"), nv: 0 };
    o.group("leaves");
    let mut seen = std::collections::HashSet::new();
    for id in tree.leaves() {
        let n = &tree.nodes[id];
        if seen.insert((n.t_depth, n.t_idx)) {
            o.cube(&n.bt);
        }
    }
    if result.verdict == Verdict::Path {
        o.group("channel");
        let mut pts = vec![tree.input.alpha.t];
        pts.extend(result.channel.iter().map(|&id| tree.nodes[id].bt.center));
        pts.push(tree.input.beta.t);
        o.polyline(&pts);
        o.group("path");
        o.polyline(&result.path.iter().map(|c| c.t).collect::<Vec<_>>());
        o.group("sweep");
        for w in result.path.windows(2) {
            for k in 0..4 {
                let g = w[0].interpolate(&w[1], k as f64 / 4.0);
                let t = exact_footprint(&g, &tree.input.robot);
                let (a, b, c) = (o.v(t[0]), o.v(t[1]), o.v(t[2]));
                let _ = writeln!(o.out, "f {a} {b} {c}");
            }
        }
        o.group("footprints");
        for &id in &result.channel {
            let n = &tree.nodes[id];
            if let RotBox::Chart(cb) = &n.br {
                let d = very_special_decomposition(&n.bt, &cb.region(), &tree.input.robot);
                if let Some(p) = d.pyr {
                    for f in &p.faces {
                        let ids: Vec<String> = f.verts.iter().map(|&v| o.v(v).to_string()).collect();
                        if ids.len() >= 3 {
                            let _ = writeln!(o.out, "f {}", ids.join(" "));
                        }
                    }
                }
            }
        }
    }
    o.out
}

/// Leaf boxes as JSON lines (one object per leaf).
pub fn dump_subdivision(tree: &Planner) -> String {
    let mut out = String::new();
    for id in tree.leaves() {
        let n = &tree.nodes[id];
        let rot = match &n.br {
            RotBox::Full => serde_json::json!("FULL"),
            RotBox::Chart(c) => serde_json::json!({ "chart": c.chart.name().to_string(), "depth": c.depth, "idx": c.idx }),
        };
        let v = serde_json::json!({
            "id": id,
            "center": n.bt.center.to_array(),
            "halfwidth": n.bt.halfwidth,
            "rot": rot,
            "class": n.class.as_str(),
        });
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE_OFF: &str = "OFF\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n\
4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";

    #[test]
    fn off_cube() {
        let s = parse_scene(CUBE_OFF).unwrap();
        let m = s.mesh();
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.triangles.len(), 12);
    }

    #[test]
    fn truncated_off() {
        let cut = &CUBE_OFF[..CUBE_OFF.len() - 12];
        assert!(matches!(parse_scene(cut), Err(Error::Parse { .. })));
        match parse_scene("OFF\n8 6 0\n0 0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_json_scene() {
        let s = parse_scene(r#"{"components": []}"#).unwrap();
        assert!(s.obstacles().unwrap().is_empty());
        assert!(matches!(parse_scene("{\n\"components\": [\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn open_mesh_rejected() {
        let t = r#"{"components":[{"name":"tri","vertices":[[0,0,0],[1,0,0],[0,1,0]],"triangles":[[0,1,2]]}]}"#;
        assert!(matches!(parse_scene(t), Err(Error::Input(_))));
    }

    #[test]
    fn quaternion_normalized_with_warning() {
        let c = ConfigJson { t: [0.0; 3], q: [2.0, 0.0, 0.0, 0.0] };
        let (g, w) = c.to_configuration("alpha").unwrap();
        assert_eq!(g.r, Quaternion::IDENTITY);
        assert!(w.is_some());
        let c = ConfigJson { t: [0.0; 3], q: [1.0 + 1e-9, 0.0, 0.0, 0.0] };
        assert!(c.to_configuration("alpha").unwrap().1.is_none());
    }
}
