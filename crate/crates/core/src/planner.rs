//! Soft subdivision search over boxes of R^3 x SO(3).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::footprint::DeltaRobot;
use crate::geom::{dist_se3, BoxT, Configuration, MetricParams, Point3, Quaternion};
use crate::predicate::{approx_feature_set, classify, Classification, ObstacleSet};
use crate::so3::{
    box_center_rotation, chart_map_unchecked, local, project_to_cubic, rot_face_adjacent, rot_meet_dim,
    shared_face_center, split_rot, ChartBox, RotBox,
};
use crate::Error;

/// Lipschitz constant of the robot (its radius).
pub const L0: f64 = 1.0;
/// Atlas distortion constant.
pub const C0: f64 = 2.0;
/// Box dimension constant `sqrt(6)`.
pub const D0: f64 = 2.449_489_742_783_178;
/// Effectivity factor `2 + sqrt(3)`.
pub const SIGMA: f64 = 3.732_050_807_568_877_2;

/// Resolution constant `K = L0 * C0 * D0 * sigma`.
pub fn resolution_constant() -> f64 {
    L0 * C0 * D0 * SIGMA
}

/// Translational cells are addressed on a `2^TMAX` integer grid over `B0`.
const TMAX: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Bfs,
    Gbf,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "bfs" => Ok(Strategy::Bfs),
            "gbf" => Ok(Strategy::Gbf),
            _ => Err(Error::Input(format!("unknown strategy '{s}' (expected bfs or gbf)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SplitPolicy {
    /// Split the factor with the larger effective width.
    #[default]
    Auto,
    /// Alternate T and R splits.
    Alternate,
    /// T-splits until the translational width drops to the initial
    /// rotational effective width, then alternate.
    TFirst,
}

impl std::str::FromStr for SplitPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "auto" => Ok(SplitPolicy::Auto),
            "alternate" => Ok(SplitPolicy::Alternate),
            "t-first" => Ok(SplitPolicy::TFirst),
            _ => Err(Error::Input(format!("unknown split policy '{s}' (expected auto, alternate or t-first)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    T,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PATH")]
    Path,
    #[serde(rename = "NO-PATH")]
    NoPath,
}

#[derive(Debug, Clone)]
pub struct PlannerInput {
    pub alpha: Configuration,
    pub beta: Configuration,
    pub obstacles: ObstacleSet,
    pub b0: BoxT,
    pub epsilon: f64,
    pub robot: DeltaRobot,
}

impl PlannerInput {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Input(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.b0.halfwidth > 0.0) || !self.b0.halfwidth.is_finite() || !self.b0.center.is_finite() {
            return Err(Error::Input("initial box must have positive finite halfwidth".into()));
        }
        for (name, g) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if !self.b0.contains(g.t) {
                return Err(Error::Input(format!("{name} translation lies outside the initial box")));
            }
            if !g.r.is_unit() {
                return Err(Error::Input(format!("{name} rotation is not a unit quaternion")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub strategy: Strategy,
    pub split: SplitPolicy,
    /// Run union-find/graph consistency checks every 100 expansions.
    pub audit: bool,
    /// Abort with an error once this many boxes exist.
    pub max_boxes: Option<usize>,
    /// No R-split below this rotational depth (`FULL` counts as 0, chart roots as 1).
    pub max_rot_depth: Option<u32>,
    pub metric: MetricParams,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            strategy: Strategy::Bfs,
            split: SplitPolicy::Auto,
            audit: false,
            max_boxes: None,
            max_rot_depth: None,
            metric: MetricParams::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub expanded: usize,
    pub created: usize,
    pub free: usize,
    pub stuck: usize,
    pub mixed: usize,
    /// MIXED boxes dropped because their width fell below epsilon.
    pub retired: usize,
    pub t_splits: usize,
    pub r_splits: usize,
    pub max_t_depth: u32,
    pub max_r_depth: u32,
    pub audits: usize,
    pub elapsed_ms: f64,
    pub verdict: Option<Verdict>,
}

/// One node of the subdivision tree.
#[derive(Debug, Clone)]
pub struct ConfigBox {
    pub bt: BoxT,
    pub br: RotBox,
    /// Cell index at the current translational depth.
    pub t_idx: [u64; 3],
    pub t_depth: u32,
    pub class: Classification,
    /// Kept only while the box is a MIXED leaf.
    pub features: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub split: Option<SplitMode>,
}

impl ConfigBox {
    /// `w(B) = w(B^t)`.
    pub fn width(&self) -> f64 {
        self.bt.width()
    }

    /// `FULL` has depth 0, chart roots depth 1.
    pub fn r_depth(&self) -> u32 {
        match &self.br {
            RotBox::Full => 0,
            RotBox::Chart(c) => c.depth + 1,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Rotational effective width: chart width times `C0` times the robot radius
    /// (`FULL` is treated as width 2).
    pub fn rot_effective_width(&self, robot_radius: f64, lambda: f64) -> f64 {
        let w = self.br.width().unwrap_or(2.0);
        lambda * C0 * w * robot_radius
    }

    fn t_span(&self, m: usize) -> (u64, u64) {
        let unit = 1u64 << (TMAX - self.t_depth);
        (self.t_idx[m] * unit, (self.t_idx[m] + 1) * unit)
    }

    /// Center configuration `m(B)`; `FULL` uses the identity rotation.
    pub fn center(&self) -> Configuration {
        let r = match &self.br {
            RotBox::Full => Quaternion::IDENTITY,
            RotBox::Chart(c) => box_center_rotation(c),
        };
        Configuration::new(self.bt.center, r)
    }
}

/// Largest dimension of the closed intersection of two translational cells.
fn t_meet_dim(a: &ConfigBox, b: &ConfigBox) -> Option<usize> {
    let mut dim = 0;
    for m in 0..3 {
        let (p, q) = (a.t_span(m), b.t_span(m));
        let lo = p.0.max(q.0);
        let hi = p.1.min(q.1);
        if lo > hi {
            return None;
        }
        if hi > lo {
            dim += 1;
        }
    }
    Some(dim)
}

/// Configuration boxes share a face of co-dimension one.
pub fn config_adjacent(a: &ConfigBox, b: &ConfigBox) -> bool {
    match (t_meet_dim(a, b), rot_meet_dim(&a.br, &b.br)) {
        (Some(2), Some(3)) | (Some(3), Some(2)) => true,
        _ => false,
    }
}

fn touches(a: &ConfigBox, b: &ConfigBox) -> bool {
    t_meet_dim(a, b).is_some() && rot_meet_dim(&a.br, &b.br).is_some()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub verdict: Verdict,
    /// Canonical path `alpha, b1, c1, ..., bk, beta`; empty for NO-PATH.
    pub path: Vec<Configuration>,
    /// Node ids of the FREE channel.
    pub channel: Vec<usize>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    dist: f64,
    id: usize,
}

impl Eq for Key {}

impl Ord for Key {
    // Reversed so that `BinaryHeap` pops the nearest box, earliest first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.dist.total_cmp(&self.dist).then(o.id.cmp(&self.id))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

enum Queue {
    Fifo(VecDeque<usize>),
    Best(BinaryHeap<Key>),
}

pub struct Planner {
    pub input: PlannerInput,
    pub opts: PlannerOptions,
    pub nodes: Vec<ConfigBox>,
    /// Adjacency graph over FREE boxes.
    pub graph: HashMap<usize, Vec<usize>>,
    uf: HashMap<usize, usize>,
    queue: Queue,
    pub stats: Stats,
    start: Instant,
}

impl Planner {
    pub fn new(input: PlannerInput, opts: PlannerOptions) -> Result<Planner, Error> {
        input.validate()?;
        let queue = match opts.strategy {
            Strategy::Bfs => Queue::Fifo(VecDeque::new()),
            Strategy::Gbf => Queue::Best(BinaryHeap::new()),
        };
        let mut p = Planner {
            input,
            opts,
            nodes: Vec::new(),
            graph: HashMap::new(),
            uf: HashMap::new(),
            queue,
            stats: Stats::default(),
            start: Instant::now(),
        };
        let bt = p.input.b0;
        p.add_node(bt, RotBox::Full, [0; 3], 0, None, None)?;
        Ok(p)
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf()).collect()
    }

    fn add_node(
        &mut self,
        bt: BoxT,
        br: RotBox,
        t_idx: [u64; 3],
        t_depth: u32,
        parent: Option<usize>,
        parent_features: Option<&[usize]>,
    ) -> Result<usize, Error> {
        if let Some(cap) = self.opts.max_boxes {
            if self.nodes.len() >= cap {
                return Err(Error::Domain(format!("box budget of {cap} exhausted")));
            }
        }
        let inp = &self.input;
        let features = approx_feature_set(&bt, &br, &inp.robot, &inp.obstacles, parent_features)?;
        let class = classify(&bt, &br, &features, &inp.obstacles);
        let id = self.nodes.len();
        let node = ConfigBox {
            bt,
            br,
            t_idx,
            t_depth,
            class,
            features: if class == Classification::Mixed && bt.width() >= self.input.epsilon { features } else { Vec::new() },
            parent,
            children: Vec::new(),
            split: None,
        };
        self.stats.max_t_depth = self.stats.max_t_depth.max(t_depth);
        self.stats.max_r_depth = self.stats.max_r_depth.max(node.r_depth());
        self.nodes.push(node);
        self.stats.created += 1;
        match class {
            Classification::Free => {
                self.stats.free += 1;
                self.insert_free(id);
            }
            Classification::Stuck => self.stats.stuck += 1,
            Classification::Mixed => {
                self.stats.mixed += 1;
                if self.nodes[id].width() < self.input.epsilon {
                    self.stats.retired += 1;
                } else {
                    self.push(id);
                }
            }
        }
        Ok(id)
    }

    fn push(&mut self, id: usize) {
        match &mut self.queue {
            Queue::Fifo(q) => q.push_back(id),
            Queue::Best(h) => {
                let dist = dist_se3(&self.nodes[id].center(), &self.input.beta).unwrap_or(f64::INFINITY);
                h.push(Key { dist, id });
            }
        }
    }

    /// Next MIXED leaf in priority order; entries expanded meanwhile are skipped.
    pub fn get_next(&mut self) -> Option<usize> {
        loop {
            let id = match &mut self.queue {
                Queue::Fifo(q) => q.pop_front()?,
                Queue::Best(h) => h.pop()?.id,
            };
            if self.nodes[id].is_leaf() {
                return Some(id);
            }
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while let Some(&p) = self.uf.get(&r) {
            if p == r {
                break;
            }
            r = p;
        }
        let mut c = x;
        while c != r {
            let p = self.uf[&c];
            self.uf.insert(c, r);
            c = p;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Older root wins so that component ids are deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.uf.insert(hi, lo);
        }
    }

    /// FREE leaves adjacent to `id`, found by descending the tree and pruning
    /// subtrees whose closure misses the box.
    pub fn adjacent_free_leaves(&self, id: usize) -> Vec<usize> {
        let me = &self.nodes[id];
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if n == id || !touches(node, me) {
                continue;
            }
            if node.is_leaf() {
                if node.class == Classification::Free && config_adjacent(node, me) {
                    out.push(n);
                }
            } else {
                stack.extend(node.children.iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    fn insert_free(&mut self, id: usize) {
        self.uf.insert(id, id);
        self.graph.entry(id).or_default();
        for n in self.adjacent_free_leaves(id) {
            self.graph.get_mut(&id).expect("inserted above").push(n);
            self.graph.entry(n).or_default().push(id);
            self.union(id, n);
        }
    }

    pub fn split_mode(&self, id: usize) -> SplitMode {
        let b = &self.nodes[id];
        let rd = b.r_depth();
        let r_allowed = self.opts.max_rot_depth.map_or(true, |cap| rd < cap)
            && b.br.chart_box().map_or(true, |c| c.depth < crate::so3::MAX_DEPTH);
        if !r_allowed {
            return SplitMode::T;
        }
        let radius = self.input.robot.radius();
        let lambda = self.opts.metric.lambda;
        let wt = b.width();
        let alternate = if (b.t_depth + rd) % 2 == 0 { SplitMode::T } else { SplitMode::R };
        match self.opts.split {
            SplitPolicy::Auto => {
                if b.rot_effective_width(radius, lambda) > wt {
                    SplitMode::R
                } else {
                    SplitMode::T
                }
            }
            SplitPolicy::Alternate => alternate,
            SplitPolicy::TFirst => {
                if wt > lambda * C0 * 2.0 * radius {
                    SplitMode::T
                } else {
                    alternate
                }
            }
        }
    }

    /// Split a MIXED leaf and classify its children.
    pub fn expand(&mut self, id: usize, mode: SplitMode) -> Result<Vec<usize>, Error> {
        let b = self.nodes[id].clone();
        if !b.is_leaf() {
            return Err(Error::Domain(format!("box {id} is not a leaf")));
        }
        if b.class != Classification::Mixed {
            return Err(Error::Domain(format!("box {id} is {} and cannot be expanded", b.class.as_str())));
        }
        if mode == SplitMode::T && b.t_depth >= TMAX {
            return Err(Error::Domain("translational depth limit reached".into()));
        }
        self.nodes[id].split = Some(mode);
        let mut kids = Vec::with_capacity(8);
        let feats = b.features.clone();
        match mode {
            SplitMode::T => {
                self.stats.t_splits += 1;
                let h = b.bt.halfwidth / 2.0;
                for k in 0..8u64 {
                    let bits = [k & 1, k >> 1 & 1, k >> 2 & 1];
                    let c = Point3::new(
                        b.bt.center.x + if bits[0] == 1 { h } else { -h },
                        b.bt.center.y + if bits[1] == 1 { h } else { -h },
                        b.bt.center.z + if bits[2] == 1 { h } else { -h },
                    );
                    let idx = [0, 1, 2].map(|m| 2 * b.t_idx[m] + bits[m]);
                    let n = self.add_node(BoxT::new(c, h), b.br, idx, b.t_depth + 1, Some(id), Some(&feats))?;
                    self.nodes[id].children.push(n);
                    kids.push(n);
                }
            }
            SplitMode::R => {
                self.stats.r_splits += 1;
                for r in split_rot(&b.br) {
                    let n = self.add_node(b.bt, r, b.t_idx, b.t_depth, Some(id), Some(&feats))?;
                    self.nodes[id].children.push(n);
                    kids.push(n);
                }
            }
        }
        self.nodes[id].features = Vec::new();
        self.stats.expanded += 1;
        if self.opts.audit && self.stats.expanded % 100 == 0 {
            self.audit()?;
        }
        Ok(kids)
    }

    /// The leaf containing `g`, with lower-closed intervals and the chart
    /// tie-break of `project_to_cubic`.
    pub fn find_box(&self, g: &Configuration) -> Result<usize, Error> {
        let b0 = self.input.b0;
        if !b0.contains(g.t) {
            return Err(Error::Input("configuration lies outside the initial box".into()));
        }
        let full = 1u64 << TMAX;
        let lo = b0.lo();
        let rel = [g.t.x - lo.x, g.t.y - lo.y, g.t.z - lo.z];
        let ip = rel.map(|v| (((v / b0.width()) * full as f64) as u64).min(full - 1));
        let (chart, p4) = project_to_cubic(g.r);
        let lp = local(chart, p4);
        let mut n = self.root();
        loop {
            let node = &self.nodes[n];
            let Some(mode) = node.split else { return Ok(n) };
            n = match mode {
                SplitMode::T => {
                    let shift = TMAX - node.t_depth - 1;
                    let k = (0..3).map(|m| ((ip[m] >> shift) & 1) << m).sum::<u64>() as usize;
                    node.children[k]
                }
                SplitMode::R => match &node.br {
                    RotBox::Full => node.children[chart.index()],
                    RotBox::Chart(_) => *node
                        .children
                        .iter()
                        .find(|&&c| self.nodes[c].br.chart_box().is_some_and(|cb| cb.contains_point_halfopen(lp)))
                        .ok_or_else(|| Error::Domain("rotation not covered by any child".into()))?,
                },
            };
        }
    }

    /// Endpoint loop: refine around `g` until its box is FREE; `false` means NO-PATH.
    fn settle_endpoint(&mut self, g: &Configuration) -> Result<bool, Error> {
        loop {
            let b = self.find_box(g)?;
            match self.nodes[b].class {
                Classification::Free => return Ok(true),
                Classification::Stuck => return Ok(false),
                Classification::Mixed => {
                    if self.nodes[b].width() < self.input.epsilon {
                        return Ok(false);
                    }
                    let mode = self.split_mode(b);
                    self.expand(b, mode)?;
                }
            }
        }
    }

    pub fn run(&mut self) -> Result<PlanResult, Error> {
        self.start = Instant::now();
        let (alpha, beta) = (self.input.alpha, self.input.beta);
        if !self.settle_endpoint(&alpha)? || !self.settle_endpoint(&beta)? {
            return Ok(self.finish(Verdict::NoPath, Vec::new(), Vec::new()));
        }
        loop {
            let (a, b) = (self.find_box(&alpha)?, self.find_box(&beta)?);
            if self.find(a) == self.find(b) {
                break;
            }
            let Some(n) = self.get_next() else {
                return Ok(self.finish(Verdict::NoPath, Vec::new(), Vec::new()));
            };
            let mode = self.split_mode(n);
            self.expand(n, mode)?;
        }
        if self.opts.audit {
            self.audit()?;
        }
        let (a, b) = (self.find_box(&alpha)?, self.find_box(&beta)?);
        let channel = self.channel(a, b).ok_or_else(|| Error::Domain("union-find joined boxes without a graph path".into()))?;
        let path = self.extract_path(&channel);
        Ok(self.finish(Verdict::Path, path, channel))
    }

    fn finish(&mut self, verdict: Verdict, path: Vec<Configuration>, channel: Vec<usize>) -> PlanResult {
        self.stats.elapsed_ms = self.start.elapsed().as_secs_f64() * 1e3;
        self.stats.verdict = Some(verdict);
        PlanResult { verdict, path, channel, stats: self.stats.clone() }
    }

    /// Shortest (fewest boxes) chain of adjacent FREE boxes from `a` to `b`.
    pub fn channel(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut q = VecDeque::from([a]);
        prev.insert(a, a);
        while let Some(x) = q.pop_front() {
            if x == b {
                let mut out = vec![b];
                let mut c = b;
                while c != a {
                    c = prev[&c];
                    out.push(c);
                }
                out.reverse();
                return Some(out);
            }
            for &y in self.graph.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(y) {
                    e.insert(x);
                    q.push_back(y);
                }
            }
        }
        None
    }

    /// Canonical path `alpha, m(B1), m(B1 ∩ B2), ..., m(Bk), beta`.
    pub fn extract_path(&self, channel: &[usize]) -> Vec<Configuration> {
        let mut out = vec![self.input.alpha];
        for (i, &id) in channel.iter().enumerate() {
            out.push(self.nodes[id].center());
            if let Some(&next) = channel.get(i + 1) {
                out.push(self.meet_center(id, next));
            }
        }
        out.push(self.input.beta);
        out
    }

    /// Center of the shared face of two adjacent boxes.
    pub fn meet_center(&self, a: usize, b: usize) -> Configuration {
        let (x, y) = (&self.nodes[a], &self.nodes[b]);
        let b0 = self.input.b0;
        let scale = b0.width() / (1u64 << TMAX) as f64;
        let lo = b0.lo().to_array();
        let mut t = [0.0; 3];
        for m in 0..3 {
            let (p, q) = (x.t_span(m), y.t_span(m));
            let (l, h) = (p.0.max(q.0), p.1.min(q.1));
            t[m] = lo[m] + 0.5 * (l as f64 + h as f64) * scale;
        }
        let r = match (&x.br, &y.br) {
            (RotBox::Full, RotBox::Full) => Quaternion::IDENTITY,
            (RotBox::Full, RotBox::Chart(c)) | (RotBox::Chart(c), RotBox::Full) => box_center_rotation(c),
            (RotBox::Chart(c), RotBox::Chart(d)) => match rot_face_adjacent(&x.br, &y.br) {
                Some(dir) if rot_meet_dim(&x.br, &y.br) == Some(2) => chart_map_unchecked(shared_face_center(c, d, dir)),
                _ => box_center_rotation(if c.depth >= d.depth { c } else { d }),
            },
        };
        Configuration::new(Point3::new(t[0], t[1], t[2]), r)
    }

    /// Union-find components must equal graph components; every graph edge
    /// must join adjacent FREE leaves.
    pub fn audit(&mut self) -> Result<(), Error> {
        self.stats.audits += 1;
        let mut ids: Vec<usize> = self.graph.keys().copied().collect();
        ids.sort_unstable();
        let mut comp: HashMap<usize, usize> = HashMap::new();
        for &s in &ids {
            if comp.contains_key(&s) {
                continue;
            }
            comp.insert(s, s);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &self.graph[&x] {
                    let (a, b) = (&self.nodes[x], &self.nodes[y]);
                    if a.class != Classification::Free || b.class != Classification::Free || !config_adjacent(a, b) {
                        return Err(Error::Domain(format!("graph edge {x}-{y} joins non-adjacent boxes")));
                    }
                    if !comp.contains_key(&y) {
                        comp.insert(y, s);
                        stack.push(y);
                    }
                }
            }
        }
        // Two boxes share a graph component iff they share a union-find root.
        let mut root_of_comp: HashMap<usize, usize> = HashMap::new();
        let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
        for &x in &ids {
            let r = self.find(x);
            let c = comp[&x];
            if *root_of_comp.entry(c).or_insert(r) != r || *comp_of_root.entry(r).or_insert(c) != c {
                return Err(Error::Domain(format!("union-find disagrees with graph components at box {x}")));
            }
        }
        let free_leaves = self.nodes.iter().filter(|n| n.class == Classification::Free).count();
        if free_leaves != ids.len() {
            return Err(Error::Domain("FREE boxes missing from the graph".into()));
        }
        Ok(())
    }

    /// Number of union-find components over FREE boxes.
    pub fn component_count(&mut self) -> usize {
        let ids: Vec<usize> = self.uf.keys().copied().collect();
        let mut roots: Vec<usize> = ids.into_iter().map(|x| self.find(x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn is_free_leaf(&self, id: usize) -> bool {
        self.nodes[id].is_leaf() && self.nodes[id].class == Classification::Free
    }

    /// Rotational chart box of a node, if any.
    pub fn chart_box(&self, id: usize) -> Option<&ChartBox> {
        self.nodes[id].br.chart_box()
    }
}

/// Build a planner and run it.
pub fn plan(input: PlannerInput, opts: PlannerOptions) -> Result<(PlanResult, Planner), Error> {
    let mut p = Planner::new(input, opts)?;
    let r = p.run()?;
    Ok((r, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::{build_features, Mesh};

    fn cube_mesh(c: Point3, h: f64) -> Mesh {
        let mut v = Vec::new();
        for k in 0..8 {
            let s = |b: usize| if k >> b & 1 == 1 { h } else { -h };
            v.push(Point3::new(c.x + s(0), c.y + s(1), c.z + s(2)));
        }
        let t = vec![
            [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6], [0, 1, 4], [1, 5, 4],
            [2, 6, 3], [3, 6, 7], [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
        ];
        Mesh { vertices: v, triangles: t }
    }

    fn input(obstacles: ObstacleSet) -> PlannerInput {
        PlannerInput {
            alpha: Configuration::identity_at(Point3::new(-2.0, -2.0, -2.0)),
            beta: Configuration::identity_at(Point3::new(2.0, 2.0, 2.0)),
            obstacles,
            b0: BoxT::new(Point3::ZERO, 3.0),
            epsilon: 0.2,
            robot: DeltaRobot::default(),
        }
    }

    #[test]
    fn constants() {
        let k = resolution_constant();
        assert!((k - (4.0 * 6f64.sqrt() + 6.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(k < 18.3);
    }

    #[test]
    fn root_splits() {
        let mut p = Planner::new(input(build_features(&cube_mesh(Point3::ZERO, 0.5)).unwrap()), PlannerOptions::default()).unwrap();
        assert_eq!(p.nodes[0].class, Classification::Mixed);
        let k = p.expand(0, SplitMode::T).unwrap();
        assert_eq!(k.len(), 8);
        assert!(k.iter().all(|&c| p.nodes[c].width() == 3.0));
        let g = Configuration::identity_at(Point3::new(-1.0, -1.0, -1.0));
        assert_eq!(p.find_box(&g).unwrap(), k[0]);
        let mixed = *k.iter().find(|&&c| p.nodes[c].class == Classification::Mixed).unwrap();
        let r = p.expand(mixed, SplitMode::R).unwrap();
        assert_eq!(r.len(), 4);
        assert!(p.expand(mixed, SplitMode::T).is_err());
    }

    #[test]
    fn empty_scene_path() {
        let (r, p) = plan(input(ObstacleSet::empty()), PlannerOptions { audit: true, ..Default::default() }).unwrap();
        assert_eq!(r.verdict, Verdict::Path);
        assert_eq!(r.path.len(), 3);
        assert_eq!(p.nodes.len(), 1);
    }

    #[test]
    fn inside_obstacle_no_path() {
        let obs = build_features(&cube_mesh(Point3::ZERO, 10.0)).unwrap();
        let (r, _) = plan(input(obs), PlannerOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NoPath);
    }

    #[test]
    fn around_block() {
        let obs = build_features(&cube_mesh(Point3::ZERO, 0.5)).unwrap();
        for strategy in [Strategy::Bfs, Strategy::Gbf] {
            let opts = PlannerOptions { strategy, audit: true, max_boxes: Some(2_000_000), ..Default::default() };
            let mut inp = input(obs.clone());
            inp.robot = DeltaRobot::scaled(0.25).unwrap();
            let (r, p) = plan(inp, opts).unwrap();
            assert_eq!(r.verdict, Verdict::Path);
            assert_eq!(r.path.len(), 2 * r.channel.len() + 1);
            for w in r.channel.windows(2) {
                assert!(config_adjacent(&p.nodes[w[0]], &p.nodes[w[1]]));
            }
        }
    }

    #[test]
    fn policy_modes() {
        let obs = build_features(&cube_mesh(Point3::ZERO, 0.5)).unwrap();
        let p = Planner::new(input(obs), PlannerOptions::default()).unwrap();
        // w = 6 exceeds the rotational effective width 4 of FULL.
        assert_eq!(p.split_mode(0), SplitMode::T);
        let mut q = Planner::new(input(ObstacleSet::empty()), PlannerOptions::default()).unwrap();
        q.opts.max_rot_depth = Some(0);
        q.input.b0 = BoxT::new(Point3::ZERO, 0.1);
        assert_eq!(q.split_mode(0), SplitMode::T);
    }
}
