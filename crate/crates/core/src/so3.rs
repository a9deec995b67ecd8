//! Cubic model of SO(3): four charts `C_i = {a in [-1,1]^4 : a_i = -1}`,
//! dyadic rotational boxes, and the face-adjacency calculus with
//! principal-neighbor pointers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geom::{Interval, Quaternion};
use crate::Error;

/// Deepest supported rotational subdivision level.
pub const MAX_DEPTH: u32 = 60;
/// Integer length of `[-1, 1]` at `MAX_DEPTH` resolution.
const SPAN: u64 = 1 << MAX_DEPTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChartId(pub u8);

impl ChartId {
    pub const ALL: [ChartId; 4] = [ChartId(0), ChartId(1), ChartId(2), ChartId(3)];

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> char {
        ['w', 'x', 'y', 'z'][self.index()]
    }

    /// The three quaternion coordinates that vary inside this chart.
    pub fn free_axes(self) -> [usize; 3] {
        let mut out = [0; 3];
        let mut n = 0;
        for a in 0..4 {
            if a != self.index() {
                out[n] = a;
                n += 1;
            }
        }
        out
    }

    /// Position of quaternion axis `a` among the free axes (`None` for the fixed axis).
    pub fn slot(self, a: usize) -> Option<usize> {
        let i = self.index();
        match a.cmp(&i) {
            std::cmp::Ordering::Less => Some(a),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(a - 1),
        }
    }
}

/// One of the eight semi-axis directions `+-e_0 .. +-e_3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub axis: u8,
    pub positive: bool,
}

impl Direction {
    pub fn new(axis: usize, positive: bool) -> Self {
        assert!(axis < 4);
        Direction { axis: axis as u8, positive }
    }

    pub fn all() -> [Direction; 8] {
        let mut out = [Direction::new(0, true); 8];
        for (k, d) in out.iter_mut().enumerate() {
            *d = Direction::from_index(k);
        }
        out
    }

    pub fn index(self) -> usize {
        2 * self.axis as usize + usize::from(!self.positive)
    }

    pub fn from_index(k: usize) -> Self {
        Direction::new(k / 2, k % 2 == 0)
    }

    pub fn opposite(self) -> Self {
        Direction { axis: self.axis, positive: !self.positive }
    }

    pub fn label(self) -> String {
        format!("{}e{}", if self.positive { '+' } else { '-' }, self.axis)
    }
}

/// Dyadic box inside one chart: interval `n` at depth `D` is
/// `[-1 + 2n/2^D, -1 + 2(n+1)/2^D]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartBox {
    pub chart: ChartId,
    pub depth: u32,
    pub idx: [u64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RotBox {
    Full,
    Chart(ChartBox),
}

/// Real-valued region of one chart; used for scaled or degenerate boxes
/// that are not dyadic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartRegion {
    pub chart: ChartId,
    pub iv: [Interval; 3],
}

impl ChartRegion {
    /// The point `p` embedded in R^4 with `-1` in the chart slot.
    pub fn embed(&self, p: [f64; 3]) -> [f64; 4] {
        embed(self.chart, p)
    }

    pub fn center(&self) -> [f64; 3] {
        [self.iv[0].mid(), self.iv[1].mid(), self.iv[2].mid()]
    }

    pub fn corners(&self) -> [[f64; 3]; 8] {
        let mut out = [[0.0; 3]; 8];
        for (k, c) in out.iter_mut().enumerate() {
            for m in 0..3 {
                c[m] = if k >> m & 1 == 1 { self.iv[m].hi } else { self.iv[m].lo };
            }
        }
        out
    }

    pub fn width(&self) -> f64 {
        self.iv.iter().map(Interval::width).fold(0.0, f64::max)
    }

    /// Same center, every side scaled by `s` (may leave `[-1,1]`).
    pub fn scaled(&self, s: f64) -> ChartRegion {
        ChartRegion { chart: self.chart, iv: self.iv.map(|i| i.scaled(s)) }
    }

    pub fn point(chart: ChartId, p: [f64; 3]) -> ChartRegion {
        ChartRegion { chart, iv: p.map(|v| Interval::new(v, v)) }
    }
}

pub fn embed(chart: ChartId, p: [f64; 3]) -> [f64; 4] {
    let mut a = [-1.0; 4];
    for (m, ax) in chart.free_axes().into_iter().enumerate() {
        a[ax] = p[m];
    }
    a
}

fn coord(n: u64) -> f64 {
    -1.0 + 2.0 * (n as f64) / (SPAN as f64)
}

impl ChartBox {
    pub fn root(chart: ChartId) -> Self {
        ChartBox { chart, depth: 0, idx: [0; 3] }
    }

    /// Integer endpoints (at `MAX_DEPTH` resolution) of free slot `m`.
    pub fn span(&self, m: usize) -> (u64, u64) {
        let unit = SPAN >> self.depth;
        (self.idx[m] * unit, (self.idx[m] + 1) * unit)
    }

    /// Integer endpoints of quaternion axis `a`; the fixed axis is `(0,0)`.
    pub fn span4(&self, a: usize) -> (u64, u64) {
        match self.chart.slot(a) {
            Some(m) => self.span(m),
            None => (0, 0),
        }
    }

    pub fn interval(&self, m: usize) -> Interval {
        let (lo, hi) = self.span(m);
        Interval::new(coord(lo), coord(hi))
    }

    pub fn region(&self) -> ChartRegion {
        ChartRegion { chart: self.chart, iv: [self.interval(0), self.interval(1), self.interval(2)] }
    }

    pub fn width(&self) -> f64 {
        2.0 / (1u64 << self.depth) as f64
    }

    pub fn children(&self) -> [ChartBox; 8] {
        assert!(self.depth < MAX_DEPTH, "rotational depth limit reached");
        let mut out = [*self; 8];
        for (k, c) in out.iter_mut().enumerate() {
            c.depth = self.depth + 1;
            for m in 0..3 {
                c.idx[m] = 2 * self.idx[m] + (k as u64 >> m & 1);
            }
        }
        out
    }

    pub fn parent(&self) -> Option<ChartBox> {
        (self.depth > 0).then(|| ChartBox {
            chart: self.chart,
            depth: self.depth - 1,
            idx: self.idx.map(|n| n / 2),
        })
    }

    pub fn contains_box(&self, o: &ChartBox) -> bool {
        self.chart == o.chart
            && (0..3).all(|m| {
                let (a, b) = self.span(m);
                let (c, d) = o.span(m);
                a <= c && d <= b
            })
    }

    /// Lower-closed membership of a chart point (the upper end `+1` is closed).
    pub fn contains_point_halfopen(&self, p: [f64; 3]) -> bool {
        (0..3).all(|m| {
            let iv = self.interval(m);
            iv.lo <= p[m] && (p[m] < iv.hi || (iv.hi >= 1.0 && p[m] <= 1.0))
        })
    }
}

impl RotBox {
    pub fn chart_box(&self) -> Option<&ChartBox> {
        match self {
            RotBox::Full => None,
            RotBox::Chart(c) => Some(c),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, RotBox::Full)
    }

    /// Chart-coordinate width; `None` for `FULL`.
    pub fn width(&self) -> Option<f64> {
        self.chart_box().map(ChartBox::width)
    }

    pub fn depth(&self) -> Option<u32> {
        self.chart_box().map(|c| c.depth)
    }
}

/// Unit quaternion `p / |p|` for a point `p` of chart `c`.
pub fn chart_map(c: ChartId, p: [f64; 4]) -> Result<Quaternion, Error> {
    if p[c.index()] != -1.0 {
        return Err(Error::Domain(format!("point {p:?} not in chart {}", c.name())));
    }
    if p.iter().any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(Error::Domain(format!("point {p:?} outside [-1,1]^4")));
    }
    Ok(chart_map_unchecked(p))
}

/// Normalizes any nonzero 4-vector; used for scaled boxes that leave the cube.
pub fn chart_map_unchecked(p: [f64; 4]) -> Quaternion {
    let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    Quaternion::new(p[0] / n, p[1] / n, p[2] / n, p[3] / n)
}

/// Chart of a maximal-magnitude coordinate (smallest index on ties) and the
/// point `q / |q|_max` normalized so that its chart coordinate is `-1`.
pub fn project_to_cubic(q: Quaternion) -> (ChartId, [f64; 4]) {
    let a = q.to_array();
    let mut i = 0;
    for k in 1..4 {
        if a[k].abs() > a[i].abs() {
            i = k;
        }
    }
    let s = -1.0 / a[i];
    let mut p = a.map(|v| v * s);
    p[i] = -1.0;
    for v in p.iter_mut() {
        *v = v.clamp(-1.0, 1.0);
    }
    (ChartId(i as u8), p)
}

/// The chart-local 3-vector of a point of `C_c`.
pub fn local(c: ChartId, p: [f64; 4]) -> [f64; 3] {
    let ax = c.free_axes();
    [p[ax[0]], p[ax[1]], p[ax[2]]]
}

/// Children of a rotational box: `FULL` gives the four chart roots.
pub fn split_rot(b: &RotBox) -> Vec<RotBox> {
    match b {
        RotBox::Full => ChartId::ALL.iter().map(|&c| RotBox::Chart(ChartBox::root(c))).collect(),
        RotBox::Chart(c) => c.children().iter().map(|&k| RotBox::Chart(k)).collect(),
    }
}

fn neg_span(s: (u64, u64)) -> (u64, u64) {
    (SPAN - s.1, SPAN - s.0)
}

/// Face containment of the two remaining projections (both one way or both the other).
fn faces_nested(p: [(u64, u64); 2], q: [(u64, u64); 2]) -> bool {
    let inside = |a: (u64, u64), b: (u64, u64)| b.0 <= a.0 && a.1 <= b.1;
    (inside(p[0], q[0]) && inside(p[1], q[1])) || (inside(q[0], p[0]) && inside(q[1], p[1]))
}

/// `B ->d B'`: `B'` shares the `d` face of `B`, with one face contained in the other.
pub fn rot_adjacent(b: &ChartBox, o: &ChartBox, d: Direction) -> Result<bool, Error> {
    let i = b.chart.index();
    let k = d.axis as usize;
    if k == i {
        return Err(Error::Domain(format!("direction {} undefined in chart {}", d.label(), b.chart.name())));
    }
    let rest: Vec<usize> = (0..4).filter(|&a| a != i && a != k).collect();
    let (blo, bhi) = b.span4(k);
    if o.chart == b.chart {
        let (olo, ohi) = o.span4(k);
        let abut = if d.positive { bhi == olo } else { blo == ohi };
        if !abut {
            return Ok(false);
        }
        let p = [b.span4(rest[0]), b.span4(rest[1])];
        let q = [o.span4(rest[0]), o.span4(rest[1])];
        return Ok(faces_nested(p, q));
    }
    if o.chart.index() != k {
        return Ok(false);
    }
    let p = [b.span4(rest[0]), b.span4(rest[1])];
    let q = [o.span4(rest[0]), o.span4(rest[1])];
    let (oilo, oihi) = o.span4(i);
    if d.positive {
        // a_k = +1 on B is glued to a_i = +1 on B' with the other coordinates negated.
        if bhi != SPAN || oihi != SPAN {
            return Ok(false);
        }
        Ok(faces_nested(p, q.map(neg_span)))
    } else {
        if blo != 0 || oilo != 0 {
            return Ok(false);
        }
        Ok(faces_nested(p, q))
    }
}

/// The direction from `B'` back to `B` when `B ->d B'`.
pub fn reverse_direction(b: &ChartBox, o: &ChartBox, d: Direction) -> Direction {
    if b.chart == o.chart {
        d.opposite()
    } else {
        Direction::new(b.chart.index(), d.positive)
    }
}

/// 4D integer box of a chart box, optionally antipodally negated.
fn box4(b: &ChartBox, negate: bool) -> [(u64, u64); 4] {
    let mut out = [(0, 0); 4];
    for (a, s) in out.iter_mut().enumerate() {
        let v = b.span4(a);
        *s = if negate { neg_span(v) } else { v };
    }
    out
}

/// Dimension of the closed intersection of two 4D boxes, or `None` if empty.
fn meet_dim(p: &[(u64, u64); 4], q: &[(u64, u64); 4]) -> Option<usize> {
    let mut dim = 0;
    for a in 0..4 {
        let lo = p[a].0.max(q[a].0);
        let hi = p[a].1.min(q[a].1);
        if lo > hi {
            return None;
        }
        if lo < hi {
            dim += 1;
        }
    }
    Some(dim)
}

/// Largest dimension of `B ∩ B'` in the cubic model (`q ≡ -q`), `None` if disjoint.
pub fn rot_meet_dim(b: &RotBox, o: &RotBox) -> Option<usize> {
    match (b, o) {
        (RotBox::Full, RotBox::Full) => Some(3),
        (RotBox::Full, RotBox::Chart(_)) | (RotBox::Chart(_), RotBox::Full) => Some(3),
        (RotBox::Chart(x), RotBox::Chart(y)) => {
            let p = box4(x, false);
            let a = meet_dim(&p, &box4(y, false));
            let c = meet_dim(&p, &box4(y, true));
            match (a, c) {
                (Some(u), Some(v)) => Some(u.max(v)),
                (u, v) => u.or(v),
            }
        }
    }
}

/// Rotational parts overlap with positive volume.
pub fn rot_overlap(b: &RotBox, o: &RotBox) -> bool {
    rot_meet_dim(b, o) == Some(3)
}

/// Face adjacency between rotational parts in any direction (`FULL` has no faces).
pub fn rot_face_adjacent(b: &RotBox, o: &RotBox) -> Option<Direction> {
    let (x, y) = (b.chart_box()?, o.chart_box()?);
    Direction::all()
        .into_iter()
        .filter(|d| d.axis as usize != x.chart.index())
        .find(|&d| rot_adjacent(x, y, d).unwrap_or(false))
}

/// Center of the shared face of `B ->d B'`, as a point of `B`'s chart in R^4.
pub fn shared_face_center(b: &ChartBox, o: &ChartBox, d: Direction) -> [f64; 4] {
    let k = d.axis as usize;
    let cross = o.chart != b.chart;
    let mut p = [0.0; 4];
    p[b.chart.index()] = -1.0;
    let (lo, hi) = b.span4(k);
    p[k] = coord(if d.positive { hi } else { lo });
    for a in (0..4).filter(|&a| a != b.chart.index() && a != k) {
        let mine = b.span4(a);
        let theirs = if cross && d.positive { neg_span(o.span4(a)) } else { o.span4(a) };
        let s = if mine.1 - mine.0 <= theirs.1 - theirs.0 { mine } else { theirs };
        p[a] = 0.5 * (coord(s.0) + coord(s.1));
    }
    p
}

/// Midpoint of a chart box as a unit quaternion.
pub fn box_center_rotation(b: &ChartBox) -> Quaternion {
    let r = b.region();
    chart_map_unchecked(r.embed(r.center()))
}

#[derive(Debug, Clone)]
pub struct RotNode {
    pub rbox: RotBox,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub ptr: [Option<usize>; 8],
}

impl RotNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Rotational subdivision tree rooted at `FULL`, maintaining principal-neighbor pointers.
#[derive(Debug, Clone)]
pub struct RotTree {
    pub nodes: Vec<RotNode>,
}

impl Default for RotTree {
    fn default() -> Self {
        Self::new()
    }
}

impl RotTree {
    pub fn new() -> Self {
        RotTree { nodes: vec![RotNode { rbox: RotBox::Full, parent: None, children: vec![], ptr: [None; 8] }] }
    }

    /// Tree split uniformly to `depth` inside every chart.
    pub fn uniform(depth: u32) -> Self {
        let mut t = RotTree::new();
        t.split(0);
        let mut frontier: Vec<usize> = t.nodes[0].children.clone();
        for _ in 0..depth {
            let mut next = Vec::new();
            for n in frontier {
                next.extend(t.split(n));
            }
            frontier = next;
        }
        t
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn chart_box(&self, n: usize) -> &ChartBox {
        self.nodes[n].rbox.chart_box().expect("FULL node has no chart box")
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&n| self.nodes[n].is_leaf()).collect()
    }

    /// Split a leaf and maintain all pointers; returns the new children.
    pub fn split(&mut self, n: usize) -> Vec<usize> {
        assert!(self.nodes[n].is_leaf(), "split of non-leaf node {n}");
        match self.nodes[n].rbox {
            RotBox::Full => {
                let base = self.nodes.len();
                for c in ChartId::ALL {
                    let mut ptr = [None; 8];
                    for d in Direction::all() {
                        if d.axis != c.0 {
                            ptr[d.index()] = Some(base + d.axis as usize);
                        }
                    }
                    self.nodes.push(RotNode { rbox: RotBox::Chart(ChartBox::root(c)), parent: Some(n), children: vec![], ptr });
                }
                self.nodes[n].children = (base..base + 4).collect();
            }
            RotBox::Chart(b) => {
                let base = self.nodes.len();
                let kids = b.children();
                for (k, cb) in kids.iter().enumerate() {
                    let mut ptr = [None; 8];
                    for d in Direction::all() {
                        let Some(m) = b.chart.slot(d.axis as usize) else { continue };
                        let upper = k >> m & 1 == 1;
                        ptr[d.index()] = if d.positive != upper {
                            Some(base + (k ^ (1 << m)))
                        } else {
                            let p = self.nodes[n].ptr[d.index()].expect("missing boundary pointer");
                            Some(self.descend_once(p, cb, d))
                        };
                    }
                    self.nodes.push(RotNode { rbox: RotBox::Chart(*cb), parent: Some(n), children: vec![], ptr });
                }
                self.nodes[n].children = (base..base + 8).collect();
                self.redirect_reverse(n);
            }
        }
        self.nodes[n].children.clone()
    }

    /// `p` if it is a leaf, else the child of `p` that is the congruent `d`-neighbor of `cb`.
    fn descend_once(&self, p: usize, cb: &ChartBox, d: Direction) -> usize {
        if self.nodes[p].is_leaf() {
            return p;
        }
        self.nodes[p]
            .children
            .iter()
            .copied()
            .find(|&c| rot_adjacent(cb, self.chart_box(c), d).unwrap_or(false))
            .expect("no congruent child behind principal neighbor")
    }

    /// After splitting `n`, point the reverse pointers of deeper neighbors at `n`'s children.
    fn redirect_reverse(&mut self, n: usize) {
        let b = *self.chart_box(n);
        for d in Direction::all() {
            if d.axis as usize == b.chart.index() {
                continue;
            }
            let Some(p) = self.nodes[n].ptr[d.index()] else { continue };
            let pb = *self.chart_box(p);
            if pb.depth != b.depth {
                continue;
            }
            let back = reverse_direction(&b, &pb, d);
            let mut stack: Vec<usize> = self.nodes[p].children.clone();
            while let Some(x) = stack.pop() {
                let xb = *self.chart_box(x);
                if !rot_adjacent(&xb, &b, back).unwrap_or(false) {
                    continue;
                }
                let target = self.nodes[n]
                    .children
                    .iter()
                    .copied()
                    .find(|&c| rot_adjacent(&xb, self.chart_box(c), back).unwrap_or(false))
                    .expect("reverse neighbor without matching child");
                self.nodes[x].ptr[back.index()] = Some(target);
                stack.extend(self.nodes[x].children.iter().copied());
            }
        }
    }

    pub fn principal_neighbor(&self, n: usize, d: Direction) -> Option<usize> {
        self.nodes[n].ptr[d.index()]
    }

    /// All leaves `B'` with `B ->d B'`.
    pub fn enumerate_d_neighbors(&self, n: usize, d: Direction) -> Vec<usize> {
        let Some(p) = self.nodes[n].ptr[d.index()] else { return vec![] };
        let b = *self.chart_box(n);
        let mut out = Vec::new();
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            if self.nodes[x].is_leaf() {
                out.push(x);
                continue;
            }
            for &c in &self.nodes[x].children {
                if rot_adjacent(&b, self.chart_box(c), d).unwrap_or(false) {
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Principal neighbor recomputed by scanning every node.
    pub fn principal_neighbor_from_scratch(&self, n: usize, d: Direction) -> Option<usize> {
        let b = self.chart_box(n);
        if d.axis as usize == b.chart.index() {
            return None;
        }
        (0..self.nodes.len())
            .filter(|&x| x != n)
            .filter_map(|x| self.nodes[x].rbox.chart_box().map(|c| (x, c)))
            .filter(|(_, c)| c.depth <= b.depth && rot_adjacent(b, c, d).unwrap_or(false))
            .max_by_key(|(_, c)| c.depth)
            .map(|(x, _)| x)
    }

    /// Line-oriented text dump: one node per line with its pointers.
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            match &node.rbox {
                RotBox::Full => {
                    let _ = writeln!(s, "node {id} FULL children {}", node.children.len());
                }
                RotBox::Chart(b) => {
                    let _ = write!(s, "node {id} chart {} depth {}", b.chart.name(), b.depth);
                    for m in 0..3 {
                        let iv = b.interval(m);
                        let _ = write!(s, " [{},{}]", iv.lo, iv.hi);
                    }
                    for d in Direction::all() {
                        match node.ptr[d.index()] {
                            Some(p) => {
                                let _ = write!(s, " {}:{p}", d.label());
                            }
                            None => {
                                let _ = write!(s, " {}:-", d.label());
                            }
                        }
                    }
                    let _ = writeln!(s);
                }
            }
        }
        s
    }
}
