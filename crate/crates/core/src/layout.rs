//! Node-link-group layout.
//!
//! Nodes are partitioned by an attribute (element type by default). Each
//! partition is circle-packed with a front-chain packer, wrapped in a group
//! circle, and the group circles are placed with a seeded many-body
//! simulation followed by hard collision resolution. Convex hulls outline
//! each group's drawn node circles.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{ElementRecord, GraphSnapshot};

/// Geometric tolerance used by the layout invariants, in canvas units.
pub const EPSILON: f64 = 0.5;

const REPULSION: f64 = 10.0;
const CENTERING: f64 = 0.05;
const COLLISION_TOLERANCE: f64 = 1e-6;
const MAX_COLLISION_PASSES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("cannot pack an empty group")]
    EmptyGroup,
    #[error("circle `{id}` has non-positive radius {radius}")]
    InvalidRadius { id: String, radius: f64 },
    #[error("convex hull of an empty point set")]
    EmptyHull,
    #[error("invalid layout configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown group-by attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown size-by encoding `{0}`")]
    UnknownSizeBy(String),
    #[error("unknown reference layout `{0}`")]
    UnknownReference(String),
    #[error("layouts are grouped by different attributes: `{0}` and `{1}`")]
    MismatchedGroupBy(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Point {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> [f64; 2] {
        [p.x, p.y]
    }
}

/// Element attribute used to partition nodes into groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupBy {
    Type,
    Asil,
    Severity,
    Exposure,
    Controllability,
}

impl GroupBy {
    fn key(self, n: &ElementRecord) -> String {
        match self {
            GroupBy::Type => n.element_type.clone(),
            GroupBy::Asil => n.asil.to_string(),
            GroupBy::Severity => n.sec.severity.to_string(),
            GroupBy::Exposure => n.sec.exposure.to_string(),
            GroupBy::Controllability => n.sec.controllability.to_string(),
        }
    }
}

impl FromStr for GroupBy {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "type" => Ok(GroupBy::Type),
            "asil" => Ok(GroupBy::Asil),
            "severity" => Ok(GroupBy::Severity),
            "exposure" => Ok(GroupBy::Exposure),
            "controllability" => Ok(GroupBy::Controllability),
            _ => Err(LayoutError::UnknownAttribute(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SizeBy {
    #[default]
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "degree")]
    Degree,
    #[serde(rename = "asil-rank")]
    AsilRank,
}

impl SizeBy {
    /// Radius multiplier for a node.
    pub fn scale(self, node: &ElementRecord, degree: usize) -> f64 {
        match self {
            SizeBy::Constant => 1.0,
            SizeBy::Degree => 1.0 + 0.1 * degree as f64,
            SizeBy::AsilRank => node.asil.rank().map_or(1.0, |r| 1.0 + 0.15 * f64::from(r)),
        }
    }
}

impl FromStr for SizeBy {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "constant" | "" => Ok(SizeBy::Constant),
            "degree" => Ok(SizeBy::Degree),
            "asil-rank" | "asil_rank" | "asilrank" | "asil" => Ok(SizeBy::AsilRank),
            _ => Err(LayoutError::UnknownSizeBy(s.to_string())),
        }
    }
}

impl fmt::Display for SizeBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeBy::Constant => "constant",
            SizeBy::Degree => "degree",
            SizeBy::AsilRank => "asil-rank",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Canvas {
    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub group_by: String,
    pub size_by: SizeBy,
    /// Not used by the layout itself; carried through to renderers.
    pub color_by: String,
    pub seed: u64,
    pub iterations: usize,
    pub base_radius: f64,
    pub group_padding: f64,
    pub canvas: Canvas,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            group_by: "type".to_string(),
            size_by: SizeBy::Constant,
            color_by: "asil".to_string(),
            seed: 0,
            iterations: 300,
            base_radius: 6.0,
            group_padding: 12.0,
            canvas: Canvas {
                width: 1000.0,
                height: 800.0,
            },
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.iterations < 1 {
            return Err(LayoutError::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.base_radius > 0.0 && self.base_radius.is_finite()) {
            return Err(LayoutError::InvalidConfig("base_radius must be positive".into()));
        }
        if !(self.group_padding >= 0.0 && self.group_padding.is_finite()) {
            return Err(LayoutError::InvalidConfig("group_padding must be non-negative".into()));
        }
        if !(self.canvas.width > 0.0 && self.canvas.height > 0.0) {
            return Err(LayoutError::InvalidConfig("canvas must have positive size".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Circle {
    x: f64,
    y: f64,
    r: f64,
}

impl Circle {
    fn center(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackMember {
    pub id: String,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackedGroup {
    /// Member circles in packing order (radius descending, id ascending),
    /// positioned relative to the enclosing circle's center.
    pub members: Vec<(String, Point, f64)>,
    pub radius: f64,
}

// Places `c` tangent to both `a` and `b`.
fn place(b: Circle, a: Circle, c: &mut Circle) {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let d2 = dx * dx + dy * dy;
    if d2 > 0.0 {
        let a2 = (a.r + c.r).powi(2);
        let b2 = (b.r + c.r).powi(2);
        if a2 > b2 {
            let x = (d2 + b2 - a2) / (2.0 * d2);
            let y = (b2 / d2 - x * x).max(0.0).sqrt();
            c.x = b.x - x * dx - y * dy;
            c.y = b.y - x * dy + y * dx;
        } else {
            let x = (d2 + a2 - b2) / (2.0 * d2);
            let y = (a2 / d2 - x * x).max(0.0).sqrt();
            c.x = a.x + x * dx - y * dy;
            c.y = a.y + x * dy + y * dx;
        }
    } else {
        c.x = a.x + c.r;
        c.y = a.y;
    }
}

fn intersects(a: Circle, b: Circle) -> bool {
    let dr = a.r + b.r - 1e-6;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr > 0.0 && dr * dr > dx * dx + dy * dy
}

/// Packs sibling circles without overlap around the origin; returns the
/// radius of the circle enclosing them.
fn pack_siblings(circles: &mut [Circle]) -> f64 {
    let n = circles.len();
    if n == 0 {
        return 0.0;
    }
    circles[0].x = 0.0;
    circles[0].y = 0.0;
    if n == 1 {
        return circles[0].r;
    }
    circles[0].x = -circles[1].r;
    circles[1].x = circles[0].r;
    circles[1].y = 0.0;
    if n == 2 {
        return circles[0].r + circles[1].r;
    }
    let (c0, c1) = (circles[0], circles[1]);
    place(c1, c0, &mut circles[2]);

    // front chain as a circular doubly linked list over circle indices
    let mut next = vec![0usize; n];
    let mut prev = vec![0usize; n];
    next[0] = 1;
    prev[2] = 1;
    next[1] = 2;
    prev[0] = 2;
    next[2] = 0;
    prev[1] = 0;
    let (mut a, mut b) = (0usize, 1usize);

    let score = |circles: &[Circle], next: &[usize], i: usize| {
        let p = circles[i];
        let q = circles[next[i]];
        let ab = p.r + q.r;
        let dx = (p.x * q.r + q.x * p.r) / ab;
        let dy = (p.y * q.r + q.y * p.r) / ab;
        dx * dx + dy * dy
    };

    let mut i = 3;
    'pack: while i < n {
        let (ca, cb) = (circles[a], circles[b]);
        place(ca, cb, &mut circles[i]);
        let c = circles[i];

        // nearest intersecting circle on the front chain, searching both ways
        let (mut j, mut k) = (next[b], prev[a]);
        let (mut sj, mut sk) = (circles[b].r, circles[a].r);
        loop {
            if sj <= sk {
                if intersects(circles[j], c) {
                    b = j;
                    next[a] = b;
                    prev[b] = a;
                    continue 'pack;
                }
                sj += circles[j].r;
                j = next[j];
            } else {
                if intersects(circles[k], c) {
                    a = k;
                    next[a] = b;
                    prev[b] = a;
                    continue 'pack;
                }
                sk += circles[k].r;
                k = prev[k];
            }
            if j == next[k] {
                break;
            }
        }

        prev[i] = a;
        next[i] = b;
        next[a] = i;
        prev[b] = i;
        b = i;

        let mut best = score(circles, &next, a);
        let mut cur = next[i];
        while cur != b {
            let s = score(circles, &next, cur);
            if s < best {
                a = cur;
                best = s;
            }
            cur = next[cur];
        }
        b = next[a];
        i += 1;
    }

    let mut chain = vec![circles[b]];
    let mut cur = next[b];
    while cur != b {
        chain.push(circles[cur]);
        cur = next[cur];
    }
    let e = enclose(&chain);
    for c in circles.iter_mut() {
        c.x -= e.x;
        c.y -= e.y;
    }
    e.r
}

fn encloses_not(a: Circle, b: Circle) -> bool {
    let dr = a.r - b.r;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr < 0.0 || dr * dr < dx * dx + dy * dy
}

fn encloses_weak(a: Circle, b: Circle) -> bool {
    let dr = a.r - b.r + a.r.max(b.r).max(1.0) * 1e-9;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr > 0.0 && dr * dr > dx * dx + dy * dy
}

fn encloses_weak_all(a: Circle, basis: &[Circle]) -> bool {
    basis.iter().all(|&b| encloses_weak(a, b))
}

fn enclose_basis2(a: Circle, b: Circle) -> Circle {
    let x21 = b.x - a.x;
    let y21 = b.y - a.y;
    let r21 = b.r - a.r;
    let l = (x21 * x21 + y21 * y21).sqrt();
    Circle {
        x: (a.x + b.x + x21 / l * r21) / 2.0,
        y: (a.y + b.y + y21 / l * r21) / 2.0,
        r: (l + a.r + b.r) / 2.0,
    }
}

fn enclose_basis3(a: Circle, b: Circle, c: Circle) -> Circle {
    let (x1, y1, r1) = (a.x, a.y, a.r);
    let (x2, y2, r2) = (b.x, b.y, b.r);
    let (x3, y3, r3) = (c.x, c.y, c.r);
    let a2 = x1 - x2;
    let a3 = x1 - x3;
    let b2 = y1 - y2;
    let b3 = y1 - y3;
    let c2 = r2 - r1;
    let c3 = r3 - r1;
    let d1 = x1 * x1 + y1 * y1 - r1 * r1;
    let d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
    let d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
    let ab = a3 * b2 - a2 * b3;
    let xa = (b2 * d3 - b3 * d2) / (ab * 2.0) - x1;
    let xb = (b3 * c2 - b2 * c3) / ab;
    let ya = (a3 * d2 - a2 * d3) / (ab * 2.0) - y1;
    let yb = (a2 * c3 - a3 * c2) / ab;
    let qa = xb * xb + yb * yb - 1.0;
    let qb = 2.0 * (r1 + xa * xb + ya * yb);
    let qc = xa * xa + ya * ya - r1 * r1;
    let r = -(if qa.abs() > 1e-6 {
        (qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
    } else {
        qc / qb
    });
    Circle {
        x: x1 + xa + xb * r,
        y: y1 + ya + yb * r,
        r,
    }
}

fn enclose_basis(basis: &[Circle]) -> Circle {
    match basis {
        [a] => *a,
        [a, b] => enclose_basis2(*a, *b),
        [a, b, c] => enclose_basis3(*a, *b, *c),
        _ => unreachable!("basis has one to three circles"),
    }
}

fn extend_basis(basis: &[Circle], p: Circle) -> Option<Vec<Circle>> {
    if encloses_weak_all(p, basis) {
        return Some(vec![p]);
    }
    for &bi in basis {
        if encloses_not(p, bi) && encloses_weak_all(enclose_basis2(bi, p), basis) {
            return Some(vec![bi, p]);
        }
    }
    for i in 0..basis.len().saturating_sub(1) {
        for j in i + 1..basis.len() {
            let (bi, bj) = (basis[i], basis[j]);
            if encloses_not(enclose_basis2(bi, bj), p)
                && encloses_not(enclose_basis2(bi, p), bj)
                && encloses_not(enclose_basis2(bj, p), bi)
                && encloses_weak_all(enclose_basis3(bi, bj, p), basis)
            {
                return Some(vec![bi, bj, p]);
            }
        }
    }
    None
}

/// Smallest circle enclosing all `circles` (move-to-front Welzl over a fixed
/// shuffle). Falls back to a centroid-based bound if the basis search fails
/// numerically; the result always contains every input circle.
fn enclose(circles: &[Circle]) -> Circle {
    let mut order = circles.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut basis: Vec<Circle> = Vec::new();
    let mut e: Option<Circle> = None;
    let mut i = 0;
    let mut failed = false;
    while i < order.len() {
        let p = order[i];
        if e.is_some_and(|e| encloses_weak(e, p)) {
            i += 1;
        } else {
            match extend_basis(&basis, p) {
                Some(b) => {
                    basis = b;
                    e = Some(enclose_basis(&basis));
                    i = 0;
                }
                None => {
                    failed = true;
                    break;
                }
            }
        }
    }
    let mut e = match (e, failed) {
        (Some(e), false) if e.r.is_finite() && e.x.is_finite() && e.y.is_finite() => e,
        _ => {
            let n = circles.len() as f64;
            let cx = circles.iter().map(|c| c.x).sum::<f64>() / n;
            let cy = circles.iter().map(|c| c.y).sum::<f64>() / n;
            Circle { x: cx, y: cy, r: 0.0 }
        }
    };
    let needed = circles
        .iter()
        .map(|c| e.center().distance(c.center()) + c.r)
        .fold(0.0, f64::max);
    e.r = e.r.max(needed);
    e
}

/// Packs one group's node circles. Members are placed in radius-descending,
/// id-ascending order so the result does not depend on input order.
pub fn pack_group(members: &[PackMember]) -> Result<PackedGroup, LayoutError> {
    if members.is_empty() {
        return Err(LayoutError::EmptyGroup);
    }
    if let Some(m) = members.iter().find(|m| !(m.radius > 0.0 && m.radius.is_finite())) {
        return Err(LayoutError::InvalidRadius {
            id: m.id.clone(),
            radius: m.radius,
        });
    }
    let mut ordered: Vec<&PackMember> = members.iter().collect();
    ordered.sort_by(|a, b| b.radius.total_cmp(&a.radius).then_with(|| a.id.cmp(&b.id)));
    let mut circles: Vec<Circle> = ordered
        .iter()
        .map(|m| Circle {
            x: 0.0,
            y: 0.0,
            r: m.radius,
        })
        .collect();
    let packed = pack_siblings(&mut circles);
    let radius = circles
        .iter()
        .map(|c| c.center().distance(Point::default()) + c.r)
        .fold(packed, f64::max);
    Ok(PackedGroup {
        members: ordered
            .iter()
            .zip(&circles)
            .map(|(m, c)| (m.id.clone(), c.center(), c.r))
            .collect(),
        radius,
    })
}

/// Pushes overlapping circles apart until no pair overlaps by more than the
/// collision tolerance. Pinned circles never move; two overlapping pinned
/// circles are left as they are.
fn resolve_collisions(centers: &mut [Point], radii: &[f64], pinned: &[bool]) {
    let n = centers.len();
    for _ in 0..MAX_COLLISION_PASSES {
        let mut moved = false;
        for i in 0..n {
            for j in i + 1..n {
                if pinned[i] && pinned[j] {
                    continue;
                }
                let mut dx = centers[j].x - centers[i].x;
                let mut dy = centers[j].y - centers[i].y;
                let mut d = dx.hypot(dy);
                let overlap = radii[i] + radii[j] - d;
                if overlap <= COLLISION_TOLERANCE {
                    continue;
                }
                if d < 1e-9 {
                    let angle = (i * 31 + j * 17) as f64 * 2.399_963_229_728_653;
                    dx = angle.cos();
                    dy = angle.sin();
                    d = 1.0;
                }
                let (ux, uy) = (dx / d, dy / d);
                let push = overlap + COLLISION_TOLERANCE;
                let (si, sj) = match (pinned[i], pinned[j]) {
                    (true, _) => (0.0, push),
                    (_, true) => (push, 0.0),
                    _ => (push / 2.0, push / 2.0),
                };
                centers[i].x -= ux * si;
                centers[i].y -= uy * si;
                centers[j].x += ux * sj;
                centers[j].y += uy * sj;
                moved = true;
            }
        }
        if !moved {
            return;
        }
    }
    tracing::warn!("collision resolution hit the pass limit");
}

/// Positions group circles: seeded ring start, `iterations` steps of pairwise
/// repulsion (∝ rᵢ·rⱼ/d²) and canvas centering with linearly decaying
/// strength, then hard collision resolution. Pinned groups stay where they are.
pub fn layout_groups(
    group_radii: &BTreeMap<String, f64>,
    config: &LayoutConfig,
    pinned: &BTreeMap<String, Point>,
) -> Result<BTreeMap<String, Point>, LayoutError> {
    config.validate()?;
    let keys: Vec<&String> = group_radii.keys().collect();
    let radii: Vec<f64> = group_radii.values().copied().collect();
    let fixed: Vec<bool> = keys.iter().map(|k| pinned.contains_key(*k)).collect();
    let free_count = fixed.iter().filter(|f| !**f).count();
    let center = config.canvas.center();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let phase = rng.gen::<f64>() * TAU;
    let ring = if free_count > 1 {
        radii.iter().sum::<f64>() / std::f64::consts::PI
    } else {
        0.0
    };
    let mut slot = 0;
    let mut pos: Vec<Point> = keys
        .iter()
        .map(|k| {
            if let Some(p) = pinned.get(*k) {
                return *p;
            }
            let angle = phase + TAU * slot as f64 / free_count as f64;
            slot += 1;
            let jitter = if free_count > 1 { rng.gen_range(-1.0..1.0) } else { 0.0 };
            Point::new(
                center.x + (ring + jitter) * angle.cos(),
                center.y + (ring + jitter) * angle.sin(),
            )
        })
        .collect();

    let n = pos.len();
    for step in 0..config.iterations {
        let alpha = 1.0 - step as f64 / config.iterations as f64;
        let mut disp = vec![Point::default(); n];
        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[j].x - pos[i].x;
                let dy = pos[j].y - pos[i].y;
                let d2 = (dx * dx + dy * dy).max(1e-6);
                let d = d2.sqrt();
                let f = REPULSION * radii[i] * radii[j] / d2;
                let (fx, fy) = (f * dx / d, f * dy / d);
                disp[i].x -= fx;
                disp[i].y -= fy;
                disp[j].x += fx;
                disp[j].y += fy;
            }
        }
        for i in 0..n {
            if fixed[i] {
                continue;
            }
            disp[i].x += CENTERING * (center.x - pos[i].x);
            disp[i].y += CENTERING * (center.y - pos[i].y);
            pos[i].x += alpha * disp[i].x;
            pos[i].y += alpha * disp[i].y;
        }
    }
    resolve_collisions(&mut pos, &radii, &fixed);
    Ok(keys.into_iter().cloned().zip(pos).collect())
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull in counter-clockwise order (monotone chain). Collinear points
/// are dropped, so a single point yields itself and a collinear set its two
/// extreme points.
pub fn compute_hull(points: &[Point]) -> Result<Vec<Point>, LayoutError> {
    if points.is_empty() {
        return Err(LayoutError::EmptyHull);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodePlacement {
    pub x: f64,
    pub y: f64,
    pub r: f64,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCircle {
    pub key: String,
    /// `"<key> (<member count>)"`.
    pub label: String,
    pub cx: f64,
    pub cy: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub member_ids: Vec<String>,
}

impl GroupCircle {
    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub project_id: String,
    pub group_by: String,
    pub color_by: String,
    pub seed: u64,
    pub nodes: BTreeMap<String, NodePlacement>,
    /// Sorted by key.
    pub groups: Vec<GroupCircle>,
    pub hulls: BTreeMap<String, Vec<Point>>,
}

impl LayoutResult {
    pub fn group(&self, key: &str) -> Option<&GroupCircle> {
        self.groups.iter().find(|g| g.key == key)
    }
}

fn node_hull(nodes: &[&NodePlacement]) -> Vec<Point> {
    let points: Vec<Point> = nodes
        .iter()
        .flat_map(|n| {
            (0..8).map(move |k| {
                let a = FRAC_PI_4 * f64::from(k);
                Point::new(n.x + n.r * a.cos(), n.y + n.r * a.sin())
            })
        })
        .collect();
    compute_hull(&points).expect("groups are non-empty")
}

/// Full node-link-group layout of one project. Groups named in `pinned` are
/// centered exactly at the given point; unknown keys are ignored.
pub fn layout_project(
    snapshot: &GraphSnapshot,
    config: &LayoutConfig,
    pinned: Option<&BTreeMap<String, Point>>,
) -> Result<LayoutResult, LayoutError> {
    config.validate()?;
    let group_by: GroupBy = config.group_by.parse()?;

    let mut partition: BTreeMap<String, Vec<PackMember>> = BTreeMap::new();
    for n in snapshot.nodes() {
        let degree = snapshot.degree(&n.id).expect("node from snapshot");
        partition.entry(group_by.key(n)).or_default().push(PackMember {
            id: n.id.clone(),
            radius: config.base_radius * config.size_by.scale(n, degree),
        });
    }
    let mut packed = BTreeMap::new();
    for (key, members) in &partition {
        packed.insert(key.clone(), pack_group(members)?);
    }
    let radii: BTreeMap<String, f64> = packed
        .iter()
        .map(|(k, p)| (k.clone(), p.radius + config.group_padding))
        .collect();
    let empty = BTreeMap::new();
    let pinned: BTreeMap<String, Point> = pinned
        .unwrap_or(&empty)
        .iter()
        .filter(|(k, _)| radii.contains_key(*k))
        .map(|(k, p)| (k.clone(), *p))
        .collect();
    let centers = layout_groups(&radii, config, &pinned)?;

    let mut nodes = BTreeMap::new();
    let mut groups = Vec::with_capacity(packed.len());
    let mut hulls = BTreeMap::new();
    for (key, pack) in &packed {
        let c = centers[key];
        for (id, local, r) in &pack.members {
            nodes.insert(
                id.clone(),
                NodePlacement {
                    x: c.x + local.x,
                    y: c.y + local.y,
                    r: *r,
                    group: key.clone(),
                },
            );
        }
        let mut member_ids: Vec<String> = pack.members.iter().map(|(id, _, _)| id.clone()).collect();
        member_ids.sort();
        let placed: Vec<&NodePlacement> = member_ids.iter().map(|id| &nodes[id]).collect();
        hulls.insert(key.clone(), node_hull(&placed));
        groups.push(GroupCircle {
            key: key.clone(),
            label: format!("{key} ({})", member_ids.len()),
            cx: c.x,
            cy: c.y,
            radius: radii[key],
            member_ids,
        });
    }
    Ok(LayoutResult {
        project_id: snapshot.project_id().to_string(),
        group_by: config.group_by.to_ascii_lowercase(),
        color_by: config.color_by.clone(),
        seed: config.seed,
        nodes,
        groups,
        hulls,
    })
}

/// Moves groups in every non-reference layout onto the reference's centers
/// for keys the reference has; remaining groups are pushed clear of
/// collisions. Applying it twice changes nothing further.
pub fn align_layouts(layouts: &[LayoutResult], reference: &str) -> Result<Vec<LayoutResult>, LayoutError> {
    let reference = layouts
        .iter()
        .find(|l| l.project_id == reference)
        .ok_or_else(|| LayoutError::UnknownReference(reference.to_string()))?;
    if let Some(other) = layouts.iter().find(|l| l.group_by != reference.group_by) {
        return Err(LayoutError::MismatchedGroupBy(
            reference.group_by.clone(),
            other.group_by.clone(),
        ));
    }
    Ok(layouts
        .iter()
        .map(|layout| {
            if layout.project_id == reference.project_id {
                return layout.clone();
            }
            let mut centers: Vec<Point> = Vec::with_capacity(layout.groups.len());
            let mut fixed = Vec::with_capacity(layout.groups.len());
            for g in &layout.groups {
                match reference.group(&g.key) {
                    Some(r) => {
                        centers.push(r.center());
                        fixed.push(true);
                    }
                    None => {
                        centers.push(g.center());
                        fixed.push(false);
                    }
                }
            }
            let radii: Vec<f64> = layout.groups.iter().map(|g| g.radius).collect();
            resolve_collisions(&mut centers, &radii, &fixed);
            translate_groups(layout, &centers)
        })
        .collect())
}

fn translate_groups(layout: &LayoutResult, centers: &[Point]) -> LayoutResult {
    let mut out = layout.clone();
    for (g, c) in out.groups.iter_mut().zip(centers) {
        let (dx, dy) = (c.x - g.cx, c.y - g.cy);
        g.cx = c.x;
        g.cy = c.y;
        for id in &g.member_ids {
            let n = out.nodes.get_mut(id).expect("member of layout");
            n.x += dx;
            n.y += dy;
        }
        if let Some(hull) = out.hulls.get_mut(&g.key) {
            for p in hull {
                p.x += dx;
                p.y += dy;
            }
        }
    }
    out
}
