//! Two-dimensional rate regions as canonical convex polygons.
//!
//! Every region handled by this crate is a convex subset of the nonnegative
//! quadrant that is *down-closed*: if `(a, b)` lies in the region, so does the
//! whole box `[0, a] × [0, b]`. Such a set is represented by its extreme
//! points, stored counterclockwise starting from the lexicographically
//! smallest vertex. Degenerate regions — the origin alone, or a segment along
//! an axis — use one or two vertices.
//!
//! Construction goes through convex hulls (monotone chain) and convex
//! clipping (Sutherland–Hodgman); both deduplicate and re-merge collinear
//! vertices so equal regions end up with identical vertex lists.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for merging vertices and for default membership tests.
pub const REGION_TOL: f64 = 1e-9;

/// Epsilon for orientation tests during hull construction and clipping.
const CROSS_EPS: f64 = 1e-12;

/// A point in the rate plane, in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    pub fn distance(&self, other: &RatePoint) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }
}

fn cross(o: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

fn point_segment_distance(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let dx = b.r1 - a.r1;
    let dy = b.r2 - a.r2;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&RatePoint::new(a.r1 + t * dx, a.r2 + t * dy))
}

/// Counterclockwise convex hull by monotone chain, starting at the
/// lexicographically smallest point. Collinear and near-duplicate vertices
/// are merged.
fn convex_hull(points: &[RatePoint]) -> Vec<RatePoint> {
    let mut pts: Vec<RatePoint> = points.to_vec();
    pts.sort_by(|a, b| {
        a.r1.partial_cmp(&b.r1).unwrap().then(a.r2.partial_cmp(&b.r2).unwrap())
    });
    pts.dedup_by(|a, b| a.distance(b) < CROSS_EPS);
    if pts.len() <= 1 {
        return pts;
    }

    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= CROSS_EPS
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= CROSS_EPS
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let mut hull = lower;
    hull.extend(upper);
    if hull.is_empty() {
        // All input points were collinear; keep the two extremes.
        hull.push(pts[0]);
        if pts.len() > 1 {
            hull.push(*pts.last().unwrap());
        }
    }
    merge_close_vertices(hull)
}

fn merge_close_vertices(mut hull: Vec<RatePoint>) -> Vec<RatePoint> {
    loop {
        let n = hull.len();
        if n <= 2 {
            if n == 2 && hull[0].distance(&hull[1]) < REGION_TOL {
                hull.pop();
            }
            return hull;
        }
        let mut removed = false;
        for i in 0..hull.len() {
            let n = hull.len();
            let prev = hull[(i + n - 1) % n];
            let next = hull[(i + 1) % n];
            if hull[i].distance(&prev) < REGION_TOL
                || point_segment_distance(hull[i], prev, next) < REGION_TOL
            {
                hull.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return rotate_to_canonical_start(hull);
        }
    }
}

fn rotate_to_canonical_start(mut hull: Vec<RatePoint>) -> Vec<RatePoint> {
    if hull.len() > 1 {
        let start = hull
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.r1.partial_cmp(&b.r1).unwrap().then(a.r2.partial_cmp(&b.r2).unwrap())
            })
            .map(|(i, _)| i)
            .unwrap();
        hull.rotate_left(start);
    }
    hull
}

/// Keeps the part of a (possibly open) vertex chain satisfying
/// `a·x + b·y ≤ c`, inserting the crossing points of the cycle's edges.
fn clip_by_line(pts: &[RatePoint], a: f64, b: f64, c: f64) -> Vec<RatePoint> {
    let side = |p: RatePoint| a * p.r1 + b * p.r2 - c;
    let mut out = Vec::new();
    for i in 0..pts.len() {
        let p = pts[i];
        let q = pts[(i + 1) % pts.len()];
        let sp = side(p);
        let sq = side(q);
        if sp <= CROSS_EPS {
            out.push(p);
        }
        if (sp > CROSS_EPS && sq < -CROSS_EPS) || (sp < -CROSS_EPS && sq > CROSS_EPS) {
            let t = sp / (sp - sq);
            out.push(RatePoint::new(p.r1 + t * (q.r1 - p.r1), p.r2 + t * (q.r2 - p.r2)));
        }
    }
    out
}

/// A closed half-plane `a·r1 + b·r2 ≤ c`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }
}

/// A convex, down-closed region of the nonnegative rate plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRegion {
    vertices: Vec<RatePoint>,
}

impl RateRegion {
    /// The region containing only the origin.
    pub fn origin() -> Self {
        Self { vertices: vec![RatePoint::new(0.0, 0.0)] }
    }

    /// Convex hull of the given points, assumed to generate a down-closed
    /// set (axis projections of every extreme point must be dominated).
    pub fn from_hull_points(points: &[RatePoint]) -> Self {
        if points.is_empty() {
            return Self::origin();
        }
        Self { vertices: convex_hull(points) }
    }

    /// Convex hull of the down-closure of the given achievable points: each
    /// point contributes its whole box `[0, r1] × [0, r2]`.
    pub fn down_set_hull(points: &[RatePoint]) -> Self {
        let mut all = vec![RatePoint::new(0.0, 0.0)];
        for p in points {
            let r1 = p.r1.max(0.0);
            let r2 = p.r2.max(0.0);
            all.push(RatePoint::new(r1, 0.0));
            all.push(RatePoint::new(0.0, r2));
            all.push(RatePoint::new(r1, r2));
        }
        Self::from_hull_points(&all)
    }

    /// The box `[0, a] × [0, b]`.
    pub fn rectangle(a: f64, b: f64) -> Self {
        Self::down_set_hull(&[RatePoint::new(a.max(0.0), b.max(0.0))])
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    /// Largest value of `d1·r1 + d2·r2` over the region.
    pub fn support(&self, d1: f64, d2: f64) -> f64 {
        self.vertices
            .iter()
            .map(|v| d1 * v.r1 + d2 * v.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r1(&self) -> f64 {
        self.support(1.0, 0.0)
    }

    pub fn max_r2(&self) -> f64 {
        self.support(0.0, 1.0)
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.support(1.0, 1.0)
    }

    /// Signed margin of `p`: positive strictly inside, negative outside,
    /// measured as a distance. For degenerate regions it is `−distance`.
    pub fn margin(&self, p: RatePoint) -> f64 {
        match self.vertices.len() {
            1 => -p.distance(&self.vertices[0]),
            2 => -point_segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                let mut m = f64::INFINITY;
                for i in 0..n {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    let len = a.distance(&b);
                    let signed = cross(a, b, p) / len;
                    m = m.min(signed);
                }
                m
            }
        }
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.margin(p) >= -tol
    }

    /// Euclidean distance from `p` to the region (0 if inside).
    pub fn distance_to(&self, p: RatePoint) -> f64 {
        match self.vertices.len() {
            1 => p.distance(&self.vertices[0]),
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                if self.margin(p) >= 0.0 {
                    return 0.0;
                }
                let mut d = f64::INFINITY;
                for i in 0..n {
                    d = d.min(point_segment_distance(
                        p,
                        self.vertices[i],
                        self.vertices[(i + 1) % n],
                    ));
                }
                d
            }
        }
    }

    /// Whether every point of `other` lies in `self` (within `tol`).
    pub fn contains_region(&self, other: &RateRegion, tol: f64) -> bool {
        other.vertices.iter().all(|&v| self.contains(v, tol))
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += a.r1 * b.r2 - b.r1 * a.r2;
        }
        acc / 2.0
    }

    /// Intersection of two regions.
    pub fn intersect(&self, other: &RateRegion) -> RateRegion {
        // Degenerate operands are points or axis segments of down-closed
        // sets, so the intersection reduces to clamping along the axes.
        if self.vertices.len() < 3 || other.vertices.len() < 3 {
            let (deg, full) =
                if self.vertices.len() < 3 { (self, other) } else { (other, self) };
            if deg.vertices.len() == 1 {
                return RateRegion::origin();
            }
            let end = deg.vertices[1];
            return if end.r2.abs() < REGION_TOL {
                // Horizontal segment [0, a] × {0}.
                RateRegion::from_hull_points(&[
                    RatePoint::new(0.0, 0.0),
                    RatePoint::new(end.r1.min(full.max_r1()), 0.0),
                ])
            } else {
                RateRegion::from_hull_points(&[
                    RatePoint::new(0.0, 0.0),
                    RatePoint::new(0.0, end.r2.min(full.max_r2())),
                ])
            };
        }
        let mut pts = self.vertices.clone();
        let n = other.vertices.len();
        for i in 0..n {
            let p = other.vertices[i];
            let q = other.vertices[(i + 1) % n];
            // Interior of a counterclockwise polygon is to the left of each
            // edge: (q−p) × (r−p) ≥ 0.
            let a = q.r2 - p.r2;
            let b = p.r1 - q.r1;
            let c = a * p.r1 + b * p.r2;
            pts = clip_by_line(&pts, a, b, c);
            if pts.is_empty() {
                return RateRegion::origin();
            }
        }
        RateRegion::from_hull_points(&pts)
    }

    /// Convex hull of the union of two regions.
    pub fn union_hull(&self, other: &RateRegion) -> RateRegion {
        let mut pts = self.vertices.clone();
        pts.extend_from_slice(&other.vertices);
        RateRegion::from_hull_points(&pts)
    }

    /// Convex hull of the union of many regions.
    pub fn union_hull_all<'a>(regions: impl IntoIterator<Item = &'a RateRegion>) -> RateRegion {
        let mut pts = Vec::new();
        for r in regions {
            pts.extend_from_slice(&r.vertices);
        }
        RateRegion::from_hull_points(&pts)
    }
}

/// Intersection of half-planes with the nonnegative quadrant.
///
/// `bound` must be large enough that the actual region fits in
/// `[0, bound]²`; any value at least the smallest single-rate constraint
/// works.
pub fn half_plane_region(constraints: &[HalfPlane], bound: f64) -> RateRegion {
    let m = bound.max(0.0);
    let mut pts = vec![
        RatePoint::new(0.0, 0.0),
        RatePoint::new(m, 0.0),
        RatePoint::new(m, m),
        RatePoint::new(0.0, m),
    ];
    for hp in constraints {
        pts = clip_by_line(&pts, hp.a, hp.b, hp.c);
        if pts.is_empty() {
            return RateRegion::origin();
        }
    }
    RateRegion::from_hull_points(&pts)
}

/// The polygon `{ r1 ≤ a, r2 ≤ b, r1 + r2 ≤ c }` in the nonnegative
/// quadrant, with no relation assumed between `a`, `b` and `c`.
pub fn bounded_rate_polygon(a: f64, b: f64, c: f64) -> RateRegion {
    let a = a.max(0.0);
    let b = b.max(0.0);
    let c = c.max(0.0);
    let mut pts = vec![
        RatePoint::new(0.0, 0.0),
        RatePoint::new(a.min(c), 0.0),
        RatePoint::new(0.0, b.min(c)),
    ];
    if c >= a {
        pts.push(RatePoint::new(a, (c - a).min(b)));
    }
    if c >= b {
        pts.push(RatePoint::new((c - b).min(a), b));
    }
    RateRegion::from_hull_points(&pts)
}

/// The pentagon `{ r1 ≤ a, r2 ≤ b, r1 + r2 ≤ c }` of a multiple access
/// channel, which requires `max(a, b) ≤ c ≤ a + b`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Pentagon {
    a: f64,
    b: f64,
    c: f64,
}

impl Pentagon {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if a < -REGION_TOL || b < -REGION_TOL {
            return Err(Error::InvalidArgument(format!(
                "negative single-rate bound in pentagon ({a}, {b}, {c})"
            )));
        }
        if c < a.max(b) - REGION_TOL || c > a + b + REGION_TOL {
            return Err(Error::InvalidArgument(format!(
                "sum-rate bound {c} outside [max({a}, {b}), {a} + {b}]"
            )));
        }
        Ok(Self {
            a: a.max(0.0),
            b: b.max(0.0),
            c: c.clamp(a.max(b).max(0.0), a + b),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn region(&self) -> RateRegion {
        bounded_rate_polygon(self.a, self.b, self.c)
    }
}
