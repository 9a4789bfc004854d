//! Exact integer geometry in the plane lattice.
//!
//! Points carry `i64` coordinates; every product is formed in `i128`. Polygon
//! constructors reject coordinates outside `±MAX_COORD`, which keeps doubled
//! areas inside `u64`. No floating point is used anywhere in this module.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest admissible absolute coordinate for polygon vertices.
pub const MAX_COORD: i64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("convex hull of an empty point set")]
    EmptyInput,
    #[error("coordinate {0} exceeds the supported range ±{MAX_COORD}")]
    CoordinateOutOfRange(i64),
    #[error("matrix {0:?} is not unimodular (determinant {1})")]
    NotUnimodular([[i64; 2]; 2], i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

/// Difference of two lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

pub const fn pt(x: i64, y: i64) -> LatticePoint {
    LatticePoint { x, y }
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl LatticeVector {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// gcd of the absolute components; zero only for the zero vector.
    pub fn lattice_length(self) -> u64 {
        self.x.unsigned_abs().gcd(&self.y.unsigned_abs())
    }

    /// The primitive vector pointing the same way. The zero vector maps to itself.
    pub fn primitive(self) -> LatticeVector {
        let g = self.lattice_length() as i64;
        if g == 0 {
            self
        } else {
            LatticeVector::new(self.x / g, self.y / g)
        }
    }

    /// Counterclockwise rotation by a quarter turn.
    pub fn rotate_ccw(self) -> LatticeVector {
        LatticeVector::new(-self.y, self.x)
    }

    pub fn is_parallel(self, other: LatticeVector) -> bool {
        cross(self, other) == 0
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.x)?;
        tup.serialize_element(&self.y)?;
        tup.end()
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        pt(self.x, self.y).serialize(serializer)
    }
}

impl Sub for LatticePoint {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticePoint) -> LatticeVector {
        LatticeVector::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<LatticeVector> for LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: LatticeVector) -> LatticePoint {
        LatticePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub<LatticeVector> for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: LatticeVector) -> LatticePoint {
        LatticePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-self.x, -self.y)
    }
}

/// The wedge product `a.x * b.y - a.y * b.x`.
pub fn cross(a: LatticeVector, b: LatticeVector) -> i128 {
    a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
}

/// Orientation of `r` relative to the directed line `p -> q`.
pub fn orient(p: LatticePoint, q: LatticePoint, r: LatticePoint) -> i128 {
    cross(q - p, r - p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSegment {
    pub a: LatticePoint,
    pub b: LatticePoint,
}

impl LatticeSegment {
    pub fn new(a: LatticePoint, b: LatticePoint) -> Self {
        Self { a, b }
    }

    /// Same segment with endpoints in ascending `(x, y)` order.
    pub fn normalized(self) -> Self {
        if self.a <= self.b {
            self
        } else {
            Self::new(self.b, self.a)
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn lattice_length(&self) -> u64 {
        (self.b - self.a).lattice_length()
    }

    pub fn is_vertical(&self) -> bool {
        self.a.x == self.b.x && self.a.y != self.b.y
    }

    /// Whether `p` lies on the closed segment.
    pub fn contains(&self, p: LatticePoint) -> bool {
        if orient(self.a, self.b, p) != 0 {
            return false;
        }
        p.x >= self.a.x.min(self.b.x)
            && p.x <= self.a.x.max(self.b.x)
            && p.y >= self.a.y.min(self.b.y)
            && p.y <= self.a.y.max(self.b.y)
    }

    /// All lattice points on the segment, from `a` to `b`.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let len = self.lattice_length() as i64;
        if len == 0 {
            return vec![self.a];
        }
        let step = (self.b - self.a).primitive();
        (0..=len)
            .map(|t| LatticePoint::new(self.a.x + t * step.x, self.a.y + t * step.y))
            .collect()
    }

    /// Common sub-segment of positive length of two collinear segments, if any.
    pub fn overlap(&self, other: &LatticeSegment) -> Option<LatticeSegment> {
        let dir = self.b - self.a;
        if dir.is_zero() || other.is_degenerate() {
            return None;
        }
        if orient(self.a, self.b, other.a) != 0 || orient(self.a, self.b, other.b) != 0 {
            return None;
        }
        let proj = |p: LatticePoint| {
            let v = p - self.a;
            v.x as i128 * dir.x as i128 + v.y as i128 * dir.y as i128
        };
        let (s0, s1) = (proj(self.a), proj(self.b));
        let (mut o0, mut o1) = (proj(other.a), proj(other.b));
        let (mut p0, mut p1) = (other.a, other.b);
        if o0 > o1 {
            std::mem::swap(&mut o0, &mut o1);
            std::mem::swap(&mut p0, &mut p1);
        }
        let lo = if o0 > s0 { p0 } else { self.a };
        let hi = if o1 < s1 { p1 } else { self.b };
        let (lo_t, hi_t) = (proj(lo), proj(hi));
        (lo_t < hi_t).then(|| LatticeSegment::new(lo, hi).normalized())
    }
}

/// Dimension tag of a convex lattice polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Point = 0,
    Segment = 1,
    Full = 2,
}

/// A convex lattice polygon, possibly degenerate.
///
/// Vertices are the extreme points only, listed counterclockwise and starting
/// at the lexicographically least one. A point has one vertex, a segment two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePolygon {
    vertices: Vec<LatticePoint>,
}

impl LatticePolygon {
    /// Hull of the given points, normalized to extreme-point CCW form.
    pub fn from_vertices(points: &[LatticePoint]) -> Result<Self, GeometryError> {
        convex_hull(points)
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn dim(&self) -> Dimension {
        match self.vertices.len() {
            1 => Dimension::Point,
            2 => Dimension::Segment,
            _ => Dimension::Full,
        }
    }

    /// Edges in CCW order. Segments yield their single edge twice (there and
    /// back), points yield nothing.
    pub fn edges(&self) -> Vec<LatticeSegment> {
        let n = self.vertices.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n)
            .map(|i| LatticeSegment::new(self.vertices[i], self.vertices[(i + 1) % n]))
            .collect()
    }

    pub fn translate(&self, t: LatticeVector) -> LatticePolygon {
        LatticePolygon {
            vertices: self.vertices.iter().map(|&p| p + t).collect(),
        }
    }

    /// Closed containment test.
    pub fn contains(&self, p: LatticePoint) -> bool {
        match self.dim() {
            Dimension::Point => self.vertices[0] == p,
            Dimension::Segment => LatticeSegment::new(self.vertices[0], self.vertices[1]).contains(p),
            Dimension::Full => self.edges().iter().all(|e| orient(e.a, e.b, p) >= 0),
        }
    }

    /// Strict interior test; always false for degenerate polygons.
    pub fn contains_strictly(&self, p: LatticePoint) -> bool {
        self.dim() == Dimension::Full && self.edges().iter().all(|e| orient(e.a, e.b, p) > 0)
    }

    pub fn min_x(&self) -> i64 {
        self.vertices.iter().map(|p| p.x).min().unwrap()
    }

    pub fn max_x(&self) -> i64 {
        self.vertices.iter().map(|p| p.x).max().unwrap()
    }

    /// Lowest and highest lattice ordinates of the polygon on the line `x = col`.
    pub fn column_range(&self, col: i64) -> Option<(i64, i64)> {
        if col < self.min_x() || col > self.max_x() {
            return None;
        }
        let mut lo: Option<BigRationalLite> = None;
        let mut hi: Option<BigRationalLite> = None;
        let mut push = |v: BigRationalLite| {
            if lo.is_none_or(|l| v.lt(&l)) {
                lo = Some(v);
            }
            if hi.is_none_or(|h| h.lt(&v)) {
                hi = Some(v);
            }
        };
        if self.vertices.len() == 1 {
            push(BigRationalLite::int(self.vertices[0].y));
        }
        for e in self.edges() {
            let (a, b) = (e.a, e.b);
            if a.x == b.x {
                if a.x == col {
                    push(BigRationalLite::int(a.y));
                    push(BigRationalLite::int(b.y));
                }
            } else if (a.x.min(b.x)..=a.x.max(b.x)).contains(&col) {
                // y = a.y + (col - a.x) * (b.y - a.y) / (b.x - a.x)
                let den = (b.x - a.x) as i128;
                let num = a.y as i128 * den + (col - a.x) as i128 * (b.y - a.y) as i128;
                push(BigRationalLite::new(num, den));
            }
        }
        let (lo, hi) = (lo?.ceil(), hi?.floor());
        (lo <= hi).then_some((lo, hi))
    }
}

/// Small exact rational with `i128` parts, only used for column slicing.
#[derive(Clone, Copy, Debug)]
struct BigRationalLite {
    num: i128,
    den: i128,
}

impl BigRationalLite {
    fn new(num: i128, den: i128) -> Self {
        if den < 0 {
            Self { num: -num, den: -den }
        } else {
            Self { num, den }
        }
    }

    fn int(v: i64) -> Self {
        Self { num: v as i128, den: 1 }
    }

    fn lt(&self, other: &Self) -> bool {
        self.num * other.den < other.num * self.den
    }

    fn ceil(&self) -> i64 {
        Integer::div_ceil(&self.num, &self.den) as i64
    }

    fn floor(&self) -> i64 {
        Integer::div_floor(&self.num, &self.den) as i64
    }
}

fn check_coords(points: &[LatticePoint]) -> Result<(), GeometryError> {
    for p in points {
        for c in [p.x, p.y] {
            if c.abs() > MAX_COORD {
                return Err(GeometryError::CoordinateOutOfRange(c));
            }
        }
    }
    Ok(())
}

/// Minimal convex polygon containing `points` (monotone chain).
pub fn convex_hull(points: &[LatticePoint]) -> Result<LatticePolygon, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    check_coords(points)?;
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(LatticePolygon { vertices: pts });
    }
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // All collinear: the chains collapse to the two extreme points.
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Ok(LatticePolygon { vertices: lower })
}

/// Twice the Euclidean area; zero for degenerate polygons.
pub fn lattice_area(p: &LatticePolygon) -> u64 {
    if p.dim() != Dimension::Full {
        return 0;
    }
    let v = p.vertices();
    let n = v.len();
    let twice: i128 = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
        })
        .sum();
    u64::try_from(twice).expect("CCW polygon has positive area within the coordinate bound")
}

pub fn lattice_length(s: &LatticeSegment) -> u64 {
    s.lattice_length()
}

/// Doubled area of the triangle spanned by three points.
pub fn triangle_area(a: LatticePoint, b: LatticePoint, c: LatticePoint) -> u64 {
    orient(a, b, c).unsigned_abs() as u64
}

pub fn minkowski_sum(p: &LatticePolygon, q: &LatticePolygon) -> LatticePolygon {
    let sums: Vec<LatticePoint> = p
        .vertices()
        .iter()
        .flat_map(|&a| q.vertices().iter().map(move |&b| LatticePoint::new(a.x + b.x, a.y + b.y)))
        .collect();
    convex_hull(&sums).expect("sum of nonempty polygons is nonempty and within range")
}

/// Mixed area normalized so that `mixed_area(P, P) == lattice_area(P)`, which
/// equals the number of roots of a generic system with these Newton polygons.
pub fn mixed_area(p: &LatticePolygon, q: &LatticePolygon) -> BigRational {
    let sum = lattice_area(&minkowski_sum(p, q)) as i128;
    let excess = sum - lattice_area(p) as i128 - lattice_area(q) as i128;
    BigRational::new(BigInt::from(excess), BigInt::from(2))
}

/// Boundary lattice points, counterclockwise from the lexicographically least
/// vertex. For a segment this is its lattice points in ascending order.
pub fn boundary_lattice_points(p: &LatticePolygon) -> Vec<LatticePoint> {
    match p.dim() {
        Dimension::Point => p.vertices().to_vec(),
        Dimension::Segment => LatticeSegment::new(p.vertices()[0], p.vertices()[1]).lattice_points(),
        Dimension::Full => {
            let mut out = Vec::new();
            for e in p.edges() {
                let mut pts = e.lattice_points();
                pts.pop();
                out.extend(pts);
            }
            out
        }
    }
}

/// Lattice points of the strict interior, sorted by `(x, y)`.
pub fn interior_lattice_points(p: &LatticePolygon) -> Vec<LatticePoint> {
    if p.dim() != Dimension::Full {
        return Vec::new();
    }
    lattice_points(p)
        .into_iter()
        .filter(|&q| p.contains_strictly(q))
        .collect()
}

/// All lattice points of the closed polygon, sorted by `(x, y)`.
pub fn lattice_points(p: &LatticePolygon) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for x in p.min_x()..=p.max_x() {
        if let Some((lo, hi)) = p.column_range(x) {
            out.extend((lo..=hi).map(|y| LatticePoint::new(x, y)));
        }
    }
    out
}

/// Whether every vertical line meets the polygon in nothing, a lattice point,
/// or a lattice segment.
///
/// This holds iff every non-vertical edge has primitive direction `(±1, b)`: a
/// column slice has lattice endpoints at every integer abscissa exactly when
/// each bounding edge advances one unit in `x` per lattice step.
pub fn is_h_transversal(p: &LatticePolygon) -> bool {
    p.edges().iter().all(|e| {
        let d = (e.b - e.a).primitive();
        d.x == 0 || d.x.abs() == 1
    })
}

/// Image of `p` under `v -> m * v + t` for a unimodular integer matrix `m`.
pub fn unimodular_apply(
    m: [[i64; 2]; 2],
    t: LatticeVector,
    p: &LatticePolygon,
) -> Result<LatticePolygon, GeometryError> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() != 1 {
        return Err(GeometryError::NotUnimodular(m, det));
    }
    let image: Vec<LatticePoint> = p
        .vertices()
        .iter()
        .map(|v| apply_point(m, t, *v))
        .collect();
    convex_hull(&image)
}

pub fn apply_point(m: [[i64; 2]; 2], t: LatticeVector, v: LatticePoint) -> LatticePoint {
    LatticePoint::new(m[0][0] * v.x + m[0][1] * v.y + t.x, m[1][0] * v.x + m[1][1] * v.y + t.y)
}
