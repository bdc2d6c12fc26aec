//! Planar primitives shared by the table-facing modules: points and boxes,
//! strictly convex polygons, axis-aligned ellipses, supporting-point
//! (tangency) queries, parallelogram-corner detection, and the small convex
//! clipping helpers used by the cell and singular-set builders.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * Polygons are stored counterclockwise; [`Point::cross`] and [`orient`]
//!   are positive on left turns.
//! * The tangency point for an exterior query `z` is the boundary point
//!   `tau` such that the table lies strictly to the left of the directed
//!   line `z -> tau`. For a polygon `tau` is a vertex; for an ellipse it is
//!   a boundary point at a parameter angle.
//! * A polygon tangency is *singular* when `z` lies on the extension of an
//!   edge line. The supporting line then meets the table along a whole
//!   edge, two vertices are simultaneously extremal, and the map or its
//!   inverse jumps across that ray; the dynamics layer refuses to step
//!   from such points.
//!
//! Everything polygon-shaped is generic over [`Scalar`], so the same code
//! runs in exact rational and in floating-point mode; degeneracy tests go
//! through [`Scalar::negligible_at`] with a squared length scale, which is
//! an exact zero test for rationals and a relative tolerance for floats.

use crate::scalar::Scalar;
use thiserror::Error;

/// Errors from table construction and tangency queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    /// A polygon table needs at least three vertices.
    #[error("a polygon table needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    /// Two vertices coincide; the second occurrence is reported.
    #[error("repeated vertex at index {0}")]
    RepeatedVertex(usize),
    /// The vertex list winds clockwise and reorientation was not allowed.
    #[error("vertices are ordered clockwise; enable reorientation to accept reversed input")]
    ClockwiseWinding,
    /// The boundary fails to turn strictly left at this vertex.
    #[error("polygon is not strictly convex at vertex {0}")]
    NotConvex(usize),
    /// A coordinate is infinite or NaN.
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    /// Tangency queries require the point strictly outside the table.
    #[error("point is not strictly outside the table")]
    PointNotOutside,
    /// Ellipse semi-axes must be positive finite numbers.
    #[error("ellipse semi-axes must be positive and finite")]
    InvalidAxes,
}

/// A point (or vector) in the plane over scalar `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    /// Point with integer coordinates, exact in both scalar modes.
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(S::from_int(x), S::from_int(y))
    }

    pub fn add(&self, o: &Self) -> Self {
        Point::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Point::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }

    pub fn neg(&self) -> Self {
        Point::new(S::zero() - self.x.clone(), S::zero() - self.y.clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        Point::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    /// 2D cross product `self.x * o.y - self.y * o.x`; positive when `o`
    /// points to the left of `self`.
    pub fn cross(&self, o: &Self) -> S {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn midpoint(a: &Self, b: &Self) -> Self {
        let half = S::one() / S::from_int(2);
        a.add(b).scale(&half)
    }

    /// Point reflection `z -> 2 c - z`, the building block of the outer map.
    pub fn reflect_through(center: &Self, z: &Self) -> Self {
        center.scale(&S::from_int(2)).sub(z)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<S: Scalar> std::fmt::Display for Point<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Orientation test: positive when `a -> b -> c` turns left.
pub fn orient<S: Scalar>(a: &Point<S>, b: &Point<S>, c: &Point<S>) -> S {
    b.sub(a).cross(&c.sub(a))
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct BBox<S> {
    pub min: Point<S>,
    pub max: Point<S>,
}

impl<S: Scalar> BBox<S> {
    /// Tight box of a nonempty point collection.
    pub fn of_points<'a, I: IntoIterator<Item = &'a Point<S>>>(points: I) -> Self
    where
        S: 'a,
    {
        let mut it = points.into_iter();
        let first = it.next().expect("bounding box of an empty point set");
        let mut min = first.clone();
        let mut max = first.clone();
        for p in it {
            if p.x < min.x {
                min.x = p.x.clone();
            }
            if p.y < min.y {
                min.y = p.y.clone();
            }
            if p.x > max.x {
                max.x = p.x.clone();
            }
            if p.y > max.y {
                max.y = p.y.clone();
            }
        }
        BBox { min, max }
    }

    /// Squared diagonal length; the length scale used by tolerance tests.
    pub fn diag_sq(&self) -> S {
        self.max.sub(&self.min).norm_sq()
    }

    /// Box scaled about its center by `factor`.
    pub fn inflate(&self, factor: &S) -> Self {
        let center = Point::midpoint(&self.min, &self.max);
        let half = self.max.sub(&center).scale(factor);
        BBox {
            min: center.sub(&half),
            max: center.add(&half),
        }
    }

    /// Closed containment test.
    pub fn contains(&self, z: &Point<S>) -> bool {
        self.min.x <= z.x && z.x <= self.max.x && self.min.y <= z.y && z.y <= self.max.y
    }

    /// Corners in counterclockwise order starting at `min`.
    pub fn corners(&self) -> [Point<S>; 4] {
        [
            self.min.clone(),
            Point::new(self.max.x.clone(), self.min.y.clone()),
            self.max.clone(),
            Point::new(self.min.x.clone(), self.max.y.clone()),
        ]
    }
}

/// Where a query point sits relative to a closed convex table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Tangency answer for a polygon table: the supporting vertex, plus a flag
/// marking queries that lie on an edge-line extension, where the supporting
/// line touches a whole edge and the dynamics is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonTangency<S> {
    /// Index of the supporting vertex in the table's vertex list.
    pub index: usize,
    /// The supporting vertex itself.
    pub tau: Point<S>,
    /// True when the query sits on an edge-line extension. `tau` is then
    /// the deterministic representative (largest clearance, then lowest
    /// index), reported for diagnostics only.
    pub singular: bool,
}

/// A strictly convex polygon stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<S> {
    vertices: Vec<Point<S>>,
    bbox: BBox<S>,
    reoriented: bool,
}

impl<S: Scalar> Polygon<S> {
    /// Validates and stores a vertex list. Rejects short, repeated,
    /// non-convex, and clockwise input.
    pub fn new(vertices: Vec<Point<S>>) -> Result<Self, GeomError> {
        Self::build(vertices, false)
    }

    /// Like [`Polygon::new`], but accepts clockwise input by reversing it;
    /// [`Polygon::reoriented`] reports when that happened.
    pub fn new_reorienting(vertices: Vec<Point<S>>) -> Result<Self, GeomError> {
        Self::build(vertices, true)
    }

    fn build(mut vertices: Vec<Point<S>>, allow_reorient: bool) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::TooFewVertices(n));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeomError::NonFinite(i));
            }
        }
        for j in 1..n {
            for i in 0..j {
                if vertices[i] == vertices[j] {
                    return Err(GeomError::RepeatedVertex(j));
                }
            }
        }
        let mut reoriented = false;
        if polygon_area2(&vertices) < S::zero() {
            if !allow_reorient {
                return Err(GeomError::ClockwiseWinding);
            }
            vertices.reverse();
            reoriented = true;
        }
        let bbox = BBox::of_points(&vertices);
        let scale = bbox.diag_sq();
        for i in 0..n {
            let prev = &vertices[(i + n - 1) % n];
            let next = &vertices[(i + 1) % n];
            let turn = orient(prev, &vertices[i], next);
            if turn.negligible_at(&scale) || turn < S::zero() {
                return Err(GeomError::NotConvex(i));
            }
        }
        Ok(Polygon {
            vertices,
            bbox,
            reoriented,
        })
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertex by index, wrapping modulo the vertex count.
    pub fn vertex(&self, i: usize) -> &Point<S> {
        &self.vertices[i % self.vertices.len()]
    }

    pub fn bbox(&self) -> &BBox<S> {
        &self.bbox
    }

    /// True when the input wound clockwise and was reversed on load.
    pub fn reoriented(&self) -> bool {
        self.reoriented
    }

    /// Squared length scale for tolerance tests involving `z`: comfortably
    /// larger than any cross product formed from table vertices and `z`.
    pub fn scale_sq_at(&self, z: &Point<S>) -> S {
        (self.bbox.diag_sq() + z.norm_sq()) * S::from_int(2)
    }

    /// Classifies a point against the closed table.
    pub fn locate(&self, z: &Point<S>) -> Location {
        let scale = self.scale_sq_at(z);
        let n = self.vertices.len();
        let mut on_boundary = false;
        for i in 0..n {
            let o = orient(&self.vertices[i], &self.vertices[(i + 1) % n], z);
            if o.negligible_at(&scale) {
                on_boundary = true;
            } else if o < S::zero() {
                return Location::Exterior;
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Supporting vertex for an exterior point under the counterclockwise
    /// convention: the unique vertex `v` with every other vertex strictly
    /// to the left of the ray `z -> v`. Queries on an edge-line extension
    /// have no such vertex or reach it only in the limit; they are
    /// reported with `singular = true`.
    pub fn tangency(&self, z: &Point<S>) -> Result<PolygonTangency<S>, GeomError> {
        if self.locate(z) != Location::Exterior {
            return Err(GeomError::PointNotOutside);
        }
        let scale = self.scale_sq_at(z);
        let n = self.vertices.len();

        // Clearance of candidate v: the least cross product (z->v) x (z->w)
        // over other vertices w. The supporting vertex is the one with
        // strictly positive clearance.
        let mut strict: Option<usize> = None;
        let mut best: Option<(usize, S)> = None;
        for i in 0..n {
            let vi = self.vertices[i].sub(z);
            let mut worst: Option<S> = None;
            for (j, w) in self.vertices.iter().enumerate() {
                if j == i {
                    continue;
                }
                let c = vi.cross(&w.sub(z));
                if worst.as_ref().is_none_or(|m| c < *m) {
                    worst = Some(c);
                }
            }
            let worst = worst.expect("polygon has at least 3 vertices");
            if strict.is_none() && worst > S::zero() && !worst.negligible_at(&scale) {
                strict = Some(i);
            }
            if best.as_ref().is_none_or(|(_, b)| worst > *b) {
                best = Some((i, worst));
            }
        }

        // Singular exactly when z sits on an edge-line extension: the two
        // edge endpoints are then collinear with z and the supporting line
        // contains the whole edge.
        let mut singular = false;
        for i in 0..n {
            let c = self.vertices[i]
                .sub(z)
                .cross(&self.vertices[(i + 1) % n].sub(z));
            if c.negligible_at(&scale) {
                singular = true;
                break;
            }
        }

        let index = match strict {
            Some(i) => i,
            None => {
                // No strict winner: z is on a singular ray and two adjacent
                // vertices tie. Report the greatest-clearance, lowest-index
                // candidate so output stays deterministic.
                singular = true;
                best.expect("nonempty candidate list").0
            }
        };
        Ok(PolygonTangency {
            index,
            tau: self.vertices[index].clone(),
            singular,
        })
    }

    /// All cyclically ordered 4-tuples of distinct vertex indices whose
    /// corners form a parallelogram (`v_a + v_c = v_b + v_d`), one
    /// representative per rotation class, in ascending index order. The
    /// test is exact for rationals and allows a relative slack of about
    /// 1e-6 of the diameter for floats.
    pub fn parallelogram_corners(&self) -> Vec<[usize; 4]> {
        let n = self.vertices.len();
        let scale = self.bbox.diag_sq();
        let mut found = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let dx = self.vertices[a].x.clone() + self.vertices[c].x.clone()
                            - self.vertices[b].x.clone()
                            - self.vertices[d].x.clone();
                        let dy = self.vertices[a].y.clone() + self.vertices[c].y.clone()
                            - self.vertices[b].y.clone()
                            - self.vertices[d].y.clone();
                        // The defects are linear in the coordinates, so
                        // square them before the quadratic-scale test.
                        if (dx.clone() * dx).negligible_at(&scale)
                            && (dy.clone() * dy).negligible_at(&scale)
                        {
                            found.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        found
    }
}

/// The half-plane `a x + b y + c >= 0` (closed; callers that need open
/// cells test interiors via positive area after clipping).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlane<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Scalar> HalfPlane<S> {
    /// Half-plane of points to the left of the directed line `p -> q`;
    /// its boundary value at `z` equals `cross(q - p, z - p)`.
    pub fn left_of(p: &Point<S>, q: &Point<S>) -> Self {
        HalfPlane {
            a: p.y.clone() - q.y.clone(),
            b: q.x.clone() - p.x.clone(),
            c: p.x.clone() * q.y.clone() - p.y.clone() * q.x.clone(),
        }
    }

    pub fn eval(&self, z: &Point<S>) -> S {
        self.a.clone() * z.x.clone() + self.b.clone() * z.y.clone() + self.c.clone()
    }
}

/// Clips a convex polygon against one closed half-plane
/// (Sutherland–Hodgman step). Returns the kept boundary, possibly empty;
/// consecutive duplicate vertices are merged.
pub fn clip_convex<S: Scalar>(region: &[Point<S>], hp: &HalfPlane<S>) -> Vec<Point<S>> {
    if region.is_empty() {
        return Vec::new();
    }
    let n = region.len();
    let mut out: Vec<Point<S>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = &region[i];
        let nxt = &region[(i + 1) % n];
        let ec = hp.eval(cur);
        let en = hp.eval(nxt);
        let cin = ec >= S::zero();
        let nin = en >= S::zero();
        if cin {
            out.push(cur.clone());
        }
        if cin != nin {
            // Boundary crossing at cur + t (nxt - cur), t = ec / (ec - en).
            let t = ec.clone() / (ec - en);
            out.push(cur.add(&nxt.sub(cur).scale(&t)));
        }
    }
    dedup_cyclic(out)
}

fn dedup_cyclic<S: Scalar>(mut pts: Vec<Point<S>>) -> Vec<Point<S>> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    pts
}

/// Twice the signed area of a polygon (shoelace); positive when
/// counterclockwise.
pub fn polygon_area2<S: Scalar>(pts: &[Point<S>]) -> S {
    let n = pts.len();
    let mut acc = S::zero();
    for i in 0..n {
        acc = acc + pts[i].cross(&pts[(i + 1) % n]);
    }
    acc
}

/// Clips the parametric line `origin + t * dir` against a convex region,
/// starting from the parameter interval `[lo, hi]` where `None` means
/// unbounded on that side. Returns the surviving `(t_min, t_max)` with
/// `t_min <= t_max`, or `None` when the line misses the region.
pub fn clip_line<S: Scalar>(
    origin: &Point<S>,
    dir: &Point<S>,
    region: &[Point<S>],
    lo: Option<S>,
    hi: Option<S>,
) -> Option<(S, S)> {
    if region.len() < 3 {
        return None;
    }
    let mut lo = lo;
    let mut hi = hi;
    let n = region.len();
    for i in 0..n {
        let hp = HalfPlane::left_of(&region[i], &region[(i + 1) % n]);
        // Along the line the constraint reads e0 + t * de >= 0.
        let e0 = hp.eval(origin);
        let de = hp.a.clone() * dir.x.clone() + hp.b.clone() * dir.y.clone();
        if de == S::zero() {
            if e0 < S::zero() {
                return None;
            }
            continue;
        }
        let bound = (S::zero() - e0) / de.clone();
        if de > S::zero() {
            // t >= bound
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h| bound < *h) {
            // t <= bound
            hi = Some(bound);
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l <= h => Some((l, h)),
        // A line through a bounded region always picks up both bounds.
        _ => None,
    }
}

/// An oriented segment, used for clipped singular rays and renders.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub a: Point<S>,
    pub b: Point<S>,
}

/// An affine plane map `z -> linear z + shift`; used by the equivariance
/// checks and by test conjugations.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<S> {
    pub linear: [[S; 2]; 2],
    pub shift: Point<S>,
}

impl<S: Scalar> Affine<S> {
    pub fn identity() -> Self {
        Affine {
            linear: [[S::one(), S::zero()], [S::zero(), S::one()]],
            shift: Point::new(S::zero(), S::zero()),
        }
    }

    pub fn translation(shift: Point<S>) -> Self {
        Affine {
            linear: [[S::one(), S::zero()], [S::zero(), S::one()]],
            shift,
        }
    }

    pub fn apply(&self, z: &Point<S>) -> Point<S> {
        Point::new(
            self.linear[0][0].clone() * z.x.clone()
                + self.linear[0][1].clone() * z.y.clone()
                + self.shift.x.clone(),
            self.linear[1][0].clone() * z.x.clone()
                + self.linear[1][1].clone() * z.y.clone()
                + self.shift.y.clone(),
        )
    }

    pub fn det(&self) -> S {
        self.linear[0][0].clone() * self.linear[1][1].clone()
            - self.linear[0][1].clone() * self.linear[1][0].clone()
    }
}

/// Tangency answer for a smooth (ellipse) table: the parameter angle and
/// the boundary point there.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseTangency {
    pub angle: f64,
    pub tau: Point<f64>,
}

/// An axis-aligned ellipse, parametrized counterclockwise as
/// `center + (a cos t, b sin t)`. Smooth tables run in float mode only.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipse {
    pub center: Point<f64>,
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    pub fn new(center: Point<f64>, a: f64, b: f64) -> Result<Self, GeomError> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 && center.is_finite()) {
            return Err(GeomError::InvalidAxes);
        }
        Ok(Ellipse { center, a, b })
    }

    pub fn unit_circle() -> Self {
        Ellipse {
            center: Point::new(0.0, 0.0),
            a: 1.0,
            b: 1.0,
        }
    }

    /// Boundary point at parameter angle `t`.
    pub fn point_at(&self, t: f64) -> Point<f64> {
        Point::new(
            self.center.x + self.a * t.cos(),
            self.center.y + self.b * t.sin(),
        )
    }

    /// Derivative of [`Ellipse::point_at`]; points counterclockwise.
    pub fn tangent_at(&self, t: f64) -> Point<f64> {
        Point::new(-self.a * t.sin(), self.b * t.cos())
    }

    pub fn bbox(&self) -> BBox<f64> {
        BBox {
            min: Point::new(self.center.x - self.a, self.center.y - self.b),
            max: Point::new(self.center.x + self.a, self.center.y + self.b),
        }
    }

    /// Classifies a point by the rescaled radius `|((x-cx)/a, (y-cy)/b)|`.
    pub fn locate(&self, z: &Point<f64>) -> Location {
        let d2 = self.rescaled(z).norm_sq();
        if (d2 - 1.0).abs() <= 1e-12 * (1.0 + d2) {
            Location::Boundary
        } else if d2 < 1.0 {
            Location::Interior
        } else {
            Location::Exterior
        }
    }

    fn rescaled(&self, z: &Point<f64>) -> Point<f64> {
        Point::new(
            (z.x - self.center.x) / self.a,
            (z.y - self.center.y) / self.b,
        )
    }

    /// Signed tangency defect `(p(t) - z) x p'(t)`; the supporting angle
    /// under the counterclockwise convention is its zero with the tangent
    /// pointing from `z` toward the table.
    pub fn tangency_defect(&self, z: &Point<f64>, t: f64) -> f64 {
        self.point_at(t).sub(z).cross(&self.tangent_at(t))
    }

    /// Supporting point for an exterior query. Rescaling by the semi-axes
    /// maps the problem to a unit circle and transfers the parameter angle
    /// exactly, so the circle formula gives the answer analytically; a
    /// safeguarded Newton iteration on the tangency defect then polishes
    /// it to 1e-13 relative in the angle.
    pub fn tangency(&self, z: &Point<f64>) -> Result<EllipseTangency, GeomError> {
        let w = self.rescaled(z);
        let d2 = w.norm_sq();
        if self.locate(z) != Location::Exterior {
            return Err(GeomError::PointNotOutside);
        }
        // Circle case from the rescaled point: the two tangent angles are
        // atan2(w) +- acos(1/d); the counterclockwise convention (table on
        // the left of z -> tau) selects the plus sign.
        let d = d2.sqrt();
        let beta = w.y.atan2(w.x);
        let alpha = (1.0 / d).acos();
        let angle = self.polish_angle(z, beta + alpha);
        Ok(EllipseTangency {
            angle,
            tau: self.point_at(angle),
        })
    }

    fn polish_angle(&self, z: &Point<f64>, t0: f64) -> f64 {
        let g = |t: f64| self.tangency_defect(z, t);
        // g'(t) = (p - z) x p'' with p'' = -(p - center).
        let dg = |t: f64| {
            let p = self.point_at(t);
            p.sub(z).cross(&self.center.sub(&p))
        };
        // Below this, the defect is rounding noise and the angle is as good
        // as float evaluation of g can certify.
        let defect_floor = {
            let p = self.point_at(t0);
            32.0 * f64::EPSILON
                * (p.sub(z).norm_sq().sqrt() * self.tangent_at(t0).norm_sq().sqrt()).max(1.0)
        };
        // Bracket around the transferred circle angle; widen a few times if
        // rounding at extreme aspect ratios pushed the root outside.
        let mut width = 1e-3;
        let (mut lo, mut hi) = (t0 - width, t0 + width);
        let mut tries = 0;
        while g(lo) * g(hi) > 0.0 {
            tries += 1;
            if tries > 20 {
                return t0; // defect is flat zero across the bracket
            }
            width *= 4.0;
            lo = t0 - width;
            hi = t0 + width;
        }
        let mut x = t0;
        let mut glo = g(lo);
        for _ in 0..60 {
            let fx = g(x);
            if fx.abs() <= defect_floor {
                return x;
            }
            if fx * glo < 0.0 {
                hi = x;
            } else {
                lo = x;
                glo = fx;
            }
            let d = dg(x);
            let mut next = x - fx / d;
            if !(next.is_finite() && next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-13 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use obl_cas::rational;

    fn pt(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn square() -> Polygon<f64> {
        Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]).unwrap()
    }

    fn rat_point(xn: i64, xd: i64, yn: i64, yd: i64) -> Point<Rat> {
        Point::new(rational(xn, xd), rational(yn, yd))
    }

    fn rat_square() -> Polygon<Rat> {
        Polygon::new(vec![
            rat_point(0, 1, 0, 1),
            rat_point(1, 1, 0, 1),
            rat_point(1, 1, 1, 1),
            rat_point(0, 1, 1, 1),
        ])
        .unwrap()
    }

    #[test]
    fn validation_accepts_square_and_rejects_bad_input() {
        assert!(Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0)]).is_ok());
        assert_eq!(
            Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0)]).unwrap_err(),
            GeomError::TooFewVertices(2)
        );
        assert_eq!(
            Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 0.0), pt(0.0, 1.0)]).unwrap_err(),
            GeomError::RepeatedVertex(2)
        );
        // Reflex vertex at index 2.
        assert_eq!(
            Polygon::new(vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, 0.1), pt(0.0, 1.0)]).unwrap_err(),
            GeomError::NotConvex(2)
        );
        // Three collinear vertices are not strictly convex.
        assert_eq!(
            Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0), pt(0.0, 1.0)]).unwrap_err(),
            GeomError::NotConvex(1)
        );
        assert_eq!(
            Polygon::new(vec![pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0), pt(1.0, 0.0)]).unwrap_err(),
            GeomError::ClockwiseWinding
        );
    }

    #[test]
    fn reorientation_reverses_clockwise_input() {
        let p =
            Polygon::new_reorienting(vec![pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0), pt(1.0, 0.0)])
                .unwrap();
        assert!(p.reoriented());
        assert!(polygon_area2(p.vertices()) > 0.0);
        // Same tangency behavior as the counterclockwise square.
        let t = p.tangency(&pt(0.3, -0.4)).unwrap();
        assert_eq!(t.tau, pt(1.0, 0.0));
        let ccw = square();
        assert!(!ccw.reoriented());
    }

    #[test]
    fn locate_classifies_points() {
        let sq = square();
        assert_eq!(sq.locate(&pt(0.5, 0.5)), Location::Interior);
        assert_eq!(sq.locate(&pt(0.5, 0.0)), Location::Boundary);
        assert_eq!(sq.locate(&pt(1.0, 1.0)), Location::Boundary);
        assert_eq!(sq.locate(&pt(0.3, -0.4)), Location::Exterior);
        // On an edge-line extension but outside the edge: exterior.
        assert_eq!(sq.locate(&pt(2.0, 0.0)), Location::Exterior);
    }

    #[test]
    fn square_tangency_picks_supporting_vertex() {
        let sq = square();
        let t = sq.tangency(&pt(0.3, -0.4)).unwrap();
        assert_eq!(
            (t.index, t.tau.clone(), t.singular),
            (1, pt(1.0, 0.0), false)
        );
        let t = sq.tangency(&pt(1.7, 0.4)).unwrap();
        assert_eq!(
            (t.index, t.tau.clone(), t.singular),
            (2, pt(1.0, 1.0), false)
        );
        // Non-singular answers have every other vertex strictly left.
        for (probe, idx) in [(pt(0.3, -0.4), 1), (pt(1.7, 0.4), 2), (pt(-0.3, 0.4), 0)] {
            let t = sq.tangency(&probe).unwrap();
            assert_eq!(t.index, idx);
            for (j, w) in sq.vertices().iter().enumerate() {
                if j != t.index {
                    assert!(t.tau.sub(&probe).cross(&w.sub(&probe)) > 0.0);
                }
            }
        }
    }

    #[test]
    fn edge_line_extensions_are_singular() {
        let sq = square();
        // Forward extension of the bottom edge: the supporting vertex is
        // clean but the inverse map jumps across the ray.
        let t = sq.tangency(&pt(2.0, 0.0)).unwrap();
        assert!(t.singular);
        assert_eq!(t.index, 2);
        // Backward extension: two adjacent vertices tie for support.
        let t = sq.tangency(&pt(-1.0, 0.0)).unwrap();
        assert!(t.singular);
        assert_eq!(t.index, 0);
        let t = sq.tangency(&pt(1.0, -1.0)).unwrap();
        assert!(t.singular);
        assert_eq!(t.index, 1);
        // A diagonal through two opposite vertices is not a supporting
        // line, so it is not singular.
        let t = sq.tangency(&pt(2.0, 2.0)).unwrap();
        assert!(!t.singular);
        assert_eq!(t.index, 3);
    }

    #[test]
    fn tangency_rejects_non_exterior_points() {
        let sq = square();
        assert_eq!(
            sq.tangency(&pt(0.5, 0.5)).unwrap_err(),
            GeomError::PointNotOutside
        );
        assert_eq!(
            sq.tangency(&pt(0.5, 0.0)).unwrap_err(),
            GeomError::PointNotOutside
        );
        assert_eq!(
            sq.tangency(&pt(1.0, 1.0)).unwrap_err(),
            GeomError::PointNotOutside
        );
    }

    #[test]
    fn exact_mode_tangency_matches_float() {
        let sq = rat_square();
        let t = sq.tangency(&rat_point(3, 10, -2, 5)).unwrap();
        assert_eq!(t.index, 1);
        assert!(!t.singular);
        let t = sq.tangency(&rat_point(2, 1, 0, 1)).unwrap();
        assert!(t.singular);
        assert_eq!(t.index, 2);
        assert_eq!(
            sq.tangency(&rat_point(1, 2, 1, 2)).unwrap_err(),
            GeomError::PointNotOutside
        );
    }

    #[test]
    fn parallelogram_corners_finds_rotation_classes() {
        assert_eq!(square().parallelogram_corners(), vec![[0, 1, 2, 3]]);
        let quad =
            Polygon::new(vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(3.0, 2.0), pt(0.0, 1.0)]).unwrap();
        assert!(quad.parallelogram_corners().is_empty());

        let r = 3f64.sqrt() / 2.0;
        let hex = Polygon::new(vec![
            pt(1.0, 0.0),
            pt(0.5, r),
            pt(-0.5, r),
            pt(-1.0, 0.0),
            pt(-0.5, -r),
            pt(0.5, -r),
        ])
        .unwrap();
        // Antipodal pairs: three parallelogram classes.
        assert_eq!(
            hex.parallelogram_corners(),
            vec![[0, 1, 3, 4], [0, 2, 3, 5], [1, 2, 4, 5]]
        );

        let exact = rat_square();
        assert_eq!(exact.parallelogram_corners(), vec![[0, 1, 2, 3]]);
    }

    #[test]
    fn bbox_inflate_and_contains() {
        let sq = square();
        let grown = sq.bbox().inflate(&3.0);
        assert_eq!(grown.min, pt(-1.0, -1.0));
        assert_eq!(grown.max, pt(2.0, 2.0));
        assert!(grown.contains(&pt(2.0, -1.0)));
        assert!(!grown.contains(&pt(2.1, 0.0)));
        assert_eq!(sq.bbox().diag_sq(), 2.0);
    }

    #[test]
    fn clip_convex_against_halfplane() {
        let sq = square();
        // Keep x >= 1/2.
        let hp = HalfPlane {
            a: 1.0,
            b: 0.0,
            c: -0.5,
        };
        let clipped = clip_convex(sq.vertices(), &hp);
        assert_eq!(polygon_area2(&clipped), 1.0);
        // Keep x >= 2: empty.
        let hp = HalfPlane {
            a: 1.0,
            b: 0.0,
            c: -2.0,
        };
        assert!(clip_convex(sq.vertices(), &hp).is_empty());
        // left_of evaluates the edge cross product.
        let hp = HalfPlane::left_of(&pt(0.0, 0.0), &pt(1.0, 0.0));
        assert_eq!(hp.eval(&pt(0.3, 0.7)), 0.7);
        assert!(hp.eval(&pt(0.3, -0.4)) < 0.0);
    }

    #[test]
    fn clip_line_intersects_region() {
        let sq = square();
        // Horizontal line through the middle.
        let (t0, t1) = clip_line(&pt(-1.0, 0.5), &pt(1.0, 0.0), sq.vertices(), None, None).unwrap();
        assert_eq!((t0, t1), (1.0, 2.0));
        // Ray starting inside.
        let (t0, t1) =
            clip_line(&pt(0.5, 0.5), &pt(1.0, 0.0), sq.vertices(), Some(0.0), None).unwrap();
        assert_eq!((t0, t1), (0.0, 0.5));
        // Line missing the region.
        assert!(clip_line(&pt(-1.0, 5.0), &pt(1.0, 0.0), sq.vertices(), None, None).is_none());
        // Parallel line outside.
        assert!(clip_line(&pt(-1.0, -1.0), &pt(1.0, 0.0), sq.vertices(), None, None).is_none());
    }

    #[test]
    fn affine_apply_and_det() {
        let m = Affine {
            linear: [[2.0, 1.0], [0.0, 1.0]],
            shift: pt(3.0, -1.0),
        };
        assert_eq!(m.apply(&pt(1.0, 1.0)), pt(6.0, 0.0));
        assert_eq!(m.det(), 2.0);
        assert_eq!(Affine::<f64>::identity().apply(&pt(0.3, 0.4)), pt(0.3, 0.4));
        assert_eq!(
            Affine::translation(pt(1.0, 2.0)).apply(&pt(0.0, 0.0)),
            pt(1.0, 2.0)
        );
    }

    #[test]
    fn circle_tangency_matches_analytic_values() {
        let c = Ellipse::unit_circle();
        let t = c.tangency(&pt(2.0, 0.0)).unwrap();
        assert!((t.angle - std::f64::consts::FRAC_PI_3).abs() < 1e-13);
        assert!((t.tau.x - 0.5).abs() < 1e-13);
        assert!((t.tau.y - 3f64.sqrt() / 2.0).abs() < 1e-13);
        let t = c.tangency(&pt(0.0, 2.0)).unwrap();
        assert!((t.tau.x + 3f64.sqrt() / 2.0).abs() < 1e-13);
        assert!((t.tau.y - 0.5).abs() < 1e-13);
    }

    #[test]
    fn ellipse_tangency_solves_defect_with_left_convention() {
        let e = Ellipse::new(Point::new(0.0, 0.0), 2.0, 1.0).unwrap();
        // Rescaling (4,0) by the axes gives circle distance 2, angle pi/3.
        let t = e.tangency(&pt(4.0, 0.0)).unwrap();
        assert!((t.tau.x - 1.0).abs() < 1e-12);
        assert!((t.tau.y - 3f64.sqrt() / 2.0).abs() < 1e-12);
        // Off-axis query: defect vanishes and the tangent points from z
        // toward the table (left convention).
        let z = pt(3.0, 2.5);
        let t = e.tangency(&z).unwrap();
        assert!(e.tangency_defect(&z, t.angle).abs() < 1e-12);
        assert!(t.tau.sub(&z).dot(&e.tangent_at(t.angle)) > 0.0);
    }

    #[test]
    fn ellipse_rejects_inside_boundary_and_bad_axes() {
        let c = Ellipse::unit_circle();
        assert_eq!(
            c.tangency(&pt(0.5, 0.0)).unwrap_err(),
            GeomError::PointNotOutside
        );
        assert_eq!(
            c.tangency(&pt(1.0, 0.0)).unwrap_err(),
            GeomError::PointNotOutside
        );
        assert_eq!(c.locate(&pt(0.5, 0.0)), Location::Interior);
        assert_eq!(c.locate(&pt(1.0, 0.0)), Location::Boundary);
        assert_eq!(c.locate(&pt(2.0, 0.0)), Location::Exterior);
        assert!(Ellipse::new(Point::new(0.0, 0.0), 0.0, 1.0).is_err());
        assert!(Ellipse::new(Point::new(0.0, 0.0), 2.0, -1.0).is_err());
    }
}
