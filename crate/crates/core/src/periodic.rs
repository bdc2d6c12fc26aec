//! Period-4 analysis for polygon tables, plus numerical periodic-orbit
//! tools: exact itinerary cells, the period-4 scan and its verdict,
//! seeded Monte Carlo measure estimation, and Gauss–Newton refinement of
//! periodic points on smooth tables.
//!
//! The exact machinery rests on one fact: on the set of exterior points
//! whose next `n` tangency vertices are a fixed sequence (an *itinerary*),
//! the `n`-fold outer map is a composition of point reflections — for even
//! `n` a translation by `2 * sum_k (-1)^(n-k) v_k`. The set itself is an
//! open convex cell cut out by strict half-plane constraints pulled back
//! through the reflections. A table therefore has an open set of period-4
//! points exactly when some zero-translation cell has nonempty interior,
//! which happens only when the four tangency vertices form a
//! parallelogram.
//!
//! Scans always run in exact rational arithmetic; float tables convert
//! losslessly, so the verdict never rests on float roundoff.

use crate::dynamics::{orbit, Table, Termination};
use crate::geometry::{
    clip_convex, polygon_area2, BBox, Ellipse, HalfPlane, Location, Point, Polygon,
};
use crate::scalar::{Rat, Scalar};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Errors from itinerary construction and the periodic-analysis entry
/// points.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicError {
    #[error("itinerary needs at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("itinerary repeats a vertex at consecutive positions {0} and {1}")]
    ConsecutiveRepeat(usize, usize),
    #[error("itinerary vertex index {index} out of range for a table with {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(
        "translation cells exist for even periods only (odd compositions are point reflections)"
    )]
    OddPeriod,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("sample area contains no exterior points")]
    EmptySampleArea,
}

/// A fixed sequence of tangency vertex indices; consecutive entries are
/// distinct (the outer map never supports at the same vertex twice in a
/// row).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Itinerary(Vec<usize>);

impl Itinerary {
    pub fn new(entries: Vec<usize>, table_len: usize) -> Result<Self, PeriodicError> {
        if entries.len() < 2 {
            return Err(PeriodicError::TooShort(entries.len()));
        }
        for (i, &e) in entries.iter().enumerate() {
            if e >= table_len {
                return Err(PeriodicError::IndexOutOfRange {
                    index: e,
                    len: table_len,
                });
            }
            if i > 0 && entries[i - 1] == e {
                return Err(PeriodicError::ConsecutiveRepeat(i - 1, i));
            }
        }
        Ok(Itinerary(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Period length; always at least 2 by construction.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Net translation of the `n`-fold map on a cell with this itinerary:
/// `2 * sum_k (-1)^(n-k) v_k`, which for `n = 4` reads
/// `2 (v2 + v4 - v1 - v3)`. Zero exactly when the ordered tangency
/// vertices form a parallelogram.
pub fn translation_of<S: Scalar>(
    table: &Polygon<S>,
    itin: &Itinerary,
) -> Result<Point<S>, PeriodicError> {
    let n = itin.len();
    if !n.is_multiple_of(2) {
        return Err(PeriodicError::OddPeriod);
    }
    let mut acc = Point::new(S::zero(), S::zero());
    for (k0, &idx) in itin.entries().iter().enumerate() {
        let v = table.vertex(idx);
        // 1-based position k = k0 + 1 carries sign (-1)^(n-k).
        if (n - (k0 + 1)).is_multiple_of(2) {
            acc = acc.add(v);
        } else {
            acc = acc.sub(v);
        }
    }
    Ok(acc.scale(&S::from_int(2)))
}

/// An itinerary cell: the set of start points whose next tangencies follow
/// the itinerary. Open and convex; `region` stores its closure clipped to
/// the scan region (counterclockwise, empty when the interior is empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Cell<S> {
    pub itinerary: Itinerary,
    /// Strict constraints `eval(z) > 0` defining the cell.
    pub halfplanes: Vec<HalfPlane<S>>,
    pub region: Vec<Point<S>>,
    /// Net translation of the composed map on this cell.
    pub translation: Point<S>,
}

impl<S: Scalar> Cell<S> {
    /// True when the open cell is nonempty within the scan region.
    pub fn has_interior(&self) -> bool {
        polygon_area2(&self.region) > S::zero()
    }

    /// Strict membership test against the half-plane constraints.
    pub fn contains(&self, z: &Point<S>) -> bool {
        self.halfplanes.iter().all(|hp| hp.eval(z) > S::zero())
    }
}

/// Builds the itinerary cell by pulling each step's tangency constraints
/// back to the start point through the intervening point reflections.
/// Along the itinerary the iterate is the affine image
/// `z_k = (-1)^k z + a_k` with `a_0 = 0`, `a_(k+1) = 2 v_k - a_k`, so each
/// constraint `cross(w - v, z_k - v) > 0` is a half-plane in `z`.
pub fn cell_for_itinerary<S: Scalar>(
    table: &Polygon<S>,
    itin: &Itinerary,
    region: &BBox<S>,
) -> Result<Cell<S>, PeriodicError> {
    let translation = translation_of(table, itin)?;
    let mut halfplanes = Vec::new();
    let mut a = Point::new(S::zero(), S::zero());
    for (k, &idx) in itin.entries().iter().enumerate() {
        let v = table.vertex(idx);
        for (j, w) in table.vertices().iter().enumerate() {
            if j == idx {
                continue;
            }
            let hp = if k % 2 == 0 {
                // z_k = z + a: constraint is left_of(v - a, w - a) in z.
                HalfPlane::left_of(&v.sub(&a), &w.sub(&a))
            } else {
                // z_k = a - z: the pullback flips orientation.
                HalfPlane::left_of(&a.sub(v), &a.sub(w))
            };
            halfplanes.push(hp);
        }
        a = Point::reflect_through(v, &a);
    }
    let mut clipped: Vec<Point<S>> = region.corners().to_vec();
    for hp in &halfplanes {
        if clipped.is_empty() {
            break;
        }
        clipped = clip_convex(&clipped, hp);
    }
    Ok(Cell {
        itinerary: itin.clone(),
        halfplanes,
        region: clipped,
        translation,
    })
}

/// Scan verdict for the period-4 set inside the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Some zero-translation cell has nonempty interior: an open set of
    /// period-4 points exists.
    OpenPeriod4Set,
    /// Every cell translates: the period-4 set has empty interior.
    EmptyInterior,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::OpenPeriod4Set => "open-period-4-set",
            Verdict::EmptyInterior => "empty-interior",
        })
    }
}

/// Outcome of an exact period-4 scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub cells_examined: usize,
    pub nonempty: usize,
    pub zero_translation: Vec<Cell<Rat>>,
    pub verdict: Verdict,
}

/// Enumerates all length-4 itineraries (consecutive entries distinct),
/// builds their cells over the region, and classifies. Exact: the verdict
/// is a theorem about the scanned region, not a float observation.
pub fn period4_scan(table: &Polygon<Rat>, region: &BBox<Rat>) -> ScanOutcome {
    let n = table.len();
    let mut candidates = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if b == a {
                continue;
            }
            for c in 0..n {
                if c == b {
                    continue;
                }
                for d in 0..n {
                    if d == c {
                        continue;
                    }
                    candidates.push(Itinerary(vec![a, b, c, d]));
                }
            }
        }
    }
    let cells: Vec<Cell<Rat>> = candidates
        .par_iter()
        .map(|itin| cell_for_itinerary(table, itin, region).expect("period 4 is even"))
        .collect();
    let nonempty = cells.iter().filter(|c| c.has_interior()).count();
    let zero = Point::new(Rat::zero(), Rat::zero());
    let zero_translation: Vec<Cell<Rat>> = cells
        .into_iter()
        .filter(|c| c.translation == zero && c.has_interior())
        .collect();
    let verdict = if zero_translation.is_empty() {
        Verdict::EmptyInterior
    } else {
        Verdict::OpenPeriod4Set
    };
    ScanOutcome {
        cells_examined: candidates.len(),
        nonempty,
        zero_translation,
        verdict,
    }
}

/// Where Monte Carlo samples are drawn from (table-interior points are
/// rejected and redrawn, so the effective region excludes the table).
#[derive(Debug, Clone, PartialEq)]
pub enum SampleArea {
    Box(BBox<f64>),
    Disk { center: Point<f64>, radius: f64 },
}

/// A measure estimate with its 95% Wilson confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOutcome {
    pub hits: u64,
    pub samples: u64,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Samples drawn per deterministic partition; fixed so results are
/// bit-for-bit reproducible for a given seed regardless of thread count.
const MEASURE_CHUNK: u64 = 4096;

/// Estimates the fraction of `area` (minus the table) whose points are
/// `period`-periodic: exact return in rational mode, return within `tol`
/// (euclidean) in float mode. Sampling is ChaCha8-seeded and partitioned;
/// partitions run in parallel and merge in index order.
pub fn measure_estimate<S: Scalar, T: Table<S> + Sync>(
    table: &T,
    area: &SampleArea,
    period: usize,
    tol: f64,
    samples: u64,
    seed: u64,
) -> Result<MeasureOutcome, PeriodicError> {
    if samples == 0 {
        return Err(PeriodicError::NoSamples);
    }
    let nchunks = samples.div_ceil(MEASURE_CHUNK);
    let hits: u64 = (0..nchunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * MEASURE_CHUNK;
            let count = MEASURE_CHUNK.min(samples - lo);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let mut hits = 0u64;
            for _ in 0..count {
                let Some(z) = draw_exterior(table, area, &mut rng) else {
                    continue;
                };
                let o = orbit(table, &z, period);
                if o.termination != Termination::Completed {
                    continue;
                }
                let last = o.points.last().expect("orbit keeps its start");
                let periodic = if S::EXACT {
                    *last == z
                } else {
                    let d = last.sub(&z);
                    (d.x.to_f64().powi(2) + d.y.to_f64().powi(2)).sqrt() <= tol
                };
                if periodic {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    let (wilson_low, wilson_high) = wilson_interval(hits, samples);
    Ok(MeasureOutcome {
        hits,
        samples,
        fraction,
        wilson_low,
        wilson_high,
    })
}

fn draw_exterior<S: Scalar, T: Table<S>>(
    table: &T,
    area: &SampleArea,
    rng: &mut ChaCha8Rng,
) -> Option<Point<S>> {
    for _ in 0..10_000 {
        let (x, y) = match area {
            SampleArea::Box(b) => (
                rng.gen_range(b.min.x..b.max.x),
                rng.gen_range(b.min.y..b.max.y),
            ),
            SampleArea::Disk { center, radius } => loop {
                let dx = rng.gen_range(-radius..*radius);
                let dy = rng.gen_range(-radius..*radius);
                if dx * dx + dy * dy <= radius * radius {
                    break (center.x + dx, center.y + dy);
                }
            },
        };
        let z = Point::new(S::from_f64_exact(x), S::from_f64_exact(y));
        if table.locate(&z) == Location::Exterior {
            return Some(z);
        }
    }
    None
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let z = 1.959963984540054_f64;
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - half) / denom).max(0.0),
        ((center + half) / denom).min(1.0),
    )
}

/// Result of smooth-table periodic refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub point: Point<f64>,
    /// Euclidean `|P^n(point) - point|`.
    pub residual: f64,
    pub iterations: usize,
    /// Set when the derivative of `P^n - Id` is (near-)singular at the
    /// output — on rotationally symmetric tables periodic points form
    /// curves and the normal direction alone is determined.
    pub degenerate: bool,
}

/// Errors from [`refine_periodic_smooth`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefineError {
    #[error("orbit left the map's domain during refinement")]
    OrbitFailed,
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Diverged { iterations: usize, residual: f64 },
}

/// Gauss–Newton refinement of `|P^n(z) - z|` on a smooth table, with
/// finite-difference derivatives, damping when the derivative is
/// near-singular, and backtracking. Never silently returns a
/// non-periodic point: the outcome carries the verified residual.
pub fn refine_periodic_smooth(
    table: &Ellipse,
    z0: &Point<f64>,
    period: usize,
) -> Result<RefineOutcome, RefineError> {
    let eval = |z: &Point<f64>| -> Option<Point<f64>> {
        let o = orbit(table, z, period);
        if o.termination != Termination::Completed {
            return None;
        }
        Some(o.points.last().expect("orbit keeps its start").sub(z))
    };
    let norm = |p: &Point<f64>| (p.x * p.x + p.y * p.y).sqrt();

    let mut z = z0.clone();
    let mut r = eval(&z).ok_or(RefineError::OrbitFailed)?;
    let mut degenerate = false;
    let target = |z: &Point<f64>| 1e-12 * (1.0 + norm(z));

    for it in 0..60 {
        // Finite-difference Jacobian of F = P^n - Id.
        let h = 1e-6 * (1.0 + norm(&z));
        let probe = |dx: f64, dy: f64| eval(&Point::new(z.x + dx, z.y + dy));
        let (fxp, fxm, fyp, fym) =
            match (probe(h, 0.0), probe(-h, 0.0), probe(0.0, h), probe(0.0, -h)) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => return Err(RefineError::OrbitFailed),
            };
        let j = [
            [(fxp.x - fxm.x) / (2.0 * h), (fyp.x - fym.x) / (2.0 * h)],
            [(fxp.y - fxm.y) / (2.0 * h), (fyp.y - fym.y) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let frob2 = j[0][0] * j[0][0] + j[0][1] * j[0][1] + j[1][0] * j[1][0] + j[1][1] * j[1][1];
        let near_singular = det.abs() <= 1e-6 * (1.0 + frob2);
        if near_singular {
            degenerate = true;
        }
        if norm(&r) <= target(&z) {
            return Ok(RefineOutcome {
                point: z,
                residual: norm(&r),
                iterations: it,
                degenerate,
            });
        }
        let step = if near_singular {
            // Damped normal equations: (J^T J + lambda I) s = -J^T r.
            let jtj = [
                [
                    j[0][0] * j[0][0] + j[1][0] * j[1][0],
                    j[0][0] * j[0][1] + j[1][0] * j[1][1],
                ],
                [
                    j[0][0] * j[0][1] + j[1][0] * j[1][1],
                    j[0][1] * j[0][1] + j[1][1] * j[1][1],
                ],
            ];
            let lambda = 1e-6 * (jtj[0][0] + jtj[1][1]) + 1e-12;
            let a = [
                [jtj[0][0] + lambda, jtj[0][1]],
                [jtj[1][0], jtj[1][1] + lambda],
            ];
            let rhs = [
                -(j[0][0] * r.x + j[1][0] * r.y),
                -(j[0][1] * r.x + j[1][1] * r.y),
            ];
            solve2(a, rhs)
        } else {
            solve2(j, [-r.x, -r.y])
        };
        let Some([sx, sy]) = step else {
            return Err(RefineError::Diverged {
                iterations: it,
                residual: norm(&r),
            });
        };
        // Backtrack until the residual decreases.
        let mut t = 1.0;
        let mut advanced = false;
        for _ in 0..25 {
            let cand = Point::new(z.x + t * sx, z.y + t * sy);
            if let Some(rc) = eval(&cand) {
                if norm(&rc) < norm(&r) {
                    z = cand;
                    r = rc;
                    advanced = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !advanced {
            return Err(RefineError::Diverged {
                iterations: it,
                residual: norm(&r),
            });
        }
    }
    let residual = norm(&r);
    if residual <= 1e-9 * (1.0 + norm(&z)) {
        Ok(RefineOutcome {
            point: z,
            residual,
            iterations: 60,
            degenerate,
        })
    } else {
        Err(RefineError::Diverged {
            iterations: 60,
            residual,
        })
    }
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use obl_cas::rational;

    fn rp(xn: i64, xd: i64, yn: i64, yd: i64) -> Point<Rat> {
        Point::new(rational(xn, xd), rational(yn, yd))
    }

    fn rat_poly(coords: &[(i64, i64)]) -> Polygon<Rat> {
        Polygon::new(
            coords
                .iter()
                .map(|&(x, y)| rp(x, 1, y, 1))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn rat_square() -> Polygon<Rat> {
        rat_poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])
    }

    fn itin(entries: &[usize], len: usize) -> Itinerary {
        Itinerary::new(entries.to_vec(), len).unwrap()
    }

    #[test]
    fn itinerary_validation() {
        assert_eq!(
            Itinerary::new(vec![1], 4).unwrap_err(),
            PeriodicError::TooShort(1)
        );
        assert_eq!(
            Itinerary::new(vec![1, 1, 2, 3], 4).unwrap_err(),
            PeriodicError::ConsecutiveRepeat(0, 1)
        );
        assert_eq!(
            Itinerary::new(vec![0, 4], 4).unwrap_err(),
            PeriodicError::IndexOutOfRange { index: 4, len: 4 }
        );
        assert!(Itinerary::new(vec![0, 1, 0, 1], 4).is_ok());
    }

    #[test]
    fn translation_examples() {
        let sq = rat_square();
        let t = translation_of(&sq, &itin(&[1, 2, 3, 0], 4)).unwrap();
        assert_eq!(t, rp(0, 1, 0, 1));
        let quad = rat_poly(&[(0, 0), (2, 0), (3, 2), (0, 1)]);
        let t = translation_of(&quad, &itin(&[0, 1, 2, 3], 4)).unwrap();
        assert_eq!(t, rp(-2, 1, -2, 1));
        // Period 2 translates by 2 (v2 - v1), never zero for distinct
        // vertices.
        let t = translation_of(&sq, &itin(&[0, 2], 4)).unwrap();
        assert_eq!(t, rp(2, 1, 2, 1));
        assert_eq!(
            translation_of(&sq, &itin(&[0, 1, 2], 4)).unwrap_err(),
            PeriodicError::OddPeriod
        );
    }

    #[test]
    fn corner_cell_contains_the_known_orbit_start() {
        let sq = rat_square();
        let region = sq.bbox().inflate(&rational(3, 1));
        let cell = cell_for_itinerary(&sq, &itin(&[1, 2, 3, 0], 4), &region).unwrap();
        assert_eq!(cell.translation, rp(0, 1, 0, 1));
        assert!(cell.has_interior());
        assert!(cell.contains(&rp(3, 10, -2, 5)));
        // A containing point's direct orbit follows the itinerary and
        // returns exactly.
        let o = orbit(&sq, &rp(3, 10, -2, 5), 4);
        assert_eq!(o.termination, Termination::Completed);
        assert_eq!(o.points[4], rp(3, 10, -2, 5));
    }

    #[test]
    fn reversed_corner_itinerary_gives_empty_cell() {
        let sq = rat_square();
        let region = sq.bbox().inflate(&rational(3, 1));
        let cell = cell_for_itinerary(&sq, &itin(&[0, 3, 2, 1], 4), &region).unwrap();
        assert!(!cell.has_interior());
    }

    #[test]
    fn scan_square_finds_open_period4_set() {
        let sq = rat_square();
        let region = sq.bbox().inflate(&rational(3, 1));
        let scan = period4_scan(&sq, &region);
        assert_eq!(scan.verdict, Verdict::OpenPeriod4Set);
        assert_eq!(scan.cells_examined, 108);
        assert!(!scan.zero_translation.is_empty());
        assert!(scan.nonempty >= scan.zero_translation.len());
        assert!(scan
            .zero_translation
            .iter()
            .any(|c| c.contains(&rp(3, 10, -2, 5))));
        for c in &scan.zero_translation {
            assert_eq!(c.translation, rp(0, 1, 0, 1));
            assert!(c.has_interior());
        }
    }

    #[test]
    fn scan_quad_reports_empty_interior() {
        let quad = rat_poly(&[(0, 0), (2, 0), (3, 2), (0, 1)]);
        let region = quad.bbox().inflate(&rational(3, 1));
        let scan = period4_scan(&quad, &region);
        assert_eq!(scan.verdict, Verdict::EmptyInterior);
        assert!(scan.zero_translation.is_empty());
        assert!(scan.nonempty > 0);
    }

    #[test]
    fn scan_parallelogram_reports_open_set() {
        let par = rat_poly(&[(0, 0), (3, 0), (4, 1), (1, 1)]);
        let region = par.bbox().inflate(&rational(3, 1));
        let scan = period4_scan(&par, &region);
        assert_eq!(scan.verdict, Verdict::OpenPeriod4Set);
    }

    #[test]
    fn measure_square_disk_is_all_periodic() {
        let sq = rat_square();
        let area = SampleArea::Disk {
            center: Point::new(0.5, -0.5),
            radius: 0.1,
        };
        let m = measure_estimate(&sq, &area, 4, 0.0, 512, 42).unwrap();
        assert_eq!(m.hits, 512);
        assert_eq!(m.fraction, 1.0);
        assert!(m.wilson_low > 0.99);
    }

    #[test]
    fn measure_quad_finds_nothing() {
        let quad = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(3.0, 2.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let area = SampleArea::Box(quad.bbox().inflate(&3.0));
        let m = measure_estimate(&quad, &area, 4, 1e-9, 2000, 7).unwrap();
        assert_eq!(m.hits, 0);
        assert_eq!(m.fraction, 0.0);
    }

    #[test]
    fn measure_is_reproducible_and_validates_samples() {
        let sq = rat_square();
        let area = SampleArea::Box(BBox {
            min: Point::new(-1.0, -1.0),
            max: Point::new(2.0, 2.0),
        });
        let a = measure_estimate(&sq, &area, 4, 0.0, 3000, 11).unwrap();
        let b = measure_estimate(&sq, &area, 4, 0.0, 3000, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.hits > 0 && a.hits < a.samples);
        assert!(a.wilson_low < a.fraction && a.fraction < a.wilson_high);
        assert_eq!(
            measure_estimate(&sq, &area, 4, 0.0, 0, 1).unwrap_err(),
            PeriodicError::NoSamples
        );
    }

    #[test]
    fn refine_circle_converges_onto_the_period4_ring() {
        let c = Ellipse::unit_circle();
        let out = refine_periodic_smooth(&c, &Point::new(1.5, 0.0), 4).unwrap();
        assert!(out.residual <= 1e-9, "residual {}", out.residual);
        let r = (out.point.x * out.point.x + out.point.y * out.point.y).sqrt();
        assert!((r - 2f64.sqrt()).abs() <= 1e-9, "radius {r}");
    }

    #[test]
    fn refine_on_the_ring_flags_degeneracy_immediately() {
        let c = Ellipse::unit_circle();
        let out = refine_periodic_smooth(&c, &Point::new(2f64.sqrt(), 0.0), 4).unwrap();
        assert!(out.residual <= 1e-12, "residual {}", out.residual);
        assert!(out.degenerate);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn refine_far_start_converges_or_reports_divergence() {
        let e = Ellipse::new(Point::new(0.0, 0.0), 2.0, 1.0).unwrap();
        match refine_periodic_smooth(&e, &Point::new(9.0, 4.0), 4) {
            Ok(out) => {
                assert!(out.residual <= 1e-9);
                // Verify the claim by direct iteration.
                let o = orbit(&e, &out.point, 4);
                assert_eq!(o.termination, Termination::Completed);
                let back = o.points.last().unwrap().sub(&out.point);
                assert!((back.x * back.x + back.y * back.y).sqrt() <= 1e-8);
            }
            Err(RefineError::Diverged { residual, .. }) => {
                assert!(residual > 1e-9);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
