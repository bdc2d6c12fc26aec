//! Two-sided checks of the scan verdict over a table corpus: an open
//! verdict must be backed by a certified period-4 orbit found by running
//! the map, an empty verdict must survive exact negative sampling, and
//! the zero-translation itineraries must be exactly the diagonal-ordered
//! traversals of the table's parallelogram vertex quadruples.

use obl_core::dynamics::{orbit, TangencyKind, Termination};
use obl_core::geometry::{BBox, Point, Polygon};
use obl_core::periodic::{cell_for_itinerary, period4_scan, translation_of, Itinerary, Verdict};
use obl_core::{Rat, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(vertices: &[(i64, i64)]) -> Polygon<Rat> {
    Polygon::new(
        vertices
            .iter()
            .map(|&(x, y)| Point::from_ints(x, y))
            .collect(),
    )
    .expect("valid table")
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::from_int(n) / Rat::from_int(d)
}

/// Convex hull of integer points (Andrew's monotone chain), returned
/// counterclockwise with collinear points dropped.
fn hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Five curated tables (both verdicts represented), four random
/// integer parallelograms, and twelve random integer convex hulls.
fn corpus() -> Vec<Polygon<Rat>> {
    let mut tables = vec![
        poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]),
        poly(&[(0, 0), (3, 0), (4, 1), (1, 1)]),
        poly(&[(0, 0), (2, 0), (3, 2), (0, 1)]),
        poly(&[(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)]),
        poly(&[(0, 0), (2, 0), (3, 1), (2, 2), (0, 2)]),
    ];
    tables.extend(random_parallelograms());
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    while tables.len() < 21 {
        let cloud: Vec<(i64, i64)> = (0..12)
            .map(|_| (rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
            .collect();
        let h = hull(cloud);
        if h.len() >= 3 {
            tables.push(poly(&h));
        }
    }
    tables
}

/// Random parallelograms `0, p, p + q, q` with positive determinant, so
/// the listed order is counterclockwise.
fn random_parallelograms() -> Vec<Polygon<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut out = Vec::new();
    while out.len() < 4 {
        let p = (rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4));
        let q = (rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4));
        if p.0 * q.1 - p.1 * q.0 > 0 {
            out.push(poly(&[(0, 0), p, (p.0 + q.0, p.1 + q.1), q]));
        }
    }
    out
}

fn scan_region(table: &Polygon<Rat>) -> BBox<Rat> {
    table.bbox().inflate(&Rat::from_int(3))
}

fn vertex_index(kind: &TangencyKind) -> usize {
    match kind {
        TangencyKind::Vertex { index } => *index,
        TangencyKind::Smooth { .. } => panic!("polygon tables support at vertices"),
    }
}

#[test]
fn curated_tables_pin_both_sides_of_the_dichotomy() {
    let open = [
        poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]),
        poly(&[(0, 0), (3, 0), (4, 1), (1, 1)]),
        poly(&[(0, 0), (2, 0), (3, 1), (2, 2), (0, 2)]),
    ];
    for table in &open {
        let outcome = period4_scan(table, &scan_region(table));
        assert_eq!(outcome.verdict, Verdict::OpenPeriod4Set);
    }
    // Affine images of the square behave like the square, so random
    // integer parallelograms must all land on the open side.
    for table in &random_parallelograms() {
        let outcome = period4_scan(table, &scan_region(table));
        assert_eq!(outcome.verdict, Verdict::OpenPeriod4Set);
    }

    let generic_quad = poly(&[(0, 0), (2, 0), (3, 2), (0, 1)]);
    let outcome = period4_scan(&generic_quad, &scan_region(&generic_quad));
    assert_eq!(outcome.verdict, Verdict::EmptyInterior);
    assert!(generic_quad.parallelogram_corners().is_empty());

    // The centrally symmetric hexagon is the sharp case: parallelogram
    // vertex quadruples exist, yet every zero-translation cell is empty.
    let hexagon = poly(&[(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)]);
    assert_eq!(hexagon.parallelogram_corners().len(), 3);
    let outcome = period4_scan(&hexagon, &scan_region(&hexagon));
    assert_eq!(outcome.verdict, Verdict::EmptyInterior);
    assert!(outcome.zero_translation.is_empty());
    assert!(outcome.nonempty > 0);
}

#[test]
fn zero_translation_itineraries_are_parallelogram_traversals() {
    for table in &corpus() {
        let n = table.len();
        let quads = table.parallelogram_corners();
        let zero = Point::new(Rat::from_int(0), Rat::from_int(0));
        let mut zero_count = 0usize;
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                for c in (0..n).filter(|&c| c != b) {
                    for d in (0..n).filter(|&d| d != c) {
                        let itin = Itinerary::new(vec![a, b, c, d], n).expect("valid itinerary");
                        if translation_of(table, &itin).expect("even length") != zero {
                            continue;
                        }
                        zero_count += 1;
                        let mut sorted = [a, b, c, d];
                        sorted.sort_unstable();
                        assert!(
                            sorted.windows(2).all(|w| w[0] != w[1]),
                            "zero translation needs four distinct tangency vertices"
                        );
                        assert!(
                            quads.contains(&sorted),
                            "zero-translation indices {sorted:?} must form a parallelogram"
                        );
                        // The itinerary must alternate between the two
                        // diagonals of the ascending representative.
                        let diagonal = [sorted[0], sorted[2]];
                        let even_positions = {
                            let mut s = [a, c];
                            s.sort_unstable();
                            s
                        };
                        let odd_positions = {
                            let mut s = [b, d];
                            s.sort_unstable();
                            s
                        };
                        assert!(
                            even_positions == diagonal || odd_positions == diagonal,
                            "itinerary {:?} does not pair the diagonals of {sorted:?}",
                            [a, b, c, d]
                        );
                    }
                }
            }
        }
        // Each parallelogram quadruple admits exactly eight traversals:
        // pick which diagonal sits on even positions, then order each
        // diagonal independently.
        assert_eq!(zero_count, 8 * quads.len());
    }
}

#[test]
fn open_verdicts_yield_certified_interior_period_4_orbits() {
    let mut certified = 0usize;
    for table in &corpus() {
        let region = scan_region(table);
        let outcome = period4_scan(table, &region);
        if outcome.verdict != Verdict::OpenPeriod4Set {
            continue;
        }
        assert!(!outcome.zero_translation.is_empty());
        for cell in &outcome.zero_translation {
            // The clipped closure has positive area, so the average of
            // its corners lies strictly inside the open cell.
            let len = Rat::from_int(cell.region.len() as i64);
            let mut acc = Point::new(Rat::from_int(0), Rat::from_int(0));
            for p in &cell.region {
                acc = acc.add(p);
            }
            let centroid = acc.scale(&(Rat::from_int(1) / len));
            assert!(cell.contains(&centroid), "centroid escapes its own cell");

            let sample = orbit(table, &centroid, 4);
            assert_eq!(sample.termination, Termination::Completed);
            assert_eq!(
                sample.points[4], sample.points[0],
                "zero-translation cell point must close up in four steps"
            );
            let followed: Vec<usize> = sample
                .tangencies
                .iter()
                .map(|t| vertex_index(&t.kind))
                .collect();
            assert_eq!(
                followed,
                cell.itinerary.entries(),
                "the orbit must follow the cell's own itinerary"
            );
            certified += 1;
        }
    }
    assert!(certified >= 8, "the corpus should certify many open cells");
}

#[test]
fn empty_verdicts_admit_no_completed_period_4_return() {
    // Strict cells are intersections of open half-planes, so they are
    // either empty or full-dimensional: when the verdict says every
    // zero-translation cell is empty, no regular sample can complete
    // four steps and land back on its start, exactly or otherwise.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut empties = 0usize;
    for table in &corpus() {
        let region = scan_region(table);
        let outcome = period4_scan(table, &region);
        if outcome.verdict != Verdict::EmptyInterior {
            continue;
        }
        empties += 1;
        let span = region.max.sub(&region.min);
        for _ in 0..200 {
            let jx = rng.gen_range(0i64..=997);
            let jy = rng.gen_range(0i64..=997);
            let z = Point::new(
                region.min.x.clone() + span.x.clone() * rat(jx, 997),
                region.min.y.clone() + span.y.clone() * rat(jy, 997),
            );
            let sample = orbit(table, &z, 4);
            if sample.termination != Termination::Completed {
                continue;
            }
            if sample.points[4] == sample.points[0] {
                // A regular exact return would sit in an open cell and
                // contradict the verdict; name the itinerary if it happens.
                let followed: Vec<usize> = sample
                    .tangencies
                    .iter()
                    .map(|t| vertex_index(&t.kind))
                    .collect();
                let itin = Itinerary::new(followed.clone(), table.len())
                    .expect("orbit itinerary is valid");
                let cell = cell_for_itinerary(table, &itin, &region).expect("even length");
                panic!(
                    "period-4 return at a regular point along {:?} (cell interior: {})",
                    followed,
                    cell.has_interior()
                );
            }
        }
    }
    assert!(empties >= 2, "the corpus should contain empty verdicts");
}
