//! Table files: a small JSON format with two coordinate styles.
//!
//! ```json
//! {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}
//! {"type": "ellipse", "center": [0, 0], "semi_axes": [2, 1]}
//! ```
//!
//! Coordinates are either plain JSON numbers or strings of the form
//! `"p/q"`; a file must use one style throughout. String coordinates ask
//! for exact rational arithmetic. Plain numbers default to exact mode too
//! when they are all integer-valued (the promotion is lossless); otherwise
//! the table runs in float mode. An explicit mode request can override
//! this, except that exact mode refuses non-integer numbers (write them as
//! `"p/q"` instead — the float value `0.1` is not the rational `1/10`) and
//! ellipse tables always run in float mode.

use crate::geometry::{Ellipse, GeomError, Point, Polygon};
use crate::scalar::{Rat, Scalar};
use serde::Deserialize;
use thiserror::Error;

/// Arithmetic mode a loaded table runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// Requested mode; `Auto` picks exact when lossless, float otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeRequest {
    #[default]
    Auto,
    Exact,
    Float,
}

/// Load-time options.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub mode: ModeRequest,
    /// Accept clockwise vertex lists by reversing them (flagged on the
    /// loaded table) instead of rejecting the file.
    pub reorient: bool,
}

/// A validated table together with its arithmetic mode.
///
/// One value exists per process invocation, so the size spread between the
/// variants is irrelevant and no boxing is done.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum LoadedTable {
    ExactPolygon(Polygon<Rat>),
    FloatPolygon(Polygon<f64>),
    Ellipse(Ellipse),
}

impl LoadedTable {
    pub fn mode(&self) -> Mode {
        match self {
            LoadedTable::ExactPolygon(_) => Mode::Exact,
            _ => Mode::Float,
        }
    }

    /// True when the vertex list wound clockwise and was reversed on load.
    pub fn reoriented(&self) -> bool {
        match self {
            LoadedTable::ExactPolygon(p) => p.reoriented(),
            LoadedTable::FloatPolygon(p) => p.reoriented(),
            LoadedTable::Ellipse(_) => false,
        }
    }
}

/// Errors from table loading.
#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read table file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed table file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("table mixes plain numbers and \"p/q\" strings; use one coordinate style throughout")]
    MixedCoordinateStyles,
    #[error("invalid rational literal {0:?} (expected \"p/q\" with q != 0)")]
    BadRational(String),
    #[error(
        "exact mode needs \"p/q\" strings or integer coordinates, found {0} \
         (write it as a rational string)"
    )]
    InexactCoordinate(f64),
    #[error("ellipse tables run in float mode only")]
    EllipseExactUnsupported,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoord {
    Num(f64),
    Str(String),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawTable {
    Polygon {
        vertices: Vec<[RawCoord; 2]>,
    },
    Ellipse {
        center: [RawCoord; 2],
        semi_axes: [RawCoord; 2],
    },
}

/// One coordinate style for the whole file.
enum CoordStyle {
    Numbers,
    Ratios,
}

fn classify<'a, I: Iterator<Item = &'a RawCoord>>(mut coords: I) -> Result<CoordStyle, TableError> {
    let first = match coords.next() {
        Some(RawCoord::Num(_)) => CoordStyle::Numbers,
        Some(RawCoord::Str(_)) => CoordStyle::Ratios,
        None => CoordStyle::Numbers,
    };
    for c in coords {
        let same = matches!(
            (&first, c),
            (CoordStyle::Numbers, RawCoord::Num(_)) | (CoordStyle::Ratios, RawCoord::Str(_))
        );
        if !same {
            return Err(TableError::MixedCoordinateStyles);
        }
    }
    Ok(first)
}

fn as_rat(c: &RawCoord) -> Result<Rat, TableError> {
    match c {
        RawCoord::Num(x) => {
            if x.fract() == 0.0 && x.is_finite() {
                Ok(Rat::from_f64_exact(*x))
            } else {
                Err(TableError::InexactCoordinate(*x))
            }
        }
        RawCoord::Str(s) => {
            obl_cas::parse_rational(s).ok_or_else(|| TableError::BadRational(s.clone()))
        }
    }
}

fn as_f64(c: &RawCoord) -> Result<f64, TableError> {
    match c {
        RawCoord::Num(x) => Ok(*x),
        RawCoord::Str(s) => obl_cas::parse_rational(s)
            .map(|r| Scalar::to_f64(&r))
            .ok_or_else(|| TableError::BadRational(s.clone())),
    }
}

/// Parses and validates a table from JSON text.
pub fn load_table_str(src: &str, opts: &LoadOptions) -> Result<LoadedTable, TableError> {
    let raw: RawTable = serde_json::from_str(src)?;
    match raw {
        RawTable::Polygon { vertices } => {
            let style = classify(vertices.iter().flatten())?;
            let exact = match (opts.mode, style) {
                (ModeRequest::Float, _) => false,
                (ModeRequest::Exact, _) | (_, CoordStyle::Ratios) => true,
                (ModeRequest::Auto, CoordStyle::Numbers) => vertices
                    .iter()
                    .flatten()
                    .all(|c| matches!(c, RawCoord::Num(x) if x.fract() == 0.0 && x.is_finite())),
            };
            if exact {
                let pts = vertices
                    .iter()
                    .map(|[x, y]| Ok(Point::new(as_rat(x)?, as_rat(y)?)))
                    .collect::<Result<Vec<_>, TableError>>()?;
                Ok(LoadedTable::ExactPolygon(build_polygon(pts, opts)?))
            } else {
                let pts = vertices
                    .iter()
                    .map(|[x, y]| Ok(Point::new(as_f64(x)?, as_f64(y)?)))
                    .collect::<Result<Vec<_>, TableError>>()?;
                Ok(LoadedTable::FloatPolygon(build_polygon(pts, opts)?))
            }
        }
        RawTable::Ellipse { center, semi_axes } => {
            let style = classify(center.iter().chain(semi_axes.iter()))?;
            if opts.mode == ModeRequest::Exact || matches!(style, CoordStyle::Ratios) {
                return Err(TableError::EllipseExactUnsupported);
            }
            let [cx, cy] = center;
            let [a, b] = semi_axes;
            let e = Ellipse::new(
                Point::new(as_f64(&cx)?, as_f64(&cy)?),
                as_f64(&a)?,
                as_f64(&b)?,
            )?;
            Ok(LoadedTable::Ellipse(e))
        }
    }
}

/// Reads and validates a table file.
pub fn load_table_path(
    path: &std::path::Path,
    opts: &LoadOptions,
) -> Result<LoadedTable, TableError> {
    load_table_str(&std::fs::read_to_string(path)?, opts)
}

fn build_polygon<S: Scalar>(
    pts: Vec<Point<S>>,
    opts: &LoadOptions,
) -> Result<Polygon<S>, GeomError> {
    if opts.reorient {
        Polygon::new_reorienting(pts)
    } else {
        Polygon::new(pts)
    }
}

/// Lossless exact copy of a float polygon (every finite float is a
/// rational). Validation cannot fail: the float polygon's strict
/// convexity margins carry over exactly.
pub fn polygon_to_exact(p: &Polygon<f64>) -> Polygon<Rat> {
    let pts = p
        .vertices()
        .iter()
        .map(|v| Point::new(Rat::from_f64_exact(v.x), Rat::from_f64_exact(v.y)))
        .collect();
    Polygon::new(pts).expect("exact copy preserves strict convexity")
}

/// Rounded float view of an exact polygon. Fails if rounding collapses the
/// strict convexity margin.
pub fn polygon_to_float(p: &Polygon<Rat>) -> Result<Polygon<f64>, GeomError> {
    let pts = p
        .vertices()
        .iter()
        .map(|v| Point::new(Scalar::to_f64(&v.x), Scalar::to_f64(&v.y)))
        .collect();
    Polygon::new(pts)
}
