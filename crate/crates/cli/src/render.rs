//! Deterministic SVG rendering of scan reports and orbit CSVs.
//!
//! Output is plain formatted text: fixed layer order (`region`,
//! `cells`, `table`, `singular-lines`, `orbit`, `legend`), fixed palette,
//! fixed 3-decimal screen coordinates, no ids or timestamps beyond the
//! layer names — so a given input and style always produce the same bytes.

use crate::report::ScanReport;
use obl_core::dynamics::singular_lines;
use obl_core::geometry::{BBox, Point, Polygon};
use obl_core::tableio::{polygon_to_float, LoadedTable};
use obl_core::Scalar;
use std::fmt::Write as _;

const MARGIN: f64 = 24.0;
const LEGEND_LINE: f64 = 18.0;
const TABLE_FILL: &str = "#c9d6ea";
const TABLE_STROKE: &str = "#1f3a5f";
const CELL_FILL: &str = "#74c476";
const CELL_STROKE: &str = "#2e7d32";
const SINGULAR_STROKE: &str = "#c0392b";
const ORBIT_STROKE: &str = "#8e44ad";
const TANGENCY_STROKE: &str = "#e67e22";
const REGION_STROKE: &str = "#9aa5b1";

/// Rendering failed because the input was not produced by this tool (or a
/// referenced table is unusable).
#[derive(Debug)]
pub struct RenderError(pub String);

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// World-to-screen mapping with a flipped y axis.
struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(world: &BBox<f64>, width: f64) -> Frame {
        let w = (world.max.x - world.min.x).max(1e-9);
        let h = (world.max.y - world.min.y).max(1e-9);
        let scale = (width - 2.0 * MARGIN) / w;
        Frame {
            min_x: world.min.x,
            max_y: world.max.y,
            scale,
            height: h * scale + 2.0 * MARGIN,
        }
    }

    fn map(&self, p: &Point<f64>) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min_x) * self.scale,
            MARGIN + (self.max_y - p.y) * self.scale,
        )
    }

    fn points_attr(&self, pts: &[Point<f64>]) -> String {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s
    }
}

/// Parses a coordinate that may be a `p/q` string or a decimal.
fn coord(s: &str) -> Result<f64, RenderError> {
    if let Some(r) = obl_cas::parse_rational(s) {
        return Ok(Scalar::to_f64(&r));
    }
    s.trim()
        .parse::<f64>()
        .map_err(|_| RenderError(format!("bad coordinate {s:?}")))
}

fn pair(p: &[String; 2]) -> Result<Point<f64>, RenderError> {
    Ok(Point::new(coord(&p[0])?, coord(&p[1])?))
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:.0} {height:.0}" width="{width:.0}" height="{height:.0}" font-family="monospace" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );
}

fn polygon_element(out: &mut String, frame: &Frame, pts: &[Point<f64>], style: &str) {
    let _ = writeln!(
        out,
        r#"<polygon points="{}" {style}/>"#,
        frame.points_attr(pts)
    );
}

fn singular_layer(out: &mut String, frame: &Frame, table: &Polygon<f64>, region: &BBox<f64>) {
    let arrangement = singular_lines(table, 1, region);
    let _ = writeln!(out, r#"<g id="singular-lines">"#);
    for seg in &arrangement.segments {
        let (x1, y1) = frame.map(&seg.segment.a);
        let (x2, y2) = frame.map(&seg.segment.b);
        let dash = if seg.generation == 0 {
            ""
        } else {
            r#" stroke-dasharray="4,3" opacity="0.55""#
        };
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{SINGULAR_STROKE}" stroke-width="0.8"{dash}/>"#
        );
    }
    let _ = writeln!(out, "</g>");
}

/// One legend entry: a color swatch plus a label.
struct LegendEntry {
    color: &'static str,
    label: String,
}

fn legend_layer(out: &mut String, entries: &[LegendEntry], caption: &str) {
    let _ = writeln!(out, r#"<g id="legend">"#);
    let x = MARGIN / 2.0;
    let mut y = MARGIN / 2.0;
    let backing_h = LEGEND_LINE * (entries.len() as f64 + 1.0) + 8.0;
    let _ = writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="260" height="{backing_h:.3}" fill="#ffffff" opacity="0.85" stroke="{REGION_STROKE}"/>"##,
        x - 4.0,
        y - 4.0
    );
    for entry in entries {
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{y:.3}" width="12" height="12" fill="{}"/>"#,
            entry.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}">{}</text>"#,
            x + 18.0,
            y + 11.0,
            entry.label
        );
        y += LEGEND_LINE;
    }
    let _ = writeln!(
        out,
        r#"<text x="{x:.3}" y="{:.3}">{caption}</text>"#,
        y + 11.0
    );
    let _ = writeln!(out, "</g>");
}

/// Renders a `scan4` report: region frame, shaded zero-translation cells,
/// the table, its singular lines, and a legend with the verdict.
pub fn render_scan(report: &ScanReport, width: u32) -> Result<String, RenderError> {
    let width = f64::from(width);
    let min = pair(&report.region.min)?;
    let max = pair(&report.region.max)?;
    if !(min.x < max.x && min.y < max.y) {
        return Err(RenderError("scan report region is empty".into()));
    }
    let region = BBox { min, max };
    let table_pts = report
        .table
        .iter()
        .map(pair)
        .collect::<Result<Vec<_>, _>>()?;
    let table = Polygon::new(table_pts.clone())
        .map_err(|e| RenderError(format!("scan report table is not a valid table: {e}")))?;

    let frame = Frame::fit(&region, width);
    let mut out = String::new();
    open_svg(&mut out, width, frame.height);

    let _ = writeln!(out, r#"<g id="region">"#);
    polygon_element(
        &mut out,
        &frame,
        &region.corners(),
        &format!(r#"fill="none" stroke="{REGION_STROKE}" stroke-width="1""#),
    );
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g id="cells">"#);
    for cell in &report.zero_translation {
        let pts = cell
            .region_vertices
            .iter()
            .map(pair)
            .collect::<Result<Vec<_>, _>>()?;
        polygon_element(
            &mut out,
            &frame,
            &pts,
            &format!(
                r#"fill="{CELL_FILL}" fill-opacity="0.55" stroke="{CELL_STROKE}" stroke-width="1""#
            ),
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g id="table">"#);
    polygon_element(
        &mut out,
        &frame,
        &table_pts,
        &format!(r#"fill="{TABLE_FILL}" stroke="{TABLE_STROKE}" stroke-width="1.5""#),
    );
    let _ = writeln!(out, "</g>");

    singular_layer(&mut out, &frame, &table, &region);

    legend_layer(
        &mut out,
        &[
            LegendEntry {
                color: TABLE_FILL,
                label: "table".into(),
            },
            LegendEntry {
                color: CELL_FILL,
                label: "period-4 cells (zero translation)".into(),
            },
            LegendEntry {
                color: SINGULAR_STROKE,
                label: "singular lines".into(),
            },
        ],
        &format!(
            "verdict: {} ({} cells)",
            report.verdict,
            report.zero_translation.len()
        ),
    );

    out.push_str("</svg>\n");
    Ok(out)
}

/// A parsed orbit CSV row.
struct OrbitRow {
    z: Point<f64>,
    tangency: Option<Point<f64>>,
}

fn parse_orbit_csv(csv: &str) -> Result<Vec<OrbitRow>, RenderError> {
    let mut lines = csv.lines();
    match lines.next() {
        Some(h) if h.trim() == "k,x,y,tx,ty" => {}
        _ => {
            return Err(RenderError(
                "orbit CSV must start with header k,x,y,tx,ty".into(),
            ))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(RenderError(format!(
                "orbit CSV row with {} fields",
                fields.len()
            )));
        }
        let z = Point::new(coord(fields[1])?, coord(fields[2])?);
        let tangency = if fields[3].is_empty() || fields[4].is_empty() {
            None
        } else {
            Some(Point::new(coord(fields[3])?, coord(fields[4])?))
        };
        rows.push(OrbitRow { z, tangency });
    }
    if rows.is_empty() {
        return Err(RenderError("orbit CSV has no rows".into()));
    }
    Ok(rows)
}

/// Renders an orbit CSV: the orbit polyline with indexed point markers and
/// tangency crosses, over the table and its singular lines when a table is
/// supplied.
pub fn render_orbit(
    csv: &str,
    table: Option<&LoadedTable>,
    width: u32,
) -> Result<String, RenderError> {
    let width = f64::from(width);
    let rows = parse_orbit_csv(csv)?;

    let float_table: Option<Polygon<f64>> = match table {
        Some(LoadedTable::ExactPolygon(p)) => {
            Some(polygon_to_float(p).map_err(|e| RenderError(format!("table unusable: {e}")))?)
        }
        Some(LoadedTable::FloatPolygon(p)) => Some(p.clone()),
        Some(LoadedTable::Ellipse(_)) | None => None,
    };
    let ellipse = match table {
        Some(LoadedTable::Ellipse(e)) => Some(e.clone()),
        _ => None,
    };

    let mut all: Vec<Point<f64>> = rows.iter().map(|r| r.z.clone()).collect();
    all.extend(rows.iter().filter_map(|r| r.tangency.clone()));
    if let Some(p) = &float_table {
        all.extend(p.vertices().iter().cloned());
    }
    if let Some(e) = &ellipse {
        let b = e.bbox();
        all.push(b.min);
        all.push(b.max);
    }
    let mut world = BBox::of_points(all.iter());
    let pad = 0.08 * ((world.max.x - world.min.x) + (world.max.y - world.min.y)).max(1e-9);
    world.min = Point::new(world.min.x - pad, world.min.y - pad);
    world.max = Point::new(world.max.x + pad, world.max.y + pad);

    let frame = Frame::fit(&world, width);
    let mut out = String::new();
    open_svg(&mut out, width, frame.height);

    if let Some(p) = &float_table {
        let _ = writeln!(out, r#"<g id="table">"#);
        polygon_element(
            &mut out,
            &frame,
            p.vertices(),
            &format!(r#"fill="{TABLE_FILL}" stroke="{TABLE_STROKE}" stroke-width="1.5""#),
        );
        let _ = writeln!(out, "</g>");
        singular_layer(&mut out, &frame, p, &world);
    }
    if let Some(e) = &ellipse {
        let (cx, cy) = frame.map(&e.center);
        let _ = writeln!(out, r#"<g id="table">"#);
        let _ = writeln!(
            out,
            r#"<ellipse cx="{cx:.3}" cy="{cy:.3}" rx="{:.3}" ry="{:.3}" fill="{TABLE_FILL}" stroke="{TABLE_STROKE}" stroke-width="1.5"/>"#,
            e.a * frame.scale,
            e.b * frame.scale
        );
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r#"<g id="orbit">"#);
    let pts: Vec<Point<f64>> = rows.iter().map(|r| r.z.clone()).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{ORBIT_STROKE}" stroke-width="1.5"/>"#,
        frame.points_attr(&pts)
    );
    for (k, row) in rows.iter().enumerate() {
        let (x, y) = frame.map(&row.z);
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{ORBIT_STROKE}"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}">{k}</text>"#,
            x + 5.0,
            y - 5.0
        );
    }
    for row in &rows {
        if let Some(t) = &row.tangency {
            let (x, y) = frame.map(t);
            let _ = writeln!(
                out,
                r#"<path d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" stroke="{TANGENCY_STROKE}" stroke-width="1.5"/>"#,
                x - 4.0,
                y - 4.0,
                x + 4.0,
                y + 4.0,
                x - 4.0,
                y + 4.0,
                x + 4.0,
                y - 4.0
            );
        }
    }
    let _ = writeln!(out, "</g>");

    let mut entries = vec![
        LegendEntry {
            color: ORBIT_STROKE,
            label: "orbit".into(),
        },
        LegendEntry {
            color: TANGENCY_STROKE,
            label: "tangency points".into(),
        },
    ];
    if float_table.is_some() || ellipse.is_some() {
        entries.push(LegendEntry {
            color: TABLE_FILL,
            label: "table".into(),
        });
    }
    let segments = rows.len().saturating_sub(1);
    legend_layer(
        &mut out,
        &entries,
        &format!("{} points, {segments} segments", rows.len()),
    );

    out.push_str("</svg>\n");
    Ok(out)
}
