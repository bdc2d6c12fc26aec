//! Serializable report shapes emitted by the subcommands.
//!
//! Exact quantities are always rendered as `p/q` strings (`3` prints as
//! `3/1`), so exact-mode output never contains a decimal float. Float-mode
//! summaries use plain JSON numbers. Field order is declaration order and
//! every map is ordered, so serialization is byte-deterministic.

use obl_core::eds::CaseTag;
use obl_core::geometry::{BBox, Point, Polygon};
use obl_core::periodic::{MeasureOutcome, SampleArea, ScanOutcome};
use obl_core::{Rat, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One exact coordinate pair as `["p/q", "p/q"]`.
fn exact_pair(p: &Point<Rat>) -> [String; 2] {
    [p.x.format_plain(), p.y.format_plain()]
}

/// Axis-aligned region with exact corners.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionBox {
    pub min: [String; 2],
    pub max: [String; 2],
}

/// A zero-translation period-4 cell: its itinerary, the (vanishing)
/// translation of the fourth-iterate restriction, and the clipped region
/// polygon it occupies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub itinerary: Vec<usize>,
    pub translation: [String; 2],
    pub region_vertices: Vec<[String; 2]>,
}

/// Output of `obl scan4`: the table, the scanned region, cell counts, the
/// zero-translation cells, and the verdict string.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub table: Vec<[String; 2]>,
    pub region: RegionBox,
    pub cells_examined: usize,
    pub nonempty: usize,
    pub zero_translation: Vec<CellReport>,
    pub verdict: String,
}

/// Builds the scan report from an exact scan outcome.
pub fn scan_report(table: &Polygon<Rat>, region: &BBox<Rat>, out: &ScanOutcome) -> ScanReport {
    ScanReport {
        table: table.vertices().iter().map(exact_pair).collect(),
        region: RegionBox {
            min: exact_pair(&region.min),
            max: exact_pair(&region.max),
        },
        cells_examined: out.cells_examined,
        nonempty: out.nonempty,
        zero_translation: out
            .zero_translation
            .iter()
            .map(|cell| CellReport {
                itinerary: cell.itinerary.entries().to_vec(),
                translation: exact_pair(&cell.translation),
                region_vertices: cell.region.iter().map(exact_pair).collect(),
            })
            .collect(),
        verdict: out.verdict.to_string(),
    }
}

/// Either an exact ratio string or a float, depending on the run mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumValue {
    Ratio(String),
    Float(f64),
}

/// The sampled area, echoed back so reruns are self-describing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AreaReport {
    Box { min: [f64; 2], max: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl From<&SampleArea> for AreaReport {
    fn from(area: &SampleArea) -> Self {
        match area {
            SampleArea::Box(b) => AreaReport::Box {
                min: [b.min.x, b.min.y],
                max: [b.max.x, b.max.y],
            },
            SampleArea::Disk { center, radius } => AreaReport::Disk {
                center: [center.x, center.y],
                radius: *radius,
            },
        }
    }
}

/// Output of `obl measure`. Exact runs report the hit fraction as a reduced
/// ratio string and omit the float-only fields; float runs add the return
/// tolerance and the 95% Wilson interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub mode: String,
    pub period: usize,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub area: AreaReport,
    pub fraction: NumValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wilson_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wilson_high: Option<f64>,
}

/// Builds the measure report; `exact` selects the ratio-string form.
pub fn measure_report(
    exact: bool,
    period: usize,
    seed: u64,
    tol: f64,
    area: &SampleArea,
    out: &MeasureOutcome,
) -> MeasureReport {
    let fraction = if exact {
        NumValue::Ratio(obl_cas::format_rational(&obl_cas::Rational::new(
            out.hits.into(),
            out.samples.into(),
        )))
    } else {
        NumValue::Float(out.fraction)
    };
    MeasureReport {
        mode: if exact { "exact" } else { "float" }.into(),
        period,
        samples: out.samples,
        hits: out.hits,
        seed,
        area: AreaReport::from(area),
        fraction,
        tol: (!exact).then_some(tol),
        wilson_low: (!exact).then_some(out.wilson_low),
        wilson_high: (!exact).then_some(out.wilson_high),
    }
}

/// Output of `obl family-check`: residual maxima for every structure
/// identity over the parameter patch, plus the fitted `(v, u)` values per
/// grid point (row-major over the parameter grid; `null` where the fit is
/// degenerate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyCheckReport {
    pub base: [f64; 2],
    pub quad: Vec<[f64; 2]>,
    pub radius: f64,
    pub grid_n: usize,
    pub fd_step: f64,
    pub theta_max: f64,
    pub dtheta_max: f64,
    pub wedge_ratio_max: f64,
    pub dom_max: f64,
    pub area_form_max: f64,
    pub area_integral_max: f64,
    pub ddelta_max: f64,
    pub theta56_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub u: Vec<Option<f64>>,
    pub v: Vec<Option<f64>>,
    pub cases: BTreeMap<String, usize>,
}

/// Human-readable tag for an integral-element case.
pub fn case_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::Generic => "generic",
        CaseTag::DegD => "degenerate-discriminant",
        CaseTag::DegOmega13 => "degenerate-omega13",
    }
}

/// Pretty JSON with a trailing newline (the on-disk/report format).
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
