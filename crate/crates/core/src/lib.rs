//! Outer billiard dynamics about convex tables.
//!
//! The outer (dual) billiard map sends a point `z` outside a convex table to
//! `P(z) = 2*tau - z`, the reflection through the tangency point `tau` on the
//! table chosen so the table lies strictly to the *left* of the directed line
//! from `z` through `tau` (the counterclockwise convention; iterating `P`
//! walks orbits counterclockwise around the table).
//!
//! The crate is split by concern:
//!
//! * [`scalar`] — one generic scalar interface over `f64` and exact
//!   `BigRational` arithmetic, so geometry and dynamics run identically in
//!   both modes;
//! * [`geometry`] — tables (convex polygons, ellipses), tangency selection,
//!   parallelogram detection;
//! * [`tableio`] — the JSON table-file format with float/exact coordinate
//!   modes;
//! * [`dynamics`] — the map `P`, orbits, the area-preservation check, and
//!   the singular-line arrangement of a polygonal table;
//! * [`periodic`] — itinerary cells, exact period-4 scans, measure
//!   estimation, and Newton refinement of periodic points on smooth tables;
//! * [`eds`] — the quadrilateral coframe (`theta`/`omega` one-forms),
//!   two-parameter families, structure-equation residuals, and integral
//!   elements of the period-4 system;
//! * [`verify`] — the exact rational-function certification of the coframe
//!   algebra (compatibility polynomial, degeneracy analysis, form
//!   inversion), built on `obl-cas`.

pub mod dynamics;
pub mod eds;
pub mod geometry;
pub mod periodic;
pub mod scalar;
pub mod tableio;
pub mod verify;

pub use scalar::{Rat, Scalar};
