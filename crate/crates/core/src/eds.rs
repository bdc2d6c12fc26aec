//! Differential-form diagnostics for quadrilateral orbit configurations.
//!
//! A 4-periodic orbit candidate is a quadrilateral `z1..z4`. On variations
//! of the configuration two families of 1-forms act:
//!
//! * `theta^i`, which vanishes exactly when the midpoint of segment
//!   `z_i z_(i+1)` moves parallel to the segment — the defining property
//!   of an outer-map orbit with tangency point at that midpoint;
//! * `omega^i`, the complementary coframe half; together the eight forms
//!   determine the variation uniquely whenever no triangle of consecutive
//!   points degenerates.
//!
//! The *midpoint family* of a configuration moves `z1` freely while
//! holding every segment midpoint fixed; all `theta^i` vanish identically
//! on it, making it a 2-parameter solution family. On such families the
//! remaining structure collapses to one scalar function `v` (and
//! `u = v (Delta2 - Delta3)`, which is constantly 1): `omega^2` and
//! `omega^4` become fixed linear combinations of `omega^1` and `omega^3`.
//! This module evaluates the forms, reconstructs variations from
//! prescribed form values, builds families, and measures how well the
//! structure relations hold — exactly for analytic derivative data,
//! to second order in the step for finite-difference data.
//!
//! Index conventions: form and triangle indices are 1-based (`1..=4`,
//! wrapping), matching the superscripts in the form names. `Delta_i` is
//! twice the signed area of triangle `(z_i, z_(i+1), z_(i+2))`;
//! `Delta1 + Delta3 = Delta2 + Delta4 = ` twice the quadrilateral area,
//! which is the conserved quantity of the dynamics.

use crate::geometry::{BBox, Point};
use crate::scalar::Scalar;
use rayon::prelude::*;
use thiserror::Error;

/// Errors from configuration validation and form-system evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EdsError {
    #[error("degenerate configuration: Delta{0} vanishes (three consecutive points collinear)")]
    Degenerate(usize),
    #[error("family degenerates at (s, t) = ({s}, {t}): Delta{index} vanishes")]
    DegenerateFamily { s: f64, t: f64, index: usize },
    #[error("family grid needs at least 2 points per axis and a positive radius")]
    BadGrid,
    #[error("directions do not annihilate the theta forms (residual {residual:.3e})")]
    NotAnnihilating { residual: f64 },
    #[error("midpoint velocity not parallel to segment {index} (theta = {theta:.3e})")]
    NotParallel { index: usize, theta: f64 },
}

fn idx(i: usize) -> usize {
    (i - 1) % 4
}

/// A quadrilateral orbit candidate with its derived triangle areas.
///
/// Validation requires every `Delta_i` nonzero (no three consecutive
/// points collinear), which also forces the four points to be pairwise
/// distinct. Counterclockwise enumeration makes all `Delta_i` positive
/// for convex configurations, but only nonvanishing is required.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig<S> {
    z: [Point<S>; 4],
    delta: [S; 4],
    area2: S,
}

fn delta_raw<S: Scalar>(i: usize, z: &[Point<S>; 4]) -> S {
    let a = &z[idx(i)];
    let b = &z[idx(i + 1)];
    let c = &z[idx(i + 2)];
    b.sub(a).cross(&c.sub(a))
}

fn shoelace2<S: Scalar>(z: &[Point<S>; 4]) -> S {
    let mut acc = S::zero();
    for i in 0..4 {
        acc = acc + z[i].cross(&z[(i + 1) % 4]);
    }
    acc
}

impl<S: Scalar> QuadConfig<S> {
    pub fn new(z: [Point<S>; 4]) -> Result<Self, EdsError> {
        let q = Self::new_unchecked(z);
        let scale_sq = BBox::of_points(&q.z).diag_sq();
        for i in 1..=4 {
            if q.delta[i - 1].negligible_at(&scale_sq) {
                return Err(EdsError::Degenerate(i));
            }
        }
        Ok(q)
    }

    /// Skips the nondegeneracy check; for probing how the operations
    /// report degenerate input.
    pub fn new_unchecked(z: [Point<S>; 4]) -> Self {
        let delta = [
            delta_raw(1, &z),
            delta_raw(2, &z),
            delta_raw(3, &z),
            delta_raw(4, &z),
        ];
        let area2 = shoelace2(&z);
        QuadConfig { z, delta, area2 }
    }

    pub fn points(&self) -> &[Point<S>; 4] {
        &self.z
    }

    /// Vertex `z_i`, 1-based and wrapping.
    pub fn vertex(&self, i: usize) -> &Point<S> {
        &self.z[idx(i)]
    }

    /// Midpoint of segment `z_i z_(i+1)`, 1-based.
    pub fn zeta(&self, i: usize) -> Point<S> {
        Point::midpoint(&self.z[idx(i)], &self.z[idx(i + 1)])
    }

    /// Twice the signed area of triangle `(z_i, z_(i+1), z_(i+2))`.
    pub fn delta(&self, i: usize) -> &S {
        &self.delta[idx(i)]
    }

    /// Twice the signed (shoelace) area of the quadrilateral; equals
    /// `Delta1 + Delta3` and `Delta2 + Delta4` identically.
    pub fn area2(&self) -> &S {
        &self.area2
    }
}

/// A variation of the configuration: one displacement vector per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentQuad<S> {
    pub d: [Point<S>; 4],
}

impl<S: Scalar> TangentQuad<S> {
    pub fn new(d: [Point<S>; 4]) -> Self {
        TangentQuad { d }
    }

    pub fn zero() -> Self {
        TangentQuad {
            d: std::array::from_fn(|_| Point::new(S::zero(), S::zero())),
        }
    }

    /// Every vertex displaced by the same vector.
    pub fn translation(v: &Point<S>) -> Self {
        TangentQuad {
            d: std::array::from_fn(|_| v.clone()),
        }
    }

    /// Radial rescaling of the configuration about the origin.
    pub fn dilation(q: &QuadConfig<S>) -> Self {
        TangentQuad { d: q.z.clone() }
    }
}

fn half<S: Scalar>() -> S {
    S::from_int(1) / S::from_int(2)
}

fn theta_raw<S: Scalar>(i: usize, z: &[Point<S>; 4], d: &[Point<S>; 4]) -> S {
    let a = idx(i);
    let b = idx(i + 1);
    let h = half::<S>();
    h.clone() * (z[a].y.clone() - z[b].y.clone()) * (d[a].x.clone() + d[b].x.clone())
        - h * (z[a].x.clone() - z[b].x.clone()) * (d[a].y.clone() + d[b].y.clone())
}

fn omega_raw<S: Scalar>(i: usize, z: &[Point<S>; 4], d: &[Point<S>; 4]) -> S {
    let a = idx(i);
    let b = idx(i + 1);
    let h = half::<S>();
    h.clone() * (z[a].y.clone() - z[b].y.clone()) * (d[a].x.clone() - d[b].x.clone())
        - h * (z[a].x.clone() - z[b].x.clone()) * (d[a].y.clone() - d[b].y.clone())
}

/// Evaluates `theta^i` on a variation: `cross(z_(i+1) - z_i, m)` where
/// `m` is the velocity of the segment midpoint. Zero exactly when the
/// midpoint moves along the segment.
pub fn theta<S: Scalar>(i: usize, q: &QuadConfig<S>, dq: &TangentQuad<S>) -> S {
    assert!((1..=4).contains(&i), "form index is 1-based in 1..=4");
    theta_raw(i, &q.z, &dq.d)
}

/// Evaluates the coframe complement `omega^i` on a variation.
pub fn omega<S: Scalar>(i: usize, q: &QuadConfig<S>, dq: &TangentQuad<S>) -> S {
    assert!((1..=4).contains(&i), "form index is 1-based in 1..=4");
    omega_raw(i, &q.z, &dq.d)
}

/// Reconstructs the unique variation taking prescribed `theta` and
/// `omega` values (both arrays indexed `i-1` for form `i`). Inverse of
/// evaluating all eight forms; fails if some `Delta_i` vanishes, where
/// the coframe degenerates.
pub fn coframe_solve<S: Scalar>(
    q: &QuadConfig<S>,
    theta_vals: &[S; 4],
    omega_vals: &[S; 4],
) -> Result<TangentQuad<S>, EdsError> {
    let scale_sq = BBox::of_points(&q.z).diag_sq();
    for i in 1..=4 {
        if q.delta(i).negligible_at(&scale_sq) {
            return Err(EdsError::Degenerate(i));
        }
    }
    // theta^i + omega^i = (y_i - y_(i+1)) dx_i     - (x_i - x_(i+1)) dy_i
    // theta^i - omega^i = (y_i - y_(i+1)) dx_(i+1) - (x_i - x_(i+1)) dy_(i+1)
    // so each vertex j is pinned by rows i = j and i = j - 1; the 2x2
    // determinant is -Delta_(j-1), nonzero by nondegeneracy.
    let mut out = TangentQuad::zero();
    for j in 1..=4 {
        let jm = if j == 1 { 4 } else { j - 1 };
        let a11 = q.vertex(j).y.clone() - q.vertex(j + 1).y.clone();
        let a12 = -(q.vertex(j).x.clone() - q.vertex(j + 1).x.clone());
        let a21 = q.vertex(jm).y.clone() - q.vertex(j).y.clone();
        let a22 = -(q.vertex(jm).x.clone() - q.vertex(j).x.clone());
        let r1 = theta_vals[j - 1].clone() + omega_vals[j - 1].clone();
        let r2 = theta_vals[jm - 1].clone() - omega_vals[jm - 1].clone();
        let det = a11.clone() * a22.clone() - a12.clone() * a21.clone();
        out.d[j - 1] = Point::new(
            (r1.clone() * a22 - r2.clone() * a12) / det.clone(),
            (a11 * r2 - a21 * r1) / det,
        );
    }
    Ok(out)
}

/// The two extra 1-forms that cut the solution families out of the
/// theta-annihilating planes:
/// `theta^5 = Delta2 w1 + (Delta3 - Delta2) w2 + Delta1 w3` and
/// `theta^6 = Delta3 w1 + Delta4 w3 + (Delta2 - Delta3) w4`
/// (`wi` short for `omega^i(dq)`).
pub fn theta56<S: Scalar>(q: &QuadConfig<S>, dq: &TangentQuad<S>) -> (S, S) {
    let w: Vec<S> = (1..=4).map(|i| omega(i, q, dq)).collect();
    let d = |i: usize| q.delta(i).clone();
    let t5 = d(2) * w[0].clone() + (d(3) - d(2)) * w[1].clone() + d(1) * w[2].clone();
    let t6 = d(3) * w[0].clone() + d(4) * w[2].clone() + (d(2) - d(3)) * w[3].clone();
    (t5, t6)
}

/// When `theta^i(dq) = 0`, the midpoint of segment `i` moves parallel to
/// the segment; returns the parallel ratio `lambda` with
/// `midpoint velocity = lambda * (z_(i+1) - z_i)`. Errors when the
/// velocity is not parallel (`theta^i` beyond tolerance).
pub fn tangency_direction<S: Scalar>(
    q: &QuadConfig<S>,
    dq: &TangentQuad<S>,
    i: usize,
) -> Result<S, EdsError> {
    assert!((1..=4).contains(&i), "form index is 1-based in 1..=4");
    let e = q.vertex(i + 1).sub(q.vertex(i));
    let m = Point::midpoint(&dq.d[idx(i)], &dq.d[idx(i + 1)]);
    let th = theta(i, q, dq);
    let ok = if S::EXACT {
        th.is_zero()
    } else {
        let scale = 1.0 + (Scalar::to_f64(&e.norm_sq()) * Scalar::to_f64(&m.norm_sq())).sqrt();
        Scalar::to_f64(&th).abs() <= 1e-10 * scale
    };
    if !ok {
        return Err(EdsError::NotParallel {
            index: i,
            theta: Scalar::to_f64(&th),
        });
    }
    Ok(m.dot(&e) / e.norm_sq())
}

type PointMap = dyn Fn(f64, f64) -> [Point<f64>; 4] + Send + Sync;
type DirMap = dyn Fn(f64, f64) -> (TangentQuad<f64>, TangentQuad<f64>) + Send + Sync;

/// A 2-parameter family of configurations over a uniform grid on
/// `[-r, r]^2`. Every grid configuration is validated nondegenerate at
/// construction. Parameter derivatives come from an attached analytic
/// rule when available, otherwise from central finite differences with
/// the stored step.
pub struct FamilyPatch {
    radius: f64,
    grid_n: usize,
    fd_step: f64,
    map: Box<PointMap>,
    dirs: Option<Box<DirMap>>,
}

impl std::fmt::Debug for FamilyPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyPatch")
            .field("radius", &self.radius)
            .field("grid_n", &self.grid_n)
            .field("fd_step", &self.fd_step)
            .field("analytic", &self.dirs.is_some())
            .finish()
    }
}

impl FamilyPatch {
    /// Builds a patch from a total configuration map, validating every
    /// grid point. `fd_step` is the finite-difference step used whenever
    /// derivatives or exterior derivatives are approximated.
    pub fn from_map(
        map: impl Fn(f64, f64) -> [Point<f64>; 4] + Send + Sync + 'static,
        radius: f64,
        grid_n: usize,
        fd_step: f64,
    ) -> Result<Self, EdsError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if grid_n < 2 || !positive(radius) || !positive(fd_step) {
            return Err(EdsError::BadGrid);
        }
        let patch = FamilyPatch {
            radius,
            grid_n,
            fd_step,
            map: Box::new(map),
            dirs: None,
        };
        for (s, t) in patch.params() {
            let z = patch.points_at(s, t);
            if let Err(EdsError::Degenerate(index)) = QuadConfig::new(z) {
                return Err(EdsError::DegenerateFamily { s, t, index });
            }
        }
        Ok(patch)
    }

    /// Attaches an analytic parameter-derivative rule.
    pub fn with_analytic_dirs(
        mut self,
        dirs: impl Fn(f64, f64) -> (TangentQuad<f64>, TangentQuad<f64>) + Send + Sync + 'static,
    ) -> Self {
        self.dirs = Some(Box::new(dirs));
        self
    }

    pub fn is_analytic(&self) -> bool {
        self.dirs.is_some()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Grid parameters in row-major order.
    pub fn params(&self) -> Vec<(f64, f64)> {
        let n = self.grid_n;
        let coord = |k: usize| -self.radius + 2.0 * self.radius * k as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push((coord(i), coord(j)));
            }
        }
        out
    }

    /// Raw configuration points at arbitrary parameters (total).
    pub fn points_at(&self, s: f64, t: f64) -> [Point<f64>; 4] {
        (self.map)(s, t)
    }

    /// Validated configuration at the given parameters.
    pub fn config_at(&self, s: f64, t: f64) -> Result<QuadConfig<f64>, EdsError> {
        QuadConfig::new(self.points_at(s, t))
    }

    /// Parameter-derivative pair at the given point — analytic when
    /// attached, else central finite differences with `fd_step`.
    pub fn dirs_at(&self, s: f64, t: f64) -> (TangentQuad<f64>, TangentQuad<f64>) {
        if let Some(dirs) = &self.dirs {
            return dirs(s, t);
        }
        let h = self.fd_step;
        let diff = |p: [Point<f64>; 4], m: [Point<f64>; 4]| {
            TangentQuad::new(std::array::from_fn(|k| {
                Point::new((p[k].x - m[k].x) / (2.0 * h), (p[k].y - m[k].y) / (2.0 * h))
            }))
        };
        (
            diff(self.points_at(s + h, t), self.points_at(s - h, t)),
            diff(self.points_at(s, t + h), self.points_at(s, t - h)),
        )
    }
}

/// The family that fixes every segment midpoint of `q0` and moves `z1`
/// by `(s, t)`: `z1(s,t) = z1 + (s,t)`, `z_(i+1) = 2 zeta_i - z_i`.
/// Midpoint closure makes this consistent around the cycle, and every
/// `theta^i` vanishes identically on it. Analytic derivatives (the
/// alternating pattern `+/-(1,0)`, `+/-(0,1)`) are attached; the
/// finite-difference step defaults to the grid spacing.
pub fn midpoint_family(
    q0: &QuadConfig<f64>,
    radius: f64,
    grid_n: usize,
) -> Result<FamilyPatch, EdsError> {
    let z1 = q0.points()[0].clone();
    let zeta: [Point<f64>; 3] = std::array::from_fn(|k| q0.zeta(k + 1));
    let map = move |s: f64, t: f64| {
        let mut z: [Point<f64>; 4] = std::array::from_fn(|_| Point::new(0.0, 0.0));
        z[0] = Point::new(z1.x + s, z1.y + t);
        for k in 0..3 {
            z[k + 1] = Point::reflect_through(&zeta[k], &z[k]);
        }
        z
    };
    let fd_step = if grid_n < 2 {
        return Err(EdsError::BadGrid);
    } else {
        2.0 * radius / (grid_n - 1) as f64
    };
    Ok(
        FamilyPatch::from_map(map, radius, grid_n, fd_step)?.with_analytic_dirs(|_, _| {
            let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            (
                TangentQuad::new(std::array::from_fn(|k| Point::new(sign(k), 0.0))),
                TangentQuad::new(std::array::from_fn(|k| Point::new(0.0, sign(k)))),
            )
        }),
    )
}

/// Max of `|theta^i|` over the grid, all four forms, both parameter
/// directions. Identically zero (exactly, not approximately) on midpoint
/// families with analytic derivatives.
pub fn family_residual(fp: &FamilyPatch) -> f64 {
    fp.params()
        .par_iter()
        .map(|&(s, t)| {
            let z = fp.points_at(s, t);
            let (ds, dt) = fp.dirs_at(s, t);
            (1..=4)
                .map(|i| {
                    theta_raw(i, &z, &ds.d)
                        .abs()
                        .max(theta_raw(i, &z, &dt.d).abs())
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Residuals of the structure relations, each a max over the grid:
///
/// * `dtheta`: spread of `dx^i ^ dy^i` across `i` (all equal on
///   theta-annihilated planes, since `d theta^i` is their difference);
/// * `wedge_ratio`: spread of `Delta_i^-1 omega^i ^ omega^(i+1)` across
///   `i`;
/// * `dom`: finite-difference exterior derivative `d omega^i` against
///   `(4 / Delta_i) omega^i ^ omega^(i+1)`;
/// * `area_form`: `dx^(i+1) ^ dy^(i+1) + Delta_i^-1 omega^i ^ omega^(i+1)`
///   (the per-vertex area form written in the coframe);
/// * `area_integral`: drift of `Delta1 + Delta3` and `Delta2 + Delta4`
///   from twice the area at the first grid point — the conserved
///   quantity of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureResiduals {
    pub dtheta: f64,
    pub wedge_ratio: f64,
    pub dom: f64,
    pub area_form: f64,
    pub area_integral: f64,
}

pub fn structure_residuals(fp: &FamilyPatch) -> StructureResiduals {
    let params = fp.params();
    let (s0, t0) = params[0];
    let base2 = QuadConfig::new_unchecked(fp.points_at(s0, t0)).area2;
    let h = fp.fd_step();
    let acc = params
        .par_iter()
        .map(|&(s, t)| {
            let z = fp.points_at(s, t);
            let q = QuadConfig::new_unchecked(z);
            let (ds, dt) = fp.dirs_at(s, t);
            // Wedge of the per-vertex coordinate forms on (ds, dt).
            let w: [f64; 4] =
                std::array::from_fn(|k| ds.d[k].x * dt.d[k].y - dt.d[k].x * ds.d[k].y);
            let wa: [f64; 4] = std::array::from_fn(|k| omega_raw(k + 1, &q.z, &ds.d));
            let wb: [f64; 4] = std::array::from_fn(|k| omega_raw(k + 1, &q.z, &dt.d));
            let wedge: [f64; 4] =
                std::array::from_fn(|k| wa[k] * wb[(k + 1) % 4] - wb[k] * wa[(k + 1) % 4]);
            let spread = |vals: [f64; 4]| {
                let mx = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mn = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                mx - mn
            };
            let dtheta = spread(w);
            let ratios: [f64; 4] = std::array::from_fn(|k| wedge[k] / q.delta[k]);
            let wedge_ratio = spread(ratios);
            // d omega^i(ds, dt) = ds(omega^i(dt)) - dt(omega^i(ds)) for
            // commuting parameter fields, realized by central differences
            // along the family.
            let omega_on = |i: usize, s: f64, t: f64, along_t: bool| {
                let z = fp.points_at(s, t);
                let (ds, dt) = fp.dirs_at(s, t);
                omega_raw(i, &z, if along_t { &dt.d } else { &ds.d })
            };
            let mut dom = 0.0f64;
            let mut area_form = 0.0f64;
            for i in 1..=4 {
                let lhs = (omega_on(i, s + h, t, true) - omega_on(i, s - h, t, true)) / (2.0 * h)
                    - (omega_on(i, s, t + h, false) - omega_on(i, s, t - h, false)) / (2.0 * h);
                let rhs = 4.0 / q.delta[i - 1] * wedge[i - 1];
                dom = dom.max((lhs - rhs).abs());
                area_form = area_form.max((w[i % 4] + wedge[i - 1] / q.delta[i - 1]).abs());
            }
            let area_integral = (q.delta[0] + q.delta[2] - base2)
                .abs()
                .max((q.delta[1] + q.delta[3] - base2).abs());
            StructureResiduals {
                dtheta,
                wedge_ratio,
                dom,
                area_form,
                area_integral,
            }
        })
        .reduce(
            || StructureResiduals {
                dtheta: 0.0,
                wedge_ratio: 0.0,
                dom: 0.0,
                area_form: 0.0,
                area_integral: 0.0,
            },
            |a, b| StructureResiduals {
                dtheta: a.dtheta.max(b.dtheta),
                wedge_ratio: a.wedge_ratio.max(b.wedge_ratio),
                dom: a.dom.max(b.dom),
                area_form: a.area_form.max(b.area_form),
                area_integral: a.area_integral.max(b.area_integral),
            },
        );
    acc
}

/// Degeneracy classification of the integral-element extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `omega^1 ^ omega^3` and `D = Delta2 Delta4 - Delta1 Delta3` both
    /// nonzero: `v` determines the element.
    Generic,
    /// `omega^1 ^ omega^3` vanishes on the plane.
    DegOmega13,
    /// The determinant `D` vanishes.
    DegD,
}

/// The scalar data of a theta-annihilating 2-plane: the multiplier `v`
/// in `omega^2 = v (Delta2 omega^1 + Delta1 omega^3)`,
/// `omega^4 = -v (Delta3 omega^1 + Delta4 omega^3)`, and
/// `u = v (Delta2 - Delta3)`. `v` is `None` when the fit is singular
/// (all four right-hand sides vanish on the plane).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralElement {
    pub v: Option<f64>,
    pub u: Option<f64>,
    /// Max deviation of the reconstructed `omega^2`, `omega^4` values
    /// from the measured ones.
    pub fit_residual: f64,
    /// Residual of `omega^2 ^ omega^4 = -v^2 D omega^1 ^ omega^3`;
    /// `None` when `v` could not be fitted.
    pub wedge_residual: Option<f64>,
    pub case: CaseTag,
}

fn fit_element(
    q: &QuadConfig<f64>,
    da: &TangentQuad<f64>,
    db: &TangentQuad<f64>,
) -> IntegralElement {
    let d = |i: usize| *q.delta(i);
    let wa: [f64; 4] = std::array::from_fn(|k| omega(k + 1, q, da));
    let wb: [f64; 4] = std::array::from_fn(|k| omega(k + 1, q, db));
    let w13 = wa[0] * wb[2] - wb[0] * wa[2];
    let big_d = d(2) * d(4) - d(1) * d(3);
    let dmax = (1..=4).map(|i| d(i).abs()).fold(0.0, f64::max);
    let wmax = wa
        .iter()
        .chain(wb.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let case = if big_d.abs() <= 1e-10 * (1.0 + dmax * dmax) {
        CaseTag::DegD
    } else if w13.abs() <= 1e-10 * (1.0 + wmax * wmax) {
        CaseTag::DegOmega13
    } else {
        CaseTag::Generic
    };
    // Four linear conditions y = A v, one unknown, least squares.
    let a = [
        d(2) * wa[0] + d(1) * wa[2],
        d(2) * wb[0] + d(1) * wb[2],
        -(d(3) * wa[0] + d(4) * wa[2]),
        -(d(3) * wb[0] + d(4) * wb[2]),
    ];
    let y = [wa[1], wb[1], wa[3], wb[3]];
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let scale: f64 = (1.0 + dmax * dmax) * (1.0 + wmax * wmax);
    if aa <= 1e-24 * scale * scale {
        let fit_residual = y.iter().map(|x| x.abs()).fold(0.0, f64::max);
        return IntegralElement {
            v: None,
            u: None,
            fit_residual,
            wedge_residual: None,
            case,
        };
    }
    let v = a.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>() / aa;
    let fit_residual = a
        .iter()
        .zip(&y)
        .map(|(a, y)| (y - a * v).abs())
        .fold(0.0, f64::max);
    let w24 = wa[1] * wb[3] - wb[1] * wa[3];
    let wedge_residual = Some((w24 + v * v * big_d * w13).abs());
    IntegralElement {
        v: Some(v),
        u: Some(v * (d(2) - d(3))),
        fit_residual,
        wedge_residual,
        case,
    }
}

/// Extracts the integral element spanned by two theta-annihilating
/// directions. Errors when the directions do not annihilate the theta
/// forms; degenerate configurations are tagged rather than rejected.
pub fn integral_element(
    q: &QuadConfig<f64>,
    da: &TangentQuad<f64>,
    db: &TangentQuad<f64>,
) -> Result<IntegralElement, EdsError> {
    let dmax = (1..=4).map(|i| q.delta(i).abs()).fold(0.0, f64::max);
    let residual = (1..=4)
        .map(|i| theta(i, q, da).abs().max(theta(i, q, db).abs()))
        .fold(0.0, f64::max);
    if residual > 1e-8 * (1.0 + dmax) {
        return Err(EdsError::NotAnnihilating { residual });
    }
    Ok(fit_element(q, da, db))
}

/// Residual of the triangle-area derivative identities
/// `d Delta1 = (Delta3/Delta4)(1 - v (Delta1 + Delta4)) omega^1
///           + (Delta1/Delta2)(-1 - v (Delta2 + Delta3)) omega^3` and
/// `d Delta2 = (Delta2/Delta1)(1 + v (Delta1 + Delta4)) omega^1
///           + (Delta4/Delta3)(-1 + v (Delta2 + Delta3)) omega^3`,
/// with `d Delta` realized by central differences along the family and
/// `v` fitted per grid point. Reports the max; small only on families
/// that actually solve the structure equations.
pub fn ddelta_check(fp: &FamilyPatch) -> f64 {
    let h = fp.fd_step();
    fp.params()
        .par_iter()
        .map(|&(s, t)| {
            let q = QuadConfig::new_unchecked(fp.points_at(s, t));
            let (ds, dt) = fp.dirs_at(s, t);
            let fit = fit_element(&q, &ds, &dt);
            let Some(v) = fit.v else {
                return f64::INFINITY;
            };
            let d = |i: usize| *q.delta(i);
            let c1 = (d(3) / d(4)) * (1.0 - v * (d(1) + d(4)));
            let c3 = (d(1) / d(2)) * (-1.0 - v * (d(2) + d(3)));
            let e1 = (d(2) / d(1)) * (1.0 + v * (d(1) + d(4)));
            let e3 = (d(4) / d(3)) * (-1.0 + v * (d(2) + d(3)));
            let fd = |i: usize, along_t: bool| {
                let (pp, pm) = if along_t {
                    (fp.points_at(s, t + h), fp.points_at(s, t - h))
                } else {
                    (fp.points_at(s + h, t), fp.points_at(s - h, t))
                };
                (delta_raw(i, &pp) - delta_raw(i, &pm)) / (2.0 * h)
            };
            let mut worst = 0.0f64;
            for (dir, along_t) in [(&ds, false), (&dt, true)] {
                let w1 = omega(1, &q, dir);
                let w3 = omega(3, &q, dir);
                worst = worst.max((fd(1, along_t) - (c1 * w1 + c3 * w3)).abs());
                worst = worst.max((fd(2, along_t) - (e1 * w1 + e3 * w3)).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}
