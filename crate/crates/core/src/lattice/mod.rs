//! Lattice normalization, the strip-smoothing avoidance pipeline, tame
//! straightening and the Hénon basin map.
//!
//! All lattice statements are certified on a window: only points whose four
//! integer lattice coordinates lie in `[-W, W]` with `W = floor(window_radius)`
//! are enumerated.

pub mod henon;
pub mod pipeline;
pub mod shears;
pub mod smoother;
pub mod straighten;
pub mod surrogate;

use std::collections::HashMap;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::Point;
use crate::numerics::{Cx, Matrix2};

pub use henon::{henon_basin_map, BasinMap};
pub use pipeline::{
    fit_shear_surrogates, quotient_avoidance_check, torus_avoidance_pipeline, torus_avoidance_report, PipelineOptions,
};
pub use shears::{build_f1, build_f2, ExpShear};
pub use smoother::{step_profiles, strip_smoother, StepProfile};
pub use straighten::{straighten_tame, TameStraightening};
pub use surrogate::{surrogate_entire, surrogate_lower_bound, ArnoldiPoly, EntireSurrogate, SampleDomain, SurrogateBound};

/// `[Re z, Im z, Re w, Im w]`.
pub type RealPoint = [f64; 4];

pub fn to_point(v: &RealPoint) -> Point {
    Point::new(Cx::new(v[0], v[1]), Cx::new(v[2], v[3]))
}

pub fn to_real(p: Point) -> RealPoint {
    [p.z.re, p.z.im, p.w.re, p.w.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpecRaw")]
pub struct LatticeSpec {
    pub basis: [RealPoint; 4],
    #[serde(default)]
    pub translates: Vec<RealPoint>,
    pub ball_radius: f64,
    pub window_radius: f64,
}

#[derive(Deserialize)]
struct LatticeSpecRaw {
    basis: [RealPoint; 4],
    #[serde(default)]
    translates: Vec<RealPoint>,
    ball_radius: f64,
    window_radius: f64,
}

impl TryFrom<LatticeSpecRaw> for LatticeSpec {
    type Error = Error;
    fn try_from(r: LatticeSpecRaw) -> Result<Self> {
        LatticeSpec::new(r.basis, r.translates, r.ball_radius, r.window_radius)
    }
}

impl LatticeSpec {
    pub fn new(basis: [RealPoint; 4], translates: Vec<RealPoint>, ball_radius: f64, window_radius: f64) -> Result<Self> {
        let finite = basis.iter().chain(translates.iter()).flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("basis and translates must be finite".into()));
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(Error::InvalidInput(format!("ball_radius must be positive, got {ball_radius}")));
        }
        if !(window_radius >= 0.0 && window_radius.is_finite()) {
            return Err(Error::InvalidInput(format!("window_radius must be non-negative, got {window_radius}")));
        }
        let s = LatticeSpec { basis, translates, ball_radius, window_radius };
        let m = s.real_basis();
        let scale: f64 = basis.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        if scale == 0.0 || m.determinant().abs() <= 1e-12 * scale {
            return Err(Error::InvalidInput("basis is not of real rank 4".into()));
        }
        Ok(s)
    }

    /// The Gaussian-integer lattice `Z[i]^2` with basis `(1,0), (i,0), (0,1), (0,i)`.
    pub fn standard(translates: Vec<RealPoint>, ball_radius: f64, window_radius: f64) -> Result<Self> {
        let e = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        LatticeSpec::new(e, translates, ball_radius, window_radius)
    }

    pub fn window(&self) -> i64 {
        self.window_radius.floor() as i64
    }

    /// Basis vectors as the columns of a real 4x4 matrix.
    pub fn real_basis(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.basis[j][i])
    }

    /// Real lattice coordinates of `x` relative to the translate `t`.
    pub fn lattice_coords(&self, x: &RealPoint, t: &RealPoint) -> Option<[f64; 4]> {
        let inv = self.real_basis().try_inverse()?;
        let d = Vector4::from_fn(|i, _| x[i] - t[i]);
        let c = inv * d;
        Some([c[0], c[1], c[2], c[3]])
    }
}

/// Constants of the strip-smoothing construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Value of the step profiles off their zero intervals.
    pub c: f64,
    /// Half-width of the constancy neighbourhood used in the smoothing bound.
    pub delta: f64,
    /// Strip half-width.
    pub epsilon: f64,
    /// Bidisk radius, `epsilon / 2`.
    pub r: f64,
}

impl Constants {
    pub const C: f64 = 3.4657359027997265; // ln 32
    pub const DELTA: f64 = 1.0 / 16.0;

    /// Largest admissible `epsilon`: `min(delta / 2, pi delta ln(3/2) / (2 C))`.
    pub fn max_epsilon(c: f64, delta: f64) -> f64 {
        (delta / 2.0).min(std::f64::consts::PI * delta * 1.5f64.ln() / (2.0 * c))
    }

    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        let (c, delta) = (Constants::C, Constants::DELTA);
        let max = Constants::max_epsilon(c, delta);
        if !(epsilon > 0.0) || epsilon > max * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "epsilon {epsilon} outside (0, {max:.6}]: need epsilon <= delta/2 and 2 C epsilon / (pi delta) <= ln(3/2)"
            )));
        }
        Ok(Constants { c, delta, epsilon, r: epsilon / 2.0 })
    }

    /// Uniform bound `2 C epsilon / (pi delta)` on `|g - f|` at constancy points.
    pub fn smoothing_bound(&self) -> f64 {
        2.0 * self.c * self.epsilon / (std::f64::consts::PI * self.delta)
    }
}

/// A lattice after the linear change of coordinates that puts the first
/// coordinates on horizontal lines one unit apart.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedLattice {
    /// The linear map `A` (rotation and dilation included).
    pub a: Matrix2,
    pub dilation: f64,
    /// Sorted distinct `Im z` over the transformed window.
    pub line_levels: Vec<f64>,
    /// Window points with `|w| <= 1/8`.
    pub near_axis_points: Vec<Point>,
    pub constants: Constants,
    /// Transformed window points of all translates.
    pub points: Vec<Point>,
    pub window: i64,
    /// `A v_i`.
    pub basis_images: [Point; 4],
    /// `A p_j`.
    pub translate_images: Vec<Point>,
    pub min_separation: f64,
    pub min_level_gap: f64,
}

const NEAR_AXIS: f64 = 0.125;

impl NormalizedLattice {
    pub fn a_inverse(&self) -> Matrix2 {
        self.a.inverse().expect("normalizing map is invertible")
    }

    /// Index into `line_levels` of the level nearest to `y`.
    pub fn nearest_level(&self, y: f64) -> Option<usize> {
        nearest_sorted(&self.line_levels, y)
    }

    /// Distinct first coordinates of the window points, and for every window
    /// point the index of its first coordinate.
    pub fn first_coordinates(&self) -> (Vec<Cx>, Vec<usize>) {
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        let mut centers = Vec::new();
        let mut of_point = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let key = ((p.z.re * 1e8).round() as i64, (p.z.im * 1e8).round() as i64);
            let k = *index.entry(key).or_insert_with(|| {
                centers.push(p.z);
                centers.len() - 1
            });
            of_point.push(k);
        }
        (centers, of_point)
    }

    /// Window points of the normalized `Lambda_0` lying within polydisk
    /// distance `reach` of `x`, with their distances.
    pub fn window_neighbours(&self, x: Point, reach: f64) -> Vec<(Point, f64)> {
        let m = Matrix4::from_fn(|i, j| to_real(self.basis_images[j])[i]);
        let inv = match m.try_inverse() {
            Some(i) => i,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for t in &self.translate_images {
            let d = to_real(x - *t);
            let c = inv * Vector4::from_fn(|i, _| d[i]);
            let bound = (self.window + 3) as f64;
            if c.iter().any(|v| !(v.abs() <= bound)) {
                continue;
            }
            // Cell corners plus one layer around them; with unit separation
            // and small reach this covers every candidate.
            let lo: Vec<i64> = (0..4).map(|i| c[i].floor() as i64 - 1).collect();
            for a in lo[0]..=lo[0] + 3 {
                for b in lo[1]..=lo[1] + 3 {
                    for e in lo[2]..=lo[2] + 3 {
                        for f in lo[3]..=lo[3] + 3 {
                            let n = [a, b, e, f];
                            if n.iter().any(|k| k.abs() > self.window) {
                                continue;
                            }
                            let q = self.lattice_point(&n, *t);
                            let dist = (x - q).max_norm();
                            if dist <= reach {
                                out.push((q, dist));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn lattice_point(&self, n: &[i64; 4], t: Point) -> Point {
        let mut q = t;
        for (k, v) in n.iter().zip(&self.basis_images) {
            q = q + v.scale(*k as f64);
        }
        q
    }
}

fn nearest_sorted(v: &[f64], y: f64) -> Option<usize> {
    if v.is_empty() {
        return None;
    }
    let i = v.partition_point(|&l| l < y);
    let best = match i {
        0 => 0,
        i if i == v.len() => v.len() - 1,
        i => if (v[i] - y).abs() < (y - v[i - 1]).abs() { i } else { i - 1 },
    };
    Some(best)
}

/// Generalized cross product: a nonzero vector orthogonal to three vectors in
/// `R^4`, via signed 3x3 cofactors.
fn orthogonal_complement(v: &[RealPoint; 3]) -> RealPoint {
    let mut u = [0.0; 4];
    for (k, uk) in u.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&c| c != k).collect();
        let m = nalgebra::Matrix3::from_fn(|i, j| v[i][cols[j]]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *uk = sign * m.determinant();
    }
    u
}

/// Normalizes the lattice so that first coordinates of `Lambda_0` lie on
/// horizontal lines at least one unit apart and distinct points are at least
/// one unit apart.
///
/// With no translates the line data is computed for the lattice itself, while
/// the window point set of `Lambda_0` stays empty.
pub fn normalize_lattice(spec: &LatticeSpec) -> Result<NormalizedLattice> {
    let constants = Constants::with_epsilon(2.0 * spec.ball_radius)?;
    let v: Vec<Point> = spec.basis.iter().map(to_point).collect();

    // u0 real-orthogonal to E = span_R(v1, v2, v3); u1 complex-orthogonal to u0.
    let u0r = orthogonal_complement(&[spec.basis[0], spec.basis[1], spec.basis[2]]);
    let n0 = u0r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u0 = to_point(&u0r.map(|x| x / n0));
    let u1 = Point::new(-u0.w.conj(), u0.z.conj());
    let a1 = Matrix2::new(u0.z, u1.z, u0.w, u1.w)
        .inverse()
        .ok_or_else(|| Error::InvalidInput("degenerate orthogonal frame".into()))?;

    // Rotate the first coordinate so that pi^1 A1(E) is the real axis.
    let first: Vec<Cx> = v[..3].iter().map(|p| a1.apply(*p).z).collect();
    let e = *first.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("three vectors");
    if e.norm() == 0.0 {
        return Err(Error::InvalidInput("basis is not of real rank 4".into()));
    }
    let rot = Cx::from_polar(1.0, -e.arg());
    let zero = Cx::new(0.0, 0.0);
    let one = Cx::new(1.0, 0.0);
    let a_pre = Matrix2::new(rot, zero, zero, one) * a1;
    let scale = first.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for p in &v[..3] {
        let im = a_pre.apply(*p).z.im;
        if im.abs() > 1e-9 * scale.max(1.0) {
            return Err(Error::InvalidInput("rotation failed to flatten the first three basis vectors".into()));
        }
    }

    let w = spec.window();
    let imgs: Vec<Point> = v.iter().map(|p| a_pre.apply(*p)).collect();
    let trans_src: Vec<Point> =
        if spec.translates.is_empty() { vec![Point::default()] } else { spec.translates.iter().map(to_point).collect() };
    let trans: Vec<Point> = trans_src.iter().map(|p| a_pre.apply(*p)).collect();

    // Shortest difference between distinct window points. Differences of
    // window coordinates range over [-2W, 2W]^4.
    let span = 2 * w.max(1);
    let mut min_dist = f64::INFINITY;
    let mut diffs = vec![Point::default()];
    for (i, ti) in trans.iter().enumerate() {
        for tj in trans.iter().skip(i + 1) {
            diffs.push(*ti - *tj);
        }
    }
    for (di, d0) in diffs.iter().enumerate() {
        for_each_coord(span, |n| {
            if di == 0 && n.iter().all(|&k| k == 0) {
                return;
            }
            let mut d = *d0;
            for (k, b) in n.iter().zip(&imgs) {
                d = d + b.scale(*k as f64);
            }
            min_dist = min_dist.min(d.norm());
        });
    }
    let tol = 1e-9 * scale.max(1.0);
    if min_dist <= tol {
        return Err(Error::InvalidInput("two translates are congruent modulo the lattice".into()));
    }

    // Levels are k mu0 + mu_j.
    let mu0 = imgs[3].z.im;
    let mus: Vec<f64> = trans.iter().map(|t| t.z.im).collect();
    let mut min_gap = f64::INFINITY;
    for mi in &mus {
        for mj in &mus {
            for k in -span..=span {
                let d = (k as f64 * mu0 + mi - mj).abs();
                if d > tol {
                    min_gap = min_gap.min(d);
                }
            }
        }
    }
    let dilation = (1.0 / min_dist).max(1.0 / min_gap);
    let s = Cx::new(dilation, 0.0);
    let a = Matrix2::new(s, zero, zero, s) * a_pre;

    let basis_images: [Point; 4] = [0, 1, 2, 3].map(|i| imgs[i].scale(dilation));
    let translate_images: Vec<Point> = trans.iter().map(|t| t.scale(dilation)).collect();
    let mut level_points = Vec::new();
    for t in &translate_images {
        for_each_coord(w, |n| {
            let mut q = *t;
            for (k, b) in n.iter().zip(&basis_images) {
                q = q + b.scale(*k as f64);
            }
            level_points.push(q);
        });
    }
    let mut levels: Vec<f64> = level_points.iter().map(|p| p.z.im).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let points = if spec.translates.is_empty() { Vec::new() } else { level_points };
    let near_axis_points = points.iter().copied().filter(|p| p.w.norm() <= NEAR_AXIS + 1e-12).collect();

    Ok(NormalizedLattice {
        a,
        dilation,
        line_levels: levels,
        near_axis_points,
        constants,
        points,
        window: w,
        basis_images,
        translate_images: if spec.translates.is_empty() { Vec::new() } else { translate_images },
        min_separation: min_dist * dilation,
        min_level_gap: min_gap * dilation,
    })
}

fn for_each_coord(w: i64, mut f: impl FnMut([i64; 4])) {
    for a in -w..=w {
        for b in -w..=w {
            for c in -w..=w {
                for d in -w..=w {
                    f([a, b, c, d]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_bound() {
        let m = Constants::max_epsilon(Constants::C, Constants::DELTA);
        assert!((m - 0.011486).abs() < 1e-6, "{m}");
        assert!(Constants::with_epsilon(0.01).is_ok());
        assert!(Constants::with_epsilon(0.012).is_err());
        assert!(Constants::with_epsilon(0.01).unwrap().smoothing_bound() <= 1.5f64.ln());
    }

    #[test]
    fn standard_lattice_has_unit_levels() {
        let spec = LatticeSpec::standard(vec![], 0.005, 3.0).unwrap();
        let nl = normalize_lattice(&spec).unwrap();
        let want: Vec<f64> = (-3..=3).map(|k| k as f64).collect();
        assert_eq!(nl.line_levels.len(), want.len());
        for (a, b) in nl.line_levels.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{:?}", nl.line_levels);
        }
        assert!((nl.dilation - 1.0).abs() < 1e-12);
        assert!(nl.points.is_empty());
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        let b = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        assert!(LatticeSpec::new(b, vec![], 0.005, 2.0).is_err());
    }

    #[test]
    fn congruent_translates_rejected() {
        let spec = LatticeSpec::standard(vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]], 0.005, 1.0).unwrap();
        assert!(normalize_lattice(&spec).is_err());
    }

    #[test]
    fn skew_lattice_is_separated() {
        let b = [[1.0, 0.2, 0.1, 0.0], [0.3, 1.1, 0.0, 0.2], [0.0, 0.4, 0.9, 0.1], [0.1, 0.0, 0.3, 1.2]];
        let spec = LatticeSpec::new(b, vec![[0.0; 4], [0.31, 0.17, 0.05, 0.42]], 0.005, 1.0).unwrap();
        let nl = normalize_lattice(&spec).unwrap();
        let pts = &nl.points;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert!((pts[i] - pts[j]).norm() >= 1.0 - 1e-9);
                let d = (pts[i].z.im - pts[j].z.im).abs();
                assert!(d <= 1e-9 || d >= 1.0 - 1e-9, "{d}");
            }
        }
    }

    #[test]
    fn window_neighbours_finds_the_point() {
        let spec = LatticeSpec::standard(vec![[0.0; 4]], 0.005, 2.0).unwrap();
        let nl = normalize_lattice(&spec).unwrap();
        let q = nl.points[17];
        let x = q + Point::new(Cx::new(0.003, 0.0), Cx::new(0.0, -0.002));
        let near = nl.window_neighbours(x, 0.01);
        assert_eq!(near.len(), 1);
        assert!((near[0].1 - 0.003).abs() < 1e-12);
    }
}
