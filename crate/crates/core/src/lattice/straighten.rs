//! Shear `(z, w) -> (f(w) z, w)` making `|pi^1| >= |pi^2|` on a discrete
//! set whose second coordinates lie on finitely many vertical lines.

use std::collections::BTreeMap;

use serde::Serialize;

use super::surrogate::{fit_lower_bound, EntireSurrogate, SampleDomain};
use super::NormalizedLattice;
use crate::error::{Error, Result};
use crate::harness::{CheckResult, VerificationReport};
use crate::maps::{HoloMap, Point};
use crate::numerics::{Cx, Matrix2};

/// Slack of the `g ~ log f0` approximation.
pub const LOG_F0_SLACK: f64 = std::f64::consts::LN_2;

const DISK_RADIUS: f64 = 0.01;
const KEY: f64 = 1e8;

/// Relaxation of `|f(w) z| >= |w|`: the 10% haircut of the `log 2` slack.
pub fn growth_relaxation(w: Cx) -> f64 {
    (1.0 - 2f64.powf(-0.1)) * w.norm()
}

fn key(x: f64) -> i64 {
    (x * KEY).round() as i64
}

/// Piecewise-linear `log f0` on each vertical line `Re w = c`.
#[derive(Debug, Clone, Serialize)]
pub struct LogF0 {
    /// Line `Re w` key to sorted `(Im w, log r2)` nodes.
    lines: BTreeMap<i64, Vec<(f64, f64)>>,
}

impl LogF0 {
    /// Interpolates along the line nearest to `Re w`; constant beyond the end
    /// nodes, and `log 2` where there are no nodes.
    pub fn at(&self, w: Cx) -> f64 {
        let k = key(w.re);
        let line = self
            .lines
            .range(..=k)
            .next_back()
            .into_iter()
            .chain(self.lines.range(k..).next())
            .min_by_key(|(lk, _)| (*lk - k).abs())
            .map(|(_, v)| v);
        let nodes = match line {
            Some(v) if !v.is_empty() => v,
            _ => return LOG_F0_SLACK,
        };
        let y = w.im;
        let i = nodes.partition_point(|n| n.0 < y);
        let v = if i == 0 {
            nodes[0].1
        } else if i == nodes.len() {
            nodes[nodes.len() - 1].1
        } else {
            let (a, b) = (nodes[i - 1], nodes[i]);
            let t = (y - a.0) / (b.0 - a.0);
            a.1 + t * (b.1 - a.1)
        };
        v.max(LOG_F0_SLACK)
    }
}

/// `r1(w) = |w| / min{|z| : (z, w) in set, z != 0}` (zero when every point
/// over `w` has `z = 0`), and `log f0` through `log 2(r1 + 1)`.
pub fn log_f0(points: &[Point]) -> (LogF0, Vec<(Cx, f64)>) {
    let mut min_z: BTreeMap<(i64, i64), (Cx, f64)> = BTreeMap::new();
    for p in points {
        let e = min_z.entry((key(p.w.re), key(p.w.im))).or_insert((p.w, f64::INFINITY));
        if p.z.norm() > 0.0 {
            e.1 = e.1.min(p.z.norm());
        }
    }
    let r1: Vec<(Cx, f64)> = min_z
        .values()
        .map(|&(w, m)| (w, if m.is_finite() { w.norm() / m } else { 0.0 }))
        .collect();
    let mut lines: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    for &(w, r) in &r1 {
        lines.entry(key(w.re)).or_default().push((w.im, (2.0 * (r + 1.0)).ln()));
    }
    for v in lines.values_mut() {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    (LogF0 { lines }, r1)
}

/// `p -> F(T p)` with `T` the coordinate change and `F(z, w) = (e^{g(w)} z, w)`.
#[derive(Clone, Serialize)]
pub struct TameStraightening {
    pub surrogate: EntireSurrogate,
    /// Linear change of coordinates applied before the shear.
    pub coordinates: Matrix2,
    /// Scale making the first coordinates of the image 1-separated.
    pub dilation: f64,
    pub log_f0: LogF0,
}

impl TameStraightening {
    fn factor(&self, w: Cx) -> Cx {
        self.surrogate.eval(w).exp()
    }
}

impl HoloMap for TameStraightening {
    fn eval(&self, p: Point) -> Point {
        let q = self.coordinates.apply(p);
        Point::new(self.factor(q.w) * q.z, q.w)
    }

    fn jacobian(&self, p: Point) -> Matrix2 {
        let q = self.coordinates.apply(p);
        let (g, dg) = self.surrogate.eval_d(q.w);
        let e = g.exp();
        Matrix2::new(e, q.z * e * dg, Cx::new(0.0, 0.0), Cx::new(1.0, 0.0)) * self.coordinates
    }

    fn inverse(&self, p: Point) -> Option<Point> {
        let q = Point::new(p.z / self.factor(p.w), p.w);
        Some(self.coordinates.inverse()?.apply(q))
    }

    fn has_inverse(&self) -> bool {
        self.coordinates.inverse().is_some()
    }

    fn description(&self) -> String {
        format!("tame straightening (e^g(w) z, w), deg g = {}", self.surrogate.degree())
    }
}

/// Closest distance between distinct values, by sorting on the real part
/// and sweeping. Values closer than `1e-12` count as equal.
pub fn min_distinct_distance(values: &[Cx]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[j].re - v[i].re >= best {
                break;
            }
            let d = (v[j] - v[i]).norm();
            if d > 1e-12 {
                best = best.min(d);
            }
        }
    }
    best
}

/// Builds the shear for `points` given in coordinates where the second
/// coordinates lie on vertical lines, after the linear change `coordinates`.
/// The report records every check; nothing fails early.
pub fn straighten_points(
    points: &[Point],
    coordinates: Matrix2,
    degree_cap: usize,
) -> (TameStraightening, VerificationReport) {
    let (lf0, r1) = log_f0(points);
    let centers: Vec<Cx> = r1.iter().map(|t| t.0).collect();
    let domain = SampleDomain::Disks { centers, radius: DISK_RADIUS };
    let target = |w: Cx| Cx::new(lf0.at(w), 0.0);
    let g = fit_lower_bound(&target, &domain, LOG_F0_SLACK, degree_cap);

    let mut report = VerificationReport::new("straighten_tame", 0.0);
    report.push(CheckResult::new(
        "straighten/surrogate",
        g.budget_margin(),
        0.0,
        g.certification_samples,
        format!("Re(g - log f0) >= -log 2, degree {}", g.degree()),
    ));
    report.constant("degree", g.degree() as f64);
    report.constant("lift", g.lift);

    let mut map = TameStraightening { surrogate: g, coordinates: Matrix2::identity(), dilation: 1.0, log_f0: lf0 };
    let off_axis: Vec<&Point> = points.iter().filter(|p| p.z.norm() > 0.0).collect();
    if off_axis.is_empty() {
        report.push(CheckResult::vacuous("straighten/growth", "no points off {z = 0}"));
    } else {
        let margin = off_axis
            .iter()
            .map(|p| (map.factor(p.w) * p.z).norm() - (p.w.norm() - growth_relaxation(p.w)))
            .fold(f64::INFINITY, f64::min);
        report.push(CheckResult::new(
            "straighten/growth",
            margin,
            0.0,
            off_axis.len(),
            "|f(w) z| - (|w| - eta)",
        ));
    }
    let firsts: Vec<Cx> = points.iter().map(|p| map.factor(p.w) * p.z).collect();
    let sep = min_distinct_distance(&firsts);
    map.dilation = if sep.is_finite() { (1.0 / sep).max(1.0) } else { 1.0 };
    report.constant("dilation", map.dilation);
    report.push(if sep.is_finite() {
        CheckResult::new(
            "straighten/separation",
            sep * map.dilation - (1.0 - 1e-9),
            0.0,
            points.len(),
            "min distance of dilated first coordinates minus 1",
        )
    } else {
        CheckResult::vacuous("straighten/separation", "fewer than two distinct first coordinates")
    });
    map.coordinates = coordinates;
    (map, report)
}

/// `(z', w') = (pi^2 A p, -i pi^1 A p)`: lines `R + i gamma` in the first
/// coordinate become vertical lines in the second.
pub fn straightening_coordinates(nl: &NormalizedLattice) -> Matrix2 {
    let mi = Cx::new(0.0, -1.0);
    let a = nl.a;
    Matrix2::new(a.c, a.d, mi * a.a, mi * a.b)
}

/// Shear certified on the normalized window; the returned map acts on the
/// original coordinates.
pub fn straighten_tame(nl: &NormalizedLattice, degree_cap: usize) -> Result<(TameStraightening, VerificationReport)> {
    let t = straightening_coordinates(nl);
    let ai = nl.a_inverse();
    let pts: Vec<Point> = nl.points.iter().map(|p| t.apply(ai.apply(*p))).collect();
    let (map, mut report) = straighten_points(&pts, t, degree_cap);
    report.window = nl.window as f64;
    if let Some(c) = report.failures().first() {
        let stage = c.name.clone();
        if stage == "straighten/surrogate" {
            let s = &map.surrogate;
            return Err(Error::SurrogateBudget { budget: s.error_budget, best: -s.certified_min_re_diff, degree: s.degree() });
        }
        return Err(Error::Certification { stage, detail: format!("margin {}", c.margin) });
    }
    Ok((map, report))
}
