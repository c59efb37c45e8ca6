//! The shears `(z, w) -> (z, (w - c) exp(h(z)))` and their windowed
//! certification against the normalized lattice.

use std::sync::Arc;

use rayon::prelude::*;

use super::surrogate::EntireSurrogate;
use super::NormalizedLattice;
use crate::error::{Error, Result};
use crate::harness::CheckResult;
use crate::maps::{HoloMap, Point};
use crate::numerics::{Cx, Matrix2};

/// Relaxation of the F1 thresholds: `1/3` and `9/16` are each moved by the
/// effect of a 10% haircut of the `log(4/3)` budget on the factor `1/3`.
pub fn eta() -> f64 {
    ((4.0f64 / 3.0).powf(0.1) - 1.0) / 3.0
}

/// Relaxation of the F2 growth bound: the 10% haircut of the unit budget.
pub fn eta_prime() -> f64 {
    0.1f64.exp() - 1.0
}

/// `(z, w) -> (z, (w - offset) exp(h(z)))`.
#[derive(Clone)]
pub struct ExpShear {
    pub h: Arc<EntireSurrogate>,
    pub offset: Cx,
    pub label: String,
}

impl ExpShear {
    pub fn new(h: EntireSurrogate, offset: Cx, label: impl Into<String>) -> Self {
        ExpShear { h: Arc::new(h), offset, label: label.into() }
    }
}

impl HoloMap for ExpShear {
    fn eval(&self, p: Point) -> Point {
        Point::new(p.z, (p.w - self.offset) * self.h.eval(p.z).exp())
    }

    fn jacobian(&self, p: Point) -> Matrix2 {
        let (h, dh) = self.h.eval_d(p.z);
        let e = h.exp();
        Matrix2::new(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0), (p.w - self.offset) * e * dh, e)
    }

    fn inverse(&self, p: Point) -> Option<Point> {
        Some(Point::new(p.z, p.w * (-self.h.eval(p.z)).exp() + self.offset))
    }

    fn has_inverse(&self) -> bool {
        true
    }

    fn description(&self) -> String {
        format!("{}: (z, (w - {}) exp(h(z))), deg h = {}", self.label, self.offset, self.h.degree())
    }
}

/// Bounds on `Re h` over the closed disk `|z - c| <= r`.
#[derive(Debug, Clone, Copy)]
struct DiskBounds {
    max_re: f64,
    min_re: f64,
}

/// Samples the center, 8 points at `r/2` and 16 at `r`; every point of the
/// disk is within `0.3 r` of a sample, so the sampled extremes are padded by
/// `0.5 r` times 1.5 the largest sampled `|h'|`.
fn disk_bounds(h: &EntireSurrogate, c: Cx, r: f64) -> DiskBounds {
    let mut pts = vec![c];
    for (rho, n) in [(0.5 * r, 8), (r, 16)] {
        pts.extend((0..n).map(|k| c + Cx::from_polar(rho, std::f64::consts::TAU * k as f64 / n as f64)));
    }
    let (mut hi, mut lo, mut dmax) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for z in pts {
        let (v, d) = h.eval_d(z);
        hi = hi.max(v.re);
        lo = lo.min(v.re);
        dmax = dmax.max(d.norm());
    }
    let pad = 0.5 * r * 1.5 * dmax;
    DiskBounds { max_re: hi + pad, min_re: lo - pad }
}

/// Outcome of the F1 dichotomy over the window.
#[derive(Debug, Clone)]
pub struct F1Certificate {
    pub dichotomy: CheckResult,
    pub line_distance: CheckResult,
    /// Per window point: lower bound on `|pi^2 F1(p) - 1/2|` over its bidisk.
    pub distances: Vec<f64>,
    /// Indices of window points violating either inequality.
    pub violators: Vec<usize>,
}

/// Outcome of the F2 growth bound over the window.
#[derive(Debug, Clone)]
pub struct F2Certificate {
    pub growth: CheckResult,
    pub outside_v: CheckResult,
    pub violators: Vec<usize>,
}

/// Checks `|pi^2 F1(p)| <= 1/3 + eta` or `>= 9/16 - eta` on every window
/// bidisk, and distance `>= 1/16 - eta` from `C x {1/2}`.
pub fn certify_f1(nl: &NormalizedLattice, f1: &ExpShear) -> F1Certificate {
    let r = nl.constants.r;
    let eta = eta();
    let n = nl.points.len();
    if n == 0 {
        return F1Certificate {
            dichotomy: CheckResult::vacuous("F1/dichotomy", "no window points"),
            line_distance: CheckResult::vacuous("F1/line-distance", "no window points"),
            distances: Vec::new(),
            violators: Vec::new(),
        };
    }
    let per: Vec<(f64, f64, f64)> = nl
        .points
        .par_iter()
        .map(|q| {
            let b = disk_bounds(&f1.h, q.z, r);
            let aw = q.w.norm();
            let upper = (aw + r) * b.max_re.exp();
            let lower = (aw - r).max(0.0) * b.min_re.exp();
            let small = (1.0 / 3.0 + eta) - upper;
            let large = lower - (9.0 / 16.0 - eta);
            let dist = if small >= large { 0.5 - upper } else { lower - 0.5 };
            (small.max(large), dist, dist - (1.0 / 16.0 - eta))
        })
        .collect();
    let dich = per.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let line = per.iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
    let violators: Vec<usize> = (0..n).filter(|&i| !(per[i].0 > 0.0 && per[i].2 > 0.0)).collect();
    F1Certificate {
        dichotomy: CheckResult::new(
            "F1/dichotomy",
            dich,
            0.0,
            n,
            format!("|w'| <= 1/3 + eta or >= 9/16 - eta, eta = {eta:.6}"),
        ),
        line_distance: CheckResult::new("F1/line-distance", line, 0.0, n, "dist to C x {1/2} minus (1/16 - eta)"),
        distances: per.iter().map(|t| t.1).collect(),
        violators,
    }
}

/// Checks `|pi^2 F2(p)| >= 1 + |pi^1 F2(p)|^2 - eta'` on the F1 images of
/// the window bidisks, given their distances from `C x {1/2}`.
pub fn certify_f2(nl: &NormalizedLattice, distances: &[f64], f2: &ExpShear) -> F2Certificate {
    let r = nl.constants.r;
    let etap = eta_prime();
    let n = nl.points.len();
    if n == 0 {
        return F2Certificate {
            growth: CheckResult::vacuous("F2/growth-bound", "no window points"),
            outside_v: CheckResult::vacuous("F2/outside-V", "no window points"),
            violators: Vec::new(),
        };
    }
    let per: Vec<(f64, f64)> = nl
        .points
        .par_iter()
        .zip(distances.par_iter())
        .map(|(q, &d)| {
            let b = disk_bounds(&f2.h, q.z, r);
            let zmax = q.z.norm() + r;
            let bound = d.max(0.0) * b.min_re.exp();
            (bound - (1.0 + zmax * zmax - etap), bound - (1.0 + zmax * zmax))
        })
        .collect();
    let growth = per.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let outside = per.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    F2Certificate {
        growth: CheckResult::new("F2/growth-bound", growth, 0.0, n, format!("eta' = {etap:.6}")),
        outside_v: CheckResult::new("F2/outside-V", outside, 0.0, n, "|w| - (1 + |z|^2) over the image bidisks"),
        violators: (0..n).filter(|&i| !(per[i].0 > 0.0)).collect(),
    }
}

fn violation(stage: &str, nl: &NormalizedLattice, idx: &[usize]) -> Error {
    let shown: Vec<String> = idx.iter().take(8).map(|&i| format!("{:?}", nl.points[i])).collect();
    Error::Certification {
        stage: stage.into(),
        detail: format!("{} window point(s) violate: {}", idx.len(), shown.join(", ")),
    }
}

/// `F1(z, w) = (z, w exp(h(z)))`, certified on the window.
pub fn build_f1(nl: &NormalizedLattice, h: EntireSurrogate) -> Result<(ExpShear, F1Certificate)> {
    if !h.accepted() {
        return Err(Error::SurrogateBudget { budget: h.error_budget, best: h.certified_sup_error, degree: h.degree() });
    }
    let f1 = ExpShear::new(h, Cx::new(0.0, 0.0), "F1");
    let cert = certify_f1(nl, &f1);
    if !cert.violators.is_empty() {
        return Err(violation("F1", nl, &cert.violators));
    }
    Ok((f1, cert))
}

/// `F2(z, w) = (z, (w - 1/2) exp(h2(z)))`, certified on the F1 images of the
/// window.
pub fn build_f2(nl: &NormalizedLattice, f1: &ExpShear, h2: EntireSurrogate) -> Result<(ExpShear, F2Certificate)> {
    if !h2.accepted() {
        return Err(Error::SurrogateBudget { budget: h2.error_budget, best: -h2.certified_min_re_diff, degree: h2.degree() });
    }
    let c1 = certify_f1(nl, f1);
    let f2 = ExpShear::new(h2, Cx::new(0.5, 0.0), "F2");
    let cert = certify_f2(nl, &c1.distances, &f2);
    if !cert.violators.is_empty() {
        return Err(violation("F2", nl, &cert.violators));
    }
    Ok((f2, cert))
}

/// `log((z - i gamma)^2 + (|gamma| + r)^2 + 1 + eps^2) + 1 + log 16` with the
/// principal log; its argument has positive real part on the strip about
/// `gamma`.
pub fn g2(z: Cx, gamma: f64, r: f64, eps: f64) -> Cx {
    let d = z - Cx::new(0.0, gamma);
    let s = (gamma.abs() + r).powi(2) + 1.0 + eps * eps;
    (d * d + s).ln() + 1.0 + 16f64.ln()
}
