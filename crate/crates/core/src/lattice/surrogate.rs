//! Polynomial stand-ins for entire functions with prescribed behaviour on a
//! windowed sample domain.
//!
//! Fits use the Arnoldi-orthogonalized Vandermonde basis on the sample
//! points, so the polynomial is stored as its Hessenberg recurrence rather
//! than monomial coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Cx, Poly};

/// Where a surrogate is fitted and certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleDomain {
    /// Closed disks of a common radius.
    Disks { centers: Vec<Cx>, radius: f64 },
    /// Horizontal strips `|Im z - level| <= half_width`, `Re z` in `x_range`.
    Strips { levels: Vec<f64>, x_range: (f64, f64), half_width: f64 },
}

const DISK_RING: usize = 8;
const DENSE_RING: usize = 17;

impl SampleDomain {
    pub fn describe(&self) -> String {
        match self {
            SampleDomain::Disks { centers, radius } => format!("{} disks of radius {radius}", centers.len()),
            SampleDomain::Strips { levels, x_range, half_width } => format!(
                "{} strips of half-width {half_width} over x in [{}, {}]",
                levels.len(),
                x_range.0,
                x_range.1
            ),
        }
    }

    /// Fit sample: disk centers plus rings at half and full radius; strips on
    /// a grid with three rows per strip.
    pub fn fit_samples(&self) -> Vec<Cx> {
        match self {
            SampleDomain::Disks { centers, radius } => {
                let mut out = Vec::with_capacity(centers.len() * (2 * DISK_RING + 1));
                for &c in centers {
                    out.push(c);
                    for (rho, n) in [(0.5, DISK_RING), (1.0, DISK_RING)] {
                        out.extend(ring(c, rho * radius, n, 0.0));
                    }
                }
                out
            }
            SampleDomain::Strips { levels, x_range, half_width } => {
                strip_grid(levels, *x_range, *half_width, 1.0, &[-1.0, 0.0, 1.0])
            }
        }
    }

    /// Certification sample: four times denser than the fit sample and
    /// disjoint from it.
    pub fn dense_samples(&self) -> Vec<Cx> {
        match self {
            SampleDomain::Disks { centers, radius } => {
                let mut out = Vec::with_capacity(centers.len() * 4 * DENSE_RING);
                for &c in centers {
                    for (k, rho) in [0.3, 0.6, 0.85, 1.0].into_iter().enumerate() {
                        let phase = (k as f64 + 0.5) / (4.0 * DENSE_RING as f64);
                        out.extend(ring(c, rho * radius, DENSE_RING, phase));
                    }
                }
                out
            }
            SampleDomain::Strips { levels, x_range, half_width } => {
                strip_grid(levels, *x_range, *half_width, 0.25, &[-1.0, -0.5, 0.25, 0.75])
            }
        }
    }
}

fn ring(c: Cx, rho: f64, n: usize, phase: f64) -> impl Iterator<Item = Cx> {
    (0..n).map(move |k| c + Cx::from_polar(rho, std::f64::consts::TAU * (k as f64 / n as f64 + phase)))
}

/// Grid of spacing `half_width * spacing_factor`, shifted by half a step when
/// the factor is below one so the two grids never share a point.
fn strip_grid(levels: &[f64], x: (f64, f64), hw: f64, factor: f64, rows: &[f64]) -> Vec<Cx> {
    let step = (hw * factor).max(1e-6);
    let shift = if factor < 1.0 { 0.5 * step } else { 0.0 };
    let n = ((x.1 - x.0 - shift) / step).floor().max(0.0) as usize + 1;
    let mut out = Vec::with_capacity(levels.len() * n * rows.len());
    for &l in levels {
        for i in 0..n {
            let re = x.0 + shift + i as f64 * step;
            for &t in rows {
                out.push(Cx::new(re, l + t * hw));
            }
        }
    }
    out
}

/// A polynomial in Arnoldi form: basis `q_0 = 1`,
/// `h_{k+1,k} q_{k+1}(z) = z q_k(z) - sum_{j<=k} h_{j,k} q_j(z)`, and value
/// `sum d_k q_k(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArnoldiPoly {
    /// Column `k` holds `h_{0,k}, ..., h_{k+1,k}`.
    hessenberg: Vec<Vec<Cx>>,
    coeffs: Vec<Cx>,
    /// Added to the value; used for one-sided lifts.
    offset: Cx,
}

impl ArnoldiPoly {
    pub fn constant(c: Cx) -> Self {
        ArnoldiPoly { hessenberg: Vec::new(), coeffs: vec![c], offset: Cx::new(0.0, 0.0) }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn offset(&self) -> Cx {
        self.offset
    }

    fn basis(&self, z: Cx) -> Vec<Cx> {
        let n = self.degree();
        let mut q = Vec::with_capacity(n + 1);
        q.push(Cx::new(1.0, 0.0));
        for k in 0..n {
            let col = &self.hessenberg[k];
            let mut v = z * q[k];
            for (j, h) in col.iter().take(k + 1).enumerate() {
                v -= h * q[j];
            }
            q.push(v / col[k + 1]);
        }
        q
    }

    pub fn eval(&self, z: Cx) -> Cx {
        let q = self.basis(z);
        q.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum::<Cx>() + self.offset
    }

    /// Value and derivative.
    pub fn eval_d(&self, z: Cx) -> (Cx, Cx) {
        let n = self.degree();
        let mut q = vec![Cx::new(1.0, 0.0)];
        let mut dq = vec![Cx::new(0.0, 0.0)];
        for k in 0..n {
            let col = &self.hessenberg[k];
            let mut v = z * q[k];
            let mut dv = q[k] + z * dq[k];
            for (j, h) in col.iter().take(k + 1).enumerate() {
                v -= h * q[j];
                dv -= h * dq[j];
            }
            q.push(v / col[k + 1]);
            dq.push(dv / col[k + 1]);
        }
        let val = q.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum::<Cx>() + self.offset;
        let der = dq.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum();
        (val, der)
    }

    /// Monomial coefficients. Ill-conditioned for large degree or large
    /// sample domains; intended for small fits.
    pub fn to_poly(&self) -> Poly {
        let n = self.degree();
        let mut q: Vec<Poly> = vec![Poly::one()];
        for k in 0..n {
            let col = &self.hessenberg[k];
            let mut v = &Poly::z() * &q[k];
            for (j, h) in col.iter().take(k + 1).enumerate() {
                v = &v - &q[j].scale_by(*h);
            }
            q.push(v.scale_by(Cx::new(1.0, 0.0) / col[k + 1]));
        }
        let mut out = Poly::constant(self.offset);
        for (qk, d) in q.iter().zip(&self.coeffs) {
            out = &out + &qk.scale_by(*d);
        }
        out
    }

    fn truncated(&self, degree: usize) -> ArnoldiPoly {
        ArnoldiPoly {
            hessenberg: self.hessenberg[..degree].to_vec(),
            coeffs: self.coeffs[..=degree].to_vec(),
            offset: self.offset,
        }
    }
}

/// Least-squares fit of `values` at `z` with every degree up to `cap`.
/// Returns the full-degree fit; truncations are the lower-degree fits.
fn arnoldi_fit(z: &[Cx], values: &[Cx], cap: usize) -> ArnoldiPoly {
    let m = z.len();
    let cap = cap.min(m.saturating_sub(1));
    let mf = m as f64;
    let dot = |a: &[Cx], b: &[Cx]| -> Cx { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Cx>() / mf };
    let mut q: Vec<Vec<Cx>> = vec![vec![Cx::new(1.0, 0.0); m]];
    let mut hess: Vec<Vec<Cx>> = Vec::new();
    for k in 0..cap {
        let mut v: Vec<Cx> = z.iter().zip(&q[k]).map(|(a, b)| a * b).collect();
        let mut col = vec![Cx::new(0.0, 0.0); k + 2];
        for _ in 0..2 {
            for j in 0..=k {
                let c = dot(&q[j], &v);
                col[j] += c;
                for (vi, qi) in v.iter_mut().zip(&q[j]) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = (v.iter().map(|x| x.norm_sqr()).sum::<f64>() / mf).sqrt();
        if !(nrm > 1e-13) {
            break;
        }
        col[k + 1] = Cx::new(nrm, 0.0);
        hess.push(col);
        q.push(v.into_iter().map(|x| x / nrm).collect());
    }
    let coeffs = q.iter().map(|qk| dot(qk, values)).collect();
    ArnoldiPoly { hessenberg: hess, coeffs, offset: Cx::new(0.0, 0.0) }
}

/// For every truncation degree `0..=n`: `max |p_k - t|` and `min Re(p_k - t)`
/// over the points.
fn truncation_errors(p: &ArnoldiPoly, z: &[Cx], t: &[Cx]) -> Vec<(f64, f64)> {
    let n = p.degree();
    let per_point: Vec<Vec<Cx>> = z
        .par_iter()
        .zip(t.par_iter())
        .map(|(&zi, &ti)| {
            let q = p.basis(zi);
            let mut s = p.offset;
            q.iter()
                .zip(&p.coeffs)
                .map(|(a, b)| {
                    s += a * b;
                    s - ti
                })
                .collect()
        })
        .collect();
    (0..=n)
        .map(|k| {
            per_point.iter().fold((0.0f64, f64::INFINITY), |(sup, lo), d| {
                let e = d[k];
                (sup.max(if e.re.is_finite() && e.im.is_finite() { e.norm() } else { f64::INFINITY }), lo.min(e.re))
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateBound {
    /// `|h - target| <= budget`.
    TwoSided,
    /// `Re(h - target) >= -budget`.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireSurrogate {
    pub approximant: ArnoldiPoly,
    pub sample_domain: String,
    /// `max |h - target|` on the certification sample.
    pub certified_sup_error: f64,
    /// `min Re(h - target)` on the certification sample.
    pub certified_min_re_diff: f64,
    pub error_budget: f64,
    pub bound: SurrogateBound,
    /// Constant added after the least-squares fit (lower-bound surrogates).
    pub lift: f64,
    pub fit_samples: usize,
    pub certification_samples: usize,
}

impl EntireSurrogate {
    /// Exactly zero, certified vacuously.
    pub fn zero(budget: f64, bound: SurrogateBound) -> Self {
        EntireSurrogate {
            approximant: ArnoldiPoly::constant(Cx::new(0.0, 0.0)),
            sample_domain: "empty".into(),
            certified_sup_error: 0.0,
            certified_min_re_diff: 0.0,
            error_budget: budget,
            bound,
            lift: 0.0,
            fit_samples: 0,
            certification_samples: 0,
        }
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.approximant.eval(z)
    }

    pub fn eval_d(&self, z: Cx) -> (Cx, Cx) {
        self.approximant.eval_d(z)
    }

    pub fn degree(&self) -> usize {
        self.approximant.degree()
    }

    /// Margin of the budget inequality on the certification sample; positive
    /// or zero when accepted.
    pub fn budget_margin(&self) -> f64 {
        match self.bound {
            SurrogateBound::TwoSided => self.error_budget - self.certified_sup_error,
            SurrogateBound::LowerBound => self.certified_min_re_diff + self.error_budget,
        }
    }

    pub fn accepted(&self) -> bool {
        self.budget_margin() >= 0.0
    }
}

/// Two-sided fit: the lowest degree whose fit error is within budget and whose
/// certification error is too. When no degree up to `degree_cap` qualifies,
/// the best candidate is returned unaccepted.
pub fn fit_two_sided(
    target: &(dyn Fn(Cx) -> Cx + Sync),
    domain: &SampleDomain,
    budget: f64,
    degree_cap: usize,
) -> EntireSurrogate {
    let zf = domain.fit_samples();
    let zd = domain.dense_samples();
    if zf.is_empty() {
        return EntireSurrogate::zero(budget, SurrogateBound::TwoSided);
    }
    let tf: Vec<Cx> = zf.par_iter().map(|&z| target(z)).collect();
    let td: Vec<Cx> = zd.par_iter().map(|&z| target(z)).collect();
    let full = arnoldi_fit(&zf, &tf, degree_cap);
    let fit_err = truncation_errors(&full, &zf, &tf);
    let dense_err = truncation_errors(&full, &zd, &td);
    let chosen = (0..fit_err.len())
        .find(|&k| fit_err[k].0 <= budget && dense_err[k].0 <= budget)
        .unwrap_or_else(|| {
            (0..dense_err.len())
                .min_by(|&a, &b| dense_err[a].0.total_cmp(&dense_err[b].0))
                .unwrap_or(0)
        });
    EntireSurrogate {
        approximant: full.truncated(chosen),
        sample_domain: domain.describe(),
        certified_sup_error: dense_err[chosen].0,
        certified_min_re_diff: dense_err[chosen].1,
        error_budget: budget,
        bound: SurrogateBound::TwoSided,
        lift: 0.0,
        fit_samples: zf.len(),
        certification_samples: zd.len(),
    }
}

/// Least-squares fit within `budget` in sup norm on a dense independent
/// sample; an error carrying the best achieved error otherwise.
pub fn surrogate_entire(
    target: &(dyn Fn(Cx) -> Cx + Sync),
    domain: &SampleDomain,
    budget: f64,
    degree_cap: usize,
) -> Result<EntireSurrogate> {
    if !(budget > 0.0) {
        return Err(Error::InvalidInput(format!("budget must be positive, got {budget}")));
    }
    let s = fit_two_sided(target, domain, budget, degree_cap);
    if s.accepted() {
        Ok(s)
    } else {
        Err(Error::SurrogateBudget { budget, best: s.certified_sup_error, degree: s.degree() })
    }
}

/// One-sided surrogate: `Re(h - target) >= -slack`.
///
/// For each degree in increasing order the least-squares fit is lifted by the
/// real constant that puts `Re(h - target)` at or above `-0.9 slack` on the
/// fit sample; the first degree whose lifted fit also holds on the dense
/// sample is taken. Low degree keeps `h` small away from the sample domain.
pub fn fit_lower_bound(
    target: &(dyn Fn(Cx) -> Cx + Sync),
    domain: &SampleDomain,
    slack: f64,
    degree_cap: usize,
) -> EntireSurrogate {
    let zf = domain.fit_samples();
    let zd = domain.dense_samples();
    if zf.is_empty() {
        return EntireSurrogate::zero(slack, SurrogateBound::LowerBound);
    }
    let tf: Vec<Cx> = zf.par_iter().map(|&z| target(z)).collect();
    let td: Vec<Cx> = zd.par_iter().map(|&z| target(z)).collect();
    let full = arnoldi_fit(&zf, &tf, degree_cap);
    let fit_err = truncation_errors(&full, &zf, &tf);
    let dense_err = truncation_errors(&full, &zd, &td);
    let lift = |k: usize| (-0.9 * slack - fit_err[k].1).max(0.0);
    let k = (0..fit_err.len())
        .find(|&k| dense_err[k].1 + lift(k) >= -slack)
        .unwrap_or_else(|| {
            (0..dense_err.len())
                .max_by(|&a, &b| (dense_err[a].1 + lift(a)).total_cmp(&(dense_err[b].1 + lift(b))))
                .unwrap_or(0)
        });
    let mut approximant = full.truncated(k);
    approximant.offset = Cx::new(lift(k), 0.0);
    let dense = truncation_errors(&approximant, &zd, &td);
    EntireSurrogate {
        approximant,
        sample_domain: domain.describe(),
        certified_sup_error: dense[k].0,
        certified_min_re_diff: dense[k].1,
        error_budget: slack,
        bound: SurrogateBound::LowerBound,
        lift: lift(k),
        fit_samples: zf.len(),
        certification_samples: zd.len(),
    }
}

pub fn surrogate_lower_bound(
    target: &(dyn Fn(Cx) -> Cx + Sync),
    domain: &SampleDomain,
    slack: f64,
    degree_cap: usize,
) -> Result<EntireSurrogate> {
    if !(slack > 0.0) {
        return Err(Error::InvalidInput(format!("slack must be positive, got {slack}")));
    }
    let s = fit_lower_bound(target, domain, slack, degree_cap);
    if s.accepted() {
        Ok(s)
    } else {
        Err(Error::SurrogateBudget { budget: slack, best: -s.certified_min_re_diff, degree: s.degree() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::smoother::{strip_smoother, StepProfile};

    fn disks(n: i32, radius: f64) -> SampleDomain {
        SampleDomain::Disks { centers: (-n..=n).map(|k| Cx::new(k as f64, 0.0)).collect(), radius }
    }

    #[test]
    fn polynomial_target_is_reproduced() {
        let p = Poly::new(vec![Cx::new(1.0, -1.0), Cx::new(0.5, 0.0), Cx::new(0.0, 0.25), Cx::new(-0.1, 0.0)]);
        let target = |z: Cx| p.eval(z);
        let s = surrogate_entire(&target, &disks(3, 0.1), 1e-9, 8).unwrap();
        assert!(s.certified_sup_error <= 1e-9);
        let back = s.approximant.to_poly();
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let target = |z: Cx| (z * 0.3).exp();
        let s = surrogate_entire(&target, &disks(2, 0.2), 1e-6, 20).unwrap();
        let z = Cx::new(0.7, 0.05);
        let h = 1e-6;
        let fd = (s.eval(z + h) - s.eval(z - h)) / (2.0 * h);
        assert!((s.eval_d(z).1 - fd).norm() < 1e-7);
    }

    #[test]
    fn unattainable_budget_reports_best_error() {
        let target = |z: Cx| if z.re > 0.0 { Cx::new(1.0, 0.0) } else { Cx::new(0.0, 0.0) };
        match surrogate_entire(&target, &disks(4, 0.3), 1e-30, 6) {
            Err(Error::SurrogateBudget { best, .. }) => assert!(best > 1e-30),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn smoothed_step_on_window_disks() {
        // One zero interval at the origin, disks at the integer window points.
        let c = 32f64.ln();
        let prof = StepProfile::new(0.0, vec![(-0.125, 0.125)], c).unwrap();
        let target = |z: Cx| strip_smoother(&prof, 0.01, z).unwrap();
        let s = surrogate_entire(&target, &disks(6, 0.005), (4.0f64 / 3.0).ln(), 64).unwrap();
        assert!(s.certified_sup_error <= (4.0f64 / 3.0).ln());
    }

    #[test]
    fn lower_bound_lift() {
        let target = |z: Cx| Cx::new((1.0 + z.norm_sqr()).ln(), 0.0);
        let dom = SampleDomain::Disks {
            centers: (-3..=3).flat_map(|a| (-3..=3).map(move |b| Cx::new(a as f64, b as f64))).collect(),
            radius: 0.005,
        };
        let s = surrogate_lower_bound(&target, &dom, 1.0, 6).unwrap();
        assert!(s.certified_min_re_diff >= -1.0);
        assert!(s.lift >= 0.0);
    }

    #[test]
    fn strip_samples_are_disjoint() {
        let d = SampleDomain::Strips { levels: vec![0.0, 1.0], x_range: (-1.0, 1.0), half_width: 0.01 };
        let f = d.fit_samples();
        let g = d.dense_samples();
        assert!(g.len() >= 4 * f.len() - 16);
        assert!(f.iter().all(|a| g.iter().all(|b| (a - b).norm() > 1e-9)));
    }
}
