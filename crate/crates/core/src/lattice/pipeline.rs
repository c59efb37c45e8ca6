//! The lattice-avoiding injection `F = A^{-1} . F1^{-1} . F2^{-1} . (Psi / R)`
//! and its windowed verification.

use std::sync::Arc;

use nalgebra::Vector4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::henon::{henon_basin_map, v_margin};
use super::shears::{certify_f1, certify_f2, eta, eta_prime, g2, ExpShear};
use super::smoother::{step_profiles, strip_smoother};
use super::surrogate::{fit_lower_bound, fit_two_sided, EntireSurrogate, SampleDomain};
use super::{normalize_lattice, to_point, to_real, LatticeSpec, NormalizedLattice};
use crate::error::{Error, Result};
use crate::harness::{CheckResult, SampleSpec, VerificationReport};
use crate::maps::{Compose, HoloMap, Inverted, Linear, MapRef, Point};
use crate::numerics::{Cx, Matrix2};

pub const PIPELINE_ID: &str = "torus_avoidance";
/// Slack of the `h2` lower bound.
pub const H2_SLACK: f64 = 1.0;
/// Two sample images closer than this count as a collision.
pub const COLLISION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub degree_cap: usize,
    pub samples: usize,
    pub seed: u64,
    /// Polydisk radius of the domain samples.
    pub sample_radius: f64,
    pub henon_n_max: usize,
    pub henon_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { degree_cap: 64, samples: 10_000, seed: 42, sample_radius: 1.0, henon_n_max: 60, henon_tol: 1e-10 }
    }
}

pub fn h_budget() -> f64 {
    (4.0f64 / 3.0).ln()
}

/// Operator norm of `m` for the polydisk (max) norm.
fn max_norm_operator(m: &Matrix2) -> f64 {
    (m.a.norm() + m.b.norm()).max(m.c.norm() + m.d.norm())
}

/// Runs every stage and records every check; only malformed input and a
/// non-converging basin map are errors. Failed fits are carried forward with
/// their best candidate so later checks still run.
pub fn torus_avoidance_report(spec: &LatticeSpec, opts: &PipelineOptions) -> Result<(MapRef, VerificationReport)> {
    let nl = normalize_lattice(spec)?;
    let mut report = VerificationReport::new(PIPELINE_ID, nl.window as f64);
    let k = nl.constants;
    for (name, v) in [("C", k.c), ("delta", k.delta), ("epsilon", k.epsilon), ("r", k.r), ("dilation", nl.dilation)] {
        report.constant(name, v);
    }
    report.constant("eta", eta());
    report.constant("eta_prime", eta_prime());
    report.push(CheckResult::new(
        "normalize/separation",
        nl.min_separation - (1.0 - 1e-9),
        0.0,
        nl.points.len(),
        "min distance between distinct window points minus 1",
    ));
    report.push(CheckResult::new(
        "normalize/line-gaps",
        nl.min_level_gap - (1.0 - 1e-9),
        0.0,
        nl.line_levels.len(),
        "min nonzero gap between line levels minus 1",
    ));

    let basin = Arc::new(henon_basin_map(opts.henon_n_max, opts.henon_tol)?);
    report.constant("basin_iterations", basin.iterations_used as f64);
    report.constant("basin_residual", basin.convergence_residual);
    report.constant("R", basin.scale);
    report.push(CheckResult::new(
        "basin/convergence",
        opts.henon_tol - basin.convergence_residual,
        0.0,
        basin.grid_points,
        "tol minus max |Psi_n - Psi_{n-1}| on the grid",
    ));

    let samples = SampleSpec::polydisk(opts.samples, opts.sample_radius, opts.seed).points()?;
    let phi_images: Vec<Point> = samples.par_iter().map(|&q| basin.eval(q)).collect();
    report.push(CheckResult::new(
        "basin/in-V",
        phi_images.iter().map(|&p| v_margin(p)).fold(f64::INFINITY, f64::min),
        0.0,
        samples.len(),
        "(1 + |z|^2) - |w| at Psi/R images",
    ));

    if nl.points.is_empty() {
        // Nothing to avoid: the basin map is the answer.
        let f: MapRef = basin;
        report.push(CheckResult::vacuous("avoidance", "empty lattice"));
        push_map_checks(&mut report, &f, &samples);
        return Ok((f, report));
    }

    let (h, h2) = fit_shear_surrogates(&nl, opts.degree_cap);
    report.constant("degree_h", h.degree() as f64);
    report.push(CheckResult::new(
        "surrogate/h",
        h.budget_margin(),
        0.0,
        h.certification_samples,
        format!("log(4/3) - max |h - g|, degree {}", h.degree()),
    ));
    let f1 = ExpShear::new(h, Cx::new(0.0, 0.0), "F1");
    let c1 = certify_f1(&nl, &f1);
    report.push(c1.dichotomy.clone());
    report.push(c1.line_distance.clone());

    report.constant("degree_h2", h2.degree() as f64);
    report.constant("lift_h2", h2.lift);
    report.push(CheckResult::new(
        "surrogate/h2",
        h2.budget_margin(),
        0.0,
        h2.certification_samples,
        format!("min Re(h2 - g2) + 1, degree {}", h2.degree()),
    ));
    let f2 = ExpShear::new(h2, Cx::new(0.5, 0.0), "F2");
    let c2 = certify_f2(&nl, &c1.distances, &f2);
    report.push(c2.growth.clone());
    report.push(c2.outside_v.clone());

    let f1: MapRef = Arc::new(f1);
    let f2: MapRef = Arc::new(f2);
    let a_inv: MapRef = Arc::new(Linear::new(nl.a_inverse()));
    let normalized =
        Compose::chain(vec![Arc::new(Inverted(f1.clone())), Arc::new(Inverted(f2.clone())), basin.clone()]);
    let f = Compose::chain(vec![a_inv, normalized.clone()]);

    let norm_images: Vec<Point> = phi_images
        .par_iter()
        .map(|&p| {
            let q = f2.inverse(p).expect("shear inverse");
            f1.inverse(q).expect("shear inverse")
        })
        .collect();
    report.push(avoidance_check(&nl, &norm_images));
    push_map_checks(&mut report, &f, &samples);
    report.push(automorphism_check("automorphism/F1", &f1, &samples));
    report.push(automorphism_check("automorphism/F2", &f2, &samples));

    let images: Vec<Point> = samples.par_iter().map(|&q| f.eval(q)).collect();
    let r_orig = k.r / max_norm_operator(&nl.a);
    let mut quotient = quotient_margins(spec, &images, r_orig);
    quotient.detail = format!("{}; radius {r_orig} in original coordinates", quotient.detail);
    report.push(quotient);
    Ok((f, report))
}

/// Surrogates for the two shear exponents on the window disks: `h` two-sided
/// against the strip smoothing, `h2` bounded below by `g2 - 1`. A fit that
/// misses its budget is returned unaccepted.
pub fn fit_shear_surrogates(nl: &NormalizedLattice, degree_cap: usize) -> (EntireSurrogate, EntireSurrogate) {
    let k = nl.constants;
    let (centers, _) = nl.first_coordinates();
    let domain = SampleDomain::Disks { centers, radius: k.r };
    let profiles = step_profiles(nl);
    let level_of = |z: Cx| nl.nearest_level(z.im).expect("window has levels");
    let h_target = |z: Cx| {
        let p = &profiles[level_of(z)];
        strip_smoother(p, k.epsilon, z).unwrap_or(Cx::new(f64::NAN, f64::NAN))
    };
    let h = fit_two_sided(&h_target, &domain, h_budget(), degree_cap);
    let h2_target = |z: Cx| g2(z, nl.line_levels[level_of(z)], k.r, k.epsilon);
    let h2 = fit_lower_bound(&h2_target, &domain, H2_SLACK, degree_cap);
    (h, h2)
}

/// Default options; the first failing check becomes an error naming its stage.
pub fn torus_avoidance_pipeline(spec: &LatticeSpec) -> Result<(MapRef, VerificationReport)> {
    let (f, report) = torus_avoidance_report(spec, &PipelineOptions::default())?;
    if let Some(c) = report.failures().first() {
        return Err(Error::Certification {
            stage: c.name.clone(),
            detail: format!("margin {} (threshold {}): {}", c.margin, c.threshold, c.detail),
        });
    }
    Ok((f, report))
}

/// Polydisk distance from each normalized image to the windowed bidisks,
/// minus their radius.
fn avoidance_check(nl: &NormalizedLattice, images: &[Point]) -> CheckResult {
    let r = nl.constants.r;
    let reach = 1.0;
    let margin = images
        .par_iter()
        .map(|&x| {
            if !x.is_finite() {
                return f64::NEG_INFINITY;
            }
            nl.window_neighbours(x, reach).iter().map(|t| t.1 - r).fold(reach - r, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    CheckResult::new("avoidance", margin, 0.0, images.len(), "polydisk distance to windowed bidisks minus r")
}

/// Jacobian witness, injectivity spot-check and round trip for the composed map.
fn push_map_checks(report: &mut VerificationReport, f: &MapRef, samples: &[Point]) {
    let dets: Vec<f64> = samples.par_iter().map(|&q| f.jacobian(q).det().norm()).collect();
    let min_det = dets.iter().copied().fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) });
    report.push(CheckResult::new("jacobian", min_det, 0.0, samples.len(), "min |det DF| over samples"));

    let images: Vec<Point> = samples.par_iter().map(|&q| f.eval(q)).collect();
    let closest = closest_pair(&images);
    report.push(CheckResult::new(
        "injectivity",
        closest - COLLISION,
        0.0,
        images.len(),
        format!("closest pair of images minus {COLLISION}"),
    ));

    let err = samples
        .par_iter()
        .zip(images.par_iter())
        .map(|(&q, &p)| match f.inverse(p) {
            Some(back) if back.is_finite() => (back - q).norm() / (1.0 + q.norm()),
            _ => f64::INFINITY,
        })
        .reduce(|| 0.0, f64::max);
    report.push(CheckResult::new("roundtrip", 1e-6 - err, 0.0, samples.len(), "1e-6 minus max relative |F^{-1}(F(q)) - q|"));
}

fn automorphism_check(name: &str, f: &MapRef, samples: &[Point]) -> CheckResult {
    let err = samples
        .par_iter()
        .map(|&q| match f.inverse(f.eval(q)) {
            Some(b) => (b - q).norm() / (1.0 + q.norm()),
            None => f64::INFINITY,
        })
        .reduce(|| 0.0, f64::max);
    CheckResult::new(name, 1e-9 - err, 0.0, samples.len(), "1e-9 minus max relative |F^{-1}(F(q)) - q|")
}

/// Euclidean closest distance among points, by sorting on `Re z` and
/// sweeping.
pub fn closest_pair(points: &[Point]) -> f64 {
    let mut v: Vec<Point> = points.to_vec();
    v.sort_by(|a, b| a.z.re.total_cmp(&b.z.re));
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[j].z.re - v[i].z.re >= best {
                break;
            }
            best = best.min((v[j] - v[i]).norm());
        }
    }
    best
}

/// Polydisk distance from each sample to the nearest point of each translate
/// class modulo the lattice, minus `radius`.
fn quotient_margins(spec: &LatticeSpec, samples: &[Point], radius: f64) -> CheckResult {
    if spec.translates.is_empty() {
        return CheckResult::vacuous("quotient", "no translates");
    }
    let b = spec.real_basis();
    let margin = samples
        .par_iter()
        .map(|&x| {
            let xr = to_real(x);
            spec.translates
                .iter()
                .map(|t| match spec.lattice_coords(&xr, t) {
                    Some(c) => class_distance(&b, &xr, t, &c) - radius,
                    None => f64::NEG_INFINITY,
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    CheckResult::new("quotient", margin, 0.0, samples.len() * spec.translates.len(), "quotient distance to translate classes minus r")
}

/// Polydisk distance from `x` to `t + Lambda`, searching the lattice points
/// around the rounded coordinates `c` of `x - t`.
fn class_distance(b: &nalgebra::Matrix4<f64>, x: &[f64; 4], t: &[f64; 4], c: &[f64; 4]) -> f64 {
    let base: Vec<f64> = c.iter().map(|v| v.round()).collect();
    let mut best = f64::INFINITY;
    for k in 0..81usize {
        let off = [(k % 3) as f64 - 1.0, ((k / 3) % 3) as f64 - 1.0, ((k / 9) % 3) as f64 - 1.0, (k / 27) as f64 - 1.0];
        let n = Vector4::from_fn(|i, _| base[i] + off[i]);
        let l = b * n;
        let q = [t[0] + l[0], t[1] + l[1], t[2] + l[2], t[3] + l[3]];
        best = best.min((to_point(x) - to_point(&q)).max_norm());
    }
    best
}

/// Reduces each sample modulo the lattice and reports its margin against the
/// radius-`r` polydisks about the translates.
pub fn quotient_avoidance_check(spec: &LatticeSpec, samples: &[Point]) -> VerificationReport {
    let mut report = VerificationReport::new("quotient_avoidance", spec.window() as f64);
    report.constant("r", spec.ball_radius);
    report.push(quotient_margins(spec, samples, spec.ball_radius));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PipelineOptions {
        PipelineOptions { samples: 500, ..PipelineOptions::default() }
    }

    #[test]
    fn empty_lattice_is_the_basin_map() {
        let spec = LatticeSpec::standard(vec![], 0.005, 2.0).unwrap();
        let (f, report) = torus_avoidance_report(&spec, &quick()).unwrap();
        assert!(report.overall_pass, "{:#?}", report.failures());
        assert_eq!(report.check("avoidance").unwrap().samples, 0);
        assert!(report.check("jacobian").unwrap().margin > 0.0);
        let q = Point::new(Cx::new(0.2, 0.1), Cx::new(-0.3, 0.0));
        let basin = henon_basin_map(60, 1e-10).unwrap();
        assert_eq!(f.eval(q), basin.eval(q));
    }

    #[test]
    fn standard_lattice_small_window() {
        let spec = LatticeSpec::standard(vec![[0.0; 4]], 0.005, 2.0).unwrap();
        let (_, report) = torus_avoidance_report(&spec, &quick()).unwrap();
        assert!(report.overall_pass, "{}", report.to_json());
        assert!(report.check("F1/dichotomy").unwrap().margin >= 1.0 / 48.0);
    }

    #[test]
    fn quotient_margins_by_hand() {
        let spec = LatticeSpec::standard(vec![[0.0; 4]], 0.005, 2.0).unwrap();
        let at = quotient_avoidance_check(&spec, &[Point::new(Cx::new(3.0, -1.0), Cx::new(0.0, 2.0))]);
        assert!(!at.overall_pass);
        let off = Point::new(Cx::new(0.105, 0.0), Cx::new(0.0, 0.0));
        let m = quotient_avoidance_check(&spec, &[off]).checks[0].margin;
        assert!((m - 0.1).abs() < 1e-12, "{m}");
    }

    #[test]
    fn closest_pair_matches_brute_force() {
        let pts = SampleSpec::polydisk(300, 1.0, 5).points().unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                brute = brute.min((pts[i] - pts[j]).norm());
            }
        }
        assert_eq!(closest_pair(&pts), brute);
    }
}
