use rayon::prelude::*;

use super::{CheckResult, SampleSpec};
use crate::error::{Error, Result};
use crate::maps::{DoubleSectionMap, HoloMap, Point};
use crate::numerics::{fd_jacobian, Cx, Matrix2, RationalFn};

/// A set the image of a map is meant to avoid.
#[derive(Debug, Clone)]
pub enum Obstacle {
    /// `{(z, s(z))}`; distance is measured vertically, `|w - s(z)|`.
    Graph(RationalFn),
    /// The two section values of a double-section map over each `z`.
    Sections(DoubleSectionMap),
    /// Closed polydisks `max(|z - c.z|, |w - c.w|) <= radius`.
    Bidisks { centers: Vec<Point>, radius: f64 },
}

impl Obstacle {
    /// Distance from `y` to the obstacle; infinite when the obstacle has no
    /// point over `y.z`.
    pub fn distance(&self, y: Point) -> f64 {
        match self {
            Obstacle::Graph(s) => {
                let v = s.eval(y.z);
                if v.re.is_finite() && v.im.is_finite() { (y.w - v).norm() } else { f64::INFINITY }
            }
            Obstacle::Sections(m) => {
                if y.w.re.is_infinite() || y.w.im.is_infinite() {
                    return f64::INFINITY;
                }
                m.section_values(y.z).iter().map(|v| (y.w - v).norm()).fold(f64::INFINITY, f64::min)
            }
            Obstacle::Bidisks { centers, radius } => {
                centers.iter().map(|c| (y - *c).max_norm() - radius).fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            Obstacle::Graph(_) => "vertical distance |w - s(z)| to the graph",
            Obstacle::Sections(_) => "distance to the nearer section value over z",
            Obstacle::Bidisks { .. } => "polydisk distance to the bidisk family",
        }
    }
}

/// Minimum distance from the image of each sample to `obstacle`.
pub fn avoidance_margin(map: &dyn HoloMap, obstacle: &Obstacle, s: &SampleSpec) -> Result<CheckResult> {
    let samples = s.points()?;
    let sections = matches!(obstacle, Obstacle::Sections(_));
    let dists: Vec<Result<f64>> = samples
        .par_iter()
        .map(|&q| {
            let y = map.eval(q);
            let ok = if sections { !y.z.re.is_nan() && !y.w.re.is_nan() && !y.w.im.is_nan() } else { y.is_finite() };
            if ok {
                Ok(obstacle.distance(y))
            } else {
                Err(Error::NonFinite { z: q.z, w: q.w })
            }
        })
        .collect();
    let mut margin = f64::INFINITY;
    for d in dists {
        margin = margin.min(d?);
    }
    Ok(CheckResult::new("avoidance", margin, 0.0, samples.len(), obstacle.describe()))
}

fn max_entry(m: &Matrix2) -> f64 {
    [m.a, m.b, m.c, m.d].iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn sub(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    Matrix2::new(a.a - b.a, a.b - b.b, a.c - b.c, a.d - b.d)
}

/// Step of the difference quotients, scaled with the point.
pub const FD_STEP: f64 = 1e-4;

/// Largest `|det DF|` over the samples, with the analytic Jacobian checked
/// against a Richardson-extrapolated central difference. Passes when the
/// largest determinant is positive and the relative deviation is below `1e-6`.
pub fn jacobian_report(map: &dyn HoloMap, s: &SampleSpec) -> Result<CheckResult> {
    let samples = s.points()?;
    let per: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&q| {
            let j = map.jacobian(q);
            let h = FD_STEP * (1.0 + q.max_norm());
            let dev = match (fd_jacobian(map, q, h), fd_jacobian(map, q, h / 2.0)) {
                (Ok(a), Ok(b)) => {
                    let r = Matrix2::new(
                        (b.a * 4.0 - a.a) / 3.0,
                        (b.b * 4.0 - a.b) / 3.0,
                        (b.c * 4.0 - a.c) / 3.0,
                        (b.d * 4.0 - a.d) / 3.0,
                    );
                    max_entry(&sub(&j, &r)) / max_entry(&j).max(f64::MIN_POSITIVE)
                }
                _ => f64::NAN,
            };
            (j.det().norm(), dev)
        })
        .collect();
    let max_det = per.iter().map(|t| t.0).fold(0.0, f64::max);
    let min_det = per.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    // Points where a difference quotient left the domain are skipped.
    let fd: Vec<f64> = per.iter().map(|t| t.1).filter(|d| !d.is_nan()).collect();
    let dev = fd.iter().copied().fold(0.0, f64::max);
    let mut c = CheckResult::new(
        "jacobian",
        max_det,
        0.0,
        samples.len(),
        format!(
            "max |det| (min {min_det:e}); analytic vs FD relative deviation {dev:e} over {} points",
            fd.len()
        ),
    );
    c.pass &= dev < 1e-6 && !fd.is_empty();
    Ok(c)
}

/// `eval(inverse(t))` against `t` for each target; targets without a preimage
/// are skipped and counted.
pub fn preimage_roundtrip(map: &dyn HoloMap, targets: &SampleSpec) -> Result<CheckResult> {
    if !map.has_inverse() {
        return Err(Error::InvalidInput(format!("{} has no inverse", map.description())));
    }
    let pts = targets.points()?;
    let per: Vec<Option<f64>> = pts
        .par_iter()
        .map(|&t| map.inverse(t).map(|q| (map.eval(q) - t).norm()))
        .collect();
    let skipped = per.iter().filter(|r| r.is_none()).count();
    let worst = per.iter().flatten().map(|r| if r.is_nan() { f64::INFINITY } else { *r }).fold(0.0, f64::max);
    Ok(CheckResult::new(
        "roundtrip",
        -worst,
        -1e-9,
        pts.len() - skipped,
        format!("max |eval(preimage(t)) - t|; {skipped} target(s) without preimage skipped"),
    ))
}

/// Images of the fibers over `points` must each be a single point: margin is
/// minus the largest spread.
pub fn fiber_collapse(map: &dyn HoloMap, points: &[Cx], s: &SampleSpec) -> Result<CheckResult> {
    if points.is_empty() {
        return Ok(CheckResult::vacuous("fiber-collapse", "no exceptional fibers"));
    }
    let ws = s.points()?;
    let mut spread = 0.0f64;
    for &a in points {
        let base = map.eval(Point::new(a, Cx::new(0.0, 0.0)));
        for q in &ws {
            let y = map.eval(Point::new(a, q.w));
            spread = spread.max((y - base).norm());
        }
    }
    Ok(CheckResult::new(
        "fiber-collapse",
        -spread,
        -1e-9,
        ws.len() * points.len(),
        "minus the largest image spread over an exceptional fiber",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{build_graph_complement_map, Identity, PsiMap};
    use crate::numerics::Poly;

    struct Constant;
    impl HoloMap for Constant {
        fn eval(&self, _p: Point) -> Point {
            Point::default()
        }
        fn jacobian(&self, _p: Point) -> Matrix2 {
            Matrix2::new(Cx::new(0.0, 0.0), Cx::new(0.0, 0.0), Cx::new(0.0, 0.0), Cx::new(0.0, 0.0))
        }
        fn description(&self) -> String {
            "0".into()
        }
    }

    fn far_samples() -> SampleSpec {
        SampleSpec {
            count: 200,
            region: super::super::Region::Polydisk {
                center_z: Cx::new(3.0, 0.0),
                center_w: Cx::new(3.0, 0.0),
                radius_z: 0.5,
                radius_w: 0.5,
            },
            seed: 1,
        }
    }

    #[test]
    fn identity_against_unit_bidisk() {
        let obs = Obstacle::Bidisks { centers: vec![Point::default()], radius: 1.0 };
        let c = avoidance_margin(&Identity, &obs, &far_samples()).unwrap();
        assert!(c.pass && c.margin >= 1.5 && c.margin < 2.0);
        let pts = far_samples().points().unwrap();
        let direct = pts.iter().map(|p| p.max_norm() - 1.0).fold(f64::INFINITY, f64::min);
        assert_eq!(c.margin, direct);
    }

    #[test]
    fn constant_map_on_obstacle_fails() {
        let obs = Obstacle::Bidisks { centers: vec![Point::default()], radius: 0.1 };
        let c = avoidance_margin(&Constant, &obs, &far_samples()).unwrap();
        assert!(!c.pass);
        let j = jacobian_report(&Constant, &far_samples()).unwrap();
        assert_eq!(j.margin, 0.0);
        assert!(!j.pass);
    }

    #[test]
    fn graph_complement_avoids_graph() {
        let s = RationalFn::new(Poly::one(), Poly::z()).unwrap();
        let m = build_graph_complement_map(&s).unwrap();
        let c = avoidance_margin(&m, &Obstacle::Graph(s), &SampleSpec::polydisk(10_000, 1.0, 42)).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn identity_jacobian_and_roundtrip() {
        let s = SampleSpec::polydisk(100, 1.0, 3);
        let j = jacobian_report(&Identity, &s).unwrap();
        assert_eq!(j.margin, 1.0);
        assert!(j.pass);
        let r = preimage_roundtrip(&Identity, &s).unwrap();
        assert_eq!(r.margin, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn psi_roundtrip_skips_the_omitted_value() {
        let mut s = SampleSpec::polydisk(1000, 1.0, 4);
        let r = preimage_roundtrip(&PsiMap, &s).unwrap();
        assert!(r.pass && r.samples == 1000, "{r:?}");
        s.region = super::super::Region::Grid { lo: [1.0, 0.0, -1.0, 0.0], hi: [1.0, 0.0, -1.0, 0.0], resolution: 1 };
        s.count = 1;
        let r = preimage_roundtrip(&PsiMap, &s).unwrap();
        assert_eq!(r.samples, 0);
        assert!(r.detail.contains("1 target"));
    }
}
