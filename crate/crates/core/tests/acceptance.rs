//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! are always printed; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use c2dom::classifier::{classify_elliptic_fibration, orbifold_chi, Orbifold};
use c2dom::cli::{classify, ClassifyKind};
use c2dom::lattice::henon::{certification_grid, halving_steps, henon, linear_part, v_margin};
use c2dom::lattice::surrogate::{fit_two_sided, SampleDomain};
use c2dom::lattice::{
    fit_shear_surrogates, henon_basin_map, normalize_lattice, straighten_tame, strip_smoother,
    torus_avoidance_report, ExpShear, LatticeSpec, PipelineOptions, StepProfile,
};
use c2dom::maps::{
    build_double_section_map, build_exceptional_shear, build_graph_complement_map, graph_complement_preimage, psi,
    psi_preimage, DoubleSection, HoloMap, Point, Shear,
};
use c2dom::numerics::{adaptive_quad, Cx, Poly, RationalFn};
use num_rational::Ratio;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Rng = ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn rand_cx(rng: &mut Rng, r: f64) -> Cx {
    loop {
        let z = c(rng.random_range(-r..r), rng.random_range(-r..r));
        if z.norm() <= r {
            return z;
        }
    }
}

fn rand_poly(rng: &mut Rng, degree: usize, r: f64) -> Poly {
    let mut k: Vec<Cx> = (0..=degree).map(|_| rand_cx(rng, r)).collect();
    if k[degree].norm() < 0.2 {
        k[degree] = c(0.5, 0.0);
    }
    Poly::new(k)
}

fn standard_spec(window: f64) -> LatticeSpec {
    LatticeSpec::standard(vec![[0.0; 4]], 0.005, window).unwrap()
}

// 1. Exact orbifold Euler characteristic against an lcm-denominator
// evaluation, and the sign test.
fn chi_oracle() -> Outcome {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let mut rng = Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut verdicts = 0;
    for _ in 0..10_000 {
        let genus = rng.random_range(0..=5u32);
        let punctures = rng.random_range(0..=6u32);
        let k = rng.random_range(0..=6usize);
        let mults: Vec<u32> = (0..k).map(|_| rng.random_range(2..=12u32)).collect();
        let o = Orbifold::new(genus, punctures, mults.clone()).unwrap();
        let l = mults.iter().fold(1i128, |acc, &n| acc / gcd(acc, n as i128) * n as i128);
        let mut num = (2 - 2 * genus as i128 - punctures as i128) * l;
        for &n in &mults {
            num -= l - l / n as i128;
        }
        let chi = orbifold_chi(&o);
        if chi != Ratio::new(num, l) {
            mismatches += 1;
        }
        let v = classify_elliptic_fibration(&o, true, true);
        let marked = punctures as usize + mults.len();
        let expect = if genus == 0 && (1..=2).contains(&marked) { true } else { num >= 0 };
        if v.is_dominable() != expect {
            verdicts += 1;
        }
    }
    outcome(mismatches == 0 && verdicts == 0, format!("{mismatches} chi mismatches, {verdicts} verdict mismatches in 10^4"))
}

// 2. Fixture table of descriptors with their expected outcomes.
fn verdict_table() -> Outcome {
    let text = include_str!("fixtures/verdict_table.json");
    let rows: Vec<serde_json::Value> = serde_json::from_str(text).unwrap();
    let mut bad = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let kind = match row["kind"].as_str().unwrap() {
            "orbifold" => ClassifyKind::Orbifold,
            "p2" => ClassifyKind::P2,
            "surface" => ClassifyKind::Surface,
            k => panic!("row {i}: unknown kind {k}"),
        };
        let v = match classify(kind, &row["input"].to_string()) {
            Ok(v) => serde_json::to_value(v).unwrap(),
            Err(e) => {
                bad.push(format!("row {i}: {e}"));
                continue;
            }
        };
        if v["outcome"] != row["outcome"] || (row.get("cover_type").is_some() && v["cover_type"] != row["cover_type"]) {
            bad.push(format!("row {i} ({}): got {v}", row["source"]));
        }
    }
    outcome(rows.len() >= 25 && bad.is_empty(), format!("{} rows, {} mismatches {:?}", rows.len(), bad.len(), bad))
}

// 3. psi and graph-complement preimages; omitted values rejected.
fn roundtrips() -> Outcome {
    let mut rng = Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut rejected = 0;
    let mut trials = 0;
    for _ in 0..1000 {
        let t = rand_cx(&mut rng, 2.0);
        let w = rand_cx(&mut rng, 2.0);
        let target = psi(t, w);
        let back = psi_preimage(t, target).unwrap();
        worst = worst.max((psi(t, back) - target).norm() / target.norm().max(1.0));
        let target = rand_cx(&mut rng, 3.0);
        if let Ok(back) = psi_preimage(t, target) {
            worst = worst.max((psi(t, back) - target).norm() / target.norm().max(1.0));
        }
        trials += 1;
        if t.norm() > 1e-3 && psi_preimage(t, -1.0 / t).is_err() {
            rejected += 1;
        }
    }
    let psi_worst = worst;
    let mut gc_rejected = 0;
    let mut gc_trials = 0;
    for _ in 0..10 {
        let den_deg = rng.random_range(1..=3usize);
        let s = loop {
            let num_deg = rng.random_range(0..=3usize);
            if let Ok(s) = RationalFn::new(rand_poly(&mut rng, num_deg, 1.0), rand_poly(&mut rng, den_deg, 1.0)) {
                break s;
            }
        };
        let m = build_graph_complement_map(&s).unwrap();
        for _ in 0..100 {
            let z = rand_cx(&mut rng, 1.5);
            if s.den().eval(z).norm() < 1e-3 {
                continue;
            }
            let w = rand_cx(&mut rng, 1.0);
            let target = m.eval(Point::new(z, w)).w;
            let back = graph_complement_preimage(&m, z, target).unwrap();
            worst = worst.max((m.eval(Point::new(z, back)).w - target).norm() / target.norm().max(1.0));
            gc_trials += 1;
            if graph_complement_preimage(&m, z, s.eval(z)).is_err() {
                gc_rejected += 1;
            }
        }
    }
    let pass = worst < 1e-9 && rejected == trials && gc_rejected == gc_trials;
    outcome(
        pass,
        format!(
            "max residual {worst:.2e} (psi {psi_worst:.2e}); omitted rejected {rejected}/{trials} psi, {gc_rejected}/{gc_trials} graph"
        ),
    )
}

/// Laurent coefficients `c_{-1} .. c_{-m}` of `r` at `a`, by the
/// trapezoidal rule on the circle `|z - a| = rho`.
fn principal_part(r: impl Fn(Cx) -> Cx, a: Cx, m: usize, rho: f64) -> Vec<Cx> {
    let n = 512;
    let samples: Vec<(Cx, Cx)> = (0..n)
        .map(|j| {
            let dz = Cx::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
            (dz, r(a + dz))
        })
        .collect();
    // c_{-k} = (1/2 pi i) \oint r (z - a)^(k-1) dz = mean of r (z - a)^k.
    (1..=m).map(|k| samples.iter().map(|(dz, v)| v * dz.powu(k as u32)).sum::<Cx>() / n as f64).collect()
}

// 4. 1/g - s has no principal part at the poles of s.
fn principal_parts() -> Outcome {
    let mut rng = Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut poles_checked = 0;
    for _ in 0..100 {
        let mut poles: Vec<(Cx, usize)> = Vec::new();
        let mut deg = 0;
        let want = rng.random_range(1..=6usize);
        while deg < want {
            let m = if deg + 2 <= want && rng.random::<f64>() < 0.5 { 2 } else { 1 };
            let a = rand_cx(&mut rng, 1.5);
            if poles.iter().all(|(b, _)| (a - b).norm() > 0.4) {
                poles.push((a, m));
                deg += m;
            }
        }
        let roots: Vec<Cx> = poles.iter().flat_map(|&(a, m)| std::iter::repeat_n(a, m)).collect();
        let den = Poly::from_roots(&roots);
        let num = loop {
            let deg = rng.random_range(0..=6usize);
            let p = rand_poly(&mut rng, deg, 1.0);
            if poles.iter().all(|(a, _)| p.eval(*a).norm() > 0.1) {
                break p;
            }
        };
        let s = RationalFn::new(num, den).unwrap();
        let map = build_graph_complement_map(&s).unwrap();
        for &(a, m) in &poles {
            let r = |z: Cx| 1.0 / map.g(z) - s.eval(z);
            // Scale: size of the principal part of s itself.
            let scale = principal_part(|z| s.eval(z), a, m, 0.02).iter().map(|x| x.norm()).fold(1.0, f64::max);
            for coef in principal_part(r, a, m, 0.02) {
                worst = worst.max(coef.norm() / scale);
            }
            poles_checked += 1;
        }
    }
    outcome(worst < 1e-7, format!("max relative principal-part coefficient {worst:.2e} over {poles_checked} poles"))
}

// 5. Double-section images keep away from both section values; the branch
// fiber is the limit of nearby fibers.
fn double_sections() -> Outcome {
    let mut rng = Rng::seed_from_u64(5);
    let mut min_dist = f64::INFINITY;
    let mut branch_dev = 0.0f64;
    for _ in 0..50 {
        let (dp, dh) = (rng.random_range(0..=2usize), rng.random_range(0..=2usize));
        let p = rand_poly(&mut rng, dp, 1.0);
        let h = rand_poly(&mut rng, dh, 1.0);
        let roots: Vec<Cx> = (0..rng.random_range(1..=2usize)).map(|_| rand_cx(&mut rng, 0.8)).collect();
        let g = Poly::from_roots(&roots);
        let d = DoubleSection::new(Some(p.clone()), h.clone(), g.clone(), vec![]).unwrap();
        let map = build_double_section_map(&d).unwrap();
        let pts: Vec<(Cx, Cx)> = (0..10_000).map(|_| (rand_cx(&mut rng, 1.0), rand_cx(&mut rng, 1.0))).collect();
        let local = pts
            .par_iter()
            .filter_map(|&(z, w)| {
                let gz = g.eval(z);
                if gz.norm() < 1e-9 {
                    return None;
                }
                let y = map.eval(Point::new(z, w)).w;
                if !(y.re.is_finite() && y.im.is_finite()) {
                    return None;
                }
                let (pz, hz, rt) = (p.eval(z), h.eval(z), gz.sqrt());
                Some((y - pz * (hz + rt)).norm().min((y - pz * (hz - rt)).norm()))
            })
            .reduce(|| f64::INFINITY, f64::min);
        min_dist = min_dist.min(local);
        for &b in &roots {
            for k in 0..10 {
                let dir = Cx::from_polar(1.0, 2.0 * PI * k as f64 / 10.0);
                let w = rand_cx(&mut rng, 1.0) + c(0.2, 0.0);
                let limit = p.eval(b) * h.eval(b) + 1.0 / w;
                let near = map.eval(Point::new(b + dir * 1e-8, w)).w;
                branch_dev = branch_dev.max((near - limit).norm() / limit.norm().max(1.0));
            }
        }
    }
    outcome(
        min_dist > 1e-6 && branch_dev < 1e-6,
        format!("min distance to sections {min_dist:.2e}; branch limit deviation {branch_dev:.2e}"),
    )
}

// 6. Strip smoothing: closed form vs quadrature, positivity, and the
// smoothing bound at constancy points.
fn smoother() -> Outcome {
    let cc = 32f64.ln();
    let eps = 0.01;
    let delta = 1.0 / 16.0;
    let mut rng = Rng::seed_from_u64(6);
    let cases: Vec<(StepProfile, Cx)> = (0..1000)
        .map(|_| {
            let n = rng.random_range(0..=3usize);
            let iv: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let a = rng.random_range(-3.0..3.0);
                    (a, a + rng.random_range(0.0..1.5))
                })
                .collect();
            let level = rng.random_range(-2.0..2.0f64).round();
            let z = c(rng.random_range(-4.0..4.0), level + rng.random_range(-0.95..0.95) * eps);
            (StepProfile::new(level, iv, cc).unwrap(), z)
        })
        .collect();
    let res: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .map(|(p, z)| {
            let g = strip_smoother(p, eps, *z).unwrap();
            let zp = *z - c(0.0, p.line_level);
            let kernel = |x: f64| c(eps, 0.0) / ((c(x, 0.0) - zp) * (c(x, 0.0) - zp) + eps * eps) / PI;
            // The profile equals C beyond |x| = 40; those tails integrate the
            // kernel exactly.
            let tail = |x: f64| cc / PI * (c(PI / 2.0, 0.0) - ((c(x, 0.0) - zp) / eps).atan());
            // Split at the profile jumps and around the kernel peak near
            // Re z', which a single starting panel on [-40, 40] can miss.
            let mut cuts: Vec<f64> = vec![-40.0, 40.0];
            cuts.extend(p.pieces().iter().flat_map(|&(a, b, _)| [a, b]).filter(|x| x.abs() < 40.0));
            cuts.extend([0.0, 1e-3, 1e-2, 1e-1, -1e-3, -1e-2, -1e-1].map(|h| zp.re + h));
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut q = Cx::new(0.0, 0.0);
            for pair in cuts.windows(2) {
                if pair[1] > pair[0] {
                    q += adaptive_quad(|x| kernel(x) * p.at(x), pair[0], pair[1], 1e-13).unwrap();
                }
            }
            let q = q
                + tail(40.0)
                + cc / PI * (((c(-40.0, 0.0) - zp) / eps).atan() + c(PI / 2.0, 0.0));
            let bound = if p.constancy_radius(z.re) >= delta {
                (g - p.at(z.re)).norm() - (2.0 * cc * eps / (PI * delta) + 1e-8)
            } else {
                f64::NEG_INFINITY
            };
            ((g - q).norm(), g.re, bound)
        })
        .collect();
    let quad = res.iter().map(|t| t.0).fold(0.0, f64::max);
    let min_re = res.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let bound = res.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        quad < 1e-8 && min_re >= -1e-12 && bound <= 0.0,
        format!("max |closed - quad| {quad:.2e}; min Re g {min_re:.3e}; worst bound excess {bound:.3e}"),
    )
}

// 7. The assembled injection on the standard lattice, window 5.
fn pipeline_w5() -> Outcome {
    let spec = standard_spec(5.0);
    let opts = PipelineOptions::default();
    let (f, report) = match torus_avoidance_report(&spec, &opts) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("pipeline error: {e}")),
    };
    let names = ["F1/dichotomy", "F2/growth-bound", "avoidance", "jacobian", "injectivity"];
    let failed: Vec<&str> = names.iter().copied().filter(|n| !report.check(n).is_some_and(|c| c.pass)).collect();

    // Second route: sample each window bidisk and evaluate the shears
    // directly instead of bounding them.
    let nl = normalize_lattice(&spec).unwrap();
    let (h, h2) = fit_shear_surrogates(&nl, opts.degree_cap);
    let f1 = ExpShear::new(h, c(0.0, 0.0), "F1");
    let f2 = ExpShear::new(h2, c(0.5, 0.0), "F2");
    let (eta, etap) = (((4.0f64 / 3.0).powf(0.1) - 1.0) / 3.0, 0.1f64.exp() - 1.0);
    let r = nl.constants.r;
    let mut rng = Rng::seed_from_u64(7);
    let offsets: Vec<Point> = (0..16).map(|_| Point::new(rand_cx(&mut rng, r), rand_cx(&mut rng, r))).collect();
    let (mut dich, mut growth) = (f64::INFINITY, f64::INFINITY);
    for q in &nl.points {
        for o in std::iter::once(&Point::default()).chain(&offsets) {
            let y = f1.eval(*q + *o);
            let a = y.w.norm();
            dich = dich.min(((1.0 / 3.0 + eta) - a).max(a - (9.0 / 16.0 - eta)));
            let u = f2.eval(y);
            growth = growth.min(u.w.norm() - (1.0 + u.z.norm_sqr() - etap));
        }
    }

    // Avoidance of the windowed bidisks, measured in normalized coordinates
    // against lattice points found by rounding.
    let samples = c2dom::harness::SampleSpec::polydisk(opts.samples, opts.sample_radius, opts.seed).points().unwrap();
    let images: Vec<Point> = samples.par_iter().map(|&q| f.eval(q)).collect();
    let w = spec.window() as f64;
    let a = nl.a;
    let avoid = images
        .par_iter()
        .map(|y| {
            let coords = [y.z.re, y.z.im, y.w.re, y.w.im];
            let mut best = f64::INFINITY;
            for k in 0..81usize {
                let mut lam = [0.0; 4];
                let mut k2 = k;
                for (i, l) in lam.iter_mut().enumerate() {
                    *l = coords[i].round() + (k2 % 3) as f64 - 1.0;
                    k2 /= 3;
                }
                if lam.iter().any(|v| v.abs() > w) {
                    continue;
                }
                let d = *y - Point::new(c(lam[0], lam[1]), c(lam[2], lam[3]));
                best = best.min(a.apply(d).max_norm() - r);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);

    let mut sorted: Vec<Point> = images.clone();
    sorted.sort_by(|p, q| p.z.re.total_cmp(&q.z.re));
    let mut closest = f64::INFINITY;
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[j].z.re - sorted[i].z.re >= closest {
                break;
            }
            closest = closest.min((sorted[j] - sorted[i]).norm());
        }
    }
    let min_det = samples.iter().map(|&q| f.jacobian(q).det().norm()).fold(f64::INFINITY, f64::min);

    let pass = failed.is_empty() && dich > 0.0 && growth > 0.0 && avoid > 0.0 && closest > 1e-6 && min_det > 0.0;
    outcome(
        pass,
        format!(
            "{} window points; report failures {failed:?}; sampled dichotomy {dich:.3}, growth {growth:.1}, avoidance {avoid:.3}, closest pair {closest:.2e}, min |det| {min_det:.2e}",
            nl.points.len()
        ),
    )
}

// 8. Henon basin map: conjugacy, images in V, contraction of orbits.
fn henon_basin() -> Outcome {
    let m = henon_basin_map(60, 1e-10).unwrap();
    let l = linear_part();
    let grid = certification_grid();
    let conj = grid.par_iter().map(|&q| (henon(m.psi(q)) - m.psi(l.apply(q))).norm()).reduce(|| 0.0, f64::max);
    let in_v = grid.par_iter().map(|&q| v_margin(m.eval(q))).reduce(|| f64::INFINITY, f64::min);
    let mut rng = Rng::seed_from_u64(8);
    let qs: Vec<Point> = (0..1000).map(|_| Point::new(rand_cx(&mut rng, 1.0), rand_cx(&mut rng, 1.0))).collect();
    let steps: Vec<Option<usize>> = qs.par_iter().map(|&q| halving_steps(m.psi(q), 60)).collect();
    let all = steps.iter().all(|s| s.is_some());
    let mean = steps.iter().flatten().sum::<usize>() as f64 / steps.len() as f64;
    outcome(
        conj < 1e-8 && in_v > 0.0 && all && mean <= 6.0,
        format!(
            "depth {}; conjugacy {conj:.2e} on {} grid points; min V margin {in_v:.3}; mean halving steps {mean:.2}",
            m.iterations_used,
            grid.len()
        ),
    )
}

fn roundtrip_error(map: &dyn HoloMap, pts: &[Point]) -> f64 {
    pts.par_iter()
        .map(|&x| match map.inverse(x) {
            Some(q) => (map.eval(q) - x).norm() / x.norm().max(1.0),
            None => f64::INFINITY,
        })
        .reduce(|| 0.0, f64::max)
}

// 9. Shears and straightenings invert exactly.
fn automorphisms() -> Outcome {
    let mut rng = Rng::seed_from_u64(9);
    let pts: Vec<Point> = (0..10_000).map(|_| Point::new(rand_cx(&mut rng, 2.0), rand_cx(&mut rng, 2.0))).collect();
    let mut results: BTreeMap<String, f64> = BTreeMap::new();

    let spec = standard_spec(5.0);
    let nl = normalize_lattice(&spec).unwrap();
    let (h, h2) = fit_shear_surrogates(&nl, 64);
    results.insert("F1".into(), roundtrip_error(&ExpShear::new(h, c(0.0, 0.0), "F1"), &pts));
    results.insert("F2".into(), roundtrip_error(&ExpShear::new(h2, c(0.5, 0.0), "F2"), &pts));

    // Exponents of arbitrary quality: exact fits of random polynomials.
    let domain = SampleDomain::Disks { centers: vec![c(0.0, 0.0)], radius: 1.0 };
    // Sampled on the fitted disk: far outside it Re h reaches ~30 and
    // w exp(-h) + offset loses every digit of w to the offset.
    let unit: Vec<Point> = pts.iter().map(|p| p.scale(0.5)).collect();
    let mut worst_random = 0.0f64;
    for _ in 0..5 {
        let target = rand_poly(&mut rng, 5, 0.5);
        let s = fit_two_sided(&|z| target.eval(z), &domain, 1e-6, 8);
        worst_random = worst_random.max(roundtrip_error(&ExpShear::new(s, rand_cx(&mut rng, 1.0), "random"), &unit));
    }
    results.insert("random exp shears".into(), worst_random);

    let mut worst_shear = 0.0f64;
    for _ in 0..5 {
        let sh = Shear {
            p: Poly::from_roots(&[c(3.0, 0.0) + rand_cx(&mut rng, 0.5)]),
            q: RationalFn::new(rand_poly(&mut rng, 2, 1.0), Poly::from_roots(&[c(0.0, 3.0)])).unwrap(),
        };
        let m = build_exceptional_shear(&sh).unwrap();
        worst_shear = worst_shear.max(roundtrip_error(&m, &pts));
    }
    results.insert("zero-prescribing shears".into(), worst_shear);

    match straighten_tame(&nl, 64) {
        Ok((t, _)) => {
            results.insert("straightening".into(), roundtrip_error(&t, &pts));
        }
        Err(e) => return outcome(false, format!("straightening failed: {e}")),
    }
    let worst = results.values().copied().fold(0.0, f64::max);
    let shown: Vec<String> = results.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect();
    outcome(worst < 1e-9, format!("max |eval(inverse(x)) - x| over 10^4 points: {}", shown.join(", ")))
}

// 10. Two CLI verify runs with the same seed give the same report.
fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("c2dom-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let pipeline = dir.join("torus.json");
    let doc = serde_json::json!({"kind": "torus-avoidance", "spec": standard_spec(5.0)});
    std::fs::write(&pipeline, doc.to_string()).unwrap();
    let bin = env!("CARGO_BIN_EXE_c2dom");
    let mut reports = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("run{run}.json"));
        let csv = dir.join(format!("run{run}.csv"));
        let status = Command::new(bin)
            .arg("verify")
            .arg(&pipeline)
            .args(["--seed", "42", "--samples", "10000", "--out"])
            .arg(&out)
            .arg("--csv")
            .arg(&csv)
            .output()
            .unwrap()
            .status;
        let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let stamped = json.as_object_mut().unwrap().remove("generated_at").is_some();
        reports.push((status.code(), json, std::fs::read_to_string(&csv).unwrap(), stamped));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let (a, b) = (&reports[0], &reports[1]);
    let same = a.1 == b.1 && a.2 == b.2;
    outcome(
        same && a.0 == Some(0) && b.0 == Some(0) && a.3,
        format!("exit codes {:?}/{:?}; JSON equal excluding timestamp: {}; CSV equal: {}", a.0, b.0, a.1 == b.1, a.2 == b.2),
    )
}

fn main() {
    // `cargo test` passes filter and harness flags; this target runs every
    // criterion regardless.
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("chi classifier oracle", chi_oracle),
        ("verdict table conformance", verdict_table),
        ("psi and graph-complement round-trips", roundtrips),
        ("principal-part cancellation", principal_parts),
        ("double-section avoidance", double_sections),
        ("strip smoother oracle", smoother),
        ("standard lattice pipeline, window 5", pipeline_w5),
        ("Henon basin map", henon_basin),
        ("automorphism exactness", automorphisms),
        ("verify determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!("{:>2}. [{}] {name} ({secs:.2} s): {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
