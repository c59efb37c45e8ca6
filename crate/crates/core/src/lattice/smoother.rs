use serde::{Deserialize, Serialize};

use super::{NormalizedLattice, NEAR_AXIS};
use crate::error::{Error, Result};
use crate::numerics::Cx;

/// `f_k` on the line `R + i gamma_k`: zero on finitely many closed intervals,
/// `value` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub line_level: f64,
    /// Disjoint, sorted.
    pub zero_intervals: Vec<(f64, f64)>,
    pub value: f64,
}

impl StepProfile {
    pub fn new(line_level: f64, mut zero_intervals: Vec<(f64, f64)>, value: f64) -> Result<Self> {
        if zero_intervals.iter().any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidInput("zero intervals must be finite with a <= b".into()));
        }
        zero_intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(StepProfile { line_level, zero_intervals: merge(zero_intervals), value })
    }

    pub fn constant(line_level: f64, value: f64) -> Self {
        StepProfile { line_level, zero_intervals: Vec::new(), value }
    }

    pub fn at(&self, x: f64) -> f64 {
        if self.zero_intervals.iter().any(|&(a, b)| a <= x && x <= b) {
            0.0
        } else {
            self.value
        }
    }

    /// Largest `d` such that the profile is constant on `(x - d, x + d)`.
    pub fn constancy_radius(&self, x: f64) -> f64 {
        self.zero_intervals
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .map(|e| (e - x).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximal constancy pieces `(a, b, c)`, with infinite ends allowed.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let mut left = f64::NEG_INFINITY;
        for &(a, b) in &self.zero_intervals {
            if a > left {
                out.push((left, a, self.value));
            }
            out.push((a, b, 0.0));
            left = b;
        }
        out.push((left, f64::INFINITY, self.value));
        out
    }
}

fn merge(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in sorted {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Profiles `f_k` for every line level: `f_k(x) = 0` when `(x + i gamma_k, 0)`
/// lies in the closed bidisk of radius 1/8 around a near-axis point.
pub fn step_profiles(nl: &NormalizedLattice) -> Vec<StepProfile> {
    let c = nl.constants.c;
    nl.line_levels
        .iter()
        .map(|&gamma| {
            let intervals: Vec<(f64, f64)> = nl
                .near_axis_points
                .iter()
                .filter_map(|q| {
                    let dy = gamma - q.z.im;
                    let s = NEAR_AXIS * NEAR_AXIS - dy * dy;
                    // The near-axis test already bounds |w| by 1/8, so only the
                    // first-coordinate disk constrains x.
                    (s >= 0.0).then(|| (q.z.re - s.sqrt(), q.z.re + s.sqrt()))
                })
                .collect();
            StepProfile::new(gamma, intervals, c).expect("finite intervals")
        })
        .collect()
}

/// Poisson-kernel smoothing of a step profile,
/// `g(z) = (1/pi) int f(x) eps / ((x - z')^2 + eps^2) dx` with
/// `z' = z - i gamma`, evaluated piece by piece through the principal arctan.
pub fn strip_smoother(profile: &StepProfile, eps: f64, z: Cx) -> Result<Cx> {
    let zp = z - Cx::new(0.0, profile.line_level);
    if !(zp.im.abs() < eps) {
        return Err(Error::OutsideStrip(z));
    }
    let mut g = Cx::new(0.0, 0.0);
    for (a, b, c) in profile.pieces() {
        if c == 0.0 {
            continue;
        }
        g += c / std::f64::consts::PI * (arctan_end(b, zp, eps) - arctan_end(a, zp, eps));
    }
    Ok(g)
}

/// `arctan((x - z') / eps)`, with the limits `+-pi/2` at infinite `x`.
///
/// On the strip the argument has imaginary part in `(-1, 1)`, away from the
/// branch cuts on `i(-inf, -1] U i[1, inf)`.
fn arctan_end(x: f64, zp: Cx, eps: f64) -> Cx {
    if x == f64::INFINITY {
        Cx::new(std::f64::consts::FRAC_PI_2, 0.0)
    } else if x == f64::NEG_INFINITY {
        Cx::new(-std::f64::consts::FRAC_PI_2, 0.0)
    } else {
        ((Cx::new(x, 0.0) - zp) / eps).atan()
    }
}
