//! `psi(t, w) = (exp(t w) - 1) / t`, entire on `C^2`, equal to `w` at `t = 0`.
//!
//! For fixed `t != 0` the map `w -> psi(t, w)` is onto `C` minus `-1/t`.

use crate::error::{Error, Result};
use crate::numerics::{expm1, log1p, Cx, Matrix2};

use super::{HoloMap, Point};

/// Below this `|t w|` the power series is used.
pub const SERIES_THRESHOLD: f64 = 1e-3;
pub const SERIES_TERMS: usize = 12;

/// `sum_{n>=0} t^n w^(n+1) / (n+1)!`, truncated.
pub fn psi_series(t: Cx, w: Cx) -> Cx {
    let x = t * w;
    let mut term = Cx::new(1.0, 0.0);
    let mut sum = Cx::new(1.0, 0.0);
    for n in 1..SERIES_TERMS {
        term = term * x / (n as f64 + 1.0);
        sum += term;
    }
    sum * w
}

pub fn psi_closed(t: Cx, w: Cx) -> Cx {
    expm1(t * w) / t
}

pub fn psi(t: Cx, w: Cx) -> Cx {
    if (t * w).norm() < SERIES_THRESHOLD {
        psi_series(t, w)
    } else {
        psi_closed(t, w)
    }
}

/// `d psi / dt = sum_{n>=1} n t^(n-1) w^(n+1) / (n+1)!`.
pub fn psi_dt(t: Cx, w: Cx) -> Cx {
    let x = t * w;
    if x.norm() < SERIES_THRESHOLD {
        // w^2 * sum_{n>=1} n x^(n-1) / (n+1)!
        let mut fact = 2.0;
        let mut pow = Cx::new(1.0, 0.0);
        let mut sum = Cx::new(0.0, 0.0);
        for n in 1..SERIES_TERMS {
            sum += pow * (n as f64 / fact);
            pow *= x;
            fact *= n as f64 + 2.0;
        }
        sum * w * w
    } else {
        (w * x.exp() - psi_closed(t, w)) / t
    }
}

/// `d psi / dw = exp(t w)`.
pub fn psi_dw(t: Cx, w: Cx) -> Cx {
    (t * w).exp()
}

/// The `w` with `psi(t, w) = c` (principal logarithm).
pub fn psi_preimage(t: Cx, c: Cx) -> Result<Cx> {
    if t.norm() == 0.0 {
        return Ok(c);
    }
    let x = t * c;
    if (Cx::new(1.0, 0.0) + x).norm() <= 4.0 * f64::EPSILON * x.norm().max(1.0) {
        return Err(Error::OmittedValue(format!("{c} = -1/t is not attained for t = {t}")));
    }
    Ok(log1p(x) / t)
}

/// `(t, w) -> (t, psi(t, w))` as a self-map of `C^2`.
pub struct PsiMap;

impl HoloMap for PsiMap {
    fn eval(&self, p: Point) -> Point {
        Point::new(p.z, psi(p.z, p.w))
    }

    fn jacobian(&self, p: Point) -> Matrix2 {
        Matrix2::new(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0), psi_dt(p.z, p.w), psi_dw(p.z, p.w))
    }

    fn inverse(&self, p: Point) -> Option<Point> {
        psi_preimage(p.z, p.w).ok().map(|w| Point::new(p.z, w))
    }

    fn has_inverse(&self) -> bool {
        true
    }

    fn description(&self) -> String {
        "(t, w) -> (t, (exp(t w) - 1) / t)".into()
    }
}
