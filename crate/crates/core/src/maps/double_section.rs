//! Fiberwise map into `C x P^1` avoiding a double section `v+-(z) = p (h +- sqrt g)`.
//!
//! With `a = p h`, `b = p sqrt(g)` the Möbius construction gives
//! `H0(v+, v-, w) = a + b coth(b w) = a + K(b^2, w)`, where
//! `K(x, w) = sqrt(x) coth(w sqrt(x))` is even in `sqrt(x)` and hence a
//! single-valued function of `x`. Over a branch point (`b = 0`) the fiber map
//! is `a + 1/w`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cx_serde, expm1, is_finite, prescribed_zero_poly, Cx, CxRepr, Matrix2, Poly};

use super::{HoloMap, Point};

/// `|w sqrt(x)|` below which `K` is summed as a power series.
pub const SERIES_THRESHOLD: f64 = 1e-3;
pub const SERIES_TERMS: usize = 12;
/// Above this modulus a value is carried in the chart at infinity.
pub const CHART_SWITCH: f64 = 1e8;

const DERIV_SERIES_THRESHOLD: f64 = 0.5;
const DERIV_SERIES_TERMS: usize = 24;

/// A point of `P^1`: either the affine value, or `1/value` in the chart at
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    #[serde(with = "cx_serde")]
    pub coord: Cx,
    pub at_infinity: bool,
}

impl ProjPoint {
    pub fn infinity() -> Self {
        ProjPoint { coord: Cx::new(0.0, 0.0), at_infinity: true }
    }

    pub fn finite(v: Cx) -> Self {
        ProjPoint::from_ratio(v, Cx::new(1.0, 0.0))
    }

    /// `num / den`, switching charts when the quotient exceeds [`CHART_SWITCH`].
    pub fn from_ratio(num: Cx, den: Cx) -> Self {
        if num.norm() > CHART_SWITCH * den.norm() {
            ProjPoint { coord: den / num, at_infinity: true }
        } else {
            ProjPoint { coord: num / den, at_infinity: false }
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.at_infinity && self.coord.norm() == 0.0
    }

    /// Affine value, infinite at the point at infinity.
    pub fn value(&self) -> Cx {
        if self.at_infinity {
            if self.coord.norm() == 0.0 {
                Cx::new(f64::INFINITY, f64::INFINITY)
            } else {
                1.0 / self.coord
            }
        } else {
            self.coord
        }
    }

    /// Chordal distance `|a - b| / (sqrt(1 + |a|^2) sqrt(1 + |b|^2))`, at most 1.
    pub fn chordal(&self, o: &ProjPoint) -> f64 {
        // Homogeneous coordinates [x0 : x1] with value x0 / x1.
        let h = |p: &ProjPoint| {
            if p.at_infinity {
                (Cx::new(1.0, 0.0), p.coord)
            } else {
                (p.coord, Cx::new(1.0, 0.0))
            }
        };
        let (a0, a1) = h(self);
        let (b0, b1) = h(o);
        let cross = (a0 * b1 - a1 * b0).norm();
        let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let nb = (b0.norm_sqr() + b1.norm_sqr()).sqrt();
        cross / (na * nb)
    }

    /// Affine translate `self + a`.
    pub fn add(&self, a: Cx) -> ProjPoint {
        if self.at_infinity {
            // 1 / (1/c + a) = c / (1 + a c)
            let den = Cx::new(1.0, 0.0) + a * self.coord;
            ProjPoint::from_ratio(den, self.coord)
        } else {
            ProjPoint::finite(self.coord + a)
        }
    }

    /// `self / d` for finite `d`; infinity when `d = 0` and `self != 0`.
    pub fn div(&self, d: Cx) -> ProjPoint {
        if self.at_infinity {
            // value = 1/c, result = 1/(c d)
            ProjPoint { coord: self.coord * d, at_infinity: true }
        } else {
            ProjPoint::from_ratio(self.coord, d)
        }
    }
}

/// `sqrt(x) coth(w sqrt(x))` Taylor coefficients: `K = sum_n c_n w^(2n-1) x^n`
/// with `c_0 = 1`, `c_n = (-1)^(n+1) 2 zeta(2n) / pi^(2n)`.
fn coth_coeffs() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        let pi = std::f64::consts::PI;
        let mut c = vec![1.0];
        for n in 1..=DERIV_SERIES_TERMS {
            let zeta_over_pi = match n {
                1 => 1.0 / 6.0,
                2 => 1.0 / 90.0,
                3 => 1.0 / 945.0,
                _ => {
                    let e = 2 * n as i32;
                    (1..=2000).rev().map(|k| (k as f64).powi(-e)).sum::<f64>() / pi.powi(e)
                }
            };
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            c.push(sign * 2.0 * zeta_over_pi);
        }
        c
    })
}

/// `K(x, w)` from the power series in `u = w^2 x`: `K = S(u) / w`.
pub fn k_series(x: Cx, w: Cx) -> ProjPoint {
    let u = w * w * x;
    let c = coth_coeffs();
    let s = (0..SERIES_TERMS).rev().fold(Cx::new(0.0, 0.0), |acc, n| acc * u + c[n]);
    ProjPoint::from_ratio(s, w)
}

/// `K(x, w)` from `coth y = (1 + e^(-2y)) / (1 - e^(-2y))`, `y = w sqrt(x)`,
/// with the sign of `sqrt(x)` chosen so that `Re y >= 0`.
pub fn k_closed(x: Cx, w: Cx) -> ProjPoint {
    let mut s = x.sqrt();
    let mut y = w * s;
    if y.re < 0.0 {
        s = -s;
        y = -y;
    }
    let e = (-2.0 * y).exp();
    let num = s * (Cx::new(1.0, 0.0) + e);
    let den = -expm1(-2.0 * y);
    ProjPoint::from_ratio(num, den)
}

pub fn k_eval(x: Cx, w: Cx) -> ProjPoint {
    if w.norm() * x.norm().sqrt() < SERIES_THRESHOLD {
        k_series(x, w)
    } else {
        k_closed(x, w)
    }
}

/// `dK/dx` at a point where `K` is finite.
pub fn k_dx(x: Cx, w: Cx, k: Cx) -> Cx {
    if w.norm() * x.norm().sqrt() < DERIV_SERIES_THRESHOLD {
        let u = w * w * x;
        let c = coth_coeffs();
        // sum_{n>=1} n c_n w^(2n-1) x^(n-1) = w sum_{n>=1} n c_n u^(n-1)
        let s = (1..=DERIV_SERIES_TERMS)
            .rev()
            .fold(Cx::new(0.0, 0.0), |acc, n| acc * u + c[n] * n as f64);
        s * w
    } else {
        (k + w * x - w * k * k) / (2.0 * x)
    }
}

/// `dK/dw = x - K^2`.
pub fn k_dw(x: Cx, k: Cx) -> Cx {
    x - k * k
}

/// `N_{u,v}(exp(w (u - v)))` with `N_{u,v}(G) = (u G - v) / (G - 1)`.
pub fn mobius_h0(u: Cx, v: Cx, w: Cx) -> Result<ProjPoint> {
    if u == v {
        return Err(Error::InvalidInput("mobius_h0 needs u != v".into()));
    }
    let gm1 = expm1(w * (u - v));
    Ok(ProjPoint::from_ratio(u * gm1 + (u - v), gm1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleSection {
    pub p: Poly,
    pub h: Poly,
    pub g: Poly,
    /// Zeros of `p` with their orders (the exceptional fibers).
    pub exceptional_orders: Vec<(Cx, usize)>,
}

impl<'de> Deserialize<'de> for DoubleSection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: Option<Poly>,
            h: Poly,
            g: Poly,
            #[serde(default)]
            exceptional_orders: Vec<(CxRepr, usize)>,
        }
        let r = Raw::deserialize(d)?;
        let orders: Vec<(Cx, usize)> = r.exceptional_orders.into_iter().map(|(a, n)| (a.0, n)).collect();
        DoubleSection::new(r.p, r.h, r.g, orders).map_err(serde::de::Error::custom)
    }
}

impl DoubleSection {
    /// When `p` is `None` it is built from `exceptional_orders`; otherwise the
    /// listed orders are checked against `p`.
    pub fn new(p: Option<Poly>, h: Poly, g: Poly, exceptional_orders: Vec<(Cx, usize)>) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::InvalidInput("sections coincide identically (g = 0)".into()));
        }
        let p = match p {
            Some(p) => {
                if p.is_zero() {
                    return Err(Error::InvalidInput("p must not vanish identically".into()));
                }
                for &(a, n) in &exceptional_orders {
                    let t = p.taylor_at(a);
                    let scale = p.abs_sum(a).max(p.scale());
                    let lower_vanish = (0..n).all(|k| t.get(k).map_or(true, |c| c.norm() <= 1e-9 * scale));
                    let exact = t.get(n).is_some_and(|c| c.norm() > 1e-9 * scale);
                    if !(lower_vanish && exact) {
                        return Err(Error::InvalidInput(format!("p does not vanish to order exactly {n} at {a}")));
                    }
                }
                p
            }
            None => prescribed_zero_poly(&exceptional_orders)?,
        };
        Ok(DoubleSection { p, h, g, exceptional_orders })
    }
}

/// The map `(z, w) -> (z, p h + K(p^2 g, w))`, or with `divide_by_p`,
/// `(z, h + K(p^2 g, w) / p)`, whose fibers over zeros of `p` collapse to the
/// section at infinity.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleSectionMap {
    pub section: DoubleSection,
    pub divide_by_p: bool,
}

pub fn build_double_section_map(d: &DoubleSection) -> Result<DoubleSectionMap> {
    if d.g.is_zero() {
        return Err(Error::InvalidInput("sections coincide identically (g = 0)".into()));
    }
    Ok(DoubleSectionMap { section: d.clone(), divide_by_p: false })
}

impl DoubleSectionMap {
    pub fn divided_by_p(mut self) -> Self {
        self.divide_by_p = true;
        self
    }

    fn x(&self, z: Cx) -> Cx {
        let p = self.section.p.eval(z);
        p * p * self.section.g.eval(z)
    }

    pub fn eval_proj(&self, z: Cx, w: Cx) -> ProjPoint {
        let s = &self.section;
        let p = s.p.eval(z);
        let k = k_eval(self.x(z), w);
        if self.divide_by_p {
            k.div(p).add(s.h.eval(z))
        } else {
            k.add(p * s.h.eval(z))
        }
    }

    /// The two omitted values over `z` (equal over branch points).
    pub fn section_values(&self, z: Cx) -> [Cx; 2] {
        let s = &self.section;
        let r = s.g.eval(z).sqrt();
        let h = s.h.eval(z);
        if self.divide_by_p {
            [h + r, h - r]
        } else {
            let p = s.p.eval(z);
            [p * (h + r), p * (h - r)]
        }
    }
}

impl HoloMap for DoubleSectionMap {
    fn eval(&self, p: Point) -> Point {
        Point::new(p.z, self.eval_proj(p.z, p.w).value())
    }

    fn jacobian(&self, pt: Point) -> Matrix2 {
        let s = &self.section;
        let (z, w) = (pt.z, pt.w);
        let (p, dp) = s.p.eval_d(z);
        let (h, dh) = s.h.eval_d(z);
        let (g, dg) = s.g.eval_d(z);
        let x = p * p * g;
        let dx = 2.0 * p * dp * g + p * p * dg;
        let k = k_eval(x, w).value();
        let one = Cx::new(1.0, 0.0);
        let zero = Cx::new(0.0, 0.0);
        if !is_finite(k) {
            let nan = Cx::new(f64::NAN, f64::NAN);
            return Matrix2::new(one, zero, nan, nan);
        }
        let kx = k_dx(x, w, k);
        let kw = k_dw(x, k);
        if self.divide_by_p {
            Matrix2::new(one, zero, dh + (kx * dx * p - k * dp) / (p * p), kw / p)
        } else {
            Matrix2::new(one, zero, dp * h + p * dh + kx * dx, kw)
        }
    }

    fn description(&self) -> String {
        let s = &self.section;
        format!(
            "double-section map for p = {}, h = {}, g = {}{}",
            s.p,
            s.h,
            s.g,
            if self.divide_by_p { " (divided by p)" } else { "" }
        )
    }
}
