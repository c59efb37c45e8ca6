//! Fiberwise map onto the complement of the graph of a rational function.
//!
//! Write `s = f / f1`. A polynomial `g1` matching the jets of `log f` at each
//! root of `f1` (to that root's multiplicity) makes `g = f1 exp(-g1)` entire
//! with `1/g - s` pole free, so `h = s - 1/g = (f - exp(g1)) / f1` is entire and
//!
//! `Phi(z, w) = (z, s(z) - exp(w g(z)) / g(z)) = (z, h(z) - psi(g(z), w))`.
//!
//! The right-hand form is the one evaluated; it is holomorphic across the
//! zeros of `g` where it reduces to `h(z) - w`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{hermite_jet_poly, poly_roots, series, Cx, Jet, Matrix2, Poly, RationalFn, Root};

use super::psi::{psi, psi_dt, psi_dw, psi_preimage};
use super::{HoloMap, Point};

/// Taylor terms kept for `h` near each pole of `s`.
const LOCAL_TERMS: usize = 32;

#[derive(Debug, Clone, Serialize)]
struct LocalExpansion {
    #[serde(with = "crate::numerics::cx_serde")]
    center: Cx,
    radius: f64,
    #[serde(with = "crate::numerics::cx_vec_serde")]
    h_taylor: Vec<Cx>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphComplementMap {
    pub s: RationalFn,
    /// Denominator of `s`; the zeros of `g`.
    pub f1: Poly,
    /// Jet-matching polynomial with `g = f1 exp(-g1)`.
    pub g1: Poly,
    pub poles: Vec<Root>,
    local: Vec<LocalExpansion>,
}

pub fn build_graph_complement_map(s: &RationalFn) -> Result<GraphComplementMap> {
    let f = s.num().clone();
    let f1 = s.den().clone();
    let poles = if f1.degree() == Some(0) { Vec::new() } else { poly_roots(&f1)? };

    let mut jets = Vec::with_capacity(poles.len());
    for r in &poles {
        let m = r.multiplicity;
        let ft = series::pad(f.taylor_at(r.value), m);
        if ft[0].norm() <= 1e-8 * f.scale().max(f64::MIN_POSITIVE) {
            return Err(Error::CommonRoot(r.value));
        }
        let lg = series::log(&ft[..m])?;
        jets.push(Jet::from_taylor(r.value, &lg)?);
    }
    let g1 = hermite_jet_poly(&jets)?;

    let mut local = Vec::with_capacity(poles.len());
    for (i, r) in poles.iter().enumerate() {
        let sep = poles
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| (o.value - r.value).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.25 * sep).min(0.1);
        local.push(LocalExpansion {
            center: r.value,
            radius,
            h_taylor: local_h(&f, &f1, &g1, r.value, r.multiplicity)?,
        });
    }

    Ok(GraphComplementMap { s: s.clone(), f1, g1, poles, local })
}

/// Taylor coefficients at a root `a` of `f1` (multiplicity `m`) of
/// `(f - exp(g1)) / f1`, with the first `m` numerator terms, which cancel by
/// construction, dropped.
fn local_h(f: &Poly, f1: &Poly, g1: &Poly, a: Cx, m: usize) -> Result<Vec<Cx>> {
    let n = LOCAL_TERMS + m;
    let ft = series::pad(f.taylor_at(a), n);
    let et = series::exp(&series::pad(g1.taylor_at(a), n));
    let dt = series::pad(f1.taylor_at(a), n);
    let num: Vec<Cx> = ft.iter().zip(&et).map(|(x, y)| x - y).collect();
    series::div(&num[m..], &dt[m..])
}

impl GraphComplementMap {
    pub fn s_value(&self, z: Cx) -> Cx {
        self.s.eval(z)
    }

    pub fn g(&self, z: Cx) -> Cx {
        self.f1.eval(z) * (-self.g1.eval(z)).exp()
    }

    /// `g` and `g'`.
    pub fn g_d(&self, z: Cx) -> (Cx, Cx) {
        let (a, da) = self.f1.eval_d(z);
        let (b, db) = self.g1.eval_d(z);
        let e = (-b).exp();
        (a * e, (da - a * db) * e)
    }

    fn nearest_local(&self, z: Cx) -> Option<&LocalExpansion> {
        self.local.iter().find(|l| (z - l.center).norm() < l.radius)
    }

    /// The entire function `h = s - 1/g` and its derivative.
    pub fn h_d(&self, z: Cx) -> (Cx, Cx) {
        if let Some(l) = self.nearest_local(z) {
            return series::eval_d(&l.h_taylor, z - l.center);
        }
        let (f, df) = self.s.num().eval_d(z);
        let (f1, df1) = self.f1.eval_d(z);
        let (g1, dg1) = self.g1.eval_d(z);
        let e = g1.exp();
        let h = (f - e) / f1;
        (h, (df - dg1 * e - h * df1) / f1)
    }

    pub fn h(&self, z: Cx) -> Cx {
        self.h_d(z).0
    }

    pub fn second(&self, z: Cx, w: Cx) -> Cx {
        self.h(z) - psi(self.g(z), w)
    }
}

impl HoloMap for GraphComplementMap {
    fn eval(&self, p: Point) -> Point {
        Point::new(p.z, self.second(p.z, p.w))
    }

    fn jacobian(&self, p: Point) -> Matrix2 {
        let (g, dg) = self.g_d(p.z);
        let (_, dh) = self.h_d(p.z);
        Matrix2::new(
            Cx::new(1.0, 0.0),
            Cx::new(0.0, 0.0),
            dh - psi_dt(g, p.w) * dg,
            -psi_dw(g, p.w),
        )
    }

    fn inverse(&self, p: Point) -> Option<Point> {
        graph_complement_preimage(self, p.z, p.w).ok().map(|w| Point::new(p.z, w))
    }

    fn has_inverse(&self) -> bool {
        true
    }

    fn description(&self) -> String {
        format!("(z, h(z) - psi(g(z), w)) avoiding the graph of ({}) / ({})", self.s.num(), self.s.den())
    }
}

/// The `w` with second coordinate `c` over `z`.
pub fn graph_complement_preimage(m: &GraphComplementMap, z: Cx, c: Cx) -> Result<Cx> {
    let (g, h) = (m.g(z), m.h(z));
    // 1 + g (h - c) vanishes exactly at c = s(z); the tolerance covers the
    // rounding of g and h, which are evaluated separately.
    let x = g * (h - c);
    let tol = 16.0 * f64::EPSILON * (1.0 + g.norm() * (h.norm() + c.norm()));
    if (Cx::new(1.0, 0.0) + x).norm() <= tol {
        return Err(Error::OmittedValue(format!("{c} = s({z}) lies on the avoided graph")));
    }
    psi_preimage(g, h - c).map_err(|_| Error::OmittedValue(format!("{c} = s({z}) lies on the avoided graph")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn one_over_z() -> GraphComplementMap {
        let s = RationalFn::new(Poly::one(), Poly::z()).unwrap();
        build_graph_complement_map(&s).unwrap()
    }

    #[test]
    fn one_over_z_recipe() {
        let m = one_over_z();
        assert!(m.g1.is_zero());
        for z in [c(0.0, 0.0), c(0.03, 0.01), c(1.0, 2.0)] {
            assert!((m.g(z) - z).norm() < 1e-15);
            assert!(m.h(z).norm() < 1e-14);
        }
        let w = c(0.7, -0.2);
        assert!((m.eval(Point::new(c(0.0, 0.0), w)).w + w).norm() < 1e-15);
        let z = c(0.5, 0.5);
        let want = (1.0 - (z * w).exp()) / z;
        assert!((m.second(z, w) - want).norm() < 1e-14);
    }

    #[test]
    fn pole_free_case_omits_zero() {
        let s = RationalFn::polynomial(Poly::zero());
        let m = build_graph_complement_map(&s).unwrap();
        for k in 0..100 {
            let w = c((k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.11).cos() * 5.0);
            let v = m.second(c(0.2, 0.1), w);
            assert!((v + w.exp()).norm() < 1e-12 * (1.0 + v.norm()));
            assert!(v.norm() > 0.0);
        }
    }

    #[test]
    fn preimage_examples() {
        let m = one_over_z();
        assert!(graph_complement_preimage(&m, c(1.0, 0.0), c(0.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((graph_complement_preimage(&m, c(0.0, 0.0), c(7.0, 0.0)).unwrap() + 7.0).norm() < 1e-15);
        assert!(matches!(
            graph_complement_preimage(&m, c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::OmittedValue(_))
        ));
    }

    #[test]
    fn double_pole_is_cancelled() {
        // s = (z + 2) / (z - 1)^2
        let s = RationalFn::new(Poly::from_real(&[2.0, 1.0]), Poly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let m = build_graph_complement_map(&s).unwrap();
        assert_eq!(m.poles[0].multiplicity, 2);
        for d in [1e-2, 1e-3, 1e-4] {
            let z = c(1.0 + d, 0.5 * d);
            let v = 1.0 / m.g(z) - s.eval(z);
            assert!((v + m.h(z)).norm() < 1e-6 * (1.0 + m.h(z).norm()), "d={d}: {v}");
        }
    }

    #[test]
    fn local_and_direct_h_agree_on_boundary() {
        let s = RationalFn::new(Poly::from_real(&[1.0, -1.0, 0.5]), Poly::from_roots(&[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0)])).unwrap();
        let m = build_graph_complement_map(&s).unwrap();
        for l in &m.local {
            for k in 0..8 {
                let th = k as f64 * 0.8;
                let z = l.center + c(th.cos(), th.sin()) * l.radius * 0.999;
                let local = series::eval(&l.h_taylor, z - l.center);
                let f = s.num().eval(z);
                let direct = (f - m.g1.eval(z).exp()) / m.f1.eval(z);
                assert!((local - direct).norm() < 1e-9 * (1.0 + direct.norm()));
            }
        }
    }
}
