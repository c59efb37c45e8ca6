//! Zero-prescribing shears `(z, w) -> (z, p(z) w + q(z))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{poly_roots, Cx, Matrix2, Poly, RationalFn};

use super::{HoloMap, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shear {
    pub p: Poly,
    pub q: RationalFn,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShearMap {
    pub shear: Shear,
}

/// Validates the pole/zero bookkeeping and returns the shear map.
///
/// A pole of `q` at a zero of `p` is accepted only if its order is strictly
/// below the zero order of `p`.
pub fn build_exceptional_shear(sh: &Shear) -> Result<ShearMap> {
    if sh.p.is_zero() {
        return Err(Error::InvalidInput("p must not vanish identically".into()));
    }
    let zeros = if sh.p.degree() == Some(0) { Vec::new() } else { poly_roots(&sh.p)? };
    let poles = if sh.q.den().degree() == Some(0) { Vec::new() } else { sh.q.poles()? };
    for pole in &poles {
        for zero in &zeros {
            let close = (pole.value - zero.value).norm() <= 1e-8 * zero.value.norm().max(1.0);
            if close && pole.multiplicity >= zero.multiplicity {
                return Err(Error::InvalidInput(format!(
                    "q has a pole of order {} at {}, where p vanishes only to order {}",
                    pole.multiplicity, pole.value, zero.multiplicity
                )));
            }
        }
    }
    Ok(ShearMap { shear: sh.clone() })
}

impl HoloMap for ShearMap {
    fn eval(&self, pt: Point) -> Point {
        let s = &self.shear;
        Point::new(pt.z, s.p.eval(pt.z) * pt.w + s.q.eval(pt.z))
    }

    fn jacobian(&self, pt: Point) -> Matrix2 {
        let s = &self.shear;
        let (p, dp) = s.p.eval_d(pt.z);
        let (_, dq) = s.q.eval_d(pt.z);
        Matrix2::new(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0), dp * pt.w + dq, p)
    }

    /// `(z, (w - q(z)) / p(z))`, defined where `p(z) != 0`.
    fn inverse(&self, pt: Point) -> Option<Point> {
        let s = &self.shear;
        let p = s.p.eval(pt.z);
        if p.norm() == 0.0 {
            return None;
        }
        Some(Point::new(pt.z, (pt.w - s.q.eval(pt.z)) / p))
    }

    fn has_inverse(&self) -> bool {
        true
    }

    fn description(&self) -> String {
        let s = &self.shear;
        format!("(z, ({}) w + ({}) / ({}))", s.p, s.q.num(), s.q.den())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::prescribed_zero_poly;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn unit_shear_is_identity() {
        let m = build_exceptional_shear(&Shear { p: Poly::one(), q: RationalFn::polynomial(Poly::zero()) }).unwrap();
        let p = Point::new(c(1.0, 2.0), c(-3.0, 0.5));
        assert_eq!(m.eval(p), p);
    }

    #[test]
    fn collapse_over_double_zero() {
        let m = build_exceptional_shear(&Shear {
            p: Poly::from_real(&[0.0, 0.0, 1.0]),
            q: RationalFn::polynomial(Poly::zero()),
        })
        .unwrap();
        for w in [c(0.0, 0.0), c(5.0, -1.0)] {
            assert_eq!(m.eval(Point::new(c(0.0, 0.0), w)), Point::default());
        }
    }

    #[test]
    fn determinant_is_p() {
        let p = prescribed_zero_poly(&[(c(1.0, 0.0), 1)]).unwrap();
        let m = build_exceptional_shear(&Shear { p: p.clone(), q: RationalFn::polynomial(Poly::from_real(&[0.0, 2.0])) }).unwrap();
        for z in [c(1.0, 0.0), c(0.0, 1.0), c(2.5, -0.5)] {
            let d = m.jacobian(Point::new(z, c(0.3, 0.3))).det();
            assert!((d - p.eval(z)).norm() < 1e-15);
        }
        assert_eq!(m.jacobian(Point::new(c(1.0, 0.0), c(7.0, 0.0))).det(), c(0.0, 0.0));
    }

    #[test]
    fn pole_order_bookkeeping() {
        let p = Poly::from_real(&[0.0, 0.0, 1.0]);
        let simple_pole = RationalFn::new(Poly::one(), Poly::z()).unwrap();
        assert!(build_exceptional_shear(&Shear { p: p.clone(), q: simple_pole }).is_ok());
        let double_pole = RationalFn::new(Poly::one(), Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let err = build_exceptional_shear(&Shear { p, q: double_pole }).unwrap_err();
        assert!(err.to_string().contains("order 2"));
    }
}
