use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::{Cx, CxRepr};
use crate::error::{Error, Result};
use crate::maps::{HoloMap, Point};

/// 2x2 complex matrix, row major: `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a: Cx,
    pub b: Cx,
    pub c: Cx,
    pub d: Cx,
}

impl Matrix2 {
    pub fn new(a: Cx, b: Cx, c: Cx, d: Cx) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Cx::new(1.0, 0.0), Cx::new(0.0, 0.0));
        Matrix2::new(o, z, z, o)
    }

    pub fn det(&self) -> Cx {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        Some(Matrix2::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(self.a * p.z + self.b * p.w, self.c * p.z + self.d * p.w)
    }

    /// Max-modulus entry.
    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|&x| super::is_finite(x))
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[CxRepr(self.a), CxRepr(self.b)], [CxRepr(self.c), CxRepr(self.d)]].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [[a, b], [c, dd]] = <[[CxRepr; 2]; 2]>::deserialize(d)?;
        Ok(Matrix2::new(a.0, b.0, c.0, dd.0))
    }
}

/// Central differences along the complex coordinate directions:
/// `dF/dz ~ (F(z+h, w) - F(z-h, w)) / 2h`, likewise for `w`.
///
/// For a holomorphic map the real step gives the complex derivative, so the
/// four stencil points `(z +- h, w)`, `(z, w +- h)` suffice.
pub fn fd_jacobian(map: &dyn HoloMap, p: Point, step: f64) -> Result<Matrix2> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    let h = Cx::new(step, 0.0);
    let stencil = [
        Point::new(p.z + h, p.w),
        Point::new(p.z - h, p.w),
        Point::new(p.z, p.w + h),
        Point::new(p.z, p.w - h),
    ];
    let mut vals = [Point::default(); 4];
    for (v, q) in vals.iter_mut().zip(stencil) {
        let r = map.eval(q);
        if !r.is_finite() {
            return Err(Error::NonFinite { z: q.z, w: q.w });
        }
        *v = r;
    }
    let dz = (vals[0] - vals[1]) / (2.0 * step);
    let dw = (vals[2] - vals[3]) / (2.0 * step);
    Ok(Matrix2::new(dz.z, dw.z, dz.w, dw.w))
}
