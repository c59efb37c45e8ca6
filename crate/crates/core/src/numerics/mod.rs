//! Scalar, polynomial and analytic plumbing shared by every other module.

pub mod hermite;
pub mod jacobian;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod series;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use hermite::{hermite_jet_poly, Jet};
pub use jacobian::{fd_jacobian, Matrix2};
pub use poly::{prescribed_zero_poly, Poly, RationalFn};
pub use quad::{adaptive_quad, adaptive_quad_with_limit};
pub use roots::{poly_roots, poly_roots_with, Root, RootOptions};

pub type Cx = num_complex::Complex64;

pub const I: Cx = Cx::new(0.0, 1.0);

/// Floating-point tolerances used by root finding, gcd tests and jet checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub root: f64,
    pub gcd: f64,
    pub jet: f64,
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { root: 1e-10, gcd: 1e-8, jet: 1e-9, cluster: 1e-6 }
    }
}

pub fn is_finite(z: Cx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `exp(x) - 1` without cancellation for small `|x|`.
pub fn expm1(x: Cx) -> Cx {
    let (s, c) = x.im.sin_cos();
    let half = (0.5 * x.im).sin();
    let cm1 = -2.0 * half * half;
    let ea = x.re.exp();
    Cx::new(x.re.exp_m1() * c + cm1, ea * s)
}

/// Principal `log(1 + x)` without cancellation for small `|x|`.
pub fn log1p(x: Cx) -> Cx {
    // Away from 0 the direct form is exact enough, and near x = -1 the
    // expansion of |1 + x|^2 below cancels.
    if x.norm() > 0.5 {
        return (Cx::new(1.0, 0.0) + x).ln();
    }
    let re = 0.5 * (2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = x.im.atan2(1.0 + x.re);
    Cx::new(re, im)
}

/// Serde adapter accepting either a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CxRepr(pub Cx);

impl Serialize for CxRepr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CxRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
            Obj { re: f64, im: f64 },
        }
        Ok(CxRepr(match Raw::deserialize(d)? {
            Raw::Real(x) => Cx::new(x, 0.0),
            Raw::Pair([re, im]) => Cx::new(re, im),
            Raw::Obj { re, im } => Cx::new(re, im),
        }))
    }
}

/// `#[serde(with = "cx_serde")]` for a single complex field.
pub mod cx_serde {
    use super::{Cx, CxRepr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Cx, s: S) -> Result<S::Ok, S::Error> {
        CxRepr(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Cx, D::Error> {
        Ok(CxRepr::deserialize(d)?.0)
    }
}

/// `#[serde(with = "cx_vec_serde")]` for a list of complex numbers.
pub mod cx_vec_serde {
    use super::{Cx, CxRepr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Cx], s: S) -> Result<S::Ok, S::Error> {
        let r: Vec<CxRepr> = v.iter().map(|&z| CxRepr(z)).collect();
        r.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Cx>, D::Error> {
        Ok(Vec::<CxRepr>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}
