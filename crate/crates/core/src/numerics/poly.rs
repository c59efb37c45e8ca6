use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::roots::{poly_roots_with, Root, RootOptions};
use super::{Cx, CxRepr, Tolerances};
use crate::error::{Error, Result};

/// Dense complex polynomial, coefficients lowest degree first.
///
/// Trailing zero coefficients are stripped on construction, so the zero
/// polynomial is the empty coefficient list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Cx>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Cx>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Cx::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| Cx::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Cx::new(1.0, 0.0))
    }

    pub fn constant(c: Cx) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Poly::from_real(&[0.0, 1.0])
    }

    /// `prod (z - r)` over the given roots.
    pub fn from_roots(roots: &[Cx]) -> Self {
        roots.iter().fold(Poly::one(), |acc, &r| acc * Poly::new(vec![-r, Cx::new(1.0, 0.0)]))
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Cx {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Largest coefficient modulus; the reference scale for relative tests.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum |c_k| |z|^k`, the natural size of the terms summed in `eval(z)`.
    pub fn abs_sum(&self, z: Cx) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.coeffs.iter().rev().fold(Cx::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_d(&self, z: Cx) -> (Cx, Cx) {
        let mut p = Cx::new(0.0, 0.0);
        let mut dp = Cx::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale_by(&self, c: Cx) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Taylor coefficients about `a`, i.e. the coefficients of `p(a + t)`.
    pub fn taylor_at(&self, a: Cx) -> Vec<Cx> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = c[j + 1] * a;
                c[j] += t;
            }
        }
        c
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial("divisor"))?;
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if nd < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Cx::new(0.0, 0.0); nd - dd + 1];
        let lead = d.leading();
        for k in (0..=nd - dd).rev() {
            let t = r[k + dd] / lead;
            q[k] = t;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[k + j] -= t * dj;
            }
            r[k + dd] = Cx::new(0.0, 0.0);
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[Cx], k: usize| v.get(k).copied().unwrap_or_default();
        Poly::new((0..n).map(|k| get(&self.coeffs, k) + get(&o.coeffs, k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Cx::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<CxRepr> = self.coeffs.iter().map(|&c| CxRepr(c)).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<CxRepr>::deserialize(d)?;
        let coeffs: Vec<Cx> = v.into_iter().map(|r| r.0).collect();
        if coeffs.iter().any(|c| !super::is_finite(*c)) {
            return Err(serde::de::Error::custom("non-finite polynomial coefficient"));
        }
        Ok(Poly::new(coeffs))
    }
}

/// Polynomial vanishing to exactly the given order at each point, monic.
pub fn prescribed_zero_poly(zeros: &[(Cx, usize)]) -> Result<Poly> {
    for (i, &(a, n)) in zeros.iter().enumerate() {
        if n == 0 {
            return Err(Error::InvalidInput(format!("zero order at {a} must be positive")));
        }
        if zeros[..i].iter().any(|&(b, _)| b == a) {
            return Err(Error::DuplicateBasePoint(a));
        }
    }
    let roots: Vec<Cx> = zeros
        .iter()
        .flat_map(|&(a, n)| std::iter::repeat_n(a, n))
        .collect();
    Ok(Poly::from_roots(&roots))
}

/// Quotient of two polynomials with no common zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        Self::with_tolerances(num, den, &Tolerances::default())
    }

    /// Validates that `den` is nonzero and that no root of `den` is a root of
    /// `num` within `tol.gcd` (relative to the root's modulus).
    pub fn with_tolerances(num: Poly, den: Poly, tol: &Tolerances) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial("denominator"));
        }
        if num.is_zero() {
            return Ok(RationalFn { num, den: Poly::one() });
        }
        let opts = RootOptions::from(tol);
        let dr = poly_roots_with(&den, &opts)?;
        let nr = poly_roots_with(&num, &opts)?;
        for b in &dr {
            for a in &nr {
                if (a.value - b.value).norm() <= tol.gcd * b.value.norm().max(1.0) {
                    return Err(Error::CommonRoot(b.value));
                }
            }
        }
        Ok(RationalFn { num, den })
    }

    pub fn polynomial(p: Poly) -> Self {
        RationalFn { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Value and derivative.
    pub fn eval_d(&self, z: Cx) -> (Cx, Cx) {
        let (n, dn) = self.num.eval_d(z);
        let (d, dd) = self.den.eval_d(z);
        (n / d, (dn * d - n * dd) / (d * d))
    }

    /// Poles with their orders.
    pub fn poles(&self) -> Result<Vec<Root>> {
        poly_roots_with(&self.den, &RootOptions::default())
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: Poly,
            #[serde(default = "Poly::one")]
            den: Poly,
        }
        let r = Raw::deserialize(d)?;
        RationalFn::new(r.num, r.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::new(vec![c(0.0, 0.0)]).is_zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn horner_and_derivative() {
        let p = Poly::from_real(&[1.0, -3.0, 0.0, 2.0]);
        let z = c(0.5, 1.0);
        let direct = 1.0 - 3.0 * z + 2.0 * z * z * z;
        assert!((p.eval(z) - direct).norm() < 1e-14);
        let (_, d) = p.eval_d(z);
        assert!((d - (-3.0 + 6.0 * z * z)).norm() < 1e-14);
        assert_eq!(p.derivative(), Poly::from_real(&[-3.0, 0.0, 6.0]));
    }

    #[test]
    fn taylor_shift_reproduces_values() {
        let p = Poly::from_real(&[2.0, 1.0, -1.0, 0.5]);
        let a = c(0.3, -0.7);
        let t = Poly::new(p.taylor_at(a));
        let h = c(0.1, 0.2);
        assert!((t.eval(h) - p.eval(a + h)).norm() < 1e-14);
    }

    #[test]
    fn division_recovers_factor() {
        let a = Poly::from_roots(&[c(1.0, 0.0), c(-2.0, 1.0)]);
        let b = Poly::from_real(&[3.0, 0.0, 1.0]);
        let (q, r) = (&a * &b).div_rem(&b).unwrap();
        assert!(r.scale() < 1e-13);
        assert!((&q - &a).scale() < 1e-13);
        assert!(a.div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn prescribed_zeros_examples() {
        assert_eq!(prescribed_zero_poly(&[]).unwrap(), Poly::one());
        assert_eq!(prescribed_zero_poly(&[(c(0.0, 0.0), 2)]).unwrap(), Poly::from_real(&[0.0, 0.0, 1.0]));
        let p = prescribed_zero_poly(&[(c(1.0, 0.0), 1), (c(-1.0, 0.0), 1)]).unwrap();
        assert_eq!(p, Poly::from_real(&[-1.0, 0.0, 1.0]));
        assert!(prescribed_zero_poly(&[(c(1.0, 0.0), 1), (c(1.0, 0.0), 2)]).is_err());
    }

    #[test]
    fn rational_rejects_common_root() {
        let num = Poly::from_roots(&[c(1.0, 0.0)]);
        let den = Poly::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(RationalFn::new(num, den), Err(Error::CommonRoot(_))));
        assert!(RationalFn::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn rational_json_defaults_denominator() {
        let s: RationalFn = serde_json::from_str(r#"{"num": [1, [0, 1]]}"#).unwrap();
        assert_eq!(s.den(), &Poly::one());
        let bad: std::result::Result<RationalFn, _> = serde_json::from_str(r#"{"num": [-1, 1], "den": [-1, 1]}"#);
        assert!(bad.is_err());
    }
}
