//! Holomorphic self-maps of `C^2` and the fiberwise constructions built on them.

pub mod double_section;
pub mod graph_complement;
pub mod psi;
pub mod shear;

use std::ops::{Add, Div, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numerics::{cx_serde, is_finite, Cx, Matrix2};

pub use double_section::{build_double_section_map, mobius_h0, DoubleSection, DoubleSectionMap, ProjPoint};
pub use graph_complement::{build_graph_complement_map, graph_complement_preimage, GraphComplementMap};
pub use psi::{psi, psi_preimage, PsiMap};
pub use shear::{build_exceptional_shear, Shear, ShearMap};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "cx_serde")]
    pub z: Cx,
    #[serde(with = "cx_serde")]
    pub w: Cx,
}

impl Point {
    pub fn new(z: Cx, w: Cx) -> Self {
        Point { z, w }
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.z) && is_finite(self.w)
    }

    /// Euclidean norm in `C^2 = R^4`.
    pub fn norm(&self) -> f64 {
        (self.z.norm_sqr() + self.w.norm_sqr()).sqrt()
    }

    /// Polydisk norm `max(|z|, |w|)`.
    pub fn max_norm(&self) -> f64 {
        self.z.norm().max(self.w.norm())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.z * s, self.w * s)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.z + o.z, self.w + o.w)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.z - o.z, self.w - o.w)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.z / s, self.w / s)
    }
}

/// A holomorphic map `C^2 -> C^2` with an analytic Jacobian and, optionally,
/// an exact inverse.
pub trait HoloMap: Send + Sync {
    fn eval(&self, p: Point) -> Point;

    fn jacobian(&self, p: Point) -> Matrix2;

    /// Exact inverse where defined; `None` when the map has no inverse formula
    /// or `p` is outside the image.
    fn inverse(&self, _p: Point) -> Option<Point> {
        None
    }

    fn has_inverse(&self) -> bool {
        false
    }

    fn description(&self) -> String;
}

pub type MapRef = Arc<dyn HoloMap>;

pub struct Identity;

impl HoloMap for Identity {
    fn eval(&self, p: Point) -> Point {
        p
    }
    fn jacobian(&self, _p: Point) -> Matrix2 {
        Matrix2::identity()
    }
    fn inverse(&self, p: Point) -> Option<Point> {
        Some(p)
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "identity".into()
    }
}

/// `p -> M p + b`.
pub struct Linear {
    pub m: Matrix2,
    pub offset: Point,
    inv: Option<Matrix2>,
}

impl Linear {
    pub fn new(m: Matrix2) -> Self {
        Linear::affine(m, Point::default())
    }

    pub fn affine(m: Matrix2, offset: Point) -> Self {
        Linear { m, offset, inv: m.inverse() }
    }
}

impl HoloMap for Linear {
    fn eval(&self, p: Point) -> Point {
        self.m.apply(p) + self.offset
    }
    fn jacobian(&self, _p: Point) -> Matrix2 {
        self.m
    }
    fn inverse(&self, p: Point) -> Option<Point> {
        self.inv.map(|i| i.apply(p - self.offset))
    }
    fn has_inverse(&self) -> bool {
        self.inv.is_some()
    }
    fn description(&self) -> String {
        format!("affine map {:?} + {:?}", self.m, self.offset)
    }
}

/// `outer . inner`.
pub struct Compose {
    pub outer: MapRef,
    pub inner: MapRef,
}

impl Compose {
    pub fn new(outer: MapRef, inner: MapRef) -> Self {
        Compose { outer, inner }
    }

    /// `maps[0] . maps[1] . ... . maps[n-1]`.
    pub fn chain(maps: Vec<MapRef>) -> MapRef {
        let mut it = maps.into_iter().rev();
        let first = it.next().unwrap_or_else(|| Arc::new(Identity));
        it.fold(first, |inner, outer| Arc::new(Compose::new(outer, inner)))
    }
}

impl HoloMap for Compose {
    fn eval(&self, p: Point) -> Point {
        self.outer.eval(self.inner.eval(p))
    }
    fn jacobian(&self, p: Point) -> Matrix2 {
        let q = self.inner.eval(p);
        self.outer.jacobian(q) * self.inner.jacobian(p)
    }
    fn inverse(&self, p: Point) -> Option<Point> {
        self.inner.inverse(self.outer.inverse(p)?)
    }
    fn has_inverse(&self) -> bool {
        self.outer.has_inverse() && self.inner.has_inverse()
    }
    fn description(&self) -> String {
        format!("({}) . ({})", self.outer.description(), self.inner.description())
    }
}

/// The inverse of an invertible map, with the Jacobian of the inverse taken
/// from the inner map at the preimage.
pub struct Inverted(pub MapRef);

impl HoloMap for Inverted {
    fn eval(&self, p: Point) -> Point {
        self.0.inverse(p).unwrap_or(Point::new(Cx::new(f64::NAN, f64::NAN), Cx::new(f64::NAN, f64::NAN)))
    }
    fn jacobian(&self, p: Point) -> Matrix2 {
        let nan = Cx::new(f64::NAN, f64::NAN);
        self.0
            .inverse(p)
            .and_then(|q| self.0.jacobian(q).inverse())
            .unwrap_or(Matrix2::new(nan, nan, nan, nan))
    }
    fn inverse(&self, p: Point) -> Option<Point> {
        Some(self.0.eval(p))
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        format!("inverse of ({})", self.0.description())
    }
}

/// Multiplication by a positive real.
pub struct Scale(pub f64);

impl HoloMap for Scale {
    fn eval(&self, p: Point) -> Point {
        p.scale(self.0)
    }
    fn jacobian(&self, _p: Point) -> Matrix2 {
        let s = Cx::new(self.0, 0.0);
        let z = Cx::new(0.0, 0.0);
        Matrix2::new(s, z, z, s)
    }
    fn inverse(&self, p: Point) -> Option<Point> {
        Some(p.scale(1.0 / self.0))
    }
    fn has_inverse(&self) -> bool {
        self.0 != 0.0
    }
    fn description(&self) -> String {
        format!("scale by {}", self.0)
    }
}
