//! Adaptive Gauss–Kronrod (7/15) quadrature of complex-valued integrands.

use std::collections::BinaryHeap;

use super::Cx;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

fn gk15<F: Fn(f64) -> Cx>(f: &F, a: f64, b: f64) -> (Cx, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let k = kron * h;
    let g = gauss * h;
    (k, (k - g).norm())
}

struct Piece {
    a: f64,
    b: f64,
    val: Cx,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

pub fn adaptive_quad<F: Fn(f64) -> Cx>(f: F, a: f64, b: f64, tol: f64) -> Result<Cx> {
    adaptive_quad_with_limit(f, a, b, tol, DEFAULT_MAX_SUBDIVISIONS)
}

/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `tol`.
pub fn adaptive_quad_with_limit<F: Fn(f64) -> Cx>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<Cx> {
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("quadrature needs a < b and tol > 0 (a={a}, b={b}, tol={tol})")));
    }
    let (v, e) = gk15(&f, a, b);
    if !super::is_finite(v) {
        return Err(Error::InvalidInput("integrand not finite".into()));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, val: v, err: e });
    let mut total_err = e;
    let mut splits = 0;
    while total_err > tol {
        if splits >= max_subdivisions {
            return Err(Error::QuadratureLimit { estimate: total_err });
        }
        let p = heap.pop().expect("heap never empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        if !super::is_finite(v1) || !super::is_finite(v2) {
            return Err(Error::InvalidInput("integrand not finite".into()));
        }
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
        total_err += e1 + e2 - p.err;
        splits += 1;
        if total_err <= tol {
            // Guard against drift in the running sum.
            total_err = heap.iter().map(|q| q.err).sum();
        }
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(pieces.iter().map(|p| p.val).sum())
}
