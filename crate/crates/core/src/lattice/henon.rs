//! Fatou-Bieberbach map onto the basin of the attracting fixed point of
//! `H(z, w) = (w, w^2 - z/2)`, realized as `lim H^{-n} . P . L^n` with
//! `L = DH(0)` and a second-order conjugacy seed `P`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{HoloMap, Point};
use crate::numerics::{Cx, Matrix2};

/// Scale that puts `Psi / R` inside `{|w| < 1 + |z|^2}`.
pub const ESCAPE_RADIUS: f64 = 2.0;

pub fn henon(p: Point) -> Point {
    Point::new(p.w, p.w * p.w - p.z * 0.5)
}

pub fn henon_inverse(p: Point) -> Point {
    Point::new((p.z * p.z - p.w) * 2.0, p.z)
}

fn real(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

/// `DH(0) = [[0, 1], [-1/2, 0]]`; its square is `-I/2`.
pub fn linear_part() -> Matrix2 {
    Matrix2::new(real(0.0), real(1.0), real(-0.5), real(0.0))
}

fn linear_power(n: usize) -> Matrix2 {
    let mut m = Matrix2::identity();
    let l = linear_part();
    for _ in 0..n {
        m = l * m;
    }
    m
}

/// `P(y) = y + ((4/3) y2^2, (1/3) y1^2)`; `H . P - P . L` vanishes to
/// second order at the origin.
fn seed(y: Point) -> Point {
    Point::new(y.z + y.w * y.w * (4.0 / 3.0), y.w + y.z * y.z / 3.0)
}

fn seed_jacobian(y: Point) -> Matrix2 {
    Matrix2::new(real(1.0), y.w * (8.0 / 3.0), y.z * (2.0 / 3.0), real(1.0))
}

/// Fixed-point inverse of the seed near the origin.
fn seed_inverse(x: Point) -> Point {
    let mut y = x;
    for _ in 0..50 {
        let next = Point::new(x.z - y.w * y.w * (4.0 / 3.0), x.w - y.z * y.z / 3.0);
        if (next - y).norm() <= 1e-17 {
            return next;
        }
        y = next;
    }
    y
}

/// `H^{-n}(P(L^n q))`.
fn conjugate(q: Point, n: usize) -> Point {
    let mut x = seed(linear_power(n).apply(q));
    for _ in 0..n {
        x = henon_inverse(x);
    }
    x
}

/// Sunflower-spiral points in the closed unit disk.
pub fn disk_grid(n: usize) -> Vec<Cx> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(|k| Cx::from_polar(((k as f64 + 0.5) / n as f64).sqrt(), k as f64 * golden)).collect()
}

/// Product of two 50-point disk grids: the certification grid in the unit
/// bidisk.
pub fn certification_grid() -> Vec<Point> {
    let g = disk_grid(50);
    g.iter().flat_map(|&z| g.iter().map(move |&w| Point::new(z, w))).collect()
}

/// The injective map `Psi / R` onto a scaled copy of the basin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasinMap {
    /// Depth at which successive conjugates agreed to `tol` on the grid.
    pub iterations_used: usize,
    /// `max |Psi_n - Psi_{n-1}|` over the certification grid at that depth.
    pub convergence_residual: f64,
    pub scale: f64,
    pub grid_points: usize,
}

impl BasinMap {
    /// Depth used at `q`: the certified depth plus two per doubling of `|q|`
    /// beyond the unit ball, since `|L^2| = 1/2`.
    pub fn depth(&self, q: Point) -> usize {
        let grow = q.norm().log2().ceil();
        self.iterations_used + if grow > 0.0 { 2 * grow as usize } else { 0 }
    }

    /// Unscaled `Psi(q)`.
    pub fn psi(&self, q: Point) -> Point {
        conjugate(q, self.depth(q))
    }

    pub fn psi_jacobian(&self, q: Point) -> Matrix2 {
        let n = self.depth(q);
        let ln = linear_power(n);
        let y = ln.apply(q);
        let mut m = seed_jacobian(y) * ln;
        let mut x = seed(y);
        for _ in 0..n {
            m = Matrix2::new(x.z * 4.0, real(-2.0), real(1.0), real(0.0)) * m;
            x = henon_inverse(x);
        }
        m
    }

    /// `Psi^{-1}(p)`: iterate `H` into a `1e-7` ball, undo the seed, then undo
    /// `L`. `None` if the orbit does not reach the ball within 200 steps.
    pub fn psi_inverse(&self, p: Point) -> Option<Point> {
        let mut x = p;
        let mut m = 0usize;
        while x.norm() > 1e-7 {
            if m >= 200 || !x.is_finite() || x.norm() > 1e6 {
                return None;
            }
            x = henon(x);
            m += 1;
        }
        let y = seed_inverse(x);
        // L^{-1} = [[0, -2], [1, 0]].
        let li = Matrix2::new(real(0.0), real(-2.0), real(1.0), real(0.0));
        let mut q = y;
        for _ in 0..m {
            q = li.apply(q);
        }
        Some(q)
    }
}

impl HoloMap for BasinMap {
    fn eval(&self, p: Point) -> Point {
        self.psi(p).scale(1.0 / self.scale)
    }

    fn jacobian(&self, p: Point) -> Matrix2 {
        let s = real(1.0 / self.scale);
        Matrix2::new(s, real(0.0), real(0.0), s) * self.psi_jacobian(p)
    }

    fn inverse(&self, p: Point) -> Option<Point> {
        self.psi_inverse(p.scale(self.scale))
    }

    fn has_inverse(&self) -> bool {
        true
    }

    fn description(&self) -> String {
        format!("Psi/{} basin map, depth {}", self.scale, self.iterations_used)
    }
}

/// Increases the depth until successive conjugates agree to `tol` on the
/// certification grid.
pub fn henon_basin_map(n_max: usize, tol: f64) -> Result<BasinMap> {
    if n_max < 1 || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("need n_max >= 1 and tol > 0, got {n_max}, {tol}")));
    }
    let grid = certification_grid();
    let mut prev: Vec<Point> = grid.par_iter().map(|&q| conjugate(q, 0)).collect();
    let mut residual = f64::INFINITY;
    for n in 1..=n_max {
        let cur: Vec<Point> = grid.par_iter().map(|&q| conjugate(q, n)).collect();
        residual = cur.iter().zip(&prev).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        if residual <= tol {
            return Ok(BasinMap {
                iterations_used: n,
                convergence_residual: residual,
                scale: ESCAPE_RADIUS,
                grid_points: grid.len(),
            });
        }
        prev = cur;
    }
    Err(Error::NotConverged { residual, iterations: n_max })
}

/// Forward iterations until `|H^k(p)| <= |p| / 2`, or `None` within `max`.
pub fn halving_steps(p: Point, max: usize) -> Option<usize> {
    let target = 0.5 * p.norm();
    let mut x = p;
    for k in 0..=max {
        if x.norm() <= target {
            return Some(k);
        }
        x = henon(x);
    }
    None
}

/// Margin `(1 + |z|^2) - |w|` of membership in `{|w| < 1 + |z|^2}`.
pub fn v_margin(p: Point) -> f64 {
    1.0 + p.z.norm_sqr() - p.w.norm()
}
