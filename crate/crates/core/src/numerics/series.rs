//! Truncated power series `sum a_k t^k`, all of a fixed length.

use super::Cx;
use crate::error::{Error, Result};

pub fn mul(a: &[Cx], b: &[Cx]) -> Vec<Cx> {
    let n = a.len().min(b.len());
    let mut out = vec![Cx::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `a / b`, requiring `b[0] != 0`.
pub fn div(a: &[Cx], b: &[Cx]) -> Result<Vec<Cx>> {
    let n = a.len().min(b.len());
    if n == 0 {
        return Ok(Vec::new());
    }
    if b[0].norm() == 0.0 {
        return Err(Error::InvalidInput("series division by a series vanishing at 0".into()));
    }
    let mut q = vec![Cx::new(0.0, 0.0); n];
    for k in 0..n {
        let mut s = a[k];
        for j in 1..=k {
            s -= b[j] * q[k - j];
        }
        q[k] = s / b[0];
    }
    Ok(q)
}

/// `exp(a)` via `E' = a' E`.
pub fn exp(a: &[Cx]) -> Vec<Cx> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut e = vec![Cx::new(0.0, 0.0); n];
    e[0] = a[0].exp();
    for k in 1..n {
        let mut s = Cx::new(0.0, 0.0);
        for j in 1..=k {
            s += a[j] * e[k - j] * j as f64;
        }
        e[k] = s / k as f64;
    }
    e
}

/// Principal-branch `log(a)` (constant term `Log a_0`), via `L' = a'/a`.
pub fn log(a: &[Cx]) -> Result<Vec<Cx>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a[0].norm() == 0.0 {
        return Err(Error::InvalidInput("logarithm of a series vanishing at 0".into()));
    }
    let mut l = vec![Cx::new(0.0, 0.0); n];
    l[0] = a[0].ln();
    for k in 1..n {
        let mut s = a[k] * k as f64;
        for j in 1..k {
            s -= l[j] * a[k - j] * j as f64;
        }
        l[k] = s / (a[0] * k as f64);
    }
    Ok(l)
}

/// Evaluate `sum a_k t^k`.
pub fn eval(a: &[Cx], t: Cx) -> Cx {
    a.iter().rev().fold(Cx::new(0.0, 0.0), |acc, &c| acc * t + c)
}

/// Evaluate the series and its derivative.
pub fn eval_d(a: &[Cx], t: Cx) -> (Cx, Cx) {
    let mut p = Cx::new(0.0, 0.0);
    let mut dp = Cx::new(0.0, 0.0);
    for &c in a.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

pub fn pad(mut a: Vec<Cx>, n: usize) -> Vec<Cx> {
    a.resize(n, Cx::new(0.0, 0.0));
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn exp_of_t_is_factorial_series() {
        let e = exp(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let a = vec![c(0.3, 0.2), c(1.0, -1.0), c(0.5, 0.0), c(0.0, 2.0), c(-1.0, 0.1), c(0.2, 0.2)];
        let back = log(&exp(&a)).unwrap();
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)];
        let b = vec![c(2.0, 0.5), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)];
        let q = div(&mul(&a, &b), &b).unwrap();
        for (x, y) in a.iter().zip(&q) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(div(&a, &[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(log(&[c(0.0, 0.0)]).is_err());
    }
}
