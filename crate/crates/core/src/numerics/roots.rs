use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::{cx_serde, Cx, Tolerances};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    #[serde(with = "cx_serde")]
    pub value: Cx,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Residual bound `|p(r)| <= residual * max(scale(p), sum |c_k||r|^k)`.
    pub residual: f64,
    /// Eigenvalues closer than this (relative to `max(1, |z|)`) are one root.
    pub cluster: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions::from(&Tolerances::default())
    }
}

impl From<&Tolerances> for RootOptions {
    fn from(t: &Tolerances) -> Self {
        RootOptions { residual: t.root, cluster: t.cluster }
    }
}

pub fn poly_roots(p: &Poly) -> Result<Vec<Root>> {
    poly_roots_with(p, &RootOptions::default())
}

/// Roots with multiplicities via companion-matrix eigenvalues.
///
/// Exact zero low-order coefficients are split off as a root at the origin.
/// Remaining eigenvalues are grouped by single linkage at `opts.cluster`;
/// nearby groups are then merged when the merged centroid is a numerically
/// multiple root (all derivatives below the merged multiplicity nearly vanish),
/// which catches the `eps^(1/m)` scatter of higher multiplicities. Each centroid
/// gets Newton steps on `p^(m-1)`, where it is a simple root.
pub fn poly_roots_with(p: &Poly, opts: &RootOptions) -> Result<Vec<Root>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial("root-finding input"))?;
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|a| a.norm() == 0.0).count();
    let mut out = Vec::new();
    if zeros_at_origin > 0 {
        out.push(Root { value: Cx::new(0.0, 0.0), multiplicity: zeros_at_origin });
    }
    let rest = Poly::new(c[zeros_at_origin..].to_vec());
    let n = deg - zeros_at_origin;
    if n == 0 {
        return Ok(out);
    }

    let eig = companion_eigenvalues(&rest);
    let mut clusters = single_linkage(&eig, opts.cluster);
    merge_multiple_roots(&rest, &mut clusters);

    for cl in clusters {
        let m = cl.len();
        let mean = cl.iter().sum::<Cx>() / m as f64;
        let value = polish(&rest, mean, m);
        out.push(Root { value, multiplicity: m });
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

fn companion_eigenvalues(p: &Poly) -> Vec<Cx> {
    let n = p.degree().unwrap_or(0);
    let c = p.coeffs();
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[n];
    let mut m = DMatrix::<Cx>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Cx::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::new(m);
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

fn single_linkage(eig: &[Cx], tol: f64) -> Vec<Vec<Cx>> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = eig[i].norm().max(eig[j].norm()).max(1.0);
            if (eig[i] - eig[j]).norm() <= tol * s {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<Cx>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(eig[i]),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![eig[i]]);
            }
        }
    }
    groups
}

/// True if `c` behaves as a root of multiplicity `m`: the Taylor coefficients
/// of order `< m` at `c` are negligible next to the order-`m` one.
fn is_multiple_root(p: &Poly, c: Cx, m: usize) -> bool {
    let t = p.taylor_at(c);
    let am = t.get(m).map_or(0.0, |a| a.norm());
    if am == 0.0 {
        return false;
    }
    let size = p.abs_sum(c).max(p.scale());
    (0..m).all(|j| {
        // Coefficient j of a cluster of radius rho scales as am * rho^(m-j);
        // tolerate a cluster radius of 1e-9 relative plus rounding.
        let rho = 1e-9 * c.norm().max(1.0);
        t[j].norm() <= am * rho.powi((m - j) as i32) * 4.0 + 64.0 * f64::EPSILON * size
    })
}

fn merge_multiple_roots(p: &Poly, clusters: &mut Vec<Vec<Cx>>) {
    'restart: loop {
        for i in 0..clusters.len() {
            let ci = centroid(&clusters[i]);
            let mut near: Vec<(f64, usize)> = clusters
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, cl)| ((centroid(cl) - ci).norm(), j))
                .filter(|&(d, _)| d <= 1e-2 * ci.norm().max(1.0))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            // Largest candidate group first, so a full multiple root wins over
            // a partial one.
            for k in (1..=near.len()).rev() {
                let mut all = clusters[i].clone();
                for &(_, j) in &near[..k] {
                    all.extend_from_slice(&clusters[j]);
                }
                if is_multiple_root(p, centroid(&all), all.len()) {
                    let mut drop: Vec<usize> = near[..k].iter().map(|&(_, j)| j).collect();
                    clusters[i] = all;
                    drop.sort_unstable_by(|a, b| b.cmp(a));
                    for j in drop {
                        clusters.remove(j);
                    }
                    continue 'restart;
                }
            }
        }
        return;
    }
}

fn centroid(v: &[Cx]) -> Cx {
    v.iter().sum::<Cx>() / v.len() as f64
}

fn polish(p: &Poly, x0: Cx, m: usize) -> Cx {
    let d = p.nth_derivative(m - 1);
    let mut x = x0;
    for _ in 0..3 {
        let (v, dv) = d.eval_d(x);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        let next = x - step;
        if !super::is_finite(next) || d.eval(next).norm() > v.norm() {
            break;
        }
        x = next;
        if step.norm() <= f64::EPSILON * x.norm().max(1.0) {
            break;
        }
    }
    x
}

/// Residual bound used by the root postcondition.
pub fn residual_scale(p: &Poly, r: Cx) -> f64 {
    p.scale().max(p.abs_sum(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn sorted_eq(roots: &[Root], want: &[(Cx, usize)]) {
        assert_eq!(roots.len(), want.len(), "{roots:?}");
        for &(w, m) in want {
            assert!(
                roots.iter().any(|r| (r.value - w).norm() < 1e-9 && r.multiplicity == m),
                "missing {w} x{m} in {roots:?}"
            );
        }
    }

    #[test]
    fn z_squared_plus_one() {
        let r = poly_roots(&Poly::from_real(&[1.0, 0.0, 1.0])).unwrap();
        sorted_eq(&r, &[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]);
    }

    #[test]
    fn double_root() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]);
        sorted_eq(&poly_roots(&p).unwrap(), &[(c(1.0, 0.0), 2), (c(-2.0, 0.0), 1)]);
    }

    #[test]
    fn triple_and_quadruple_roots() {
        let a = c(0.5, -1.0);
        let b = c(-1.0, 2.0);
        let p = Poly::from_roots(&[a, a, a, b, b, b, b]);
        sorted_eq(&poly_roots(&p).unwrap(), &[(a, 3), (b, 4)]);
    }

    #[test]
    fn constant_has_no_roots_and_zero_errors() {
        assert!(poly_roots(&Poly::from_real(&[5.0])).unwrap().is_empty());
        assert!(matches!(poly_roots(&Poly::zero()), Err(Error::ZeroPolynomial(_))));
    }

    #[test]
    fn roots_at_origin_are_split_off() {
        let p = Poly::from_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        sorted_eq(&poly_roots(&p).unwrap(), &[(c(0.0, 0.0), 2), (c(3.0, 0.0), 1)]);
    }

    #[test]
    fn close_distinct_roots_stay_distinct() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(1.0 + 1e-4, 0.0)]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn residuals_within_tolerance() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0), c(0.5, -0.5)]);
        for r in poly_roots(&p).unwrap() {
            assert!(p.eval(r.value).norm() <= 1e-10 * residual_scale(&p, r.value));
        }
    }
}
