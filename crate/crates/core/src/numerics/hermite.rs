use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::{cx_serde, cx_vec_serde, Cx};
use crate::error::{Error, Result};

/// Value and derivatives of a function at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JetRaw")]
pub struct Jet {
    #[serde(with = "cx_serde")]
    pub base_point: Cx,
    /// `f(a), f'(a), f''(a), ...`
    #[serde(with = "cx_vec_serde")]
    pub values: Vec<Cx>,
    pub order: usize,
}

#[derive(Deserialize)]
struct JetRaw {
    #[serde(with = "cx_serde")]
    base_point: Cx,
    #[serde(with = "cx_vec_serde")]
    values: Vec<Cx>,
    order: Option<usize>,
}

impl TryFrom<JetRaw> for Jet {
    type Error = Error;
    fn try_from(r: JetRaw) -> Result<Self> {
        let order = r.order.unwrap_or(r.values.len());
        if order != r.values.len() {
            return Err(Error::InvalidInput(format!(
                "jet order {order} but {} values",
                r.values.len()
            )));
        }
        Jet::new(r.base_point, r.values)
    }
}

impl Jet {
    pub fn new(base_point: Cx, values: Vec<Cx>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("jet must carry at least a value".into()));
        }
        let order = values.len();
        Ok(Jet { base_point, values, order })
    }

    /// Jet from Taylor coefficients `a_k` (so `f^(k) = k! a_k`).
    pub fn from_taylor(base_point: Cx, taylor: &[Cx]) -> Result<Self> {
        let mut fact = 1.0;
        let values = taylor
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                if k > 0 {
                    fact *= k as f64;
                }
                a * fact
            })
            .collect();
        Jet::new(base_point, values)
    }
}

/// Osculating polynomial matching every jet, of degree at most
/// `sum(order) - 1`, via confluent divided differences.
pub fn hermite_jet_poly(jets: &[Jet]) -> Result<Poly> {
    for (i, j) in jets.iter().enumerate() {
        if j.values.len() != j.order || j.order == 0 {
            return Err(Error::InvalidInput("jet order mismatch".into()));
        }
        let a = j.base_point;
        if jets[..i]
            .iter()
            .any(|k| (k.base_point - a).norm() <= 1e-13 * a.norm().max(1.0))
        {
            return Err(Error::DuplicateBasePoint(a));
        }
    }
    let mut nodes = Vec::new();
    let mut owner = Vec::new();
    for (ji, j) in jets.iter().enumerate() {
        for _ in 0..j.order {
            nodes.push(j.base_point);
            owner.push(ji);
        }
    }
    let n = nodes.len();
    if n == 0 {
        return Ok(Poly::zero());
    }

    // table[i] holds f[x_i, ..., x_{i+k}] after pass k.
    let mut table: Vec<Cx> = (0..n).map(|i| jets[owner[i]].values[0]).collect();
    let mut newton = vec![table[0]];
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
        for i in 0..n - k {
            let (a, b) = (nodes[i], nodes[i + k]);
            table[i] = if owner[i] == owner[i + k] {
                jets[owner[i]].values[k] / fact
            } else {
                (table[i + 1] - table[i]) / (b - a)
            };
        }
        newton.push(table[0]);
    }

    // Expand the Newton form by nested multiplication.
    let mut p = Poly::constant(newton[n - 1]);
    for k in (0..n - 1).rev() {
        p = &p * &Poly::new(vec![-nodes[k], Cx::new(1.0, 0.0)]);
        p = &p + &Poly::constant(newton[k]);
    }
    Ok(p)
}
