use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::Point;
use crate::numerics::{cx_serde, Cx};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Product of two disks.
    Polydisk {
        #[serde(with = "cx_serde")]
        center_z: Cx,
        #[serde(with = "cx_serde")]
        center_w: Cx,
        radius_z: f64,
        radius_w: f64,
    },
    /// Regular grid on the box `[lo, hi]` in `(Re z, Im z, Re w, Im w)`,
    /// `resolution` nodes per real axis.
    Grid { lo: [f64; 4], hi: [f64; 4], resolution: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub region: Region,
    pub seed: u64,
}

impl SampleSpec {
    pub fn polydisk(count: usize, radius: f64, seed: u64) -> Self {
        let zero = Cx::new(0.0, 0.0);
        SampleSpec {
            count,
            region: Region::Polydisk { center_z: zero, center_w: zero, radius_z: radius, radius_w: radius },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match &self.region {
            Region::Polydisk { radius_z, radius_w, .. } => *radius_z >= 0.0 && *radius_w >= 0.0,
            Region::Grid { lo, hi, resolution } => *resolution >= 1 && lo.iter().zip(hi).all(|(a, b)| a <= b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad sample region {:?}", self.region)))
        }
    }

    /// Deterministic in `seed`. Grids are thinned to `count` points by a
    /// fixed stride.
    pub fn points(&self) -> Result<Vec<Point>> {
        self.validate()?;
        Ok(match &self.region {
            Region::Polydisk { center_z, center_w, radius_z, radius_w } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut disk = |c: Cx, r: f64| {
                    let rho = r * rng.random::<f64>().sqrt();
                    c + Cx::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>())
                };
                (0..self.count).map(|_| {
                    let z = disk(*center_z, *radius_z);
                    Point::new(z, disk(*center_w, *radius_w))
                }).collect()
            }
            Region::Grid { lo, hi, resolution } => {
                let n = *resolution;
                let axis = |i: usize, k: usize| {
                    if n == 1 { 0.5 * (lo[i] + hi[i]) } else { lo[i] + (hi[i] - lo[i]) * k as f64 / (n - 1) as f64 }
                };
                let total = n.pow(4);
                let stride = if self.count == 0 { total + 1 } else { (total / self.count).max(1) };
                (0..total)
                    .step_by(stride)
                    .take(self.count)
                    .map(|idx| {
                        let k = [idx % n, (idx / n) % n, (idx / (n * n)) % n, idx / (n * n * n)];
                        Point::new(Cx::new(axis(0, k[0]), axis(1, k[1])), Cx::new(axis(2, k[2]), axis(3, k[3])))
                    })
                    .collect()
            }
        })
    }
}
