use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{CoverType, Outcome, Verdict};
use crate::error::{Error, Result};

/// Base curve of an elliptic fibration with its multiple-fiber data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrbifoldRaw")]
pub struct Orbifold {
    /// Genus of the compactified base.
    pub genus: u32,
    /// Points removed from the compactified base.
    pub punctures: u32,
    /// Fiber multiplicities greater than one.
    pub multiplicities: Vec<u32>,
}

#[derive(Deserialize)]
struct OrbifoldRaw {
    genus: u32,
    #[serde(default)]
    punctures: u32,
    #[serde(default)]
    multiplicities: Vec<u32>,
}

impl TryFrom<OrbifoldRaw> for Orbifold {
    type Error = Error;
    fn try_from(r: OrbifoldRaw) -> Result<Self> {
        Orbifold::new(r.genus, r.punctures, r.multiplicities)
    }
}

impl Orbifold {
    pub fn new(genus: u32, punctures: u32, multiplicities: Vec<u32>) -> Result<Self> {
        if let Some(&m) = multiplicities.iter().find(|&&m| m < 2) {
            return Err(Error::InconsistentDescriptor(format!("multiplicity {m} is below 2")));
        }
        Ok(Orbifold { genus, punctures, multiplicities })
    }

    /// Number of marked points on the compactified base (punctures and
    /// multiple fibers together).
    pub fn marked_points(&self) -> usize {
        self.punctures as usize + self.multiplicities.len()
    }
}

/// `2 - 2g - punctures - sum (1 - 1/n)`, exactly.
pub fn orbifold_chi(o: &Orbifold) -> Ratio<i128> {
    let base = Ratio::from_integer(2 - 2 * o.genus as i128 - o.punctures as i128);
    o.multiplicities
        .iter()
        .fold(base, |acc, &n| acc - (Ratio::from_integer(1) - Ratio::new(1, n as i128)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticFibration {
    pub base: Orbifold,
    #[serde(default = "yes")]
    pub finitely_many_multiple_fibers: bool,
    #[serde(default = "yes")]
    pub base_quasi_projective: bool,
}

fn yes() -> bool {
    true
}

pub fn classify_elliptic_fibration(
    o: &Orbifold,
    finitely_many_multiple_fibers: bool,
    base_quasi_projective: bool,
) -> Verdict {
    let with_cover = |mut v: Verdict, c| {
        v.cover_type = Some(c);
        v
    };
    if !finitely_many_multiple_fibers {
        return with_cover(
            Verdict::new(Outcome::NotDominablePropertyC, "elliptic/R1 infinitely-many-multiple-fibers"),
            CoverType::Disk,
        );
    }
    if !base_quasi_projective {
        return with_cover(
            Verdict::new(Outcome::NotDominablePropertyC, "elliptic/R2 base-not-quasi-projective"),
            CoverType::Disk,
        );
    }
    if o.genus == 0 && (1..=2).contains(&o.marked_points()) {
        // Bad or cyclic orbifolds on the sphere: drop the marked points, the
        // base becomes C or C*, covered by the plane.
        return with_cover(
            Verdict::new(Outcome::Dominable, "elliptic/R3 sphere-with-at-most-two-marked-points"),
            CoverType::Plane,
        );
    }
    let chi = orbifold_chi(o);
    let zero = Ratio::from_integer(0);
    if chi > zero {
        with_cover(Verdict::new(Outcome::Dominable, "elliptic/R4 orbifold-euler-characteristic-positive"), CoverType::Sphere)
    } else if chi == zero {
        with_cover(Verdict::new(Outcome::Dominable, "elliptic/R4 orbifold-euler-characteristic-zero"), CoverType::Plane)
    } else {
        with_cover(
            Verdict::new(Outcome::NotDominablePropertyC, "elliptic/R4 orbifold-euler-characteristic-negative"),
            CoverType::Disk,
        )
    }
}
