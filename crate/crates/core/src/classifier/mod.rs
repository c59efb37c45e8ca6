//! Dominability verdicts from combinatorial descriptors.
//!
//! Every verdict carries a rule string of the form `family/Rn name`, where `n`
//! is the rule's position in that family's fixed precedence order.

pub mod orbifold;
pub mod p2;
pub mod surface;

use serde::{Deserialize, Serialize};

pub use orbifold::{classify_elliptic_fibration, orbifold_chi, EllipticFibration, Orbifold};
pub use p2::{classify_p2_complement, DivisorInP2, SpecialConfig};
pub use surface::{classify_surface, ClassFlag, FiberType, KodairaDim, SurfaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Dominable,
    NotDominablePropertyC,
    NotDominable,
    Unknown,
}

/// Universal orbifold cover of the base of an elliptic fibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverType {
    Sphere,
    Plane,
    Disk,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cover_type: Option<CoverType>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Verdict {
    pub(crate) fn new(outcome: Outcome, rule: &str) -> Self {
        Verdict { outcome, rule: rule.to_string(), cover_type: None, note: None }
    }

    pub(crate) fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn is_dominable(&self) -> bool {
        self.outcome == Outcome::Dominable
    }
}
