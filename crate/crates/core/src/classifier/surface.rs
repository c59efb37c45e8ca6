use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Outcome, Verdict};
use crate::error::{Error, Result};

/// Kodaira dimension of a compact surface, or logarithmic Kodaira dimension
/// of a quasi-projective one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KodairaDim {
    MinusInfinity,
    Zero,
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberType {
    #[default]
    None,
    Elliptic,
    /// `P^1` with `k` punctures.
    P1KPunctures(u32),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassFlag {
    K3,
    K3Elliptic,
    K3Kummer,
    TorusOrAbelian,
    Hyperelliptic,
    Enriques,
    KodairaSurface,
    Inoue,
    HopfNonelliptic,
    AffineWithNonrationalBoundaryComponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub kodaira_dim: KodairaDim,
    pub compact: bool,
    #[serde(default)]
    pub algebraic_dim_zero: bool,
    #[serde(default)]
    pub irregularity_q: u32,
    /// Defaults to `irregularity_q` when omitted.
    #[serde(default)]
    pub log_irregularity_qbar: Option<u32>,
    #[serde(default)]
    pub fiber_type: FiberType,
    #[serde(default)]
    pub boundary_connected: Option<bool>,
    #[serde(default)]
    pub class_flags: BTreeSet<ClassFlag>,
    #[serde(default)]
    pub pi1_finite_ext_abelian: Option<bool>,
}

impl SurfaceDescriptor {
    pub fn compact(kodaira_dim: KodairaDim) -> Self {
        SurfaceDescriptor {
            kodaira_dim,
            compact: true,
            algebraic_dim_zero: false,
            irregularity_q: 0,
            log_irregularity_qbar: None,
            fiber_type: FiberType::None,
            boundary_connected: None,
            class_flags: BTreeSet::new(),
            pi1_finite_ext_abelian: None,
        }
    }

    pub fn open(kodaira_dim: KodairaDim, qbar: u32) -> Self {
        SurfaceDescriptor {
            compact: false,
            log_irregularity_qbar: Some(qbar),
            ..SurfaceDescriptor::compact(kodaira_dim)
        }
    }

    pub fn qbar(&self) -> u32 {
        self.log_irregularity_qbar.unwrap_or(self.irregularity_q)
    }

    pub fn has(&self, f: ClassFlag) -> bool {
        self.class_flags.contains(&f)
    }

    /// Rejects flag and invariant combinations that no surface realizes.
    pub fn validate(&self) -> Result<()> {
        use ClassFlag::*;
        use KodairaDim::*;
        let bad = |m: String| Err(Error::InconsistentDescriptor(m));
        let k = self.kodaira_dim;

        for f in [K3Elliptic, K3Kummer] {
            if self.has(f) && !self.has(K3) {
                return bad(format!("class_flags: {f:?} requires K3"));
            }
        }
        let classes = [K3, TorusOrAbelian, Hyperelliptic, Enriques, KodairaSurface, Inoue, HopfNonelliptic, AffineWithNonrationalBoundaryComponent];
        let present: Vec<_> = classes.iter().filter(|f| self.has(**f)).collect();
        if present.len() > 1 {
            return bad(format!("class_flags: {present:?} are mutually exclusive"));
        }
        for f in [K3, TorusOrAbelian, Hyperelliptic, Enriques, KodairaSurface] {
            if self.has(f) && !(self.compact && k == Zero) {
                return bad(format!("class_flags/kodaira_dim/compact: {f:?} is a compact surface of Kodaira dimension zero"));
            }
        }
        for f in [Inoue, HopfNonelliptic] {
            if self.has(f) && !(self.compact && k == MinusInfinity && self.algebraic_dim_zero) {
                return bad(format!(
                    "class_flags/kodaira_dim/algebraic_dim_zero: {f:?} is compact with kappa = -infinity and algebraic dimension zero"
                ));
            }
        }
        if self.has(AffineWithNonrationalBoundaryComponent) && self.compact {
            return bad("class_flags/compact: an affine surface is not compact".into());
        }
        if self.has(K3Elliptic) && self.algebraic_dim_zero {
            return bad("class_flags/algebraic_dim_zero: an elliptic K3 has positive algebraic dimension".into());
        }
        if self.algebraic_dim_zero {
            if !self.compact {
                return bad("algebraic_dim_zero/compact: algebraic dimension is recorded for compact surfaces only".into());
            }
            if !matches!(k, MinusInfinity | Zero) {
                return bad("algebraic_dim_zero/kodaira_dim: algebraic dimension zero forces kappa in {-infinity, 0}".into());
            }
            if matches!(self.fiber_type, FiberType::Elliptic | FiberType::P1KPunctures(_)) {
                return bad("algebraic_dim_zero/fiber_type: a surface of algebraic dimension zero has no fibration".into());
            }
        }
        if k == Two {
            match self.fiber_type {
                FiberType::Elliptic => return bad("kodaira_dim/fiber_type: an elliptic fibration has Kodaira dimension at most one".into()),
                FiberType::P1KPunctures(n) if n <= 2 => {
                    return bad("kodaira_dim/fiber_type: fibers P^1 with at most two punctures force Kodaira dimension at most one".into())
                }
                _ => {}
            }
        }
        if self.compact {
            if self.boundary_connected.is_some() {
                return bad("compact/boundary_connected: a compact surface has no boundary divisor".into());
            }
            if let Some(qb) = self.log_irregularity_qbar {
                if qb != self.irregularity_q {
                    return bad("compact/log_irregularity_qbar: for compact surfaces qbar equals q".into());
                }
            }
            if let FiberType::P1KPunctures(n) = self.fiber_type {
                if n > 0 {
                    return bad("compact/fiber_type: fibers of a compact surface are not punctured".into());
                }
            }
            if k == MinusInfinity && !self.algebraic_dim_zero && self.fiber_type != FiberType::Elliptic {
                if let Some(pi1) = self.pi1_finite_ext_abelian {
                    if pi1 != (self.irregularity_q < 2) {
                        return bad("pi1_finite_ext_abelian/irregularity_q: for ruled surfaces pi1 is finite-by-abelian exactly when q < 2".into());
                    }
                }
            }
        }
        if self.has(KodairaSurface) && self.pi1_finite_ext_abelian == Some(true) {
            return bad("class_flags/pi1_finite_ext_abelian: Kodaira surface groups are not finite extensions of abelian groups".into());
        }
        Ok(())
    }
}

/// Applies the surface rules in a fixed order, recorded in the rule string.
pub fn classify_surface(s: &SurfaceDescriptor) -> Result<Verdict> {
    s.validate()?;
    Ok(if s.compact { classify_compact(s) } else { classify_open(s) })
}

fn classify_compact(s: &SurfaceDescriptor) -> Verdict {
    use ClassFlag::*;
    use KodairaDim::*;
    use Outcome::*;
    let pi1_rule = |rule: &str| match s.pi1_finite_ext_abelian {
        Some(true) => Verdict::new(Dominable, rule),
        Some(false) => Verdict::new(NotDominablePropertyC, rule),
        None => Verdict::new(Unknown, rule).with_note("fundamental group not supplied"),
    };
    match s.kodaira_dim {
        Two => Verdict::new(NotDominable, "compact/R1 general-type"),
        MinusInfinity if s.has(Inoue) => Verdict::new(NotDominable, "compact/R2 inoue")
            .with_note("universal cover is disk times plane; not property C"),
        MinusInfinity if s.has(HopfNonelliptic) => Verdict::new(Dominable, "compact/R3 non-elliptic-hopf"),
        MinusInfinity if s.algebraic_dim_zero => {
            Verdict::new(Unknown, "compact/R4 kappa-minus-infinity-algebraic-dimension-zero")
        }
        MinusInfinity if s.fiber_type == FiberType::Elliptic => pi1_rule("compact/R5 elliptic-fundamental-group"),
        MinusInfinity => {
            if s.irregularity_q < 2 {
                Verdict::new(Dominable, "compact/R6 ruled-irregularity-below-two")
            } else {
                Verdict::new(NotDominablePropertyC, "compact/R6 ruled-irregularity-at-least-two")
            }
        }
        Zero if s.has(KodairaSurface) => Verdict::new(Dominable, "compact/R7 kodaira-surface")
            .with_note("fundamental group is not a finite extension of an abelian group"),
        Zero if s.has(K3Elliptic) => Verdict::new(Dominable, "compact/R8 elliptic-k3"),
        Zero if s.has(K3Kummer) => Verdict::new(Dominable, "compact/R9 kummer-k3"),
        Zero if s.has(K3) => Verdict::new(Unknown, "compact/R10 k3-neither-elliptic-nor-kummer"),
        Zero => Verdict::new(Dominable, "compact/R11 kappa-zero-non-k3"),
        One => pi1_rule("compact/R12 elliptic-fundamental-group"),
    }
}

fn classify_open(s: &SurfaceDescriptor) -> Verdict {
    use ClassFlag::*;
    use KodairaDim::*;
    use Outcome::*;
    let qbar = s.qbar();
    let zariski = "decided by existence of a Zariski-dense entire curve, not by these invariants";
    match s.kodaira_dim {
        Two => Verdict::new(NotDominable, "open/R1 log-general-type"),
        MinusInfinity if qbar >= 2 => Verdict::new(NotDominablePropertyC, "open/R2 log-kappa-minus-infinity-qbar-at-least-two"),
        MinusInfinity => {
            let short_fibers = matches!(s.fiber_type, FiberType::P1KPunctures(k) if k <= 2);
            if qbar == 0 && s.boundary_connected == Some(true) && short_fibers {
                Verdict::new(Dominable, "open/R3 connected-boundary-punctured-line-fibration")
            } else if qbar == 1 {
                Verdict::new(Unknown, "open/R4 log-kappa-minus-infinity-qbar-one").with_note(zariski)
            } else {
                Verdict::new(Unknown, "open/R5 log-kappa-minus-infinity-qbar-zero-unresolved")
            }
        }
        Zero if qbar >= 2 => Verdict::new(Dominable, "open/R6 semi-abelian-model"),
        Zero if s.has(AffineWithNonrationalBoundaryComponent) => {
            Verdict::new(Unknown, "open/R7 affine-nonrational-boundary").with_note(zariski)
        }
        Zero if qbar == 1 => Verdict::new(Unknown, "open/R8 log-kappa-zero-qbar-one").with_note(zariski),
        Zero => Verdict::new(Unknown, "open/R9 log-kappa-zero-qbar-zero"),
        One => Verdict::new(Unknown, "open/R10 log-kappa-one").with_note(zariski),
    }
}
