use serde::{Deserialize, Serialize};

use super::{Outcome, Verdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialConfig {
    #[default]
    None,
    ThreeConcurrentLines,
    ConicPlusTwoLinesAtConicPoint,
}

/// A reduced curve in the projective plane, described by its component degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DivisorRaw")]
pub struct DivisorInP2 {
    pub component_degrees: Vec<u32>,
    pub normal_crossing: bool,
    pub special_config: SpecialConfig,
}

#[derive(Deserialize)]
struct DivisorRaw {
    component_degrees: Vec<u32>,
    normal_crossing: bool,
    #[serde(default)]
    special_config: SpecialConfig,
}

impl TryFrom<DivisorRaw> for DivisorInP2 {
    type Error = Error;
    fn try_from(r: DivisorRaw) -> Result<Self> {
        DivisorInP2::new(r.component_degrees, r.normal_crossing, r.special_config)
    }
}

impl DivisorInP2 {
    pub fn new(component_degrees: Vec<u32>, normal_crossing: bool, special_config: SpecialConfig) -> Result<Self> {
        if component_degrees.is_empty() {
            return Err(Error::InconsistentDescriptor("component_degrees is empty".into()));
        }
        if component_degrees.contains(&0) {
            return Err(Error::InconsistentDescriptor("component degrees must be positive".into()));
        }
        if special_config != SpecialConfig::None && normal_crossing {
            return Err(Error::InconsistentDescriptor(
                "special_config and normal_crossing: a special configuration is not normal crossing".into(),
            ));
        }
        let mut sorted = component_degrees.clone();
        sorted.sort_unstable();
        let want: &[u32] = match special_config {
            SpecialConfig::None => &[],
            SpecialConfig::ThreeConcurrentLines => &[1, 1, 1],
            SpecialConfig::ConicPlusTwoLinesAtConicPoint => &[1, 1, 2],
        };
        if !want.is_empty() && sorted != want {
            return Err(Error::InconsistentDescriptor(format!(
                "special_config and component_degrees: {special_config:?} needs degrees {want:?}"
            )));
        }
        Ok(DivisorInP2 { component_degrees, normal_crossing, special_config })
    }

    pub fn degree(&self) -> u32 {
        self.component_degrees.iter().sum()
    }
}

pub fn classify_p2_complement(d: &DivisorInP2) -> Verdict {
    if d.normal_crossing {
        return if d.degree() <= 3 {
            Verdict::new(Outcome::Dominable, "p2/R1 normal-crossing-degree-at-most-three")
        } else {
            Verdict::new(Outcome::NotDominable, "p2/R1 normal-crossing-degree-above-three")
        };
    }
    match d.special_config {
        SpecialConfig::ThreeConcurrentLines => {
            Verdict::new(Outcome::NotDominable, "p2/R2 three-concurrent-lines")
        }
        SpecialConfig::ConicPlusTwoLinesAtConicPoint => {
            Verdict::new(Outcome::Dominable, "p2/R3 conic-and-two-lines-through-a-conic-point")
        }
        SpecialConfig::None => Verdict::new(Outcome::Unknown, "p2/R4 other-non-normal-crossing"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(d: &[u32]) -> DivisorInP2 {
        DivisorInP2::new(d.to_vec(), true, SpecialConfig::None).unwrap()
    }

    #[test]
    fn degree_threshold() {
        assert_eq!(classify_p2_complement(&nc(&[4])).outcome, Outcome::NotDominable);
        assert_eq!(classify_p2_complement(&nc(&[3])).outcome, Outcome::Dominable);
        assert_eq!(classify_p2_complement(&nc(&[1, 1, 1])).outcome, Outcome::Dominable);
        assert_eq!(classify_p2_complement(&nc(&[2, 2])).outcome, Outcome::NotDominable);
    }

    #[test]
    fn special_configurations() {
        let d = DivisorInP2::new(vec![1, 1, 1], false, SpecialConfig::ThreeConcurrentLines).unwrap();
        assert_eq!(classify_p2_complement(&d).outcome, Outcome::NotDominable);
        let d = DivisorInP2::new(vec![2, 1, 1], false, SpecialConfig::ConicPlusTwoLinesAtConicPoint).unwrap();
        assert_eq!(classify_p2_complement(&d).outcome, Outcome::Dominable);
        let d = DivisorInP2::new(vec![3], false, SpecialConfig::None).unwrap();
        assert_eq!(classify_p2_complement(&d).outcome, Outcome::Unknown);
    }

    #[test]
    fn validation() {
        assert!(DivisorInP2::new(vec![], true, SpecialConfig::None).is_err());
        assert!(DivisorInP2::new(vec![1, 1, 1], true, SpecialConfig::ThreeConcurrentLines).is_err());
        assert!(DivisorInP2::new(vec![2, 1], false, SpecialConfig::ThreeConcurrentLines).is_err());
    }

    #[test]
    fn json_defaults_special_config() {
        let d: DivisorInP2 = serde_json::from_str(r#"{"component_degrees":[3],"normal_crossing":true}"#).unwrap();
        assert_eq!(d.special_config, SpecialConfig::None);
    }
}
