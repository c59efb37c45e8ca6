//! Serialized pipeline descriptions and the check suite run for each kind.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::checks::{avoidance_margin, fiber_collapse, jacobian_report, preimage_roundtrip, Obstacle};
use super::{SampleSpec, VerificationReport};
use crate::error::{Error, Result};
use crate::lattice::{torus_avoidance_pipeline, torus_avoidance_report, LatticeSpec, PipelineOptions};
use crate::maps::{
    build_double_section_map, build_exceptional_shear, build_graph_complement_map, DoubleSection, MapRef, PsiMap,
    Shear,
};
use crate::numerics::{poly_roots, Cx, Poly, RationalFn};

/// `psi` takes no parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {}

/// The on-disk form `{"kind": ..., "spec": ...}` written by `construct`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "kebab-case")]
pub enum PipelineSpec {
    Psi(PsiSpec),
    GraphComplement(RationalFn),
    DoubleSection(DoubleSection),
    Shear(Shear),
    TorusAvoidance(LatticeSpec),
}

impl PipelineSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineSpec::Psi(_) => "psi",
            PipelineSpec::GraphComplement(_) => "graph-complement",
            PipelineSpec::DoubleSection(_) => "double-section",
            PipelineSpec::Shear(_) => "shear",
            PipelineSpec::TorusAvoidance(_) => "torus-avoidance",
        }
    }

    /// Builds the map once so construction errors surface before any file is
    /// written.
    pub fn validate(&self) -> Result<()> {
        match self {
            PipelineSpec::Psi(_) | PipelineSpec::TorusAvoidance(_) => Ok(()),
            PipelineSpec::GraphComplement(s) => build_graph_complement_map(s).map(|_| ()),
            PipelineSpec::DoubleSection(d) => build_double_section_map(d).map(|_| ()),
            PipelineSpec::Shear(s) => build_exceptional_shear(s).map(|_| ()),
        }
    }

    /// The map the pipeline describes. For the torus pipeline this runs the
    /// full certification and fails with its first failing check.
    pub fn build_map(&self) -> Result<MapRef> {
        Ok(match self {
            PipelineSpec::Psi(_) => Arc::new(PsiMap),
            PipelineSpec::GraphComplement(s) => Arc::new(build_graph_complement_map(s)?),
            PipelineSpec::DoubleSection(d) => Arc::new(build_double_section_map(d)?),
            PipelineSpec::Shear(s) => Arc::new(build_exceptional_shear(s)?),
            PipelineSpec::TorusAvoidance(s) => torus_avoidance_pipeline(s)?.0,
        })
    }
}

/// Runs the checks for `pipeline`. Map pipelines sample the polydisk of radius
/// `window` (default 1) about the origin; the torus pipeline uses the lattice
/// window of its spec unless `window` overrides it.
pub fn verify(pipeline: &PipelineSpec, samples: usize, seed: u64, window: Option<f64>) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    if let PipelineSpec::TorusAvoidance(spec) = pipeline {
        let spec = match window {
            Some(w) => LatticeSpec::new(spec.basis, spec.translates.clone(), spec.ball_radius, w)?,
            None => spec.clone(),
        };
        let opts = PipelineOptions { samples, seed, ..PipelineOptions::default() };
        return torus_avoidance_report(&spec, &opts).map(|(_, r)| r);
    }
    let radius = window.unwrap_or(1.0);
    let s = SampleSpec::polydisk(samples, radius, seed);
    s.validate()?;
    let mut report = VerificationReport::new(pipeline.kind(), radius);
    report.constant("samples", samples as f64);
    report.constant("seed", seed as f64);
    match pipeline {
        PipelineSpec::Psi(_) => {
            let graph = RationalFn::new(Poly::constant(Cx::new(-1.0, 0.0)), Poly::z())?;
            report.push(avoidance_margin(&PsiMap, &Obstacle::Graph(graph), &s)?);
            report.push(jacobian_report(&PsiMap, &s)?);
            report.push(preimage_roundtrip(&PsiMap, &s)?);
        }
        PipelineSpec::GraphComplement(g) => {
            let m = build_graph_complement_map(g)?;
            report.push(avoidance_margin(&m, &Obstacle::Graph(g.clone()), &s)?);
            report.push(jacobian_report(&m, &s)?);
            report.push(preimage_roundtrip(&m, &s)?);
        }
        PipelineSpec::DoubleSection(d) => {
            let m = build_double_section_map(d)?;
            report.push(avoidance_margin(&m, &Obstacle::Sections(m.clone()), &s)?);
            report.push(jacobian_report(&m, &s)?);
        }
        PipelineSpec::Shear(sh) => {
            let m = build_exceptional_shear(sh)?;
            let zeros: Vec<_> = if sh.p.degree() == Some(0) {
                Vec::new()
            } else {
                poly_roots(&sh.p)?.into_iter().map(|r| r.value).collect()
            };
            report.push(fiber_collapse(&m, &zeros, &s)?);
            report.push(jacobian_report(&m, &s)?);
            report.push(preimage_roundtrip(&m, &s)?);
        }
        PipelineSpec::TorusAvoidance(_) => unreachable!(),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_report_passes() {
        let r = verify(&PipelineSpec::Psi(PsiSpec {}), 2000, 42, None).unwrap();
        assert!(r.overall_pass, "{r:#?}");
        for name in ["avoidance", "jacobian", "roundtrip"] {
            assert!(r.check(name).is_some());
        }
    }

    #[test]
    fn json_shape() {
        let p = PipelineSpec::Psi(PsiSpec {});
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"kind":"psi","spec":{}}"#);
        let back: PipelineSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PipelineSpec>(r#"{"kind":"nope","spec":{}}"#).is_err());
    }

    #[test]
    fn shear_with_zero_collapses_fiber() {
        let sh = Shear { p: Poly::z(), q: RationalFn::new(Poly::constant(Cx::new(2.0, 0.0)), Poly::one()).unwrap() };
        let r = verify(&PipelineSpec::Shear(sh), 500, 1, None).unwrap();
        assert!(r.overall_pass, "{r:#?}");
        assert_eq!(r.check("fiber-collapse").unwrap().margin, 0.0);
    }

    #[test]
    fn same_seed_same_report() {
        let g = RationalFn::new(Poly::one(), Poly::z()).unwrap();
        let p = PipelineSpec::GraphComplement(g);
        let a = verify(&p, 1000, 9, None).unwrap();
        let b = verify(&p, 1000, 9, None).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.overall_pass, "{a:#?}");
    }

    #[test]
    fn empty_torus_passes() {
        let spec = LatticeSpec::standard(vec![], 0.005, 5.0).unwrap();
        let r = verify(&PipelineSpec::TorusAvoidance(spec), 200, 42, None).unwrap();
        assert!(r.overall_pass, "{r:#?}");
    }
}
