//! Sampling, margin measurement and report assembly.

pub mod checks;
pub mod pipelines;
pub mod report;
pub mod sampling;

pub use checks::{avoidance_margin, fiber_collapse, jacobian_report, preimage_roundtrip, Obstacle};
pub use pipelines::{verify, PipelineSpec, PsiSpec};
pub use report::{CheckResult, VerificationReport};
pub use sampling::{Region, SampleSpec};
