//! The `c2dom` command line.
//!
//! Exit codes: 0 on success, 1 when a certification check fails (any report is
//! still written), 2 on malformed input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::classifier::{
    classify_elliptic_fibration, classify_p2_complement, classify_surface, DivisorInP2, EllipticFibration, Orbifold,
    SurfaceDescriptor, Verdict,
};
use crate::error::Error;
use crate::harness::{verify, PipelineSpec, PsiSpec, VerificationReport};
use crate::lattice::{torus_avoidance_report, PipelineOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATION: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "c2dom", version, about = "Dominability verdicts and verified dominating maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the verdict for a descriptor as JSON.
    Classify {
        #[arg(value_enum)]
        what: ClassifyKind,
        /// Inline JSON or a path to a JSON file.
        spec: String,
    },
    /// Validate a construction and write it as a pipeline file.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        /// Inline JSON or a path to a JSON file.
        spec: String,
        /// Where to write the pipeline; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check on a pipeline and write the JSON and CSV reports.
    Verify {
        pipeline: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Lattice window for torus pipelines, sample polydisk radius otherwise.
        #[arg(long)]
        window: Option<f64>,
        /// JSON report path; defaults to `<pipeline>.report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV report path; defaults to `<pipeline>.report.csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassifyKind {
    Orbifold,
    P2,
    Surface,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConstructKind {
    Psi,
    GraphComplement,
    DoubleSection,
    Shear,
    TorusAvoidance,
}

/// A bare orbifold is read as the base of a fibration with the default flags.
#[derive(Deserialize)]
#[serde(untagged)]
enum OrbifoldInput {
    Fibration(EllipticFibration),
    Base(Orbifold),
}

enum Failure {
    Malformed(anyhow::Error),
    Certification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let certification = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<Error>(),
                Some(Error::Certification { .. } | Error::NotConverged { .. } | Error::SurrogateBudget { .. })
            )
        });
        if certification {
            Failure::Certification(format!("{e:#}"))
        } else {
            Failure::Malformed(e)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            EXIT_MALFORMED
        }
        Err(Failure::Certification(msg)) => {
            eprintln!("certification failed: {msg}");
            EXIT_CERTIFICATION
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Classify { what, spec } => {
            let v = classify(what, &spec)?;
            println!("{}", serde_json::to_string_pretty(&v).expect("verdict serializes"));
            Ok(EXIT_OK)
        }
        Command::Construct { kind, spec, out } => construct(kind, &spec, out.as_deref()),
        Command::Verify { pipeline, samples, seed, window, out, csv } => {
            run_verify(&pipeline, samples, seed, window, out, csv)
        }
    }
}

fn read_input(arg: &str) -> anyhow::Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

fn parse<T: DeserializeOwned>(arg: &str) -> anyhow::Result<T> {
    let text = read_input(arg)?;
    serde_json::from_str(&text).map_err(|e| anyhow::Error::new(Error::Json(e.to_string())))
}

pub fn classify(what: ClassifyKind, spec: &str) -> anyhow::Result<Verdict> {
    Ok(match what {
        ClassifyKind::Orbifold => match parse::<OrbifoldInput>(spec)? {
            OrbifoldInput::Fibration(f) => {
                classify_elliptic_fibration(&f.base, f.finitely_many_multiple_fibers, f.base_quasi_projective)
            }
            OrbifoldInput::Base(o) => classify_elliptic_fibration(&o, true, true),
        },
        ClassifyKind::P2 => classify_p2_complement(&parse::<DivisorInP2>(spec)?),
        ClassifyKind::Surface => classify_surface(&parse::<SurfaceDescriptor>(spec)?)?,
    })
}

fn construct(kind: ConstructKind, spec: &str, out: Option<&Path>) -> Result<i32, Failure> {
    let pipeline = match kind {
        ConstructKind::Psi => {
            // Any JSON object is accepted; psi has no parameters.
            let _: serde_json::Value = parse(spec)?;
            PipelineSpec::Psi(PsiSpec {})
        }
        ConstructKind::GraphComplement => PipelineSpec::GraphComplement(parse(spec)?),
        ConstructKind::DoubleSection => PipelineSpec::DoubleSection(parse(spec)?),
        ConstructKind::Shear => PipelineSpec::Shear(parse(spec)?),
        ConstructKind::TorusAvoidance => PipelineSpec::TorusAvoidance(parse(spec)?),
    };
    pipeline.validate().map_err(anyhow::Error::new)?;
    let text = serde_json::to_string_pretty(&pipeline).expect("pipeline serializes");
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    if let PipelineSpec::TorusAvoidance(s) = &pipeline {
        let (_, report) = torus_avoidance_report(s, &PipelineOptions::default()).map_err(anyhow::Error::new)?;
        if !report.overall_pass {
            return Err(Failure::Certification(failure_summary(&report)));
        }
    }
    Ok(EXIT_OK)
}

fn failure_summary(r: &VerificationReport) -> String {
    let names: Vec<String> = r.failures().iter().map(|c| format!("{} (margin {:e})", c.name, c.margin)).collect();
    format!("{}: {}", r.pipeline_id, names.join(", "))
}

fn sibling(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_verify(
    pipeline: &Path,
    samples: usize,
    seed: u64,
    window: Option<f64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<i32, Failure> {
    let spec: PipelineSpec = parse(&pipeline.to_string_lossy())?;
    let mut report = verify(&spec, samples, seed, window).map_err(anyhow::Error::new)?;
    report.stamp();
    let json_path = out.unwrap_or_else(|| sibling(pipeline, ".report.json"));
    let csv_path = csv.unwrap_or_else(|| sibling(pipeline, ".report.csv"));
    fs::write(&json_path, report.to_json()).with_context(|| format!("writing {}", json_path.display()))?;
    fs::write(&csv_path, report.to_csv()).with_context(|| format!("writing {}", csv_path.display()))?;
    for c in &report.checks {
        println!("{:<22} {:>5} margin {:e}", c.name, if c.pass { "pass" } else { "FAIL" }, c.margin);
    }
    println!("report: {}", json_path.display());
    if report.overall_pass {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Certification(failure_summary(&report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_cubic_inline() {
        let v = classify(ClassifyKind::P2, r#"{"component_degrees":[3],"normal_crossing":true}"#).unwrap();
        assert!(v.is_dominable());
    }

    #[test]
    fn bare_orbifold_accepted() {
        let a = classify(ClassifyKind::Orbifold, r#"{"genus":0,"punctures":0,"multiplicities":[2,3,7]}"#).unwrap();
        let b = classify(
            ClassifyKind::Orbifold,
            r#"{"base":{"genus":0,"punctures":0,"multiplicities":[2,3,7]}}"#,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(!a.is_dominable());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["c2dom", "classify", "p2", "{not json"]), EXIT_MALFORMED);
        assert_eq!(run(["c2dom", "bogus"]), EXIT_MALFORMED);
        assert_eq!(run(["c2dom", "classify", "p2", r#"{"component_degrees":[1],"normal_crossing":true}"#]), EXIT_OK);
        assert_eq!(run(["c2dom", "construct", "shear", r#"{"p":[0],"q":{"num":[1],"den":[1]}}"#]), EXIT_MALFORMED);
    }
}
