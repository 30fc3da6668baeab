//! Fit reports: the JSON written by `fit` and read back by `eval` and
//! `report`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use whitney_core::perturb::GeneralPositionReport;
use whitney_core::solve::{representation_report, RepresentationReport};
use whitney_core::{Arithmetic, Error, GaussianRational, WhitneyExtension};

use crate::input::{check_schema, InputScalar, SCHEMA};

/// Outcome of a command; each maps to a stable exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "OK")]
    Ok,
    InvalidInput,
    NotInGeneralPosition,
    ToleranceUnreachable,
    MaximalityUnreachable,
}

impl Status {
    pub fn of(err: &anyhow::Error) -> Status {
        match err.downcast_ref::<Error>() {
            Some(Error::NotInGeneralPosition(_) | Error::NeedsPerturbation) => Status::NotInGeneralPosition,
            Some(Error::ToleranceUnreachable { .. }) => Status::ToleranceUnreachable,
            Some(Error::MaximalityUnreachable) => Status::MaximalityUnreachable,
            _ => Status::InvalidInput,
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::InvalidInput => 1,
            Status::NotInGeneralPosition => 2,
            Status::ToleranceUnreachable => 3,
            Status::MaximalityUnreachable => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: InputScalar", deserialize = "T: InputScalar"))]
pub struct FitReport<T> {
    pub schema: u32,
    pub status: Status,
    pub family: String,
    pub target_eps: f64,
    pub extension: WhitneyExtension<T>,
    /// `sup_i |f(x_i) − y_i|` at the original points.
    pub residual: f64,
    pub representation: RepresentationReport,
    pub general_position: GeneralPositionReport,
    /// `‖M‖∞·‖M⁻¹‖∞` of the interpolation matrix (float mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    pub timing_ms: f64,
}

/// Written instead of a [`FitReport`] when a fit fails.
#[derive(Debug, Serialize)]
pub struct FailureReport {
    pub schema: u32,
    pub status: Status,
    pub error: String,
}

impl FailureReport {
    pub fn new(err: &anyhow::Error) -> Self {
        FailureReport {
            schema: SCHEMA,
            status: Status::of(err),
            error: format!("{err:#}"),
        }
    }
}

/// An extension read from a fit report or a bare extension file.
pub enum Loaded {
    Exact(WhitneyExtension<GaussianRational>),
    Float(WhitneyExtension<Complex64>),
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_report_header(v: &Value) -> Result<()> {
    let schema = match v.get("schema") {
        None => None,
        Some(s) => Some(s.as_u64().and_then(|s| u32::try_from(s).ok()).context("schema must be a small integer")?),
    };
    check_schema(schema)?;
    if let Some(status) = v.get("status") {
        if status != "OK" {
            let error = v.get("error").and_then(Value::as_str).unwrap_or("no extension");
            bail!("the report records a failed fit ({status}): {error}");
        }
    }
    Ok(())
}

fn arithmetic_of(ext: &Value) -> Result<Arithmetic> {
    let a = ext.get("arithmetic").context("extension has no arithmetic field")?;
    Ok(serde_json::from_value(a.clone())?)
}

pub fn load_extension(path: &Path) -> Result<Loaded> {
    let v = read_json(path)?;
    check_report_header(&v)?;
    let ext = v.get("extension").cloned().unwrap_or(v);
    let what = || format!("reading the extension in {}", path.display());
    Ok(match arithmetic_of(&ext)? {
        Arithmetic::Exact => Loaded::Exact(serde_json::from_value(ext).with_context(what)?),
        Arithmetic::Float => Loaded::Float(serde_json::from_value(ext).with_context(what)?),
    })
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Fit report written by `whitney fit`.
    pub report: PathBuf,
    /// Print the representation report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &ReportArgs) -> Result<u8> {
    let v = read_json(&args.report)?;
    check_report_header(&v)?;
    let ext = v.get("extension").context("not a fit report: no extension field")?;
    let what = || format!("reading {}", args.report.display());
    let text = match arithmetic_of(ext)? {
        Arithmetic::Exact => render::<GaussianRational>(&serde_json::from_value(v).with_context(what)?, args.json)?,
        Arithmetic::Float => render::<Complex64>(&serde_json::from_value(v).with_context(what)?, args.json)?,
    };
    print!("{text}");
    Ok(0)
}

fn render<T: InputScalar>(r: &FitReport<T>, json: bool) -> Result<String> {
    let e = &r.extension;
    let rep = representation_report(e);
    if json {
        return Ok(serde_json::to_string_pretty(&rep)? + "\n");
    }
    let mut s = String::new();
    writeln!(s, "family        {}", r.family)?;
    writeln!(s, "arithmetic    {}", e.arithmetic)?;
    let mode = serde_json::to_value(e.mode)?;
    writeln!(s, "mode          {}", mode.as_str().unwrap_or("?"))?;
    writeln!(s, "residual      {:e} (target {:e})", r.residual, r.target_eps)?;
    writeln!(s, "coefficients")?;
    for (l, a) in e.ells.iter().zip(&e.coeffs) {
        writeln!(s, "  l={l:<4} {}", a.show())?;
    }
    let summands: Vec<String> = rep.summands.iter().map(i64::to_string).collect();
    let maximal = if rep.maximal { "maximal" } else { "not maximal" };
    writeln!(s, "summands      {} ({maximal})", summands.join(", "))?;
    let moved: Vec<String> = e.perturbation.moved().map(|m| (m.index + 1).to_string()).collect();
    if moved.is_empty() {
        writeln!(s, "perturbation  none")?;
    } else {
        writeln!(
            s,
            "perturbation  points {} moved, max displacement {:e}",
            moved.join(","),
            e.perturbation.max_displacement
        )?;
    }
    if let Some(c) = r.condition {
        writeln!(s, "condition     {c:e}")?;
    }
    writeln!(s, "time          {:.3} ms", r.timing_ms)?;
    Ok(s)
}
