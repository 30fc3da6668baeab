use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use whitney_core::solve::residual;
use whitney_core::{Arithmetic, Dataset, WhitneyExtension};

use crate::grid::{grid_points, Axis};
use crate::input::{read_points, InputScalar, SCHEMA};
use crate::report::{load_extension, Loaded};
use crate::write_output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Fit report written by `whitney fit`, or a bare extension.
    pub extension: PathBuf,
    /// Points to evaluate at (.json or .csv). If they carry values, the
    /// residual against them is reported.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub points: Option<PathBuf>,
    /// Grid axis such as t=0:2:64 or s=circle:64; repeat for a product grid.
    /// Grids are evaluated in float arithmetic.
    #[arg(long)]
    pub grid: Vec<Axis>,
    /// Output format; defaults to csv for a .csv output path, json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the values here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
#[serde(bound(serialize = "T: InputScalar"))]
pub struct Row<T> {
    pub point: Vec<T>,
    pub value: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
#[serde(bound(serialize = "T: InputScalar"))]
pub struct Evaluation<T> {
    pub schema: u32,
    pub family: String,
    pub arithmetic: Arithmetic,
    pub rows: Vec<Row<T>>,
    /// Rows where the extension is undefined or the point is invalid.
    pub flagged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

pub fn run(args: &EvalArgs) -> Result<u8> {
    let format = args.format.unwrap_or(match &args.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let loaded = load_extension(&args.extension)?;
    let text = match &args.points {
        Some(path) => match loaded {
            Loaded::Exact(e) => render(&at_points(&e, path)?, format)?,
            Loaded::Float(e) => render(&at_points(&e, path)?, format)?,
        },
        None => {
            let e = match loaded {
                Loaded::Exact(e) => e.to_float(),
                Loaded::Float(e) => e,
            };
            let points = grid_points(&e.family, &args.grid)?;
            render(&evaluate(&e, points, None), format)?
        }
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn at_points<T: InputScalar>(e: &WhitneyExtension<T>, path: &Path) -> Result<Evaluation<T>> {
    let set = read_points::<T>(path)?;
    if let Some(values) = &set.values {
        if values.len() != set.points.len() {
            bail!("{}: {} points but {} values", path.display(), set.points.len(), values.len());
        }
    }
    Ok(evaluate(e, set.points, set.values))
}

/// Evaluates at every point; failures are flagged per row.
pub fn evaluate<T: InputScalar>(e: &WhitneyExtension<T>, points: Vec<Vec<T>>, values: Option<Vec<T>>) -> Evaluation<T> {
    let rows: Vec<Row<T>> = points
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let value = e.family.validate_point(&x, i).and_then(|_| e.eval(&x));
            match value {
                Ok(v) => Row {
                    point: x,
                    value: Some(v),
                    error: None,
                },
                Err(err) => Row {
                    point: x,
                    value: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    let residual = values.and_then(|values| {
        let points = rows.iter().map(|r| r.point.clone()).collect();
        Dataset::new(points, values).ok().map(|d| residual(e, &d))
    });
    Evaluation {
        schema: SCHEMA,
        family: e.family.name(),
        arithmetic: T::ARITHMETIC,
        flagged: rows.iter().filter(|r| r.error.is_some()).count(),
        rows,
        residual,
    }
}

fn render<T: InputScalar>(ev: &Evaluation<T>, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(ev)? + "\n"),
        Format::Csv => to_csv(ev),
    }
}

/// Columns `x1..xn, y_re, y_im, error`.
fn to_csv<T: InputScalar>(ev: &Evaluation<T>) -> Result<String> {
    let dim = ev.rows.first().map_or(0, |r| r.point.len());
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let mut header: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    header.extend(["y_re", "y_im", "error"].map(String::from));
    w.write_record(&header)?;
    for r in &ev.rows {
        let mut rec: Vec<String> = r.point.iter().map(InputScalar::show).collect();
        match &r.value {
            Some(v) => rec.extend([v.re().real_string(), v.im().real_string(), String::new()]),
            None => rec.extend([String::new(), String::new(), r.error.clone().unwrap_or_default()]),
        }
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
