use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::Args;
use num::complex::Complex64;
use whitney_core::basis::basis_node;
use whitney_core::linalg::Matrix;
use whitney_core::perturb::general_position_check;
use whitney_core::solve::{
    epsilon_from_f64, exact_correct, maximize_summands, representation_report, residual, system_matrix,
};
use whitney_core::{fit, fit_perturbed, Arithmetic, BasisFamily, Dataset, Error, Field, GaussianRational, WhitneyExtension};

use crate::config::{parse_eps, ConfigFile, Job, JobArgs, Mode, DEFAULT_EPS};
use crate::input::{read_points, InputScalar, SCHEMA};
use crate::report::{FailureReport, FitReport, Status};
use crate::write_output;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset file (.json, or .csv with columns x1..xn, y_re, y_im).
    pub data: PathBuf,
    #[command(flatten)]
    pub job: JobArgs,
    /// Target residual at the original points, e.g. 1e-9 or 1/1000.
    #[arg(long)]
    pub eps: Option<String>,
    /// Correct the perturbed fit so it takes the original values exactly.
    #[arg(long)]
    pub exact_correct: bool,
    /// Pick a perturbation that makes every coefficient nonzero.
    #[arg(long)]
    pub maximize_summands: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Settings {
    family: BasisFamily,
    eps: f64,
    exact_correct: bool,
    maximize_summands: bool,
}

pub fn run(args: &FitArgs) -> Result<u8> {
    let file = ConfigFile::load(args.job.config.as_deref())?;
    let out = args.out.clone().or_else(|| file.out.clone());
    let result = (|| {
        let job = Job::resolve(&args.job, &file)?;
        let eps = match args.eps.clone().or(file.eps_text()?) {
            Some(text) => parse_eps(&text)?,
            None => DEFAULT_EPS,
        };
        let settings = Settings {
            family: job.family,
            eps,
            exact_correct: args.exact_correct || file.exact_correct.unwrap_or(false),
            maximize_summands: args.maximize_summands || file.maximize_summands.unwrap_or(false),
        };
        match job.mode {
            Mode::Exact => to_json(&fit_report::<GaussianRational>(args, &settings)?),
            Mode::Float => to_json(&fit_report::<Complex64>(args, &settings)?),
        }
    })();
    match result {
        Ok(text) => {
            write_output(out.as_deref(), &text)?;
            Ok(0)
        }
        Err(err) => {
            if let Some(path) = out.as_deref() {
                write_output(Some(path), &to_json(&FailureReport::new(&err))?)?;
            }
            Err(err)
        }
    }
}

fn to_json<S: serde::Serialize>(value: &S) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn fit_report<T: InputScalar>(args: &FitArgs, s: &Settings) -> Result<FitReport<T>> {
    let set = read_points::<T>(&args.data)?;
    let values = set
        .values
        .ok_or_else(|| anyhow!("{}: dataset has no values", args.data.display()))?;
    let data = Dataset::new(set.points, values)?;
    let fam = &s.family;
    let general_position = general_position_check(&data, fam);
    let start = Instant::now();
    let ext = match (s.maximize_summands, s.exact_correct) {
        (true, false) => maximize_summands(&data, fam, s.eps)?,
        (true, true) => exact_correct(&maximize_summands(&data, fam, s.eps)?, &data)?,
        (false, false) => fit(&data, fam, s.eps)?,
        // The correction restores the original values, so the perturbed
        // fit itself need not meet the target.
        (false, true) => exact_correct(&fit_perturbed(&data, fam, &epsilon_from_f64(s.eps.min(1.0))?)?, &data)?,
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let res = ext.residual.unwrap_or_else(|| residual(&ext, &data));
    if res.is_nan() || res >= s.eps {
        return Err(Error::ToleranceUnreachable {
            best: res,
            target: s.eps,
            attempts: 1,
        }
        .into());
    }
    log::info!("fitted {} points on {} with residual {res:e}", data.len(), fam.name());
    Ok(FitReport {
        schema: SCHEMA,
        status: Status::Ok,
        family: fam.name(),
        target_eps: s.eps,
        condition: (T::ARITHMETIC == Arithmetic::Float).then(|| condition_number(&ext, &data)).flatten(),
        representation: representation_report(&ext),
        residual: res,
        general_position,
        extension: ext,
        timing_ms,
    })
}

fn inf_norm<T: Field>(m: &Matrix<T>) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(Field::modulus).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖M‖∞·‖M⁻¹‖∞` for the matrix solved at the perturbed points.
fn condition_number<T: Field>(e: &WhitneyExtension<T>, d: &Dataset<T>) -> Option<f64> {
    let moved = e.perturbation.apply(&e.family, d).ok()?;
    let nodes = moved
        .points
        .iter()
        .map(|x| basis_node(&e.family, x))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    let m = system_matrix(&nodes, &e.ells).ok()?;
    let inv = m.inverse()?;
    Some(inf_norm(&m) * inf_norm(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use whitney_core::Orientation;

    #[test]
    fn condition_of_a_two_point_fit() {
        let x = |a: f64, b: f64| vec![Complex64::new(a, 0.0), Complex64::new(0.0, 0.0), Complex64::new(b, 0.0), Complex64::new(0.0, 0.0)];
        let d = Dataset::new(
            vec![x(1.0, 0.0), x(5.0 / 3.0, 4.0 / 3.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let e = fit(&d, &fam, 1e-9).unwrap();
        // M = [[1, 1], [9/25, 27/125]], M⁻¹ = [[-3/2, 125/18], [5/2, -125/18]].
        let c = condition_number(&e, &d).unwrap();
        assert!((c - 2.0 * 170.0 / 18.0).abs() < 1e-9, "{c}");
    }
}
