//! Read-only diagnostics for a dataset. Point numbers are 1-based.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use num::complex::Complex64;
use serde::Serialize;
use whitney_core::perturb::{collision_scan, general_position_check, CheckStatus};
use whitney_core::{BasisFamily, Dataset, Error, GaussianRational};

use crate::config::{ConfigFile, Job, JobArgs, Mode};
use crate::input::{read_points, InputScalar, PointSet, SCHEMA};
use crate::write_output;

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Dataset file (.json or .csv); values are optional.
    pub data: PathBuf,
    #[command(flatten)]
    pub job: JobArgs,
    /// Also write the diagnostics as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub check: &'static str,
    pub status: CheckStatus,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollisionItem {
    pub points: [usize; 2],
    pub projection: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub schema: u32,
    pub family: String,
    pub status: CheckStatus,
    pub items: Vec<Item>,
    pub collisions: Vec<CollisionItem>,
}

impl Diagnostics {
    fn push(&mut self, check: &'static str, status: CheckStatus, message: String) {
        self.status = self.status.max(status);
        self.items.push(Item { check, status, message });
    }

    fn has_fail(&self, check: &str) -> bool {
        self.items.iter().any(|i| i.check == check && i.status == CheckStatus::Fail)
    }

    /// 0 when nothing failed, 1 on invalid input, 2 when general position
    /// fails.
    pub fn exit_code(&self) -> u8 {
        if ["validation", "values", "collision"].iter().any(|c| self.has_fail(c)) {
            1
        } else if self.has_fail("general position") {
            2
        } else {
            0
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in &self.items {
            let tag = match i.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Warn => "WARN",
                CheckStatus::Fail => "FAIL",
            };
            let _ = writeln!(s, "{tag}  {}: {}", i.check, i.message);
        }
        s
    }
}

fn point_error(k: usize, e: &Error) -> String {
    match e {
        Error::OffQuadric { value, expected, .. } => {
            format!("point {k} is off the quadric: form value {value}, expected {expected}")
        }
        Error::InvalidPoint { reason, .. } => format!("point {k}: {reason}"),
        Error::DimensionMismatch { expected, found } => {
            format!("point {k} has {found} coordinates, expected {expected}")
        }
        other => format!("point {k}: {other}"),
    }
}

pub fn diagnose<T: InputScalar>(set: PointSet<T>, fam: &BasisFamily) -> Diagnostics {
    let mut diag = Diagnostics {
        schema: SCHEMA,
        family: fam.name(),
        status: CheckStatus::Pass,
        items: Vec::new(),
        collisions: Vec::new(),
    };
    let n = set.points.len();
    for (i, x) in set.points.iter().enumerate() {
        if let Err(e) = fam.validate_point(x, i) {
            diag.push("validation", CheckStatus::Fail, point_error(i + 1, &e));
        }
    }
    if n == 0 {
        diag.push("validation", CheckStatus::Fail, "dataset has no points".into());
        return diag;
    }
    if diag.has_fail("validation") {
        return diag;
    }
    diag.push("validation", CheckStatus::Pass, format!("{n} points valid for {}", fam.name()));
    let has_values = set.values.is_some();
    let values = set.values.unwrap_or_else(|| vec![T::zero(); n]);
    let data = match Dataset::new(set.points, values) {
        Ok(d) => d,
        Err(e) => {
            diag.push("values", CheckStatus::Fail, e.to_string());
            return diag;
        }
    };
    if has_values {
        match data.validate(fam) {
            Ok(()) => diag.push("values", CheckStatus::Pass, "values are nonconstant".into()),
            Err(Error::NonConstantViolation) => {
                diag.push("values", CheckStatus::Fail, "values are constant".into())
            }
            Err(e) => diag.push("values", CheckStatus::Fail, e.to_string()),
        }
    }
    let gp = general_position_check(&data, fam);
    if gp.findings.is_empty() {
        diag.push("general position", CheckStatus::Pass, "no obstruction found".into());
    }
    for f in gp.findings {
        diag.push("general position", f.status, f.message);
    }
    let scan = collision_scan(&data, fam);
    for c in &scan.collisions {
        let proj: Vec<String> = c.projection.iter().map(InputScalar::show).collect();
        diag.push(
            "collision",
            CheckStatus::Warn,
            format!("points {},{} project to ({})", c.first + 1, c.second + 1, proj.join(",")),
        );
        diag.collisions.push(CollisionItem {
            points: [c.first + 1, c.second + 1],
            projection: proj,
        });
    }
    for &i in &scan.zero_nodes {
        diag.push("collision", CheckStatus::Warn, format!("point {} has a zero node", i + 1));
    }
    for (i, msg) in &scan.undefined {
        diag.push("collision", CheckStatus::Fail, format!("basis undefined at point {}: {msg}", i + 1));
    }
    if scan.is_clean() {
        diag.push("collision", CheckStatus::Pass, "all nodes distinct and nonzero".into());
    }
    diag
}

pub fn run(args: &CheckArgs) -> Result<u8> {
    let file = ConfigFile::load(args.job.config.as_deref())?;
    let job = Job::resolve(&args.job, &file)?;
    let diag = match job.mode {
        Mode::Exact => diagnose(read_points::<GaussianRational>(&args.data)?, &job.family),
        Mode::Float => diagnose(read_points::<Complex64>(&args.data)?, &job.family),
    };
    print!("{}", diag.to_text());
    if let Some(out) = &args.out {
        write_output(Some(out), &(serde_json::to_string_pretty(&diag)? + "\n"))?;
    }
    Ok(diag.exit_code())
}

#[cfg(test)]
mod tests {
    use super::*;
    use whitney_core::scalar::ratio;
    use whitney_core::Orientation;

    fn r(a: i64, b: i64) -> GaussianRational {
        GaussianRational::real(ratio(a, b))
    }

    fn set(points: Vec<Vec<GaussianRational>>, values: Option<Vec<GaussianRational>>) -> PointSet<GaussianRational> {
        PointSet { points, values }
    }

    #[test]
    fn shared_projection_is_reported() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = diagnose(
            set(
                vec![vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)]],
                Some(vec![r(0, 1), r(1, 1)]),
            ),
            &fam,
        );
        assert!(d.to_text().contains("collision: points 1,2 project to (5/3,0)"), "{}", d.to_text());
        assert_eq!(d.collisions[0].points, [1, 2]);
        assert_eq!(d.exit_code(), 0);
    }

    #[test]
    fn clean_dataset_passes_everything() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = diagnose(
            set(
                vec![
                    vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
                    vec![r(0, 1), r(5, 3), r(4, 3), r(0, 1)],
                    vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)],
                ],
                Some(vec![r(0, 1), r(1, 1), r(2, 1)]),
            ),
            &fam,
        );
        assert!(d.items.iter().all(|i| i.status == CheckStatus::Pass), "{}", d.to_text());
        assert_eq!(d.status, CheckStatus::Pass);
    }

    #[test]
    fn off_quadric_point_fails_validation() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = diagnose(set(vec![vec![r(1, 1), r(1, 1), r(1, 1), r(1, 1)]], None), &fam);
        assert_eq!(d.status, CheckStatus::Fail);
        assert!(d.to_text().contains("FAIL  validation: point 1 is off the quadric: form value 0"), "{}", d.to_text());
        assert_eq!(d.exit_code(), 1);
    }

    #[test]
    fn vanishing_first_coordinate_fails_general_position() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = diagnose(
            set(
                vec![vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1)], vec![r(0, 1), r(5, 3), r(4, 3), r(0, 1)]],
                Some(vec![r(0, 1), r(1, 1)]),
            ),
            &fam,
        );
        assert_eq!(d.exit_code(), 2, "{}", d.to_text());
    }

    #[test]
    fn constant_values_fail() {
        let d = diagnose(set(vec![vec![r(0, 1)], vec![r(1, 1)]], Some(vec![r(2, 1), r(2, 1)])), &BasisFamily::real_line());
        assert!(d.to_text().contains("FAIL  values: values are constant"));
    }
}
