//! Job configuration: command-line flags layered over an optional JSON
//! config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use num::ToPrimitive;
use serde::Deserialize;
use whitney_core::scalar::parse_rational;
use whitney_core::{BasisFamily, GroupKind, Orientation};

pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    #[value(name = "ads22-plus")]
    #[serde(rename = "ads22-plus")]
    Ads22Plus,
    HyperboloidMinus,
    Sphere2,
    HalfPlane,
    RealLine,
    Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// Flags that select the basis family.
#[derive(Debug, Clone, Default, Args)]
pub struct FamilyArgs {
    /// Basis family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Positive signature count for hyperboloid-minus.
    #[arg(long)]
    pub p: Option<usize>,
    /// Negative signature count for hyperboloid-minus.
    #[arg(long)]
    pub q: Option<usize>,
    /// Orientation of the ads22-plus node: + or -.
    #[arg(long, allow_hyphen_values = true)]
    pub orientation: Option<String>,
    /// Group for the group family: su11, su(p,q) or sp(n).
    #[arg(long)]
    pub group: Option<String>,
}

/// Flags shared by commands that read a dataset.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Arithmetic mode.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<FamilyName>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub orientation: Option<String>,
    pub group: Option<String>,
    pub mode: Option<Mode>,
    pub eps: Option<serde_json::Value>,
    pub exact_correct: Option<bool>,
    pub maximize_summands: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// The `eps` key as text, whether written as a number or a string.
    pub fn eps_text(&self) -> Result<Option<String>> {
        match &self.eps {
            None => Ok(None),
            Some(serde_json::Value::Number(n)) => Ok(Some(n.to_string())),
            Some(serde_json::Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => bail!("config key eps must be a number or string, got {other}"),
        }
    }
}

/// Resolved settings for a dataset job.
#[derive(Debug, Clone)]
pub struct Job {
    pub family: BasisFamily,
    pub mode: Mode,
}

impl Job {
    pub fn resolve(args: &JobArgs, file: &ConfigFile) -> Result<Self> {
        let f = &args.family;
        let name = f
            .family
            .or(file.family)
            .ok_or_else(|| anyhow!("no basis family given; use --family or the config key `family`"))?;
        let family = build_family(
            name,
            f.p.or(file.p),
            f.q.or(file.q),
            f.orientation.as_deref().or(file.orientation.as_deref()),
            f.group.as_deref().or(file.group.as_deref()),
        )?;
        Ok(Job {
            family,
            mode: args.mode.or(file.mode).unwrap_or_default(),
        })
    }
}

pub fn build_family(
    name: FamilyName,
    p: Option<usize>,
    q: Option<usize>,
    orientation: Option<&str>,
    group: Option<&str>,
) -> Result<BasisFamily> {
    Ok(match name {
        FamilyName::Ads22Plus => BasisFamily::ads22_plus(parse_orientation(orientation.unwrap_or("+"))?),
        FamilyName::HyperboloidMinus => {
            let (Some(p), Some(q)) = (p, q) else {
                bail!("hyperboloid-minus needs both --p and --q");
            };
            BasisFamily::hyperboloid_minus(p, q)?
        }
        FamilyName::Sphere2 => BasisFamily::sphere2(),
        FamilyName::HalfPlane => BasisFamily::half_plane(),
        FamilyName::RealLine => BasisFamily::real_line(),
        FamilyName::Group => {
            let g = group.ok_or_else(|| anyhow!("the group family needs --group"))?;
            BasisFamily::group(parse_group(g)?)
        }
    })
}

pub fn parse_orientation(s: &str) -> Result<Orientation> {
    match s.trim() {
        "+" | "plus" => Ok(Orientation::Plus),
        "-" | "minus" => Ok(Orientation::Minus),
        other => bail!("orientation must be + or -, got {other:?}"),
    }
}

/// `su11`, `su(p,q)`, `sp(n)`, case-insensitive.
pub fn parse_group(s: &str) -> Result<GroupKind> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let args = |prefix: &str| -> Option<Vec<usize>> {
        let inner = t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        inner.split(',').map(|a| a.parse().ok()).collect()
    };
    if t == "su11" || t == "su(1,1)" {
        return Ok(GroupKind::Su11);
    }
    if let Some(a) = args("su") {
        if let [p, q] = a[..] {
            return Ok(GroupKind::su(p, q)?);
        }
    }
    if let Some(a) = args("sp") {
        if let [n] = a[..] {
            return Ok(GroupKind::sp(n)?);
        }
    }
    bail!("unknown group {s:?}; expected su11, su(p,q) or sp(n)")
}

/// A positive tolerance written as a decimal or a fraction.
pub fn parse_eps(s: &str) -> Result<f64> {
    let r = parse_rational(s).map_err(|e| anyhow!("tolerance {s:?}: {e}"))?;
    let x = r.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() || x <= 0.0 {
        bail!("tolerance must be positive, got {s}");
    }
    Ok(x)
}
