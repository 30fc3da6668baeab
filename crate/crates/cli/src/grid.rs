//! Evaluation grids over chart coordinates, e.g. `t=0:2:64` and
//! `s=circle:64`. Axes combine as a Cartesian product, first axis outermost.
//!
//! | family | axes (default) |
//! |---|---|
//! | hyperboloid-minus, ads22-plus | `t` (0), `r` (e₁), `s` (e₁) |
//! | sphere2 | `theta` (π/2), `phi` (0) |
//! | half-plane | `x` (0), `y` (1) |
//! | real-line | `x` (0) |
//!
//! `r` and `s` only take `circle:N`, and only on 2-dimensional blocks.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use num::complex::Complex64;
use whitney_core::geometry::{from_hyperbolic, HyperbolicCoords, Signature};
use whitney_core::{BasisFamily, FamilyKind};

#[derive(Debug, Clone, PartialEq)]
pub enum AxisRange {
    /// `count` evenly spaced values from `lo` to `hi` inclusive.
    Linear { lo: f64, hi: f64, count: usize },
    /// `count` angles `2πk/count`.
    Circle { count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub range: AxisRange,
}

impl FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, spec) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("grid axis {s:?} must look like name=lo:hi:count or name=circle:count"))?;
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let count = |c: &str| -> Result<usize> {
            match c.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => bail!("grid axis {s:?}: count must be a positive integer"),
            }
        };
        let number = |c: &str| -> Result<f64> {
            c.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| anyhow!("grid axis {s:?}: {c:?} is not a finite number"))
        };
        let range = match parts[..] {
            ["circle", n] => AxisRange::Circle { count: count(n)? },
            [lo, hi, n] => AxisRange::Linear {
                lo: number(lo)?,
                hi: number(hi)?,
                count: count(n)?,
            },
            _ => bail!("grid axis {s:?} must look like name=lo:hi:count or name=circle:count"),
        };
        Ok(Axis {
            name: name.trim().to_string(),
            range,
        })
    }
}

impl Axis {
    fn len(&self) -> usize {
        match self.range {
            AxisRange::Linear { count, .. } | AxisRange::Circle { count } => count,
        }
    }

    fn value(&self, k: usize) -> f64 {
        match self.range {
            AxisRange::Linear { lo, hi, count } if count > 1 => lo + (hi - lo) * k as f64 / (count - 1) as f64,
            AxisRange::Linear { lo, .. } => lo,
            AxisRange::Circle { count } => TAU * k as f64 / count as f64,
        }
    }
}

/// Chart coordinates of one grid node; `None` means the axis default.
#[derive(Default)]
struct Node {
    t: Option<f64>,
    r: Option<f64>,
    s: Option<f64>,
    theta: Option<f64>,
    phi: Option<f64>,
    x: Option<f64>,
    y: Option<f64>,
}

fn unit(dim: usize, angle: Option<f64>) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    match angle {
        Some(a) => {
            v[0] = a.cos();
            v[1] = a.sin();
        }
        None => v[0] = 1.0,
    }
    v
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn check_axes(fam: &BasisFamily, axes: &[Axis]) -> Result<()> {
    let (allowed, circles): (&[&str], Vec<(&str, bool)>) = match fam.kind {
        FamilyKind::HyperboloidMinus { p, q } => (&["t", "r", "s"], vec![("r", p == 2), ("s", q == 2)]),
        FamilyKind::AdS22Plus => (&["t", "r", "s"], vec![("r", true), ("s", true)]),
        FamilyKind::Sphere2 => (&["theta", "phi"], vec![]),
        FamilyKind::HalfPlane => (&["x", "y"], vec![]),
        FamilyKind::RealLine => (&["x"], vec![]),
        FamilyKind::GroupHds { .. } => bail!("grids are not available for group families; pass --points"),
    };
    for (i, a) in axes.iter().enumerate() {
        if !allowed.contains(&a.name.as_str()) {
            bail!("axis {:?} is not a chart coordinate of {}; use {}", a.name, fam.name(), allowed.join(", "));
        }
        if axes[..i].iter().any(|b| b.name == a.name) {
            bail!("axis {:?} given twice", a.name);
        }
        if let Some(&(_, ok)) = circles.iter().find(|(n, _)| *n == a.name) {
            if !ok || !matches!(a.range, AxisRange::Circle { .. }) {
                bail!("axis {:?} takes circle:N and needs a 2-dimensional block", a.name);
            }
        }
    }
    Ok(())
}

fn point(fam: &BasisFamily, n: &Node) -> Result<Vec<Complex64>> {
    let t = n.t.unwrap_or(0.0);
    Ok(match fam.kind {
        FamilyKind::HyperboloidMinus { p, q } => {
            let h = HyperbolicCoords::new(unit(p, n.r), unit(q, n.s), t);
            from_hyperbolic(&h, &Signature::minus(p, q)?)?.into_coords()
        }
        FamilyKind::AdS22Plus => {
            let s = unit(2, n.s);
            let r = unit(2, n.r);
            let (sh, ch) = (t.sinh(), t.cosh());
            real(&[s[0] * ch, s[1] * ch, r[0] * sh, r[1] * sh])
        }
        FamilyKind::Sphere2 => {
            let (th, ph) = (n.theta.unwrap_or(FRAC_PI_2), n.phi.unwrap_or(0.0));
            real(&[th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])
        }
        FamilyKind::HalfPlane => vec![Complex64::new(n.x.unwrap_or(0.0), n.y.unwrap_or(1.0))],
        FamilyKind::RealLine => real(&[n.x.unwrap_or(0.0)]),
        FamilyKind::GroupHds { .. } => unreachable!("rejected by check_axes"),
    })
}

/// All grid points, first axis outermost.
pub fn grid_points(fam: &BasisFamily, axes: &[Axis]) -> Result<Vec<Vec<Complex64>>> {
    check_axes(fam, axes)?;
    let total: usize = axes.iter().map(Axis::len).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        let mut node = Node::default();
        for (a, &k) in axes.iter().zip(&idx) {
            let v = Some(a.value(k));
            match a.name.as_str() {
                "t" => node.t = v,
                "r" => node.r = v,
                "s" => node.s = v,
                "theta" => node.theta = v,
                "phi" => node.phi = v,
                "x" => node.x = v,
                "y" => node.y = v,
                _ => unreachable!("rejected by check_axes"),
            }
        }
        out.push(point(fam, &node)?);
        for d in (0..axes.len()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(out)
}
