//! Basis families `φ_ℓ = d · v^ℓ` over consecutive indices `ℓ`.
//!
//! | family | point | `d` | `v` | first `ℓ` |
//! |---|---|---|---|---|
//! | `AdS22Plus` (±) | `x ∈ X(2,2)+` | 1 | `(x₁ ± i x₂)^{−1}` | 2 |
//! | `HyperboloidMinus(p,q)` | `(x, y) ∈ X(p,q)−` | `‖y‖^{−q}` | `(y·c)/‖y‖²` | `⌈(p−q)/2⌉ ∨ 0` |
//! | `Sphere2` | `x ∈ S²` | 1 | `x₁ + i x₂` | 1 |
//! | `HalfPlane` | `Im z > 0` | 1 | `(z + i)^{−1}` | 2 |
//! | `RealLine` | `x ∈ ℝ` | 1 | `x` | 0 |
//! | `GroupHDS` | `g` | 1 | `det(D)^{−1}`, `D` from `g^{−1}` | `λ_min` |
//!
//! On `X(p,q)−` with `y = s·cosh t` this is `(s·c)^ℓ cosh(t)^{−ℓ−q}`, computed
//! from ambient coordinates so exact mode never leaves ℚ(i).

use std::cmp::Ordering;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{on_quadric, HyperbolicCoords, Signature};
use crate::groups::{check_relations, d_block_of_inverse, GroupKind};
use crate::linalg::Matrix;
use crate::perturb::CayleyRotation;
use crate::scalar::{int_power, Arithmetic, Field, GaussianRational};

/// Finite-difference step for [`laplacian_defect`].
pub const LAPLACIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Orientation {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    HyperboloidMinus { p: usize, q: usize },
    #[serde(rename = "ads22-plus")]
    AdS22Plus,
    Sphere2,
    HalfPlane,
    RealLine,
    #[serde(rename = "group-hds")]
    GroupHds { group: GroupKind },
}

/// A basis specification: family, orientation, isotropic vector, first index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFamily {
    pub kind: FamilyKind,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isotropic_vector: Option<Vec<GaussianRational>>,
    pub ell_min: i64,
}

/// `c = (1, i, 1, i, …)`, with a trailing 0 when `q` is odd.
pub fn default_isotropic(q: usize) -> Vec<GaussianRational> {
    (0..q)
        .map(|k| {
            if q % 2 == 1 && k == q - 1 {
                GaussianRational::zero()
            } else if k % 2 == 0 {
                GaussianRational::one()
            } else {
                GaussianRational::imag_unit()
            }
        })
        .collect()
}

/// `⌈(p−q)/2⌉`, clamped at 0 (harmonic degrees are nonnegative).
pub fn hyperboloid_ell_min(p: usize, q: usize) -> i64 {
    let d = p as i64 - q as i64;
    (d.div_euclid(2) + d.rem_euclid(2)).max(0)
}

impl BasisFamily {
    pub fn ads22_plus(orientation: Orientation) -> Self {
        BasisFamily {
            kind: FamilyKind::AdS22Plus,
            orientation,
            isotropic_vector: None,
            ell_min: 2,
        }
    }

    pub fn hyperboloid_minus(p: usize, q: usize) -> Result<Self> {
        Self::hyperboloid_minus_with(p, q, default_isotropic(q))
    }

    /// `X(p,q)−` family with a caller-chosen isotropic vector.
    pub fn hyperboloid_minus_with(p: usize, q: usize, c: Vec<GaussianRational>) -> Result<Self> {
        Signature::minus(p, q)?;
        if c.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                found: c.len(),
            });
        }
        let sq = c.iter().fold(GaussianRational::zero(), |acc, v| acc + v.clone() * v.clone());
        if !sq.is_zero() || c.iter().all(Field::is_zero) {
            return Err(Error::InvalidSignature("isotropic vector must be nonzero with c·c = 0".into()));
        }
        Ok(BasisFamily {
            kind: FamilyKind::HyperboloidMinus { p, q },
            orientation: Orientation::Plus,
            isotropic_vector: Some(c),
            ell_min: hyperboloid_ell_min(p, q),
        })
    }

    pub fn sphere2() -> Self {
        Self::simple(FamilyKind::Sphere2, 1)
    }

    pub fn half_plane() -> Self {
        Self::simple(FamilyKind::HalfPlane, 2)
    }

    pub fn real_line() -> Self {
        Self::simple(FamilyKind::RealLine, 0)
    }

    pub fn group(group: GroupKind) -> Self {
        Self::simple(FamilyKind::GroupHds { group }, group.lambda_min())
    }

    fn simple(kind: FamilyKind, ell_min: i64) -> Self {
        BasisFamily {
            kind,
            orientation: Orientation::Plus,
            isotropic_vector: None,
            ell_min,
        }
    }

    /// Number of scalar coordinates per point.
    pub fn dim(&self) -> usize {
        match self.kind {
            FamilyKind::HyperboloidMinus { p, q } => p + q,
            FamilyKind::AdS22Plus => 4,
            FamilyKind::Sphere2 => 3,
            FamilyKind::HalfPlane | FamilyKind::RealLine => 1,
            FamilyKind::GroupHds { group } => group.size() * group.size(),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::HyperboloidMinus { p, q } => format!("X({p},{q})-"),
            FamilyKind::AdS22Plus => match self.orientation {
                Orientation::Plus => "X(2,2)+ psi+".into(),
                Orientation::Minus => "X(2,2)+ psi-".into(),
            },
            FamilyKind::Sphere2 => "S2".into(),
            FamilyKind::HalfPlane => "upper half plane".into(),
            FamilyKind::RealLine => "real line".into(),
            FamilyKind::GroupHds { group } => format!("{} holomorphic discrete series", group.name()),
        }
    }

    /// Quadric signature for the hyperboloid families.
    pub fn signature(&self) -> Option<Signature> {
        match self.kind {
            FamilyKind::HyperboloidMinus { p, q } => Signature::minus(p, q).ok(),
            FamilyKind::AdS22Plus => Signature::plus(2, 2).ok(),
            _ => None,
        }
    }

    /// `n` consecutive indices from `ell_min`.
    pub fn ell_range(&self, n: usize) -> Vec<i64> {
        (0..n as i64).map(|k| self.ell_min + k).collect()
    }

    /// Number of coordinate pairs a perturbation rotates; 0 if the family
    /// has no perturbation.
    pub fn rotated_pairs(&self) -> usize {
        match self.kind {
            FamilyKind::AdS22Plus | FamilyKind::Sphere2 => 1,
            FamilyKind::HyperboloidMinus { q, .. } => q / 2,
            FamilyKind::GroupHds { group } => group.blocks().1,
            FamilyKind::HalfPlane | FamilyKind::RealLine => 0,
        }
    }

    /// First coordinate touched by the perturbation.
    pub fn rotation_block_start(&self) -> usize {
        match self.kind {
            FamilyKind::HyperboloidMinus { p, .. } => p,
            _ => 0,
        }
    }

    fn isotropic<T: Field>(&self) -> Vec<T> {
        let q = match self.kind {
            FamilyKind::HyperboloidMinus { q, .. } => q,
            _ => 0,
        };
        self.isotropic_vector
            .clone()
            .unwrap_or_else(|| default_isotropic(q))
            .iter()
            .map(T::from_gaussian)
            .collect()
    }

    /// Checks that `x` is a point of the family's space.
    pub fn validate_point<T: Field>(&self, x: &[T], index: usize) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let invalid = |reason: String| Error::InvalidPoint { index, reason };
        let real = |x: &[T]| -> Result<()> {
            match x.iter().position(|c| !c.is_real()) {
                Some(k) => Err(invalid(format!("coordinate {k} is not real"))),
                None => Ok(()),
            }
        };
        match self.kind {
            FamilyKind::AdS22Plus | FamilyKind::HyperboloidMinus { .. } => {
                real(x)?;
                let sig = self.signature().expect("hyperboloid family");
                if !on_quadric(x, &sig)? {
                    let value = crate::geometry::quadric_form(x, &sig)?;
                    return Err(Error::OffQuadric {
                        index,
                        value: value.real_string(),
                        expected: sig.sign.value(),
                    });
                }
            }
            FamilyKind::Sphere2 => {
                real(x)?;
                let norm = x.iter().fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
                let ok = match T::ARITHMETIC {
                    Arithmetic::Exact => norm == T::one(),
                    Arithmetic::Float => (norm.clone() - T::one()).modulus() <= 1e-9 * (1.0 + norm.modulus()),
                };
                if !ok {
                    return Err(invalid(format!("|x|^2 = {} is not 1", norm.real_string())));
                }
            }
            FamilyKind::HalfPlane => {
                if x[0].im().cmp_real(&T::zero()) != Ordering::Greater {
                    return Err(invalid("Im z must be positive".into()));
                }
            }
            FamilyKind::RealLine => real(x)?,
            FamilyKind::GroupHds { group } => {
                let n = group.size();
                let m = Matrix::from_row_major(n, n, x.to_vec()).expect("length checked");
                check_relations(group, &m).map_err(|e| invalid(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Coordinates that determine the node, for diagnostics.
    pub fn projection<T: Field>(&self, x: &[T]) -> Vec<T> {
        match self.kind {
            FamilyKind::AdS22Plus | FamilyKind::Sphere2 => x[..2].to_vec(),
            FamilyKind::HyperboloidMinus { p, .. } => x[p..].to_vec(),
            FamilyKind::HalfPlane | FamilyKind::RealLine => x.to_vec(),
            FamilyKind::GroupHds { group } => {
                let n = group.size();
                let m = Matrix::from_row_major(n, n, x.to_vec()).expect("group point");
                vec![d_block_of_inverse(group, &m).determinant().expect("square")]
            }
        }
    }

    /// Applies the family's perturbation by `rot`. `None` when the family has
    /// no perturbation.
    pub fn rotate<T: Field>(&self, x: &[T], rot: &CayleyRotation<T>) -> Option<Vec<T>> {
        let mut y = x.to_vec();
        match self.kind {
            FamilyKind::AdS22Plus | FamilyKind::Sphere2 => rot.block(0).apply_coords(&mut y),
            FamilyKind::HyperboloidMinus { p, q } => {
                for k in 0..q / 2 {
                    rot.block(p + 2 * k).apply_coords(&mut y);
                }
            }
            FamilyKind::HalfPlane | FamilyKind::RealLine => return None,
            FamilyKind::GroupHds { group } => {
                let n = group.size();
                let g = Matrix::from_row_major(n, n, y).expect("group point");
                let k = central_rotation(group, rot);
                return Some(g.mul(&k).expect("same size").into_vec());
            }
        }
        Some(y)
    }
}

/// Right factor used to perturb group elements: the central torus element
/// `diag(u^q I_p, ū^p I_q)` for `SU(p,q)` and `[[cI, −sI], [sI, cI]]` for
/// `Sp(n,ℝ)`, where `u = c + i s` is the Cayley unit.
fn central_rotation<T: Field>(group: GroupKind, rot: &CayleyRotation<T>) -> Matrix<T> {
    let (a, b) = group.blocks();
    let n = a + b;
    let mut k = Matrix::zeros(n, n);
    match group {
        GroupKind::Su { .. } | GroupKind::Su11 => {
            let u = rot.unit();
            let top = int_power(&u, b as i64).expect("unit");
            let bottom = int_power(&u.conj(), a as i64).expect("unit");
            for i in 0..n {
                k[(i, i)] = if i < a { top.clone() } else { bottom.clone() };
            }
        }
        GroupKind::Sp { n: h } => {
            let m = rot.matrix();
            for i in 0..h {
                k[(i, i)] = m[0][0].clone();
                k[(i, h + i)] = m[0][1].clone();
                k[(h + i, i)] = m[1][0].clone();
                k[(h + i, h + i)] = m[1][1].clone();
            }
        }
    }
    k
}

/// `φ_ℓ(x) = d · v^ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisNode<T> {
    pub d: T,
    pub v: T,
}

impl<T: Field> BasisNode<T> {
    pub fn value(&self, ell: i64) -> Result<T> {
        if self.v.is_zero() && ell < 0 {
            return Err(Error::NodeUndefined("zero node raised to a negative power".into()));
        }
        Ok(self.d.clone() * int_power(&self.v, ell)?)
    }
}

/// Factorizes the family at `x` as `d · v^ℓ`. A zero node is returned as
/// `v = 0` and rejected later by the solver.
pub fn basis_node<T: Field>(fam: &BasisFamily, x: &[T]) -> Result<BasisNode<T>> {
    if x.len() != fam.dim() {
        return Err(Error::DimensionMismatch {
            expected: fam.dim(),
            found: x.len(),
        });
    }
    let i = T::imag_unit();
    let undefined = |what: &str| Error::NodeUndefined(what.to_string());
    match fam.kind {
        FamilyKind::AdS22Plus => {
            let w = match fam.orientation {
                Orientation::Plus => x[0].clone() + i * x[1].clone(),
                Orientation::Minus => x[0].clone() - i * x[1].clone(),
            };
            let v = w.inv().map_err(|_| undefined("x1 + i x2 = 0"))?;
            Ok(BasisNode { d: T::one(), v })
        }
        FamilyKind::HyperboloidMinus { p, q } => {
            let y = &x[p..];
            let c = fam.isotropic::<T>();
            let norm_sq = y.iter().fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
            let dot = y.iter().zip(&c).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            let inv_norm_sq = norm_sq.inv().map_err(|_| undefined("y = 0"))?;
            let d = if q % 2 == 0 {
                int_power(&inv_norm_sq, q as i64 / 2)?
            } else {
                let norm = norm_sq.sqrt_real().ok_or(Error::IrrationalPrefactor)?;
                int_power(&norm, -(q as i64))?
            };
            Ok(BasisNode {
                d,
                v: dot * inv_norm_sq,
            })
        }
        FamilyKind::Sphere2 => Ok(BasisNode {
            d: T::one(),
            v: x[0].clone() + i * x[1].clone(),
        }),
        FamilyKind::HalfPlane => {
            let v = (x[0].clone() + i).inv().map_err(|_| undefined("z = -i"))?;
            Ok(BasisNode { d: T::one(), v })
        }
        FamilyKind::RealLine => Ok(BasisNode {
            d: T::one(),
            v: x[0].clone(),
        }),
        FamilyKind::GroupHds { group } => {
            let n = group.size();
            let g = Matrix::from_row_major(n, n, x.to_vec()).expect("length checked");
            let det = d_block_of_inverse(group, &g).determinant().expect("square");
            let v = det.inv().map_err(|_| Error::ExceptionalElement)?;
            Ok(BasisNode { d: T::one(), v })
        }
    }
}

/// `φ_ℓ(x)`.
pub fn eval_basis<T: Field>(fam: &BasisFamily, ell: i64, x: &[T]) -> Result<T> {
    basis_node(fam, x)?.value(ell)
}

/// `(s·c)^ℓ cosh(t)^{−ℓ−q}` evaluated directly in the hyperbolic chart.
pub fn hyperboloid_chart_value(fam: &BasisFamily, ell: i64, h: &HyperbolicCoords) -> Complex64 {
    let c: Vec<Complex64> = fam.isotropic();
    let sc: Complex64 = h.s.iter().zip(&c).map(|(s, c)| c * *s).sum();
    sc.powi(ell as i32) * h.t.cosh().powi(-(ell as i32) - h.s.len() as i32)
}

/// `ψ_ℓ^±` of `X(2,2)+` in the chart of the swapped point: with
/// `(x₃, x₄, x₁, x₂) = Φ(r, s, t)` this is `(s₁ ∓ i s₂)^ℓ cosh(t)^{−ℓ}`.
pub fn ads_chart_value(orientation: Orientation, ell: i64, h: &HyperbolicCoords) -> Complex64 {
    let sign = match orientation {
        Orientation::Plus => -1.0,
        Orientation::Minus => 1.0,
    };
    let w = Complex64::new(h.s[0], sign * h.s[1]);
    w.powi(ell as i32) * h.t.cosh().powi(-(ell as i32))
}

/// Central-difference estimate of `|Δ (x₁ + i x₂)^ℓ|` at `x ∈ ℝ³` with step
/// [`LAPLACIAN_STEP`]. Returns `(absolute, relative)`, the relative value
/// being normalized by the magnitude of the stencil terms.
pub fn laplacian_defect(ell: i64, x: [f64; 3]) -> (f64, f64) {
    let f = |y: [f64; 3]| Complex64::new(y[0], y[1]).powi(ell as i32);
    let h = LAPLACIAN_STEP;
    let centre = f(x);
    let mut lap = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for k in 0..3 {
        let mut plus = x;
        let mut minus = x;
        plus[k] += h;
        minus[k] -= h;
        let (fp, fm) = (f(plus), f(minus));
        lap += (fp + fm - 2.0 * centre) / (h * h);
        scale += (fp.norm() + 2.0 * centre.norm() + fm.norm()) / (h * h);
    }
    let abs = lap.norm();
    let rel = if scale > 0.0 { abs / scale } else { 0.0 };
    (abs, rel)
}
