//! Holomorphic discrete series matrix coefficients `ψ_λ(g) = det(D)^{−λ}`,
//! where `D` is the lower-right block of `g^{−1}`, and the reproducing
//! kernel `det(I − W*Z)^{−λ}` of the bounded domain.

use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm_below_one, Matrix};
use crate::perturb::Dataset;
use crate::scalar::{int_power, Arithmetic, Field};
use crate::solve::{fit, WhitneyExtension};

/// Float tolerance for the defining relations, relative to `1 + max|g_ij|²`.
pub const RELATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupKind {
    /// `SU(p,q)`: `g*·J·g = J` with `J = diag(I_p, −I_q)` and `det g = 1`.
    Su { p: usize, q: usize },
    /// `Sp(n,ℝ)`: real `g` with `gᵀ·J·g = J`, `J = [[0, −I], [I, 0]]`.
    Sp { n: usize },
    /// `SU(1,1)`, acting on the unit disk.
    Su11,
}

impl GroupKind {
    pub fn su(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSignature(format!("SU(p,q) needs p, q >= 1, got ({p}, {q})")));
        }
        Ok(GroupKind::Su { p, q })
    }

    pub fn sp(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSignature("Sp(n,R) needs n >= 1".into()));
        }
        Ok(GroupKind::Sp { n })
    }

    /// `(top, bottom)` block sizes; `D` is `bottom × bottom`.
    pub fn blocks(&self) -> (usize, usize) {
        match *self {
            GroupKind::Su { p, q } => (p, q),
            GroupKind::Sp { n } => (n, n),
            GroupKind::Su11 => (1, 1),
        }
    }

    pub fn size(&self) -> usize {
        let (a, b) = self.blocks();
        a + b
    }

    /// Smallest admissible `λ`: `p+q` for `SU(p,q)`, `1` for `Sp(n,ℝ)`.
    pub fn lambda_min(&self) -> i64 {
        match *self {
            GroupKind::Su { p, q } => (p + q) as i64,
            GroupKind::Sp { .. } => 1,
            GroupKind::Su11 => 2,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            GroupKind::Su { p, q } => format!("SU({p},{q})"),
            GroupKind::Sp { n } => format!("Sp({n},R)"),
            GroupKind::Su11 => "SU(1,1)".into(),
        }
    }

    fn form<T: Field>(&self) -> Matrix<T> {
        let n = self.size();
        let mut j = Matrix::zeros(n, n);
        match *self {
            GroupKind::Su { p, .. } => {
                for i in 0..n {
                    j[(i, i)] = if i < p { T::one() } else { -T::one() };
                }
            }
            GroupKind::Su11 => {
                j[(0, 0)] = T::one();
                j[(1, 1)] = -T::one();
            }
            GroupKind::Sp { n: h } => {
                for i in 0..h {
                    j[(i, h + i)] = -T::one();
                    j[(h + i, i)] = T::one();
                }
            }
        }
        j
    }
}

fn close<T: Field>(a: &Matrix<T>, b: &Matrix<T>, scale: f64) -> bool {
    a.approx_eq(b, RELATION_TOLERANCE * (1.0 + scale))
}

fn max_sq<T: Field>(m: &Matrix<T>) -> f64 {
    m.as_slice().iter().map(|v| v.to_c64().norm_sqr()).fold(0.0, f64::max)
}

/// Checks the defining relations of `kind` on a square matrix.
pub fn check_relations<T: Field>(kind: GroupKind, g: &Matrix<T>) -> Result<()> {
    let n = kind.size();
    if g.rows() != n || g.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: g.rows() * g.cols(),
        });
    }
    let j = kind.form::<T>();
    let scale = max_sq(g);
    match kind {
        GroupKind::Su { .. } | GroupKind::Su11 => {
            let lhs = g.adjoint().mul(&j).and_then(|m| m.mul(g)).expect("square");
            if !close(&lhs, &j, scale) {
                return Err(Error::NotInGroup(format!("{}: g*Jg != J", kind.name())));
            }
            let det = g.determinant().expect("square");
            let ok = match T::ARITHMETIC {
                Arithmetic::Exact => det == T::one(),
                Arithmetic::Float => (det - T::one()).modulus() <= RELATION_TOLERANCE * (1.0 + scale).powi(n as i32),
            };
            if !ok {
                return Err(Error::NotInGroup(format!("{}: det g != 1", kind.name())));
            }
        }
        GroupKind::Sp { .. } => {
            if !g.as_slice().iter().all(Field::is_real) {
                return Err(Error::NotInGroup("Sp(n,R) elements must be real".into()));
            }
            let lhs = g.transpose().mul(&j).and_then(|m| m.mul(g)).expect("square");
            if !close(&lhs, &j, scale) {
                return Err(Error::NotInGroup("Sp(n,R): g^T J g != J".into()));
            }
        }
    }
    Ok(())
}

/// `g^{−1}` from the defining relation: `J·g*·J` for `SU(p,q)` and
/// `−J·gᵀ·J` for `Sp(n,ℝ)`.
pub fn structured_inverse<T: Field>(kind: GroupKind, g: &Matrix<T>) -> Matrix<T> {
    let j = kind.form::<T>();
    match kind {
        GroupKind::Su { .. } | GroupKind::Su11 => j.mul(&g.adjoint()).and_then(|m| m.mul(&j)).expect("square"),
        GroupKind::Sp { .. } => j
            .mul(&g.transpose())
            .and_then(|m| m.mul(&j))
            .expect("square")
            .map(|v| -v.clone()),
    }
}

/// Lower-right block `D` of `g^{−1}`.
pub fn d_block_of_inverse<T: Field>(kind: GroupKind, g: &Matrix<T>) -> Matrix<T> {
    let (a, b) = kind.blocks();
    structured_inverse(kind, g).block(a, a, b, b)
}

/// A validated element of one of the supported groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement<T> {
    matrix: Matrix<T>,
    kind: GroupKind,
}

impl<T: Field> GroupElement<T> {
    pub fn new(matrix: Matrix<T>, kind: GroupKind) -> Result<Self> {
        check_relations(kind, &matrix)?;
        Ok(GroupElement { matrix, kind })
    }

    pub fn identity(kind: GroupKind) -> Self {
        GroupElement {
            matrix: Matrix::identity(kind.size()),
            kind,
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn mul(&self, other: &GroupElement<T>) -> Result<GroupElement<T>> {
        if self.kind != other.kind {
            return Err(Error::NotInGroup("factors belong to different groups".into()));
        }
        Ok(GroupElement {
            matrix: self.matrix.mul(&other.matrix).expect("same size"),
            kind: self.kind,
        })
    }

    pub fn inverse(&self) -> GroupElement<T> {
        GroupElement {
            matrix: structured_inverse(self.kind, &self.matrix),
            kind: self.kind,
        }
    }

    /// Row-major entries, the point format used by the basis layer.
    pub fn to_point(&self) -> Vec<T> {
        self.matrix.as_slice().to_vec()
    }
}

/// `SU(1,1)` element `[[α, β], [β̄, ᾱ]]` with `|α|² − |β|² = 1`.
pub fn su11<T: Field>(alpha: T, beta: T) -> Result<GroupElement<T>> {
    let m = Matrix::from_rows(vec![
        vec![alpha.clone(), beta.clone()],
        vec![beta.conj(), alpha.conj()],
    ])
    .expect("2x2");
    GroupElement::new(m, GroupKind::Su11)
}

/// `ψ_λ(g) = det(D)^{−λ}` with `D` the lower-right block of `g^{−1}`.
pub fn matrix_coefficient<T: Field>(g: &GroupElement<T>, lambda: i64) -> Result<T> {
    let det = d_block_of_inverse(g.kind, &g.matrix).determinant().expect("square");
    if det.is_zero() {
        return Err(Error::ExceptionalElement);
    }
    Ok(int_power(&det, -lambda)?)
}

/// A point `Z` of the bounded domain: `p × q` with operator norm below 1,
/// symmetric in the `Sp(n,ℝ)` case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint<T> {
    z: Matrix<T>,
}

impl<T: Field> DomainPoint<T> {
    pub fn new(z: Matrix<T>) -> Result<Self> {
        if !operator_norm_below_one(&z) {
            return Err(Error::OutsideDomain);
        }
        Ok(DomainPoint { z })
    }

    /// Domain point for the Siegel disk of `Sp(n,ℝ)`; also checks `Zᵀ = Z`.
    pub fn symmetric(z: Matrix<T>) -> Result<Self> {
        if !z.is_square() || !z.approx_eq(&z.transpose(), RELATION_TOLERANCE) {
            return Err(Error::InvalidPoint {
                index: 0,
                reason: "Siegel-disk points must be symmetric".into(),
            });
        }
        Self::new(z)
    }

    pub fn scalar(z: T) -> Result<Self> {
        Self::new(Matrix::from_rows(vec![vec![z]]).expect("1x1"))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.z
    }
}

/// `K^λ(Z, W) = det(I_q − W*·Z)^{−λ}`.
pub fn kernel_eval<T: Field>(z: &DomainPoint<T>, w: &DomainPoint<T>, lambda: i64) -> Result<T> {
    if z.z.rows() != w.z.rows() || z.z.cols() != w.z.cols() {
        return Err(Error::DimensionMismatch {
            expected: z.z.rows() * z.z.cols(),
            found: w.z.rows() * w.z.cols(),
        });
    }
    let wz = w.z.adjoint().mul(&z.z).expect("conformable");
    let det = Matrix::identity(wz.rows()).sub(&wz).expect("square").determinant().expect("square");
    Ok(int_power(&det, -lambda)?)
}

/// `g·z = (αz + β)/(β̄z + ᾱ)` on the unit disk.
pub fn disk_action<T: Field>(g: &GroupElement<T>, z: &T) -> Result<T> {
    if g.kind != GroupKind::Su11 && g.kind != (GroupKind::Su { p: 1, q: 1 }) {
        return Err(Error::NotInGroup("disk action needs an SU(1,1) element".into()));
    }
    let inside = |w: &T| w.norm_sqr().cmp_real(&T::one()) == std::cmp::Ordering::Less;
    if !inside(z) {
        return Err(Error::OutsideDomain);
    }
    let m = &g.matrix;
    let num = m[(0, 0)].clone() * z.clone() + m[(0, 1)].clone();
    let den = m[(1, 0)].clone() * z.clone() + m[(1, 1)].clone();
    let w = num.div(&den)?;
    if !inside(&w) && T::ARITHMETIC == Arithmetic::Exact {
        return Err(Error::OutsideDomain);
    }
    Ok(w)
}

/// Interpolates `values` at group elements by `Σ a_λ ψ_λ`. Coincident
/// `det D` values are separated by central-torus perturbations; when that is
/// impossible the error is [`Error::NeedsPerturbation`].
pub fn fit_on_group<T: Field>(
    elements: &[GroupElement<T>],
    values: &[T],
    target_eps: f64,
) -> Result<WhitneyExtension<T>> {
    let kind = elements
        .first()
        .map(GroupElement::kind)
        .ok_or_else(|| Error::InvalidDataset("no group elements".into()))?;
    if elements.iter().any(|g| g.kind != kind) {
        return Err(Error::InvalidDataset("elements belong to different groups".into()));
    }
    let family = BasisFamily::group(kind);
    let data = Dataset::new(elements.iter().map(GroupElement::to_point).collect(), values.to_vec())?;
    fit(&data, &family, target_eps).map_err(|e| match e {
        Error::NotInGeneralPosition(_) | Error::SingularSystem(_) => Error::NeedsPerturbation,
        other => other,
    })
}
