//! Interpolation in consecutive powers of a node function.
//!
//! The system `Σ_ℓ a_ℓ d_i v_i^ℓ = y_i`, `ℓ = k, …, k+n−1`, is a diagonal
//! matrix times a Vandermonde matrix. It is solvable exactly when all `d_i`
//! are nonzero, the `v_i` are pairwise distinct, and `v_i ≠ 0` unless `k = 0`.

mod closed_form;
mod exact;

pub use closed_form::{closed_form_coefficients, elementary_symmetric, elementary_symmetric_all, vandermonde_determinant};
pub use exact::{exact_correct, maximize_summands, PhaseField};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_node, BasisFamily, BasisNode};
use crate::error::{Error, Result, Singularity};
use crate::linalg::{self, Matrix};
use crate::perturb::{
    ensure_distinct, general_position_check, nodes_coincide, CheckStatus, Dataset, PerturbationEntry, PerturbationRecord,
};
use crate::scalar::{int_power, parse_rational, Arithmetic, Field};

/// Float coefficients below `ZERO_THRESHOLD · max|a_ℓ|` count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;

/// Retries of [`fit`] with halved perturbation size.
pub const FIT_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionMode {
    Approximate,
    ExactCorrected,
}

/// `f(x) = Σ_ℓ a_ℓ φ_ℓ(x)`, optionally with a phase field that replaces the
/// node `v(x)` by `ρ(x)·v(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Field + Serialize", deserialize = "T: Field + Deserialize<'de>"))]
pub struct WhitneyExtension<T> {
    pub family: BasisFamily,
    pub arithmetic: Arithmetic,
    pub mode: ExtensionMode,
    pub ells: Vec<i64>,
    pub coeffs: Vec<T>,
    pub perturbation: PerturbationRecord<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseField<T>>,
    /// Sup-norm error at the original data points.
    #[serde(default)]
    pub residual: Option<f64>,
}

impl<T: Field> WhitneyExtension<T> {
    pub fn eval(&self, x: &[T]) -> Result<T> {
        let node = basis_node(&self.family, x)?;
        let v = match &self.phase {
            Some(phase) => phase.rho(x) * node.v.clone(),
            None => node.v.clone(),
        };
        eval_series(&node.d, &v, &self.ells, &self.coeffs)
    }

    /// The same extension with every scalar rounded to a complex double.
    pub fn to_float(&self) -> WhitneyExtension<Complex64> {
        let c = |z: &T| z.to_c64();
        WhitneyExtension {
            family: self.family.clone(),
            arithmetic: Arithmetic::Float,
            mode: self.mode,
            ells: self.ells.clone(),
            coeffs: self.coeffs.iter().map(c).collect(),
            perturbation: PerturbationRecord {
                entries: self
                    .perturbation
                    .entries
                    .iter()
                    .map(|e| PerturbationEntry {
                        index: e.index,
                        epsilon: c(&e.epsilon),
                        angle: e.angle,
                        block_start: e.block_start,
                        displacement: e.displacement,
                        bound: e.bound,
                    })
                    .collect(),
                max_displacement: self.perturbation.max_displacement,
            },
            phase: self.phase.as_ref().map(|p| PhaseField {
                anchors: p.anchors.iter().map(|a| a.iter().map(c).collect()).collect(),
                rho: p.rho.iter().map(c).collect(),
                coefficients: p.coefficients.clone(),
                sigma: p.sigma,
            }),
            residual: self.residual,
        }
    }
}

/// `d · Σ_k a_k v^{ℓ_k}` for consecutive `ℓ_k`, by Horner's rule.
fn eval_series<T: Field>(d: &T, v: &T, ells: &[i64], coeffs: &[T]) -> Result<T> {
    let Some(&first) = ells.first() else {
        return Ok(T::zero());
    };
    if v.is_zero() && first < 0 {
        return Err(Error::NodeUndefined("zero node raised to a negative power".into()));
    }
    let poly = coeffs.iter().rev().fold(T::zero(), |acc, a| acc * v.clone() + a.clone());
    Ok(d.clone() * int_power(v, first)? * poly)
}

/// Which of `ells` carry a nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub summands: Vec<i64>,
    pub maximal: bool,
    /// Absolute threshold used in float mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_threshold: Option<f64>,
}

pub(crate) fn zero_threshold<T: Field>(coeffs: &[T]) -> Option<f64> {
    match T::ARITHMETIC {
        Arithmetic::Exact => None,
        Arithmetic::Float => Some(ZERO_THRESHOLD * coeffs.iter().map(Field::modulus).fold(0.0, f64::max)),
    }
}

pub(crate) fn is_negligible<T: Field>(a: &T, threshold: Option<f64>) -> bool {
    match threshold {
        None => a.is_zero(),
        Some(t) => a.modulus() <= t,
    }
}

pub fn representation_report<T: Field>(e: &WhitneyExtension<T>) -> RepresentationReport {
    let threshold = zero_threshold(&e.coeffs);
    let summands: Vec<i64> = e
        .ells
        .iter()
        .zip(&e.coeffs)
        .filter(|(_, a)| !is_negligible(*a, threshold))
        .map(|(l, _)| *l)
        .collect();
    RepresentationReport {
        maximal: summands.len() == e.ells.len(),
        summands,
        zero_threshold: threshold,
    }
}

fn check_shapes<T>(nodes: &[BasisNode<T>], values: &[T], ells: &[i64]) -> Result<()> {
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            found: values.len(),
        });
    }
    if nodes.len() != ells.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            found: ells.len(),
        });
    }
    if ells.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidDataset("indices must be consecutive".into()));
    }
    Ok(())
}

/// Rejects systems whose product-form determinant vanishes.
pub(crate) fn check_nonsingular<T: Field>(nodes: &[BasisNode<T>], ell_min: i64) -> Result<()> {
    for (i, n) in nodes.iter().enumerate() {
        if n.d.is_zero() {
            return Err(Error::SingularSystem(Singularity::ZeroPrefactor(i)));
        }
        if n.v.is_zero() && ell_min != 0 {
            return Err(Error::SingularSystem(Singularity::ZeroNode(i)));
        }
        if let Some(j) = nodes[..i].iter().position(|m| nodes_coincide(&m.v, &n.v)) {
            return Err(Error::SingularSystem(Singularity::CoincidentNodes(j, i)));
        }
    }
    Ok(())
}

/// `M_{i,k} = d_i · v_i^{ℓ_k}`.
pub fn system_matrix<T: Field>(nodes: &[BasisNode<T>], ells: &[i64]) -> Result<Matrix<T>> {
    let rows = nodes
        .iter()
        .map(|n| ells.iter().map(|&l| n.value(l)).collect::<Result<Vec<T>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows).expect("rectangular"))
}

/// Solves `Σ_ℓ a_ℓ d_i v_i^ℓ = y_i` for the `a_ℓ`.
pub fn vandermonde_solve<T: Field>(nodes: &[BasisNode<T>], values: &[T], ells: &[i64]) -> Result<Vec<T>> {
    check_shapes(nodes, values, ells)?;
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    check_nonsingular(nodes, ells[0])?;
    let m = system_matrix(nodes, ells)?;
    linalg::solve(&m, values).map_err(|c| Error::SingularSystem(Singularity::NoPivot(c)))
}

/// `sup_i |f(x_i) − y_i|`; infinite if `f` is undefined at some `x_i`.
pub fn residual<T: Field>(e: &WhitneyExtension<T>, d: &Dataset<T>) -> f64 {
    d.points
        .iter()
        .zip(&d.values)
        .map(|(x, y)| match e.eval(x) {
            Ok(f) => (f - y.clone()).modulus(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Converts a float tolerance into the scalar type; exact mode uses its
/// shortest decimal expansion, so `0.1` becomes `1/10`.
pub fn epsilon_from_f64<T: Field>(eps: f64) -> Result<T> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::NonPositiveTolerance);
    }
    Ok(match T::ARITHMETIC {
        Arithmetic::Exact => T::from_rational(&parse_rational(&format!("{eps}"))?),
        Arithmetic::Float => T::from_f64(eps),
    })
}

fn interpolate<T: Field>(original: &Dataset<T>, moved: &Dataset<T>, fam: &BasisFamily, record: PerturbationRecord<T>) -> Result<WhitneyExtension<T>> {
    let nodes = moved
        .points
        .iter()
        .map(|x| basis_node(fam, x))
        .collect::<Result<Vec<_>>>()?;
    let ells = fam.ell_range(moved.len());
    let coeffs = vandermonde_solve(&nodes, &moved.values, &ells)?;
    let mut ext = WhitneyExtension {
        family: fam.clone(),
        arithmetic: T::ARITHMETIC,
        mode: ExtensionMode::Approximate,
        ells,
        coeffs,
        perturbation: record,
        phase: None,
        residual: None,
    };
    // Exact solves reproduce unmoved points exactly; only moved ones need
    // evaluating.
    let r = original
        .points
        .iter()
        .zip(&original.values)
        .zip(&ext.perturbation.entries)
        .filter(|(_, entry)| T::ARITHMETIC == Arithmetic::Float || !entry.epsilon.is_zero())
        .map(|((x, y), _)| match ext.eval(x) {
            Ok(f) => (f - y.clone()).modulus(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    ext.residual = Some(r);
    Ok(ext)
}

fn preflight<T: Field>(d: &Dataset<T>, fam: &BasisFamily) -> Result<()> {
    d.validate(fam)?;
    let report = general_position_check(d, fam);
    if report.status == CheckStatus::Fail {
        let msg = report
            .findings
            .iter()
            .filter(|f| f.status == CheckStatus::Fail)
            .map(|f| f.message.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::NotInGeneralPosition(msg));
    }
    Ok(())
}

/// Validates, separates colliding nodes with perturbation size `eps`, and
/// interpolates the moved points exactly. The residual at the original
/// points is recorded but not enforced.
pub fn fit_perturbed<T: Field>(d: &Dataset<T>, fam: &BasisFamily, eps: &T) -> Result<WhitneyExtension<T>> {
    preflight(d, fam)?;
    let (moved, record) = ensure_distinct(d, fam, eps)?;
    interpolate(d, &moved, fam, record)
}

/// Lower bound on the residual of any extension in the span: points that
/// share a node take equal values under every basis function.
pub fn collision_floor<T: Field>(d: &Dataset<T>, fam: &BasisFamily) -> f64 {
    let nodes: Vec<Option<T>> = d.points.iter().map(|x| basis_node(fam, x).ok().map(|n| n.v)).collect();
    let mut floor = 0.0f64;
    for i in 0..nodes.len() {
        for j in 0..i {
            if let (Some(a), Some(b)) = (&nodes[i], &nodes[j]) {
                if nodes_coincide(a, b) {
                    floor = floor.max((d.values[i].clone() - d.values[j].clone()).modulus() / 2.0);
                }
            }
        }
    }
    floor
}

/// Fits `Σ a_ℓ φ_ℓ` with `sup_i |f(x_i) − y_i| < target_eps` at the original
/// points, halving the perturbation size up to [`FIT_ATTEMPTS`] times.
pub fn fit<T: Field>(d: &Dataset<T>, fam: &BasisFamily, target_eps: f64) -> Result<WhitneyExtension<T>> {
    let mut eps: T = epsilon_from_f64(target_eps.min(1.0))?;
    preflight(d, fam)?;
    let floor = collision_floor(d, fam);
    let half = T::from_i64(2).inv().expect("2 != 0");
    let mut best = f64::INFINITY;
    for attempt in 1..=FIT_ATTEMPTS {
        let (moved, record) = ensure_distinct(d, fam, &eps)?;
        let ext = interpolate(d, &moved, fam, record)?;
        let r = ext.residual.unwrap_or(f64::INFINITY);
        log::debug!("fit attempt {attempt}: residual {r:e}");
        if r < target_eps {
            return Ok(ext);
        }
        best = best.min(r);
        if ext.perturbation.is_trivial() || floor >= target_eps {
            return Err(Error::ToleranceUnreachable {
                best,
                target: target_eps,
                attempts: attempt,
            });
        }
        eps = eps * half.clone();
    }
    Err(Error::ToleranceUnreachable {
        best,
        target: target_eps,
        attempts: FIT_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Orientation;
    use crate::scalar::{ratio, GaussianRational as G};
    use num::complex::Complex64;

    fn r(a: i64, b: i64) -> G {
        G::real(ratio(a, b))
    }

    fn node(v: G) -> BasisNode<G> {
        BasisNode { d: G::one(), v }
    }

    fn ads_pair() -> Dataset<G> {
        Dataset::new(
            vec![vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)], vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn solve_examples() {
        assert_eq!(vandermonde_solve(&[node(G::one())], &[r(5, 1)], &[2]).unwrap(), vec![r(5, 1)]);
        let a = vandermonde_solve(&[node(G::one()), node(r(3, 5))], &[r(0, 1), r(1, 1)], &[2, 3]).unwrap();
        assert_eq!(a, vec![r(125, 18), r(-125, 18)]);
        let nodes = [node(r(0, 1)), node(r(1, 1)), node(r(2, 1))];
        let a = vandermonde_solve(&nodes, &[r(0, 1), r(1, 1), r(4, 1)], &[0, 1, 2]).unwrap();
        assert_eq!(a, vec![r(0, 1), r(0, 1), r(1, 1)]);
    }

    #[test]
    fn singular_systems_are_named() {
        let err = vandermonde_solve(&[node(r(1, 2)), node(r(1, 2))], &[r(0, 1), r(1, 1)], &[2, 3]);
        assert_eq!(err, Err(Error::SingularSystem(Singularity::CoincidentNodes(0, 1))));
        let err = vandermonde_solve(&[node(r(0, 1)), node(r(1, 2))], &[r(0, 1), r(1, 1)], &[1, 2]);
        assert_eq!(err, Err(Error::SingularSystem(Singularity::ZeroNode(0))));
        assert!(vandermonde_solve(&[node(r(0, 1)), node(r(1, 2))], &[r(0, 1), r(1, 1)], &[0, 1]).is_ok());
    }

    #[test]
    fn fit_distinct_is_exact() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = ads_pair();
        let e = fit(&d, &fam, 1e-6).unwrap();
        assert_eq!(e.coeffs, vec![r(125, 18), r(-125, 18)]);
        assert_eq!(e.residual, Some(0.0));
        assert!(e.perturbation.is_trivial());
        let rep = representation_report(&e);
        assert_eq!(rep.summands, vec![2, 3]);
        assert!(rep.maximal);
    }

    #[test]
    fn residual_of_shifted_coefficient() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(vec![vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)]], vec![r(7, 1)]).unwrap();
        let mut e = fit(&d, &fam, 1e-6).unwrap();
        assert_eq!(residual(&e, &d), 0.0);
        e.coeffs[0] = e.coeffs[0].clone() + G::one();
        let want = eval_basis_modulus(&fam, &d.points[0]);
        assert_eq!(residual(&e, &d), want);
    }

    fn eval_basis_modulus(fam: &BasisFamily, x: &[G]) -> f64 {
        crate::basis::eval_basis(fam, 2, x).unwrap().modulus()
    }

    #[test]
    fn constant_values_rejected() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let mut d = ads_pair();
        d.values = vec![r(2, 1), r(2, 1)];
        assert_eq!(fit(&d, &fam, 1e-6), Err(Error::NonConstantViolation));
    }

    #[test]
    fn shared_projection_floor() {
        // Both points have x1 + i x2 = 5/3, so every basis function agrees
        // on them and the residual cannot drop below |0 - 1| / 2.
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap();
        assert_eq!(collision_floor(&d, &fam), 0.5);
        assert!(matches!(fit(&d, &fam, 1e-3), Err(Error::ToleranceUnreachable { .. })));
        let e = fit_perturbed(&d, &fam, &r(1, 1000)).unwrap();
        let moved = e.perturbation.apply(&fam, &d).unwrap();
        for (x, y) in moved.points.iter().zip(&moved.values) {
            assert_eq!(&e.eval(x).unwrap(), y);
        }
        assert!(e.residual.unwrap() >= 0.5);
    }

    #[test]
    fn equal_values_on_shared_node_fit_within_tolerance() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![
                vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)],
                vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)],
                vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)],
            ],
            vec![r(1, 1), r(1, 1), r(2, 1)],
        )
        .unwrap();
        let e = fit(&d, &fam, 1e-4).unwrap();
        assert!(!e.perturbation.is_trivial());
        assert!(e.residual.unwrap() < 1e-4);
    }

    #[test]
    fn float_copy_evaluates_close_to_exact() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let e = fit::<G>(&ads_pair(), &fam, 1e-9).unwrap();
        let f = e.to_float();
        assert_eq!(f.arithmetic, Arithmetic::Float);
        let x = [r(13, 12), r(0, 1), r(5, 12), r(0, 1)];
        let xf: Vec<Complex64> = x.iter().map(Field::to_c64).collect();
        let gap = (f.eval(&xf).unwrap() - e.eval(&x).unwrap().to_c64()).norm();
        assert!(gap < 1e-12, "{gap}");
    }

    #[test]
    fn float_fit_matches_exact() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let to_f = |d: &Dataset<G>| Dataset::new(
            d.points.iter().map(|x| x.iter().map(Field::to_c64).collect()).collect(),
            d.values.iter().map(Field::to_c64).collect(),
        )
        .unwrap();
        let e = fit::<Complex64>(&to_f(&ads_pair()), &fam, 1e-9).unwrap();
        assert!((e.coeffs[0] - Complex64::new(125.0 / 18.0, 0.0)).norm() < 1e-12);
        assert!((e.coeffs[1] + Complex64::new(125.0 / 18.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn report_examples() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let mk = |coeffs: Vec<G>| WhitneyExtension {
            family: fam.clone(),
            arithmetic: Arithmetic::Exact,
            mode: ExtensionMode::Approximate,
            ells: fam.ell_range(coeffs.len()),
            perturbation: PerturbationRecord::identity(&fam, coeffs.len()),
            coeffs,
            phase: None,
            residual: None,
        };
        assert_eq!(representation_report(&mk(vec![r(5, 1)])).summands, vec![2]);
        let rep = representation_report(&mk(vec![r(0, 1), r(1, 1)]));
        assert_eq!(rep.summands, vec![3]);
        assert!(!rep.maximal);
    }

    #[test]
    fn extension_json_round_trip() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let e = fit(&ads_pair(), &fam, 1e-6).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"125/18\""));
        let back: WhitneyExtension<G> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn epsilon_text_is_decimal() {
        assert_eq!(epsilon_from_f64::<G>(0.1).unwrap(), r(1, 10));
        assert!(epsilon_from_f64::<G>(0.0).is_err());
    }
}
