use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_node, BasisFamily};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::perturb::{compose_epsilon, euclid_distance, nodes_coincide, perturb_point, Dataset, PerturbationRecord};
use crate::scalar::{Arithmetic, Field};

use super::{epsilon_from_f64, fit, is_negligible, residual, vandermonde_solve, zero_threshold, ExtensionMode, WhitneyExtension, FIT_ATTEMPTS};

/// Tolerance on `|ρ|² = 1` and on prefactor equality in float mode.
const UNIT_TOLERANCE: f64 = 1e-9;

/// Unit-modulus correction `ρ(x)` with `ρ(x_i) = v(x̃_i)/v(x_i)` at the
/// anchors. Away from the anchors `ρ = e^{i t(x)}` where `t` is a Gaussian
/// RBF interpolant of the anchor phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PhaseField<T> {
    pub anchors: Vec<Vec<T>>,
    pub rho: Vec<T>,
    pub coefficients: Vec<f64>,
    pub sigma: f64,
}

impl<T: Field> PhaseField<T> {
    fn anchor_at(&self, x: &[T]) -> Option<usize> {
        self.anchors.iter().position(|a| match T::ARITHMETIC {
            Arithmetic::Exact => a.as_slice() == x,
            Arithmetic::Float => {
                let scale = 1.0 + a.iter().map(Field::modulus).fold(0.0, f64::max);
                euclid_distance(a, x) <= 1e-12 * scale
            }
        })
    }

    /// The interpolated phase `t(x)`.
    pub fn phase(&self, x: &[T]) -> f64 {
        self.anchors
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * (-euclid_distance(a, x).powi(2) / (self.sigma * self.sigma)).exp())
            .sum()
    }

    pub fn rho(&self, x: &[T]) -> T {
        match self.anchor_at(x) {
            Some(i) => self.rho[i].clone(),
            None => T::from_c64(Complex64::from_polar(1.0, self.phase(x))),
        }
    }

    fn build(anchors: Vec<Vec<T>>, rho: Vec<T>) -> Self {
        let n = anchors.len();
        let mut sigma = f64::INFINITY;
        for i in 0..n {
            for j in 0..i {
                sigma = sigma.min(euclid_distance(&anchors[i], &anchors[j]) / 2.0);
            }
        }
        if !sigma.is_finite() || sigma == 0.0 {
            sigma = 1.0;
        }
        let phases: Vec<Complex64> = rho.iter().map(|r| Complex64::new(r.to_c64().arg(), 0.0)).collect();
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let r = euclid_distance(&anchors[i], &anchors[j]);
                w[(i, j)] = Complex64::new((-r * r / (sigma * sigma)).exp(), 0.0);
            }
        }
        let coefficients = match linalg::solve(&w, &phases) {
            Ok(c) => c.iter().map(|z| z.re).collect(),
            Err(_) => phases.iter().map(|z| z.re).collect(),
        };
        PhaseField {
            anchors,
            rho,
            coefficients,
            sigma,
        }
    }
}

fn prefactors_agree<T: Field>(a: &T, b: &T) -> bool {
    match T::ARITHMETIC {
        Arithmetic::Exact => a == b,
        Arithmetic::Float => (a.clone() - b.clone()).modulus() <= UNIT_TOLERANCE * a.modulus().max(1.0),
    }
}

fn is_unit<T: Field>(z: &T) -> bool {
    match T::ARITHMETIC {
        Arithmetic::Exact => z.norm_sqr() == T::one(),
        Arithmetic::Float => (z.modulus() - 1.0).abs() <= UNIT_TOLERANCE,
    }
}

/// Turns an extension fitted at perturbed points into one that interpolates
/// the original data exactly, by rotating the node back at each original
/// point: `f(x) = Σ a_ℓ d(x) (ρ(x) v(x))^ℓ`.
pub fn exact_correct<T: Field>(e: &WhitneyExtension<T>, original: &Dataset<T>) -> Result<WhitneyExtension<T>> {
    let fam = &e.family;
    if e.perturbation.entries.len() != original.len() {
        return Err(Error::MissingPerturbationRecord);
    }
    let mut rho = Vec::with_capacity(original.len());
    for (x, entry) in original.points.iter().zip(&e.perturbation.entries) {
        if entry.epsilon.is_zero() {
            rho.push(T::one());
            continue;
        }
        let moved = perturb_point(fam, x, &entry.epsilon).ok_or_else(|| Error::NotEquivariant(fam.name()))?;
        let before = basis_node(fam, x)?;
        let after = basis_node(fam, &moved)?;
        if !prefactors_agree(&before.d, &after.d) {
            return Err(Error::NotEquivariant(fam.name()));
        }
        let r = after.v.div(&before.v).map_err(|_| Error::NotEquivariant(fam.name()))?;
        if !is_unit(&r) {
            return Err(Error::NotEquivariant(fam.name()));
        }
        rho.push(r);
    }
    let mut out = e.clone();
    out.mode = ExtensionMode::ExactCorrected;
    out.phase = if rho.iter().all(|r| *r == T::one()) {
        None
    } else {
        Some(PhaseField::build(original.points.clone(), rho))
    };
    out.residual = Some(residual(&out, original));
    Ok(out)
}

/// Fits as [`fit`] does, then, if some coefficient vanishes, nudges one
/// point at a time by a further small rotation until every `a_ℓ` is nonzero
/// while the residual stays below `target_eps`.
pub fn maximize_summands<T: Field>(d: &Dataset<T>, fam: &BasisFamily, target_eps: f64) -> Result<WhitneyExtension<T>> {
    let base = fit(d, fam, target_eps)?;
    let all_nonzero = |coeffs: &[T]| {
        let t = zero_threshold(coeffs);
        coeffs.iter().all(|a| !is_negligible(a, t))
    };
    if all_nonzero(&base.coeffs) {
        return Ok(base);
    }
    if fam.rotated_pairs() == 0 {
        return Err(Error::MaximalityUnreachable);
    }
    let moved = base.perturbation.apply(fam, d)?;
    let nodes: Vec<T> = moved
        .points
        .iter()
        .map(|x| basis_node(fam, x).map(|n| n.v))
        .collect::<Result<_>>()?;
    let step: T = epsilon_from_f64(target_eps.min(1.0))?;
    let half = T::from_i64(2).inv().expect("2 != 0");
    for i in (0..d.len()).rev() {
        let mut delta = step.clone();
        for _ in 0..FIT_ATTEMPTS {
            delta = delta * half.clone();
            for signed in [delta.clone(), -delta.clone()] {
                let Some(eps) = compose_epsilon(&base.perturbation.entries[i].epsilon, &signed) else {
                    continue;
                };
                let Some(y) = perturb_point(fam, &d.points[i], &eps) else {
                    continue;
                };
                let Ok(w) = basis_node(fam, &y).map(|n| n.v) else {
                    continue;
                };
                if (w.is_zero() && fam.ell_min != 0)
                    || nodes.iter().enumerate().any(|(j, v)| j != i && nodes_coincide(v, &w))
                {
                    continue;
                }
                let mut trial = moved.clone();
                trial.points[i] = y;
                let trial_nodes = trial
                    .points
                    .iter()
                    .map(|x| basis_node(fam, x))
                    .collect::<Result<Vec<_>>>()?;
                let Ok(coeffs) = vandermonde_solve(&trial_nodes, &trial.values, &base.ells) else {
                    continue;
                };
                if !all_nonzero(&coeffs) {
                    continue;
                }
                let mut record = base.perturbation.clone();
                record.entries[i] = PerturbationRecord::entry(fam, i, &d.points[i], eps);
                record.refresh_max();
                let mut ext = WhitneyExtension {
                    coeffs,
                    perturbation: record,
                    residual: None,
                    ..base.clone()
                };
                let r = residual(&ext, d);
                if r < target_eps {
                    log::debug!("point {i} nudged by {}; residual {r:e}", signed.real_string());
                    ext.residual = Some(r);
                    return Ok(ext);
                }
            }
        }
    }
    Err(Error::MaximalityUnreachable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Orientation;
    use crate::scalar::{ratio, GaussianRational as G};
    use crate::solve::{fit_perturbed, representation_report};

    fn r(a: i64, b: i64) -> G {
        G::real(ratio(a, b))
    }

    fn shared() -> Dataset<G> {
        Dataset::new(
            vec![vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn correction_interpolates_originals_exactly() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = shared();
        let e = fit_perturbed(&d, &fam, &r(1, 1000)).unwrap();
        assert!(e.residual.unwrap() >= 0.5);
        let c = exact_correct(&e, &d).unwrap();
        assert_eq!(c.mode, ExtensionMode::ExactCorrected);
        for (x, y) in d.points.iter().zip(&d.values) {
            assert_eq!(&c.eval(x).unwrap(), y);
        }
        assert_eq!(c.residual, Some(0.0));
        let phase = c.phase.as_ref().unwrap();
        assert_eq!(phase.rho[0], G::one());
        assert_eq!(phase.rho[1].norm_sqr(), G::one());
    }

    #[test]
    fn correction_requires_matching_record() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = shared();
        let mut e = fit_perturbed(&d, &fam, &r(1, 1000)).unwrap();
        e.perturbation.entries.pop();
        assert_eq!(exact_correct(&e, &d), Err(Error::MissingPerturbationRecord));
    }

    #[test]
    fn trivial_record_corrects_to_itself() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)], vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap();
        let e = fit(&d, &fam, 1e-6).unwrap();
        let c = exact_correct(&e, &d).unwrap();
        assert_eq!(c.coeffs, e.coeffs);
        assert!(c.phase.is_none());
    }

    #[test]
    fn correction_fades_far_from_data() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = shared();
        let e = fit_perturbed(&d, &fam, &r(1, 1000)).unwrap();
        let c = exact_correct(&e, &d).unwrap();
        // (a cosh, 0, a sinh, 0) with cosh = 41/9, sinh = 40/9: far outside the data.
        let far = vec![r(41, 9), r(0, 1), r(40, 9), r(0, 1)];
        let gap = (c.eval(&far).unwrap() - e.eval(&far).unwrap()).modulus();
        assert!(gap < 1e-9, "{gap}");
    }

    #[test]
    fn phase_field_passes_through_anchors() {
        let anchors = vec![vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(3.0, 0.0)]];
        let rho = vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -0.2)];
        let field = PhaseField::build(anchors.clone(), rho.clone());
        for (a, r) in anchors.iter().zip(&rho) {
            assert!((field.phase(a) - r.arg()).abs() < 1e-12);
        }
        let mid = field.rho(&[Complex64::new(0.5, 0.0)]);
        assert!((mid.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximize_moves_a_point_when_a_coefficient_vanishes() {
        // Values v² at nodes 1 and 3/5 with ℓ ∈ {2, 3}: a = (1, 0).
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)], vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)]],
            vec![r(1, 1), r(9, 25)],
        )
        .unwrap();
        let e = fit(&d, &fam, 1e-3).unwrap();
        assert_eq!(representation_report(&e).summands, vec![2]);
        let m = maximize_summands(&d, &fam, 1e-3).unwrap();
        assert!(representation_report(&m).maximal);
        assert!(m.residual.unwrap() < 1e-3);
        assert!(!m.perturbation.is_trivial());
    }
}
