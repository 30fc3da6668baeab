//! Rational Cayley rotations, collision removal by small rotations, and
//! general-position diagnostics.

use serde::{Deserialize, Serialize};

use crate::basis::{basis_node, BasisFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::geometry::BlockRotation;
use crate::scalar::{Arithmetic, Field};

/// Relative tolerance under which two float nodes count as equal.
pub const NODE_TOLERANCE: f64 = 1e-12;

/// Maximum number of halvings of `ε_i` in [`ensure_distinct`].
pub const MAX_HALVINGS: usize = 64;

/// `A(ε) = (I − S)/(I + S) = [[1−ε², −2ε], [2ε, 1−ε²]] / (1+ε²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct CayleyRotation<T> {
    epsilon: T,
    matrix: [[T; 2]; 2],
}

pub fn cayley<T: Field>(epsilon: &T) -> CayleyRotation<T> {
    let e = epsilon.clone();
    let e2 = e.clone() * e.clone();
    let scale = (T::one() + e2.clone()).inv().expect("1 + ε² > 0");
    let c = (T::one() - e2) * scale.clone();
    let s = (T::from_i64(2) * e) * scale;
    CayleyRotation {
        epsilon: epsilon.clone(),
        matrix: [[c.clone(), -s.clone()], [s, c]],
    }
}

impl<T: Field> CayleyRotation<T> {
    pub fn epsilon(&self) -> &T {
        &self.epsilon
    }

    pub fn matrix(&self) -> &[[T; 2]; 2] {
        &self.matrix
    }

    /// `u = (1 − ε² + 2εi)/(1 + ε²)`; rotating a pair multiplies `a + ib` by `u`.
    pub fn unit(&self) -> T {
        self.matrix[0][0].clone() + T::imag_unit() * self.matrix[1][0].clone()
    }

    /// `atan2(2ε, 1 − ε²)`.
    pub fn angle(&self) -> f64 {
        let e = self.epsilon.to_c64().re;
        (2.0 * e).atan2(1.0 - e * e)
    }

    /// Squared Frobenius distance `‖A − I‖²`.
    pub fn dist_sq_to_identity(&self) -> T {
        let m = &self.matrix;
        let d = |i: usize, j: usize| {
            let v = if i == j { m[i][j].clone() - T::one() } else { m[i][j].clone() };
            v.clone() * v
        };
        d(0, 0) + d(0, 1) + d(1, 0) + d(1, 1)
    }

    pub fn block(&self, block_start: usize) -> BlockRotation<T> {
        BlockRotation::new_unchecked(self.matrix.clone(), block_start)
    }
}

/// `A(ε₁)·A(ε₂) = A((ε₁+ε₂)/(1−ε₁ε₂))`; `None` when `ε₁ε₂ = 1`.
pub fn compose_epsilon<T: Field>(e1: &T, e2: &T) -> Option<T> {
    let den = T::one() - e1.clone() * e2.clone();
    (e1.clone() + e2.clone()).div(&den).ok()
}

/// Points with prescribed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Dataset<T> {
    pub points: Vec<Vec<T>>,
    pub values: Vec<T>,
}

impl<T: Field> Dataset<T> {
    pub fn new(points: Vec<Vec<T>>, values: Vec<T>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidDataset(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        Ok(Dataset { points, values })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point validity for `fam`, no repeated point with conflicting values,
    /// and nonconstant values when `n ≥ 2`.
    pub fn validate(&self, fam: &BasisFamily) -> Result<()> {
        for (i, x) in self.points.iter().enumerate() {
            fam.validate_point(x, i).map_err(|e| match e {
                Error::OffQuadric { value, expected, .. } => Error::OffQuadric { index: i, value, expected },
                Error::DimensionMismatch { expected, found } => Error::InvalidPoint {
                    index: i,
                    reason: format!("expected {expected} coordinates, found {found}"),
                },
                other => other,
            })?;
        }
        for i in 0..self.len() {
            for j in 0..i {
                if points_coincide(&self.points[i], &self.points[j]) && self.values[i] != self.values[j] {
                    return Err(Error::InvalidDataset(format!(
                        "points {j} and {i} coincide but carry different values"
                    )));
                }
            }
        }
        if self.len() >= 2 && self.values.iter().all(|v| *v == self.values[0]) {
            return Err(Error::NonConstantViolation);
        }
        Ok(())
    }
}

mod real_text {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::scalar::{parse_gaussian, Field};

    pub fn serialize<T: Field, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.real_string())
    }

    pub fn deserialize<'de, T: Field, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        parse_gaussian(&s).map(|g| T::from_gaussian(&g)).map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Field", deserialize = "T: Field"))]
pub struct PerturbationEntry<T> {
    pub index: usize,
    #[serde(with = "real_text")]
    pub epsilon: T,
    pub angle: f64,
    pub block_start: usize,
    pub displacement: f64,
    /// `2^{5/2}·C·ε·max(1, √(k/4))` for `k` rotated pairs; absent for group
    /// perturbations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

/// Per-point Cayley parameters applied to a dataset, in point order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Field", deserialize = "T: Field"))]
pub struct PerturbationRecord<T> {
    pub entries: Vec<PerturbationEntry<T>>,
    pub max_displacement: f64,
}

impl<T: Field> PerturbationRecord<T> {
    pub fn identity(fam: &BasisFamily, n: usize) -> Self {
        PerturbationRecord {
            entries: (0..n)
                .map(|index| PerturbationEntry {
                    index,
                    epsilon: T::zero(),
                    angle: 0.0,
                    block_start: fam.rotation_block_start(),
                    displacement: 0.0,
                    bound: None,
                })
                .collect(),
            max_displacement: 0.0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(|e| e.epsilon.is_zero())
    }

    pub fn moved(&self) -> impl Iterator<Item = &PerturbationEntry<T>> {
        self.entries.iter().filter(|e| !e.epsilon.is_zero())
    }

    /// Reapplies the recorded rotations to the original points.
    pub fn apply(&self, fam: &BasisFamily, d: &Dataset<T>) -> Result<Dataset<T>> {
        if self.entries.len() != d.len() {
            return Err(Error::MissingPerturbationRecord);
        }
        let points = d
            .points
            .iter()
            .zip(&self.entries)
            .map(|(x, e)| perturb_point(fam, x, &e.epsilon).ok_or(Error::MissingPerturbationRecord))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            points,
            values: d.values.clone(),
        })
    }

    /// Builds the entry for point `index` moved by `A(ε)`.
    pub(crate) fn entry(fam: &BasisFamily, index: usize, original: &[T], epsilon: T) -> PerturbationEntry<T> {
        let moved = perturb_point(fam, original, &epsilon).unwrap_or_else(|| original.to_vec());
        let displacement = euclid_distance(original, &moved);
        let pairs = fam.rotated_pairs();
        let bound = match fam.kind {
            FamilyKind::GroupHds { .. } => None,
            _ if pairs == 0 => None,
            _ => {
                let c = original.iter().map(|v| v.modulus()).fold(0.0, f64::max);
                let e = epsilon.to_c64().re.abs();
                Some(2f64.powf(2.5) * c * e * (pairs as f64 / 4.0).sqrt().max(1.0))
            }
        };
        PerturbationEntry {
            index,
            angle: cayley(&epsilon).angle(),
            epsilon,
            block_start: fam.rotation_block_start(),
            displacement,
            bound,
        }
    }

    pub(crate) fn refresh_max(&mut self) {
        self.max_displacement = self.entries.iter().map(|e| e.displacement).fold(0.0, f64::max);
    }
}

/// `A(ε)` applied to `x` by the family's perturbation action.
pub fn perturb_point<T: Field>(fam: &BasisFamily, x: &[T], epsilon: &T) -> Option<Vec<T>> {
    if epsilon.is_zero() {
        return Some(x.to_vec());
    }
    fam.rotate(x, &cayley(epsilon))
}

pub(crate) fn euclid_distance<T: Field>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).to_c64().norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn points_coincide<T: Field>(a: &[T], b: &[T]) -> bool {
    match T::ARITHMETIC {
        Arithmetic::Exact => a == b,
        Arithmetic::Float => {
            let scale = a.iter().chain(b).map(Field::modulus).fold(1.0, f64::max);
            euclid_distance(a, b) <= NODE_TOLERANCE * scale
        }
    }
}

/// Node equality: exact in exact mode, within [`NODE_TOLERANCE`] (relative)
/// in float mode.
pub fn nodes_coincide<T: Field>(a: &T, b: &T) -> bool {
    match T::ARITHMETIC {
        Arithmetic::Exact => a == b,
        Arithmetic::Float => {
            let scale = a.modulus().max(b.modulus());
            (a.clone() - b.clone()).modulus() <= NODE_TOLERANCE * scale
        }
    }
}

fn node_admissible<T: Field>(fam: &BasisFamily, v: &T, accepted: &[T]) -> std::result::Result<(), Option<usize>> {
    if v.is_zero() && fam.ell_min != 0 {
        return Err(None);
    }
    match accepted.iter().position(|w| nodes_coincide(v, w)) {
        Some(j) => Err(Some(j)),
        None => Ok(()),
    }
}

/// Moves points one at a time, in order, so that all nodes are pairwise
/// distinct, and nonzero unless the first index is 0. A point that needs
/// moving is rotated by `A(ε_i)` with `ε_i = min(ε, 1)`, halved until the
/// new node is admissible.
pub fn ensure_distinct<T: Field>(
    d: &Dataset<T>,
    fam: &BasisFamily,
    epsilon: &T,
) -> Result<(Dataset<T>, PerturbationRecord<T>)> {
    if epsilon.cmp_real(&T::zero()) != std::cmp::Ordering::Greater {
        return Err(Error::NonPositiveTolerance);
    }
    let start = if epsilon.cmp_real(&T::one()) == std::cmp::Ordering::Greater {
        T::one()
    } else {
        epsilon.clone()
    };
    let half = T::from_i64(2).inv().expect("2 != 0");
    let mut record = PerturbationRecord::identity(fam, d.len());
    let mut points = Vec::with_capacity(d.len());
    let mut nodes: Vec<T> = Vec::with_capacity(d.len());
    for (i, x) in d.points.iter().enumerate() {
        let v = basis_node(fam, x)?.v;
        let reason = match node_admissible(fam, &v, &nodes) {
            Ok(()) => {
                points.push(x.clone());
                nodes.push(v);
                continue;
            }
            Err(Some(j)) => format!("points {j} and {i} share a node value"),
            Err(None) => format!("point {i} has a zero node"),
        };
        if fam.rotated_pairs() == 0 {
            return Err(Error::NotInGeneralPosition(format!("{reason}; this family has no perturbation")));
        }
        let mut eps = start.clone();
        let mut placed = false;
        for _ in 0..=MAX_HALVINGS {
            let y = perturb_point(fam, x, &eps).expect("family rotates");
            let w = basis_node(fam, &y)?.v;
            if node_admissible(fam, &w, &nodes).is_ok() {
                log::debug!("point {i}: rotated by epsilon = {}", eps.real_string());
                record.entries[i] = PerturbationRecord::entry(fam, i, x, eps.clone());
                points.push(y);
                nodes.push(w);
                placed = true;
                break;
            }
            eps = eps * half.clone();
        }
        if !placed {
            return Err(Error::NotInGeneralPosition(format!(
                "{reason}, and no rotation within {MAX_HALVINGS} halvings separates it"
            )));
        }
    }
    record.refresh_max();
    Ok((
        Dataset {
            points,
            values: d.values.clone(),
        },
        record,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub status: CheckStatus,
    pub message: String,
}

/// Outcome of [`general_position_check`]. `Pass` is not a proof of general
/// position; only necessary conditions are checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub status: CheckStatus,
    pub findings: Vec<Finding>,
}

impl GeneralPositionReport {
    fn push(&mut self, status: CheckStatus, message: String) {
        self.status = self.status.max(status);
        self.findings.push(Finding { status, message });
    }
}

/// Necessary-condition checks for general position: coordinates vanishing
/// across the whole dataset, all points sharing one coordinate block (a
/// single orbit of the rotation group of the other block), excluded poles,
/// and single-point datasets.
pub fn general_position_check<T: Field>(d: &Dataset<T>, fam: &BasisFamily) -> GeneralPositionReport {
    let mut report = GeneralPositionReport {
        status: CheckStatus::Pass,
        findings: Vec::new(),
    };
    if d.len() == 1 {
        report.push(CheckStatus::Warn, "single point always lies in a proper orbit".into());
    }
    let zero_coord = |k: usize| d.points.iter().all(|x| x.get(k).is_some_and(Field::is_zero));
    let shared = |lo: usize, hi: usize| d.len() >= 2 && d.points.iter().all(|x| x.get(lo..hi) == d.points[0].get(lo..hi));
    match fam.kind {
        FamilyKind::AdS22Plus | FamilyKind::HyperboloidMinus { .. } => {
            let (first_block, second_block, critical) = match fam.kind {
                FamilyKind::HyperboloidMinus { p, q } => ((p, p + q), (0, p), p),
                _ => ((0, 2), (2, 4), 0),
            };
            for k in 0..fam.dim() {
                if zero_coord(k) {
                    if k == critical {
                        let what = if critical == 0 { "first coordinate" } else { "first coordinate of the negative block" };
                        report.push(CheckStatus::Fail, format!("{what} identically zero"));
                    } else {
                        report.push(CheckStatus::Warn, format!("coordinate x{} identically zero", k + 1));
                    }
                }
            }
            for (lo, hi) in [first_block, second_block] {
                if shared(lo, hi) {
                    report.push(
                        CheckStatus::Warn,
                        format!("all points share coordinates x{}..x{}: a single orbit of a proper subgroup", lo + 1, hi),
                    );
                }
            }
        }
        FamilyKind::Sphere2 => {
            for (i, x) in d.points.iter().enumerate() {
                if x[0].is_zero() && x[1].is_zero() {
                    report.push(CheckStatus::Fail, format!("point {i} is a pole (0, 0, ±1)"));
                }
            }
            for k in 0..3 {
                if d.len() >= 2 && zero_coord(k) {
                    report.push(CheckStatus::Warn, format!("coordinate x{} identically zero", k + 1));
                }
            }
        }
        FamilyKind::HalfPlane | FamilyKind::RealLine | FamilyKind::GroupHds { .. } => {}
    }
    report
}

/// Result of scanning a dataset for node collisions without modifying it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct CollisionScan<T> {
    pub collisions: Vec<Collision<T>>,
    pub zero_nodes: Vec<usize>,
    pub undefined: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Collision<T> {
    pub first: usize,
    pub second: usize,
    pub projection: Vec<T>,
}

impl<T> CollisionScan<T> {
    pub fn is_clean(&self) -> bool {
        self.collisions.is_empty() && self.zero_nodes.is_empty() && self.undefined.is_empty()
    }
}

/// All pairs of points with coinciding nodes, zero nodes where they are not
/// allowed, and points where the basis is undefined.
pub fn collision_scan<T: Field>(d: &Dataset<T>, fam: &BasisFamily) -> CollisionScan<T> {
    let mut scan = CollisionScan {
        collisions: Vec::new(),
        zero_nodes: Vec::new(),
        undefined: Vec::new(),
    };
    let mut nodes: Vec<Option<T>> = Vec::with_capacity(d.len());
    for (i, x) in d.points.iter().enumerate() {
        match basis_node(fam, x) {
            Ok(n) => {
                if n.v.is_zero() && fam.ell_min != 0 {
                    scan.zero_nodes.push(i);
                }
                for (j, w) in nodes.iter().enumerate() {
                    if w.as_ref().is_some_and(|w| nodes_coincide(w, &n.v)) {
                        scan.collisions.push(Collision {
                            first: j,
                            second: i,
                            projection: fam.projection(x),
                        });
                    }
                }
                nodes.push(Some(n.v));
            }
            Err(e) => {
                scan.undefined.push((i, e.to_string()));
                nodes.push(None);
            }
        }
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Orientation;
    use crate::geometry::{quadric_form, Signature};
    use crate::scalar::{ratio, GaussianRational as G};
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> G {
        G::real(ratio(a, b))
    }

    fn shared_pair() -> Dataset<G> {
        Dataset::new(
            vec![vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn repeated_point_with_two_values_is_rejected() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let x = vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)];
        let d = Dataset::new(vec![x.clone(), x.clone()], vec![r(0, 1), r(1, 1)]).unwrap();
        assert!(matches!(d.validate(&fam), Err(Error::InvalidDataset(_))));
        let same = Dataset::new(vec![x.clone(), x, vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)]], vec![r(2, 1), r(2, 1), r(1, 1)]).unwrap();
        assert!(same.validate(&fam).is_ok());
    }

    #[test]
    fn cayley_examples() {
        let id = cayley(&G::zero());
        assert_eq!(id.matrix(), &[[G::one(), G::zero()], [G::zero(), G::one()]]);
        assert_eq!(id.angle(), 0.0);
        let quarter = cayley(&G::one());
        assert_eq!(quarter.matrix(), &[[G::zero(), r(-1, 1)], [G::one(), G::zero()]]);
        assert_eq!(quarter.dist_sq_to_identity(), r(4, 1));
        assert!((quarter.angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn composition_of_parameters() {
        let (a, b) = (r(1, 3), r(1, 7));
        let ab = compose_epsilon(&a, &b).unwrap();
        let (ma, mb, mab) = (cayley(&a), cayley(&b), cayley(&ab));
        let prod = ma.block(0).compose(&mb.block(0)).unwrap();
        assert_eq!(prod.matrix(), mab.matrix());
        assert!(compose_epsilon(&r(1, 1), &r(1, 1)).is_none());
    }

    #[test]
    fn distinct_dataset_untouched() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)], vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap();
        let (out, rec) = ensure_distinct(&d, &fam, &r(1, 10)).unwrap();
        assert_eq!(out, d);
        assert!(rec.is_trivial());
        assert_eq!(rec.max_displacement, 0.0);
    }

    #[test]
    fn shared_projection_is_rotated() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = shared_pair();
        let eps = r(1, 10);
        let (out, rec) = ensure_distinct(&d, &fam, &eps).unwrap();
        assert_eq!(out.points[0], d.points[0]);
        let c = r(99, 101);
        let s = r(20, 101);
        let five_thirds = r(5, 3);
        assert_eq!(out.points[1][..2], [five_thirds.clone() * c, five_thirds * s]);
        let sig = Signature::plus(2, 2).unwrap();
        assert_eq!(quadric_form(&out.points[1], &sig).unwrap(), G::one());
        let e = &rec.entries[1];
        assert_eq!(e.epsilon, eps);
        assert!(e.displacement <= e.bound.unwrap());
        assert!(rec.entries[0].epsilon.is_zero());
    }

    #[test]
    fn collision_with_candidate_halves() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        // The third point sits where A(1/2) would send the shared point.
        let base = vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)];
        let blocked = perturb_point(&fam, &base, &r(1, 2)).unwrap();
        let mut blocked = blocked;
        blocked[2] = r(0, 1);
        blocked[3] = r(4, 3);
        let d = Dataset::new(
            vec![base.clone(), blocked, vec![r(5, 3), r(0, 1), r(0, 1), r(4, 3)]],
            vec![r(0, 1), r(1, 1), r(2, 1)],
        )
        .unwrap();
        let (_, rec) = ensure_distinct(&d, &fam, &r(1, 2)).unwrap();
        assert_eq!(rec.entries[2].epsilon, r(1, 4));
    }

    #[test]
    fn zero_node_cannot_be_rotated_away() {
        let fam = BasisFamily::sphere2();
        let d = Dataset::new(vec![vec![r(0, 1), r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1), r(0, 1)]], vec![r(0, 1), r(1, 1)]).unwrap();
        assert!(matches!(ensure_distinct(&d, &fam, &r(1, 4)), Err(Error::NotInGeneralPosition(_))));
    }

    #[test]
    fn general_position_examples() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let d = Dataset::new(
            vec![vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1)], vec![r(0, 1), r(5, 3), r(4, 3), r(0, 1)]],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap();
        let rep = general_position_check(&d, &fam);
        assert_eq!(rep.status, CheckStatus::Fail);
        assert!(rep.findings.iter().any(|f| f.message == "first coordinate identically zero"));

        let single = Dataset::new(vec![vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)]], vec![r(3, 1)]).unwrap();
        let rep = general_position_check(&single, &fam);
        assert_eq!(rep.status, CheckStatus::Warn);
        assert!(rep.findings.iter().any(|f| f.message == "single point always lies in a proper orbit"));

        let rotated = |x: Vec<G>, e1: G, e2: G| {
            let mut y = x;
            cayley(&e1).block(0).apply_coords(&mut y);
            cayley(&e2).block(2).apply_coords(&mut y);
            y
        };
        let generic = Dataset::new(
            vec![
                rotated(vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], r(1, 2), r(1, 3)),
                rotated(vec![r(5, 4), r(0, 1), r(3, 4), r(0, 1)], r(1, 5), r(2, 7)),
            ],
            vec![r(0, 1), r(1, 1)],
        )
        .unwrap();
        generic.validate(&fam).unwrap();
        assert_eq!(general_position_check(&generic, &fam).status, CheckStatus::Pass);
    }

    #[test]
    fn scan_reports_shared_projection() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let scan = collision_scan(&shared_pair(), &fam);
        assert_eq!(scan.collisions.len(), 1);
        assert_eq!((scan.collisions[0].first, scan.collisions[0].second), (0, 1));
        assert_eq!(scan.collisions[0].projection, vec![r(5, 3), r(0, 1)]);
    }

    #[test]
    fn record_serializes_epsilon_as_text() {
        let fam = BasisFamily::ads22_plus(Orientation::Plus);
        let (_, rec) = ensure_distinct(&shared_pair(), &fam, &r(1, 10)).unwrap();
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["entries"][1]["epsilon"], "1/10");
        let back: PerturbationRecord<G> = serde_json::from_value(json).unwrap();
        assert_eq!(back, rec);
    }

    proptest! {
        #[test]
        fn cayley_is_rotation(num in -1000i64..1000, den in 1i64..1000) {
            let e = r(num, den);
            let a = cayley(&e);
            let m = a.matrix();
            let gram00 = m[0][0].clone() * m[0][0].clone() + m[1][0].clone() * m[1][0].clone();
            let gram01 = m[0][0].clone() * m[0][1].clone() + m[1][0].clone() * m[1][1].clone();
            let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
            prop_assert_eq!(gram00, G::one());
            prop_assert_eq!(gram01, G::zero());
            prop_assert_eq!(det, G::one());
            let e2 = e.clone() * e.clone();
            let want = (r(8, 1) * e2.clone()).div(&(G::one() + e2)).unwrap();
            prop_assert_eq!(a.dist_sq_to_identity(), want);
        }
    }
}
