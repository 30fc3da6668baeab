//! Real hyperboloids `X(p,q)± = { x : x₁²+…+x_p² − x_{p+1}²−…−x_{p+q}² = ±1 }`,
//! the hyperbolic chart `Φ(r,s,t) = (r·sinh t, s·cosh t)` on `X(p,q)−`, and
//! block rotations inside the positive or negative coordinate block.
//!
//! `X(p,q)+` points are charted through the swap `(x, y) ↦ (y, x)`, which
//! maps `X(p,q)+` onto `X(q,p)−`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Arithmetic, Field};
use num::complex::Complex64;

/// Float-mode on-quadric tolerance factor: `|form − sign| ≤ 1e-9·(1+‖x‖²)`.
pub const QUADRIC_TOLERANCE: f64 = 1e-9;

/// Unit-norm tolerance for chart direction vectors.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadricSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl QuadricSign {
    pub fn value(self) -> i8 {
        match self {
            QuadricSign::Plus => 1,
            QuadricSign::Minus => -1,
        }
    }
}

/// Signature `(p, q)` together with the level `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub sign: QuadricSign,
}

impl Signature {
    /// `X(p,q)+`; requires `p, q ≥ 1`.
    pub fn plus(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSignature(format!("need p, q >= 1, got ({p}, {q})")));
        }
        Ok(Signature {
            p,
            q,
            sign: QuadricSign::Plus,
        })
    }

    /// `X(p,q)−`; requires `p ≥ 1` and `q ≥ 2`.
    pub fn minus(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q < 2 {
            return Err(Error::InvalidSignature(format!(
                "X(p,q)- needs p >= 1 and q >= 2, got ({p}, {q})"
            )));
        }
        Ok(Signature {
            p,
            q,
            sign: QuadricSign::Minus,
        })
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Signature of the swapped space: `X(p,q)± ↔ X(q,p)∓`.
    pub fn swapped(&self) -> Signature {
        Signature {
            p: self.q,
            q: self.p,
            sign: match self.sign {
                QuadricSign::Plus => QuadricSign::Minus,
                QuadricSign::Minus => QuadricSign::Plus,
            },
        }
    }
}

/// `Σ_{k≤p} x_k² − Σ_{k>p} x_k²`.
pub fn quadric_form<T: Field>(x: &[T], sig: &Signature) -> Result<T> {
    if x.len() != sig.dim() {
        return Err(Error::DimensionMismatch {
            expected: sig.dim(),
            found: x.len(),
        });
    }
    let (pos, neg) = x.split_at(sig.p);
    let sq = |acc: T, v: &T| acc + v.clone() * v.clone();
    Ok(pos.iter().fold(T::zero(), sq) - neg.iter().fold(T::zero(), sq))
}

/// Checks that real coordinates satisfy the quadric equation: exactly in
/// exact mode, within [`QUADRIC_TOLERANCE`]`·(1+‖x‖²)` in float mode.
pub fn on_quadric<T: Field>(x: &[T], sig: &Signature) -> Result<bool> {
    let value = quadric_form(x, sig)?;
    let target = T::from_i64(sig.sign.value() as i64);
    Ok(match T::ARITHMETIC {
        Arithmetic::Exact => value == target,
        Arithmetic::Float => {
            let norm_sq: f64 = x.iter().map(|v| v.to_c64().norm_sqr()).sum();
            (value - target).modulus() <= QUADRIC_TOLERANCE * (1.0 + norm_sq)
        }
    })
}

/// A validated point of `X(p,q)±`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadricPoint<T> {
    coords: Vec<T>,
    signature: Signature,
}

impl<T: Field> QuadricPoint<T> {
    pub fn new(coords: Vec<T>, signature: Signature) -> Result<Self> {
        if coords.len() != signature.dim() {
            return Err(Error::DimensionMismatch {
                expected: signature.dim(),
                found: coords.len(),
            });
        }
        if let Some(k) = coords.iter().position(|c| !c.is_real()) {
            return Err(Error::InvalidPoint {
                index: 0,
                reason: format!("coordinate {k} is not real"),
            });
        }
        if !on_quadric(&coords, &signature)? {
            let value = quadric_form(&coords, &signature)?;
            return Err(Error::OffQuadric {
                index: 0,
                value: format!("{:?}", value.to_c64().re),
                expected: signature.sign.value(),
            });
        }
        Ok(QuadricPoint { coords, signature })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// The diffeomorphism `X(p,q)± → X(q,p)∓`, `(x, y) ↦ (y, x)`.
    pub fn swap(&self) -> QuadricPoint<T> {
        let p = self.signature.p;
        let mut coords = self.coords[p..].to_vec();
        coords.extend_from_slice(&self.coords[..p]);
        QuadricPoint {
            coords,
            signature: self.signature.swapped(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_c64().re).collect()
    }
}

/// Chart coordinates `(r, s, t)` with `Φ(r,s,t) = (r sinh t, s cosh t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicCoords {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub t: f64,
    /// Set when `t = 0`, where `r` is arbitrary and `e₁` is returned.
    #[serde(default)]
    pub r_degenerate: bool,
}

impl HyperbolicCoords {
    pub fn new(r: Vec<f64>, s: Vec<f64>, t: f64) -> Self {
        HyperbolicCoords {
            r,
            s,
            t,
            r_degenerate: false,
        }
    }
}

fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `Φ(r,s,t)` on `X(p,q)−`.
pub fn from_hyperbolic(h: &HyperbolicCoords, sig: &Signature) -> Result<QuadricPoint<Complex64>> {
    if sig.sign != QuadricSign::Minus {
        return Err(Error::InvalidSignature(
            "the hyperbolic chart lives on X(p,q)-; swap X(p,q)+ points first".into(),
        ));
    }
    if h.r.len() != sig.p {
        return Err(Error::DimensionMismatch {
            expected: sig.p,
            found: h.r.len(),
        });
    }
    if h.s.len() != sig.q {
        return Err(Error::DimensionMismatch {
            expected: sig.q,
            found: h.s.len(),
        });
    }
    for v in [&h.r, &h.s] {
        let n = euclid_norm(v);
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitDirection(n));
        }
    }
    if h.t.is_nan() || h.t < 0.0 {
        return Err(Error::InvalidPoint {
            index: 0,
            reason: format!("radial variable t = {} must be nonnegative", h.t),
        });
    }
    let (sh, ch) = (h.t.sinh(), h.t.cosh());
    let coords = h
        .r
        .iter()
        .map(|r| Complex64::new(r * sh, 0.0))
        .chain(h.s.iter().map(|s| Complex64::new(s * ch, 0.0)))
        .collect();
    QuadricPoint::new(coords, *sig)
}

/// Inverse chart on `X(p,q)−`: `t = arsinh ‖x‖`, `r = x/‖x‖`, `s = y/cosh t`.
pub fn to_hyperbolic<T: Field>(x: &QuadricPoint<T>) -> Result<HyperbolicCoords> {
    let sig = x.signature();
    if sig.sign != QuadricSign::Minus {
        return Err(Error::InvalidSignature(
            "the hyperbolic chart lives on X(p,q)-; swap X(p,q)+ points first".into(),
        ));
    }
    let coords = x.to_f64();
    let (pos, neg) = coords.split_at(sig.p);
    let rho = euclid_norm(pos);
    let t = rho.asinh();
    let (r, r_degenerate) = if rho == 0.0 {
        let mut e1 = vec![0.0; sig.p];
        e1[0] = 1.0;
        (e1, true)
    } else {
        (pos.iter().map(|v| v / rho).collect(), false)
    };
    // cosh t = ‖y‖ on the quadric; dividing by ‖y‖ keeps s unit in floats.
    let ch = euclid_norm(neg);
    let s = neg.iter().map(|v| v / ch).collect();
    Ok(HyperbolicCoords {
        r,
        s,
        t,
        r_degenerate,
    })
}

/// A 2×2 rotation acting on coordinates `block_start` and `block_start + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRotation<T> {
    matrix: [[T; 2]; 2],
    block_start: usize,
}

impl<T: Field> BlockRotation<T> {
    /// Validates `AᵀA = I` and `det A = 1` (exactly in exact mode).
    pub fn new(matrix: [[T; 2]; 2], block_start: usize) -> Result<Self> {
        let m = Matrix::from_rows(vec![matrix[0].to_vec(), matrix[1].to_vec()]).expect("2x2");
        let gram = m.transpose().mul(&m).expect("2x2");
        let det = m.determinant().expect("square");
        let tol = 1e-12;
        let ok = gram.approx_eq(&Matrix::identity(2), tol)
            && match T::ARITHMETIC {
                Arithmetic::Exact => det == T::one(),
                Arithmetic::Float => (det - T::one()).modulus() <= tol,
            }
            && matrix.iter().flatten().all(Field::is_real);
        if !ok {
            return Err(Error::NotARotation);
        }
        Ok(BlockRotation {
            matrix,
            block_start,
        })
    }

    pub fn identity(block_start: usize) -> Self {
        BlockRotation {
            matrix: [[T::one(), T::zero()], [T::zero(), T::one()]],
            block_start,
        }
    }

    pub(crate) fn new_unchecked(matrix: [[T; 2]; 2], block_start: usize) -> Self {
        BlockRotation {
            matrix,
            block_start,
        }
    }

    pub fn matrix(&self) -> &[[T; 2]; 2] {
        &self.matrix
    }

    pub fn block_start(&self) -> usize {
        self.block_start
    }

    /// `self ∘ other` on the same block.
    pub fn compose(&self, other: &BlockRotation<T>) -> Option<BlockRotation<T>> {
        if self.block_start != other.block_start {
            return None;
        }
        let a = &self.matrix;
        let b = &other.matrix;
        let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        Some(BlockRotation {
            matrix: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            block_start: self.block_start,
        })
    }

    /// Applies the rotation to a raw coordinate vector.
    pub(crate) fn apply_coords(&self, x: &mut [T]) {
        let k = self.block_start;
        let (u, v) = (x[k].clone(), x[k + 1].clone());
        let m = &self.matrix;
        x[k] = m[0][0].clone() * u.clone() + m[0][1].clone() * v.clone();
        x[k + 1] = m[1][0].clone() * u + m[1][1].clone() * v;
    }
}

/// Rotates two adjacent coordinates that lie inside one sign block. The
/// quadric value is preserved exactly in exact mode.
pub fn apply_block_rotation<T: Field>(
    x: &QuadricPoint<T>,
    rot: &BlockRotation<T>,
) -> Result<QuadricPoint<T>> {
    let sig = x.signature();
    let start = rot.block_start();
    let end = start + 1;
    if end >= sig.dim() {
        return Err(Error::DimensionMismatch {
            expected: sig.dim(),
            found: end + 1,
        });
    }
    if start < sig.p && end >= sig.p {
        return Err(Error::BlockStraddlesSignature { start, end, p: sig.p });
    }
    let mut coords = x.coords().to_vec();
    rot.apply_coords(&mut coords);
    Ok(QuadricPoint {
        coords,
        signature: sig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, GaussianRational as G};
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> G {
        G::real(ratio(a, b))
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn quadric_form_examples() {
        let sig = Signature::plus(2, 2).unwrap();
        let one = quadric_form(&[r(1, 1), r(0, 1), r(0, 1), r(0, 1)], &sig).unwrap();
        assert_eq!(one, G::one());
        let v = quadric_form(&[r(5, 3), r(0, 1), r(4, 3), r(0, 1)], &sig).unwrap();
        assert_eq!(v, G::one());
        assert!(matches!(
            quadric_form(&[r(1, 1)], &sig),
            Err(Error::DimensionMismatch { expected: 4, found: 1 })
        ));
    }

    #[test]
    fn off_quadric_rejected() {
        let sig = Signature::plus(2, 2).unwrap();
        let one = r(1, 1);
        let err = QuadricPoint::new(vec![one.clone(), one.clone(), one.clone(), one], sig);
        assert!(matches!(err, Err(Error::OffQuadric { .. })));
    }

    #[test]
    fn signature_rules() {
        assert!(Signature::minus(1, 1).is_err());
        assert!(Signature::minus(1, 2).is_ok());
        assert!(Signature::plus(0, 2).is_err());
    }

    #[test]
    fn chart_examples() {
        let sig = Signature::minus(2, 2).unwrap();
        let x = from_hyperbolic(&HyperbolicCoords::new(vec![1.0, 0.0], vec![0.0, 1.0], 0.0), &sig).unwrap();
        assert_eq!(x.coords(), &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        let x = from_hyperbolic(&HyperbolicCoords::new(vec![1.0, 0.0], vec![1.0, 0.0], 0.0), &sig).unwrap();
        assert_eq!(x.coords(), &[c(0.0), c(0.0), c(1.0), c(0.0)]);

        let sig12 = Signature::minus(1, 2).unwrap();
        let x = from_hyperbolic(&HyperbolicCoords::new(vec![1.0], vec![1.0, 0.0], 2f64.ln()), &sig12).unwrap();
        let f = x.to_f64();
        assert!((f[0] - 0.75).abs() < 1e-15 && (f[1] - 1.25).abs() < 1e-15 && f[2] == 0.0);

        let back = to_hyperbolic(&x).unwrap();
        assert!((back.t - 2f64.ln()).abs() < 1e-12);
        assert!((back.r[0] - 1.0).abs() < 1e-12);
        assert!((back.s[0] - 1.0).abs() < 1e-12 && back.s[1].abs() < 1e-12);
    }

    #[test]
    fn degenerate_radial_returns_e1() {
        let sig = Signature::minus(2, 2).unwrap();
        let x = QuadricPoint::new(vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)], sig).unwrap();
        let h = to_hyperbolic(&x).unwrap();
        assert!(h.r_degenerate);
        assert_eq!(h.r, vec![1.0, 0.0]);
        assert_eq!(h.s, vec![0.0, 1.0]);
        assert_eq!(h.t, 0.0);
    }

    #[test]
    fn chart_rejects_non_unit() {
        let sig = Signature::minus(1, 2).unwrap();
        let h = HyperbolicCoords::new(vec![1.0], vec![1.0, 1.0], 0.3);
        assert!(matches!(from_hyperbolic(&h, &sig), Err(Error::NonUnitDirection(_))));
    }

    #[test]
    fn block_rotation_examples() {
        let sig = Signature::plus(2, 2).unwrap();
        let x = QuadricPoint::new(vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], sig).unwrap();
        let id = BlockRotation::identity(0);
        assert_eq!(apply_block_rotation(&x, &id).unwrap(), x);

        let quarter = BlockRotation::new([[r(0, 1), r(-1, 1)], [r(1, 1), r(0, 1)]], 0).unwrap();
        let y = apply_block_rotation(&x, &quarter).unwrap();
        assert_eq!(y.coords(), &[r(0, 1), r(5, 3), r(4, 3), r(0, 1)]);
        assert_eq!(quadric_form(y.coords(), &sig).unwrap(), G::one());

        // 3-4-5 rotation on the negative block.
        let neg = BlockRotation::new([[r(3, 5), r(-4, 5)], [r(4, 5), r(3, 5)]], 2).unwrap();
        let z = apply_block_rotation(&x, &neg).unwrap();
        assert_eq!(quadric_form(z.coords(), &sig).unwrap(), G::one());
        assert_eq!(z.coords()[2], r(4, 5));

        let straddle = BlockRotation::identity(1);
        assert!(matches!(
            apply_block_rotation(&x, &straddle),
            Err(Error::BlockStraddlesSignature { start: 1, end: 2, p: 2 })
        ));
        assert!(BlockRotation::new([[r(1, 1), r(1, 1)], [r(0, 1), r(1, 1)]], 0).is_err());
    }

    #[test]
    fn composition_matches_product() {
        let a = BlockRotation::new([[r(3, 5), r(-4, 5)], [r(4, 5), r(3, 5)]], 0).unwrap();
        let b = BlockRotation::new([[r(5, 13), r(-12, 13)], [r(12, 13), r(5, 13)]], 0).unwrap();
        let sig = Signature::plus(2, 2).unwrap();
        let x = QuadricPoint::new(vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], sig).unwrap();
        let two_step = apply_block_rotation(&apply_block_rotation(&x, &b).unwrap(), &a).unwrap();
        let one_step = apply_block_rotation(&x, &a.compose(&b).unwrap()).unwrap();
        assert_eq!(two_step, one_step);
    }

    #[test]
    fn swap_maps_plus_to_minus() {
        let sig = Signature::plus(2, 2).unwrap();
        let x = QuadricPoint::new(vec![r(5, 3), r(0, 1), r(4, 3), r(0, 1)], sig).unwrap();
        let y = x.swap();
        assert_eq!(y.signature().sign, QuadricSign::Minus);
        assert_eq!(quadric_form(y.coords(), &y.signature()).unwrap(), -G::one());
    }

    proptest! {
        #[test]
        fn chart_round_trip(
            p in 1usize..4, q in 2usize..4,
            rs in proptest::collection::vec(-1.0f64..1.0, 8),
            t in 0.01f64..4.0,
        ) {
            let sig = Signature::minus(p, q).unwrap();
            let mut r: Vec<f64> = rs[..p].to_vec();
            let mut s: Vec<f64> = rs[4..4 + q].to_vec();
            let (nr, ns) = (euclid_norm(&r), euclid_norm(&s));
            prop_assume!(nr > 1e-3 && ns > 1e-3);
            r.iter_mut().for_each(|v| *v /= nr);
            s.iter_mut().for_each(|v| *v /= ns);
            let h = HyperbolicCoords::new(r.clone(), s.clone(), t);
            let x = from_hyperbolic(&h, &sig).unwrap();
            let quad = quadric_form(x.coords(), &sig).unwrap();
            prop_assert!((quad.re + 1.0).abs() <= 1e-9 * (1.0 + x.to_f64().iter().map(|v| v * v).sum::<f64>()));
            let back = to_hyperbolic(&x).unwrap();
            prop_assert!((back.t - t).abs() <= 1e-12 * t.cosh());
            for (a, b) in back.r.iter().zip(&r) { prop_assert!((a - b).abs() <= 1e-12); }
            for (a, b) in back.s.iter().zip(&s) { prop_assert!((a - b).abs() <= 1e-12); }
            let again = from_hyperbolic(&back, &sig).unwrap();
            for (a, b) in again.to_f64().iter().zip(x.to_f64()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}
