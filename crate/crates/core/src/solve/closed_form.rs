use crate::basis::BasisNode;
use crate::error::{Error, Result};
use crate::scalar::{int_power, Field};

use super::{check_nonsingular, check_shapes};

/// `e_0, …, e_k` of `values`, by the prefix recurrence
/// `e_m ← e_m + α·e_{m−1}`.
pub fn elementary_symmetric_all<T: Field>(values: &[T]) -> Vec<T> {
    let mut e = vec![T::zero(); values.len() + 1];
    e[0] = T::one();
    for (k, a) in values.iter().enumerate() {
        for m in (1..=k + 1).rev() {
            let next = e[m].clone() + a.clone() * e[m - 1].clone();
            e[m] = next;
        }
    }
    e
}

/// `e_m(values) = Σ_{|S| = m} Π_{j∈S} α_j`.
pub fn elementary_symmetric<T: Field>(values: &[T], m: usize) -> Result<T> {
    if m > values.len() {
        return Err(Error::IndexOutOfRange {
            index: m,
            max: values.len(),
        });
    }
    Ok(elementary_symmetric_all(values).swap_remove(m))
}

/// Lagrange form of the solution: with `k = ℓ_min`, `c_j = y_j/(d_j v_j^k)`,
///
/// `a_{k+m} = Σ_j c_j · (−1)^{n−1−m} e_{n−1−m}({v_i : i ≠ j}) / Π_{i≠j}(v_j − v_i)`.
///
/// The prefactor `1/(d_j v_j^k)` sits inside the sum, paired with `y_j`.
pub fn closed_form_coefficients<T: Field>(nodes: &[BasisNode<T>], values: &[T], ells: &[i64]) -> Result<Vec<T>> {
    check_shapes(nodes, values, ells)?;
    let n = nodes.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let k = ells[0];
    check_nonsingular(nodes, k)?;
    let mut coeffs = vec![T::zero(); n];
    for (j, nj) in nodes.iter().enumerate() {
        let others: Vec<T> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, ni)| ni.v.clone())
            .collect();
        let denom = others
            .iter()
            .fold(T::one(), |acc, vi| acc * (nj.v.clone() - vi.clone()));
        let c = values[j].clone().div(&(nj.d.clone() * int_power(&nj.v, k)? * denom))?;
        let e = elementary_symmetric_all(&others);
        for (m, a) in coeffs.iter_mut().enumerate() {
            let idx = n - 1 - m;
            let term = if idx.is_multiple_of(2) { e[idx].clone() } else { -e[idx].clone() };
            *a = a.clone() + c.clone() * term;
        }
    }
    Ok(coeffs)
}

/// Product form of `det(d_i v_i^{k+m})_{i,m}` with columns in ascending
/// order of `ℓ`: `Π_i d_i v_i^k · Π_{i<j}(v_j − v_i)`.
pub fn vandermonde_determinant<T: Field>(nodes: &[BasisNode<T>], ell_min: i64) -> Result<T> {
    let mut det = T::one();
    for n in nodes {
        det = det * n.d.clone() * int_power(&n.v, ell_min)?;
    }
    for j in 0..nodes.len() {
        for i in 0..j {
            det = det * (nodes[j].v.clone() - nodes[i].v.clone());
        }
    }
    Ok(det)
}
