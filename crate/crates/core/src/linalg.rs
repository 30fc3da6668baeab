//! Small dense matrices over a [`Field`].
//!
//! Exact mode eliminates with fraction-free (Bareiss) steps on rows scaled
//! to Gaussian integers; float mode uses partial pivoting by modulus.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::scalar::{Arithmetic, Field};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Row-major construction; `None` if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().map(Field::conj)
    }

    pub fn mul(&self, rhs: &Self) -> Option<Self> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
                }
                out[(i, j)] = acc;
            }
        }
        Some(out)
    }

    pub fn sub(&self, rhs: &Self) -> Option<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    /// Rectangular sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    /// Largest entrywise deviation from `rhs`, in modulus.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(0.0, f64::max)
    }

    /// Exact equality in exact mode, `tol`-closeness in float mode.
    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return false;
        }
        match T::ARITHMETIC {
            Arithmetic::Exact => self == rhs,
            Arithmetic::Float => self.max_abs_diff(rhs) <= tol,
        }
    }

    pub fn determinant(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        Some(match T::ARITHMETIC {
            Arithmetic::Exact => bareiss_determinant(self.clone()),
            Arithmetic::Float => pivoted_determinant(self.clone()),
        })
    }

    /// Inverse by elimination, `None` when singular or not square.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let id = Self::identity(n);
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<T> = (0..n).map(|i| id[(i, j)].clone()).collect();
            cols.push(solve(self, &e).ok()?);
        }
        let mut inv = Self::zeros(n, n);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a · x = b` for square `a`. On failure returns the column in which
/// no pivot was found.
pub fn solve<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, usize> {
    assert!(a.is_square() && a.rows() == b.len(), "solve: shape mismatch");
    match T::ARITHMETIC {
        Arithmetic::Exact => bareiss_solve(a, b),
        Arithmetic::Float => pivoted_solve(a, b),
    }
}

fn augmented<T: Field>(a: &Matrix<T>, b: &[T]) -> Vec<Vec<T>> {
    (0..a.rows())
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect()
}

fn bareiss_solve<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, usize> {
    let n = a.rows();
    let mut m = augmented(a, b);
    for row in m.iter_mut() {
        T::clear_denominators(row);
    }
    let mut prev = T::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero()).ok_or(k)?;
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v.div_exact(&prev);
            }
            m[i][k] = T::zero();
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // With `det` the last pivot, `det·x` is integral (Cramer), so the
    // substitution runs on integers and divides once per unknown.
    let det = m[n - 1][n - 1].clone();
    let mut num = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = det.clone() * m[i][n].clone();
        for j in i + 1..n {
            acc = acc - m[i][j].clone() * num[j].clone();
        }
        num[i] = acc.div_exact(&m[i][i]);
    }
    num.iter().map(|v| v.div(&det).map_err(|_| n - 1)).collect()
}

fn pivoted_solve<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, usize> {
    let n = a.rows();
    let mut m = augmented(a, b);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].modulus().total_cmp(&m[y][k].modulus()))
            .expect("nonempty range");
        if m[p][k].is_zero() {
            return Err(k);
        }
        m.swap(k, p);
        let piv_inv = m[k][k].inv().expect("nonzero pivot");
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone() * piv_inv.clone();
            for (a, b) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *a = a.clone() - factor.clone() * b.clone();
            }
        }
    }
    back_substitute(&m, n)
}

fn back_substitute<T: Field>(m: &[Vec<T>], n: usize) -> Result<Vec<T>, usize> {
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc - m[i][j].clone() * x[j].clone();
        }
        x[i] = acc.div(&m[i][i]).map_err(|_| i)?;
    }
    Ok(x)
}

fn bareiss_determinant<T: Field>(a: Matrix<T>) -> T {
    let n = a.rows();
    if n == 0 {
        return T::one();
    }
    let mut m: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut scale = T::one();
    for row in m.iter_mut() {
        scale = scale * T::clear_denominators(row);
    }
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return T::zero();
        };
        if p != k {
            m.swap(k, p);
            sign_flip = !sign_flip;
        }
        let prev_inv = prev.inv().expect("previous pivot is nonzero");
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v * prev_inv.clone();
            }
            m[i][k] = T::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone().div(&scale).expect("row scales are nonzero");
    if sign_flip {
        -det
    } else {
        det
    }
}

fn pivoted_determinant<T: Field>(a: Matrix<T>) -> T {
    let n = a.rows();
    let mut m: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut det = T::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].modulus().total_cmp(&m[y][k].modulus()))
            .expect("nonempty range");
        if m[p][k].is_zero() {
            return T::zero();
        }
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        det = det * m[k][k].clone();
        let piv_inv = m[k][k].inv().expect("nonzero pivot");
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone() * piv_inv.clone();
            for (a, b) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *a = a.clone() - factor.clone() * b.clone();
            }
        }
    }
    det
}

/// True when `I − Z*Z` is positive definite, i.e. the operator norm of `z`
/// is below 1. Decided by leading principal minors, so it is exact in exact
/// mode.
pub fn operator_norm_below_one<T: Field>(z: &Matrix<T>) -> bool {
    let gram = z.adjoint().mul(z).expect("Z*Z is square");
    let h = Matrix::identity(z.cols()).sub(&gram).expect("same shape");
    (1..=h.rows()).all(|k| {
        let minor = h.block(0, 0, k, k).determinant().expect("square");
        minor.cmp_real(&T::zero()) == std::cmp::Ordering::Greater
    })
}
