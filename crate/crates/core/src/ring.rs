//! Commutative rings, dense matrices over them, and univariate polynomials.
//!
//! Both [`FieldElement`](crate::field::FieldElement) and
//! [`GroupAlgebraElement`](crate::group_algebra::GroupAlgebraElement) carry
//! their coefficient field, so zero and one are produced from an existing
//! element rather than from a type-level constant.

use std::fmt;

/// A commutative ring with unity. Arithmetic on operands from different
/// coefficient fields panics.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Clone> Matrix<R> {
    /// Builds a matrix from its rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<R>>, cols: usize) -> Option<Self> {
        let nrows = rows.len();
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// The matrix `(a[row_idx[x], col_idx[y]])`; indices may repeat or
    /// appear out of order. Panics on out-of-range indices.
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        Matrix::from_fn(row_idx.len(), col_idx.len(), |x, y| {
            self.get(row_idx[x], col_idx[y]).clone()
        })
    }

    pub fn without_row(&self, i: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(&rows, &cols)
    }

    pub fn without_row_col(&self, i: usize, j: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.select(&rows, &cols)
    }

    /// `(A | v)`: appends a column on the right.
    pub fn with_column(&self, v: &[R]) -> Option<Self> {
        if v.len() != self.rows {
            return None;
        }
        Some(Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                v[i].clone()
            }
        }))
    }
}

impl<R: Ring> Matrix<R> {
    pub fn mul(&self, rhs: &Matrix<R>, zero: &R) -> Option<Matrix<R>> {
        if self.cols != rhs.rows {
            return None;
        }
        Some(Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(zero.clone(), |acc, k| {
                acc.add_ref(&self.get(i, k).mul_ref(rhs.get(k, j)))
            })
        }))
    }
}

/// Division-free determinant by Laplace expansion along rows, memoised over
/// the set of columns already used. Works over any commutative ring; cost is
/// `O(n 2^n)` ring operations, so it is meant for `n <= 20`. `one` supplies
/// the value of the empty determinant.
pub fn det_expansion<R: Ring>(m: &Matrix<R>, one: &R) -> Option<R> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    assert!(n < usize::BITS as usize, "matrix too large for subset expansion");
    let zero = one.zero_like();
    // partial[mask] = signed sum over ways of filling the first |mask| rows
    // with exactly the columns in mask.
    let mut partial: Vec<Option<R>> = vec![None; 1 << n];
    partial[0] = Some(one.clone());
    for mask in 0usize..(1 << n) {
        let Some(acc) = partial[mask].clone() else { continue };
        if acc.is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let entry = m.get(row, col);
            if entry.is_zero() {
                continue;
            }
            // sign: parity of used columns to the right of `col`
            let inversions = (mask >> col).count_ones();
            let mut term = acc.mul_ref(entry);
            if inversions % 2 == 1 {
                term = term.neg_ref();
            }
            let slot = &mut partial[mask | (1 << col)];
            *slot = Some(match slot.take() {
                Some(v) => v.add_ref(&term),
                None => term,
            });
        }
    }
    Some(partial[(1 << n) - 1].clone().unwrap_or(zero))
}

/// Dense univariate polynomial, little-endian coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Polynomial<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == c.one_like())
    }

    /// `(X - r_1)(X - r_2)...(X - r_k)`; `one` fixes the coefficient ring.
    pub fn from_roots(roots: &[R], one: &R) -> Self {
        let mut coeffs = vec![one.clone()];
        for r in roots {
            let mut next = vec![one.zero_like(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1].add_ref(c);
                next[i] = next[i].sub_ref(&c.mul_ref(r));
            }
            coeffs = next;
        }
        Polynomial::new(coeffs)
    }

    /// Horner evaluation; the zero polynomial evaluates to `x.zero_like()`.
    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(x.zero_like(), |acc, c| acc.mul_ref(x).add_ref(c))
    }
}
