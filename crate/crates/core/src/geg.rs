//! Vector families over finite fields and their Gaussian elimination
//! greedoids, plus two determinant identities used by the representation
//! proofs (a Plücker-type expansion and the monic Vandermonde determinant).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{ElementEncoding, FieldElement, FieldError, FieldSpec};
use crate::label::Label;
use crate::ring::{det_expansion, Matrix, Polynomial, Ring};
use crate::setsys::{SetSystem, MAX_ENUMERATION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GegError {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("{rows} rows but {columns} columns; a vector family needs rows >= columns")]
    TooFewRows { rows: usize, columns: usize },
    #[error("matrix has {got} columns but {expected} labels")]
    ColumnCount { expected: usize, got: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("declared {declared} rows but entries has {got}")]
    RowCount { declared: usize, got: usize },
    #[error("duplicate column label {0}")]
    DuplicateColumn(Label),
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("label {0} given twice")]
    RepeatedLabel(Label),
    #[error("{0} columns; at most {MAX_ENUMERATION} can be enumerated")]
    TooLarge(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("polynomial {index} has degree {got:?}, expected {expected}")]
    Degree {
        index: usize,
        expected: usize,
        got: Option<usize>,
    },
    #[error("polynomial {0} is not monic")]
    NotMonic(usize),
    #[error("entries belong to different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Columns `v_e` (one per label) of an `m x |E|` matrix over a finite field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    field: FieldSpec,
    labels: Vec<Label>,
    matrix: Matrix<FieldElement>,
}

/// JSON form: `{"field", "rows", "columns", "entries"}`, entries row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFamily {
    pub field: FieldSpec,
    pub rows: usize,
    pub columns: Vec<Label>,
    pub entries: Vec<Vec<ElementEncoding>>,
}

impl VectorFamily {
    pub fn new(field: FieldSpec, labels: Vec<Label>, matrix: Matrix<FieldElement>) -> Result<Self, GegError> {
        if matrix.cols() != labels.len() {
            return Err(GegError::ColumnCount {
                expected: labels.len(),
                got: matrix.cols(),
            });
        }
        if matrix.rows() < labels.len() {
            return Err(GegError::TooFewRows {
                rows: matrix.rows(),
                columns: labels.len(),
            });
        }
        let mut seen = BTreeSet::new();
        if let Some(l) = labels.iter().find(|l| !seen.insert(*l)) {
            return Err(GegError::DuplicateColumn(l.clone()));
        }
        for i in 0..matrix.rows() {
            if matrix.row(i).iter().any(|e| !e.spec().same_field(&field)) {
                return Err(GegError::FieldMismatch);
            }
        }
        Ok(VectorFamily { field, labels, matrix })
    }

    /// Builds a family from integer rows, reducing each entry into `field`.
    pub fn from_int_rows(field: &FieldSpec, labels: Vec<Label>, rows: &[Vec<i64>]) -> Result<Self, GegError> {
        let cols = labels.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(GegError::RowLength {
                    row,
                    len: r.len(),
                    expected: cols,
                });
            }
        }
        let m = Matrix::from_fn(rows.len(), cols, |i, j| field.from_int(rows[i][j]));
        Self::new(field.clone(), labels, m)
    }

    pub fn from_raw(raw: &RawFamily) -> Result<Self, GegError> {
        if raw.entries.len() != raw.rows {
            return Err(GegError::RowCount {
                declared: raw.rows,
                got: raw.entries.len(),
            });
        }
        let cols = raw.columns.len();
        let mut rows = Vec::with_capacity(raw.rows);
        for (row, r) in raw.entries.iter().enumerate() {
            if r.len() != cols {
                return Err(GegError::RowLength {
                    row,
                    len: r.len(),
                    expected: cols,
                });
            }
            rows.push(r.iter().map(|e| raw.field.decode(e)).collect::<Result<Vec<_>, _>>()?);
        }
        let m = Matrix::from_rows(rows, cols).expect("row lengths checked");
        Self::new(raw.field.clone(), raw.columns.clone(), m)
    }

    pub fn to_raw(&self) -> RawFamily {
        RawFamily {
            field: self.field.clone(),
            rows: self.matrix.rows(),
            columns: self.labels.clone(),
            entries: self
                .matrix
                .to_rows()
                .iter()
                .map(|r| r.iter().map(FieldElement::encoding).collect())
                .collect(),
        }
    }

    /// Header line of labels, then one line per row of element codes.
    pub fn to_csv(&self) -> String {
        let mut out = self.labels.iter().map(Label::key).collect::<Vec<_>>().join(",");
        out.push('\n');
        for i in 0..self.matrix.rows() {
            let line: Vec<String> = self.matrix.row(i).iter().map(|e| e.code().to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<FieldElement> {
        &self.matrix
    }

    pub fn column_index(&self, l: &Label) -> Result<usize, GegError> {
        self.labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| GegError::UnknownLabel(l.clone()))
    }

    /// The vector `v_e`.
    pub fn column(&self, l: &Label) -> Result<Vec<FieldElement>, GegError> {
        Ok(self.matrix.column(self.column_index(l)?))
    }

    /// Column indices of distinct labels, in the given order.
    pub fn column_indices(&self, set: &[Label]) -> Result<Vec<usize>, GegError> {
        let mut seen = BTreeSet::new();
        set.iter()
            .map(|l| {
                let j = self.column_index(l)?;
                if !seen.insert(j) {
                    return Err(GegError::RepeatedLabel(l.clone()));
                }
                Ok(j)
            })
            .collect()
    }

    /// `sub_{rows}^{cols} A` for 0-based row indices and column labels.
    pub fn submatrix(&self, rows: &[usize], cols: &[Label]) -> Result<Matrix<FieldElement>, GegError> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows()) {
            return Err(GegError::Dimension(format!("row {r} out of range")));
        }
        let cols: Vec<usize> = cols.iter().map(|l| self.column_index(l)).collect::<Result<_, _>>()?;
        Ok(self.matrix.select(rows, &cols))
    }

    fn codes(&self, rows: usize, cols: &[usize]) -> Vec<Vec<u64>> {
        (0..rows)
            .map(|i| cols.iter().map(|&j| self.matrix.get(i, j).code()).collect())
            .collect()
    }

    fn member_idx(&self, cols: &[usize]) -> bool {
        let k = cols.len();
        rank_codes(&self.field, self.codes(k, cols)) == k
    }
}

/// Rank of a matrix of element codes by Gaussian elimination.
pub(crate) fn rank_codes(spec: &FieldSpec, mut a: Vec<Vec<u64>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = spec.inv_code(a[rank][c]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            if a[r][c] == 0 {
                continue;
            }
            let f = spec.mul_codes(a[r][c], inv);
            for x in c..cols {
                let sub = spec.mul_codes(f, a[rank][x]);
                a[r][x] = spec.sub_codes(a[r][x], sub);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Determinant of a square code matrix by Gaussian elimination.
fn det_codes(spec: &FieldSpec, mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut det = 1;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if p != c {
            a.swap(c, p);
            det = spec.neg_code(det);
        }
        det = spec.mul_codes(det, a[c][c]);
        let inv = spec.inv_code(a[c][c]).expect("pivot is nonzero");
        for r in c + 1..n {
            if a[r][c] == 0 {
                continue;
            }
            let f = spec.mul_codes(a[r][c], inv);
            for x in c..n {
                let sub = spec.mul_codes(f, a[c][x]);
                a[r][x] = spec.sub_codes(a[r][x], sub);
            }
        }
    }
    det
}

/// Rank of a field matrix.
pub fn rank(m: &Matrix<FieldElement>, spec: &FieldSpec) -> usize {
    let codes = (0..m.rows())
        .map(|i| m.row(i).iter().map(FieldElement::code).collect())
        .collect();
    rank_codes(spec, codes)
}

/// Exact determinant by elimination; `spec` fixes the field of the empty
/// determinant.
pub fn det(m: &Matrix<FieldElement>, spec: &FieldSpec) -> Result<FieldElement, GegError> {
    if !m.is_square() {
        return Err(GegError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    for i in 0..m.rows() {
        if m.row(i).iter().any(|e| !e.spec().same_field(spec)) {
            return Err(GegError::FieldMismatch);
        }
    }
    let codes = (0..m.rows())
        .map(|i| m.row(i).iter().map(FieldElement::code).collect())
        .collect();
    Ok(spec.element(det_codes(spec, codes))?)
}

/// Whether `F` is in the Gaussian elimination greedoid: the columns of `F`
/// cut down to their first `|F|` entries are linearly independent.
pub fn geg_member(fam: &VectorFamily, set: &[Label]) -> Result<bool, GegError> {
    let cols = fam.column_indices(set)?;
    Ok(fam.member_idx(&cols))
}

/// Same predicate through `det(sub_{1..p}^{F} A) != 0`, columns in the
/// caller's order.
pub fn geg_member_det(fam: &VectorFamily, set: &[Label]) -> Result<bool, GegError> {
    let cols = fam.column_indices(set)?;
    let rows: Vec<usize> = (0..cols.len()).collect();
    Ok(!det(&fam.matrix.select(&rows, &cols), &fam.field)?.is_zero())
}

/// The whole greedoid, by testing every subset of the columns.
pub fn geg_enumerate(fam: &VectorFamily) -> Result<SetSystem, GegError> {
    let n = fam.labels.len();
    if n > MAX_ENUMERATION {
        return Err(GegError::TooLarge(n));
    }
    // SetSystem wants its ground sorted; map label order to column indices
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fam.labels[a].cmp(&fam.labels[b]));
    let ground: Vec<Label> = order.iter().map(|&j| fam.labels[j].clone()).collect();
    let members: Vec<u64> = (0u64..1 << n)
        .into_par_iter()
        .filter(|&mask| {
            let cols: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| order[b]).collect();
            fam.member_idx(&cols)
        })
        .collect();
    Ok(SetSystem::from_masks(&ground, members))
}

/// Checks `det(X without row i) det Y = sum_q (-1)^(n+q) det(X | Y_q)
/// det(Y without row i, column q)` for `X` of size `n x (n-1)`, `Y` of size
/// `n x n` and a 0-based row `i` (`q` is 1-based in the sign).
pub fn plucker_check<R: Ring>(x: &Matrix<R>, y: &Matrix<R>, i: usize, one: &R) -> Result<bool, GegError> {
    let n = y.rows();
    if !y.is_square() || n == 0 {
        return Err(GegError::Dimension(format!(
            "Y is {}x{}, need square n >= 1",
            y.rows(),
            y.cols()
        )));
    }
    if x.rows() != n || x.cols() + 1 != n {
        return Err(GegError::Dimension(format!(
            "X is {}x{}, need {}x{}",
            x.rows(),
            x.cols(),
            n,
            n - 1
        )));
    }
    if i >= n {
        return Err(GegError::Dimension(format!("row {i} out of range for n = {n}")));
    }
    let d = |m: &Matrix<R>| det_expansion(m, one).expect("square by construction");
    let lhs = d(&x.without_row(i)).mul_ref(&d(y));
    let mut rhs = one.zero_like();
    for q in 0..n {
        let xy = x.with_column(&y.column(q)).expect("same row count");
        let term = d(&xy).mul_ref(&d(&y.without_row_col(i, q)));
        // (-1)^(n + q + 1) with q 0-based
        rhs = if (n + q + 1) % 2 == 0 {
            rhs.add_ref(&term)
        } else {
            rhs.sub_ref(&term)
        };
    }
    Ok(lhs == rhs)
}

/// Checks `det(f_j(u_i)) = prod_{i > j} (u_i - u_j)` for monic `f_j` of
/// degree `j - 1`.
pub fn vandermonde_monic_check<R: Ring>(fs: &[Polynomial<R>], us: &[R], one: &R) -> Result<bool, GegError> {
    if fs.len() != us.len() {
        return Err(GegError::Dimension(format!(
            "{} polynomials but {} points",
            fs.len(),
            us.len()
        )));
    }
    for (j, f) in fs.iter().enumerate() {
        if f.degree() != Some(j) {
            return Err(GegError::Degree {
                index: j,
                expected: j,
                got: f.degree(),
            });
        }
        if !f.is_monic() {
            return Err(GegError::NotMonic(j));
        }
    }
    let m = us.len();
    let a = Matrix::from_fn(m, m, |i, j| fs[j].eval(&us[i]));
    let lhs = det_expansion(&a, one).expect("square");
    let mut rhs = one.clone();
    for i in 0..m {
        for j in 0..i {
            rhs = rhs.mul_ref(&us[i].sub_ref(&us[j]));
        }
    }
    Ok(lhs == rhs)
}
