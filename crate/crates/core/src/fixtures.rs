//! Small worked triples and matrices used by tests, benchmarks and docs.

use crate::field::{FieldElement, FieldSpec};
use crate::label::labels;
use crate::ring::Matrix;
use crate::ultra::UltraTriple;

/// `E = {1,2,3}`, `w(e) = e`, all distances 1.
pub fn bhargava0() -> UltraTriple {
    UltraTriple::from_fn(labels(&[1, 2, 3]), |l| l.to_string().parse().unwrap(), |_, _| 1).expect("valid triple")
}

/// `E = {0,...,4}`, `w(e) = max(e,1)`, `d(e,f) = min(3, max(4-e, 4-f))`.
pub fn bhargava1() -> UltraTriple {
    let value = |l: &crate::label::Label| l.to_string().parse::<i64>().unwrap();
    UltraTriple::from_fn(
        labels(&[0, 1, 2, 3, 4]),
        |e| value(e).max(1),
        |e, f| 3.min((4 - value(e)).max(4 - value(f))),
    )
    .expect("valid triple")
}

/// A 6 x 5 integer matrix with columns labelled 1..5, reduced into `spec`.
pub fn matrix2(spec: &FieldSpec) -> Matrix<FieldElement> {
    const ROWS: [[i64; 5]; 6] = [
        [0, 1, 1, 0, 1],
        [1, 1, 0, 0, 0],
        [0, 2, 1, 0, 1],
        [1, 0, 1, 0, 0],
        [0, 0, 0, 0, 0],
        [1, 2, 0, 2, 1],
    ];
    Matrix::from_fn(6, 5, |i, j| spec.from_int(ROWS[i][j]))
}
