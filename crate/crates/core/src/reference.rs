//! The 4x4 worked example: genuine weights `[7/20, 1/4, 1/4, 3/20]`, and
//! the two matrices obtained by rounding `A(w)` onto the Saaty scale with
//! and without forced reciprocity.

use crate::matrix::{Pcm, Reciprocity};
use crate::vector::PriorityVector;

/// `w = [7/20, 1/4, 1/4, 3/20]`.
pub fn genuine_w() -> PriorityVector {
    PriorityVector::new(vec![7.0 / 20.0, 0.25, 0.25, 3.0 / 20.0]).expect("valid weights")
}

/// `R(x)`: upper triangle of `A(w)` rounded, lower triangle reciprocal.
pub fn r_x() -> Pcm {
    Pcm::new(
        vec![
            vec![1.0, 1.0, 1.0, 2.0],
            vec![1.0, 1.0, 1.0, 2.0],
            vec![1.0, 1.0, 1.0, 2.0],
            vec![0.5, 0.5, 0.5, 1.0],
        ],
        Reciprocity::Reciprocal,
    )
    .expect("valid matrix")
}

/// `A(x)`: every off-diagonal entry of `A(w)` rounded independently.
pub fn a_x() -> Pcm {
    Pcm::new(
        vec![
            vec![1.0, 1.0, 1.0, 2.0],
            vec![0.5, 1.0, 1.0, 2.0],
            vec![0.5, 1.0, 1.0, 2.0],
            vec![0.5, 0.5, 0.5, 1.0],
        ],
        Reciprocity::Arbitrary,
    )
    .expect("valid matrix")
}
