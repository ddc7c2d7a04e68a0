//! Small reference inputs used by the tests, the guide, and the CLI.
//!
//! The four-point example comes in two forms. The literal form has row
//! `x3 = (0, 2, 2, 1)`, which is neither symmetric nor hollow, so it is not a
//! dissimilarity matrix; its reference centered matrix and spectrum are
//! reproduced by centering the symmetric part of `-D∘D/2`. The symmetric form
//! sets `d(x3, x1) = 2`, which is the configuration described in words (three
//! mutually equidistant points plus a fourth at distance 1 from each), and is
//! the one that passes [`validate_dissimilarity`](crate::space::validate_dissimilarity).

use nalgebra::DMatrix;

use crate::space::{validate_dissimilarity, DissimilarityMatrix};

/// The literal four-point matrix (row 3 is `(0, 2, 2, 1)`).
pub fn four_point_printed_d() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0., 2., 2., 1., //
            2., 0., 2., 1., //
            0., 2., 2., 1., //
            1., 1., 1., 0.,
        ],
    )
}

/// `-1/2` times the entrywise square of [`four_point_printed_d`].
pub fn four_point_printed_a() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0., 4., 4., 1., //
            4., 0., 4., 1., //
            0., 4., 4., 1., //
            1., 1., 1., 0.,
        ],
    ) * -0.5
}

/// Reference centered matrix of the four-point example.
pub fn four_point_printed_b() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            13., -15., 5., -3., //
            -15., 21., -7., 1., //
            5., -7., -3., 5., //
            -3., 1., 5., -3.,
        ],
    ) / 16.0
}

/// The four-point example made symmetric and hollow.
pub fn four_point_dissimilarity() -> DissimilarityMatrix {
    validate_dissimilarity(DMatrix::from_row_slice(
        4,
        4,
        &[
            0., 2., 2., 1., //
            2., 0., 2., 1., //
            2., 2., 0., 1., //
            1., 1., 1., 0.,
        ],
    ))
    .expect("symmetric four-point example is valid")
}
