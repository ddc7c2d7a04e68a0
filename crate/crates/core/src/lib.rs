//! Multidimensional scaling of finite and measure-weighted metric spaces.
//!
//! Classical MDS turns a dissimilarity matrix `D` into a point configuration
//! by centering `A = -D∘D/2` into `B = JAJ` and keeping the top eigenpairs.
//! This crate implements that pipeline and its generalization to metric
//! measure spaces `(X, d, mu)`, where the centering integrates against `mu`
//! and the eigenproblem is that of an integral operator on `L²(mu)`.
//!
//! - [`space`]: dissimilarity matrices, probability measures, and generators
//!   for circles, sphere samples and Euclidean point clouds.
//! - [`classical`]: double centering, classical MDS, strain and the
//!   Euclidean test.
//! - [`measure`]: weighted centering, the operator spectrum, the measure
//!   embedding and Nyström extension to new points.
//! - [`circle`]: the geodesic circle solved through discrete Fourier modes,
//!   and its limit curve.
//! - [`convergence`]: Procrustes alignment and perturbation, sampling and
//!   measure-sequence experiments.
//! - [`io`]: CSV matrices and JSON spaces.
//!
//! ```
//! use mmds::{classical_mds, validate_dissimilarity};
//! use nalgebra::DMatrix;
//!
//! // Three points on a line at 0, 3 and 4.
//! let d = validate_dissimilarity(DMatrix::from_row_slice(3, 3, &[
//!     0.0, 3.0, 4.0,
//!     3.0, 0.0, 1.0,
//!     4.0, 1.0, 0.0,
//! ]))?;
//! let x = classical_mds(&d, 1)?;
//! let gap = (x.coords[(0, 0)] - x.coords[(2, 0)]).abs();
//! assert!((gap - 4.0).abs() < 1e-12);
//! # Ok::<(), mmds::Error>(())
//! ```

pub mod circle;
pub mod classical;
pub mod convergence;
pub mod eigen;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod measure;
pub mod rng;
pub mod space;

pub use nalgebra;

pub use circle::{circle_mds_analytic, limit_curve_gamma, operator_eigenvalue_circle};
pub use classical::{
    classical_mds, classical_mds_full, double_center, is_euclidean, strain, weighted_double_center,
    CenteredGram, Embedding,
};
pub use convergence::{procrustes_align, AlignmentResult, ConvergenceReport};
pub use eigen::{symmetric_eigendecomposition, SpectralDecomposition};
pub use error::{Error, Result};
pub use measure::{measure_mds, operator_spectrum, MeasureEmbedding, OperatorSpectrum};
pub use space::{
    build_circle_space, build_euclidean_space, build_sphere_space, validate_dissimilarity,
    CircleMeasure, DiscreteMeasure, DissimilarityMatrix, MetricMeasureSpace,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/classical.md")]
    mod classical {}
    #[doc = include_str!("../../../book/src/measure.md")]
    mod measure {}
    #[doc = include_str!("../../../book/src/circle.md")]
    mod circle {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
