//! Classical (Torgerson–Gower) multidimensional scaling.
//!
//! The pipeline is `D -> A = -D∘D/2 -> B = J A J -> B = Γ Λ Γᵀ ->
//! X = Γ_m Λ_m^{1/2}`. `B` is the Gram matrix of the centered configuration
//! when `D` is Euclidean, and `D` is Euclidean exactly when `B` is positive
//! semi-definite. For non-Euclidean input the classical solution is still the
//! configuration that minimizes the strain `‖B - B̂‖_F²` among all
//! `m`-dimensional configurations.

use nalgebra::DMatrix;

use crate::eigen::{symmetric_eigendecomposition, SpectralDecomposition, SYMMETRY_TOLERANCE};
use crate::error::{Error, Result};
use crate::space::{DiscreteMeasure, DissimilarityMatrix};

/// Eigenvalues at or below this fraction of the spectral radius are treated
/// as zero when extracting coordinates.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Default PSD tolerance of [`is_euclidean`], relative to the spectral radius.
pub const EUCLIDEAN_TOLERANCE: f64 = 1e-9;

/// Doubly centered symmetric matrix; `B` in the classical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredGram(DMatrix<f64>);

impl CenteredGram {
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// Point configuration produced by classical MDS.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// `n x m`; row `i` is point `i`.
    pub coords: DMatrix<f64>,
    /// The `m` eigenvalues behind the columns, clamped at zero.
    pub retained_eigenvalues: Vec<f64>,
    /// Set when fewer than `m` eigenvalues were positive; the surplus
    /// columns are zero.
    pub rank_deficient: bool,
}

impl Embedding {
    pub fn n_points(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }
}

/// Classical solution together with the spectrum it came from.
#[derive(Debug, Clone)]
pub struct ClassicalSolution {
    pub embedding: Embedding,
    pub spectrum: SpectralDecomposition,
}

/// Entrywise `-d^2 / 2`.
pub fn to_neg_half_square(d: &DissimilarityMatrix) -> DMatrix<f64> {
    neg_half_square_raw(d.as_matrix())
}

/// [`to_neg_half_square`] without any validation of the input.
pub fn neg_half_square_raw(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|x| -0.5 * x * x)
}

/// `(M + Mᵀ) / 2`.
pub fn symmetric_part(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    Ok((m + m.transpose()) * 0.5)
}

fn check_square_symmetric(a: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    for r in 0..rows {
        for s in (r + 1)..rows {
            let x = a[(r, s)];
            if (x - a[(s, r)]).abs() > SYMMETRY_TOLERANCE * x.abs().max(1.0) {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(rows)
}

/// Double mean-centering:
/// `b_rs = a_rs - mean_s(a_r·) - mean_r(a_·s) + mean(a)`.
pub fn double_center(a: &DMatrix<f64>) -> Result<CenteredGram> {
    let n = check_square_symmetric(a)?;
    if n == 0 {
        return Ok(CenteredGram(DMatrix::zeros(0, 0)));
    }
    let inv = 1.0 / n as f64;
    let row_means: Vec<f64> = (0..n).map(|r| a.row(r).sum() * inv).collect();
    let col_means: Vec<f64> = (0..n).map(|s| a.column(s).sum() * inv).collect();
    let grand = a.sum() * inv * inv;
    let mut b = DMatrix::zeros(n, n);
    for r in 0..n {
        for s in r..n {
            let v = a[(r, s)] - row_means[r] - col_means[s] + grand;
            b[(r, s)] = v;
            b[(s, r)] = v;
        }
    }
    Ok(CenteredGram(b))
}

/// Double centering against a probability measure: the row, column and grand
/// means of [`double_center`] become `mu`-weighted integrals. With uniform
/// weights this is ordinary double centering.
///
/// Weighted row sums of the result vanish: `Σ_s mu_s b_rs = 0` for every `r`.
pub fn weighted_double_center(a: &DMatrix<f64>, mu: &DiscreteMeasure) -> Result<CenteredGram> {
    let n = check_square_symmetric(a)?;
    if mu.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: mu.len(),
        });
    }
    let w = mu.weights();
    // ∫ K(x, z) mu(dz) for each x, and ∫ K(w, s) mu(dw) for each s
    let row_int: Vec<f64> = (0..n)
        .map(|r| (0..n).map(|z| w[z] * a[(r, z)]).sum())
        .collect();
    let col_int: Vec<f64> = (0..n)
        .map(|s| (0..n).map(|x| w[x] * a[(x, s)]).sum())
        .collect();
    let grand: f64 = (0..n).map(|x| w[x] * row_int[x]).sum();
    let mut b = DMatrix::zeros(n, n);
    for r in 0..n {
        for s in r..n {
            let v = a[(r, s)] - col_int[s] - row_int[r] + grand;
            b[(r, s)] = v;
            b[(s, r)] = v;
        }
    }
    Ok(CenteredGram(b))
}

/// Coordinates from the top `m` eigenpairs of `b`.
pub fn embed_gram(b: &CenteredGram, m: usize) -> Result<ClassicalSolution> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "target dimension must be >= 1".into(),
        ));
    }
    let spectrum = symmetric_eigendecomposition(b.as_matrix())?;
    let embedding = coordinates_from_spectrum(&spectrum, m);
    Ok(ClassicalSolution {
        embedding,
        spectrum,
    })
}

pub(crate) fn coordinates_from_spectrum(spectrum: &SpectralDecomposition, m: usize) -> Embedding {
    let n = spectrum.len();
    let threshold = ZERO_EIGENVALUE_TOLERANCE * spectrum.spectral_radius();
    let mut coords = DMatrix::zeros(n, m);
    let mut retained = Vec::with_capacity(m);
    let mut rank_deficient = false;
    for i in 0..m {
        match spectrum.eigenvalues.get(i) {
            Some(&l) if l > threshold => {
                let scale = l.sqrt();
                for r in 0..n {
                    coords[(r, i)] = scale * spectrum.eigenvectors[(r, i)];
                }
                retained.push(l);
            }
            _ => {
                rank_deficient = true;
                retained.push(0.0);
            }
        }
    }
    Embedding {
        coords,
        retained_eigenvalues: retained,
        rank_deficient,
    }
}

/// Classical MDS of `d` into `R^m`.
pub fn classical_mds(d: &DissimilarityMatrix, m: usize) -> Result<Embedding> {
    classical_mds_full(d, m).map(|s| s.embedding)
}

/// Like [`classical_mds`], keeping the spectrum of `B`.
pub fn classical_mds_full(d: &DissimilarityMatrix, m: usize) -> Result<ClassicalSolution> {
    let b = double_center(&to_neg_half_square(d))?;
    embed_gram(&b, m)
}

/// Centered Gram matrix `Xc Xcᵀ` of a configuration.
pub fn configuration_gram(config: &DMatrix<f64>) -> DMatrix<f64> {
    let centered = center_rows(config);
    &centered * centered.transpose()
}

/// Subtracts the column means.
pub fn center_rows(config: &DMatrix<f64>) -> DMatrix<f64> {
    let n = config.nrows();
    let mut out = config.clone();
    if n == 0 {
        return out;
    }
    for c in 0..config.ncols() {
        let mean = config.column(c).sum() / n as f64;
        for r in 0..n {
            out[(r, c)] -= mean;
        }
    }
    out
}

/// `tr((B - B̂)²)` where `B̂` is the centered Gram matrix of `config`.
pub fn strain(b: &CenteredGram, config: &DMatrix<f64>) -> Result<f64> {
    if config.nrows() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: (b.len(), config.ncols()),
            got: config.shape(),
        });
    }
    let hat = configuration_gram(config);
    Ok((b.as_matrix() - hat).iter().map(|x| x * x).sum())
}

/// Outcome of the positive semi-definiteness test on `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanTest {
    pub euclidean: bool,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
}

impl EuclideanTest {
    /// PSD test on an already computed spectrum of `B`. `tol` defaults to
    /// [`EUCLIDEAN_TOLERANCE`] times the spectral radius.
    pub fn from_spectrum(spectrum: &SpectralDecomposition, tol: Option<f64>) -> Self {
        let tolerance = tol.unwrap_or(EUCLIDEAN_TOLERANCE * spectrum.spectral_radius());
        let min_eigenvalue = spectrum.min_eigenvalue().unwrap_or(0.0);
        Self {
            euclidean: min_eigenvalue >= -tolerance,
            min_eigenvalue,
            tolerance,
        }
    }
}

/// `d` is Euclidean iff its doubly centered `B` is positive semi-definite.
pub fn is_euclidean(d: &DissimilarityMatrix, tol: Option<f64>) -> Result<EuclideanTest> {
    if let Some(t) = tol {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be >= 0, got {t}"
            )));
        }
    }
    let b = double_center(&to_neg_half_square(d))?;
    let spectrum = symmetric_eigendecomposition(b.as_matrix())?;
    Ok(EuclideanTest::from_spectrum(&spectrum, tol))
}

/// Pairwise Euclidean distances between the rows of `coords`.
pub fn embedding_distances(coords: &DMatrix<f64>) -> DissimilarityMatrix {
    let n = coords.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (coords.row(i) - coords.row(j)).norm();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    crate::space::validate_dissimilarity(d).expect("row distances are a dissimilarity")
}
