//! MDS of metric measure spaces.
//!
//! On a finite space `(X, d, mu)` the integral operator
//! `[T φ](x) = ∫ K_B(x, s) φ(s) mu(ds)` is the matrix `K_B diag(mu)` acting
//! on the values of `φ` at the support points. Symmetrizing with
//! `diag(√mu)` gives an ordinary symmetric eigenproblem whose eigenvectors
//! `ψ` map back to `L²(mu)`-orthonormal eigenfunctions `φ = ψ / √mu`.
//!
//! The embedding is `f_m(x) = (√λ̂_1 φ_1(x), …, √λ̂_m φ_m(x))` with
//! `λ̂ = max(λ, 0)`. Under the uniform measure on `n` points the operator
//! eigenvalues are those of `B` divided by `n` and `f_m` coincides with the
//! classical embedding.
//!
//! Points with zero mass do not take part in the eigenproblem; their
//! eigenfunction values come from the Nyström formula
//! `φ(x) = λ⁻¹ ∫ K_B(x, s) φ(s) mu(ds)`.

use nalgebra::DMatrix;

use crate::classical::{
    center_rows, to_neg_half_square, weighted_double_center, CenteredGram,
    ZERO_EIGENVALUE_TOLERANCE,
};
use crate::eigen::symmetric_eigendecomposition;
use crate::error::{Error, Result};
use crate::space::{DiscreteMeasure, MetricMeasureSpace};

/// Symmetric kernel sampled on the support, `K(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix(DMatrix<f64>);

impl KernelMatrix {
    /// Wraps a square matrix symmetric within `1e-12`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        for r in 0..rows {
            for s in (r + 1)..rows {
                if (m[(r, s)] - m[(s, r)]).abs() > 1e-12 {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self(m))
    }

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
}

impl From<CenteredGram> for KernelMatrix {
    fn from(b: CenteredGram) -> Self {
        KernelMatrix(b.into_matrix())
    }
}

/// Eigenvalues and `L²(mu)`-orthonormal eigenfunctions of the operator
/// `T_{K_B}` on a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpectrum {
    /// All eigenvalues of the operator, descending. There is one per point of
    /// positive mass.
    pub eigenvalues: Vec<f64>,
    /// `n x k`: column `i` holds `φ_i` at every support point.
    pub eigenfunctions: DMatrix<f64>,
    pub measure: DiscreteMeasure,
}

impl OperatorSpectrum {
    pub fn n_points(&self) -> usize {
        self.eigenfunctions.nrows()
    }

    /// Number of eigenfunctions carried.
    pub fn n_functions(&self) -> usize {
        self.eigenfunctions.ncols()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, l| a.max(l.abs()))
    }

    /// Eigenvalues at or below this are treated as zero.
    pub fn zero_threshold(&self) -> f64 {
        ZERO_EIGENVALUE_TOLERANCE * self.spectral_radius()
    }

    /// Largest deviation of `Σ_j mu_j φ_i(x_j) φ_k(x_j)` from `δ_ik`.
    pub fn orthonormality_error(&self) -> f64 {
        let w = self.measure.weights();
        let k = self.n_functions();
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in a..k {
                let dot: f64 = (0..w.len())
                    .map(|j| w[j] * self.eigenfunctions[(j, a)] * self.eigenfunctions[(j, b)])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest `|Σ_j K(x_i, x_j) mu_j φ_k(x_j) - λ_k φ_k(x_i)| / max(1, |λ_k|)`
    /// over points and carried eigenfunctions.
    pub fn eigen_relation_error(&self, kb: &KernelMatrix) -> f64 {
        let w = self.measure.weights();
        let n = self.n_points();
        let mut worst = 0.0_f64;
        for k in 0..self.n_functions() {
            let l = self.eigenvalues[k];
            for i in 0..n {
                let applied: f64 = (0..n)
                    .map(|j| kb.0[(i, j)] * w[j] * self.eigenfunctions[(j, k)])
                    .sum();
                let r = (applied - l * self.eigenfunctions[(i, k)]).abs() / l.abs().max(1.0);
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// `K_A(x, s) = -d(x, s)² / 2` on the support.
pub fn kernel_ka(space: &MetricMeasureSpace) -> KernelMatrix {
    KernelMatrix(to_neg_half_square(space.dist()))
}

/// `K_B`: `K_A` doubly centered against `mu`.
pub fn kernel_kb(ka: &KernelMatrix, mu: &DiscreteMeasure) -> Result<KernelMatrix> {
    weighted_double_center(&ka.0, mu).map(KernelMatrix::from)
}

/// Solves the discretized eigenproblem of `T_{K_B}` on `L²(mu)`.
///
/// All eigenvalues are returned. Eigenfunctions are kept for the top `k`
/// (all when `None`); `k` may not exceed the number of points with positive
/// mass.
pub fn operator_spectrum(
    kb: &KernelMatrix,
    mu: &DiscreteMeasure,
    k: Option<usize>,
) -> Result<OperatorSpectrum> {
    let n = kb.len();
    if mu.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: mu.len(),
        });
    }
    let support = mu.positive_support();
    let p = support.len();
    let k = k.unwrap_or(p);
    if k > p {
        return Err(Error::ZeroWeightRequested {
            requested: k,
            available: p,
        });
    }
    let w = mu.weights();
    let root: Vec<f64> = support.iter().map(|&i| w[i].sqrt()).collect();
    let mut sym = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = root[a] * kb.0[(support[a], support[b])] * root[b];
            sym[(a, b)] = v;
            sym[(b, a)] = v;
        }
    }
    let decomposition = symmetric_eigendecomposition(&sym)?;

    let mut eigenfunctions = DMatrix::zeros(n, k);
    for i in 0..k {
        for (a, &x) in support.iter().enumerate() {
            eigenfunctions[(x, i)] = decomposition.eigenvectors[(a, i)] / root[a];
        }
    }
    let mut spectrum = OperatorSpectrum {
        eigenvalues: decomposition.eigenvalues,
        eigenfunctions,
        measure: mu.clone(),
    };

    if p < n {
        let threshold = spectrum.zero_threshold();
        for x in (0..n).filter(|&x| w[x] == 0.0) {
            for i in 0..k {
                let l = spectrum.eigenvalues[i];
                if l.abs() <= threshold {
                    continue;
                }
                let integral: f64 = support
                    .iter()
                    .map(|&s| kb.0[(x, s)] * w[s] * spectrum.eigenfunctions[(s, i)])
                    .sum();
                spectrum.eigenfunctions[(x, i)] = integral / l;
            }
        }
    }
    Ok(spectrum)
}

/// Clamps negative eigenvalues to zero; eigenfunctions are unchanged.
pub fn truncate_spectrum(s: &OperatorSpectrum) -> OperatorSpectrum {
    let mut out = s.clone();
    for l in &mut out.eigenvalues {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    out
}

/// `K_B̂(x, s) = Σ_{i<m} λ̂_i φ_i(x) φ_i(s)` with `λ̂ = max(λ, 0)`.
pub fn kernel_kb_hat(s: &OperatorSpectrum, m: usize) -> Result<KernelMatrix> {
    if m > s.n_functions() {
        return Err(Error::InvalidArgument(format!(
            "truncation order {m} exceeds {} eigenfunctions",
            s.n_functions()
        )));
    }
    let n = s.n_points();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..m {
        let l = s.eigenvalues[i].max(0.0);
        if l == 0.0 {
            continue;
        }
        let phi = s.eigenfunctions.column(i);
        for r in 0..n {
            for c in r..n {
                out[(r, c)] += l * phi[r] * phi[c];
            }
        }
    }
    for r in 0..n {
        for c in 0..r {
            out[(r, c)] = out[(c, r)];
        }
    }
    Ok(KernelMatrix(out))
}

/// Squared Hilbert–Schmidt norm of the part of `T_{K_B}` that an
/// `m`-dimensional embedding discards: `Σ λ_i²` over `i >= m` and over
/// negative `λ_i` with `i < m`.
pub fn operator_strain(s: &OperatorSpectrum, m: usize) -> f64 {
    s.eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, &l)| i >= m || l < 0.0)
        .map(|(_, l)| l * l)
        .sum()
}

/// `∫∫ (K(x, s) - K'(x, s))² mu(dx) mu(ds)`.
pub fn kernel_strain(k: &KernelMatrix, other: &KernelMatrix, mu: &DiscreteMeasure) -> Result<f64> {
    let n = k.len();
    if other.len() != n || mu.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if other.len() != n {
                other.len()
            } else {
                mu.len()
            },
        });
    }
    let w = mu.weights();
    let mut total = 0.0;
    for r in 0..n {
        if w[r] == 0.0 {
            continue;
        }
        for c in 0..n {
            let d = k.0[(r, c)] - other.0[(r, c)];
            total += w[r] * w[c] * d * d;
        }
    }
    Ok(total)
}

/// Kernel `⟨y_r - ȳ, y_s - ȳ⟩` of a configuration, centered at its
/// `mu`-weighted mean.
pub fn configuration_kernel(config: &DMatrix<f64>, mu: &DiscreteMeasure) -> Result<KernelMatrix> {
    let n = config.nrows();
    if mu.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: mu.len(),
        });
    }
    let w = mu.weights();
    let mut centered = config.clone();
    for c in 0..config.ncols() {
        let mean: f64 = (0..n).map(|r| w[r] * config[(r, c)]).sum();
        for r in 0..n {
            centered[(r, c)] -= mean;
        }
    }
    let g = &centered * centered.transpose();
    Ok(KernelMatrix((&g + g.transpose()) * 0.5))
}

/// Embedding of a metric measure space, with what is needed to place new
/// points.
#[derive(Debug, Clone)]
pub struct MeasureEmbedding {
    /// `n x m`; row `j` is `f_m(x_j)`.
    pub coords: DMatrix<f64>,
    /// `λ̂_1 … λ̂_m`; zero where the eigenvalue was not positive.
    pub truncated_eigenvalues: Vec<f64>,
    /// Set when fewer than `m` eigenvalues were positive.
    pub rank_deficient: bool,
    /// Untruncated spectrum of `T_{K_B}`.
    pub spectrum: OperatorSpectrum,
    /// The centered kernel the spectrum belongs to.
    pub kernel: KernelMatrix,
    extender: NystromExtender,
}

impl MeasureEmbedding {
    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    /// Coordinates of a point given its distances to every support point.
    pub fn extend(&self, distances_to_support: &[f64]) -> Result<NystromPoint> {
        self.extender
            .extend(&self.spectrum, distances_to_support, self.dim())
    }
}

/// MDS embedding of `space` into `R^m`.
pub fn measure_mds(space: &MetricMeasureSpace, m: usize) -> Result<MeasureEmbedding> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "target dimension must be >= 1".into(),
        ));
    }
    let mu = space.measure();
    let ka = kernel_ka(space);
    let kb = kernel_kb(&ka, mu)?;
    let available = mu.positive_support().len();
    let spectrum = operator_spectrum(&kb, mu, Some(m.min(available)))?;

    let n = space.len();
    let threshold = spectrum.zero_threshold();
    let mut coords = DMatrix::zeros(n, m);
    let mut truncated = Vec::with_capacity(m);
    let mut rank_deficient = false;
    for i in 0..m {
        match spectrum.eigenvalues.get(i) {
            Some(&l) if i < spectrum.n_functions() && l > threshold => {
                let scale = l.sqrt();
                for r in 0..n {
                    coords[(r, i)] = scale * spectrum.eigenfunctions[(r, i)];
                }
                truncated.push(l);
            }
            _ => {
                rank_deficient = true;
                truncated.push(0.0);
            }
        }
    }
    Ok(MeasureEmbedding {
        coords,
        truncated_eigenvalues: truncated,
        rank_deficient,
        extender: NystromExtender::new(&ka, mu),
        spectrum,
        kernel: kb,
    })
}

/// Out-of-sample coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromPoint {
    pub coords: Vec<f64>,
    /// Coordinates left at zero because their eigenvalue was not positive.
    pub zero_filled: Vec<usize>,
}

/// Precomputed `mu`-integrals of `K_A` for centering new kernel rows.
#[derive(Debug, Clone)]
pub struct NystromExtender {
    column_integrals: Vec<f64>,
    grand: f64,
    weights: Vec<f64>,
}

impl NystromExtender {
    pub fn new(ka: &KernelMatrix, mu: &DiscreteMeasure) -> Self {
        let n = ka.len();
        let w = mu.weights();
        let column_integrals: Vec<f64> = (0..n)
            .map(|s| (0..n).map(|x| w[x] * ka.0[(x, s)]).sum())
            .collect();
        let grand = (0..n).map(|s| w[s] * column_integrals[s]).sum();
        Self {
            column_integrals,
            grand,
            weights: w.to_vec(),
        }
    }

    /// `coord_i = λ̂_i^{-1/2} Σ_j mu_j k_B(x, x_j) φ_i(x_j)`, where `k_B(x, ·)`
    /// is the new kernel row centered exactly as the rows of `K_B` were.
    pub fn extend(
        &self,
        spectrum: &OperatorSpectrum,
        distances_to_support: &[f64],
        m: usize,
    ) -> Result<NystromPoint> {
        let n = self.weights.len();
        if distances_to_support.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: distances_to_support.len(),
            });
        }
        if m > spectrum.n_functions() {
            return Err(Error::InvalidArgument(format!(
                "requested {m} coordinates but only {} eigenfunctions are available",
                spectrum.n_functions()
            )));
        }
        let w = &self.weights;
        let ka: Vec<f64> = distances_to_support.iter().map(|d| -0.5 * d * d).collect();
        let row_integral: f64 = (0..n).map(|z| w[z] * ka[z]).sum();
        let kb: Vec<f64> = (0..n)
            .map(|s| ka[s] - self.column_integrals[s] - row_integral + self.grand)
            .collect();

        let threshold = spectrum.zero_threshold();
        let mut coords = vec![0.0; m];
        let mut zero_filled = Vec::new();
        for (i, c) in coords.iter_mut().enumerate() {
            let l = spectrum.eigenvalues[i];
            if l <= threshold {
                zero_filled.push(i);
                continue;
            }
            let integral: f64 = (0..n)
                .map(|j| w[j] * kb[j] * spectrum.eigenfunctions[(j, i)])
                .sum();
            *c = integral / l.sqrt();
        }
        Ok(NystromPoint {
            coords,
            zero_filled,
        })
    }
}

/// Subtracts the `mu`-weighted mean of each column.
pub fn center_weighted(config: &DMatrix<f64>, mu: &DiscreteMeasure) -> DMatrix<f64> {
    if mu.is_uniform() {
        return center_rows(config);
    }
    let w = mu.weights();
    let mut out = config.clone();
    for c in 0..config.ncols() {
        let mean: f64 = (0..config.nrows()).map(|r| w[r] * config[(r, c)]).sum();
        for r in 0..config.nrows() {
            out[(r, c)] -= mean;
        }
    }
    out
}
