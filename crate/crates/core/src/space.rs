//! Dissimilarity matrices, discrete probability measures, and the finite
//! metric measure spaces built from them.
//!
//! A metric measure space here is always a finite support with explicit point
//! masses. Continuous spaces (the circle, the sphere) enter through
//! refinement: build the space on `n` points and let `n` grow.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Relative tolerance for `|m_rs - m_sr|` in [`validate_dissimilarity`].
pub const DISSIMILARITY_SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance on the total mass of a [`DiscreteMeasure`].
pub const MEASURE_SUM_TOLERANCE: f64 = 1e-12;

/// Symmetric, nonnegative, hollow matrix of pairwise dissimilarities.
///
/// The triangle inequality is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix(DMatrix<f64>);

impl DissimilarityMatrix {
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.0[(r, s)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Largest entry; zero for the empty and single-point matrices.
    pub fn max_entry(&self) -> f64 {
        self.0.iter().cloned().fold(0.0, f64::max)
    }

    /// Sub-matrix on `indices`, repeats allowed.
    pub fn restrict(&self, indices: &[usize]) -> DissimilarityMatrix {
        let k = indices.len();
        DissimilarityMatrix(DMatrix::from_fn(k, k, |a, b| {
            self.0[(indices[a], indices[b])]
        }))
    }

    /// Rows as nested vectors.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|r| self.0.row(r).iter().copied().collect())
            .collect()
    }
}

/// Checks that `m` is a dissimilarity matrix and wraps it unchanged.
pub fn validate_dissimilarity(m: DMatrix<f64>) -> Result<DissimilarityMatrix> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    for r in 0..rows {
        for s in 0..cols {
            let x = m[(r, s)];
            if !x.is_finite() {
                return Err(Error::NonFinite { row: r, col: s });
            }
            if r == s {
                if x != 0.0 {
                    return Err(Error::NonzeroDiagonal(r));
                }
                continue;
            }
            if x < 0.0 {
                return Err(Error::NegativeEntry { row: r, col: s });
            }
            if s > r {
                let y = m[(s, r)];
                if (x - y).abs() > DISSIMILARITY_SYMMETRY_TOLERANCE * x.abs().max(1.0) {
                    return Err(Error::AsymmetricEntry { row: r, col: s });
                }
            }
        }
    }
    Ok(DissimilarityMatrix(m))
}

/// Probability weights over a finite support.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiscreteMeasure(Vec<f64>);

impl DiscreteMeasure {
    /// Validates nonnegativity and unit total mass.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure(format!("weight {i} is {w}")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MEASURE_SUM_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("total mass {total}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform measure needs a nonempty support");
        Self(vec![1.0 / n as f64; n])
    }

    /// Unit mass at `index`.
    pub fn point_mass(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Self(w)
    }

    /// `(1 - t) a + t b`.
    pub fn interpolate(a: &Self, b: &Self, t: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "interpolation parameter {t} outside [0, 1]"
            )));
        }
        Self::new(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (1.0 - t) * x + t * y)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn is_uniform(&self) -> bool {
        let first = self.0[0];
        self.0.iter().all(|&w| w == first)
    }

    /// Indices with strictly positive mass.
    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let weights = Vec::<f64>::deserialize(d)?;
        DiscreteMeasure::new(weights).map_err(serde::de::Error::custom)
    }
}

/// Half the L1 distance between two measures on the same support.
pub fn total_variation(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let l1: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).sum();
    Ok((0.5 * l1).min(1.0))
}

/// Finite metric measure space `(X, d, mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    labels: Vec<String>,
    dist: DissimilarityMatrix,
    measure: DiscreteMeasure,
}

impl MetricMeasureSpace {
    pub fn new(
        labels: Vec<String>,
        dist: DissimilarityMatrix,
        measure: DiscreteMeasure,
    ) -> Result<Self> {
        if dist.len() != measure.len() {
            return Err(Error::LengthMismatch {
                expected: dist.len(),
                got: measure.len(),
            });
        }
        if labels.len() != dist.len() {
            return Err(Error::LengthMismatch {
                expected: dist.len(),
                got: labels.len(),
            });
        }
        Ok(Self {
            labels,
            dist,
            measure,
        })
    }

    /// Space with index labels and the uniform measure.
    pub fn uniform(dist: DissimilarityMatrix) -> Self {
        let n = dist.len();
        Self {
            labels: (0..n).map(|i| i.to_string()).collect(),
            measure: DiscreteMeasure::uniform(n),
            dist,
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self) -> &DissimilarityMatrix {
        &self.dist
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    /// Same points and metric, different measure.
    pub fn with_measure(&self, measure: DiscreteMeasure) -> Result<Self> {
        Self::new(self.labels.clone(), self.dist.clone(), measure)
    }
}

/// Measure placed on a sampled circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleMeasure {
    Uniform,
    /// Mass `north_mass` spread evenly over angles in `[0, pi)`, the rest
    /// evenly over `[pi, 2 pi)`.
    Hemisphere {
        north_mass: f64,
    },
}

/// Angle of point `i` among `n` evenly spaced points.
pub fn circle_angle(i: usize, n: usize) -> f64 {
    2.0 * PI * i as f64 / n as f64
}

/// `n` evenly spaced points on the unit circle with arc-length distance.
///
/// Point `i` sits at angle `2 pi i / n`; the distance between points `i` and
/// `j` is `2 pi min(k, n - k) / n` with `k = |i - j|`, which is the shorter
/// arc and keeps the matrix exactly circulant.
pub fn build_circle_space(n: usize, measure: CircleMeasure) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::TooFewPoints { min: 2, got: n });
    }
    let step = 2.0 * PI / n as f64;
    let dist = DMatrix::from_fn(n, n, |i, j| {
        let k = i.abs_diff(j);
        step * k.min(n - k) as f64
    });
    let weights = match measure {
        CircleMeasure::Uniform => vec![1.0 / n as f64; n],
        CircleMeasure::Hemisphere { north_mass } => {
            if !(north_mass > 0.0 && north_mass < 1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "north mass {north_mass} outside (0, 1)"
                )));
            }
            // theta_i < pi  <=>  2i < n
            let north = n.div_ceil(2);
            let south = n - north;
            (0..n)
                .map(|i| {
                    if 2 * i < n {
                        north_mass / north as f64
                    } else {
                        (1.0 - north_mass) / south as f64
                    }
                })
                .collect()
        }
    };
    MetricMeasureSpace::new(
        (0..n).map(|i| i.to_string()).collect(),
        DissimilarityMatrix(dist),
        DiscreteMeasure::new(weights)?,
    )
}

/// `n` i.i.d. uniform points on the unit sphere `S^dim` in `R^(dim+1)`.
///
/// Each point is a normalized standard Gaussian vector drawn from
/// [`rng::seeded`].
pub fn sample_sphere_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::seeded(seed);
    (0..n)
        .map(|_| loop {
            let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Uniform sample of `S^dim` with the geodesic (great-circle) metric.
pub fn build_sphere_space(n: usize, dim: usize, seed: u64) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::TooFewPoints { min: 2, got: n });
    }
    if dim < 1 {
        return Err(Error::InvalidArgument(
            "sphere dimension must be >= 1".into(),
        ));
    }
    let points = sample_sphere_points(n, dim, seed);
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dot: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
            let d = dot.clamp(-1.0, 1.0).acos();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    MetricMeasureSpace::new(
        (0..n).map(|i| format!("p{i}")).collect(),
        DissimilarityMatrix(dist),
        DiscreteMeasure::uniform(n),
    )
}

/// Pairwise Euclidean distances of `coords` with uniform weights.
pub fn build_euclidean_space(coords: &[Vec<f64>]) -> Result<MetricMeasureSpace> {
    if coords.is_empty() {
        return Err(Error::TooFewPoints { min: 1, got: 0 });
    }
    let k = coords[0].len();
    if k == 0 {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: 1,
            got: 0,
        });
    }
    if let Some((index, p)) = coords.iter().enumerate().find(|(_, p)| p.len() != k) {
        return Err(Error::DimensionMismatch {
            index,
            expected: k,
            got: p.len(),
        });
    }
    let n = coords.len();
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    validate_dissimilarity(dist).map(MetricMeasureSpace::uniform)
}
