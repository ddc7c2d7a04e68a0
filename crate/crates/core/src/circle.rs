//! Analytic MDS of the geodesic circle.
//!
//! For `n` evenly spaced points with arc-length distance, `A` and hence `B`
//! are circulant, so the discrete Fourier modes
//! `x_k = (1, w^k, w^{2k}, …, w^{(n-1)k})`, `w = e^{2πi/n}`, diagonalize
//! `B`. The eigenvalue of `x_k` is the dot product of the first row of `B`
//! with `x_k`. Modes `k` and `n - k` share an eigenvalue and split into the
//! real pair `cos kθ`, `sin kθ`.
//!
//! Odd modes have positive eigenvalues and even modes negative ones, so MDS
//! keeps the odd harmonics only. As `n → ∞` the embedding approaches
//!
//! ```text
//! γ(θ) = √2 (cos θ, sin θ, cos 3θ / 3, sin 3θ / 3, cos 5θ / 5, …)
//! ```
//!
//! which lies on the sphere of radius `π/2` in `ℓ²`, and the operator
//! eigenvalues approach `(-1)^{k+1} / k²`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::classical::{double_center, to_neg_half_square, Embedding, ZERO_EIGENVALUE_TOLERANCE};
use crate::error::{Error, Result};
use crate::space::{build_circle_space, circle_angle, CircleMeasure};

/// Tolerance on the shift structure checked by [`circle_b_first_row`].
pub const CIRCULANT_TOLERANCE: f64 = 1e-10;

/// A symmetric circulant matrix, stored by its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantMatrix {
    first_row: Vec<f64>,
}

impl CirculantMatrix {
    /// Requires `first_row[k] == first_row[n - k]` within `1e-12` relative to
    /// the largest entry.
    pub fn new(first_row: Vec<f64>) -> Result<Self> {
        let n = first_row.len();
        let scale = first_row.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        for k in 1..n {
            if (first_row[k] - first_row[n - k]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(Self { first_row })
    }

    /// Reads the first row of `m` and checks every other row is its cyclic
    /// shift within `tol`. The stored row averages entries `k` and `n - k`,
    /// so it is exactly symmetric.
    pub fn from_matrix(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        let mut first: Vec<f64> = m.row(0).iter().copied().collect();
        for r in 1..rows {
            for c in 0..cols {
                if (m[(r, c)] - first[(c + rows - r) % rows]).abs() > tol {
                    return Err(Error::NotCirculant { row: r, col: c });
                }
            }
        }
        for k in 1..rows.div_ceil(2) {
            let mean = 0.5 * (first[k] + first[rows - k]);
            first[k] = mean;
            first[rows - k] = mean;
        }
        Self::new(first)
    }

    pub fn len(&self) -> usize {
        self.first_row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_row.is_empty()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |r, c| self.first_row[(c + n - r) % n])
    }
}

/// Discrete Fourier mode `k` of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierMode {
    k: usize,
    n: usize,
}

impl FourierMode {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::ModeOutOfRange { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Frequency of the real pair the mode belongs to: `min(k, n - k)`.
    pub fn frequency(&self) -> usize {
        self.k.min(self.n - self.k)
    }

    pub fn is_odd(&self) -> bool {
        self.frequency() % 2 == 1
    }

    /// Entry `j` of `x_k`, `w^{jk}`.
    pub fn entry(&self, j: usize) -> Complex<f64> {
        let t = 2.0 * PI * ((j * self.k) % self.n) as f64 / self.n as f64;
        Complex::new(t.cos(), t.sin())
    }
}

/// `Σ_j first_row[j] w^{jk}`, the eigenvalue of mode `k`.
pub fn circulant_eigenvalue(c: &CirculantMatrix, k: usize) -> Result<Complex<f64>> {
    let mode = FourierMode::new(k, c.len())?;
    Ok(c.first_row
        .iter()
        .enumerate()
        .map(|(j, &r)| mode.entry(j) * r)
        .sum())
}

/// First row of the centered matrix `B` of the `n`-point circle.
pub fn circle_b_first_row(n: usize) -> Result<CirculantMatrix> {
    let space = build_circle_space(n, CircleMeasure::Uniform)?;
    let b = double_center(&to_neg_half_square(space.dist()))?;
    CirculantMatrix::from_matrix(b.as_matrix(), CIRCULANT_TOLERANCE)
}

/// Radial coefficient of one retained Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficient {
    /// Frequency `j`.
    pub j: usize,
    /// Eigenvalue of `B` for the mode.
    pub eigenvalue: f64,
    /// `a_{j,n} = √λ · √(2/n)` (`√λ · √(1/n)` for the alternating mode of
    /// even `n`).
    pub a: f64,
    /// `√2 / j`.
    pub limit: f64,
}

/// Circle embedding assembled from Fourier modes.
#[derive(Debug, Clone)]
pub struct CircleEmbedding {
    pub embedding: Embedding,
    /// Frequency behind each column; `0` for zero-filled columns.
    pub column_modes: Vec<usize>,
    /// `(j, λ_j)` for every frequency `0 ..= n/2`.
    pub mode_eigenvalues: Vec<(usize, f64)>,
    /// Every mode with positive eigenvalue, by decreasing eigenvalue.
    pub coefficients: Vec<ModeCoefficient>,
}

impl CircleEmbedding {
    pub fn coefficient(&self, j: usize) -> Option<&ModeCoefficient> {
        self.coefficients.iter().find(|c| c.j == j)
    }
}

/// MDS of the `n`-point circle into `R^m` without an eigensolver.
///
/// Each positive mode `j < n/2` contributes the columns
/// `a_{j,n} cos(jθ_i)` and `a_{j,n} sin(jθ_i)`; for even `n` the mode
/// `j = n/2` is the single real vector `(-1)^i`.
pub fn circle_mds_analytic(n: usize, m: usize) -> Result<CircleEmbedding> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "target dimension must be >= 1".into(),
        ));
    }
    let b = circle_b_first_row(n)?;
    let mut mode_eigenvalues = Vec::with_capacity(n / 2 + 1);
    for j in 0..=n / 2 {
        mode_eigenvalues.push((j, circulant_eigenvalue(&b, j)?.re));
    }
    let radius = mode_eigenvalues
        .iter()
        .fold(0.0_f64, |a, &(_, l)| a.max(l.abs()));
    let threshold = ZERO_EIGENVALUE_TOLERANCE * radius;
    let mut positive: Vec<(usize, f64)> = mode_eigenvalues
        .iter()
        .copied()
        .filter(|&(j, l)| j > 0 && l > threshold)
        .collect();
    positive.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let nf = n as f64;
    let coefficients: Vec<ModeCoefficient> = positive
        .iter()
        .map(|&(j, l)| {
            let norm = if 2 * j == n {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            ModeCoefficient {
                j,
                eigenvalue: l,
                a: l.sqrt() * norm,
                limit: SQRT_2 / j as f64,
            }
        })
        .collect();

    let mut coords = DMatrix::zeros(n, m);
    let mut retained = Vec::with_capacity(m);
    let mut column_modes = Vec::with_capacity(m);
    let mut col = 0;
    'modes: for c in &coefficients {
        let trig: &[fn(f64) -> f64] = if 2 * c.j == n {
            &[f64::cos]
        } else {
            &[f64::cos, f64::sin]
        };
        for f in trig {
            if col == m {
                break 'modes;
            }
            for i in 0..n {
                coords[(i, col)] = c.a * f(c.j as f64 * circle_angle(i, n));
            }
            retained.push(c.eigenvalue);
            column_modes.push(c.j);
            col += 1;
        }
    }
    let rank_deficient = col < m;
    retained.resize(m, 0.0);
    column_modes.resize(m, 0);
    Ok(CircleEmbedding {
        embedding: Embedding {
            coords,
            retained_eigenvalues: retained,
            rank_deficient,
        },
        column_modes,
        mode_eigenvalues,
        coefficients,
    })
}

/// `(-1)^{k+1} / k²`, the eigenvalue of `e^{ikθ}` for the continuous circle.
pub fn operator_eigenvalue_circle(k: i64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroMode);
    }
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    Ok(sign / (k as f64 * k as f64))
}

/// First `m` coordinates of `γ(θ)`.
pub fn limit_curve_gamma(theta: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|c| {
            let j = (2 * (c / 2) + 1) as f64;
            let t = j * theta;
            let trig = if c % 2 == 0 { t.cos() } else { t.sin() };
            SQRT_2 / j * trig
        })
        .collect()
}

/// `2 Σ_{k odd ≤ K} 1/k²`, the truncated `‖γ(θ)‖²`; tends to `π²/4`.
pub fn gamma_norm_squared_partial(k_max: usize) -> f64 {
    (1..=k_max)
        .rev()
        .filter(|k| k % 2 == 1)
        .map(|k| 2.0 / (k as f64 * k as f64))
        .sum()
}

fn check_cutoff(k_max: usize) -> Result<()> {
    if k_max < 2 {
        return Err(Error::BadCutoff(k_max));
    }
    Ok(())
}

fn fourier_sum(delta: f64, k_max: usize, odd: bool) -> f64 {
    let start = if odd { 1 } else { 2 };
    let mut ks: Vec<usize> = (start..=k_max).step_by(2).collect();
    ks.reverse();
    ks.into_iter()
        .map(|k| {
            let k = k as f64;
            4.0 * (1.0 - (k * delta).cos()) / (k * k)
        })
        .sum()
}

/// `‖γ(θ₁) - γ(θ₂)‖²` truncated at `K`: `4 Σ_{k odd ≤ K} (1 - cos kΔ)/k²`.
pub fn gamma_distance_squared_series(delta: f64, k_max: usize) -> Result<f64> {
    check_cutoff(k_max)?;
    Ok(fourier_sum(delta, k_max, true))
}

/// Even-mode correction `4 Σ_{k even ≤ K} (1 - cos kΔ)/k²`.
///
/// `Δ² = ‖γ(θ₁) - γ(θ₂)‖² - (even-mode series)`: the embedding overshoots
/// the squared geodesic distance by exactly the even harmonics MDS has to
/// drop. Truncating both series at `K` costs at most `8/K`.
pub fn geodesic_error_series(delta: f64, k_max: usize) -> Result<f64> {
    check_cutoff(k_max)?;
    Ok(fourier_sum(delta, k_max, false))
}

/// `8 / K`, the bound on the truncation error of the identity above.
pub fn fourier_tail_bound(k_max: usize) -> f64 {
    8.0 / k_max as f64
}
