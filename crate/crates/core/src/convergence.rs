//! Stability and convergence experiments.
//!
//! MDS coordinates are only defined up to translation and an orthogonal
//! transformation, so every comparison between two embeddings first removes
//! that freedom with [`procrustes_align`]. Embeddings of different point sets
//! are compared on a common set: sampled points are support points, so the
//! limit embedding evaluated there is just the corresponding rows.

use nalgebra::{DMatrix, RowDVector, SVD};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circle::circle_mds_analytic;
use crate::classical::{center_rows, classical_mds_full};
use crate::error::{Error, Result};
use crate::measure::measure_mds;
use crate::rng::{self, Rng};
use crate::space::{
    total_variation, validate_dissimilarity, DiscreteMeasure, DissimilarityMatrix,
    MetricMeasureSpace,
};

/// Optimal rigid registration of one configuration onto another.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// `m x m` orthogonal matrix `Q`.
    pub rotation: DMatrix<f64>,
    /// Row vector `t` with `Y ≈ X Q + t`.
    pub translation: RowDVector<f64>,
    /// `‖Xc Q - Yc‖_F / √n`.
    pub residual: f64,
}

impl AlignmentResult {
    /// `X Q + t`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x * &self.rotation;
        for mut row in out.row_iter_mut() {
            row += &self.translation;
        }
        out
    }

    /// `‖QᵀQ - I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let m = self.rotation.ncols();
        (self.rotation.transpose() * &self.rotation - DMatrix::<f64>::identity(m, m)).norm()
    }
}

fn column_means(x: &DMatrix<f64>) -> RowDVector<f64> {
    let n = x.nrows().max(1) as f64;
    RowDVector::from_fn(x.ncols(), |_, c| x.column(c).sum() / n)
}

/// Orthogonal Procrustes: the `Q` (reflections allowed) and `t` minimizing
/// `‖X Q + t - Y‖_F`.
///
/// `Q = U Vᵀ` from the singular value decomposition `Xcᵀ Yc = U Σ Vᵀ`.
pub fn procrustes_align(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<AlignmentResult> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.shape(),
            got: y.shape(),
        });
    }
    let (n, m) = x.shape();
    if n == 0 {
        return Err(Error::TooFewPoints { min: 1, got: 0 });
    }
    let xc = center_rows(x);
    let yc = center_rows(y);
    let rotation = if xc == yc {
        DMatrix::identity(m, m)
    } else {
        let svd = SVD::new(xc.transpose() * &yc, true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        u * v_t
    };
    let residual = (&xc * &rotation - &yc).norm() / (n as f64).sqrt();
    let translation = column_means(y) - column_means(x) * &rotation;
    Ok(AlignmentResult {
        rotation,
        translation,
        residual,
    })
}

/// Symmetric noise in `[-1, 1]` with zero diagonal, drawn row by row over
/// the upper triangle.
fn noise_matrix(n: usize, rng: &mut Rng) -> DMatrix<f64> {
    let mut u = DMatrix::zeros(n, n);
    for r in 0..n {
        for s in (r + 1)..n {
            let v: f64 = rng.random_range(-1.0..=1.0);
            u[(r, s)] = v;
            u[(s, r)] = v;
        }
    }
    u
}

fn apply_noise(
    d: &DissimilarityMatrix,
    noise: &DMatrix<f64>,
    eps: f64,
) -> Result<DissimilarityMatrix> {
    let base = d.as_matrix();
    let out = DMatrix::from_fn(base.nrows(), base.ncols(), |r, s| {
        (base[(r, s)] + eps * noise[(r, s)]).max(0.0)
    });
    validate_dissimilarity(out)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "perturbation magnitude must be finite and >= 0, got {eps}"
        )));
    }
    Ok(())
}

/// Adds independent uniform noise in `[-eps, eps]` to each pair, clamped at
/// zero.
pub fn perturb_dissimilarities(
    d: &DissimilarityMatrix,
    eps: f64,
    seed: u64,
) -> Result<DissimilarityMatrix> {
    check_eps(eps)?;
    let noise = noise_matrix(d.len(), &mut rng::seeded(seed));
    apply_noise(d, &noise, eps)
}

/// Perturbation statistics for one noise magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub eps: f64,
    /// Mean over trials of the mean `|λ_i - λ'_i|` over the top `m`.
    pub eigenvalue_drift: f64,
    /// Mean over trials of the aligned residual to the unperturbed embedding.
    pub residual: f64,
    pub trial_drifts: Vec<f64>,
    pub trial_residuals: Vec<f64>,
}

/// Perturbs `d` at each magnitude in `eps_list`, re-embeds, and measures how
/// far the spectrum and the aligned configuration move.
///
/// Trial `t` draws one noise pattern from stream `(seed, t)` and scales it by
/// every `eps`, so rows differ only in magnitude.
pub fn sibson_stability(
    d: &DissimilarityMatrix,
    m: usize,
    eps_list: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<StabilityRow>> {
    if eps_list.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument(
            "need at least one magnitude and one trial".into(),
        ));
    }
    for &eps in eps_list {
        check_eps(eps)?;
    }
    let base = classical_mds_full(d, m)?;
    let top = |s: &[f64]| s.iter().copied().take(m).collect::<Vec<f64>>();
    let base_top = top(&base.spectrum.eigenvalues);
    let noises: Vec<DMatrix<f64>> = (0..trials)
        .map(|t| noise_matrix(d.len(), &mut rng::trial_stream(seed, t as u64)))
        .collect();

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut drifts = Vec::with_capacity(trials);
        let mut residuals = Vec::with_capacity(trials);
        for noise in &noises {
            let perturbed = apply_noise(d, noise, eps)?;
            let sol = classical_mds_full(&perturbed, m)?;
            let drift = top(&sol.spectrum.eigenvalues)
                .iter()
                .zip(&base_top)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                / base_top.len().max(1) as f64;
            let residual =
                procrustes_align(&sol.embedding.coords, &base.embedding.coords)?.residual;
            drifts.push(drift);
            residuals.push(residual);
        }
        rows.push(StabilityRow {
            eps,
            eigenvalue_drift: mean(&drifts),
            residual: mean(&residuals),
            trial_drifts: drifts,
            trial_residuals: residuals,
        });
    }
    Ok(rows)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Median; the mean of the middle pair for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// An i.i.d. sample with the support index of every draw.
#[derive(Debug, Clone)]
pub struct Sample {
    pub space: MetricMeasureSpace,
    pub indices: Vec<usize>,
}

/// Draws `n` points i.i.d. from the space's measure, with replacement, and
/// gives each draw mass `1/n`.
pub fn sample_iid(space: &MetricMeasureSpace, n: usize, seed: u64) -> Result<Sample> {
    sample_iid_with(space, n, &mut rng::seeded(seed))
}

/// [`sample_iid`] drawing from a caller-supplied stream.
pub fn sample_iid_with(space: &MetricMeasureSpace, n: usize, rng: &mut Rng) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let dist = WeightedIndex::new(space.measure().weights())
        .map_err(|e| Error::InvalidMeasure(e.to_string()))?;
    let indices: Vec<usize> = (0..n).map(|_| dist.sample(rng)).collect();
    let labels = indices.iter().map(|&i| space.labels()[i].clone()).collect();
    let sampled = MetricMeasureSpace::new(
        labels,
        space.dist().restrict(&indices),
        DiscreteMeasure::uniform(n),
    )?;
    Ok(Sample {
        space: sampled,
        indices,
    })
}

/// Empirical measure of `indices` on a support of size `n`.
pub fn empirical_measure(indices: &[usize], n: usize) -> Result<DiscreteMeasure> {
    let mut w = vec![0.0; n];
    let unit = 1.0 / indices.len() as f64;
    for &i in indices {
        if i >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: i + 1,
            });
        }
        w[i] += unit;
    }
    DiscreteMeasure::new(w)
}

/// One row of a [`ConvergenceReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    /// Sample size, for sampling experiments.
    pub n: Option<usize>,
    pub tv_distance: f64,
    pub aligned_residual: f64,
    /// `|λ_i - λ_i^limit|` for the top `m` operator eigenvalues.
    pub eigenvalue_gaps: Vec<f64>,
    /// Per-seed residuals behind a median, in seed order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seed_residuals: Vec<f64>,
}

/// Stage-by-stage record of a convergence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub description: String,
    /// Reserved for experiments that also vary the metric.
    pub metric_label: Option<String>,
    pub m: usize,
    pub seeds: Vec<u64>,
    pub stages: Vec<Stage>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per stage: label, n, tv_distance, aligned_residual, then one
    /// `gap_i` column per eigenvalue.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "label".to_string(),
            "n".into(),
            "tv_distance".into(),
            "aligned_residual".into(),
        ];
        header.extend((1..=self.m).map(|i| format!("gap_{i}")));
        w.write_record(&header).map_err(csv_error)?;
        for s in &self.stages {
            let mut rec = vec![
                s.label.clone(),
                s.n.map(|n| n.to_string()).unwrap_or_default(),
                format!("{:?}", s.tv_distance),
                format!("{:?}", s.aligned_residual),
            ];
            rec.extend(s.eigenvalue_gaps.iter().map(|g| format!("{g:?}")));
            rec.resize(header.len(), String::new());
            w.write_record(&rec).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn gaps(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .collect()
}

/// Embeds `(X, d, mu_k)` for each measure and compares with the last one,
/// which is taken as the limit.
pub fn measure_sequence_experiment(
    space: &MetricMeasureSpace,
    measures: &[DiscreteMeasure],
    m: usize,
) -> Result<ConvergenceReport> {
    let limit_measure = measures
        .last()
        .ok_or_else(|| Error::InvalidArgument("measure sequence is empty".into()))?;
    for mu in measures {
        if mu.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: mu.len(),
            });
        }
    }
    let limit = measure_mds(&space.with_measure(limit_measure.clone())?, m)?;
    let mut stages = Vec::with_capacity(measures.len());
    for (k, mu) in measures.iter().enumerate() {
        let e = measure_mds(&space.with_measure(mu.clone())?, m)?;
        let residual = procrustes_align(&e.coords, &limit.coords)?.residual;
        stages.push(Stage {
            label: format!("stage {k}"),
            n: None,
            tv_distance: total_variation(mu, limit_measure)?,
            aligned_residual: residual,
            eigenvalue_gaps: gaps(&e.spectrum.eigenvalues, &limit.spectrum.eigenvalues, m),
            seed_residuals: Vec::new(),
        });
    }
    Ok(ConvergenceReport {
        description: format!("measure sequence on {} points", space.len()),
        metric_label: None,
        m,
        seeds: Vec::new(),
        stages,
    })
}

/// Embedding of the full space that samples are compared against.
#[derive(Debug, Clone)]
pub struct LimitEmbedding {
    /// `n x m`, one row per support point.
    pub coords: DMatrix<f64>,
    /// Top `m` operator eigenvalues.
    pub eigenvalues: Vec<f64>,
}

impl LimitEmbedding {
    pub fn from_measure_mds(space: &MetricMeasureSpace, m: usize) -> Result<Self> {
        let e = measure_mds(space, m)?;
        Ok(Self {
            eigenvalues: e.spectrum.eigenvalues.iter().copied().take(m).collect(),
            coords: e.coords,
        })
    }

    /// Closed-form limit for the uniform `n`-point circle. Under the uniform
    /// measure the operator eigenvalues are those of `B` divided by `n` and
    /// the coordinates equal the classical ones.
    pub fn uniform_circle(n: usize, m: usize) -> Result<Self> {
        let c = circle_mds_analytic(n, m)?;
        Ok(Self {
            eigenvalues: c
                .embedding
                .retained_eigenvalues
                .iter()
                .map(|l| l / n as f64)
                .collect(),
            coords: c.embedding.coords,
        })
    }
}

/// Samples each size i.i.d. once per seed, embeds the sample, and records the
/// median aligned residual against the limit embedding at the sampled points.
pub fn sampling_convergence_experiment(
    space: &MetricMeasureSpace,
    sizes: &[usize],
    m: usize,
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    let limit = LimitEmbedding::from_measure_mds(space, m)?;
    sampling_convergence_against(space, &limit, sizes, m, seeds)
}

/// [`sampling_convergence_experiment`] with a precomputed limit.
///
/// The sample for size index `s` and seed `seed` comes from stream
/// `(seed, s)`.
pub fn sampling_convergence_against(
    space: &MetricMeasureSpace,
    limit: &LimitEmbedding,
    sizes: &[usize],
    m: usize,
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sample sizes must be increasing".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    if limit.coords.shape() != (space.len(), m) {
        return Err(Error::ShapeMismatch {
            expected: (space.len(), m),
            got: limit.coords.shape(),
        });
    }
    let mut stages = Vec::with_capacity(sizes.len());
    for (s, &size) in sizes.iter().enumerate() {
        let mut residuals = Vec::with_capacity(seeds.len());
        let mut tvs = Vec::with_capacity(seeds.len());
        let mut gap_rows = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let sample = sample_iid_with(space, size, &mut rng::trial_stream(seed, s as u64))?;
            let e = measure_mds(&sample.space, m)?;
            let target = limit.coords.select_rows(&sample.indices);
            residuals.push(procrustes_align(&e.coords, &target)?.residual);
            tvs.push(total_variation(
                &empirical_measure(&sample.indices, space.len())?,
                space.measure(),
            )?);
            gap_rows.push(gaps(&e.spectrum.eigenvalues, &limit.eigenvalues, m));
        }
        stages.push(Stage {
            label: format!("n={size}"),
            n: Some(size),
            tv_distance: median(&tvs),
            aligned_residual: median(&residuals),
            eigenvalue_gaps: (0..m)
                .map(|i| median(&gap_rows.iter().map(|g| g[i]).collect::<Vec<_>>()))
                .collect(),
            seed_residuals: residuals,
        });
    }
    Ok(ConvergenceReport {
        description: format!("i.i.d. sampling from {} support points", space.len()),
        metric_label: None,
        m,
        seeds: seeds.to_vec(),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_circle_space, build_euclidean_space, CircleMeasure};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn random_orthogonal(m: usize, seed: u64) -> DMatrix<f64> {
        let mut r = rng::seeded(seed);
        let a = DMatrix::from_fn(m, m, |_, _| r.random_range(-1.0..1.0));
        a.qr().q()
    }

    #[test]
    fn procrustes_removes_exact_gauge() {
        let mut r = rng::seeded(4);
        let x = DMatrix::from_fn(12, 3, |_, _| r.random_range(-2.0..2.0));
        let q = random_orthogonal(3, 9);
        let mut y = &x * &q;
        for mut row in y.row_iter_mut() {
            row += RowDVector::from_row_slice(&[0.5, -1.0, 3.0]);
        }
        let a = procrustes_align(&x, &y).unwrap();
        assert!(a.residual <= 1e-8);
        assert!(a.orthogonality_error() <= 1e-8);
        assert!((a.apply(&x) - &y).abs().max() < 1e-10);

        let same = procrustes_align(&x, &x).unwrap();
        assert_eq!(same.rotation, DMatrix::identity(3, 3));
        assert_eq!(same.residual, 0.0);
    }

    #[test]
    fn procrustes_does_not_absorb_scale() {
        let x = DMatrix::from_row_slice(4, 2, &[0., 0., 1., 0., 1., 1., 0., 1.]);
        let y = &x * 2.0;
        let a = procrustes_align(&x, &y).unwrap();
        // brute force over rotations and reflections of the plane
        let xc = center_rows(&x);
        let yc = center_rows(&y);
        let mut best = f64::INFINITY;
        for i in 0..20_000 {
            let t = 2.0 * PI * i as f64 / 20_000.0;
            for flip in [1.0, -1.0] {
                let q = DMatrix::from_row_slice(
                    2,
                    2,
                    &[t.cos(), flip * t.sin(), -t.sin(), flip * t.cos()],
                );
                best = best.min((&xc * q - &yc).norm() / 2.0);
            }
        }
        assert!(a.residual > 0.0);
        assert!((a.residual - best).abs() < 1e-6);
        assert!(a.residual <= best + 1e-12);
    }

    #[test]
    fn procrustes_shape_mismatch() {
        let x = DMatrix::zeros(3, 2);
        let y = DMatrix::zeros(3, 3);
        assert!(matches!(
            procrustes_align(&x, &y),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn perturbation_rules() {
        let d = crate::fixtures::four_point_dissimilarity();
        assert_eq!(perturb_dissimilarities(&d, 0.0, 5).unwrap(), d);
        let p = perturb_dissimilarities(&d, 0.01, 5).unwrap();
        assert_ne!(p, d);
        assert!((p.as_matrix() - d.as_matrix()).abs().max() <= 0.01);

        let near =
            validate_dissimilarity(DMatrix::from_row_slice(2, 2, &[0.0, 1e-6, 1e-6, 0.0])).unwrap();
        let hits = (0..50)
            .filter(|&s| perturb_dissimilarities(&near, 10.0, s).unwrap().get(0, 1) == 0.0)
            .count();
        assert!(hits > 10);
        assert!(perturb_dissimilarities(&d, -1.0, 0).is_err());
    }

    #[test]
    fn stability_baseline_and_trend() {
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64, (i * i % 7) as f64, (3 * i % 5) as f64 * 0.5])
            .collect();
        let d = build_euclidean_space(&pts).unwrap().dist().clone();
        let rows = sibson_stability(&d, 2, &[0.0, 1e-3, 2e-3, 4e-3, 8e-3], 6, 1).unwrap();
        assert_eq!(rows[0].eigenvalue_drift, 0.0);
        assert_eq!(rows[0].residual, 0.0);
        for w in rows[1..].windows(2) {
            assert!(w[0].residual < w[1].residual);
        }
        assert!(sibson_stability(&d, 2, &[], 1, 0).is_err());
    }

    #[test]
    fn stability_with_repeated_top_eigenvalue() {
        let s = build_circle_space(12, CircleMeasure::Uniform).unwrap();
        let rows = sibson_stability(s.dist(), 2, &[1e-4], 4, 2).unwrap();
        assert!(rows[0].eigenvalue_drift < 1e-2);
        assert!(rows[0].residual < 1e-2);
    }

    #[test]
    fn sampling_examples() {
        let s = build_circle_space(16, CircleMeasure::Uniform).unwrap();
        let one = sample_iid(&s, 1, 0).unwrap();
        assert_eq!(one.space.len(), 1);
        assert_eq!(one.space.measure().weights(), &[1.0]);

        let pm = s.with_measure(DiscreteMeasure::point_mass(16, 5)).unwrap();
        let draws = sample_iid(&pm, 40, 1).unwrap();
        assert!(draws.indices.iter().all(|&i| i == 5));

        let big = build_circle_space(2048, CircleMeasure::Uniform).unwrap();
        let sample = sample_iid(&big, 500, 3).unwrap();
        for q in 0..4 {
            let count = sample
                .indices
                .iter()
                .filter(|&&i| i * 4 / 2048 == q)
                .count();
            assert!((count as f64 / 500.0 - 0.25).abs() <= 0.1);
        }
        assert!(sample_iid(&s, 0, 0).is_err());
    }

    #[test]
    fn constant_measure_sequence_is_flat() {
        let s = build_circle_space(30, CircleMeasure::Hemisphere { north_mass: 0.7 }).unwrap();
        let mu = s.measure().clone();
        let r = measure_sequence_experiment(&s, &[mu.clone(), mu.clone(), mu], 2).unwrap();
        for st in &r.stages {
            assert!(st.aligned_residual <= 1e-8);
            assert_eq!(st.tv_distance, 0.0);
            assert!(st.eigenvalue_gaps.iter().all(|&g| g <= 1e-10));
        }
    }

    #[test]
    fn interpolated_sequence_tv_decreases() {
        let s = build_circle_space(40, CircleMeasure::Uniform).unwrap();
        let start = DiscreteMeasure::point_mass(40, 0);
        let end = DiscreteMeasure::uniform(40);
        let measures: Vec<DiscreteMeasure> = [0.0, 0.3, 0.6, 0.9, 1.0]
            .iter()
            .map(|&t| DiscreteMeasure::interpolate(&start, &end, t).unwrap())
            .collect();
        let r = measure_sequence_experiment(&s, &measures, 2).unwrap();
        for w in r.stages.windows(2) {
            assert!(w[1].tv_distance < w[0].tv_distance);
        }
        assert!(measure_sequence_experiment(&s, &[DiscreteMeasure::uniform(3)], 2).is_err());
    }

    #[test]
    fn full_support_sample_matches_limit() {
        // A one-point space: every sample is the whole support.
        let s = MetricMeasureSpace::uniform(validate_dissimilarity(DMatrix::zeros(1, 1)).unwrap());
        let r = sampling_convergence_experiment(&s, &[1], 1, &[0, 1]).unwrap();
        assert!(r.stages[0].aligned_residual <= 1e-8);
    }

    #[test]
    fn sampling_report_shape() {
        let s = build_circle_space(64, CircleMeasure::Uniform).unwrap();
        let r = sampling_convergence_experiment(&s, &[8, 16], 1, &[1, 2, 3]).unwrap();
        assert_eq!(r.stages.len(), 2);
        for st in &r.stages {
            assert!(st.aligned_residual.is_finite() && st.aligned_residual >= 0.0);
            assert!((0.0..=1.0).contains(&st.tv_distance));
            assert_eq!(st.eigenvalue_gaps.len(), 1);
            assert_eq!(st.seed_residuals.len(), 3);
        }
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("label,n,tv_distance,aligned_residual,gap_1\n"));
        assert_eq!(csv.lines().count(), 3);
        let back: ConvergenceReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(sampling_convergence_experiment(&s, &[16, 8], 1, &[1]).is_err());
    }

    #[test]
    fn circle_limit_matches_measure_limit() {
        let s = build_circle_space(24, CircleMeasure::Uniform).unwrap();
        let a = LimitEmbedding::uniform_circle(24, 2).unwrap();
        let b = LimitEmbedding::from_measure_mds(&s, 2).unwrap();
        assert!(procrustes_align(&a.coords, &b.coords).unwrap().residual < 1e-10);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    proptest! {
        #[test]
        fn residual_is_gauge_invariant(seed in 0u64..500, m in 1usize..4) {
            let mut r = rng::seeded(seed);
            let x = DMatrix::from_fn(9, m, |_, _| r.random_range(-1.0..1.0));
            let y = DMatrix::from_fn(9, m, |_, _| r.random_range(-1.0..1.0));
            let q = random_orthogonal(m, seed + 1);
            let a = procrustes_align(&x, &y).unwrap().residual;
            let b = procrustes_align(&(&x * &q), &y).unwrap().residual;
            prop_assert!((a - b).abs() < 1e-10);
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn perturbation_stays_valid(seed in 0u64..1000, eps in 0.0f64..0.5) {
            let s = build_circle_space(9, CircleMeasure::Uniform).unwrap();
            let p = perturb_dissimilarities(s.dist(), eps, seed).unwrap();
            for r in 0..9 {
                prop_assert_eq!(p.get(r, r), 0.0);
                for c in 0..9 {
                    prop_assert_eq!(p.get(r, c), p.get(c, r));
                    prop_assert!((p.get(r, c) - s.dist().get(r, c)).abs() <= eps + 1e-15);
                }
            }
        }
    }
}
