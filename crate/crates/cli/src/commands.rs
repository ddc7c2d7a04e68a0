use std::fs;
use std::path::{Path, PathBuf};

use mmds::circle::{circle_mds_analytic, ModeCoefficient};
use mmds::classical::{
    double_center, embed_gram, neg_half_square_raw, strain, symmetric_part, to_neg_half_square,
    CenteredGram, EuclideanTest,
};
use mmds::convergence::{perturb_dissimilarities, sibson_stability, StabilityRow};
use mmds::io::{matrix_csv_string, read_matrix_csv_path, read_space_json_path};
use mmds::measure::{
    configuration_kernel, kernel_ka, kernel_kb, kernel_strain, measure_mds, operator_spectrum,
    operator_strain,
};
use mmds::nalgebra::DMatrix;
use mmds::{
    build_circle_space, classical_mds, operator_eigenvalue_circle, procrustes_align,
    symmetric_eigendecomposition, validate_dissimilarity, CircleMeasure, DissimilarityMatrix,
    Error, MetricMeasureSpace,
};
use serde::Serialize;

use crate::scenario::Scenario;
use crate::svg;
use crate::{Format, InputArgs};

/// What an input file turned into.
pub enum Input {
    Matrix {
        dist: DissimilarityMatrix,
        labels: Option<Vec<String>>,
    },
    /// A square matrix that failed validation, centered through the
    /// symmetric part of `-d²/2`.
    Raw {
        b: CenteredGram,
        labels: Option<Vec<String>>,
    },
    Space(MetricMeasureSpace),
}

const RAW_WARNING: &str =
    "input is not a dissimilarity matrix; centered the symmetric part of -d^2/2";

/// Prefixes I/O errors with the file they concern.
fn at_path(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    }
}

pub fn load(args: &InputArgs) -> Result<Input, Error> {
    if let Some(path) = &args.space {
        return read_space_json_path(path)
            .map(Input::Space)
            .map_err(at_path(path));
    }
    let path = args
        .input
        .as_ref()
        .expect("clap requires --input or --space");
    let csv = read_matrix_csv_path(path).map_err(at_path(path))?;
    if csv.matrix.nrows() == 0 {
        return Err(Error::TooFewPoints { min: 1, got: 0 });
    }
    if args.raw {
        let (rows, cols) = csv.matrix.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        let a = symmetric_part(&neg_half_square_raw(&csv.matrix))?;
        return Ok(Input::Raw {
            b: double_center(&a)?,
            labels: csv.header,
        });
    }
    Ok(Input::Matrix {
        dist: validate_dissimilarity(csv.matrix)?,
        labels: csv.header,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents)
        .map_err(Error::Io)
        .map_err(at_path(path))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn coords_json(coords: &DMatrix<f64>) -> Result<String, Error> {
    let rows: Vec<Vec<f64>> = coords
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    to_json(&rows)
}

fn scatter_points(coords: &DMatrix<f64>) -> Vec<(f64, f64)> {
    coords
        .row_iter()
        .map(|r| (r[0], if r.len() > 1 { r[1] } else { 0.0 }))
        .collect()
}

#[derive(Serialize)]
struct EmbedSidecar {
    method: &'static str,
    n: usize,
    m: usize,
    eigenvalues: Vec<f64>,
    retained_eigenvalues: Vec<f64>,
    strain: f64,
    euclidean: bool,
    min_eigenvalue: f64,
    tolerance: f64,
    warnings: Vec<String>,
}

struct Solved {
    coords: DMatrix<f64>,
    labels: Option<Vec<String>>,
    sidecar: EmbedSidecar,
}

fn spectrum_test(eigenvalues: &[f64], tol: Option<f64>) -> (bool, f64, f64) {
    let radius = eigenvalues.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
    let tolerance = tol.unwrap_or(mmds::classical::EUCLIDEAN_TOLERANCE * radius);
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let min = if min.is_finite() { min } else { 0.0 };
    (min >= -tolerance, min, tolerance)
}

fn embed_classical(
    b: &CenteredGram,
    m: usize,
    tol: Option<f64>,
    labels: Option<Vec<String>>,
    mut warnings: Vec<String>,
) -> Result<Solved, Error> {
    let sol = embed_gram(b, m)?;
    let test = EuclideanTest::from_spectrum(&sol.spectrum, tol);
    let coords = sol.embedding.coords;
    if sol.embedding.rank_deficient {
        let k = sol
            .embedding
            .retained_eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .count();
        warnings.push(format!(
            "only {k} of {m} eigenvalues are positive; the remaining coordinates are zero"
        ));
    }
    if !test.euclidean {
        warnings.push("B has negative eigenvalues; the dissimilarities are not Euclidean".into());
    }
    Ok(Solved {
        sidecar: EmbedSidecar {
            method: "classical",
            n: b.len(),
            m,
            strain: strain(b, &coords)?,
            eigenvalues: sol.spectrum.eigenvalues,
            retained_eigenvalues: sol.embedding.retained_eigenvalues,
            euclidean: test.euclidean,
            min_eigenvalue: test.min_eigenvalue,
            tolerance: test.tolerance,
            warnings,
        },
        coords,
        labels,
    })
}

fn solve(input: Input, m: usize, tol: Option<f64>) -> Result<Solved, Error> {
    match input {
        Input::Matrix { dist, labels } => {
            let b = double_center(&to_neg_half_square(&dist))?;
            embed_classical(&b, m, tol, labels, Vec::new())
        }
        Input::Raw { b, labels } => embed_classical(&b, m, tol, labels, vec![RAW_WARNING.into()]),
        Input::Space(space) => {
            let e = measure_mds(&space, m)?;
            let (euclidean, min_eigenvalue, tolerance) =
                spectrum_test(&e.spectrum.eigenvalues, tol);
            let mut warnings = Vec::new();
            if e.rank_deficient {
                let k = e.truncated_eigenvalues.iter().filter(|&&l| l > 0.0).count();
                warnings.push(format!(
                    "only {k} of {m} eigenvalues are positive; the remaining coordinates are zero"
                ));
            }
            if !euclidean {
                warnings.push(
                    "the operator has negative eigenvalues; the space is not Euclidean".into(),
                );
            }
            Ok(Solved {
                sidecar: EmbedSidecar {
                    method: "measure",
                    n: space.len(),
                    m,
                    strain: operator_strain(&e.spectrum, m),
                    eigenvalues: e.spectrum.eigenvalues.clone(),
                    retained_eigenvalues: e.truncated_eigenvalues.clone(),
                    euclidean,
                    min_eigenvalue,
                    tolerance,
                    warnings,
                },
                coords: e.coords,
                labels: Some(space.labels().to_vec()),
            })
        }
    }
}

pub fn embed(
    input: &InputArgs,
    m: usize,
    tol: Option<f64>,
    prefix: &Path,
    format: Format,
    plot: bool,
) -> Result<(), Error> {
    let solved = solve(load(input)?, m, tol)?;
    match format {
        Format::Csv => write(
            &with_suffix(prefix, ".csv"),
            &matrix_csv_string(&solved.coords, None),
        )?,
        Format::Json => write(
            &with_suffix(prefix, ".coords.json"),
            &coords_json(&solved.coords)?,
        )?,
    }
    write(&with_suffix(prefix, ".json"), &to_json(&solved.sidecar)?)?;
    if plot {
        let title = format!("{} MDS embedding", solved.sidecar.method);
        let svg = svg::scatter(
            &title,
            &scatter_points(&solved.coords),
            solved.labels.as_deref(),
        );
        write(&with_suffix(prefix, ".svg"), &svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EuclideanReport {
    euclidean: bool,
    min_eigenvalue: f64,
    tolerance: f64,
    eigenvalues: Vec<f64>,
}

pub fn euclidean_test(input: &InputArgs, tol: Option<f64>) -> Result<String, Error> {
    if let Some(t) = tol {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be >= 0, got {t}"
            )));
        }
    }
    let eigenvalues = match load(input)? {
        Input::Matrix { dist, .. } => {
            let b = double_center(&to_neg_half_square(&dist))?;
            symmetric_eigendecomposition(b.as_matrix())?.eigenvalues
        }
        Input::Raw { b, .. } => symmetric_eigendecomposition(b.as_matrix())?.eigenvalues,
        Input::Space(space) => {
            let kb = kernel_kb(&kernel_ka(&space), space.measure())?;
            operator_spectrum(&kb, space.measure(), Some(0))?.eigenvalues
        }
    };
    let (euclidean, min_eigenvalue, tolerance) = spectrum_test(&eigenvalues, tol);
    to_json(&EuclideanReport {
        euclidean,
        min_eigenvalue,
        tolerance,
        eigenvalues,
    })
}

#[derive(Serialize)]
struct StrainReport {
    method: &'static str,
    m: usize,
    strain: f64,
    configuration: Option<String>,
}

pub fn strain_cmd(input: &InputArgs, m: usize, config: Option<&Path>) -> Result<String, Error> {
    let given = match config {
        Some(p) => Some(read_matrix_csv_path(p).map_err(at_path(p))?.matrix),
        None => None,
    };
    let dim = given.as_ref().map_or(m, |x| x.ncols());
    let (method, value) = match load(input)? {
        Input::Space(space) => {
            let kb = kernel_kb(&kernel_ka(&space), space.measure())?;
            match &given {
                Some(x) => {
                    let k = configuration_kernel(x, space.measure())?;
                    ("measure", kernel_strain(&kb, &k, space.measure())?)
                }
                None => (
                    "measure",
                    operator_strain(&measure_mds(&space, m)?.spectrum, m),
                ),
            }
        }
        other => {
            let b = match other {
                Input::Matrix { dist, .. } => double_center(&to_neg_half_square(&dist))?,
                Input::Raw { b, .. } => b,
                Input::Space(_) => unreachable!(),
            };
            let x = match given {
                Some(x) => x,
                None => embed_gram(&b, m)?.embedding.coords,
            };
            ("classical", strain(&b, &x)?)
        }
    };
    to_json(&StrainReport {
        method,
        m: dim,
        strain: value,
        configuration: config.map(|p| p.display().to_string()),
    })
}

#[derive(Serialize)]
struct EigenRow {
    k: usize,
    b_eigenvalue: f64,
    operator_eigenvalue: f64,
    closed_form: f64,
}

#[derive(Serialize)]
struct CircleReport {
    n: usize,
    m: usize,
    aligned_residual: f64,
    residual_bound: f64,
    coefficients: Vec<ModeCoefficient>,
    eigenvalues: Vec<EigenRow>,
}

/// Rows shown in the eigenvalue table.
const EIGEN_TABLE_MODES: usize = 10;

pub fn circle_demo(n: usize, m: usize, prefix: &Path, plot: bool) -> Result<(), Error> {
    let analytic = circle_mds_analytic(n, m)?;
    let space = build_circle_space(n, CircleMeasure::Uniform)?;
    let numeric = classical_mds(space.dist(), m)?;
    let residual = procrustes_align(&numeric.coords, &analytic.embedding.coords)?.residual;
    let eigenvalues = analytic
        .mode_eigenvalues
        .iter()
        .skip(1)
        .take(EIGEN_TABLE_MODES)
        .map(|&(k, l)| {
            Ok(EigenRow {
                k,
                b_eigenvalue: l,
                operator_eigenvalue: l / n as f64,
                closed_form: operator_eigenvalue_circle(k as i64)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = CircleReport {
        n,
        m,
        aligned_residual: residual,
        residual_bound: 1e-6 * n as f64,
        coefficients: analytic.coefficients.clone(),
        eigenvalues,
    };
    write(
        &with_suffix(prefix, ".analytic.csv"),
        &matrix_csv_string(&analytic.embedding.coords, None),
    )?;
    write(
        &with_suffix(prefix, ".numeric.csv"),
        &matrix_csv_string(&numeric.coords, None),
    )?;
    write(&with_suffix(prefix, ".json"), &to_json(&report)?)?;
    if plot {
        // Oblique projection of the first three coordinates.
        let c = &analytic.embedding.coords;
        let pts: Vec<(f64, f64)> = c
            .row_iter()
            .map(|r| {
                let z = if r.len() > 2 { r[2] } else { 0.0 };
                let y = if r.len() > 1 { r[1] } else { 0.0 };
                (r[0] + 0.35 * z, 0.8 * y + 0.6 * z)
            })
            .collect();
        let svg = svg::scatter(&format!("circle with {n} points"), &pts, None);
        write(&with_suffix(prefix, ".svg"), &svg)?;
    }
    Ok(())
}

pub fn converge(scenario: &Path, prefix: &Path, format: Format, plot: bool) -> Result<(), Error> {
    let text = fs::read_to_string(scenario)
        .map_err(Error::Io)
        .map_err(at_path(scenario))?;
    let s = Scenario::parse(&text)?;
    let base = scenario.parent().unwrap_or(Path::new("."));
    let report = s.run(base)?;
    match format {
        Format::Json => write(&with_suffix(prefix, ".json"), &report.to_json()?)?,
        Format::Csv => write(&with_suffix(prefix, ".csv"), &report.to_csv()?)?,
    }
    if plot {
        let series = [
            (
                "aligned residual",
                report.stages.iter().map(|s| s.aligned_residual).collect(),
            ),
            (
                "tv distance",
                report.stages.iter().map(|s| s.tv_distance).collect(),
            ),
        ];
        let svg = svg::line_chart(&report.description, "stage", &series);
        write(&with_suffix(prefix, ".svg"), &svg)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn perturb(
    input: &InputArgs,
    eps: f64,
    seed: u64,
    prefix: &Path,
    stability: Option<&[f64]>,
    trials: usize,
    m: usize,
    format: Format,
) -> Result<(), Error> {
    let (dist, labels) = match load(input)? {
        Input::Matrix { dist, labels } => (dist, labels),
        Input::Space(space) => (space.dist().clone(), Some(space.labels().to_vec())),
        Input::Raw { .. } => {
            return Err(Error::InvalidArgument(
                "perturb needs a valid dissimilarity matrix".into(),
            ))
        }
    };
    let p = perturb_dissimilarities(&dist, eps, seed)?;
    write(
        &with_suffix(prefix, ".csv"),
        &matrix_csv_string(p.as_matrix(), labels.as_deref()),
    )?;
    if let Some(list) = stability {
        let rows = sibson_stability(&dist, m, list, trials, seed)?;
        match format {
            Format::Json => write(&with_suffix(prefix, ".stability.json"), &to_json(&rows)?)?,
            Format::Csv => write(
                &with_suffix(prefix, ".stability.csv"),
                &stability_csv(&rows),
            )?,
        }
    }
    Ok(())
}

fn stability_csv(rows: &[StabilityRow]) -> String {
    let mut out = String::from("eps,eigenvalue_drift,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{:?},{:?},{:?}\n",
            r.eps, r.eigenvalue_drift, r.residual
        ));
    }
    out
}
