//! Scenario files for the `converge` command.
//!
//! ```json
//! {
//!   "space": {"kind": "circle", "n": 2048},
//!   "sequence": {"kind": "iid"},
//!   "m": 2,
//!   "seeds": [1, 2, 3, 4, 5],
//!   "sizes": [50, 100, 200, 400, 800]
//! }
//! ```

use std::path::{Path, PathBuf};

use mmds::convergence::{
    measure_sequence_experiment, sampling_convergence_against, sibson_stability, LimitEmbedding,
    Stage,
};
use mmds::{
    build_circle_space, build_euclidean_space, build_sphere_space, CircleMeasure,
    ConvergenceReport, DiscreteMeasure, Error, MetricMeasureSpace,
};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub space: SpaceSpec,
    pub sequence: SequenceSpec,
    pub m: usize,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Circle {
        n: usize,
        #[serde(default)]
        measure: Option<CircleMeasure>,
    },
    Sphere {
        n: usize,
        dim: usize,
        seed: u64,
    },
    Euclidean {
        points: Vec<Vec<f64>>,
    },
    /// A space JSON file, relative to the scenario file.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// i.i.d. samples of each size in `sizes`, once per seed.
    Iid,
    /// A sequence of measures on the space; the last one is the limit.
    /// Exactly one of the fields must be given.
    Weights {
        #[serde(default)]
        measures: Option<Vec<Vec<f64>>>,
        /// Hemisphere masses for a circle space.
        #[serde(default)]
        hemisphere: Option<Vec<f64>>,
        /// The space's own measure repeated this many times.
        #[serde(default)]
        constant: Option<usize>,
    },
    /// Sibson-style perturbation at each magnitude, seeded by `seeds[0]`.
    Perturb { eps: Vec<f64>, trials: usize },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.m == 0 {
            return Err(invalid("m: must be >= 1"));
        }
        Ok(s)
    }

    fn build_space(&self, base: &Path) -> Result<MetricMeasureSpace, Error> {
        match &self.space {
            SpaceSpec::Circle { n, measure } => {
                build_circle_space(*n, measure.unwrap_or(CircleMeasure::Uniform))
            }
            SpaceSpec::Sphere { n, dim, seed } => build_sphere_space(*n, *dim, *seed),
            SpaceSpec::Euclidean { points } => build_euclidean_space(points),
            SpaceSpec::File { path } => mmds::io::read_space_json_path(base.join(path)),
        }
    }

    /// Runs the scenario. Relative paths resolve against `base`.
    pub fn run(&self, base: &Path) -> Result<ConvergenceReport, Error> {
        let space = self.build_space(base)?;
        let m = self.m;
        match &self.sequence {
            SequenceSpec::Iid => {
                if self.sizes.is_empty() {
                    return Err(invalid("sizes: the iid sequence needs at least one size"));
                }
                if self.seeds.is_empty() {
                    return Err(invalid("seeds: the iid sequence needs at least one seed"));
                }
                let limit = match &self.space {
                    SpaceSpec::Circle {
                        n,
                        measure: None | Some(CircleMeasure::Uniform),
                    } => LimitEmbedding::uniform_circle(*n, m)?,
                    _ => LimitEmbedding::from_measure_mds(&space, m)?,
                };
                sampling_convergence_against(&space, &limit, &self.sizes, m, &self.seeds)
            }
            SequenceSpec::Weights {
                measures,
                hemisphere,
                constant,
            } => {
                let list = match (measures, hemisphere, constant) {
                    (Some(ws), None, None) => ws
                        .iter()
                        .map(|w| DiscreteMeasure::new(w.clone()))
                        .collect::<Result<Vec<_>, _>>()?,
                    (None, Some(qs), None) => {
                        let n = match &self.space {
                            SpaceSpec::Circle { n, .. } => *n,
                            _ => return Err(invalid("sequence.hemisphere: needs a circle space")),
                        };
                        qs.iter()
                            .map(|&q| {
                                let mu = if q == 0.5 {
                                    CircleMeasure::Uniform
                                } else {
                                    CircleMeasure::Hemisphere { north_mass: q }
                                };
                                build_circle_space(n, mu).map(|s| s.measure().clone())
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    }
                    (None, None, Some(k)) => vec![space.measure().clone(); *k],
                    _ => {
                        return Err(invalid(
                            "sequence: give exactly one of measures, hemisphere, constant",
                        ))
                    }
                };
                if list.is_empty() {
                    return Err(invalid("sequence: the measure list is empty"));
                }
                measure_sequence_experiment(&space, &list, m)
            }
            SequenceSpec::Perturb { eps, trials } => {
                let seed = *self
                    .seeds
                    .first()
                    .ok_or_else(|| invalid("seeds: the perturb sequence needs a seed"))?;
                let rows = sibson_stability(space.dist(), m, eps, *trials, seed)?;
                Ok(ConvergenceReport {
                    description: format!(
                        "perturbation of {} dissimilarities, {trials} trials",
                        space.len()
                    ),
                    metric_label: None,
                    m,
                    seeds: vec![seed],
                    stages: rows
                        .into_iter()
                        .map(|r| Stage {
                            label: format!("eps={:?}", r.eps),
                            n: None,
                            tv_distance: 0.0,
                            aligned_residual: r.residual,
                            eigenvalue_gaps: vec![r.eigenvalue_drift],
                            seed_residuals: r.trial_residuals,
                        })
                        .collect(),
                })
            }
        }
    }
}
