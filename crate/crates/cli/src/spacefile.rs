//! Space files: versioned JSON documents describing a finite coarse space and
//! optionally its schedule.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use coarsec_core::coarse::{Entourage, EntourageSchedule, GroundSet};
use coarsec_core::spaces::{
    build_word_ball, load_distance_matrix, make_synthetic, GroupSpec, MetricWindow, Provenance,
    Synthetic,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

pub const FORMAT: u32 = 1;

#[derive(Debug, Deserialize)]
pub struct SpaceFile {
    pub format: u32,
    #[serde(flatten)]
    pub body: Body,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    DistanceMatrix {
        #[serde(default)]
        labels: Option<Vec<String>>,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        /// CSV file, relative to the space file.
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default)]
        depth: Option<Vec<f64>>,
    },
    GroupBall {
        group: GroupSpec,
        radius: usize,
    },
    Synthetic {
        synthetic: Synthetic,
    },
    EntourageSchedule {
        labels: Vec<String>,
        #[serde(default)]
        depth: Option<Vec<f64>>,
        #[serde(default)]
        normalization: Normalization,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Union,
    Strict,
}

/// Thresholds, or explicit stages as lists of label pairs.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Thresholds(Vec<f64>),
    Pairs(Vec<Vec<(String, String)>>),
}

/// A loaded space: either a metric window or a bare ground set.
#[derive(Debug)]
pub struct LoadedSpace {
    pub ground: Arc<GroundSet>,
    pub window: Option<MetricWindow>,
    pub depth: Vec<f64>,
    pub file_schedule: Option<ScheduleSpec>,
    normalization: Normalization,
    /// Lowercase hex SHA-256 of the file bytes.
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn cap_from_env() -> Result<usize> {
    match std::env::var("COARSEC_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("COARSEC_CAP={v:?} is not a size")),
        Err(_) => Ok(coarsec_core::spaces::DEFAULT_CAP),
    }
}

pub fn load(path: &Path, cap: usize) -> Result<LoadedSpace> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let file: SpaceFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing space file {}", path.display()))?;
    ensure!(
        file.format == FORMAT,
        "unsupported space file format {}",
        file.format
    );
    let digest = digest(&bytes);
    let base = path.parent().unwrap_or(Path::new("."));
    let mut normalization = Normalization::Union;
    let window = match file.body {
        Body::DistanceMatrix {
            labels,
            matrix,
            path,
            depth,
        } => {
            let w = match (matrix, path) {
                (Some(rows), None) => {
                    let n = rows.len();
                    ensure!(
                        rows.iter().all(|r| r.len() == n),
                        "distance matrix is not square"
                    );
                    let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
                    ensure!(labels.len() == n, "{} labels for {n} points", labels.len());
                    MetricWindow::new(labels, rows.concat(), depth, Provenance::Inline)?
                }
                (None, Some(p)) => {
                    ensure!(labels.is_none(), "labels come from the matrix file header");
                    let w = load_distance_matrix(&base.join(p))?;
                    match depth {
                        Some(d) => {
                            let (labels, dist) = matrix_of(&w);
                            MetricWindow::new(labels, dist, Some(d), w.provenance().clone())?
                        }
                        None => w,
                    }
                }
                _ => bail!("a distance_matrix needs exactly one of \"matrix\" and \"path\""),
            };
            Some(w)
        }
        Body::GroupBall { group, radius } => Some(build_word_ball(&group, radius, cap)?),
        Body::Synthetic { synthetic } => Some(make_synthetic(synthetic, cap)?),
        Body::EntourageSchedule {
            labels,
            depth,
            normalization: norm,
        } => {
            ensure!(
                labels.len() <= cap,
                "{} points exceed the size cap {cap}",
                labels.len()
            );
            ensure!(
                matches!(file.schedule, Some(ScheduleSpec::Pairs(_))),
                "an entourage_schedule needs a \"schedule\" of pair lists"
            );
            let ground = GroundSet::new(labels)?;
            let depth = depth.unwrap_or_else(|| vec![f64::INFINITY; ground.len()]);
            ensure!(
                depth.len() == ground.len(),
                "depth table has the wrong length"
            );
            normalization = norm;
            return Ok(LoadedSpace {
                ground,
                window: None,
                depth,
                file_schedule: file.schedule,
                normalization,
                digest,
            });
        }
    };
    let w = window.expect("metric kinds set a window");
    ensure!(
        w.len() <= cap,
        "{} points exceed the size cap {cap}",
        w.len()
    );
    Ok(LoadedSpace {
        ground: w.ground().clone(),
        depth: w.depths().to_vec(),
        window: Some(w),
        file_schedule: file.schedule,
        normalization,
        digest,
    })
}

fn matrix_of(w: &MetricWindow) -> (Vec<String>, Vec<f64>) {
    let n = w.len();
    let labels = w.ground().labels().to_vec();
    let d = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| w.dist(a, b))
        .collect();
    (labels, d)
}

/// Parses `1,2,4` or an inclusive integer range `1:5`.
pub fn parse_schedule_flag(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: i64 = lo
            .trim()
            .parse()
            .with_context(|| format!("bad range start {lo:?}"))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .with_context(|| format!("bad range end {hi:?}"))?;
        ensure!(lo <= hi, "empty range {s}");
        return Ok((lo..=hi).map(|v| v as f64).collect());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| anyhow!("bad threshold {t:?}"))
        })
        .collect()
}

impl LoadedSpace {
    /// Resolves the schedule from the flag, falling back to the file.
    pub fn schedule(&self, flag: Option<&str>) -> Result<(EntourageSchedule, String)> {
        let spec = match flag {
            Some(f) => ScheduleSpec::Thresholds(parse_schedule_flag(f)?),
            None => self.file_schedule.clone().ok_or_else(|| {
                anyhow!("no schedule given on the command line or in the space file")
            })?,
        };
        match spec {
            ScheduleSpec::Thresholds(ts) => {
                let w = self
                    .window
                    .as_ref()
                    .ok_or_else(|| anyhow!("threshold schedules need a metric space"))?;
                ensure!(!ts.is_empty(), "empty schedule");
                ensure!(
                    ts.windows(2).all(|p| p[0] < p[1]),
                    "schedule thresholds must be strictly increasing"
                );
                ensure!(
                    ts.iter().all(|t| t.is_finite() && *t >= 0.0),
                    "thresholds must be finite and nonnegative"
                );
                let id = format!(
                    "thresholds:{}",
                    ts.iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                Ok((w.schedule(&ts)?, id))
            }
            ScheduleSpec::Pairs(stages) => {
                let stages = stages
                    .iter()
                    .map(|pairs| {
                        let idx = pairs
                            .iter()
                            .map(|(a, b)| Ok((self.position(a)?, self.position(b)?)))
                            .collect::<Result<Vec<_>>>()?;
                        let u = Entourage::from_pairs(&self.ground, idx)?;
                        Ok(match self.normalization {
                            Normalization::Union => u.normalize(),
                            Normalization::Strict => u.normalize_strict(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ensure!(
                    stages.windows(2).all(|p| p[0] != p[1]),
                    "schedule stages must be strictly increasing"
                );
                let id = format!("explicit:{}", stages.len());
                Ok((EntourageSchedule::new(stages)?, id))
            }
        }
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.ground
            .position(label)
            .ok_or_else(|| anyhow!("unknown point label {label:?}"))
    }
}
