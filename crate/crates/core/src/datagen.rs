//! Seeded synthetic logistic-regression instances with geometrically scaled
//! columns, and the experiment grids built from them.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, drawn in a fixed
//! order: the `n x d` design matrix row by row, then `x_sol`, then the label
//! noise. Identical configs therefore give bit-identical datasets on every
//! platform.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::Vector;
use crate::error::{Error, Result};
use crate::sets::{FeasibleSet, L2Ball, LInfBall, Simplex};

/// How rows of the design matrix are drawn before column scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RowDistribution {
    /// i.i.d. standard normal entries.
    #[default]
    Normal,
    UniformL2Ball {
        radius: f64,
    },
    UniformSimplex,
    UniformBox {
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataGenConfig {
    pub n_samples: usize,
    pub n_features: usize,
    pub seed: u64,
    /// Column `j` is multiplied by `scale_base^j`.
    pub scale_base: f64,
    pub noise_sigma: f64,
    pub solution_scale: f64,
    pub rows: RowDistribution,
    /// Overrides the random ground-truth vector.
    pub x_sol: Option<Vec<f64>>,
}

impl Default for DataGenConfig {
    fn default() -> Self {
        Self {
            n_samples: 500,
            n_features: 10,
            seed: 0,
            scale_base: 2.0,
            noise_sigma: 0.1,
            solution_scale: 1.0,
            rows: RowDistribution::Normal,
            x_sol: None,
        }
    }
}

impl DataGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.n_features == 0 {
            return Err(Error::invalid("n_samples and n_features must be >= 1"));
        }
        if !(self.scale_base > 1.0) || !self.scale_base.is_finite() {
            return Err(Error::invalid(format!(
                "scale_base must be > 1, got {}",
                self.scale_base
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma must be >= 0"));
        }
        if !(self.solution_scale > 0.0) {
            return Err(Error::invalid("solution_scale must be positive"));
        }
        if let Some(x) = &self.x_sol {
            if x.len() != self.n_features {
                return Err(Error::DimensionMismatch {
                    expected: self.n_features,
                    found: x.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub matrix: DMatrix<f64>,
    pub labels: Vector,
    pub x_sol: Vector,
}

const MAX_RETRIES: u64 = 10;

fn draw_row(rng: &mut ChaCha8Rng, rows: RowDistribution, d: usize) -> Vec<f64> {
    match rows {
        RowDistribution::Normal => (0..d).map(|_| rng.sample(StandardNormal)).collect(),
        RowDistribution::UniformL2Ball { radius } => {
            let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
            dir.into_iter().map(|v| v / norm * r).collect()
        }
        RowDistribution::UniformSimplex => {
            let e: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = e.iter().sum();
            e.into_iter().map(|v| v / total).collect()
        }
        RowDistribution::UniformBox { radius } => (0..d).map(|_| rng.random_range(-radius..=radius)).collect(),
    }
}

fn draw_unscaled(config: &DataGenConfig, seed: u64) -> (DMatrix<f64>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (config.n_samples, config.n_features);
    let mut entries = Vec::with_capacity(n * d);
    for _ in 0..n {
        entries.extend(draw_row(&mut rng, config.rows, d));
    }
    (DMatrix::from_row_slice(n, d, &entries), rng)
}

/// The design matrix before column scaling, for the first (non-retried) seed.
pub fn generate_unscaled_matrix(config: &DataGenConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    Ok(draw_unscaled(config, config.seed).0)
}

fn generate_once(config: &DataGenConfig, seed: u64) -> Dataset {
    let (mut matrix, mut rng) = draw_unscaled(config, seed);
    for (j, mut col) in matrix.column_iter_mut().enumerate() {
        col *= config.scale_base.powi(j as i32);
    }
    let x_sol = match &config.x_sol {
        Some(x) => Vector::from_column_slice(x),
        None => Vector::from_iterator(
            config.n_features,
            (0..config.n_features).map(|_| config.solution_scale * rng.sample::<f64, _>(StandardNormal)),
        ),
    };
    let clean = &matrix * &x_sol;
    let labels = Vector::from_iterator(
        config.n_samples,
        clean.iter().map(|&m| {
            let noise: f64 = rng.sample(StandardNormal);
            if m + config.noise_sigma * noise >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }),
    );
    Dataset { matrix, labels, x_sol }
}

/// Draws `A ~ N(0,1)` (or the configured row distribution), scales column `j`
/// by `scale_base^j`, and labels rows by `sign(A x_sol + noise)` with
/// `sign(0) = +1`. If a class comes out empty the draw is repeated with
/// seeds `seed + 1, seed + 2, ...` (at most ten times).
pub fn generate_logistic_dataset(config: &DataGenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut data = generate_once(config, config.seed);
    for attempt in 1..=MAX_RETRIES {
        let pos = data.labels.iter().filter(|&&y| y > 0.0).count();
        if pos > 0 && pos < config.n_samples {
            break;
        }
        if config.n_samples < 2 {
            break;
        }
        data = generate_once(config, config.seed.wrapping_add(attempt));
    }
    Ok(data)
}

/// Writes `f0,...,f{d-1},label` rows.
pub fn write_dataset_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let d = data.matrix.ncols();
    let mut header: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (row, y) in data.matrix.row_iter().zip(data.labels.iter()) {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        fields.push(format!("{}", *y as i32));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset written by [`write_dataset_csv`]; `x_sol` is not stored and
/// comes back empty.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let malformed = |msg: String| Error::Malformed {
        what: "dataset csv",
        path: path.to_path_buf(),
        msg,
    };
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let d = header
        .len()
        .checked_sub(1)
        .ok_or_else(|| malformed("empty header".into()))?;
    if header.get(d) != Some("label") {
        return Err(malformed("last column must be `label`".into()));
    }
    let mut entries = Vec::new();
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        for j in 0..d {
            entries.push(rec[j].parse::<f64>().map_err(|e| malformed(e.to_string()))?);
        }
        labels.push(rec[d].parse::<f64>().map_err(|e| malformed(e.to_string()))?);
    }
    let n = labels.len();
    Ok(Dataset {
        matrix: DMatrix::from_row_slice(n, d, &entries),
        labels: Vector::from_vec(labels),
        x_sol: Vector::zeros(0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSetting {
    L2ballNpoints,
    L2ballDim,
    SimplexDim,
    BoxDim,
}

impl GridSetting {
    pub const ALL: [GridSetting; 4] = [
        GridSetting::L2ballNpoints,
        GridSetting::L2ballDim,
        GridSetting::SimplexDim,
        GridSetting::BoxDim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GridSetting::L2ballNpoints => "l2ball_npoints",
            GridSetting::L2ballDim => "l2ball_dim",
            GridSetting::SimplexDim => "simplex_dim",
            GridSetting::BoxDim => "box_dim",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.as_str() == name)
            .ok_or_else(|| Error::Unknown {
                kind: "setting",
                name: name.to_string(),
            })
    }

    fn ordinal(self) -> u64 {
        self as u64
    }
}

impl std::fmt::Display for GridSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Serializable description of a feasible set; the dimension comes from the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SetSpec {
    L2Ball { radius: f64 },
    Simplex { scale: f64 },
    LInfBall { radius: f64 },
}

impl SetSpec {
    pub fn build(&self, dim: usize) -> Result<Box<dyn FeasibleSet>> {
        Ok(match *self {
            SetSpec::L2Ball { radius } => Box::new(L2Ball::centered(dim, radius)?),
            SetSpec::Simplex { scale } => Box::new(Simplex::new(dim, scale)?),
            SetSpec::LInfBall { radius } => Box::new(LInfBall::centered(dim, radius)?),
        })
    }
}

/// Sizes held fixed while the other one varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridBase {
    pub n_samples: usize,
    pub n_features: usize,
    pub noise_sigma: f64,
    pub scale_base: f64,
}

impl Default for GridBase {
    fn default() -> Self {
        Self {
            n_samples: 500,
            n_features: 10,
            noise_sigma: 0.1,
            scale_base: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridInstance {
    pub id: String,
    pub setting: GridSetting,
    pub data: DataGenConfig,
    pub set: SetSpec,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of grid cell `index` under `setting`.
pub fn instance_seed(master_seed: u64, setting: GridSetting, index: usize) -> u64 {
    mix(mix(master_seed ^ mix(setting.ordinal())) ^ index as u64)
}

/// Ball of radius 25 with growing `n` or `d`; unit simplex and unit box with
/// growing `d`.
pub fn experiment_grid(
    setting: GridSetting,
    sizes: &[usize],
    master_seed: u64,
    base: &GridBase,
) -> Result<Vec<GridInstance>> {
    if sizes.is_empty() {
        return Err(Error::invalid("grid sizes must be non-empty"));
    }
    sizes
        .iter()
        .enumerate()
        .map(|(index, &size)| {
            let (n, d, set) = match setting {
                GridSetting::L2ballNpoints => (size, base.n_features, SetSpec::L2Ball { radius: 25.0 }),
                GridSetting::L2ballDim => (base.n_samples, size, SetSpec::L2Ball { radius: 25.0 }),
                GridSetting::SimplexDim => (base.n_samples, size, SetSpec::Simplex { scale: 1.0 }),
                GridSetting::BoxDim => (base.n_samples, size, SetSpec::LInfBall { radius: 1.0 }),
            };
            let data = DataGenConfig {
                n_samples: n,
                n_features: d,
                seed: instance_seed(master_seed, setting, index),
                scale_base: base.scale_base,
                noise_sigma: base.noise_sigma,
                ..DataGenConfig::default()
            };
            data.validate()?;
            Ok(GridInstance {
                id: format!("{}_{:02}_n{}_d{}", setting.as_str(), index, n, d),
                setting,
                data,
                set,
            })
        })
        .collect()
}
