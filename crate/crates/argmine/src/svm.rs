//! One-vs-rest linear SVM trained by dual coordinate descent.
//!
//! Each class gets a binary L2-regularized hinge-loss classifier
//! (class-vs-rest). The dual problem
//!
//! ```text
//! max_a  sum(a) - 0.5 * ||w(a)||^2    s.t. 0 <= a_i <= C,
//! w(a) = sum_i a_i * y_i * x_i
//! ```
//!
//! is solved coordinate-wise with exact single-variable updates, so the
//! dual objective never decreases. The bias is handled by an implicit
//! constant feature appended to every row. Training is deterministic for
//! a fixed seed: the per-sweep visiting order comes from a seeded
//! permutation schedule.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::InstanceLabel;
use crate::dataset::{Dataset, FeatureVector, Schema};
use crate::error::{Error, Result};

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Regularization trade-off; larger C penalizes hinge violations more.
    pub c: f64,
    /// Maximum number of coordinate-descent sweeps per class.
    pub max_iter: usize,
    /// Stop when the largest dual-variable update in a sweep falls below this.
    pub tolerance: f64,
    pub seed: u64,
    /// Min-max scale each column to [0,1] before training.
    pub normalize: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            c: 1.0,
            max_iter: 1000,
            tolerance: 1e-4,
            seed: 42,
            normalize: true,
        }
    }
}

/// Per-column min-max statistics fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl NormStats {
    /// Fit per-column minima and maxima. Implicit zeros of the sparse rows
    /// participate: a column with any absent entry has 0 among its values.
    pub fn fit(rows: &[FeatureVector], dim: usize) -> NormStats {
        let n = rows.len();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        let mut present = vec![0usize; dim];
        for row in rows {
            for &(i, v) in &row.entries {
                let i = i as usize;
                mins[i] = mins[i].min(v);
                maxs[i] = maxs[i].max(v);
                present[i] += 1;
            }
        }
        for i in 0..dim {
            if present[i] < n {
                mins[i] = mins[i].min(0.0);
                maxs[i] = maxs[i].max(0.0);
            }
            if present[i] == 0 || n == 0 {
                mins[i] = 0.0;
                maxs[i] = 0.0;
            }
        }
        NormStats { mins, maxs }
    }

    fn scale(&self, i: usize, v: f64) -> f64 {
        let (min, max) = (self.mins[i], self.maxs[i]);
        if max > min {
            (v - min) / (max - min)
        } else {
            0.0
        }
    }

    /// Scale one row. Unseen values beyond the fitted range are not clamped.
    pub fn apply_row(&self, row: &FeatureVector) -> FeatureVector {
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(row.entries.len());
        // columns whose minimum is nonzero turn implicit zeros into
        // explicit scaled values
        let mut cursor = 0usize;
        for i in 0..self.mins.len() {
            let explicit = row
                .entries
                .get(cursor)
                .filter(|&&(j, _)| j as usize == i)
                .map(|&(_, v)| {
                    cursor += 1;
                    v
                });
            let v = match explicit {
                Some(v) => v,
                None if self.mins[i] != 0.0 => 0.0,
                None => continue,
            };
            let scaled = self.scale(i, v);
            if scaled != 0.0 {
                entries.push((i as u32, scaled));
            }
        }
        FeatureVector::new(entries, row.label)
    }

    pub fn apply(&self, rows: &[FeatureVector]) -> Vec<FeatureVector> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// Fit min-max statistics on a dataset (training rows only).
pub fn normalize_fit(dataset: &Dataset) -> NormStats {
    NormStats::fit(&dataset.rows, dataset.dim())
}

/// Apply previously fitted statistics to a dataset.
pub fn normalize_apply(dataset: &Dataset, stats: &NormStats) -> Dataset {
    Dataset::new(dataset.schema.clone(), stats.apply(&dataset.rows))
}

/// Trained one-vs-rest model.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    pub classes: Vec<InstanceLabel>,
    /// One dense weight vector of length `dim` per class.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    /// Present iff the model was trained with normalization.
    pub norm: Option<NormStats>,
}

/// Dual objective value after each sweep, one trace per class.
pub type DualTrace = Vec<f64>;

/// Train with default sweep bookkeeping discarded.
pub fn train(dataset: &Dataset, hp: &Hyperparams) -> Result<Model> {
    train_with_trace(dataset, hp).map(|(model, _)| model)
}

/// Train and keep the per-sweep dual objective of every binary problem.
pub fn train_with_trace(dataset: &Dataset, hp: &Hyperparams) -> Result<(Model, Vec<DualTrace>)> {
    let dim = dataset.dim();
    if dim == 0 {
        return Err(Error::Train {
            message: "dataset has no feature columns".into(),
        });
    }
    if dataset.is_empty() {
        return Err(Error::Train {
            message: "dataset has no rows".into(),
        });
    }
    for (ri, row) in dataset.rows.iter().enumerate() {
        if row.entries.iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::Train {
                message: format!("non-finite feature value in row {ri}"),
            });
        }
    }
    let classes: Vec<InstanceLabel> = InstanceLabel::ALL
        .into_iter()
        .filter(|l| dataset.class_counts[l.index()] > 0)
        .collect();
    if classes.len() < 2 {
        return Err(Error::Train {
            message: "training data contains fewer than two classes".into(),
        });
    }
    if hp.c <= 0.0 || hp.tolerance <= 0.0 {
        return Err(Error::Train {
            message: "c and tolerance must be positive".into(),
        });
    }

    let (norm, rows) = if hp.normalize {
        let stats = NormStats::fit(&dataset.rows, dim);
        let scaled = stats.apply(&dataset.rows);
        (Some(stats), scaled)
    } else {
        (None, dataset.rows.clone())
    };

    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    let mut traces = Vec::with_capacity(classes.len());
    for (ci, &class) in classes.iter().enumerate() {
        let targets: Vec<f64> = rows
            .iter()
            .map(|r| if r.label == class { 1.0 } else { -1.0 })
            .collect();
        let seed = hp
            .seed
            .wrapping_add((ci as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (w, trace) = binary_dual_cd(&rows, &targets, dim, hp, seed);
        biases.push(w[dim]);
        let mut w = w;
        w.truncate(dim);
        weights.push(w);
        traces.push(trace);
    }

    Ok((
        Model {
            dim,
            classes,
            weights,
            biases,
            norm,
        },
        traces,
    ))
}

/// Solve one binary problem; returns the weight vector augmented with the
/// bias at index `dim`, plus the dual objective after each sweep.
fn binary_dual_cd(
    rows: &[FeatureVector],
    targets: &[f64],
    dim: usize,
    hp: &Hyperparams,
    seed: u64,
) -> (Vec<f64>, DualTrace) {
    let n = rows.len();
    let mut w = vec![0.0f64; dim + 1];
    let mut alpha = vec![0.0f64; n];
    // diagonal of the Gram matrix, with the implicit bias feature
    let q_diag: Vec<f64> = rows
        .iter()
        .map(|r| r.entries.iter().map(|&(_, v)| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();

    for _sweep in 0..hp.max_iter {
        order.shuffle(&mut rng);
        let mut max_update = 0.0f64;
        for &i in &order {
            let row = &rows[i];
            let score: f64 = row
                .entries
                .iter()
                .map(|&(j, v)| w[j as usize] * v)
                .sum::<f64>()
                + w[dim];
            let gradient = targets[i] * score - 1.0;
            let projected = if alpha[i] <= 0.0 {
                gradient.min(0.0)
            } else if alpha[i] >= hp.c {
                gradient.max(0.0)
            } else {
                gradient
            };
            if projected == 0.0 {
                continue;
            }
            let updated = (alpha[i] - gradient / q_diag[i]).clamp(0.0, hp.c);
            let delta = updated - alpha[i];
            if delta != 0.0 {
                alpha[i] = updated;
                let step = delta * targets[i];
                for &(j, v) in &row.entries {
                    w[j as usize] += step * v;
                }
                w[dim] += step;
                max_update = max_update.max(delta.abs());
            }
        }
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        let dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        trace.push(dual);
        if max_update < hp.tolerance {
            break;
        }
    }
    (w, trace)
}

impl Model {
    /// Per-class decision scores for one (already normalized) row.
    fn raw_scores(&self, x: &FeatureVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, &b)| {
                x.entries
                    .iter()
                    .map(|&(j, v)| w[j as usize] * v)
                    .sum::<f64>()
                    + b
            })
            .collect()
    }

    /// Predict the label of one sparse row. Ties go to the lowest class.
    pub fn predict(&self, x: &FeatureVector) -> Result<InstanceLabel> {
        if let Some(max) = x.max_index() {
            if max as usize >= self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: max as usize + 1,
                });
            }
        }
        let x = match &self.norm {
            Some(stats) => stats.apply_row(x),
            None => x.clone(),
        };
        let scores = self.raw_scores(&x);
        let mut best = 0usize;
        for (k, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = k;
            }
        }
        Ok(self.classes[best])
    }

    /// Predict every row of a dataset whose dimensionality matches.
    pub fn predict_dataset(&self, dataset: &Dataset) -> Result<Vec<InstanceLabel>> {
        if dataset.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dataset.dim(),
            });
        }
        dataset.rows.iter().map(|r| self.predict(r)).collect()
    }

    /// Fraction of dataset rows whose prediction matches the label.
    pub fn accuracy(&self, dataset: &Dataset) -> Result<f64> {
        let predictions = self.predict_dataset(dataset)?;
        let correct = predictions
            .iter()
            .zip(&dataset.rows)
            .filter(|(p, r)| **p == r.label)
            .count();
        Ok(correct as f64 / dataset.len() as f64)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            schema_version: 1,
            dim: self.dim,
            classes: self.classes.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| {
                    w.iter()
                        .enumerate()
                        .filter(|&(_, &v)| v != 0.0)
                        .map(|(i, &v)| (i as u32, v))
                        .collect()
                })
                .collect(),
            biases: self.biases.clone(),
            norm: self.norm.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn from_json(data: &str) -> Result<Model> {
        let file: ModelFile = serde_json::from_str(data).map_err(|e| Error::Import {
            line: e.line(),
            message: format!("model file: {e}"),
        })?;
        if file.schema_version != 1 {
            return Err(Error::Schema {
                message: format!("unsupported model schema version {}", file.schema_version),
            });
        }
        let mut weights = Vec::with_capacity(file.weights.len());
        for sparse in &file.weights {
            let mut w = vec![0.0; file.dim];
            for &(i, v) in sparse {
                if i as usize >= file.dim {
                    return Err(Error::Schema {
                        message: format!("weight index {i} exceeds dimensionality {}", file.dim),
                    });
                }
                w[i as usize] = v;
            }
            weights.push(w);
        }
        Ok(Model {
            dim: file.dim,
            classes: file.classes,
            weights,
            biases: file.biases,
            norm: file.norm,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Model> {
        let data = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&data)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    dim: usize,
    classes: Vec<InstanceLabel>,
    weights: Vec<Vec<(u32, f64)>>,
    biases: Vec<f64>,
    norm: Option<NormStats>,
}

/// Build a bare dataset from dense rows, for tests and synthetic data.
pub fn dataset_from_dense(rows: &[(Vec<f64>, InstanceLabel)]) -> Dataset {
    let dim = rows.first().map(|(r, _)| r.len()).unwrap_or(0);
    let schema = Schema::canonical(dim.saturating_sub(8), 0, 0, None);
    let rows = rows
        .iter()
        .map(|(values, label)| {
            FeatureVector::new(
                values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i as u32, v))
                    .collect(),
                *label,
            )
        })
        .collect();
    Dataset::new(schema, rows)
}
