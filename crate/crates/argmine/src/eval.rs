//! Stratified k-fold cross-validation, accuracy and confusion-matrix
//! reporting, and the indicator-ablation comparison.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::InstanceLabel;
use crate::dataset::{assemble, AssembleOptions, Dataset};
use crate::error::{Error, Result};
use crate::features::{IndicatorLexicon, ModalList, VocabScope, Vocabulary};
use crate::svm::{self, Hyperparams};

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold index in `[0, k)` per row.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Row indices of the training and test sides of fold `fold`,
    /// both in original row order.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Stratified fold assignment: rows are grouped by label, each group is
/// shuffled with the seeded generator and dealt round-robin. The deal
/// continues across groups, so all folds are used once there are at least
/// `k` rows, and per-fold class counts stay within one of proportional.
pub fn stratified_folds(labels: &[InstanceLabel], k: usize, seed: u64) -> Result<FoldPlan> {
    check_fold_request(labels.len(), k)?;
    let mut by_label: BTreeMap<InstanceLabel, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_label.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; labels.len()];
    let mut next = 0usize;
    for (_, mut group) in by_label {
        group.shuffle(&mut rng);
        for i in group {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

/// Unstratified fold assignment: one shuffle of all rows, dealt round-robin.
pub fn plain_folds(n_rows: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    check_fold_request(n_rows, k)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut rng);
    let mut assignments = vec![0usize; n_rows];
    for (pos, &row) in order.iter().enumerate() {
        assignments[row] = pos % k;
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

fn check_fold_request(n_rows: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Folds {
            message: format!("k must be at least 2, got {k}"),
        });
    }
    if k > n_rows {
        return Err(Error::Folds {
            message: format!("k = {k} exceeds the row count {n_rows}"),
        });
    }
    Ok(())
}

/// 4x4 tally of actual (rows) versus predicted (columns) labels.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 4]; 4],
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: InstanceLabel, predicted: InstanceLabel) {
        self.counts[actual.index()][predicted.index()] += 1;
    }

    /// Correctly classified count.
    pub fn trace(&self) -> u64 {
        (0..4).map(|i| self.counts[i][i]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> [u64; 4] {
        let mut sums = [0u64; 4];
        for (i, row) in self.counts.iter().enumerate() {
            sums[i] = row.iter().sum();
        }
        sums
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.trace() as f64 / total as f64
        }
    }

    /// Plain-text table, actual labels on rows and predictions on columns.
    pub fn render(&self) -> String {
        let names: Vec<&str> = InstanceLabel::ALL
            .iter()
            .map(|l| l.display_name())
            .collect();
        let width = 11;
        let mut out = String::new();
        let _ = write!(out, "{:>width$} |", "actual \\ pred");
        for name in &names {
            let _ = write!(out, " {name:>width$}");
        }
        let _ = writeln!(out);
        for (i, name) in names.iter().enumerate() {
            let _ = write!(out, "{name:>width$} |");
            for j in 0..4 {
                let _ = write!(out, " {:>width$}", self.counts[i][j]);
            }
            let _ = writeln!(out);
        }
        out
    }
}

/// Accuracy of one held-out fold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub correct: u64,
    pub total: u64,
    pub accuracy: f64,
}

/// Aggregate cross-validation result. `correct` and `total` are exact
/// integers; `accuracy` is their quotient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: serde_json::Value,
    pub folds: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub correct: u64,
    pub total: u64,
    pub confusion: ConfusionMatrix,
    pub per_fold: Vec<FoldResult>,
    pub wall_time_s: f64,
}

impl EvalReport {
    /// Summary plus confusion matrix, in the layout of the result tables.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}-fold cross validation: {} ({} correctly classified of {})",
            self.folds,
            render_percent(self.correct, self.total),
            self.correct,
            self.total,
        );
        let _ = writeln!(out, "model build time: {:.2} s", self.wall_time_s);
        let _ = writeln!(out, "confusion matrix:");
        out.push_str(&self.confusion.render());
        out
    }
}

/// `correct / total` as a percentage with at most four decimal places,
/// trailing zeros trimmed: 1110/1532 renders as "72.4543%", 1109/1532 as
/// "72.389%".
pub fn render_percent(correct: u64, total: u64) -> String {
    let pct = if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64 * 100.0
    };
    let s = format!("{pct:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

/// Provider of per-fold train/test datasets. For a fixed feature matrix
/// this is row slicing; for fold-scoped vocabularies the training fold
/// rebuilds its vocabulary before extraction.
pub trait FoldSource {
    fn n_rows(&self) -> usize;
    fn label_list(&self) -> Vec<InstanceLabel>;
    fn fold_data(&self, train: &[usize], test: &[usize]) -> Result<(Dataset, Dataset)>;
}

impl FoldSource for Dataset {
    fn n_rows(&self) -> usize {
        self.len()
    }

    fn label_list(&self) -> Vec<InstanceLabel> {
        self.labels()
    }

    fn fold_data(&self, train: &[usize], test: &[usize]) -> Result<(Dataset, Dataset)> {
        Ok((self.subset(train), self.subset(test)))
    }
}

/// Rebuilds the n-gram vocabulary from the training fold only, then
/// extracts features for both sides with it.
pub struct PerFoldExtraction<'a> {
    pub instances: &'a [crate::corpus::Instance],
    pub lexicon: Option<&'a IndicatorLexicon>,
    pub modals: &'a ModalList,
    pub options: AssembleOptions,
}

impl FoldSource for PerFoldExtraction<'_> {
    fn n_rows(&self) -> usize {
        self.instances.len()
    }

    fn label_list(&self) -> Vec<InstanceLabel> {
        self.instances.iter().map(|i| i.label).collect()
    }

    fn fold_data(&self, train: &[usize], test: &[usize]) -> Result<(Dataset, Dataset)> {
        let train_instances: Vec<_> = train.iter().map(|&i| self.instances[i].clone()).collect();
        let test_instances: Vec<_> = test.iter().map(|&i| self.instances[i].clone()).collect();
        let vocab = Vocabulary::build(
            &train_instances,
            VocabScope::TrainFoldOnly,
            self.options.lookup,
        );
        let train_ds = assemble(
            &train_instances,
            &vocab,
            self.lexicon,
            self.modals,
            self.options,
        )?;
        let test_ds = assemble(
            &test_instances,
            &vocab,
            self.lexicon,
            self.modals,
            self.options,
        )?;
        Ok((train_ds, test_ds))
    }
}

/// Run the plan: per fold, train on the other k-1 folds and predict the
/// held-out rows; tally everything into one confusion matrix.
/// Normalization statistics are fitted inside `svm::train` on the training
/// side only, so test rows never influence them.
pub fn cross_validate(
    source: &(impl FoldSource + ?Sized),
    hp: &Hyperparams,
    plan: &FoldPlan,
) -> Result<EvalReport> {
    if plan.assignments.len() != source.n_rows() {
        return Err(Error::Folds {
            message: format!(
                "plan covers {} rows but the dataset has {}",
                plan.assignments.len(),
                source.n_rows()
            ),
        });
    }
    if let Some(&bad) = plan.assignments.iter().find(|&&f| f >= plan.k) {
        return Err(Error::Folds {
            message: format!("assignment {bad} outside [0, {})", plan.k),
        });
    }

    let labels = source.label_list();
    let started = Instant::now();
    let mut matrix = ConfusionMatrix::default();
    let mut per_fold = Vec::with_capacity(plan.k);

    for fold in 0..plan.k {
        let (train_idx, test_idx) = plan.split(fold);
        if test_idx.is_empty() {
            continue;
        }
        let (train_ds, test_ds) = source.fold_data(&train_idx, &test_idx)?;
        let model = svm::train(&train_ds, hp)?;
        let predictions = model.predict_dataset(&test_ds)?;
        let mut correct = 0u64;
        for (&row, predicted) in test_idx.iter().zip(predictions) {
            matrix.record(labels[row], predicted);
            if predicted == labels[row] {
                correct += 1;
            }
        }
        let total = test_idx.len() as u64;
        per_fold.push(FoldResult {
            fold,
            correct,
            total,
            accuracy: correct as f64 / total as f64,
        });
    }

    let correct = matrix.trace();
    let total = matrix.total();
    Ok(EvalReport {
        config: serde_json::to_value(hp).unwrap_or(serde_json::Value::Null),
        folds: plan.k,
        seed: plan.seed,
        accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
        correct,
        total,
        confusion: matrix,
        per_fold,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Paired evaluation of the same instances with and without indicator
/// features, under one shared fold plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationReport {
    pub with_indicator: EvalReport,
    pub without_indicator: EvalReport,
    /// Accuracy delta, with minus without, in [-1, 1].
    pub accuracy_delta: f64,
}

impl AblationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== with indicator features ==");
        out.push_str(&self.with_indicator.render());
        let _ = writeln!(out, "== without indicator features ==");
        out.push_str(&self.without_indicator.render());
        let _ = writeln!(
            out,
            "accuracy delta (with - without): {:+.4} points",
            self.accuracy_delta * 100.0
        );
        out
    }
}

/// Evaluate both datasets under an identical stratified fold plan.
/// The datasets must hold the same rows in the same order, differing only
/// in their feature columns.
pub fn ablation_compare(
    with_indicator: &Dataset,
    without_indicator: &Dataset,
    hp: &Hyperparams,
    k: usize,
    seed: u64,
) -> Result<AblationReport> {
    if with_indicator.len() != without_indicator.len() {
        return Err(Error::Schema {
            message: format!(
                "row-count mismatch: {} vs {}",
                with_indicator.len(),
                without_indicator.len()
            ),
        });
    }
    let labels = with_indicator.labels();
    if labels != without_indicator.labels() {
        return Err(Error::Schema {
            message: "label sequences differ; datasets must come from the same instances".into(),
        });
    }
    let plan = stratified_folds(&labels, k, seed)?;
    let with_report = cross_validate(with_indicator, hp, &plan)?;
    let without_report = cross_validate(without_indicator, hp, &plan)?;
    let accuracy_delta = with_report.accuracy - without_report.accuracy;
    Ok(AblationReport {
        with_indicator: with_report,
        without_indicator: without_report,
        accuracy_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::InstanceLabel::{Claim, MajorClaim, None as NoneLabel, Premise};
    use crate::svm::dataset_from_dense;

    #[test]
    fn ten_rows_one_class_k5_gives_two_per_fold() {
        let labels = vec![Claim; 10];
        let plan = stratified_folds(&labels, 5, 7).unwrap();
        let mut per_fold = [0usize; 5];
        for &f in &plan.assignments {
            per_fold[f] += 1;
        }
        assert_eq!(per_fold, [2, 2, 2, 2, 2]);
    }

    #[test]
    fn seven_three_split_k3_stays_proportional() {
        let mut labels = vec![Claim; 7];
        labels.extend(vec![Premise; 3]);
        let plan = stratified_folds(&labels, 3, 11).unwrap();
        for fold in 0..3 {
            let claims = labels
                .iter()
                .zip(&plan.assignments)
                .filter(|(l, &f)| **l == Claim && f == fold)
                .count();
            let premises = labels
                .iter()
                .zip(&plan.assignments)
                .filter(|(l, &f)| **l == Premise && f == fold)
                .count();
            assert!((2..=3).contains(&claims), "fold {fold} has {claims} claims");
            assert_eq!(premises, 1, "fold {fold} has {premises} premises");
        }
    }

    #[test]
    fn same_seed_same_assignments() {
        let labels: Vec<InstanceLabel> = (0..40)
            .map(|i| InstanceLabel::from_index(i % 4).unwrap())
            .collect();
        let a = stratified_folds(&labels, 10, 42).unwrap();
        let b = stratified_folds(&labels, 10, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_folds(&labels, 10, 43).unwrap();
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn k_larger_than_rows_is_rejected() {
        let labels = vec![Claim; 3];
        assert!(stratified_folds(&labels, 5, 0).is_err());
        assert!(stratified_folds(&labels, 1, 0).is_err());
    }

    #[test]
    fn folds_partition_the_rows() {
        let labels: Vec<InstanceLabel> = (0..57)
            .map(|i| InstanceLabel::from_index((i * 7) % 4).unwrap())
            .collect();
        let plan = stratified_folds(&labels, 10, 3).unwrap();
        assert_eq!(plan.assignments.len(), labels.len());
        assert!(plan.assignments.iter().all(|&f| f < 10));
        for fold in 0..10 {
            let (train, test) = plan.split(fold);
            assert_eq!(train.len() + test.len(), labels.len());
            assert!(!test.is_empty());
        }
    }

    #[test]
    fn accuracy_is_trace_over_total() {
        let m = ConfusionMatrix {
            counts: [
                [0, 0, 74, 0],
                [0, 0, 346, 2],
                [0, 0, 867, 0],
                [0, 0, 0, 243],
            ],
        };
        assert_eq!(m.trace(), 867 + 243);
        assert_eq!(m.total(), 1532);
        assert_eq!(m.row_sums(), [74, 348, 867, 243]);
        assert_eq!(m.accuracy(), 1110.0 / 1532.0);
    }

    #[test]
    fn percent_rendering_matches_result_tables() {
        assert_eq!(render_percent(1110, 1532), "72.4543%");
        assert_eq!(render_percent(1109, 1532), "72.389%");
        assert_eq!(render_percent(10, 10), "100%");
        assert_eq!(render_percent(1, 3), "33.3333%");
    }

    /// Dataset whose columns one-hot encode the label, so every
    /// class-vs-rest problem is separable.
    fn label_encoded_dataset(n_per_class: usize) -> Dataset {
        let mut rows = Vec::new();
        for r in 0..n_per_class {
            for (i, label) in [MajorClaim, Claim, Premise, NoneLabel]
                .into_iter()
                .enumerate()
            {
                let mut x = vec![0.0; 5];
                x[i] = 1.0;
                x[4] = (r % 3) as f64 * 0.01;
                rows.push((x, label));
            }
        }
        dataset_from_dense(&rows)
    }

    #[test]
    fn perfectly_encoded_dataset_reaches_full_accuracy() {
        let ds = label_encoded_dataset(10);
        let plan = stratified_folds(&ds.labels(), 5, 42).unwrap();
        let report = cross_validate(&ds, &Hyperparams::default(), &plan).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.correct, report.total);
        // diagonal matrix
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(report.confusion.counts[i][j], 0);
                }
            }
        }
        assert_eq!(report.per_fold.len(), 5);
    }

    #[test]
    fn confusion_row_sums_equal_class_counts() {
        let ds = label_encoded_dataset(6);
        let plan = stratified_folds(&ds.labels(), 4, 1).unwrap();
        let report = cross_validate(&ds, &Hyperparams::default(), &plan).unwrap();
        let sums = report.confusion.row_sums();
        for (i, &count) in ds.class_counts.iter().enumerate() {
            assert_eq!(sums[i], count as u64);
        }
    }

    #[test]
    fn identical_datasets_give_zero_delta() {
        let ds = label_encoded_dataset(5);
        let report = ablation_compare(&ds, &ds, &Hyperparams::default(), 4, 9).unwrap();
        assert_eq!(report.accuracy_delta, 0.0);
        assert_eq!(
            report.with_indicator.confusion,
            report.without_indicator.confusion
        );
    }

    #[test]
    fn mismatched_rows_are_rejected() {
        let a = label_encoded_dataset(5);
        let b = label_encoded_dataset(4);
        assert!(ablation_compare(&a, &b, &Hyperparams::default(), 4, 9).is_err());
    }

    #[test]
    fn plain_folds_also_partition() {
        let plan = plain_folds(23, 4, 5).unwrap();
        assert_eq!(plan.assignments.len(), 23);
        for fold in 0..4 {
            let count = plan.assignments.iter().filter(|&&f| f == fold).count();
            assert!((5..=6).contains(&count));
        }
        assert_eq!(plain_folds(23, 4, 5).unwrap(), plan);
    }

    // A token occurring only in the held-out fold must not reach the
    // training vocabulary.
    #[test]
    fn fold_scoped_vocabulary_ignores_test_rows() {
        use crate::corpus::Instance;
        let mk = |text: &str, label| Instance {
            essay_id: "e".into(),
            label,
            component_text: None,
            covering_sentence: text.into(),
        };
        let instances = vec![
            mk("alpha beta", Claim),
            mk("beta gamma", Premise),
            mk("unseen zeta", Claim),
        ];
        let modals = ModalList::default();
        let source = PerFoldExtraction {
            instances: &instances,
            lexicon: None,
            modals: &modals,
            options: AssembleOptions {
                indicator: false,
                lookup: crate::features::LookupScope::Sentence,
            },
        };
        let (train_ds, test_ds) = source.fold_data(&[0, 1], &[2]).unwrap();
        // vocabulary: {alpha, beta, gamma} unigrams + {alpha beta, beta gamma} bigrams
        assert_eq!(train_ds.dim(), 7 + 3 + 2 + 1);
        assert_eq!(test_ds.dim(), train_ds.dim());
        // the test row has no in-vocabulary n-grams at all
        let ngram_entries = test_ds.rows[0]
            .entries
            .iter()
            .filter(|&&(i, _)| (7..12).contains(&i))
            .count();
        assert_eq!(ngram_entries, 0);
    }

    #[test]
    fn report_json_has_the_documented_fields() {
        let ds = label_encoded_dataset(5);
        let plan = stratified_folds(&ds.labels(), 4, 2).unwrap();
        let report = cross_validate(&ds, &Hyperparams::default(), &plan).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        for key in [
            "config",
            "folds",
            "seed",
            "accuracy",
            "correct",
            "total",
            "confusion",
            "per_fold",
            "wall_time_s",
        ] {
            assert!(value.get(key).is_some(), "missing report key {key}");
        }
        // confusion serializes as a bare 4x4 array
        assert!(value["confusion"].as_array().map(|a| a.len()) == Some(4));
    }
}
