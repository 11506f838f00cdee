//! End-to-end tests through the `argmine` binary: ingest a small corpus,
//! extract datasets, cross-validate, and check the CLI error contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use argmine::cli::InstancesFile;
use argmine::dataset::{self, Format};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_argmine"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("spawn argmine");
    assert!(
        output.status.success(),
        "argmine {args:?} failed:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
    // machine-readable artifacts go to files, diagnostics to stderr
    assert!(
        output.stdout.is_empty(),
        "unexpected stdout: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    output
}

fn run_err(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("spawn argmine");
    assert!(
        !output.status.success(),
        "argmine {args:?} unexpectedly succeeded"
    );
    output
}

type EssaySpec = (
    &'static str,
    &'static str,
    &'static [(&'static str, &'static str)],
);

/// Three small essays in the corpus layout: title line, blank line, body.
fn write_fixture_corpus(dir: &Path) {
    let essays: &[EssaySpec] = &[
        (
            "essay01",
            "Should newspapers remain\n\nSome people, however, still believe that they can exist for long time; others disagree, arguing that newspapers have lost their competitive advantage to sustain their prolonged existence. Hence, the print media has failed to keep its important role in the provision of information. The internet has been more and more popular for recent years, providing people with a huge source of information.\n",
            &[
                (
                    "MajorClaim",
                    "newspapers have lost their competitive advantage to sustain their prolonged existence",
                ),
                (
                    "Claim",
                    "the print media has failed to keep its important role in the provision of information",
                ),
                (
                    "Premise",
                    "The internet has been more and more popular for recent years, providing people with a huge source of information",
                ),
            ],
        ),
        (
            "essay02",
            "Reading habits\n\nThe number of people reading newspapers may continue falling sharply, possibly leading to the close-downs of many in the coming time. As a result of this, print media such as newspapers have experienced a dramatic decline in the number of readers. Contrary to the past when people had to wait long hours to take a daily newspaper, nowadays, they can acquire latest news updated every second through their mobile phones or computers connected to the internet, everywhere and at anytime.\n",
            &[
                (
                    "Claim",
                    "The number of people reading newspapers may continue falling sharply, possibly leading to the close-downs of many in the coming time",
                ),
                (
                    "Premise",
                    "Contrary to the past when people had to wait long hours to take a daily newspaper, nowadays, they can acquire latest news updated every second through their mobile phones or computers connected to the internet, everywhere and at anytime",
                ),
            ],
        ),
        (
            "essay03",
            "Questions remain\n\nNewspapers' production will have to face environmentalists on its way to be alive. The question arises as to whether or not a person spends an extra money buying newspapers to receive the same, even usually less information than those he can have with the internet?\n",
            &[(
                "Premise",
                "Newspapers' production will have to face environmentalists on its way to be alive",
            )],
        ),
    ];

    for (id, text, spans) in essays {
        fs::write(dir.join(format!("{id}.txt")), text).unwrap();
        let mut ann = String::new();
        for (k, (label, surface)) in spans.iter().enumerate() {
            let byte_start = text.find(surface).expect("surface present");
            let start = text[..byte_start].chars().count();
            let end = start + surface.chars().count();
            ann.push_str(&format!("T{}\t{label} {start} {end}\t{surface}\n", k + 1));
        }
        // a relation line, which ingestion must skip
        ann.push_str("R1\tsupports Arg1:T1 Arg2:T2\n");
        fs::write(dir.join(format!("{id}.ann")), ann).unwrap();
    }
}

fn lexicon_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/indicator_lexicon.txt")
}

struct Fixture {
    _tmp: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Fixture {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().to_path_buf();
        let corpus = root.join("corpus");
        fs::create_dir(&corpus).unwrap();
        write_fixture_corpus(&corpus);
        Fixture { _tmp: tmp, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

fn ingest(fx: &Fixture) {
    run_ok(&[
        "ingest",
        "--corpus",
        &fx.arg("corpus"),
        "--out",
        &fx.arg("instances.json"),
    ]);
}

#[test]
fn ingest_builds_expected_instances() {
    let fx = Fixture::new();
    let output = ingest_with_output(&fx);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("11 instances"), "stderr: {stderr}");

    let file: InstancesFile =
        serde_json::from_str(&fs::read_to_string(fx.path("instances.json")).unwrap()).unwrap();
    assert_eq!(file.total, 11);
    // 1 major claim, 2 claims, 3 premises, 5 bare sentences (3 titles + 2)
    assert_eq!(file.label_counts, [1, 2, 3, 5]);
    assert_eq!(file.instances.len(), 11);
    for inst in &file.instances {
        if let Some(component) = &inst.component_text {
            assert!(inst.covering_sentence.contains(component.as_str()));
        }
    }
}

fn ingest_with_output(fx: &Fixture) -> Output {
    run_ok(&[
        "ingest",
        "--corpus",
        &fx.arg("corpus"),
        "--out",
        &fx.arg("instances.json"),
    ])
}

#[test]
fn empty_corpus_directory_fails_with_diagnostic() {
    let fx = Fixture::new();
    fs::create_dir(fx.path("empty")).unwrap();
    let output = run_err(&[
        "ingest",
        "--corpus",
        &fx.arg("empty"),
        "--out",
        &fx.arg("nothing.json"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no essays found"), "stderr: {stderr}");
}

#[test]
fn corrupt_annotation_file_names_the_file() {
    let fx = Fixture::new();
    fs::write(
        fx.path("corpus/essay02.ann"),
        "T1\tClaim overlapping nonsense\tbad\n",
    )
    .unwrap();
    let output = run_err(&[
        "ingest",
        "--corpus",
        &fx.arg("corpus"),
        "--out",
        &fx.arg("instances.json"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("essay02"), "stderr: {stderr}");
}

#[test]
fn extract_writes_importable_datasets_and_dim_summary() {
    let fx = Fixture::new();
    ingest(&fx);
    let lexicon = lexicon_path().display().to_string();

    let output = run_ok(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--indicator-lexicon",
        &lexicon,
        "--format",
        "csv",
        "--out",
        &fx.arg("with.csv"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("with indicator"), "stderr: {stderr}");

    run_ok(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--no-indicator",
        "--format",
        "arff",
        "--out",
        &fx.arg("without.arff"),
    ]);

    let with = dataset::import_from_path(&fx.path("with.csv"), Format::Csv).unwrap();
    let without = dataset::import_from_path(&fx.path("without.arff"), Format::Arff).unwrap();
    assert_eq!(with.len(), 11);
    assert_eq!(without.len(), 11);
    let lexicon_len = argmine::features::IndicatorLexicon::from_file(&lexicon_path())
        .unwrap()
        .len();
    assert_eq!(with.dim(), without.dim() + lexicon_len + 1);
    assert_eq!(with.class_counts, [1, 2, 3, 5]);
}

#[test]
fn extract_requires_lexicon_when_indicator_on() {
    let fx = Fixture::new();
    ingest(&fx);
    let output = run_err(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--format",
        "csv",
        "--out",
        &fx.arg("x.csv"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--indicator-lexicon"), "stderr: {stderr}");
}

#[test]
fn extract_rejects_fold_vocab_scope() {
    let fx = Fixture::new();
    ingest(&fx);
    let output = run_err(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--no-indicator",
        "--vocab-scope",
        "fold",
        "--format",
        "csv",
        "--out",
        &fx.arg("x.csv"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("argmine cv"), "stderr: {stderr}");
}

fn read_report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cv_reports_consistent_confusion_matrix() {
    let fx = Fixture::new();
    ingest(&fx);
    let lexicon = lexicon_path().display().to_string();
    run_ok(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--indicator-lexicon",
        &lexicon,
        "--format",
        "csv",
        "--out",
        &fx.arg("with.csv"),
    ]);
    let output = run_ok(&[
        "cv",
        "--features",
        &fx.arg("with.csv"),
        "--folds",
        "3",
        "--seed",
        "42",
        "--report",
        &fx.arg("report.json"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("3-fold cross validation"),
        "stderr: {stderr}"
    );

    let report = read_report(&fx.path("report.json"));
    assert_eq!(report["folds"], 3);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["total"], 11);
    let confusion = report["confusion"].as_array().unwrap();
    let row_sums: Vec<u64> = confusion
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap())
                .sum()
        })
        .collect();
    assert_eq!(row_sums, vec![1, 2, 3, 5]);
    let trace: u64 = (0..4)
        .map(|i| confusion[i].as_array().unwrap()[i].as_u64().unwrap())
        .sum();
    assert_eq!(report["correct"].as_u64().unwrap(), trace);
    let accuracy = report["accuracy"].as_f64().unwrap();
    assert_eq!(accuracy, trace as f64 / 11.0);
    assert_eq!(report["config"]["folds"], 3);
}

#[test]
fn cv_ablation_of_identical_datasets_has_zero_delta() {
    let fx = Fixture::new();
    ingest(&fx);
    let lexicon = lexicon_path().display().to_string();
    run_ok(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--indicator-lexicon",
        &lexicon,
        "--format",
        "csv",
        "--out",
        &fx.arg("with.csv"),
    ]);
    run_ok(&[
        "cv",
        "--features",
        &fx.arg("with.csv"),
        "--features-b",
        &fx.arg("with.csv"),
        "--ablation",
        "--folds",
        "3",
        "--report",
        &fx.arg("ablation.json"),
    ]);
    let report = read_report(&fx.path("ablation.json"));
    assert_eq!(report["accuracy_delta"].as_f64().unwrap(), 0.0);
    assert!(report["with_indicator"]["accuracy"].is_number());
    assert!(report["without_indicator"]["accuracy"].is_number());
}

#[test]
fn cv_with_fold_scoped_vocabulary_runs_from_instances() {
    let fx = Fixture::new();
    ingest(&fx);
    let lexicon = lexicon_path().display().to_string();
    run_ok(&[
        "cv",
        "--instances",
        &fx.arg("instances.json"),
        "--vocab-scope",
        "fold",
        "--indicator-lexicon",
        &lexicon,
        "--folds",
        "3",
        "--report",
        &fx.arg("fold-report.json"),
    ]);
    let report = read_report(&fx.path("fold-report.json"));
    assert_eq!(report["total"], 11);
    assert_eq!(report["config"]["vocab_scope"], "fold");
}

#[test]
fn cv_rejects_features_with_fold_scope() {
    let fx = Fixture::new();
    ingest(&fx);
    let output = run_err(&[
        "cv",
        "--features",
        &fx.arg("anything.csv"),
        "--vocab-scope",
        "fold",
        "--report",
        &fx.arg("r.json"),
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--instances"), "stderr: {stderr}");
}

#[test]
fn reruns_are_byte_identical_up_to_wall_time() {
    let fx = Fixture::new();
    let lexicon = lexicon_path().display().to_string();

    ingest(&fx);
    let instances_a = fs::read(fx.path("instances.json")).unwrap();
    ingest(&fx);
    let instances_b = fs::read(fx.path("instances.json")).unwrap();
    assert_eq!(instances_a, instances_b);

    let extract = |out: &str| {
        run_ok(&[
            "extract",
            "--instances",
            &fx.arg("instances.json"),
            "--indicator-lexicon",
            &lexicon,
            "--format",
            "arff",
            "--out",
            &fx.arg(out),
        ]);
        fs::read(fx.path(out)).unwrap()
    };
    assert_eq!(extract("a.arff"), extract("b.arff"));

    let cv = |report: &str| {
        run_ok(&[
            "cv",
            "--features",
            &fx.arg("a.arff"),
            "--folds",
            "3",
            "--report",
            &fx.arg(report),
        ]);
        let mut value = read_report(&fx.path(report));
        value["wall_time_s"] = serde_json::json!(0.0);
        value
    };
    assert_eq!(cv("r1.json"), cv("r2.json"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let fx = Fixture::new();
    ingest(&fx);
    let lexicon = lexicon_path().display().to_string();
    run_ok(&[
        "extract",
        "--instances",
        &fx.arg("instances.json"),
        "--indicator-lexicon",
        &lexicon,
        "--format",
        "csv",
        "--out",
        &fx.arg("with.csv"),
    ]);
    fs::write(
        fx.path("config.json"),
        r#"{"folds": 2, "seed": 7, "c": 0.5}"#,
    )
    .unwrap();
    // --folds beats the config file; seed and c come from the file
    run_ok(&[
        "cv",
        "--features",
        &fx.arg("with.csv"),
        "--config",
        &fx.arg("config.json"),
        "--folds",
        "3",
        "--report",
        &fx.arg("report.json"),
    ]);
    let report = read_report(&fx.path("report.json"));
    assert_eq!(report["folds"], 3);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["config"]["c"], 0.5);
}
