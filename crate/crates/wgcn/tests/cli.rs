//! End-to-end tests of the `wgcn` binary on planted corpora.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wgcn_oracle::planted::{generate_planted_corpus, write_text_corpus, PlantedCorpusSpec};

fn wgcn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgcn"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn planted_files(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let spec = PlantedCorpusSpec {
        num_classes: 3,
        docs_per_class: 24,
        class_vocab_size: 15,
        overlap_fraction: 0.2,
        doc_length: 12,
        seed,
    };
    let corpus = generate_planted_corpus(&spec).unwrap();
    write_text_corpus(dir, &corpus).unwrap()
}

fn build_graph(dir: &Path, docs: &Path, meta: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("graph.bin");
    let mut cmd = wgcn();
    cmd.args(["build-graph", "--docs"])
        .arg(docs)
        .arg("--meta")
        .arg(meta)
        .args(["--window", "6", "--min-freq", "1", "--out"])
        .arg(&out)
        .args(extra);
    run_ok(&mut cmd);
    out
}

fn train_run_dir(root: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().contains("train"))
        .collect();
    dirs.sort();
    dirs
}

#[test]
fn graph_round_trips_through_the_loader() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 1);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);
    let artifact = wgcn::artifacts::load_graph(&graph_bin).unwrap();
    assert_eq!(artifact.graph.vocab_size(), artifact.meta.vocab.len());
    assert_eq!(artifact.meta.kind, "npmi");
    assert_eq!(artifact.meta.window_size, Some(6));
    // Rebuilding over the same inputs yields identical bytes.
    let second = dir.path().join("graph2.bin");
    let mut cmd = wgcn();
    cmd.args(["build-graph", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .args(["--window", "6", "--min-freq", "1", "--out"])
        .arg(&second);
    run_ok(&mut cmd);
    assert_eq!(fs::read(&graph_bin).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn threshold_sweep_has_monotone_edge_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 2);
    let mut edge_counts = Vec::new();
    for (i, threshold) in ["0", "0.1", "0.2"].iter().enumerate() {
        let out = dir.path().join(format!("g{i}.bin"));
        let mut cmd = wgcn();
        cmd.args(["build-graph", "--docs"])
            .arg(&docs)
            .arg("--meta")
            .arg(&meta)
            .args([
                "--window",
                "6",
                "--min-freq",
                "1",
                "--threshold",
                threshold,
                "--out",
            ])
            .arg(&out);
        run_ok(&mut cmd);
        let adjacency = wgcn::matio::load_sparse(&out).unwrap();
        edge_counts.push(adjacency.nnz());
    }
    assert!(
        edge_counts.windows(2).all(|w| w[1] <= w[0]),
        "edge counts {edge_counts:?} not non-increasing"
    );
}

#[test]
fn gram_variant_equals_citation_lift_of_order_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PlantedCorpusSpec {
        num_classes: 2,
        docs_per_class: 12,
        class_vocab_size: 10,
        overlap_fraction: 0.3,
        doc_length: 10,
        seed: 4,
    };
    let corpus = generate_planted_corpus(&spec).unwrap();
    let edges = wgcn_oracle::planted::planted_citation_edges(&corpus.labels, 0.3, 0.05, 4);
    let (nodes, edge_file) =
        wgcn_oracle::planted::write_citation_dataset(dir.path(), &corpus, &edges).unwrap();

    let lift0 = dir.path().join("lift0.bin");
    let mut cmd = wgcn();
    cmd.args(["build-graph", "--nodes"])
        .arg(&nodes)
        .arg("--edges")
        .arg(&edge_file)
        .args(["--order", "0", "--out"])
        .arg(&lift0);
    run_ok(&mut cmd);

    let gram = dir.path().join("gram.bin");
    let mut cmd = wgcn();
    cmd.args(["build-graph", "--nodes"])
        .arg(&nodes)
        .arg("--edges")
        .arg(&edge_file)
        .args(["--variant", "gram", "--out"])
        .arg(&gram);
    run_ok(&mut cmd);

    assert_eq!(
        fs::read(&lift0).unwrap(),
        fs::read(&gram).unwrap(),
        "order-0 citation lift differs from the gram graph"
    );
    let meta = wgcn::artifacts::load_graph(&lift0).unwrap().meta;
    assert_eq!(meta.lift_order, Some(0));
}

#[test]
fn training_is_reproducible_and_learns_the_planted_signal() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 3);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);
    let root = dir.path().join("runs");

    for _ in 0..2 {
        let mut cmd = wgcn();
        cmd.args(["train", "--docs"])
            .arg(&docs)
            .arg("--meta")
            .arg(&meta)
            .arg("--graph")
            .arg(&graph_bin)
            .args([
                "--max-epochs",
                "60",
                "--seed",
                "11",
                "--hidden-dim",
                "32",
                "--out-root",
            ])
            .arg(&root);
        run_ok(&mut cmd);
    }
    let dirs = train_run_dir(&root);
    assert_eq!(dirs.len(), 2, "each rerun gets its own directory");
    for name in ["checkpoint.bin", "history.csv"] {
        assert_eq!(
            fs::read(dirs[0].join(name)).unwrap(),
            fs::read(dirs[1].join(name)).unwrap(),
            "{name} differs between identical reruns"
        );
    }
    let manifest = wgcn::manifest::load_manifest(&dirs[0]).unwrap();
    assert_eq!(manifest.command, "train");
    wgcn::manifest::verify_inputs(&manifest.inputs).unwrap();

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dirs[0].join("report.json")).unwrap()).unwrap();
    assert!(report["test_accuracy"].as_f64().unwrap() >= 0.95);
}

#[test]
fn zero_epoch_training_checkpoints_the_initialization() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 5);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);
    let root = dir.path().join("runs");
    let mut cmd = wgcn();
    cmd.args(["train", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .arg("--graph")
        .arg(&graph_bin)
        .args(["--max-epochs", "0", "--hidden-dim", "16", "--out-root"])
        .arg(&root);
    run_ok(&mut cmd);
    let dirs = train_run_dir(&root);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dirs[0].join("report.json")).unwrap()).unwrap();
    assert_eq!(report["epochs_run"], 0);
    assert_eq!(report["best_epoch"], 0);
    // Random-initialization accuracy sits near chance for 3 balanced classes.
    let acc = report["test_accuracy"].as_f64().unwrap();
    assert!((acc - 1.0 / 3.0).abs() < 0.25, "init accuracy {acc}");
    let history = fs::read_to_string(dirs[0].join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 1, "header only");
}

#[test]
fn predict_labels_unseen_documents_and_all_oov_ties_to_class_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 6);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);
    let root = dir.path().join("runs");

    // A real run for held-out documents.
    let mut cmd = wgcn();
    cmd.args(["train", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .arg("--graph")
        .arg(&graph_bin)
        .args(["--max-epochs", "60", "--hidden-dim", "32", "--out-root"])
        .arg(&root);
    run_ok(&mut cmd);
    let trained = &train_run_dir(&root)[0];

    let spec = PlantedCorpusSpec {
        num_classes: 3,
        docs_per_class: 24,
        class_vocab_size: 15,
        overlap_fraction: 0.2,
        doc_length: 12,
        seed: 777, // unseen documents, same planted distribution
    };
    let unseen = generate_planted_corpus(&spec).unwrap();
    let input = dir.path().join("unseen.txt");
    let text: String = unseen.docs.iter().map(|d| d.join(" ") + "\n").collect();
    fs::write(&input, &text).unwrap();
    let out_file = dir.path().join("labels.tsv");
    let mut cmd = wgcn();
    cmd.args(["predict", "--checkpoint"])
        .arg(trained.join("checkpoint.bin"))
        .arg("--graph")
        .arg(&graph_bin)
        .arg("--input")
        .arg(&input)
        .arg("--out")
        .arg(&out_file);
    run_ok(&mut cmd);
    let labels = fs::read_to_string(&out_file).unwrap();
    let correct = labels
        .lines()
        .enumerate()
        .filter(|(i, line)| {
            let mut parts = line.split('\t');
            let id: usize = parts.next().unwrap().parse().unwrap();
            assert_eq!(id, *i);
            parts.next().unwrap() == format!("class{}", unseen.labels[*i])
        })
        .count();
    assert!(
        correct as f64 / unseen.docs.len() as f64 >= 0.95,
        "only {correct}/{} unseen documents labeled correctly",
        unseen.docs.len()
    );

    // With an untrained (zero-epoch) checkpoint the bias is zero, so an
    // all-OOV document has uniform logits and ties break to class 0.
    let root0 = dir.path().join("runs0");
    let mut cmd = wgcn();
    cmd.args(["train", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .arg("--graph")
        .arg(&graph_bin)
        .args(["--max-epochs", "0", "--hidden-dim", "16", "--out-root"])
        .arg(&root0);
    run_ok(&mut cmd);
    let init_run = &train_run_dir(&root0)[0];
    let oov_input = dir.path().join("oov.txt");
    fs::write(&oov_input, "zzz qqq never seen before\n").unwrap();
    let oov_out = dir.path().join("oov.tsv");
    let mut cmd = wgcn();
    cmd.args(["predict", "--checkpoint"])
        .arg(init_run.join("checkpoint.bin"))
        .arg("--graph")
        .arg(&graph_bin)
        .arg("--input")
        .arg(&oov_input)
        .arg("--out")
        .arg(&oov_out);
    run_ok(&mut cmd);
    assert_eq!(fs::read_to_string(&oov_out).unwrap(), "0\tclass0\n");
}

#[test]
fn tampered_dataset_is_refused_by_hash_check() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 7);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);

    let mut text = fs::read_to_string(&docs).unwrap();
    text.push_str("an extra document\n");
    text.push_str("another one\n");
    fs::write(&docs, text).unwrap();
    let mut extra_meta = fs::read_to_string(&meta).unwrap();
    extra_meta.push_str("x0\ttrain\tclass0\nx1\ttest\tclass1\n");
    fs::write(&meta, extra_meta).unwrap();

    let mut cmd = wgcn();
    cmd.args(["train", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .arg("--graph")
        .arg(&graph_bin)
        .args(["--max-epochs", "5", "--out-root"])
        .arg(dir.path().join("runs"));
    let out = cmd.output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("hash mismatch"), "stderr: {stderr}");
}

#[test]
fn checkpoint_refuses_a_different_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 8);
    let graph_bin = build_graph(dir.path(), &docs, &meta, &[]);
    let root = dir.path().join("runs");
    let mut cmd = wgcn();
    cmd.args(["train", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .arg("--graph")
        .arg(&graph_bin)
        .args(["--max-epochs", "5", "--hidden-dim", "16", "--out-root"])
        .arg(&root);
    run_ok(&mut cmd);
    let trained = &train_run_dir(&root)[0];

    // A graph built with a different window hashes differently.
    let other = dir.path().join("other.bin");
    let mut cmd = wgcn();
    cmd.args(["build-graph", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .args(["--window", "4", "--min-freq", "1", "--out"])
        .arg(&other);
    run_ok(&mut cmd);

    let input = dir.path().join("in.txt");
    fs::write(&input, "c0w000 c0w001\n").unwrap();
    let mut cmd = wgcn();
    cmd.args(["predict", "--checkpoint"])
        .arg(trained.join("checkpoint.bin"))
        .arg("--graph")
        .arg(&other)
        .arg("--input")
        .arg(&input);
    let out = cmd.output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash mismatch"));
}

#[test]
fn dataset_stats_prints_table_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 9);
    let mut cmd = wgcn();
    cmd.args(["dataset", "stats", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta);
    let out = run_ok(&mut cmd);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "docs\ttrain\tdev\ttest\twords\tclasses\tavg_len"
    );
    let fields: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(fields[0], "72");
    assert_eq!(fields[1], "48");
    assert_eq!(fields[3], "24");
    assert_eq!(fields[5], "3");
}

#[test]
fn sweep_emits_parseable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, meta) = planted_files(dir.path(), 10);
    let root = dir.path().join("runs");
    let mut cmd = wgcn();
    cmd.args(["sweep", "--docs"])
        .arg(&docs)
        .arg("--meta")
        .arg(&meta)
        .args([
            "--axis",
            "order",
            "--values",
            "0,1",
            "--trials",
            "2",
            "--window",
            "6",
            "--min-freq",
            "1",
            "--max-epochs",
            "30",
            "--hidden-dim",
            "16",
            "--out-root",
        ])
        .arg(&root);
    run_ok(&mut cmd);
    let sweep_dir = fs::read_dir(&root).unwrap().next().unwrap().unwrap().path();
    let csv = fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    let (axis, rows) = wgcn::eval::sweep_from_csv(&csv).unwrap();
    assert_eq!(axis, "order");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].trial_accuracies.len(), 2);
}
