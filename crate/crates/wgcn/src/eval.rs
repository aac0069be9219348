//! Metrics, repeated-run statistics, order sweeps, and the timing harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use wgcn_core::model::{predict, train, TrainConfig, TrainData};
use wgcn_core::wgraph::WordGraph;
use wgcn_core::SparseMatrix;

use crate::alloc_track;
use crate::error::{Error, Result};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Fraction of predictions that match their labels.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty batch".into()));
    }
    if predictions.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions against {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let correct = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p == y)
        .count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Per-class precision and recall; empty denominators yield 0.
pub fn precision_recall(
    predictions: &[usize],
    labels: &[usize],
    num_classes: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut true_pos = vec![0usize; num_classes];
    let mut predicted = vec![0usize; num_classes];
    let mut actual = vec![0usize; num_classes];
    for (&p, &y) in predictions.iter().zip(labels) {
        predicted[p] += 1;
        actual[y] += 1;
        if p == y {
            true_pos[p] += 1;
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = (0..num_classes)
        .map(|c| ratio(true_pos[c], predicted[c]))
        .collect();
    let recall = (0..num_classes)
        .map(|c| ratio(true_pos[c], actual[c]))
        .collect();
    (precision, recall)
}

/// Everything recorded about a single trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub accuracy: f64,
    pub per_class_precision: Vec<f64>,
    pub per_class_recall: Vec<f64>,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub wall_time_per_epoch_ms: f64,
    pub peak_memory_bytes: u64,
}

/// Mean, sample standard deviation, and the per-trial reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStats {
    pub mean: f64,
    pub stddev: f64,
    pub reports: Vec<RunReport>,
}

pub fn mean_and_sample_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn run_one_trial(
    config: &TrainConfig,
    data: &TrainData,
    graph: &WordGraph,
    x_test: &SparseMatrix,
    y_test: &[usize],
    seed: u64,
) -> Result<RunReport> {
    let trial_config = TrainConfig {
        seed,
        ..config.clone()
    };
    let started = Instant::now();
    let outcome = train(data, graph, &trial_config)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let predictions = predict(x_test, graph, &outcome.params, &trial_config)?;
    let acc = accuracy(&predictions, y_test)?;
    let (precision, recall) = precision_recall(&predictions, y_test, data.num_classes);
    let epochs = outcome.history.len();
    Ok(RunReport {
        seed,
        accuracy: acc,
        per_class_precision: precision,
        per_class_recall: recall,
        epochs_run: epochs,
        best_epoch: outcome.best_epoch,
        wall_time_per_epoch_ms: if epochs > 0 {
            elapsed_ms / epochs as f64
        } else {
            elapsed_ms
        },
        peak_memory_bytes: alloc_track::peak_bytes(),
    })
}

/// Train and evaluate `trials` times with per-trial seeds `base_seed + i`,
/// reporting test accuracy statistics. Sequential unless `parallel`; either
/// way per-trial seeding keeps results identical.
#[allow(clippy::too_many_arguments)]
pub fn repeated_runs(
    config: &TrainConfig,
    data: &TrainData,
    graph: &WordGraph,
    x_test: &SparseMatrix,
    y_test: &[usize],
    trials: usize,
    parallel: bool,
) -> Result<RunStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..trials).map(|i| config.seed + i as u64).collect();
    let reports: Vec<RunReport> = if parallel {
        let mut slots: Vec<Option<Result<RunReport>>> = (0..trials).map(|_| None).collect();
        std::thread::scope(|scope| {
            for (slot, &seed) in slots.iter_mut().zip(&seeds) {
                scope.spawn(move || {
                    *slot = Some(run_one_trial(config, data, graph, x_test, y_test, seed));
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("trial thread completed"))
            .collect::<Result<_>>()?
    } else {
        seeds
            .iter()
            .map(|&seed| run_one_trial(config, data, graph, x_test, y_test, seed))
            .collect::<Result<_>>()?
    };
    let accs: Vec<f64> = reports.iter().map(|r| r.accuracy).collect();
    let (mean, stddev) = mean_and_sample_stddev(&accs);
    Ok(RunStats {
        mean,
        stddev,
        reports,
    })
}

/// One row of an order sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: usize,
    pub mean: f64,
    pub stddev: f64,
    pub trial_accuracies: Vec<f64>,
}

/// Sweep a propagation/lift order: `setup_for_order` yields the graph and
/// configuration to use at each order, and every order gets `trials`
/// repeated runs.
pub fn order_sweep<F>(
    data: &TrainData,
    x_test: &SparseMatrix,
    y_test: &[usize],
    orders: &[usize],
    trials: usize,
    setup_for_order: F,
) -> Result<Vec<SweepRow>>
where
    F: Fn(usize) -> Result<(WordGraph, TrainConfig)>,
{
    if orders.is_empty() {
        return Err(Error::InvalidArgument("no orders to sweep".into()));
    }
    orders
        .iter()
        .map(|&order| {
            let (graph, config) = setup_for_order(order)?;
            let stats = repeated_runs(&config, data, &graph, x_test, y_test, trials, false)?;
            Ok(SweepRow {
                value: order,
                mean: stats.mean,
                stddev: stats.stddev,
                trial_accuracies: stats.reports.iter().map(|r| r.accuracy).collect(),
            })
        })
        .collect()
}

/// Long-format CSV: one row per (value, trial). Headers are fixed and the
/// numeric formatting is Rust's shortest-roundtrip `Display`, so emitted
/// files are locale-independent and parse back exactly.
pub fn sweep_to_csv(axis: &str, rows: &[SweepRow]) -> String {
    let mut out = String::from("schema_version,axis,value,mean,stddev,trial,accuracy\n");
    for row in rows {
        for (trial, acc) in row.trial_accuracies.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                CSV_SCHEMA_VERSION, axis, row.value, row.mean, row.stddev, trial, acc
            ));
        }
    }
    out
}

pub fn sweep_from_csv(text: &str) -> Result<(String, Vec<SweepRow>)> {
    let bad = |msg: &str| Error::InvalidArgument(format!("sweep csv: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty"))?;
    if header != "schema_version,axis,value,mean,stddev,trial,accuracy" {
        return Err(bad("unexpected header"));
    }
    let mut axis = String::new();
    let mut rows: Vec<SweepRow> = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(&format!("expected 7 fields in `{line}`")));
        }
        axis = fields[1].to_string();
        let value: usize = fields[2].parse().map_err(|_| bad("bad value"))?;
        let mean: f64 = fields[3].parse().map_err(|_| bad("bad mean"))?;
        let stddev: f64 = fields[4].parse().map_err(|_| bad("bad stddev"))?;
        let acc: f64 = fields[6].parse().map_err(|_| bad("bad accuracy"))?;
        match rows.last_mut() {
            Some(last) if last.value == value => last.trial_accuracies.push(acc),
            _ => rows.push(SweepRow {
                value,
                mean,
                stddev,
                trial_accuracies: vec![acc],
            }),
        }
    }
    Ok((axis, rows))
}

/// Per-epoch wall time and allocator peak for one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingReport {
    pub warmup_epochs: usize,
    pub measured_epochs: usize,
    pub median_epoch_ms: f64,
    pub epoch_ms: Vec<f64>,
    pub peak_memory_bytes: u64,
    pub hardware: String,
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Best-effort CPU descriptor for timing reports.
pub fn hardware_descriptor() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|s| s.trim().to_string())
        })
        .unwrap_or_else(|| "unknown CPU".to_string());
    format!(
        "{cpu} ({}, {})",
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

/// Time training epochs: 2 warm-ups, then the median of 10 measured epochs.
pub fn timing_harness(
    config: &TrainConfig,
    data: &TrainData,
    graph: &WordGraph,
) -> Result<TimingReport> {
    const WARMUP: usize = 2;
    const MEASURED: usize = 10;
    let mut trainer = wgcn_core::model::Trainer::new(data, graph, config)?;
    for _ in 0..WARMUP {
        trainer.run_epoch()?;
    }
    alloc_track::reset_peak();
    let mut epoch_ms = Vec::with_capacity(MEASURED);
    for _ in 0..MEASURED {
        let started = Instant::now();
        trainer.run_epoch()?;
        epoch_ms.push(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(TimingReport {
        warmup_epochs: WARMUP,
        measured_epochs: MEASURED,
        median_epoch_ms: median(&epoch_ms),
        epoch_ms,
        peak_memory_bytes: alloc_track::peak_bytes(),
        hardware: hardware_descriptor(),
    })
}
