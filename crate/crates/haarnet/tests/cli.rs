mod common;

use common::{code, ok, point_archive, point_dataset, run, s};
use haarnet::archive::ChainArchive;
use haarnet::matrix_file::{read_matrix, write_matrix};
use haarnet_core::dense::Matrix;
use haarnet_core::graph::{Dataset, Graph, Label, Task};

#[test]
fn prepare_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (dir, name) = point_dataset(tmp.path(), 6, 2);
    let a = tmp.path().join("a.hca");
    let b = tmp.path().join("b.hca");
    let out = ok(&["prepare", "--tu", s(&dir), "--name", &name, "--out", s(&a), "--seed", "4"]);
    assert!(out.contains("N_max"), "{out}");
    ok(&["prepare", "--tu", s(&dir), "--name", &name, "--out", s(&b), "--seed", "4"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let archive = ChainArchive::load(&a).unwrap();
    assert_eq!(archive.records.len(), 18);
    assert_eq!(archive.params.seed, 4);
}

#[test]
fn gen_pointpattern_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, name) = point_dataset(tmp.path(), 4, 9);
    let b = tmp.path().join("again");
    ok(&[
        "gen-pointpattern", "--out", s(&b), "--per-class", "4", "--min-points", "20", "--max-points", "40",
        "--hd-sweeps", "50", "--seed", "9",
    ]);
    for suffix in ["A", "graph_indicator", "graph_labels", "node_attributes", "meta"] {
        let ext = if suffix == "meta" { "json" } else { "txt" };
        let f = format!("{name}_{suffix}.{ext}");
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn train_reports_are_deterministic_and_single_seed_omits_std() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = point_archive(tmp.path(), 8);
    let r1 = tmp.path().join("r1.json");
    let r2 = tmp.path().join("r2.json");
    let args = |out: &str| {
        vec![
            "train".to_string(), "--archive".into(), s(&archive).into(), "--repeats".into(), "2".into(),
            "--max-epochs".into(), "4".into(), "--hidden-size".into(), "8".into(), "--seed".into(), "3".into(),
            "--out".into(), out.into(),
        ]
    };
    let a1: Vec<String> = args(s(&r1));
    let a2: Vec<String> = args(s(&r2));
    let table = ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(table.contains("test accuracy"), "{table}");
    ok(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    let v1: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r1).unwrap()).unwrap();
    let v2: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r2).unwrap()).unwrap();
    for k in 0..2 {
        assert_eq!(v1["runs"][k]["epochs"], v2["runs"][k]["epochs"]);
        assert_eq!(v1["runs"][k]["test_metric"], v2["runs"][k]["test_metric"]);
    }
    assert_eq!(v1["runs"][1]["model_seed"], 4);
    assert!(v1["summary"]["test_metric"]["std"].is_number());

    let json = ok(&[
        "train", "--archive", s(&archive), "--split-seeds", "5", "--max-epochs", "2", "--hidden-size", "8",
        "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["summary"]["repeats"], 1);
    assert!(v["summary"]["test_metric"].get("std").is_none());
    assert_eq!(v["runs"][0]["epochs"].as_array().unwrap().len(), 3);
}

#[test]
fn incompatible_pooling_depth_is_refused_before_training() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = point_archive(tmp.path(), 4);
    let out = run(&["train", "--archive", s(&archive), "--num-poolings", "3", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("num_poolings = 3"), "{err}");
}

fn constant_graph_archive(root: &std::path::Path) -> std::path::PathBuf {
    let graphs = (0..3)
        .map(|id| {
            let n = 6 + 4 * id;
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).chain([(0, n / 2)]).collect();
            Graph::from_edges(id, n, &edges, Matrix::filled(n, 2, 1.0), Some(Label::Class(id % 2))).unwrap()
        })
        .collect();
    let ds = Dataset::new("rings", Task::Classification { num_classes: 2 }, graphs).unwrap();
    let dir = root.join("rings");
    std::fs::create_dir_all(&dir).unwrap();
    haarnet::tu::write_tu_dataset(&ds, &dir, "rings").unwrap();
    let out = root.join("rings.hca");
    ok(&["prepare", "--tu", s(&dir), "--out", s(&out)]);
    out
}

#[test]
fn transform_round_trip_and_constant_signal() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = constant_graph_archive(tmp.path());
    let n = 14usize;
    let c = tmp.path().join("c.txt");
    let summary = ok(&["transform", "--archive", s(&archive), "--graph-id", "2", "--direction", "adjoint", "--out", s(&c)]);
    assert!(summary.contains("low-pass"), "{summary}");
    let coeffs = read_matrix(&c).unwrap();
    assert_eq!(coeffs.shape(), (n, 2));
    // Constant signals only excite low-pass columns, and energy is preserved.
    let a = ChainArchive::load(&archive).unwrap();
    let low = a.records[2].bases[a.records[2].chain.finest()].num_lowpass();
    for j in 0..2 {
        assert!((low..n).all(|i| coeffs[(i, j)].abs() < 1e-12));
        let energy: f64 = (0..n).map(|i| coeffs[(i, j)].powi(2)).sum();
        assert!((energy - n as f64).abs() < 1e-10);
    }
    // With a single collapse step the first column is the constant 1/√N.
    let flat = tmp.path().join("flat.hca");
    ok(&["prepare", "--tu", s(&tmp.path().join("rings")), "--levels", "1", "--collapse-last", "true", "--out", s(&flat)]);
    let fc = tmp.path().join("fc.txt");
    ok(&["transform", "--archive", s(&flat), "--graph-id", "2", "--direction", "adjoint", "--out", s(&fc)]);
    let fc = read_matrix(&fc).unwrap();
    for j in 0..2 {
        assert!((fc[(0, j)] - (n as f64).sqrt()).abs() < 1e-12);
        assert!((1..n).all(|i| fc[(i, j)].abs() < 1e-12));
    }

    let x = Matrix::from_fn(n, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.7);
    let xp = tmp.path().join("x.txt");
    write_matrix(&xp, &x).unwrap();
    let cp = tmp.path().join("cx.txt");
    let yp = tmp.path().join("y.txt");
    ok(&["transform", "--archive", s(&archive), "--graph-id", "2", "--direction", "adjoint", "--signal", s(&xp), "--out", s(&cp)]);
    ok(&["transform", "--archive", s(&archive), "--graph-id", "2", "--direction", "forward", "--signal", s(&cp), "--out", s(&yp)]);
    let y = read_matrix(&yp).unwrap();
    assert!(y.max_abs_diff(&x).unwrap() < 1e-9);

    let coarse = a.records[2].chain.num_nodes(1);
    let l1 = Matrix::from_fn(coarse, 1, |i, _| i as f64);
    let l1p = tmp.path().join("l1.txt");
    write_matrix(&l1p, &l1).unwrap();
    let pp = tmp.path().join("p.txt");
    ok(&["transform", "--archive", s(&archive), "--graph-id", "2", "--direction", "pool", "--level", "1", "--signal", s(&l1p), "--out", s(&pp)]);
    assert_eq!(read_matrix(&pp).unwrap().shape(), (1, 1));
    let stdout = ok(&["transform", "--archive", s(&archive), "--graph-id", "2", "--direction", "pool"]);
    assert!(stdout.starts_with(&format!("{} 2\n", a.records[2].chain.num_nodes(1))), "{stdout}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&["prepare"]), 2);
    assert_eq!(code(&["no-such-verb"]), 2);
    assert_eq!(code(&["bench", "--repetitions", "0"]), 2);
    let missing = tmp.path().join("missing.hca");
    assert_eq!(code(&["train", "--archive", s(&missing)]), 3);
    let junk = tmp.path().join("junk.hca");
    std::fs::write(&junk, b"not an archive").unwrap();
    assert_eq!(code(&["transform", "--archive", s(&junk), "--graph-id", "0", "--direction", "adjoint"]), 3);

    let archive = constant_graph_archive(tmp.path());
    let signal = tmp.path().join("bad.txt");
    write_matrix(&signal, &Matrix::zeros(3, 1)).unwrap();
    assert_eq!(code(&["transform", "--archive", s(&archive), "--graph-id", "0", "--direction", "adjoint", "--signal", s(&signal)]), 3);

    let mut a = ChainArchive::load(&archive).unwrap();
    for rec in &mut a.records {
        let j = rec.chain.finest();
        let b = &rec.bases[j];
        let m = b.matrix();
        let values: Vec<f64> = m.values().iter().map(|v| v * 1.01).collect();
        let bad = haarnet_core::sparse::CscMatrix::from_raw(m.rows(), m.cols(), m.col_ptr().to_vec(), m.row_indices().to_vec(), values).unwrap();
        rec.bases[j] = haarnet_core::basis::HaarBasis::from_parts(b.level, bad, b.num_lowpass(), b.creation_level().to_vec(), b.home_cluster().to_vec()).unwrap();
    }
    let corrupt = tmp.path().join("corrupt.hca");
    a.save(&corrupt).unwrap();
    assert_eq!(code(&["transform", "--archive", s(&corrupt), "--graph-id", "0", "--direction", "adjoint"]), 4);

    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "hidden = 3\n").unwrap();
    let out = run(&["bench", "--repetitions", "1", "--depths", "2", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:1"));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = point_archive(tmp.path(), 4);
    let cfg = tmp.path().join("exp.cfg");
    std::fs::write(&cfg, "hidden_size = 4\nmax_epochs = 1\nrepeats = 1\nlearning_rate = 0.05\n").unwrap();
    let json = ok(&["train", "--archive", s(&archive), "--config", s(&cfg), "--hidden-size", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["config"]["hidden_size"], 6);
    assert_eq!(v["config"]["max_epochs"], 1);
    assert_eq!(v["config"]["learning_rate"], 0.05);
}

#[test]
fn weighted_regression_prepare_and_train() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = haarnet_core::synth::edge_weight_regression(20, 5, 9, 0.5, 2).unwrap();
    let g = tmp.path().join("graphs.txt");
    let t = tmp.path().join("targets.txt");
    haarnet::matrix_file::write_weighted_graphs(&ds, &g, &t).unwrap();
    let archive = tmp.path().join("w.hca");
    ok(&["prepare", "--weighted", s(&g), "--targets", s(&t), "--out", s(&archive)]);
    let ckpt = tmp.path().join("m.ckpt");
    let json = ok(&[
        "train", "--archive", s(&archive), "--repeats", "1", "--max-epochs", "3", "--hidden-size", "8",
        "--checkpoint", s(&ckpt), "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["metric"], "mae");
    let c = haarnet::checkpoint::Checkpoint::load(&ckpt).unwrap();
    assert!(c.scaler.is_some());
    assert_eq!(c.task, Task::Regression { num_targets: 1 });
}

#[test]
fn sweep_selects_from_a_small_grid_and_retraining_reproduces_it() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = point_archive(tmp.path(), 8);
    let grid = tmp.path().join("grid.txt");
    std::fs::write(&grid, "learning_rate = 0.01, 0.001\nhidden_size = 8\nnum_poolings = 1, 2, 3\n").unwrap();
    let rep = tmp.path().join("sweep.json");
    let table = ok(&[
        "sweep", "--archive", s(&archive), "--grid", s(&grid), "--repeats", "2", "--max-epochs", "3",
        "--out", s(&rep), "--seed", "1",
    ]);
    assert!(table.contains("skipped"), "{table}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["grid_size"], 6);
    assert_eq!(v["evaluated"], 4);
    let best = v["best_index"].as_u64().unwrap() as usize;
    let entry = v["entries"].as_array().unwrap().iter().find(|e| e["index"] == best).unwrap();
    let lr = v["best_config"]["learning_rate"].to_string();
    let pools = v["best_config"]["num_poolings"].to_string();
    let json = ok(&[
        "train", "--archive", s(&archive), "--repeats", "2", "--max-epochs", "3", "--hidden-size", "8",
        "--learning-rate", &lr, "--num-poolings", &pools, "--seed", "1", "--format", "json",
    ]);
    let r: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mean = r["summary"]["best_val_metric"]["mean"].as_f64().unwrap();
    assert!((mean - entry["val_metric"]["mean"].as_f64().unwrap()).abs() < 1e-9);
}
