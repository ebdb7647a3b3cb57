//! Implementations of the CLI verbs.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use haarnet_core::pointgen::{PointDatasetConfig, DEFAULT_HD_SWEEPS, DEFAULT_THRESHOLD_MULTIPLIER};
use haarnet_core::transform::{
    adjoint_haar_fast, adjoint_haar_fast_at, compressive_haar_fast, energy, energy_split, forward_haar,
    forward_haar_fast, WeightCache,
};

use crate::archive::ChainArchive;
use crate::bench::{bench_archive, bench_balanced, format_table};
use crate::checkpoint::Checkpoint;
use crate::cli::{ChainFlags, Cli, Command, Common, Direction, Format, PointArgs, PrepareArgs, TrainFlags};
use crate::config::ExperimentConfig;
use crate::experiment::run_repeats;
use crate::matrix_file::{format_matrix, load_weighted_graphs, read_matrix, write_matrix};
use crate::pointpattern::{generate, parse_boundary, write_generated};
use crate::report::{task_names, ChainSettings, RunReport, Timings, TrainSettings, REPORT_VERSION};
use crate::sweep::{run_sweep, Grid};
use crate::text::write_file;
use crate::tu::load_tu_dataset;
use crate::{Error, Result};

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let mut exp = ExperimentConfig::default();
    if let Some(path) = &cli.common.config {
        exp.apply_file(path)?;
    }
    if let Some(seed) = cli.common.seed {
        set(&mut exp, "seed", seed)?;
    }
    if let Some(t) = cli.common.threads {
        exp.threads = (t > 0).then_some(t);
    }
    if let Some(t) = exp.threads {
        // A second initialisation (e.g. in tests) keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let common = &cli.common;
    match cli.command {
        Command::Prepare(a) => prepare(common, &mut exp, &a),
        Command::Train(a) => {
            apply_train_flags(&mut exp, &a.train)?;
            train(common, &exp, &a.archive, a.checkpoint.as_deref(), a.format)
        }
        Command::Sweep(a) => {
            apply_train_flags(&mut exp, &a.train)?;
            sweep(common, &exp, &a.archive, a.grid.as_deref(), a.budget, a.format)
        }
        Command::Transform(a) => transform(common, &a.archive, a.graph_id, a.signal.as_deref(), a.direction, a.level),
        Command::Bench(a) => bench(common, a.archive.as_deref(), a.repetitions, a.branching, &a.depths, a.features),
        Command::GenPointpattern(a) => gen_pointpattern(common, &a),
    }
}

fn set(exp: &mut ExperimentConfig, key: &str, v: impl ToString) -> Result<()> {
    exp.set(key, &v.to_string()).map_err(|m| Error::Usage(format!("--{}: {m}", key.replace('_', "-"))))
}

fn apply_chain_flags(exp: &mut ExperimentConfig, f: &ChainFlags) -> Result<()> {
    if let Some(v) = f.levels {
        set(exp, "levels", v)?;
    }
    if let Some(v) = f.ratio {
        set(exp, "ratio", v)?;
    }
    if let Some(v) = f.collapse_last {
        set(exp, "collapse_last", v)?;
    }
    if let Some(v) = &f.cluster_method {
        set(exp, "cluster_method", v)?;
    }
    if let Some(v) = f.auto_threshold {
        set(exp, "auto_threshold", v)?;
    }
    Ok(())
}

fn apply_train_flags(exp: &mut ExperimentConfig, f: &TrainFlags) -> Result<()> {
    let pairs: [(&str, Option<String>); 14] = [
        ("learning_rate", f.learning_rate.map(|v| v.to_string())),
        ("weight_decay", f.weight_decay.map(|v| v.to_string())),
        ("batch_size", f.batch_size.map(|v| v.to_string())),
        ("hidden_size", f.hidden_size.map(|v| v.to_string())),
        ("num_poolings", f.num_poolings.map(|v| v.to_string())),
        ("max_epochs", f.max_epochs.map(|v| v.to_string())),
        ("patience", f.patience.map(|v| v.to_string())),
        ("convs_per_block", f.convs_per_block.map(|v| v.to_string())),
        ("mlp_layers", f.mlp_layers.map(|v| v.to_string())),
        ("batch_norm", f.batch_norm.map(|v| v.to_string())),
        ("dropout", f.dropout.map(|v| v.to_string())),
        ("decay_filters", f.decay_filters.map(|v| v.to_string())),
        ("repeats", f.repeats.map(|v| v.to_string())),
        ("split_seeds", f.split_seeds.clone()),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            set(exp, k, v)?;
        }
    }
    Ok(())
}

fn require_out<'a>(common: &'a Common, what: &str) -> Result<&'a Path> {
    common
        .out
        .as_deref()
        .ok_or_else(|| Error::Usage(format!("--out <path> is required for the {what}")))
}

fn stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn prepare(common: &Common, exp: &mut ExperimentConfig, a: &PrepareArgs) -> Result<()> {
    apply_chain_flags(exp, &a.chain)?;
    let out = require_out(common, "archive")?;
    let dataset = match (&a.tu, &a.weighted, &a.targets) {
        (Some(dir), None, _) => {
            let name = match &a.name {
                Some(n) => n.clone(),
                None => dir
                    .file_name()
                    .and_then(|s| s.to_str())
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Usage("cannot derive a dataset name; pass --name".into()))?,
            };
            load_tu_dataset(dir, &name)?
        }
        (None, Some(g), Some(t)) => {
            let name = a.name.clone().unwrap_or_else(|| stem(g));
            load_weighted_graphs(g, t, &name)?
        }
        _ => return Err(Error::Usage("prepare needs --tu <dir> or --weighted <file> --targets <file>".into())),
    };
    log::info!("loaded {} graphs of {}", dataset.len(), dataset.name);
    let start = Instant::now();
    let archive = ChainArchive::build(dataset, exp.chain)?;
    let seconds = start.elapsed().as_secs_f64();
    archive.save(out)?;
    if let Some(j) = &a.json {
        write_file(j, &(serde_json::to_string_pretty(&archive.to_json())? + "\n"))?;
    }
    let mut s = format!(
        "{}: {} graphs, {} coarsening step(s), built in {seconds:.2} s -> {}\n",
        archive.dataset.name,
        archive.records.len(),
        archive.depth(),
        out.display()
    );
    let _ = writeln!(s, "{:>5} {:>7} {:>10} {:>11} {:>11}", "level", "N_max", "nnz", "max dens.", "nnz/bound");
    for l in archive.level_stats() {
        let _ = writeln!(
            s,
            "{:>5} {:>7} {:>10} {:>11.4} {:>11.4}",
            l.level, l.max_nodes, l.total_nnz, l.max_density, l.max_bound_ratio
        );
    }
    stdout(&s)
}

fn stem(p: &Path) -> String {
    p.file_stem().and_then(|s| s.to_str()).unwrap_or("weighted").to_owned()
}

fn load_prepared(path: &Path) -> Result<(ChainArchive, Vec<haarnet_core::nn::PreparedGraph>, f64, f64)> {
    let start = Instant::now();
    let archive = ChainArchive::load(path)?;
    let data = archive.prepared()?;
    let pre = start.elapsed().as_secs_f64();
    let start = Instant::now();
    for (r, g) in archive.records.iter().zip(archive.dataset.graphs()) {
        std::hint::black_box(adjoint_haar_fast(&r.chain, &r.bases, g.features())?);
    }
    Ok((archive, data, pre, start.elapsed().as_secs_f64()))
}

fn train(common: &Common, exp: &ExperimentConfig, archive: &Path, checkpoint: Option<&Path>, format: Format) -> Result<()> {
    let (archive, data, pre, transform_seconds) = load_prepared(archive)?;
    let dataset = &archive.dataset;
    let start = Instant::now();
    let (runs, outcomes, summary) = run_repeats(dataset, &data, exp)?;
    let (task, metric) = task_names(dataset.task);
    let report = RunReport {
        format_version: REPORT_VERSION,
        dataset: dataset.name.clone(),
        num_graphs: dataset.len(),
        task: task.into(),
        output_dim: dataset.task.output_dim(),
        metric: metric.into(),
        config: TrainSettings::from(&exp.train),
        chain: ChainSettings::from(&archive.params),
        runs,
        summary,
        timings: Timings {
            preprocessing_seconds: pre,
            transform_seconds,
            training_seconds: start.elapsed().as_secs_f64(),
        },
    };
    if let Some(path) = checkpoint {
        let mut best = 0;
        for (i, r) in report.runs.iter().enumerate() {
            if crate::sweep::better(dataset.task, r.best_val_metric, report.runs[best].best_val_metric) {
                best = i;
            }
        }
        let o = &outcomes[best];
        let mut config = exp.train.clone();
        config.seed = report.runs[best].model_seed;
        Checkpoint {
            model: o.model.clone(),
            config,
            task: dataset.task,
            scaler: o.scaler.clone(),
        }
        .save(path)?;
        log::info!("saved the model of split {} to {}", report.runs[best].split_seed, path.display());
    }
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match (&common.out, format) {
        (Some(p), _) => {
            write_file(p, &json)?;
            stdout(&report.table())
        }
        (None, Format::Json) => stdout(&json),
        (None, Format::Table) => stdout(&report.table()),
    }
}

fn sweep(
    common: &Common,
    exp: &ExperimentConfig,
    archive: &Path,
    grid: Option<&Path>,
    budget: Option<usize>,
    format: Format,
) -> Result<()> {
    let grid = match grid {
        Some(p) => Grid::from_file(p, &exp.train)?,
        None => Grid::table(),
    };
    let (archive, data, _, _) = load_prepared(archive)?;
    let report = run_sweep(&archive.dataset, &data, exp, &grid, budget, exp.train.seed)?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match (&common.out, format) {
        (Some(p), _) => {
            write_file(p, &json)?;
            stdout(&report.table())
        }
        (None, Format::Json) => stdout(&json),
        (None, Format::Table) => stdout(&report.table()),
    }
}

fn transform(
    common: &Common,
    archive: &Path,
    graph_id: usize,
    signal: Option<&Path>,
    direction: Direction,
    level: Option<usize>,
) -> Result<()> {
    let archive = ChainArchive::load(archive)?;
    let rec = archive
        .record(graph_id)
        .ok_or_else(|| Error::Usage(format!("graph {graph_id} is not in the archive")))?;
    let chain = &rec.chain;
    let j = level.unwrap_or(chain.finest());
    if j > chain.finest() {
        return Err(Error::Usage(format!("level {j} exceeds the finest level {}", chain.finest())));
    }
    let x = match signal {
        Some(p) => read_matrix(p)?,
        None => {
            if j != chain.finest() {
                return Err(Error::Usage("graph features live on the finest level; pass --signal".into()));
            }
            archive.dataset.by_id(graph_id).expect("record has a graph").features().clone()
        }
    };
    let n = chain.num_nodes(j);
    if x.rows() != n {
        return Err(Error::Data(format!("signal has {} rows but level {j} of graph {graph_id} has {n} nodes", x.rows())));
    }
    let basis = &rec.bases[j];
    let wrap = |source| Error::Graph { graph_id, source };
    let (out, summary) = match direction {
        Direction::Adjoint => {
            let c = adjoint_haar_fast_at(chain, &rec.bases, j, &x).map_err(wrap)?.swap_remove(j);
            let (low, high) = energy_split(&c, basis.num_lowpass());
            let s = format!(
                "adjoint at level {j}: signal energy {:.6e}, low-pass {:.6e}, high-pass {:.6e} ({} of {} coefficients low-pass)\n",
                energy(&x),
                low,
                high,
                basis.num_lowpass(),
                n
            );
            (c, s)
        }
        Direction::Forward => {
            let (low, high) = energy_split(&x, basis.num_lowpass());
            let y = if j == chain.finest() {
                forward_haar_fast(chain, &rec.bases, &WeightCache::new(chain), &x).map_err(wrap)?
            } else {
                forward_haar(basis, &x).map_err(wrap)?
            };
            let s = format!(
                "forward at level {j}: coefficient energy low-pass {:.6e}, high-pass {:.6e}; output energy {:.6e}\n",
                low,
                high,
                energy(&y)
            );
            (y, s)
        }
        Direction::Pool => {
            if j == 0 {
                return Err(Error::Usage("the coarsest level cannot be pooled".into()));
            }
            let p = compressive_haar_fast(chain, &rec.bases, j, &x).map_err(wrap)?;
            let kept = energy(&p);
            let total = energy(&x);
            let s = format!(
                "pool level {j} -> {}: {} rows kept, energy {:.6e} of {:.6e} retained, {:.6e} filtered\n",
                j - 1,
                p.rows(),
                kept,
                total,
                total - kept
            );
            (p, s)
        }
    };
    match &common.out {
        Some(p) => {
            write_matrix(p, &out)?;
            stdout(&summary)
        }
        None => {
            eprint!("{summary}");
            stdout(&format_matrix(&out))
        }
    }
}

fn bench(
    common: &Common,
    archive: Option<&Path>,
    repetitions: usize,
    branching: usize,
    depths: &str,
    features: usize,
) -> Result<()> {
    if repetitions == 0 {
        return Err(Error::Usage("--repetitions must be at least 1".into()));
    }
    let rows = match archive {
        Some(p) => bench_archive(&ChainArchive::load(p)?, repetitions)?,
        None => {
            let depths = crate::text::fields(depths)
                .map(|t| t.parse().map_err(|_| Error::Usage(format!("invalid depth `{t}`"))))
                .collect::<Result<Vec<usize>>>()?;
            let seed = common.seed.unwrap_or(0);
            bench_balanced(branching, &depths, features.max(1), repetitions, seed)?
        }
    };
    match &common.out {
        Some(p) => {
            write_file(p, &(serde_json::to_string_pretty(&rows)? + "\n"))?;
            stdout(&format_table(&rows))
        }
        None => stdout(&format_table(&rows)),
    }
}

fn gen_pointpattern(common: &Common, a: &PointArgs) -> Result<()> {
    let out: PathBuf = require_out(common, "dataset directory")?.to_path_buf();
    let mut cfg = PointDatasetConfig {
        min_points: 50,
        max_points: 150,
        counts: [100, 100, 100],
        ..PointDatasetConfig::default()
    };
    if a.full {
        cfg.min_points = 100;
        cfg.max_points = 1000;
        cfg.counts = [5000, 5000, 5000];
        log::warn!("--full generates 15000 patterns of up to 1000 points; expect a long run");
    }
    if let Some(k) = a.per_class {
        cfg.counts = [k, k, k];
    }
    cfg.min_points = a.min_points.unwrap_or(cfg.min_points);
    cfg.max_points = a.max_points.unwrap_or(cfg.max_points);
    cfg.phi_rsa = a.phi_rsa;
    cfg.phi_hd = a.phi_hd;
    cfg.hd_sweeps = a.hd_sweeps.unwrap_or(DEFAULT_HD_SWEEPS);
    cfg.threshold_multiplier = a.threshold_multiplier.unwrap_or(DEFAULT_THRESHOLD_MULTIPLIER);
    cfg.disk_boundary = parse_boundary(&a.disk_boundary).map_err(Error::Usage)?;
    cfg.graph_boundary = parse_boundary(&a.graph_boundary).map_err(Error::Usage)?;
    cfg.seed = common.seed.unwrap_or(0);
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let start = Instant::now();
    let (dataset, meta) = generate(&cfg, a.keep_points)?;
    write_generated(&dataset, &meta, &out)?;
    let edges: usize = meta.graphs.iter().map(|g| g.num_edges).sum();
    let nodes: usize = meta.graphs.iter().map(|g| g.num_points).sum();
    stdout(&format!(
        "{}: {} graphs ({} HD, {} PPP, {} RSA), mean degree {:.2}, generated in {:.1} s -> {}\n",
        dataset.name,
        dataset.len(),
        cfg.counts[0],
        cfg.counts[1],
        cfg.counts[2],
        2.0 * edges as f64 / nodes.max(1) as f64,
        start.elapsed().as_secs_f64(),
        out.display()
    ))
}
