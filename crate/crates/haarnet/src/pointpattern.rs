//! Parallel point-pattern dataset generation and its on-disk form.
//!
//! The dataset is written in TU layout, next to a `<name>_meta.json`
//! sidecar holding the generator settings and per-graph metadata.

use std::path::Path;

use haarnet_core::graph::Dataset;
use haarnet_core::pointgen::{
    assemble_point_dataset, count_overlaps, point_dataset_name, Boundary, PointClass, PointDatasetConfig, PointPattern,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::text::write_file;
use crate::tu::write_tu_dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternMeta {
    pub graph_id: usize,
    pub class: &'static str,
    pub label: usize,
    pub num_points: usize,
    pub volume_fraction: f64,
    pub radius: f64,
    pub seed: u64,
    pub threshold: f64,
    pub num_edges: usize,
    /// Pairs closer than `2r`; always 0 for RSA and HD.
    pub overlaps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorMeta {
    pub name: String,
    pub min_points: usize,
    pub max_points: usize,
    pub counts: [usize; 3],
    pub phi_rsa: f64,
    pub phi_hd: f64,
    pub disk_boundary: &'static str,
    pub graph_boundary: &'static str,
    pub threshold_multiplier: f64,
    pub hd_sweeps: usize,
    pub seed: u64,
    pub graphs: Vec<PatternMeta>,
}

pub fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
    }
}

pub fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    match s {
        "periodic" => Ok(Boundary::Periodic),
        "open" => Ok(Boundary::Open),
        _ => Err(format!("unknown boundary `{s}` (expected periodic or open)")),
    }
}

/// Generate every pattern in parallel; the result does not depend on the
/// number of threads.
pub fn generate(cfg: &PointDatasetConfig, keep_points: bool) -> Result<(Dataset, GeneratorMeta)> {
    let jobs = cfg.jobs()?;
    let results = jobs
        .par_iter()
        .map(|job| {
            let (pattern, graph) = cfg.run_job(job).map_err(|source| Error::Graph {
                graph_id: job.graph_id,
                source,
            })?;
            Ok((meta_of(cfg, &pattern, &graph, job.graph_id, keep_points), graph))
        })
        .collect::<Result<Vec<_>>>()?;
    let (metas, graphs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let dataset = assemble_point_dataset(cfg, graphs)?;
    let meta = GeneratorMeta {
        name: point_dataset_name(cfg),
        min_points: cfg.min_points,
        max_points: cfg.max_points,
        counts: cfg.counts,
        phi_rsa: cfg.phi_rsa,
        phi_hd: cfg.phi_hd,
        disk_boundary: boundary_name(cfg.disk_boundary),
        graph_boundary: boundary_name(cfg.graph_boundary),
        threshold_multiplier: cfg.threshold_multiplier,
        hd_sweeps: cfg.hd_sweeps,
        seed: cfg.seed,
        graphs: metas,
    };
    Ok((dataset, meta))
}

fn meta_of(
    cfg: &PointDatasetConfig,
    p: &PointPattern,
    g: &haarnet_core::graph::Graph,
    graph_id: usize,
    keep_points: bool,
) -> PatternMeta {
    let job_threshold = cfg.threshold(&haarnet_core::pointgen::PatternJob {
        graph_id,
        class: p.class,
        config: p.config,
    });
    let overlaps = match p.class {
        PointClass::Poisson => 0,
        _ => count_overlaps(&p.points, p.radius(), cfg.disk_boundary),
    };
    PatternMeta {
        graph_id,
        class: p.class.name(),
        label: p.class.label(),
        num_points: p.points.len(),
        volume_fraction: p.config.volume_fraction,
        radius: p.radius(),
        seed: p.config.seed,
        threshold: job_threshold,
        num_edges: g.num_edges(),
        overlaps,
        points: keep_points.then(|| p.points.clone()),
    }
}

/// Write the TU files and the JSON sidecar into `dir`.
pub fn write_generated(dataset: &Dataset, meta: &GeneratorMeta, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_tu_dataset(dataset, dir, &dataset.name)?;
    let path = dir.join(format!("{}_meta.json", dataset.name));
    write_file(&path, &(serde_json::to_string_pretty(meta)? + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PointDatasetConfig {
        PointDatasetConfig {
            min_points: 20,
            max_points: 30,
            counts: [2, 2, 2],
            hd_sweeps: 20,
            seed: 5,
            ..PointDatasetConfig::default()
        }
    }

    #[test]
    fn parallel_generation_matches_sequential() {
        let cfg = small();
        let (ds, meta) = generate(&cfg, false).unwrap();
        assert_eq!(ds, haarnet_core::pointgen::gen_pointpattern_dataset(&cfg).unwrap());
        assert_eq!(meta.graphs.len(), 6);
        assert!(meta.graphs.iter().all(|g| g.overlaps == 0 && g.points.is_none()));
        assert_eq!(meta.graphs[4].class, PointClass::Rsa.name());
    }

    #[test]
    fn written_dataset_reloads() {
        let tmp = tempfile::tempdir().unwrap();
        let (ds, meta) = generate(&small(), true).unwrap();
        write_generated(&ds, &meta, tmp.path()).unwrap();
        let back = crate::tu::load_tu_dataset(tmp.path(), &ds.name).unwrap();
        assert_eq!(back.len(), 6);
        for (a, b) in back.graphs().iter().zip(ds.graphs()) {
            assert_eq!(a.adjacency(), b.adjacency());
            assert_eq!(a.label, b.label);
        }
        let side = std::fs::read_to_string(tmp.path().join(format!("{}_meta.json", ds.name))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&side).unwrap();
        assert_eq!(v["graphs"][0]["points"].as_array().unwrap().len(), meta.graphs[0].num_points);
    }
}
