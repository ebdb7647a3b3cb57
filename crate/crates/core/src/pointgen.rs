//! Point patterns in the unit square and the geometric graphs built on them.
//!
//! Three classes: hard disks in equilibrium (Metropolis Monte Carlo), the
//! Poisson point process with a fixed point count, and random sequential
//! adsorption of disks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;
use rand::Rng as _;

use crate::dense::Matrix;
use crate::graph::{Dataset, Graph, Label, Task};
use crate::{Error, Result, Rng};

/// Consecutive rejections after which RSA gives up.
pub const RSA_MAX_CONSECUTIVE_REJECTIONS: u64 = 10_000_000;
/// Highest volume fraction accepted by [`gen_rsa`].
pub const RSA_MAX_FRACTION: f64 = 0.45;
/// Highest volume fraction accepted by [`gen_hd`].
pub const HD_MAX_FRACTION: f64 = 0.5;
pub const DEFAULT_HD_SWEEPS: usize = 2000;
/// Reference fraction that defines the length scale of PPP graphs.
pub const PPP_REFERENCE_FRACTION: f64 = 0.3;
/// Edge threshold in units of the disk radius.
pub const DEFAULT_THRESHOLD_MULTIPLIER: f64 = 5.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    fn delta(self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self {
            Boundary::Open => d,
            Boundary::Periodic => d.min(1.0 - d),
        }
    }

    /// Squared distance between two points under this metric.
    pub fn dist_sq(self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = self.delta(a[0], b[0]);
        let dy = self.delta(a[1], b[1]);
        dx * dx + dy * dy
    }
}

/// Class labels: HD = 0, PPP = 1, RSA = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointClass {
    HardDisk = 0,
    Poisson = 1,
    Rsa = 2,
}

impl PointClass {
    pub const ALL: [PointClass; 3] = [PointClass::HardDisk, PointClass::Poisson, PointClass::Rsa];

    pub fn label(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PointClass::HardDisk => "HD",
            PointClass::Poisson => "PPP",
            PointClass::Rsa => "RSA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConfig {
    pub num_points: usize,
    pub volume_fraction: f64,
    /// Metric used for the hard-core constraint.
    pub boundary: Boundary,
    pub seed: u64,
}

impl PointConfig {
    pub fn new(num_points: usize, volume_fraction: f64, seed: u64) -> Self {
        PointConfig {
            num_points,
            volume_fraction,
            boundary: Boundary::Periodic,
            seed,
        }
    }

    /// `r = √(φ / (π N))`, so that `N π r² = φ`.
    pub fn radius(&self) -> f64 {
        if self.num_points == 0 {
            return 0.0;
        }
        (self.volume_fraction / (core::f64::consts::PI * self.num_points as f64)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_points == 0 {
            return Err(Error::InvalidArgument("a pattern needs at least one point".into()));
        }
        if !(0.0..=0.55).contains(&self.volume_fraction) {
            return Err(Error::InvalidArgument(format!(
                "volume fraction {} outside [0, 0.55]",
                self.volume_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<[f64; 2]>,
    pub class: PointClass,
    pub config: PointConfig,
}

impl PointPattern {
    pub fn radius(&self) -> f64 {
        self.config.radius()
    }
}

/// Pairs (brute force) closer than `2r` under `boundary`.
pub fn count_overlaps(points: &[[f64; 2]], radius: f64, boundary: Boundary) -> usize {
    let contact = 4.0 * radius * radius;
    let mut count = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if boundary.dist_sq(points[i], points[j]) < contact {
                count += 1;
            }
        }
    }
    count
}

/// `N` i.i.d. uniform points.
pub fn gen_ppp(cfg: &PointConfig) -> Result<PointPattern> {
    cfg.validate()?;
    let mut rng = crate::rng_from_seed(cfg.seed);
    let points = (0..cfg.num_points).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    Ok(PointPattern {
        points,
        class: PointClass::Poisson,
        config: *cfg,
    })
}

/// Uniform cell grid for neighbour queries within `reach`.
struct CellGrid {
    side: usize,
    boundary: Boundary,
    cells: Vec<Vec<usize>>,
}

impl CellGrid {
    fn new(reach: f64, boundary: Boundary) -> Self {
        let side = if reach > 0.0 {
            ((1.0 / reach).floor() as usize).clamp(1, 1024)
        } else {
            1
        };
        CellGrid {
            side,
            boundary,
            cells: vec![Vec::new(); side * side],
        }
    }

    fn cell_of(&self, p: [f64; 2]) -> usize {
        let c = |v: f64| ((v * self.side as f64) as usize).min(self.side - 1);
        c(p[1]) * self.side + c(p[0])
    }

    fn insert(&mut self, idx: usize, p: [f64; 2]) {
        let c = self.cell_of(p);
        self.cells[c].push(idx);
    }

    fn remove(&mut self, idx: usize, p: [f64; 2]) {
        let c = self.cell_of(p);
        if let Some(pos) = self.cells[c].iter().position(|&i| i == idx) {
            self.cells[c].swap_remove(pos);
        }
    }

    /// Cells within one step of `p`'s cell, each listed once.
    fn neighbourhood(&self, p: [f64; 2]) -> Vec<usize> {
        let c = self.cell_of(p);
        let (cx, cy) = ((c % self.side) as isize, (c / self.side) as isize);
        let s = self.side as isize;
        let mut out = Vec::with_capacity(9);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (mut x, mut y) = (cx + dx, cy + dy);
                match self.boundary {
                    Boundary::Periodic => {
                        x = x.rem_euclid(s);
                        y = y.rem_euclid(s);
                    }
                    Boundary::Open => {
                        if x < 0 || y < 0 || x >= s || y >= s {
                            continue;
                        }
                    }
                }
                let cell = (y * s + x) as usize;
                if !out.contains(&cell) {
                    out.push(cell);
                }
            }
        }
        out
    }

    /// Whether some point other than `skip` lies closer than `√contact_sq`.
    fn conflicts(&self, points: &[[f64; 2]], p: [f64; 2], contact_sq: f64, skip: usize) -> bool {
        self.neighbourhood(p).into_iter().any(|cell| {
            self.cells[cell]
                .iter()
                .any(|&i| i != skip && self.boundary.dist_sq(points[i], p) < contact_sq)
        })
    }
}

/// Random sequential adsorption: uniform proposals accepted when they keep
/// distance at least `2r` from every accepted disk.
pub fn gen_rsa(cfg: &PointConfig) -> Result<PointPattern> {
    cfg.validate()?;
    if cfg.volume_fraction > RSA_MAX_FRACTION {
        return Err(Error::InvalidArgument(format!(
            "RSA volume fraction {} above {RSA_MAX_FRACTION}",
            cfg.volume_fraction
        )));
    }
    let mut rng = crate::rng_from_seed(cfg.seed);
    let points = rsa_points(cfg, &mut rng)?;
    Ok(PointPattern {
        points,
        class: PointClass::Rsa,
        config: *cfg,
    })
}

fn rsa_points(cfg: &PointConfig, rng: &mut Rng) -> Result<Vec<[f64; 2]>> {
    let r = cfg.radius();
    let contact_sq = 4.0 * r * r;
    let mut grid = CellGrid::new(2.0 * r, cfg.boundary);
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(cfg.num_points);
    let mut rejections = 0u64;
    while points.len() < cfg.num_points {
        let p = [rng.gen::<f64>(), rng.gen::<f64>()];
        if r > 0.0 && grid.conflicts(&points, p, contact_sq, usize::MAX) {
            rejections += 1;
            if rejections >= RSA_MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::RejectionBudgetExceeded {
                    accepted: points.len(),
                    requested: cfg.num_points,
                });
            }
            continue;
        }
        rejections = 0;
        grid.insert(points.len(), p);
        points.push(p);
    }
    Ok(points)
}

/// Diagnostics of a hard-disk run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdStats {
    /// Acceptance rate over the sweeps after tuning stopped.
    pub acceptance_rate: f64,
    /// Final side of the displacement square.
    pub step: f64,
    pub sweeps: usize,
    pub from_rsa: bool,
}

/// Equilibrium hard disks via Metropolis Monte Carlo; see [`gen_hd_with_stats`].
pub fn gen_hd(cfg: &PointConfig, sweeps: usize) -> Result<PointPattern> {
    gen_hd_with_stats(cfg, sweeps).map(|(p, _)| p)
}

/// Starts from RSA at the target fraction when that is feasible, otherwise
/// from a square lattice whose radius is grown to the target. Each sweep
/// proposes one displacement per disk, uniform in a square of side `δ`;
/// `δ` is tuned toward 50% acceptance during the first half of the sweeps
/// and frozen afterwards.
pub fn gen_hd_with_stats(cfg: &PointConfig, sweeps: usize) -> Result<(PointPattern, HdStats)> {
    cfg.validate()?;
    if cfg.volume_fraction > HD_MAX_FRACTION {
        return Err(Error::InvalidArgument(format!(
            "hard-disk volume fraction {} above {HD_MAX_FRACTION}",
            cfg.volume_fraction
        )));
    }
    let mut rng = crate::rng_from_seed(cfg.seed);
    let r = cfg.radius();
    let n = cfg.num_points;

    let rsa = if cfg.volume_fraction <= 0.40 {
        rsa_points(cfg, &mut rng).ok()
    } else {
        None
    };
    let from_rsa = rsa.is_some();
    let (mut points, mut current_r) = match rsa {
        Some(p) => (p, r),
        None => lattice_start(cfg)?,
    };

    let mut grid = CellGrid::new(2.0 * r, cfg.boundary);
    for (i, &p) in points.iter().enumerate() {
        grid.insert(i, p);
    }
    let mut step = r.max(1e-3);
    let mut mc = Metropolis {
        cfg,
        grid: &mut grid,
        points: &mut points,
    };

    // Radius growth for the lattice start.
    let mut growth_sweeps = 0;
    while current_r < r {
        let acc = mc.sweep(current_r, step, &mut rng);
        step = tune(step, acc);
        current_r = r.min(0.5 * min_pair_distance(mc.points, cfg.boundary) * (1.0 - 1e-12));
        growth_sweeps += 1;
        if growth_sweeps > 100_000 {
            return Err(Error::Infeasible(format!(
                "could not grow disks to radius {r} at fraction {}",
                cfg.volume_fraction
            )));
        }
    }

    let tune_until = sweeps / 2;
    let mut accepted = 0.0;
    let mut counted = 0usize;
    for s in 0..sweeps {
        let acc = mc.sweep(r, step, &mut rng);
        if s < tune_until {
            step = tune(step, acc);
        } else {
            accepted += acc;
            counted += 1;
        }
    }
    let acceptance_rate = if counted > 0 { accepted / counted as f64 } else { f64::NAN };
    debug_assert_eq!(n, points.len());
    Ok((
        PointPattern {
            points,
            class: PointClass::HardDisk,
            config: *cfg,
        },
        HdStats {
            acceptance_rate,
            step,
            sweeps,
            from_rsa,
        },
    ))
}

fn tune(step: f64, acceptance: f64) -> f64 {
    let next = if acceptance > 0.5 { step * 1.05 } else { step * 0.95 };
    next.clamp(1e-7, 0.5)
}

struct Metropolis<'c, 'g> {
    cfg: &'c PointConfig,
    grid: &'g mut CellGrid,
    points: &'g mut Vec<[f64; 2]>,
}

impl Metropolis<'_, '_> {
    /// One pass over every disk; returns the acceptance fraction.
    fn sweep(&mut self, radius: f64, step: f64, rng: &mut Rng) -> f64 {
        let contact_sq = 4.0 * radius * radius;
        let n = self.points.len();
        let mut accepted = 0usize;
        for i in 0..n {
            let old = self.points[i];
            let mut p = [
                old[0] + (rng.gen::<f64>() - 0.5) * step,
                old[1] + (rng.gen::<f64>() - 0.5) * step,
            ];
            match self.cfg.boundary {
                Boundary::Periodic => {
                    for v in p.iter_mut() {
                        *v -= v.floor();
                        if *v >= 1.0 {
                            *v = 0.0;
                        }
                    }
                }
                Boundary::Open => {
                    if p.iter().any(|&v| !(0.0..1.0).contains(&v)) {
                        continue;
                    }
                }
            }
            if self.grid.conflicts(self.points, p, contact_sq, i) {
                continue;
            }
            self.grid.remove(i, old);
            self.grid.insert(i, p);
            self.points[i] = p;
            accepted += 1;
        }
        if n == 0 {
            0.0
        } else {
            accepted as f64 / n as f64
        }
    }
}

/// Square lattice with `⌈√N⌉` sites per side (filled row by row) and the
/// largest radius it supports, capped at the target.
fn lattice_start(cfg: &PointConfig) -> Result<(Vec<[f64; 2]>, f64)> {
    let n = cfg.num_points;
    let side = (n as f64).sqrt().ceil() as usize;
    let spacing = 1.0 / side as f64;
    let points: Vec<[f64; 2]> = (0..n)
        .map(|k| [((k % side) as f64 + 0.5) * spacing, ((k / side) as f64 + 0.5) * spacing])
        .collect();
    let r0 = if n > 1 {
        0.5 * min_pair_distance(&points, cfg.boundary) * (1.0 - 1e-12)
    } else {
        cfg.radius()
    };
    if r0 <= 0.0 {
        return Err(Error::Infeasible("degenerate lattice start".into()));
    }
    Ok((points, r0.min(cfg.radius())))
}

/// Smallest pairwise distance (brute force); infinite for fewer than two points.
pub fn min_pair_distance(points: &[[f64; 2]], boundary: Boundary) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(boundary.dist_sq(points[i], points[j]));
        }
    }
    best.sqrt()
}

/// Geometric graph: an edge between points closer than `threshold`, one
/// feature column holding the node degree.
pub fn points_to_graph(
    pattern: &PointPattern,
    threshold: f64,
    boundary: Boundary,
    graph_id: usize,
) -> Result<Graph> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {threshold}")));
    }
    let pts = &pattern.points;
    let n = pts.len();
    let t2 = threshold * threshold;
    let mut edges = Vec::new();
    let mut degree = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            if boundary.dist_sq(pts[i], pts[j]) < t2 {
                edges.push((i, j));
                degree[i] += 1.0;
                degree[j] += 1.0;
            }
        }
    }
    let features = Matrix::column_vector(&degree);
    Graph::from_edges(graph_id, n, &edges, features, Some(Label::Class(pattern.class.label())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDatasetConfig {
    /// Inclusive range of point counts, drawn uniformly per graph.
    pub min_points: usize,
    pub max_points: usize,
    /// Graphs per class, in label order (HD, PPP, RSA).
    pub counts: [usize; 3],
    pub phi_rsa: f64,
    pub phi_hd: f64,
    /// Metric of the hard-core constraint.
    pub disk_boundary: Boundary,
    /// Metric of the edge threshold.
    pub graph_boundary: Boundary,
    pub threshold_multiplier: f64,
    pub hd_sweeps: usize,
    pub seed: u64,
}

impl Default for PointDatasetConfig {
    fn default() -> Self {
        PointDatasetConfig {
            min_points: 100,
            max_points: 1000,
            counts: [5000, 5000, 5000],
            phi_rsa: 0.3,
            phi_hd: 0.5,
            disk_boundary: Boundary::Periodic,
            graph_boundary: Boundary::Open,
            threshold_multiplier: DEFAULT_THRESHOLD_MULTIPLIER,
            hd_sweeps: DEFAULT_HD_SWEEPS,
            seed: 0,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One entry of a generated dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternJob {
    pub graph_id: usize,
    pub class: PointClass,
    pub config: PointConfig,
}

impl PointDatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_points == 0 || self.min_points > self.max_points {
            return Err(Error::InvalidArgument(format!(
                "invalid point-count range [{}, {}]",
                self.min_points, self.max_points
            )));
        }
        if !(self.threshold_multiplier > 0.0) {
            return Err(Error::InvalidArgument("threshold multiplier must be positive".into()));
        }
        if self.phi_rsa > RSA_MAX_FRACTION || self.phi_rsa < 0.0 {
            return Err(Error::InvalidArgument(format!("phi_rsa {} outside [0, {RSA_MAX_FRACTION}]", self.phi_rsa)));
        }
        if self.phi_hd > HD_MAX_FRACTION || self.phi_hd < 0.0 {
            return Err(Error::InvalidArgument(format!("phi_hd {} outside [0, {HD_MAX_FRACTION}]", self.phi_hd)));
        }
        Ok(())
    }

    /// The per-graph configurations, in dataset order. Each graph gets its
    /// own seed, so jobs can run in any order.
    pub fn jobs(&self) -> Result<Vec<PatternJob>> {
        self.validate()?;
        let mut rng = crate::rng_from_seed(self.seed);
        let mut jobs = Vec::new();
        for class in PointClass::ALL {
            for _ in 0..self.counts[class.label()] {
                let graph_id = jobs.len();
                let num_points = rng.gen_range(self.min_points..=self.max_points);
                let volume_fraction = match class {
                    PointClass::HardDisk => self.phi_hd,
                    PointClass::Poisson => 0.0,
                    PointClass::Rsa => self.phi_rsa,
                };
                jobs.push(PatternJob {
                    graph_id,
                    class,
                    config: PointConfig {
                        num_points,
                        volume_fraction,
                        boundary: self.disk_boundary,
                        seed: splitmix64(self.seed ^ splitmix64(graph_id as u64)),
                    },
                });
            }
        }
        Ok(jobs)
    }

    /// Edge threshold for a pattern: the multiplier times the disk radius,
    /// or times `√(φ_ref / (π N))` for PPP.
    pub fn threshold(&self, job: &PatternJob) -> f64 {
        let length = match job.class {
            PointClass::Poisson => PointConfig {
                volume_fraction: PPP_REFERENCE_FRACTION,
                ..job.config
            }
            .radius(),
            _ => job.config.radius(),
        };
        self.threshold_multiplier * length
    }

    /// Generate the pattern and graph of one job.
    pub fn run_job(&self, job: &PatternJob) -> Result<(PointPattern, Graph)> {
        let pattern = match job.class {
            PointClass::HardDisk => gen_hd(&job.config, self.hd_sweeps)?,
            PointClass::Poisson => gen_ppp(&job.config)?,
            PointClass::Rsa => gen_rsa(&job.config)?,
        };
        let graph = points_to_graph(&pattern, self.threshold(job), self.graph_boundary, job.graph_id)?;
        Ok((pattern, graph))
    }
}

pub fn point_dataset_name(cfg: &PointDatasetConfig) -> alloc::string::String {
    format!("PointPattern-phi{:.2}", cfg.phi_rsa)
}

/// Assemble a dataset from graphs in job order.
pub fn assemble_point_dataset(cfg: &PointDatasetConfig, graphs: Vec<Graph>) -> Result<Dataset> {
    Dataset::new(point_dataset_name(cfg), Task::Classification { num_classes: 3 }, graphs)
}

/// Generate the whole dataset sequentially.
pub fn gen_pointpattern_dataset(cfg: &PointDatasetConfig) -> Result<Dataset> {
    let graphs = cfg
        .jobs()?
        .iter()
        .map(|job| cfg.run_job(job).map(|(_, g)| g))
        .collect::<Result<Vec<_>>>()?;
    assemble_point_dataset(cfg, graphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_matches_fraction() {
        let cfg = PointConfig::new(478, 0.3, 0);
        let r = cfg.radius();
        assert!((478.0 * core::f64::consts::PI * r * r - 0.3).abs() < 1e-12);
    }

    #[test]
    fn ppp_is_deterministic() {
        let cfg = PointConfig::new(50, 0.0, 9);
        assert_eq!(gen_ppp(&cfg).unwrap(), gen_ppp(&cfg).unwrap());
        let one = gen_ppp(&PointConfig::new(1, 0.0, 3)).unwrap();
        assert_eq!(one.points.len(), 1);
        assert!(one.points[0].iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn rsa_has_no_overlaps() {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            let cfg = PointConfig {
                boundary,
                ..PointConfig::new(478, 0.30, 5)
            };
            let p = gen_rsa(&cfg).unwrap();
            assert_eq!(p.points.len(), 478);
            assert_eq!(count_overlaps(&p.points, cfg.radius(), boundary), 0);
            assert!(min_pair_distance(&p.points, boundary) >= 2.0 * cfg.radius());
        }
    }

    #[test]
    fn rsa_rejects_dense_fraction() {
        assert!(gen_rsa(&PointConfig::new(100, 0.5, 0)).is_err());
    }

    #[test]
    fn zero_radius_rsa_matches_ppp_stream() {
        let cfg = PointConfig::new(30, 0.0, 4);
        assert_eq!(gen_rsa(&cfg).unwrap().points, gen_ppp(&cfg).unwrap().points);
    }

    #[test]
    fn hard_disks_are_valid() {
        let cfg = PointConfig::new(120, 0.5, 2);
        let (p, stats) = gen_hd_with_stats(&cfg, 200).unwrap();
        assert!(!stats.from_rsa);
        assert_eq!(count_overlaps(&p.points, cfg.radius(), cfg.boundary), 0);
        assert!((0.3..=0.7).contains(&stats.acceptance_rate), "{stats:?}");

        let dilute = PointConfig::new(80, 0.2, 2);
        let (p, stats) = gen_hd_with_stats(&dilute, 100).unwrap();
        assert!(stats.from_rsa);
        assert_eq!(count_overlaps(&p.points, dilute.radius(), dilute.boundary), 0);
    }

    #[test]
    fn graph_from_two_points() {
        let pattern = PointPattern {
            points: vec![[0.1, 0.1], [0.6, 0.1]],
            class: PointClass::Poisson,
            config: PointConfig::new(2, 0.0, 0),
        };
        let g = points_to_graph(&pattern, 0.6, Boundary::Open, 0).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.features().as_slice(), &[1.0, 1.0]);
        let g = points_to_graph(&pattern, 1e-9, Boundary::Open, 0).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.features().as_slice(), &[0.0, 0.0]);
        assert!(points_to_graph(&pattern, 0.0, Boundary::Open, 0).is_err());
    }

    #[test]
    fn small_dataset_is_balanced() {
        let cfg = PointDatasetConfig {
            min_points: 100,
            max_points: 200,
            counts: [5, 5, 5],
            hd_sweeps: 20,
            seed: 11,
            ..PointDatasetConfig::default()
        };
        let ds = gen_pointpattern_dataset(&cfg).unwrap();
        assert_eq!(ds.len(), 15);
        let mut counts = [0; 3];
        for g in ds.graphs() {
            let Some(Label::Class(c)) = g.label else { panic!() };
            counts[c] += 1;
            assert!((100..=200).contains(&g.num_nodes()));
        }
        assert_eq!(counts, [5, 5, 5]);
        assert_eq!(ds, gen_pointpattern_dataset(&cfg).unwrap());
    }
}
