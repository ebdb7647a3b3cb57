//! Timing of the matrix-route and chain-route adjoint transforms.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use haarnet_core::basis::{build_all_bases, HaarBasis};
use haarnet_core::chain::{coarsen, Chain, ChainLevel};
use haarnet_core::dense::Matrix;
use haarnet_core::synth;
use haarnet_core::transform::{adjoint_haar_dense, adjoint_haar_fast};
use serde::Serialize;

use crate::archive::ChainArchive;
use crate::{Error, Result};

/// Median timings of one size bucket `[lo, hi)` of finest-level node counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub lo: usize,
    pub hi: usize,
    pub graphs: usize,
    pub dense_ns_per_node: f64,
    pub fast_ns_per_node: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Power-of-two bucket holding `n`.
pub fn bucket(n: usize) -> (usize, usize) {
    let hi = (n + 1).next_power_of_two();
    (hi / 2, hi)
}

fn time_ns(reps: usize, mut f: impl FnMut()) -> Vec<f64> {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_nanos() as f64
        })
        .collect()
}

/// Time both routes on `(chain, bases, signal)` triples.
pub fn bench_items<'a, I>(items: I, repetitions: usize) -> Result<Vec<BenchRow>>
where
    I: IntoIterator<Item = (&'a Chain, &'a [HaarBasis], &'a Matrix)>,
{
    if repetitions == 0 {
        return Err(Error::Usage("repetitions must be at least 1".into()));
    }
    let mut buckets: std::collections::BTreeMap<usize, (usize, usize, Vec<f64>, Vec<f64>)> = Default::default();
    for (chain, bases, x) in items {
        let top = chain.finest();
        let n = chain.num_nodes(top) as f64;
        // Warm-up, and a guard that both routes agree.
        let dense = adjoint_haar_dense(&bases[top], x)?;
        let fast = adjoint_haar_fast(chain, bases, x)?;
        if dense.max_abs_diff(&fast[top])? > 1e-8 {
            return Err(Error::Numerical("fast and dense adjoint transforms disagree".into()));
        }
        let d = time_ns(repetitions, || {
            black_box(adjoint_haar_dense(&bases[top], black_box(x)).unwrap());
        });
        let f = time_ns(repetitions, || {
            black_box(adjoint_haar_fast(chain, bases, black_box(x)).unwrap());
        });
        let (lo, hi) = bucket(chain.num_nodes(top));
        let e = buckets.entry(lo).or_insert_with(|| (hi, 0, Vec::new(), Vec::new()));
        e.1 += 1;
        e.2.extend(d.iter().map(|t| t / n));
        e.3.extend(f.iter().map(|t| t / n));
    }
    Ok(buckets
        .into_iter()
        .map(|(lo, (hi, graphs, mut d, mut f))| BenchRow {
            lo,
            hi,
            graphs,
            dense_ns_per_node: median(&mut d),
            fast_ns_per_node: median(&mut f),
        })
        .collect())
}

/// Benchmark every graph of an archive on its own features.
pub fn bench_archive(archive: &ChainArchive, repetitions: usize) -> Result<Vec<BenchRow>> {
    let items: Vec<(&Chain, &[HaarBasis], &Matrix)> = archive
        .records
        .iter()
        .zip(archive.dataset.graphs())
        .map(|(r, g)| (&r.chain, r.bases.as_slice(), g.features()))
        .collect();
    bench_items(items, repetitions)
}

/// A chain on a ring of `branching^depth` nodes where every parent has
/// exactly `branching` consecutive children.
pub fn balanced_chain(branching: usize, depth: usize) -> Result<Chain> {
    if branching < 2 || depth == 0 {
        return Err(Error::Usage("balanced chains need branching ≥ 2 and depth ≥ 1".into()));
    }
    let n = branching.pow(depth as u32);
    let mut adjacency = synth::ring(n);
    let mut levels = Vec::new();
    let mut size = n;
    for _ in 0..depth {
        let parent: Vec<usize> = (0..size).map(|v| v / branching).collect();
        let coarse = coarsen(&adjacency, &parent)?;
        levels.push(ChainLevel {
            adjacency,
            parent,
            node_order: (0..size).collect(),
        });
        adjacency = coarse;
        size /= branching;
    }
    levels.push(ChainLevel {
        adjacency,
        parent: Vec::new(),
        node_order: (0..size).collect(),
    });
    levels.reverse();
    Ok(Chain::from_levels(levels)?)
}

/// Benchmark balanced chains with the given finest exponents, using a
/// seeded `N × features` signal.
pub fn bench_balanced(branching: usize, depths: &[usize], features: usize, repetitions: usize, seed: u64) -> Result<Vec<BenchRow>> {
    use rand::Rng as _;
    let mut rng = haarnet_core::rng_from_seed(seed);
    let mut owned = Vec::new();
    for &depth in depths {
        let chain = balanced_chain(branching, depth)?;
        let bases = build_all_bases(&chain)?;
        let n = chain.num_nodes(chain.finest());
        let x = Matrix::from_fn(n, features, |_, _| rng.gen_range(-1.0..1.0));
        owned.push((chain, bases, x));
    }
    bench_items(owned.iter().map(|(c, b, x)| (c, b.as_slice(), x)), repetitions)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = format!("{:>14} {:>7} {:>16} {:>16} {:>7}\n", "nodes", "graphs", "dense ns/node", "fast ns/node", "ratio");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>14} {:>7} {:>16.1} {:>16.1} {:>7.2}",
            format!("[{}, {})", r.lo, r.hi),
            r.graphs,
            r.dense_ns_per_node,
            r.fast_ns_per_node,
            r.fast_ns_per_node / r.dense_ns_per_node
        );
    }
    s
}
