//! Synthetic graphs for tests, benchmarks and smoke experiments.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::dense::Matrix;
use crate::graph::{Dataset, Graph, Label, Task};
use crate::sparse::CscMatrix;
use crate::{Result, Rng};

fn symmetric(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> CscMatrix {
    CscMatrix::from_triplets(n, n, edges.into_iter().flat_map(|(a, b, w)| [(a, b, w), (b, a, w)]))
        .expect("generated edges are in range")
}

/// Erdős–Rényi `G(n, p)` with unit weights.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> CscMatrix {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((a, b, 1.0));
            }
        }
    }
    symmetric(n, edges)
}

/// `G(n, p)` with weights uniform in `[lo, hi)`.
pub fn weighted_erdos_renyi(n: usize, p: f64, lo: f64, hi: f64, rng: &mut Rng) -> CscMatrix {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((a, b, rng.gen_range(lo..hi)));
            }
        }
    }
    symmetric(n, edges)
}

pub fn path(n: usize) -> CscMatrix {
    symmetric(n, (1..n).map(|i| (i - 1, i, 1.0)))
}

pub fn ring(n: usize) -> CscMatrix {
    if n < 3 {
        return path(n);
    }
    symmetric(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

/// Node 0 joined to every other node.
pub fn star(n: usize) -> CscMatrix {
    symmetric(n, (1..n).map(|i| (0, i, 1.0)))
}

pub fn complete(n: usize) -> CscMatrix {
    symmetric(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1.0))))
}

pub fn empty(n: usize) -> CscMatrix {
    CscMatrix::empty(n, n)
}

/// Block-diagonal union; the second graph's nodes follow the first's.
pub fn disjoint_union(a: &CscMatrix, b: &CscMatrix) -> CscMatrix {
    let off = a.rows();
    let n = off + b.rows();
    CscMatrix::from_triplets(
        n,
        n,
        a.triplets().chain(b.triplets().map(|(i, j, w)| (i + off, j + off, w))),
    )
    .expect("union indices are in range")
}

/// `(weighted degree, 1)` per node.
pub fn degree_features(adjacency: &CscMatrix) -> Matrix {
    let deg = adjacency.column_sums();
    Matrix::from_fn(deg.len(), 2, |i, j| if j == 0 { deg[i] } else { 1.0 })
}

/// Weighted random graphs whose target is the total edge weight.
///
/// Node counts are uniform in `[min_nodes, max_nodes]`, edges appear with
/// probability `p` with weights in `[0.5, 2)`, and features are
/// `(weighted degree, 1)`.
pub fn edge_weight_regression(
    count: usize,
    min_nodes: usize,
    max_nodes: usize,
    p: f64,
    seed: u64,
) -> Result<Dataset> {
    let mut rng = crate::rng_from_seed(seed);
    let mut graphs = Vec::with_capacity(count);
    for id in 0..count {
        let n = rng.gen_range(min_nodes..=max_nodes);
        let adj = weighted_erdos_renyi(n, p, 0.5, 2.0, &mut rng);
        let features = degree_features(&adj);
        let total = adj.values().iter().sum::<f64>() / 2.0;
        graphs.push(Graph::new(id, adj, features, Some(Label::Target(vec![total])))?);
    }
    Dataset::new("edge-weight-regression", Task::Regression { num_targets: 1 }, graphs)
}
