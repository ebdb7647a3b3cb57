//! Graphs, datasets and train/validation/test splits.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::dense::Matrix;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Graph-level target.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    Class(usize),
    Target(Vec<f64>),
}

/// An undirected weighted graph with node features.
///
/// The adjacency is symmetric, non-negative and loop-free; `features` has one
/// row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub graph_id: usize,
    adjacency: CscMatrix,
    features: Matrix,
    pub label: Option<Label>,
}

impl Graph {
    pub fn new(
        graph_id: usize,
        adjacency: CscMatrix,
        features: Matrix,
        label: Option<Label>,
    ) -> Result<Self> {
        let n = adjacency.rows();
        if adjacency.cols() != n {
            return Err(Error::InvalidArgument(format!(
                "graph {graph_id}: adjacency is {}x{}",
                n,
                adjacency.cols()
            )));
        }
        if features.rows() != n {
            return Err(Error::Shape {
                op: "Graph::new features",
                expected: (n, features.cols()),
                found: features.shape(),
            });
        }
        for (i, j, w) in adjacency.triplets() {
            if i == j {
                return Err(Error::InvalidArgument(format!(
                    "graph {graph_id}: self-loop on node {i}"
                )));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "graph {graph_id}: edge ({i}, {j}) has weight {w}"
                )));
            }
        }
        if !adjacency.is_symmetric() {
            return Err(Error::InvalidArgument(format!(
                "graph {graph_id}: adjacency is not symmetric"
            )));
        }
        Ok(Graph {
            graph_id,
            adjacency,
            features,
            label,
        })
    }

    /// Build an unweighted graph from an edge list. Edges are symmetrised,
    /// self-loops dropped and duplicates collapsed to weight 1.
    pub fn from_edges(
        graph_id: usize,
        num_nodes: usize,
        edges: &[(usize, usize)],
        features: Matrix,
        label: Option<Label>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "graph {graph_id}: edge ({a}, {b}) outside {num_nodes} nodes"
                )));
            }
            if a != b {
                set.insert((a, b));
                set.insert((b, a));
            }
        }
        let adjacency =
            CscMatrix::from_triplets(num_nodes, num_nodes, set.into_iter().map(|(a, b)| (a, b, 1.0)))?;
        Graph::new(graph_id, adjacency, features, label)
    }

    /// Build a weighted graph from `(a, b, w)` triplets; both orientations are
    /// written, loops and zero weights dropped, repeated pairs keep the last weight.
    pub fn from_weighted_edges(
        graph_id: usize,
        num_nodes: usize,
        edges: &[(usize, usize, f64)],
        features: Matrix,
        label: Option<Label>,
    ) -> Result<Self> {
        let mut map = alloc::collections::BTreeMap::new();
        for &(a, b, w) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "graph {graph_id}: edge ({a}, {b}) outside {num_nodes} nodes"
                )));
            }
            if a != b && w != 0.0 {
                map.insert((a.min(b), a.max(b)), w);
            }
        }
        let adjacency = CscMatrix::from_triplets(
            num_nodes,
            num_nodes,
            map.into_iter()
                .flat_map(|((a, b), w)| [(a, b, w), (b, a, w)]),
        )?;
        Graph::new(graph_id, adjacency, features, label)
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.rows()
    }

    /// Undirected edge count (each stored pair counted once).
    pub fn num_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &CscMatrix {
        &self.adjacency
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    /// Weighted degrees.
    pub fn degrees(&self) -> Vec<f64> {
        self.adjacency.column_sums()
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.adjacency.values().iter().sum::<f64>() / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification { num_classes: usize },
    Regression { num_targets: usize },
}

impl Task {
    pub fn output_dim(&self) -> usize {
        match *self {
            Task::Classification { num_classes } => num_classes,
            Task::Regression { num_targets } => num_targets,
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Task::Classification { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    graphs: Vec<Graph>,
}

impl Dataset {
    /// Validate labels against `task` and the shared feature width.
    pub fn new(name: impl Into<String>, task: Task, graphs: Vec<Graph>) -> Result<Self> {
        let name = name.into();
        let dim = graphs.first().map(Graph::feature_dim);
        for g in &graphs {
            if Some(g.feature_dim()) != dim {
                return Err(Error::InvalidArgument(format!(
                    "dataset {name}: graph {} has {} feature columns, expected {}",
                    g.graph_id,
                    g.feature_dim(),
                    dim.unwrap_or(0)
                )));
            }
            match (&g.label, task) {
                (Some(Label::Class(c)), Task::Classification { num_classes }) => {
                    if *c >= num_classes {
                        return Err(Error::LabelOutOfRange {
                            label: *c,
                            num_classes,
                        });
                    }
                }
                (Some(Label::Target(t)), Task::Regression { num_targets }) => {
                    if t.len() != num_targets {
                        return Err(Error::InvalidArgument(format!(
                            "graph {}: {} targets, expected {num_targets}",
                            g.graph_id,
                            t.len()
                        )));
                    }
                }
                (None, _) => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "graph {}: label kind does not match the task",
                        g.graph_id
                    )))
                }
            }
        }
        Ok(Dataset { name, task, graphs })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.graphs.first().map_or(0, Graph::feature_dim)
    }

    /// Graph with the given id.
    pub fn by_id(&self, id: usize) -> Option<&Graph> {
        self.graphs.iter().find(|g| g.graph_id == id)
    }

    pub fn ids(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.graph_id).collect()
    }
}

/// Disjoint train/validation/test id lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Sizes of the three parts for `m` graphs: `⌊0.8m⌋`, `⌊0.1m⌋`, remainder.
/// Below ten graphs the floor rule leaves the validation part empty; one
/// graph is then moved from train so every part has at least one member.
pub fn split_sizes(m: usize) -> Result<(usize, usize, usize)> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "cannot split {m} graphs into three non-empty parts"
        )));
    }
    let mut train = 8 * m / 10;
    let mut val = m / 10;
    let mut test = m - train - val;
    if val == 0 {
        val = 1;
        train -= 1;
    }
    if test == 0 {
        test = 1;
        train -= 1;
    }
    Ok((train, val, test))
}

/// Shuffle the dataset's ids with a seeded generator and cut 80/10/10.
pub fn make_split(dataset: &Dataset, seed: u64) -> Result<Split> {
    let (n_train, n_val, _) = split_sizes(dataset.len())?;
    let mut ids = dataset.ids();
    let mut rng = crate::rng_from_seed(seed);
    ids.shuffle(&mut rng);
    let test = ids.split_off(n_train + n_val);
    let val = ids.split_off(n_train);
    Ok(Split {
        train: ids,
        val,
        test,
        seed,
    })
}
