//! The TU benchmark layout.
//!
//! A dataset `NAME` is a directory of plain-text files:
//!
//! | file | content |
//! |------|---------|
//! | `NAME_A.txt` | one `i, j` edge per line, 1-based global node ids |
//! | `NAME_graph_indicator.txt` | graph id (1-based) of node `k` on line `k` |
//! | `NAME_graph_labels.txt` | one class label per graph |
//! | `NAME_graph_attributes.txt` | optional real targets per graph (regression) |
//! | `NAME_node_labels.txt` | optional integer label per node |
//! | `NAME_node_attributes.txt` | optional comma-separated reals per node |
//!
//! Node labels are one-hot encoded over the sorted distinct values and come
//! before any attribute columns. Without either file every node gets a single
//! constant feature. Edges are symmetrised, loops and repeats dropped, and all
//! weights are 1. Graph labels are remapped to `0..C` in ascending order of
//! the raw values. When only `graph_attributes` exists the dataset is a
//! regression task.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use haarnet_core::dense::Matrix;
use haarnet_core::graph::{Dataset, Graph, Label, Task};

use crate::text::{fields, parse_token, write_file, TextFile};
use crate::{Error, Result};

fn file(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

fn required(dir: &Path, name: &str, suffix: &str) -> Result<TextFile> {
    let path = file(dir, name, suffix);
    if !path.is_file() {
        return Err(Error::Data(format!("missing required file {}", path.display())));
    }
    TextFile::read(&path)
}

fn optional(dir: &Path, name: &str, suffix: &str) -> Result<Option<TextFile>> {
    let path = file(dir, name, suffix);
    if path.is_file() {
        TextFile::read(&path).map(Some)
    } else {
        Ok(None)
    }
}

fn real_rows(f: &TextFile, what: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    f.lines()
        .map(|(n, l)| {
            let row = fields(l)
                .map(|t| parse_token::<f64>(t, what))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|m| f.err(n, m))?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(f.err(n, format!("non-finite {what}")));
            }
            Ok((n, row))
        })
        .collect()
}

/// Load `dir/NAME_*.txt`.
pub fn load_tu_dataset(dir: &Path, name: &str) -> Result<Dataset> {
    let edges_file = required(dir, name, "A")?;
    let indicator_file = required(dir, name, "graph_indicator")?;
    let labels_file = optional(dir, name, "graph_labels")?;
    let targets_file = optional(dir, name, "graph_attributes")?;
    if labels_file.is_none() && targets_file.is_none() {
        return Err(Error::Data(format!(
            "missing required file {}",
            file(dir, name, "graph_labels").display()
        )));
    }

    let indicator: Vec<(usize, i64)> = indicator_file.values("graph id")?;
    let num_nodes = indicator.len();
    let graph_count = match (&labels_file, &targets_file) {
        (Some(f), _) | (None, Some(f)) => f.lines().count(),
        (None, None) => unreachable!(),
    };
    // Global node k (0-based) -> (graph index, local index).
    let mut local = Vec::with_capacity(num_nodes);
    let mut sizes = vec![0usize; graph_count];
    for &(line, g) in &indicator {
        if g < 1 || g as usize > graph_count {
            return Err(indicator_file.err(line, format!("graph id {g} outside 1..={graph_count}")));
        }
        let g = g as usize - 1;
        local.push((g, sizes[g]));
        sizes[g] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Data(format!("{}: graph {} has no nodes", indicator_file.path.display(), empty + 1)));
    }

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (line, l) in edges_file.lines() {
        let toks: Vec<&str> = fields(l).collect();
        if toks.len() != 2 {
            return Err(edges_file.err(line, format!("expected `i, j`, found `{l}`")));
        }
        let mut ends = [0usize; 2];
        for (e, t) in ends.iter_mut().zip(&toks) {
            let v: i64 = parse_token(t, "node index").map_err(|m| edges_file.err(line, m))?;
            if v < 1 || v as usize > num_nodes {
                return Err(edges_file.err(line, format!("node index {v} outside 1..={num_nodes}")));
            }
            *e = v as usize - 1;
        }
        let (ga, a) = local[ends[0]];
        let (gb, b) = local[ends[1]];
        if ga != gb {
            return Err(edges_file.err(line, format!("edge joins graphs {} and {}", ga + 1, gb + 1)));
        }
        edges[ga].push((a, b));
    }

    let mut columns: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&n| vec![Vec::new(); n]).collect();
    let mut has_features = false;
    if let Some(f) = optional(dir, name, "node_labels")? {
        let labels: Vec<(usize, i64)> = f.values("node label")?;
        if labels.len() != num_nodes {
            return Err(Error::Data(format!(
                "{}: {} node labels for {num_nodes} nodes",
                f.path.display(),
                labels.len()
            )));
        }
        let distinct: BTreeMap<i64, usize> = labels
            .iter()
            .map(|&(_, v)| (v, 0))
            .collect::<BTreeMap<_, _>>()
            .into_keys()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        for (k, &(_, v)) in labels.iter().enumerate() {
            let (g, i) = local[k];
            let mut onehot = vec![0.0; distinct.len()];
            onehot[distinct[&v]] = 1.0;
            columns[g][i].extend(onehot);
        }
        has_features = true;
    }
    if let Some(f) = optional(dir, name, "node_attributes")? {
        let rows = real_rows(&f, "node attribute")?;
        if rows.len() != num_nodes {
            return Err(Error::Data(format!(
                "{}: {} attribute rows for {num_nodes} nodes",
                f.path.display(),
                rows.len()
            )));
        }
        let width = rows.first().map_or(0, |r| r.1.len());
        for (k, (line, row)) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(f.err(line, format!("{} attributes, expected {width}", row.len())));
            }
            let (g, i) = local[k];
            columns[g][i].extend(row);
        }
        has_features = true;
    }
    if !has_features {
        for g in &mut columns {
            for node in g.iter_mut() {
                node.push(1.0);
            }
        }
    }

    let (task, labels) = match (labels_file, targets_file) {
        (Some(f), _) => {
            let raw: Vec<(usize, i64)> = f.values("graph label")?;
            let map: BTreeMap<i64, usize> = raw
                .iter()
                .map(|&(_, v)| v)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .enumerate()
                .map(|(i, v)| (v, i))
                .collect();
            let labels = raw.iter().map(|(_, v)| Label::Class(map[v])).collect::<Vec<_>>();
            (Task::Classification { num_classes: map.len() }, labels)
        }
        (None, Some(f)) => {
            let rows = real_rows(&f, "graph attribute")?;
            let width = rows.first().map_or(0, |r| r.1.len());
            if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != width || r.is_empty()) {
                return Err(f.err(*line, format!("{} targets, expected {width}", r.len())));
            }
            let labels = rows.into_iter().map(|(_, r)| Label::Target(r)).collect();
            (Task::Regression { num_targets: width }, labels)
        }
        (None, None) => unreachable!(),
    };

    let graphs = columns
        .into_iter()
        .zip(edges)
        .zip(labels)
        .enumerate()
        .map(|(id, ((rows, e), label))| {
            let features = Matrix::from_rows(&rows).map_err(|source| Error::Graph { graph_id: id, source })?;
            Graph::from_edges(id, rows.len(), &e, features, Some(label))
                .map_err(|source| Error::Graph { graph_id: id, source })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::new(name, task, graphs)?)
}

/// Write a dataset in the TU layout. Features go to `node_attributes`,
/// class labels to `graph_labels` and regression targets to
/// `graph_attributes`. Weighted graphs are refused since the layout has no
/// edge weights.
pub fn write_tu_dataset(dataset: &Dataset, dir: &Path, name: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut attrs = String::new();
    let mut labels = String::new();
    let mut offset = 0usize;
    for (gi, g) in dataset.graphs().iter().enumerate() {
        let adj = g.adjacency();
        if let Some((i, j, w)) = adj.triplets().find(|&(_, _, w)| w != 1.0) {
            return Err(Error::Data(format!(
                "graph {}: edge ({i}, {j}) has weight {w}; the TU layout stores unit weights only",
                g.graph_id
            )));
        }
        // Column-major triplets of a symmetric matrix list each edge twice.
        let mut pairs: Vec<(usize, usize)> = adj.triplets().map(|(i, j, _)| (j, i)).collect();
        pairs.sort_unstable();
        for (i, j) in pairs {
            let _ = writeln!(a, "{}, {}", offset + i + 1, offset + j + 1);
        }
        for i in 0..g.num_nodes() {
            let _ = writeln!(indicator, "{}", gi + 1);
            let row: Vec<String> = g.features().row(i).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(attrs, "{}", row.join(", "));
        }
        match &g.label {
            Some(Label::Class(c)) => {
                let _ = writeln!(labels, "{c}");
            }
            Some(Label::Target(t)) => {
                let row: Vec<String> = t.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(labels, "{}", row.join(", "));
            }
            None => return Err(Error::Data(format!("graph {} has no label", g.graph_id))),
        }
        offset += g.num_nodes();
    }
    let label_suffix = match dataset.task {
        Task::Classification { .. } => "graph_labels",
        Task::Regression { .. } => "graph_attributes",
    };
    write_file(&file(dir, name, "A"), &a)?;
    write_file(&file(dir, name, "graph_indicator"), &indicator)?;
    write_file(&file(dir, name, "node_attributes"), &attrs)?;
    write_file(&file(dir, name, label_suffix), &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, suffix: &str, body: &str) {
        fs::write(file(dir, "T", suffix), body).unwrap();
    }

    #[test]
    fn two_graphs_with_labels_and_attributes() {
        let tmp = tempfile::tempdir().unwrap();
        let d = tmp.path();
        write(d, "A", "1, 2\n2, 1\n2, 3\n4, 5\n5, 5\n4, 5\n");
        write(d, "graph_indicator", "1\n1\n1\n2\n2\n");
        write(d, "graph_labels", "-1\n1\n");
        write(d, "node_labels", "3\n0\n3\n7\n0\n");
        write(d, "node_attributes", "0.5, 1\n1.5, 2\n2.5, 3\n3.5, 4\n4.5, 5\n");
        let ds = load_tu_dataset(d, "T").unwrap();
        assert_eq!(ds.task, Task::Classification { num_classes: 2 });
        assert_eq!(ds.len(), 2);
        let g0 = &ds.graphs()[0];
        assert_eq!(g0.num_nodes(), 3);
        assert_eq!(g0.num_edges(), 2);
        assert_eq!(g0.label, Some(Label::Class(0)));
        // One-hot over {0, 3, 7} then the two attributes.
        assert_eq!(g0.features().row(0), &[0.0, 1.0, 0.0, 0.5, 1.0]);
        let g1 = &ds.graphs()[1];
        assert_eq!(g1.num_edges(), 1);
        assert_eq!(g1.features().row(0), &[0.0, 0.0, 1.0, 3.5, 4.0]);
        assert_eq!(g1.label, Some(Label::Class(1)));
    }

    #[test]
    fn single_node_graph() {
        let tmp = tempfile::tempdir().unwrap();
        let d = tmp.path();
        write(d, "A", "");
        write(d, "graph_indicator", "1\n");
        write(d, "graph_labels", "0\n");
        write(d, "node_labels", "0\n");
        let ds = load_tu_dataset(d, "T").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.graphs()[0].features().shape(), (1, 1));
        assert_eq!(ds.graphs()[0].features()[(0, 0)], 1.0);
    }

    #[test]
    fn constant_feature_when_no_node_files() {
        let tmp = tempfile::tempdir().unwrap();
        let d = tmp.path();
        write(d, "A", "1,2\n");
        write(d, "graph_indicator", "1\n1\n");
        write(d, "graph_labels", "5\n");
        let ds = load_tu_dataset(d, "T").unwrap();
        assert_eq!(ds.graphs()[0].features().as_slice(), &[1.0, 1.0]);
        assert_eq!(ds.graphs()[0].adjacency().get(1, 0), 1.0);
    }

    #[test]
    fn errors_name_file_and_line() {
        let tmp = tempfile::tempdir().unwrap();
        let d = tmp.path();
        write(d, "graph_indicator", "1\n1\n");
        write(d, "graph_labels", "0\n");
        let e = load_tu_dataset(d, "T").unwrap_err();
        assert!(e.to_string().contains("T_A.txt"), "{e}");
        assert_eq!(e.exit_code(), 3);

        write(d, "A", "1, 2\n\n2, 9\n");
        let e = load_tu_dataset(d, "T").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("T_A.txt:3") && msg.contains("9"), "{msg}");

        write(d, "A", "1, x\n");
        assert!(load_tu_dataset(d, "T").unwrap_err().to_string().contains("T_A.txt:1"));
    }

    #[test]
    fn regression_targets_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let mk = |id, t: f64| {
            Graph::from_edges(id, 3, &[(0, 1), (1, 2)], Matrix::filled(3, 2, 0.1 * id as f64), Some(Label::Target(vec![t]))).unwrap()
        };
        let ds = Dataset::new("R", Task::Regression { num_targets: 1 }, vec![mk(0, 1.25), mk(1, -3.0e-7)]).unwrap();
        write_tu_dataset(&ds, tmp.path(), "R").unwrap();
        let back = load_tu_dataset(tmp.path(), "R").unwrap();
        assert_eq!(back, ds);
    }
}
