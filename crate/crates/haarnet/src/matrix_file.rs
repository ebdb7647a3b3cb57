//! Whitespace-separated dense matrices.
//!
//! A signal file is a header line `rows cols` followed by `rows` lines of
//! `cols` decimals. Values are written in Rust's shortest round-trip form,
//! so a write/read cycle is lossless.
//!
//! A weighted-graph file (QM7 style) is a sequence of blocks, each a header
//! `N d`, then `N` adjacency rows of `N` values, then `N` feature rows of `d`
//! values. Targets sit in a separate file with one line of reals per graph.

use std::fmt::Write as _;
use std::path::Path;

use haarnet_core::dense::Matrix;
use haarnet_core::graph::{Dataset, Graph, Label, Task};
use haarnet_core::sparse::CscMatrix;

use crate::text::{fields, parse_token, write_file, TextFile};
use crate::{Error, Result};

struct Cursor<'f> {
    file: &'f TextFile,
    lines: Vec<(usize, &'f str)>,
    pos: usize,
}

impl<'f> Cursor<'f> {
    fn new(file: &'f TextFile) -> Self {
        Cursor {
            file,
            lines: file.lines().collect(),
            pos: 0,
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn row(&mut self, width: Option<usize>, what: &str) -> Result<(usize, Vec<f64>)> {
        let Some(&(n, l)) = self.lines.get(self.pos) else {
            let last = self.lines.last().map_or(1, |l| l.0);
            return Err(self.file.err(last, format!("unexpected end of file while reading {what}")));
        };
        self.pos += 1;
        let row = fields(l)
            .map(|t| parse_token::<f64>(t, what))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| self.file.err(n, m))?;
        if let Some(w) = width {
            if row.len() != w {
                return Err(self.file.err(n, format!("{} values in {what}, expected {w}", row.len())));
            }
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(self.file.err(n, format!("non-finite value in {what}")));
        }
        Ok((n, row))
    }

    fn header(&mut self) -> Result<(usize, usize, usize)> {
        let (n, h) = self.row(Some(2), "header")?;
        let dims: Vec<usize> = h
            .iter()
            .map(|&v| if v >= 0.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(()) })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.file.err(n, "header must hold two non-negative integers"))?;
        Ok((n, dims[0], dims[1]))
    }

    fn matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.row(Some(cols), what)?.1);
        }
        Ok(Matrix::from_vec(rows, cols, data)?)
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let file = TextFile::read(path)?;
    let mut cur = Cursor::new(&file);
    let (_, rows, cols) = cur.header()?;
    let m = cur.matrix(rows, cols, "matrix row")?;
    if let Some(&(n, _)) = cur.lines.get(cur.pos) {
        return Err(file.err(n, format!("trailing content after {rows} rows")));
    }
    Ok(m)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    write_file(path, &format_matrix(m))
}

/// Read weighted graphs and their regression targets.
pub fn load_weighted_graphs(graphs: &Path, targets: &Path, name: &str) -> Result<Dataset> {
    let file = TextFile::read(graphs)?;
    let mut cur = Cursor::new(&file);
    let mut blocks = Vec::new();
    while !cur.done() {
        let (line, n, d) = cur.header()?;
        if n == 0 {
            return Err(file.err(line, "a graph needs at least one node"));
        }
        let adj = cur.matrix(n, n, "adjacency row")?;
        let features = cur.matrix(n, d, "feature row")?;
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = adj[(i, j)];
                if i != j && w != 0.0 {
                    triplets.push((i, j, w));
                }
            }
        }
        let adjacency = CscMatrix::from_triplets(n, n, triplets)?;
        if !adjacency.is_symmetric() {
            return Err(file.err(line, "adjacency is not symmetric"));
        }
        blocks.push((line, adjacency, features));
    }
    let tfile = TextFile::read(targets)?;
    let mut tcur = Cursor::new(&tfile);
    let mut graph_list = Vec::with_capacity(blocks.len());
    let mut width = None;
    for (id, (line, adjacency, features)) in blocks.into_iter().enumerate() {
        let (tline, t) = tcur.row(width, "targets")?;
        if t.is_empty() {
            return Err(tfile.err(tline, "empty target row"));
        }
        width = Some(t.len());
        let g = Graph::new(id, adjacency, features, Some(Label::Target(t)))
            .map_err(|e| file.err(line, e.to_string()))?;
        graph_list.push(g);
    }
    if let Some(&(n, _)) = tcur.lines.get(tcur.pos) {
        return Err(tfile.err(n, "more target rows than graphs"));
    }
    let num_targets = width.ok_or_else(|| Error::Data(format!("{}: no graphs", graphs.display())))?;
    Ok(Dataset::new(name, Task::Regression { num_targets }, graph_list)?)
}

/// Inverse of [`load_weighted_graphs`].
pub fn write_weighted_graphs(dataset: &Dataset, graphs: &Path, targets: &Path) -> Result<()> {
    let mut g_out = String::new();
    let mut t_out = String::new();
    for g in dataset.graphs() {
        let n = g.num_nodes();
        let _ = writeln!(g_out, "{n} {}", g.feature_dim());
        let dense = g.adjacency().to_dense();
        for row in [dense, g.features().clone()] {
            let body = format_matrix(&row);
            g_out.push_str(body.split_once('\n').map_or("", |(_, rest)| rest));
        }
        match &g.label {
            Some(Label::Target(t)) => {
                let row: Vec<String> = t.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(t_out, "{}", row.join(" "));
            }
            _ => return Err(Error::Data(format!("graph {} has no regression target", g.graph_id))),
        }
    }
    write_file(graphs, &g_out)?;
    write_file(targets, &t_out)
}
