//! Node clustering used to build coarse-grained chains.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use rand::Rng;

use crate::dense::Matrix;
use crate::eigen::symmetric_eigen;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Lloyd iterations cap for k-means.
pub const KMEANS_MAX_ITER: usize = 100;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot form {k} clusters from {n} nodes"
        )));
    }
    Ok(())
}

/// `I − D^{-1/2} W D^{-1/2}` as a dense matrix. Isolated nodes get a zero
/// scaling entry, so their row is the identity row.
pub fn normalized_laplacian(adjacency: &CscMatrix) -> Matrix {
    let n = adjacency.rows();
    let inv_sqrt: Vec<f64> = adjacency
        .column_sums()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut l = Matrix::identity(n);
    for (i, j, w) in adjacency.triplets() {
        l[(i, j)] -= inv_sqrt[i] * w * inv_sqrt[j];
    }
    l
}

/// Spectral clustering: the `k` lowest eigenvectors of the normalized
/// Laplacian, rows scaled to unit length, then seeded k-means.
///
/// Every returned cluster id in `0..k` is used at least once.
pub fn spectral_cluster(adjacency: &CscMatrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = adjacency.rows();
    check_k(n, k)?;
    if k == n {
        return Ok((0..n).collect());
    }
    if k == 1 {
        return Ok(vec![0; n]);
    }
    let eig = symmetric_eigen(&normalized_laplacian(adjacency))?;
    let mut embedding = Matrix::from_fn(n, k, |i, j| eig.vectors[(i, j)]);
    for i in 0..n {
        let row = embedding.row_mut(i);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    kmeans(&embedding, k, seed)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lower index.
fn nearest(point: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = sq_dist(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means with k-means++ seeding, run to an assignment fixpoint or
/// [`KMEANS_MAX_ITER`] iterations. Empty clusters are refilled with the point
/// farthest from its centroid.
pub fn kmeans(points: &Matrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = points.rows();
    check_k(n, k)?;
    let mut rng = crate::rng_from_seed(seed);
    let dim = points.cols();

    // k-means++ seeding.
    let mut centroids = Matrix::zeros(k, dim);
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut chosen = vec![first];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All remaining points coincide with a centre; take the first unused.
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(pick);
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(pick)));
        }
    }

    let mut assignment: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids).0).collect();
    repair_empty(points, &mut assignment, &mut centroids);
    for _ in 0..KMEANS_MAX_ITER {
        update_centroids(points, &assignment, &mut centroids);
        let next: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids).0).collect();
        let mut next = next;
        repair_empty(points, &mut next, &mut centroids);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    Ok(assignment)
}

fn update_centroids(points: &Matrix, assignment: &[usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let mut counts = vec![0usize; k];
    let mut sums = Matrix::zeros(k, points.cols());
    for (i, &c) in assignment.iter().enumerate() {
        counts[c] += 1;
        for (s, v) in sums.row_mut(c).iter_mut().zip(points.row(i)) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s * inv;
            }
        }
    }
}

fn repair_empty(points: &Matrix, assignment: &mut [usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, &c) in assignment.iter().enumerate() {
            if counts[c] < 2 {
                continue;
            }
            let d = sq_dist(points.row(i), centroids.row(c));
            if best.map_or(true, |(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        // k ≤ n guarantees some cluster has a spare point.
        let (i, _) = best.expect("a cluster with at least two points exists");
        assignment[i] = empty;
        centroids.row_mut(empty).copy_from_slice(points.row(i));
    }
}

/// Greedy heavy-edge matching repeated until exactly `k` clusters remain.
///
/// Each round matches every cluster with its heaviest unmatched neighbour
/// (ties to the lower id). A round that cannot merge anything (no edges left
/// between clusters) merges the two smallest clusters instead.
pub fn heavy_edge_cluster(adjacency: &CscMatrix, k: usize) -> Result<Vec<usize>> {
    let n = adjacency.rows();
    check_k(n, k)?;
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut count = n;
    while count > k {
        let mut weights: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        let mut sizes = vec![0usize; count];
        for &c in &assignment {
            sizes[c] += 1;
        }
        for (i, j, w) in adjacency.triplets() {
            let (a, b) = (assignment[i], assignment[j]);
            if a != b {
                *weights[a].entry(b).or_insert(0.0) += w;
            }
        }
        let mut merged_into: Vec<usize> = (0..count).collect();
        let mut matched = vec![false; count];
        let mut merges = 0;
        for c in 0..count {
            if count - merges == k {
                break;
            }
            if matched[c] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for (&nb, &w) in &weights[c] {
                if !matched[nb] && best.map_or(true, |(_, bw)| w > bw) {
                    best = Some((nb, w));
                }
            }
            if let Some((nb, _)) = best {
                matched[c] = true;
                matched[nb] = true;
                merged_into[nb] = c;
                merges += 1;
            }
        }
        if merges == 0 {
            let mut by_size: Vec<usize> = (0..count).collect();
            by_size.sort_by_key(|&c| (sizes[c], c));
            let (a, b) = (by_size[0].min(by_size[1]), by_size[0].max(by_size[1]));
            merged_into[b] = a;
        }
        let mut relabel = vec![usize::MAX; count];
        let mut next = 0;
        for c in 0..count {
            let root = merged_into[c];
            if relabel[root] == usize::MAX {
                relabel[root] = next;
                next += 1;
            }
            relabel[c] = relabel[root];
        }
        for a in assignment.iter_mut() {
            *a = relabel[*a];
        }
        count = next;
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adjacency(n: usize, edges: &[(usize, usize)]) -> CscMatrix {
        CscMatrix::from_triplets(n, n, edges.iter().flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)]))
            .unwrap()
    }

    fn two_triangles() -> CscMatrix {
        adjacency(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    #[test]
    fn spectral_separates_components() {
        for seed in 0..10 {
            let a = spectral_cluster(&two_triangles(), 2, seed).unwrap();
            assert_eq!(a[0], a[1]);
            assert_eq!(a[1], a[2]);
            assert_eq!(a[3], a[4]);
            assert_eq!(a[4], a[5]);
            assert_ne!(a[0], a[3]);
        }
    }

    #[test]
    fn trivial_cluster_counts() {
        let path = adjacency(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(spectral_cluster(&path, 5, 0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(spectral_cluster(&path, 1, 0).unwrap(), vec![0; 5]);
        assert!(spectral_cluster(&path, 6, 0).is_err());
        assert!(spectral_cluster(&path, 0, 0).is_err());
    }

    #[test]
    fn isolated_nodes_get_clustered() {
        // A triangle plus three isolated nodes.
        let a = adjacency(6, &[(0, 1), (1, 2), (0, 2)]);
        for k in 2..=5 {
            let asg = spectral_cluster(&a, k, 3).unwrap();
            let mut seen = vec![false; k];
            asg.iter().for_each(|&c| seen[c] = true);
            assert!(seen.iter().all(|&s| s), "k={k}: {asg:?}");
        }
        let l = normalized_laplacian(&a);
        assert_eq!(l.row(4), &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn kmeans_handles_duplicate_points() {
        let pts = Matrix::filled(6, 2, 1.0);
        let asg = kmeans(&pts, 3, 1).unwrap();
        let mut counts = [0; 3];
        asg.iter().for_each(|&c| counts[c] += 1);
        assert!(counts.iter().all(|&c| c > 0));
    }

    #[test]
    fn heavy_edge_reaches_exact_count() {
        let path = adjacency(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        for k in 1..=7 {
            let asg = heavy_edge_cluster(&path, k).unwrap();
            let distinct: alloc::collections::BTreeSet<_> = asg.iter().collect();
            assert_eq!(distinct.len(), k);
            assert!(asg.iter().all(|&c| c < k));
        }
    }
}
