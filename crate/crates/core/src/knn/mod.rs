//! Exact k-nearest-neighbor graphs in spectral space.
//!
//! Row `i` of the graph lists the `k` points nearest to point `i` (itself
//! excluded) in ascending `(distance, index)` order. The relation is
//! directed and never symmetrized.

mod ball_tree;
mod cache;

use std::cmp::Ordering;

pub use ball_tree::BallTree;
pub use cache::{decode_graph, encode_graph, read_graph, write_graph, CACHE_MAGIC};

use crate::error::{Error, Result};
use crate::par;
use crate::spectra_io::{distance, SpectraMatrix};

pub const DEFAULT_NEIGHBORS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    n: usize,
    k: usize,
    kn: Vec<usize>,
    dist: Vec<f64>,
}

/// Total order on candidates: distance, then smaller index.
#[inline]
pub(crate) fn candidate_cmp(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::Parameter("neighbor count k must be at least 1".into()));
    }
    if k >= n {
        return Err(Error::Parameter(format!(
            "neighbor count k = {k} must be less than the number of points ({n})"
        )));
    }
    Ok(())
}

impl NeighborGraph {
    /// Assembles a graph from row-major `kn` / `dist` arrays, checking every
    /// structural invariant.
    pub fn from_parts(n: usize, k: usize, kn: Vec<usize>, dist: Vec<f64>) -> Result<Self> {
        check_k(n, k)?;
        if kn.len() != n * k || dist.len() != n * k {
            return Err(Error::Size(format!(
                "graph arrays have {} indices and {} distances, expected {}",
                kn.len(),
                dist.len(),
                n * k
            )));
        }
        let g = NeighborGraph { n, k, kn, dist };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            let (row, d) = (self.neighbors(i), self.distances(i));
            let mut sorted = row.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Data(format!("row {i}: repeated neighbor index")));
            }
            for j in 0..self.k {
                let (idx, dj) = (row[j], d[j]);
                if idx >= self.n {
                    return Err(Error::Data(format!("row {i}: neighbor index {idx} out of range")));
                }
                if idx == i {
                    return Err(Error::Data(format!("row {i}: point lists itself")));
                }
                if !(dj.is_finite() && dj >= 0.0) {
                    return Err(Error::Data(format!("row {i}: invalid distance {dj}")));
                }
                if j > 0 && candidate_cmp((d[j - 1], row[j - 1]), (dj, idx)) != Ordering::Less {
                    return Err(Error::Data(format!(
                        "row {i}: neighbors not strictly ordered by (distance, index)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks the stored distances against the data they were built from.
    pub fn validate_against(&self, data: &SpectraMatrix) -> Result<()> {
        if data.len() != self.n {
            return Err(Error::Usage(format!(
                "graph has {} points, data has {}",
                self.n,
                data.len()
            )));
        }
        for i in 0..self.n {
            for (&j, &d) in self.neighbors(i).iter().zip(self.distances(i)) {
                let truth = distance(data.row(i), data.row(j));
                if (truth - d).abs() > 1e-9 * truth.max(f64::MIN_POSITIVE) && truth != d {
                    return Err(Error::Data(format!(
                        "row {i}: stored distance {d} to {j} differs from {truth}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.kn[i * self.k..(i + 1) * self.k]
    }

    #[inline]
    pub fn distances(&self, i: usize) -> &[f64] {
        &self.dist[i * self.k..(i + 1) * self.k]
    }

    /// Row-major n x k neighbor indices.
    pub fn kn(&self) -> &[usize] {
        &self.kn
    }

    /// Row-major n x k neighbor distances.
    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    fn from_rows(n: usize, k: usize, rows: Vec<Vec<(f64, usize)>>) -> Self {
        let mut kn = Vec::with_capacity(n * k);
        let mut dist = Vec::with_capacity(n * k);
        for row in rows {
            debug_assert_eq!(row.len(), k);
            for (d, j) in row {
                kn.push(j);
                dist.push(d);
            }
        }
        NeighborGraph { n, k, kn, dist }
    }
}

/// Exhaustive O(n^2 d) search. Reference implementation for the indexed path.
pub fn build_knn_brute(data: &SpectraMatrix, k: usize) -> Result<NeighborGraph> {
    let n = data.len();
    check_k(n, k)?;
    let rows = par::map_indices(n, |i| {
        let q = data.row(i);
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (distance(q, data.row(j)), j))
            .collect();
        if k < cand.len() {
            cand.select_nth_unstable_by(k - 1, |a, b| candidate_cmp(*a, *b));
            cand.truncate(k);
        }
        cand.sort_unstable_by(|a, b| candidate_cmp(*a, *b));
        cand
    });
    Ok(NeighborGraph::from_rows(n, k, rows))
}

/// Ball-tree search. Produces exactly the graph of [`build_knn_brute`].
pub fn build_knn_indexed(data: &SpectraMatrix, k: usize) -> Result<NeighborGraph> {
    let n = data.len();
    check_k(n, k)?;
    let tree = BallTree::build(data);
    let rows = par::map_indices(n, |i| tree.query_point(i, k));
    Ok(NeighborGraph::from_rows(n, k, rows))
}
