use super::candidate_cmp;
use crate::spectra_io::{distance, squared_distance, SpectraMatrix};

const LEAF_SIZE: usize = 24;

/// Relative slack on pruning bounds; covers rounding in the triangle
/// inequality so that no candidate the exhaustive search would keep is
/// ever skipped.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    radius: f64,
    children: Option<(usize, usize)>,
}

/// Metric ball tree over the rows of a [`SpectraMatrix`].
///
/// Each node stores the mean of its points and the largest distance from
/// that mean to a member. Splits follow the axis between two mutually far
/// points, which tracks the low intrinsic dimension of spectral data
/// better than coordinate splits.
#[derive(Debug)]
pub struct BallTree<'a> {
    data: &'a SpectraMatrix,
    order: Vec<usize>,
    nodes: Vec<Node>,
    centers: Vec<f64>,
}

impl<'a> BallTree<'a> {
    pub fn build(data: &'a SpectraMatrix) -> Self {
        let mut tree = BallTree {
            data,
            order: (0..data.len()).collect(),
            nodes: Vec::new(),
            centers: Vec::new(),
        };
        tree.build_node(0, data.len());
        tree
    }

    fn center(&self, node: usize) -> &[f64] {
        let d = self.data.bands();
        &self.centers[node * d..(node + 1) * d]
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let d = self.data.bands();
        let mut center = vec![0.0; d];
        for &i in &self.order[start..end] {
            for (c, v) in center.iter_mut().zip(self.data.row(i)) {
                *c += v;
            }
        }
        let count = (end - start) as f64;
        center.iter_mut().for_each(|c| *c /= count);

        let mut radius = 0.0f64;
        let mut far = self.order[start];
        for &i in &self.order[start..end] {
            let r = distance(&center, self.data.row(i));
            if r > radius {
                radius = r;
                far = i;
            }
        }

        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            radius,
            children: None,
        });
        self.centers.extend_from_slice(&center);

        if end - start <= LEAF_SIZE || radius == 0.0 {
            return id;
        }

        let anchor = self.data.row(far);
        let mut other = far;
        let mut best = -1.0;
        for &i in &self.order[start..end] {
            let r = squared_distance(anchor, self.data.row(i));
            if r > best {
                best = r;
                other = i;
            }
        }
        let axis: Vec<f64> = self
            .data
            .row(other)
            .iter()
            .zip(anchor)
            .map(|(a, b)| a - b)
            .collect();
        let data = self.data;
        let mut keyed: Vec<(f64, usize)> = self.order[start..end]
            .iter()
            .map(|&i| {
                let p: f64 = data.row(i).iter().zip(&axis).map(|(x, a)| x * a).sum();
                (p, i)
            })
            .collect();
        let mid = keyed.len() / 2;
        keyed.select_nth_unstable_by(mid, |a, b| candidate_cmp(*a, *b));
        for (slot, (_, i)) in self.order[start..end].iter_mut().zip(keyed) {
            *slot = i;
        }

        let left = self.build_node(start, start + mid);
        let right = self.build_node(start + mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    /// The `k` nearest points to row `query` of the indexed data, excluding
    /// `query` itself, sorted by `(distance, index)`.
    pub fn query_point(&self, query: usize, k: usize) -> Vec<(f64, usize)> {
        let mut search = Search {
            tree: self,
            q: self.data.row(query),
            skip: Some(query),
            k,
            best: Vec::with_capacity(k + 1),
        };
        let root_lb = distance(search.q, self.center(0)) - self.nodes[0].radius;
        search.visit(0, root_lb);
        search.best
    }

    /// The `k` nearest rows to an arbitrary point.
    pub fn query(&self, q: &[f64], k: usize) -> Vec<(f64, usize)> {
        let mut search = Search {
            tree: self,
            q,
            skip: None,
            k,
            best: Vec::with_capacity(k + 1),
        };
        let root_lb = distance(q, self.center(0)) - self.nodes[0].radius;
        search.visit(0, root_lb);
        search.best
    }
}

struct Search<'t, 'a> {
    tree: &'t BallTree<'a>,
    q: &'t [f64],
    skip: Option<usize>,
    k: usize,
    best: Vec<(f64, usize)>,
}

impl Search<'_, '_> {
    fn worst(&self) -> f64 {
        if self.best.len() < self.k {
            f64::INFINITY
        } else {
            self.best[self.k - 1].0
        }
    }

    fn pruned(&self, lower_bound: f64, scale: f64) -> bool {
        let worst = self.worst();
        lower_bound > worst + PRUNE_SLACK * (scale + worst)
    }

    fn offer(&mut self, cand: (f64, usize)) {
        if self.best.len() == self.k {
            if candidate_cmp(cand, self.best[self.k - 1]).is_ge() {
                return;
            }
            self.best.pop();
        }
        let pos = self
            .best
            .partition_point(|&b| candidate_cmp(b, cand).is_lt());
        self.best.insert(pos, cand);
    }

    fn visit(&mut self, node: usize, lower_bound: f64) {
        let tree = self.tree;
        let n = &tree.nodes[node];
        if self.pruned(lower_bound, lower_bound.abs() + n.radius) {
            return;
        }
        match n.children {
            None => {
                for &i in &tree.order[n.start..n.end] {
                    if Some(i) == self.skip {
                        continue;
                    }
                    let row = tree.data.row(i);
                    let worst = self.worst();
                    let cutoff = worst * worst * (1.0 + 1e-12);
                    if let Some(sq) = partial_squared_distance(self.q, row, cutoff) {
                        self.offer((sq.sqrt(), i));
                    }
                }
            }
            Some((l, r)) => {
                let dl = distance(self.q, tree.center(l));
                let dr = distance(self.q, tree.center(r));
                let (lb_l, lb_r) = (dl - tree.nodes[l].radius, dr - tree.nodes[r].radius);
                if lb_l <= lb_r {
                    self.visit(l, lb_l);
                    self.visit(r, lb_r);
                } else {
                    self.visit(r, lb_r);
                    self.visit(l, lb_l);
                }
            }
        }
    }
}

/// Same summation as [`squared_distance`], abandoned once the running sum
/// passes `cutoff`. A completed sum is bit-identical to the full one.
#[inline]
fn partial_squared_distance(a: &[f64], b: &[f64], cutoff: f64) -> Option<f64> {
    let mut acc = 0.0;
    for (ca, cb) in a.chunks(8).zip(b.chunks(8)) {
        for (x, y) in ca.iter().zip(cb) {
            let t = x - y;
            acc += t * t;
        }
        if acc > cutoff {
            return None;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_sum_matches_full() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64 * 0.11).cos()).collect();
        let full = squared_distance(&a, &b);
        assert_eq!(partial_squared_distance(&a, &b, f64::INFINITY), Some(full));
        assert_eq!(partial_squared_distance(&a, &b, full * 0.5), None);
    }

    #[test]
    fn external_query() {
        let data = SpectraMatrix::new((0..50).map(f64::from).collect(), 50, 1).unwrap();
        let tree = BallTree::build(&data);
        let got = tree.query(&[10.4], 3);
        assert_eq!(got.iter().map(|c| c.1).collect::<Vec<_>>(), vec![10, 11, 9]);
    }
}
