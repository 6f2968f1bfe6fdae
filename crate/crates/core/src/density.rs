//! Gaussian-kernel density on neighbor distances and neighborhood smoothing.

use crate::error::{Error, Result};
use crate::knn::NeighborGraph;
use crate::par;

pub const DEFAULT_SMOOTHING_STEPS: usize = 38;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    /// Kernel bandwidth: mean of every neighbor distance in the graph.
    pub sigma: f64,
    /// Raw density, `s[i] = sum_j exp(-(dist(i,j) / sigma)^2)`.
    pub s: Vec<f64>,
    /// Smoothed density after `smoothing_steps` neighborhood averages.
    pub ss: Vec<f64>,
    pub smoothing_steps: usize,
    pub include_self: bool,
}

impl DensityField {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Gaussian weight of one edge. Clamped to the smallest normal float so
/// far outliers keep a strictly positive density.
#[inline]
pub fn kernel(d: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let r = d / sigma;
    (-(r * r)).exp().max(f64::MIN_POSITIVE)
}

pub fn bandwidth(graph: &NeighborGraph) -> f64 {
    let dist = graph.dist();
    dist.iter().sum::<f64>() / dist.len() as f64
}

pub fn compute_density(graph: &NeighborGraph) -> DensityField {
    let sigma = bandwidth(graph);
    let s = par::map_indices(graph.len(), |i| {
        graph.distances(i).iter().map(|&d| kernel(d, sigma)).sum()
    });
    DensityField {
        sigma,
        ss: s.clone(),
        s,
        smoothing_steps: 0,
        include_self: false,
    }
}

/// One synchronous averaging pass over every point's neighbor list.
fn smooth_step(prev: &[f64], graph: &NeighborGraph, include_self: bool) -> Vec<f64> {
    let k = graph.k();
    let divisor = if include_self { k + 1 } else { k } as f64;
    par::map_indices(prev.len(), |i| {
        let mut acc = if include_self { prev[i] } else { 0.0 };
        for &j in graph.neighbors(i) {
            acc += prev[j];
        }
        acc / divisor
    })
}

/// Repeats the neighborhood average `steps` times starting from `field.s`.
///
/// Each pass divides the neighbor sum by `k` (or `k + 1` with
/// `include_self`). The factor is the same for every point, so the ordering
/// of smoothed values matches the plain repeated sum, which would overflow
/// after a few dozen passes.
pub fn smooth_with(
    field: &DensityField,
    graph: &NeighborGraph,
    steps: usize,
    include_self: bool,
) -> Result<DensityField> {
    if field.len() != graph.len() {
        return Err(Error::Usage(format!(
            "density has {} points, graph has {}",
            field.len(),
            graph.len()
        )));
    }
    let mut ss = field.s.clone();
    for _ in 0..steps {
        ss = smooth_step(&ss, graph, include_self);
    }
    Ok(DensityField {
        sigma: field.sigma,
        s: field.s.clone(),
        ss,
        smoothing_steps: steps,
        include_self,
    })
}

pub fn smooth(field: &DensityField, graph: &NeighborGraph, steps: usize) -> Result<DensityField> {
    smooth_with(field, graph, steps, false)
}

/// Distance from each point to its k-th nearest neighbor.
pub fn codensity(graph: &NeighborGraph) -> Vec<f64> {
    (0..graph.len())
        .map(|i| *graph.distances(i).last().expect("k >= 1"))
        .collect()
}
