//! Discrete density flow on the neighbor graph and its basins.
//!
//! Every point moves to the best member of its candidate set (itself plus
//! its k neighbors) under a strict total order on smoothed density. The
//! map is then composed with itself until it stops changing; each fixed
//! point is a mode and its basin is a cluster.

use std::cmp::Ordering;
use std::str::FromStr;

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::knn::NeighborGraph;
use crate::par;

pub const DEFAULT_MAX_COMPOSITIONS: usize = 64;

/// Which end of the density order the flow climbs toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowDirection {
    /// Toward the neighbor with the largest smoothed density.
    #[default]
    Max,
    /// Toward the neighbor with the smallest smoothed density.
    Min,
}

impl FromStr for FlowDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(FlowDirection::Max),
            "min" => Ok(FlowDirection::Min),
            _ => Err(Error::Parameter(format!(
                "flow direction must be 'max' or 'min', got {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for FlowDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlowDirection::Max => "max",
            FlowDirection::Min => "min",
        })
    }
}

/// `Greater` when `a` is the better destination than `b`. Density ties go
/// to the smaller index, which makes the order strict and total.
#[inline]
pub fn prefer(ss: &[f64], direction: FlowDirection, a: usize, b: usize) -> Ordering {
    let by_density = match direction {
        FlowDirection::Max => ss[a].total_cmp(&ss[b]),
        FlowDirection::Min => ss[b].total_cmp(&ss[a]),
    };
    by_density.then(b.cmp(&a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowMap {
    pub f: Vec<usize>,
    pub converged: bool,
    pub composition_steps: usize,
}

impl FlowMap {
    pub fn is_idempotent(&self) -> bool {
        self.f.iter().all(|&j| self.f[j] == j)
    }
}

pub fn build_flow_directed(
    field: &DensityField,
    graph: &NeighborGraph,
    direction: FlowDirection,
) -> Result<FlowMap> {
    if field.ss.len() != graph.len() {
        return Err(Error::Usage(format!(
            "density has {} points, graph has {}",
            field.ss.len(),
            graph.len()
        )));
    }
    let ss = &field.ss;
    let f = par::map_indices(graph.len(), |i| {
        graph.neighbors(i).iter().fold(i, |best, &j| {
            if prefer(ss, direction, j, best) == Ordering::Greater {
                j
            } else {
                best
            }
        })
    });
    Ok(FlowMap {
        f,
        converged: false,
        composition_steps: 0,
    })
}

pub fn build_flow(field: &DensityField, graph: &NeighborGraph) -> Result<FlowMap> {
    build_flow_directed(field, graph, FlowDirection::Max)
}

/// Replaces `f` by `f∘f` until it no longer changes.
///
/// `composition_steps` counts the squarings that changed the map. A cycle
/// in `f` is reported as an error, either because `max_steps` squarings
/// did not settle or because the settled map ends on non-fixed points.
pub fn iterate_to_steady_state(flow: FlowMap, max_steps: usize) -> Result<FlowMap> {
    let step = flow.f;
    if let Some(&bad) = step.iter().find(|&&j| j >= step.len()) {
        return Err(Error::Usage(format!("flow target {bad} out of range")));
    }
    let mut f = step.clone();
    let mut steps = 0;
    loop {
        let next = par::map_indices(f.len(), |i| f[f[i]]);
        if next == f {
            // even cycles square to fixed maps; real targets are fixed points of the step map
            if let Some(i) = (0..f.len()).find(|&i| step[f[i]] != f[i]) {
                return Err(Error::Data(format!(
                    "flow has a cycle through point {}",
                    f[i]
                )));
            }
            return Ok(FlowMap {
                f,
                converged: true,
                composition_steps: steps,
            });
        }
        if steps == max_steps {
            return Err(Error::Data(format!(
                "flow did not reach a steady state within {max_steps} compositions"
            )));
        }
        f = next;
        steps += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Cluster id per point, 1 = largest cluster.
    pub labels: Vec<usize>,
    /// `modes[c - 1]` is the fixed point of cluster `c`.
    pub modes: Vec<usize>,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.modes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.modes.len()];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }
}

/// Relabels arbitrary group keys `0..groups` as 1..=m by descending group
/// size, ties broken by key. Returns the labels and the keys in label order.
pub(crate) fn compact_by_size(keys: &[usize], groups: usize) -> (Vec<usize>, Vec<usize>) {
    let mut sizes = vec![0usize; groups];
    for &k in keys {
        sizes[k] += 1;
    }
    let mut order: Vec<usize> = (0..groups).filter(|&g| sizes[g] > 0).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut label_of = vec![0; groups];
    for (rank, &g) in order.iter().enumerate() {
        label_of[g] = rank + 1;
    }
    (keys.iter().map(|&k| label_of[k]).collect(), order)
}

pub fn extract_clusters(flow: &FlowMap) -> Result<Clustering> {
    if !flow.is_idempotent() {
        return Err(Error::Usage(
            "flow map is not at steady state; iterate it first".into(),
        ));
    }
    let (labels, modes) = compact_by_size(&flow.f, flow.f.len());
    Ok(Clustering { labels, modes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{compute_density, smooth};
    use crate::knn::build_knn_brute;
    use crate::spectra_io::SpectraMatrix;

    fn field_with(ss: Vec<f64>) -> DensityField {
        DensityField {
            sigma: 1.0,
            s: ss.clone(),
            ss,
            smoothing_steps: 0,
            include_self: false,
        }
    }

    #[test]
    fn four_point_flow() {
        let data = SpectraMatrix::new(vec![0.0, 1.0, 3.0, 10.0], 4, 1).unwrap();
        let g = build_knn_brute(&data, 1).unwrap();
        let field = smooth(&compute_density(&g), &g, 1).unwrap();
        let flow = build_flow(&field, &g).unwrap();
        assert_eq!(flow.f, vec![0, 0, 1, 2]);
        let steady = iterate_to_steady_state(flow, 10).unwrap();
        assert_eq!(steady.f, vec![0, 0, 0, 0]);
        assert_eq!(steady.composition_steps, 2);
    }

    #[test]
    fn chain_collapses_in_two_squarings() {
        let flow = FlowMap {
            f: vec![0, 0, 1, 2],
            converged: false,
            composition_steps: 0,
        };
        let out = iterate_to_steady_state(flow, 10).unwrap();
        assert!(out.converged);
        assert_eq!(out.f, vec![0, 0, 0, 0]);
        assert_eq!(out.composition_steps, 2);
    }

    #[test]
    fn idempotent_input_unchanged() {
        let flow = FlowMap {
            f: vec![0, 0, 2, 2],
            converged: false,
            composition_steps: 0,
        };
        let out = iterate_to_steady_state(flow.clone(), 10).unwrap();
        assert_eq!(out.f, flow.f);
        assert_eq!(out.composition_steps, 0);
    }

    #[test]
    fn cycles_are_reported() {
        for f in [vec![1, 0], vec![1, 2, 0], vec![0, 2, 3, 4, 1]] {
            let flow = FlowMap {
                f,
                converged: false,
                composition_steps: 0,
            };
            assert!(iterate_to_steady_state(flow, 8).is_err());
        }
    }

    #[test]
    fn local_maximum_is_fixed() {
        let data = SpectraMatrix::new(vec![0.0, 1.0, 2.0, 3.0], 4, 1).unwrap();
        let g = build_knn_brute(&data, 2).unwrap();
        let flow = build_flow(&field_with(vec![0.1, 0.9, 0.5, 0.2]), &g).unwrap();
        assert_eq!(flow.f[1], 1);
        assert_eq!(flow.f, vec![1, 1, 1, 1]);
    }

    #[test]
    fn equal_density_flows_to_smallest_index() {
        let data = SpectraMatrix::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], 5, 1).unwrap();
        let g = build_knn_brute(&data, 2).unwrap();
        let flow = build_flow(&field_with(vec![1.0; 5]), &g).unwrap();
        assert_eq!(flow.f[0], 0);
        for i in 0..5 {
            let best = g.neighbors(i).iter().copied().chain([i]).min().unwrap();
            assert_eq!(flow.f[i], best);
        }
    }

    #[test]
    fn min_direction_descends() {
        let data = SpectraMatrix::new(vec![0.0, 1.0, 2.0, 3.0], 4, 1).unwrap();
        let g = build_knn_brute(&data, 2).unwrap();
        let flow =
            build_flow_directed(&field_with(vec![0.1, 0.9, 0.5, 0.2]), &g, FlowDirection::Min)
                .unwrap();
        assert_eq!(flow.f, vec![0, 0, 3, 3]);
    }

    #[test]
    fn size_mismatch() {
        let data = SpectraMatrix::new(vec![0.0, 1.0, 2.0], 3, 1).unwrap();
        let g = build_knn_brute(&data, 1).unwrap();
        assert!(build_flow(&field_with(vec![1.0; 4]), &g).is_err());
    }

    #[test]
    fn clusters_from_fixed_map() {
        let flow = FlowMap {
            f: vec![0, 0, 0, 3],
            converged: true,
            composition_steps: 0,
        };
        let c = extract_clusters(&flow).unwrap();
        assert_eq!(c.labels, vec![1, 1, 1, 2]);
        assert_eq!(c.modes, vec![0, 3]);
        assert_eq!(c.sizes(), vec![3, 1]);
    }

    #[test]
    fn largest_cluster_is_first() {
        let flow = FlowMap {
            f: vec![0, 4, 4, 4, 4],
            converged: true,
            composition_steps: 0,
        };
        let c = extract_clusters(&flow).unwrap();
        assert_eq!(c.labels, vec![2, 1, 1, 1, 1]);
        assert_eq!(c.modes, vec![4, 0]);
    }

    #[test]
    fn identity_gives_singletons() {
        let flow = FlowMap {
            f: (0..6).collect(),
            converged: true,
            composition_steps: 0,
        };
        let c = extract_clusters(&flow).unwrap();
        assert_eq!(c.cluster_count(), 6);
        assert_eq!(c.labels, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn non_idempotent_rejected() {
        let flow = FlowMap {
            f: vec![0, 0, 1],
            converged: false,
            composition_steps: 0,
        };
        assert!(matches!(extract_clusters(&flow), Err(Error::Usage(_))));
    }

    #[test]
    fn direction_parses() {
        assert_eq!("min".parse::<FlowDirection>().unwrap(), FlowDirection::Min);
        assert!("up".parse::<FlowDirection>().is_err());
    }
}
