use crate::density::{compute_density, smooth_with, DensityField, DEFAULT_SMOOTHING_STEPS};
use crate::error::Result;
use crate::flow::{
    build_flow_directed, extract_clusters, iterate_to_steady_state, Clustering, FlowDirection,
    FlowMap, DEFAULT_MAX_COMPOSITIONS,
};
use crate::knn::{build_knn_indexed, NeighborGraph, DEFAULT_NEIGHBORS};
use crate::spectra_io::SpectraMatrix;

/// Parameters of the full gradient-flow clustering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientFlow {
    pub neighbors: usize,
    pub smoothing_steps: usize,
    pub direction: FlowDirection,
    /// Count each point's own density in its smoothing average.
    pub include_self: bool,
    pub max_compositions: usize,
}

impl Default for GradientFlow {
    fn default() -> Self {
        GradientFlow {
            neighbors: DEFAULT_NEIGHBORS,
            smoothing_steps: DEFAULT_SMOOTHING_STEPS,
            direction: FlowDirection::Max,
            include_self: false,
            max_compositions: DEFAULT_MAX_COMPOSITIONS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub density: DensityField,
    /// One-step flow, before composition.
    pub step: FlowMap,
    pub steady: FlowMap,
    pub clustering: Clustering,
}

impl GradientFlow {
    /// Everything after the neighbor graph: density, smoothing, flow, labels.
    pub fn run_on_graph(&self, graph: &NeighborGraph) -> Result<FlowRun> {
        let raw = compute_density(graph);
        let density = smooth_with(&raw, graph, self.smoothing_steps, self.include_self)?;
        let step = build_flow_directed(&density, graph, self.direction)?;
        let steady = iterate_to_steady_state(step.clone(), self.max_compositions)?;
        let clustering = extract_clusters(&steady)?;
        Ok(FlowRun {
            density,
            step,
            steady,
            clustering,
        })
    }

    pub fn run(&self, data: &SpectraMatrix) -> Result<FlowRun> {
        let graph = build_knn_indexed(data, self.neighbors)?;
        self.run_on_graph(&graph)
    }
}
