//! Browser bindings for the clustering demo in `www/`.
//!
//! Points cross the boundary as flat `[x0, y0, x1, y1, ...]` arrays. The
//! plain functions return `Result<_, String>` so they test natively; the
//! `#[wasm_bindgen]` wrappers turn errors into JS exceptions.

use gradflow::evaluation::{adjusted_rand_index, generate_blobs, BlobSpec};
use gradflow::flow::FlowDirection;
use gradflow::kmeans::{kmeans, DEFAULT_MAX_ITER};
use gradflow::spectra_io::SpectraMatrix;
use gradflow::GradientFlow;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Blobs {
    points: Vec<f64>,
    truth: Vec<u32>,
}

#[wasm_bindgen]
impl Blobs {
    #[wasm_bindgen(getter)]
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    /// Generating blob per point, 1-based.
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<u32> {
        self.truth.clone()
    }
}

/// `blobs` 2-D blobs with centers evenly spaced on a circle of `radius`.
pub fn make_blobs(blobs: usize, count: usize, radius: f64, stdev: f64, seed: u64) -> Result<Blobs, String> {
    let specs: Vec<BlobSpec> = (0..blobs)
        .map(|b| {
            let angle = std::f64::consts::TAU * b as f64 / blobs as f64;
            BlobSpec {
                center: vec![radius * angle.cos(), radius * angle.sin()],
                stdev,
                count,
            }
        })
        .collect();
    let (data, mask) = generate_blobs(&specs, seed).map_err(|e| e.to_string())?;
    Ok(Blobs {
        points: data.values().to_vec(),
        truth: mask.labels().iter().map(|&l| l as u32).collect(),
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct FlowResult {
    labels: Vec<u32>,
    step: Vec<u32>,
    density: Vec<f64>,
    modes: Vec<u32>,
    sigma: f64,
    compositions: u32,
}

#[wasm_bindgen]
impl FlowResult {
    /// Cluster per point, 1 = largest.
    #[wasm_bindgen(getter)]
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    /// One-step flow target per point; draw these as arrows.
    #[wasm_bindgen(getter)]
    pub fn step(&self) -> Vec<u32> {
        self.step.clone()
    }

    /// Smoothed density per point.
    #[wasm_bindgen(getter)]
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }

    /// Point index of each cluster's mode, in label order.
    #[wasm_bindgen(getter)]
    pub fn modes(&self) -> Vec<u32> {
        self.modes.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[wasm_bindgen(getter)]
    pub fn compositions(&self) -> u32 {
        self.compositions
    }
}

fn matrix(points: &[f64]) -> Result<SpectraMatrix, String> {
    if points.is_empty() || !points.len().is_multiple_of(2) {
        return Err(format!("expected x,y pairs, got {} numbers", points.len()));
    }
    SpectraMatrix::new(points.to_vec(), points.len() / 2, 2).map_err(|e| e.to_string())
}

pub fn flow_cluster(points: &[f64], neighbors: usize, smoothing_steps: usize, toward_low: bool) -> Result<FlowResult, String> {
    let data = matrix(points)?;
    let config = GradientFlow {
        neighbors,
        smoothing_steps,
        direction: if toward_low { FlowDirection::Min } else { FlowDirection::Max },
        ..Default::default()
    };
    let run = config.run(&data).map_err(|e| e.to_string())?;
    let to_u32 = |v: &[usize]| v.iter().map(|&x| x as u32).collect();
    Ok(FlowResult {
        labels: to_u32(&run.clustering.labels),
        step: to_u32(&run.step.f),
        density: run.density.ss,
        modes: to_u32(&run.clustering.modes),
        sigma: run.density.sigma,
        compositions: run.steady.composition_steps as u32,
    })
}

pub fn kmeans_cluster(points: &[f64], clusters: usize, seed: u64) -> Result<Vec<u32>, String> {
    let data = matrix(points)?;
    let r = kmeans(&data, clusters, seed, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
    Ok(r.labels.iter().map(|&l| l as u32).collect())
}

pub fn agreement(a: &[u32], b: &[u32]) -> Result<f64, String> {
    let a: Vec<usize> = a.iter().map(|&x| x as usize).collect();
    let b: Vec<usize> = b.iter().map(|&x| x as usize).collect();
    adjusted_rand_index(&a, &b).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = makeBlobs)]
pub fn make_blobs_js(blobs: u32, count: u32, radius: f64, stdev: f64, seed: u32) -> Result<Blobs, JsError> {
    make_blobs(blobs as usize, count as usize, radius, stdev, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = flowCluster)]
pub fn flow_cluster_js(points: &[f64], neighbors: u32, smoothing_steps: u32, toward_low: bool) -> Result<FlowResult, JsError> {
    flow_cluster(points, neighbors as usize, smoothing_steps as usize, toward_low).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kmeansCluster)]
pub fn kmeans_cluster_js(points: &[f64], clusters: u32, seed: u32) -> Result<Vec<u32>, JsError> {
    kmeans_cluster(points, clusters as usize, seed as u64).map_err(|e| JsError::new(&e))
}

/// Adjusted Rand index between two labelings.
#[wasm_bindgen(js_name = adjustedRandIndex)]
pub fn agreement_js(a: &[u32], b: &[u32]) -> Result<f64, JsError> {
    agreement(a, b).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_blobs_round_trip() {
        let b = make_blobs(3, 100, 5.0, 0.5, 4).unwrap();
        assert_eq!(b.points.len(), 600);
        let flow = flow_cluster(&b.points, 20, 2, false).unwrap();
        assert_eq!(flow.modes.len(), 3);
        assert!(agreement(&flow.labels, &b.truth).unwrap() > 0.95);
        for (i, &m) in flow.modes.iter().enumerate() {
            assert_eq!(flow.step[m as usize], m);
            assert_eq!(flow.labels[m as usize], i as u32 + 1);
        }
        let km = kmeans_cluster(&b.points, 3, 1).unwrap();
        assert!(agreement(&km, &b.truth).unwrap() > 0.95);
    }

    #[test]
    fn bad_input_is_an_error_string() {
        assert!(flow_cluster(&[1.0, 2.0, 3.0], 1, 0, false).is_err());
        assert!(flow_cluster(&[0.0, 0.0, 1.0, 1.0], 5, 0, false).unwrap_err().contains("neighbor"));
        assert!(make_blobs(2, 10, 1.0, 0.0, 0).is_err());
        assert!(kmeans_cluster(&[0.0, 0.0], 0, 0).is_err());
    }
}
