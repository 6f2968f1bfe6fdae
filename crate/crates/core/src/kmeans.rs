//! Lloyd's k-means with k-means++ seeding, used as the comparison baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::spectra_io::{squared_distance, SpectraMatrix};

pub const DEFAULT_CLUSTERS: usize = 20;
pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster id per point, 1-based.
    pub labels: Vec<usize>,
    /// Row-major `clusters x bands` centroid matrix.
    pub centroids: Vec<f64>,
    pub bands: usize,
    /// Sum of squared distances from each point to its assigned centroid.
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every assignment step, starting with the seeding.
    pub inertia_history: Vec<f64>,
    /// Clusters that ended empty and were removed from the result.
    pub dropped: usize,
}

impl KMeansResult {
    pub fn cluster_count(&self) -> usize {
        self.centroids.len() / self.bands
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.bands..(c + 1) * self.bands]
    }
}

fn nearest(point: &[f64], centroids: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(d).enumerate() {
        let dist = squared_distance(point, centroid);
        if dist < best.1 {
            best = (c, dist);
        }
    }
    best
}

fn assign(data: &SpectraMatrix, centroids: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let d = data.bands();
    par::map_indices(data.len(), |i| nearest(data.row(i), centroids, d)).into_iter().unzip()
}

fn plus_plus_seeds(data: &SpectraMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = data.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = data.row(first).to_vec();
    let mut d2: Vec<f64> = data.rows().map(|r| squared_distance(r, data.row(first))).collect();
    while centroids.len() < k * data.bands() {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total has a positive weight")
        } else {
            chosen.iter().position(|c| !c).expect("k <= n")
        };
        chosen[next] = true;
        centroids.extend_from_slice(data.row(next));
        for (w, r) in d2.iter_mut().zip(data.rows()) {
            *w = w.min(squared_distance(r, data.row(next)));
        }
    }
    centroids
}

/// Moves the farthest point of a multi-member cluster into each empty one.
fn reseed_empty(labels: &mut [usize], dist2: &mut [f64], k: usize) {
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist2[b] >= dist2[i] => Some(b),
                _ => Some(i),
            });
        let Some(p) = far else { break };
        counts[labels[p]] -= 1;
        counts[empty] = 1;
        labels[p] = empty;
        dist2[p] = 0.0;
    }
}

fn means(data: &SpectraMatrix, labels: &[usize], previous: &[f64], k: usize) -> Vec<f64> {
    let d = data.bands();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (row, &l) in data.rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(row) {
            *s += v;
        }
    }
    for c in 0..k {
        let block = &mut sums[c * d..(c + 1) * d];
        if counts[c] == 0 {
            block.copy_from_slice(&previous[c * d..(c + 1) * d]);
        } else {
            let m = counts[c] as f64;
            block.iter_mut().for_each(|s| *s /= m);
        }
    }
    sums
}

/// Runs k-means++ seeding followed by Lloyd iterations until the assignment
/// stops changing or `max_iter` updates have been made.
pub fn kmeans(data: &SpectraMatrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    let n = data.len();
    if k < 1 {
        return Err(Error::Parameter("k-means needs at least one cluster".into()));
    }
    if k > n {
        return Err(Error::Parameter(format!(
            "k-means with k = {k} exceeds the {n} points"
        )));
    }
    let d = data.bands();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seeds(data, k, &mut rng);
    let (mut labels, mut dist2) = assign(data, &centroids);
    let mut history = vec![dist2.iter().sum::<f64>()];
    let mut iterations = 0;

    while iterations < max_iter {
        reseed_empty(&mut labels, &mut dist2, k);
        centroids = means(data, &labels, &centroids, k);
        let (next, next_dist2) = assign(data, &centroids);
        iterations += 1;
        history.push(next_dist2.iter().sum());
        let done = next == labels;
        labels = next;
        dist2 = next_dist2;
        if done {
            break;
        }
    }

    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    let mut new_id = vec![0; k];
    let mut kept = Vec::with_capacity(k * d);
    let mut next_id = 0;
    for c in 0..k {
        if counts[c] > 0 {
            new_id[c] = next_id;
            next_id += 1;
            kept.extend_from_slice(&centroids[c * d..(c + 1) * d]);
        }
    }
    let dropped = k - next_id;
    if dropped > 0 {
        log::warn!("k-means dropped {dropped} empty cluster(s)");
    }

    Ok(KMeansResult {
        labels: labels.iter().map(|&l| new_id[l] + 1).collect(),
        centroids: kept,
        bands: d,
        inertia: dist2.iter().sum(),
        iterations,
        inertia_history: history,
        dropped,
    })
}
