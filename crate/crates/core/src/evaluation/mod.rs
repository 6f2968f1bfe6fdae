//! Comparison of a clustering against ground-truth classes.
//!
//! *Primary cluster* of a class: the cluster holding most of its pixels.
//! *Preservation*: share of a class inside its primary cluster.
//! *Mixed cluster*: a primary cluster that also holds more than a
//! threshold share of some other class.

mod ari;
mod assignment;
mod synth;

pub use ari::adjusted_rand_index;
pub use assignment::max_weight_assignment;
pub use synth::{default_blobs, generate_blobs, generate_mixture_cube, BlobSpec, MixtureCubeSpec};

use crate::error::{Error, Result};
use crate::spectra_io::LabelMask;

pub const DEFAULT_MIXED_THRESHOLD_PCT: f64 = 5.0;

/// Pixel counts of each class (rows) in each cluster (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTable {
    counts: Vec<usize>,
    class_names: Vec<String>,
    cluster_ids: Vec<usize>,
}

impl ConfusionTable {
    /// Builds a table from explicit counts, `counts[c][j]` for class `c`
    /// and the `j`-th entry of `cluster_ids`.
    pub fn from_counts(
        counts: Vec<Vec<usize>>,
        class_names: Vec<String>,
        cluster_ids: Vec<usize>,
    ) -> Result<Self> {
        if counts.len() != class_names.len() || counts.is_empty() {
            return Err(Error::Usage(format!(
                "{} count rows for {} class names",
                counts.len(),
                class_names.len()
            )));
        }
        if counts.iter().any(|r| r.len() != cluster_ids.len()) {
            return Err(Error::Usage("count rows must match the cluster ids".into()));
        }
        if let Some(c) = counts.iter().position(|r| r.iter().sum::<usize>() == 0) {
            return Err(Error::Data(format!("class {} has no pixels", class_names[c])));
        }
        Ok(ConfusionTable {
            counts: counts.concat(),
            class_names,
            cluster_ids,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_ids.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn cluster_ids(&self) -> &[usize] {
        &self.cluster_ids
    }

    /// Count for class row `class` and cluster column `column`.
    pub fn count(&self, class: usize, column: usize) -> usize {
        self.counts[class * self.cluster_ids.len() + column]
    }

    pub fn row(&self, class: usize) -> &[usize] {
        let m = self.cluster_ids.len();
        &self.counts[class * m..(class + 1) * m]
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.row(class).iter().sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Column of the cluster with the most pixels of `class`; ties go to
    /// the smaller cluster id.
    fn primary_column(&self, class: usize) -> usize {
        let row = self.row(class);
        let mut best = 0;
        for j in 1..row.len() {
            let better = row[j] > row[best]
                || (row[j] == row[best] && self.cluster_ids[j] < self.cluster_ids[best]);
            if better {
                best = j;
            }
        }
        best
    }
}

/// Counts labeled pixels per (class, cluster). Unlabeled pixels are skipped.
pub fn confusion(labels: &[usize], mask: &LabelMask) -> Result<ConfusionTable> {
    if labels.len() != mask.len() {
        return Err(Error::Usage(format!(
            "{} cluster labels for a mask of {} pixels",
            labels.len(),
            mask.len()
        )));
    }
    let mut cluster_ids: Vec<usize> = labels
        .iter()
        .zip(mask.labels())
        .filter(|(_, &c)| c > 0)
        .map(|(&l, _)| l)
        .collect();
    if cluster_ids.is_empty() {
        return Err(Error::Data("mask contains no class".into()));
    }
    cluster_ids.sort_unstable();
    cluster_ids.dedup();
    let m = cluster_ids.len();
    let mut counts = vec![0; mask.class_count() * m];
    for (&l, &c) in labels.iter().zip(mask.labels()) {
        if c > 0 {
            let j = cluster_ids.binary_search(&l).expect("collected above");
            counts[(c - 1) * m + j] += 1;
        }
    }
    Ok(ConfusionTable {
        counts,
        class_names: mask.class_names().to_vec(),
        cluster_ids,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preservation {
    /// Primary cluster id per class.
    pub primary_cluster: Vec<usize>,
    pub pct: Vec<f64>,
    /// Unweighted mean of `pct` over classes.
    pub mean: f64,
}

pub fn class_preservation(table: &ConfusionTable) -> Preservation {
    let mut primary_cluster = Vec::with_capacity(table.class_count());
    let mut pct = Vec::with_capacity(table.class_count());
    for c in 0..table.class_count() {
        let j = table.primary_column(c);
        primary_cluster.push(table.cluster_ids[j]);
        pct.push(100.0 * table.count(c, j) as f64 / table.class_size(c) as f64);
    }
    let mean = pct.iter().sum::<f64>() / pct.len() as f64;
    Preservation {
        primary_cluster,
        pct,
        mean,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedEntry {
    /// Class whose primary cluster is mixed (row index).
    pub class: usize,
    /// Other class present in that cluster (row index).
    pub other: usize,
    /// Share of `other`'s pixels that sit in `class`'s primary cluster.
    pub pct: f64,
}

/// Lists every (class, other class) pair where the primary cluster of
/// `class` holds more than `threshold_pct` percent of the other class.
pub fn mixed_clusters(table: &ConfusionTable, threshold_pct: f64) -> Vec<MixedEntry> {
    let mut out = Vec::new();
    for c in 0..table.class_count() {
        let p = table.primary_column(c);
        for other in (0..table.class_count()).filter(|&o| o != c) {
            let pct = 100.0 * table.count(other, p) as f64 / table.class_size(other) as f64;
            if pct > threshold_pct {
                out.push(MixedEntry {
                    class: c,
                    other,
                    pct,
                });
            }
        }
    }
    out
}

/// Share of labeled pixels lying in their own class's primary cluster.
/// Several classes may share one designated cluster.
pub fn percent_accuracy(table: &ConfusionTable) -> f64 {
    let correct: usize = (0..table.class_count())
        .map(|c| table.count(c, table.primary_column(c)))
        .sum();
    100.0 * correct as f64 / table.total() as f64
}

/// Percent accuracy under a one-to-one class/cluster designation that
/// maximizes the number of correct pixels.
pub fn percent_accuracy_matched(table: &ConfusionTable) -> f64 {
    let weights: Vec<Vec<f64>> = (0..table.class_count())
        .map(|c| table.row(c).iter().map(|&v| v as f64).collect())
        .collect();
    let pairs = max_weight_assignment(&weights);
    let correct: usize = pairs.iter().map(|&(c, j)| table.count(c, j)).sum();
    100.0 * correct as f64 / table.total() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub confusion: ConfusionTable,
    pub preservation: Preservation,
    pub mixed: Vec<MixedEntry>,
    pub percent_accuracy: f64,
    pub mixed_threshold_pct: f64,
}

impl ClusterReport {
    pub fn from_table(confusion: ConfusionTable, mixed_threshold_pct: f64) -> Self {
        ClusterReport {
            preservation: class_preservation(&confusion),
            mixed: mixed_clusters(&confusion, mixed_threshold_pct),
            percent_accuracy: percent_accuracy(&confusion),
            confusion,
            mixed_threshold_pct,
        }
    }

    pub fn new(labels: &[usize], mask: &LabelMask) -> Result<Self> {
        Ok(Self::from_table(
            confusion(labels, mask)?,
            DEFAULT_MIXED_THRESHOLD_PCT,
        ))
    }
}
