//! Seeded synthetic data: isotropic Gaussian blobs and a linear-mixing
//! hyperspectral cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectra_io::{LabelMask, SpectraMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub center: Vec<f64>,
    pub stdev: f64,
    pub count: usize,
}

/// Three 2-D blobs of 100 points, stdev 0.5, centers 10 stdev apart.
pub fn default_blobs() -> Vec<BlobSpec> {
    [[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]]
        .into_iter()
        .map(|c| BlobSpec {
            center: c.to_vec(),
            stdev: 0.5,
            count: 100,
        })
        .collect()
}

/// Samples each blob in turn; the mask labels blob `b` as class `b + 1`.
pub fn generate_blobs(specs: &[BlobSpec], seed: u64) -> Result<(SpectraMatrix, LabelMask)> {
    let first = specs
        .first()
        .ok_or_else(|| Error::Parameter("at least one blob is required".into()))?;
    let d = first.center.len();
    if d == 0 {
        return Err(Error::Parameter("blob centers need at least one coordinate".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (b, spec) in specs.iter().enumerate() {
        if spec.center.len() != d {
            return Err(Error::Parameter(format!(
                "blob {} has {} coordinates, expected {d}",
                b + 1,
                spec.center.len()
            )));
        }
        if !(spec.stdev > 0.0 && spec.stdev.is_finite()) {
            return Err(Error::Parameter(format!(
                "blob {} stdev must be positive, got {}",
                b + 1,
                spec.stdev
            )));
        }
        if spec.count == 0 {
            return Err(Error::Parameter(format!("blob {} has no points", b + 1)));
        }
        for _ in 0..spec.count {
            for &c in &spec.center {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(c + spec.stdev * z);
            }
            labels.push(b + 1);
        }
    }
    let n = labels.len();
    Ok((SpectraMatrix::new(values, n, d)?, LabelMask::new(labels, None)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCubeSpec {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub materials: usize,
    /// Per-band Gaussian noise added to each mixed spectrum.
    pub noise: f64,
}

impl MixtureCubeSpec {
    /// Urban-sized: 307 lines, 300 samples, 117 bands.
    pub fn urban_sized() -> Self {
        MixtureCubeSpec {
            rows: 307,
            cols: 300,
            bands: 117,
            materials: 8,
            noise: 1e-3,
        }
    }
}

/// A cube under the linear mixing model.
///
/// Each material has a smooth reflectance curve. The image is split into
/// Voronoi patches, one dominant material per patch; every pixel mixes its
/// dominant material (fraction 0.75..1) with one other material. The mask
/// records the dominant material.
pub fn generate_mixture_cube(spec: &MixtureCubeSpec, seed: u64) -> Result<(SpectraMatrix, LabelMask)> {
    let MixtureCubeSpec {
        rows,
        cols,
        bands,
        materials,
        noise,
    } = *spec;
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(Error::Parameter("cube dimensions must be positive".into()));
    }
    if materials < 2 {
        return Err(Error::Parameter("a mixture needs at least two materials".into()));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Parameter(format!("noise must be nonnegative, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let endmembers: Vec<Vec<f64>> = (0..materials)
        .map(|_| {
            let base = rng.random_range(0.1..0.5);
            let slope = rng.random_range(-0.2..0.2);
            let amp = rng.random_range(0.05..0.2);
            let freq = rng.random_range(0.5..3.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            (0..bands)
                .map(|b| {
                    let t = b as f64 / bands as f64;
                    base + slope * t + amp * (std::f64::consts::TAU * freq * t + phase).sin()
                })
                .collect()
        })
        .collect();

    let patches = (4 * materials).min(rows * cols);
    let sites: Vec<(f64, f64, usize)> = (0..patches)
        .map(|p| {
            (
                rng.random_range(0.0..rows as f64),
                rng.random_range(0.0..cols as f64),
                p % materials,
            )
        })
        .collect();

    let n = rows * cols;
    let mut values = Vec::with_capacity(n * bands);
    let mut labels = Vec::with_capacity(n);
    for r in 0..rows {
        for c in 0..cols {
            let (y, x) = (r as f64 + 0.5, c as f64 + 0.5);
            let dominant = sites
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - y).powi(2) + (a.1 - x).powi(2);
                    let db = (b.0 - y).powi(2) + (b.1 - x).powi(2);
                    da.total_cmp(&db)
                })
                .expect("at least one patch")
                .2;
            let mut other = rng.random_range(0..materials - 1);
            if other >= dominant {
                other += 1;
            }
            let f: f64 = rng.random_range(0.75..=1.0);
            for b in 0..bands {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(f * endmembers[dominant][b] + (1.0 - f) * endmembers[other][b] + noise * z);
            }
            labels.push(dominant + 1);
        }
    }
    // a material whose patches were all swallowed by neighbors is dropped
    let mut present = vec![false; materials];
    labels.iter().for_each(|&l| present[l - 1] = true);
    let mut remap = vec![0; materials];
    let mut names = Vec::new();
    for m in (0..materials).filter(|&m| present[m]) {
        names.push(format!("material {}", m + 1));
        remap[m] = names.len();
    }
    let labels = labels.iter().map(|&l| remap[l - 1]).collect();
    let data = SpectraMatrix::new(values, n, bands)?.with_geometry(rows, cols)?;
    Ok((data, LabelMask::new(labels, Some(names))?))
}
