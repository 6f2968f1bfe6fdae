use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BASE_PALETTE: [[u8; 3]; 20] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
    [174, 199, 232],
    [255, 187, 120],
    [152, 223, 138],
    [255, 152, 150],
    [197, 176, 213],
    [196, 156, 148],
    [247, 182, 210],
    [199, 199, 199],
    [219, 219, 141],
    [158, 218, 229],
];

/// Color for palette slot `i`: a fixed table, then golden-angle hues.
pub fn palette_color(i: usize) -> [u8; 3] {
    if let Some(c) = BASE_PALETTE.get(i) {
        return *c;
    }
    let j = (i - BASE_PALETTE.len()) as f64;
    let hue = (j * 0.618_033_988_749_895).fract() * 6.0;
    let value = if (i / 7).is_multiple_of(2) { 0.9 } else { 0.65 };
    let (s, v) = (0.75, value);
    let c = v * s;
    let x = c * (1.0 - ((hue % 2.0) - 1.0).abs());
    let (r, g, b) = match hue as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to_byte = |t: f64| ((t + m) * 255.0).round() as u8;
    [to_byte(r), to_byte(g), to_byte(b)]
}

/// Cluster labels laid out as an image, with one palette entry per cluster.
///
/// Palette slot 0 goes to the largest cluster; equal sizes are ordered by
/// cluster id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMapImage {
    labels: Vec<usize>,
    rows: usize,
    cols: usize,
    /// Cluster ids in palette order.
    clusters: Vec<usize>,
    palette: Vec<[u8; 3]>,
}

impl ClassMapImage {
    pub fn new(labels: Vec<usize>, rows: Option<usize>, cols: Option<usize>) -> Result<Self> {
        let (Some(rows), Some(cols)) = (rows, cols) else {
            return Err(Error::Usage(
                "class map needs image geometry; supply --rows and --cols".into(),
            ));
        };
        if rows * cols != labels.len() {
            return Err(Error::Usage(format!(
                "{rows}x{cols} image does not match {} labels",
                labels.len()
            )));
        }
        let mut sizes: std::collections::BTreeMap<usize, usize> = Default::default();
        for &l in &labels {
            *sizes.entry(l).or_default() += 1;
        }
        let mut clusters: Vec<(usize, usize)> = sizes.into_iter().collect();
        clusters.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let clusters: Vec<usize> = clusters.into_iter().map(|(id, _)| id).collect();
        let palette = (0..clusters.len()).map(palette_color).collect();
        Ok(ClassMapImage {
            labels,
            rows,
            cols,
            clusters,
            palette,
        })
    }

    pub fn palette(&self) -> &[[u8; 3]] {
        &self.palette
    }

    /// Cluster ids in palette order.
    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn color_of(&self, label: usize) -> Option<[u8; 3]> {
        self.clusters
            .iter()
            .position(|&c| c == label)
            .map(|i| self.palette[i])
    }

    /// Binary PPM (P6) bytes, one pixel per label in line-major order.
    pub fn to_ppm(&self) -> Vec<u8> {
        let max = self.clusters.iter().copied().max().unwrap_or(0);
        let mut lut = vec![[0u8; 3]; max + 1];
        for (slot, &id) in self.clusters.iter().enumerate() {
            lut[id] = self.palette[slot];
        }
        let mut out = format!("P6\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.reserve(self.labels.len() * 3);
        for &l in &self.labels {
            out.extend_from_slice(&lut[l]);
        }
        out
    }
}

pub fn write_class_map(img: &ClassMapImage, path: &Path) -> Result<()> {
    fs::write(path, img.to_ppm()).map_err(|e| Error::io(path, e))
}
