use crate::error::{Error, Result};

/// Image shape of a cube: `rows` lines by `cols` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
}

/// `n` pixels by `d` bands, stored row-major (pixel-major).
///
/// Pixels are in line-major image order whenever a geometry is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraMatrix {
    values: Vec<f64>,
    n: usize,
    d: usize,
    geometry: Option<Geometry>,
}

impl SpectraMatrix {
    pub fn new(values: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Size(format!(
                "matrix must have at least one row and one column, got {n}x{d}"
            )));
        }
        if values.len() != n * d {
            return Err(Error::Size(format!(
                "{} values do not fill a {n}x{d} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value {} at pixel {}, band {}",
                values[pos],
                pos / d,
                pos % d
            )));
        }
        Ok(SpectraMatrix {
            values,
            n,
            d,
            geometry: None,
        })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::Size(format!(
                    "row {i} has {} values, expected {d}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), d)
    }

    pub fn with_geometry(mut self, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != self.n {
            return Err(Error::Usage(format!(
                "geometry {rows}x{cols} does not cover {} pixels",
                self.n
            )));
        }
        self.geometry = Some(Geometry { rows, cols });
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bands(&self) -> usize {
        self.d
    }

    pub fn geometry(&self) -> Option<Geometry> {
        self.geometry
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.n,
            self.d,
        )?;
        out.geometry = self.geometry;
        Ok(out)
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return Err(Error::Usage(format!(
                "permutation of length {} for {} rows",
                order.len(),
                self.n
            )));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, self.n, self.d)
    }
}

/// Squared Euclidean distance, summed in band order.
///
/// Every distance in the crate goes through this function so that the
/// brute-force and indexed neighbor searches agree bit for bit.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        acc += t * t;
    }
    acc
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}
