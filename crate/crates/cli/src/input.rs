use std::fs;
use std::path::{Path, PathBuf};

use gradflow::knn::{build_knn_indexed, read_graph, write_graph, NeighborGraph};
use gradflow::spectra_io::{read_csv_matrix, read_envi_cube, SpectraMatrix};
use gradflow::{Error, Result};
use sha2::{Digest, Sha256};

use crate::args::{InputArgs, InputFormat};

pub fn load(args: &InputArgs) -> Result<SpectraMatrix> {
    let envi = match args.format {
        InputFormat::Envi => true,
        InputFormat::Csv => false,
        InputFormat::Auto => args
            .input
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("hdr")),
    };
    let data = if envi {
        read_envi_cube(&args.input)?
    } else {
        read_csv_matrix(&args.input)?
    };
    match (args.rows, args.cols) {
        (Some(r), Some(c)) => data.with_geometry(r as usize, c as usize),
        _ => Ok(data),
    }
}

/// Hex SHA-256 over the matrix shape and the bit patterns of its values.
pub fn digest(data: &SpectraMatrix) -> String {
    let mut h = Sha256::new();
    h.update((data.len() as u64).to_le_bytes());
    h.update((data.bands() as u64).to_le_bytes());
    for v in data.values() {
        h.update(v.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_path(dir: &Path, data: &SpectraMatrix, k: usize) -> PathBuf {
    dir.join(format!("knn-{}-k{k}.bin", &digest(data)[..32]))
}

/// Returns the graph and whether it came from the cache.
pub fn neighbor_graph(
    data: &SpectraMatrix,
    k: usize,
    cache_dir: Option<&Path>,
) -> Result<(NeighborGraph, bool)> {
    let Some(dir) = cache_dir else {
        return Ok((build_knn_indexed(data, k)?, false));
    };
    let path = cache_path(dir, data, k);
    if path.is_file() {
        match read_graph(&path).and_then(|g| g.validate_against(data).map(|_| g)) {
            Ok(g) if g.k() == k => {
                log::info!("neighbor graph from cache {}", path.display());
                return Ok((g, true));
            }
            Ok(_) => log::warn!("{}: wrong k, rebuilding", path.display()),
            Err(e) => log::warn!("{}: {e}; rebuilding", path.display()),
        }
    }
    let g = build_knn_indexed(data, k)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_graph(&g, &path)?;
    Ok((g, false))
}
