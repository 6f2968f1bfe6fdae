//! Binary graph cache: 8 magic bytes, `n` and `k` as little-endian u64,
//! then the row-major `kn` array (u64) and `dist` array (f64), all
//! little-endian.

use std::fs;
use std::path::Path;

use super::NeighborGraph;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 8] = b"GFKNNv1\n";

pub fn encode_graph(g: &NeighborGraph) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + g.kn().len() * 16);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&(g.len() as u64).to_le_bytes());
    out.extend_from_slice(&(g.k() as u64).to_le_bytes());
    for &j in g.kn() {
        out.extend_from_slice(&(j as u64).to_le_bytes());
    }
    for &d in g.dist() {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out
}

pub fn decode_graph(bytes: &[u8]) -> Result<NeighborGraph> {
    if bytes.len() < 24 || &bytes[..8] != CACHE_MAGIC {
        return Err(Error::Format("not a neighbor-graph cache file".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (n, k) = (word(8) as usize, word(16) as usize);
    let cells = n
        .checked_mul(k)
        .filter(|c| c.checked_mul(16).and_then(|b| b.checked_add(24)) == Some(bytes.len()))
        .ok_or_else(|| {
            Error::Size(format!(
                "cache declares n = {n}, k = {k} but holds {} bytes",
                bytes.len()
            ))
        })?;
    let kn = (0..cells).map(|c| word(24 + 8 * c) as usize).collect();
    let base = 24 + 8 * cells;
    let dist = (0..cells)
        .map(|c| f64::from_le_bytes(bytes[base + 8 * c..base + 8 * c + 8].try_into().expect("8 bytes")))
        .collect();
    NeighborGraph::from_parts(n, k, kn, dist)
}

pub fn write_graph(g: &NeighborGraph, path: &Path) -> Result<()> {
    fs::write(path, encode_graph(g)).map_err(|e| Error::io(path, e))
}

pub fn read_graph(path: &Path) -> Result<NeighborGraph> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_graph(&bytes)
}
