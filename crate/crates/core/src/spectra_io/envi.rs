//! ENVI header + raw binary cube reader.
//!
//! Supported subset: `samples`, `lines`, `bands`, `interleave` (bsq, bil,
//! bip), `data type` (2 = int16, 4 = float32, 5 = float64), `byte order`
//! and the optional `header offset`. Other keys are ignored with a
//! warning. No preprocessing (bad-band removal, scaling) is applied.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::matrix::SpectraMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Bsq,
    Bil,
    Bip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    Int16,
    Float32,
    Float64,
}

impl DataType {
    fn from_code(code: u32) -> Option<Self> {
        match code {
            2 => Some(DataType::Int16),
            4 => Some(DataType::Float32),
            5 => Some(DataType::Float64),
            _ => None,
        }
    }

    pub fn size(self) -> usize {
        match self {
            DataType::Int16 => 2,
            DataType::Float32 => 4,
            DataType::Float64 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnviHeader {
    pub samples: usize,
    pub lines: usize,
    pub bands: usize,
    pub interleave: Interleave,
    pub data_type: DataType,
    pub byte_order: ByteOrder,
    pub header_offset: usize,
}

impl EnviHeader {
    pub fn pixels(&self) -> usize {
        self.samples * self.lines
    }

    pub fn elements(&self) -> usize {
        self.pixels() * self.bands
    }

    /// File element offset of (`pixel`, `band`) with `pixel` in line-major order.
    fn element_offset(&self, pixel: usize, band: usize) -> usize {
        let (line, sample) = (pixel / self.samples, pixel % self.samples);
        match self.interleave {
            Interleave::Bsq => band * self.pixels() + pixel,
            Interleave::Bil => (line * self.bands + band) * self.samples + sample,
            Interleave::Bip => pixel * self.bands + band,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "samples",
    "lines",
    "bands",
    "interleave",
    "data type",
    "byte order",
    "header offset",
];

/// Splits header text into lower-cased keys and raw values, joining
/// `{ ... }` values that span several lines.
fn header_fields(text: &str) -> Result<BTreeMap<String, String>> {
    let mut lines = text.lines();
    match lines.by_ref().map(str::trim).find(|l| !l.is_empty()) {
        Some(magic) if magic.eq_ignore_ascii_case("ENVI") => {}
        _ => return Err(Error::Format("header does not start with ENVI".into())),
    }
    let mut fields = BTreeMap::new();
    let mut pending: Option<(String, String)> = None;
    for line in lines {
        if let Some((key, mut value)) = pending.take() {
            value.push('\n');
            value.push_str(line);
            if line.contains('}') {
                fields.insert(key, value);
            } else {
                pending = Some((key, value));
            }
            continue;
        }
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Format(format!("header line without '=': {line:?}")));
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if value.starts_with('{') && !value.contains('}') {
            pending = Some((key, value));
        } else {
            fields.insert(key, value);
        }
    }
    if let Some((key, _)) = pending {
        return Err(Error::Format(format!("unterminated '{{' in field '{key}'")));
    }
    Ok(fields)
}

fn required<'a>(fields: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Format(format!("header is missing field '{key}'")))
}

fn count_field(fields: &BTreeMap<String, String>, key: &str) -> Result<usize> {
    let raw = required(fields, key)?;
    match raw.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Format(format!(
            "header field '{key}' must be a positive integer, got {raw:?}"
        ))),
    }
}

pub fn parse_envi_header(text: &str) -> Result<EnviHeader> {
    let fields = header_fields(text)?;
    let ignored: Vec<&str> = fields
        .keys()
        .map(String::as_str)
        .filter(|k| !KNOWN_KEYS.contains(k))
        .collect();
    if !ignored.is_empty() {
        log::warn!("ignoring ENVI header fields: {}", ignored.join(", "));
    }

    let samples = count_field(&fields, "samples")?;
    let lines = count_field(&fields, "lines")?;
    let bands = count_field(&fields, "bands")?;

    let raw = required(&fields, "interleave")?;
    let interleave = match raw.to_ascii_lowercase().as_str() {
        "bsq" => Interleave::Bsq,
        "bil" => Interleave::Bil,
        "bip" => Interleave::Bip,
        _ => {
            return Err(Error::Format(format!(
                "header field 'interleave' must be bsq, bil or bip, got {raw:?}"
            )))
        }
    };

    let raw = required(&fields, "data type")?;
    let data_type = raw
        .parse::<u32>()
        .ok()
        .and_then(DataType::from_code)
        .ok_or_else(|| {
            Error::Format(format!(
                "header field 'data type' must be 2, 4 or 5, got {raw:?}"
            ))
        })?;

    let raw = required(&fields, "byte order")?;
    let byte_order = match raw {
        "0" => ByteOrder::Little,
        "1" => ByteOrder::Big,
        _ => {
            return Err(Error::Format(format!(
                "header field 'byte order' must be 0 or 1, got {raw:?}"
            )))
        }
    };

    let header_offset = match fields.get("header offset") {
        None => 0,
        Some(raw) => raw.parse::<usize>().map_err(|_| {
            Error::Format(format!(
                "header field 'header offset' must be a nonnegative integer, got {raw:?}"
            ))
        })?,
    };

    Ok(EnviHeader {
        samples,
        lines,
        bands,
        interleave,
        data_type,
        byte_order,
        header_offset,
    })
}

/// Locates the binary next to `header_path`: the path with `.hdr` removed,
/// or the same stem with one of the usual raster extensions.
pub fn companion_data_path(header_path: &Path) -> Option<PathBuf> {
    let mut candidates = Vec::new();
    let is_hdr = header_path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("hdr"))
        .unwrap_or(false);
    if is_hdr {
        candidates.push(header_path.with_extension(""));
    }
    for ext in ["img", "dat", "raw", "bsq", "bil", "bip"] {
        candidates.push(header_path.with_extension(ext));
    }
    candidates.into_iter().find(|p| p != header_path && p.is_file())
}

fn decode(bytes: &[u8], header: &EnviHeader) -> Vec<f64> {
    let size = header.data_type.size();
    let little = header.byte_order == ByteOrder::Little;
    bytes
        .chunks_exact(size)
        .map(|c| match header.data_type {
            DataType::Int16 => {
                let b = [c[0], c[1]];
                f64::from(if little {
                    i16::from_le_bytes(b)
                } else {
                    i16::from_be_bytes(b)
                })
            }
            DataType::Float32 => {
                let b = [c[0], c[1], c[2], c[3]];
                f64::from(if little {
                    f32::from_le_bytes(b)
                } else {
                    f32::from_be_bytes(b)
                })
            }
            DataType::Float64 => {
                let b: [u8; 8] = c.try_into().expect("chunk of 8");
                if little {
                    f64::from_le_bytes(b)
                } else {
                    f64::from_be_bytes(b)
                }
            }
        })
        .collect()
}

/// Reorders a decoded cube into line-major pixels with bands contiguous.
pub fn cube_from_bytes(header: &EnviHeader, bytes: &[u8]) -> Result<SpectraMatrix> {
    let expected = header.header_offset + header.elements() * header.data_type.size();
    if bytes.len() != expected {
        return Err(Error::Size(format!(
            "header declares {} elements ({} bytes with offset {}), binary has {} bytes",
            header.elements(),
            expected,
            header.header_offset,
            bytes.len()
        )));
    }
    let raw = decode(&bytes[header.header_offset..], header);
    if let Some(pos) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "non-finite value {} at file element {pos}",
            raw[pos]
        )));
    }
    let (n, d) = (header.pixels(), header.bands);
    let values = if header.interleave == Interleave::Bip {
        raw
    } else {
        let mut values = vec![0.0; n * d];
        for pixel in 0..n {
            for band in 0..d {
                values[pixel * d + band] = raw[header.element_offset(pixel, band)];
            }
        }
        values
    };
    SpectraMatrix::new(values, n, d)?.with_geometry(header.lines, header.samples)
}

pub fn read_envi_cube_with_data(header_path: &Path, data_path: &Path) -> Result<SpectraMatrix> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header = parse_envi_header(&text)?;
    let bytes = fs::read(data_path).map_err(|e| Error::io(data_path, e))?;
    cube_from_bytes(&header, &bytes)
}

pub fn read_envi_cube(header_path: &Path) -> Result<SpectraMatrix> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header = parse_envi_header(&text)?;
    let data_path = companion_data_path(header_path).ok_or_else(|| {
        Error::io(
            header_path.with_extension(""),
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no binary file found next to the ENVI header",
            ),
        )
    })?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    cube_from_bytes(&header, &bytes)
}

/// Writes `data` as a little-endian BSQ cube: `<stem>.hdr` plus `<stem>.img`.
/// Returns the data file path.
pub fn write_envi_bsq(data: &SpectraMatrix, header_path: &Path, data_type: DataType) -> Result<PathBuf> {
    let geometry = data.geometry().ok_or_else(|| {
        Error::Usage("ENVI output needs image geometry (rows and cols)".into())
    })?;
    let code = match data_type {
        DataType::Int16 => {
            return Err(Error::Usage("ENVI output supports float32 and float64 only".into()))
        }
        DataType::Float32 => 4,
        DataType::Float64 => 5,
    };
    let header = format!(
        "ENVI\nsamples = {}\nlines = {}\nbands = {}\nheader offset = 0\ndata type = {code}\ninterleave = bsq\nbyte order = 0\n",
        geometry.cols,
        geometry.rows,
        data.bands()
    );
    let mut bytes = Vec::with_capacity(data.values().len() * data_type.size());
    for band in 0..data.bands() {
        for row in data.rows() {
            match data_type {
                DataType::Float32 => bytes.extend_from_slice(&(row[band] as f32).to_le_bytes()),
                _ => bytes.extend_from_slice(&row[band].to_le_bytes()),
            }
        }
    }
    let data_path = header_path.with_extension("img");
    fs::write(header_path, header).map_err(|e| Error::io(header_path, e))?;
    fs::write(&data_path, bytes).map_err(|e| Error::io(&data_path, e))?;
    Ok(data_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(samples: usize, lines: usize, bands: usize, interleave: &str, dt: u32) -> String {
        format!(
            "ENVI\ndescription = {{\n  test cube }}\nsamples = {samples}\nlines = {lines}\nbands = {bands}\n\
             header offset = 0\nfile type = ENVI Standard\ndata type = {dt}\ninterleave = {interleave}\nbyte order = 0\n"
        )
    }

    fn f32_bytes(v: &[f32]) -> Vec<u8> {
        v.iter().flat_map(|x| x.to_le_bytes()).collect()
    }

    #[test]
    fn bsq_two_by_one_by_three() {
        let h = parse_envi_header(&header(2, 1, 3, "bsq", 4)).unwrap();
        let m = cube_from_bytes(&h, &f32_bytes(&[1., 2., 3., 4., 5., 6.])).unwrap();
        assert_eq!(m.row(0), &[1., 3., 5.]);
        assert_eq!(m.row(1), &[2., 4., 6.]);
        assert_eq!(m.geometry().unwrap().rows, 1);
        assert_eq!(m.geometry().unwrap().cols, 2);
    }

    #[test]
    fn urban_shape() {
        let h = parse_envi_header(&header(300, 307, 117, "bil", 2)).unwrap();
        assert_eq!(h.pixels(), 92100);
        assert_eq!(h.bands, 117);
    }

    #[test]
    fn size_mismatch() {
        // 10 pixels declared, 8 provided
        let h = parse_envi_header(&header(5, 2, 1, "bsq", 4)).unwrap();
        let err = cube_from_bytes(&h, &f32_bytes(&[0.0; 8])).unwrap_err();
        assert!(matches!(err, Error::Size(_)));
    }

    #[test]
    fn missing_field_is_named() {
        let text = "ENVI\nsamples = 2\nlines = 1\ninterleave = bsq\ndata type = 4\nbyte order = 0\n";
        let err = parse_envi_header(text).unwrap_err();
        assert!(err.to_string().contains("'bands'"), "{err}");
    }

    #[test]
    fn garbled_fields_are_named() {
        let bad = header(2, 1, 3, "bsq", 4).replace("interleave = bsq", "interleave = tiles");
        assert!(parse_envi_header(&bad).unwrap_err().to_string().contains("'interleave'"));
        let bad = header(2, 1, 3, "bsq", 12);
        assert!(parse_envi_header(&bad).unwrap_err().to_string().contains("'data type'"));
        let bad = header(2, 1, 3, "bsq", 4).replace("samples = 2", "samples = two");
        assert!(parse_envi_header(&bad).unwrap_err().to_string().contains("'samples'"));
        assert!(parse_envi_header("samples = 2\n").is_err());
    }

    #[test]
    fn nan_reports_first_offending_element() {
        let h = parse_envi_header(&header(2, 1, 3, "bsq", 4)).unwrap();
        let err = cube_from_bytes(&h, &f32_bytes(&[1., 2., f32::NAN, 4., f32::INFINITY, 6.]))
            .unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains("element 2")), "{err}");
    }

    #[test]
    fn big_endian_int16() {
        let text = header(1, 1, 2, "bip", 2).replace("byte order = 0", "byte order = 1");
        let h = parse_envi_header(&text).unwrap();
        let bytes: Vec<u8> = [-3i16, 700].iter().flat_map(|x| x.to_be_bytes()).collect();
        let m = cube_from_bytes(&h, &bytes).unwrap();
        assert_eq!(m.row(0), &[-3.0, 700.0]);
    }

    #[test]
    fn float64_with_header_offset() {
        let text = header(1, 1, 2, "bsq", 5).replace("header offset = 0", "header offset = 3");
        let h = parse_envi_header(&text).unwrap();
        let mut bytes = vec![0xAA; 3];
        bytes.extend(0.25f64.to_le_bytes());
        bytes.extend((-1.5f64).to_le_bytes());
        assert_eq!(cube_from_bytes(&h, &bytes).unwrap().row(0), &[0.25, -1.5]);
    }
}
