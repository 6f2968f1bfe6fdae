//! Reading cubes, matrices and masks; writing class maps and reports.

mod csv_io;
mod envi;
mod mask;
mod matrix;
mod ppm;
mod report;

pub use csv_io::{
    format_csv_matrix, format_label_mask, parse_csv_matrix, parse_label_mask, read_csv_matrix,
    read_label_mask, read_labels, write_csv_matrix, write_label_mask, write_labels,
};
pub use envi::{
    companion_data_path, cube_from_bytes, parse_envi_header, read_envi_cube,
    read_envi_cube_with_data, write_envi_bsq, ByteOrder, DataType, EnviHeader, Interleave,
};
pub use mask::LabelMask;
pub use matrix::{distance, squared_distance, Geometry, SpectraMatrix};
pub use ppm::{palette_color, write_class_map, ClassMapImage};
pub use report::{
    format_accuracy, format_breakdown, format_density_dump, format_flow_dump, format_mixed,
    format_preservation, write_report_tables, write_text,
};
