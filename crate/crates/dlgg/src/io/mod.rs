//! File formats: CSV ingestion and emission, the packed binary draws file,
//! and the reproducibility manifest.

pub mod csv;
pub mod draws;
pub mod manifest;

pub use csv::{
    load_csv, read_edges_csv, read_matrix_csv, write_dense_csv, write_edges_csv,
    write_matrix_csv, write_trace_csv, Dataset,
};
pub use draws::{read_draws, write_draws, DRAWS_MAGIC, DRAWS_VERSION};
pub use manifest::{file_digest, Manifest};
