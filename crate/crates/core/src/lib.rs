//! Mode-seeking clustering of spectral pixels by discrete density flow.
//!
//! The pipeline: exact k-nearest-neighbor graph ([`knn`]), Gaussian
//! kernel density on the neighbor distances and repeated neighborhood
//! smoothing ([`density`]), a flow map sending each point to its densest
//! neighbor, composed to a fixed point ([`flow`]). Points that reach the
//! same fixed point share a cluster. [`kmeans`] is the baseline and
//! [`evaluation`] scores either against ground-truth classes.
//!
//! ```
//! use gradflow::evaluation::{default_blobs, generate_blobs, adjusted_rand_index};
//! use gradflow::GradientFlow;
//!
//! let (data, truth) = generate_blobs(&default_blobs(), 3).unwrap();
//! let run = GradientFlow { neighbors: 20, smoothing_steps: 2, ..Default::default() }
//!     .run(&data)
//!     .unwrap();
//! let ari = adjusted_rand_index(&run.clustering.labels, truth.labels()).unwrap();
//! assert!(ari > 0.9);
//! ```

pub mod density;
pub mod error;
pub mod evaluation;
pub mod flow;
pub mod kmeans;
pub mod knn;
mod par;
mod pipeline;
pub mod spectra_io;

pub use error::{Error, Result};
pub use pipeline::{FlowRun, GradientFlow};
