//! Eigenface-based face recognition with a mean-shift classifier.
//!
//! The pipeline has two halves:
//!
//! * **Feature extraction** ([`trainer`]): training images are flattened to
//!   vectors, centered on the mean face, and the principal directions of the
//!   centered set (the *eigenfaces*) are computed through the small M x M
//!   Gram matrix rather than the huge pixel-space covariance. Each image is
//!   then represented by its coordinates in the eigenface basis, and every
//!   class (person) by the mean of its coordinates.
//!
//! * **Recognition** ([`recognizer`]): a probe image is projected into the
//!   same basis and tentatively adjoined to each class in turn. The class
//!   whose mean moves *least* under that adjunction wins; the minimum shift
//!   is compared against a threshold to decide known vs. unknown.
//!
//! Supporting modules: [`image`] (PGM ingest and vectorization), [`linalg`]
//! (dense matrices and a cyclic Jacobi eigensolver), [`dataset`] (ORL-style
//! directory scanning, splits, synthetic data), [`evaluation`] (case-study
//! protocols and report tables), and [`model_io`] (binary model files).

pub mod dataset;
pub mod evaluation;
pub mod image;
pub mod label;
pub mod linalg;
pub mod model_io;
pub mod recognizer;
pub mod trainer;

pub use dataset::{DatasetManifest, MemoryDataset, Probe, Protocol, SplitSpec};
pub use image::{FaceVector, GrayImage, PgmFormat};
pub use label::ClassLabel;
pub use linalg::{DenseMatrix, EigenPair};
pub use model_io::{load_model, save_model};
pub use recognizer::{recognize, RecognitionResult, Verdict};
pub use trainer::{train, EigenModel, TrainerConfig, TrainingSet};
