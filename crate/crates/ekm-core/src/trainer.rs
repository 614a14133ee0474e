//! Model training: from a labeled set of face vectors to an [`EigenModel`].
//!
//! The steps, in order: mean face, mean subtraction, eigendecomposition of
//! the small M x M Gram matrix `AᵀA`, lifting of the selected eigenvectors
//! into pixel space (`u_i = A v_i`, then renormalized), projection of every
//! training image onto the eigenface basis, and per-class means of those
//! projections.
//!
//! The Gram-matrix detour is what makes this tractable: the pixel-space
//! covariance `AAᵀ` is d x d (d ~ 10^4 for camera images) but shares its
//! nonzero spectrum with the M x M `AᵀA`, and every covariance eigenvector
//! with nonzero eigenvalue is reachable as `A v`. Stored eigenvalues are
//! those of `AᵀA`; divide by M to compare against the covariance convention
//! that carries a 1/M factor.

use crate::image::FaceVector;
use crate::label::ClassLabel;
use crate::linalg::{self, DenseMatrix, LinAlgError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training set has no classes")]
    EmptyTrainingSet,
    #[error("class '{label}' has no images")]
    EmptyClass { label: ClassLabel },
    #[error("duplicate class label '{label}'")]
    DuplicateLabel { label: ClassLabel },
    #[error("vector dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate training set: no positive eigenvalues (are all images identical?)")]
    DegenerateTrainingSet,
    #[error("invalid trainer configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Labeled face vectors grouped into classes of common dimension.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    width: usize,
    height: usize,
    classes: Vec<TrainingClass>,
}

#[derive(Debug, Clone)]
pub struct TrainingClass {
    pub label: ClassLabel,
    pub images: Vec<FaceVector>,
}

/// Knobs for [`train`]. `Default` keeps every eigenpair that survives the
/// positivity cutoff.
#[derive(Debug, Clone)]
pub struct TrainerConfig {
    /// Keep at most this many eigenfaces (`None` keeps all survivors).
    pub requested_eigenfaces: Option<usize>,
    /// Eigenpairs with value <= cutoff * largest value are treated as zero.
    /// Exact zeros never occur in floating point, so "positive eigenvalues"
    /// has to be a relative test.
    pub positive_cutoff: f64,
    /// Relative tolerance handed to the Jacobi eigensolver.
    pub jacobi_tol: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            requested_eigenfaces: None,
            positive_cutoff: 1e-10,
            jacobi_tol: linalg::DEFAULT_EIG_TOL,
        }
    }
}

/// Mean-centered training images as the columns of a d x M matrix.
#[derive(Debug, Clone)]
pub struct NormalizedSet {
    /// Column order is class-major, then image index — frozen so that
    /// serialized models are reproducible.
    pub matrix: DenseMatrix,
}

/// Everything recognition needs, produced by [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenModel {
    /// Componentwise mean of all training images.
    pub mean_face: Vec<f64>,
    /// d x E with unit-norm columns.
    pub eigenfaces: DenseMatrix,
    /// Eigenvalues of `AᵀA` for the kept eigenfaces, strictly positive and
    /// non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Face-space coordinates of every training image, class-major order.
    pub projections: Vec<Projection>,
    /// Per-class size and mean of the member projections.
    pub classes: Vec<ClassStats>,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub label: ClassLabel,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub label: ClassLabel,
    pub size: usize,
    pub mean: Vec<f64>,
}

impl TrainingSet {
    /// Validate and assemble. All vectors must have dimension
    /// `width * height`; every class needs at least one image and a unique
    /// label. Mixed dimensions are a hard error, not a resample.
    pub fn new(
        width: usize,
        height: usize,
        classes: Vec<(ClassLabel, Vec<FaceVector>)>,
    ) -> Result<Self, TrainError> {
        if classes.is_empty() {
            return Err(TrainError::EmptyTrainingSet);
        }
        let dim = width * height;
        let mut seen: Vec<&ClassLabel> = Vec::new();
        for (label, images) in &classes {
            if images.is_empty() {
                return Err(TrainError::EmptyClass {
                    label: label.clone(),
                });
            }
            if seen.contains(&label) {
                return Err(TrainError::DuplicateLabel {
                    label: label.clone(),
                });
            }
            seen.push(label);
            for image in images {
                if image.dim() != dim {
                    return Err(TrainError::DimensionMismatch {
                        expected: dim,
                        found: image.dim(),
                    });
                }
            }
        }
        Ok(TrainingSet {
            width,
            height,
            classes: classes
                .into_iter()
                .map(|(label, images)| TrainingClass { label, images })
                .collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.width * self.height
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_images(&self) -> usize {
        self.classes.iter().map(|c| c.images.len()).sum()
    }

    pub fn classes(&self) -> &[TrainingClass] {
        &self.classes
    }

    /// All images in class-major, then image-index order — the canonical
    /// iteration order for everything downstream.
    pub fn iter_images(&self) -> impl Iterator<Item = (&ClassLabel, &FaceVector)> {
        self.classes
            .iter()
            .flat_map(|c| c.images.iter().map(move |img| (&c.label, img)))
    }
}

impl EigenModel {
    pub fn dim(&self) -> usize {
        self.mean_face.len()
    }

    pub fn num_eigenfaces(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_images(&self) -> usize {
        self.projections.len()
    }

    pub fn class(&self, label: &ClassLabel) -> Option<&ClassStats> {
        self.classes.iter().find(|c| &c.label == label)
    }
}

/// Componentwise arithmetic mean of all training images.
pub fn mean_face(set: &TrainingSet) -> Result<Vec<f64>, TrainError> {
    let m = set.num_images();
    if m == 0 {
        return Err(TrainError::EmptyTrainingSet);
    }
    let mut mean = vec![0.0; set.dim()];
    for (_, image) in set.iter_images() {
        for (acc, &v) in mean.iter_mut().zip(image.data()) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    Ok(mean)
}

/// Subtract the mean face from every image and assemble the centered
/// columns into a d x M matrix.
pub fn normalize(set: &TrainingSet, mean: &[f64]) -> Result<NormalizedSet, TrainError> {
    let d = set.dim();
    if mean.len() != d {
        return Err(TrainError::DimensionMismatch {
            expected: d,
            found: mean.len(),
        });
    }
    let m = set.num_images();
    let mut matrix = DenseMatrix::zeros(d, m);
    for (col, (_, image)) in set.iter_images().enumerate() {
        for (r, (&v, &mu)) in image.data().iter().zip(mean).enumerate() {
            matrix.set(r, col, v - mu);
        }
    }
    Ok(NormalizedSet { matrix })
}

/// Eigenfaces of the pixel-space covariance, computed through the M x M
/// Gram matrix.
///
/// Eigenpairs of `AᵀA` whose value falls at or below
/// `positive_cutoff * lambda_max` are discarded; the survivors are
/// truncated to the requested count *before* lifting, so no pixel-length
/// work is spent on vectors that will be dropped. Lifted vectors are
/// renormalized to unit length. Returned eigenvalues are those of `AᵀA`.
pub fn eigenfaces_from_surrogate(
    a: &DenseMatrix,
    cfg: &TrainerConfig,
) -> Result<(DenseMatrix, Vec<f64>), TrainError> {
    validate_config(cfg)?;
    let surrogate = linalg::gram(a);
    let pairs = linalg::eig_symmetric(&surrogate, cfg.jacobi_tol)?;

    let lambda_max = pairs.first().map_or(0.0, |p| p.value);
    if lambda_max <= 0.0 {
        return Err(TrainError::DegenerateTrainingSet);
    }
    let threshold = cfg.positive_cutoff * lambda_max;
    let mut kept: Vec<&linalg::EigenPair> =
        pairs.iter().take_while(|p| p.value > threshold).collect();
    if kept.is_empty() {
        return Err(TrainError::DegenerateTrainingSet);
    }
    if let Some(requested) = cfg.requested_eigenfaces {
        kept.truncate(requested);
    }

    // Lift all survivors at once: columns of A * V are the unnormalized
    // eigenfaces.
    let m = a.cols();
    let e = kept.len();
    let mut v = DenseMatrix::zeros(m, e);
    for (j, pair) in kept.iter().enumerate() {
        for (i, &vi) in pair.vector.iter().enumerate() {
            v.set(i, j, vi);
        }
    }
    let mut eigenfaces = linalg::matmul(a, &v)?;

    // Renormalize each column to unit length in a single pass.
    let mut norms = vec![0.0; e];
    for r in 0..eigenfaces.rows() {
        let row = eigenfaces.row(r);
        for (j, &x) in row.iter().enumerate() {
            norms[j] += x * x;
        }
    }
    for n in &mut norms {
        *n = n.sqrt();
    }
    for r in 0..eigenfaces.rows() {
        for (j, &norm) in norms.iter().enumerate() {
            let x = eigenfaces.get(r, j);
            eigenfaces.set(r, j, x / norm);
        }
    }

    let eigenvalues = kept.iter().map(|p| p.value).collect();
    Ok((eigenfaces, eigenvalues))
}

/// Face-space coordinates of one centered image: `uᵀ phi`.
///
/// This single routine is used for training images and probes alike, so a
/// probe identical to a training image reproduces its stored projection
/// bit-for-bit.
pub fn project(eigenfaces: &DenseMatrix, phi: &[f64]) -> Result<Vec<f64>, TrainError> {
    let d = eigenfaces.rows();
    let e = eigenfaces.cols();
    if phi.len() != d {
        return Err(TrainError::DimensionMismatch {
            expected: d,
            found: phi.len(),
        });
    }
    // One sequential pass over the row-major basis.
    let mut coords = vec![0.0; e];
    for (r, &p) in phi.iter().enumerate() {
        if p != 0.0 {
            let row = eigenfaces.row(r);
            for (c, &x) in coords.iter_mut().zip(row) {
                *c += x * p;
            }
        }
    }
    Ok(coords)
}

/// Per-class arithmetic mean of labeled projections, keyed by label in
/// first-occurrence order.
pub fn class_means(projections: &[Projection]) -> Result<Vec<ClassStats>, TrainError> {
    if projections.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let e = projections[0].coords.len();
    let mut stats: Vec<ClassStats> = Vec::new();
    for proj in projections {
        if proj.coords.len() != e {
            return Err(TrainError::DimensionMismatch {
                expected: e,
                found: proj.coords.len(),
            });
        }
        match stats.iter_mut().find(|s| s.label == proj.label) {
            Some(s) => {
                s.size += 1;
                for (acc, &v) in s.mean.iter_mut().zip(&proj.coords) {
                    *acc += v;
                }
            }
            None => stats.push(ClassStats {
                label: proj.label.clone(),
                size: 1,
                mean: proj.coords.clone(),
            }),
        }
    }
    for s in &mut stats {
        for v in &mut s.mean {
            *v /= s.size as f64;
        }
    }
    Ok(stats)
}

/// Full training pipeline. Deterministic: identical inputs produce
/// bitwise-identical models.
pub fn train(set: &TrainingSet, cfg: &TrainerConfig) -> Result<EigenModel, TrainError> {
    validate_config(cfg)?;
    let mean = mean_face(set)?;
    let normalized = normalize(set, &mean)?;
    let (mut eigenfaces, mut eigenvalues) = eigenfaces_from_surrogate(&normalized.matrix, cfg)?;

    // Centering removes one dimension, so at most M-1 eigenpairs can be
    // genuine. The cutoff filter almost always enforces this on its own;
    // clamp explicitly so the bound holds for any configuration.
    let m = set.num_images();
    let max_rank = m.saturating_sub(1);
    if eigenvalues.len() > max_rank {
        if max_rank == 0 {
            return Err(TrainError::DegenerateTrainingSet);
        }
        eigenvalues.truncate(max_rank);
        eigenfaces = keep_columns(&eigenfaces, max_rank);
    }

    let mut projections = Vec::with_capacity(m);
    for (col, (label, _)) in set.iter_images().enumerate() {
        let phi = normalized.matrix.column(col);
        projections.push(Projection {
            label: label.clone(),
            coords: project(&eigenfaces, &phi)?,
        });
    }
    let classes = class_means(&projections)?;

    Ok(EigenModel {
        mean_face: mean,
        eigenfaces,
        eigenvalues,
        projections,
        classes,
        width: set.width(),
        height: set.height(),
    })
}

fn validate_config(cfg: &TrainerConfig) -> Result<(), TrainError> {
    if cfg.requested_eigenfaces == Some(0) {
        return Err(TrainError::InvalidConfig {
            reason: "requested eigenface count must be at least 1".into(),
        });
    }
    if !cfg.positive_cutoff.is_finite() || cfg.positive_cutoff < 0.0 {
        return Err(TrainError::InvalidConfig {
            reason: format!("positive_cutoff must be finite and >= 0, got {}", cfg.positive_cutoff),
        });
    }
    if !cfg.jacobi_tol.is_finite() || cfg.jacobi_tol < 0.0 {
        return Err(TrainError::InvalidConfig {
            reason: format!("jacobi_tol must be finite and >= 0, got {}", cfg.jacobi_tol),
        });
    }
    Ok(())
}

fn keep_columns(m: &DenseMatrix, cols: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(m.rows(), cols);
    for i in 0..m.rows() {
        for j in 0..cols {
            out.set(i, j, m.get(i, j));
        }
    }
    out
}
