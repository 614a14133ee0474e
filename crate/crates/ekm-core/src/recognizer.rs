//! Probe classification by the mean-shift rule.
//!
//! A probe is projected into the model's eigenface basis and tentatively
//! adjoined to each class in turn. `D_k` measures how far class k's mean
//! moves under that adjunction; the class with the smallest shift wins, and
//! the probe counts as known when that smallest shift is at or below the
//! threshold. With equal class sizes the rule coincides with
//! nearest-class-mean, since the shift is algebraically the probe-to-mean
//! distance scaled by `1/(P_k + 1)`. The tests use that identity as an
//! independent oracle; the implementation itself always takes the two-step
//! route (shifted mean, then distance).

use crate::image::FaceVector;
use crate::label::ClassLabel;
use crate::trainer::{project, ClassStats, EigenModel, TrainError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error("probe has {found} values but the model expects {expected_width}x{expected_height} images")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        found: usize,
    },
    #[error("projection has {found} coordinates but the model has {expected} eigenfaces")]
    ProjectionMismatch { expected: usize, found: usize },
    #[error("model has no class labeled '{label}'")]
    UnknownClass { label: ClassLabel },
    #[error("model has no classes")]
    NoClasses,
    #[error("threshold must be >= 0, got {value}")]
    InvalidThreshold { value: f64 },
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Probe coordinates in the model's eigenface basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeProjection {
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Known,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Known => "Known",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    /// Class attaining the minimal mean shift (ties go to the lowest label).
    pub best_class: ClassLabel,
    /// The minimal mean shift itself.
    pub d_min: f64,
    /// Mean shift for every class, in model class order.
    pub per_class_d: Vec<(ClassLabel, f64)>,
    /// `Known` iff `d_min <= threshold_used`.
    pub verdict: Verdict,
    pub threshold_used: f64,
}

/// Center the probe on the model's mean face and project it onto the
/// eigenface basis. Uses the same projection routine as training, so a
/// probe identical to a training image reproduces its stored coordinates
/// exactly.
pub fn project_probe(
    model: &EigenModel,
    probe: &FaceVector,
) -> Result<ProbeProjection, RecognizeError> {
    if probe.dim() != model.dim() {
        return Err(RecognizeError::DimensionMismatch {
            expected_width: model.width,
            expected_height: model.height,
            found: probe.dim(),
        });
    }
    let phi: Vec<f64> = probe
        .data()
        .iter()
        .zip(&model.mean_face)
        .map(|(v, mu)| v - mu)
        .collect();
    Ok(ProbeProjection {
        coords: project(&model.eigenfaces, &phi)?,
    })
}

/// Mean of class k with the probe adjoined:
/// `(P_k * mean_k + probe) / (P_k + 1)`.
pub fn shifted_class_mean(
    model: &EigenModel,
    label: &ClassLabel,
    coords: &[f64],
) -> Result<Vec<f64>, RecognizeError> {
    let stats = model
        .class(label)
        .ok_or_else(|| RecognizeError::UnknownClass {
            label: label.clone(),
        })?;
    check_coords(model, coords)?;
    Ok(shifted_mean(stats, coords))
}

/// How far class k's mean moves when the probe joins it (Euclidean norm of
/// old mean minus shifted mean).
pub fn mean_shift_distance(
    model: &EigenModel,
    label: &ClassLabel,
    coords: &[f64],
) -> Result<f64, RecognizeError> {
    let stats = model
        .class(label)
        .ok_or_else(|| RecognizeError::UnknownClass {
            label: label.clone(),
        })?;
    check_coords(model, coords)?;
    Ok(shift_distance(stats, coords))
}

/// Classify a probe image: project it, compute the mean shift for every
/// class, take the argmin (lowest label on exact ties), and compare the
/// minimum against the threshold. The full per-class distance vector is
/// returned even when the verdict is `Unknown`.
pub fn recognize(
    model: &EigenModel,
    probe: &FaceVector,
    threshold: f64,
) -> Result<RecognitionResult, RecognizeError> {
    let projection = project_probe(model, probe)?;
    recognize_projection(model, &projection, threshold)
}

/// [`recognize`] for an already-projected probe; useful when scoring many
/// probes against one model.
pub fn recognize_projection(
    model: &EigenModel,
    projection: &ProbeProjection,
    threshold: f64,
) -> Result<RecognitionResult, RecognizeError> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(RecognizeError::InvalidThreshold { value: threshold });
    }
    if model.classes.is_empty() {
        return Err(RecognizeError::NoClasses);
    }
    check_coords(model, &projection.coords)?;

    let per_class_d: Vec<(ClassLabel, f64)> = model
        .classes
        .iter()
        .map(|stats| (stats.label.clone(), shift_distance(stats, &projection.coords)))
        .collect();

    let (best_class, d_min) = per_class_d
        .iter()
        .fold(None::<(&ClassLabel, f64)>, |best, (label, d)| match best {
            None => Some((label, *d)),
            Some((bl, bd)) => {
                if *d < bd || (*d == bd && label < bl) {
                    Some((label, *d))
                } else {
                    Some((bl, bd))
                }
            }
        })
        .map(|(label, d)| (label.clone(), d))
        .expect("at least one class");

    let verdict = if d_min <= threshold {
        Verdict::Known
    } else {
        Verdict::Unknown
    };
    Ok(RecognitionResult {
        best_class,
        d_min,
        per_class_d,
        verdict,
        threshold_used: threshold,
    })
}

fn check_coords(model: &EigenModel, coords: &[f64]) -> Result<(), RecognizeError> {
    if coords.len() != model.num_eigenfaces() {
        return Err(RecognizeError::ProjectionMismatch {
            expected: model.num_eigenfaces(),
            found: coords.len(),
        });
    }
    Ok(())
}

fn shifted_mean(stats: &ClassStats, coords: &[f64]) -> Vec<f64> {
    let p = stats.size as f64;
    stats
        .mean
        .iter()
        .zip(coords)
        .map(|(xi, omega)| (p * xi + omega) / (p + 1.0))
        .collect()
}

fn shift_distance(stats: &ClassStats, coords: &[f64]) -> f64 {
    let shifted = shifted_mean(stats, coords);
    stats
        .mean
        .iter()
        .zip(&shifted)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}
