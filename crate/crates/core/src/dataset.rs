//! Ordered collections of SPD matrices with optional ground-truth labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spd::SpdMatrix;

/// An ordered dataset of SPD matrices, all of the same dimension, with
/// optional ground-truth cluster labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRaw", into = "DatasetRaw")]
pub struct Dataset {
    points: Vec<SpdMatrix>,
    labels: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DatasetRaw {
    points: Vec<SpdMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
}

impl From<Dataset> for DatasetRaw {
    fn from(d: Dataset) -> Self {
        Self { points: d.points, labels: d.labels }
    }
}

impl TryFrom<DatasetRaw> for Dataset {
    type Error = Error;

    fn try_from(raw: DatasetRaw) -> Result<Self> {
        match raw.labels {
            Some(labels) => Dataset::with_labels(raw.points, labels),
            None => Dataset::new(raw.points),
        }
    }
}

impl Dataset {
    /// Unlabeled dataset. All points must share a dimension.
    pub fn new(points: Vec<SpdMatrix>) -> Result<Self> {
        Self::check_dims(&points)?;
        Ok(Self { points, labels: None })
    }

    /// Labeled dataset; labels must be one per point.
    pub fn with_labels(points: Vec<SpdMatrix>, labels: Vec<usize>) -> Result<Self> {
        Self::check_dims(&points)?;
        if labels.len() != points.len() {
            return Err(Error::LengthMismatch { expected: points.len(), actual: labels.len() });
        }
        Ok(Self { points, labels: Some(labels) })
    }

    fn check_dims(points: &[SpdMatrix]) -> Result<()> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = points[0].dim();
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[SpdMatrix] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Number of distinct ground-truth clusters (`max label + 1`).
    pub fn true_k(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(matches!(Dataset::new(vec![]), Err(Error::EmptyDataset)));
        let pts = vec![SpdMatrix::identity(2), SpdMatrix::identity(3)];
        assert!(matches!(Dataset::new(pts), Err(Error::DimensionMismatch { .. })));
        let pts = vec![SpdMatrix::identity(2)];
        assert!(matches!(
            Dataset::with_labels(pts, vec![0, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn true_k_from_labels() {
        let pts = vec![SpdMatrix::identity(2), SpdMatrix::identity(2)];
        let d = Dataset::with_labels(pts, vec![0, 3]).unwrap();
        assert_eq!(d.true_k(), Some(4));
    }
}
