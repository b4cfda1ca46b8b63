//! Labelled alternatives described by one time series per criterion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An alternative with `m` criteria, each observed over the same horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    /// `series[j][t]`: performance on criterion `j` at timestamp `t` (0-based).
    pub series: Vec<Vec<f64>>,
    /// Class index in `1..=H`; `None` for alternatives to be classified.
    pub label: Option<usize>,
}

impl Alternative {
    pub fn new(id: impl Into<String>, series: Vec<Vec<f64>>, label: Option<usize>) -> Self {
        Self { id: id.into(), series, label }
    }

    pub fn value(&self, criterion: usize, t: usize) -> f64 {
        self.series[criterion][t]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    alternatives: Vec<Alternative>,
    criteria_names: Vec<String>,
    horizon: usize,
    class_count: usize,
}

impl Dataset {
    /// Validates shapes, labels, and finiteness. Ragged series are rejected.
    pub fn new(
        criteria_names: Vec<String>,
        horizon: usize,
        class_count: usize,
        alternatives: Vec<Alternative>,
    ) -> Result<Self> {
        if criteria_names.is_empty() {
            return Err(Error::InvalidArgument("at least one criterion is required".into()));
        }
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        if class_count == 0 {
            return Err(Error::InvalidArgument("class count must be positive".into()));
        }
        let m = criteria_names.len();
        for alt in &alternatives {
            if alt.series.len() != m {
                return Err(Error::RaggedSeries {
                    id: alt.id.clone(),
                    detail: format!("expected {m} series, found {}", alt.series.len()),
                });
            }
            for (j, s) in alt.series.iter().enumerate() {
                if s.len() != horizon {
                    return Err(Error::RaggedSeries {
                        id: alt.id.clone(),
                        detail: format!("series {} has length {}, expected {horizon}", j + 1, s.len()),
                    });
                }
                if let Some(t) = s.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteValue(format!(
                        "alternative `{}`, criterion {}, timestamp {}",
                        alt.id,
                        j + 1,
                        t + 1
                    )));
                }
            }
            if let Some(label) = alt.label {
                if label == 0 || label > class_count {
                    return Err(Error::LabelOutOfRange { label, classes: class_count });
                }
            }
        }
        Ok(Self { alternatives, criteria_names, horizon, class_count })
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn criteria_names(&self) -> &[String] {
        &self.criteria_names
    }

    pub fn criteria(&self) -> usize {
        self.criteria_names.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    /// Labels of every alternative; fails if any is unlabelled.
    pub fn labels(&self) -> Result<Vec<usize>> {
        self.alternatives
            .iter()
            .map(|a| {
                a.label.ok_or_else(|| {
                    Error::InvalidArgument(format!("alternative `{}` has no label", a.id))
                })
            })
            .collect()
    }

    /// A dataset holding the alternatives at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            alternatives: indices.iter().map(|&i| self.alternatives[i].clone()).collect(),
            criteria_names: self.criteria_names.clone(),
            horizon: self.horizon,
            class_count: self.class_count,
        }
    }

    /// Number of alternatives per class, index 0 holding class 1.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for label in self.alternatives.iter().filter_map(|a| a.label) {
            counts[label - 1] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(m: usize) -> Vec<String> {
        (1..=m).map(|j| format!("g{j}")).collect()
    }

    #[test]
    fn rejects_ragged_series() {
        let alt = Alternative::new("a", vec![vec![1.0, 2.0], vec![1.0]], Some(1));
        let err = Dataset::new(names(2), 2, 2, vec![alt]).unwrap_err();
        assert!(matches!(err, Error::RaggedSeries { .. }));
    }

    #[test]
    fn rejects_label_out_of_range() {
        let alt = Alternative::new("a", vec![vec![1.0]], Some(3));
        let err = Dataset::new(names(1), 1, 2, vec![alt]).unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { label: 3, classes: 2 }));
    }

    #[test]
    fn rejects_non_finite() {
        let alt = Alternative::new("a", vec![vec![f64::NAN]], None);
        assert!(matches!(
            Dataset::new(names(1), 1, 2, vec![alt]),
            Err(Error::NonFiniteValue(_))
        ));
    }

    #[test]
    fn subset_keeps_order() {
        let alts = (0..4)
            .map(|i| Alternative::new(format!("a{i}"), vec![vec![i as f64]], Some(1 + i % 2)))
            .collect();
        let ds = Dataset::new(names(1), 1, 2, alts).unwrap();
        let sub = ds.subset(&[3, 0]);
        assert_eq!(sub.alternatives()[0].id, "a3");
        assert_eq!(sub.alternatives()[1].id, "a0");
        assert_eq!(ds.class_counts(), vec![2, 2]);
    }
}
