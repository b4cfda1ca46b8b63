//! Characteristic-point grids and the piecewise-linear encoding of performances.
//!
//! For each criterion `j` and timestamp `t` the observed range `[alpha, beta]`
//! is split into `gamma` equal sub-intervals. A performance `g` is encoded
//! as a vector `v` of length `gamma` whose `k`-th entry is the fraction of the
//! `k`-th sub-interval lying below `g`. The value of a piecewise-linear
//! function with increments `df` is then `df . v`.

use serde::{Deserialize, Serialize};

use crate::dataset::{Alternative, Dataset};
use crate::error::{Error, Result};

/// Dimensions shared by grids, encodings and value functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub criteria: usize,
    pub horizon: usize,
    pub gamma: usize,
}

impl Shape {
    pub fn new(criteria: usize, horizon: usize, gamma: usize) -> Self {
        Self { criteria, horizon, gamma }
    }

    /// Number of `(criterion, timestamp)` cells.
    pub fn cells(&self) -> usize {
        self.criteria * self.horizon
    }

    /// Length of a flattened encoding, `m * T * gamma`.
    pub fn len(&self) -> usize {
        self.cells() * self.gamma
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell(&self, criterion: usize, t: usize) -> usize {
        criterion * self.horizon + t
    }

    #[inline]
    pub fn index(&self, criterion: usize, t: usize, k: usize) -> usize {
        self.cell(criterion, t) * self.gamma + k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    shape: Shape,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    points: Vec<f64>,
}

impl Grid {
    /// Builds a grid from explicit per-cell bounds (`m * T` each, criterion-major).
    pub fn from_bounds(shape: Shape, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if shape.gamma == 0 {
            return Err(Error::InvalidArgument("gamma must be at least 1".into()));
        }
        if alpha.len() != shape.cells() || beta.len() != shape.cells() {
            return Err(Error::dims(
                format!("{} bounds", shape.cells()),
                format!("{} / {}", alpha.len(), beta.len()),
            ));
        }
        for (a, b) in alpha.iter().zip(&beta) {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFiniteValue("grid bounds".into()));
            }
            if a > b {
                return Err(Error::InvalidArgument(format!("alpha {a} exceeds beta {b}")));
            }
        }
        let gamma = shape.gamma;
        let mut points = Vec::with_capacity(shape.cells() * (gamma + 1));
        for (&a, &b) in alpha.iter().zip(&beta) {
            for k in 0..=gamma {
                points.push(if k == gamma { b } else { a + (k as f64 / gamma as f64) * (b - a) });
            }
        }
        Ok(Self { shape, alpha, beta, points })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn gamma(&self) -> usize {
        self.shape.gamma
    }

    pub fn alpha(&self, criterion: usize, t: usize) -> f64 {
        self.alpha[self.shape.cell(criterion, t)]
    }

    pub fn beta(&self, criterion: usize, t: usize) -> f64 {
        self.beta[self.shape.cell(criterion, t)]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// The `gamma + 1` characteristic points of a cell.
    pub fn points(&self, criterion: usize, t: usize) -> &[f64] {
        let width = self.shape.gamma + 1;
        let start = self.shape.cell(criterion, t) * width;
        &self.points[start..start + width]
    }

    pub fn is_degenerate(&self, criterion: usize, t: usize) -> bool {
        let c = self.shape.cell(criterion, t);
        self.alpha[c] == self.beta[c]
    }

    /// Cells whose observed range collapsed to a point, as `(criterion, t)`.
    pub fn degenerate_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for j in 0..self.shape.criteria {
            for t in 0..self.shape.horizon {
                if self.is_degenerate(j, t) {
                    cells.push((j, t));
                }
            }
        }
        cells
    }

    /// Writes the encoding of performance `g` at `(criterion, t)` into `out`.
    ///
    /// Values outside `[alpha, beta]` saturate at all-zeros or all-ones.
    /// Degenerate cells always encode to zeros.
    pub fn encode_value(&self, criterion: usize, t: usize, g: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.shape.gamma);
        if self.is_degenerate(criterion, t) {
            out.fill(0.0);
            return;
        }
        let x = self.points(criterion, t);
        for (k, slot) in out.iter_mut().enumerate() {
            let (lo, hi) = (x[k], x[k + 1]);
            *slot = if g > hi {
                1.0
            } else if g < lo {
                0.0
            } else {
                ((g - lo) / (hi - lo)).clamp(0.0, 1.0)
            };
        }
    }

    /// Staircase vector for characteristic point `k`: `k` ones then zeros.
    pub fn point_encoding(&self, k: usize) -> Vec<f64> {
        (0..self.shape.gamma).map(|i| if i < k { 1.0 } else { 0.0 }).collect()
    }
}

/// Equally spaced characteristic points over the per-cell observed range.
///
/// Cells where every alternative has the same value are kept (their
/// encodings are all-zero); list them with [`Grid::degenerate_cells`].
pub fn build_grid(dataset: &Dataset, gamma: usize) -> Result<Grid> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if gamma == 0 {
        return Err(Error::InvalidArgument("gamma must be at least 1".into()));
    }
    let shape = Shape::new(dataset.criteria(), dataset.horizon(), gamma);
    let mut alpha = vec![f64::INFINITY; shape.cells()];
    let mut beta = vec![f64::NEG_INFINITY; shape.cells()];
    for alt in dataset.alternatives() {
        for (j, series) in alt.series.iter().enumerate() {
            for (t, &g) in series.iter().enumerate() {
                let c = shape.cell(j, t);
                alpha[c] = alpha[c].min(g);
                beta[c] = beta[c].max(g);
            }
        }
    }
    Grid::from_bounds(shape, alpha, beta)
}

/// Flattened `m * T * gamma` encoding of one alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedAlternative {
    pub id: String,
    pub label: Option<usize>,
    shape: Shape,
    v: Vec<f64>,
}

impl EncodedAlternative {
    pub fn from_parts(id: String, label: Option<usize>, shape: Shape, v: Vec<f64>) -> Result<Self> {
        if v.len() != shape.len() {
            return Err(Error::dims(shape.len(), v.len()));
        }
        Ok(Self { id, label, shape, v })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.v
    }

    /// The `gamma` entries of cell `(criterion, t)`.
    pub fn cell(&self, criterion: usize, t: usize) -> &[f64] {
        let start = self.shape.index(criterion, t, 0);
        &self.v[start..start + self.shape.gamma]
    }

    pub fn cell_mut(&mut self, criterion: usize, t: usize) -> &mut [f64] {
        let start = self.shape.index(criterion, t, 0);
        &mut self.v[start..start + self.shape.gamma]
    }
}

pub fn encode(alt: &Alternative, grid: &Grid) -> Result<EncodedAlternative> {
    let shape = grid.shape();
    if alt.series.len() != shape.criteria {
        return Err(Error::dims(
            format!("{} criteria", shape.criteria),
            format!("{} in `{}`", alt.series.len(), alt.id),
        ));
    }
    let mut v = vec![0.0; shape.len()];
    for (j, series) in alt.series.iter().enumerate() {
        if series.len() != shape.horizon {
            return Err(Error::dims(
                format!("{} timestamps", shape.horizon),
                format!("{} in `{}`", series.len(), alt.id),
            ));
        }
        for (t, &g) in series.iter().enumerate() {
            let start = shape.index(j, t, 0);
            grid.encode_value(j, t, g, &mut v[start..start + shape.gamma]);
        }
    }
    Ok(EncodedAlternative { id: alt.id.clone(), label: alt.label, shape, v })
}

pub fn encode_all(dataset: &Dataset, grid: &Grid) -> Result<Vec<EncodedAlternative>> {
    dataset.alternatives().iter().map(|a| encode(a, grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_cell_grid(alpha: f64, beta: f64, gamma: usize) -> Grid {
        Grid::from_bounds(Shape::new(1, 1, gamma), vec![alpha], vec![beta]).unwrap()
    }

    fn dataset(values: &[f64]) -> Dataset {
        let alts = values
            .iter()
            .enumerate()
            .map(|(i, &g)| Alternative::new(format!("a{i}"), vec![vec![g]], Some(1)))
            .collect();
        Dataset::new(vec!["g1".into()], 1, 1, alts).unwrap()
    }

    #[test]
    fn equal_spacing_over_observed_range() {
        let grid = build_grid(&dataset(&[0.0, 1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(grid.points(0, 0), &[0.0, 2.0, 4.0]);
        assert!(grid.degenerate_cells().is_empty());
    }

    #[test]
    fn constant_cell_is_flagged_and_encodes_to_zero() {
        let grid = build_grid(&dataset(&[5.0, 5.0, 5.0]), 3).unwrap();
        assert_eq!(grid.degenerate_cells(), vec![(0, 0)]);
        let mut out = [9.0; 3];
        grid.encode_value(0, 0, 5.0, &mut out);
        assert_eq!(out, [0.0; 3]);
    }

    #[test]
    fn encoding_three_cases() {
        let grid = single_cell_grid(0.0, 1.0, 2);
        let mut out = [0.0; 2];
        grid.encode_value(0, 0, 0.75, &mut out);
        assert_eq!(out, [1.0, 0.5]);
        grid.encode_value(0, 0, 0.0, &mut out);
        assert_eq!(out, [0.0, 0.0]);
        grid.encode_value(0, 0, 1.0, &mut out);
        assert_eq!(out, [1.0, 1.0]);
        // Out-of-range values saturate.
        grid.encode_value(0, 0, -3.0, &mut out);
        assert_eq!(out, [0.0, 0.0]);
        grid.encode_value(0, 0, 7.0, &mut out);
        assert_eq!(out, [1.0, 1.0]);
    }

    #[test]
    fn encode_rejects_wrong_shape() {
        let grid = single_cell_grid(0.0, 1.0, 2);
        let alt = Alternative::new("x", vec![vec![0.5, 0.5]], None);
        assert!(matches!(encode(&alt, &grid), Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn encoding_is_monotone_staircase(
            alpha in -10.0..10.0f64,
            width in 0.001..20.0f64,
            gamma in 1usize..9,
            g1 in -15.0..35.0f64,
            g2 in -15.0..35.0f64,
        ) {
            let grid = single_cell_grid(alpha, alpha + width, gamma);
            let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            let mut a = vec![0.0; gamma];
            let mut b = vec![0.0; gamma];
            grid.encode_value(0, 0, lo, &mut a);
            grid.encode_value(0, 0, hi, &mut b);
            for k in 0..gamma {
                prop_assert!(a[k] <= b[k]);
                prop_assert!((0.0..=1.0).contains(&a[k]));
            }
            for w in a.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            prop_assert!(a.iter().filter(|&&x| x > 0.0 && x < 1.0).count() <= 1);
        }
    }
}
