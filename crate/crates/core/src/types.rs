use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Row-sum tolerance for membership matrices.
pub const ROW_SUM_TOL: f64 = 1e-6;

/// N×D node features of one graph sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Array2<f64>);

impl FeatureMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidData(format!(
                "feature matrix must be at least 1x1, got {n}x{d}"
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature value at flat index {pos}"
            )));
        }
        Ok(Self(data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(rows, "FeatureMatrix::from_rows")?)
    }

    pub fn n_nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Built from arithmetic on already-validated inputs.
    pub(crate) fn from_computed(data: Array2<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self(data)
    }
}

/// N×K soft incidence between nodes and hyperedges. Rows are stochastic.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix(Array2<f64>);

impl MembershipMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidData("membership matrix is empty".into()));
        }
        for (i, row) in data.rows().into_iter().enumerate() {
            if row.iter().any(|&u| !(0.0..=1.0).contains(&u)) {
                return Err(Error::InvalidData(format!(
                    "membership row {i} has entries outside [0, 1]"
                )));
            }
            let s = row.sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidData(format!(
                    "membership row {i} sums to {s}, expected 1"
                )));
            }
        }
        Ok(Self(data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(rows, "MembershipMatrix::from_rows")?)
    }

    pub(crate) fn from_computed(data: Array2<f64>) -> Self {
        Self(data)
    }

    pub fn n_nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_clusters(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Largest |row sum − 1| over all rows.
    pub fn max_row_deviation(&self) -> f64 {
        self.0
            .rows()
            .into_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the largest membership per row (lowest index on ties).
    pub fn hard_assignments(&self) -> Vec<usize> {
        self.0
            .rows()
            .into_iter()
            .map(|r| crate::linalg::argmax(r.iter().copied()))
            .collect()
    }
}

/// K×D centroids; one row per hyperedge or prototype slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet(Array2<f64>);

impl CentroidSet {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidData("centroid set is empty".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite centroid value".into()));
        }
        Ok(Self(data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(rows, "CentroidSet::from_rows")?)
    }

    pub(crate) fn from_computed(data: Array2<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self(data)
    }

    pub fn k(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn row(&self, k: usize) -> ArrayView1<'_, f64> {
        self.0.row(k)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }
}

fn rows_to_array(rows: &[Vec<f64>], context: &'static str) -> Result<Array2<f64>> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::shape(context, format!("rows of length {d}"), format!("row of length {}", bad.len())));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((n, d), flat)
        .map_err(|e| Error::InvalidData(format!("{context}: {e}")))
}
