//! Hypergraphs induced by a soft membership matrix.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CentroidSet, FeatureMatrix, MembershipMatrix};

/// Soft hypergraph: incidence (N×K), hyperedge centroids and the optional
/// per-hyperedge degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    incidence: Array2<f64>,
    centroids: CentroidSet,
    degree_cap: Option<usize>,
    empty_rows: Vec<usize>,
}

impl Hypergraph {
    /// Rows may be all-zero when a cap removed every membership of a node.
    pub fn incidence(&self) -> ArrayView2<'_, f64> {
        self.incidence.view()
    }

    pub fn centroids(&self) -> &CentroidSet {
        &self.centroids
    }

    pub fn degree_cap(&self) -> Option<usize> {
        self.degree_cap
    }

    /// Nodes left without any hyperedge after capping.
    pub fn empty_rows(&self) -> &[usize] {
        &self.empty_rows
    }

    pub fn n_nodes(&self) -> usize {
        self.incidence.nrows()
    }

    pub fn n_hyperedges(&self) -> usize {
        self.incidence.ncols()
    }
}

/// Builds a hypergraph. With `degree_cap = Some(d)` every hyperedge keeps only
/// its `d` largest memberships (lower node index wins ties) and each row that
/// lost an entry is renormalized over what survived.
pub fn build(u: &MembershipMatrix, c: &CentroidSet, degree_cap: Option<usize>) -> Result<Hypergraph> {
    build_from_incidence(u.view(), c, degree_cap)
}

/// Same as [`build`] but accepts an incidence that may contain all-zero rows,
/// such as the output of a previous capped build.
pub fn build_from_incidence(u: ArrayView2<'_, f64>, c: &CentroidSet, degree_cap: Option<usize>) -> Result<Hypergraph> {
    if u.ncols() != c.k() {
        return Err(Error::shape(
            "hypergraph::build",
            format!("{} hyperedge columns", c.k()),
            format!("{} columns", u.ncols()),
        ));
    }
    let mut incidence = u.to_owned();
    if let Some(cap) = degree_cap {
        if cap < 2 {
            return Err(Error::InvalidConfig(format!(
                "degree cap must be at least 2, got {cap}"
            )));
        }
        let n = incidence.nrows();
        let mut touched = vec![false; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for mut col in incidence.columns_mut() {
            order.clear();
            order.extend(0..n);
            // Stable sort keeps lower indices first among equal values.
            order.sort_by(|&a, &b| col[b].total_cmp(&col[a]));
            for &i in order.iter().skip(cap) {
                if col[i] != 0.0 {
                    col[i] = 0.0;
                    touched[i] = true;
                }
            }
        }
        for (mut row, _) in incidence.rows_mut().into_iter().zip(&touched).filter(|(_, &t)| t) {
            let s = row.sum();
            if s > 0.0 {
                row /= s;
            }
        }
    }
    let empty_rows = incidence
        .rows()
        .into_iter()
        .enumerate()
        .filter(|(_, r)| r.iter().all(|&v| v == 0.0))
        .map(|(i, _)| i)
        .collect();
    Ok(Hypergraph {
        incidence,
        centroids: c.clone(),
        degree_cap,
        empty_rows,
    })
}

/// Histogram of effective hyperedge cardinalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityHistogram {
    pub n_nodes: usize,
    #[serde(rename = "total")]
    pub total_hyperedges: usize,
    pub counts: BTreeMap<usize, usize>,
}

impl CardinalityHistogram {
    pub fn empty(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            total_hyperedges: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, cardinality: usize) {
        *self.counts.entry(cardinality).or_default() += 1;
        self.total_hyperedges += 1;
    }

    pub fn merge(&mut self, other: &CardinalityHistogram) {
        for (&card, &count) in &other.counts {
            *self.counts.entry(card).or_default() += count;
        }
        self.total_hyperedges += other.total_hyperedges;
        self.n_nodes = self.n_nodes.max(other.n_nodes);
    }

    pub fn max_cardinality(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// Most frequent cardinality (smallest on ties).
    pub fn mode(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&card, &count) in &self.counts {
            if best.map_or(true, |(_, c)| count > c) {
                best = Some((card, count));
            }
        }
        best.map(|(card, _)| card)
    }

    /// Fraction of hyperedges with cardinality at least `min`.
    pub fn fraction_at_least(&self, min: usize) -> f64 {
        if self.total_hyperedges == 0 {
            return 0.0;
        }
        let hits: usize = self.counts.range(min..).map(|(_, &c)| c).sum();
        hits as f64 / self.total_hyperedges as f64
    }
}

/// Counts, per hyperedge, the nodes whose incidence strictly exceeds `1/D_eff`
/// where `D_eff` is the degree cap, or N for a degree-free hypergraph.
pub fn effective_cardinalities(h: &Hypergraph) -> CardinalityHistogram {
    let n = h.n_nodes();
    let threshold = 1.0 / h.degree_cap.unwrap_or(n) as f64;
    let mut hist = CardinalityHistogram::empty(n);
    for col in h.incidence.columns() {
        hist.add(col.iter().filter(|&&v| v > threshold).count());
    }
    hist
}

/// Residual fusion `x'_i = β1 x_i + (1 − β1) Σ_k u_ik c_k`.
pub fn aggregate(x: &FeatureMatrix, h: &Hypergraph, beta1: f64) -> Result<FeatureMatrix> {
    if !(0.0..=1.0).contains(&beta1) {
        return Err(Error::InvalidConfig(format!("beta1 must lie in [0, 1], got {beta1}")));
    }
    if h.n_nodes() != x.n_nodes() || h.centroids.dim() != x.dim() {
        return Err(Error::shape(
            "hypergraph::aggregate",
            format!("{}x{} features", h.n_nodes(), h.centroids.dim()),
            format!("{}x{}", x.n_nodes(), x.dim()),
        ));
    }
    if beta1 == 1.0 {
        return Ok(x.clone());
    }
    let messages = h.incidence.dot(&h.centroids.view());
    let out = x.view().mapv(|v| beta1 * v) + messages.mapv(|v| (1.0 - beta1) * v);
    Ok(FeatureMatrix::from_computed(out))
}
