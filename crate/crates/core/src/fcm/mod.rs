//! Fuzzy C-Means soft clustering.
//!
//! A run alternates [`update_centroids`] and [`update_membership`] from one of
//! three starting points and records the objective after every full step.
//! The resulting membership matrix is the soft incidence of the hypergraph.

pub mod kmeans;

use ndarray::{Array2, Axis, Zip};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, squared_distance};
use crate::types::{CentroidSet, FeatureMatrix, MembershipMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct FcmConfig {
    /// Fuzzifier `m`, strictly greater than one.
    pub fuzzifier: f64,
    pub max_iters: usize,
    /// Additive distance offset.
    pub epsilon: f64,
    /// Absolute change in the objective below which the run stops.
    pub convergence_tol: f64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            fuzzifier: 2.0,
            max_iters: 5,
            epsilon: 1e-8,
            convergence_tol: 1e-4,
        }
    }
}

impl FcmConfig {
    pub fn validate(&self) -> Result<()> {
        check_fuzzifier(self.fuzzifier)?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    /// Uniform positive draws per row, normalized.
    RandomMembership { seed: u64 },
    /// Lloyd's K-Means with farthest-point seeding.
    KMeansCentroids { seed: u64, kmeans_iters: usize },
    /// Externally constructed centroids; they define the initial membership.
    InjectedCentroids(CentroidSet),
}

impl InitStrategy {
    pub fn kmeans(seed: u64) -> Self {
        InitStrategy::KMeansCentroids {
            seed,
            kmeans_iters: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    pub membership: MembershipMatrix,
    pub centroids: CentroidSet,
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl FcmResult {
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}

fn check_fuzzifier(m: f64) -> Result<()> {
    if m > 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFuzzifier(m))
    }
}

/// `c_k = Σ_i u_ik^m x_i / Σ_i u_ik^m`; a cluster with zero total weight
/// falls back to the mean of `x`.
pub fn update_centroids(x: &FeatureMatrix, u: &MembershipMatrix, m: f64) -> Result<CentroidSet> {
    check_fuzzifier(m)?;
    if u.n_nodes() != x.n_nodes() {
        return Err(Error::shape(
            "update_centroids",
            format!("membership with {} rows", x.n_nodes()),
            format!("{} rows", u.n_nodes()),
        ));
    }
    let weights = u.view().mapv(|v| v.powf(m));
    let mut centroids = weights.t().dot(&x.view());
    let totals = weights.sum_axis(Axis(0));
    let fallback = linalg::mean_row(x.view());
    for (mut row, &total) in centroids.rows_mut().into_iter().zip(totals.iter()) {
        if total > f64::MIN_POSITIVE {
            row /= total;
        } else {
            row.assign(&fallback);
        }
    }
    Ok(CentroidSet::from_computed(centroids))
}

/// `u_ij = 1 / Σ_k (d_ij / d_ik)^{2/(m−1)}` with `d_ik = ‖x_i − c_k‖ + ε`.
///
/// Evaluated as a softmax over `−(2/(m−1)) ln d_ik`, which is the same
/// quantity without overflow for fuzzifiers close to one.
pub fn update_membership(x: &FeatureMatrix, c: &CentroidSet, m: f64, epsilon: f64) -> Result<MembershipMatrix> {
    check_fuzzifier(m)?;
    if c.dim() != x.dim() {
        return Err(Error::shape(
            "update_membership",
            format!("centroids with {} columns", x.dim()),
            format!("{} columns", c.dim()),
        ));
    }
    let exponent = 2.0 / (m - 1.0);
    let mut u = Array2::<f64>::zeros((x.n_nodes(), c.k()));
    Zip::from(u.rows_mut())
        .and(x.view().rows())
        .for_each(|mut urow, xrow| {
            for (k, slot) in urow.iter_mut().enumerate() {
                let d = squared_distance(xrow, c.row(k)).sqrt() + epsilon;
                *slot = -exponent * d.ln();
            }
            linalg::softmax_in_place(urow.as_slice_mut().expect("fresh rows are contiguous"));
        });
    Ok(MembershipMatrix::from_computed(u))
}

/// `J = Σ_i Σ_k u_ik^m ‖x_i − c_k‖²`.
pub fn objective(x: &FeatureMatrix, u: &MembershipMatrix, c: &CentroidSet, m: f64) -> Result<f64> {
    if u.n_nodes() != x.n_nodes() || u.n_clusters() != c.k() || c.dim() != x.dim() {
        return Err(Error::shape(
            "objective",
            format!("U {}x{}, C {}x{}", x.n_nodes(), c.k(), c.k(), x.dim()),
            format!("U {}x{}, C {}x{}", u.n_nodes(), u.n_clusters(), c.k(), c.dim()),
        ));
    }
    let mut j = 0.0;
    for (i, xrow) in x.view().rows().into_iter().enumerate() {
        for k in 0..c.k() {
            j += u.view()[[i, k]].powf(m) * squared_distance(xrow, c.row(k));
        }
    }
    Ok(j)
}

fn random_membership(n: usize, k: usize, seed: u64) -> MembershipMatrix {
    let mut rng = linalg::rng(seed);
    let mut u = Array2::<f64>::zeros((n, k));
    for mut row in u.rows_mut() {
        // random() is in [0, 1); flip it so every draw is strictly positive.
        row.mapv_inplace(|_| 1.0 - rng.random::<f64>());
        let s = row.sum();
        row /= s;
    }
    MembershipMatrix::from_computed(u)
}

/// Runs FCM with `k` hyperedges.
pub fn run(x: &FeatureMatrix, k: usize, init: &InitStrategy, cfg: &FcmConfig) -> Result<FcmResult> {
    cfg.validate()?;
    let n = x.n_nodes();
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!(
            "hyperedge count K = {k} must satisfy 1 <= K <= N = {n}"
        )));
    }
    let m = cfg.fuzzifier;
    let mut trace = Vec::with_capacity(cfg.max_iters + 1);

    let (mut membership, mut centroids) = match init {
        InitStrategy::RandomMembership { seed } => {
            let u = random_membership(n, k, *seed);
            let c = update_centroids(x, &u, m)?;
            (u, c)
        }
        InitStrategy::KMeansCentroids { seed, kmeans_iters } => {
            let (centers, _) = kmeans::kmeans(x.view(), k, *seed, *kmeans_iters);
            let c = CentroidSet::from_computed(centers);
            let u = update_membership(x, &c, m, cfg.epsilon)?;
            trace.push(objective(x, &u, &c, m)?);
            (u, c)
        }
        InitStrategy::InjectedCentroids(c) => {
            if c.k() != k || c.dim() != x.dim() {
                return Err(Error::shape(
                    "injected centroids",
                    format!("{k}x{}", x.dim()),
                    format!("{}x{}", c.k(), c.dim()),
                ));
            }
            let u = update_membership(x, c, m, cfg.epsilon)?;
            trace.push(objective(x, &u, c, m)?);
            (u, c.clone())
        }
    };
    let random_start = matches!(init, InitStrategy::RandomMembership { .. });

    let mut iterations_run = 0;
    let mut converged = false;
    while iterations_run < cfg.max_iters {
        // The random start already has centroids for its first step.
        if !(random_start && iterations_run == 0) {
            centroids = update_centroids(x, &membership, m)?;
        }
        membership = update_membership(x, &centroids, m, cfg.epsilon)?;
        let j = objective(x, &membership, &centroids, m)?;
        iterations_run += 1;
        let prev = trace.last().copied();
        trace.push(j);
        if let Some(prev) = prev {
            if (prev - j).abs() < cfg.convergence_tol {
                converged = true;
                break;
            }
        }
    }

    Ok(FcmResult {
        membership,
        centroids,
        objective_trace: trace,
        iterations_run,
        converged,
    })
}
