//! Total correlation, dual total correlation and O-information.
//!
//! Two system kinds are supported: an exact discrete joint pmf and a
//! multivariate Gaussian given by its covariance. Every quantity is reported
//! in bits. For a system of `n` variables
//!
//! * `C = Σ_i H(X_i) − H(X)`
//! * `B = H(X) − Σ_i H(X_i | X_{−i})`, with `H(X_i | X_{−i}) = H(X) − H(X_{−i})`
//! * `Ω = C − B = (n − 2) H(X) + Σ_i [H(X_i) − H(X_{−i})]`
//!
//! Positive Ω means the system is redundancy-dominated, negative Ω
//! synergy-dominated.

use std::f64::consts::{E, LN_2, PI};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dense pmf table accepted.
pub const MAX_OUTCOMES: usize = 1 << 20;
const PMF_TOL: f64 = 1e-9;

/// Joint pmf over `cards.len()` discrete variables, stored densely in
/// mixed-radix order with the first variable most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem {
    cards: Vec<usize>,
    pmf: Vec<f64>,
}

impl DiscreteSystem {
    pub fn new(cards: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if cards.len() < 2 {
            return Err(Error::InvalidData(format!("need at least 2 variables, got {}", cards.len())));
        }
        if cards.iter().any(|&c| c == 0) {
            return Err(Error::InvalidData("alphabet sizes must be positive".into()));
        }
        let outcomes = cards
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c).filter(|&v| v <= MAX_OUTCOMES))
            .ok_or_else(|| Error::InvalidData(format!("joint alphabet exceeds {MAX_OUTCOMES} outcomes")))?;
        if pmf.len() != outcomes {
            return Err(Error::shape("DiscreteSystem", format!("{outcomes} pmf entries"), pmf.len()));
        }
        check_pmf(&pmf)?;
        Ok(Self { cards, pmf })
    }

    /// Product of independent marginals.
    pub fn independent(marginals: &[Vec<f64>]) -> Result<Self> {
        let cards: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let mut pmf = vec![1.0];
        for m in marginals {
            pmf = pmf.iter().flat_map(|&p| m.iter().map(move |&q| p * q)).collect();
        }
        Self::new(cards, pmf)
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Marginal pmf of the variables in `vars` (sorted ascending, distinct).
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let n = self.cards.len();
        // Strides of each variable in the full table.
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        // Strides in the marginal table.
        let mut sub_strides = vec![1usize; vars.len()];
        for j in (0..vars.len().saturating_sub(1)).rev() {
            sub_strides[j] = sub_strides[j + 1] * self.cards[vars[j + 1]];
        }
        let size: usize = vars.iter().map(|&v| self.cards[v]).product();
        let mut out = vec![0.0; size];
        for (flat, &p) in self.pmf.iter().enumerate() {
            let idx: usize = vars
                .iter()
                .zip(&sub_strides)
                .map(|(&v, &s)| (flat / strides[v]) % self.cards[v] * s)
                .sum();
            out[idx] += p;
        }
        out
    }
}

fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidData("pmf entries must be finite and non-negative".into()));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > PMF_TOL {
        return Err(Error::Normalization { sum });
    }
    Ok(())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy_discrete(pmf: &[f64]) -> Result<f64> {
    check_pmf(pmf)?;
    Ok(entropy_unchecked(pmf))
}

fn entropy_unchecked(pmf: &[f64]) -> f64 {
    -pmf.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Zero-mean multivariate Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem {
    cov: Array2<f64>,
}

impl GaussianSystem {
    pub fn new(cov: Array2<f64>) -> Result<Self> {
        let n = cov.nrows();
        if n != cov.ncols() {
            return Err(Error::shape("GaussianSystem", "square covariance", format!("{}x{}", n, cov.ncols())));
        }
        if n < 2 {
            return Err(Error::InvalidData(format!("need at least 2 variables, got {n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if (cov[[i, j]] - cov[[j, i]]).abs() > 1e-9 {
                    return Err(Error::InvalidData(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        cholesky_log_det(&cov)?;
        Ok(Self { cov })
    }

    pub fn covariance(&self) -> &Array2<f64> {
        &self.cov
    }

    fn sub_block(&self, vars: &[usize]) -> Array2<f64> {
        Array2::from_shape_fn((vars.len(), vars.len()), |(i, j)| self.cov[[vars[i], vars[j]]])
    }
}

/// `ln det Σ` via Cholesky; fails unless Σ is positive definite.
fn cholesky_log_det(cov: &Array2<f64>) -> Result<f64> {
    let n = cov.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    let mut log_det = 0.0;
    for j in 0..n {
        let mut diag = cov[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        log_det += 2.0 * ljj.ln();
        for i in j + 1..n {
            let mut s = cov[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Ok(log_det)
}

/// Differential entropy `½ log2((2πe)^k det Σ)` of a k-dimensional Gaussian.
pub fn gaussian_entropy(cov: &Array2<f64>) -> Result<f64> {
    if cov.nrows() != cov.ncols() || cov.nrows() == 0 {
        return Err(Error::shape("gaussian_entropy", "non-empty square block", format!("{:?}", cov.dim())));
    }
    let k = cov.nrows() as f64;
    let log_det = cholesky_log_det(cov)?;
    Ok(0.5 * (k * (2.0 * PI * E).ln() + log_det) / LN_2)
}

/// A system whose subset entropies can be evaluated.
pub trait InfoSystem {
    fn n_vars(&self) -> usize;
    /// Entropy in bits of the variables in `vars` (sorted ascending, distinct).
    fn entropy(&self, vars: &[usize]) -> Result<f64>;
    /// Verdict tolerance for Ω.
    fn default_tolerance(&self) -> f64;
}

impl InfoSystem for DiscreteSystem {
    fn n_vars(&self) -> usize {
        self.cards.len()
    }

    fn entropy(&self, vars: &[usize]) -> Result<f64> {
        if vars.len() == self.cards.len() {
            return Ok(entropy_unchecked(&self.pmf));
        }
        Ok(entropy_unchecked(&self.marginal(vars)))
    }

    fn default_tolerance(&self) -> f64 {
        1e-9
    }
}

impl InfoSystem for GaussianSystem {
    fn n_vars(&self) -> usize {
        self.cov.nrows()
    }

    fn entropy(&self, vars: &[usize]) -> Result<f64> {
        gaussian_entropy(&self.sub_block(vars))
    }

    fn default_tolerance(&self) -> f64 {
        1e-6
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Redundancy,
    Synergy,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub n_vars: usize,
    pub h_joint: f64,
    pub h_marginals: Vec<f64>,
    /// `H(X_i | X_{−i})` per variable.
    pub h_conditionals: Vec<f64>,
    pub total_correlation: f64,
    pub dual_total_correlation: f64,
    /// `C − B`.
    pub o_information: f64,
    /// `(n − 2) H(X) + Σ_i [H(X_i) − H(X_{−i})]`.
    pub o_information_expanded: f64,
    pub verdict: Verdict,
    /// Set for pairwise systems, where Ω carries no higher-order meaning.
    pub low_order: bool,
}

struct Entropies {
    joint: f64,
    marginals: Vec<f64>,
    complements: Vec<f64>,
}

fn entropies(system: &dyn InfoSystem) -> Result<Entropies> {
    let n = system.n_vars();
    let all: Vec<usize> = (0..n).collect();
    let joint = system.entropy(&all)?;
    let marginals = (0..n).map(|i| system.entropy(&[i])).collect::<Result<Vec<_>>>()?;
    let complements = (0..n)
        .map(|i| {
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            system.entropy(&rest)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Entropies { joint, marginals, complements })
}

pub fn total_correlation(system: &dyn InfoSystem) -> Result<f64> {
    let all: Vec<usize> = (0..system.n_vars()).collect();
    let mut sum = 0.0;
    for i in 0..system.n_vars() {
        sum += system.entropy(&[i])?;
    }
    Ok(sum - system.entropy(&all)?)
}

pub fn dual_total_correlation(system: &dyn InfoSystem) -> Result<f64> {
    let e = entropies(system)?;
    let conditional: f64 = e.complements.iter().map(|h| e.joint - h).sum();
    Ok(e.joint - conditional)
}

/// Full report with the default verdict tolerance of the system kind.
pub fn o_information(system: &dyn InfoSystem) -> Result<InfoReport> {
    o_information_with_tol(system, system.default_tolerance())
}

pub fn o_information_with_tol(system: &dyn InfoSystem, tol: f64) -> Result<InfoReport> {
    let n = system.n_vars();
    let e = entropies(system)?;
    let h_conditionals: Vec<f64> = e.complements.iter().map(|h| e.joint - h).collect();
    let total_correlation = e.marginals.iter().sum::<f64>() - e.joint;
    let dual_total_correlation = e.joint - h_conditionals.iter().sum::<f64>();
    let o_information = total_correlation - dual_total_correlation;
    let o_information_expanded = (n as f64 - 2.0) * e.joint
        + e.marginals.iter().zip(&e.complements).map(|(hi, hrest)| hi - hrest).sum::<f64>();
    let verdict = if o_information > tol {
        Verdict::Redundancy
    } else if o_information < -tol {
        Verdict::Synergy
    } else {
        Verdict::Neutral
    };
    Ok(InfoReport {
        n_vars: n,
        h_joint: e.joint,
        h_marginals: e.marginals,
        h_conditionals,
        total_correlation,
        dual_total_correlation,
        o_information,
        o_information_expanded,
        verdict,
        low_order: n < 3,
    })
}

/// JSON system description accepted by the analyzer.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SystemSpec {
    Discrete { cards: Vec<usize>, pmf: Vec<f64> },
    Gaussian { cov: Vec<Vec<f64>> },
}

impl SystemSpec {
    pub fn analyze(self) -> Result<InfoReport> {
        match self {
            SystemSpec::Discrete { cards, pmf } => o_information(&DiscreteSystem::new(cards, pmf)?),
            SystemSpec::Gaussian { cov } => {
                let n = cov.len();
                if cov.iter().any(|r| r.len() != n) {
                    return Err(Error::shape("gaussian cov", format!("{n}x{n}"), "ragged rows"));
                }
                let flat: Vec<f64> = cov.into_iter().flatten().collect();
                let cov = Array2::from_shape_vec((n, n), flat).expect("checked square");
                o_information(&GaussianSystem::new(cov)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn xor_triplet() -> DiscreteSystem {
        let mut pmf = vec![0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                pmf[a * 4 + b * 2 + (a ^ b)] = 0.25;
            }
        }
        DiscreteSystem::new(vec![2, 2, 2], pmf).unwrap()
    }

    fn copies(n: usize) -> DiscreteSystem {
        let mut pmf = vec![0.0; 1 << n];
        pmf[0] = 0.5;
        pmf[(1 << n) - 1] = 0.5;
        DiscreteSystem::new(vec![2; n], pmf).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_discrete(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy_discrete(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy_discrete(&[0.25, 0.75]).unwrap() - 0.8112781245).abs() < 1e-9);
        assert!(matches!(entropy_discrete(&[0.5, 0.4]), Err(Error::Normalization { .. })));
    }

    #[test]
    fn independent_bits_are_neutral() {
        let s = DiscreteSystem::independent(&[vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = o_information(&s).unwrap();
        assert_eq!(r.total_correlation, 0.0);
        assert_eq!(r.dual_total_correlation, 0.0);
        assert_eq!(r.verdict, Verdict::Neutral);
    }

    #[test]
    fn duplicated_bits_are_redundant() {
        let r = o_information(&copies(3)).unwrap();
        assert!((r.total_correlation - 2.0).abs() < 1e-12);
        assert!((r.dual_total_correlation - 1.0).abs() < 1e-12);
        assert!((r.o_information - 1.0).abs() < 1e-12);
        assert!(r.h_conditionals.iter().all(|h| h.abs() < 1e-12));
        assert_eq!(r.verdict, Verdict::Redundancy);
    }

    #[test]
    fn xor_is_synergistic() {
        let s = xor_triplet();
        assert!((total_correlation(&s).unwrap() - 1.0).abs() < 1e-12);
        assert!((dual_total_correlation(&s).unwrap() - 2.0).abs() < 1e-12);
        let r = o_information(&s).unwrap();
        assert!((r.h_joint - 2.0).abs() < 1e-12);
        assert!((r.o_information + 1.0).abs() < 1e-12);
        assert!((r.o_information_expanded + 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Synergy);
    }

    #[test]
    fn marginal_layout_is_first_variable_major() {
        // P(X0 = 1) = 0.7 with X1 uniform.
        let s = DiscreteSystem::independent(&[vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let m = s.marginal(&[0]);
        assert!((m[0] - 0.3).abs() < 1e-15 && (m[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn pairwise_system_is_flagged() {
        let s = DiscreteSystem::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = o_information(&s).unwrap();
        assert!(r.low_order);
    }

    #[test]
    fn oversized_alphabet_is_rejected() {
        let err = DiscreteSystem::new(vec![1 << 11, 1 << 10], vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidData(_)));
    }

    #[test]
    fn gaussian_entropy_examples() {
        let unit = gaussian_entropy(&array![[1.0]]).unwrap();
        assert!((unit - 2.047095586).abs() < 1e-9);
        let two = gaussian_entropy(&Array2::eye(2)).unwrap();
        assert!((two - 2.0 * unit).abs() < 1e-12);

        let rho = 0.5;
        let cov = array![[1.0, rho, rho], [rho, 1.0, rho], [rho, rho, 1.0]];
        let det: f64 = (1.0 - rho) * (1.0 - rho) * (1.0 + 2.0 * rho);
        assert_eq!(det, 0.5);
        let expected = 0.5 * (3.0 * (2.0 * PI * E).log2() + det.log2());
        assert!((gaussian_entropy(&cov).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn non_pd_covariance_is_rejected() {
        let cov = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(GaussianSystem::new(cov), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn json_spec_parses_both_kinds() {
        let d: SystemSpec = serde_json::from_str(r#"{"type":"discrete","cards":[2,2,2],"pmf":[0.25,0,0,0.25,0,0.25,0.25,0]}"#).unwrap();
        assert_eq!(d.analyze().unwrap().verdict, Verdict::Synergy);
        let g: SystemSpec = serde_json::from_str(r#"{"type":"gaussian","cov":[[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
        assert_eq!(g.analyze().unwrap().verdict, Verdict::Neutral);
    }
}
