//! Independent dense eigensolve and comparison against a predicted spectrum.

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{normalized, residual, sort_complex, CMatrix};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("matrix is {rows}x{cols}; a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("dense eigensolver failed: {0}")]
    Solver(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `‖M v - λ v‖` for each returned pair.
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn to_faer(m: &CMatrix) -> Mat<faer::c64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Full eigendecomposition of `m` with a general dense solver.
pub fn dense_spectrum(m: &CMatrix) -> Result<SpectrumReport, OracleError> {
    if !m.is_square() {
        return Err(OracleError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(OracleError::NonFinite);
    }
    let n = m.rows();
    if n == 0 {
        return Ok(SpectrumReport {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            residuals: Vec::new(),
        });
    }
    let evd = to_faer(m).eigen().map_err(|e| OracleError::Solver(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S();
    let mut pairs: Vec<(Complex64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let v: Vec<Complex64> = (0..n).map(|i| u[(i, k)]).collect();
            (s[k], normalized(&v))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let residuals = pairs.iter().map(|(l, v)| residual(m, *l, v)).collect();
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectrumReport {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Eigenvalues only, sorted.
pub fn dense_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>, OracleError> {
    if !m.is_square() {
        return Err(OracleError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(OracleError::NonFinite);
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let mut values = to_faer(m)
        .eigenvalues()
        .map_err(|e| OracleError::Solver(format!("{e:?}")))?;
    sort_complex(&mut values);
    Ok(values)
}

pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedPair {
    pub predicted: Complex64,
    pub oracle: Complex64,
    pub distance: f64,
}

/// A lifted eigenvector whose residual on the full matrix is too large.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualWitness {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub passed: bool,
    /// Absolute threshold used for eigenvalue matching and residuals,
    /// `tol · max(1, ‖M‖∞)`.
    pub threshold: f64,
    pub oracle_eigenvalues: Vec<Complex64>,
    pub predicted_eigenvalues: Vec<Complex64>,
    /// Pairs from the greedy nearest-neighbour matching whose distance
    /// exceeds the threshold.
    pub mismatches: Vec<MatchedPair>,
    pub max_match_distance: f64,
    /// Predicted values left over when the multisets differ in size.
    pub unmatched_predicted: Vec<Complex64>,
    pub unmatched_oracle: Vec<Complex64>,
    pub max_lifted_residual: f64,
    pub residual_failures: Vec<ResidualWitness>,
}

/// Greedy nearest-neighbour matching between two multisets: repeatedly pair
/// the closest remaining (predicted, oracle) values.
pub fn match_multisets(predicted: &[Complex64], oracle: &[Complex64]) -> (Vec<MatchedPair>, Vec<usize>, Vec<usize>) {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(predicted.len() * oracle.len());
    for (i, p) in predicted.iter().enumerate() {
        for (j, o) in oracle.iter().enumerate() {
            candidates.push(((p - o).norm(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; predicted.len()];
    let mut used_o = vec![false; oracle.len()];
    let mut pairs = Vec::with_capacity(predicted.len().min(oracle.len()));
    for (d, i, j) in candidates {
        if used_p[i] || used_o[j] {
            continue;
        }
        used_p[i] = true;
        used_o[j] = true;
        pairs.push(MatchedPair {
            predicted: predicted[i],
            oracle: oracle[j],
            distance: d,
        });
    }
    let left_p = (0..predicted.len()).filter(|&i| !used_p[i]).collect();
    let left_o = (0..oracle.len()).filter(|&j| !used_o[j]).collect();
    (pairs, left_p, left_o)
}

/// Compares a predicted spectrum (with optional lifted eigenvectors) against
/// a dense solve of `m`.
pub fn verify_spectrum(
    m: &CMatrix,
    predicted: &[Complex64],
    lifted: &[(Complex64, Vec<Complex64>)],
    tol: f64,
) -> Result<Verdict, OracleError> {
    let oracle = dense_eigenvalues(m)?;
    let threshold = tol * m.norm_inf().max(1.0);
    let mut predicted_sorted = predicted.to_vec();
    sort_complex(&mut predicted_sorted);

    let (pairs, left_p, left_o) = match_multisets(&predicted_sorted, &oracle);
    let max_match_distance = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let mismatches: Vec<MatchedPair> = pairs.into_iter().filter(|p| p.distance > threshold).collect();

    let mut max_lifted_residual: f64 = 0.0;
    let mut residual_failures = Vec::new();
    for (index, (lambda, v)) in lifted.iter().enumerate() {
        let r = residual(m, *lambda, v);
        max_lifted_residual = max_lifted_residual.max(r);
        // NaN residuals count as failures.
        if r.is_nan() || r > threshold {
            residual_failures.push(ResidualWitness {
                index,
                eigenvalue: *lambda,
                residual: r,
            });
        }
    }

    let unmatched_predicted: Vec<Complex64> = left_p.into_iter().map(|i| predicted_sorted[i]).collect();
    let unmatched_oracle: Vec<Complex64> = left_o.into_iter().map(|j| oracle[j]).collect();
    let passed = mismatches.is_empty()
        && unmatched_predicted.is_empty()
        && unmatched_oracle.is_empty()
        && residual_failures.is_empty();
    Ok(Verdict {
        passed,
        threshold,
        oracle_eigenvalues: oracle,
        predicted_eigenvalues: predicted_sorted,
        mismatches,
        max_match_distance,
        unmatched_predicted,
        unmatched_oracle,
        max_lifted_residual,
        residual_failures,
    })
}

/// Checks a decomposition of `m`: its eigenvalue multiset against the dense
/// spectrum and every lifted vector against `m` itself.
pub fn verify_decomposition(
    m: &CMatrix,
    d: &crate::spectral::SpectralDecomposition,
    tol: f64,
) -> Result<Verdict, OracleError> {
    verify_spectrum(m, &d.eigenvalues(), &d.lifted_pairs(), tol)
}
