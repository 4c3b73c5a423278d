//! Linear iteration `x_{k+1} = M x_k` and orbit-synchronization diagnostics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::matrix::{vec_norm_inf, CMatrix};
use crate::symmetry::OrbitPartition;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("initial state has length {got} but the matrix has order {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}; a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("malformed initial-state document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("initial state names unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("initial state has no value for vertex `{0}`")]
    MissingVertex(String),
    #[error("initial state value for `{0}` is not finite")]
    NonFinite(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `states[0] = x_0`, `states[k+1] = M states[k]` (divided by its sup
    /// norm when normalization is on).
    pub states: Vec<Vec<Complex64>>,
    /// `sync_log[k][o]` is the largest deviation from the orbit mean on orbit `o` at step `k`.
    pub sync_log: Vec<Vec<f64>>,
    /// Growth bound for rounding error at each step: `‖x_0‖∞ · ‖M‖∞^k`,
    /// divided by the accumulated normalization factors.
    pub scales: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_state(&self) -> &[Complex64] {
        self.states.last().expect("trajectory holds x_0")
    }
}

/// Per orbit, `max_{v ∈ O} |x(v) - mean_O(x)|`.
pub fn orbit_deviations(x: &[Complex64], orbits: &OrbitPartition) -> Vec<f64> {
    orbits
        .orbits()
        .iter()
        .map(|o| {
            let mean: Complex64 = o.iter().map(|&v| x[v]).sum::<Complex64>() / o.len() as f64;
            o.iter().map(|&v| (x[v] - mean).norm()).fold(0.0, f64::max)
        })
        .collect()
}

pub fn iterate(
    m: &CMatrix,
    x0: &[Complex64],
    steps: usize,
    orbits: &OrbitPartition,
    normalize: bool,
) -> Result<Trajectory, DynamicsError> {
    if !m.is_square() {
        return Err(DynamicsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    for len in [x0.len(), orbits.vertex_count()] {
        if len != m.rows() {
            return Err(DynamicsError::DimensionMismatch {
                expected: m.rows(),
                got: len,
            });
        }
    }
    let growth = m.norm_inf();
    let mut states = Vec::with_capacity(steps + 1);
    let mut sync_log = Vec::with_capacity(steps + 1);
    let mut scales = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    sync_log.push(orbit_deviations(x0, orbits));
    scales.push(vec_norm_inf(x0));
    for k in 0..steps {
        let mut next = m.matvec(&states[k]);
        let mut scale = growth * scales[k];
        if normalize {
            let norm = vec_norm_inf(&next);
            if norm > 0.0 {
                next.iter_mut().for_each(|z| *z /= norm);
                scale /= norm;
            }
        }
        sync_log.push(orbit_deviations(&next, orbits));
        scales.push(scale);
        states.push(next);
    }
    Ok(Trajectory {
        states,
        sync_log,
        scales,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyncViolation {
    pub step: usize,
    pub orbit: usize,
    pub deviation: f64,
    pub threshold: f64,
}

/// First step at which some orbit deviates by more than `tol · max(1, scale_k)`.
pub fn check_orbit_synchronization(t: &Trajectory, orbits: &OrbitPartition, tol: f64) -> Option<SyncViolation> {
    t.states.iter().enumerate().find_map(|(step, x)| {
        let threshold = tol * t.scales[step].max(1.0);
        orbit_deviations(x, orbits)
            .into_iter()
            .enumerate()
            .find(|&(_, d)| d > threshold)
            .map(|(orbit, deviation)| SyncViolation {
                step,
                orbit,
                deviation,
                threshold,
            })
    })
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Real(f64),
    Complex([f64; 2]),
}

/// `{"x0": {label: value}}`; every vertex must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateDoc {
    pub x0: BTreeMap<String, ScalarDoc>,
}

pub fn initial_state_from_doc(h: &Hypergraph, doc: &InitialStateDoc) -> Result<Vec<Complex64>, DynamicsError> {
    for label in doc.x0.keys() {
        if h.vertex_index(label).is_err() {
            return Err(DynamicsError::UnknownVertex(label.clone()));
        }
    }
    h.labels()
        .iter()
        .map(|l| {
            let z = match doc.x0.get(l) {
                Some(ScalarDoc::Real(re)) => Complex64::new(*re, 0.0),
                Some(ScalarDoc::Complex([re, im])) => Complex64::new(*re, *im),
                None => return Err(DynamicsError::MissingVertex(l.clone())),
            };
            if z.re.is_finite() && z.im.is_finite() {
                Ok(z)
            } else {
                Err(DynamicsError::NonFinite(l.clone()))
            }
        })
        .collect()
}

pub fn initial_state_from_json_str(h: &Hypergraph, text: &str) -> Result<Vec<Complex64>, DynamicsError> {
    let doc: InitialStateDoc = serde_json::from_str(text)?;
    initial_state_from_doc(h, &doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};
    use crate::symmetry::Permutation;

    fn cycle3() -> (CMatrix, OrbitPartition) {
        let p = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let m = CMatrix::from_real_rows(&[[1.0, 2.0, 3.0], [3.0, 1.0, 2.0], [2.0, 3.0, 1.0]]);
        (m, OrbitPartition::of(&p))
    }

    #[test]
    fn zero_state_stays_zero() {
        let (m, o) = cycle3();
        let t = iterate(&m, &[ZERO; 3], 5, &o, false).unwrap();
        assert_eq!(t.steps(), 5);
        assert!(t.states.iter().flatten().all(|z| *z == ZERO));
    }

    #[test]
    fn synchronized_state_stays_synchronized() {
        let (m, o) = cycle3();
        let t = iterate(&m, &[ONE; 3], 8, &o, false).unwrap();
        assert_eq!(check_orbit_synchronization(&t, &o, 1e-12), None);
        assert_eq!(t.final_state()[0], Complex64::new(6f64.powi(8), 0.0));
        let tn = iterate(&m, &[ONE; 3], 8, &o, true).unwrap();
        assert_eq!(tn.final_state(), &[ONE; 3]);
    }

    #[test]
    fn single_vertex_kick_is_flagged_at_step_zero() {
        let (m, o) = cycle3();
        let t = iterate(&m, &[ONE, ZERO, ZERO], 3, &o, false).unwrap();
        let v = check_orbit_synchronization(&t, &o, 1e-9).unwrap();
        assert_eq!(v.step, 0);
    }

    #[test]
    fn dimension_mismatch() {
        let (m, o) = cycle3();
        assert!(matches!(
            iterate(&m, &[ONE; 2], 1, &o, false),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn initial_state_document() {
        let h = Hypergraph::new(["a", "b"], [("e".to_string(), vec!["a".into(), "b".into()])]).unwrap();
        let x = initial_state_from_json_str(&h, r#"{"x0": {"a": 1.5, "b": [0, -1]}}"#).unwrap();
        assert_eq!(x, vec![Complex64::new(1.5, 0.0), Complex64::new(0.0, -1.0)]);
        assert!(matches!(
            initial_state_from_json_str(&h, r#"{"x0": {"a": 1}}"#),
            Err(DynamicsError::MissingVertex(_))
        ));
        assert!(matches!(
            initial_state_from_json_str(&h, r#"{"x0": {"a": 1, "b": 2, "c": 3}}"#),
            Err(DynamicsError::UnknownVertex(_))
        ));
    }
}
