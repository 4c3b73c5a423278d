//! Vertex-indexed matrices built from a hypergraph.
//!
//! Each kind follows its textbook formula verbatim, including the diagonal
//! convention. Kinds that divide by `|e| - 1` reject singleton edges instead
//! of skipping them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::matrix::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// `|E_u ∩ E_v|` off the diagonal, zero diagonal.
    AdjacencyR,
    /// `Σ 1/(|e|-1)` over shared edges, zero diagonal.
    AdjacencyB,
    /// Adjacency-b row scaled by `1/|E_u|`, zero diagonal.
    Transition,
    /// `-|E_u ∩ E_v|` off the diagonal, row degree on the diagonal.
    LaplacianR,
    /// `-Σ 1/(|e|-1)` off the diagonal, `|E_u|` on the diagonal.
    LaplacianB,
    /// `Σ 1/(|e|-1)` off the diagonal, `|E_u|` on the diagonal.
    SignlessQ,
    GeneralAdjacency,
    GeneralLaplacian,
    GeneralSignless,
    /// `|E_u ∩ E_v| / n_v` off the diagonal, `|E_u| / n_u` on it, where
    /// `n_u` is the size of the unit of `u`.
    UnitNormalized,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 10] = [
        MatrixKind::AdjacencyR,
        MatrixKind::AdjacencyB,
        MatrixKind::Transition,
        MatrixKind::LaplacianR,
        MatrixKind::LaplacianB,
        MatrixKind::SignlessQ,
        MatrixKind::GeneralAdjacency,
        MatrixKind::GeneralLaplacian,
        MatrixKind::GeneralSignless,
        MatrixKind::UnitNormalized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::AdjacencyR => "adjacency_r",
            MatrixKind::AdjacencyB => "adjacency_b",
            MatrixKind::Transition => "transition",
            MatrixKind::LaplacianR => "laplacian_r",
            MatrixKind::LaplacianB => "laplacian_b",
            MatrixKind::SignlessQ => "signless_q",
            MatrixKind::GeneralAdjacency => "general_adjacency",
            MatrixKind::GeneralLaplacian => "general_laplacian",
            MatrixKind::GeneralSignless => "general_signless",
            MatrixKind::UnitNormalized => "unit_normalized",
        }
    }

    pub fn needs_weights(self) -> bool {
        matches!(
            self,
            MatrixKind::GeneralAdjacency | MatrixKind::GeneralLaplacian | MatrixKind::GeneralSignless
        )
    }

    /// Kinds whose formula divides by `|e| - 1`.
    pub fn needs_non_singleton_edges(self) -> bool {
        matches!(
            self,
            MatrixKind::AdjacencyB | MatrixKind::Transition | MatrixKind::LaplacianB | MatrixKind::SignlessQ
        )
    }

    /// Kinds that are symmetric for every hypergraph.
    pub fn is_symmetric_kind(self) -> bool {
        matches!(
            self,
            MatrixKind::AdjacencyR
                | MatrixKind::AdjacencyB
                | MatrixKind::LaplacianR
                | MatrixKind::LaplacianB
                | MatrixKind::SignlessQ
        )
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatrixKind {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| BuildError::UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown matrix kind `{0}`")]
    UnknownKind(String),
    #[error("edge `{edge}` is a singleton; {kind} divides by |e|-1")]
    SingletonEdge { kind: MatrixKind, edge: String },
    #[error("vertex `{0}` has an empty star; transition rows would divide by zero")]
    EmptyStar(String),
    #[error("{0} requires vertex and edge weights")]
    MissingWeights(MatrixKind),
    #[error("{0} does not take weights")]
    UnexpectedWeights(MatrixKind),
    #[error("no weight given for {what} `{name}`")]
    MissingWeight { what: &'static str, name: String },
    #[error("weight for {what} `{name}` must be positive and finite, got {value}")]
    InvalidWeight {
        what: &'static str,
        name: String,
        value: f64,
    },
    #[error("weight given for unknown {what} `{name}`")]
    UnknownWeightTarget { what: &'static str, name: String },
    #[error("malformed weight document: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// Weight document: `{"delta_V": {label: w}, "delta_E": {edge id: w}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDoc {
    #[serde(rename = "delta_V")]
    pub delta_v: BTreeMap<String, f64>,
    #[serde(rename = "delta_E")]
    pub delta_e: BTreeMap<String, f64>,
}

/// Positive vertex and edge weights, resolved against a hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunctions {
    pub vertex: Vec<f64>,
    pub edge: Vec<f64>,
}

impl WeightFunctions {
    pub fn from_doc(h: &Hypergraph, doc: &WeightDoc) -> Result<Self, BuildError> {
        fn check(what: &'static str, name: &str, value: f64) -> Result<f64, BuildError> {
            if value.is_finite() && value > 0.0 {
                Ok(value)
            } else {
                Err(BuildError::InvalidWeight {
                    what,
                    name: name.to_owned(),
                    value,
                })
            }
        }
        for name in doc.delta_v.keys() {
            if h.vertex_index(name).is_err() {
                return Err(BuildError::UnknownWeightTarget {
                    what: "vertex",
                    name: name.clone(),
                });
            }
        }
        for name in doc.delta_e.keys() {
            if h.edge_index(name).is_none() {
                return Err(BuildError::UnknownWeightTarget {
                    what: "edge",
                    name: name.clone(),
                });
            }
        }
        let vertex = h
            .labels()
            .iter()
            .map(|l| match doc.delta_v.get(l) {
                Some(&w) => check("vertex", l, w),
                None => Err(BuildError::MissingWeight {
                    what: "vertex",
                    name: l.clone(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let edge = h
            .edges()
            .iter()
            .map(|e| match doc.delta_e.get(&e.id) {
                Some(&w) => check("edge", &e.id, w),
                None => Err(BuildError::MissingWeight {
                    what: "edge",
                    name: e.id.clone(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { vertex, edge })
    }

    pub fn from_json_str(h: &Hypergraph, text: &str) -> Result<Self, BuildError> {
        let doc: WeightDoc = serde_json::from_str(text)?;
        Self::from_doc(h, &doc)
    }

    /// All-ones weights.
    pub fn uniform(h: &Hypergraph) -> Self {
        Self {
            vertex: vec![1.0; h.vertex_count()],
            edge: vec![1.0; h.edge_count()],
        }
    }
}

/// A matrix together with the construction that produced it and its row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphMatrix {
    pub kind: MatrixKind,
    pub matrix: CMatrix,
    pub index: Vec<String>,
}

impl HypergraphMatrix {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn build_matrix(
    h: &Hypergraph,
    kind: MatrixKind,
    weights: Option<&WeightFunctions>,
) -> Result<HypergraphMatrix, BuildError> {
    let n = h.vertex_count();
    match (kind.needs_weights(), weights) {
        (true, None) => return Err(BuildError::MissingWeights(kind)),
        (false, Some(_)) => return Err(BuildError::UnexpectedWeights(kind)),
        _ => {}
    }
    if kind.needs_non_singleton_edges() {
        if let Some(e) = h.edges().iter().find(|e| e.len() < 2) {
            return Err(BuildError::SingletonEdge {
                kind,
                edge: e.id.clone(),
            });
        }
    }
    if kind == MatrixKind::Transition {
        if let Some(v) = (0..n).find(|&v| h.star(v).is_empty()) {
            return Err(BuildError::EmptyStar(h.label(v).to_owned()));
        }
    }

    let inv_size_minus_one = |e: usize| 1.0 / (h.edge(e).len() as f64 - 1.0);
    let shared_b = |u: usize, v: usize| -> f64 { h.shared_edges(u, v).map(inv_size_minus_one).sum() };
    let shared_general = |u: usize, v: usize, w: &WeightFunctions| -> f64 {
        let s: f64 = h
            .shared_edges(u, v)
            .map(|e| {
                let size = h.edge(e).len() as f64;
                w.edge[e] / (size * size)
            })
            .sum();
        s / w.vertex[u]
    };

    let matrix = match kind {
        MatrixKind::AdjacencyR => CMatrix::from_fn(n, n, |u, v| {
            if u == v {
                real(0.0)
            } else {
                real(h.common_edges(u, v) as f64)
            }
        }),
        MatrixKind::AdjacencyB => CMatrix::from_fn(n, n, |u, v| if u == v { real(0.0) } else { real(shared_b(u, v)) }),
        MatrixKind::Transition => CMatrix::from_fn(n, n, |u, v| {
            if u == v {
                real(0.0)
            } else {
                real(shared_b(u, v) / h.star(u).len() as f64)
            }
        }),
        MatrixKind::LaplacianR => CMatrix::from_fn(n, n, |u, v| {
            if u == v {
                let degree: usize = (0..n).filter(|&w| w != u).map(|w| h.common_edges(u, w)).sum();
                real(degree as f64)
            } else {
                real(-(h.common_edges(u, v) as f64))
            }
        }),
        MatrixKind::LaplacianB => CMatrix::from_fn(n, n, |u, v| {
            if u == v {
                real(h.star(u).len() as f64)
            } else {
                real(-shared_b(u, v))
            }
        }),
        MatrixKind::SignlessQ => CMatrix::from_fn(n, n, |u, v| {
            if u == v {
                real(h.star(u).len() as f64)
            } else {
                real(shared_b(u, v))
            }
        }),
        MatrixKind::GeneralAdjacency => {
            let w = weights.expect("checked above");
            CMatrix::from_fn(n, n, |u, v| {
                if u == v {
                    real(0.0)
                } else {
                    real(shared_general(u, v, w))
                }
            })
        }
        MatrixKind::GeneralLaplacian => {
            let w = weights.expect("checked above");
            CMatrix::from_fn(n, n, |u, v| {
                if u == v {
                    let s: f64 = h.star(u).iter().map(|&e| w.edge[e] / h.edge(e).len() as f64).sum();
                    real(s / w.vertex[u])
                } else {
                    real(-shared_general(u, v, w))
                }
            })
        }
        MatrixKind::GeneralSignless => {
            let w = weights.expect("checked above");
            CMatrix::from_fn(n, n, |u, v| real(shared_general(u, v, w)))
        }
        MatrixKind::UnitNormalized => {
            let units = crate::hypergraph::compute_units(h);
            let size = |v: usize| units.unit(units.unit_of(v)).len() as f64;
            CMatrix::from_fn(n, n, |u, v| {
                if u == v {
                    real(h.star(u).len() as f64 / size(u))
                } else {
                    real(h.common_edges(u, v) as f64 / size(v))
                }
            })
        }
    };

    Ok(HypergraphMatrix {
        kind,
        matrix,
        index: h.labels().to_vec(),
    })
}

/// Outcome of the row-sum sanity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumReport {
    /// Expected row sum, or `None` when the kind has no row identity.
    pub expected: Option<f64>,
    pub row_sums: Vec<Complex64>,
    /// `(row, deviation)` for every row farther than `1e-12` from `expected`.
    pub violations: Vec<(usize, f64)>,
}

impl RowSumReport {
    pub fn applicable(&self) -> bool {
        self.expected.is_some()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const ROW_SUM_TOL: f64 = 1e-12;

/// Laplacian kinds should have zero row sums and the transition matrix unit
/// row sums. Other kinds report "not applicable" (`expected == None`).
pub fn row_sum_check(m: &HypergraphMatrix) -> RowSumReport {
    let expected = match m.kind {
        MatrixKind::LaplacianR | MatrixKind::LaplacianB | MatrixKind::GeneralLaplacian => Some(0.0),
        MatrixKind::Transition => Some(1.0),
        _ => None,
    };
    let n = m.matrix.rows();
    let row_sums: Vec<Complex64> = (0..n).map(|i| m.matrix.row(i).iter().sum()).collect();
    let violations = match expected {
        Some(target) => row_sums
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s - real(target)).norm()))
            .filter(|&(_, d)| d > ROW_SUM_TOL)
            .collect(),
        None => Vec::new(),
    };
    RowSumReport {
        expected,
        row_sums,
        violations,
    }
}
