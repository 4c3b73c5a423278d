//! Unit-compatible matrices, unit eigenvalues and unit-automorphisms.
//!
//! A unit is a maximal set of vertices sharing the same star. A matrix is
//! unit-compatible when, for every pair `u, v` in one unit, rows and columns
//! agree away from `{u, v}`, the diagonal entries agree and `m_uv = m_vu`.
//! Every such matrix has eigenvalue `d - r` on the zero-sum vectors of each
//! unit, and the rest of its spectrum is the spectrum of the unit quotient.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{unit_contraction, Hypergraph, UnitPartition};
use crate::matrix::{normalized, CMatrix, ONE, ZERO};
use crate::spectral::{
    decompose_at_level, BlockSource, Level, LiftedPair, SpectralBlock, SpectralDecomposition, SpectralError,
};
use crate::symmetry::{is_compatible, validate_automorphism, Automorphism, Permutation, SymmetryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitCondition {
    /// `m_uu = m_vv`.
    Diagonal,
    /// `m_uv = m_vu`.
    WithinSymmetry,
    /// `m_uw = m_vw` for `w` outside `{u, v}`.
    Row,
    /// `m_wu = m_wv` for `w` outside `{u, v}`.
    Column,
}

#[derive(Debug, Error)]
pub enum UnitError {
    #[error(
        "matrix is not unit-compatible: {condition:?} condition fails in unit {{{unit_key}}} \
         (u={u}, v={v}{}) by {deviation:e}",
        w.as_ref().map(|w| format!(", w={w}")).unwrap_or_default()
    )]
    NotUnitCompatible {
        unit: usize,
        unit_key: String,
        condition: UnitCondition,
        u: String,
        v: String,
        w: Option<String>,
        deviation: f64,
    },
    #[error("matrix order {got} does not match the {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error("malformed unit map document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("`{0}` is not a unit of the hypergraph")]
    UnknownUnit(String),
    #[error("unit map has no image for unit {{{0}}}")]
    NotTotal(String),
    #[error("unit map is not injective: {{{first}}} and {{{second}}} both map to {{{image}}}")]
    NotInjective {
        first: String,
        second: String,
        image: String,
    },
    #[error("not a unit-automorphism: edge `{edge}` maps onto units {{{image}}}, which cover no edge")]
    NotUnitAutomorphism { edge: String, image: String },
    #[error("unit map is not cardinality preserving: |{{{source_key}}}| = {source_len} but |{{{target_key}}}| = {target_len}")]
    NotCardinalityPreserving {
        source_key: String,
        source_len: usize,
        target_key: String,
        target_len: usize,
    },
    #[error("unit quotient is not compatible with the unit map: {0}")]
    QuotientIncompatible(Box<QuotientWitness>),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Common entries of a unit-compatible matrix on one unit.
/// Two unit-quotient entries that a unit map should make equal but does not.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientWitness {
    pub left_i: String,
    pub left_j: String,
    pub right_i: String,
    pub right_j: String,
    pub left: Complex64,
    pub right: Complex64,
}

impl fmt::Display for QuotientWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "b[{{{}}},{{{}}}] = {} but b[{{{}}},{{{}}}] = {}",
            self.left_i, self.left_j, self.left, self.right_i, self.right_j, self.right
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitProfile {
    /// Common diagonal entry.
    pub d: Complex64,
    /// Common off-diagonal entry inside the unit; absent for singletons.
    pub r: Option<Complex64>,
    /// `(w, m_uw)` for each vertex `w` outside the unit.
    pub s: Vec<(usize, Complex64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitCompatibleProfile {
    pub units: Vec<UnitProfile>,
}

fn check_size(m: &CMatrix, units: &UnitPartition) -> Result<(), UnitError> {
    if !m.is_square() || m.rows() != units.vertex_count() {
        return Err(UnitError::SizeMismatch {
            expected: units.vertex_count(),
            got: m.rows(),
        });
    }
    Ok(())
}

/// Checks the defining conditions pair by pair and records `d`, `r`, `s`.
pub fn profile_unit_compatibility(
    h: &Hypergraph,
    m: &CMatrix,
    units: &UnitPartition,
    tol: f64,
) -> Result<UnitCompatibleProfile, UnitError> {
    check_size(m, units)?;
    let n = m.rows();
    let fail = |unit: usize, condition, u: usize, v: usize, w: Option<usize>, deviation| UnitError::NotUnitCompatible {
        unit,
        unit_key: units.key(h, unit),
        condition,
        u: h.label(u).to_owned(),
        v: h.label(v).to_owned(),
        w: w.map(|w| h.label(w).to_owned()),
        deviation,
    };
    let mut profiles = Vec::with_capacity(units.len());
    for (i, unit) in units.units().iter().enumerate() {
        let members = &unit.members;
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                let dev = (m[(u, u)] - m[(v, v)]).norm();
                if dev > tol {
                    return Err(fail(i, UnitCondition::Diagonal, u, v, None, dev));
                }
                let dev = (m[(u, v)] - m[(v, u)]).norm();
                if dev > tol {
                    return Err(fail(i, UnitCondition::WithinSymmetry, u, v, None, dev));
                }
                for w in (0..n).filter(|&w| w != u && w != v) {
                    let dev = (m[(u, w)] - m[(v, w)]).norm();
                    if dev > tol {
                        return Err(fail(i, UnitCondition::Row, u, v, Some(w), dev));
                    }
                    let dev = (m[(w, u)] - m[(w, v)]).norm();
                    if dev > tol {
                        return Err(fail(i, UnitCondition::Column, u, v, Some(w), dev));
                    }
                }
            }
        }
        let u = members[0];
        profiles.push(UnitProfile {
            d: m[(u, u)],
            r: members.get(1).map(|&v| m[(u, v)]),
            s: (0..n)
                .filter(|&w| units.unit_of(w) != i)
                .map(|w| (w, m[(u, w)]))
                .collect(),
        });
    }
    Ok(UnitCompatibleProfile { units: profiles })
}

/// Unit eigenvalue `d - r` of one unit with its basis `χ_{v_i} - χ_{v_0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitEigenStructure {
    pub unit: usize,
    pub lambda: Complex64,
    /// Full-length vectors, not normalized; `v_0` is the smallest member.
    pub basis: Vec<Vec<Complex64>>,
    /// `|W| - 1`.
    pub multiplicity_floor: usize,
}

/// Unit eigenvalues that coincide (within `1e-9`) across units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedUnitEigenvalue {
    pub lambda: Complex64,
    pub units: Vec<usize>,
    pub multiplicity_floor: usize,
}

pub const UNIT_MERGE_TOL: f64 = 1e-9;

pub fn unit_eigenvalues(
    h: &Hypergraph,
    m: &CMatrix,
    units: &UnitPartition,
    tol: f64,
) -> Result<Vec<UnitEigenStructure>, UnitError> {
    let profile = profile_unit_compatibility(h, m, units, tol)?;
    let n = m.rows();
    Ok(units
        .units()
        .iter()
        .enumerate()
        .filter(|(_, u)| u.len() >= 2)
        .map(|(i, unit)| {
            let p = &profile.units[i];
            let v0 = unit.members[0];
            let basis = unit.members[1..]
                .iter()
                .map(|&vi| {
                    let mut y = vec![ZERO; n];
                    y[vi] = ONE;
                    y[v0] = -ONE;
                    y
                })
                .collect();
            UnitEigenStructure {
                unit: i,
                lambda: p.d - p.r.expect("unit has two members"),
                basis,
                multiplicity_floor: unit.len() - 1,
            }
        })
        .collect())
}

/// Groups unit eigenvalues equal within [`UNIT_MERGE_TOL`], in order of first appearance.
pub fn merge_unit_eigenvalues(entries: &[UnitEigenStructure]) -> Vec<MergedUnitEigenvalue> {
    let mut merged: Vec<MergedUnitEigenvalue> = Vec::new();
    for e in entries {
        match merged
            .iter_mut()
            .find(|m| (m.lambda - e.lambda).norm() <= UNIT_MERGE_TOL)
        {
            Some(m) => {
                m.units.push(e.unit);
                m.multiplicity_floor += e.multiplicity_floor;
            }
            None => merged.push(MergedUnitEigenvalue {
                lambda: e.lambda,
                units: vec![e.unit],
                multiplicity_floor: e.multiplicity_floor,
            }),
        }
    }
    merged
}

/// `b_ii = Σ_{w∈W_i} m_uw`, `b_ij = Σ_{w∈W_j} m_uw` for any `u ∈ W_i`.
pub fn unit_quotient(h: &Hypergraph, m: &CMatrix, units: &UnitPartition, tol: f64) -> Result<CMatrix, UnitError> {
    profile_unit_compatibility(h, m, units, tol)?;
    let k = units.len();
    Ok(CMatrix::from_fn(k, k, |i, j| {
        let u = units.unit(i).members[0];
        units.unit(j).members.iter().map(|&w| m[(u, w)]).sum()
    }))
}

/// `ȳ(v) = y(unit of v)`.
pub fn blow_up(y: &[Complex64], units: &UnitPartition) -> Result<Vec<Complex64>, UnitError> {
    if y.len() != units.len() {
        return Err(UnitError::SizeMismatch {
            expected: units.len(),
            got: y.len(),
        });
    }
    Ok((0..units.vertex_count()).map(|v| y[units.unit_of(v)]).collect())
}

/// A bijection on units that maps edges (as unions of units) onto edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitAutomorphism {
    /// Permutation of unit indices.
    pub unit_map: Permutation,
    pub induced_edge_map: Vec<usize>,
    pub cardinality_preserving: bool,
}

/// `{"unit_map": {unit key: unit key}}`; keys are member labels joined by `,`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitMapDoc {
    pub unit_map: BTreeMap<String, String>,
}

/// Resolves a unit map document into a permutation of unit indices.
pub fn parse_unit_map(h: &Hypergraph, units: &UnitPartition, doc: &UnitMapDoc) -> Result<Permutation, UnitError> {
    let k = units.len();
    let mut images = vec![usize::MAX; k];
    let mut preimage: Vec<Option<usize>> = vec![None; k];
    for (src, dst) in &doc.unit_map {
        let s = units
            .find_by_key(h, src)
            .ok_or_else(|| UnitError::UnknownUnit(src.clone()))?;
        let d = units
            .find_by_key(h, dst)
            .ok_or_else(|| UnitError::UnknownUnit(dst.clone()))?;
        if let Some(prev) = preimage[d] {
            return Err(UnitError::NotInjective {
                first: units.key(h, prev),
                second: units.key(h, s),
                image: units.key(h, d),
            });
        }
        preimage[d] = Some(s);
        images[s] = d;
    }
    if let Some(u) = images.iter().position(|&i| i == usize::MAX) {
        return Err(UnitError::NotTotal(units.key(h, u)));
    }
    Ok(Permutation::from_images(images)?)
}

pub fn unit_map_from_json_str(h: &Hypergraph, units: &UnitPartition, text: &str) -> Result<Permutation, UnitError> {
    let doc: UnitMapDoc = serde_json::from_str(text)?;
    parse_unit_map(h, units, &doc)
}

pub fn unit_map_to_doc(h: &Hypergraph, units: &UnitPartition, map: &Permutation) -> UnitMapDoc {
    UnitMapDoc {
        unit_map: (0..units.len())
            .map(|i| (units.key(h, i), units.key(h, map.apply(i))))
            .collect(),
    }
}

pub fn validate_unit_automorphism(
    h: &Hypergraph,
    units: &UnitPartition,
    map: &Permutation,
) -> Result<UnitAutomorphism, UnitError> {
    if map.len() != units.len() {
        return Err(UnitError::SizeMismatch {
            expected: units.len(),
            got: map.len(),
        });
    }
    let contracted = unit_contraction(h, units).contracted;
    let mut induced_edge_map = Vec::with_capacity(contracted.edge_count());
    for e in contracted.edges() {
        let mut image: Vec<usize> = e.members.iter().map(|&u| map.apply(u)).collect();
        image.sort_unstable();
        match contracted.find_edge(&image) {
            Some(target) => induced_edge_map.push(target),
            None => {
                return Err(UnitError::NotUnitAutomorphism {
                    edge: e.id.clone(),
                    image: image.iter().map(|&u| units.key(h, u)).collect::<Vec<_>>().join("} {"),
                })
            }
        }
    }
    let cardinality_preserving = (0..units.len()).all(|i| units.unit(i).len() == units.unit(map.apply(i)).len());
    Ok(UnitAutomorphism {
        unit_map: map.clone(),
        induced_edge_map,
        cardinality_preserving,
    })
}

/// The unit map `W ↦ unit of f(v)` for any `v ∈ W`.
pub fn induced_unit_automorphism(h: &Hypergraph, f: &Automorphism, units: &UnitPartition) -> UnitAutomorphism {
    let images = (0..units.len())
        .map(|i| units.unit_of(f.perm.apply(units.unit(i).members[0])))
        .collect();
    let map = Permutation::from_images(images).expect("automorphisms permute units");
    validate_unit_automorphism(h, units, &map).expect("automorphisms induce unit-automorphisms")
}

/// Lifts a cardinality-preserving unit map to a vertex automorphism sending
/// the k-th smallest member of each unit to the k-th smallest member of its image.
pub fn lift_cardinality_preserving(
    h: &Hypergraph,
    ua: &UnitAutomorphism,
    units: &UnitPartition,
) -> Result<Automorphism, UnitError> {
    let mut images = vec![0; h.vertex_count()];
    for i in 0..units.len() {
        let j = ua.unit_map.apply(i);
        let (src, dst) = (units.unit(i), units.unit(j));
        if src.len() != dst.len() {
            return Err(UnitError::NotCardinalityPreserving {
                source_key: units.key(h, i),
                source_len: src.len(),
                target_key: units.key(h, j),
                target_len: dst.len(),
            });
        }
        for (&a, &b) in src.members.iter().zip(&dst.members) {
            images[a] = b;
        }
    }
    let perm = Permutation::from_images(images)?;
    Ok(validate_automorphism(h, &perm)?)
}

/// `((i, j), (f(i), f(j)), b_ij, b_f(i)f(j))` in unit indices.
pub type UnitWitness = ((usize, usize), (usize, usize), Complex64, Complex64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitCompatibilityReport {
    pub compatible: bool,
    pub max_deviation: f64,
    /// First row-major `(i, j)` with `b_ij ≠ b_{f(i) f(j)}`, and the two entries.
    pub witness: Option<UnitWitness>,
}

/// Whether the unit quotient of `m` is compatible with the unit map.
pub fn is_unit_automorphism_compatible(
    h: &Hypergraph,
    m: &CMatrix,
    ua: &UnitAutomorphism,
    units: &UnitPartition,
    tol: f64,
) -> Result<UnitCompatibilityReport, UnitError> {
    let q = unit_quotient(h, m, units, tol)?;
    let report = is_compatible(&q, &ua.unit_map, tol)?;
    let f = &ua.unit_map;
    Ok(UnitCompatibilityReport {
        compatible: report.compatible,
        max_deviation: report.max_deviation,
        witness: report
            .witness
            .map(|(i, j)| ((i, j), (f.apply(i), f.apply(j)), q[(i, j)], q[(f.apply(i), f.apply(j))])),
    })
}

/// Unit eigenvalues plus the decomposition of the unit quotient under the
/// unit map, with quotient-level eigenvectors blown up to vertex level.
pub fn decompose_unit_automorphism(
    h: &Hypergraph,
    m: &CMatrix,
    ua: &UnitAutomorphism,
    units: &UnitPartition,
    tol: f64,
) -> Result<SpectralDecomposition, UnitError> {
    let report = is_unit_automorphism_compatible(h, m, ua, units, tol)?;
    if let Some(((i, j), (fi, fj), left, right)) = report.witness {
        return Err(UnitError::QuotientIncompatible(Box::new(QuotientWitness {
            left_i: units.key(h, i),
            left_j: units.key(h, j),
            right_i: units.key(h, fi),
            right_j: units.key(h, fj),
            left,
            right,
        })));
    }
    let unit_eigen = unit_eigenvalues(h, m, units, tol)?;
    let q = unit_quotient(h, m, units, tol)?;
    let inner = decompose_at_level(&q, &ua.unit_map, tol, Level::Unit)?;

    let mut blocks: Vec<SpectralBlock> = Vec::new();
    let mut lifted: Vec<LiftedPair> = Vec::new();
    for e in &unit_eigen {
        let b = blocks.len();
        blocks.push(SpectralBlock {
            source: BlockSource::UnitSubspace { unit: e.unit },
            level: Level::Vertex,
            matrix: CMatrix::from_fn(e.multiplicity_floor, e.multiplicity_floor, |r, c| {
                if r == c {
                    e.lambda
                } else {
                    ZERO
                }
            }),
            eigenvalues: vec![e.lambda; e.multiplicity_floor],
            eigenvectors: e.basis.clone(),
            defective: Vec::new(),
        });
        lifted.extend(e.basis.iter().map(|y| LiftedPair {
            lambda: e.lambda,
            vector: normalized(y),
            block: b,
        }));
    }
    let offset = blocks.len();
    blocks.extend(inner.blocks);
    for p in inner.lifted {
        lifted.push(LiftedPair {
            lambda: p.lambda,
            vector: normalized(&blow_up(&p.vector, units)?),
            block: p.block + offset,
        });
    }
    let skipped = inner
        .skipped
        .into_iter()
        .map(|mut s| {
            s.block += offset;
            s
        })
        .collect();
    Ok(SpectralDecomposition {
        order: m.rows(),
        blocks,
        lifted,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_matrix, MatrixKind};
    use crate::hypergraph::compute_units;

    fn edge(id: &str, members: &[&str]) -> (String, Vec<String>) {
        (id.into(), members.iter().map(|s| s.to_string()).collect())
    }

    fn small() -> Hypergraph {
        // Units {a,b}, {c}, {d,e}.
        Hypergraph::new(
            ["a", "b", "c", "d", "e"],
            [edge("x", &["a", "b", "c"]), edge("y", &["c", "d", "e"])],
        )
        .unwrap()
    }

    #[test]
    fn identity_matrix_profile() {
        let h = small();
        let units = compute_units(&h);
        let p = profile_unit_compatibility(&h, &CMatrix::identity(5), &units, 1e-12).unwrap();
        assert_eq!(p.units[0].d, ONE);
        assert_eq!(p.units[0].r, Some(ZERO));
        assert_eq!(p.units[1].r, None);
    }

    #[test]
    fn broken_diagonal_is_named() {
        let h = small();
        let units = compute_units(&h);
        let mut m = CMatrix::identity(5);
        m[(1, 1)] = Complex64::new(2.0, 0.0);
        let err = profile_unit_compatibility(&h, &m, &units, 1e-12).unwrap_err();
        assert!(matches!(
            err,
            UnitError::NotUnitCompatible { condition: UnitCondition::Diagonal, ref unit_key, .. } if unit_key == "a,b"
        ));
    }

    #[test]
    fn blow_up_of_an_indicator() {
        let h = small();
        let units = compute_units(&h);
        let y = blow_up(&[ZERO, ZERO, ONE], &units).unwrap();
        assert_eq!(y, vec![ZERO, ZERO, ZERO, ONE, ONE]);
        assert!(blow_up(&[ONE], &units).is_err());
    }

    #[test]
    fn swap_of_equal_units_lifts() {
        let h = small();
        let units = compute_units(&h);
        let map = Permutation::from_images(vec![2, 1, 0]).unwrap();
        let ua = validate_unit_automorphism(&h, &units, &map).unwrap();
        assert!(ua.cardinality_preserving);
        assert_eq!(ua.induced_edge_map, vec![1, 0]);
        let f = lift_cardinality_preserving(&h, &ua, &units).unwrap();
        assert_eq!(f.perm.images(), &[3, 4, 2, 0, 1]);
        let m = build_matrix(&h, MatrixKind::AdjacencyR, None).unwrap().matrix;
        let d = decompose_unit_automorphism(&h, &m, &ua, &units, 1e-9).unwrap();
        assert_eq!(d.eigenvalue_count(), 5);
        assert_eq!(d.lifted.len(), 5);
    }

    #[test]
    fn unit_map_document_round_trip() {
        let h = small();
        let units = compute_units(&h);
        let text = r#"{"unit_map": {"a,b": "d,e", "c": "c", "e, d": "b,a"}}"#;
        let map = unit_map_from_json_str(&h, &units, text).unwrap();
        assert_eq!(map.images(), &[2, 1, 0]);
        let doc = unit_map_to_doc(&h, &units, &map);
        assert_eq!(parse_unit_map(&h, &units, &doc).unwrap(), map);
        assert!(matches!(
            unit_map_from_json_str(&h, &units, r#"{"unit_map": {"a": "a"}}"#),
            Err(UnitError::UnknownUnit(_))
        ));
        assert!(matches!(
            unit_map_from_json_str(&h, &units, r#"{"unit_map": {"a,b": "a,b"}}"#),
            Err(UnitError::NotTotal(_))
        ));
    }
}
