#![allow(dead_code)]

use std::path::PathBuf;

use hspec_core::builders::{build_matrix, MatrixKind};
use hspec_core::hypergraph::Hypergraph;
use hspec_core::matrix::CMatrix;
use hspec_core::symmetry::Permutation;
use hspec_core::Complex64;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

pub fn ten_vertex() -> Hypergraph {
    Hypergraph::from_json_str(&fixture("ten_vertex_rotation.json")).unwrap()
}

pub fn ten_vertex_rotation(h: &Hypergraph) -> Permutation {
    Permutation::from_json_str(h, &fixture("ten_vertex_rotation_perm.json")).unwrap()
}

pub fn eighteen_vertex() -> Hypergraph {
    Hypergraph::from_json_str(&fixture("eighteen_units.json")).unwrap()
}

pub fn adjacency_r(h: &Hypergraph) -> CMatrix {
    build_matrix(h, MatrixKind::AdjacencyR, None).unwrap().matrix
}

/// The 10x10 adjacency matrix of the rotation example, as printed.
pub const TEN_VERTEX_ADJACENCY: [[f64; 10]; 10] = [
    [0., 1., 1., 0., 1., 1., 0., 1., 1., 0.],
    [1., 0., 3., 1., 1., 1., 0., 1., 1., 1.],
    [1., 3., 0., 1., 1., 1., 0., 1., 1., 1.],
    [0., 1., 1., 0., 1., 1., 0., 0., 0., 0.],
    [1., 1., 1., 1., 0., 3., 1., 1., 1., 0.],
    [1., 1., 1., 1., 3., 0., 1., 1., 1., 0.],
    [0., 0., 0., 0., 1., 1., 0., 1., 1., 0.],
    [1., 1., 1., 0., 1., 1., 1., 0., 3., 1.],
    [1., 1., 1., 0., 1., 1., 1., 3., 0., 1.],
    [0., 1., 1., 0., 0., 0., 0., 1., 1., 0.],
];

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn reals(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| real(x)).collect()
}

/// Asserts two multisets of complex numbers agree after sorting, within `tol`.
pub fn assert_multiset_eq(got: &[Complex64], want: &[Complex64], tol: f64) {
    assert_eq!(got.len(), want.len(), "sizes differ: {got:?} vs {want:?}");
    let (pairs, lp, lo) = hspec_core::oracle::match_multisets(got, want);
    assert!(lp.is_empty() && lo.is_empty());
    for p in pairs {
        assert!(
            p.distance <= tol,
            "{} vs {} (distance {:e})",
            p.predicted,
            p.oracle,
            p.distance
        );
    }
}

pub fn sqrt105() -> f64 {
    105f64.sqrt()
}
