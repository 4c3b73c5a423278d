//! End-to-end checks on the two hand-worked hypergraphs: the 10-vertex
//! hypergraph with an order-3 rotation and the 18-vertex hypergraph with
//! eight non-trivial units.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use hspec_core::builders::{build_matrix, MatrixKind};
use hspec_core::eigen;
use hspec_core::hypergraph::{compute_units, unit_contraction, Hypergraph};
use hspec_core::matrix::{residual, CMatrix, ONE, ZERO};
use hspec_core::oracle::{dense_eigenvalues, dense_spectrum, verify_decomposition, verify_spectrum};
use hspec_core::spectral::{
    decompose_automorphism, decompose_rotation, lift_orbit_vector, lift_rotation_vector, rotation_matrix,
    spectral_radius_via_quotient, BlockSource, RootOfUnity, SpectralError,
};
use hspec_core::symmetry::{
    check_commutation, is_compatible, is_equitable, orbit_quotient, permutation_matrix, rotation_decomposition,
    simple_eigenvalue_bound, validate_automorphism, OrbitPartition, Permutation, Rotation, SymmetryError,
};
use hspec_core::unit_symmetry::{
    blow_up, decompose_unit_automorphism, induced_unit_automorphism, is_unit_automorphism_compatible,
    lift_cardinality_preserving, merge_unit_eigenvalues, unit_eigenvalues, unit_map_from_json_str, unit_quotient,
    validate_unit_automorphism, UnitError,
};
use hspec_core::Complex64;

/// Vertex index of numeric label `k` (labels 1..n sort numerically).
fn ix(k: usize) -> usize {
    k - 1
}

#[test]
fn adjacency_matches_the_printed_matrix() {
    let h = ten_vertex();
    assert_eq!(adjacency_r(&h), CMatrix::from_real_rows(&TEN_VERTEX_ADJACENCY));
}

#[test]
fn rotation_validates_with_order_three() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let aut = validate_automorphism(&h, &f).unwrap();
    assert_eq!(aut.order, 3);

    let id = validate_automorphism(&h, &Permutation::identity(10)).unwrap();
    assert_eq!(id.order, 1);
    assert_eq!(id.edge_map, (0..6).collect::<Vec<_>>());
}

#[test]
fn swapping_one_and_two_is_not_an_automorphism() {
    let h = ten_vertex();
    let swap = Permutation::from_cycles(10, &[&[ix(1), ix(2)]]).unwrap();
    match validate_automorphism(&h, &swap) {
        Err(SymmetryError::NotAutomorphism { edge, image }) => {
            assert_eq!(edge, "e");
            assert_eq!(image, "2,8,9");
        }
        other => panic!("expected a witness edge, got {other:?}"),
    }
    let m = adjacency_r(&h);
    let report = is_compatible(&m, &swap, 1e-9).unwrap();
    assert!(!report.compatible);
    // Entry (1,3) is 1 but entry (2,3) is 3.
    assert_eq!(m[(ix(1), ix(3))], real(1.0));
    assert_eq!(m[(ix(2), ix(3))], real(3.0));
    assert!(report.max_deviation >= 2.0);
}

#[test]
fn permutation_matrix_pulls_back() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let p = permutation_matrix(&f);
    let x: Vec<Complex64> = (1..=10).map(|k| real(k as f64)).collect();
    let y = p.matvec(&x);
    assert_eq!(y[ix(2)], x[ix(5)]);
    assert_eq!(p.matmul(&p).matmul(&p), CMatrix::identity(10));
    assert_eq!(permutation_matrix(&Permutation::identity(4)), CMatrix::identity(4));
}

#[test]
fn adjacency_is_compatible_and_commutes() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let m = adjacency_r(&h);
    assert!(is_compatible(&m, &f, 0.0).unwrap().compatible);
    assert_eq!(check_commutation(&m, &f).unwrap(), 0.0);
    assert!(is_compatible(&CMatrix::zeros(10, 10), &f, 0.0).unwrap().compatible);
}

#[test]
fn orbits_and_equitability() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let orbits = OrbitPartition::of(&f);
    let expected: Vec<Vec<usize>> = vec![vec![0], vec![1, 4, 7], vec![2, 5, 8], vec![3, 6, 9]];
    assert_eq!(orbits.orbits(), expected.as_slice());

    let m = adjacency_r(&h);
    assert!(is_equitable(&m, &orbits, 1e-9).unwrap().equitable);
    let singletons = OrbitPartition::of(&Permutation::identity(10));
    assert!(is_equitable(&m, &singletons, 1e-9).unwrap().equitable);
    let coarse = OrbitPartition::from_cells(10, vec![vec![0, 1], (2..10).collect()]).unwrap();
    let report = is_equitable(&m, &coarse, 1e-9).unwrap();
    assert!(!report.equitable);
    let row_sum = |u: usize| -> f64 { (2..10).map(|v| m[(u, v)].re).sum() };
    assert_eq!((row_sum(ix(1)), row_sum(ix(2))), (5.0, 9.0));
}

#[test]
fn orbit_quotient_and_its_spectrum() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let m = adjacency_r(&h);
    let q = orbit_quotient(&m, &OrbitPartition::of(&f)).unwrap();
    assert_eq!(
        q,
        CMatrix::from_real_rows(&[[0., 3., 3., 0.], [1., 2., 5., 2.], [1., 5., 2., 2.], [0., 2., 2., 0.]])
    );
    let s = sqrt105();
    assert_multiset_eq(
        &dense_eigenvalues(&q).unwrap(),
        &reals(&[-3.0, 0.0, (7.0 - s) / 2.0, (7.0 + s) / 2.0]),
        1e-9,
    );
    let identity_quotient = orbit_quotient(&m, &OrbitPartition::of(&Permutation::identity(10))).unwrap();
    assert_eq!(identity_quotient, m);
}

#[test]
fn rotation_structure() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let d = rotation_decomposition(&f);
    assert_eq!(d.factors.len(), 1);
    let rot = &d.factors[0];
    assert_eq!(rot.order, 3);
    assert_eq!(rot.u0(), &[ix(2), ix(3), ix(4)]);
    assert_eq!(rot.invariant_set, vec![ix(1)]);
    assert_eq!(d.global_fixed, vec![ix(1)]);
    assert_eq!(simple_eigenvalue_bound(rot, true), Some(4));

    let id = rotation_decomposition(&Permutation::identity(10));
    assert!(id.factors.is_empty());
    assert_eq!(id.global_fixed, (0..10).collect::<Vec<_>>());

    // (a b)(c d)(e f g) on seven points.
    let p = Permutation::from_cycles(7, &[&[0, 1], &[2, 3], &[4, 5, 6]]).unwrap();
    let d = rotation_decomposition(&p);
    assert_eq!(d.factors[0].order, 2);
    assert_eq!(d.factors[0].u0(), &[0, 2]);
    assert_eq!(d.factors[1].order, 3);
    assert_eq!(d.factors[1].u0(), &[4]);

    let even = Rotation::from_permutation(&Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()).unwrap();
    assert_eq!(simple_eigenvalue_bound(&even, true), Some(2));
    let four = Rotation::from_permutation(&Permutation::from_cycles(7, &[&[0, 1, 2, 3]]).unwrap()).unwrap();
    assert_eq!(simple_eigenvalue_bound(&four, true), Some(5));
}

fn ten_vertex_rotation_factor() -> (CMatrix, Rotation) {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    (adjacency_r(&h), Rotation::from_permutation(&f).unwrap())
}

#[test]
fn rotation_block_is_a_polynomial_in_omega() {
    let (m, rot) = ten_vertex_rotation_factor();
    let a0 = CMatrix::from_real_rows(&[[0., 3., 1.], [3., 0., 1.], [1., 1., 0.]]);
    let a1 = CMatrix::from_real_rows(&[[1., 1., 0.], [1., 1., 0.], [1., 1., 0.]]);
    let a2 = CMatrix::from_real_rows(&[[1., 1., 1.], [1., 1., 1.], [0., 0., 0.]]);
    for k in 0..3 {
        let w = RootOfUnity::new(3, k).unwrap();
        let expected = CMatrix::from_fn(3, 3, |i, j| {
            a0[(i, j)] + w.value * a1[(i, j)] + w.value * w.value * a2[(i, j)]
        });
        let block = rotation_matrix(&m, &rot, &w, 1e-9).unwrap();
        assert!(block.max_abs_diff(&expected) < 1e-14, "k = {k}");
    }
    let trivial = rotation_matrix(&m, &rot, &RootOfUnity::new(3, 0).unwrap(), 1e-9).unwrap();
    assert_eq!(
        trivial,
        CMatrix::from_real_rows(&[[2., 5., 2.], [5., 2., 2.], [2., 2., 0.]])
    );
    let zero = rotation_matrix(&CMatrix::zeros(10, 10), &rot, &RootOfUnity::new(3, 1).unwrap(), 1e-9).unwrap();
    assert_eq!(zero, CMatrix::zeros(3, 3));
}

#[test]
fn nontrivial_blocks_have_spectrum_minus_three_minus_one_two() {
    let (m, rot) = ten_vertex_rotation_factor();
    for k in 1..3 {
        let w = RootOfUnity::new(3, k).unwrap();
        let block = rotation_matrix(&m, &rot, &w, 1e-9).unwrap();
        assert_multiset_eq(&eigen::eigenvalues(&block).unwrap(), &reals(&[-3.0, -1.0, 2.0]), 1e-9);
    }
}

#[test]
fn trivial_block_has_eight_which_is_not_in_the_spectrum() {
    let (m, rot) = ten_vertex_rotation_factor();
    let block = rotation_matrix(&m, &rot, &RootOfUnity::new(3, 0).unwrap(), 1e-9).unwrap();
    assert_multiset_eq(&dense_eigenvalues(&block).unwrap(), &reals(&[-3.0, -1.0, 8.0]), 1e-9);
    let full = dense_eigenvalues(&m).unwrap();
    assert!(full.iter().all(|z| (z - real(8.0)).norm() > 0.5));
}

#[test]
fn lifted_rotation_vector_is_an_eigenvector() {
    let (m, rot) = ten_vertex_rotation_factor();
    let w = RootOfUnity::new(3, 1).unwrap();
    let block = rotation_matrix(&m, &rot, &w, 1e-9).unwrap();
    let x = reals(&[-1.0, 1.0, 0.0]);
    assert!(residual(&block, real(-3.0), &x) < 1e-12);
    let lifted = lift_rotation_vector(&x, &rot, &w).unwrap();
    assert_eq!(lifted[ix(1)], ZERO);
    assert_eq!(lifted[ix(2)], -ONE);
    assert_eq!(lifted[ix(3)], ONE);
    assert!(residual(&m, real(-3.0), &lifted) < 1e-12);
    assert_eq!(lift_rotation_vector(&[ZERO; 3], &rot, &w).unwrap(), vec![ZERO; 10]);
}

#[test]
fn lifted_orbit_vector() {
    let h = ten_vertex();
    let f = ten_vertex_rotation(&h);
    let orbits = OrbitPartition::of(&f);
    let m = adjacency_r(&h);
    let y = reals(&[-2.0, 0.0, 0.0, 1.0]);
    let x = lift_orbit_vector(&y, &orbits).unwrap();
    assert_eq!(x, reals(&[-2., 0., 0., 1., 0., 0., 1., 0., 0., 1.]));
    // (-2, 0, 0, 1) is the quotient eigenvector for 0; (0, -1, 1, 0) is the one for -3.
    assert!(residual(&m, ZERO, &x) < 1e-12);
    let x2 = lift_orbit_vector(&reals(&[0.0, -1.0, 1.0, 0.0]), &orbits).unwrap();
    assert!(residual(&m, real(-3.0), &x2) < 1e-12);
    for sign in [-1.0, 1.0] {
        let c = 7.0 / 8.0 + sign * sqrt105() / 8.0;
        let y = reals(&[1.5, c, c, 1.0]);
        let lambda = real(3.5 + sign * sqrt105() / 2.0);
        assert!(residual(&m, lambda, &lift_orbit_vector(&y, &orbits).unwrap()) < 1e-12);
    }
    assert_eq!(lift_orbit_vector(&[ONE; 4], &orbits).unwrap(), vec![ONE; 10]);
}

#[test]
fn full_decomposition_of_the_rotation() {
    let (m, rot) = ten_vertex_rotation_factor();
    let d = decompose_rotation(&m, &rot).unwrap();
    assert_eq!(d.blocks.len(), 3);
    assert_eq!(d.lifted.len(), 10);
    assert!(d.skipped.is_empty());
    let s = sqrt105();
    assert_multiset_eq(
        &d.eigenvalues(),
        &reals(&[-3., -1., 2., -3., -1., 2., -3., 0., (7. - s) / 2., (7. + s) / 2.]),
        1e-9,
    );
    let verdict = verify_decomposition(&m, &d, 1e-8).unwrap();
    assert!(verdict.passed, "{verdict:?}");
    assert!(verdict.oracle_eigenvalues.iter().all(|z| (z - real(8.0)).norm() > 0.5));

    let mut perturbed = d.eigenvalues();
    perturbed[4] += 1e-3;
    let bad = verify_spectrum(&m, &perturbed, &[], 1e-8).unwrap();
    assert!(!bad.passed);
    assert_eq!(bad.mismatches.len(), 1);

    let auto = decompose_automorphism(&m, &rot.perm).unwrap();
    assert_eq!(auto.eigenvalues(), d.eigenvalues());
}

#[test]
fn lifted_vectors_from_distinct_families_are_orthogonal() {
    let (m, rot) = ten_vertex_rotation_factor();
    let d = decompose_rotation(&m, &rot).unwrap();
    for (a, p) in d.lifted.iter().enumerate() {
        for q in &d.lifted[a + 1..] {
            if d.blocks[p.block].source != d.blocks[q.block].source {
                let ip: Complex64 = p.vector.iter().zip(&q.vector).map(|(x, y)| x * y.conj()).sum();
                assert!(ip.norm() < 1e-8);
            }
        }
    }
}

#[test]
fn spectral_radius_through_the_quotient() {
    let (m, rot) = ten_vertex_rotation_factor();
    let (full, quotient) = spectral_radius_via_quotient(&m, &rot.perm).unwrap();
    let rho = (7.0 + sqrt105()) / 2.0;
    assert_abs_diff_eq!(full, rho, epsilon = 1e-9);
    assert_abs_diff_eq!(quotient, rho, epsilon = 1e-9);
    assert_abs_diff_eq!(rho, 8.6235, epsilon = 1e-4);
}

#[test]
fn zero_and_identity_cases() {
    let (_, rot) = ten_vertex_rotation_factor();
    let zero = CMatrix::zeros(10, 10);
    let d = decompose_rotation(&zero, &rot).unwrap();
    assert_eq!(d.lifted.len(), 10);
    assert!(d.eigenvalues().iter().all(|z| z.norm() == 0.0));
    assert!(verify_decomposition(&zero, &d, 1e-8).unwrap().passed);

    let h = ten_vertex();
    let m = adjacency_r(&h);
    let id = decompose_automorphism(&m, &Permutation::identity(10)).unwrap();
    assert_eq!(id.blocks.len(), 1);
    assert_eq!(id.blocks[0].source, BlockSource::OrbitQuotient);
    assert!(verify_decomposition(&m, &id, 1e-8).unwrap().passed);
}

#[test]
fn factors_that_are_not_powers_of_f_are_rejected() {
    // f = (a b)(c d e g) preserves {ac, bd, ae, bg}, but its order-2 factor
    // (a b) alone does not, so the adjacency matrix is incompatible with it.
    let h = Hypergraph::new(
        ["a", "b", "c", "d", "e", "g"],
        [
            ("ac", ["a", "c"]),
            ("bd", ["b", "d"]),
            ("ae", ["a", "e"]),
            ("bg", ["b", "g"]),
        ]
        .map(|(id, m)| (id.to_string(), m.iter().map(|s| s.to_string()).collect())),
    )
    .unwrap();
    let f = Permutation::from_cycles(6, &[&[0, 1], &[2, 3, 4, 5]]).unwrap();
    validate_automorphism(&h, &f).unwrap();
    assert!(!f.cycle_lengths_pairwise_coprime());
    let m = adjacency_r(&h);
    match decompose_automorphism(&m, &f) {
        Err(SpectralError::Incompatible { what, .. }) => assert!(what.contains("factor 0"), "{what}"),
        other => panic!(
            "expected an incompatibility error, got {:?}",
            other.map(|d| d.eigenvalues())
        ),
    }
}

#[test]
fn units_of_the_ten_vertex_example() {
    let h = ten_vertex();
    let units = compute_units(&h);
    let keys: Vec<String> = (0..units.len()).map(|i| units.key(&h, i)).collect();
    assert_eq!(keys, ["1", "2,3", "4", "5,6", "7", "8,9", "10"]);
    let m = adjacency_r(&h);
    let entries = unit_eigenvalues(&h, &m, &units, 1e-9).unwrap();
    assert_eq!(entries.len(), 3);
    for e in &entries {
        assert_eq!(e.lambda, real(-3.0));
        assert_eq!(e.multiplicity_floor, 1);
        assert!(residual(&m, e.lambda, &e.basis[0]) < 1e-12);
    }
    let mut chi = vec![ZERO; 10];
    chi[ix(3)] = ONE;
    chi[ix(2)] = -ONE;
    assert_eq!(entries[0].basis[0], chi);
    let merged = merge_unit_eigenvalues(&entries);
    assert_eq!(merged.len(), 1);
    assert_eq!(merged[0].multiplicity_floor, 3);
}

#[test]
fn induced_unit_map_of_the_rotation() {
    let h = ten_vertex();
    let units = compute_units(&h);
    let aut = validate_automorphism(&h, &ten_vertex_rotation(&h)).unwrap();
    let ua = induced_unit_automorphism(&h, &aut, &units);
    assert!(ua.cardinality_preserving);
    let unit = |key: &str| units.find_by_key(&h, key).unwrap();
    assert_eq!(ua.unit_map.apply(unit("2,3")), unit("5,6"));
    assert_eq!(ua.unit_map.apply(unit("5,6")), unit("8,9"));
    assert_eq!(ua.unit_map.apply(unit("8,9")), unit("2,3"));
    let back = lift_cardinality_preserving(&h, &ua, &units).unwrap();
    assert_eq!(OrbitPartition::of(&back.perm), OrbitPartition::of(&aut.perm));

    let id = validate_unit_automorphism(&h, &units, &Permutation::identity(units.len())).unwrap();
    assert_eq!(
        lift_cardinality_preserving(&h, &id, &units).unwrap().perm,
        Permutation::identity(10)
    );
}

#[test]
fn unit_eigenvalues_of_the_eighteen_vertex_example() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    assert_eq!(units.len(), 8);
    let m = adjacency_r(&h);
    let entries = unit_eigenvalues(&h, &m, &units, 1e-9).unwrap();
    let lambdas: Vec<f64> = entries.iter().map(|e| e.lambda.re).collect();
    let floors: Vec<usize> = entries.iter().map(|e| e.multiplicity_floor).collect();
    assert_eq!(lambdas, [-5., -3., -1., -1., -1., -2., -2., -2.]);
    assert_eq!(floors, [1, 1, 2, 1, 1, 2, 1, 1]);
    for e in &entries {
        for y in &e.basis {
            assert!(residual(&m, e.lambda, y) <= 1e-8);
            let members = &units.unit(e.unit).members;
            assert_eq!(members.iter().map(|&v| y[v]).sum::<Complex64>(), ZERO);
            assert!((0..18).filter(|v| !members.contains(v)).all(|v| y[v] == ZERO));
        }
    }
    let merged = merge_unit_eigenvalues(&entries);
    let minus_one = merged.iter().find(|m| m.lambda == real(-1.0)).unwrap();
    assert_eq!(minus_one.multiplicity_floor, 4);
}

#[test]
fn unit_quotient_and_contraction_of_the_eighteen_vertex_example() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    let m = adjacency_r(&h);
    let q = unit_quotient(&h, &m, &units, 1e-9).unwrap();
    let unit = |key: &str| units.find_by_key(&h, key).unwrap();
    assert_eq!(q[(unit("1,2"), unit("5,6,15"))], real(3.0));
    assert_eq!(q[(unit("1,2"), unit("7,8"))], real(2.0));

    let eigs = eigen::eigen(&q).unwrap();
    for (l, y) in eigs.values.iter().zip(&eigs.vectors) {
        assert!(residual(&m, *l, &blow_up(y, &units).unwrap()) <= 1e-8);
    }

    let c = unit_contraction(&h, &units);
    assert_eq!(c.contracted.vertex_count(), 8);
    assert_eq!(c.contracted.edge_count(), 7);
    let e1 = c.contracted.edge(c.contracted.edge_index("e1").unwrap());
    let covered: Vec<&str> = e1.members.iter().map(|&u| c.contracted.label(u)).collect();
    assert_eq!(covered, ["1,2", "3,4", "9,10"]);
}

#[test]
fn the_three_cycle_on_units_is_a_unit_automorphism_only() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    let map = unit_map_from_json_str(&h, &units, &fixture("eighteen_units_map.json")).unwrap();
    let ua = validate_unit_automorphism(&h, &units, &map).unwrap();
    let image_ids: Vec<&str> = ua.induced_edge_map.iter().map(|&e| h.edge(e).id.as_str()).collect();
    assert_eq!(image_ids, ["e3", "e1", "e2", "e5", "e4", "e7", "e6"]);
    assert!(!ua.cardinality_preserving);
    assert!(matches!(
        lift_cardinality_preserving(&h, &ua, &units),
        Err(UnitError::NotCardinalityPreserving {
            source_len: 3,
            target_len: 2,
            ..
        })
    ));

    let m = adjacency_r(&h);
    let report = is_unit_automorphism_compatible(&h, &m, &ua, &units, 1e-9).unwrap();
    assert!(!report.compatible);
    let (_, _, left, right) = report.witness.unwrap();
    assert_eq!((left, right), (real(3.0), real(2.0)));
    assert!(matches!(
        decompose_unit_automorphism(&h, &m, &ua, &units, 1e-9),
        Err(UnitError::QuotientIncompatible(_))
    ));
}

#[test]
fn swapping_two_fixed_units_is_rejected() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    let text = r#"{"unit_map": {"1,2": "17,18", "17,18": "1,2", "3,4": "3,4", "5,6,15": "5,6,15",
        "7,8": "7,8", "9,10": "9,10", "11,12,16": "11,12,16", "13,14": "13,14"}}"#;
    let map = unit_map_from_json_str(&h, &units, text).unwrap();
    assert!(matches!(
        validate_unit_automorphism(&h, &units, &map),
        Err(UnitError::NotUnitAutomorphism { ref edge, .. }) if edge == "e1"
    ));
}

#[test]
fn unit_normalized_matrix_decomposes_under_the_unit_map() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    let map = unit_map_from_json_str(&h, &units, &fixture("eighteen_units_map.json")).unwrap();
    let ua = validate_unit_automorphism(&h, &units, &map).unwrap();
    let m = build_matrix(&h, MatrixKind::UnitNormalized, None).unwrap().matrix;
    let report = is_unit_automorphism_compatible(&h, &m, &ua, &units, 1e-9).unwrap();
    assert!(report.compatible);

    let d = decompose_unit_automorphism(&h, &m, &ua, &units, 1e-9).unwrap();
    let unit_level: usize = d
        .blocks
        .iter()
        .filter(|b| matches!(b.source, BlockSource::UnitSubspace { .. }))
        .map(|b| b.eigenvalues.len())
        .sum();
    assert_eq!(unit_level, 10);
    assert_eq!(d.eigenvalue_count() - unit_level, 8);
    assert_eq!(d.lifted.len(), 18);
    let verdict = verify_decomposition(&m, &d, 1e-8).unwrap();
    assert!(verdict.passed, "{verdict:?}");

    // Unit vectors are orthogonal to every blown-up quotient vector.
    for p in d
        .lifted
        .iter()
        .filter(|p| matches!(d.blocks[p.block].source, BlockSource::UnitSubspace { .. }))
    {
        for q in d
            .lifted
            .iter()
            .filter(|q| !matches!(d.blocks[q.block].source, BlockSource::UnitSubspace { .. }))
        {
            let ip: Complex64 = p.vector.iter().zip(&q.vector).map(|(x, y)| x * y.conj()).sum();
            assert!(ip.norm() <= 1e-12);
        }
    }
}

#[test]
fn identity_unit_map_gives_unit_eigenvalues_plus_quotient_spectrum() {
    let h = eighteen_vertex();
    let units = compute_units(&h);
    let m = adjacency_r(&h);
    let ua = validate_unit_automorphism(&h, &units, &Permutation::identity(8)).unwrap();
    assert!(
        is_unit_automorphism_compatible(&h, &m, &ua, &units, 1e-9)
            .unwrap()
            .compatible
    );
    let d = decompose_unit_automorphism(&h, &m, &ua, &units, 1e-9).unwrap();
    assert_eq!(d.blocks.len(), 8 + 1);
    assert!(verify_decomposition(&m, &d, 1e-8).unwrap().passed);
    assert_eq!(dense_spectrum(&m).unwrap().eigenvalues.len(), 18);
}
