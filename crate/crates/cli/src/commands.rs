use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{Context, Result};
use hspec_core::builders::{build_matrix, row_sum_check, HypergraphMatrix, MatrixKind, WeightFunctions};
use hspec_core::dynamics::{check_orbit_synchronization, initial_state_from_json_str, iterate};
use hspec_core::generators::{random_compatible_matrix, random_instance, random_matrix, rng_from_seed, MatrixFlavor};
use hspec_core::hypergraph::{compute_units, unit_contraction, Hypergraph, UnitPartition};
use hspec_core::io::{decomposition_doc, matrix_doc, to_json_string, trajectory_doc, units_doc};
use hspec_core::matrix::CMatrix;
use hspec_core::oracle::verify_decomposition;
use hspec_core::spectral::{decompose_automorphism_with_tol, spectral_radius_via_quotient, SpectralDecomposition};
use hspec_core::symmetry::{
    check_commutation, is_compatible, is_equitable, rotation_decomposition, validate_automorphism, Automorphism,
    OrbitPartition, Permutation,
};
use hspec_core::unit_symmetry::{
    decompose_unit_automorphism, is_unit_automorphism_compatible, lift_cardinality_preserving, unit_map_from_json_str,
    unit_map_to_doc, validate_unit_automorphism, UnitAutomorphism,
};
use hspec_core::Complex64;

use crate::report::{
    verdict, AutomorphismDoc, CompatibilityDoc, RotationFactorDoc, SelftestDoc, SelftestFailure, SelftestSummary,
    UnitAutomorphismDoc, VerifyDoc, WitnessDoc,
};
use crate::{MatrixArgs, Mode, Outcome, SymmetryJob};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph> {
    Hypergraph::from_json_str(&read(path)?).with_context(|| path.display().to_string())
}

fn load_matrix(h: &Hypergraph, kind: MatrixKind, weights: Option<&Path>) -> Result<HypergraphMatrix> {
    let weights = match weights {
        Some(path) => {
            Some(WeightFunctions::from_json_str(h, &read(path)?).with_context(|| path.display().to_string())?)
        }
        None => None,
    };
    build_matrix(h, kind, weights.as_ref()).with_context(|| format!("building {kind}"))
}

fn load_automorphism(h: &Hypergraph, path: &Path) -> Result<Automorphism> {
    let perm = Permutation::from_json_str(h, &read(path)?).with_context(|| path.display().to_string())?;
    validate_automorphism(h, &perm).with_context(|| path.display().to_string())
}

fn load_unit_automorphism(h: &Hypergraph, units: &UnitPartition, path: &Path) -> Result<UnitAutomorphism> {
    let map = unit_map_from_json_str(h, units, &read(path)?).with_context(|| path.display().to_string())?;
    validate_unit_automorphism(h, units, &map).with_context(|| path.display().to_string())
}

fn labels(h: &Hypergraph, vertices: &[usize]) -> Vec<String> {
    vertices.iter().map(|&v| h.label(v).to_owned()).collect()
}

fn edge_map_doc(h: &Hypergraph, edge_map: &[usize]) -> BTreeMap<String, String> {
    edge_map
        .iter()
        .enumerate()
        .map(|(e, &img)| (h.edge(e).id.clone(), h.edge(img).id.clone()))
        .collect()
}

fn output<T: serde::Serialize>(doc: &T, passed: bool) -> Outcome {
    Outcome {
        document: to_json_string(doc),
        passed,
    }
}

pub fn units(path: &Path) -> Result<Outcome> {
    let h = load_hypergraph(path)?;
    let units = compute_units(&h);
    let contraction = unit_contraction(&h, &units);
    Ok(output(&units_doc(&h, &units, &contraction.contracted), true))
}

pub fn matrix(args: &MatrixArgs, check_row_sums: bool) -> Result<Outcome> {
    let h = load_hypergraph(&args.hypergraph)?;
    let m = load_matrix(&h, args.kind, args.weights.as_deref())?;
    let rows = row_sum_check(&m);
    Ok(output(&matrix_doc(&m, &rows), !check_row_sums || rows.passed()))
}

fn compatibility_doc(
    h_rows: &[String],
    kind: MatrixKind,
    m: &CMatrix,
    perm: &Permutation,
    tol: f64,
) -> Result<CompatibilityDoc> {
    let report = is_compatible(m, perm, tol)?;
    Ok(CompatibilityDoc {
        kind,
        compatible: report.compatible,
        max_deviation: report.max_deviation,
        witness: report.witness.map(|(u, v)| {
            let (fu, fv) = (perm.apply(u), perm.apply(v));
            WitnessDoc {
                entry: (h_rows[u].clone(), h_rows[v].clone()),
                image: (h_rows[fu].clone(), h_rows[fv].clone()),
                left: m[(u, v)],
                right: m[(fu, fv)],
            }
        }),
    })
}

pub fn validate_symmetry(
    hypergraph: &Path,
    symmetry: &Path,
    mode: Mode,
    kind: Option<MatrixKind>,
    weights: Option<&Path>,
    tol: f64,
) -> Result<Outcome> {
    let h = load_hypergraph(hypergraph)?;
    let matrix = kind.map(|k| load_matrix(&h, k, weights)).transpose()?;
    match mode {
        Mode::Automorphism => {
            let f = load_automorphism(&h, symmetry)?;
            let compatibility = matrix
                .as_ref()
                .map(|m| compatibility_doc(h.labels(), m.kind, &m.matrix, &f.perm, tol))
                .transpose()?;
            let decomposition = rotation_decomposition(&f.perm);
            let doc = AutomorphismDoc {
                mode: "automorphism",
                order: f.order,
                cycles: f
                    .perm
                    .cycles()
                    .iter()
                    .filter(|c| c.len() > 1)
                    .map(|c| labels(&h, c))
                    .collect(),
                edge_map: edge_map_doc(&h, &f.edge_map),
                orbits: OrbitPartition::of(&f.perm)
                    .orbits()
                    .iter()
                    .map(|o| labels(&h, o))
                    .collect(),
                rotation_factors: decomposition
                    .factors
                    .iter()
                    .map(|r| RotationFactorDoc {
                        order: r.order,
                        u0: labels(&h, r.u0()),
                        invariant_set: labels(&h, &r.invariant_set),
                    })
                    .collect(),
                coprime_cycle_lengths: f.perm.cycle_lengths_pairwise_coprime(),
                compatibility,
            };
            let passed = doc.compatibility.as_ref().is_none_or(|c| c.compatible);
            Ok(output(&doc, passed))
        }
        Mode::Unit => {
            let units = compute_units(&h);
            let ua = load_unit_automorphism(&h, &units, symmetry)?;
            let lifted = lift_cardinality_preserving(&h, &ua, &units).ok().map(|a| {
                (0..h.vertex_count())
                    .map(|v| (h.label(v).to_owned(), h.label(a.perm.apply(v)).to_owned()))
                    .collect()
            });
            let compatibility = match &matrix {
                Some(m) => {
                    let report = is_unit_automorphism_compatible(&h, &m.matrix, &ua, &units, tol)?;
                    Some(CompatibilityDoc {
                        kind: m.kind,
                        compatible: report.compatible,
                        max_deviation: report.max_deviation,
                        witness: report.witness.map(|((i, j), (fi, fj), left, right)| WitnessDoc {
                            entry: (units.key(&h, i), units.key(&h, j)),
                            image: (units.key(&h, fi), units.key(&h, fj)),
                            left,
                            right,
                        }),
                    })
                }
                None => None,
            };
            let doc = UnitAutomorphismDoc {
                mode: "unit",
                unit_map: unit_map_to_doc(&h, &units, &ua.unit_map).unit_map,
                edge_map: edge_map_doc(&h, &ua.induced_edge_map),
                cardinality_preserving: ua.cardinality_preserving,
                lifted,
                compatibility,
            };
            let passed = doc.compatibility.as_ref().is_none_or(|c| c.compatible);
            Ok(output(&doc, passed))
        }
    }
}

fn decompose_job(job: &SymmetryJob) -> Result<(Hypergraph, HypergraphMatrix, SpectralDecomposition)> {
    let h = load_hypergraph(&job.matrix.hypergraph)?;
    let m = load_matrix(&h, job.matrix.kind, job.matrix.weights.as_deref())?;
    let tol = job.compat.compat_tol;
    let d = match job.mode {
        Mode::Automorphism => {
            let f = load_automorphism(&h, &job.symmetry)?;
            decompose_automorphism_with_tol(&m.matrix, &f.perm, tol).context("decomposing")?
        }
        Mode::Unit => {
            let units = compute_units(&h);
            let ua = load_unit_automorphism(&h, &units, &job.symmetry)?;
            decompose_unit_automorphism(&h, &m.matrix, &ua, &units, tol).context("decomposing")?
        }
    };
    Ok((h, m, d))
}

pub fn decompose(job: &SymmetryJob, verdict_only: bool) -> Result<Outcome> {
    let (_, m, d) = decompose_job(job)?;
    let v = verify_decomposition(&m.matrix, &d, job.tol).context("verifying")?;
    let passed = v.passed;
    if verdict_only {
        let doc = VerifyDoc {
            verdict: verdict(passed),
            blocks: d.blocks.len(),
            lifted: d.lifted.len(),
            skipped: d.skipped.len(),
            verification: v,
        };
        Ok(output(&doc, passed))
    } else {
        Ok(output(&decomposition_doc(&m.index, &d, &v), passed))
    }
}

pub fn dynamics(
    args: &MatrixArgs,
    symmetry: &Path,
    x0: &Path,
    steps: usize,
    normalize: bool,
    tol: f64,
) -> Result<Outcome> {
    let h = load_hypergraph(&args.hypergraph)?;
    let m = load_matrix(&h, args.kind, args.weights.as_deref())?;
    let f = load_automorphism(&h, symmetry)?;
    let x0 = initial_state_from_json_str(&h, &read(x0)?).with_context(|| x0.display().to_string())?;
    let compat = is_compatible(&m.matrix, &f.perm, hspec_core::symmetry::DEFAULT_COMPAT_TOL)?;
    if !compat.compatible {
        eprintln!(
            "warning: {} is not compatible with the automorphism (deviation {:e}); synchronization is not expected",
            m.kind, compat.max_deviation
        );
    }
    let orbits = OrbitPartition::of(&f.perm);
    let t = iterate(&m.matrix, &x0, steps, &orbits, normalize)?;
    let violation = check_orbit_synchronization(&t, &orbits, tol);
    let passed = violation.is_none();
    Ok(output(&trajectory_doc(&t, violation), passed))
}

const SELFTEST_STEPS: usize = 25;
const SELFTEST_SYNC_TOL: f64 = 1e-10;

pub fn selftest(seed: u64, instances: usize, max_vertices: usize, tol: f64) -> Outcome {
    let mut rng = rng_from_seed(seed);
    let mut summary = SelftestSummary::default();
    let mut failures = Vec::new();
    let mut cycle_types = BTreeSet::new();
    for instance in 0..instances {
        let mut fail = |check: &'static str, detail: String| {
            failures.push(SelftestFailure {
                instance,
                check,
                detail,
            });
        };
        let inst = random_instance(&mut rng, max_vertices);
        let f = &inst.perm;
        cycle_types.insert(f.moved_cycle_lengths());
        let orbits = OrbitPartition::of(f);

        let m = random_compatible_matrix(&mut rng, f, MatrixFlavor::Complex);
        let commutation = check_commutation(&m, f).unwrap_or(f64::INFINITY);
        summary.max_commutation = summary.max_commutation.max(commutation);
        if commutation > 1e-12 {
            fail("commutation", format!("{commutation:e}"));
        }
        match is_equitable(&m, &orbits, 1e-12) {
            Ok(r) if r.equitable => {}
            other => fail("equitable", format!("{other:?}")),
        }
        match decompose_automorphism_with_tol(&m, f, hspec_core::symmetry::DEFAULT_COMPAT_TOL)
            .map_err(|e| e.to_string())
            .and_then(|d| verify_decomposition(&m, &d, tol).map_err(|e| e.to_string()))
        {
            Ok(v) => {
                summary.max_spectrum_distance = summary.max_spectrum_distance.max(v.max_match_distance);
                if !v.passed {
                    fail("spectrum", format!("max match distance {:e}", v.max_match_distance));
                }
            }
            Err(e) => fail("spectrum", e),
        }

        let nonneg = random_compatible_matrix(&mut rng, f, MatrixFlavor::Nonnegative);
        match spectral_radius_via_quotient(&nonneg, f) {
            Ok((full, quotient)) => {
                let gap = (full - quotient).abs();
                summary.max_radius_gap = summary.max_radius_gap.max(gap);
                if gap > tol {
                    fail("radius", format!("{full} vs {quotient}"));
                }
            }
            Err(e) => fail("radius", e.to_string()),
        }

        for kind in MatrixKind::ALL.into_iter().filter(|k| k.is_symmetric_kind()) {
            let Ok(sym) = build_matrix(&inst.hypergraph, kind, None) else {
                continue;
            };
            match decompose_automorphism_with_tol(&sym.matrix, f, hspec_core::symmetry::DEFAULT_COMPAT_TOL) {
                Ok(d) => {
                    let gap = d.conjugate_block_gap();
                    summary.max_conjugate_gap = summary.max_conjugate_gap.max(gap);
                    if gap > tol * sym.matrix.norm_inf().max(1.0) {
                        fail("conjugate_blocks", format!("{kind}: {gap:e}"));
                    }
                }
                Err(e) => fail("conjugate_blocks", format!("{kind}: {e}")),
            }
        }

        let per_orbit = random_matrix(&mut rng, orbits.len(), MatrixFlavor::Complex);
        let x0: Vec<Complex64> = (0..m.rows()).map(|v| per_orbit[(orbits.orbit_of(v), 0)]).collect();
        match iterate(&m, &x0, SELFTEST_STEPS, &orbits, false) {
            Ok(t) => {
                for (k, devs) in t.sync_log.iter().enumerate() {
                    let threshold = SELFTEST_SYNC_TOL * t.scales[k].max(1.0);
                    let ratio = devs.iter().fold(0.0, |w: f64, d| w.max(d / threshold));
                    summary.max_sync_ratio = summary.max_sync_ratio.max(ratio);
                }
                if let Some(v) = check_orbit_synchronization(&t, &orbits, SELFTEST_SYNC_TOL) {
                    fail("synchronization", format!("step {}, orbit {}", v.step, v.orbit));
                }
            }
            Err(e) => fail("synchronization", e.to_string()),
        }
    }
    let passed = failures.is_empty();
    let doc = SelftestDoc {
        seed,
        instances,
        max_vertices,
        tol,
        cycle_types: cycle_types.into_iter().collect(),
        summary,
        failures,
        verdict: verdict(passed),
    };
    output(&doc, passed)
}
