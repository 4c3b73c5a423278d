//! Documents that only the command line emits.

use std::collections::BTreeMap;

use hspec_core::builders::MatrixKind;
use hspec_core::oracle::Verdict;
use hspec_core::Complex64;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RotationFactorDoc {
    pub order: usize,
    pub u0: Vec<String>,
    pub invariant_set: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CompatibilityDoc {
    pub kind: MatrixKind,
    pub compatible: bool,
    pub max_deviation: f64,
    /// Row and column labels of the first offending entry and of its image.
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Serialize)]
pub struct WitnessDoc {
    pub entry: (String, String),
    pub image: (String, String),
    pub left: Complex64,
    pub right: Complex64,
}

#[derive(Debug, Serialize)]
pub struct AutomorphismDoc {
    pub mode: &'static str,
    pub order: usize,
    pub cycles: Vec<Vec<String>>,
    pub edge_map: BTreeMap<String, String>,
    pub orbits: Vec<Vec<String>>,
    pub rotation_factors: Vec<RotationFactorDoc>,
    /// When true every rotation factor is a power of the automorphism.
    pub coprime_cycle_lengths: bool,
    pub compatibility: Option<CompatibilityDoc>,
}

#[derive(Debug, Serialize)]
pub struct UnitAutomorphismDoc {
    pub mode: &'static str,
    pub unit_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
    pub cardinality_preserving: bool,
    /// The vertex automorphism obtained by lifting, when the map preserves unit sizes.
    pub lifted: Option<BTreeMap<String, String>>,
    pub compatibility: Option<CompatibilityDoc>,
}

#[derive(Debug, Serialize)]
pub struct VerifyDoc {
    pub verdict: &'static str,
    pub blocks: usize,
    pub lifted: usize,
    pub skipped: usize,
    pub verification: Verdict,
}

#[derive(Debug, Default, Serialize)]
pub struct SelftestSummary {
    pub max_commutation: f64,
    pub max_spectrum_distance: f64,
    pub max_radius_gap: f64,
    pub max_conjugate_gap: f64,
    pub max_sync_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct SelftestFailure {
    pub instance: usize,
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SelftestDoc {
    pub seed: u64,
    pub instances: usize,
    pub max_vertices: usize,
    pub tol: f64,
    /// Distinct moved-cycle length lists seen across the instances.
    pub cycle_types: Vec<Vec<usize>>,
    pub summary: SelftestSummary,
    pub failures: Vec<SelftestFailure>,
    pub verdict: &'static str,
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}
