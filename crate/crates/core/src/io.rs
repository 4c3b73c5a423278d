//! Output documents and their JSON encoding.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! exactly. Maps are ordered, so identical inputs give byte-identical output.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::builders::{HypergraphMatrix, MatrixKind, RowSumReport};
use crate::dynamics::{SyncViolation, Trajectory};
use crate::hypergraph::{Hypergraph, HypergraphDoc, UnitPartition};
use crate::oracle::Verdict;
use crate::spectral::{BlockSource, Level, SkippedLift, SpectralDecomposition};

/// Compact JSON with `{:.16e}` floats.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes a document, followed by a newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value
        .serialize(&mut ser)
        .expect("documents contain only serializable data");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDoc {
    pub kind: MatrixKind,
    pub order: usize,
    pub index: Vec<String>,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<Complex64>,
    pub row_sums: RowSumDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumDoc {
    /// `"pass"`, `"fail"` or `"not_applicable"`.
    pub status: &'static str,
    pub expected: Option<f64>,
    /// `[row label, deviation]`.
    pub violations: Vec<(String, f64)>,
}

pub fn matrix_doc(m: &HypergraphMatrix, rows: &RowSumReport) -> MatrixDoc {
    MatrixDoc {
        kind: m.kind,
        order: m.order(),
        index: m.index.clone(),
        entries: m.matrix.as_slice().to_vec(),
        row_sums: RowSumDoc {
            status: match (rows.applicable(), rows.passed()) {
                (false, _) => "not_applicable",
                (true, true) => "pass",
                (true, false) => "fail",
            },
            expected: rows.expected,
            violations: rows.violations.iter().map(|&(i, d)| (m.index[i].clone(), d)).collect(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitEntryDoc {
    pub key: String,
    pub members: Vec<String>,
    pub generating_set: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitsDoc {
    pub units: Vec<UnitEntryDoc>,
    pub contraction: HypergraphDoc,
}

pub fn units_doc(h: &Hypergraph, units: &UnitPartition, contraction: &Hypergraph) -> UnitsDoc {
    UnitsDoc {
        units: units
            .units()
            .iter()
            .enumerate()
            .map(|(i, u)| UnitEntryDoc {
                key: units.key(h, i),
                members: u.members.iter().map(|&v| h.label(v).to_owned()).collect(),
                generating_set: u.generating_set.iter().map(|&e| h.edge(e).id.clone()).collect(),
            })
            .collect(),
        contraction: contraction.to_doc(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDoc {
    pub source: BlockSource,
    pub level: Level,
    pub order: usize,
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedDoc {
    pub lambda: Complex64,
    pub vector: Vec<Complex64>,
    pub source: BlockSource,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionDoc {
    pub order: usize,
    pub index: Vec<String>,
    pub blocks: Vec<BlockDoc>,
    pub lifted: Vec<LiftedDoc>,
    pub skipped: Vec<SkippedLift>,
    /// `"pass"` or `"fail"`.
    pub verdict: &'static str,
    pub verification: Verdict,
}

pub fn decomposition_doc(index: &[String], d: &SpectralDecomposition, verdict: &Verdict) -> DecompositionDoc {
    DecompositionDoc {
        order: d.order,
        index: index.to_vec(),
        blocks: d
            .blocks
            .iter()
            .map(|b| BlockDoc {
                source: b.source,
                level: b.level,
                order: b.matrix.rows(),
                eigenvalues: b.eigenvalues.clone(),
            })
            .collect(),
        lifted: d
            .lifted
            .iter()
            .map(|p| LiftedDoc {
                lambda: p.lambda,
                vector: p.vector.clone(),
                source: d.blocks[p.block].source,
            })
            .collect(),
        skipped: d.skipped.clone(),
        verdict: if verdict.passed { "pass" } else { "fail" },
        verification: verdict.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDoc {
    pub steps: usize,
    pub sync_log: Vec<Vec<f64>>,
    pub final_state: Vec<Complex64>,
    pub synchronization: Option<SyncViolation>,
}

pub fn trajectory_doc(t: &Trajectory, violation: Option<SyncViolation>) -> TrajectoryDoc {
    TrajectoryDoc {
        steps: t.steps(),
        sync_log: t.sync_log.clone(),
        final_state: t.final_state().to_vec(),
        synchronization: violation,
    }
}
