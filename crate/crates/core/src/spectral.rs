//! ω-rotation blocks, orbit quotients and assembly of the full spectrum.
//!
//! For an automorphism `f` with rotation factors `f_1, …, f_k` of orders
//! `l_1, …, l_k`, the spectrum of a compatible `M` is the union of the
//! spectra of the `ω`-rotation matrices `M^ω(f_i, U_0^(i))` over every
//! non-trivial `l_i`-th root `ω`, together with the spectrum of the orbit
//! quotient `[M/O_f]`. Each block eigenvector lifts to an eigenvector of `M`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{self, EigenError};
use crate::matrix::{normalized, CMatrix, ONE, ZERO};
use crate::oracle::{self, OracleError};
use crate::symmetry::{
    is_compatible, orbit_quotient, rotation_decomposition, OrbitPartition, Permutation, Rotation, SymmetryError,
    DEFAULT_COMPAT_TOL,
};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("roots of unity need n >= 1")]
    InvalidRootOrder,
    #[error("root of unity has order {omega} but the rotation has order {rotation}")]
    OrderMismatch { rotation: usize, omega: usize },
    #[error(
        "matrix is not compatible with {what}: |m[{u},{v}] - m[f({u}),f({v})]| = {deviation:e} \
         ({left} vs {right})"
    )]
    Incompatible {
        what: String,
        u: usize,
        v: usize,
        left: Complex64,
        right: Complex64,
        deviation: f64,
    },
    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("block sizes add up to {got}, expected {expected}")]
    CountMismatch { expected: usize, got: usize },
}

/// `exp(2πik/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootOfUnity {
    pub n: usize,
    pub k: usize,
    pub value: Complex64,
}

impl RootOfUnity {
    /// Computed from the exact angle; quarter turns are exact.
    pub fn new(n: usize, k: usize) -> Result<Self, SpectralError> {
        if n == 0 {
            return Err(SpectralError::InvalidRootOrder);
        }
        let k = k % n;
        let value = if k == 0 {
            ONE
        } else if 2 * k == n {
            Complex64::new(-1.0, 0.0)
        } else if 4 * k == n {
            Complex64::new(0.0, 1.0)
        } else if 4 * k == 3 * n {
            Complex64::new(0.0, -1.0)
        } else {
            let theta = 2.0 * PI * k as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        };
        Ok(Self { n, k, value })
    }

    /// `ω^i`, again from the exact angle.
    pub fn pow(&self, i: usize) -> Complex64 {
        Self::new(self.n, (self.k * (i % self.n)) % self.n)
            .expect("n >= 1")
            .value
    }
}

pub fn roots_of_unity(n: usize) -> Result<Vec<RootOfUnity>, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidRootOrder);
    }
    (0..n).map(|k| RootOfUnity::new(n, k)).collect()
}

fn incompatibility(m: &CMatrix, perm: &Permutation, tol: f64, what: String) -> Result<(), SpectralError> {
    let report = is_compatible(m, perm, tol)?;
    match report.witness {
        None => Ok(()),
        Some((u, v)) => Err(SpectralError::Incompatible {
            what,
            u,
            v,
            left: m[(u, v)],
            right: m[(perm.apply(u), perm.apply(v))],
            deviation: (m[(u, v)] - m[(perm.apply(u), perm.apply(v))]).norm(),
        }),
    }
}

fn rotation_matrix_unchecked(m: &CMatrix, rot: &Rotation, omega: &RootOfUnity) -> CMatrix {
    let size = rot.cycle_count();
    let powers: Vec<Complex64> = (0..rot.order).map(|i| omega.pow(i)).collect();
    CMatrix::from_fn(size, size, |a, b| {
        let u = rot.components[0][a];
        (0..rot.order).map(|i| powers[i] * m[(u, rot.components[i][b])]).sum()
    })
}

/// `r_uv = Σ_i ω^i m_{u, f^i(v)}` for `u, v ∈ U_0`, in `U_0` order.
///
/// `M` must be compatible with the rotation within `tol` (absolute).
pub fn rotation_matrix(m: &CMatrix, rot: &Rotation, omega: &RootOfUnity, tol: f64) -> Result<CMatrix, SpectralError> {
    if omega.n != rot.order {
        return Err(SpectralError::OrderMismatch {
            rotation: rot.order,
            omega: omega.n,
        });
    }
    incompatibility(m, &rot.perm, tol, format!("the order-{} rotation", rot.order))?;
    Ok(rotation_matrix_unchecked(m, rot, omega))
}

/// `x_ω(v) = ω^i x[k]` for `v = U_i[k]`, zero on the invariant set.
pub fn lift_rotation_vector(
    x: &[Complex64],
    rot: &Rotation,
    omega: &RootOfUnity,
) -> Result<Vec<Complex64>, SpectralError> {
    if x.len() != rot.cycle_count() {
        return Err(SpectralError::LengthMismatch {
            expected: rot.cycle_count(),
            got: x.len(),
        });
    }
    let mut out = vec![ZERO; rot.perm.len()];
    for (i, component) in rot.components.iter().enumerate() {
        let w = omega.pow(i);
        for (k, &v) in component.iter().enumerate() {
            out[v] = w * x[k];
        }
    }
    Ok(out)
}

/// Spreads a value per cell to every member of the cell.
pub fn lift_orbit_vector(y: &[Complex64], orbits: &OrbitPartition) -> Result<Vec<Complex64>, SpectralError> {
    if y.len() != orbits.len() {
        return Err(SpectralError::LengthMismatch {
            expected: orbits.len(),
            got: y.len(),
        });
    }
    Ok((0..orbits.vertex_count()).map(|v| y[orbits.orbit_of(v)]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Vertex,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockSource {
    /// `M^ω(f_factor, U_0)` with `ω = exp(2πi·omega_k/order)`.
    Rotation {
        factor: usize,
        order: usize,
        omega_k: usize,
    },
    OrbitQuotient,
    /// Eigenvalue `d - r` of a unit with at least two members.
    UnitSubspace {
        unit: usize,
    },
}

#[derive(Debug, Clone)]
pub struct SpectralBlock {
    pub source: BlockSource,
    pub level: Level,
    pub matrix: CMatrix,
    pub eigenvalues: Vec<Complex64>,
    /// Block-level eigenvectors, parallel to `eigenvalues`.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// Indices into `eigenvalues` that belong to defective clusters.
    pub defective: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LiftedPair {
    pub lambda: Complex64,
    /// Unit norm, indexed by the vertices of the full matrix.
    pub vector: Vec<Complex64>,
    /// Index into `SpectralDecomposition::blocks`.
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedLift {
    pub block: usize,
    pub eigenvalue: Complex64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Order of the full matrix.
    pub order: usize,
    /// Rotation blocks sorted by factor then root index, then the quotient.
    pub blocks: Vec<SpectralBlock>,
    pub lifted: Vec<LiftedPair>,
    pub skipped: Vec<SkippedLift>,
}

impl SpectralDecomposition {
    /// All block eigenvalues, sorted.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut all: Vec<Complex64> = self.blocks.iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
        crate::matrix::sort_complex(&mut all);
        all
    }

    pub fn lifted_pairs(&self) -> Vec<(Complex64, Vec<Complex64>)> {
        self.lifted.iter().map(|p| (p.lambda, p.vector.clone())).collect()
    }

    pub fn eigenvalue_count(&self) -> usize {
        self.blocks.iter().map(|b| b.eigenvalues.len()).sum()
    }

    /// Largest multiset distance between the spectra of the `ω^k` and
    /// `ω^{n-k}` blocks of each rotation factor. Zero for symmetric `M`.
    pub fn conjugate_block_gap(&self) -> f64 {
        let rotation = |b: &SpectralBlock| match b.source {
            BlockSource::Rotation { factor, order, omega_k } => Some((factor, order, omega_k)),
            _ => None,
        };
        let mut worst: f64 = 0.0;
        for a in &self.blocks {
            let Some((factor, order, k)) = rotation(a) else {
                continue;
            };
            let partner = self
                .blocks
                .iter()
                .find(|b| rotation(b) == Some((factor, order, order - k)))
                .expect("every non-trivial root has its conjugate");
            let (pairs, _, _) = oracle::match_multisets(&a.eigenvalues, &partner.eigenvalues);
            worst = pairs.iter().map(|p| p.distance).fold(worst, f64::max);
        }
        worst
    }
}

fn solve_block(source: BlockSource, level: Level, matrix: CMatrix) -> Result<SpectralBlock, SpectralError> {
    let r = eigen::eigen(&matrix)?;
    let defective = (0..r.values.len()).filter(|&i| r.is_defective(i)).collect();
    Ok(SpectralBlock {
        source,
        level,
        matrix,
        eigenvalues: r.values,
        eigenvectors: r.vectors,
        defective,
    })
}

/// Lifts every non-defective eigenvector of `blocks[offset..]` with `lift`
/// and appends the results to `lifted` / `skipped`.
fn lift_blocks(
    blocks: &[SpectralBlock],
    offset: usize,
    lifted: &mut Vec<LiftedPair>,
    skipped: &mut Vec<SkippedLift>,
    lift: impl Fn(&SpectralBlock, &[Complex64]) -> Result<Vec<Complex64>, SpectralError>,
) -> Result<(), SpectralError> {
    for (b, block) in blocks.iter().enumerate().skip(offset) {
        for (i, (&lambda, x)) in block.eigenvalues.iter().zip(&block.eigenvectors).enumerate() {
            if block.defective.contains(&i) {
                skipped.push(SkippedLift {
                    block: b,
                    eigenvalue: lambda,
                    reason: "eigenvalue belongs to a defective cluster of its block".into(),
                });
                continue;
            }
            lifted.push(LiftedPair {
                lambda,
                vector: normalized(&lift(block, x)?),
                block: b,
            });
        }
    }
    Ok(())
}

/// Decomposes the spectrum of `m` with respect to a permutation `f` it is
/// compatible with. `f` may be the identity, in which case the only block is
/// the orbit quotient, which is `m` itself.
///
/// Every rotation factor of `f` must itself be compatible with `m`. That is
/// automatic when the distinct cycle lengths of `f` are pairwise coprime
/// (each factor is then a power of `f`) but can fail otherwise; such inputs
/// are rejected with [`SpectralError::Incompatible`].
pub fn decompose_automorphism(m: &CMatrix, f: &Permutation) -> Result<SpectralDecomposition, SpectralError> {
    decompose_automorphism_with_tol(m, f, DEFAULT_COMPAT_TOL)
}

pub fn decompose_automorphism_with_tol(
    m: &CMatrix,
    f: &Permutation,
    tol: f64,
) -> Result<SpectralDecomposition, SpectralError> {
    decompose_at_level(m, f, tol, Level::Vertex)
}

pub(crate) fn decompose_at_level(
    m: &CMatrix,
    f: &Permutation,
    tol: f64,
    level: Level,
) -> Result<SpectralDecomposition, SpectralError> {
    if !m.is_square() {
        return Err(SymmetryError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let n = m.rows();
    if f.len() != n {
        return Err(SymmetryError::SizeMismatch {
            expected: n,
            got: f.len(),
        }
        .into());
    }
    incompatibility(m, f, tol, "the automorphism".into())?;
    let decomposition = rotation_decomposition(f);
    for (i, rot) in decomposition.factors.iter().enumerate() {
        incompatibility(m, &rot.perm, tol, format!("rotation factor {i} (order {})", rot.order))?;
    }
    let orbits = OrbitPartition::of(f);

    let count: usize = decomposition
        .factors
        .iter()
        .map(|r| (r.order - 1) * r.cycle_count())
        .sum::<usize>()
        + orbits.len();
    if count != n {
        return Err(SpectralError::CountMismatch {
            expected: n,
            got: count,
        });
    }

    let mut jobs: Vec<(BlockSource, usize, RootOfUnity)> = Vec::new();
    for (i, rot) in decomposition.factors.iter().enumerate() {
        for k in 1..rot.order {
            jobs.push((
                BlockSource::Rotation {
                    factor: i,
                    order: rot.order,
                    omega_k: k,
                },
                i,
                RootOfUnity::new(rot.order, k)?,
            ));
        }
    }
    let quotient = orbit_quotient(m, &orbits)?;
    let mut blocks: Vec<SpectralBlock> = jobs
        .par_iter()
        .map(|(source, factor, omega)| {
            let rot = &decomposition.factors[*factor];
            solve_block(*source, level, rotation_matrix_unchecked(m, rot, omega))
        })
        .collect::<Result<_, _>>()?;
    blocks.push(solve_block(BlockSource::OrbitQuotient, level, quotient)?);

    let mut lifted = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    lift_blocks(&blocks, 0, &mut lifted, &mut skipped, |block, x| match block.source {
        BlockSource::Rotation { factor, order, omega_k } => {
            let omega = RootOfUnity::new(order, omega_k)?;
            lift_rotation_vector(x, &decomposition.factors[factor], &omega)
        }
        _ => lift_orbit_vector(x, &orbits),
    })?;

    Ok(SpectralDecomposition {
        order: n,
        blocks,
        lifted,
        skipped,
    })
}

/// Decomposition with respect to a single rotation.
pub fn decompose_rotation(m: &CMatrix, rot: &Rotation) -> Result<SpectralDecomposition, SpectralError> {
    decompose_automorphism(m, &rot.perm)
}

/// Returns `(ρ(M), ρ([M/O_f]))`.
///
/// The two agree whenever `M` is entrywise non-negative (Perron-Frobenius
/// applied to the orbit-averaged Perron vector). For matrices with negative
/// or complex entries the quotient radius can be strictly smaller.
pub fn spectral_radius_via_quotient(m: &CMatrix, f: &Permutation) -> Result<(f64, f64), SpectralError> {
    incompatibility(m, f, DEFAULT_COMPAT_TOL, "the automorphism".into())?;
    let full = oracle::dense_eigenvalues(m)?;
    let quotient = orbit_quotient(m, &OrbitPartition::of(f))?;
    let q = eigen::eigenvalues(&quotient)?;
    let radius = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((radius(&full), radius(&q)))
}
