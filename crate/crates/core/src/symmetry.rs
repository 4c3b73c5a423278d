//! Vertex permutations, automorphisms, orbits and rotation structure.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::matrix::{CMatrix, ONE};

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("malformed permutation document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("permutation mentions unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("permutation has no image for vertex `{0}`")]
    NotTotal(String),
    #[error("permutation is not injective: `{first}` and `{second}` both map to `{image}`")]
    NotInjective {
        first: String,
        second: String,
        image: String,
    },
    #[error("image list is not a permutation of 0..{0}")]
    InvalidImages(usize),
    #[error("permutation acts on {got} points but the matrix has order {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("edge `{edge}` maps to {{{image}}}, which is not an edge")]
    NotAutomorphism { edge: String, image: String },
    #[error("permutation is not a rotation: moved cycles have lengths {0:?}")]
    NotARotation(Vec<usize>),
    #[error("the identity has no rotation structure")]
    Trivial,
    #[error("cells do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error(
        "partition is not equitable: rows {first} and {second} of cell {cell} differ by {deviation:e} \
         in their sums over cell {target}"
    )]
    NotEquitable {
        cell: usize,
        target: usize,
        first: usize,
        second: usize,
        deviation: f64,
    },
    #[error("matrix is {rows}x{cols}; a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A permutation of `0..n`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

/// Label-level permutation document: `{"map": {label: label}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationDoc {
    pub map: BTreeMap<String, String>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(SymmetryError::InvalidImages(n));
            }
        }
        Ok(Self { images })
    }

    /// Builds a permutation from disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, SymmetryError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || std::mem::replace(&mut touched[a], true) {
                    return Err(SymmetryError::InvalidImages(n));
                }
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    pub fn from_doc(h: &Hypergraph, doc: &PermutationDoc) -> Result<Self, SymmetryError> {
        let n = h.vertex_count();
        let mut images = vec![usize::MAX; n];
        let mut preimage: Vec<Option<usize>> = vec![None; n];
        for (src, dst) in &doc.map {
            let s = h
                .vertex_index(src)
                .map_err(|_| SymmetryError::UnknownVertex(src.clone()))?;
            let d = h
                .vertex_index(dst)
                .map_err(|_| SymmetryError::UnknownVertex(dst.clone()))?;
            if let Some(prev) = preimage[d] {
                return Err(SymmetryError::NotInjective {
                    first: h.label(prev).to_owned(),
                    second: src.clone(),
                    image: dst.clone(),
                });
            }
            preimage[d] = Some(s);
            images[s] = d;
        }
        if let Some(v) = images.iter().position(|&i| i == usize::MAX) {
            return Err(SymmetryError::NotTotal(h.label(v).to_owned()));
        }
        Ok(Self { images })
    }

    pub fn from_json_str(h: &Hypergraph, text: &str) -> Result<Self, SymmetryError> {
        let doc: PermutationDoc = serde_json::from_str(text)?;
        Self::from_doc(h, &doc)
    }

    pub fn to_doc(&self, h: &Hypergraph) -> PermutationDoc {
        PermutationDoc {
            map: self
                .images
                .iter()
                .enumerate()
                .map(|(s, &d)| (h.label(s).to_owned(), h.label(d).to_owned()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut result = Permutation::identity(self.len());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        result
    }

    /// All cycles including fixed points, each starting at its smallest
    /// element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().map(Vec::len).fold(1, lcm)
    }

    /// Distinct lengths of the non-trivial cycles, ascending.
    pub fn moved_cycle_lengths(&self) -> Vec<usize> {
        self.cycles()
            .iter()
            .map(Vec::len)
            .filter(|&l| l > 1)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// True when the distinct non-trivial cycle lengths are pairwise coprime.
    pub fn cycle_lengths_pairwise_coprime(&self) -> bool {
        let lengths = self.moved_cycle_lengths();
        lengths
            .iter()
            .enumerate()
            .all(|(i, &a)| lengths[i + 1..].iter().all(|&b| gcd(a, b) == 1))
    }
}

/// A permutation verified to map edges onto edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub perm: Permutation,
    /// `edge_map[e]` is the index of the image of edge `e`.
    pub edge_map: Vec<usize>,
    pub order: usize,
}

pub fn validate_automorphism(h: &Hypergraph, perm: &Permutation) -> Result<Automorphism, SymmetryError> {
    if perm.len() != h.vertex_count() {
        return Err(SymmetryError::SizeMismatch {
            expected: h.vertex_count(),
            got: perm.len(),
        });
    }
    let mut edge_map = Vec::with_capacity(h.edge_count());
    for e in h.edges() {
        let mut image: Vec<usize> = e.members.iter().map(|&v| perm.apply(v)).collect();
        image.sort_unstable();
        match h.find_edge(&image) {
            Some(target) => edge_map.push(target),
            None => {
                return Err(SymmetryError::NotAutomorphism {
                    edge: e.id.clone(),
                    image: image.iter().map(|&v| h.label(v)).collect::<Vec<_>>().join(","),
                })
            }
        }
    }
    Ok(Automorphism {
        order: perm.order(),
        perm: perm.clone(),
        edge_map,
    })
}

/// `P` with `p_uv = 1` exactly when `v = f(u)`, so `(P x)(u) = x(f(u))`.
pub fn permutation_matrix(perm: &Permutation) -> CMatrix {
    let n = perm.len();
    let mut p = CMatrix::zeros(n, n);
    for u in 0..n {
        p[(u, perm.apply(u))] = ONE;
    }
    p
}

pub const DEFAULT_COMPAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub compatible: bool,
    /// Largest `|m_uv - m_{f(u)f(v)}|`.
    pub max_deviation: f64,
    /// First row-major pair `(u, v)` whose deviation exceeds the tolerance.
    pub witness: Option<(usize, usize)>,
}

/// Checks `m_uv = m_{f(u) f(v)}` for all pairs.
pub fn is_compatible(m: &CMatrix, perm: &Permutation, tol: f64) -> Result<CompatibilityReport, SymmetryError> {
    check_square(m)?;
    if m.rows() != perm.len() {
        return Err(SymmetryError::SizeMismatch {
            expected: m.rows(),
            got: perm.len(),
        });
    }
    let n = m.rows();
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    for u in 0..n {
        for v in 0..n {
            let d = (m[(u, v)] - m[(perm.apply(u), perm.apply(v))]).norm();
            max_deviation = max_deviation.max(d);
            if d > tol && witness.is_none() {
                witness = Some((u, v));
            }
        }
    }
    Ok(CompatibilityReport {
        compatible: witness.is_none(),
        max_deviation,
        witness,
    })
}

/// `max |PM - MP|` entrywise.
pub fn check_commutation(m: &CMatrix, perm: &Permutation) -> Result<f64, SymmetryError> {
    check_square(m)?;
    if m.rows() != perm.len() {
        return Err(SymmetryError::SizeMismatch {
            expected: m.rows(),
            got: perm.len(),
        });
    }
    let p = permutation_matrix(perm);
    Ok(p.matmul(m).max_abs_diff(&m.matmul(&p)))
}

fn check_square(m: &CMatrix) -> Result<(), SymmetryError> {
    if m.is_square() {
        Ok(())
    } else {
        Err(SymmetryError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// Orbits of a permutation, ordered by smallest member; members ascend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbits: Vec<Vec<usize>>,
    vertex_to_orbit: Vec<usize>,
}

impl OrbitPartition {
    pub fn of(perm: &Permutation) -> Self {
        let orbits: Vec<Vec<usize>> = perm
            .cycles()
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        Self::from_sorted_cells(perm.len(), orbits)
    }

    /// Validates an arbitrary list of cells as a partition of `0..n`.
    pub fn from_cells(n: usize, cells: Vec<Vec<usize>>) -> Result<Self, SymmetryError> {
        let mut seen = vec![false; n];
        let mut cells = cells;
        for cell in &mut cells {
            if cell.is_empty() {
                return Err(SymmetryError::NotAPartition("empty cell".into()));
            }
            cell.sort_unstable();
            for &v in cell.iter() {
                if v >= n {
                    return Err(SymmetryError::NotAPartition(format!("index {v} out of range")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(SymmetryError::NotAPartition(format!("index {v} appears twice")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(SymmetryError::NotAPartition(format!("index {v} is not covered")));
        }
        cells.sort_by_key(|c| c[0]);
        Ok(Self::from_sorted_cells(n, cells))
    }

    fn from_sorted_cells(n: usize, orbits: Vec<Vec<usize>>) -> Self {
        let mut vertex_to_orbit = vec![0; n];
        for (i, o) in orbits.iter().enumerate() {
            for &v in o {
                vertex_to_orbit[v] = i;
            }
        }
        Self {
            orbits,
            vertex_to_orbit,
        }
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, v: usize) -> usize {
        self.vertex_to_orbit[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_to_orbit.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitabilityReport {
    pub equitable: bool,
    pub max_deviation: f64,
    /// `(cell, target cell, first row, offending row)` for the first failure.
    pub witness: Option<(usize, usize, usize, usize)>,
}

/// Checks that every row of a cell has the same sum over every other cell.
pub fn is_equitable(m: &CMatrix, cells: &OrbitPartition, tol: f64) -> Result<EquitabilityReport, SymmetryError> {
    check_square(m)?;
    if m.rows() != cells.vertex_count() {
        return Err(SymmetryError::SizeMismatch {
            expected: m.rows(),
            got: cells.vertex_count(),
        });
    }
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    for (i, cell) in cells.orbits().iter().enumerate() {
        for (j, target) in cells.orbits().iter().enumerate() {
            let sum = |u: usize| -> Complex64 { target.iter().map(|&v| m[(u, v)]).sum() };
            let reference = sum(cell[0]);
            for &u in &cell[1..] {
                let d = (sum(u) - reference).norm();
                max_deviation = max_deviation.max(d);
                if d > tol && witness.is_none() {
                    witness = Some((i, j, cell[0], u));
                }
            }
        }
    }
    Ok(EquitabilityReport {
        equitable: witness.is_none(),
        max_deviation,
        witness,
    })
}

/// Quotient `q_ij = Σ_{v ∈ O_j} m_{r_i v}` with `r_i` the first member of `O_i`.
///
/// Equitability is checked first with tolerance `1e-9 · max(1, ‖M‖∞)`.
pub fn orbit_quotient(m: &CMatrix, cells: &OrbitPartition) -> Result<CMatrix, SymmetryError> {
    let tol = DEFAULT_COMPAT_TOL * m.norm_inf().max(1.0);
    let report = is_equitable(m, cells, tol)?;
    if let Some((cell, target, first, second)) = report.witness {
        return Err(SymmetryError::NotEquitable {
            cell,
            target,
            first,
            second,
            deviation: report.max_deviation,
        });
    }
    let k = cells.len();
    let orbits = cells.orbits();
    Ok(CMatrix::from_fn(k, k, |i, j| {
        orbits[j].iter().map(|&v| m[(orbits[i][0], v)]).sum()
    }))
}

/// A permutation whose moved points all lie in cycles of one length.
///
/// `components[i][k] = f^i(components[0][k])`, and `U_0 = components[0]`
/// holds the smallest member of each moved cycle in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    pub order: usize,
    pub components: Vec<Vec<usize>>,
    /// Points fixed by this rotation.
    pub invariant_set: Vec<usize>,
    pub perm: Permutation,
}

impl Rotation {
    pub fn from_permutation(perm: &Permutation) -> Result<Self, SymmetryError> {
        let cycles = perm.cycles();
        let lengths = perm.moved_cycle_lengths();
        let order = match lengths.as_slice() {
            [] => return Err(SymmetryError::Trivial),
            [l] => *l,
            _ => return Err(SymmetryError::NotARotation(lengths)),
        };
        let mut invariant_set = Vec::new();
        let mut components = vec![Vec::new(); order];
        // cycles() starts each cycle at its smallest element and orders
        // cycles by it, so U_0 comes out sorted.
        for cycle in cycles {
            if cycle.len() == 1 {
                invariant_set.push(cycle[0]);
            } else {
                for (i, &v) in cycle.iter().enumerate() {
                    components[i].push(v);
                }
            }
        }
        Ok(Self {
            order,
            components,
            invariant_set,
            perm: perm.clone(),
        })
    }

    pub fn u0(&self) -> &[usize] {
        &self.components[0]
    }

    /// Number of moved cycles, which is `|U_0|`.
    pub fn cycle_count(&self) -> usize {
        self.components[0].len()
    }
}

/// Splits a permutation into one rotation per distinct moved-cycle length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationDecomposition {
    /// Ascending by order.
    pub factors: Vec<Rotation>,
    /// Points fixed by the whole permutation.
    pub global_fixed: Vec<usize>,
}

pub fn rotation_decomposition(perm: &Permutation) -> RotationDecomposition {
    let n = perm.len();
    let mut by_length: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut global_fixed = Vec::new();
    for cycle in perm.cycles() {
        if cycle.len() == 1 {
            global_fixed.push(cycle[0]);
        } else {
            by_length.entry(cycle.len()).or_default().push(cycle);
        }
    }
    let factors = by_length
        .into_values()
        .map(|cycles| {
            let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
            let p = Permutation::from_cycles(n, &refs).expect("cycles of a permutation are disjoint");
            Rotation::from_permutation(&p).expect("factor has one cycle length")
        })
        .collect();
    RotationDecomposition { factors, global_fixed }
}

/// Upper bound on the number of simple eigenvalues of a symmetric matrix
/// compatible with `rot`: `|U_0| + |X|` for odd order, `2|U_0| + |X|` for
/// even order. No bound is claimed for non-symmetric matrices.
pub fn simple_eigenvalue_bound(rot: &Rotation, symmetric: bool) -> Option<usize> {
    if !symmetric {
        return None;
    }
    let u0 = rot.cycle_count();
    let x = rot.invariant_set.len();
    Some(if rot.order % 2 == 1 { u0 + x } else { 2 * u0 + x })
}

/// `M_uv = (1/m) Σ_i R_{f^i u, f^i v}` where `m` is the order of `f`.
/// The result is always compatible with `f`.
pub fn orbit_average(r: &CMatrix, perm: &Permutation) -> Result<CMatrix, SymmetryError> {
    check_square(r)?;
    if r.rows() != perm.len() {
        return Err(SymmetryError::SizeMismatch {
            expected: r.rows(),
            got: perm.len(),
        });
    }
    let n = r.rows();
    let order = perm.order();
    let mut acc = CMatrix::zeros(n, n);
    let mut power = Permutation::identity(n);
    for _ in 0..order {
        for u in 0..n {
            for v in 0..n {
                acc[(u, v)] += r[(power.apply(u), power.apply(v))];
            }
        }
        power = power.compose(perm);
    }
    Ok(acc.scale(Complex64::new(1.0 / order as f64, 0.0)))
}
