//! Dense complex eigensolver used for the small decomposition blocks.
//!
//! Householder reduction to Hessenberg form, then shifted QR sweeps with
//! Givens rotations until the matrix is upper triangular (complex Schur
//! form). Eigenvectors come from back-substitution on the triangular factor.
//! The verification oracle deliberately uses a different solver (faer), so
//! the two paths cross-check each other.

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{normalized, vec_norm, CMatrix, ONE, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is {rows}x{cols}; a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("QR iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Eigenpairs sorted by real part, then imaginary part.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
    /// Groups of indices into `values` whose eigenvectors are numerically
    /// dependent, i.e. the matrix looks defective there.
    pub defective_clusters: Vec<Vec<usize>>,
}

impl EigenResult {
    pub fn is_defective(&self, i: usize) -> bool {
        self.defective_clusters.iter().any(|c| c.contains(&i))
    }
}

const EPS: f64 = f64::EPSILON;
const SWEEPS_PER_EIGENVALUE: usize = 60;
/// Relative tolerance for grouping eigenvalues and for declaring a cluster defective.
pub const CLUSTER_TOL: f64 = 1e-6;

pub fn eigen(a: &CMatrix) -> Result<EigenResult, EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenResult {
            values: Vec::new(),
            vectors: Vec::new(),
            defective_clusters: Vec::new(),
        });
    }

    let (mut t, mut z) = hessenberg(a);
    schur_qr(&mut t, &mut z)?;

    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let vectors = triangular_eigenvectors(&t, &z);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .re
            .total_cmp(&values[j].re)
            .then(values[i].im.total_cmp(&values[j].im))
    });
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let vectors: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors[i].clone()).collect();

    let scale = a.norm_inf().max(1.0);
    let defective_clusters = find_defective(&values, &vectors, CLUSTER_TOL * scale);
    Ok(EigenResult {
        values,
        vectors,
        defective_clusters,
    })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>, EigenError> {
    eigen(a).map(|r| r.values)
}

/// Returns `(H, Q)` with `A = Q H Q*` and `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // Left: H <- (I - 2 v v*) H on rows k+1..n.
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * s;
            }
        }
        // Right: H <- H (I - 2 v v*) on columns k+1..n, and the same for Q.
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: Complex64 = (0..v.len()).map(|j| m[(i, k + 1 + j)] * v[j]).sum();
                for j in 0..v.len() {
                    m[(i, k + 1 + j)] -= 2.0 * s * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// Reduces the Hessenberg matrix `t` to upper triangular form in place,
/// accumulating the unitary transformations into `z`.
fn schur_qr(t: &mut CMatrix, z: &mut CMatrix) -> Result<(), EigenError> {
    let n = t.rows();
    let norm = t.norm_frobenius();
    if norm == 0.0 {
        return Ok(());
    }
    let max_sweeps = SWEEPS_PER_EIGENVALUE * n.max(1);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut diag = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= EPS * diag {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        total += 1;
        iter += 1;
        if total > max_sweeps {
            return Err(EigenError::NoConvergence(total));
        }

        let mu = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = c * x + s * y;
                t[(k + 1, j)] = -s.conj() * x + c * y;
            }
            t[(k + 1, k)] = ZERO;
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in 0..=(k + 1).min(hi) {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = c * x + s.conj() * y;
                t[(i, k + 1)] = -s * x + c * y;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = c * x + s.conj() * y;
                z[(i, k + 1)] = -s * x + c * y;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    // Clear rounding noise below the diagonal.
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn triangular_eigenvectors(t: &CMatrix, z: &CMatrix) -> Vec<Vec<Complex64>> {
    let n = t.rows();
    let norm = t.norm_frobenius();
    let smin = if norm > 0.0 { EPS * norm } else { 1.0 };
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut x = vec![ZERO; n];
            x[k] = ONE;
            for i in (0..k).rev() {
                let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * x[j]).sum();
                let mut d = t[(i, i)] - lambda;
                if d.norm() < smin {
                    d = Complex64::new(smin, 0.0);
                }
                // `fdiv` rescales first, so tiny pivots do not underflow to 0/0.
                x[i] = (-s).fdiv(d);
                // Keep the partial solution bounded; only the direction matters.
                let big = x[i..=k].iter().map(|v| v.norm()).fold(0.0, f64::max);
                if big > 1e100 {
                    for v in x[i..=k].iter_mut() {
                        *v /= big;
                    }
                }
            }
            normalized(&z.matvec(&x))
        })
        .collect()
}

/// Groups eigenvalues closer than `tol` and flags groups whose vectors are
/// numerically dependent.
fn find_defective(values: &[Complex64], vectors: &[Vec<Complex64>], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        // Single-linkage grouping.
        let mut cluster = vec![i];
        assigned[i] = true;
        let mut head = 0;
        while head < cluster.len() {
            let c = cluster[head];
            for j in 0..n {
                if !assigned[j] && (values[j] - values[c]).norm() <= tol {
                    assigned[j] = true;
                    cluster.push(j);
                }
            }
            head += 1;
        }
        if cluster.len() < 2 {
            continue;
        }
        cluster.sort_unstable();
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        let mut dependent = false;
        for &c in &cluster {
            let mut v = vectors[c].clone();
            for b in &basis {
                let proj: Complex64 = v.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
            let r = vec_norm(&v);
            if r < CLUSTER_TOL {
                dependent = true;
                break;
            }
            basis.push(v.iter().map(|x| x / r).collect());
        }
        if dependent {
            out.push(cluster);
        }
    }
    out
}
