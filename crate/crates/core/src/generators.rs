//! Seeded random instances for property tests and the `selftest` command.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::Hypergraph;
use crate::matrix::CMatrix;
use crate::symmetry::{orbit_average, Permutation};

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sets of distinct cycle lengths that are pairwise coprime.
const LENGTH_SETS: &[&[usize]] = &[
    &[2],
    &[3],
    &[4],
    &[5],
    &[2, 3],
    &[2, 5],
    &[3, 4],
    &[3, 5],
    &[4, 5],
    &[2, 3, 5],
];

/// A multiset of cycle lengths (each > 1) with pairwise-coprime distinct
/// lengths, plus a number of fixed points, on at most `max_vertices` points.
pub fn random_cycle_type(rng: &mut InstanceRng, max_vertices: usize) -> (Vec<usize>, usize) {
    loop {
        let lengths = LENGTH_SETS[rng.random_range(0..LENGTH_SETS.len())];
        let mut cycles = Vec::new();
        for &l in lengths {
            for _ in 0..rng.random_range(1..=2) {
                cycles.push(l);
            }
        }
        let moved: usize = cycles.iter().sum();
        if moved > max_vertices {
            continue;
        }
        let fixed = rng.random_range(0..=(max_vertices - moved).min(3));
        return (cycles, fixed);
    }
}

/// A permutation of `0..n` whose non-trivial cycles have the given lengths.
pub fn permutation_with_cycle_type(rng: &mut InstanceRng, n: usize, cycles: &[usize]) -> Permutation {
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let mut parts: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for &l in cycles {
        parts.push(&points[start..start + l]);
        start += l;
    }
    Permutation::from_cycles(n, &parts).expect("cycle lengths fit in n")
}

/// A hypergraph on vertices labelled `0..n` whose edge set is closed under `f`,
/// so `f` is an automorphism. Edges have at least two members.
pub fn invariant_hypergraph(rng: &mut InstanceRng, f: &Permutation) -> Hypergraph {
    let n = f.len();
    assert!(n >= 2, "need at least two vertices");
    let order = f.order();
    let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    let seeds = rng.random_range(1..=4);
    for _ in 0..seeds {
        let size = rng.random_range(2..=n.min(5));
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(rng);
        let mut e: Vec<usize> = pool[..size].to_vec();
        for _ in 0..order {
            e.sort_unstable();
            edges.insert(e.clone());
            e = e.iter().map(|&v| f.apply(v)).collect();
        }
    }
    let labels: Vec<String> = (0..n).map(|v| v.to_string()).collect();
    let edge_list = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| (format!("e{i}"), e.into_iter().map(|v| v.to_string()).collect()));
    Hypergraph::new(labels, edge_list).expect("generated hypergraph is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFlavor {
    /// Entries uniform in the unit square of the complex plane.
    Complex,
    /// Real symmetric with entries in `[-1, 1]`.
    RealSymmetric,
    /// Real with entries in `[0, 1]`.
    Nonnegative,
}

pub fn random_matrix(rng: &mut InstanceRng, n: usize, flavor: MatrixFlavor) -> CMatrix {
    match flavor {
        MatrixFlavor::Complex => CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }),
        MatrixFlavor::Nonnegative => CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(0.0..1.0), 0.0)),
        MatrixFlavor::RealSymmetric => {
            let r = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            CMatrix::from_fn(n, n, |i, j| (r[(i, j)] + r[(j, i)]) * 0.5)
        }
    }
}

/// Orbit average of a random matrix; compatible with `f` by construction.
pub fn random_compatible_matrix(rng: &mut InstanceRng, f: &Permutation, flavor: MatrixFlavor) -> CMatrix {
    let r = random_matrix(rng, f.len(), flavor);
    orbit_average(&r, f).expect("square matrix of matching size")
}

/// A random automorphism with pairwise-coprime cycle lengths together with a
/// hypergraph it preserves.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub hypergraph: Hypergraph,
    pub perm: Permutation,
}

pub fn random_instance(rng: &mut InstanceRng, max_vertices: usize) -> RandomInstance {
    let (cycles, fixed) = random_cycle_type(rng, max_vertices);
    let n = cycles.iter().sum::<usize>() + fixed;
    let perm = permutation_with_cycle_type(rng, n, &cycles);
    let hypergraph = invariant_hypergraph(rng, &perm);
    RandomInstance { hypergraph, perm }
}
