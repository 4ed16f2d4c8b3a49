//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlc_core::codes::{sample_with_dimension, LinearCode, SampleOptions};
use rlc_core::{Fe, Field, FieldSpec, MatrixFq};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(q: u32) -> Field {
    FieldSpec::shared(q).expect("prime power")
}

pub fn random_vector(f: &Field, len: usize, rng: &mut impl Rng) -> Vec<Fe> {
    (0..len).map(|_| Fe(rng.gen_range(0..f.q()) as u16)).collect()
}

pub fn random_matrix(f: &Field, rows: usize, cols: usize, seed: u64) -> MatrixFq {
    let mut r = rng(seed);
    let body: Vec<Vec<Fe>> = (0..rows).map(|_| random_vector(f, cols, &mut r)).collect();
    MatrixFq::from_rows(f.clone(), cols, &body).expect("shape")
}

pub fn random_code(q: u32, n: usize, k: usize, seed: u64) -> LinearCode {
    sample_with_dimension(field(q), n, k, &mut rng(seed), SampleOptions::default()).expect("valid parameters")
}

/// `size` distinct nonzero vectors of F_q^d.
pub fn random_lambda(f: &Field, d: usize, size: usize, seed: u64) -> Vec<Vec<Fe>> {
    let mut r = rng(seed);
    let mut out: Vec<Vec<Fe>> = Vec::with_capacity(size);
    while out.len() < size {
        let v = random_vector(f, d, &mut r);
        if v.iter().any(|c| !c.is_zero()) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}
