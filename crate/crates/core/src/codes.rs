//! Linear codes C = { G v : v ∈ F_q^k } with an n × k generator matrix.

use crate::error::{Error, Result};
use crate::fqla::{axpy, EchelonBasis, MatrixFq, VectorFq};
use crate::galois::{same_field, Fe, Field};
use crate::rational::Rational;
use rand::Rng;

/// Default cap on the number of messages enumerated by brute-force routines.
pub const DEFAULT_CODEWORD_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    generator: MatrixFq,
    seed: Option<u64>,
}

/// Options for [`sample_random_linear_code_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleOptions {
    /// Redraw until the generator has rank k.
    pub condition_on_full_rank: bool,
}

/// Converts a rate into a dimension, refusing to round.
pub fn dimension_for_rate(n: usize, rate: Rational) -> Result<usize> {
    let kn = rate * Rational::from_integer(n as i64);
    if !kn.is_integer() {
        return Err(Error::InvalidRate(format!("rate {rate} times n = {n} is not an integer")));
    }
    let k = kn.to_integer();
    if k < 1 || k as usize > n {
        return Err(Error::InvalidRate(format!("dimension {k} outside 1..={n}")));
    }
    Ok(k as usize)
}

/// Draws G with iid uniform entries.
///
/// Entries are consumed column by column (all of column 0, then column 1, ...),
/// so for a fixed rng state the code of dimension k is a subcode of the one of
/// dimension k + 1. Experiments sweeping k then share randomness.
pub fn sample_random_linear_code(field: Field, n: usize, rate: Rational, rng: &mut impl Rng) -> Result<LinearCode> {
    sample_random_linear_code_with(field, n, rate, rng, SampleOptions::default())
}

pub fn sample_random_linear_code_with(
    field: Field,
    n: usize,
    rate: Rational,
    rng: &mut impl Rng,
    opts: SampleOptions,
) -> Result<LinearCode> {
    let k = dimension_for_rate(n, rate)?;
    sample_with_dimension(field, n, k, rng, opts)
}

/// Same as [`sample_random_linear_code_with`] but takes k directly.
pub fn sample_with_dimension(
    field: Field,
    n: usize,
    k: usize,
    rng: &mut impl Rng,
    opts: SampleOptions,
) -> Result<LinearCode> {
    if k < 1 || k > n {
        return Err(Error::InvalidRate(format!("dimension {k} outside 1..={n}")));
    }
    let q = field.q();
    loop {
        let mut g = MatrixFq::zeros(field.clone(), n, k);
        for c in 0..k {
            for r in 0..n {
                g.set(r, c, Fe(rng.gen_range(0..q) as u16));
            }
        }
        if !opts.condition_on_full_rank || g.rank() == k {
            return Ok(LinearCode { field, generator: g, seed: None });
        }
    }
}

impl LinearCode {
    pub fn new(generator: MatrixFq) -> Result<Self> {
        if generator.cols() > generator.rows() {
            return Err(Error::InvalidRate(format!(
                "k = {} exceeds n = {}",
                generator.cols(),
                generator.rows()
            )));
        }
        Ok(LinearCode { field: generator.field().clone(), generator, seed: None })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn generator(&self) -> &MatrixFq {
        &self.generator
    }
    pub fn n(&self) -> usize {
        self.generator.rows()
    }
    pub fn k(&self) -> usize {
        self.generator.cols()
    }
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
    pub fn rate(&self) -> Rational {
        Rational::new(self.k() as i64, self.n() as i64)
    }

    /// Rank of G, i.e. the true dimension of the code.
    pub fn rank(&self) -> usize {
        self.generator.rank()
    }

    pub fn encode(&self, v: &VectorFq) -> Result<VectorFq> {
        if !same_field(v.field(), &self.field) {
            return Err(Error::MixedFields);
        }
        let c = self.generator.mul_vec(v.coords())?;
        VectorFq::new(self.field.clone(), c)
    }

    /// Number of messages, q^k, or `None` on overflow.
    pub fn message_count(&self) -> Option<u64> {
        (self.field.q() as u64).checked_pow(self.k() as u32)
    }

    /// Message with the given index: digit j of the index (base q, least
    /// significant first) is coordinate j.
    pub fn message(&self, mut index: u64) -> Vec<Fe> {
        let q = self.field.q() as u64;
        (0..self.k())
            .map(|_| {
                let d = index % q;
                index /= q;
                Fe(d as u16)
            })
            .collect()
    }

    /// All q^k codewords in message-index order.
    pub fn enumerate_codewords(&self, cap: u64) -> Result<Vec<Vec<Fe>>> {
        let total = self.message_count().filter(|&t| t <= cap).ok_or(Error::EnumerationTooLarge {
            needed: (self.field.q() as u128).saturating_pow(self.k() as u32),
            cap: cap as u128,
        })?;
        let cols: Vec<Vec<Fe>> = (0..self.k()).map(|j| self.generator.column(j)).collect();
        let f = &self.field;
        let q = f.q();
        let n = self.n();
        // Walk messages as a base-q odometer, updating the codeword by one scaled
        // column per changed digit instead of a full matrix-vector product.
        let step: Vec<Fe> = (0..q).map(|a| f.sub(Fe(((a + 1) % q) as u16), Fe(a as u16))).collect();
        let mut digits = vec![0u32; self.k()];
        let mut cw = vec![Fe::ZERO; n];
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            out.push(cw.clone());
            if idx + 1 == total {
                break;
            }
            for j in 0..self.k() {
                axpy(f, &mut cw, step[digits[j] as usize], &cols[j]);
                digits[j] += 1;
                if digits[j] < q {
                    break;
                }
                digits[j] = 0;
            }
        }
        Ok(out)
    }

    /// Distinct codewords with the smallest message index producing each.
    pub fn distinct_codewords(&self, cap: u64) -> Result<(Vec<Vec<Fe>>, Vec<u64>)> {
        let all = self.enumerate_codewords(cap)?;
        let mut seen = std::collections::HashSet::with_capacity(all.len());
        let mut words = Vec::new();
        let mut msgs = Vec::new();
        for (i, c) in all.into_iter().enumerate() {
            if seen.insert(c.clone()) {
                words.push(c);
                msgs.push(i as u64);
            }
        }
        Ok((words, msgs))
    }

    /// Relative minimum distance; 0 when G has a nontrivial kernel.
    pub fn min_distance(&self, cap: u64) -> Result<Rational> {
        let words = self.enumerate_codewords(cap)?;
        let n = self.n();
        let w = words
            .iter()
            .skip(1)
            .map(|c| c.iter().filter(|x| !x.is_zero()).count())
            .min()
            .unwrap_or(n);
        Ok(Rational::new(w as i64, n.max(1) as i64))
    }

    /// Whether a vector of length n lies in the column space of G.
    pub fn contains(&self, c: &[Fe]) -> Result<bool> {
        if c.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: c.len() });
        }
        let mut eb = EchelonBasis::new(self.field.clone(), self.n());
        for j in 0..self.k() {
            eb.insert(&self.generator.column(j));
        }
        Ok(eb.contains(c))
    }
}

/// The d columns (each in F^n) of the n × d matrix whose rows are `x`.
pub fn cols(x: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let d = x.first().map_or(0, Vec::len);
    (0..d).map(|j| x.iter().map(|row| row[j]).collect()).collect()
}

/// Whether every column of X is a codeword.
pub fn contains_cols(code: &LinearCode, x: &[Vec<Fe>]) -> Result<bool> {
    if x.len() != code.n() {
        return Err(Error::DimensionMismatch { expected: code.n(), got: x.len() });
    }
    let mut eb = EchelonBasis::new(code.field.clone(), code.n());
    for j in 0..code.k() {
        eb.insert(&code.generator.column(j));
    }
    Ok(cols(x).iter().all(|c| eb.contains(c)))
}

/// Convenience: rows of G as a raw matrix.
pub fn generator_rows(code: &LinearCode) -> Vec<Vec<Fe>> {
    code.generator.row_vecs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u32) -> Field {
        FieldSpec::shared(q).unwrap()
    }

    fn code_from(q: u32, rows: &[Vec<u32>]) -> LinearCode {
        LinearCode::new(MatrixFq::from_index_rows(fq(q), rows).unwrap()).unwrap()
    }

    #[test]
    fn sampling_shape_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = sample_random_linear_code(fq(2), 4, Rational::new(1, 2), &mut rng).unwrap();
        assert_eq!((c.n(), c.k()), (4, 2));
        let a = sample_random_linear_code(fq(3), 6, Rational::new(1, 3), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = sample_random_linear_code(fq(3), 6, Rational::new(1, 3), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.k(), 2);
        assert_eq!(a, b);
        assert!(matches!(
            sample_random_linear_code(fq(2), 2, Rational::new(1, 4), &mut rng),
            Err(Error::InvalidRate(_))
        ));
    }

    #[test]
    fn sampling_is_nested_across_dimensions() {
        let small = sample_with_dimension(fq(4), 7, 2, &mut ChaCha8Rng::seed_from_u64(1), SampleOptions::default()).unwrap();
        let large = sample_with_dimension(fq(4), 7, 3, &mut ChaCha8Rng::seed_from_u64(1), SampleOptions::default()).unwrap();
        for j in 0..2 {
            assert_eq!(small.generator().column(j), large.generator().column(j));
        }
    }

    #[test]
    fn conditioning_yields_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let opts = SampleOptions { condition_on_full_rank: true };
            let c = sample_with_dimension(fq(2), 3, 3, &mut rng, opts).unwrap();
            assert_eq!(c.rank(), 3);
        }
    }

    #[test]
    fn encode_examples() {
        let id = LinearCode::new(MatrixFq::identity(fq(5), 3)).unwrap();
        let v = VectorFq::from_indices(fq(5), &[4, 0, 2]).unwrap();
        assert_eq!(id.encode(&v).unwrap(), v);
        let rep = code_from(2, &[vec![1], vec![1], vec![1]]);
        let one = VectorFq::from_indices(fq(2), &[1]).unwrap();
        assert_eq!(rep.encode(&one).unwrap().coords(), &[Fe(1), Fe(1), Fe(1)]);
        let zero = VectorFq::zero(fq(2), 1);
        assert!(rep.encode(&zero).unwrap().coords().iter().all(|c| c.is_zero()));
        assert!(matches!(rep.encode(&VectorFq::zero(fq(2), 2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn enumeration_matches_direct_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for q in [2u32, 3, 4, 5] {
            let c = sample_with_dimension(fq(q), 5, 3, &mut rng, SampleOptions::default()).unwrap();
            let words = c.enumerate_codewords(DEFAULT_CODEWORD_CAP).unwrap();
            assert_eq!(words.len(), (q as usize).pow(3));
            for (i, w) in words.iter().enumerate() {
                let m = VectorFq::new(fq(q), c.message(i as u64)).unwrap();
                assert_eq!(c.encode(&m).unwrap().coords(), &w[..]);
            }
        }
        let zero = code_from(3, &[vec![0, 0], vec![0, 0]]);
        assert!(zero.enumerate_codewords(100).unwrap().iter().all(|w| w.iter().all(|c| c.is_zero())));
        assert_eq!(zero.distinct_codewords(100).unwrap().0.len(), 1);
        let big = code_from(2, &vec![vec![1; 21]; 21]);
        assert!(matches!(big.enumerate_codewords(DEFAULT_CODEWORD_CAP), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn min_distance_examples() {
        let rep = code_from(2, &[vec![1], vec![1], vec![1]]);
        assert_eq!(rep.min_distance(1 << 20).unwrap(), Rational::from_integer(1));
        let id = LinearCode::new(MatrixFq::identity(fq(3), 4)).unwrap();
        assert_eq!(id.min_distance(1 << 20).unwrap(), Rational::new(1, 4));
        let degenerate = code_from(2, &[vec![1, 1], vec![0, 0], vec![1, 1]]);
        assert_eq!(degenerate.min_distance(1 << 20).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn cols_examples() {
        let x = vec![vec![Fe(1), Fe(0)], vec![Fe(0), Fe(1)]];
        assert_eq!(cols(&x), x);
        let single = vec![vec![Fe(1), Fe(0), Fe(1)]];
        assert_eq!(cols(&single), vec![vec![Fe(1)], vec![Fe(0)], vec![Fe(1)]]);
    }

    #[test]
    fn contains_cols_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = sample_with_dimension(fq(3), 5, 2, &mut rng, SampleOptions::default()).unwrap();
        assert!(contains_cols(&c, &generator_rows(&c)).unwrap());
        let words = c.enumerate_codewords(1 << 20).unwrap();
        for _ in 0..200 {
            let cand: Vec<Fe> = (0..5).map(|_| Fe(rng.gen_range(0..3))).collect();
            let x: Vec<Vec<Fe>> = cand.iter().map(|&e| vec![e]).collect();
            assert_eq!(contains_cols(&c, &x).unwrap(), words.contains(&cand));
            assert_eq!(c.contains(&cand).unwrap(), words.contains(&cand));
        }
        assert!(matches!(contains_cols(&c, &[vec![Fe(0)]]), Err(Error::DimensionMismatch { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #[test]
            fn encode_is_linear(seed in any::<u64>(), qi in 0usize..4) {
                let q = [2u32, 3, 4, 7][qi];
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let c = sample_with_dimension(fq(q), 6, 3, &mut rng, SampleOptions::default()).unwrap();
                let u = VectorFq::new(fq(q), (0..3).map(|_| Fe(rng.gen_range(0..q) as u16)).collect()).unwrap();
                let v = VectorFq::new(fq(q), (0..3).map(|_| Fe(rng.gen_range(0..q) as u16)).collect()).unwrap();
                let lhs = c.encode(&u.add(&v).unwrap()).unwrap();
                let rhs = c.encode(&u).unwrap().add(&c.encode(&v).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
