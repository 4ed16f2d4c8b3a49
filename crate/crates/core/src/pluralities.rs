//! Plurality statistics of a message set under inner products, the optimal
//! list center they induce, and the two badness predicates for witness pairs.

use crate::error::{Error, Result};
use crate::fqla::{dot, span_dim, WitnessPair};
use crate::galois::{Fe, FieldSpec};
use crate::rational::Rational;
use serde::Serialize;

/// Value histogram of ⟨x, v⟩ over v ∈ Λ, indexed by field element.
pub fn value_counts(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>]) -> Vec<u32> {
    let mut counts = vec![0u32; f.q() as usize];
    for v in lambda {
        counts[dot(f, x, v).index()] += 1;
    }
    counts
}

/// Element indices ordered by count (descending), ties by ascending index.
fn ranked(counts: &[u32]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..counts.len()).collect();
    idx.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    idx
}

/// Sum of the `ell` largest entries.
pub fn top_ell_count(counts: &[u32], ell: usize) -> u32 {
    if ell == 1 {
        return counts.iter().copied().max().unwrap_or(0);
    }
    let mut c = counts.to_vec();
    c.sort_unstable_by(|a, b| b.cmp(a));
    c.iter().take(ell).sum()
}

fn check(f: &FieldSpec, lambda: &[Vec<Fe>], ell: usize) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::EmptyLambda);
    }
    if ell == 0 || ell > f.q() as usize {
        return Err(Error::EllExceedsField { ell, q: f.q() });
    }
    Ok(())
}

/// pl_x(Λ): share of Λ taking the most common inner-product value.
pub fn plurality(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>]) -> Result<Rational> {
    plurality_top(f, x, lambda, 1)
}

/// pl^(ℓ)_x(Λ): share of Λ covered by the ℓ most common values.
pub fn plurality_top(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>], ell: usize) -> Result<Rational> {
    check(f, lambda, ell)?;
    let c = top_ell_count(&value_counts(f, x, lambda), ell);
    Ok(Rational::new(c as i64, lambda.len() as i64))
}

/// The ℓ most common values, ties and padding by ascending element index.
pub fn argtop(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>], ell: usize) -> Result<Vec<Fe>> {
    check(f, lambda, ell)?;
    Ok(argtop_of_counts(&value_counts(f, x, lambda), ell))
}

pub(crate) fn argtop_of_counts(counts: &[u32], ell: usize) -> Vec<Fe> {
    ranked(counts).into_iter().take(ell).map(|i| Fe(i as u16)).collect()
}

/// Per-row summary of the inner-product distribution.
#[derive(Clone, Debug, Serialize)]
pub struct PluralityReport {
    pub x: Vec<Fe>,
    /// Nonzero counts only, as (element, count) in index order.
    pub counts: Vec<(Fe, u32)>,
    #[serde(with = "crate::rational::serde_rational")]
    pub pl: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub pl_top_ell: Rational,
    pub argtop: Vec<Fe>,
}

pub fn plurality_report(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>], ell: usize) -> Result<PluralityReport> {
    check(f, lambda, ell)?;
    let counts = value_counts(f, x, lambda);
    let l = lambda.len() as i64;
    Ok(PluralityReport {
        x: x.to_vec(),
        counts: counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (Fe(i as u16), c)).collect(),
        pl: Rational::new(top_ell_count(&counts, 1) as i64, l),
        pl_top_ell: Rational::new(top_ell_count(&counts, ell) as i64, l),
        argtop: argtop_of_counts(&counts, ell),
    })
}

/// z with z[i][j] = argtop_i(x_j, Λ); shape ℓ × n.
pub fn optimal_center(w: &WitnessPair, ell: usize) -> Result<Vec<Vec<Fe>>> {
    let f = w.field();
    check(f, w.lambda(), ell)?;
    let mut z = vec![Vec::with_capacity(w.n()); ell];
    for x in w.x() {
        let top = argtop_of_counts(&value_counts(f, x, w.lambda()), ell);
        for (i, e) in top.into_iter().enumerate() {
            z[i].push(e);
        }
    }
    Ok(z)
}

/// (1/|Λ|) Σ_v (1 − dist(z, Xv)) for a list center z of shape ℓ × n.
pub fn average_agreement(w: &WitnessPair, z: &[Vec<Fe>]) -> Result<Rational> {
    if w.lambda().is_empty() {
        return Err(Error::EmptyLambda);
    }
    let n = w.n();
    if let Some(bad) = z.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    let mut hits = 0i64;
    for v in w.lambda() {
        let c = w.codeword(v);
        hits += (0..n).filter(|&j| z.iter().any(|row| row[j] == c[j])).count() as i64;
    }
    Ok(Rational::new(hits, (n * w.lambda().len()).max(1) as i64))
}

/// Σ_{x∈X} pl^(ℓ)_x(Λ).
pub fn sum_plurality(w: &WitnessPair, ell: usize) -> Result<Rational> {
    let f = w.field();
    check(f, w.lambda(), ell)?;
    let total: i64 = w.x().iter().map(|x| top_ell_count(&value_counts(f, x, w.lambda()), ell) as i64).sum();
    Ok(Rational::new(total, w.lambda().len() as i64))
}

fn common_conditions(w: &WitnessPair, big_l: usize, d: usize) -> bool {
    !w.lambda().is_empty() && w.x_full_rank() && w.lambda().len() >= big_l && span_dim(w.field(), w.d(), w.lambda()) <= d
}

/// (L, d, ℓ)-all-bad: X spans, |Λ| ≥ L, dim Λ ≤ d, and every row sees at most ℓ values.
/// An empty Λ is never bad.
pub fn is_all_bad(w: &WitnessPair, big_l: usize, d: usize, ell: usize) -> bool {
    if !common_conditions(w, big_l, d) {
        return false;
    }
    let f = w.field();
    w.x().iter().all(|x| value_counts(f, x, w.lambda()).iter().filter(|&&c| c > 0).count() <= ell)
}

/// (L, d, ε, ℓ)-average-bad: the shared conditions plus Σ_x pl^(ℓ)_x(Λ) ≥ ε n.
pub fn is_average_bad(w: &WitnessPair, big_l: usize, d: usize, eps: Rational, ell: usize) -> bool {
    if !common_conditions(w, big_l, d) {
        return false;
    }
    match sum_plurality(w, ell) {
        Ok(s) => s >= eps * Rational::from_integer(w.n() as i64),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{Field, FieldSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u32) -> Field {
        FieldSpec::shared(q).unwrap()
    }

    fn e(v: &[u16]) -> Vec<Fe> {
        v.iter().map(|&i| Fe(i)).collect()
    }

    /// Over F_5 with x = e_1, the first coordinates (2,2,2,3,3,4) play α,α,α,β,β,γ.
    fn six_messages() -> Vec<Vec<Fe>> {
        [[2, 0], [2, 1], [2, 2], [3, 0], [3, 1], [4, 0]].iter().map(|v| e(v)).collect()
    }

    #[test]
    fn six_message_configuration() {
        let f = fq(5);
        let x = e(&[1, 0]);
        let lambda = six_messages();
        assert_eq!(plurality(&f, &x, &lambda).unwrap(), Rational::new(3, 6));
        assert_eq!(plurality_top(&f, &x, &lambda, 2).unwrap(), Rational::new(5, 6));
        assert_eq!(argtop(&f, &x, &lambda, 2).unwrap(), e(&[2, 3]));
        assert_eq!(plurality_top(&f, &x, &lambda, 5).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn trivial_pluralities() {
        let f = fq(3);
        let lambda = vec![e(&[1, 2]), e(&[0, 1])];
        assert_eq!(plurality(&f, &e(&[0, 0]), &lambda).unwrap(), Rational::from_integer(1));
        assert_eq!(plurality(&f, &e(&[1, 1]), &lambda[..1]).unwrap(), Rational::from_integer(1));
        assert!(matches!(plurality(&f, &e(&[1, 1]), &[]), Err(Error::EmptyLambda)));
        assert!(matches!(plurality_top(&f, &e(&[1, 1]), &lambda, 4), Err(Error::EllExceedsField { .. })));
    }

    #[test]
    fn argtop_tie_break_and_padding() {
        let f = fq(5);
        let x = e(&[1]);
        let all = vec![e(&[3]), e(&[1]), e(&[4]), e(&[0]), e(&[2])];
        assert_eq!(argtop(&f, &x, &all, 3).unwrap(), e(&[0, 1, 2]));
        let single = vec![e(&[3])];
        assert_eq!(argtop(&f, &x, &single, 2).unwrap(), e(&[3, 0]));
        let single0 = vec![e(&[0])];
        assert_eq!(argtop(&f, &x, &single0, 2).unwrap(), e(&[0, 1]));
    }

    #[test]
    fn report_is_consistent() {
        let f = fq(5);
        let r = plurality_report(&f, &e(&[1, 0]), &six_messages(), 2).unwrap();
        assert_eq!(r.counts.iter().map(|c| c.1).sum::<u32>(), 6);
        assert!(r.pl <= r.pl_top_ell && r.pl_top_ell <= Rational::from_integer(1));
    }

    #[test]
    fn singleton_center_is_its_codeword() {
        let f = fq(3);
        let x = vec![e(&[1, 2]), e(&[0, 1]), e(&[2, 2])];
        let v = e(&[2, 1]);
        let w = WitnessPair::new(f, 2, x, vec![v.clone()]).unwrap();
        let z = optimal_center(&w, 2).unwrap();
        assert_eq!(z[0], w.codeword(&v));
        assert_eq!(average_agreement(&w, &z).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn full_lists_agree_everywhere() {
        let f = fq(3);
        let w = WitnessPair::new(f, 2, vec![e(&[1, 2]), e(&[1, 1])], vec![e(&[0, 1]), e(&[1, 1]), e(&[2, 0])]).unwrap();
        let z = optimal_center(&w, 3).unwrap();
        assert_eq!(average_agreement(&w, &z).unwrap(), Rational::from_integer(1));
        assert_eq!(sum_plurality(&w, 3).unwrap(), Rational::from_integer(2));
    }

    /// Enumerates every ℓ × n center.
    fn brute_best_agreement(w: &WitnessPair, ell: usize) -> Rational {
        let q = w.field().q() as usize;
        let cells = ell * w.n();
        let mut best = Rational::from_integer(0);
        for idx in 0..q.pow(cells as u32) {
            let mut t = idx;
            let mut z = vec![vec![Fe(0); w.n()]; ell];
            for cell in 0..cells {
                z[cell / w.n()][cell % w.n()] = Fe((t % q) as u16);
                t /= q;
            }
            best = best.max(average_agreement(w, &z).unwrap());
        }
        best
    }

    #[test]
    fn optimal_center_beats_every_center_on_tiny_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = fq(3);
        for _ in 0..30 {
            let x: Vec<Vec<Fe>> = (0..3).map(|_| (0..2).map(|_| Fe(rng.gen_range(0..3))).collect()).collect();
            let mut lambda: Vec<Vec<Fe>> = Vec::new();
            while lambda.len() < 4 {
                let v: Vec<Fe> = (0..2).map(|_| Fe(rng.gen_range(0..3))).collect();
                if !lambda.contains(&v) {
                    lambda.push(v);
                }
            }
            let w = WitnessPair::new(f.clone(), 2, x, lambda).unwrap();
            for ell in [1usize, 2] {
                let z = optimal_center(&w, ell).unwrap();
                assert_eq!(average_agreement(&w, &z).unwrap(), brute_best_agreement(&w, ell));
            }
        }
    }

    #[test]
    fn sum_plurality_edge_cases() {
        let f = fq(2);
        let w = WitnessPair::new(f.clone(), 2, vec![e(&[0, 0]); 3], vec![e(&[0, 1]), e(&[1, 1])]).unwrap();
        assert_eq!(sum_plurality(&w, 1).unwrap(), Rational::from_integer(3));
        let one = WitnessPair::new(f, 2, vec![e(&[1, 1])], vec![e(&[0, 1]), e(&[1, 1]), e(&[1, 0])]).unwrap();
        assert_eq!(sum_plurality(&one, 1).unwrap(), plurality(one.field(), &one.x()[0], one.lambda()).unwrap());
    }

    /// Independent restatement of both badness definitions.
    fn oracle_bad(w: &WitnessPair, big_l: usize, d: usize, ell: usize, eps: Option<Rational>) -> bool {
        let f = w.field();
        let q = f.q() as usize;
        // (a) X spans F^d: every standard basis vector is a combination of rows,
        // checked by counting the distinct vectors reachable as combinations.
        let dd = w.d();
        let mut reach = std::collections::HashSet::new();
        let nrows = w.n();
        for idx in 0..q.pow(nrows as u32) {
            let mut t = idx;
            let mut acc = vec![Fe(0); dd];
            for r in 0..nrows {
                let c = Fe((t % q) as u16);
                t /= q;
                for j in 0..dd {
                    acc[j] = f.add(acc[j], f.mul(c, w.x()[r][j]));
                }
            }
            reach.insert(acc);
        }
        let spans = reach.len() == q.pow(dd as u32);
        // (c) by the same closure argument on Λ
        let mut span_l = std::collections::HashSet::new();
        let m = w.lambda().len();
        for idx in 0..q.pow(m as u32) {
            let mut t = idx;
            let mut acc = vec![Fe(0); dd];
            for v in w.lambda() {
                let c = Fe((t % q) as u16);
                t /= q;
                for j in 0..dd {
                    acc[j] = f.add(acc[j], f.mul(c, v[j]));
                }
            }
            span_l.insert(acc);
        }
        let dim_ok = span_l.len() <= q.pow(d as u32);
        let size_ok = m >= big_l;
        let last = match eps {
            None => w.x().iter().all(|x| {
                let vals: std::collections::HashSet<Fe> = w.lambda().iter().map(|v| dot(f, x, v)).collect();
                vals.len() <= ell
            }),
            Some(eps) => {
                let mut s = Rational::from_integer(0);
                for x in w.x() {
                    let mut cnt = std::collections::HashMap::new();
                    for v in w.lambda() {
                        *cnt.entry(dot(f, x, v)).or_insert(0i64) += 1;
                    }
                    let mut c: Vec<i64> = cnt.into_values().collect();
                    c.sort_unstable_by(|a, b| b.cmp(a));
                    s += Rational::new(c.iter().take(ell).sum(), m as i64);
                }
                s >= eps * Rational::from_integer(w.n() as i64)
            }
        };
        spans && size_ok && dim_ok && last
    }

    #[test]
    fn badness_matches_independent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = fq(2);
        for _ in 0..300 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let x: Vec<Vec<Fe>> = (0..n).map(|_| (0..d).map(|_| Fe(rng.gen_range(0..2))).collect()).collect();
            let mut lambda: Vec<Vec<Fe>> = Vec::new();
            let target = rng.gen_range(1..=4);
            for _ in 0..20 {
                let v: Vec<Fe> = (0..d).map(|_| Fe(rng.gen_range(0..2))).collect();
                if !lambda.contains(&v) && lambda.len() < target {
                    lambda.push(v);
                }
            }
            let w = WitnessPair::new(f.clone(), d, x, lambda).unwrap();
            let big_l = rng.gen_range(1..=4);
            let dd = rng.gen_range(0..=d);
            let ell = rng.gen_range(1..=2);
            let eps = Rational::new(rng.gen_range(0..=4), 4);
            assert_eq!(is_all_bad(&w, big_l, dd, ell), oracle_bad(&w, big_l, dd, ell, None));
            assert_eq!(is_average_bad(&w, big_l, dd, eps, ell), oracle_bad(&w, big_l, dd, ell, Some(eps)));
        }
    }

    #[test]
    fn badness_examples() {
        let f = fq(5);
        // a line {0, v, 2v, 3v} with x injective on it
        let v = e(&[1, 2]);
        let lambda: Vec<Vec<Fe>> = (0..4u16).map(|c| v.iter().map(|&a| f.mul(a, Fe(c))).collect()).collect();
        let w = WitnessPair::new(f.clone(), 2, vec![e(&[1, 0]), e(&[0, 1])], lambda.clone()).unwrap();
        assert!(!is_all_bad(&w, 2, 2, 2));
        let not_spanning = WitnessPair::new(f.clone(), 2, vec![e(&[1, 0]), e(&[2, 0])], lambda).unwrap();
        assert!(!is_all_bad(&not_spanning, 1, 2, 5));
        // standard basis rows, Λ ⊂ {0,1}^2, ℓ = 2
        let cube = vec![e(&[0, 0]), e(&[0, 1]), e(&[1, 0]), e(&[1, 1])];
        let w2 = WitnessPair::new(f, 2, vec![e(&[1, 0]), e(&[0, 1])], cube).unwrap();
        assert!(is_all_bad(&w2, 4, 2, 2));
        assert!(!is_all_bad(&w2, 5, 2, 2));
        assert!(is_average_bad(&w2, 4, 2, Rational::from_integer(1), 2));
        assert!(is_average_bad(&w2, 4, 2, Rational::from_integer(0), 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #[test]
            fn top_ell_at_most_ell_times_plurality(seed in any::<u64>(), qi in 0usize..4, ell in 1usize..4) {
                let q = [3u32, 4, 5, 7][qi];
                let f = fq(q);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let lambda: Vec<Vec<Fe>> = (0..rng.gen_range(1..12)).map(|_| (0..3).map(|_| Fe(rng.gen_range(0..q) as u16)).collect()).collect();
                let x: Vec<Fe> = (0..3).map(|_| Fe(rng.gen_range(0..q) as u16)).collect();
                let pl = plurality(&f, &x, &lambda).unwrap();
                let top = plurality_top(&f, &x, &lambda, ell).unwrap();
                prop_assert!(top <= pl * Rational::from_integer(ell as i64));
                prop_assert!(pl <= top);
            }
        }
    }
}
