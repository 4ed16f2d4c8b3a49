//! The dependency measure σ_p(Λ) = E q^{−dim span(v_1..v_p)} over ordered
//! tuples drawn from Λ with replacement, the goodness thresholds built on it,
//! subset extraction for sets that fail them, and exact plurality moments.

use crate::error::{Error, Result};
use crate::fqla::{dot, span_dim, EchelonBasis};
use crate::galois::{Fe, Field, FieldSpec};
use crate::pluralities::{top_ell_count, value_counts};
use crate::rational::{big, big_to_f64, le_scaled_power, Rational};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Default cap on state transitions for exact σ_p.
pub const DEFAULT_SIGMA_CAP: u64 = 10_000_000;
/// Default cap on |F^d| for moment enumeration.
pub const DEFAULT_MOMENT_CAP: u64 = 1 << 20;
/// Default number of candidate subsets for the exhaustive subspace search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

/// Counts of ordered p-tuples from Λ by the dimension of their span.
///
/// Tuples are grouped by the subspace their prefix spans, so the work is
/// proportional to the number of distinct prefix spans times |Λ| rather than
/// |Λ|^p. `cap` bounds that work.
pub fn dimension_histogram(f: &Field, d: usize, lambda: &[Vec<Fe>], p: usize, cap: u64) -> Result<Vec<BigUint>> {
    if lambda.is_empty() {
        return Err(Error::EmptyLambda);
    }
    let mut states: HashMap<Vec<Fe>, (EchelonBasis, BigUint)> = HashMap::new();
    let start = EchelonBasis::new(f.clone(), d);
    states.insert(start.key(), (start, BigUint::one()));
    let mut work: u64 = 0;
    for _ in 0..p {
        let mut next: HashMap<Vec<Fe>, (EchelonBasis, BigUint)> = HashMap::with_capacity(states.len() * 2);
        for (key, (basis, count)) in states {
            work = work.saturating_add(lambda.len() as u64);
            if work > cap {
                return Err(Error::EnumerationTooLarge { needed: work as u128, cap: cap as u128 });
            }
            let mut stay = 0u64;
            for v in lambda {
                if basis.contains(v) {
                    stay += 1;
                } else {
                    let mut nb = basis.clone();
                    nb.insert(v);
                    let k = nb.key();
                    next.entry(k).or_insert_with(|| (nb, BigUint::zero())).1 += &count;
                }
            }
            if stay > 0 {
                let add = &count * BigUint::from(stay);
                next.entry(key).or_insert_with(|| (basis, BigUint::zero())).1 += add;
            }
        }
        states = next;
    }
    let mut hist = vec![BigUint::zero(); d + 1];
    for (basis, count) in states.into_values() {
        hist[basis.dim()] += count;
    }
    Ok(hist)
}

fn sigma_from_histogram(q: u32, hist: &[BigUint], total: &BigUint) -> BigRational {
    let top = hist.len() - 1;
    // Σ_s h_s q^{-s} = Σ_s h_s q^{top-s} / q^top
    let qb = BigUint::from(q);
    let mut num = BigUint::zero();
    for (s, h) in hist.iter().enumerate() {
        if !h.is_zero() {
            num += h * num_traits::pow(qb.clone(), top - s);
        }
    }
    let den = total * num_traits::pow(qb, top);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact σ_p(Λ) with the default work cap.
pub fn sigma_exact(f: &Field, d: usize, lambda: &[Vec<Fe>], p: usize) -> Result<BigRational> {
    sigma_exact_with_cap(f, d, lambda, p, DEFAULT_SIGMA_CAP)
}

pub fn sigma_exact_with_cap(f: &Field, d: usize, lambda: &[Vec<Fe>], p: usize, cap: u64) -> Result<BigRational> {
    let hist = dimension_histogram(f, d, lambda, p, cap)?;
    let total = num_traits::pow(BigUint::from(lambda.len()), p);
    Ok(sigma_from_histogram(f.q(), &hist, &total))
}

/// Monte Carlo estimate of σ_p.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaEstimate {
    pub mean: f64,
    /// The sample mean as an exact rational.
    #[serde(with = "crate::rational::serde_big_rational")]
    pub mean_exact: BigRational,
    pub std_error: f64,
    pub samples: u64,
}

pub fn sigma_mc(f: &Field, d: usize, lambda: &[Vec<Fe>], p: usize, samples: u64, rng: &mut impl Rng) -> Result<SigmaEstimate> {
    if lambda.is_empty() {
        return Err(Error::EmptyLambda);
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let mut hist = vec![0u64; d + 1];
    for _ in 0..samples {
        let mut b = EchelonBasis::new(f.clone(), d);
        for _ in 0..p {
            b.insert(&lambda[rng.gen_range(0..lambda.len())]);
        }
        hist[b.dim()] += 1;
    }
    let big_hist: Vec<BigUint> = hist.iter().map(|&h| BigUint::from(h)).collect();
    let mean_exact = sigma_from_histogram(f.q(), &big_hist, &BigUint::from(samples));
    let mean = big_to_f64(&mean_exact);
    let q = f.q() as f64;
    let ss: f64 = hist
        .iter()
        .enumerate()
        .map(|(s, &h)| h as f64 * (q.powi(-(s as i32)) - mean).powi(2))
        .sum();
    let std_error = if samples > 1 { (ss / (samples - 1) as f64 / samples as f64).sqrt() } else { 0.0 };
    Ok(SigmaEstimate { mean, mean_exact, std_error, samples })
}

/// How a profile entry was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaEntry {
    pub p: usize,
    /// Exact value as `"a/b"`, present for exact entries.
    pub exact: Option<String>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub mode: SigmaMode,
    pub sample_count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaProfile {
    pub lambda_size: usize,
    pub ambient_dim: usize,
    pub values: Vec<SigmaEntry>,
}

/// σ_1..σ_{p_max}, exact where the cap allows and sampled otherwise.
pub fn sigma_profile(
    f: &Field,
    d: usize,
    lambda: &[Vec<Fe>],
    p_max: usize,
    mc_samples: u64,
    rng: &mut impl Rng,
) -> Result<SigmaProfile> {
    let mut values = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        match sigma_exact(f, d, lambda, p) {
            Ok(s) => values.push(SigmaEntry {
                p,
                exact: Some(format!("{}/{}", s.numer(), s.denom())),
                value: big_to_f64(&s),
                std_error: None,
                mode: SigmaMode::Exact,
                sample_count: 0,
            }),
            Err(Error::EnumerationTooLarge { .. }) => {
                let est = sigma_mc(f, d, lambda, p, mc_samples, rng)?;
                values.push(SigmaEntry {
                    p,
                    exact: None,
                    value: est.mean,
                    std_error: Some(est.std_error),
                    mode: SigmaMode::MonteCarlo,
                    sample_count: est.samples,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SigmaProfile { lambda_size: lambda.len(), ambient_dim: d, values })
}

fn check_zeta(zeta: Rational) -> Result<()> {
    if zeta <= Rational::from_integer(0) || zeta >= Rational::from_integer(1) {
        return Err(Error::DomainError(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    Ok(())
}

/// Whether p ≤ (1 − ζ) d.
pub fn in_small_range(p: usize, d: usize, zeta: Rational) -> bool {
    Rational::from_integer(p as i64) <= (Rational::from_integer(1) - zeta) * Rational::from_integer(d as i64)
}

/// ⌊(1 − ζ) d⌋.
pub fn small_range_end(d: usize, zeta: Rational) -> usize {
    ((Rational::from_integer(1) - zeta) * Rational::from_integer(d as i64)).floor().to_integer().max(0) as usize
}

/// (1 + 1/q) / q^p.
pub fn zero_error_threshold(q: u32, p: usize) -> BigRational {
    let qb = BigInt::from(q);
    BigRational::new(qb.clone() + 1, num_traits::pow(qb, p + 1))
}

/// σ ≤ d / (q^{d(1−2ζ)} ℓ^p), decided exactly.
pub fn large_range_holds(sigma: &BigRational, q: u32, d: usize, p: usize, zeta: Rational, ell: usize) -> bool {
    // σ ≤ d ℓ^{-p} q^{-d(1-2ζ)}; with ζ = a/b the exponent is (2da − db)/b.
    let (a, b) = (*zeta.numer(), *zeta.denom());
    let c = BigRational::new(BigInt::from(d), num_traits::pow(BigInt::from(ell), p));
    le_scaled_power(sigma, &c, q as u64, 2 * d as i64 * a - d as i64 * b, b)
}

/// Outcome of a goodness test.
#[derive(Clone, Debug, Serialize)]
pub struct GoodnessReport {
    pub good: bool,
    pub first_violation: Option<usize>,
    /// σ_1..σ_P as `"a/b"` strings.
    pub sigma: Vec<String>,
}

/// σ_p ≤ (1 + 1/q)/q^p for every 1 ≤ p ≤ p_max.
pub fn is_good_zero_error(f: &Field, d: usize, lambda: &[Vec<Fe>], zeta: Rational, p_max: usize) -> Result<GoodnessReport> {
    check_zeta(zeta)?;
    if !in_small_range(p_max, d, zeta) {
        return Err(Error::DomainError(format!("p_max = {p_max} exceeds (1 - zeta) d")));
    }
    let mut sigma = Vec::new();
    for p in 1..=p_max {
        let s = sigma_exact(f, d, lambda, p)?;
        sigma.push(format!("{}/{}", s.numer(), s.denom()));
        if s > zero_error_threshold(f.q(), p) {
            return Ok(GoodnessReport { good: false, first_violation: Some(p), sigma });
        }
    }
    Ok(GoodnessReport { good: true, first_violation: None, sigma })
}

/// The two-range test: the zero-error threshold for p ≤ (1−ζ)d and
/// d/(q^{d(1−2ζ)} ℓ^p) for (1−ζ)d < p ≤ d. Equality counts as good.
pub fn is_good_average(f: &Field, d: usize, lambda: &[Vec<Fe>], zeta: Rational, ell: usize) -> Result<GoodnessReport> {
    check_zeta(zeta)?;
    let sig = (1..=d).map(|p| sigma_exact(f, d, lambda, p)).collect::<Result<Vec<_>>>()?;
    Ok(average_goodness_from_sigma(f.q(), d, &sig, zeta, ell))
}

/// Goodness given precomputed σ_1..σ_d.
pub fn average_goodness_from_sigma(q: u32, d: usize, sig: &[BigRational], zeta: Rational, ell: usize) -> GoodnessReport {
    let sigma = sig.iter().map(|s| format!("{}/{}", s.numer(), s.denom())).collect();
    for p in 1..=d {
        let s = &sig[p - 1];
        let ok = if in_small_range(p, d, zeta) {
            *s <= zero_error_threshold(q, p)
        } else {
            large_range_holds(s, q, d, p, zeta, ell)
        };
        if !ok {
            return GoodnessReport { good: false, first_violation: Some(p), sigma };
        }
    }
    GoodnessReport { good: true, first_violation: None, sigma }
}

/// How a subset search was carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

/// Whether a search may fall back to the greedy heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchPolicy {
    ExhaustiveOnly,
    AllowGreedy,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetSearch {
    /// Indices into Λ, ascending.
    pub indices: Vec<usize>,
    pub dim: usize,
    pub mode: SearchMode,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    r
}

fn members(basis: &EchelonBasis, lambda: &[Vec<Fe>]) -> Vec<usize> {
    (0..lambda.len()).filter(|&i| basis.contains(&lambda[i])).collect()
}

/// A largest Γ ⊆ Λ with dim span(Γ) ≤ s.
///
/// Exhaustive mode visits every subspace spanned by s elements of Λ (each
/// subspace once, keyed by its reduced basis) and keeps the one holding the
/// most elements; ties go to the first visited in lexicographic subset order.
pub fn max_subset_of_dim(
    f: &Field,
    d: usize,
    lambda: &[Vec<Fe>],
    s: usize,
    budget: u64,
    policy: SearchPolicy,
) -> Result<SubsetSearch> {
    let all_dim = span_dim(f, d, lambda);
    if s >= all_dim {
        return Ok(SubsetSearch { indices: (0..lambda.len()).collect(), dim: all_dim, mode: SearchMode::Exhaustive });
    }
    if s == 0 {
        let idx: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i].iter().all(|c| c.is_zero())).collect();
        return Ok(SubsetSearch { indices: idx, dim: 0, mode: SearchMode::Exhaustive });
    }
    let needed = binomial(lambda.len() as u64, s as u64);
    if needed > budget as u128 {
        return match policy {
            SearchPolicy::ExhaustiveOnly => Err(Error::SearchTooLarge { needed, budget: budget as u128 }),
            SearchPolicy::AllowGreedy => Ok(greedy_subset(f, d, lambda, s)),
        };
    }
    let l = lambda.len();
    let mut seen: HashSet<Vec<Fe>> = HashSet::new();
    let mut best: Option<(usize, EchelonBasis)> = None;
    let mut comb: Vec<usize> = (0..s).collect();
    loop {
        let mut b = EchelonBasis::new(f.clone(), d);
        for &i in &comb {
            b.insert(&lambda[i]);
        }
        if seen.insert(b.key()) {
            let count = lambda.iter().filter(|v| b.contains(v)).count();
            if best.as_ref().map_or(true, |(c, _)| count > *c) {
                best = Some((count, b));
            }
        }
        // next combination in lexicographic order
        let mut i = s;
        while i > 0 && comb[i - 1] == l - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        comb[i - 1] += 1;
        for j in i..s {
            comb[j] = comb[j - 1] + 1;
        }
    }
    let (_, basis) = best.expect("at least one combination exists when s < dim Λ ≤ |Λ|");
    let indices = members(&basis, lambda);
    let sub: Vec<Vec<Fe>> = indices.iter().map(|&i| lambda[i].clone()).collect();
    Ok(SubsetSearch { dim: span_dim(f, d, &sub), indices, mode: SearchMode::Exhaustive })
}

/// Grows a subspace one dimension at a time, each time adding the element
/// whose inclusion captures the most of Λ.
fn greedy_subset(f: &Field, d: usize, lambda: &[Vec<Fe>], s: usize) -> SubsetSearch {
    let mut basis = EchelonBasis::new(f.clone(), d);
    while basis.dim() < s {
        let mut best: Option<(usize, EchelonBasis)> = None;
        for v in lambda {
            if basis.contains(v) {
                continue;
            }
            let mut nb = basis.clone();
            nb.insert(v);
            let count = lambda.iter().filter(|w| nb.contains(w)).count();
            if best.as_ref().map_or(true, |(c, _)| count > *c) {
                best = Some((count, nb));
            }
        }
        match best {
            Some((_, nb)) => basis = nb,
            None => break,
        }
    }
    let indices = members(&basis, lambda);
    let sub: Vec<Vec<Fe>> = indices.iter().map(|&i| lambda[i].clone()).collect();
    SubsetSearch { dim: span_dim(f, d, &sub), indices, mode: SearchMode::Greedy }
}

/// σ_p(Λ) > q^{−p} (1 + qT/L)^p, decided exactly.
pub fn subset_hypothesis_holds(sigma: &BigRational, q: u32, p: usize, t: usize, l: usize) -> bool {
    // σ q^p L^p > (L + qT)^p
    let lhs = sigma * BigRational::from_integer(num_traits::pow(BigInt::from(q as u64 * l as u64), p));
    let rhs = BigRational::from_integer(num_traits::pow(BigInt::from(l as u64 + q as u64 * t as u64), p));
    lhs > rhs
}

/// Largest T for which [`subset_hypothesis_holds`], if any T ≥ 0 qualifies.
pub fn largest_hypothesis_size(sigma: &BigRational, q: u32, p: usize, l: usize) -> Option<usize> {
    if !subset_hypothesis_holds(sigma, q, p, 0, l) {
        return None;
    }
    let (mut lo, mut hi) = (0usize, l + 1);
    while !subset_hypothesis_holds(sigma, q, p, hi, l) && lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if subset_hypothesis_holds(sigma, q, p, mid, l) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Γ ⊆ Λ with dim ≤ p and |Γ| ≥ T when one exists, found by exhaustive search.
pub fn find_subset_dim_le_p(
    f: &Field,
    d: usize,
    lambda: &[Vec<Fe>],
    p: usize,
    t: usize,
    budget: u64,
) -> Result<Option<SubsetSearch>> {
    if p >= d {
        return Err(Error::DomainError(format!("p = {p} must be below d = {d}")));
    }
    if t == 0 {
        return Ok(Some(SubsetSearch { indices: Vec::new(), dim: 0, mode: SearchMode::Exhaustive }));
    }
    let best = max_subset_of_dim(f, d, lambda, p, budget, SearchPolicy::ExhaustiveOnly)?;
    Ok((best.indices.len() >= t).then_some(best))
}

/// |Λ| · min{1/(2dq²), ζ/(qe)}.
pub fn extraction_size_bound(l: usize, d: usize, q: u32, zeta: Rational) -> f64 {
    let q = q as f64;
    let z = crate::rational::to_f64(&zeta);
    l as f64 * (1.0 / (2.0 * d as f64 * q * q)).min(z / (q * std::f64::consts::E))
}

/// q ≥ ℓ^{2/ζ}, decided exactly.
pub fn extraction_hypothesis_holds(q: u32, ell: usize, zeta: Rational) -> bool {
    // q^a ≥ ℓ^{2b} for ζ = a/b
    let (a, b) = (*zeta.numer() as usize, *zeta.denom() as usize);
    num_traits::pow(BigUint::from(q), a) >= num_traits::pow(BigUint::from(ell), 2 * b)
}

/// Certificate produced when Λ fails the average-goodness test.
#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub violating_p: usize,
    pub subset: SubsetSearch,
    pub size_bound: f64,
    pub dim_bound: usize,
    pub meets_bound: bool,
}

/// Returns `None` for good Λ; otherwise a low-dimensional Γ ⊆ Λ.
///
/// Dimensions s = 0, 1, …, ⌊(1−ζ)d⌋ are tried in turn and the first Γ of size at
/// least the guaranteed fraction is returned. If none reaches it the largest
/// search result is returned with `meets_bound = false`.
pub fn extract_low_dim_subset(
    f: &Field,
    d: usize,
    lambda: &[Vec<Fe>],
    zeta: Rational,
    ell: usize,
    budget: u64,
) -> Result<Option<Extraction>> {
    check_zeta(zeta)?;
    if !extraction_hypothesis_holds(f.q(), ell, zeta) {
        return Err(Error::HypothesisViolated(format!("q = {} is below ell^(2/zeta) for ell = {ell}, zeta = {zeta}", f.q())));
    }
    let report = is_good_average(f, d, lambda, zeta, ell)?;
    let Some(violating_p) = report.first_violation else { return Ok(None) };
    let bound = extraction_size_bound(lambda.len(), d, f.q(), zeta);
    let s_max = small_range_end(d, zeta);
    let mut last = None;
    for s in 0..=s_max {
        let sub = max_subset_of_dim(f, d, lambda, s, budget, SearchPolicy::ExhaustiveOnly)?;
        if sub.indices.len() as f64 >= bound {
            return Ok(Some(Extraction { violating_p, subset: sub, size_bound: bound, dim_bound: s_max, meets_bound: true }));
        }
        last = Some(sub);
    }
    let subset = last.expect("s = 0 is always tried");
    Ok(Some(Extraction { violating_p, subset, size_bound: bound, dim_bound: s_max, meets_bound: false }))
}

/// Histogram over x ∈ F^d of the top-ℓ count c_x = L · pl^(ℓ)_x(Λ).
fn top_count_histogram(f: &FieldSpec, d: usize, lambda: &[Vec<Fe>], ell: usize, include_zero: bool, cap: u64) -> Result<Vec<u64>> {
    if lambda.is_empty() {
        return Err(Error::EmptyLambda);
    }
    if ell == 0 || ell > f.q() as usize {
        return Err(Error::EllExceedsField { ell, q: f.q() });
    }
    let q = f.q() as u64;
    let total = q.checked_pow(d as u32).filter(|&t| t <= cap).ok_or(Error::EnumerationTooLarge {
        needed: (q as u128).saturating_pow(d as u32),
        cap: cap as u128,
    })?;
    let mut hist = vec![0u64; lambda.len() + 1];
    let mut x = vec![Fe::ZERO; d];
    for idx in 0..total {
        let mut t = idx;
        for c in x.iter_mut() {
            *c = Fe((t % q) as u16);
            t /= q;
        }
        if idx == 0 && !include_zero {
            continue;
        }
        hist[top_ell_count(&value_counts(f, &x, lambda), ell) as usize] += 1;
    }
    Ok(hist)
}

/// Options for the moment routines.
#[derive(Clone, Copy, Debug)]
pub struct MomentOptions {
    /// Include x = 0 in the uniform average over F^d.
    pub include_zero: bool,
    pub cap: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { include_zero: true, cap: DEFAULT_MOMENT_CAP }
    }
}

/// E_x (pl^(ℓ)_x(Λ) − μ)^p over uniform x ∈ F^d, exactly.
pub fn centered_moment_exact(
    f: &FieldSpec,
    d: usize,
    lambda: &[Vec<Fe>],
    p: usize,
    ell: usize,
    mu: &BigRational,
    opts: MomentOptions,
) -> Result<BigRational> {
    let hist = top_count_histogram(f, d, lambda, ell, opts.include_zero, opts.cap)?;
    Ok(moment_from_histogram(&hist, lambda.len(), p, mu))
}

/// E_x (pl^(ℓ)_x(Λ))^p over uniform x ∈ F^d, exactly.
pub fn raw_moment_exact(f: &FieldSpec, d: usize, lambda: &[Vec<Fe>], p: usize, ell: usize, opts: MomentOptions) -> Result<BigRational> {
    centered_moment_exact(f, d, lambda, p, ell, &BigRational::zero(), opts)
}

fn moment_from_histogram(hist: &[u64], l: usize, p: usize, mu: &BigRational) -> BigRational {
    let n: u64 = hist.iter().sum();
    let lb = BigRational::from_integer(BigInt::from(l));
    let mut acc = BigRational::zero();
    for (c, &h) in hist.iter().enumerate() {
        if h > 0 {
            let val = BigRational::from_integer(BigInt::from(c)) / &lb - mu;
            acc += num_traits::pow(val, p) * BigRational::from_integer(BigInt::from(h));
        }
    }
    acc / BigRational::from_integer(BigInt::from(n.max(1)))
}

/// One inequality of the moment suite, with both sides.
#[derive(Clone, Debug, Serialize)]
pub struct MomentCheck {
    pub kind: MomentKind,
    pub p: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// E(pl_x − 1/q)^p ≤ (2/q)^p for p ≤ (1−ζ)d.
    SmallPCentered,
    /// E(pl^(ℓ)_x)^p ≤ q ℓ^p σ_p for 1 ≤ p ≤ d.
    RawVersusSigma,
    /// E(pl^(ℓ)_x − ℓ/q)^p ≤ max{(ℓ/q)^p, d q^{1−d(1−2ζ)}} for (1−ζ)d < p ≤ d.
    LargePCentered,
}

/// Evaluates every moment inequality that applies to Λ at (d, ζ, ℓ).
pub fn moment_bound_checks(
    f: &Field,
    d: usize,
    lambda: &[Vec<Fe>],
    zeta: Rational,
    ell: usize,
    sigma: &[BigRational],
    opts: MomentOptions,
) -> Result<Vec<MomentCheck>> {
    check_zeta(zeta)?;
    let q = f.q();
    let qb = BigInt::from(q);
    let plain = top_count_histogram(f, d, lambda, 1, opts.include_zero, opts.cap)?;
    let topl = top_count_histogram(f, d, lambda, ell, opts.include_zero, opts.cap)?;
    let l = lambda.len();
    let inv_q = BigRational::new(BigInt::one(), qb.clone());
    let ell_q = BigRational::new(BigInt::from(ell), qb.clone());
    let mut out = Vec::new();
    for p in 1..=d {
        if in_small_range(p, d, zeta) {
            let lhs = moment_from_histogram(&plain, l, p, &inv_q);
            let rhs = num_traits::pow(BigRational::new(BigInt::from(2), qb.clone()), p);
            out.push(MomentCheck { kind: MomentKind::SmallPCentered, p, lhs: big_to_f64(&lhs), rhs: big_to_f64(&rhs), holds: lhs <= rhs });
        } else {
            let lhs = moment_from_histogram(&topl, l, p, &ell_q);
            let first = num_traits::pow(ell_q.clone(), p);
            // second = d q^{1 − d(1−2ζ)}; exponent (b − db + 2da)/b
            let (a, b) = (*zeta.numer(), *zeta.denom());
            let dd = d as i64;
            let e_num = b - dd * b + 2 * dd * a;
            let c = BigRational::from_integer(BigInt::from(d));
            let holds = lhs <= first || le_scaled_power(&lhs, &c, q as u64, e_num, b);
            let second = d as f64 * (q as f64).powf(e_num as f64 / b as f64);
            let rhs = big_to_f64(&first).max(second);
            out.push(MomentCheck { kind: MomentKind::LargePCentered, p, lhs: big_to_f64(&lhs), rhs, holds });
        }
        let raw = moment_from_histogram(&topl, l, p, &BigRational::zero());
        let rhs = BigRational::from_integer(BigInt::from(q) * num_traits::pow(BigInt::from(ell), p)) * &sigma[p - 1];
        out.push(MomentCheck { kind: MomentKind::RawVersusSigma, p, lhs: big_to_f64(&raw), rhs: big_to_f64(&rhs), holds: raw <= rhs });
    }
    Ok(out)
}

/// E(Z − μ)^p ≤ max{μ^p, E Z^p} for the empirical distribution of pl^(ℓ)_x.
pub fn centering_inequality_holds(
    f: &FieldSpec,
    d: usize,
    lambda: &[Vec<Fe>],
    p: usize,
    ell: usize,
    mu: Rational,
    opts: MomentOptions,
) -> Result<bool> {
    let mu = big(&mu);
    let lhs = centered_moment_exact(f, d, lambda, p, ell, &mu, opts)?;
    let raw = raw_moment_exact(f, d, lambda, p, ell, opts)?;
    let mp = num_traits::pow(mu, p);
    Ok(lhs <= mp || lhs <= raw)
}

/// Exact inner products as a helper for callers printing diagnostics.
pub fn inner_values(f: &FieldSpec, x: &[Fe], lambda: &[Vec<Fe>]) -> Vec<Fe> {
    lambda.iter().map(|v| dot(f, x, v)).collect()
}

/// Converts a σ value to `f64` for reporting.
pub fn sigma_to_f64(s: &BigRational) -> f64 {
    s.to_f64().unwrap_or_else(|| big_to_f64(s))
}
