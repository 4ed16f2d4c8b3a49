//! Exhaustive deciders for list decoding and list recovery of small codes.
//!
//! All four properties reduce to one search. A center is a choice of list
//! S_i ⊆ F_q (|S_i| = ℓ, ℓ = 1 for decoding) at every coordinate, and each
//! codeword scores its number of hits #{i : c_i ∈ S_i}. Plain properties look
//! at the L-th largest hit count, average-radius ones at the sum of the L
//! largest. Centers are explored depth-first with the bound "every remaining
//! coordinate could still hit", which is what makes exhaustive search feasible.

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::fqla::{coordinates, EchelonBasis, VectorFq, WitnessPair};
use crate::galois::{Fe, Field};
use crate::pluralities::{is_all_bad, is_average_bad, top_ell_count};
use crate::rational::{format_rational, serde_rational, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default cap on the number of centers (list collections) to search.
pub const DEFAULT_CENTER_CAP: u128 = 1 << 26;
/// Default cap on subset enumeration in the Ω oracle and witness searches.
pub const DEFAULT_SUBSET_CAP: u128 = 1 << 26;

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub codewords: u64,
    pub centers: u128,
    pub subsets: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { codewords: crate::codes::DEFAULT_CODEWORD_CAP, centers: DEFAULT_CENTER_CAP, subsets: DEFAULT_SUBSET_CAP }
    }
}

/// How the offending set Ω is chosen for a fixed center.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OmegaMode {
    /// Take the L best codewords directly.
    #[default]
    TopL,
    /// Enumerate every Ω with |Ω| ≥ L at every center, without pruning.
    /// Meant for validating the default mode on tiny codes.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub caps: Caps,
    pub omega: OmegaMode,
}

/// Which reading of the first parameter a list collection is reported under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Agreement,
    Disagreement,
}

/// A list collection S_1, …, S_n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryInstance {
    /// `lists[i]` holds the element indices of S_i in ascending order.
    pub lists: Vec<Vec<u32>>,
    pub ell: usize,
    pub convention: Convention,
}

/// Evidence that a property fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A received word z and the codewords it captures, as messages.
    Ball { center: Vec<u32>, omega: Vec<Vec<u32>> },
    /// A list collection and the codewords it captures, as messages.
    Lists { instance: RecoveryInstance, omega: Vec<Vec<u32>> },
}

/// Outcome of a check. `statistic` is the extremal value over all centers:
/// the L-th smallest distance for list decoding, the smallest mean distance of
/// L codewords for average-radius decoding, the L-th largest agreement for
/// list recovery and the largest mean agreement of L codewords for
/// average-radius recovery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(with = "serde_rational")]
    pub statistic: Rational,
    pub witness: Option<Witness>,
}

/// A decoding property with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Property {
    ListDecoding {
        #[serde(with = "serde_rational")]
        rho: Rational,
        big_l: usize,
    },
    AvgRadiusListDecoding {
        #[serde(with = "serde_rational")]
        rho: Rational,
        big_l: usize,
    },
    ListRecovery {
        #[serde(with = "serde_rational")]
        alpha: Rational,
        ell: usize,
        big_l: usize,
    },
    AvgRadiusListRecovery {
        #[serde(with = "serde_rational")]
        eps: Rational,
        ell: usize,
        big_l: usize,
    },
    ZeroErrorListRecovery {
        ell: usize,
        big_l: usize,
    },
}

impl Property {
    fn big_l(&self) -> usize {
        match *self {
            Property::ListDecoding { big_l, .. }
            | Property::AvgRadiusListDecoding { big_l, .. }
            | Property::ListRecovery { big_l, .. }
            | Property::AvgRadiusListRecovery { big_l, .. }
            | Property::ZeroErrorListRecovery { big_l, .. } => big_l,
        }
    }

    fn ell(&self) -> usize {
        match *self {
            Property::ListDecoding { .. } | Property::AvgRadiusListDecoding { .. } => 1,
            Property::ListRecovery { ell, .. } | Property::AvgRadiusListRecovery { ell, .. } | Property::ZeroErrorListRecovery { ell, .. } => ell,
        }
    }

    fn objective(&self) -> Objective {
        match self {
            Property::AvgRadiusListDecoding { .. } | Property::AvgRadiusListRecovery { .. } => Objective::TopSum,
            _ => Objective::KthLargest,
        }
    }
}

/// Agreement α corresponds to disagreement radius 1 − α.
pub fn agreement_to_radius(alpha: Rational) -> Rational {
    Rational::from_integer(1) - alpha
}

pub fn radius_to_agreement(rho: Rational) -> Rational {
    Rational::from_integer(1) - rho
}

/// Relative Hamming distance.
pub fn dist(y: &VectorFq, z: &VectorFq) -> Result<Rational> {
    if y.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), got: z.len() });
    }
    let diff = y.coords().iter().zip(z.coords()).filter(|(a, b)| a != b).count();
    Ok(Rational::new(diff as i64, y.len().max(1) as i64))
}

/// Fraction of coordinates where y_i is absent from column i of the ℓ × n list center z.
pub fn dist_list(z: &[Vec<Fe>], y: &VectorFq) -> Result<Rational> {
    let n = y.len();
    if let Some(bad) = z.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    let miss = (0..n).filter(|&i| z.iter().all(|row| row[i] != y.coords()[i])).count();
    Ok(Rational::new(miss as i64, n.max(1) as i64))
}

/// The distinct codewords of a code, each tagged with its smallest message index.
#[derive(Clone, Debug)]
pub struct Codebook {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub words: Vec<Vec<Fe>>,
    pub messages: Vec<u64>,
    /// `symbols[i][c]` is coordinate i of codeword c.
    symbols: Vec<Vec<u16>>,
}

impl Codebook {
    pub fn from_code(code: &LinearCode, cap: u64) -> Result<Codebook> {
        let (words, messages) = code.distinct_codewords(cap)?;
        let n = code.n();
        let symbols = (0..n).map(|i| words.iter().map(|w| w[i].0).collect()).collect();
        Ok(Codebook { field: code.field().clone(), n, k: code.k(), words, messages, symbols })
    }

    /// A code given as a list of words; repeated words count once and keep
    /// the position of their first occurrence as their message index.
    pub fn from_words(field: Field, k: usize, words: &[Vec<Fe>]) -> Result<Codebook> {
        let n = words.first().map_or(0, Vec::len);
        if let Some(bad) = words.iter().find(|w| w.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        let mut seen = std::collections::HashSet::with_capacity(words.len());
        let mut kept = Vec::new();
        let mut messages = Vec::new();
        for (i, w) in words.iter().enumerate() {
            if seen.insert(w) {
                kept.push(w.clone());
                messages.push(i as u64);
            }
        }
        let symbols = (0..n).map(|i| kept.iter().map(|w: &Vec<Fe>| w[i].0).collect()).collect();
        Ok(Codebook { field, n, k, words: kept, messages, symbols })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn message_vec(&self, c: usize) -> Vec<u32> {
        let q = self.field.q() as u64;
        let mut idx = self.messages[c];
        (0..self.k)
            .map(|_| {
                let d = idx % q;
                idx /= q;
                d as u32
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    /// The L-th largest hit count.
    KthLargest,
    /// The sum of the L largest hit counts.
    TopSum,
}

fn objective_value(hits: &[u32], l: usize, obj: Objective, scratch: &mut Vec<u32>) -> u64 {
    scratch.clear();
    scratch.extend_from_slice(hits);
    let (_, kth, _) = scratch.select_nth_unstable_by(l - 1, |a, b| b.cmp(a));
    let kth = *kth;
    match obj {
        Objective::KthLargest => kth as u64,
        Objective::TopSum => scratch[..l].iter().map(|&h| h as u64).sum(),
    }
}

/// All ℓ-subsets of F_q as membership masks, in lexicographic order.
fn list_choices(q: usize, ell: usize) -> Vec<Vec<bool>> {
    let ell = ell.min(q);
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (0..ell).collect();
    loop {
        let mut mask = vec![false; q];
        for &a in &comb {
            mask[a] = true;
        }
        out.push(mask);
        let mut i = ell;
        while i > 0 && comb[i - 1] == q - ell + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        comb[i - 1] += 1;
        for j in i..ell {
            comb[j] = comb[j - 1] + 1;
        }
    }
    out
}

struct Search<'a> {
    book: &'a Codebook,
    choices: &'a [Vec<bool>],
    l: usize,
    obj: Objective,
}

struct Best {
    value: u64,
    path: Vec<usize>,
}

impl Search<'_> {
    fn bound_slack(&self, remaining: usize) -> u64 {
        match self.obj {
            Objective::KthLargest => remaining as u64,
            Objective::TopSum => (self.l * remaining) as u64,
        }
    }

    fn apply(&self, i: usize, ch: usize, hits: &mut [u32], up: bool) {
        let mask = &self.choices[ch];
        for (h, &s) in hits.iter_mut().zip(&self.book.symbols[i]) {
            if mask[s as usize] {
                if up {
                    *h += 1;
                } else {
                    *h -= 1;
                }
            }
        }
    }

    fn dfs(&self, i: usize, hits: &mut Vec<u32>, path: &mut Vec<usize>, best: &mut Option<Best>, scratch: &mut Vec<u32>) {
        let n = self.book.n;
        let here = objective_value(hits, self.l, self.obj, scratch);
        if i == n {
            if best.as_ref().map_or(true, |b| here > b.value) {
                *best = Some(Best { value: here, path: path.clone() });
            }
            return;
        }
        if let Some(b) = best {
            if here + self.bound_slack(n - i) <= b.value {
                return;
            }
        }
        for ch in 0..self.choices.len() {
            self.apply(i, ch, hits, true);
            path.push(ch);
            self.dfs(i + 1, hits, path, best, scratch);
            path.pop();
            self.apply(i, ch, hits, false);
        }
    }

    /// Best center; ties go to the lexicographically first choice path.
    fn run(&self) -> Best {
        let n_words = self.book.len();
        if self.book.n == 0 {
            let hits = vec![0u32; n_words];
            return Best { value: objective_value(&hits, self.l, self.obj, &mut Vec::new()), path: Vec::new() };
        }
        let branches: Vec<Option<Best>> = (0..self.choices.len())
            .into_par_iter()
            .map(|ch| {
                let mut hits = vec![0u32; n_words];
                self.apply(0, ch, &mut hits, true);
                let mut best = None;
                let mut path = vec![ch];
                self.dfs(1, &mut hits, &mut path, &mut best, &mut Vec::with_capacity(n_words));
                best
            })
            .collect();
        let mut out: Option<Best> = None;
        for b in branches.into_iter().flatten() {
            if out.as_ref().map_or(true, |o| b.value > o.value) {
                out = Some(b);
            }
        }
        out.expect("at least one branch")
    }
}

fn hits_for(book: &Codebook, choices: &[Vec<bool>], path: &[usize]) -> Vec<u32> {
    let mut hits = vec![0u32; book.len()];
    for (i, &ch) in path.iter().enumerate() {
        for (h, &s) in hits.iter_mut().zip(&book.symbols[i]) {
            if choices[ch][s as usize] {
                *h += 1;
            }
        }
    }
    hits
}

/// Codeword indices ordered by hits descending, then by message index.
fn ranked(hits: &[u32], book: &Codebook) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..hits.len()).collect();
    idx.sort_by(|&a, &b| hits[b].cmp(&hits[a]).then(book.messages[a].cmp(&book.messages[b])));
    idx
}

fn validate(book: &Codebook, prop: &Property) -> Result<()> {
    if prop.big_l() == 0 {
        return Err(Error::InvalidInput("L must be at least 1".into()));
    }
    let ell = prop.ell();
    let q = book.field.q() as usize;
    if ell == 0 || ell > q {
        return Err(Error::EllExceedsField { ell, q: q as u32 });
    }
    Ok(())
}

fn center_count(q: usize, ell: usize, n: usize) -> u128 {
    let per = list_choices_len(q, ell);
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(per))
}

fn list_choices_len(q: usize, ell: usize) -> u128 {
    let ell = ell.min(q);
    let mut r: u128 = 1;
    for i in 0..ell {
        r = r * (q - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Whether a value of the search objective satisfies the property.
fn verdict_holds(prop: &Property, value: Rational) -> bool {
    let one = Rational::from_integer(1);
    match *prop {
        Property::ListDecoding { rho, .. } | Property::AvgRadiusListDecoding { rho, .. } => one - value >= rho,
        Property::ListRecovery { alpha, .. } if alpha == one => value < one,
        Property::ListRecovery { alpha, .. } => value <= alpha,
        Property::AvgRadiusListRecovery { eps, .. } => value <= eps,
        Property::ZeroErrorListRecovery { .. } => value < one,
    }
}

fn is_decoding(prop: &Property) -> bool {
    matches!(prop, Property::ListDecoding { .. } | Property::AvgRadiusListDecoding { .. })
}

/// Statistic reported for a normalised agreement value.
fn statistic_of(prop: &Property, value: Rational) -> Rational {
    if is_decoding(prop) {
        Rational::from_integer(1) - value
    } else {
        value
    }
}

/// Codewords a failing center captures: those past the threshold for the
/// plain properties, the L best for the average-radius ones.
fn offending(prop: &Property, hits: &[u32], book: &Codebook) -> Vec<usize> {
    let n = book.n as i64;
    let order = ranked(hits, book);
    let captured = |h: u32| -> bool {
        let agr = Rational::new(h as i64, n.max(1));
        match *prop {
            Property::ListDecoding { rho, .. } => Rational::from_integer(1) - agr < rho,
            Property::ListRecovery { alpha, .. } if alpha >= Rational::from_integer(1) => h as i64 == n,
            Property::ListRecovery { alpha, .. } => agr > alpha,
            Property::ZeroErrorListRecovery { .. } => h as i64 == n,
            _ => false,
        }
    };
    match prop.objective() {
        Objective::TopSum => order.into_iter().take(prop.big_l()).collect(),
        Objective::KthLargest => order.into_iter().filter(|&c| captured(hits[c])).collect(),
    }
}

fn build_witness(prop: &Property, book: &Codebook, choices: &[Vec<bool>], path: &[usize]) -> Witness {
    let hits = hits_for(book, choices, path);
    let mut omega: Vec<usize> = offending(prop, &hits, book);
    omega.sort_by_key(|&c| book.messages[c]);
    let omega = omega.into_iter().map(|c| book.message_vec(c)).collect();
    let lists: Vec<Vec<u32>> = path
        .iter()
        .map(|&ch| choices[ch].iter().enumerate().filter(|(_, &m)| m).map(|(a, _)| a as u32).collect())
        .collect();
    if is_decoding(prop) {
        Witness::Ball { center: lists.iter().map(|s| s[0]).collect(), omega }
    } else {
        let convention = Convention::Agreement;
        Witness::Lists { instance: RecoveryInstance { lists, ell: prop.ell(), convention }, omega }
    }
}

/// Decides `prop` for `code`.
pub fn check(code: &LinearCode, prop: &Property, opts: &CheckOptions) -> Result<Verdict> {
    let book = Codebook::from_code(code, opts.caps.codewords)?;
    check_codebook(&book, prop, opts)
}

pub fn check_codebook(book: &Codebook, prop: &Property, opts: &CheckOptions) -> Result<Verdict> {
    validate(book, prop)?;
    let l = prop.big_l();
    let n = book.n;
    let q = book.field.q() as usize;
    let obj = prop.objective();
    let one = Rational::from_integer(1);
    if l > book.len() {
        // No Ω of size L exists.
        let statistic = if is_decoding(prop) { one } else { Rational::from_integer(0) };
        return Ok(Verdict { holds: true, statistic, witness: None });
    }
    let centers = center_count(q, prop.ell(), n);
    if centers > opts.caps.centers {
        return Err(Error::EnumerationTooLarge { needed: centers, cap: opts.caps.centers });
    }
    let choices = list_choices(q, prop.ell());
    let (value, path) = match opts.omega {
        OmegaMode::TopL => {
            let best = Search { book, choices: &choices, l, obj }.run();
            let denom = match obj {
                Objective::KthLargest => n.max(1),
                Objective::TopSum => n.max(1) * l,
            };
            (Rational::new(best.value as i64, denom as i64), best.path)
        }
        OmegaMode::Exhaustive => exhaustive_omega(book, &choices, l, obj, centers, opts.caps.subsets)?,
    };
    let holds = verdict_holds(prop, value);
    let witness = (!holds).then(|| build_witness(prop, book, &choices, &path));
    Ok(Verdict { holds, statistic: statistic_of(prop, value), witness })
}

/// Every center and every Ω with |Ω| ≥ L, scored by min (plain) or mean
/// (average) hits over Ω. No bound is used.
fn exhaustive_omega(
    book: &Codebook,
    choices: &[Vec<bool>],
    l: usize,
    obj: Objective,
    centers: u128,
    cap: u128,
) -> Result<(Rational, Vec<usize>)> {
    let m = book.len();
    let needed = if m >= 100 { u128::MAX } else { centers.saturating_mul(1u128 << m) };
    if m > 24 || needed > cap {
        return Err(Error::SearchTooLarge { needed, budget: cap });
    }
    let n = book.n;
    let mut path = vec![0usize; n];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let full = 1usize << m;
    let mut sums = vec![0u64; full];
    let mut mins = vec![u32::MAX; full];
    loop {
        let hits = hits_for(book, choices, &path);
        let mut center_best: Option<Rational> = None;
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            sums[mask] = sums[rest] + hits[low] as u64;
            mins[mask] = mins[rest].min(hits[low]);
            let size = mask.count_ones() as usize;
            if size < l {
                continue;
            }
            let v = match obj {
                Objective::KthLargest => Rational::new(mins[mask] as i64, n.max(1) as i64),
                Objective::TopSum => Rational::new(sums[mask] as i64, (n.max(1) * size) as i64),
            };
            if center_best.map_or(true, |b| v > b) {
                center_best = Some(v);
            }
        }
        let v = center_best.expect("l ≤ |C| guarantees a subset");
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, path.clone()));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best.expect("at least one center"));
            }
            i -= 1;
            path[i] += 1;
            if path[i] < choices.len() {
                break;
            }
            path[i] = 0;
        }
    }
}

/// Every z has fewer than L codewords at distance < ρ.
pub fn check_list_decodable(code: &LinearCode, rho: Rational, big_l: usize) -> Result<Verdict> {
    check(code, &Property::ListDecoding { rho, big_l }, &CheckOptions::default())
}

/// Every z has mean distance ≥ ρ to any L codewords.
pub fn check_avg_radius_list_decodable(code: &LinearCode, rho: Rational, big_l: usize) -> Result<Verdict> {
    check(code, &Property::AvgRadiusListDecoding { rho, big_l }, &CheckOptions::default())
}

/// Every list collection leaves some codeword of any L-set with agreement ≤ α.
/// At α = 1 this is read as zero-error list recovery.
pub fn check_list_recoverable(code: &LinearCode, alpha: Rational, ell: usize, big_l: usize) -> Result<Verdict> {
    check(code, &Property::ListRecovery { alpha, ell, big_l }, &CheckOptions::default())
}

/// Every list collection has mean agreement ≤ ε over any L codewords.
pub fn check_avg_radius_list_recoverable(code: &LinearCode, eps: Rational, ell: usize, big_l: usize) -> Result<Verdict> {
    check(code, &Property::AvgRadiusListRecovery { eps, ell, big_l }, &CheckOptions::default())
}

/// Fewer than L codewords lie in any ℓ × ⋯ × ℓ rectangle.
pub fn check_zero_error_lr(code: &LinearCode, ell: usize, big_l: usize) -> Result<Verdict> {
    check(code, &Property::ZeroErrorListRecovery { ell, big_l }, &CheckOptions::default())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |r, i| r.saturating_mul((n - i) as u128) / (i + 1) as u128)
}

/// Turns L codewords into a witness pair: X has as columns a basis of their
/// span drawn from the set itself, and Λ holds their coordinates.
fn pair_from_codewords(book: &Codebook, set: &[usize]) -> WitnessPair {
    let f = &book.field;
    let mut eb = EchelonBasis::new(f.clone(), book.n);
    let mut basis: Vec<Vec<Fe>> = Vec::new();
    for &c in set {
        if eb.insert(&book.words[c]) {
            basis.push(book.words[c].clone());
        }
    }
    let d = basis.len();
    let x: Vec<Vec<Fe>> = (0..book.n).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
    let lambda: Vec<Vec<Fe>> = set
        .iter()
        .map(|&c| coordinates(f, &basis, &book.words[c]).expect("codeword lies in the span of its own set"))
        .collect();
    WitnessPair::new(f.clone(), d, x, lambda).expect("distinct codewords give distinct coordinates")
}

struct SubsetSearch<'a> {
    book: &'a Codebook,
    l: usize,
    ell: usize,
    d_max: usize,
    track_dim: bool,
    /// Accept when the score strictly exceeds this many hits (average case).
    threshold: Option<(i64, i64)>,
    visited: u128,
}

impl SubsetSearch<'_> {
    fn score(&self, counts: &[Vec<u32>]) -> u64 {
        counts.iter().map(|c| top_ell_count(c, self.ell) as u64).sum()
    }

    fn rectangle_ok(&self, counts: &[Vec<u32>]) -> bool {
        counts.iter().all(|c| c.iter().filter(|&&x| x > 0).count() <= self.ell)
    }

    fn dfs(&mut self, start: usize, set: &mut Vec<usize>, counts: &mut Vec<Vec<u32>>, basis: &EchelonBasis) -> bool {
        self.visited += 1;
        let n = self.book.n as i64;
        let depth = set.len();
        match self.threshold {
            Some((num, den)) => {
                let cur = self.score(counts) as i64;
                let rem = (self.l - depth) as i64;
                // even full hits on every remaining pick cannot exceed ε n L
                if (cur + rem * n) * den <= num * n * self.l as i64 {
                    return false;
                }
                if depth == self.l {
                    return true;
                }
            }
            None => {
                if !self.rectangle_ok(counts) {
                    return false;
                }
                if depth == self.l {
                    return true;
                }
            }
        }
        let m = self.book.len();
        for c in start..=(m - (self.l - depth)) {
            let mut nb = basis.clone();
            if self.track_dim {
                nb.insert(&self.book.words[c]);
                if nb.dim() > self.d_max {
                    continue;
                }
            }
            for (i, cnt) in counts.iter_mut().enumerate() {
                cnt[self.book.symbols[i][c] as usize] += 1;
            }
            set.push(c);
            if self.dfs(c + 1, set, counts, &nb) {
                return true;
            }
            set.pop();
            for (i, cnt) in counts.iter_mut().enumerate() {
                cnt[self.book.symbols[i][c] as usize] -= 1;
            }
        }
        false
    }
}

fn witness_search(book: &Codebook, l: usize, ell: usize, d_max: usize, threshold: Option<Rational>, cap: u128) -> Result<Option<WitnessPair>> {
    let q = book.field.q() as usize;
    if l == 0 {
        return Err(Error::InvalidInput("L must be at least 1".into()));
    }
    if ell == 0 || ell > q {
        return Err(Error::EllExceedsField { ell, q: q as u32 });
    }
    if l > book.len() {
        return Ok(None);
    }
    let needed = binomial(book.len(), l);
    if needed > cap {
        return Err(Error::EnumerationTooLarge { needed, cap });
    }
    let rank = {
        let mut eb = EchelonBasis::new(book.field.clone(), book.n);
        for w in &book.words {
            eb.insert(w);
        }
        eb.dim()
    };
    let mut s = SubsetSearch {
        book,
        l,
        ell,
        d_max,
        track_dim: d_max < rank,
        threshold: threshold.map(|t| (*t.numer(), *t.denom())),
        visited: 0,
    };
    let mut set = Vec::with_capacity(l);
    let mut counts = vec![vec![0u32; q]; book.n];
    let basis = EchelonBasis::new(book.field.clone(), book.n);
    if s.dfs(0, &mut set, &mut counts, &basis) {
        Ok(Some(pair_from_codewords(book, &set)))
    } else {
        Ok(None)
    }
}

/// An (L, d, ε, ℓ)-average-bad pair with columns of X in C and d ≤ `d_max`.
///
/// Searches L-sets of distinct codewords whose best list collection gives mean
/// agreement strictly above ε, so that a result exists exactly when the
/// average-radius check fails. The returned pair satisfies the (non-strict)
/// badness predicate and is re-verified before being returned.
pub fn find_average_bad_witness(code: &LinearCode, eps: Rational, ell: usize, big_l: usize, d_max: usize) -> Result<Option<WitnessPair>> {
    let book = Codebook::from_code(code, Caps::default().codewords)?;
    find_average_bad_witness_in(&book, code, eps, ell, big_l, d_max, Caps::default().subsets)
}

pub fn find_average_bad_witness_in(
    book: &Codebook,
    code: &LinearCode,
    eps: Rational,
    ell: usize,
    big_l: usize,
    d_max: usize,
    subset_cap: u128,
) -> Result<Option<WitnessPair>> {
    let found = witness_search(book, big_l, ell, d_max, Some(eps), subset_cap)?;
    if let Some(w) = &found {
        let ok = is_average_bad(w, big_l, w.d(), eps, ell) && crate::codes::contains_cols(code, w.x())?;
        if !ok {
            return Err(Error::ConstraintViolated("witness failed re-verification".into()));
        }
    }
    Ok(found)
}

/// An (L, d, ℓ)-all-bad pair with columns of X in C and d ≤ `d_max`.
pub fn find_all_bad_witness(code: &LinearCode, ell: usize, big_l: usize, d_max: usize) -> Result<Option<WitnessPair>> {
    let book = Codebook::from_code(code, Caps::default().codewords)?;
    let found = witness_search(&book, big_l, ell, d_max, None, Caps::default().subsets)?;
    if let Some(w) = &found {
        if !(is_all_bad(w, big_l, w.d(), ell) && crate::codes::contains_cols(code, w.x())?) {
            return Err(Error::ConstraintViolated("witness failed re-verification".into()));
        }
    }
    Ok(found)
}

/// Recomputes the witness of a failing verdict from scratch and confirms it
/// violates `prop`. Holding verdicts must carry no witness.
pub fn reverify(code: &LinearCode, prop: &Property, verdict: &Verdict) -> Result<bool> {
    let Some(w) = &verdict.witness else { return Ok(verdict.holds) };
    if verdict.holds {
        return Ok(false);
    }
    let f = code.field();
    let n = code.n();
    let (lists, omega): (Vec<Vec<u32>>, &Vec<Vec<u32>>) = match w {
        Witness::Ball { center, omega } => (center.iter().map(|&a| vec![a]).collect(), omega),
        Witness::Lists { instance, omega } => {
            if instance.lists.iter().any(|s| s.len() > instance.ell) {
                return Ok(false);
            }
            (instance.lists.clone(), omega)
        }
    };
    if lists.len() != n {
        return Ok(false);
    }
    let mut words = Vec::new();
    for m in omega {
        let v = VectorFq::from_indices(f.clone(), m)?;
        words.push(code.encode(&v)?.into_coords());
    }
    let mut distinct = words.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != words.len() || words.len() < prop.big_l() {
        return Ok(false);
    }
    let agreement = |c: &Vec<Fe>| -> Rational {
        let h = (0..n).filter(|&i| lists[i].contains(&(c[i].0 as u32))).count();
        Rational::new(h as i64, n.max(1) as i64)
    };
    let one = Rational::from_integer(1);
    let agr: Vec<Rational> = words.iter().map(agreement).collect();
    let min = agr.iter().copied().min().unwrap_or(one);
    let mean = agr.iter().copied().fold(Rational::from_integer(0), |a, b| a + b) / Rational::from_integer(agr.len() as i64);
    Ok(match *prop {
        Property::ListDecoding { rho, .. } => agr.iter().all(|&a| one - a < rho),
        Property::AvgRadiusListDecoding { rho, .. } => one - mean < rho,
        Property::ListRecovery { alpha, .. } if alpha >= one => min == one,
        Property::ListRecovery { alpha, .. } => min > alpha,
        Property::AvgRadiusListRecovery { eps, .. } => mean > eps,
        Property::ZeroErrorListRecovery { .. } => min == one,
    })
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (statistic {})", if self.holds { "holds" } else { "fails" }, format_rational(&self.statistic))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{sample_with_dimension, SampleOptions};
    use crate::fqla::MatrixFq;
    use crate::galois::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u32) -> Field {
        FieldSpec::shared(q).unwrap()
    }

    fn code(q: u32, rows: &[Vec<u32>]) -> LinearCode {
        LinearCode::new(MatrixFq::from_index_rows(fq(q), rows).unwrap()).unwrap()
    }

    fn rq(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn random_code(rng: &mut ChaCha8Rng, q: u32, n: usize, k: usize) -> LinearCode {
        sample_with_dimension(fq(q), n, k, rng, SampleOptions::default()).unwrap()
    }

    /// Straight from the definitions: every center, every Ω as a bitmask.
    fn naive(code: &LinearCode, prop: &Property) -> bool {
        let book = Codebook::from_code(code, 1 << 12).unwrap();
        let q = code.field().q() as usize;
        let n = code.n();
        let choices = list_choices(q, prop.ell());
        let m = book.len();
        let l = prop.big_l();
        let one = rq(1, 1);
        let total = choices.len().pow(n as u32);
        for idx in 0..total {
            let mut t = idx;
            let path: Vec<usize> = (0..n)
                .map(|_| {
                    let c = t % choices.len();
                    t /= choices.len();
                    c
                })
                .collect();
            let agr: Vec<Rational> = hits_for(&book, &choices, &path).iter().map(|&h| rq(h as i64, n as i64)).collect();
            for mask in 1usize..(1 << m) {
                if (mask.count_ones() as usize) < l {
                    continue;
                }
                let set: Vec<Rational> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| agr[b]).collect();
                let min = *set.iter().min().unwrap();
                let mean = set.iter().fold(rq(0, 1), |a, b| a + b) / rq(set.len() as i64, 1);
                let violated = match *prop {
                    Property::ListDecoding { rho, .. } => set.iter().all(|&a| one - a < rho),
                    Property::AvgRadiusListDecoding { rho, .. } => one - mean < rho,
                    Property::ListRecovery { alpha, .. } if alpha == one => min == one,
                    Property::ListRecovery { alpha, .. } => min > alpha,
                    Property::AvgRadiusListRecovery { eps, .. } => mean > eps,
                    Property::ZeroErrorListRecovery { .. } => min == one,
                };
                if violated {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn dist_examples() {
        let f = fq(2);
        let y = VectorFq::from_indices(f.clone(), &[0, 1, 1]).unwrap();
        let z = VectorFq::from_indices(f.clone(), &[0, 0, 1]).unwrap();
        assert_eq!(dist(&y, &z).unwrap(), rq(1, 3));
        assert_eq!(dist(&y, &y).unwrap(), rq(0, 1));
        let w = VectorFq::from_indices(f.clone(), &[1, 0, 0]).unwrap();
        assert_eq!(dist(&y, &w).unwrap(), rq(1, 1));
        assert!(dist(&y, &VectorFq::zero(f.clone(), 2)).is_err());
        assert_eq!(dist_list(&[z.coords().to_vec()], &y).unwrap(), rq(1, 3));
        let both = vec![vec![Fe(0); 3], vec![Fe(1); 3]];
        assert_eq!(dist_list(&both, &y).unwrap(), rq(0, 1));
        assert!(dist_list(&[vec![Fe(0); 2]], &y).is_err());
    }

    #[test]
    fn list_decoding_examples() {
        let whole = code(2, &[vec![1, 0], vec![0, 1]]);
        assert!(check_list_decodable(&whole, rq(1, 2), 2).unwrap().holds);
        assert!(!check_list_decodable(&whole, rq(3, 4), 2).unwrap().holds);
        assert!(check_list_decodable(&whole, rq(1, 1), 5).unwrap().holds);
        assert!(check_list_decodable(&whole, rq(0, 1), 1).unwrap().holds);
        let zero = code(3, &[vec![0], vec![0]]);
        let v = check_avg_radius_list_decodable(&zero, rq(1, 10), 1).unwrap();
        assert!(!v.holds);
        assert_eq!(v.statistic, rq(0, 1));
        assert!(reverify(&zero, &Property::AvgRadiusListDecoding { rho: rq(1, 10), big_l: 1 }, &v).unwrap());
    }

    #[test]
    fn list_decoding_boundary_is_strict() {
        // repetition code of length 4: the two codewords are at distance 1,
        // z = 0011 sits at distance exactly 1/2 from both.
        let rep = code(2, &[vec![1], vec![1], vec![1], vec![1]]);
        let v = check_list_decodable(&rep, rq(1, 2), 2).unwrap();
        assert!(v.holds);
        assert_eq!(v.statistic, rq(1, 2));
        assert!(!check_list_decodable(&rep, rq(51, 100), 2).unwrap().holds);
        let a = check_avg_radius_list_decodable(&rep, rq(1, 2), 2).unwrap();
        assert!(a.holds);
        assert_eq!(a.statistic, rq(1, 2));
    }

    #[test]
    fn recovery_examples() {
        let rep = code(2, &[vec![1], vec![1], vec![1]]);
        assert!(check_zero_error_lr(&rep, 1, 2).unwrap().holds);
        assert!(!check_zero_error_lr(&rep, 2, 2).unwrap().holds);
        assert!(check_zero_error_lr(&rep, 2, 3).unwrap().holds);
        let c = code(3, &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(check_avg_radius_list_recoverable(&c, rq(1, 1), 2, 3).unwrap().holds);
        assert!(check_list_recoverable(&c, rq(1, 2), 1, 20).unwrap().holds);
        let v = check_avg_radius_list_recoverable(&c, rq(1, 2), 2, 3).unwrap();
        assert!(!v.holds);
        assert!(reverify(&c, &Property::AvgRadiusListRecovery { eps: rq(1, 2), ell: 2, big_l: 3 }, &v).unwrap());
        assert!(check_list_recoverable(&c, rq(1, 2), 4, 2).is_err());
        assert!(check_list_recoverable(&c, rq(1, 2), 1, 0).is_err());
    }

    #[test]
    fn repetition_code_zero_error_by_rectangles() {
        for n in 1..=10usize {
            let rep = code(2, &vec![vec![1]; n]);
            assert!(check_zero_error_lr(&rep, 1, 2).unwrap().holds);
        }
    }

    #[test]
    fn witness_json_round_trip() {
        let c = code(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let v = check_list_recoverable(&c, rq(1, 3), 1, 2).unwrap();
        assert!(!v.holds);
        let s = serde_json::to_string(&v).unwrap();
        let back: Verdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let p = Property::ListRecovery { alpha: rq(1, 3), ell: 1, big_l: 2 };
        let ps = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Property>(&ps).unwrap(), p);
    }

    #[test]
    fn checkers_match_naive_definitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let q = [2u32, 3][rng.gen_range(0..2)];
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=2.min(n));
            let c = random_code(&mut rng, q, n, k);
            let big_l = rng.gen_range(1..=3);
            let ell = rng.gen_range(1..=2.min(q as usize));
            let num = rng.gen_range(0..=n as i64);
            let r = rq(num, n as i64);
            let props = [
                Property::ListDecoding { rho: r, big_l },
                Property::AvgRadiusListDecoding { rho: r, big_l },
                Property::ListRecovery { alpha: r, ell, big_l },
                Property::ListRecovery { alpha: rq(1, 1), ell, big_l },
                Property::AvgRadiusListRecovery { eps: r, ell, big_l },
                Property::ZeroErrorListRecovery { ell, big_l },
            ];
            for p in props {
                let v = check(&c, &p, &CheckOptions::default()).unwrap();
                assert_eq!(v.holds, naive(&c, &p), "{p:?}");
                assert!(reverify(&c, &p, &v).unwrap());
                let ex = check(&c, &p, &CheckOptions { omega: OmegaMode::Exhaustive, ..Default::default() }).unwrap();
                assert_eq!(ex.holds, v.holds);
                assert_eq!(ex.statistic, v.statistic);
            }
        }
    }

    #[test]
    fn hierarchy_and_reductions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..80 {
            let q = [2u32, 3, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=2);
            let c = random_code(&mut rng, q, n, k);
            let big_l = rng.gen_range(1..=4);
            let ell = rng.gen_range(1..=2);
            let eps = rq(rng.gen_range(0..n as i64), n as i64);
            let ar = check_avg_radius_list_recoverable(&c, eps, ell, big_l).unwrap();
            let lr = check_list_recoverable(&c, eps, ell, big_l).unwrap();
            if ar.holds {
                assert!(lr.holds);
            }
            let ar1 = check_avg_radius_list_recoverable(&c, eps, 1, big_l).unwrap();
            let ald = check_avg_radius_list_decodable(&c, rq(1, 1) - eps, big_l).unwrap();
            let ld = check_list_decodable(&c, rq(1, 1) - eps, big_l).unwrap();
            if ar1.holds {
                assert!(ald.holds);
            }
            if ald.holds {
                assert!(ld.holds);
            }
            let lr1 = check_list_recoverable(&c, eps, 1, big_l).unwrap();
            assert_eq!(lr1.holds, ld.holds);
            assert_eq!(lr1.statistic, rq(1, 1) - ld.statistic);
            assert_eq!(ar1.statistic, rq(1, 1) - ald.statistic);
            let z = check_zero_error_lr(&c, ell, big_l).unwrap();
            assert_eq!(z, check_list_recoverable(&c, rq(1, 1), ell, big_l).unwrap());
        }
    }

    #[test]
    fn witness_search_agrees_with_checker() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..60 {
            let q = [2u32, 3, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=3.min(n));
            let c = random_code(&mut rng, q, n, k);
            let big_l = rng.gen_range(1..=4);
            let ell = rng.gen_range(1..=2);
            let eps = rq(rng.gen_range(0..=2 * n as i64), 2 * n as i64);
            let v = check_avg_radius_list_recoverable(&c, eps, ell, big_l).unwrap();
            let w = find_average_bad_witness(&c, eps, ell, big_l, k).unwrap();
            assert_eq!(v.holds, w.is_none());
            let z = check_zero_error_lr(&c, ell, big_l).unwrap();
            let a = find_all_bad_witness(&c, ell, big_l, k).unwrap();
            assert_eq!(z.holds, a.is_none());
        }
    }

    #[test]
    fn witness_with_no_dimension_budget() {
        let c = code(3, &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(find_average_bad_witness(&c, rq(0, 1), 1, 2, 0).unwrap().is_none());
        // L = 1 is met by the zero codeword alone, a zero-dimensional witness.
        let w = find_average_bad_witness(&c, rq(1, 2), 1, 1, 0).unwrap().unwrap();
        assert_eq!(w.d(), 0);
    }

    #[test]
    fn ties_at_the_boundary_rank_do_not_change_the_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let m = rng.gen_range(2..10);
            let hits: Vec<u32> = (0..m).map(|_| rng.gen_range(0..4)).collect();
            let l = rng.gen_range(1..=m);
            let mut sorted = hits.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let top: u64 = sorted[..l].iter().map(|&h| h as u64).sum();
            assert_eq!(objective_value(&hits, l, Objective::TopSum, &mut Vec::new()), top);
            assert_eq!(objective_value(&hits, l, Objective::KthLargest, &mut Vec::new()), sorted[l - 1] as u64);
            // any L-set with the same multiset of hits at the top has the same sum;
            // a larger set never has a larger mean
            for extra in l..m {
                let s: u64 = sorted[..=extra].iter().map(|&h| h as u64).sum();
                assert!(s * l as u64 <= top * (extra + 1) as u64);
            }
        }
    }

    #[test]
    fn center_cap_is_enforced() {
        let c = code(2, &vec![vec![1]; 30]);
        let opts = CheckOptions { caps: Caps { centers: 1 << 20, ..Caps::default() }, ..Default::default() };
        assert!(matches!(
            check(&c, &Property::ListDecoding { rho: rq(1, 2), big_l: 2 }, &opts),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
