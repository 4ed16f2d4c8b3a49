//! Closed-form rate, list-size, entropy and volume calculators.
//!
//! Reals are `f64`; Hamming volumes are exact. `log` is the natural logarithm
//! and `exp_b(x)` means b^x. List-size bounds overflow `f64` quickly, so they
//! are reported through their natural logarithm as well.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use std::io::Write;

fn domain(msg: impl Into<String>) -> Error {
    Error::DomainError(msg.into())
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// H_q(x) = x log_q(q−1) − x log_q x − (1−x) log_q(1−x), for real q > 1.
pub fn entropy_q(x: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(domain(format!("entropy argument {x} outside [0, 1]")));
    }
    if !(q > 1.0) {
        return Err(domain(format!("entropy base {q} must exceed 1")));
    }
    let lq = q.ln();
    let mixed = if x == 0.0 { 0.0 } else { x * (q - 1.0).ln() };
    Ok((mixed - xlogx(x) - xlogx(1.0 - x)) / lq)
}

/// Binary entropy.
pub fn h2(x: f64) -> Result<f64> {
    entropy_q(x, 2.0)
}

/// Radius on which the expansion of H_q(1 − 1/q − x) converges.
pub fn uniform_expansion_radius(q: f64) -> f64 {
    (1.0 / q).min(1.0 - 1.0 / q)
}

/// Truncated series for H_q(1 − 1/q − x):
/// 1 + Σ_{j=1}^{terms} (−1)^j / (j(j+1)) · (1 − (−1/(q−1))^j) · q^j / ln q · x^{j+1}.
pub fn entropy_expansion_around_uniform(x: f64, q: f64, terms: usize) -> Result<f64> {
    if !(q > 1.0) {
        return Err(domain(format!("base {q} must exceed 1")));
    }
    let r = uniform_expansion_radius(q);
    if x.abs() >= r {
        return Err(domain(format!("|x| = {} is outside the convergence radius {r}", x.abs())));
    }
    let lq = q.ln();
    let mut sum = 1.0;
    let mut qx = 1.0; // (q x)^j
    let mut alt = 1.0; // (−1/(q−1))^j
    for j in 1..=terms {
        qx *= q * x;
        alt *= -1.0 / (q - 1.0);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (j * (j + 1)) as f64 * (1.0 - alt) * qx * x / lq;
    }
    Ok(sum)
}

/// Truncated series for H_q(y) in powers of 1/q:
/// y + H_2(y)/log_2 q − (y / ln q) Σ_{j=1}^{terms} q^{−j}/j.
pub fn entropy_expansion_large_q(y: f64, q: f64, terms: usize) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(domain(format!("y = {y} must lie in (0, 1)")));
    }
    if !(q > 1.0) {
        return Err(domain(format!("base {q} must exceed 1")));
    }
    let tail: f64 = (1..=terms).map(|j| q.powi(-(j as i32)) / j as f64).sum();
    Ok(y + h2(y)? / q.log2() - y / q.ln() * tail)
}

/// Σ_{i=0}^{⌊ρn⌋} C(n, i)(q − 1)^i.
pub fn hamming_volume(q: u64, n: usize, rho: Rational) -> Result<BigUint> {
    if q < 2 {
        return Err(domain(format!("alphabet size {q} must be at least 2")));
    }
    if rho < Rational::from_integer(0) || rho > Rational::from_integer(1) {
        return Err(domain(format!("radius {rho} outside [0, 1]")));
    }
    let radius = (rho * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let mut term = BigUint::one(); // C(n, i)(q−1)^i
    let mut total = BigUint::zero();
    for i in 0..=radius {
        if i > 0 {
            term = term * BigUint::from((n - i + 1) as u64) * BigUint::from(q - 1) / BigUint::from(i as u64);
        }
        total += &term;
    }
    Ok(total)
}

/// Natural logarithm of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// (1/n) log_q Vol_q^n(ρ).
pub fn volume_rate(q: u64, n: usize, rho: Rational) -> Result<f64> {
    if n == 0 {
        return Err(domain("block length must be positive"));
    }
    Ok(ln_big(&hamming_volume(q, n, rho)?) / (n as f64 * (q as f64).ln()))
}

/// 1 − H_q(ρ).
pub fn ld_capacity(q: f64, rho: f64) -> Result<f64> {
    Ok(1.0 - entropy_q(rho, q)?)
}

/// 1 − H_{q/ℓ}(1 − α) − log_q ℓ.
pub fn lr_capacity(q: f64, ell: f64, alpha: f64) -> Result<f64> {
    if !(q / ell > 1.0) {
        return Err(domain(format!("q/ell = {} must exceed 1", q / ell)));
    }
    Ok(1.0 - entropy_q(1.0 - alpha, q / ell)? - ell.ln() / q.ln())
}

/// The centering term in the average-radius theorem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MuBar {
    #[default]
    Zero,
    EllOverQ,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateBoundParams {
    pub q: f64,
    pub ell: f64,
    pub eps: f64,
    pub eta: f64,
    pub zeta: f64,
    pub xi: f64,
    pub mu_bar: MuBar,
}

impl RateBoundParams {
    /// (q+1)^{ζ/(2(1−ζ))} when μ̄ = 0, otherwise 2.
    pub fn beta(&self) -> f64 {
        match self.mu_bar {
            MuBar::Zero => (self.q + 1.0).powf(self.zeta / (2.0 * (1.0 - self.zeta))),
            MuBar::EllOverQ => 2.0,
        }
    }

    pub fn mu(&self) -> f64 {
        match self.mu_bar {
            MuBar::Zero => 0.0,
            MuBar::EllOverQ => self.ell / self.q,
        }
    }

    /// β ℓ/q + μ̄.
    pub fn offset(&self) -> f64 {
        self.beta() * self.ell / self.q + self.mu()
    }

    /// (1−ζ)(ε−η) > β ℓ/q + μ̄ and ζ ≤ 1/20.
    pub fn constraint_holds(&self) -> bool {
        (1.0 - self.zeta) * (self.eps - self.eta) > self.offset() && self.zeta <= 0.05
    }

    /// q ≥ max{2, ℓ^{2/ζ}}.
    pub fn field_size_holds(&self) -> bool {
        self.q >= 2.0_f64.max(self.ell.powf(2.0 / self.zeta))
    }

    fn check_ranges(&self) -> Result<()> {
        for (name, v) in [("eta", self.eta), ("zeta", self.zeta), ("xi", self.xi)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(domain(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if !(self.q > self.ell && self.ell >= 1.0) {
            return Err(domain(format!("need 1 <= ell < q, got ell = {}, q = {}", self.ell, self.q)));
        }
        Ok(())
    }
}

/// Which term of a two-term minimum is smaller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Linear,
    Entropy,
}

impl Binding {
    fn of(linear: f64, entropy: f64) -> Binding {
        if linear <= entropy {
            Binding::Linear
        } else {
            Binding::Entropy
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Binding::Linear => "R0",
            Binding::Entropy => "R1",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateBound {
    pub value: f64,
    pub linear: f64,
    pub entropy: f64,
    pub binding: Binding,
    pub field_size_ok: bool,
}

/// min{(ε − βℓ/q − μ̄)(1 − 5ζ) − η, 1 − H_{q/ℓ}(1 − ε + η) − log_q ℓ − ξ}.
pub fn thm_avgrad_rate(p: &RateBoundParams) -> Result<RateBound> {
    p.check_ranges()?;
    if !p.constraint_holds() {
        return Err(Error::ConstraintViolated(format!(
            "(1 - zeta)(eps - eta) = {} must exceed beta ell/q + mu = {} with zeta <= 1/20",
            (1.0 - p.zeta) * (p.eps - p.eta),
            p.offset()
        )));
    }
    let linear = (p.eps - p.offset()) * (1.0 - 5.0 * p.zeta) - p.eta;
    let entropy = lr_capacity(p.q, p.ell, p.eps - p.eta)? - p.xi;
    Ok(RateBound { value: linear.min(entropy), linear, entropy, binding: Binding::of(linear, entropy), field_size_ok: p.field_size_holds() })
}

/// A bound reported with its natural logarithm; `value` is infinite on overflow.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogValue {
    pub ln: f64,
    pub value: f64,
}

impl LogValue {
    fn from_ln(ln: f64) -> LogValue {
        LogValue { ln, value: ln.exp() }
    }
}

/// ((1−ε+η)/η) · (qℓ/ξ)^{C′ log(ℓζ/ξ)/ζ} · (1/(ε−η))^{C′ log²(ℓζ/ξ)/ζ³}.
pub fn thm_avgrad_list_size(p: &RateBoundParams, c_prime: f64) -> Result<LogValue> {
    p.check_ranges()?;
    if !(p.eps > p.eta) {
        return Err(domain("eps must exceed eta"));
    }
    if !(c_prime > 0.0) {
        return Err(domain("the constant C' must be positive"));
    }
    let lg = (p.ell * p.zeta / p.xi).ln();
    let ln = ((1.0 - p.eps + p.eta) / p.eta).ln()
        + c_prime * lg / p.zeta * (p.q * p.ell / p.xi).ln()
        + c_prime * lg * lg / p.zeta.powi(3) * (1.0 / (p.eps - p.eta)).ln();
    Ok(LogValue::from_ln(ln))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct R0Report {
    /// (ε − (ℓ/q)(1 + min{2, ζ log(q+1)/(1−ζ)}))(1 − 5ζ).
    pub general: f64,
    /// (ε − ℓ/q)(1 − 6ζ).
    pub simplified: f64,
    /// Whether q ≥ (2ℓ/((1−ζ)ε)) log(2ℓ/((1−ζ)ε)), so the simplified form may be used.
    pub simplified_applies: bool,
    /// Whether the min{2, ·} term saturated at 2.
    pub saturated: bool,
}

pub fn cor_avgrad_r0(q: f64, ell: f64, eps: f64, zeta: f64) -> Result<R0Report> {
    if !(q > 1.0 && ell >= 1.0) {
        return Err(domain("need q > 1 and ell >= 1"));
    }
    if !(zeta > 0.0 && zeta < 1.0) || !(eps > 0.0 && eps <= 1.0) {
        return Err(domain("need zeta in (0, 1) and eps in (0, 1]"));
    }
    let t = zeta * (q + 1.0).ln() / (1.0 - zeta);
    let general = (eps - ell / q * (1.0 + t.min(2.0))) * (1.0 - 5.0 * zeta);
    let simplified = (eps - ell / q) * (1.0 - 6.0 * zeta);
    let a = 2.0 * ell / ((1.0 - zeta) * eps);
    Ok(R0Report { general, simplified, simplified_applies: q >= a * a.ln(), saturated: t > 2.0 })
}

/// (ε₀, ε₁): (0.51, 0.8) for q = 2, otherwise (1/q + 1/q², max{0.8, 1 − 1.1 ln(q+1)/q}).
pub fn cor_constantagr_window(q: u64) -> (f64, f64) {
    if q == 2 {
        return (0.51, 0.8);
    }
    let qf = q as f64;
    (1.0 / qf + 1.0 / (qf * qf), 0.8_f64.max(1.0 - 1.1 * (qf + 1.0).ln() / qf))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LargeQReport {
    pub eps: f64,
    pub rate_bound: f64,
    pub list_bound: LogValue,
    pub q_threshold: f64,
    pub q_ok: bool,
    /// 1 − H_{q/ℓ}(1 − ℓ/q − δ) − log_q ℓ.
    pub capacity: f64,
}

/// Rate (1 − H_{q/ℓ}(1 − ℓ/q − δ) − log_q ℓ)(1 − γ), list bound q^{C′ log²(ℓ/δ)},
/// and whether q ≥ max{C(ℓ/δ)², ℓ^{C/δ}}.
pub fn cor_largeq_check(ell: f64, gamma: f64, delta: f64, q: f64, c: f64, c_prime: f64) -> Result<LargeQReport> {
    if !(gamma >= 0.0 && gamma < 1.0) || !(delta > 0.0) || !(c > 0.0 && c_prime > 0.0) {
        return Err(domain("need gamma in [0, 1), delta > 0 and positive constants"));
    }
    let eps = ell / q + delta;
    if eps > 1.0 {
        return Err(domain(format!("ell/q + delta = {eps} exceeds 1")));
    }
    let capacity = lr_capacity(q, ell, eps)?;
    let lg = (ell / delta).ln();
    let q_threshold = (c * (ell / delta).powi(2)).max(ell.powf(c / delta));
    Ok(LargeQReport {
        eps,
        rate_bound: capacity * (1.0 - gamma),
        list_bound: LogValue::from_ln(c_prime * lg * lg * q.ln()),
        q_threshold,
        q_ok: q >= q_threshold,
        capacity,
    })
}

/// 1 − H_{q/ℓ}(1 − ℓ/q − δ), the capacity gap used by the large-alphabet corollary.
pub fn largeq_capacity_gap(q: f64, ell: f64, delta: f64) -> Result<f64> {
    if !(q / ell > 1.0) {
        return Err(domain("q/ell must exceed 1"));
    }
    Ok(1.0 - entropy_q(1.0 - ell / q - delta, q / ell)?)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HighRateReport {
    pub rate: f64,
    pub agreement: f64,
    pub list_bound: LogValue,
    pub q_threshold: f64,
    pub q_ok: bool,
}

/// Rate 1 − γ, agreement 1 − γ/10, list bound (qℓ/γ)^{log ℓ/γ} · exp(log² ℓ/γ³),
/// and whether q ≥ ℓ^{C/γ}.
pub fn cor_highratelr_check(gamma: f64, ell: f64, q: f64, c: f64) -> Result<HighRateReport> {
    if !(gamma > 0.0 && gamma < 1.0) || !(ell >= 1.0) || !(q > 1.0) || !(c > 0.0) {
        return Err(domain("need gamma in (0, 1), ell >= 1, q > 1, C > 0"));
    }
    let l = ell.ln();
    let ln = l / gamma * (q * ell / gamma).ln() + l * l / gamma.powi(3);
    let q_threshold = ell.powf(c / gamma);
    Ok(HighRateReport {
        rate: 1.0 - gamma,
        agreement: 1.0 - gamma / 10.0,
        list_bound: LogValue::from_ln(ln),
        q_threshold,
        q_ok: q >= q_threshold,
    })
}

/// Base of the exponential in the zero-error list-size bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EasyBase {
    /// 2qℓ/ξ.
    #[default]
    Full,
    /// q alone.
    Q,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EasyReport {
    pub rate_bound: f64,
    pub list_bound: LogValue,
    pub q_threshold: f64,
    pub q_ok: bool,
}

/// Rate min{1 − 3ζ, 1 − log_q ℓ − ξ}; list size max{2ℓ/ζ, ℓ · B^{2 log(2ℓ/ξ)/ζ}};
/// q ≥ max{ℓ^{2/ζ}, (3ℓ)^{1/ζ − 1}}.
pub fn thm_easy_bounds(q: f64, ell: f64, zeta: f64, xi: f64, base: EasyBase) -> Result<EasyReport> {
    if !(zeta > 0.0 && zeta < 0.2) {
        return Err(domain(format!("zeta = {zeta} must lie in (0, 1/5)")));
    }
    if !(xi > 0.0) || !(ell >= 1.0) || !(q > 1.0) {
        return Err(domain("need xi > 0, ell >= 1, q > 1"));
    }
    let rate_bound = (1.0 - 3.0 * zeta).min(1.0 - ell.ln() / q.ln() - xi);
    let b = match base {
        EasyBase::Full => 2.0 * q * ell / xi,
        EasyBase::Q => q,
    };
    let ln_second = ell.ln() + 2.0 * (2.0 * ell / xi).ln() / zeta * b.ln();
    let ln = (2.0 * ell / zeta).ln().max(ln_second);
    let q_threshold = ell.powf(2.0 / zeta).max((3.0 * ell).powf(1.0 / zeta - 1.0));
    Ok(EasyReport { rate_bound, list_bound: LogValue::from_ln(ln), q_threshold, q_ok: q >= q_threshold })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateCurvePoint {
    pub eps: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub binding: Binding,
}

/// R0 (general form) and R1 = 1 − H_{q/ℓ}(1 − ε) − log_q ℓ over a grid of ε in (ℓ/q, 1].
pub fn rate_curve(q: f64, ell: f64, zeta: f64, eps_grid: &[f64]) -> Result<Vec<RateCurvePoint>> {
    eps_grid
        .iter()
        .map(|&eps| {
            if !(eps > ell / q && eps <= 1.0) {
                return Err(domain(format!("eps = {eps} outside (ell/q, 1]")));
            }
            let r0 = cor_avgrad_r0(q, ell, eps, zeta)?.general;
            let r1 = lr_capacity(q, ell, eps)?;
            Ok(RateCurvePoint { eps, r0, r1, r: r0.min(r1), binding: Binding::of(r0, r1) })
        })
        .collect()
}

/// start, start + step, …, up to end inclusive, computed on an integer lattice
/// so that decimal grids do not drift.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || end < start {
        return Vec::new();
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + i as f64 * step).map(|x| (x * 1e12).round() / 1e12).collect()
}

/// CSV with header `eps,R0,R1,R,binding`.
pub fn write_rate_curve_csv<W: Write>(points: &[RateCurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "R0", "R1", "R", "binding"])?;
    for p in points {
        w.write_record([p.eps.to_string(), p.r0.to_string(), p.r1.to_string(), p.r.to_string(), p.binding.as_str().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert!(close(h2(0.5).unwrap(), 1.0, 1e-12));
        for q in [2.0, 3.0, 4.0, 7.0, 16.0, 1024.0] {
            assert!(close(entropy_q(1.0 - 1.0 / q, q).unwrap(), 1.0, 1e-12));
            assert_eq!(entropy_q(0.0, q).unwrap(), 0.0);
        }
        assert!(close(entropy_q(1.0, 2.0).unwrap(), 0.0, 1e-15));
        assert!(entropy_q(-0.1, 2.0).is_err());
        assert!(entropy_q(0.5, 1.0).is_err());
    }

    #[test]
    fn entropy_concave_with_peak_at_uniform() {
        for q in [2.0, 3.0, 5.0, 16.0] {
            let xs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
            let hs: Vec<f64> = xs.iter().map(|&x| entropy_q(x, q).unwrap()).collect();
            for w in hs.windows(3) {
                assert!(w[0] + w[2] <= 2.0 * w[1] + 1e-12);
            }
            let peak = hs.iter().cloned().fold(f64::MIN, f64::max);
            assert!(peak <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn uniform_expansion_matches_direct_value() {
        assert_eq!(entropy_expansion_around_uniform(0.0, 5.0, 10).unwrap(), 1.0);
        let direct = entropy_q(0.5 - 0.01, 2.0).unwrap();
        assert!(close(entropy_expansion_around_uniform(0.01, 2.0, 10).unwrap(), direct, 1e-9));
        assert!(entropy_expansion_around_uniform(0.5, 2.0, 10).is_err());
        // truncation error shrinks with more terms
        for (q, x) in [(2.0, 0.2), (3.0, -0.15), (16.0, 0.03)] {
            let direct = entropy_q(1.0 - 1.0 / q - x, q).unwrap();
            let errs: Vec<f64> = (1..15).map(|t| (entropy_expansion_around_uniform(x, q, t).unwrap() - direct).abs()).collect();
            for w in errs.windows(2) {
                assert!(w[1] <= w[0] + 1e-15, "{q} {x} {errs:?}");
            }
        }
    }

    #[test]
    fn large_q_expansion_matches_direct_value() {
        assert!(close(entropy_expansion_large_q(0.3, 16.0, 30).unwrap(), entropy_q(0.3, 16.0).unwrap(), 1e-9));
        assert!(close(entropy_expansion_large_q(0.3, 2.0, 60).unwrap(), h2(0.3).unwrap(), 1e-9));
        for q in [64.0, 1024.0, 65536.0] {
            let y = 0.4;
            let gap = entropy_q(y, q).unwrap() - y;
            assert!(gap >= 0.0 && gap <= h2(y).unwrap() / f64::log2(q));
        }
        assert!(entropy_expansion_large_q(0.0, 4.0, 5).is_err());
    }

    /// Counts words of weight at most r directly.
    fn brute_volume(q: u64, n: usize, r: usize) -> u64 {
        (0..q.pow(n as u32))
            .filter(|&w| {
                let mut t = w;
                let mut wt = 0;
                for _ in 0..n {
                    wt += (t % q != 0) as usize;
                    t /= q;
                }
                wt <= r
            })
            .count() as u64
    }

    #[test]
    fn volume_examples_and_oracle() {
        assert_eq!(hamming_volume(2, 3, Rational::new(1, 3)).unwrap(), BigUint::from(4u32));
        assert_eq!(hamming_volume(5, 7, Rational::from_integer(0)).unwrap(), BigUint::one());
        assert_eq!(hamming_volume(3, 6, Rational::from_integer(1)).unwrap(), BigUint::from(729u32));
        for q in [2u64, 3, 4] {
            for n in 1..=6usize {
                for num in 0..=n as i64 {
                    let rho = Rational::new(num, n as i64);
                    assert_eq!(hamming_volume(q, n, rho).unwrap(), BigUint::from(brute_volume(q, n, num as usize)));
                }
            }
        }
        assert!(hamming_volume(2, 3, Rational::new(3, 2)).is_err());
    }

    #[test]
    fn volume_rate_tends_to_entropy() {
        for q in [2u64, 4] {
            let top = 1.0 - 1.0 / q as f64;
            let mut rho = 0.1;
            while rho <= top + 1e-9 {
                let r = Rational::new((rho * 1000.0).round() as i64, 1000);
                let v = volume_rate(q, 1000, r).unwrap();
                assert!(close(v, entropy_q(rho, q as f64).unwrap(), 0.01), "{q} {rho} {v}");
                rho += 0.05;
            }
        }
    }

    #[test]
    fn capacity_examples() {
        assert!(close(ld_capacity(2.0, 0.5).unwrap(), 0.0, 1e-12));
        assert!(close(ld_capacity(2.0, 0.11).unwrap(), 0.5, 1e-3));
        for q in [2.0, 3.0, 8.0] {
            for a in [0.6, 0.7, 0.9] {
                assert!(close(lr_capacity(q, 1.0, a).unwrap(), ld_capacity(q, 1.0 - a).unwrap(), 1e-12));
                assert!(close(ld_capacity(q, 1.0 - a).unwrap() + entropy_q(1.0 - a, q).unwrap(), 1.0, 1e-12));
            }
        }
        assert!(lr_capacity(2.0, 2.0, 0.5).is_err());
    }

    fn params(q: f64, ell: f64, eps: f64) -> RateBoundParams {
        RateBoundParams { q, ell, eps, eta: 0.01, zeta: 0.01, xi: 0.01, mu_bar: MuBar::Zero }
    }

    #[test]
    fn avgrad_rate_binding_terms() {
        let small = thm_avgrad_rate(&RateBoundParams { xi: 0.001, ..params(1e40, 1.0, 0.1) }).unwrap();
        assert_eq!(small.binding, Binding::Linear);
        let high = thm_avgrad_rate(&params(2.0, 1.0, 0.6)).unwrap();
        assert_eq!(high.binding, Binding::Entropy);
        assert!(matches!(thm_avgrad_rate(&params(4.0, 1.0, 0.2)), Err(Error::ConstraintViolated(_))));
        let mut p = params(16.0, 1.0, 0.8);
        p.mu_bar = MuBar::EllOverQ;
        assert_eq!(p.beta(), 2.0);
        assert!(close(p.offset(), 3.0 / 16.0, 1e-15));
    }

    #[test]
    fn avgrad_list_size_monotone_in_slack() {
        let base = RateBoundParams { q: 1024.0, ell: 2.0, eps: 0.6, eta: 0.05, zeta: 0.05, xi: 0.001, mu_bar: MuBar::Zero };
        let mut prev = thm_avgrad_list_size(&base, 1.0).unwrap().ln;
        for xi in [0.0005, 0.0001, 0.00001] {
            let cur = thm_avgrad_list_size(&RateBoundParams { xi, ..base }, 1.0).unwrap().ln;
            assert!(cur > prev);
            prev = cur;
        }
        // in ζ the bound grows as ζ shrinks while log(ℓζ/ξ) stays above 1
        let mut prev = thm_avgrad_list_size(&base, 1.0).unwrap().ln;
        for zeta in [0.04, 0.03, 0.02] {
            let cur = thm_avgrad_list_size(&RateBoundParams { zeta, ..base }, 1.0).unwrap().ln;
            assert!(cur > prev);
            prev = cur;
        }
        assert!(thm_avgrad_list_size(&base, 0.0).is_err());
    }

    #[test]
    fn r0_forms() {
        let huge = cor_avgrad_r0(1e12, 1.0, 0.5, 0.01).unwrap();
        assert!(huge.simplified_applies);
        assert!(close(huge.simplified, 0.5 * 0.94, 1e-9));
        let sat = cor_avgrad_r0(1e12, 1.0, 0.5, 0.15).unwrap();
        assert!(sat.saturated);
        assert!(close(sat.general, (0.5 - 3e-12) * 0.25, 1e-15));
        let q2 = cor_avgrad_r0(2.0, 1.0, 0.6, 0.01).unwrap();
        let t = 0.01 * 3f64.ln() / 0.99;
        assert!(close(q2.general, (0.6 - 0.5 * (1.0 + t)) * 0.95, 1e-15));
        assert!(!q2.simplified_applies);
    }

    #[test]
    fn window_examples() {
        assert_eq!(cor_constantagr_window(2), (0.51, 0.8));
        let (e0, _) = cor_constantagr_window(3);
        assert!(close(e0, 4.0 / 9.0, 1e-15));
        let (_, e1) = cor_constantagr_window(1000);
        assert!(close(e1, 1.0 - 1.1 * 1001f64.ln() / 1000.0, 1e-15));
        assert!(close(e1, 0.9924, 1e-4));
        assert_eq!(cor_constantagr_window(5).1, 0.8);
    }

    #[test]
    fn large_q_corollary() {
        let r = cor_largeq_check(2.0, 0.0, 0.05, 1e9, 1.0, 1.0).unwrap();
        assert!(close(r.rate_bound, r.capacity, 1e-15));
        let low = cor_largeq_check(2.0, 0.1, 0.05, 64.0, 1.0, 1.0).unwrap();
        assert!(!low.q_ok);
        for ell in [1.0, 2.0, 4.0] {
            for q in [256.0, 4096.0, 65536.0] {
                for delta in [0.01, 0.05, 0.1] {
                    let gap = largeq_capacity_gap(q, ell, delta).unwrap();
                    assert!(gap > 0.0 && gap <= delta, "{q} {ell} {delta} {gap}");
                }
            }
        }
    }

    #[test]
    fn high_rate_corollary() {
        let r = cor_highratelr_check(0.1, 2.0, 2f64.powi(10), 1.0).unwrap();
        assert!(r.q_ok);
        assert!(close(r.rate, 0.9, 1e-15) && close(r.agreement, 0.99, 1e-15));
        let below = cor_highratelr_check(0.1, 2.0, 2f64.powi(10) - 1.0, 1.0).unwrap();
        assert!(!below.q_ok);
        let mut prev = f64::MIN;
        for ell in [2.0, 3.0, 4.0, 8.0] {
            let cur = cor_highratelr_check(0.1, ell, 1e6, 1.0).unwrap().list_bound.ln;
            assert!(cur > prev);
            prev = cur;
        }
    }

    #[test]
    fn easy_bounds_examples() {
        let r = thm_easy_bounds(16.0, 2.0, 0.1, 0.1, EasyBase::Full).unwrap();
        assert!(close(r.rate_bound, 0.65, 1e-12));
        assert!(!r.q_ok);
        let one = thm_easy_bounds(1e6, 1.0, 0.1, 0.05, EasyBase::Full).unwrap();
        assert!(close(one.rate_bound, 0.7f64.min(0.95), 1e-12));
        let plain = thm_easy_bounds(16.0, 2.0, 0.1, 0.1, EasyBase::Q).unwrap();
        assert!(plain.list_bound.ln < r.list_bound.ln);
        assert!(thm_easy_bounds(16.0, 2.0, 0.2, 0.1, EasyBase::Full).is_err());
    }

    #[test]
    fn rate_curve_shape() {
        let g = grid(0.51, 0.80, 0.01);
        assert_eq!(g.len(), 30);
        assert_eq!(g[29], 0.8);
        let pts = rate_curve(2.0, 1.0, 0.01, &g).unwrap();
        for p in &pts {
            assert_eq!(p.r, p.r0.min(p.r1));
            assert!(p.r1 < p.r0, "{p:?}");
        }
        let end = rate_curve(2.0, 1.0, 0.01, &[1.0]).unwrap();
        assert!(close(end[0].r1, 1.0, 1e-15));
        let near = rate_curve(2.0, 1.0, 0.01, &[0.5 + 1e-6]).unwrap();
        assert!(near[0].r1 > 0.0 && near[0].r1 < 1e-9);
        assert!(rate_curve(2.0, 1.0, 0.01, &[0.5]).is_err());
        let mut buf = Vec::new();
        write_rate_curve_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eps,R0,R1,R,binding\n"));
        assert_eq!(text.lines().count(), 31);
    }
}
