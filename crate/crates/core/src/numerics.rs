//! High-precision values: multiple zeta values, multiple polylogarithms,
//! Bernoulli numbers and ζ at negative odd integers.
//!
//! ζ(w) is evaluated through the Hölder split of the iterated integral at 1/2:
//! ζ(w) = Σ_{w = u·v} Li_{dual(u)}(1/2) · Li_v(1/2), where dual reverses and
//! swaps letters. Every factor is a nested sum with geometric convergence,
//! so truncation is bounded rigorously.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::exact::{LinComb, Rational};
use crate::words::{composition_from_word, is_admissible, word_from_composition, Composition, Letter, Word};

pub const MIN_DIGITS: u32 = 10;
pub const MAX_DIGITS: u32 = 100;
pub const MAX_ZETA_WEIGHT: usize = 12;
const MAX_SERIES_TERMS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rigor {
    RigorousTail,
    HeuristicQuadrature,
}

impl Rigor {
    pub fn as_str(self) -> &'static str {
        match self {
            Rigor::RigorousTail => "rigorous-tail",
            Rigor::HeuristicQuadrature => "heuristic-quadrature",
        }
    }

    pub fn parse(s: &str) -> Option<Rigor> {
        match s {
            "rigorous-tail" => Some(Rigor::RigorousTail),
            "heuristic-quadrature" => Some(Rigor::HeuristicQuadrature),
            _ => None,
        }
    }
}

impl fmt::Display for Rigor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value with an absolute error bound and an honest note of how it was bounded.
#[derive(Clone, Debug)]
pub struct NumericResult {
    pub value: BigFloat,
    pub error_bound: BigFloat,
    pub rigor: Rigor,
    /// Significant digits used when printing.
    pub digits: u32,
}

impl NumericResult {
    pub fn new(value: BigFloat, error_bound: BigFloat, rigor: Rigor, digits: u32) -> Self {
        NumericResult { value, error_bound: error_bound.abs(), rigor, digits }
    }

    pub fn exact(value: BigFloat, digits: u32) -> Self {
        let prec = value.prec();
        NumericResult::new(value, BigFloat::zero(prec), Rigor::RigorousTail, digits)
    }

    pub fn from_f64(value: f64, error: f64, rigor: Rigor, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        NumericResult::new(BigFloat::from_f64(value, prec), BigFloat::from_f64(error, prec), rigor, digits)
    }

    pub fn value_string(&self) -> String {
        self.value.to_decimal(self.digits as usize)
    }

    pub fn error_string(&self) -> String {
        self.error_bound.to_sci(3)
    }

    /// Number of decimal digits the error bound actually supports.
    pub fn supported_digits(&self) -> u32 {
        if self.error_bound.is_zero() {
            return self.digits;
        }
        let e = -(self.error_bound.to_f64().log10());
        if e.is_finite() { e.floor().max(0.0) as u32 } else { self.digits }
    }

    /// Lossless record of the binary value and bound, for caching.
    pub fn to_record(&self) -> Value {
        let bf = |x: &BigFloat| {
            let (m, e) = x.parts();
            json!([m.to_string(), e, x.prec()])
        };
        json!({"value": bf(&self.value), "error_bound": bf(&self.error_bound), "rigor": self.rigor.as_str(), "digits": self.digits})
    }

    pub fn from_record(v: &Value) -> Option<NumericResult> {
        let bf = |x: &Value| -> Option<BigFloat> {
            let a = x.as_array()?;
            let m: num_bigint::BigInt = a.first()?.as_str()?.parse().ok()?;
            let e = a.get(1)?.as_i64()?;
            let p = u32::try_from(a.get(2)?.as_u64()?).ok()?;
            Some(BigFloat::from_parts(m, e, p))
        };
        Some(NumericResult {
            value: bf(v.get("value")?)?,
            error_bound: bf(v.get("error_bound")?)?,
            rigor: Rigor::parse(v.get("rigor")?.as_str()?)?,
            digits: u32::try_from(v.get("digits")?.as_u64()?).ok()?,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value_string(),
            "digits": self.digits,
            "error_bound": self.error_string(),
            "rigor": self.rigor.as_str(),
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Sum of two results, errors added.
    pub fn add(&self, other: &NumericResult) -> NumericResult {
        NumericResult {
            value: &self.value + &other.value,
            error_bound: &self.error_bound + &other.error_bound,
            rigor: worse(self.rigor, other.rigor),
            digits: self.digits.min(other.digits),
        }
    }

    /// Product with first-order plus cross error terms.
    pub fn mul(&self, other: &NumericResult) -> NumericResult {
        let err = &(&(&self.value.abs() * &other.error_bound) + &(&other.value.abs() * &self.error_bound))
            + &(&self.error_bound * &other.error_bound);
        NumericResult {
            value: &self.value * &other.value,
            error_bound: err,
            rigor: worse(self.rigor, other.rigor),
            digits: self.digits.min(other.digits),
        }
    }

    pub fn scale(&self, c: &Rational) -> NumericResult {
        let cf = BigFloat::from_rational(c, self.value.prec());
        NumericResult {
            value: &self.value * &cf,
            error_bound: &self.error_bound * &cf.abs(),
            rigor: self.rigor,
            digits: self.digits,
        }
    }
}

fn worse(a: Rigor, b: Rigor) -> Rigor {
    if a == Rigor::HeuristicQuadrature || b == Rigor::HeuristicQuadrature {
        Rigor::HeuristicQuadrature
    } else {
        Rigor::RigorousTail
    }
}

fn check_digits(digits: u32) -> Result<()> {
    if !(MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
        return Err(Error::EnvelopeExceeded(format!("digits {digits} not in {MIN_DIGITS}..={MAX_DIGITS}")));
    }
    Ok(())
}

/// log2 of the truncation bound z^{N+1}(N+1)^{k−1} / (1 − z(1+1/(N+1))^{k−1}),
/// valid because the inner truncated sums are at most (1 + ln n)^{k−1} ≤ n^{k−1}.
fn tail_log2(z: f64, depth: usize, n: usize) -> f64 {
    let n1 = (n + 1) as f64;
    let km1 = depth.saturating_sub(1) as f64;
    let ratio = z * (1.0 + 1.0 / n1).powf(km1);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    n1 * z.log2() + km1 * n1.log2() - (1.0 - ratio).log2()
}

fn terms_needed(z: f64, depth: usize, target_log2: f64) -> Option<usize> {
    let mut lo = 1usize;
    let mut hi = 64usize;
    while tail_log2(z, depth, hi) > target_log2 {
        hi *= 2;
        if hi > MAX_SERIES_TERMS {
            return None;
        }
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if tail_log2(z, depth, mid) <= target_log2 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Σ_{N ≥ n₁ > … > n_k ≥ 1} z^{n₁} / ∏ nᵢ^{sᵢ}, evaluated at `prec` bits.
pub fn truncated_polylog(parts: &[u32], z: &BigFloat, terms: usize, prec: u32) -> BigFloat {
    let k = parts.len();
    let z = z.with_prec(prec);
    // running[j] = Σ over indices j..k with the outer index ≤ n−1
    let mut running = vec![BigFloat::zero(prec); k];
    let mut zpow = BigFloat::one(prec);
    let one = BigFloat::one(prec);
    let max_s = parts.iter().copied().max().unwrap_or(1) as usize;
    let mut inv_pows = vec![BigFloat::zero(prec); max_s + 1];
    for n in 1..=terms {
        zpow = &zpow * &z;
        let inv = BigFloat::from_i64(n as i64, prec).recip();
        inv_pows[1] = inv.clone();
        for s in 2..=max_s {
            inv_pows[s] = &inv_pows[s - 1] * &inv;
        }
        let contrib: Vec<BigFloat> = (0..k)
            .map(|j| {
                let inner = if j + 1 < k { &running[j + 1] } else { &one };
                let c = inner * &inv_pows[parts[j] as usize];
                if j == 0 { &c * &zpow } else { c }
            })
            .collect();
        for (r, c) in running.iter_mut().zip(contrib) {
            *r = &*r + &c;
        }
    }
    running.swap_remove(0)
}

/// Li_{s}(z) with a rigorous truncation bound plus a rounding allowance.
fn polylog_bounded(parts: &[u32], z: &BigFloat, prec: u32) -> Result<(BigFloat, BigFloat)> {
    let zf = z.to_f64();
    let k = parts.len();
    let target = -(prec as f64) + 8.0;
    let n = terms_needed(zf, k, target)
        .ok_or_else(|| Error::EnvelopeExceeded(format!("series at z = {zf} needs more than {MAX_SERIES_TERMS} terms")))?;
    Ok(truncated_with_bound(parts, z, n, prec))
}

fn truncated_with_bound(parts: &[u32], z: &BigFloat, n: usize, prec: u32) -> (BigFloat, BigFloat) {
    let k = parts.len();
    let wp = prec + 16;
    let value = truncated_polylog(parts, z, n, wp).with_prec(prec);
    let tail = tail_log2(z.to_f64(), k, n);
    let weight: u32 = parts.iter().sum();
    // every term passes through ≤ weight + 4 roundings at wp bits; inner sums ≤ (1 + ln n)^k
    let round_log2 = (n as f64 * (k as f64 + 1.0) * (weight as f64 + 8.0)).log2()
        + k as f64 * (1.0 + (n as f64).ln()).log2()
        - wp as f64;
    let err = 2f64.powf(tail) + 2f64.powf(round_log2);
    (value, BigFloat::from_f64(err * 1.01, prec))
}

fn half(prec: u32) -> BigFloat {
    BigFloat::one(prec).mul_pow2(-1)
}

/// Li over a word ending in y (or the empty word, giving 1) at z.
fn word_polylog(w: &Word, z: &BigFloat, prec: u32) -> Result<(BigFloat, BigFloat)> {
    if w.is_empty() {
        return Ok((BigFloat::one(prec), BigFloat::zero(prec)));
    }
    let c = composition_from_word(w)?;
    polylog_bounded(c.parts(), z, prec)
}

fn dual_any(w: &Word) -> Word {
    Word::new(w.letters().iter().rev().map(|l| l.swap()).collect())
}

/// ζ of an admissible word by Hölder convolution; no envelope checks.
pub fn zeta_word_bits(w: &Word, prec: u32) -> Result<(BigFloat, BigFloat)> {
    if !is_admissible(w) {
        return Err(Error::NotAdmissible(format!("ζ({w}) diverges")));
    }
    let wp = prec + 8;
    let h = half(wp);
    let mut sum = BigFloat::zero(wp);
    let mut err = BigFloat::zero(wp);
    for j in 0..=w.len() {
        let u = w.slice(0, j);
        let v = w.slice(j, w.len());
        let (a, ea) = word_polylog(&dual_any(&u), &h, wp)?;
        let (b, eb) = word_polylog(&v, &h, wp)?;
        sum = &sum + &(&a * &b);
        let e = &(&(&a.abs() * &eb) + &(&b.abs() * &ea)) + &(&ea * &eb);
        err = &err + &e;
    }
    // final additions at wp bits
    let round = BigFloat::from_f64(2f64.powi(-(wp as i32) + 4) * (w.len() as f64 + 1.0), prec);
    Ok((sum.with_prec(prec), (&err + &round).with_prec(prec)))
}

/// Multiple zeta value ζ(s₁,…,s_k) with |value − ζ| ≤ error_bound ≤ 10^{−digits}.
pub fn zeta(c: &Composition, digits: u32) -> Result<NumericResult> {
    check_digits(digits)?;
    if !c.is_admissible() {
        return Err(Error::NotAdmissible(format!("ζ{c} diverges (s₁ = 1)")));
    }
    if c.weight() > MAX_ZETA_WEIGHT {
        return Err(Error::EnvelopeExceeded(format!("weight {} exceeds {MAX_ZETA_WEIGHT}", c.weight())));
    }
    let prec = bits_for_digits(digits);
    let (v, e) = zeta_word_bits(&word_from_composition(c), prec)?;
    Ok(NumericResult::new(v, e, Rigor::RigorousTail, digits))
}

pub fn zeta_word(w: &Word, digits: u32) -> Result<NumericResult> {
    if !is_admissible(w) {
        return Err(Error::NotAdmissible(format!("ζ({w}) diverges")));
    }
    zeta(&composition_from_word(w)?, digits)
}

/// Value and bound when the series for Li_{s}(1/2) pieces are cut at a fixed
/// number of terms; exposes the truncation behaviour for testing.
pub fn zeta_with_terms(c: &Composition, digits: u32, terms: usize) -> Result<NumericResult> {
    check_digits(digits)?;
    if !c.is_admissible() {
        return Err(Error::NotAdmissible(format!("ζ{c} diverges (s₁ = 1)")));
    }
    let prec = bits_for_digits(digits);
    let w = word_from_composition(c);
    let h = half(prec + 8);
    let mut sum = BigFloat::zero(prec + 8);
    let mut err = BigFloat::zero(prec + 8);
    for j in 0..=w.len() {
        let u = dual_any(&w.slice(0, j));
        let v = w.slice(j, w.len());
        let eval = |x: &Word| -> Result<(BigFloat, BigFloat)> {
            if x.is_empty() {
                return Ok((BigFloat::one(prec + 8), BigFloat::zero(prec + 8)));
            }
            Ok(truncated_with_bound(composition_from_word(x)?.parts(), &h, terms, prec + 8))
        };
        let (a, ea) = eval(&u)?;
        let (b, eb) = eval(&v)?;
        sum = &sum + &(&a * &b);
        err = &err + &(&(&(&a.abs() * &eb) + &(&b.abs() * &ea)) + &(&ea * &eb));
    }
    Ok(NumericResult::new(sum.with_prec(prec), err.with_prec(prec), Rigor::RigorousTail, digits))
}

/// Direct Euler–Zagier partial sum Σ_{N ≥ n₁ > … > n_k ≥ 1} ∏ nᵢ^{−sᵢ}.
/// Converges only like 1/N; kept as a slow, independent cross-check.
pub fn euler_zagier_partial(c: &Composition, terms: usize) -> f64 {
    let parts = c.parts();
    let k = parts.len();
    let mut running = vec![0.0f64; k];
    for n in 1..=terms {
        let nf = n as f64;
        let contrib: Vec<f64> = (0..k)
            .map(|j| {
                let inner = if j + 1 < k { running[j + 1] } else { 1.0 };
                inner / nf.powi(parts[j] as i32)
            })
            .collect();
        for (r, c) in running.iter_mut().zip(contrib) {
            *r += c;
        }
    }
    running[0]
}

/// Multiple polylogarithm Li_{s₁,…,s_k}(z) for 0 < z ≤ 1.
pub fn li(c: &Composition, z: &BigFloat, digits: u32) -> Result<NumericResult> {
    check_digits(digits)?;
    if z.signum() <= 0 {
        return Err(Error::DomainError("Li requires z > 0".into()));
    }
    let prec = bits_for_digits(digits);
    let one = BigFloat::one(prec);
    if *z > one {
        return Err(Error::DomainError("Li requires z <= 1".into()));
    }
    if *z == one {
        return zeta(c, digits);
    }
    let (v, e) = polylog_bounded(c.parts(), z, prec)?;
    Ok(NumericResult::new(v, e, Rigor::RigorousTail, digits))
}

/// Thread-safe memo of ζ values keyed by (composition, digits).
#[derive(Default)]
pub struct ZetaCache {
    map: RwLock<HashMap<(Composition, u32), NumericResult>>,
}

impl ZetaCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, c: &Composition, digits: u32) -> Option<NumericResult> {
        self.map.read().expect("cache lock").get(&(c.clone(), digits)).cloned()
    }

    /// First writer wins; later inserts of the same key are ignored.
    pub fn insert(&self, c: Composition, digits: u32, r: NumericResult) {
        self.map.write().expect("cache lock").entry((c, digits)).or_insert(r);
    }

    pub fn zeta(&self, c: &Composition, digits: u32) -> Result<NumericResult> {
        if let Some(r) = self.get(c, digits) {
            return Ok(r);
        }
        let r = zeta(c, digits)?;
        self.insert(c.clone(), digits, r.clone());
        Ok(r)
    }

    pub fn zeta_word(&self, w: &Word, digits: u32) -> Result<NumericResult> {
        if !is_admissible(w) {
            return Err(Error::NotAdmissible(format!("ζ({w}) diverges")));
        }
        self.zeta(&composition_from_word(w)?, digits)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot sorted by key, for deterministic persistence.
    pub fn entries(&self) -> Vec<(Composition, u32, NumericResult)> {
        let mut v: Vec<_> =
            self.map.read().expect("cache lock").iter().map(|((c, d), r)| (c.clone(), *d, r.clone())).collect();
        v.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        v
    }
}

/// Σ cᵢ ζ(wᵢ) for a combination of admissible words.
pub fn eval_word_comb(comb: &LinComb<Word>, digits: u32, cache: &ZetaCache) -> Result<NumericResult> {
    let prec = bits_for_digits(digits);
    let mut acc = NumericResult::exact(BigFloat::zero(prec), digits);
    for (w, c) in comb.iter() {
        let z = if w.is_empty() { NumericResult::exact(BigFloat::one(prec), digits) } else { cache.zeta_word(w, digits)? };
        acc = acc.add(&z.scale(c));
    }
    Ok(acc)
}

pub fn eval_comp_comb(comb: &LinComb<Composition>, digits: u32, cache: &ZetaCache) -> Result<NumericResult> {
    let prec = bits_for_digits(digits);
    let mut acc = NumericResult::exact(BigFloat::zero(prec), digits);
    for (c, k) in comb.iter() {
        acc = acc.add(&cache.zeta(c, digits)?.scale(k));
    }
    Ok(acc)
}

fn bernoulli_table() -> &'static Vec<Rational> {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Σ_{k=0}^{n} C(n+1, k) B_k = 0 for n ≥ 1
        let max = 64usize;
        let mut b = vec![Rational::one()];
        for n in 1..=max {
            let mut s = Rational::zero();
            let mut binom = BigInt::from(1);
            for (k, bk) in b.iter().enumerate() {
                s = s + Rational::from_integer(binom.clone()) * bk.clone();
                binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-s / Rational::from((n + 1) as i64));
        }
        b
    })
}

/// Exact Bernoulli number with B₁ = −1/2.
pub fn bernoulli(n: usize) -> Result<Rational> {
    if n > 60 {
        return Err(Error::SizeOutOfRange(format!("Bernoulli index {n} exceeds 60")));
    }
    Ok(bernoulli_table()[n].clone())
}

/// ζ(1 − 2g) = −B_{2g} / (2g).
pub fn zeta_nonpositive(g: usize) -> Result<Rational> {
    if !(1..=30).contains(&g) {
        return Err(Error::SizeOutOfRange(format!("genus {g} not in 1..=30")));
    }
    Ok(-bernoulli(2 * g)? / Rational::from((2 * g) as i64))
}

/// Letters to compositions helper for callers holding words.
pub fn word_letters_to_string(w: &[Letter]) -> String {
    Word::new(w.to_vec()).to_string()
}
