//! Integer relation detection (PSLQ) and fitting of numbers to MZV
//! combinations of a fixed weight.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::exact::{LinComb, Rational};
use crate::numerics::{eval_word_comb, NumericResult, ZetaCache, MAX_DIGITS};
use crate::words::{enumerate_admissible, Word};

pub const MIN_RELATION_DIGITS: u32 = 10;
pub const MAX_VALUES: usize = 20;
const BASIS_DIGITS: u32 = 60;
const BASIS_HEIGHT: u64 = 10_000;

/// An integer relation Σ cᵢ vᵢ ≈ 0, normalized to gcd 1 with the first
/// nonzero coefficient positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub coefficients: Vec<BigInt>,
    pub residual: BigFloat,
    pub height_searched: u64,
    pub digits: u32,
}

impl Relation {
    pub fn height(&self) -> BigInt {
        self.coefficients.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coefficients": self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "residual": self.residual.to_sci(3),
            "height_searched": self.height_searched,
            "digits": self.digits,
        })
    }
}

fn normalize(mut c: Vec<BigInt>) -> Vec<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in c.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = c.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in c.iter_mut() {
                *x = -&*x;
            }
        }
    }
    c
}

fn round(x: &BigFloat) -> BigInt {
    x.round_to_bigint()
}

struct Pslq {
    n: usize,
    prec: u32,
    y: Vec<BigFloat>,
    h: Vec<Vec<BigFloat>>,
    a: Vec<Vec<BigInt>>,
    b: Vec<Vec<BigInt>>,
}

impl Pslq {
    fn new(x: &[BigFloat], prec: u32) -> Result<Self> {
        let n = x.len();
        let x: Vec<BigFloat> = x.iter().map(|v| v.with_prec(prec)).collect();
        let mut s = vec![BigFloat::zero(prec); n];
        let mut acc = BigFloat::zero(prec);
        for k in (0..n).rev() {
            acc = &acc + &x[k].square();
            s[k] = acc.sqrt()?;
        }
        if s[0].is_zero() {
            return Err(Error::InvalidArgument("all values are zero".into()));
        }
        let t = s[0].clone();
        let y: Vec<BigFloat> = x.iter().map(|v| v / &t).collect();
        let s: Vec<BigFloat> = s.iter().map(|v| v / &t).collect();
        let mut h = vec![vec![BigFloat::zero(prec); n - 1]; n];
        for j in 0..n - 1 {
            if s[j].is_zero() || s[j + 1].is_zero() {
                return Err(Error::InvalidArgument("degenerate input: trailing values are zero".into()));
            }
            h[j][j] = &s[j + 1] / &s[j];
            let den = &s[j] * &s[j + 1];
            for i in j + 1..n {
                h[i][j] = -&(&(&y[i] * &y[j]) / &den);
            }
        }
        let eye = |n: usize| -> Vec<Vec<BigInt>> {
            (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
        };
        let mut p = Pslq { n, prec, y, h, a: eye(n), b: eye(n) };
        p.reduce_full();
        Ok(p)
    }

    fn reduce_entry(&mut self, i: usize, j: usize) {
        if self.h[j][j].is_zero() {
            return;
        }
        let t = round(&(&self.h[i][j] / &self.h[j][j]));
        if t.is_zero() {
            return;
        }
        let tf = BigFloat::from_bigint(&t, self.prec);
        let yi = self.y[i].clone();
        self.y[j] = &self.y[j] + &(&tf * &yi);
        for k in 0..=j {
            let hjk = self.h[j][k].clone();
            self.h[i][k] = &self.h[i][k] - &(&tf * &hjk);
        }
        for k in 0..self.n {
            let ajk = self.a[j][k].clone();
            self.a[i][k] -= &t * ajk;
            let bki = self.b[k][i].clone();
            self.b[k][j] += &t * bki;
        }
    }

    fn reduce_full(&mut self) {
        for i in 1..self.n {
            for j in (0..i).rev() {
                self.reduce_entry(i, j);
            }
        }
    }

    /// One iteration; `gamma` is the usual √(4/3) or larger.
    fn step(&mut self, gamma: &BigFloat) {
        let n = self.n;
        let mut best = 0;
        let mut best_val = BigFloat::zero(self.prec);
        let mut gpow = gamma.clone();
        for i in 0..n - 1 {
            let v = &gpow * &self.h[i][i].abs();
            if v > best_val {
                best_val = v;
                best = i;
            }
            gpow = &gpow * gamma;
        }
        let m = best;
        self.y.swap(m, m + 1);
        self.a.swap(m, m + 1);
        self.h.swap(m, m + 1);
        for row in self.b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = (&self.h[m][m].square() + &self.h[m][m + 1].square()).sqrt().expect("non-negative");
            if !t0.is_zero() {
                let t1 = &self.h[m][m] / &t0;
                let t2 = &self.h[m][m + 1] / &t0;
                for i in m..n {
                    let t3 = self.h[i][m].clone();
                    let t4 = self.h[i][m + 1].clone();
                    self.h[i][m] = &(&t1 * &t3) + &(&t2 * &t4);
                    self.h[i][m + 1] = &(&t1 * &t4) - &(&t2 * &t3);
                }
            }
        }
        for i in m + 1..n {
            let top = (i - 1).min(m + 1);
            for j in (0..=top).rev() {
                self.reduce_entry(i, j);
            }
        }
    }

    fn max_diag(&self) -> BigFloat {
        let mut m = BigFloat::zero(self.prec);
        for i in 0..self.n - 1 {
            let v = self.h[i][i].abs();
            if v > m {
                m = v;
            }
        }
        m
    }
}

fn residual(values: &[BigFloat], c: &[BigInt], prec: u32) -> BigFloat {
    let mut s = BigFloat::zero(prec);
    for (v, k) in values.iter().zip(c) {
        s = &s + &(&v.with_prec(prec) * &BigFloat::from_bigint(k, prec));
    }
    s.abs()
}

/// Search for Σ cᵢ vᵢ = 0 with max |cᵢ| ≤ max_height at `digits` precision.
pub fn find_relation(values: &[BigFloat], digits: u32, max_height: u64) -> Result<Option<Relation>> {
    if values.len() < 2 || values.len() > MAX_VALUES {
        return Err(Error::InvalidArgument(format!("need between 2 and {MAX_VALUES} values, got {}", values.len())));
    }
    if digits < MIN_RELATION_DIGITS {
        return Err(Error::InsufficientPrecision(format!("at least {MIN_RELATION_DIGITS} digits are needed")));
    }
    let need = bits_for_digits(digits) - 32;
    if let Some(v) = values.iter().find(|v| v.prec() < need) {
        return Err(Error::InsufficientPrecision(format!(
            "a value carries {} bits, fewer than the {need} needed for {digits} digits",
            v.prec()
        )));
    }
    let scale = values.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max).max(1.0);
    let tol = BigFloat::from_f64(scale * 10f64.powf(-(digits as f64) / 2.0), 64);
    // exact zeros are trivial relations
    if let Some(k) = values.iter().position(|v| v.is_zero()) {
        let mut c = vec![BigInt::zero(); values.len()];
        c[k] = BigInt::one();
        return Ok(Some(Relation { coefficients: c, residual: BigFloat::zero(64), height_searched: max_height, digits }));
    }
    let prec = bits_for_digits(digits);
    // values are only trusted to `digits`; round them there
    let rounded: Vec<BigFloat> = values
        .iter()
        .map(|v| BigFloat::parse_decimal(&v.to_sci(digits as usize), prec).expect("own decimal output parses"))
        .collect();
    let mut p = Pslq::new(&rounded, prec)?;
    let gamma = BigFloat::from_rational(&Rational::new(4, 3), prec).sqrt()?.mul_i64(11).div_i64(10);
    let detect = BigFloat::from_f64(10f64.powf(-(digits as f64) * 0.85), 64);
    let sqrt_n = (values.len() as f64).sqrt();
    let height_cap = BigInt::from(max_height);
    for _ in 0..20_000 {
        // a relation found at this stage is a column of B
        let small = (0..p.n).min_by(|&i, &j| p.y[i].abs().partial_cmp(&p.y[j].abs()).expect("ordered"));
        if let Some(j) = small {
            if p.y[j].abs() <= detect {
                let col: Vec<BigInt> = (0..p.n).map(|k| p.b[k][j].clone()).collect();
                let c = normalize(col);
                let height = c.iter().map(|x| x.abs()).max().unwrap_or_default();
                if height > height_cap || height.is_zero() {
                    return Ok(None);
                }
                let r = residual(values, &c, prec + 32);
                if r > tol {
                    return Ok(None);
                }
                return Ok(Some(Relation { coefficients: c, residual: r, height_searched: max_height, digits }));
            }
        }
        let md = p.max_diag();
        if md.is_zero() {
            break;
        }
        // any relation has Euclidean norm ≥ 1/max|H_jj|
        let bound = md.recip().to_f64();
        if bound / sqrt_n > max_height as f64 {
            return Ok(None);
        }
        let amax = p.a.iter().flatten().map(|x| x.bits()).max().unwrap_or(0);
        if amax as u32 + 8 > prec / 2 {
            return Ok(None);
        }
        p.step(&gamma);
    }
    Ok(None)
}

/// As [`find_relation`], checking that each value's error bound supports `digits`.
pub fn find_relation_checked(values: &[NumericResult], digits: u32, max_height: u64) -> Result<Option<Relation>> {
    let limit = 10f64.powi(-(digits as i32));
    if let Some(v) = values.iter().find(|v| v.error_bound.to_f64() > limit) {
        return Err(Error::InsufficientPrecision(format!(
            "an input has error bound {} > 1e-{digits}",
            v.error_bound.to_sci(3)
        )));
    }
    let prec = bits_for_digits(digits);
    let vals: Vec<BigFloat> = values.iter().map(|v| v.value.with_prec(prec.max(v.value.prec()))).collect();
    find_relation(&vals, digits, max_height)
}

/// A basis of the integer relations among `values`, found by repeated search:
/// each relation found eliminates one value (a pivot with the smallest nonzero
/// coefficient) before the next search, so the relations are independent and
/// span every relation within the height bound.
pub fn relation_basis(values: &[BigFloat], digits: u32, max_height: u64) -> Result<Vec<Relation>> {
    let mut active: Vec<usize> = (0..values.len()).collect();
    let mut basis = Vec::new();
    while active.len() >= 2 {
        let sub: Vec<BigFloat> = active.iter().map(|&i| values[i].clone()).collect();
        let Some(r) = find_relation(&sub, digits, max_height)? else { break };
        let mut full = vec![BigInt::zero(); values.len()];
        for (&i, c) in active.iter().zip(&r.coefficients) {
            full[i] = c.clone();
        }
        let pivot = (0..active.len())
            .filter(|&k| !r.coefficients[k].is_zero())
            .min_by_key(|&k| (r.coefficients[k].abs(), std::cmp::Reverse(k)))
            .expect("a relation has a nonzero coefficient");
        active.remove(pivot);
        basis.push(Relation { coefficients: full, ..r });
    }
    Ok(basis)
}

/// Rational coefficients expressing `target` in the span of `basis`, if any.
pub fn span_coefficients(basis: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<Rational>> {
    let k = basis.len();
    // rows: coordinates; columns: basis vectors, then the target
    let mut m: Vec<Vec<Rational>> = (0..target.len())
        .map(|i| {
            let mut row: Vec<Rational> = basis.iter().map(|b| Rational::from_integer(b[i].clone())).collect();
            row.push(Rational::from_integer(target[i].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in col..=k {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=k {
                    let d = &f * &m[row][c];
                    m[r][c] = &m[r][c] - &d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = m[r][k].clone();
    }
    Some(x)
}

/// A rational MZV combination of one weight matching a target number.
#[derive(Clone, Debug)]
pub struct MzvFit {
    pub combo: LinComb<Word>,
    pub weight: usize,
    pub residual: BigFloat,
    pub digits: u32,
}

impl MzvFit {
    pub fn to_json(&self) -> Value {
        json!({
            "combo": self.combo.to_string(),
            "terms": self.combo.iter().map(|(w, c)| json!({"word": w.to_string(), "coefficient": c.to_string()})).collect::<Vec<_>>(),
            "weight": self.weight,
            "residual": self.residual.to_sci(3),
            "digits": self.digits,
        })
    }
}

/// Admissible words of a weight whose ζ values are numerically independent,
/// chosen greedily in enumeration order.
pub fn independent_words(weight: usize, cache: &ZetaCache) -> Result<Vec<Word>> {
    static MEMO: OnceLock<Mutex<HashMap<usize, Vec<Word>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().expect("basis memo").get(&weight) {
        return Ok(v.clone());
    }
    let mut basis: Vec<Word> = Vec::new();
    let mut vals: Vec<BigFloat> = Vec::new();
    for w in enumerate_admissible(weight)? {
        let v = cache.zeta_word(&w, BASIS_DIGITS + 10)?.value;
        let dependent = if vals.is_empty() {
            false
        } else {
            let mut probe = vals.clone();
            probe.push(v.clone());
            match find_relation(&probe, BASIS_DIGITS, BASIS_HEIGHT)? {
                Some(r) => !r.coefficients.last().expect("nonempty").is_zero(),
                None => false,
            }
        };
        if !dependent {
            basis.push(w);
            vals.push(v);
        }
    }
    memo.lock().expect("basis memo").insert(weight, basis.clone());
    Ok(basis)
}

/// Express `target` as a rational combination of weight-`weight` MZVs.
pub fn fit_to_mzv(
    target: &NumericResult,
    weight: usize,
    digits: u32,
    max_height: u64,
    cache: &ZetaCache,
) -> Result<Option<MzvFit>> {
    if !(2..=7).contains(&weight) {
        return Err(Error::SizeOutOfRange(format!("fit weight {weight} not in 2..=7")));
    }
    if digits < MIN_RELATION_DIGITS {
        return Err(Error::InsufficientPrecision(format!("at least {MIN_RELATION_DIGITS} digits are needed")));
    }
    if target.error_bound.to_f64() > 10f64.powi(-(digits as i32)) {
        return Err(Error::InsufficientPrecision(format!(
            "target error bound {} exceeds 1e-{digits}",
            target.error_bound.to_sci(3)
        )));
    }
    let basis = independent_words(weight, cache)?;
    let zd = (digits + 10).min(MAX_DIGITS);
    let prec = bits_for_digits(digits);
    let mut values = vec![target.value.with_prec(prec.max(target.value.prec()))];
    for w in &basis {
        values.push(cache.zeta_word(w, zd)?.value);
    }
    let Some(rel) = find_relation(&values, digits, max_height)? else {
        return Ok(None);
    };
    let c0 = rel.coefficients[0].clone();
    if c0.is_zero() {
        return Ok(None);
    }
    let mut combo = LinComb::zero();
    for (w, c) in basis.iter().zip(&rel.coefficients[1..]) {
        combo.add_term(w.clone(), -Rational::from_integer(c.clone()) / Rational::from_integer(c0.clone()));
    }
    let numeric = eval_word_comb(&combo, zd, cache)?;
    let r = (&numeric.value - &target.value).abs();
    Ok(Some(MzvFit { combo, weight, residual: r, digits }))
}

/// Height of a rational combination: largest numerator or denominator.
pub fn combo_height(c: &LinComb<Word>) -> u64 {
    c.iter()
        .map(|(_, q)| q.numer().abs().max(q.denom().abs()).to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0)
}
