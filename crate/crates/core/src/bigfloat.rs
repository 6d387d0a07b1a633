//! Binary arbitrary-precision floating point: value = mantissa · 2^exponent,
//! mantissa rounded to `prec` bits (round half away from zero) after every
//! operation. Elementary functions work at a few guard bits above `prec`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Clone)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

/// Bits needed for `digits` correct decimals plus a guard margin.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 32
}

fn shr_round(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let mag = m.magnitude();
    let q = mag >> s;
    let half = (mag >> (s - 1)) & num_bigint::BigUint::one();
    let q = q + half;
    BigInt::from_biguint(if m.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus }, q)
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        BigFloat::from_i64(1, prec)
    }

    fn normalized(mut mant: BigInt, mut exp: i64, prec: u32) -> Self {
        if mant.is_zero() {
            return BigFloat::zero(prec);
        }
        let bits = mant.bits();
        if bits > prec as u64 {
            let s = bits - prec as u64;
            mant = shr_round(&mant, s);
            exp += s as i64;
        }
        // strip trailing zero bits so equal values share a representation
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mant >>= tz;
            exp += tz as i64;
        }
        BigFloat { mant, exp, prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        BigFloat::normalized(BigInt::from(n), 0, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        BigFloat::normalized(n.clone(), 0, prec)
    }

    pub fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        BigFloat::normalized(mant, exp, prec)
    }

    /// Mantissa and binary exponent; `from_parts` inverts this exactly.
    pub fn parts(&self) -> (&BigInt, i64) {
        (&self.mant, self.exp)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let n = BigFloat::from_bigint(r.numer(), prec + 8);
        let d = BigFloat::from_bigint(r.denom(), prec + 8);
        (&n / &d).with_prec(prec)
    }

    /// Exact conversion of a finite f64.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        if x == 0.0 || !x.is_finite() {
            return BigFloat::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if raw_exp == 0 { (frac << 1, -1075) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        BigFloat::normalized(BigInt::from(m) * sign, e, prec)
    }

    /// Parses decimal text such as `-1.25`, `3/7` or `1.5e-20` exactly, then rounds.
    pub fn parse_decimal(s: &str, prec: u32) -> Result<Self> {
        let t = s.trim();
        let (body, exp10) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = t[i + 1..].parse().map_err(|_| Error::parse(i + 1, "bad exponent"))?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let r: Rational = body.parse()?;
        let scale = Rational::from(10).pow(exp10);
        Ok(BigFloat::from_rational(&(r * scale), prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigFloat::normalized(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    /// floor(log2 |x|); a very negative sentinel for zero.
    pub fn log2_floor(&self) -> i64 {
        if self.mant.is_zero() {
            return i64::MIN / 4;
        }
        self.exp + self.mant.bits() as i64 - 1
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigFloat::normalized(&self.mant * k, self.exp, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self / &BigFloat::from_i64(k, self.prec)
    }

    pub fn recip(&self) -> Self {
        &BigFloat::one(self.prec) / self
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut base = self.with_prec(self.prec + 2 * (32 - n.leading_zeros()));
        let mut acc = BigFloat::one(base.prec);
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc.with_prec(self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (top, shift) = if bits > 60 { (shr_round(&self.mant, (bits - 60) as u64), bits - 60) } else { (self.mant.clone(), 0) };
        let m = top.to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        // split the scaling to stay inside the f64 exponent range
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        shr_round(&self.mant, (-self.exp) as u64)
    }

    pub fn floor_to_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let d = BigInt::one() << (-self.exp) as u64;
        self.mant.div_floor(&d)
    }

    /// Exact rational value of the stored binary number.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn max(a: &BigFloat, b: &BigFloat) -> BigFloat {
        if a >= b { a.clone() } else { b.clone() }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::DomainError("sqrt of a negative number".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let target = 2 * self.prec as i64 + 4;
        let mut shift = (target - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        let e = self.exp - shift;
        Ok(BigFloat::normalized(m.sqrt(), e / 2, self.prec))
    }

    /// π by the Gauss–Legendre arithmetic-geometric mean iteration.
    pub fn pi(prec: u32) -> Self {
        let wp = prec + 32;
        let one = BigFloat::one(wp);
        let mut a = one.clone();
        let mut b = BigFloat::from_i64(2, wp).sqrt().unwrap().recip();
        let mut t = one.mul_pow2(-2);
        let mut p = one.clone();
        loop {
            let an = (&a + &b).mul_pow2(-1);
            let bn = (&a * &b).sqrt().unwrap();
            let d = &a - &an;
            t = &t - &(&p * &d.square());
            p = p.mul_pow2(1);
            a = an;
            b = bn;
            let gap = &a - &b;
            if gap.is_zero() || gap.log2_floor() < -(wp as i64) / 2 - 4 {
                break;
            }
        }
        let s = &a + &b;
        (&s.square() / &t.mul_pow2(2)).with_prec(prec)
    }

    /// atanh(1/k) for integer k ≥ 2 by its power series.
    fn atanh_recip(k: i64, prec: u32) -> Self {
        let wp = prec + 16;
        let kk = BigFloat::from_i64(k * k, wp);
        let mut power = BigFloat::from_i64(k, wp).recip();
        let mut sum = power.clone();
        let mut n = 1i64;
        loop {
            power = &power / &kk;
            let term = power.div_i64(2 * n + 1);
            if term.is_zero() || term.log2_floor() < -(wp as i64) {
                break;
            }
            sum = &sum + &term;
            n += 1;
        }
        sum.with_prec(prec)
    }

    pub fn ln2(prec: u32) -> Self {
        BigFloat::atanh_recip(3, prec + 8).mul_pow2(1).with_prec(prec)
    }

    pub fn ln(&self) -> Result<Self> {
        if self.signum() <= 0 {
            return Err(Error::DomainError("logarithm of a non-positive number".into()));
        }
        let wp = self.prec + 24;
        // x = f · 2^k with f in [1/√2, √2)
        let mut k = self.log2_floor() + 1;
        let mut f = self.with_prec(wp).mul_pow2(-k);
        if f.to_f64() < std::f64::consts::FRAC_1_SQRT_2 {
            f = f.mul_pow2(1);
            k -= 1;
        }
        let one = BigFloat::one(wp);
        let z = &(&f - &one) / &(&f + &one);
        let z2 = z.square();
        let mut power = z.clone();
        let mut sum = z.clone();
        let mut n = 1i64;
        while !power.is_zero() {
            power = &power * &z2;
            let term = power.div_i64(2 * n + 1);
            if term.is_zero() || term.log2_floor() < -(wp as i64) - 2 {
                break;
            }
            sum = &sum + &term;
            n += 1;
        }
        let res = &sum.mul_pow2(1) + &BigFloat::ln2(wp).mul_i64(k);
        Ok(res.with_prec(self.prec))
    }

    pub fn exp(&self) -> Self {
        if self.is_zero() {
            return BigFloat::one(self.prec);
        }
        let mag = self.to_f64().abs();
        let extra = if mag > 1.0 { mag.log2().ceil() as u32 + 8 } else { 8 };
        let squarings = ((self.prec as f64).sqrt() / 2.0).ceil() as u32;
        let wp = self.prec + extra + squarings + 16;
        let x = self.with_prec(wp);
        let ln2 = BigFloat::ln2(wp);
        let n = (&x / &ln2).round_to_bigint();
        let r = &x - &(&ln2 * &BigFloat::from_bigint(&n, wp));
        let r = r.mul_pow2(-(squarings as i64));
        let one = BigFloat::one(wp);
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut k = 1i64;
        loop {
            term = (&term * &r).div_i64(k);
            if term.is_zero() || term.log2_floor() < -(wp as i64) {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..squarings {
            sum = sum.square();
        }
        let shift = n.to_i64().expect("exponent fits in i64");
        sum.mul_pow2(shift).with_prec(self.prec)
    }

    /// x^y for x > 0.
    pub fn powf(&self, y: &BigFloat) -> Result<Self> {
        let wp = self.prec.max(y.prec) + 16;
        let l = self.with_prec(wp).ln()?;
        Ok((&l * &y.with_prec(wp)).exp().with_prec(self.prec))
    }

    fn decimal_digits(&self, sig: usize) -> (BigInt, i64) {
        let sig = sig.max(1);
        let mag = self.abs();
        let est = ((mag.log2_floor() as f64 + 0.5) / LOG2_10).floor() as i64;
        let mut e10 = est;
        for _ in 0..4 {
            let k = sig as i64 - 1 - e10;
            let mut num = mag.mant.clone();
            let mut den = BigInt::one();
            if k >= 0 {
                num *= num_traits::pow(BigInt::from(10), k as usize);
            } else {
                den *= num_traits::pow(BigInt::from(10), (-k) as usize);
            }
            if mag.exp >= 0 {
                num <<= mag.exp as u64;
            } else {
                den <<= (-mag.exp) as u64;
            }
            let (q, r) = num.div_rem(&den);
            let n = if &r * 2 >= den { q + 1 } else { q };
            let lo = num_traits::pow(BigInt::from(10), sig - 1);
            let hi = &lo * 10;
            if n >= hi {
                e10 += 1;
            } else if n < lo {
                e10 -= 1;
            } else {
                return (n, e10);
            }
        }
        unreachable!("decimal exponent search did not settle")
    }

    /// Exactly `sig` significant decimal digits: fixed notation for moderate
    /// magnitudes, scientific otherwise.
    pub fn to_decimal(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return if sig == 1 { "0".into() } else { format!("0.{}", "0".repeat(sig - 1)) };
        }
        let (n, e10) = self.decimal_digits(sig);
        let s = n.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        if (-6..sig as i64).contains(&e10) {
            if e10 >= 0 {
                let split = e10 as usize + 1;
                if split >= s.len() {
                    format!("{sign}{s}")
                } else {
                    format!("{sign}{}.{}", &s[..split], &s[split..])
                }
            } else {
                format!("{sign}0.{}{s}", "0".repeat((-e10 - 1) as usize))
            }
        } else {
            format!("{sign}{}", sci(&s, e10))
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `2.50e-35`.
    pub fn to_sci(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let (n, e10) = self.decimal_digits(sig);
        let sign = if self.is_negative() { "-" } else { "" };
        format!("{sign}{}", sci(&n.to_string(), e10))
    }

    /// Upper bound 2^(floor(log2|x|)+1) as a cheap magnitude proxy.
    pub fn magnitude_bound(&self) -> f64 {
        if self.is_zero() { 0.0 } else { 2f64.powi((self.log2_floor() + 1) as i32) }
    }
}

fn sci(digits: &str, e10: i64) -> String {
    if digits.len() == 1 {
        format!("{digits}e{e10}")
    } else {
        format!("{}.{}e{e10}", &digits[..1], &digits[1..])
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl BigFloat {
    fn cmp_value(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (la, lb) = (self.log2_floor(), other.log2_floor());
        if la != lb {
            let by_mag = la.cmp(&lb);
            return if sa > 0 { by_mag } else { by_mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec.saturating_sub(32)) as f64 / LOG2_10).floor().max(10.0) as usize;
        f.write_str(&self.to_decimal(f.precision().unwrap_or(digits)))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_sci(20))
    }
}

impl<'a> Add<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &'a BigFloat) -> BigFloat {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return rhs.with_prec(prec);
        }
        if rhs.is_zero() {
            return self.with_prec(prec);
        }
        // operand far below the other's last bit cannot affect the rounding
        let (big, small) = if self.log2_floor() >= rhs.log2_floor() { (self, rhs) } else { (rhs, self) };
        if big.log2_floor() - small.log2_floor() > prec as i64 + 4 {
            let nudged = BigFloat::normalized(
                (&big.mant << (prec as u64 + 8)) + small.mant.signum(),
                big.exp - prec as i64 - 8,
                prec,
            );
            return nudged;
        }
        let e = self.exp.min(rhs.exp);
        let m = (&self.mant << (self.exp - e) as u64) + (&rhs.mant << (rhs.exp - e) as u64);
        BigFloat::normalized(m, e, prec)
    }
}

impl<'a> Sub<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &'a BigFloat) -> BigFloat {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &'a BigFloat) -> BigFloat {
        BigFloat::normalized(&self.mant * &rhs.mant, self.exp + rhs.exp, self.prec.max(rhs.prec))
    }
}

impl<'a> Div<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &'a BigFloat) -> BigFloat {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return BigFloat::zero(prec);
        }
        let shift = (prec as i64 + 4 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << shift as u64;
        let (q, r) = num.div_rem(&rhs.mant);
        // sticky bit keeps round-half decisions honest
        let q = (q << 1u32) + if r.is_zero() { BigInt::zero() } else { num.signum() * rhs.mant.signum() };
        BigFloat::normalized(q, self.exp - rhs.exp - shift - 1, prec)
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -self.mant, exp: self.exp, prec: self.prec }
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                (&self).$method(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);
