//! Γ and log Γ for positive real arguments at arbitrary precision.

use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::numerics::bernoulli;

const STIRLING_TERMS: usize = 30;

/// log2 of the first omitted Stirling term |B_{2K+2}| / ((2K+2)(2K+1) x^{2K+1}),
/// using |B_{2m}| ≤ 2.01 (2m)! / (2π)^{2m}.
fn stirling_remainder_log2(x: f64) -> f64 {
    let m = STIRLING_TERMS + 1;
    let two_m = 2 * m;
    let ln_fact: f64 = (2..=two_m).map(|i| (i as f64).ln()).sum();
    let ln_b = 2.01f64.ln() + ln_fact - two_m as f64 * (2.0 * std::f64::consts::PI).ln();
    let ln_term = ln_b - ((two_m * (two_m - 1)) as f64).ln() - (two_m as f64 - 1.0) * x.ln();
    ln_term / std::f64::consts::LN_2
}

/// log Γ(x) for x > 0.
pub fn ln_gamma(x: &BigFloat) -> Result<BigFloat> {
    if x.signum() <= 0 {
        return Err(Error::DomainError("log Γ is only provided for positive arguments".into()));
    }
    let prec = x.prec();
    let wp = prec + 32;
    let xf = x.to_f64();
    let mut shift = 0usize;
    while stirling_remainder_log2(xf + shift as f64) > -(wp as f64) - 8.0 {
        shift += 1;
    }
    let x = x.with_prec(wp);
    // Γ(x) = Γ(x + m) / (x (x+1) … (x+m−1))
    let mut prod = BigFloat::one(wp);
    for i in 0..shift {
        prod = &prod * &(&x + &BigFloat::from_i64(i as i64, wp));
    }
    let z = &x + &BigFloat::from_i64(shift as i64, wp);
    let half = BigFloat::one(wp).mul_pow2(-1);
    let two_pi = BigFloat::pi(wp).mul_pow2(1);
    let ln_z = z.ln()?;
    let mut s = &(&(&(&z - &half) * &ln_z) - &z) + &two_pi.ln()?.mul_pow2(-1);
    let zinv = z.recip();
    let zinv2 = zinv.square();
    let mut zpow = zinv.clone();
    for k in 1..=STIRLING_TERMS {
        let b = BigFloat::from_rational(&bernoulli(2 * k)?, wp);
        let term = (&b * &zpow).div_i64((2 * k * (2 * k - 1)) as i64);
        s = &s + &term;
        zpow = &zpow * &zinv2;
    }
    let res = if shift > 0 { &s - &prod.ln()? } else { s };
    Ok(res.with_prec(prec))
}

/// Γ(x) for x > 0.
pub fn gamma(x: &BigFloat) -> Result<BigFloat> {
    let prec = x.prec();
    Ok(ln_gamma(&x.with_prec(prec + 16))?.exp().with_prec(prec))
}
