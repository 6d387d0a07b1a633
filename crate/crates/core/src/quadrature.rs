//! Double-exponential quadrature: iterated integrals over the order simplex
//! and tanh-sinh rules for the Selberg integrator.
//!
//! For an iterated integral every variable uses the same substitution
//! t = 1/(1 + e^{−π sinh τ}), under which dt/t = π cosh τ (1−t) dτ and
//! dt/(1−t) = π cosh τ t dτ both decay double-exponentially at the end where
//! they are integrable. The nested integral is then a chain of cumulative
//! integrals on one τ grid, computed with a 10-point interpolatory rule.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::numerics::{NumericResult, Rigor};
use crate::words::{is_admissible, Letter, Word};

pub const MAX_ITERATED_WEIGHT: usize = 6;
const STENCIL: usize = 10;
const TAU_MAX: f64 = 4.0;
const FIRST_LEVEL: i32 = 3;
const LAST_LEVEL: i32 = 9;

/// Solve the square system m·w = rhs exactly.
fn solve_exact(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Vec<Rational> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("nonsingular system");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &delta;
                }
                let delta = &f * &rhs[col];
                rhs[r] = &rhs[r] - &delta;
            }
        }
    }
    (0..n).map(|i| &rhs[i] / &m[i][i]).collect()
}

/// Weights for ∫_0^1 f(u) du from samples at u = s, s+1, …, s+9, for s = −9..=0
/// (index s + 9).
fn stencils() -> &'static Vec<[f64; STENCIL]> {
    static W: OnceLock<Vec<[f64; STENCIL]>> = OnceLock::new();
    W.get_or_init(|| {
        (-(STENCIL as i64 - 1)..=0)
            .map(|s| {
                let nodes: Vec<Rational> = (0..STENCIL as i64).map(|k| Rational::from(s + k)).collect();
                let m: Vec<Vec<Rational>> = (0..STENCIL as i32).map(|i| nodes.iter().map(|o| o.pow(i)).collect()).collect();
                let rhs: Vec<Rational> = (0..STENCIL as i64).map(|i| Rational::new(1, i + 1)).collect();
                let w = solve_exact(m, rhs);
                let mut out = [0.0; STENCIL];
                for (o, x) in out.iter_mut().zip(w) {
                    *o = x.to_f64();
                }
                out
            })
            .collect()
    })
}

/// Running integrals H[j] = ∫_{τ_0}^{τ_j} f on a uniform grid of spacing h.
pub fn cumulative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= STENCIL, "grid too short for the cumulative rule");
    let w = stencils();
    let mut out = vec![0.0; n];
    for j in 0..n - 1 {
        let s = (-4i64).max(-(j as i64)).min(n as i64 - 1 - STENCIL as i64 - j as i64 + 1);
        let start = (j as i64 + s) as usize;
        let ws = &w[(s + STENCIL as i64 - 1) as usize];
        let piece: f64 = ws.iter().zip(&f[start..start + STENCIL]).map(|(a, b)| a * b).sum();
        out[j + 1] = out[j] + h * piece;
    }
    out
}

struct DeGrid {
    h: f64,
    /// π cosh τ · (1 − t), the dt/t weight
    gx: Vec<f64>,
    /// π cosh τ · t, the dt/(1−t) weight
    gy: Vec<f64>,
}

impl DeGrid {
    fn new(level: i32) -> Self {
        let h = 2f64.powi(-level);
        let m = (TAU_MAX / h).round() as i64;
        let (mut gx, mut gy) = (Vec::new(), Vec::new());
        for j in -m..=m {
            let tau = j as f64 * h;
            let u = std::f64::consts::PI * tau.sinh();
            let c = std::f64::consts::PI * tau.cosh();
            let t = 1.0 / (1.0 + (-u).exp());
            let one_minus_t = 1.0 / (1.0 + u.exp());
            gx.push(c * one_minus_t);
            gy.push(c * t);
        }
        DeGrid { h, gx, gy }
    }

    fn weight(&self, l: Letter) -> &[f64] {
        match l {
            Letter::X => &self.gx,
            Letter::Y => &self.gy,
        }
    }

    fn integrate(&self, w: &Word) -> f64 {
        let mut inner: Option<Vec<f64>> = None;
        for &l in w.letters().iter().rev() {
            let g = self.weight(l);
            let f: Vec<f64> = match &inner {
                None => g.to_vec(),
                Some(h) => g.iter().zip(h).map(|(a, b)| a * b).collect(),
            };
            inner = Some(cumulative(&f, self.h));
        }
        inner.and_then(|h| h.last().copied()).unwrap_or(1.0)
    }
}

/// ∫_{1>t₁>…>t_n>0} ∏ ω_{aᵢ}(tᵢ) by direct quadrature, with a step-doubling
/// error estimate. Runs in double precision.
pub fn iterated_integral(w: &Word, digits: u32) -> Result<NumericResult> {
    if !is_admissible(w) {
        return Err(Error::NotAdmissible(format!("the iterated integral of {w} diverges at an endpoint")));
    }
    if w.len() > MAX_ITERATED_WEIGHT {
        return Err(Error::EnvelopeExceeded(format!("weight {} exceeds {MAX_ITERATED_WEIGHT}", w.len())));
    }
    let target = 10f64.powi(-(digits.min(300) as i32));
    let mut prev = DeGrid::new(FIRST_LEVEL).integrate(w);
    let mut err = f64::INFINITY;
    for level in FIRST_LEVEL + 1..=LAST_LEVEL {
        let cur = DeGrid::new(level).integrate(w);
        err = (cur - prev).abs();
        prev = cur;
        let floor = 1e-14 * cur.abs().max(1.0);
        if err <= target.max(floor) {
            err = err.max(floor);
            break;
        }
    }
    Ok(NumericResult::from_f64(prev, err, Rigor::HeuristicQuadrature, digits))
}

/// Abscissas x ∈ (0,1), complements 1 − x and weights of the tanh-sinh rule
/// on [0,1] with step h, truncated once the distance to an endpoint drops
/// below `cutoff`.
pub fn tanh_sinh_nodes(h: f64, cutoff: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut k: i64 = 0;
    loop {
        let tau = k as f64 * h;
        let u = half_pi * tau.sinh();
        let c = half_pi * tau.cosh();
        // x = (1 + tanh u)/2 = 1/(1 + e^{−2u})
        let e = (-2.0 * u).exp();
        let x = 1.0 / (1.0 + e);
        let xc = e / (1.0 + e);
        let w = h * c * 2.0 * x * xc;
        if k > 0 && (xc < cutoff || w == 0.0) {
            break;
        }
        out.push((x, xc, w));
        if k > 0 {
            out.push((xc, x, w));
        }
        k += 1;
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_polynomials() {
        for (idx, w) in stencils().iter().enumerate() {
            let s = idx as i64 - 9;
            for deg in 0..10 {
                let terms: Vec<f64> = w.iter().enumerate().map(|(k, c)| c * ((s + k as i64) as f64).powi(deg)).collect();
                let q: f64 = terms.iter().sum();
                let scale: f64 = terms.iter().map(|t| t.abs()).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13 * scale.max(1.0), "s={s} deg={deg}");
            }
        }
    }

    #[test]
    fn cumulative_integrates_smooth_functions() {
        let h = 0.05;
        let xs: Vec<f64> = (0..=60).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let c = cumulative(&f, h);
        for (x, v) in xs.iter().zip(&c) {
            assert!((v - x.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_two_and_three() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        let r = iterated_integral(&"xy".parse().unwrap(), 12).unwrap();
        assert!((r.to_f64() - z2).abs() < 1e-12, "{}", r.to_f64());
        assert!(r.error_bound.to_f64() < 1e-10);
        let z3 = 1.202_056_903_159_594_3;
        let r = iterated_integral(&"xxy".parse().unwrap(), 12).unwrap();
        assert!((r.to_f64() - z3).abs() < 1e-12);
        let r = iterated_integral(&"xyy".parse().unwrap(), 12).unwrap();
        assert!((r.to_f64() - z3).abs() < 1e-12);
        assert_eq!(r.rigor, Rigor::HeuristicQuadrature);
    }

    #[test]
    fn rejects_divergent() {
        assert!(matches!(iterated_integral(&"y".parse().unwrap(), 12), Err(Error::NotAdmissible(_))));
        assert!(matches!(iterated_integral(&"yx".parse().unwrap(), 12), Err(Error::NotAdmissible(_))));
        assert!(matches!(iterated_integral(&"xxxxxxy".parse().unwrap(), 12), Err(Error::EnvelopeExceeded(_))));
    }

    #[test]
    fn tanh_sinh_integrates_singular_endpoint() {
        // ∫_0^1 x^{-1/2} dx = 2
        let s: f64 = tanh_sinh_nodes(1.0 / 16.0, 1e-300).iter().map(|(x, _, w)| w / x.sqrt()).sum();
        assert!((s - 2.0).abs() < 1e-13, "{s}");
    }
}
