//! From graphs to MZVs: Selberg expansions of ordered rooted graphs, fitted
//! order by order to weight-graded MZV combinations, and the check that
//! disjoint unions map to products.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::graph::{Edge, Exponent, OrderedRootedGraph, RootPos};
use crate::numerics::{ZetaCache, MIN_DIGITS};
use crate::relation::{fit_to_mzv, MzvFit};
use crate::selberg::{epsilon_expand, normalized_expand, EpsilonExpansion, SelbergSpec};
use crate::words::{is_admissible, Letter, Word};

pub const DEFAULT_FIT_HEIGHT: u64 = 50;

/// Expansion of a graph and the MZV fits of its coefficients.
#[derive(Clone, Debug)]
pub struct FunctionalResult {
    pub graph: OrderedRootedGraph,
    /// Degree-normalized expansion; the fitted one.
    pub expansion: EpsilonExpansion,
    pub raw_expansion: EpsilonExpansion,
    /// One entry per order ≥ 2.
    pub fits: Vec<(usize, Option<MzvFit>)>,
}

impl FunctionalResult {
    pub fn to_json(&self) -> Value {
        json!({
            "graph": self.graph.to_json_value(),
            "expansion": self.expansion.to_json(),
            "raw_expansion": self.raw_expansion.to_json(),
            "fits": self.fits.iter().map(|(m, f)| json!({
                "order": m,
                "fit": f.as_ref().map(MzvFit::to_json),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The word's iterated integral as a graph: free vertices t₁ > … > t_n between
/// roots 0 and 1; letter x at tᵢ gives the seed factor 1/tᵢ, letter y gives
/// 1/(1 − tᵢ).
pub fn word_graph(w: &Word) -> Result<OrderedRootedGraph> {
    if !is_admissible(w) {
        return Err(Error::NotAdmissible(format!("the word {w} does not give a convergent integral")));
    }
    let n = w.len();
    // increasing order: r0, t_n, …, t_1, r1
    let mut vertices = vec!["r0".to_string()];
    vertices.extend((1..=n).rev().map(|i| format!("t{i}")));
    vertices.push("r1".into());
    let top = n + 1;
    let index_of = |i: usize| n + 1 - i;
    let edges = w
        .letters()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let v = index_of(k + 1);
            let (a, b) = match l {
                Letter::X => (0, v),
                Letter::Y => (v, top),
            };
            Edge { a, b, omega: Some(Exponent::new(Rational::from(-1), Rational::zero())), seed: true }
        })
        .collect();
    Ok(OrderedRootedGraph { vertices, roots: BTreeMap::from([(0, RootPos::Zero), (top, RootPos::One)]), edges })
}

/// Expand a graph to `order` and fit every coefficient of order ≥ 2 to MZVs
/// of that weight, at the precision the coefficient supports.
pub fn selberg_functional(
    g: &OrderedRootedGraph,
    x_param: Option<f64>,
    order: usize,
    digits: u32,
    max_height: u64,
    cache: &ZetaCache,
) -> Result<FunctionalResult> {
    let spec = SelbergSpec::new(g.clone(), x_param)?;
    let raw_expansion = epsilon_expand(&spec, order, digits)?;
    let expansion = normalized_expand(&spec, order, digits)?;
    let mut fits = Vec::new();
    for m in 2..=order {
        let c = &expansion.coefficients[m];
        let fit_digits = c.supported_digits().min(digits);
        let fit = if fit_digits < MIN_DIGITS || m > 7 { None } else { fit_to_mzv(c, m, fit_digits, max_height, cache)? };
        fits.push((m, fit));
    }
    Ok(FunctionalResult { graph: g.clone(), expansion, raw_expansion, fits })
}

/// Per-order comparison of the union's expansion with the product.
#[derive(Clone, Debug)]
pub struct OrderCheck {
    pub order: usize,
    pub union: f64,
    pub product: f64,
    pub difference: f64,
    pub error_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct HomomorphismReport {
    pub orders: Vec<OrderCheck>,
    pub tolerance: f64,
    pub pass: bool,
}

impl HomomorphismReport {
    pub fn to_json(&self, digits: u32) -> Value {
        let d = digits.min(17) as usize;
        let fmt = |x: f64| crate::bigfloat::BigFloat::from_f64(x, 64).to_decimal(d);
        json!({
            "pass": self.pass,
            "tolerance": format!("{:.1e}", self.tolerance),
            "orders": self.orders.iter().map(|o| json!({
                "order": o.order,
                "union": fmt(o.union),
                "product": fmt(o.product),
                "difference": format!("{:.2e}", o.difference),
                "error_bound": format!("{:.2e}", o.error_bound),
                "pass": o.pass,
            })).collect::<Vec<_>>(),
        })
    }
}

/// The expansion of g₁ ⊔ g₂ against the Cauchy product of the two expansions.
/// An order passes when the difference and the combined error bound are both
/// within `tolerance`.
pub fn homomorphism_check(
    g1: &OrderedRootedGraph,
    g2: &OrderedRootedGraph,
    x_param: Option<f64>,
    order: usize,
    digits: u32,
    tolerance: f64,
) -> Result<HomomorphismReport> {
    let e1 = normalized_expand(&SelbergSpec::new(g1.clone(), x_param)?, order, digits)?;
    let e2 = normalized_expand(&SelbergSpec::new(g2.clone(), x_param)?, order, digits)?;
    let eu = normalized_expand(&SelbergSpec::new(g1.disjoint_union(g2), x_param)?, order, digits)?;
    let prod = e1.product(&e2);
    let orders: Vec<OrderCheck> = (0..=order)
        .map(|m| {
            let u = &eu.coefficients[m];
            let p = &prod.coefficients[m];
            let difference = (u.to_f64() - p.to_f64()).abs();
            let error_bound = u.error_bound.to_f64() + p.error_bound.to_f64();
            OrderCheck {
                order: m,
                union: u.to_f64(),
                product: p.to_f64(),
                difference,
                error_bound,
                pass: difference <= tolerance && error_bound <= tolerance,
            }
        })
        .collect();
    let pass = orders.iter().all(|o| o.pass);
    Ok(HomomorphismReport { orders, tolerance, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::zeta_word;
    use crate::selberg::selberg_value;

    #[test]
    fn word_graph_shape() {
        let g = word_graph(&"xy".parse().unwrap()).unwrap();
        assert_eq!(g.vertices, vec!["r0", "t2", "t1", "r1"]);
        assert!(g.validate().valid);
        assert!(matches!(word_graph(&"y".parse().unwrap()), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn word_graphs_evaluate_to_zeta() {
        for w in ["xy", "xxy", "xyy"] {
            let w: Word = w.parse().unwrap();
            let s = SelbergSpec::new(word_graph(&w).unwrap(), None).unwrap();
            let v = selberg_value(&s, 0.0, 12).unwrap();
            let z = zeta_word(&w, 20).unwrap();
            assert!((v.to_f64() - z.to_f64()).abs() < 1e-9, "{w}: {} vs {}", v.to_f64(), z.to_f64());
        }
    }

    #[test]
    fn empty_graph_functional() {
        let cache = ZetaCache::new();
        let r = selberg_functional(&OrderedRootedGraph::empty(), None, 3, 20, 50, &cache).unwrap();
        assert_eq!(r.expansion.coefficients[0].to_f64(), 1.0);
        for c in &r.expansion.coefficients[1..] {
            assert_eq!(c.to_f64(), 0.0);
        }
        for (_, f) in &r.fits {
            assert!(f.as_ref().unwrap().combo.is_zero());
        }
    }
}
