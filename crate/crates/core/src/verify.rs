//! Verification batteries. Every report is a deterministic function of the
//! configuration: no timings, fixed iteration orders, seeded randomness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::bridge::{homomorphism_check, selberg_functional, word_graph};
use crate::error::{Error, Result};
use crate::exact::{LinComb, Rational};
use crate::graph::OrderedRootedGraph;
use crate::matrix::{gue_moment, genus_expansion, mc_moment, moment_from_connected, penner_chi, pairings, TraceWord};
use crate::numerics::{eval_comp_comb, eval_word_comb, zeta_nonpositive, ZetaCache};
use crate::quadrature::iterated_integral;
use crate::relation::{relation_basis, span_coefficients};
use crate::selberg::{normalized_expand, selberg_closed_form, selberg_value, SelbergSpec};
use crate::trees::{
    antipode_forest, b_plus, coproduct, coproduct_forest, forest_mul, generate_trees, graft_lin, Forest, RootedTree,
};
use crate::words::{composition_from_word, dual, enumerate_admissible, shuffle, stuffle, Word};

pub const SUITES: [&str; 5] = ["hopf", "mzv-identities", "selberg-oracle", "matrix", "bridge"];

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub digits: u32,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "pass": self.pass(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {}/{}: {}\n", self.suite, c.name, c.detail));
        }
        s
    }
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), pass, detail: detail.into() }
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn within(name: &str, diff: f64, tol: f64) -> Check {
    check(name, diff <= tol, format!("max |diff| {} (tol {})", sci(diff), sci(tol)))
}

/// Run one suite by name.
pub fn run_suite(name: &str, cfg: &VerifyConfig, cache: &ZetaCache) -> Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let checks = pool.install(|| match name {
        "hopf" => hopf(),
        "mzv-identities" => mzv_identities(cfg, cache),
        "selberg-oracle" => selberg_oracle(cfg, cache),
        "matrix" => matrix(cfg),
        "bridge" => bridge(cfg, cache),
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
    })?;
    Ok(SuiteReport { suite: name.to_string(), checks })
}

fn tree_counts() -> Check {
    let expect = [1usize, 1, 2, 4, 9, 20, 48, 115];
    let got: Vec<usize> = (1..=8).map(|n| generate_trees(n).map(|t| t.len()).unwrap_or(0)).collect();
    check("tree-counts", got == expect, format!("{got:?}"))
}

type T3 = (Forest, Forest, Forest);

fn hopf() -> Result<Vec<Check>> {
    let mut out = vec![tree_counts()];

    let mut n_trees = 0;
    let mut ok = true;
    for n in 1..=5 {
        for t in generate_trees(n)? {
            n_trees += 1;
            let d = coproduct(&t);
            let left: LinComb<T3> = d.map_linear(|(a, b)| {
                coproduct_forest(a).map_linear(|(p, q)| LinComb::basis((p.clone(), q.clone(), b.clone())))
            });
            let right: LinComb<T3> = d.map_linear(|(a, b)| {
                coproduct_forest(b).map_linear(|(p, q)| LinComb::basis((a.clone(), p.clone(), q.clone())))
            });
            ok &= left == right;
        }
    }
    out.push(check("coassociativity", ok, format!("{n_trees} trees with at most 5 vertices")));

    let mut n_trees = 0;
    let mut ok = true;
    for n in 1..=4 {
        for t in generate_trees(n)? {
            n_trees += 1;
            let d = coproduct(&t);
            let left = d.map_linear(|(a, b)| antipode_forest(a).mul(&LinComb::basis(b.clone()), forest_mul));
            let right = d.map_linear(|(a, b)| LinComb::basis(a.clone()).mul(&antipode_forest(b), forest_mul));
            ok &= left.is_zero() && right.is_zero();
        }
    }
    out.push(check("antipode", ok, format!("S*id = id*S = 0 on {n_trees} trees with at most 4 vertices")));

    let small: Vec<RootedTree> = (1..=3).flat_map(|n| generate_trees(n).unwrap_or_default()).collect();
    let mut forests = vec![Forest::unit()];
    for a in &small {
        forests.push(Forest::single(a.clone()));
        for b in &small {
            if a <= b && a.vertex_count() + b.vertex_count() <= 3 {
                forests.push(Forest::single(a.clone()).product(&Forest::single(b.clone())));
            }
        }
    }
    let leaf = Forest::single(RootedTree::leaf());
    forests.push(leaf.product(&leaf).product(&leaf));
    let mut ok = true;
    for f in &forests {
        let bf = Forest::single(b_plus(f));
        let lhs = coproduct_forest(&bf);
        let mut rhs = LinComb::basis((bf.clone(), Forest::unit()));
        rhs = rhs.add(&coproduct_forest(f).map_linear(|(a, b)| LinComb::basis((a.clone(), Forest::single(b_plus(b))))));
        ok &= lhs == rhs;
    }
    out.push(check("cocycle", ok, format!("{} forests with at most 3 vertices", forests.len())));

    let mut ok = true;
    for a in &small {
        for b in &small {
            for c in &small {
                let (a, b, c) = (LinComb::basis(a.clone()), LinComb::basis(b.clone()), LinComb::basis(c.clone()));
                let lhs = graft_lin(&graft_lin(&a, &b), &c).sub(&graft_lin(&a, &graft_lin(&b, &c)));
                let rhs = graft_lin(&graft_lin(&a, &c), &b).sub(&graft_lin(&a, &graft_lin(&c, &b)));
                ok &= lhs == rhs;
            }
        }
    }
    out.push(check("pre-lie", ok, format!("{} triples", small.len().pow(3))));
    Ok(out)
}

fn admissible_up_to(max: usize) -> Result<Vec<Word>> {
    let mut v = Vec::new();
    for n in 2..=max {
        v.extend(enumerate_admissible(n)?);
    }
    Ok(v)
}

fn mzv_identities(cfg: &VerifyConfig, cache: &ZetaCache) -> Result<Vec<Check>> {
    let digits = cfg.digits;
    let mut out = Vec::new();
    let p = bits_for_digits(digits + 10);
    let z2 = cache.zeta(&"2".parse()?, digits)?;
    let pi2 = BigFloat::pi(p).square().div_i64(6);
    out.push(within("zeta2-pi", (&z2.value - &pi2).abs().to_f64(), 10f64.powi(-(digits as i32) + 2)));

    let tol20 = 1e-20f64.max(10f64.powi(-(digits as i32) + 2));
    let mut worst = 0.0f64;
    let words = admissible_up_to(7)?;
    for w in &words {
        let a = cache.zeta_word(w, digits)?;
        let b = cache.zeta_word(&dual(w)?, digits)?;
        worst = worst.max((&a.value - &b.value).abs().to_f64());
    }
    out.push(check(
        "duality",
        worst <= tol20,
        format!("{} words of weight 2..7, max |diff| {} (tol {})", words.len(), sci(worst), sci(tol20)),
    ));

    let tol18 = 1e-18f64.max(10f64.powi(-(digits as i32) + 2));
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for a in &words {
        for b in &words {
            if a.weight() + b.weight() > 7 {
                continue;
            }
            pairs += 1;
            let prod = cache.zeta_word(a, digits)?.mul(&cache.zeta_word(b, digits)?);
            let sh = eval_word_comb(&shuffle(a, b), digits, cache)?;
            let st = eval_comp_comb(&stuffle(&composition_from_word(a)?, &composition_from_word(b)?), digits, cache)?;
            worst = worst.max((&sh.value - &prod.value).abs().to_f64());
            worst = worst.max((&st.value - &prod.value).abs().to_f64());
        }
    }
    out.push(check(
        "double-products",
        worst <= tol18,
        format!("{pairs} pairs, max |diff| {} (tol {})", sci(worst), sci(tol18)),
    ));

    let mut worst = 0.0f64;
    let words5 = admissible_up_to(5)?;
    for w in &words5 {
        let q = iterated_integral(w, 12)?;
        worst = worst.max((q.to_f64() - cache.zeta_word(w, digits)?.to_f64()).abs());
    }
    out.push(within("series-integral", worst, 1e-10));

    let rel_digits = digits.min(30);
    let z = |s: &str| -> Result<BigFloat> { Ok(cache.zeta(&s.parse()?, digits.max(rel_digits))?.value) };
    let battery: Vec<(&str, Vec<BigFloat>, Vec<i64>)> = vec![
        ("zeta(2,1)=zeta(3)", vec![z("2,1")?, z("3")?], vec![1, -1]),
        ("2zeta(2,2)+zeta(4)=zeta(2)^2", vec![z("2,2")?, z("4")?, z("2")?.square()], vec![2, 1, -1]),
        ("2zeta(2,2)+4zeta(3,1)=zeta(2)^2", vec![z("2,2")?, z("3,1")?, z("2")?.square()], vec![2, 4, -1]),
    ];
    for (name, vals, expect) in battery {
        let expect: Vec<BigInt> = expect.into_iter().map(BigInt::from).collect();
        let basis = relation_basis(&vals, rel_digits, 100)?;
        let vecs: Vec<Vec<BigInt>> = basis.iter().map(|r| r.coefficients.clone()).collect();
        let shown = vecs
            .iter()
            .map(|c| format!("[{}]", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join(" ");
        let (pass, detail) = match span_coefficients(&vecs, &expect) {
            Some(x) if !vecs.is_empty() => (
                true,
                format!(
                    "relations {shown}; target = {}",
                    x.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
                ),
            ),
            _ => (false, format!("relations {shown}; target not in their span")),
        };
        out.push(check(&format!("relation {name}"), pass, detail));
    }

    let expect = [Rational::new(-1, 12), Rational::new(1, 120), Rational::new(-1, 252)];
    let got: Vec<Rational> = (1..=3).map(zeta_nonpositive).collect::<Result<_>>()?;
    out.push(check(
        "zeta-negative-odd",
        got == expect,
        got.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
    ));
    Ok(out)
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Random (α, β, γ) in the convergence region, as multiples of 1/64.
fn random_selberg_point(rng: &mut ChaCha8Rng) -> (Rational, Rational, Rational) {
    let a = rat(rng.random_range(32..=192), 64);
    let b = rat(rng.random_range(32..=192), 64);
    let g = rat(rng.random_range(-12..=64), 64);
    (a, b, g)
}

fn selberg_oracle(cfg: &VerifyConfig, cache: &ZetaCache) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let prec = bits_for_digits(20);
    for n in [1usize, 2] {
        let mut worst = 0.0f64;
        let mut points = Vec::new();
        for _ in 0..5 {
            let (a, b, g) = random_selberg_point(&mut rng);
            let spec = SelbergSpec::new(OrderedRootedGraph::selberg_symmetric(n, &a, &b, &g), None)?;
            let q = selberg_value(&spec, 0.0, 12)?.to_f64() * if n == 2 { 2.0 } else { 1.0 };
            let cf = selberg_closed_form(
                n,
                &BigFloat::from_rational(&a, prec),
                &BigFloat::from_rational(&b, prec),
                &BigFloat::from_rational(&g, prec),
                20,
            )?;
            worst = worst.max((q - cf.to_f64()).abs());
            points.push(format!("({a},{b},{g})"));
        }
        out.push(check(
            &format!("closed-form n={n}"),
            worst <= 1e-8,
            format!("points {}, max |diff| {} (tol 1.00e-8)", points.join(" "), sci(worst)),
        ));
    }

    let z2 = cache.zeta(&"2".parse()?, 20)?.to_f64();
    let z3 = cache.zeta(&"3".parse()?, 20)?.to_f64();
    let beta = SelbergSpec::new(OrderedRootedGraph::beta(Rational::one(), Rational::one()), None)?;
    let e = normalized_expand(&beta, 3, 12)?;
    let d2 = (e.coefficients[2].to_f64() + z2).abs();
    let d3 = (e.coefficients[3].to_f64() - 2.0 * z3).abs();
    out.push(within("beta-expansion", d2.max(d3), 1e-8));

    let g2 = OrderedRootedGraph::selberg_symmetric(2, &Rational::one(), &Rational::one(), &Rational::one());
    let v = selberg_value(&SelbergSpec::new(g2.clone(), None)?, 0.0, 12)?.to_f64();
    out.push(within("vandermonde-square", (2.0 * v - 1.0 / 6.0).abs(), 1e-10));

    let b = OrderedRootedGraph::beta(Rational::one(), Rational::from(2));
    let eps = 0.1;
    let vb = selberg_value(&SelbergSpec::new(b.clone(), None)?, eps, 12)?;
    let vg = selberg_value(&SelbergSpec::new(g2.clone(), None)?, eps, 12)?;
    let vu = selberg_value(&SelbergSpec::new(b.disjoint_union(&g2), None)?, eps, 12)?;
    let diff = (vu.to_f64() - vb.to_f64() * vg.to_f64()).abs();
    let bound = vu.error_bound.to_f64() + vb.mul(&vg).error_bound.to_f64();
    out.push(check(
        "factorization",
        diff <= bound,
        format!("|diff| {} within combined bound {}", sci(diff), sci(bound)),
    ));
    Ok(out)
}

fn matrix(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tw = |s: &str| s.parse::<TraceWord>();
    let m: Vec<String> = ["2", "4", "6"].iter().map(|s| gue_moment(&tw(s)?).map(|p| p.to_string())).collect::<Result<_>>()?;
    let expect = ["1·N^2", "2·N^3 + 1·N", "5·N^4 + 10·N^2"];
    out.push(check("moments", m == expect, m.join("; ")));

    let g = genus_expansion(&tw("4")?)?;
    out.push(check("genus Tr X^4", g == BTreeMap::from([(0, 2), (1, 1)]), format!("{g:?}")));

    let mut ok = true;
    for mm in 1..=7u32 {
        let count = pairings(&TraceWord::new(vec![1; 2 * mm as usize])?)?.len() as u64;
        let dfact: u64 = (1..=2 * mm - 1).step_by(2).map(u64::from).product();
        ok &= count == dfact;
    }
    out.push(check("wick-count", ok, "(2m-1)!! pairings for m = 1..7"));

    let mut ok = true;
    let mut n = 0;
    for total in 1..=8u32 {
        for parts in crate::words::compositions_of(total as usize) {
            let t = TraceWord::new(parts.parts().to_vec())?;
            n += 1;
            let direct = gue_moment(&t)?;
            ok &= direct == moment_from_connected(&t)?;
            ok &= direct.is_zero() == (total % 2 == 1);
        }
    }
    out.push(check("genus-reconstruction", ok, format!("{n} trace words of degree at most 8")));

    for (s, exact) in [("2", 16.0), ("4", 132.0)] {
        let r = mc_moment(&tw(s)?, 4, 1_000_000, cfg.seed, cfg.jobs)?;
        let z = (r.estimate - exact).abs() / r.stderr;
        out.push(check(
            &format!("monte-carlo Tr X^{s} N=4"),
            z <= 4.0,
            format!("estimate {:.6} stderr {:.6} exact {exact} ({z:.2} sigma)", r.estimate, r.stderr),
        ));
    }

    let chi: Vec<Rational> = (1..=3).map(penner_chi).collect::<Result<_>>()?;
    out.push(check(
        "penner",
        chi == [Rational::new(-1, 12), Rational::new(1, 120), Rational::new(-1, 252)],
        chi.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
    ));
    Ok(out)
}

fn bridge(cfg: &VerifyConfig, cache: &ZetaCache) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let words = admissible_up_to(4)?;
    for w in &words {
        let s = SelbergSpec::new(word_graph(w)?, None)?;
        let v = selberg_value(&s, 0.0, 10)?.to_f64();
        worst = worst.max((v - cache.zeta_word(w, cfg.digits)?.to_f64()).abs());
    }
    out.push(check(
        "word-realization",
        worst <= 1e-8,
        format!("{} words of weight 2..4, max |diff| {} (tol 1.00e-8)", words.len(), sci(worst)),
    ));

    let mut family = vec![("empty".to_string(), OrderedRootedGraph::empty())];
    for a in 1..=2 {
        for b in 1..=2 {
            family.push((format!("beta({a},{b})"), OrderedRootedGraph::beta(Rational::from(a), Rational::from(b))));
        }
    }
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for i in 0..family.len() {
        for j in i..family.len() {
            pairs += 1;
            let r = homomorphism_check(&family[i].1, &family[j].1, None, 3, 12, 1e-6)?;
            for o in &r.orders {
                worst = worst.max(o.difference);
            }
            if !r.pass {
                fails.push(format!("{}x{}", family[i].0, family[j].0));
            }
        }
    }
    out.push(check(
        "multiplicativity",
        fails.is_empty(),
        format!("{pairs} pairs to order 3, max |diff| {} (tol 1.00e-6){}", sci(worst), if fails.is_empty() { String::new() } else { format!(", failing {}", fails.join(" ")) }),
    ));

    let beta = OrderedRootedGraph::beta(Rational::one(), Rational::one());
    let f = selberg_functional(&beta, None, 3, cfg.digits, 50, cache)?;
    let xy: Word = "xy".parse()?;
    let fit2 = f.fits.iter().find(|(m, _)| *m == 2).and_then(|(_, f)| f.clone());
    let ok2 = fit2.as_ref().is_some_and(|ft| ft.combo == LinComb::term(xy.clone(), Rational::from(-1)));
    out.push(check(
        "beta-fit order 2",
        ok2,
        fit2.map(|ft| ft.combo.to_string()).unwrap_or_else(|| "no fit".into()),
    ));
    let z3 = cache.zeta(&"3".parse()?, cfg.digits)?.to_f64();
    let fit3 = f.fits.iter().find(|(m, _)| *m == 3).and_then(|(_, f)| f.clone());
    let v3 = match &fit3 {
        Some(ft) => Some(eval_word_comb(&ft.combo, cfg.digits, cache)?.to_f64()),
        None => None,
    };
    out.push(check(
        "beta-fit order 3",
        v3.is_some_and(|v| (v - 2.0 * z3).abs() < 1e-10 && fit3.as_ref().is_some_and(|f| f.combo.iter().all(|(w, _)| w.weight() == 3))),
        fit3.map(|ft| ft.combo.to_string()).unwrap_or_else(|| "no fit".into()),
    ));

    let union = beta.disjoint_union(&beta);
    let f = selberg_functional(&union, None, 2, cfg.digits, 50, cache)?;
    let fit = f.fits.first().and_then(|(_, f)| f.clone());
    let ok = fit.as_ref().is_some_and(|ft| ft.combo == LinComb::term(xy, Rational::from(-2)));
    out.push(check(
        "union-fit order 2",
        ok,
        fit.map(|ft| ft.combo.to_string()).unwrap_or_else(|| "no fit".into()),
    ));
    Ok(out)
}

/// Run every suite in the fixed order.
pub fn run_all(cfg: &VerifyConfig, cache: &ZetaCache) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, cfg, cache)).collect()
}
