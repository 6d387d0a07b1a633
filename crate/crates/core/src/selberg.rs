//! Selberg-type integrals of ordered rooted graphs.
//!
//! The integrand is ∏_e α_e^{a_e + b_e ε} with α_e the distance between the
//! endpoints of e, integrated over the order simplex of the free vertices.
//! Each segment between two roots is parametrized by gap fractions, so that
//! every distance inside a segment is a sum of positive gaps and endpoint
//! singularities land on the boundary of a unit cube, where nested tanh-sinh
//! handles them.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::graph::{OrderedRootedGraph, RootPos};
use crate::numerics::{NumericResult, Rigor};
use crate::quadrature::tanh_sinh_nodes;
use crate::special::ln_gamma;

pub const MAX_VALUE_DIM: usize = 4;
pub const MAX_EXPANSION_DIM: usize = 3;
pub const MAX_ORDER: usize = 5;

/// A validated graph together with the numeric value of the symbolic root x.
#[derive(Clone, Debug)]
pub struct SelbergSpec {
    pub graph: OrderedRootedGraph,
    pub x_param: Option<f64>,
}

impl SelbergSpec {
    pub fn new(graph: OrderedRootedGraph, x_param: Option<f64>) -> Result<Self> {
        let report = graph.validate();
        if !report.valid {
            return Err(Error::InvalidGraph(report.diagnostics.join("; ")));
        }
        if graph.uses_x() {
            match x_param {
                Some(x) if x > 0.0 && x < 1.0 => {}
                Some(x) => return Err(Error::DomainError(format!("x = {x} must lie in (0,1)"))),
                None => return Err(Error::InvalidArgument("graph pins a root at x but no value of x was given".into())),
            }
        }
        Ok(SelbergSpec { graph, x_param })
    }

    /// Free vertices in the graph's order.
    pub fn free_vars(&self) -> Vec<usize> {
        self.graph.free_vertices()
    }

    fn coordinate(&self, pos: RootPos) -> f64 {
        pos.coordinate(self.x_param.unwrap_or(0.5))
    }
}

/// Coefficients of ε^0 … ε^order, each with its own error bound.
#[derive(Clone, Debug)]
pub struct EpsilonExpansion {
    pub coefficients: Vec<NumericResult>,
}

impl EpsilonExpansion {
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "coefficients": self.coefficients.iter().map(NumericResult::to_json).collect::<Vec<_>>(),
        })
    }

    /// Σ c_m ε^m with the coefficient errors weighted by |ε|^m.
    pub fn evaluate(&self, eps: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut e = 0.0;
        for (m, c) in self.coefficients.iter().enumerate() {
            let p = eps.powi(m as i32);
            v += c.to_f64() * p;
            e += c.error_bound.to_f64() * p.abs();
        }
        (v, e)
    }

    /// Cauchy product of two expansions, truncated at the shorter order.
    pub fn product(&self, other: &EpsilonExpansion) -> EpsilonExpansion {
        let order = self.order().min(other.order());
        let coefficients = (0..=order)
            .map(|m| {
                let mut acc = self.coefficients[0].mul(&other.coefficients[m]);
                for j in 1..=m {
                    acc = acc.add(&self.coefficients[j].mul(&other.coefficients[m - j]));
                }
                acc
            })
            .collect();
        EpsilonExpansion { coefficients }
    }
}

#[derive(Clone, Copy, Debug)]
enum Distance {
    /// Between walk positions i < j of one segment (0 = the starting root).
    Gaps { seg: usize, i: usize, j: usize },
    /// Between two points in different segments, by absolute coordinates.
    Coords { a: usize, b: usize },
    Constant(f64),
}

#[derive(Clone, Debug)]
struct Factor {
    dist: Distance,
    a: f64,
    b: f64,
}

/// A segment is walked from one root to the other; vertices are placed in
/// walk order, so distances to the far root are products of complements.
#[derive(Clone, Debug)]
struct SegmentPlan {
    start: f64,
    dir: f64,
    length: f64,
    len: usize,
}

/// Integration plan: variables in order, each one a position in a segment.
#[derive(Clone, Debug)]
struct Plan {
    segments: Vec<SegmentPlan>,
    /// (segment, 1-based position) of each free variable, in integration order
    vars: Vec<(usize, usize)>,
    /// graph vertex of each variable
    vertex_of_var: Vec<usize>,
    factors: Vec<Factor>,
    /// factors grouped by the last variable they depend on
    by_level: Vec<Vec<Factor>>,
    /// Σ a log α and Σ b log α over factors without variables
    base: (f64, f64),
    n_vertices: usize,
    root_coord: Vec<Option<f64>>,
}

fn exponent_parts(e: &crate::graph::Edge) -> (Rational, Rational) {
    let w = e.omega.as_ref().expect("validated graphs carry ω on every edge");
    (w.constant.clone(), w.eps.clone())
}

fn build_plan(spec: &SelbergSpec) -> Result<Plan> {
    let g = &spec.graph;
    let segs = g.segments()?;
    let n = g.vertices.len();
    let mut place: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut segments = Vec::new();
    let mut vars = Vec::new();
    let mut vertex_of_var = Vec::new();
    let mut downward = Vec::new();
    for (si, s) in segs.iter().enumerate() {
        let lower = spec.coordinate(g.roots[&s.lower]);
        let upper = spec.coordinate(g.roots[&s.upper]);
        // walk away from the root carrying the stronger singularity
        let pull = |root: usize| -> f64 {
            g.edges
                .iter()
                .filter(|e| (e.a == root && s.free.contains(&e.b)) || (e.b == root && s.free.contains(&e.a)))
                .map(|e| exponent_parts(e).0.to_f64().min(0.0))
                .sum()
        };
        let down = pull(s.lower) < pull(s.upper);
        let k = s.free.len();
        let walk: Vec<usize> = if down { s.free.iter().rev().copied().collect() } else { s.free.clone() };
        for (p, &v) in walk.iter().enumerate() {
            place[v] = Some((si, p + 1));
            vertex_of_var.push(v);
            vars.push((si, p + 1));
        }
        let (start, dir) = if down { (upper, -1.0) } else { (lower, 1.0) };
        segments.push(SegmentPlan { start, dir, length: upper - lower, len: k });
        downward.push(down);
    }
    let root_coord: Vec<Option<f64>> = (0..n).map(|v| g.roots.get(&v).map(|&p| spec.coordinate(p))).collect();
    let mut factors = Vec::new();
    let mut constant_log = 0.0;
    for e in &g.edges {
        let (a, b) = exponent_parts(e);
        let (a, b) = (a.to_f64(), b.to_f64());
        if a == 0.0 && b == 0.0 {
            continue;
        }
        // a root touching a segment as its lower or upper bound gets that segment's position
        let pos_in = |v: usize, seg: usize| -> Option<usize> {
            if let Some(p) = place[v] {
                return (p.0 == seg).then_some(p.1);
            }
            let s = &segs[seg];
            let (first, last) = if downward[seg] { (s.upper, s.lower) } else { (s.lower, s.upper) };
            if v == first {
                Some(0)
            } else if v == last {
                Some(s.free.len() + 1)
            } else {
                None
            }
        };
        let seg_a = place[e.a].map(|p| p.0);
        let seg_b = place[e.b].map(|p| p.0);
        let dist = match (seg_a, seg_b) {
            (None, None) => {
                let d = (root_coord[e.a].unwrap() - root_coord[e.b].unwrap()).abs();
                if d == 0.0 {
                    if a + b.abs() != 0.0 {
                        return Err(Error::DivergentIntegrand(format!(
                            "edge {}-{} joins two roots at the same coordinate",
                            g.vertices[e.a], g.vertices[e.b]
                        )));
                    }
                    continue;
                }
                Distance::Constant(d)
            }
            _ => {
                let seg = seg_a.or(seg_b).unwrap();
                match (pos_in(e.a, seg), pos_in(e.b, seg)) {
                    (Some(i), Some(j)) => Distance::Gaps { seg, i: i.min(j), j: i.max(j) },
                    _ => Distance::Coords { a: e.a, b: e.b },
                }
            }
        };
        if let Distance::Constant(d) = dist {
            constant_log += a * d.ln();
            if b != 0.0 {
                factors.push(Factor { dist, a: 0.0, b });
            }
            continue;
        }
        factors.push(Factor { dist, a, b });
    }
    let level_of_pos = |seg: usize, pos: usize| vars.iter().position(|&v| v == (seg, pos));
    let mut by_level = vec![Vec::new(); vars.len()];
    let mut base = (constant_log, 0.0);
    for f in &factors {
        let level = match f.dist {
            Distance::Gaps { seg, j, .. } => level_of_pos(seg, j.min(segments[seg].len)),
            Distance::Coords { a, b } => {
                let la = place[a].and_then(|(s, p)| level_of_pos(s, p));
                let lb = place[b].and_then(|(s, p)| level_of_pos(s, p));
                la.max(lb)
            }
            Distance::Constant(_) => None,
        };
        match level {
            Some(l) => by_level[l].push(f.clone()),
            None => {
                if let Distance::Constant(d) = f.dist {
                    base.0 += f.a * d.ln();
                    base.1 += f.b * d.ln();
                }
            }
        }
    }
    Ok(Plan { segments, vars, vertex_of_var, factors, by_level, base, n_vertices: n, root_coord })
}

/// Power counting at a given ε: every collapsing run of consecutive points in
/// a segment, and every cross-segment coincidence, must be integrable.
/// Returns the smallest margin (exponent sum plus shrinking dimensions).
fn check_integrable(spec: &SelbergSpec, plan: &Plan, eps: f64) -> Result<f64> {
    let mut margin = f64::INFINITY;
    let g = &spec.graph;
    let segs = g.segments()?;
    let exps: Vec<(usize, usize, f64)> = g
        .edges
        .iter()
        .map(|e| {
            let (a, b) = exponent_parts(e);
            (e.a, e.b, a.to_f64() + b.to_f64() * eps)
        })
        .collect();
    for s in &segs {
        let mut pts = vec![s.lower];
        pts.extend(&s.free);
        pts.push(s.upper);
        let k = pts.len();
        for i in 0..k {
            for j in i + 1..k {
                if i == 0 && j == k - 1 {
                    continue;
                }
                let run = &pts[i..=j];
                let has_root = i == 0 || j == k - 1;
                let free = run.len() - usize::from(i == 0) - usize::from(j == k - 1);
                let dims = if has_root { free } else { free - 1 };
                let inside: f64 =
                    exps.iter().filter(|(a, b, _)| run.contains(a) && run.contains(b)).map(|(_, _, x)| x).sum();
                margin = margin.min(inside + dims as f64);
                if inside + dims as f64 <= 1e-12 {
                    let labels: Vec<&str> = run.iter().map(|&v| g.vertices[v].as_str()).collect();
                    return Err(Error::DivergentIntegrand(format!(
                        "the integrand is not integrable where {} collide (total exponent {inside} with {dims} shrinking dimensions)",
                        labels.join(", ")
                    )));
                }
            }
        }
    }
    for f in &plan.factors {
        if let Distance::Coords { a, b } = f.dist {
            let x = f.a + f.b * eps;
            margin = margin.min(1.0 + x);
            if x <= -1.0 + 1e-12 {
                return Err(Error::DivergentIntegrand(format!(
                    "exponent {x} on the edge {}-{} is not integrable",
                    g.vertices[a], g.vertices[b]
                )));
            }
        }
    }
    Ok(margin)
}

#[derive(Clone, Copy)]
enum Mode {
    Value(f64),
    Expansion(usize),
}

impl Mode {
    fn width(self) -> usize {
        match self {
            Mode::Value(_) => 1,
            Mode::Expansion(order) => order + 1,
        }
    }
}

struct Walker<'a> {
    plan: &'a Plan,
    nodes: &'a [(f64, f64, f64)],
    mode: Mode,
    inv_fact: Vec<f64>,
}

/// Mutable coordinates during the nested sweep.
#[derive(Clone)]
struct State {
    /// gaps[seg][m] = distance between positions m and m+1
    gaps: Vec<Vec<f64>>,
    /// remaining length above the last placed vertex of each segment
    remaining: Vec<f64>,
    coords: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn distance(&self, st: &State, d: Distance) -> f64 {
        match d {
            Distance::Gaps { seg, i, j } => st.gaps[seg][i..j].iter().sum(),
            Distance::Coords { a, b } => (st.coords[a] - st.coords[b]).abs(),
            Distance::Constant(c) => c,
        }
    }

    fn leaf(&self, la: f64, lb: f64, weight: f64, acc: &mut [f64]) {
        match self.mode {
            Mode::Value(eps) => {
                let v = weight * (la + eps * lb).exp();
                if v.is_finite() {
                    acc[0] += v;
                }
            }
            Mode::Expansion(order) => {
                let base = weight * la.exp();
                if !base.is_finite() || !lb.is_finite() {
                    return;
                }
                let mut p = 1.0;
                for m in 0..=order {
                    acc[m] += base * p * self.inv_fact[m];
                    p *= lb;
                }
            }
        }
    }

    fn logs_at(&self, st: &State, level: usize, la: f64, lb: f64) -> (f64, f64) {
        let (mut la, mut lb) = (la, lb);
        for f in &self.plan.by_level[level] {
            let l = self.distance(st, f.dist).ln();
            la += f.a * l;
            lb += f.b * l;
        }
        (la, lb)
    }

    fn place(&self, st: &mut State, level: usize, x: f64, xc: f64) -> f64 {
        let (seg, pos) = self.plan.vars[level];
        let r = st.remaining[seg];
        st.gaps[seg][pos - 1] = x * r;
        st.remaining[seg] = xc * r;
        let sp = &self.plan.segments[seg];
        if pos == sp.len {
            st.gaps[seg][pos] = xc * r;
        }
        let v = self.plan.vertex_of_var[level];
        st.coords[v] = sp.start + sp.dir * st.gaps[seg][..pos].iter().sum::<f64>();
        r
    }

    fn sweep(&self, st: &mut State, level: usize, weight: f64, logs: (f64, f64), acc: &mut [f64]) {
        let (seg, _) = self.plan.vars[level];
        let saved = st.remaining[seg];
        let last = level + 1 == self.plan.vars.len();
        for &(x, xc, w) in self.nodes {
            let r = self.place(st, level, x, xc);
            let wt = weight * w * r;
            if wt > 0.0 {
                let (la, lb) = self.logs_at(st, level, logs.0, logs.1);
                if last {
                    self.leaf(la, lb, wt, acc);
                } else {
                    self.sweep(st, level + 1, wt, (la, lb), acc);
                }
            }
            st.remaining[seg] = saved;
        }
    }

    fn run(&self) -> Vec<f64> {
        let width = self.mode.width();
        let st = State {
            gaps: self.plan.segments.iter().map(|s| vec![0.0; s.len + 1]).collect(),
            remaining: self.plan.segments.iter().map(|s| s.length).collect(),
            coords: (0..self.plan.n_vertices).map(|v| self.plan.root_coord[v].unwrap_or(0.0)).collect(),
        };
        let mut total = vec![0.0; width];
        if self.plan.vars.is_empty() {
            self.leaf(self.plan.base.0, self.plan.base.1, 1.0, &mut total);
            return total;
        }
        let (seg, _) = self.plan.vars[0];
        let last = self.plan.vars.len() == 1;
        let parts: Vec<Vec<f64>> = self
            .nodes
            .par_iter()
            .map(|&(x, xc, w)| {
                let mut local = st.clone();
                let mut acc = vec![0.0; width];
                let r = self.place(&mut local, 0, x, xc);
                let wt = w * r;
                if wt > 0.0 {
                    let (la, lb) = self.logs_at(&local, 0, self.plan.base.0, self.plan.base.1);
                    if last {
                        self.leaf(la, lb, wt, &mut acc);
                    } else {
                        self.sweep(&mut local, 1, wt, (la, lb), &mut acc);
                    }
                }
                local.remaining[seg] = st.remaining[seg];
                acc
            })
            .collect();
        for p in parts {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total
    }
}

fn max_level(dims: usize) -> i32 {
    match dims {
        0 | 1 => 7,
        2 => 6,
        3 => 5,
        _ => 4,
    }
}

/// Smallest endpoint distance kept by the tanh-sinh rule. Near a collision
/// the integrand behaves like r^{margin−1} times logarithms, so the dropped
/// mass is about cutoff^{margin}.
fn node_cutoff(margin: f64, mode: Mode) -> f64 {
    let logs = match mode {
        Mode::Value(_) => 0.0,
        Mode::Expansion(order) => 2.0 * order as f64,
    };
    let decades = ((24.0 + logs) / margin.max(1e-3)).clamp(24.0, 290.0);
    10f64.powf(-decades)
}

/// Step-doubling driver: returns values at the finest level reached and
/// the componentwise difference to the previous level.
fn integrate(plan: &Plan, mode: Mode, margin: f64, digits: u32) -> (Vec<f64>, Vec<f64>) {
    let cutoff = node_cutoff(margin, mode);
    let dims = plan.vars.len();
    let inv_fact: Vec<f64> = (0..=MAX_ORDER).scan(1.0, |f, m| {
        if m > 0 {
            *f *= m as f64;
        }
        Some(1.0 / *f)
    }).collect();
    let eval = |level: i32| {
        let nodes = tanh_sinh_nodes(2f64.powi(-level), cutoff);
        Walker { plan, nodes: &nodes, mode, inv_fact: inv_fact.clone() }.run()
    };
    if dims == 0 {
        let v = eval(0);
        let e = v.iter().map(|x| 1e-16 * x.abs()).collect();
        return (v, e);
    }
    let target = 10f64.powi(-(digits.min(300) as i32));
    let mut prev = eval(2);
    let mut err = vec![f64::INFINITY; prev.len()];
    for level in 3..=max_level(dims) {
        let cur = eval(level);
        err = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).collect();
        prev = cur;
        let done = err.iter().zip(&prev).all(|(e, v)| *e <= target.max(1e-14 * v.abs().max(1.0)));
        if done {
            break;
        }
    }
    let err = err.iter().zip(&prev).map(|(e, v)| e.max(1e-14 * v.abs().max(1.0))).collect();
    (prev, err)
}

/// ∫ ∏_e α_e^{a_e + b_e ε} over the order simplex of the free vertices.
pub fn selberg_value(spec: &SelbergSpec, eps: f64, digits: u32) -> Result<NumericResult> {
    let dims = spec.free_vars().len();
    if dims > MAX_VALUE_DIM {
        return Err(Error::DimensionTooLarge(dims));
    }
    let plan = build_plan(spec)?;
    let margin = check_integrable(spec, &plan, eps)?;
    let (v, e) = integrate(&plan, Mode::Value(eps), margin, digits);
    Ok(NumericResult::from_f64(v[0], e[0], Rigor::HeuristicQuadrature, digits))
}

/// Taylor coefficients in ε, coefficient m being (1/m!) ∫ Φ (Σ_e b_e log α_e)^m
/// with Φ the integrand at ε = 0.
pub fn epsilon_expand(spec: &SelbergSpec, order: usize, digits: u32) -> Result<EpsilonExpansion> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    let dims = spec.free_vars().len();
    if dims > MAX_EXPANSION_DIM {
        return Err(Error::DimensionTooLarge(dims));
    }
    let plan = build_plan(spec)?;
    let margin = check_integrable(spec, &plan, 0.0)?;
    let (v, e) = integrate(&plan, Mode::Expansion(order), margin, digits);
    let coefficients = v
        .into_iter()
        .zip(e)
        .map(|(v, e)| NumericResult::from_f64(v, e, Rigor::HeuristicQuadrature, digits))
        .collect();
    Ok(EpsilonExpansion { coefficients })
}

/// The polynomial ∏_{free v} (1 + ε Σ_{e ∋ v} b_e), exact.
pub fn normalizer(graph: &OrderedRootedGraph) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for v in graph.free_vertices() {
        let mut s = Rational::zero();
        for e in &graph.edges {
            if e.a == v || e.b == v {
                if let Some(w) = &e.omega {
                    s = s + w.eps.clone();
                }
            }
        }
        if s.is_zero() {
            continue;
        }
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] = &next[i] + c;
            next[i + 1] = &next[i + 1] + &(c * &s);
        }
        poly = next;
    }
    poly
}

/// The ε-expansion multiplied by the normalizer; for the Beta graph this is
/// the expansion of Γ(1+aε)Γ(1+bε)/Γ(1+(a+b)ε).
pub fn normalized_expand(spec: &SelbergSpec, order: usize, digits: u32) -> Result<EpsilonExpansion> {
    let raw = epsilon_expand(spec, order, digits)?;
    let poly = normalizer(&spec.graph);
    let coefficients = (0..=order)
        .map(|m| {
            let mut acc = NumericResult::from_f64(0.0, 0.0, Rigor::HeuristicQuadrature, digits);
            for (j, p) in poly.iter().enumerate().take(m + 1) {
                acc = acc.add(&raw.coefficients[m - j].scale(p));
            }
            acc
        })
        .collect();
    Ok(EpsilonExpansion { coefficients })
}

/// The classical Selberg integral over [0,1]^n (all orderings):
/// ∏_{j<n} Γ(α+jγ) Γ(β+jγ) Γ(1+(j+1)γ) / (Γ(α+β+(n+j−1)γ) Γ(1+γ)).
pub fn selberg_closed_form(
    n: usize,
    alpha: &BigFloat,
    beta: &BigFloat,
    gamma: &BigFloat,
    digits: u32,
) -> Result<NumericResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let prec = bits_for_digits(digits) + 16;
    let (a, b, g) = (alpha.with_prec(prec), beta.with_prec(prec), gamma.with_prec(prec));
    let mut bound = BigFloat::one(prec).div_i64(n as i64);
    if n > 1 {
        bound = BigFloat::max(&bound, &BigFloat::zero(prec));
        let ra = a.div_i64(n as i64 - 1);
        let rb = b.div_i64(n as i64 - 1);
        for r in [ra, rb] {
            if r < bound {
                bound = r;
            }
        }
    }
    if a.signum() <= 0 || b.signum() <= 0 || g <= -&bound {
        return Err(Error::OutsideConvergenceRegion(format!(
            "need α, β > 0 and γ > −min(1/n, α/(n−1), β/(n−1)); got α = {}, β = {}, γ = {}",
            alpha.to_decimal(8),
            beta.to_decimal(8),
            gamma.to_decimal(8)
        )));
    }
    let one = BigFloat::one(prec);
    let mut log = BigFloat::zero(prec);
    for j in 0..n as i64 {
        let jg = g.mul_i64(j);
        log = &log + &ln_gamma(&(&a + &jg))?;
        log = &log + &ln_gamma(&(&b + &jg))?;
        log = &log + &ln_gamma(&(&one + &g.mul_i64(j + 1)))?;
        log = &log - &ln_gamma(&(&(&a + &b) + &g.mul_i64(n as i64 + j - 1)))?;
        log = &log - &ln_gamma(&(&one + &g))?;
    }
    let value = log.exp().with_prec(bits_for_digits(digits));
    let err = BigFloat::from_f64(value.to_f64().abs() * 2f64.powi(-(bits_for_digits(digits) as i32) + 8), 64);
    Ok(NumericResult::new(value, err, Rigor::RigorousTail, digits))
}
