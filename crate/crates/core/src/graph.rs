//! Ordered rooted graphs: the integrand data of Selberg-type integrals.
//!
//! The vertex list is totally ordered. Roots are pinned at 0, 1 or a symbolic
//! parameter x; each free vertex lives in the segment bounded by the nearest
//! root before it and the nearest root after it, and consecutive free vertices
//! of a segment are increasing. A new segment starts at every root, so two
//! chains `0 < u < 1` and `0 < v < 1` can sit side by side in one list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootPos {
    Zero,
    One,
    X,
}

impl RootPos {
    pub fn as_str(self) -> &'static str {
        match self {
            RootPos::Zero => "0",
            RootPos::One => "1",
            RootPos::X => "x",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(RootPos::Zero),
            "1" => Ok(RootPos::One),
            "x" => Ok(RootPos::X),
            other => Err(Error::InvalidGraph(format!("root coordinate must be \"0\", \"1\" or \"x\", got {other:?}"))),
        }
    }

    /// Coordinate, given the numeric value of x.
    pub fn coordinate(self, x: f64) -> f64 {
        match self {
            RootPos::Zero => 0.0,
            RootPos::One => 1.0,
            RootPos::X => x,
        }
    }

    /// Rank used to compare pinned coordinates (0 < x < 1).
    fn rank(self) -> u8 {
        match self {
            RootPos::Zero => 0,
            RootPos::X => 1,
            RootPos::One => 2,
        }
    }
}

/// Exponent a + b·ε.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    pub constant: Rational,
    pub eps: Rational,
}

impl Exponent {
    pub fn new(constant: Rational, eps: Rational) -> Self {
        Exponent { constant, eps }
    }

    pub fn at(&self, eps: f64) -> f64 {
        self.constant.to_f64() + self.eps.to_f64() * eps
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub omega: Option<Exponent>,
    pub seed: bool,
}

impl Edge {
    pub fn key(&self) -> (usize, usize) {
        (self.a.min(self.b), self.a.max(self.b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedRootedGraph {
    pub vertices: Vec<String>,
    pub roots: BTreeMap<usize, RootPos>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Free vertices grouped by segment, with the bounding roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub lower: usize,
    pub upper: usize,
    pub free: Vec<usize>,
}

impl OrderedRootedGraph {
    pub fn is_root(&self, v: usize) -> bool {
        self.roots.contains_key(&v)
    }

    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|v| !self.is_root(*v)).collect()
    }

    pub fn uses_x(&self) -> bool {
        self.roots.values().any(|&r| r == RootPos::X)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut d = Vec::new();
        let n = self.vertices.len();
        let labels: BTreeSet<&String> = self.vertices.iter().collect();
        if labels.len() != n {
            d.push("duplicate vertex labels".to_string());
        }
        for &r in self.roots.keys() {
            if r >= n {
                d.push(format!("root index {r} out of range"));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.a >= n || e.b >= n {
                d.push(format!("edge {}-{} refers to a missing vertex", e.a, e.b));
                continue;
            }
            if e.a == e.b {
                d.push(format!("self-loop at vertex {}", self.vertices[e.a]));
            }
            if !seen.insert(e.key()) {
                d.push(format!("duplicate edge {}-{}", e.a, e.b));
            }
            match &e.omega {
                None => d.push(format!("edge without ω: {}-{}", e.a, e.b)),
                Some(w) => {
                    if e.seed && !(w.constant.is_zero() || w.constant == Rational::from(-1)) {
                        d.push(format!("seed edge {}-{} has constant exponent {} (must be -1 or 0)", e.a, e.b, w.constant));
                    }
                }
            }
        }
        match self.segments() {
            Ok(_) => {}
            Err(Error::InvalidGraph(msg)) => d.push(msg),
            Err(other) => d.push(other.to_string()),
        }
        ValidationReport { valid: d.is_empty(), diagnostics: d }
    }

    /// Segments of free vertices; fails if a free vertex is not enclosed by
    /// roots with strictly increasing pinned coordinates.
    pub fn segments(&self) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        let mut lower: Option<usize> = None;
        let mut pending: Vec<usize> = Vec::new();
        for v in 0..self.vertices.len() {
            match self.roots.get(&v) {
                Some(&pos) => {
                    if !pending.is_empty() {
                        let lo = lower.expect("pending implies lower");
                        let lo_pos = self.roots[&lo];
                        if lo_pos.rank() >= pos.rank() {
                            return Err(Error::InvalidGraph(format!(
                                "free vertices between roots {} ({}) and {} ({}) have an empty domain",
                                self.vertices[lo],
                                lo_pos.as_str(),
                                self.vertices[v],
                                pos.as_str()
                            )));
                        }
                        out.push(Segment { lower: lo, upper: v, free: std::mem::take(&mut pending) });
                    }
                    lower = Some(v);
                }
                None => {
                    if lower.is_none() {
                        return Err(Error::InvalidGraph(format!(
                            "free vertex {} has no root before it in the ordering",
                            self.vertices[v]
                        )));
                    }
                    pending.push(v);
                }
            }
        }
        if let Some(&v) = pending.first() {
            return Err(Error::InvalidGraph(format!(
                "free vertex {} has no root after it in the ordering",
                self.vertices[v]
            )));
        }
        Ok(out)
    }

    /// Disjoint union: vertex lists concatenated, so the two graphs share no
    /// variables and only the meaning of their pinned coordinates.
    pub fn disjoint_union(&self, other: &OrderedRootedGraph) -> OrderedRootedGraph {
        let shift = self.vertices.len();
        let mut vertices: Vec<String> = self.vertices.iter().map(|l| format!("a.{l}")).collect();
        vertices.extend(other.vertices.iter().map(|l| format!("b.{l}")));
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().map(|(&k, &v)| (k + shift, v)));
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge { a: e.a + shift, b: e.b + shift, ..e.clone() }));
        OrderedRootedGraph { vertices, roots, edges }
    }

    /// Two pinned roots 0 and 1 and nothing else; integrates to 1.
    pub fn empty() -> Self {
        OrderedRootedGraph {
            vertices: vec!["r0".into(), "r1".into()],
            roots: BTreeMap::from([(0, RootPos::Zero), (1, RootPos::One)]),
            edges: Vec::new(),
        }
    }

    /// One free vertex t between 0 and 1 with t^{aε}(1−t)^{bε}.
    pub fn beta(a: Rational, b: Rational) -> Self {
        OrderedRootedGraph {
            vertices: vec!["r0".into(), "t".into(), "r1".into()],
            roots: BTreeMap::from([(0, RootPos::Zero), (2, RootPos::One)]),
            edges: vec![
                Edge { a: 0, b: 1, omega: Some(Exponent::new(Rational::zero(), a)), seed: false },
                Edge { a: 1, b: 2, omega: Some(Exponent::new(Rational::zero(), b)), seed: false },
            ],
        }
    }

    /// Symmetric Selberg data on the order simplex 0 < t₁ < … < t_n < 1:
    /// ∏ t^{α−1}(1−t)^{β−1} ∏ |tᵢ−tⱼ|^{2γ}.
    pub fn selberg_symmetric(n: usize, alpha: &Rational, beta: &Rational, gamma: &Rational) -> Self {
        let mut vertices = vec!["r0".to_string()];
        vertices.extend((1..=n).map(|i| format!("t{i}")));
        vertices.push("r1".into());
        let top = n + 1;
        let mut edges = Vec::new();
        let one = Rational::one();
        for i in 1..=n {
            edges.push(Edge { a: 0, b: i, omega: Some(Exponent::new(alpha - &one, Rational::zero())), seed: false });
            edges.push(Edge { a: i, b: top, omega: Some(Exponent::new(beta - &one, Rational::zero())), seed: false });
        }
        let two_gamma = gamma * &Rational::from(2);
        for i in 1..=n {
            for j in i + 1..=n {
                edges.push(Edge { a: i, b: j, omega: Some(Exponent::new(two_gamma.clone(), Rational::zero())), seed: false });
            }
        }
        OrderedRootedGraph { vertices, roots: BTreeMap::from([(0, RootPos::Zero), (top, RootPos::One)]), edges }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidGraph(format!("bad graph JSON: {e}")))?;
        raw.into_graph()
    }

    pub fn to_json_value(&self) -> Value {
        let roots: serde_json::Map<String, Value> =
            self.roots.iter().map(|(&i, p)| (self.vertices[i].clone(), Value::String(p.as_str().into()))).collect();
        let edges: Vec<Value> = self.edges.iter().map(|e| serde_json::json!([e.a, e.b])).collect();
        let mut omega = serde_json::Map::new();
        let mut phi = Vec::new();
        for e in &self.edges {
            let (i, j) = e.key();
            let key = format!("{i}-{j}");
            if let Some(w) = &e.omega {
                omega.insert(key.clone(), Value::Array(vec![rational_json(&w.constant), rational_json(&w.eps)]));
            }
            if e.seed {
                phi.push(Value::String(key));
            }
        }
        serde_json::json!({
            "vertices": self.vertices,
            "roots": roots,
            "edges": edges,
            "omega": omega,
            "phi": phi,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("graph serializes")
    }
}

impl fmt::Display for OrderedRootedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

fn rational_json(r: &Rational) -> Value {
    if r.is_integer() {
        Value::Number(serde_json::Number::from(r.numer().to_string().parse::<i64>().unwrap_or(0)))
    } else {
        Value::String(r.to_string())
    }
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n.to_string().parse(),
        Value::String(s) => s.parse(),
        other => Err(Error::InvalidGraph(format!("exponent entry must be a number or string, got {other}"))),
    }
}

#[derive(Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    #[serde(default)]
    roots: BTreeMap<String, String>,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    omega: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    phi: Vec<String>,
}

fn parse_edge_key(key: &str) -> Result<(usize, usize)> {
    let (i, j) = key
        .split_once('-')
        .ok_or_else(|| Error::InvalidGraph(format!("edge key {key:?} must look like \"i-j\"")))?;
    let i: usize = i.trim().parse().map_err(|_| Error::InvalidGraph(format!("bad edge key {key:?}")))?;
    let j: usize = j.trim().parse().map_err(|_| Error::InvalidGraph(format!("bad edge key {key:?}")))?;
    Ok((i.min(j), i.max(j)))
}

impl GraphJson {
    fn into_graph(self) -> Result<OrderedRootedGraph> {
        let index: BTreeMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut roots = BTreeMap::new();
        for (label, pos) in &self.roots {
            let i = *index
                .get(label.as_str())
                .ok_or_else(|| Error::InvalidGraph(format!("root {label:?} is not a vertex")))?;
            roots.insert(i, RootPos::parse(pos)?);
        }
        let mut omega = BTreeMap::new();
        for (k, v) in &self.omega {
            if v.len() != 2 {
                return Err(Error::InvalidGraph(format!("omega[{k:?}] must be [a, b]")));
            }
            omega.insert(parse_edge_key(k)?, Exponent::new(rational_from_json(&v[0])?, rational_from_json(&v[1])?));
        }
        let seeds: BTreeSet<(usize, usize)> = self.phi.iter().map(|k| parse_edge_key(k)).collect::<Result<_>>()?;
        let edge_keys: BTreeSet<(usize, usize)> = self.edges.iter().map(|[a, b]| ((*a).min(*b), (*a).max(*b))).collect();
        if let Some(k) = omega.keys().find(|k| !edge_keys.contains(k)) {
            return Err(Error::InvalidGraph(format!("omega given for {}-{} which is not an edge", k.0, k.1)));
        }
        if let Some(k) = seeds.iter().find(|k| !edge_keys.contains(k)) {
            return Err(Error::InvalidGraph(format!("phi names {}-{} which is not an edge", k.0, k.1)));
        }
        let edges = self
            .edges
            .iter()
            .map(|&[a, b]| {
                let key = (a.min(b), a.max(b));
                Edge { a, b, omega: omega.get(&key).cloned(), seed: seeds.contains(&key) }
            })
            .collect();
        Ok(OrderedRootedGraph { vertices: self.vertices, roots, edges })
    }
}
