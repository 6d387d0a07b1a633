//! Gaussian Hermitian matrix model: exact moments by Wick pairings, genus
//! expansion of ribbon graphs, Monte Carlo estimates, and the Penner values.
//!
//! Convention: density ∝ exp(−Tr X²/2), so E[X_ij X_kl] = δ_il δ_jk.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::numerics::zeta_nonpositive;

pub const MAX_DEGREE: u32 = 14;
pub const MAX_MC_N: usize = 16;
pub const MAX_MC_SAMPLES: u64 = 10_000_000;
const MC_CHUNK: u64 = 4096;

/// The observable ∏ Tr X^{kᵢ}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceWord {
    powers: Vec<u32>,
}

impl TraceWord {
    pub fn new(powers: Vec<u32>) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::InvalidArgument("a trace word needs at least one trace".into()));
        }
        if powers.contains(&0) {
            return Err(Error::InvalidArgument("trace powers must be at least 1".into()));
        }
        Ok(TraceWord { powers })
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    fn check_degree(&self) -> Result<()> {
        if self.degree() > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(self.degree() as usize));
        }
        Ok(())
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.powers.iter().map(|k| format!("Tr X^{k}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for TraceWord {
    type Err = Error;

    /// "4", "2,2" or "(4,2)".
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (inner, offset) = match t.strip_prefix('(') {
            Some(rest) => match rest.strip_suffix(')') {
                Some(r) => (r, 1),
                None => return Err(Error::parse(t.len(), "missing closing parenthesis")),
            },
            None => (t, 0),
        };
        let mut powers = Vec::new();
        let mut pos = offset;
        for piece in inner.split(',') {
            let k: u32 = piece
                .trim()
                .parse()
                .map_err(|_| Error::parse(pos, format!("expected a positive integer, found {:?}", piece.trim())))?;
            if k == 0 {
                return Err(Error::parse(pos, "trace powers must be at least 1"));
            }
            powers.push(k);
            pos += piece.len() + 1;
        }
        TraceWord::new(powers)
    }
}

/// Integer polynomial in N, keyed by the power of N.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NPoly {
    pub coeffs: BTreeMap<u32, BigInt>,
}

impl NPoly {
    fn add_term(&mut self, power: u32, c: BigInt) {
        let e = self.coeffs.entry(power).or_default();
        *e += c;
        if *e == BigInt::from(0) {
            self.coeffs.remove(&power);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, n: u64) -> BigInt {
        self.coeffs.iter().map(|(p, c)| c * BigInt::from(n).pow(*p)).sum()
    }

    pub fn mul(&self, other: &NPoly) -> NPoly {
        let mut out = NPoly::default();
        for (p, a) in &self.coeffs {
            for (q, b) in &other.coeffs {
                out.add_term(p + q, a * b);
            }
        }
        out
    }

    pub fn add(&self, other: &NPoly) -> NPoly {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_term(*p, c.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let m: Map<String, Value> = self.coeffs.iter().map(|(p, c)| (format!("N^{p}"), Value::String(c.to_string()))).collect();
        Value::Object(m)
    }
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(p, c)| match p {
                0 => c.to_string(),
                1 => format!("{c}·N"),
                _ => format!("{c}·N^{p}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Topological data of one Wick pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RibbonData {
    pub vertices: u32,
    pub edges: u32,
    pub faces: u32,
    pub genus: Option<u32>,
    pub connected: bool,
}

struct HalfEdges {
    rotation: Vec<usize>,
    vertex: Vec<usize>,
    n_vertices: usize,
}

fn half_edges(tw: &TraceWord) -> HalfEdges {
    let mut rotation = Vec::new();
    let mut vertex = Vec::new();
    let mut start = 0;
    for (v, &k) in tw.powers.iter().enumerate() {
        let k = k as usize;
        for i in 0..k {
            rotation.push(start + (i + 1) % k);
            vertex.push(v);
        }
        start += k;
    }
    HalfEdges { rotation, vertex, n_vertices: tw.powers.len() }
}

/// Calls `f` on every perfect matching of 0..n (n even) as an involution.
fn for_each_pairing(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(pair: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        let Some(i) = pair.iter().position(|&p| p == usize::MAX) else {
            f(pair);
            return;
        };
        for j in i + 1..pair.len() {
            if pair[j] == usize::MAX {
                pair[i] = j;
                pair[j] = i;
                rec(pair, f);
                pair[i] = usize::MAX;
                pair[j] = usize::MAX;
            }
        }
    }
    if n % 2 == 1 {
        return;
    }
    let mut pair = vec![usize::MAX; n];
    rec(&mut pair, f);
}

fn ribbon(h: &HalfEdges, pairing: &[usize]) -> RibbonData {
    let n = pairing.len();
    let mut seen = vec![false; n];
    let mut faces = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        faces += 1;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            c = h.rotation[pairing[c]];
        }
    }
    let mut parent: Vec<usize> = (0..h.n_vertices).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, &b) in pairing.iter().enumerate() {
        let (ra, rb) = (find(&mut parent, h.vertex[a]), find(&mut parent, h.vertex[b]));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    let connected = (0..h.n_vertices).all(|v| find(&mut parent, v) == root);
    let v = h.n_vertices as i64;
    let e = (n / 2) as i64;
    let f = faces as i64;
    let genus = connected.then(|| ((2 - v + e - f) / 2) as u32);
    RibbonData { vertices: v as u32, edges: e as u32, faces, genus, connected }
}

/// Ribbon data of every pairing, in enumeration order.
pub fn pairings(tw: &TraceWord) -> Result<Vec<RibbonData>> {
    tw.check_degree()?;
    let h = half_edges(tw);
    let mut out = Vec::new();
    for_each_pairing(tw.degree() as usize, &mut |p| out.push(ribbon(&h, p)));
    Ok(out)
}

/// E[∏ Tr X^{kᵢ}] as a polynomial in N.
pub fn gue_moment(tw: &TraceWord) -> Result<NPoly> {
    let mut poly = NPoly::default();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for r in pairings(tw)? {
        *counts.entry(r.faces).or_default() += 1;
    }
    for (f, c) in counts {
        poly.add_term(f, BigInt::from(c));
    }
    Ok(poly)
}

/// Connected part of the moment as a polynomial in N.
pub fn connected_moment(tw: &TraceWord) -> Result<NPoly> {
    let mut poly = NPoly::default();
    for r in pairings(tw)?.into_iter().filter(|r| r.connected) {
        poly.add_term(r.faces, BigInt::from(1));
    }
    Ok(poly)
}

/// The moment rebuilt from connected parts: Σ over set partitions of the
/// traces of the product of the blocks' connected moments.
pub fn moment_from_connected(tw: &TraceWord) -> Result<NPoly> {
    tw.check_degree()?;
    fn rec(rest: &[u32], out: &mut NPoly, acc: &NPoly) -> Result<()> {
        let Some((&first, others)) = rest.split_first() else {
            *out = out.add(acc);
            return Ok(());
        };
        let m = others.len();
        for mask in 0u32..(1 << m) {
            let mut block = vec![first];
            let mut remaining = Vec::new();
            for (i, &k) in others.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    block.push(k);
                } else {
                    remaining.push(k);
                }
            }
            let c = connected_moment(&TraceWord::new(block)?)?;
            if c.is_zero() {
                continue;
            }
            rec(&remaining, out, &acc.mul(&c))?;
        }
        Ok(())
    }
    let mut out = NPoly::default();
    let mut one = NPoly::default();
    one.add_term(0, BigInt::from(1));
    rec(&tw.powers, &mut out, &one)?;
    Ok(out)
}

/// Number of connected pairings by genus.
pub fn genus_expansion(tw: &TraceWord) -> Result<BTreeMap<u32, u64>> {
    let mut out = BTreeMap::new();
    for r in pairings(tw)? {
        if let Some(g) = r.genus {
            *out.entry(g).or_default() += 1;
        }
    }
    Ok(out)
}

/// One genus contribution c·N^power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusTerm {
    pub coefficient: Rational,
    pub n_power: u32,
}

/// Coefficient of t_j^k in log Z, (1/k!) E_connected[(Tr X^j)^k], by genus.
pub fn log_partition_coefficient(j: u32, k: u32) -> Result<BTreeMap<u32, GenusTerm>> {
    if j == 0 || k == 0 {
        return Err(Error::InvalidArgument("j and k must be at least 1".into()));
    }
    if j * k > 12 {
        return Err(Error::DegreeTooLarge((j * k) as usize));
    }
    let tw = TraceWord::new(vec![j; k as usize])?;
    let fact: u64 = (1..=k as u64).product();
    let mut by_genus: BTreeMap<u32, (u64, u32)> = BTreeMap::new();
    for r in pairings(&tw)? {
        if let Some(g) = r.genus {
            let e = by_genus.entry(g).or_insert((0, r.faces));
            e.0 += 1;
        }
    }
    Ok(by_genus
        .into_iter()
        .map(|(g, (c, f))| (g, GenusTerm { coefficient: Rational::new(c as i64, fact as i64), n_power: f }))
        .collect())
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McResult {
    pub fn to_json(&self, digits: u32) -> Value {
        let fmt = |x: f64| crate::bigfloat::BigFloat::from_f64(x, 64).to_decimal(digits.min(17) as usize);
        json!({
            "estimate": fmt(self.estimate),
            "stderr": fmt(self.stderr),
            "samples": self.samples,
            "seed": self.seed,
        })
    }
}

type Cx = (f64, f64);

fn sample_gue(n: usize, rng: &mut ChaCha8Rng) -> Vec<Cx> {
    let mut m = vec![(0.0, 0.0); n * n];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let d: f64 = StandardNormal.sample(rng);
        m[i * n + i] = (d, 0.0);
        for j in i + 1..n {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            m[i * n + j] = (a * s, b * s);
            m[j * n + i] = (a * s, -b * s);
        }
    }
    m
}

fn matmul(a: &[Cx], b: &[Cx], n: usize) -> Vec<Cx> {
    let mut c = vec![(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let (ar, ai) = a[i * n + k];
            for j in 0..n {
                let (br, bi) = b[k * n + j];
                let e = &mut c[i * n + j];
                e.0 += ar * br - ai * bi;
                e.1 += ar * bi + ai * br;
            }
        }
    }
    c
}

fn observable(tw: &TraceWord, x: &[Cx], n: usize) -> f64 {
    let kmax = *tw.powers.iter().max().expect("nonempty") as usize;
    let mut traces = vec![0.0; kmax + 1];
    let mut p = x.to_vec();
    for k in 1..=kmax {
        if k > 1 {
            p = matmul(&p, x, n);
        }
        traces[k] = (0..n).map(|i| p[i * n + i].0).sum();
    }
    tw.powers.iter().map(|&k| traces[k as usize]).product()
}

/// Monte Carlo mean of ∏ Tr X^{kᵢ} for N×N GUE matrices.
///
/// Samples are drawn in fixed chunks, chunk c from the ChaCha8 stream c of
/// `seed`, and merged in chunk order, so the result does not depend on `jobs`.
pub fn mc_moment(tw: &TraceWord, n: usize, samples: u64, seed: u64, jobs: usize) -> Result<McResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    if samples > MAX_MC_SAMPLES {
        return Err(Error::SizeOutOfRange(format!("samples {samples} exceed {MAX_MC_SAMPLES}")));
    }
    if n == 0 || n > MAX_MC_N {
        return Err(Error::SizeOutOfRange(format!("N = {n} not in 1..={MAX_MC_N}")));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let run_chunk = |c: u64| -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..count {
            let x = sample_gue(n, &mut rng);
            let v = observable(tw, &x, n);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let parts: Vec<(f64, f64)> = pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect());
    let (mut s, mut s2) = (0.0, 0.0);
    for (a, b) in parts {
        s += a;
        s2 += b;
    }
    let m = samples as f64;
    let mean = s / m;
    let var = if samples > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(McResult { estimate: mean, stderr: (var / m).sqrt(), samples, seed })
}

/// χ(M_{g,1}) = ζ(1 − 2g).
pub fn penner_chi(g: usize) -> Result<Rational> {
    zeta_nonpositive(g)
}
