//! Connes–Kreimer rooted trees and forests.
//!
//! Trees are stored canonically: children sorted ascending by their
//! balanced-parenthesis encodings, so `()` is a single vertex, `(())` the
//! two-vertex ladder, `(()())` the two-leaf corolla.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{LinComb, Rational};

#[derive(Clone)]
pub struct RootedTree {
    children: Vec<RootedTree>,
    code: String,
}

impl RootedTree {
    /// Builds a canonical tree from arbitrary (possibly unsorted) children.
    pub fn new(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        let mut code = String::with_capacity(2 + children.iter().map(|c| c.code.len()).sum::<usize>());
        code.push('(');
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(')');
        RootedTree { children, code }
    }

    pub fn leaf() -> Self {
        RootedTree::new(Vec::new())
    }

    /// Ladder (path) with n vertices.
    pub fn ladder(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(RootedTree::leaf(), |t, _| RootedTree::new(vec![t]))
    }

    /// Root with n leaf children.
    pub fn corolla(n: usize) -> Self {
        RootedTree::new(vec![RootedTree::leaf(); n])
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn encoding(&self) -> &str {
        &self.code
    }

    pub fn vertex_count(&self) -> usize {
        self.code.len() / 2
    }

    /// Rebuild from children; canonical form is idempotent.
    pub fn canonicalize(&self) -> RootedTree {
        RootedTree::new(self.children.iter().map(|c| c.canonicalize()).collect())
    }

    /// Construct without sorting, for tests of canonicalisation.
    pub fn raw(children: Vec<RootedTree>) -> Self {
        let mut code = String::from("(");
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(')');
        RootedTree { children, code }
    }
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for RootedTree {}

impl Hash for RootedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code.cmp(&other.code)
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree{}", self.code)
    }
}

fn parse_tree_at(bytes: &[u8], pos: &mut usize, base: usize) -> Result<RootedTree> {
    if bytes.get(*pos) != Some(&b'(') {
        return Err(Error::parse(base + *pos, "expected '('"));
    }
    *pos += 1;
    let mut children = Vec::new();
    loop {
        match bytes.get(*pos) {
            Some(b'(') => children.push(parse_tree_at(bytes, pos, base)?),
            Some(b')') => {
                *pos += 1;
                return Ok(RootedTree::new(children));
            }
            Some(&c) => return Err(Error::parse(base + *pos, format!("unexpected character {:?} in tree", c as char))),
            None => return Err(Error::parse(base + *pos, "unbalanced parentheses")),
        }
    }
}

impl FromStr for RootedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let t = parse_tree_at(bytes, &mut pos, 0)?;
        if pos != bytes.len() {
            return Err(Error::parse(pos, "trailing characters after tree"));
        }
        Ok(t)
    }
}

/// Commutative monomial of trees; the empty forest is the unit.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<RootedTree>);

impl Forest {
    pub fn new(mut trees: Vec<RootedTree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn single(t: RootedTree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.0.iter().map(|t| t.vertex_count()).sum()
    }

    pub fn product(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Forest::new(v)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<&str> = self.0.iter().map(|t| t.encoding()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forest[{self}]")
    }
}

/// Whitespace-separated trees; `1` or an empty string is the unit.
impl FromStr for Forest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "1" {
            return Ok(Forest::unit());
        }
        let mut trees = Vec::new();
        let mut offset = 0;
        for piece in s.split(char::is_whitespace) {
            if !piece.is_empty() {
                let mut pos = 0;
                let t = parse_tree_at(piece.as_bytes(), &mut pos, offset)?;
                if pos != piece.len() {
                    return Err(Error::parse(offset + pos, "trailing characters after tree"));
                }
                trees.push(t);
            }
            offset += piece.len() + 1;
        }
        Ok(Forest::new(trees))
    }
}

/// Tensor basis element for coproducts.
pub type Tensor2 = (Forest, Forest);

pub fn forest_mul(a: &Forest, b: &Forest) -> LinComb<Forest> {
    LinComb::basis(a.product(b))
}

pub fn tensor_mul(a: &Tensor2, b: &Tensor2) -> LinComb<Tensor2> {
    LinComb::basis((a.0.product(&b.0), a.1.product(&b.1)))
}

/// Generate all canonical rooted trees with n vertices.
pub fn generate_trees(n: usize) -> Result<Vec<RootedTree>> {
    if !(1..=10).contains(&n) {
        return Err(Error::SizeOutOfRange(format!("tree size {n} not in 1..=10")));
    }
    let mut level: BTreeSet<RootedTree> = BTreeSet::from([RootedTree::leaf()]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for t in &level {
            for g in graft(t, &RootedTree::leaf()).iter() {
                next.insert(g.0.clone());
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

/// B⁺: a fresh root over the trees of the forest.
pub fn b_plus(f: &Forest) -> RootedTree {
    RootedTree::new(f.trees().to_vec())
}

/// Options within a subtree: (cut-off pieces, what remains attached).
fn cut_options(t: &RootedTree) -> Vec<(Vec<RootedTree>, RootedTree)> {
    // combine children: for each child either cut its edge or recurse
    let mut partial: Vec<(Vec<RootedTree>, Vec<RootedTree>)> = vec![(Vec::new(), Vec::new())];
    for child in t.children() {
        let mut child_opts: Vec<(Vec<RootedTree>, Option<RootedTree>)> = vec![(vec![child.clone()], None)];
        child_opts.extend(cut_options(child).into_iter().map(|(p, r)| (p, Some(r))));
        let mut next = Vec::with_capacity(partial.len() * child_opts.len());
        for (pruned, kept) in &partial {
            for (cp, ck) in &child_opts {
                let mut p = pruned.clone();
                p.extend_from_slice(cp);
                let mut k = kept.clone();
                if let Some(c) = ck {
                    k.push(c.clone());
                }
                next.push((p, k));
            }
        }
        partial = next;
    }
    partial.into_iter().map(|(p, k)| (p, RootedTree::new(k))).collect()
}

/// All nonempty admissible cuts as (pruned forest, trunk), with multiplicity.
pub fn admissible_cuts(t: &RootedTree) -> Vec<(Forest, RootedTree)> {
    cut_options(t)
        .into_iter()
        .filter(|(p, _)| !p.is_empty())
        .map(|(p, trunk)| (Forest::new(p), trunk))
        .collect()
}

/// Δ(t) = t⊗1 + 1⊗t + Σ_cuts pruned ⊗ trunk.
pub fn coproduct(t: &RootedTree) -> LinComb<Tensor2> {
    let mut out = LinComb::zero();
    out.add_term((Forest::single(t.clone()), Forest::unit()), Rational::one());
    out.add_term((Forest::unit(), Forest::single(t.clone())), Rational::one());
    for (p, trunk) in admissible_cuts(t) {
        out.add_term((p, Forest::single(trunk)), Rational::one());
    }
    out
}

/// Δ extended multiplicatively to a forest; Δ(1) = 1⊗1.
pub fn coproduct_forest(f: &Forest) -> LinComb<Tensor2> {
    f.trees().iter().fold(LinComb::basis((Forest::unit(), Forest::unit())), |acc, t| acc.mul(&coproduct(t), tensor_mul))
}

/// Linear extension of Δ to combinations of forests.
pub fn coproduct_lin(a: &LinComb<Forest>) -> LinComb<Tensor2> {
    a.map_linear(coproduct_forest)
}

/// S(t) = −t − Σ_cuts S(pruned)·trunk, multiplicative on forests.
pub fn antipode(t: &RootedTree) -> LinComb<Forest> {
    let mut out = LinComb::term(Forest::single(t.clone()), Rational::from(-1));
    for (p, trunk) in admissible_cuts(t) {
        let sp = antipode_forest(&p);
        let term = sp.mul(&LinComb::basis(Forest::single(trunk)), forest_mul);
        out = out.sub(&term);
    }
    out
}

pub fn antipode_forest(f: &Forest) -> LinComb<Forest> {
    f.trees().iter().fold(LinComb::basis(Forest::unit()), |acc, t| acc.mul(&antipode(t), forest_mul))
}

/// Pre-Lie grafting t₁ ◁ t₂: attach t₂ under each vertex of t₁ in turn.
pub fn graft(t1: &RootedTree, t2: &RootedTree) -> LinComb<RootedTree> {
    fn attach_everywhere(t: &RootedTree, g: &RootedTree, out: &mut Vec<RootedTree>) {
        let mut at_root = t.children().to_vec();
        at_root.push(g.clone());
        out.push(RootedTree::new(at_root));
        for (i, child) in t.children().iter().enumerate() {
            let mut sub = Vec::new();
            attach_everywhere(child, g, &mut sub);
            for replaced in sub {
                let mut cs = t.children().to_vec();
                cs[i] = replaced;
                out.push(RootedTree::new(cs));
            }
        }
    }
    let mut all = Vec::with_capacity(t1.vertex_count());
    attach_everywhere(t1, t2, &mut all);
    all.into_iter().map(|t| (t, Rational::one())).collect()
}

pub fn graft_lin(a: &LinComb<RootedTree>, b: &LinComb<RootedTree>) -> LinComb<RootedTree> {
    a.mul(b, graft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> RootedTree {
        s.parse().unwrap()
    }

    fn f(s: &str) -> Forest {
        s.parse().unwrap()
    }

    fn lc<B: Ord + Clone>(terms: Vec<(B, i64)>) -> LinComb<B> {
        terms.into_iter().map(|(b, n)| (b, Rational::from(n))).collect()
    }

    // Rooted trees counted by Otter's recurrence (OEIS A000081):
    // a(n+1) = (1/n) Σ_{k=1..n} (Σ_{d|k} d·a(d)) · a(n−k+1).
    fn otter_counts(max: usize) -> Vec<u64> {
        let mut a = vec![0u64; max + 1];
        a[1] = 1;
        for n in 1..max {
            let mut s = 0u64;
            for k in 1..=n {
                let c: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * a[d]).sum();
                s += c * a[n - k + 1];
            }
            a[n + 1] = s / n as u64;
        }
        a
    }

    fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> RootedTree {
        // random recursive tree built unsorted through a parent array
        let parents: Vec<usize> = (1..n).map(|i| rng.random_range(0..i)).collect();
        fn build(v: usize, parents: &[usize], rng: &mut ChaCha8Rng) -> RootedTree {
            let mut kids: Vec<RootedTree> =
                (1..=parents.len()).filter(|&c| parents[c - 1] == v).map(|c| build(c, parents, rng)).collect();
            // shuffle to avoid accidentally canonical input
            for i in (1..kids.len()).rev() {
                let j = rng.random_range(0..=i);
                kids.swap(i, j);
            }
            RootedTree::raw(kids)
        }
        build(0, &parents, rng)
    }

    #[test]
    fn canonical_form_is_order_independent() {
        let a = RootedTree::raw(vec![RootedTree::ladder(2), RootedTree::leaf()]);
        let b = RootedTree::raw(vec![RootedTree::leaf(), RootedTree::ladder(2)]);
        assert_ne!(a.encoding(), b.encoding());
        assert_eq!(a.canonicalize(), b.canonicalize());
        assert_eq!(RootedTree::leaf().canonicalize(), RootedTree::leaf());
    }

    #[test]
    fn canonicalize_idempotent_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let raw = random_tree(&mut rng, n);
            let c = raw.canonicalize();
            assert_eq!(c.canonicalize().encoding(), c.encoding());
            assert_eq!(c.vertex_count(), n);
            assert_eq!(t(c.encoding()), c);
        }
    }

    #[test]
    fn tree_counts_match_otter() {
        let counts = otter_counts(10);
        assert_eq!(&counts[1..=8], &[1, 1, 2, 4, 9, 20, 48, 115]);
        for n in 1..=9 {
            assert_eq!(generate_trees(n).unwrap().len() as u64, counts[n], "n = {n}");
        }
        assert!(generate_trees(0).is_err());
        assert!(generate_trees(11).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("(()".parse::<RootedTree>(), Err(Error::Parse { position: 3, .. })));
        assert!(matches!("()x".parse::<RootedTree>(), Err(Error::Parse { position: 2, .. })));
        assert!(matches!("() (x)".parse::<Forest>(), Err(Error::Parse { position: 4, .. })));
        assert_eq!(f("(()) ()"), Forest::new(vec![RootedTree::leaf(), RootedTree::ladder(2)]));
    }

    #[test]
    fn b_plus_examples() {
        assert_eq!(b_plus(&Forest::unit()), RootedTree::leaf());
        assert_eq!(b_plus(&f("() ()")), RootedTree::corolla(2));
        assert_eq!(b_plus(&f("(())")), RootedTree::ladder(3));
    }

    #[test]
    fn cut_examples() {
        assert_eq!(admissible_cuts(&t("(())")), vec![(f("()"), t("()"))]);
        assert!(admissible_cuts(&t("()")).is_empty());
        let mut cuts = admissible_cuts(&t("(()())"));
        cuts.sort();
        assert_eq!(cuts, vec![(f("()"), t("(())")), (f("()"), t("(())")), (f("() ()"), t("()"))]);
    }

    #[test]
    fn coproduct_examples() {
        let one = Forest::unit;
        assert_eq!(coproduct(&t("()")), lc(vec![((f("()"), one()), 1), ((one(), f("()")), 1)]));
        assert_eq!(
            coproduct(&t("(())")),
            lc(vec![((f("(())"), one()), 1), ((one(), f("(())")), 1), ((f("()"), f("()")), 1)])
        );
        assert_eq!(
            coproduct(&t("(()())")),
            lc(vec![
                ((f("(()())"), one()), 1),
                ((one(), f("(()())")), 1),
                ((f("()"), f("(())")), 2),
                ((f("() ()"), f("()")), 1),
            ])
        );
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(antipode(&t("()")), lc(vec![(f("()"), -1)]));
        assert_eq!(antipode(&t("(())")), lc(vec![(f("(())"), -1), (f("() ()"), 1)]));
    }

    type T3 = (Forest, Forest, Forest);

    fn coassoc_sides(x: &LinComb<Tensor2>) -> (LinComb<T3>, LinComb<T3>) {
        let left = x.map_linear(|(a, b)| {
            coproduct_forest(a).map_linear(|(p, q)| LinComb::basis((p.clone(), q.clone(), b.clone())))
        });
        let right = x.map_linear(|(a, b)| {
            coproduct_forest(b).map_linear(|(p, q)| LinComb::basis((a.clone(), p.clone(), q.clone())))
        });
        (left, right)
    }

    #[test]
    fn coproduct_coassociative() {
        for n in 1..=5 {
            for tree in generate_trees(n).unwrap() {
                let (l, r) = coassoc_sides(&coproduct(&tree));
                assert_eq!(l, r, "tree {tree}");
            }
        }
    }

    #[test]
    fn antipode_convolution_identities() {
        for n in 1..=4 {
            for tree in generate_trees(n).unwrap() {
                let d = coproduct(&tree);
                let left = d.map_linear(|(a, b)| antipode_forest(a).mul(&LinComb::basis(b.clone()), forest_mul));
                let right = d.map_linear(|(a, b)| LinComb::basis(a.clone()).mul(&antipode_forest(b), forest_mul));
                assert!(left.is_zero(), "S*id on {tree}: {left:?}");
                assert!(right.is_zero(), "id*S on {tree}: {right:?}");
            }
        }
    }

    #[test]
    fn coproduct_is_multiplicative_on_forests() {
        let trees: Vec<RootedTree> = (1..=4).flat_map(|n| generate_trees(n).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let a = &trees[rng.random_range(0..trees.len())];
            let b = &trees[rng.random_range(0..trees.len())];
            if a.vertex_count() + b.vertex_count() > 6 {
                continue;
            }
            let fa = Forest::single(a.clone());
            let fb = Forest::single(b.clone());
            let whole = coproduct_forest(&fa.product(&fb));
            // independent route: cuts of the forest via B+ and the cocycle identity
            // Δ(B⁺(f)) = B⁺(f)⊗1 + (id⊗B⁺)Δ(f)
            let joined = b_plus(&fa.product(&fb));
            let via_cocycle = coproduct(&joined)
                .sub(&LinComb::basis((Forest::single(joined.clone()), Forest::unit())));
            let lifted = whole.map_linear(|(p, q)| LinComb::basis((p.clone(), Forest::single(b_plus(q)))));
            assert_eq!(via_cocycle, lifted);
            assert_eq!(whole, coproduct(a).mul(&coproduct(b), tensor_mul));
        }
    }

    #[test]
    fn graft_examples() {
        let leaf = RootedTree::leaf();
        assert_eq!(graft(&leaf, &leaf), LinComb::basis(RootedTree::ladder(2)));
        assert_eq!(
            graft(&RootedTree::ladder(2), &leaf),
            lc(vec![(RootedTree::ladder(3), 1), (RootedTree::corolla(2), 1)])
        );
        assert_eq!(graft(&leaf, &RootedTree::ladder(2)), LinComb::basis(RootedTree::ladder(3)));
        for n in 1..=5 {
            for tree in generate_trees(n).unwrap() {
                assert_eq!(graft(&tree, &leaf).mass(), Rational::from(n as i64));
            }
        }
    }

    #[test]
    fn pre_lie_identity() {
        let trees: Vec<RootedTree> = (1..=3).flat_map(|n| generate_trees(n).unwrap()).collect();
        let g = |x: &LinComb<RootedTree>, y: &LinComb<RootedTree>| graft_lin(x, y);
        for a in &trees {
            for b in &trees {
                for c in &trees {
                    let (a, b, c) = (LinComb::basis(a.clone()), LinComb::basis(b.clone()), LinComb::basis(c.clone()));
                    let lhs = g(&g(&a, &b), &c).sub(&g(&a, &g(&b, &c)));
                    let rhs = g(&g(&a, &c), &b).sub(&g(&a, &g(&c, &b)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
